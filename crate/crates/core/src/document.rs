//! JSON documents describing distributions.
//!
//! ```json
//! {"family": "beta", "params": {"a": 2, "b": 3}}
//! {"custom": {"kind": "discrete", "mean": 0.3, "quadratic": [0, -0.3, 0.3],
//!             "support": [0, 1], "pmf_table": [[0, 0.7], [1, 0.3]]}}
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    catalog, ContinuousIP, Density, DensityTable, DiscreteCO, DiscreteSampler, Distribution, PmfTable,
    Quadratic,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub kind: Kind,
    pub mean: f64,
    #[serde(default)]
    pub quadratic: Option<[f64; 3]>,
    /// `null` marks an infinite end.
    pub support: [Option<f64>; 2],
    #[serde(default)]
    pub density_table: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub pmf_table: Option<Vec<(i64, f64)>>,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionDocument {
    Catalog {
        family: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Custom {
        custom: CustomSpec,
    },
}

fn integer_end(v: Option<f64>, which: &str) -> Result<Option<i64>> {
    match v {
        None => Ok(None),
        Some(x) if x.fract() == 0.0 && x.abs() < 9e15 => Ok(Some(x as i64)),
        Some(x) => Err(Error::Document(format!("{which} support end {x} is not an integer"))),
    }
}

impl CustomSpec {
    fn build(&self) -> Result<Distribution> {
        let quadratic = self
            .quadratic
            .map(|[d, b, g]| Quadratic::new(d, b, g))
            .transpose()?;
        match self.kind {
            Kind::Continuous => {
                if self.pmf_table.is_some() {
                    return Err(Error::Document("a continuous member takes a density_table".into()));
                }
                let table = self
                    .density_table
                    .as_ref()
                    .ok_or_else(|| Error::Document("custom continuous member needs density_table".into()))?;
                let t = DensityTable::new(table.iter().map(|[x, f]| (*x, *f)).collect())?;
                let lo = self.support[0].unwrap_or(f64::NEG_INFINITY);
                let hi = self.support[1].unwrap_or(f64::INFINITY);
                let name = self.name.clone().unwrap_or_else(|| "custom-continuous".into());
                let c = ContinuousIP::new(name, self.mean, (lo, hi), Density::Table(Arc::new(t)))?;
                Ok(match quadratic {
                    Some(q) => c.with_quadratic(q),
                    None => c,
                }
                .into())
            }
            Kind::Discrete => {
                if self.density_table.is_some() {
                    return Err(Error::Document("a discrete member takes a pmf_table".into()));
                }
                let table = self
                    .pmf_table
                    .as_ref()
                    .ok_or_else(|| Error::Document("custom discrete member needs pmf_table".into()))?;
                let t = PmfTable::new(table.clone())?;
                let lo = integer_end(self.support[0], "lower")?;
                let hi = integer_end(self.support[1], "upper")?;
                let name = self.name.clone().unwrap_or_else(|| "custom-discrete".into());
                let d = DiscreteCO::new(name, self.mean, (lo, hi), Arc::new(move |j| t.get(j)))?
                    .with_sampler(DiscreteSampler::Inversion);
                Ok(match quadratic {
                    Some(q) => d.with_quadratic(q),
                    None => d,
                }
                .into())
            }
        }
    }
}

impl DistributionDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn build(&self) -> Result<Distribution> {
        match self {
            DistributionDocument::Catalog { family, params } => catalog(family, params),
            DistributionDocument::Custom { custom } => custom.build(),
        }
    }

    /// Parses the inline form `name:key=value,key=value`, e.g. `poisson:lambda=2`.
    pub fn from_inline(spec: &str) -> Result<Self> {
        let (family, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = BTreeMap::new();
        for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Document(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Document(format!("`{v}` is not a number")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(DistributionDocument::Catalog {
            family: family.trim().to_string(),
            params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_documents() {
        let d = DistributionDocument::from_json(r#"{"family": "poisson", "params": {"lambda": 2}}"#)
            .unwrap()
            .build()
            .unwrap();
        assert!(d.is_discrete());
        assert_eq!(d.mean(), 2.0);
        let i = DistributionDocument::from_inline("beta:a=2, b=3").unwrap().build().unwrap();
        assert!((i.mean() - 0.4).abs() < 1e-15);
        assert!(DistributionDocument::from_inline("beta:a").is_err());
        assert!(DistributionDocument::from_inline("cauchy").unwrap().build().is_err());
    }

    #[test]
    fn custom_documents() {
        let text = r#"{"custom": {"kind": "discrete", "mean": 0.3, "quadratic": [0, -0.3, 0.3],
            "support": [0, 1], "pmf_table": [[0, 0.7], [1, 0.3]]}}"#;
        let d = DistributionDocument::from_json(text).unwrap().build().unwrap();
        assert_eq!(d.q().unwrap(), Quadratic::new(0.0, -0.3, 0.3).unwrap());
        assert!(d.has_sampler());

        let text = r#"{"custom": {"kind": "continuous", "mean": 0.5, "quadratic": null,
            "support": [0, 1], "density_table": [[0, 1], [1, 1]]}}"#;
        let c = DistributionDocument::from_json(text).unwrap().build().unwrap();
        assert!(c.quadratic().is_none());
        assert!(!c.has_sampler());

        let bad = r#"{"custom": {"kind": "continuous", "mean": 0.5, "support": [0, 1]}}"#;
        assert!(DistributionDocument::from_json(bad).unwrap().build().is_err());
    }
}
