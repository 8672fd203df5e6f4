use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ClassReport;
use crate::distributions::{MomentCheck, Quadratic};
use crate::error::{Error, Result};
use crate::expectation::EngineConfig;
use crate::linalg::{is_psd, jacobi_eigenvalues, loewner_leq, spectral_radius, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// `A_n = (−1)^n (D − S_n) ⪰ 0`
    Poincare,
    /// `L_n ⪯ D`
    Bessel,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theorem::Poincare => f.write_str("poincare"),
            Theorem::Bessel => f.write_str("bessel"),
        }
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "poincare" => Ok(Theorem::Poincare),
            "bessel" => Ok(Theorem::Bessel),
            other => Err(Error::InvalidArgument(format!("unknown theorem `{other}`"))),
        }
    }
}

/// Scalar weights used for order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub k: usize,
    pub poincare: Option<f64>,
    pub bessel: Option<f64>,
    /// `E[q^k(X)]` or `E[q^{[k]}(X)]`.
    pub expected_weight: f64,
    pub null_term: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem: Theorem,
    pub n: usize,
    pub pass: bool,
    pub min_eigenvalue: f64,
    pub tol: f64,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[n={}] {}: {} min-eig={:.6e} tol={:.3e}",
            self.n,
            self.theorem,
            if self.pass { "PASS" } else { "FAIL" },
            // Adding zero turns -0 into 0.
            self.min_eigenvalue + 0.0,
            self.tol
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub matrix: String,
    pub eigenvalues: Vec<f64>,
}

/// One row of the eigenvalue CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub n: usize,
    pub matrix: String,
    pub index: usize,
    pub eigenvalue: f64,
}

/// Largest error bracket among the expectations behind each matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Brackets {
    pub d: f64,
    pub h: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub distribution: String,
    pub discrete: bool,
    pub mean: f64,
    pub quadratic: Quadratic,
    pub functions: Vec<String>,
    pub engine: EngineConfig,
    pub rel_tol: f64,
    /// `E[g_i(X)]`.
    pub means: Vec<f64>,
    pub moments: MomentCheck,
    pub classes: Vec<ClassReport>,
    pub brackets: Brackets,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub p: usize,
    pub d: SymMatrix,
    pub h: Vec<SymMatrix>,
    pub b: Vec<SymMatrix>,
    pub s_n: Option<SymMatrix>,
    pub l_n: Option<SymMatrix>,
    pub a_n: Option<SymMatrix>,
    pub coefficients: Vec<Coefficient>,
    pub verdicts: Vec<Verdict>,
    pub spectra: Vec<Spectrum>,
    pub provenance: Provenance,
}

fn verdicts_for(
    n: usize,
    d: &SymMatrix,
    a_n: Option<&SymMatrix>,
    l_n: Option<&SymMatrix>,
    rel_tol: f64,
) -> Result<Vec<Verdict>> {
    let tol = rel_tol * (1.0 + spectral_radius(d)?);
    let mut out = Vec::new();
    if let Some(a) = a_n {
        let v = is_psd(a, tol)?;
        out.push(Verdict {
            theorem: Theorem::Poincare,
            n,
            pass: v.pass,
            min_eigenvalue: v.min_eigenvalue,
            tol,
        });
    }
    if let Some(l) = l_n {
        let v = loewner_leq(l, d, tol)?;
        out.push(Verdict {
            theorem: Theorem::Bessel,
            n,
            pass: v.pass,
            min_eigenvalue: v.min_eigenvalue,
            tol,
        });
    }
    Ok(out)
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        n: usize,
        d: SymMatrix,
        h: Vec<SymMatrix>,
        b: Vec<SymMatrix>,
        s_n: Option<SymMatrix>,
        l_n: Option<SymMatrix>,
        a_n: Option<SymMatrix>,
        coefficients: Vec<Coefficient>,
        provenance: Provenance,
    ) -> Result<Self> {
        let verdicts = verdicts_for(n, &d, a_n.as_ref(), l_n.as_ref(), provenance.rel_tol)?;
        let mut spectra = vec![Spectrum {
            matrix: "D".into(),
            eigenvalues: jacobi_eigenvalues(&d)?,
        }];
        let mut push = |name: &str, m: &SymMatrix| -> Result<()> {
            spectra.push(Spectrum {
                matrix: name.into(),
                eigenvalues: jacobi_eigenvalues(m)?,
            });
            Ok(())
        };
        if let Some(s) = &s_n {
            push("S_n", s)?;
        }
        if let Some(a) = &a_n {
            push("A_n", a)?;
        }
        if let Some(l) = &l_n {
            push("L_n", l)?;
            push("D-L_n", &d.sub(l)?)?;
        }
        Ok(Self {
            n,
            p: d.order(),
            d,
            h,
            b,
            s_n,
            l_n,
            a_n,
            coefficients,
            verdicts,
            spectra,
            provenance,
        })
    }

    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, theorem: Theorem) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.theorem == theorem)
    }

    /// Re-runs the verdict logic on the stored matrices.
    pub fn reverify(&self) -> Result<Vec<Verdict>> {
        verdicts_for(
            self.n,
            &self.d,
            self.a_n.as_ref(),
            self.l_n.as_ref(),
            self.provenance.rel_tol,
        )
    }

    pub fn eigen_rows(&self) -> Vec<EigenRow> {
        self.spectra
            .iter()
            .flat_map(|s| {
                s.eigenvalues.iter().enumerate().map(move |(i, &v)| EigenRow {
                    n: self.n,
                    matrix: s.matrix.clone(),
                    index: i,
                    eigenvalue: v,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }
}
