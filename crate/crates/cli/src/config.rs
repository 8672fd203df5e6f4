//! Run configuration: a JSON document merged with command-line flags, flags winning.
//!
//! ```json
//! {
//!   "distribution": {"family": "poisson", "params": {"lambda": 2}},
//!   "functions": "functions.json",
//!   "orders": [1, 2],
//!   "theorems": ["poincare", "bessel"],
//!   "engine": {"quad_nodes": 400},
//!   "rel_tol": 1e-6,
//!   "output": {"json": "report.json", "csv": "eigen.csv", "verbosity": "quiet"}
//! }
//! ```
//!
//! String-valued `distribution` and `functions` entries are file paths resolved against
//! the directory of the configuration file; a distribution string that is not a path may
//! also use the inline `name:key=value` form.

use std::fs;
use std::path::{Path, PathBuf};

use matvar_core::calculus::FunctionsDocument;
use matvar_core::expectation::InfiniteMap;
use matvar_core::{
    BoundsConfig, Distribution, DistributionDocument, EngineConfig, FunctionTuple, Theorem,
};
use serde::{Deserialize, Serialize};

use crate::args::Common;
use crate::failure::{CliResult, Failure};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Reference(String),
    Inline(T),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineOverrides {
    pub quad_nodes: Option<usize>,
    pub infinite_map: Option<InfiniteMap>,
    pub trunc_tol: Option<f64>,
    pub mc_samples: Option<usize>,
    pub mc_seed: Option<u64>,
    pub bracket_ceiling: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    #[default]
    Normal,
    Quiet,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub verbosity: Verbosity,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub distribution: Option<Source<DistributionDocument>>,
    pub functions: Option<Source<FunctionsDocument>>,
    #[serde(default)]
    pub orders: Vec<usize>,
    #[serde(default)]
    pub theorems: Vec<Theorem>,
    #[serde(default)]
    pub engine: EngineOverrides,
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}

/// Everything a subcommand needs, after merging.
pub struct Job {
    pub dist: Option<Distribution>,
    pub functions: Option<FunctionTuple>,
    pub orders: Vec<usize>,
    pub theorems: Vec<Theorem>,
    pub bounds: BoundsConfig,
    /// `--tol` / `rel_tol` as given, before defaults.
    pub tol: Option<f64>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub quiet: bool,
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || s.contains('\\')
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load_distribution(src: &Source<DistributionDocument>, base: &Path) -> CliResult<Distribution> {
    let doc = match src {
        Source::Inline(doc) => doc.clone(),
        Source::Reference(s) => {
            let path = base.join(s);
            if path.is_file() || looks_like_path(s) {
                DistributionDocument::from_json(&read(&path)?)
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
            } else {
                DistributionDocument::from_inline(s)?
            }
        }
    };
    Ok(doc.build()?)
}

fn load_functions(src: &Source<FunctionsDocument>, base: &Path) -> CliResult<FunctionTuple> {
    match src {
        Source::Inline(doc) => Ok(FunctionTuple::from_document(doc)?),
        Source::Reference(s) if s.trim_start().starts_with('{') => Ok(FunctionTuple::from_json(s)?),
        Source::Reference(s) => {
            let path = base.join(s);
            FunctionTuple::from_json(&read(&path)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
    }
}

impl Job {
    pub fn resolve(args: &Common) -> CliResult<Self> {
        let (cfg, base) = match &args.config {
            Some(path) => (
                RunConfig::load(path)?,
                path.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (RunConfig::default(), PathBuf::new()),
        };
        let here = PathBuf::new();

        let dist = match (&args.dist, &cfg.distribution) {
            (Some(s), _) => Some(load_distribution(&Source::Reference(s.clone()), &here)?),
            (None, Some(src)) => Some(load_distribution(src, &base)?),
            (None, None) => None,
        };
        let functions = match (&args.functions, &cfg.functions) {
            (Some(s), _) => Some(load_functions(&Source::Reference(s.clone()), &here)?),
            (None, Some(src)) => Some(load_functions(src, &base)?),
            (None, None) => None,
        };

        let mut engine = EngineConfig::default();
        let e = &cfg.engine;
        engine.quad_nodes = args.quad_nodes.or(e.quad_nodes).unwrap_or(engine.quad_nodes);
        engine.infinite_map = e.infinite_map.unwrap_or(engine.infinite_map);
        engine.trunc_tol = args.trunc_tol.or(e.trunc_tol).unwrap_or(engine.trunc_tol);
        engine.mc_samples = args.mc_samples.or(e.mc_samples).unwrap_or(engine.mc_samples);
        engine.mc_seed = args.mc_seed.or(e.mc_seed).unwrap_or(engine.mc_seed);
        engine.bracket_ceiling = e.bracket_ceiling.or(engine.bracket_ceiling);
        engine.validate()?;

        let tol = args.tol.or(cfg.rel_tol);
        if let Some(t) = tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Failure::usage(format!("invalid tolerance {t}")));
            }
        }
        let mut bounds = BoundsConfig {
            engine,
            ..BoundsConfig::default()
        };
        if let Some(t) = tol {
            bounds.rel_tol = t;
        }

        let orders = args.n.clone().unwrap_or(cfg.orders);
        if orders.contains(&0) {
            return Err(Failure::usage("orders must be at least 1"));
        }
        let mut theorems = args.theorems.clone().unwrap_or(cfg.theorems);
        if theorems.is_empty() {
            theorems = vec![Theorem::Poincare, Theorem::Bessel];
        }
        theorems.sort();
        theorems.dedup();

        Ok(Self {
            dist,
            functions,
            orders,
            theorems,
            bounds,
            tol,
            json: args.out_json.clone().or(cfg.output.json.map(|p| base.join(p))),
            csv: args.out_csv.clone().or(cfg.output.csv.map(|p| base.join(p))),
            quiet: args.quiet || cfg.output.verbosity == Verbosity::Quiet,
        })
    }

    pub fn distribution(&self) -> CliResult<&Distribution> {
        self.dist
            .as_ref()
            .ok_or_else(|| Failure::usage("no distribution given (use --dist or a config file)"))
    }

    pub fn tuple(&self) -> CliResult<&FunctionTuple> {
        self.functions
            .as_ref()
            .ok_or_else(|| Failure::usage("no function tuple given (use --functions or a config file)"))
    }

    pub fn orders(&self) -> CliResult<&[usize]> {
        if self.orders.is_empty() {
            return Err(Failure::usage("no orders given (use --n or `orders` in the config)"));
        }
        Ok(&self.orders)
    }
}
