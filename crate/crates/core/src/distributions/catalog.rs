//! Standard family members with their quadratics.
//!
//! Normal, Beta and Poisson quadratics are the textbook ones; the Gamma, Binomial,
//! Negative Binomial and Hypergeometric quadratics were obtained with
//! [`infer_quadratic`](super::infer_quadratic) and are re-derived by the regression
//! tests in `tests/catalog_regression.rs`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use super::{
    ContinuousIP, ContinuousSampler, Density, DiscreteCO, DiscreteSampler, Distribution, Quadratic,
};
use crate::error::{Error, Result};

pub const CATALOG_NAMES: [&str; 8] = [
    "normal",
    "gamma",
    "beta",
    "student-t",
    "poisson",
    "binomial",
    "negative-binomial",
    "hypergeometric",
];

fn invalid(family: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        family: family.to_string(),
        reason: reason.into(),
    }
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

fn as_count(family: &str, name: &str, v: f64) -> Result<i64> {
    if v.fract() != 0.0 || v < 0.0 || v > 1e9 {
        return Err(invalid(family, format!("{name} must be a nonnegative integer, got {v}")));
    }
    Ok(v as i64)
}

/// Looks up a family by name. Parameter keys per family:
///
/// | family | keys |
/// |---|---|
/// | normal | `mean` (0), `var` (1) or `sd` |
/// | gamma | `shape`, `scale` (or `rate`) |
/// | beta | `a`, `b` |
/// | student-t | `nu` (> 1) |
/// | poisson | `lambda` |
/// | binomial | `n`, `p` |
/// | negative-binomial | `r`, `p` (success probability; counts failures) |
/// | hypergeometric | `population`, `successes`, `draws` |
pub fn catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<Distribution> {
    let get = |key: &str| params.get(key).copied();
    let need = |key: &str| get(key).ok_or_else(|| invalid(name, format!("missing parameter `{key}`")));
    let known: &[&str] = match name {
        "normal" => &["mean", "var", "sd"],
        "gamma" => &["shape", "scale", "rate"],
        "beta" => &["a", "b"],
        "student-t" => &["nu"],
        "poisson" => &["lambda"],
        "binomial" => &["n", "p"],
        "negative-binomial" => &["r", "p"],
        "hypergeometric" => &["population", "successes", "draws"],
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(invalid(name, format!("unknown parameter `{k}`")));
    }
    Ok(match name {
        "normal" => {
            let var = match (get("var"), get("sd")) {
                (Some(_), Some(_)) => return Err(invalid(name, "give either `var` or `sd`")),
                (Some(v), None) => v,
                (None, Some(s)) => s * s,
                (None, None) => 1.0,
            };
            normal(get("mean").unwrap_or(0.0), var)?.into()
        }
        "gamma" => {
            let scale = match (get("scale"), get("rate")) {
                (Some(s), None) => s,
                (None, Some(r)) => 1.0 / r,
                _ => return Err(invalid(name, "give exactly one of `scale` or `rate`")),
            };
            gamma(need("shape")?, scale)?.into()
        }
        "beta" => beta(need("a")?, need("b")?)?.into(),
        "student-t" => student_t(need("nu")?)?.into(),
        "poisson" => poisson(need("lambda")?)?.into(),
        "binomial" => binomial(as_count(name, "n", need("n")?)?, need("p")?)?.into(),
        "negative-binomial" => negative_binomial(need("r")?, need("p")?)?.into(),
        _ => hypergeometric(
            as_count(name, "population", need("population")?)?,
            as_count(name, "successes", need("successes")?)?,
            as_count(name, "draws", need("draws")?)?,
        )?
        .into(),
    })
}

/// `N(mean, var)`, quadratic `q ≡ var`.
pub fn normal(mean: f64, var: f64) -> Result<ContinuousIP> {
    if !(var > 0.0 && var.is_finite()) || !mean.is_finite() {
        return Err(invalid("normal", "need finite mean and var > 0"));
    }
    let sd = var.sqrt();
    let norm = 1.0 / (2.0 * PI * var).sqrt();
    let density = Density::Analytic(Arc::new(move |x: f64| {
        let z = x - mean;
        norm * (-0.5 * z * z / var).exp()
    }));
    Ok(ContinuousIP::new(
        format!("normal(mean={mean}, var={var})"),
        mean,
        (f64::NEG_INFINITY, f64::INFINITY),
        density,
    )?
    .with_quadratic(Quadratic::constant(var)?)
    .with_sampler(ContinuousSampler::Normal { mean, sd })
    .with_scale_hint(mean, sd))
}

/// Gamma with density `∝ x^{shape−1} e^{−x/scale}` on `(0, ∞)`, quadratic `q(x) = scale·x`.
pub fn gamma(shape: f64, scale: f64) -> Result<ContinuousIP> {
    if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
        return Err(invalid("gamma", "need shape > 0 and scale > 0"));
    }
    let ln_norm = -ln_gamma(shape) - shape * scale.ln();
    let density = Density::Analytic(Arc::new(move |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (ln_norm + (shape - 1.0) * x.ln() - x / scale).exp()
        }
    }));
    let mean = shape * scale;
    Ok(ContinuousIP::new(
        format!("gamma(shape={shape}, scale={scale})"),
        mean,
        (0.0, f64::INFINITY),
        density,
    )?
    .with_quadratic(Quadratic::new(0.0, scale, 0.0)?)
    .with_sampler(ContinuousSampler::Gamma { shape, scale })
    .with_scale_hint(mean, scale * shape.sqrt()))
}

/// Beta(a, b) on `(0, 1)`, quadratic `q(x) = x(1 − x)/(a + b)`.
pub fn beta(a: f64, b: f64) -> Result<ContinuousIP> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(invalid("beta", "need a > 0 and b > 0"));
    }
    let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    let density = Density::Analytic(Arc::new(move |x: f64| {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            (ln_norm + (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p()).exp()
        }
    }));
    let s = a + b;
    Ok(
        ContinuousIP::new(format!("beta(a={a}, b={b})"), a / s, (0.0, 1.0), density)?
            .with_quadratic(Quadratic::new(-1.0 / s, 1.0 / s, 0.0)?)
            .with_sampler(ContinuousSampler::Beta { a, b }),
    )
}

/// Student t with `nu > 1` degrees of freedom, quadratic `q(x) = (x² + ν)/(ν − 1)`.
pub fn student_t(nu: f64) -> Result<ContinuousIP> {
    if !(nu > 1.0 && nu.is_finite()) {
        return Err(invalid("student-t", "need nu > 1 so that the mean exists"));
    }
    let ln_norm = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * PI).ln();
    let density = Density::Analytic(Arc::new(move |x: f64| {
        (ln_norm - (nu + 1.0) / 2.0 * (x * x / nu).ln_1p()).exp()
    }));
    let sampler = ContinuousSampler::Custom(Arc::new(move |rng| {
        let z = rng.standard_normal();
        let chi2 = rng.gamma(nu / 2.0, 2.0);
        z / (chi2 / nu).sqrt()
    }));
    Ok(ContinuousIP::new(
        format!("student-t(nu={nu})"),
        0.0,
        (f64::NEG_INFINITY, f64::INFINITY),
        density,
    )?
    .with_quadratic(Quadratic::new(1.0 / (nu - 1.0), 0.0, nu / (nu - 1.0))?)
    .with_sampler(sampler)
    .with_scale_hint(0.0, 1.0))
}

/// Poisson(λ), quadratic `q ≡ λ`.
pub fn poisson(lambda: f64) -> Result<DiscreteCO> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("poisson", "need lambda > 0"));
    }
    let ln_l = lambda.ln();
    let pmf = Arc::new(move |j: i64| {
        if j < 0 {
            0.0
        } else {
            (-lambda + j as f64 * ln_l - ln_gamma(j as f64 + 1.0)).exp()
        }
    });
    Ok(
        DiscreteCO::new(format!("poisson(lambda={lambda})"), lambda, (Some(0), None), pmf)?
            .with_quadratic(Quadratic::constant(lambda)?)
            .with_sampler(DiscreteSampler::Inversion),
    )
}

/// Binomial(n, p), quadratic `q(j) = p(n − j)`.
pub fn binomial(n: i64, p: f64) -> Result<DiscreteCO> {
    if n < 1 || !(p > 0.0 && p < 1.0) {
        return Err(invalid("binomial", "need n ≥ 1 and 0 < p < 1"));
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let nf = n as f64;
    let pmf = Arc::new(move |j: i64| {
        if j < 0 || j > n {
            0.0
        } else {
            let k = j as f64;
            (ln_choose(nf, k) + k * ln_p + (nf - k) * ln_q).exp()
        }
    });
    Ok(
        DiscreteCO::new(format!("binomial(n={n}, p={p})"), nf * p, (Some(0), Some(n)), pmf)?
            .with_quadratic(Quadratic::new(0.0, -p, nf * p)?)
            .with_sampler(DiscreteSampler::Inversion),
    )
}

/// Failures before the `r`-th success, success probability `p`;
/// quadratic `q(j) = (1 − p)(j + r)/p`.
pub fn negative_binomial(r: f64, p: f64) -> Result<DiscreteCO> {
    if !(r > 0.0 && r.is_finite() && p > 0.0 && p < 1.0) {
        return Err(invalid("negative-binomial", "need r > 0 and 0 < p < 1"));
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let ln_gr = ln_gamma(r);
    let pmf = Arc::new(move |j: i64| {
        if j < 0 {
            0.0
        } else {
            let k = j as f64;
            (ln_gamma(k + r) - ln_gr - ln_gamma(k + 1.0) + r * ln_p + k * ln_q).exp()
        }
    });
    let c = (1.0 - p) / p;
    Ok(DiscreteCO::new(
        format!("negative-binomial(r={r}, p={p})"),
        r * c,
        (Some(0), None),
        pmf,
    )?
    .with_quadratic(Quadratic::new(0.0, c, r * c)?)
    .with_sampler(DiscreteSampler::Inversion))
}

/// Successes in `draws` draws without replacement from a population holding
/// `successes` marked items; quadratic `q(j) = (successes − j)(draws − j)/population`.
pub fn hypergeometric(population: i64, successes: i64, draws: i64) -> Result<DiscreteCO> {
    if population < 1 || successes < 0 || draws < 0 || successes > population || draws > population {
        return Err(invalid(
            "hypergeometric",
            "need population ≥ 1 and 0 ≤ successes, draws ≤ population",
        ));
    }
    let lo = (draws + successes - population).max(0);
    let hi = draws.min(successes);
    if lo == hi {
        return Err(invalid("hypergeometric", "degenerate (single-point) support"));
    }
    let (nn, kk, dd) = (population as f64, successes as f64, draws as f64);
    let ln_total = ln_choose(nn, dd);
    let pmf = Arc::new(move |j: i64| {
        if j < lo || j > hi {
            0.0
        } else {
            let k = j as f64;
            (ln_choose(kk, k) + ln_choose(nn - kk, dd - k) - ln_total).exp()
        }
    });
    Ok(DiscreteCO::new(
        format!("hypergeometric(population={population}, successes={successes}, draws={draws})"),
        dd * kk / nn,
        (Some(lo), Some(hi)),
        pmf,
    )?
    .with_quadratic(Quadratic::new(1.0 / nn, -(kk + dd) / nn, kk * dd / nn)?)
    .with_sampler(DiscreteSampler::Inversion))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn standard_normal_has_unit_quadratic() {
        let d = catalog("normal", &params(&[("mean", 0.0), ("var", 1.0)])).unwrap();
        assert_eq!(d.q().unwrap(), Quadratic::new(0.0, 0.0, 1.0).unwrap());
        match d {
            Distribution::Continuous(c) => {
                assert_eq!(c.support(), (f64::NEG_INFINITY, f64::INFINITY))
            }
            _ => panic!("expected continuous"),
        }
    }

    #[test]
    fn poisson_is_co_lambda() {
        let d = catalog("poisson", &params(&[("lambda", 2.0)])).unwrap();
        assert_eq!(d.q().unwrap(), Quadratic::new(0.0, 0.0, 2.0).unwrap());
        assert_eq!(d.mean(), 2.0);
        match d {
            Distribution::Discrete(p) => assert_eq!(p.support(), (Some(0), None)),
            _ => panic!("expected discrete"),
        }
    }

    #[test]
    fn beta_quadratic_matches_closed_form() {
        let b = beta(2.0, 3.0).unwrap();
        let q = b.q().unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert!((q.eval(x) - x * (1.0 - x) / 5.0).abs() < 1e-16);
        }
    }

    #[test]
    fn student_t_quadratic_is_inferred() {
        let t: Distribution = student_t(5.0).unwrap().into();
        let fit = crate::distributions::infer_quadratic(&t.clone().without_quadratic()).unwrap();
        assert!(fit.quadratic.normalized_distance(&t.q().unwrap()) < 1e-6, "{fit:?}");
        assert!(student_t(1.0).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(catalog("cauchy", &params(&[])), Err(Error::UnknownFamily(_))));
        assert!(matches!(
            catalog("beta", &params(&[("a", 0.0), ("b", 1.0)])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            catalog("binomial", &params(&[("n", 2.5), ("p", 0.5)])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            catalog("poisson", &params(&[("lambda", 1.0), ("mu", 1.0)])),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn pmfs_sum_to_one() {
        let b = binomial(10, 0.3).unwrap();
        let s: f64 = (0..=10).map(|j| b.pmf(j)).sum();
        assert!((s - 1.0).abs() < 1e-13);
        let h = hypergeometric(20, 7, 12).unwrap();
        let (lo, hi) = h.support();
        let s: f64 = (lo.unwrap()..=hi.unwrap()).map(|j| h.pmf(j)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
