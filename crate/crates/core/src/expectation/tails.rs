//! Numerical finiteness test for `E[h(X)]` with `h ≥ 0`.
//!
//! The integrand `h·f` is integrated over dyadic shells running out to each infinite end
//! (or in to each finite endpoint). The expectation is judged finite when the trailing
//! shells vanish, are negligible against the total, or decay geometrically.

use crate::distributions::{ContinuousIP, DiscreteCO, Distribution};
use crate::error::Result;

use super::quadrature::integrate_finite;
use super::{EngineConfig, MAX_TERMS};

const SHELLS: usize = 48;
/// Kept shallower so that `end ± t` still resolves `t` to a few ulps near an endpoint.
const FINITE_SHELLS: usize = 36;
const SHELL_NODES: usize = 16;
const TRAILING: usize = 4;
const DECAY: f64 = 0.999;
const NEGLIGIBLE: f64 = 1e-15;
/// Total lattice points examined beyond the summation window on each side.
const LATTICE_BUDGET: i64 = 1 << 22;

fn converges(shells: &[f64]) -> bool {
    if shells.iter().any(|s| !s.is_finite()) {
        return false;
    }
    let n = shells.len();
    if n < TRAILING + 1 {
        return true;
    }
    let tail = &shells[n - TRAILING..];
    if tail.iter().all(|&s| s == 0.0) {
        return true;
    }
    let total: f64 = shells.iter().sum();
    if tail.iter().all(|&s| s <= NEGLIGIBLE * total) {
        return true;
    }
    shells[n - TRAILING - 1..]
        .windows(2)
        .all(|w| (w[0] == 0.0 && w[1] == 0.0) || (w[0] > 0.0 && w[1] / w[0] < DECAY))
}

/// `∫_{a}^{b} φ` for `0 < a < b` via `t = e^v`, where φ is given in terms of the
/// distance `t` from an anchor.
fn log_shell(a: f64, b: f64, phi: &dyn Fn(f64) -> f64) -> f64 {
    integrate_finite(a.ln(), b.ln(), SHELL_NODES, |v| {
        let t = v.exp();
        phi(t) * t
    })
}

fn continuous(c: &ContinuousIP, h: &dyn Fn(f64) -> f64) -> bool {
    let (lo, hi) = c.support();
    let integrand = |x: f64| {
        let f = c.density(x);
        if f == 0.0 {
            0.0
        } else {
            h(x) * f
        }
    };
    let anchor = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        _ => c.center().clamp(lo, hi),
    };
    let mut ends: Vec<Vec<f64>> = Vec::new();

    // Infinite ends: shells [anchor ± R·2^i, anchor ± R·2^(i+1)].
    let r0 = 4.0 * c.scale().max(1e-300);
    for sign in [1.0, -1.0] {
        let open = if sign > 0.0 { !hi.is_finite() } else { !lo.is_finite() };
        if open {
            let start = match (sign > 0.0, lo.is_finite(), hi.is_finite()) {
                (true, true, _) => lo.max(anchor),
                (false, _, true) => hi.min(anchor),
                _ => anchor,
            };
            ends.push(
                (0..SHELLS)
                    .map(|i| {
                        let a = r0 * 2f64.powi(i as i32);
                        log_shell(a, 2.0 * a, &|t| integrand(start + sign * t))
                    })
                    .collect(),
            );
        }
    }
    // Finite ends: shells at distances [d/2^(i+1), d/2^i] from the endpoint.
    for (end, sign, other) in [(lo, 1.0, hi), (hi, -1.0, lo)] {
        if end.is_finite() {
            let mut d = if other.is_finite() {
                0.25 * (other - end).abs()
            } else {
                0.5 * (anchor - end).abs()
            };
            if d <= 0.0 || !d.is_finite() {
                d = 1.0;
            }
            ends.push(
                (0..FINITE_SHELLS)
                    .map(|i| {
                        let b = d / 2f64.powi(i as i32);
                        let a = 0.5 * b;
                        log_shell(a, b, &|t| integrand(end + sign * t))
                    })
                    .collect(),
            );
        }
    }
    ends.iter().all(|s| converges(s))
}

fn discrete(d: &DiscreteCO, h: &dyn Fn(f64) -> f64, cfg: &EngineConfig) -> Result<bool> {
    let (lo, hi) = d.support();
    if d.is_bounded() {
        return Ok(true);
    }
    let w = d.window(cfg.trunc_tol, MAX_TERMS)?;
    let width = (w.hi - w.lo + 1).max(8);
    let blocks = |start: i64, step: i64| -> Vec<f64> {
        let mut out = Vec::new();
        let mut from = start;
        let mut len = width;
        let mut used = 0i64;
        while used + len <= LATTICE_BUDGET {
            let mut s = 0.0;
            let mut mass = 0.0;
            for k in 0..len {
                let j = from + step * k;
                let p = d.pmf(j);
                if p != 0.0 {
                    mass += p;
                    s += h(j as f64) * p;
                }
            }
            out.push(s);
            if mass == 0.0 {
                // pmf has underflowed for good; the remaining shells are zero
                out.extend([0.0; TRAILING]);
                break;
            }
            from += step * len;
            used += len;
            len *= 2;
        }
        out
    };
    let mut ok = true;
    if hi.is_none() {
        ok &= converges(&blocks(w.hi + 1, 1));
    }
    if lo.is_none() {
        ok &= converges(&blocks(w.lo - 1, -1));
    }
    Ok(ok)
}

/// Whether `E[h(X)]` is finite, judged numerically. `h` must be nonnegative.
pub(crate) fn expectation_finite(
    dist: &Distribution,
    h: &dyn Fn(f64) -> f64,
    cfg: &EngineConfig,
) -> Result<bool> {
    match dist {
        Distribution::Continuous(c) => Ok(continuous(c, h)),
        Distribution::Discrete(d) => discrete(d, h, cfg),
    }
}
