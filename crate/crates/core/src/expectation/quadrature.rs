//! Gauss–Legendre rules and the interval maps that carry them onto a support.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Map used when both ends of the support are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InfiniteMap {
    /// `x = c + s·u / (1 − u²)`
    #[default]
    Rational,
    /// `x = c + 2s·artanh(u)`
    Tanh,
}

/// An interval `(lo, hi)` whose ends may be infinite, plus the location/scale hints
/// that position the nodes of infinite maps.
#[derive(Debug, Clone, Copy)]
pub struct MappedInterval {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub scale: f64,
    pub map: InfiniteMap,
}

impl MappedInterval {
    /// Quadrature points `(x_i, w_i)` such that `Σ w_i φ(x_i) ≈ ∫_lo^hi φ`.
    ///
    /// Finite ends use the cosine map `x = lo + (hi − lo)(1 − cos πu)/2`, which clusters
    /// nodes quadratically at both ends; a semi-infinite side uses
    /// `x = a ± s·(u / (1 − u))²`. Both turn half-integer algebraic endpoint
    /// behaviour of the integrand into smooth behaviour in `u`.
    pub fn rule(&self, n: usize) -> Vec<(f64, f64)> {
        let (z, w) = gauss_legendre(n);
        let mut out = Vec::with_capacity(n);
        let (lo, hi, s) = (self.lo, self.hi, self.scale);
        for (zi, wi) in z.into_iter().zip(w) {
            let (x, dx) = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => {
                    let u = 0.5 * (zi + 1.0);
                    let len = hi - lo;
                    let x = lo + 0.5 * len * (1.0 - (PI * u).cos());
                    (x, 0.5 * wi * 0.5 * len * PI * (PI * u).sin())
                }
                (true, false) => {
                    let u = 0.5 * (zi + 1.0);
                    let r = u / (1.0 - u);
                    (lo + s * r * r, 0.5 * wi * 2.0 * s * u / (1.0 - u).powi(3))
                }
                (false, true) => {
                    let u = 0.5 * (zi + 1.0);
                    let r = u / (1.0 - u);
                    (hi - s * r * r, 0.5 * wi * 2.0 * s * u / (1.0 - u).powi(3))
                }
                (false, false) => match self.map {
                    InfiniteMap::Rational => {
                        let d = 1.0 - zi * zi;
                        (
                            self.center + s * zi / d,
                            wi * s * (1.0 + zi * zi) / (d * d),
                        )
                    }
                    InfiniteMap::Tanh => (
                        self.center + 2.0 * s * zi.atanh(),
                        wi * 2.0 * s / (1.0 - zi * zi),
                    ),
                },
            };
            if x > lo && x < hi && dx.is_finite() {
                out.push((x, dx));
            }
        }
        out
    }
}

/// Plain Gauss–Legendre on a finite `[a, b]`.
pub fn integrate_finite(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (z, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    z.iter()
        .zip(&w)
        .map(|(zi, wi)| wi * f(mid + half * zi))
        .sum::<f64>()
        * half
}

/// Tanh–sinh nodes `(x_i, w_i)` on a finite `(a, b)` with step `h`, truncated where the
/// weights underflow. Nodes never coincide with an end, so integrable endpoint
/// singularities are handled with double-exponential convergence.
pub fn tanh_sinh(a: f64, b: f64, h: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mut out = Vec::new();
    let mut k = 0i64;
    loop {
        let t = k as f64 * h;
        let y = 0.5 * PI * t.sinh();
        // Distance of the node from the nearer end, as a fraction of b − a.
        let d = 1.0 / (1.0 + (2.0 * y).exp());
        let cy = y.cosh();
        let w = half * h * 0.5 * PI * t.cosh() / (cy * cy);
        if !(w > 0.0 && w.is_finite()) || d == 0.0 {
            break;
        }
        let dx = (b - a) * d;
        if k == 0 {
            out.push((a + half, w));
        } else {
            if a + dx > a {
                out.push((a + dx, w));
            }
            if b - dx < b {
                out.push((b - dx, w));
            }
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 64, 100, 200] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        let (z, w) = gauss_legendre(5);
        // ∫_{-1}^{1} x^8 dx = 2/9
        let v: f64 = z.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn mapped_gaussian_moments() {
        let c = 1.0 / (2.0 * PI).sqrt();
        for map in [InfiniteMap::Rational, InfiniteMap::Tanh] {
            let iv = MappedInterval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                center: 0.0,
                scale: 1.0,
                map,
            };
            let v: f64 = iv
                .rule(200)
                .iter()
                .map(|(x, w)| w * x.powi(4) * c * (-0.5 * x * x).exp())
                .sum();
            assert!((v - 3.0).abs() < 1e-11, "{map:?}: {v}");
        }
    }

    #[test]
    fn semi_infinite_exponential() {
        let iv = MappedInterval {
            lo: 0.0,
            hi: f64::INFINITY,
            center: 1.0,
            scale: 1.0,
            map: InfiniteMap::Rational,
        };
        let v: f64 = iv.rule(200).iter().map(|(x, w)| w * x * (-x).exp()).sum();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_arcsine_is_exact_under_cosine_map() {
        let iv = MappedInterval {
            lo: 0.0,
            hi: 1.0,
            center: 0.5,
            scale: 1.0,
            map: InfiniteMap::Rational,
        };
        let v: f64 = iv
            .rule(50)
            .iter()
            .map(|(x, w)| w / (PI * (x * (1.0 - x)).sqrt()))
            .sum();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        let sum = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
            tanh_sinh(a, b, 1.0 / 32.0).into_iter().map(|(x, w)| w * f(x)).sum()
        };
        assert!((sum(0.0, 1.0, &|t| t.powf(-0.3)) - 1.0 / 0.7).abs() < 1e-12);
        assert!((sum(-1.0, 1.0, &|t| (1.0 - t * t).sqrt()) - PI / 2.0).abs() < 1e-13);
        assert!((sum(2.0, 5.0, &|t| t * t) - 39.0).abs() < 1e-12);
        assert!((sum(0.0, 1.0, &|t| 1.0 / ((1.0 - t) * t).sqrt()) - PI).abs() < 1e-7);
    }
}
