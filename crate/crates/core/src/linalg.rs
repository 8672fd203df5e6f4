//! Dense symmetric matrices, cyclic Jacobi eigenanalysis and Loewner-order predicates.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest order accepted by [`jacobi_eigen`].
pub const MAX_ORDER: usize = 64;

const MAX_SWEEPS: usize = 50;

/// Symmetric `p × p` matrix stored as its packed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    upper: Vec<f64>,
}

#[inline]
fn packed(order: usize, i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    r * order - r * (r + 1) / 2 + c
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            upper: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.upper[packed(order, i, j)] = f(i, j);
            }
        }
        m
    }

    /// Symmetrizes a square array as `(M + Mᵗ) / 2`, rejecting asymmetry above `max_asym`
    /// (measured relative to `1 + max|M_ij|`).
    pub fn from_rows(rows: &[Vec<f64>], max_asym: f64) -> Result<Self> {
        let p = rows.len();
        for r in rows {
            if r.len() != p {
                return Err(Error::DimensionMismatch(r.len(), p));
            }
        }
        let scale = 1.0 + rows.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut worst = 0.0f64;
        let m = Self::from_fn(p, |i, j| {
            worst = worst.max((rows[i][j] - rows[j][i]).abs());
            0.5 * (rows[i][j] + rows[j][i])
        });
        if worst > max_asym * scale {
            return Err(Error::NotSymmetric(worst));
        }
        Ok(m)
    }

    /// Rank-one matrix `v vᵗ`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed(self.order, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let idx = packed(self.order, i, j);
        self.upper[idx] = value;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            upper: self.upper.iter().map(|v| v * factor).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch(self.order, other.order));
        }
        Ok(Self {
            order: self.order,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self> {
        self.zip_with(other, |a, b| a + factor * b)
    }

    pub fn quad_form(&self, c: &[f64]) -> Result<f64> {
        if c.len() != self.order {
            return Err(Error::DimensionMismatch(c.len(), self.order));
        }
        let mut acc = 0.0;
        for i in 0..self.order {
            acc += self.get(i, i) * c[i] * c[i];
            for j in (i + 1)..self.order {
                acc += 2.0 * self.get(i, j) * c[i] * c[j];
            }
        }
        Ok(acc)
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.order {
            for j in 0..self.order {
                acc += self.get(i, j).powi(2);
            }
        }
        acc.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SymMatrix::from_rows(&rows, 1e-10).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues in ascending order with optional column eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[i][k]` is component `i` of the eigenvector for `values[k]`.
    pub vectors: Option<Vec<Vec<f64>>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius mass drops
/// below `1e-14 · ‖M‖_F` or 50 sweeps have run.
pub fn jacobi_eigen(m: &SymMatrix, want_vectors: bool) -> Result<Eigen> {
    let p = m.order();
    if p > MAX_ORDER {
        return Err(Error::MatrixTooLarge(p));
    }
    let mut a = m.to_rows();
    let mut v = want_vectors.then(|| {
        (0..p)
            .map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<f64>>())
            .collect::<Vec<_>>()
    });
    let norm = m.frobenius();
    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let residual = off(&a);
        if residual <= 1e-14 * norm {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNonConvergence { residual });
        }
        sweeps += 1;
        for r in 0..p {
            for s in (r + 1)..p {
                let apq = a[r][s];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[s][s] - a[r][r]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[r], row[s]);
                    row[r] = c * x - sn * y;
                    row[s] = sn * x + c * y;
                }
                for k in 0..p {
                    let (x, y) = (a[r][k], a[s][k]);
                    a[r][k] = c * x - sn * y;
                    a[s][k] = sn * x + c * y;
                }
                a[r][s] = 0.0;
                a[s][r] = 0.0;
                if let Some(v) = v.as_mut() {
                    for row in v.iter_mut() {
                        let (x, y) = (row[r], row[s]);
                        row[r] = c * x - sn * y;
                        row[s] = sn * x + c * y;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = v.map(|v| {
        (0..p)
            .map(|i| order.iter().map(|&k| v[i][k]).collect())
            .collect()
    });
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

/// Ascending eigenvalues of `m`.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    Ok(jacobi_eigen(m, false)?.values)
}

/// Outcome of a semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub pass: bool,
    pub min_eigenvalue: f64,
    pub tol: f64,
}

pub fn is_psd(m: &SymMatrix, tol: f64) -> Result<PsdVerdict> {
    let min = if m.order() == 0 {
        0.0
    } else {
        jacobi_eigenvalues(m)?[0]
    };
    Ok(PsdVerdict {
        pass: min >= -tol,
        min_eigenvalue: min,
        tol,
    })
}

/// `A ⪯ B` in the Loewner order, i.e. `B − A` is nonnegative definite within `tol`.
pub fn loewner_leq(a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<PsdVerdict> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch(a.order(), b.order()));
    }
    is_psd(&b.sub(a)?, tol)
}

/// Largest absolute eigenvalue.
pub fn spectral_radius(m: &SymMatrix) -> Result<f64> {
    let ev = jacobi_eigenvalues(m)?;
    Ok(ev.iter().fold(0.0, |a, v| a.max(v.abs())))
}
