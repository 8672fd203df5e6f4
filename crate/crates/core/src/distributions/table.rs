use crate::error::{Error, Result};

/// Piecewise-linear density through tabulated `(x, f(x))` nodes.
#[derive(Debug, Clone)]
pub struct DensityTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl DensityTable {
    pub fn new(mut nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Document("density table needs at least two nodes".into()));
        }
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in nodes.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Document(format!("duplicate table node x = {}", w[0].0)));
            }
        }
        if nodes.iter().any(|(x, f)| !x.is_finite() || !f.is_finite() || *f < 0.0) {
            return Err(Error::Document("table entries must be finite with f ≥ 0".into()));
        }
        let (xs, fs) = nodes.into_iter().unzip();
        Ok(Self { xs, fs })
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.fs.iter().copied())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        self.fs[i - 1] * (1.0 - t) + self.fs[i] * t
    }

    /// Exact `∫ t^k f(t) dt` over segment `i` for k ∈ {0, 1}.
    fn segment_moments(&self, i: usize) -> (f64, f64) {
        let (a, b) = (self.xs[i], self.xs[i + 1]);
        let (fa, fb) = (self.fs[i], self.fs[i + 1]);
        let h = b - a;
        let m0 = 0.5 * h * (fa + fb);
        // f linear: ∫ t f = h/6 · (fa(2a + b) + fb(a + 2b))
        let m1 = h / 6.0 * (fa * (2.0 * a + b) + fb * (a + 2.0 * b));
        (m0, m1)
    }

    pub fn mass(&self) -> f64 {
        (0..self.xs.len() - 1).map(|i| self.segment_moments(i).0).sum()
    }

    pub fn first_moment(&self) -> f64 {
        (0..self.xs.len() - 1).map(|i| self.segment_moments(i).1).sum()
    }

    /// `∫_{x_0}^{x_i} (μ − t) f(t) dt` at every node, accumulated from whichever end is
    /// nearer to keep cancellation small.
    pub fn cumulative_stein(&self, mu: f64) -> Vec<f64> {
        let n = self.xs.len();
        let seg: Vec<f64> = (0..n - 1)
            .map(|i| {
                let (m0, m1) = self.segment_moments(i);
                mu * m0 - m1
            })
            .collect();
        let mut left = vec![0.0; n];
        for i in 1..n {
            left[i] = left[i - 1] + seg[i - 1];
        }
        let mut right = vec![0.0; n];
        for i in (0..n - 1).rev() {
            right[i] = right[i + 1] - seg[i];
        }
        (0..n)
            .map(|i| if self.xs[i] < mu { left[i] } else { right[i] })
            .collect()
    }
}

/// Tabulated pmf on a contiguous integer range.
#[derive(Debug, Clone)]
pub struct PmfTable {
    lo: i64,
    probs: Vec<f64>,
}

impl PmfTable {
    pub fn new(mut entries: Vec<(i64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Document("pmf table is empty".into()));
        }
        entries.sort_by_key(|e| e.0);
        let lo = entries[0].0;
        let hi = entries.last().unwrap().0;
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        for (j, p) in entries {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Document(format!("invalid probability {p} at {j}")));
            }
            probs[(j - lo) as usize] += p;
        }
        Ok(Self { lo, probs })
    }

    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.probs.len() as i64 - 1)
    }

    pub fn get(&self, j: i64) -> f64 {
        if j < self.lo {
            return 0.0;
        }
        self.probs.get((j - self.lo) as usize).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (self.lo + i as i64) as f64 * p)
            .sum()
    }
}
