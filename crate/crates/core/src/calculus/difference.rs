use crate::distributions::Quadratic;
use crate::error::{Error, Result};

/// Highest order for which binomial rows are built.
pub const MAX_DIFFERENCE_ORDER: usize = 20;

/// Row `k` of Pascal's triangle in integer arithmetic.
pub fn pascal_row(k: usize) -> Result<Vec<i64>> {
    if k > MAX_DIFFERENCE_ORDER {
        return Err(Error::OrderTooLarge { k, max: MAX_DIFFERENCE_ORDER });
    }
    let mut row = vec![1i64];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(1);
        next.extend(row.windows(2).map(|w| w[0] + w[1]));
        next.push(1);
        row = next;
    }
    Ok(row)
}

/// `Δ^k f(j) = Σ_{i=0}^{k} (−1)^{k−i} C(k, i) f(j + i)`.
pub fn forward_difference(f: impl Fn(i64) -> f64, k: usize, j: i64) -> Result<f64> {
    let row = pascal_row(k)?;
    Ok(row
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            sign * c as f64 * f(j + i as i64)
        })
        .sum())
}

/// `q^{[k]}(x) = q(x) q(x+1) ⋯ q(x+k−1)`, with `q^{[0]} ≡ 1`.
pub fn rising_q(q: &Quadratic, k: usize, x: f64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * q.eval(x + i as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iterated(f: &dyn Fn(i64) -> f64, k: usize, j: i64) -> f64 {
        if k == 0 {
            f(j)
        } else {
            iterated(f, k - 1, j + 1) - iterated(f, k - 1, j)
        }
    }

    #[test]
    fn examples() {
        let sq = |j: i64| (j * j) as f64;
        assert_eq!(forward_difference(sq, 1, 3).unwrap(), 7.0);
        for j in -3..4 {
            assert_eq!(forward_difference(sq, 2, j).unwrap(), 2.0);
        }
        let pow2 = |j: i64| 2f64.powi(j as i32);
        assert_eq!(forward_difference(pow2, 3, 0).unwrap(), iterated(&pow2, 3, 0));
        assert_eq!(forward_difference(pow2, 3, 0).unwrap(), 1.0);
    }

    #[test]
    fn order_ceiling() {
        assert!(forward_difference(|_| 1.0, 21, 0).is_err());
        assert_eq!(pascal_row(20).unwrap()[10], 184_756);
    }

    #[test]
    fn rising_products() {
        let lam = Quadratic::constant(2.0).unwrap();
        assert_eq!(rising_q(&lam, 3, 0.7), 8.0);
        assert_eq!(rising_q(&lam, 0, 0.7), 1.0);
        let id = Quadratic::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(rising_q(&id, 2, 3.0), 12.0);
    }
}
