//! Vector-based indicators: Gini coefficient and Shannon entropy.
//!
//! All functions take the nonzero entries of one citation vector. Zero cells
//! are outside the population unless [`VectorOptions::gini_include_zeros`] is
//! set; the diagonal (self-citation) cell is an ordinary entry.

use alloc::vec::Vec;

use crate::corpus::{Direction, JournalVector};
use crate::math::{compensated_sum, log2};
use crate::{Error, Result};

fn check_weights(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Undefined("empty citation vector"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidWeights("entries must be positive and finite"));
    }
    Ok(())
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut xs = values.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    xs
}

/// Gini coefficient over a population of `population` cells of which
/// `values` are the nonzero ones (the rest are zeros, sorted first).
fn gini_sorted(xs: &[f64], population: usize) -> f64 {
    let n = population as f64;
    let offset = population - xs.len();
    let total = compensated_sum(xs.iter().copied());
    let weighted = compensated_sum(
        xs.iter()
            .enumerate()
            .map(|(k, &x)| (2.0 * (offset + k + 1) as f64 - n - 1.0) * x),
    );
    (weighted / (n * total)).max(0.0)
}

/// `Σ(2i − n − 1)·x_i / (n·Σx)` over the entries sorted non-decreasing.
///
/// Zero for an even distribution and for a single entry; at most `(n−1)/n`.
pub fn gini(values: &[f64]) -> Result<f64> {
    check_weights(values)?;
    if values.len() == 1 {
        return Ok(0.0);
    }
    Ok(gini_sorted(&sorted(values), values.len()))
}

/// Gini rescaled by `n/(n−1)` so that maximal unevenness maps to 1.
pub fn gini_normalized(values: &[f64]) -> Result<f64> {
    let g = gini(values)?;
    let n = values.len();
    if n == 1 {
        return Ok(0.0);
    }
    Ok((g * n as f64 / (n - 1) as f64).min(1.0))
}

/// Gini with `population − values.len()` implicit zero cells.
pub fn gini_with_zeros(values: &[f64], population: usize) -> Result<f64> {
    check_weights(values)?;
    if population < values.len() {
        return Err(Error::InvalidWeights("population smaller than support"));
    }
    if population == 1 {
        return Ok(0.0);
    }
    Ok(gini_sorted(&sorted(values), population))
}

/// Shannon entropy in bits of the distribution `x_i / Σx`.
pub fn shannon_entropy(values: &[f64]) -> Result<f64> {
    check_weights(values)?;
    let n = values.len();
    if n == 1 {
        return Ok(0.0);
    }
    let max = log2(n as f64);
    if values.iter().all(|&v| v == values[0]) {
        return Ok(max);
    }
    let total = compensated_sum(values.iter().copied());
    let h = -compensated_sum(values.iter().map(|&x| {
        let p = x / total;
        p * log2(p)
    }));
    Ok(h.clamp(0.0, max))
}

/// Entropy as a fraction of its local maximum `log2(n)`; 0 for `n = 1`.
pub fn entropy_normalized(values: &[f64]) -> Result<f64> {
    let h = shannon_entropy(values)?;
    let n = values.len();
    if n == 1 {
        return Ok(0.0);
    }
    Ok((h / log2(n as f64)).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VectorOptions {
    /// Count zero cells of the full row/column in the Gini population.
    pub gini_include_zeros: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorIndicatorResult {
    pub journal_id: usize,
    pub direction: Direction,
    pub gini: f64,
    pub gini_normalized: f64,
    pub entropy_bits: f64,
    pub entropy_normalized: f64,
    pub support_size: usize,
    /// Single-entry vector; indicators are zero by convention.
    pub degenerate: bool,
}

/// All four vector indicators for one journal vector.
///
/// `population` is the length of the full vector (the journal count) and is
/// only used when zeros are included in the Gini population.
pub fn vector_indicators(
    v: &JournalVector<'_>,
    population: usize,
    opts: VectorOptions,
) -> Result<VectorIndicatorResult> {
    let w = v.weights();
    let (gini, gini_normalized) = if opts.gini_include_zeros {
        let g = gini_with_zeros(&w, population)?;
        let gn = if population > 1 {
            (g * population as f64 / (population - 1) as f64).min(1.0)
        } else {
            0.0
        };
        (g, gn)
    } else {
        (gini(&w)?, gini_normalized(&w)?)
    };
    Ok(VectorIndicatorResult {
        journal_id: v.owner,
        direction: v.direction,
        gini,
        gini_normalized,
        entropy_bits: shannon_entropy(&w)?,
        entropy_normalized: entropy_normalized(&w)?,
        support_size: w.len(),
        degenerate: w.len() == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CitationMatrix;
    use alloc::vec;
    use proptest::prelude::*;

    /// Mean absolute difference form: ΣΣ|xi − xj| / (2 n² mean).
    fn gini_pairwise(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let mut s = 0.0;
        for a in xs {
            for b in xs {
                s += (a - b).abs();
            }
        }
        s / (2.0 * n * n * mean)
    }

    fn entropy_direct(xs: &[f64]) -> f64 {
        let t: f64 = xs.iter().sum();
        -xs.iter().map(|x| x / t).map(|p| p * p.log2()).sum::<f64>()
    }

    #[test]
    fn gini_even_is_zero() {
        assert_eq!(gini(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(gini_normalized(&[7.0, 7.0]).unwrap(), 0.0);
    }

    #[test]
    fn gini_one_to_four() {
        assert!((gini_pairwise(&[1.0, 2.0, 3.0, 4.0]) - 0.25).abs() < 1e-15);
        assert!((gini(&[1.0, 2.0, 3.0, 4.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!((gini(&[4.0, 1.0, 3.0, 2.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!((gini_normalized(&[1.0, 2.0, 3.0, 4.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gini_spike_matches_pairwise() {
        let xs = [1.0, 1.0, 1.0, 97.0];
        assert!((gini(&xs).unwrap() - gini_pairwise(&xs)).abs() < 1e-12);
    }

    #[test]
    fn single_entry_is_zero() {
        assert_eq!(gini(&[5.0]).unwrap(), 0.0);
        assert_eq!(gini_normalized(&[5.0]).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&[5.0]).unwrap(), 0.0);
        assert_eq!(entropy_normalized(&[5.0]).unwrap(), 0.0);
    }

    #[test]
    fn empty_vector_is_undefined() {
        assert!(matches!(gini(&[]), Err(Error::Undefined(_))));
        assert!(matches!(shannon_entropy(&[]), Err(Error::Undefined(_))));
        assert!(matches!(gini(&[1.0, 0.0]), Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn entropy_examples() {
        let h = shannon_entropy(&[2.0, 1.0, 1.0]).unwrap();
        assert!((h - 1.5).abs() < 1e-15);
        let hn = entropy_normalized(&[2.0, 1.0, 1.0]).unwrap();
        assert!((hn - 1.5 / 3f64.log2()).abs() < 1e-15);
        assert!((hn - 0.946).abs() < 5e-4);
        let u = vec![1.0; 8207];
        let h = shannon_entropy(&u).unwrap();
        assert!((h - 13.00).abs() < 0.005, "{h}");
        assert_eq!(entropy_normalized(&u).unwrap(), 1.0);
    }

    #[test]
    fn gini_with_zeros_pads_population() {
        // One nonzero among four cells: maximal inequality (n-1)/n.
        assert!((gini_with_zeros(&[5.0], 4).unwrap() - 0.75).abs() < 1e-15);
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(gini_with_zeros(&xs, 4).unwrap(), gini(&xs).unwrap());
        let padded = [0.0, 0.0, 1.0, 2.0, 3.0, 4.0];
        assert!((gini_with_zeros(&xs, 6).unwrap() - gini_pairwise(&padded)).abs() < 1e-12);
    }

    #[test]
    fn vector_indicators_flags_degenerate() {
        let m = CitationMatrix::from_triplets(3, vec![(0, 0, 7), (1, 0, 1), (1, 2, 3)], 1).unwrap();
        let r = vector_indicators(&m.vector(0, Direction::Cited).unwrap(), 3, VectorOptions::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.gini, r.gini_normalized, r.entropy_normalized), (0.0, 0.0, 0.0));
        let r = vector_indicators(&m.vector(1, Direction::Cited).unwrap(), 3, VectorOptions::default()).unwrap();
        assert!(!r.degenerate);
        assert_eq!(r.support_size, 2);
        assert!((r.gini - 0.25).abs() < 1e-15);
        assert!(vector_indicators(&m.vector(2, Direction::Cited).unwrap(), 3, VectorOptions::default()).is_err());
    }

    fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1u32..1000, 1..50).prop_map(|v| v.into_iter().map(f64::from).collect())
    }

    proptest! {
        #[test]
        fn gini_matches_pairwise_oracle(xs in positive_vec()) {
            prop_assert!((gini(&xs).unwrap() - gini_pairwise(&xs)).abs() < 1e-12);
        }

        #[test]
        fn bounds_hold(xs in positive_vec()) {
            let n = xs.len() as f64;
            let g = gini(&xs).unwrap();
            prop_assert!(g >= 0.0 && g <= (n - 1.0) / n + 1e-15);
            let gn = gini_normalized(&xs).unwrap();
            prop_assert!((0.0..=1.0).contains(&gn));
            let h = shannon_entropy(&xs).unwrap();
            prop_assert!(h >= 0.0 && h <= n.log2());
            prop_assert!((h - entropy_direct(&xs)).abs() < 1e-12);
        }

        #[test]
        fn scale_and_permutation_invariance(xs in positive_vec(), c in 1e-3f64..1e3, seed in any::<u64>()) {
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            prop_assert!((gini(&scaled).unwrap() - gini(&xs).unwrap()).abs() < 1e-12);
            prop_assert!((shannon_entropy(&scaled).unwrap() - shannon_entropy(&xs).unwrap()).abs() < 1e-12);
            let mut perm = xs.clone();
            let len = perm.len();
            let mut s = seed;
            for i in (1..len).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert!((gini(&perm).unwrap() - gini(&xs).unwrap()).abs() < 1e-12);
            prop_assert!((shannon_entropy(&perm).unwrap() - shannon_entropy(&xs).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn mass_transfer_to_larger_entry(xs in prop::collection::vec(2u32..1000, 2..40), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), amount in 1u32..1000) {
            let mut xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let (i, j) = (a.index(xs.len()), b.index(xs.len()));
            prop_assume!(i != j);
            let (small, large) = if xs[i] <= xs[j] { (i, j) } else { (j, i) };
            // Keep the support fixed: the donor stays positive.
            let t = f64::from(amount).min(xs[small] - 1.0);
            prop_assume!(t > 0.0);
            let g0 = gini(&xs).unwrap();
            let h0 = shannon_entropy(&xs).unwrap();
            xs[small] -= t;
            xs[large] += t;
            prop_assert!(gini(&xs).unwrap() >= g0 - 1e-12);
            prop_assert!(shannon_entropy(&xs).unwrap() <= h0 + 1e-12);
        }

        #[test]
        fn uniform_normalized_entropy_is_one(n in 2usize..3000, c in 1u32..10_000) {
            let xs = vec![f64::from(c); n];
            prop_assert_eq!(entropy_normalized(&xs).unwrap(), 1.0);
        }
    }
}
