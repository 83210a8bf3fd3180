//! Over-representation p-values for purchased records.
//!
//! Under the attacker's null hypothesis the buyer drew its `q` records i.i.d.
//! from the data density restricted to the pseudo published intent. The
//! p-value of a purchased cell is the probability that a null draw contains
//! the cell at least as often as the purchase does. It is estimated by
//! simulating whole multisets, or computed exactly from the binomial
//! marginal of a single cell.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMode {
    MonteCarlo,
    ExactBinomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PValueConfig {
    /// Number of simulated multisets.
    pub replicates: u64,
    pub seed: u64,
    pub mode: PValueMode,
}

impl PValueConfig {
    pub fn exact() -> Self {
        PValueConfig {
            replicates: 1,
            seed: 0,
            mode: PValueMode::ExactBinomial,
        }
    }

    pub fn monte_carlo(replicates: u64, seed: u64) -> Self {
        PValueConfig {
            replicates,
            seed,
            mode: PValueMode::MonteCarlo,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("p-value replicate count must be ≥ 1".into()));
        }
        Ok(())
    }
}

impl Default for PValueConfig {
    fn default() -> Self {
        PValueConfig::monte_carlo(100_000, 0)
    }
}

/// `P[Binomial(n, p) ≥ k]`.
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ratio = p / (1.0 - p);
    if k as f64 > n as f64 * p {
        // Terms shrink moving away from the mode; sum upward from k.
        let mut term = ln_pmf(n, p, k).exp();
        let mut sum = 0.0;
        let mut j = k;
        loop {
            sum += term;
            if j == n || term < sum * 1e-17 {
                break;
            }
            term *= (n - j) as f64 / (j + 1) as f64 * ratio;
            j += 1;
        }
        sum.min(1.0)
    } else {
        // Complement of the lower tail, summed downward from k - 1.
        let mut j = k - 1;
        let mut term = ln_pmf(n, p, j).exp();
        let mut sum = 0.0;
        loop {
            sum += term;
            if j == 0 || term < sum * 1e-17 {
                break;
            }
            term *= j as f64 / (n - j + 1) as f64 / ratio;
            j -= 1;
        }
        (1.0 - sum).clamp(0.0, 1.0)
    }
}

fn ln_pmf(n: u64, p: f64, k: u64) -> f64 {
    ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()
}

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64 / i as f64).ln())
        .sum()
}

/// Monte-Carlo upper-tail estimates for several categories at once.
///
/// `weights` is the null distribution over categories (need not be
/// normalized); every replicate draws `q` categories i.i.d. and each target
/// `(category, observed_count)` records whether its simulated count reached
/// the observed one. Replicate `r` draws from its own ChaCha stream `r`, so
/// the estimate does not depend on evaluation order.
pub fn monte_carlo_upper_tails(
    weights: &[f64],
    q: u64,
    targets: &[(usize, u64)],
    replicates: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if replicates == 0 {
        return Err(Error::Config("p-value replicate count must be ≥ 1".into()));
    }
    let alias = WeightedAliasIndex::new(weights.to_vec())
        .map_err(|e| Error::DegenerateIntent(format!("null distribution: {e}")))?;
    let mut slot = vec![usize::MAX; weights.len()];
    for (t, &(cat, _)) in targets.iter().enumerate() {
        slot[cat] = t;
    }
    let mut hits = vec![0u64; targets.len()];
    let mut counts = vec![0u64; targets.len()];
    let base = ChaCha8Rng::seed_from_u64(seed);
    for r in 0..replicates {
        let mut rng = base.clone();
        rng.set_stream(r);
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..q {
            let s = slot[alias.sample(&mut rng)];
            if s != usize::MAX {
                counts[s] += 1;
            }
        }
        for (t, &(_, observed)) in targets.iter().enumerate() {
            if counts[t] >= observed {
                hits[t] += 1;
            }
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| h as f64 / replicates as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_edge_cases() {
        assert_eq!(binomial_upper_tail(10, 0.3, 0), 1.0);
        assert_eq!(binomial_upper_tail(10, 0.3, 11), 0.0);
        assert_eq!(binomial_upper_tail(10, 0.0, 1), 0.0);
        assert_eq!(binomial_upper_tail(10, 1.0, 10), 1.0);
    }

    #[test]
    fn tail_small_values() {
        assert!((binomial_upper_tail(10, 0.5, 10) - 1.0 / 1024.0).abs() < 1e-15);
        assert!((binomial_upper_tail(4, 0.5, 3) - 5.0 / 16.0).abs() < 1e-15);
        assert!((binomial_upper_tail(4, 0.5, 1) - 15.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let a = monte_carlo_upper_tails(&[0.5, 0.5], 4, &[(0, 3)], 2000, 9).unwrap();
        let b = monte_carlo_upper_tails(&[0.5, 0.5], 4, &[(0, 3)], 2000, 9).unwrap();
        assert_eq!(a, b);
        assert!((a[0] - 0.3125).abs() < 0.05);
    }

    #[test]
    fn zero_replicates_rejected() {
        assert!(matches!(
            monte_carlo_upper_tails(&[1.0], 3, &[(0, 1)], 0, 0),
            Err(Error::Config(_))
        ));
    }
}
