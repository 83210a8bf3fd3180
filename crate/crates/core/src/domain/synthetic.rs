use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::{CellStats, Dataset};
use super::space::DataSpace;
use crate::error::{Error, Result};

/// Gaussian parameters for per-cell record counts and prices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub freq_mean: f64,
    pub freq_std: f64,
    pub cost_mean: f64,
    pub cost_std: f64,
    pub cost_floor: f64,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            freq_mean: 1000.0,
            freq_std: 300.0,
            cost_mean: 20.0,
            cost_std: 5.0,
            cost_floor: 1.0,
            seed: 42,
        }
    }
}

/// Draws an independent frequency and cost for every cell of `space`, in
/// lexicographic cell order. Frequencies are `round(max(0, N(μ_f, σ_f)))`;
/// costs are `max(floor, N(μ_c, σ_c))`.
pub fn generate_synthetic(space: &DataSpace, params: &SyntheticParams) -> Result<Dataset> {
    if !(params.freq_std >= 0.0) || !(params.cost_std >= 0.0) || !(params.cost_floor >= 0.0) {
        return Err(Error::Config(
            "synthetic standard deviations and cost floor must be non-negative".into(),
        ));
    }
    let freq_dist = Normal::new(params.freq_mean, params.freq_std)
        .map_err(|e| Error::Config(format!("frequency distribution: {e}")))?;
    let cost_dist = Normal::new(params.cost_mean, params.cost_std)
        .map_err(|e| Error::Config(format!("cost distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut cells = Vec::new();
    for cell in space.cells() {
        let freq = freq_dist.sample(&mut rng).max(0.0).round() as u64;
        let cost = cost_dist.sample(&mut rng).max(params.cost_floor);
        if !(cost > 0.0) {
            return Err(Error::Config(
                "cost floor 0 allowed a non-positive cost; raise cost_floor".into(),
            ));
        }
        cells.push((cell, CellStats { freq, cost }));
    }
    Dataset::from_cells(space.clone(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::adult::adult_space;

    #[test]
    fn every_adult_cell_is_populated() {
        let d = generate_synthetic(&adult_space(), &SyntheticParams::default()).unwrap();
        assert_eq!(d.entries().count(), 240);
        assert!(d.entries().all(|(_, s)| s.cost >= 1.0));
    }

    #[test]
    fn seed_determines_output() {
        let p = SyntheticParams::default();
        let a = generate_synthetic(&adult_space(), &p).unwrap();
        let b = generate_synthetic(&adult_space(), &p).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&adult_space(), &SyntheticParams { seed: 7, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn all_zero_frequencies_are_rejected() {
        let p = SyntheticParams {
            freq_mean: -1e6,
            freq_std: 1.0,
            ..SyntheticParams::default()
        };
        assert!(matches!(
            generate_synthetic(&adult_space(), &p),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn negative_std_is_a_config_error() {
        let p = SyntheticParams {
            freq_std: -1.0,
            ..SyntheticParams::default()
        };
        assert!(matches!(
            generate_synthetic(&adult_space(), &p),
            Err(Error::Config(_))
        ));
    }
}
