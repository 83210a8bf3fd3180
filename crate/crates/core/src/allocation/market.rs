//! Dense working representation shared by the allocation strategies.
//!
//! Purchases are count vectors over the populated cells of the published
//! intent. Feasibility is evaluated against the pseudo published intent of
//! the counts themselves, which is always a sub-product of the published
//! intent, so its record mass only involves these local cells.

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;

use super::{AllocationConfig, InitSampling};
use crate::attacks::pvalue::monte_carlo_upper_tails;
use crate::attacks::{binomial_upper_tail, within_threshold, PValueConfig, PValueMode, PurchaseSet};
use crate::domain::{Cell, Dataset, Intent};
use crate::error::{Error, Result};

pub(crate) struct Market {
    pub cells: Vec<Cell>,
    pub freq: Vec<u64>,
    pub ti_cells: Vec<usize>,
    pub disguise_cells: Vec<usize>,
    coords: Vec<Vec<usize>>,
    cards: Vec<usize>,
    sampler: Sampler,
    lambda: f64,
    pvalue: PValueConfig,
}

enum Sampler {
    Density(WeightedAliasIndex<f64>),
    Uniform(usize),
}

/// Privacy status of a candidate purchase.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Status {
    pub feasible: bool,
    /// λ minus the largest `1 − p` over purchased true-intent cells.
    pub min_gap: f64,
}

impl Market {
    pub fn new(
        data: &Dataset,
        published: &Intent,
        true_intent: &Intent,
        config: &AllocationConfig,
    ) -> Result<Self> {
        let space = data.space();
        published.check_space(space)?;
        true_intent.check_space(space)?;
        if !true_intent.is_subset_of(published) {
            return Err(Error::InvalidIntent(
                "true intent is not contained in the published intent".into(),
            ));
        }
        let mut cells = Vec::new();
        let mut freq = Vec::new();
        let mut in_ti = Vec::new();
        for (cell, s) in data.populated() {
            if published.contains(cell) {
                in_ti.push(true_intent.contains(cell));
                cells.push(cell.clone());
                freq.push(s.freq);
            }
        }
        if cells.is_empty() {
            return Err(Error::DegenerateIntent(
                "published intent holds no records".into(),
            ));
        }
        let ti_cells = (0..cells.len()).filter(|&i| in_ti[i]).collect();
        let disguise_cells = (0..cells.len()).filter(|&i| !in_ti[i]).collect();
        let sampler = match config.init {
            InitSampling::Density => Sampler::Density(
                WeightedAliasIndex::new(freq.iter().map(|&f| f as f64).collect())
                    .map_err(|e| Error::DegenerateIntent(format!("sampling weights: {e}")))?,
            ),
            InitSampling::UniformCells => Sampler::Uniform(cells.len()),
        };
        Ok(Market {
            coords: cells.iter().map(|c| c.0.clone()).collect(),
            cards: space.cardinalities(),
            cells,
            freq,
            ti_cells,
            disguise_cells,
            sampler,
            lambda: config.lambda,
            pvalue: config.pvalue,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.sampler {
            Sampler::Density(alias) => alias.sample(rng),
            Sampler::Uniform(n) => rng.random_range(0..*n),
        }
    }

    /// `q` i.i.d. draws, as counts.
    pub fn sample_counts<R: Rng + ?Sized>(&self, q: u64, rng: &mut R) -> Vec<u64> {
        let mut counts = vec![0u64; self.len()];
        for _ in 0..q {
            counts[self.draw(rng)] += 1;
        }
        counts
    }

    pub fn ti_records(&self, counts: &[u64]) -> u64 {
        self.ti_cells.iter().map(|&i| counts[i]).sum()
    }

    /// Record mass of the pseudo published intent spanned by `counts`.
    fn pseudo_mass(&self, counts: &[u64]) -> u64 {
        self.freq
            .iter()
            .zip(self.in_pseudo(counts))
            .filter(|(_, inside)| *inside)
            .map(|(&f, _)| f)
            .sum()
    }

    pub fn status(&self, counts: &[u64]) -> Result<Status> {
        let q: u64 = counts.iter().sum();
        let mass = self.pseudo_mass(counts);
        let mut max_confidence: f64 = 0.0;
        let purchased_ti: Vec<usize> = self
            .ti_cells
            .iter()
            .copied()
            .filter(|&i| counts[i] > 0)
            .collect();
        match self.pvalue.mode {
            PValueMode::ExactBinomial => {
                for &i in &purchased_ti {
                    let p0 = self.freq[i] as f64 / mass as f64;
                    let p = binomial_upper_tail(q, p0, counts[i]);
                    max_confidence = max_confidence.max(1.0 - p);
                }
            }
            PValueMode::MonteCarlo => {
                if !purchased_ti.is_empty() {
                    let weights: Vec<f64> = self
                        .freq
                        .iter()
                        .zip(self.in_pseudo(counts))
                        .map(|(&f, inside)| if inside { f as f64 } else { 0.0 })
                        .collect();
                    let targets: Vec<(usize, u64)> =
                        purchased_ti.iter().map(|&i| (i, counts[i])).collect();
                    let tails = monte_carlo_upper_tails(
                        &weights,
                        q,
                        &targets,
                        self.pvalue.replicates,
                        self.pvalue.seed,
                    )?;
                    for p in tails {
                        max_confidence = max_confidence.max(1.0 - p);
                    }
                }
            }
        }
        Ok(Status {
            feasible: within_threshold(max_confidence, self.lambda),
            min_gap: self.lambda - max_confidence,
        })
    }

    /// Which local cells lie in the pseudo published intent of `counts`.
    fn in_pseudo(&self, counts: &[u64]) -> Vec<bool> {
        let mut seen: Vec<Vec<bool>> = self.cards.iter().map(|&c| vec![false; c]).collect();
        for (i, &h) in counts.iter().enumerate() {
            if h > 0 {
                for (d, &v) in self.coords[i].iter().enumerate() {
                    seen[d][v] = true;
                }
            }
        }
        self.coords
            .iter()
            .map(|c| c.iter().enumerate().all(|(d, &v)| seen[d][v]))
            .collect()
    }

    pub fn to_purchase(&self, counts: &[u64]) -> PurchaseSet {
        PurchaseSet::from_counts(
            self.cells
                .iter()
                .cloned()
                .zip(counts.iter().copied()),
        )
        .expect("allocations hold q ≥ 1 records")
    }
}
