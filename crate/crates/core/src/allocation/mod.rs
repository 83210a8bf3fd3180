//! λ-private purchase sets against the purchased-record inference attack.
//!
//! Given a published intent and a purchase size `q`, the buyer picks `q`
//! records inside the published intent. A purchase is *feasible* when every
//! purchased true-intent cell has an over-representation p-value of at least
//! `1 − λ`; among feasible purchases the buyer wants as many true-intent
//! records as possible.

mod genetic;
mod market;
mod mc;
mod mcmc;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::attacks::{
    binomial_upper_tail, conditional_density, infer_pseudo_pi, pvalue, within_threshold,
    PValueConfig, PurchaseSet,
};
use crate::domain::{Cell, DataSpace, Dataset, Intent};
use crate::error::{Error, Result};

pub use genetic::{allocate_genetic, crossover};
pub use mc::allocate_mc;
pub use mcmc::{acceptance_probability, allocate_mcmc, MoveGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocationMethod {
    /// Best feasible set among `Z` independent draws.
    Mc,
    /// Metropolis-style walk over all four move groups.
    Mcmc,
    /// The walk restricted to disguise → true-intent swaps.
    Gmcmc,
    /// One-point crossover of the fittest feasible sets.
    Genetic,
}

impl AllocationMethod {
    pub const ALL: [AllocationMethod; 4] = [
        AllocationMethod::Mc,
        AllocationMethod::Mcmc,
        AllocationMethod::Gmcmc,
        AllocationMethod::Genetic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AllocationMethod::Mc => "mc",
            AllocationMethod::Mcmc => "mcmc",
            AllocationMethod::Gmcmc => "gmcmc",
            AllocationMethod::Genetic => "genetic",
        }
    }
}

impl fmt::Display for AllocationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AllocationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mc" | "mc-simulation" => Ok(AllocationMethod::Mc),
            "mcmc" => Ok(AllocationMethod::Mcmc),
            "gmcmc" | "g-mcmc" => Ok(AllocationMethod::Gmcmc),
            "genetic" => Ok(AllocationMethod::Genetic),
            other => Err(Error::Config(format!("unknown allocation method `{other}`"))),
        }
    }
}

/// How initial purchases are drawn from the published intent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitSampling {
    /// i.i.d. from the data density restricted to the published intent.
    Density,
    /// Uniformly over the populated cells of the published intent.
    UniformCells,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationConfig {
    pub q: u64,
    pub lambda: f64,
    pub method: AllocationMethod,
    /// Draws for the MC method.
    pub z: u64,
    /// MCMC stops once `λ − max confidence < epsilon`.
    pub epsilon: f64,
    /// Genetic population size.
    pub population: usize,
    /// Genetic parents kept per generation.
    pub elite: usize,
    /// Genetic generations.
    pub generations: usize,
    /// p-value computation used by the feasibility check.
    pub pvalue: PValueConfig,
    pub seed: u64,
    pub init: InitSampling,
    /// Attempts at a feasible MCMC starting point.
    pub max_redraws: usize,
    /// MCMC proposals; defaults to `100·q`.
    pub iteration_cap: Option<u64>,
}

impl AllocationConfig {
    pub fn new(method: AllocationMethod, q: u64, lambda: f64) -> Self {
        AllocationConfig {
            q,
            lambda,
            method,
            z: 100_000,
            epsilon: 0.001,
            population: 50,
            elite: 10,
            generations: 30,
            pvalue: PValueConfig::exact(),
            seed: 0,
            init: InitSampling::Density,
            max_redraws: 1000,
            iteration_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.q == 0 {
            return bad("q must be ≥ 1");
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return bad("lambda must be in (0, 1]");
        }
        if self.z == 0 {
            return bad("Z must be ≥ 1");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be > 0");
        }
        if self.generations == 0 {
            return bad("W must be ≥ 1");
        }
        if self.population == 0 {
            return bad("T must be ≥ 1");
        }
        if self.elite > self.population {
            return bad("R must not exceed T");
        }
        self.pvalue.validate()
    }

    pub fn mcmc_cap(&self) -> u64 {
        self.iteration_cap.unwrap_or(100 * self.q)
    }
}

/// Fraction of purchased records that lie in the true intent.
pub fn utility(purchased: &PurchaseSet, true_intent: &Intent) -> f64 {
    let hits: u64 = purchased
        .iter()
        .filter(|(c, _)| true_intent.contains(c))
        .map(|(_, h)| h)
        .sum();
    hits as f64 / purchased.q() as f64
}

/// True iff every purchased true-intent cell has p-value ≥ 1 − λ, with the
/// null built from the pseudo published intent of `purchased`.
pub fn is_feasible(
    purchased: &PurchaseSet,
    true_intent: &Intent,
    data: &Dataset,
    lambda: f64,
    pvalue_config: &PValueConfig,
) -> Result<bool> {
    let pseudo = infer_pseudo_pi(purchased, data.space())?;
    for (cell, _) in purchased.iter() {
        if true_intent.contains(cell) {
            let p = pvalue(cell, purchased, &pseudo, data, pvalue_config)?;
            if !within_threshold(1.0 - p, lambda) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact-binomial privacy status of one purchased true-intent cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiCellReport {
    pub cell: Vec<String>,
    pub count: u64,
    pub f_d_pi: f64,
    pub p_value: f64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub method: AllocationMethod,
    pub purchase: PurchaseSet,
    pub utility: f64,
    pub ti_records: u64,
    /// Largest attacker confidence over purchased true-intent cells.
    pub confidence_upper_bound: f64,
    pub report: Vec<TiCellReport>,
    pub elapsed_seconds: f64,
}

/// Exact-binomial feasibility report, independent of the method that built
/// the purchase.
pub fn feasibility_report(
    purchased: &PurchaseSet,
    true_intent: &Intent,
    data: &Dataset,
) -> Result<Vec<TiCellReport>> {
    let pseudo = infer_pseudo_pi(purchased, data.space())?;
    let space: &DataSpace = data.space();
    let mut out = Vec::new();
    for (cell, h) in purchased.iter() {
        if true_intent.contains(cell) {
            let p0 = conditional_density(data, &pseudo, cell)?;
            let p = binomial_upper_tail(purchased.q(), p0, h);
            out.push(TiCellReport {
                cell: space.value_names(cell).into_iter().map(String::from).collect(),
                count: h,
                f_d_pi: p0,
                p_value: p,
                confidence: 1.0 - p,
            });
        }
    }
    Ok(out)
}

/// Runs the configured method and times it.
pub fn allocate(
    published: &Intent,
    true_intent: &Intent,
    data: &Dataset,
    config: &AllocationConfig,
) -> Result<Allocation> {
    let start = Instant::now();
    let purchase = match config.method {
        AllocationMethod::Mc => allocate_mc(published, true_intent, data, config)?,
        AllocationMethod::Mcmc | AllocationMethod::Gmcmc => {
            allocate_mcmc(published, true_intent, data, config)?
        }
        AllocationMethod::Genetic => allocate_genetic(published, true_intent, data, config)?,
    };
    let elapsed_seconds = start.elapsed().as_secs_f64();
    let report = feasibility_report(&purchase, true_intent, data)?;
    let confidence_upper_bound = report.iter().map(|r| r.confidence).fold(0.0, f64::max);
    let ti_records = report.iter().map(|r| r.count).sum();
    Ok(Allocation {
        method: config.method,
        utility: utility(&purchase, true_intent),
        ti_records,
        confidence_upper_bound,
        report,
        purchase,
        elapsed_seconds,
    })
}

/// Per-cell lookup used by tests and reports.
pub fn purchased_ti_cells<'a>(
    purchased: &'a PurchaseSet,
    true_intent: &'a Intent,
) -> impl Iterator<Item = (&'a Cell, u64)> {
    purchased.iter().filter(|(c, _)| true_intent.contains(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::PValueConfig;
    use crate::domain::{CellStats, Dimension};

    fn two_cell() -> (Dataset, Intent, Intent) {
        let s = DataSpace::new(vec![Dimension::new("x", &["a", "b"], false)]).unwrap();
        let d = Dataset::from_cells(
            s.clone(),
            vec![
                (Cell(vec![0]), CellStats { freq: 5, cost: 1.0 }),
                (Cell(vec![1]), CellStats { freq: 5, cost: 1.0 }),
            ],
        )
        .unwrap();
        let ti = Intent::from_indices(&s, &[vec![0]]).unwrap();
        (d, ti, Intent::all(&s))
    }

    #[test]
    fn utility_ratios() {
        let all_in = PurchaseSet::from_counts(vec![(Cell(vec![0]), 4)]).unwrap();
        let none_in = PurchaseSet::from_counts(vec![(Cell(vec![1]), 4)]).unwrap();
        let (_, ti, _) = two_cell();
        assert_eq!(utility(&all_in, &ti), 1.0);
        assert_eq!(utility(&none_in, &ti), 0.0);
        let five_of_61 =
            PurchaseSet::from_counts(vec![(Cell(vec![0]), 5), (Cell(vec![1]), 56)]).unwrap();
        assert!((utility(&five_of_61, &ti) - 0.082).abs() < 0.001);
    }

    #[test]
    fn feasibility_at_the_binomial_boundary() {
        let (d, ti, _) = two_cell();
        let x = PurchaseSet::from_counts(vec![(Cell(vec![0]), 3), (Cell(vec![1]), 1)]).unwrap();
        let exact = PValueConfig::exact();
        // p = 5/16 = 0.3125 ≥ 1 − 0.7.
        assert!(is_feasible(&x, &ti, &d, 0.7, &exact).unwrap());
        assert!(!is_feasible(&x, &ti, &d, 0.6, &exact).unwrap());
        assert!(is_feasible(&x, &ti, &d, 1.0, &exact).unwrap());
    }

    #[test]
    fn concentrated_purchase_is_infeasible() {
        let s = DataSpace::new(vec![Dimension::new("x", &["a", "b", "c"], false)]).unwrap();
        let d = Dataset::from_counts(
            s.clone(),
            vec![(Cell(vec![0]), 1), (Cell(vec![1]), 500), (Cell(vec![2]), 500)],
        )
        .unwrap();
        let ti = Intent::from_indices(&s, &[vec![0]]).unwrap();
        let x = PurchaseSet::from_counts(vec![
            (Cell(vec![0]), 20),
            (Cell(vec![1]), 1),
            (Cell(vec![2]), 1),
        ])
        .unwrap();
        assert!(!is_feasible(&x, &ti, &d, 0.3, &PValueConfig::exact()).unwrap());
    }

    #[test]
    fn config_validation() {
        let ok = AllocationConfig::new(AllocationMethod::Genetic, 10, 0.3);
        assert!(ok.validate().is_ok());
        assert!(AllocationConfig { q: 0, ..ok }.validate().is_err());
        assert!(AllocationConfig { elite: 60, ..ok }.validate().is_err());
        assert!(AllocationConfig { epsilon: 0.0, ..ok }.validate().is_err());
        assert!(AllocationConfig { z: 0, ..ok }.validate().is_err());
        assert!(AllocationConfig { generations: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn every_method_returns_q_records_inside_the_published_intent() {
        let (d, ti, pi) = two_cell();
        for method in AllocationMethod::ALL {
            let mut cfg = AllocationConfig::new(method, 12, 0.6);
            cfg.z = 200;
            cfg.seed = 3;
            let a = allocate(&pi, &ti, &d, &cfg).unwrap();
            assert_eq!(a.purchase.q(), 12, "{method}");
            assert!(a.purchase.iter().all(|(c, _)| pi.contains(c)));
            assert!(a.confidence_upper_bound <= 0.6 + 1e-12, "{method}");
            let again = allocate(&pi, &ti, &d, &cfg).unwrap();
            assert_eq!(a.purchase, again.purchase, "{method} is not deterministic");
        }
    }
}
