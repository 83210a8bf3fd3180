use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::market::Market;
use super::{AllocationConfig, AllocationMethod};
use crate::attacks::PurchaseSet;
use crate::domain::{Dataset, Intent};
use crate::error::{Error, Result};

/// Kinds of single-record swaps. A record of the first class is removed and
/// one of the second class is added.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveGroup {
    /// Disguise → true intent; the only move the greedy chain uses.
    DisguiseToTrue = 1,
    DisguiseToDisguise = 2,
    TrueToDisguise = 3,
    TrueToTrue = 4,
}

impl MoveGroup {
    const ALL: [MoveGroup; 4] = [
        MoveGroup::DisguiseToTrue,
        MoveGroup::DisguiseToDisguise,
        MoveGroup::TrueToDisguise,
        MoveGroup::TrueToTrue,
    ];

    fn removes_true(self) -> bool {
        matches!(self, MoveGroup::TrueToDisguise | MoveGroup::TrueToTrue)
    }

    fn adds_true(self) -> bool {
        matches!(self, MoveGroup::DisguiseToTrue | MoveGroup::TrueToTrue)
    }
}

/// `min(1, new/old)`; from a zero-utility state any gain is accepted and a
/// neutral move is a fair coin.
pub fn acceptance_probability(old_utility: f64, new_utility: f64) -> f64 {
    if old_utility <= 0.0 {
        if new_utility > 0.0 {
            1.0
        } else {
            0.5
        }
    } else {
        (new_utility / old_utility).min(1.0)
    }
}

/// Random walk over feasible purchases, started from a density sample.
///
/// Stops once a true-intent cell is purchased and the tightest one sits
/// within `epsilon` of λ, returning the current state. If the proposal cap
/// is reached first, the best feasible state visited is returned instead.
/// A state from which every allowed move is infeasible is absorbing, so the
/// walk also stops once all of them have been rejected; the result is the
/// one the cap would have produced.
pub fn allocate_mcmc(
    published: &Intent,
    true_intent: &Intent,
    data: &Dataset,
    config: &AllocationConfig,
) -> Result<PurchaseSet> {
    config.validate()?;
    let method = match config.method {
        AllocationMethod::Gmcmc => AllocationMethod::Gmcmc,
        _ => AllocationMethod::Mcmc,
    };
    let market = Market::new(data, published, true_intent, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut current = None;
    for _ in 0..config.max_redraws.max(1) {
        let counts = market.sample_counts(config.q, &mut rng);
        let status = market.status(&counts)?;
        if status.feasible {
            current = Some((counts, status));
            break;
        }
    }
    let Some((mut counts, mut status)) = current else {
        return Err(Error::NoFeasibleAllocation {
            method: method.name().into(),
        });
    };
    let q = config.q as f64;
    let mut hits = market.ti_records(&counts);
    let mut best = (hits, counts.clone());
    let mut dead_ends: HashSet<(usize, usize)> = HashSet::new();

    for _ in 0..config.mcmc_cap() {
        if hits > 0 && status.min_gap < config.epsilon {
            return Ok(market.to_purchase(&counts));
        }
        let Some(group) = pick_group(&market, &counts, hits, config.q, method, &mut rng) else {
            break;
        };
        let from = pick_removed(&market, &counts, group.removes_true(), &mut rng);
        let pool = if group.adds_true() {
            &market.ti_cells
        } else {
            &market.disguise_cells
        };
        let same_class = group.removes_true() == group.adds_true();
        let to = loop {
            let c = pool[rng.random_range(0..pool.len())];
            if !(same_class && c == from) {
                break c;
            }
        };

        let mut proposal = counts.clone();
        proposal[from] -= 1;
        proposal[to] += 1;
        let new_status = market.status(&proposal)?;
        if !new_status.feasible {
            dead_ends.insert((from, to));
            if dead_ends.len() as u64 == move_count(&market, &counts, method) {
                break;
            }
            continue;
        }
        let new_hits = market.ti_records(&proposal);
        let a = acceptance_probability(hits as f64 / q, new_hits as f64 / q);
        if a >= 1.0 || rng.random::<f64>() < a {
            counts = proposal;
            status = new_status;
            hits = new_hits;
            dead_ends.clear();
            if hits > best.0 {
                best = (hits, counts.clone());
            }
        }
    }
    Ok(market.to_purchase(&best.1))
}

fn pick_group<R: Rng>(
    market: &Market,
    counts: &[u64],
    hits: u64,
    q: u64,
    method: AllocationMethod,
    rng: &mut R,
) -> Option<MoveGroup> {
    let has_true = hits > 0;
    let has_disguise = hits < q;
    let n_true = market.ti_cells.len();
    let n_disguise = market.disguise_cells.len();
    debug_assert_eq!(counts.iter().sum::<u64>(), q);
    let applicable: Vec<MoveGroup> = MoveGroup::ALL
        .into_iter()
        .filter(|g| method == AllocationMethod::Mcmc || *g == MoveGroup::DisguiseToTrue)
        .filter(|g| match g {
            MoveGroup::DisguiseToTrue => has_disguise && n_true > 0,
            MoveGroup::DisguiseToDisguise => has_disguise && n_disguise > 1,
            MoveGroup::TrueToDisguise => has_true && n_disguise > 0,
            MoveGroup::TrueToTrue => has_true && n_true > 1,
        })
        .collect();
    if applicable.is_empty() {
        None
    } else {
        Some(applicable[rng.random_range(0..applicable.len())])
    }
}

/// Distinct (removed, added) pairs reachable from `counts`.
fn move_count(market: &Market, counts: &[u64], method: AllocationMethod) -> u64 {
    let held = |cells: &[usize]| cells.iter().filter(|&&i| counts[i] > 0).count() as u64;
    let (t_held, d_held) = (held(&market.ti_cells), held(&market.disguise_cells));
    let (nt, nd) = (
        market.ti_cells.len() as u64,
        market.disguise_cells.len() as u64,
    );
    let greedy = d_held * nt;
    if method == AllocationMethod::Gmcmc {
        return greedy;
    }
    greedy + d_held * nd.saturating_sub(1) + t_held * nd + t_held * nt.saturating_sub(1)
}

/// Local index of a purchased record of the requested class, uniform over
/// records (so cells are weighted by multiplicity).
fn pick_removed<R: Rng>(market: &Market, counts: &[u64], true_class: bool, rng: &mut R) -> usize {
    let cells = if true_class {
        &market.ti_cells
    } else {
        &market.disguise_cells
    };
    let total: u64 = cells.iter().map(|&i| counts[i]).sum();
    let mut k = rng.random_range(0..total);
    for &i in cells {
        if k < counts[i] {
            return i;
        }
        k -= counts[i];
    }
    unreachable!("pick_removed called on an empty class")
}
