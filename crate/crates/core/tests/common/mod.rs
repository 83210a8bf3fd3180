//! Shared fixtures and independent reference implementations.
#![allow(dead_code)]

use buyer_privacy::attacks::{AttackerKnowledge, PurchaseSet};
use buyer_privacy::domain::{Cell, CellStats, DataSpace, Dataset, Dimension, Intent};
use rand::seq::index::sample;
use rand::Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

/// A random space with up to `max_dims` dimensions of 2..=`max_values` values.
pub fn random_space<R: Rng>(rng: &mut R, max_dims: usize, max_values: usize) -> DataSpace {
    let n = rng.random_range(1..=max_dims);
    let dims = (0..n)
        .map(|i| {
            let k = rng.random_range(2..=max_values);
            let names: Vec<String> = (0..k).map(|v| format!("d{i}v{v}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            Dimension::new(format!("d{i}"), &refs, rng.random_bool(0.5))
        })
        .collect();
    DataSpace::new(dims).unwrap()
}

/// Frequencies in 0..60 with roughly one empty cell in five (never all
/// empty), costs in [1, 10).
pub fn random_dataset<R: Rng>(rng: &mut R, space: &DataSpace) -> Dataset {
    let mut cells = space
        .cells()
        .map(|c| {
            let freq = if rng.random_bool(0.2) { 0 } else { rng.random_range(1..60) };
            let cost = rng.random_range(1.0..10.0);
            (c, CellStats { freq, cost })
        })
        .collect::<Vec<_>>();
    if cells.iter().all(|(_, s)| s.freq == 0) {
        cells[0].1.freq = 1;
    }
    Dataset::from_cells(space.clone(), cells).unwrap()
}

/// A random non-empty selection on every dimension.
pub fn random_intent<R: Rng>(rng: &mut R, space: &DataSpace) -> Intent {
    let sel: Vec<Vec<usize>> = space
        .dimensions()
        .iter()
        .map(|d| {
            let k = d.cardinality();
            let m = rng.random_range(1..=k.div_ceil(2));
            let mut v = sample(rng, k, m).into_vec();
            v.sort_unstable();
            v
        })
        .collect();
    Intent::from_indices(space, &sel).unwrap()
}

pub fn random_attack<R: Rng>(rng: &mut R) -> AttackerKnowledge {
    AttackerKnowledge::ALL[rng.random_range(0..4)]
}

/// `P[Bin(n, p) ≥ k]` through statrs.
pub fn statrs_tail(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return if k <= n { 1.0 } else { 0.0 };
    }
    Binomial::new(p, n).unwrap().sf(k - 1)
}

/// Weight of a cell under an EM attacker, empty cells costing 1.
pub fn em_weight(data: &Dataset, attack: AttackerKnowledge, cell: &Cell) -> f64 {
    let f = data.freq(cell) as f64 / data.total_count() as f64;
    let c = data.cost(cell);
    match (attack.knows_distribution, attack.knows_cost) {
        (true, true) => f * c,
        (true, false) => f,
        (false, true) => c,
        (false, false) => unreachable!("PI-uniform has no weights"),
    }
}

/// Attacker upper bound by brute force over the cells of both intents.
pub fn direct_upper(data: &Dataset, attack: AttackerKnowledge, ti: &Intent, pi: &Intent) -> f64 {
    if attack.is_pi_uniform() {
        return (0..ti.n_dims())
            .map(|i| ti.selection_size(i) as f64 / pi.selection_size(i) as f64)
            .product();
    }
    let mass: f64 = pi.cells().iter().map(|c| em_weight(data, attack, c)).sum();
    let top = ti
        .cells()
        .iter()
        .map(|c| em_weight(data, attack, c))
        .fold(0.0, f64::max);
    if top == 0.0 {
        0.0
    } else {
        top / mass
    }
}

/// Smallest-cartesian-size intent covering every purchased cell, found by
/// enumerating all selections. Panics if the minimum is not unique.
pub fn brute_force_pseudo_pi(purchase: &PurchaseSet, space: &DataSpace) -> Intent {
    let cards = space.cardinalities();
    let per_dim: Vec<Vec<Vec<usize>>> = cards
        .iter()
        .map(|&k| {
            (1u32..(1 << k))
                .map(|mask| (0..k).filter(|b| mask & (1 << b) != 0).collect())
                .collect()
        })
        .collect();
    let mut best: Option<(u128, Vec<Intent>)> = None;
    let mut idx = vec![0usize; cards.len()];
    loop {
        let sel: Vec<Vec<usize>> = idx.iter().enumerate().map(|(d, &i)| per_dim[d][i].clone()).collect();
        let intent = Intent::from_indices(space, &sel).unwrap();
        if purchase.iter().all(|(c, _)| intent.contains(c)) {
            let size = intent.cartesian_size();
            match &mut best {
                Some((s, v)) if size == *s => v.push(intent),
                Some((s, _)) if size > *s => {}
                _ => best = Some((size, vec![intent])),
            }
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                let (_, mut v) = best.expect("the full space covers everything");
                assert_eq!(v.len(), 1, "minimal covering intent is not unique");
                return v.pop().unwrap();
            }
            idx[d] += 1;
            if idx[d] < per_dim[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Exact-binomial PRI confidence per purchased TI cell, written without
/// the crate's p-value code.
pub fn independent_confidences(purchase: &PurchaseSet, ti: &Intent, data: &Dataset) -> Vec<f64> {
    let space = data.space();
    let mut union = vec![Vec::new(); space.n_dims()];
    for (c, _) in purchase.iter() {
        for (d, &v) in c.coords().iter().enumerate() {
            if !union[d].contains(&v) {
                union[d].push(v);
            }
        }
    }
    let inside = |c: &Cell| c.coords().iter().enumerate().all(|(d, v)| union[d].contains(v));
    let mass: u64 = data.populated().filter(|(c, _)| inside(c)).map(|(_, s)| s.freq).sum();
    purchase
        .iter()
        .filter(|(c, _)| ti.contains(c))
        .map(|(c, h)| 1.0 - statrs_tail(purchase.q(), data.freq(c) as f64 / mass as f64, h))
        .collect()
}
