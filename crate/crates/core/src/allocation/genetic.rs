use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::market::Market;
use super::AllocationConfig;
use crate::attacks::PurchaseSet;
use crate::domain::{Dataset, Intent};
use crate::error::{Error, Result};

/// One-point crossover of two purchases of equal size.
///
/// Both parents are laid out as sorted record lists; the first child takes
/// `a[..point]` and `b[point..]`, the second the complement.
pub fn crossover(
    a: &PurchaseSet,
    b: &PurchaseSet,
    point: usize,
) -> Result<(PurchaseSet, PurchaseSet)> {
    if a.q() != b.q() {
        return Err(Error::InvalidOperation(format!(
            "crossover of purchases of size {} and {}",
            a.q(),
            b.q()
        )));
    }
    if point as u64 > a.q() {
        return Err(Error::InvalidOperation(format!(
            "crossover point {point} beyond purchase size {}",
            a.q()
        )));
    }
    let (xa, xb) = (a.expanded(), b.expanded());
    let (ca, cb) = splice(&xa, &xb, point);
    Ok((PurchaseSet::from_cells(ca)?, PurchaseSet::from_cells(cb)?))
}

fn splice<T: Clone + Ord>(a: &[T], b: &[T], point: usize) -> (Vec<T>, Vec<T>) {
    let mut c1: Vec<T> = a[..point].iter().chain(&b[point..]).cloned().collect();
    let mut c2: Vec<T> = b[..point].iter().chain(&a[point..]).cloned().collect();
    c1.sort();
    c2.sort();
    (c1, c2)
}

fn records(counts: &[u64]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(i, &h)| std::iter::repeat_n(i, h as usize))
        .collect()
}

fn counts_of(records: &[usize], n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n];
    for &r in records {
        c[r] += 1;
    }
    c
}

/// Evolves `T` density samples for `W` generations, breeding the `R`
/// highest-utility feasible sets each round. Returns the best feasible set
/// seen (earliest on ties).
pub fn allocate_genetic(
    published: &Intent,
    true_intent: &Intent,
    data: &Dataset,
    config: &AllocationConfig,
) -> Result<PurchaseSet> {
    config.validate()?;
    let market = Market::new(data, published, true_intent, config)?;
    let n = market.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let fresh = |rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
        (0..config.population)
            .map(|_| records(&market.sample_counts(config.q, rng)))
            .collect()
    };

    let mut pool = fresh(&mut rng);
    let mut best: Option<(u64, Vec<u64>)> = None;
    let evaluate = |pool: Vec<Vec<usize>>,
                        best: &mut Option<(u64, Vec<u64>)>|
     -> Result<Vec<(u64, Vec<usize>)>> {
        let mut fit = Vec::new();
        for r in pool {
            let c = counts_of(&r, n);
            if market.status(&c)?.feasible {
                let hits = market.ti_records(&c);
                if best.as_ref().is_none_or(|(b, _)| hits > *b) {
                    *best = Some((hits, c));
                }
                fit.push((hits, r));
            }
        }
        Ok(fit)
    };

    for _ in 0..config.generations {
        let mut fit = evaluate(pool, &mut best)?;
        fit.sort_by_key(|x| std::cmp::Reverse(x.0));
        fit.truncate(config.elite);
        if fit.len() < 2 {
            pool = fresh(&mut rng);
            continue;
        }
        let q = config.q as usize;
        let mut next = Vec::with_capacity(2 * fit.len() * (fit.len() - 1));
        for i in 0..fit.len() {
            for j in 0..fit.len() {
                if i == j {
                    continue;
                }
                let k = if q > 1 { rng.random_range(1..q) } else { 0 };
                let (c1, c2) = splice(&fit[i].1, &fit[j].1, k);
                next.push(c1);
                next.push(c2);
            }
        }
        pool = next;
    }
    evaluate(pool, &mut best)?;

    match best {
        Some((_, c)) => Ok(market.to_purchase(&c)),
        None => Err(Error::NoFeasibleAllocation {
            method: "genetic".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Cell;

    fn set(cells: &[usize]) -> PurchaseSet {
        PurchaseSet::from_cells(cells.iter().map(|&c| Cell(vec![c]))).unwrap()
    }

    #[test]
    fn identical_parents_are_a_fixed_point() {
        let a = set(&[0, 1, 1, 2]);
        for k in 0..=4 {
            let (c1, c2) = crossover(&a, &a, k).unwrap();
            assert_eq!(c1, a);
            assert_eq!(c2, a);
        }
    }

    #[test]
    fn children_keep_size_and_material() {
        let a = set(&[0, 0, 0, 0]);
        let b = set(&[1, 1, 1, 1]);
        let (c1, c2) = crossover(&a, &b, 1).unwrap();
        assert_eq!(c1.q(), 4);
        assert_eq!(c2.q(), 4);
        assert_eq!(c1.count(&Cell(vec![0])), 1);
        assert_eq!(c2.count(&Cell(vec![0])), 3);
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        assert!(crossover(&set(&[0]), &set(&[0, 1]), 1).is_err());
        assert!(crossover(&set(&[0]), &set(&[1]), 2).is_err());
    }
}
