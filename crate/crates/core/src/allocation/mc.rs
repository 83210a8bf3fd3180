use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::market::Market;
use super::AllocationConfig;
use crate::attacks::PurchaseSet;
use crate::domain::{Dataset, Intent};
use crate::error::{Error, Result};

/// Draws `Z` purchases of size `q`, drops the infeasible ones and keeps the
/// one with the most true-intent records (earliest draw on ties). Draw `z`
/// uses ChaCha stream `z` of `seed`.
pub fn allocate_mc(
    published: &Intent,
    true_intent: &Intent,
    data: &Dataset,
    config: &AllocationConfig,
) -> Result<PurchaseSet> {
    config.validate()?;
    let market = Market::new(data, published, true_intent, config)?;
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(u64, Vec<u64>)> = None;
    for z in 0..config.z {
        let mut rng = base.clone();
        rng.set_stream(z);
        let counts = market.sample_counts(config.q, &mut rng);
        let hits = market.ti_records(&counts);
        // A draw that cannot beat the incumbent is skipped before the
        // feasibility test; the selected set is unchanged.
        if best.as_ref().is_some_and(|(b, _)| hits <= *b) {
            continue;
        }
        if market.status(&counts)?.feasible {
            best = Some((hits, counts));
        }
    }
    match best {
        Some((_, counts)) => Ok(market.to_purchase(&counts)),
        None => Err(Error::NoFeasibleAllocation {
            method: "mc".into(),
        }),
    }
}
