//! Generate a Gaussian synthetic market over the Adult-shaped space and
//! compare how much disguise each attacker model forces on the buyer.
//!
//!     cargo run --release --example synthetic_market [seed]

use buyer_privacy::attacks::AttackerKnowledge;
use buyer_privacy::domain::adult::case_study_intent_size1;
use buyer_privacy::domain::{adult_space, generate_synthetic, SyntheticParams};
use buyer_privacy::expansion::{expand, ExpansionConfig};

fn main() -> buyer_privacy::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(42);
    let space = adult_space();
    let data = generate_synthetic(&space, &SyntheticParams { seed, ..Default::default() })?;
    println!(
        "seed {seed}: {} cells, {} records",
        data.entries().count(),
        data.total_count()
    );

    let ti = case_study_intent_size1(&space)?;
    let bought = data.records_in_intent(&ti);
    println!("true intent: {} records costing {:.1}", bought.count, bought.total_cost);

    for (attack, alpha) in AttackerKnowledge::ALL.into_iter().zip([0.8, 0.4, 0.4, 0.8]) {
        let x = expand(&data, &ti, &ExpansionConfig::new(0.3, alpha, attack))?;
        let pi = data.records_in_intent(&x.published);
        println!(
            "{attack:<10} UB {:5.1}%  cost {:9.1} ({:4.1}% on the true intent)  size {}",
            100.0 * x.bounds.upper,
            pi.total_cost,
            100.0 * bought.total_cost / pi.total_cost,
            x.published.cartesian_size(),
        );
    }
    Ok(())
}
