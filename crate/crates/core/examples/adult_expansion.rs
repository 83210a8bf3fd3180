//! Expand the two Adult case-study intents against every attacker model and
//! show which values the greedy search added.
//!
//!     cargo run --release --example adult_expansion

use buyer_privacy::attacks::AttackerKnowledge;
use buyer_privacy::domain::adult::{adult_dataset, case_study_intent_size1, case_study_intent_size2};
use buyer_privacy::expansion::{expand, ExpansionConfig};

fn main() -> buyer_privacy::Result<()> {
    let data = adult_dataset();
    println!("Adult: {} records after cleaning", data.total_count());

    let settings = [
        ("TI size 1", case_study_intent_size1(data.space())?, [0.5, 0.5, 0.5, 0.5]),
        ("TI size 2", case_study_intent_size2(data.space())?, [1.0, 0.6, 0.6, 0.5]),
    ];
    for (name, ti, alphas) in settings {
        let ti_records = data.records_in_intent(&ti).count;
        println!("\n{name}: {ti_records} records in the true intent");
        for (attack, alpha) in AttackerKnowledge::ALL.into_iter().zip(alphas) {
            let x = expand(&data, &ti, &ExpansionConfig::new(0.3, alpha, attack))?;
            let pi = data.records_in_intent(&x.published).count;
            let lb = x
                .bounds
                .lower
                .map_or("  -  ".to_string(), |v| format!("{:5.1}%", 100.0 * v));
            println!(
                "  {attack:<10} α={alpha:.1}  LB {lb}  UB {:5.1}%  PI {pi:>4} records  utility {:5.1}%",
                100.0 * x.bounds.upper,
                100.0 * ti_records as f64 / pi as f64,
            );
            for step in &x.trace {
                println!(
                    "      + {}={} (adds {} records, score {:.3})",
                    step.dimension, step.value, step.addition, step.score
                );
            }
        }
    }
    Ok(())
}
