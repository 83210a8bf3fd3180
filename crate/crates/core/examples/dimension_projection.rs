//! Drop each dimension in turn and see whether the published intent still
//! protects the buyer in the smaller space.
//!
//!     cargo run --release --example dimension_projection

use buyer_privacy::attacks::AttackerKnowledge;
use buyer_privacy::domain::adult::{adult_dataset, case_study_intent_size2};
use buyer_privacy::expansion::{expand, ExpansionConfig};
use buyer_privacy::harness::{project_dimension, render_projection_table};

fn main() -> buyer_privacy::Result<()> {
    let data = adult_dataset();
    let ti = case_study_intent_size2(data.space())?;
    let mut rows = Vec::new();
    for (attack, alpha) in [(AttackerKnowledge::PI_UNIFORM, 1.0), (AttackerKnowledge::EM_FC, 0.6)] {
        let cfg = ExpansionConfig::new(0.3, alpha, attack);
        let published = expand(&data, &ti, &cfg)?.published;
        for dim in data.space().dimensions() {
            rows.push(project_dimension(&data, &ti, &published, &dim.name, &cfg)?);
        }
    }
    print!("{}", render_projection_table(&rows));
    for r in rows.iter().filter(|r| r.reexpanded) {
        println!(
            "{} without {}: {:.1}% > λ, repaired to {:.1}% with {} records",
            r.attack,
            r.dimension,
            100.0 * r.proj_ub,
            100.0 * r.updated_ub,
            r.updated_records_pi
        );
    }
    Ok(())
}
