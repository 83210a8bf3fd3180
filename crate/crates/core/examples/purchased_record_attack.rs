//! Play the attacker: look at a purchase, rebuild the smallest intent that
//! explains it and flag over-represented cells.
//!
//! A buyer who simply buys the true intent plus a few decoys is caught; a
//! purchase built by G-MCMC keeps every true-intent cell under λ.
//!
//!     cargo run --release --example purchased_record_attack

use buyer_privacy::allocation::{allocate, AllocationConfig, AllocationMethod};
use buyer_privacy::attacks::{
    assess_purchase, infer_pseudo_pi, AttackerKnowledge, PValueConfig, PurchaseSet,
};
use buyer_privacy::domain::adult::{adult_dataset, case_study_intent_size1};
use buyer_privacy::domain::{DataSpace, Dataset};
use buyer_privacy::expansion::{expand, ExpansionConfig};

fn report(title: &str, purchase: &PurchaseSet, data: &Dataset, space: &DataSpace) -> buyer_privacy::Result<()> {
    let pseudo = infer_pseudo_pi(purchase, space)?;
    println!("\n{title}: q = {}, pseudo published intent covers {} cells", purchase.q(), pseudo.cartesian_size());
    let rows = assess_purchase(purchase, space, Some(data), &PValueConfig::monte_carlo(100_000, 1))?;
    for r in rows {
        let cell: Vec<&str> = space.dimensions().iter().map(|d| r.cell[&d.name].as_str()).collect();
        println!(
            "  {:<62} f_P {:5.3}  f_D {:5.3}  p {:5.3}  confidence {:5.1}%",
            cell.join(", "),
            r.f_p,
            r.f_d_pi.unwrap_or(f64::NAN),
            r.p_value.unwrap_or(f64::NAN),
            100.0 * r.confidence
        );
    }
    Ok(())
}

fn main() -> buyer_privacy::Result<()> {
    let data = adult_dataset();
    let space = data.space();
    let ti = case_study_intent_size1(space)?;
    let published = expand(&data, &ti, &ExpansionConfig::new(0.3, 0.5, AttackerKnowledge::EM_F))?.published;

    // Naive: 56 true-intent records and five decoys from a neighbouring cell.
    let target = ti.cells().remove(0);
    let mut decoy = target.clone();
    decoy.0[1] = space.dimension(1).value_index("White").expect("known value");
    let naive = PurchaseSet::from_counts([(target, 56), (decoy, 5)])?;
    report("naive purchase", &naive, &data, space)?;

    let mut cfg = AllocationConfig::new(AllocationMethod::Gmcmc, 61, 0.3);
    cfg.epsilon = 0.07;
    let protected = allocate(&published, &ti, &data, &cfg)?;
    report("G-MCMC purchase", &protected.purchase, &data, space)?;
    println!("\nutility {:.1}%", 100.0 * protected.utility);
    Ok(())
}
