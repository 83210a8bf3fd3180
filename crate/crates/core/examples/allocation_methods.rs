//! Compare the four allocation methods on the Adult case studies.
//!
//!     cargo run --release --example allocation_methods [Z]
//!
//! `Z` (default 100000) is the number of draws for MC simulation.

use buyer_privacy::allocation::{allocate, AllocationConfig, AllocationMethod};
use buyer_privacy::attacks::AttackerKnowledge;
use buyer_privacy::domain::adult::{adult_dataset, case_study_intent_size1, case_study_intent_size2};
use buyer_privacy::expansion::{expand, ExpansionConfig};
use buyer_privacy::harness::mean_std;

fn main() -> buyer_privacy::Result<()> {
    let z: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("Z must be an integer"))
        .unwrap_or(100_000);
    let data = adult_dataset();
    let settings = [
        (case_study_intent_size1(data.space())?, 0.5, 61, 0.07),
        (case_study_intent_size2(data.space())?, 0.6, 120, 0.01),
    ];
    for (ti, alpha, q, gmcmc_eps) in settings {
        let cfg = ExpansionConfig::new(0.3, alpha, AttackerKnowledge::EM_F);
        let published = expand(&data, &ti, &cfg)?.published;
        println!("\nq = {q}, published intent holds {} records", data.records_in_intent(&published).count);
        for method in AllocationMethod::ALL {
            let (mut utility, mut conf, mut time) = (vec![], vec![], vec![]);
            for seed in 0..10 {
                let mut cfg = AllocationConfig::new(method, q, 0.3);
                cfg.seed = seed;
                cfg.z = z;
                if method == AllocationMethod::Gmcmc {
                    cfg.epsilon = gmcmc_eps;
                }
                let a = allocate(&published, &ti, &data, &cfg)?;
                utility.push(a.utility);
                conf.push(a.confidence_upper_bound);
                time.push(a.elapsed_seconds);
            }
            let (u, us) = mean_std(&utility);
            let (c, cs) = mean_std(&conf);
            let (t, ts) = mean_std(&time);
            println!(
                "  {method:<8} utility {:4.1}%±{:3.1}  confidence {:4.1}%±{:3.1}  time {t:.4}s±{ts:.4}",
                100.0 * u,
                100.0 * us,
                100.0 * c,
                100.0 * cs
            );
        }
    }
    Ok(())
}
