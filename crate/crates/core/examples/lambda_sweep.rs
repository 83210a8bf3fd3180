//! Sensitivity of the expansion to λ, α and the size of the true intent,
//! printed as plot-ready CSV.
//!
//!     cargo run --release --example lambda_sweep > sweep.csv

use buyer_privacy::attacks::AttackerKnowledge;
use buyer_privacy::domain::adult::{adult_dataset, case_study_intent_size1};
use buyer_privacy::expansion::ExpansionConfig;
use buyer_privacy::harness::{sweep, write_csv, SweepParam};

fn main() -> buyer_privacy::Result<()> {
    let data = adult_dataset();
    let ti = case_study_intent_size1(data.space())?;
    let lambdas: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let alphas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();

    let mut points = Vec::new();
    for attack in [AttackerKnowledge::PI_UNIFORM, AttackerKnowledge::EM_FC] {
        let base = ExpansionConfig::new(0.3, 0.5, attack);
        points.extend(sweep(&data, &ti, &base, &SweepParam::Lambda, &lambdas)?);
        points.extend(sweep(&data, &ti, &base, &SweepParam::Alpha, &alphas)?);
        for dim in ["age", "ethnicity", "hours-per-week"] {
            let card = data.space().dimension(data.space().dimension_index(dim).unwrap()).cardinality();
            let grid: Vec<f64> = (1..=card).map(|k| k as f64).collect();
            let param = SweepParam::TiSize { dimension: dim.into() };
            points.extend(sweep(&data, &ti, &base, &param, &grid)?);
        }
    }
    write_csv(&points, std::io::stdout().lock())
}
