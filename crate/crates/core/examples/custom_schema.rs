//! Bring your own market: a JSON schema, a CSV of aggregated cells and an
//! intent file, exactly as the command-line tool reads them.
//!
//!     cargo run --example custom_schema

use buyer_privacy::attacks::AttackerKnowledge;
use buyer_privacy::domain::{DataSpace, Dataset, Intent, LoadOptions};
use buyer_privacy::expansion::{expand, ExpansionConfig};

const SCHEMA: &str = r#"{"dimensions": [
  {"name": "education", "values": ["Pre-school", "Bachelors", "Masters", "Doctorate"], "ordinal": true},
  {"name": "workclass", "values": ["Federal-gov", "Private", "Self-emp"], "ordinal": false}
]}"#;

const CELLS: &str = "\
education,workclass,__count,__cost
Pre-school,Private,40,1.0
Bachelors,Federal-gov,120,2.0
Bachelors,Private,900,1.5
Masters,Federal-gov,60,3.0
Masters,Private,300,2.5
Masters,Self-emp,25,4.0
Doctorate,Federal-gov,12,5.0
Doctorate,Self-emp,8,6.0
";

const INTENT: &str = r#"{"selections": {"education": ["Doctorate"], "workclass": ["Federal-gov"]}}"#;

fn main() -> buyer_privacy::Result<()> {
    let space = DataSpace::from_json(SCHEMA)?;
    let data = Dataset::load_csv(CELLS.as_bytes(), &space, &LoadOptions::default())?;
    let ti = Intent::from_json(&space, INTENT)?;

    for attack in AttackerKnowledge::ALL {
        match expand(&data, &ti, &ExpansionConfig::new(0.3, 0.5, attack)) {
            Ok(x) => println!(
                "{attack:<10} UB {:5.1}%  buy {} records\n{}",
                100.0 * x.bounds.upper,
                data.records_in_intent(&x.published).count,
                x.published.to_json(&space)
            ),
            Err(e) => println!("{attack:<10} {e}"),
        }
    }
    Ok(())
}
