use serde::Serialize;

use crate::attacks::{intent_bounds, within_threshold};
use crate::domain::{Dataset, Intent};
use crate::error::{Error, Result};
use crate::expansion::{expand, ExpansionConfig};

/// Effect of dropping one dimension on a published intent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionRow {
    pub attack: String,
    pub dimension: String,
    pub lb_before: Option<f64>,
    pub ub_before: f64,
    pub proj_lb: Option<f64>,
    pub change_lb: Option<f64>,
    pub proj_ub: f64,
    pub change_ub: f64,
    pub proj_records_pi: u64,
    pub proj_records_ti: u64,
    pub proj_utility: f64,
    pub proj_pi_size: u64,
    /// Whether the projected intent broke λ and was expanded again.
    pub reexpanded: bool,
    pub updated_lb: Option<f64>,
    pub updated_ub: f64,
    pub updated_records_pi: u64,
    pub updated_utility: f64,
    pub updated_pi_size: u64,
    pub error: Option<String>,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Removes `dimension` from the space, the dataset and both intents, and
/// recomputes the attacker's bounds. If the projected intent is no longer
/// λ-private, the projected true intent is expanded again with `config`.
pub fn project_dimension(
    data: &Dataset,
    true_intent: &Intent,
    published: &Intent,
    dimension: &str,
    config: &ExpansionConfig,
) -> Result<ProjectionRow> {
    config.validate()?;
    let space = data.space();
    let dim = space
        .dimension_index(dimension)
        .ok_or_else(|| Error::Config(format!("unknown dimension `{dimension}`")))?;
    if space.n_dims() < 2 {
        return Err(Error::InvalidOperation(
            "cannot project away the only dimension".into(),
        ));
    }
    let before = intent_bounds(data, config.attack, true_intent, published)?;

    let pdata = data.without_dimension(dim)?;
    let pti = true_intent.without_dimension(dim);
    let ppi = published.without_dimension(dim);
    let proj = intent_bounds(&pdata, config.attack, &pti, &ppi)?;
    let ti_records = pdata.records_in_intent(&pti).count;
    let pi_records = pdata.records_in_intent(&ppi).count;

    let mut row = ProjectionRow {
        attack: config.attack.name().to_string(),
        dimension: dimension.to_string(),
        lb_before: before.lower,
        ub_before: before.upper,
        proj_lb: proj.lower,
        change_lb: proj.lower.zip(before.lower).map(|(a, b)| a - b),
        proj_ub: proj.upper,
        change_ub: proj.upper - before.upper,
        proj_records_pi: pi_records,
        proj_records_ti: ti_records,
        proj_utility: ratio(ti_records, pi_records),
        proj_pi_size: ppi.cartesian_size() as u64,
        reexpanded: false,
        updated_lb: proj.lower,
        updated_ub: proj.upper,
        updated_records_pi: pi_records,
        updated_utility: ratio(ti_records, pi_records),
        updated_pi_size: ppi.cartesian_size() as u64,
        error: None,
    };
    if !within_threshold(proj.upper, config.lambda) {
        row.reexpanded = true;
        match expand(&pdata, &pti, config) {
            Ok(x) => {
                let records = pdata.records_in_intent(&x.published).count;
                row.updated_lb = x.bounds.lower;
                row.updated_ub = x.bounds.upper;
                row.updated_records_pi = records;
                row.updated_utility = ratio(ti_records, records);
                row.updated_pi_size = x.published.cartesian_size() as u64;
            }
            Err(e) => row.error = Some(format!("{}: {e}", e.kind())),
        }
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::AttackerKnowledge;
    use crate::domain::adult::{adult_dataset, case_study_intent_size2};

    #[test]
    fn dropping_a_saturated_dimension_keeps_pi_uniform_bounds() {
        let data = adult_dataset();
        let ti = case_study_intent_size2(data.space()).unwrap();
        let cfg = ExpansionConfig::new(0.3, 1.0, AttackerKnowledge::PI_UNIFORM);
        let pi = expand(&data, &ti, &cfg).unwrap().published;
        // Income is untouched by the expansion, so its factor is 1.
        let row = project_dimension(&data, &ti, &pi, "income", &cfg).unwrap();
        assert_eq!(row.change_ub, 0.0);
        assert!(!row.reexpanded);
    }

    #[test]
    fn unknown_dimension_is_rejected() {
        let data = adult_dataset();
        let ti = case_study_intent_size2(data.space()).unwrap();
        let cfg = ExpansionConfig::new(0.3, 1.0, AttackerKnowledge::PI_UNIFORM);
        assert!(project_dimension(&data, &ti, &ti, "zodiac", &cfg).is_err());
    }
}
