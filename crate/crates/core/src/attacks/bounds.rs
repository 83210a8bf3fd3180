use serde::Serialize;

use super::knowledge::AttackerKnowledge;
use crate::domain::{Cell, Dataset, Intent};
use crate::error::{Error, Result};

/// Slack used when comparing a confidence against λ, so that products and
/// ratios landing exactly on the threshold are not rejected by rounding.
pub const LAMBDA_SLACK: f64 = 1e-12;

/// True when `confidence ≤ λ` up to [`LAMBDA_SLACK`].
pub fn within_threshold(confidence: f64, lambda: f64) -> bool {
    confidence <= lambda + LAMBDA_SLACK
}

/// Attacker confidence interval. Efficiency-maximization and
/// purchased-record attacks only expose an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceBounds {
    pub lower: Option<f64>,
    pub upper: f64,
}

/// Confidence interval of the uniform attacker who only sees `published`:
/// lower `∏ 1/|U_i|`, upper `∏ |V_i|/|U_i|`.
pub fn conf_pi_uniform(true_intent: &Intent, published: &Intent) -> Result<ConfidenceBounds> {
    if !true_intent.is_subset_of(published) {
        return Err(Error::InvalidIntent(
            "true intent is not contained in the published intent".into(),
        ));
    }
    let v = true_intent.selection_sizes();
    let u = published.selection_sizes();
    let mut lower = 1.0;
    let mut upper = 1.0;
    for (&vi, &ui) in v.iter().zip(&u) {
        lower /= ui as f64;
        upper *= vi as f64 / ui as f64;
    }
    Ok(ConfidenceBounds {
        lower: Some(lower),
        upper,
    })
}

fn require_em(knowledge: AttackerKnowledge) -> Result<()> {
    if knowledge.is_pi_uniform() {
        return Err(Error::Config(
            "efficiency-maximization bounds need distribution or cost knowledge".into(),
        ));
    }
    Ok(())
}

/// Upper bound `w(cell) / Σ_{t∈U} w(t)` for one cell of the published intent.
pub fn conf_em_upper(
    data: &Dataset,
    knowledge: AttackerKnowledge,
    published: &Intent,
    cell: &Cell,
) -> Result<f64> {
    require_em(knowledge)?;
    if !published.contains(cell) {
        return Err(Error::InvalidIntent(format!(
            "cell {cell} is outside the published intent"
        )));
    }
    let total = knowledge.mass(data, published);
    if !(total > 0.0) {
        return Err(Error::DegenerateIntent(
            "published intent carries no attacker weight".into(),
        ));
    }
    Ok(knowledge.weight(data, cell) / total)
}

/// `max_{r∈V} w(r) / Σ_{t∈U} w(t)`: the bound that has to stay below λ.
/// Zero when the true intent carries no weight.
pub fn em_intent_upper(
    data: &Dataset,
    knowledge: AttackerKnowledge,
    true_intent: &Intent,
    published: &Intent,
) -> Result<f64> {
    require_em(knowledge)?;
    let top = knowledge.max_weight(data, true_intent);
    if top == 0.0 {
        return Ok(0.0);
    }
    let total = knowledge.mass(data, published);
    if !(total > 0.0) {
        return Err(Error::DegenerateIntent(
            "published intent carries no attacker weight".into(),
        ));
    }
    Ok(top / total)
}

/// Lowest confidence reachable at all: the bound with the whole space
/// published.
pub fn conf_em_worst_case(
    data: &Dataset,
    knowledge: AttackerKnowledge,
    true_intent: &Intent,
) -> Result<f64> {
    em_intent_upper(data, knowledge, true_intent, &Intent::all(data.space()))
}

/// Bounds for any attack variant against a (true, published) pair.
pub fn intent_bounds(
    data: &Dataset,
    knowledge: AttackerKnowledge,
    true_intent: &Intent,
    published: &Intent,
) -> Result<ConfidenceBounds> {
    if knowledge.is_pi_uniform() {
        conf_pi_uniform(true_intent, published)
    } else {
        if !true_intent.is_subset_of(published) {
            return Err(Error::InvalidIntent(
                "true intent is not contained in the published intent".into(),
            ));
        }
        Ok(ConfidenceBounds {
            lower: None,
            upper: em_intent_upper(data, knowledge, true_intent, published)?,
        })
    }
}
