use std::time::Instant;

use super::report::{mean_std, AllocationRow, ReportRow};
use crate::allocation::{allocate, AllocationConfig, AllocationMethod};
use crate::attacks::{intent_bounds, AttackerKnowledge, ConfidenceBounds};
use crate::domain::{Dataset, Intent};
use crate::error::{Error, Result};
use crate::expansion::{expand, ExpansionConfig};

/// One attack with its own λ and α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub attack: AttackerKnowledge,
    pub lambda: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub setting: String,
    pub data: Dataset,
    pub true_intent: Intent,
    pub variants: Vec<Variant>,
}

#[derive(Debug, Clone)]
pub struct AllocationExperiment {
    pub setting: String,
    pub data: Dataset,
    pub true_intent: Intent,
    pub published: Intent,
    /// Shared settings; `method` and `seed` are overridden per run.
    pub base: AllocationConfig,
    pub methods: Vec<AllocationMethod>,
    /// Stopping margin used by the greedy chain instead of `base.epsilon`.
    pub gmcmc_epsilon: Option<f64>,
    pub repeats: usize,
}

#[allow(clippy::too_many_arguments)]
fn report_row(
    setting: &str,
    attack: AttackerKnowledge,
    protection: &str,
    data: &Dataset,
    true_intent: &Intent,
    published: &Intent,
    bounds: ConfidenceBounds,
    iterations: usize,
) -> ReportRow {
    let pi = data.records_in_intent(published);
    let ti = data.records_in_intent(true_intent);
    ReportRow {
        setting: setting.to_string(),
        attack: attack.name().to_string(),
        protection: protection.to_string(),
        conf_lb: bounds.lower,
        conf_ub: Some(bounds.upper),
        total_cost: pi.total_cost,
        cost_ti: ti.total_cost,
        cost_ratio: if pi.total_cost > 0.0 {
            ti.total_cost / pi.total_cost
        } else {
            0.0
        },
        records_pi: pi.count,
        records_ti: ti.count,
        utility: if pi.count > 0 {
            ti.count as f64 / pi.count as f64
        } else {
            0.0
        },
        pi_size: published.cartesian_size().min(u64::MAX as u128) as u64,
        iterations,
        error: None,
        elapsed_seconds: 0.0,
    }
}

fn error_row(setting: &str, attack: AttackerKnowledge, protection: &str, e: &Error) -> ReportRow {
    ReportRow {
        setting: setting.to_string(),
        attack: attack.name().to_string(),
        protection: protection.to_string(),
        conf_lb: None,
        conf_ub: None,
        total_cost: 0.0,
        cost_ti: 0.0,
        cost_ratio: 0.0,
        records_pi: 0,
        records_ti: 0,
        utility: 0.0,
        pi_size: 0,
        iterations: 0,
        error: Some(format!("{}: {e}", e.kind())),
        elapsed_seconds: 0.0,
    }
}

/// Two rows per variant: publishing the true intent as is, then the
/// expanded intent. A failed expansion becomes a row with an error marker.
pub fn run_expansion_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let data = &config.data;
    let ti = &config.true_intent;
    ti.check_space(data.space())?;
    let mut rows = Vec::with_capacity(2 * config.variants.len());
    for v in &config.variants {
        let bare = intent_bounds(data, v.attack, ti, ti);
        rows.push(match bare {
            Ok(b) => report_row(&config.setting, v.attack, "w/o protection", data, ti, ti, b, 0),
            Err(e) => error_row(&config.setting, v.attack, "w/o protection", &e),
        });
        let start = Instant::now();
        let exp = expand(data, ti, &ExpansionConfig::new(v.lambda, v.alpha, v.attack));
        let elapsed = start.elapsed().as_secs_f64();
        let mut row = match exp {
            Ok(x) => report_row(
                &config.setting,
                v.attack,
                "expansion",
                data,
                ti,
                &x.published,
                x.bounds,
                x.trace.len(),
            ),
            Err(e) => error_row(&config.setting, v.attack, "expansion", &e),
        };
        row.elapsed_seconds = elapsed;
        rows.push(row);
    }
    Ok(rows)
}

/// Runs every method `repeats` times with seeds `base.seed + i` and
/// summarizes. Runs without a feasible set are counted as failures.
pub fn run_allocation_experiment(exp: &AllocationExperiment) -> Result<Vec<AllocationRow>> {
    if exp.repeats == 0 {
        return Err(Error::Config("repeats must be ≥ 1".into()));
    }
    let mut rows = Vec::with_capacity(exp.methods.len());
    for &method in &exp.methods {
        let mut conf = Vec::new();
        let mut hits = Vec::new();
        let mut utils = Vec::new();
        let mut times = Vec::new();
        let mut failures = 0;
        let mut last_error = None;
        for i in 0..exp.repeats {
            let mut cfg = exp.base;
            cfg.method = method;
            cfg.seed = exp.base.seed.wrapping_add(i as u64);
            if method == AllocationMethod::Gmcmc {
                if let Some(eps) = exp.gmcmc_epsilon {
                    cfg.epsilon = eps;
                }
            }
            match allocate(&exp.published, &exp.true_intent, &exp.data, &cfg) {
                Ok(a) => {
                    conf.push(a.confidence_upper_bound);
                    hits.push(a.ti_records as f64);
                    utils.push(a.utility);
                    times.push(a.elapsed_seconds);
                }
                Err(e @ Error::NoFeasibleAllocation { .. }) => {
                    failures += 1;
                    last_error = Some(e.to_string());
                }
                Err(e) => return Err(e),
            }
        }
        let (conf_ub_mean, conf_ub_std) = mean_std(&conf);
        let (records_ti_mean, records_ti_std) = mean_std(&hits);
        let (utility_mean, utility_std) = mean_std(&utils);
        let (elapsed_mean, elapsed_std) = mean_std(&times);
        rows.push(AllocationRow {
            setting: exp.setting.clone(),
            method: method.name().to_string(),
            q: exp.base.q,
            runs: exp.repeats,
            failures,
            conf_ub_mean,
            conf_ub_std,
            records_ti_mean,
            records_ti_std,
            utility_mean,
            utility_std,
            error: last_error,
            elapsed_mean,
            elapsed_std,
        });
    }
    Ok(rows)
}
