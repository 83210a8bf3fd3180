use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::projection::ProjectionRow;
use super::sweep::SweepPoint;
use crate::error::Result;

/// One line of an expansion table. Wall-clock time is kept out of the CSV
/// so reports are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub setting: String,
    pub attack: String,
    pub protection: String,
    pub conf_lb: Option<f64>,
    pub conf_ub: Option<f64>,
    pub total_cost: f64,
    pub cost_ti: f64,
    pub cost_ratio: f64,
    pub records_pi: u64,
    pub records_ti: u64,
    pub utility: f64,
    pub pi_size: u64,
    pub iterations: usize,
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

/// Mean and spread of repeated allocation runs for one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationRow {
    pub setting: String,
    pub method: String,
    pub q: u64,
    pub runs: usize,
    pub failures: usize,
    pub conf_ub_mean: f64,
    pub conf_ub_std: f64,
    pub records_ti_mean: f64,
    pub records_ti_std: f64,
    pub utility_mean: f64,
    pub utility_std: f64,
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed_mean: f64,
    #[serde(skip)]
    pub elapsed_std: f64,
}

/// Mean and population standard deviation; `(NaN, NaN)` when empty.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Serializes rows with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn opt_pct(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), pct)
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out
}

/// Markdown rendering with one-decimal percentages.
pub fn render_expansion_table(rows: &[ReportRow]) -> String {
    table(
        &[
            "Setting", "Attack", "Protection", "Conf. LB", "Conf. UB", "Total Cost",
            "Cost (TI)", "Cost Ratio", "# Records (PI)", "# Records (TI)", "Utility",
            "PI Size",
        ],
        rows.iter()
            .map(|r| {
                if let Some(e) = &r.error {
                    return vec![
                        r.setting.clone(),
                        r.attack.clone(),
                        r.protection.clone(),
                        format!("error: {e}"),
                    ];
                }
                vec![
                    r.setting.clone(),
                    r.attack.clone(),
                    r.protection.clone(),
                    opt_pct(r.conf_lb),
                    opt_pct(r.conf_ub),
                    format!("{:.1}", r.total_cost),
                    format!("{:.1}", r.cost_ti),
                    pct(r.cost_ratio),
                    r.records_pi.to_string(),
                    r.records_ti.to_string(),
                    pct(r.utility),
                    r.pi_size.to_string(),
                ]
            })
            .collect(),
    )
}

pub fn render_allocation_table(rows: &[AllocationRow]) -> String {
    table(
        &[
            "Setting", "Method", "q", "Conf. UB", "# Records (TI)", "Utility", "Time (s)",
            "Failures",
        ],
        rows.iter()
            .map(|r| {
                vec![
                    r.setting.clone(),
                    r.method.clone(),
                    r.q.to_string(),
                    format!("{}±{}", pct(r.conf_ub_mean), pct(r.conf_ub_std)),
                    format!("{:.1}±{:.1}", r.records_ti_mean, r.records_ti_std),
                    format!("{}±{}", pct(r.utility_mean), pct(r.utility_std)),
                    format!("{:.3}±{:.3}", r.elapsed_mean, r.elapsed_std),
                    r.failures.to_string(),
                ]
            })
            .collect(),
    )
}

pub fn render_projection_table(rows: &[ProjectionRow]) -> String {
    table(
        &[
            "Attack", "Dim. Reduced", "Proj. LB", "Change LB", "Proj. UB", "Change UB",
            "Proj. # PI", "Updated # PI", "Proj. # TI", "Proj. Utility", "Updated Utility",
            "Proj. PI Size", "Updated PI Size",
        ],
        rows.iter()
            .map(|r| {
                vec![
                    r.attack.clone(),
                    r.dimension.clone(),
                    opt_pct(r.proj_lb),
                    opt_pct(r.change_lb),
                    pct(r.proj_ub),
                    pct(r.change_ub),
                    r.proj_records_pi.to_string(),
                    r.updated_records_pi.to_string(),
                    r.proj_records_ti.to_string(),
                    pct(r.proj_utility),
                    pct(r.updated_utility),
                    r.proj_pi_size.to_string(),
                    r.updated_pi_size.to_string(),
                ]
            })
            .collect(),
    )
}

pub fn render_sweep_table(points: &[SweepPoint]) -> String {
    table(
        &[
            "Param", "Value", "Attack", "Conf. LB", "Conf. UB", "# Records (PI)",
            "# Records (TI)", "PI Size",
        ],
        points
            .iter()
            .map(|p| {
                let mut r = vec![p.param.clone(), format!("{}", p.value), p.attack.clone()];
                match &p.error {
                    Some(e) => r.push(format!("error: {e}")),
                    None => r.extend([
                        opt_pct(p.conf_lb),
                        opt_pct(p.conf_ub),
                        p.records_pi.to_string(),
                        p.records_ti.to_string(),
                        p.pi_size.to_string(),
                    ]),
                }
                r
            })
            .collect(),
    )
}
