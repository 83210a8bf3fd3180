use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::domain::{Dataset, Intent};
use crate::error::{Error, Result};
use crate::expansion::{expand, ExpansionConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Alpha,
    /// Grid values `k` select the first `k` values of `dimension`, in schema
    /// order, as the true intent on that dimension.
    TiSize { dimension: String },
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParam::Lambda => f.write_str("lambda"),
            SweepParam::Alpha => f.write_str("alpha"),
            SweepParam::TiSize { dimension } => write!(f, "ti-size:{dimension}"),
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    /// `lambda`, `alpha` or `ti-size:<dimension>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "alpha" => Ok(SweepParam::Alpha),
            _ => match s.split_once(':') {
                Some(("ti-size", d)) if !d.is_empty() => Ok(SweepParam::TiSize {
                    dimension: d.to_string(),
                }),
                _ => Err(Error::Config(format!(
                    "unknown sweep parameter `{s}` (lambda | alpha | ti-size:<dimension>)"
                ))),
            },
        }
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: String,
    pub value: f64,
    pub attack: String,
    pub records_pi: u64,
    pub records_ti: u64,
    pub conf_lb: Option<f64>,
    pub conf_ub: Option<f64>,
    pub pi_size: u64,
    pub iterations: usize,
    pub error: Option<String>,
}

fn grid_intent(data: &Dataset, base: &Intent, dimension: &str, k: f64) -> Result<Intent> {
    let space = data.space();
    let dim = space
        .dimension_index(dimension)
        .ok_or_else(|| Error::Config(format!("unknown dimension `{dimension}`")))?;
    let card = space.dimension(dim).cardinality();
    if k.fract() != 0.0 || k < 1.0 || k > card as f64 {
        return Err(Error::Config(format!(
            "ti-size grid values must be integers in 1..={card}, got {k}"
        )));
    }
    let mut sel: Vec<Vec<usize>> = (0..space.n_dims()).map(|i| base.selection(i)).collect();
    sel[dim] = (0..k as usize).collect();
    Intent::from_indices(space, &sel)
}

/// One expansion per grid point, in grid order. Failures at a point are
/// recorded in its `error` field and the sweep carries on.
pub fn sweep(
    data: &Dataset,
    true_intent: &Intent,
    base: &ExpansionConfig,
    param: &SweepParam,
    grid: &[f64],
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    true_intent.check_space(data.space())?;
    let mut out = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut cfg = *base;
        let ti = match param {
            SweepParam::Lambda => {
                cfg.lambda = value;
                Ok(true_intent.clone())
            }
            SweepParam::Alpha => {
                cfg.alpha = value;
                Ok(true_intent.clone())
            }
            SweepParam::TiSize { dimension } => grid_intent(data, true_intent, dimension, value),
        };
        let mut point = SweepPoint {
            param: param.to_string(),
            value,
            attack: cfg.attack.name().to_string(),
            records_pi: 0,
            records_ti: 0,
            conf_lb: None,
            conf_ub: None,
            pi_size: 0,
            iterations: 0,
            error: None,
        };
        match ti.and_then(|ti| expand(data, &ti, &cfg).map(|x| (ti, x))) {
            Ok((ti, x)) => {
                point.records_pi = data.records_in_intent(&x.published).count;
                point.records_ti = data.records_in_intent(&ti).count;
                point.conf_lb = x.bounds.lower;
                point.conf_ub = Some(x.bounds.upper);
                point.pi_size = x.published.cartesian_size() as u64;
                point.iterations = x.trace.len();
            }
            Err(e) => point.error = Some(format!("{}: {e}", e.kind())),
        }
        out.push(point);
    }
    Ok(out)
}
