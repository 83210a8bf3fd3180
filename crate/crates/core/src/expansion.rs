//! Greedy growth of a published intent until the attacker's upper bound
//! drops to λ.
//!
//! Starting from the true intent, every round collects one candidate value
//! per ordinal dimension (the value closest to the current selection in
//! accumulated index distance) and every unselected value of each nominal
//! dimension. Each candidate is scored on how few records it adds and how
//! much it moves the constraint, and the best one is added.

use serde::{Deserialize, Serialize};

use crate::attacks::{intent_bounds, within_threshold, AttackerKnowledge, ConfidenceBounds};
use crate::domain::{DataSpace, Dataset, Intent};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    /// Maximal attacker confidence, in (0, 1].
    pub lambda: f64,
    /// Weight of the record-count factor in the score, in [0, 1].
    pub alpha: f64,
    pub attack: AttackerKnowledge,
    /// Defaults to the number of values that could still be added.
    pub max_iterations: Option<usize>,
}

impl ExpansionConfig {
    pub fn new(lambda: f64, alpha: f64, attack: AttackerKnowledge) -> Self {
        ExpansionConfig {
            lambda,
            alpha,
            attack,
            max_iterations: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::Config(format!(
                "lambda must be in (0, 1], got {}",
                self.lambda
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// A value that could be added to the published intent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub dim: usize,
    pub value: usize,
    /// Sum of index distances to the values already selected on `dim`
    /// (every pair counts 1 on nominal dimensions).
    pub accu_dist: f64,
    /// Records in the slab the value would add.
    pub addition: u64,
    /// Growth of the constraint's right-hand side.
    pub increase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredCandidate {
    pub candidate: Candidate,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub dimension: String,
    pub value: String,
    pub dim: usize,
    pub value_index: usize,
    pub addition: u64,
    pub increase: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub published: Intent,
    pub trace: Vec<TraceStep>,
    pub bounds: ConfidenceBounds,
}

/// Candidate values around `current`, in (dimension, value) order. Addition
/// and increase are left at zero; see [`evaluate_candidates`].
pub fn nearest_candidates(space: &DataSpace, current: &Intent) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for (i, dim) in space.dimensions().iter().enumerate() {
        let selected = current.selection(i);
        let dist = |u: usize| -> f64 {
            if dim.ordinal {
                selected.iter().map(|&s| u.abs_diff(s) as f64).sum()
            } else {
                selected.len() as f64
            }
        };
        let open = (0..dim.cardinality()).filter(|&v| !current.contains_value(i, v));
        if dim.ordinal {
            let mut best: Option<(usize, f64)> = None;
            for v in open {
                let d = dist(v);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((v, d));
                }
            }
            if let Some((v, d)) = best {
                out.push(Candidate {
                    dim: i,
                    value: v,
                    accu_dist: d,
                    addition: 0,
                    increase: 0.0,
                });
            }
        } else {
            for v in open {
                out.push(Candidate {
                    dim: i,
                    value: v,
                    accu_dist: dist(v),
                    addition: 0,
                    increase: 0.0,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoCandidate);
    }
    Ok(out)
}

/// Records in the slab `U_1 × ... × {value} × ... × U_n`.
pub fn candidate_addition(data: &Dataset, current: &Intent, candidate: &Candidate) -> u64 {
    data.records_in_intent(&current.with_slab(candidate.dim, candidate.value))
        .count
}

/// Slab cartesian size for the uniform attacker; slab attacker weight
/// otherwise.
pub fn candidate_increase(
    data: &Dataset,
    current: &Intent,
    candidate: &Candidate,
    attack: AttackerKnowledge,
) -> f64 {
    let slab = current.with_slab(candidate.dim, candidate.value);
    attack.mass(data, &slab)
}

/// Fills addition and increase for every candidate.
pub fn evaluate_candidates(
    data: &Dataset,
    current: &Intent,
    candidates: &mut [Candidate],
    attack: AttackerKnowledge,
) {
    for c in candidates.iter_mut() {
        c.addition = candidate_addition(data, current, c);
        c.increase = candidate_increase(data, current, c, attack);
    }
}

fn min_max(xs: impl Iterator<Item = f64> + Clone) -> impl Fn(f64) -> f64 {
    let lo = xs.clone().fold(f64::INFINITY, f64::min);
    let hi = xs.fold(f64::NEG_INFINITY, f64::max);
    move |x| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 }
}

/// `α·(max â − â) + (1 − α)·î`, with both factors min-max normalized over
/// the pool. Higher is better.
pub fn score_candidates(candidates: &[Candidate], alpha: f64) -> Vec<ScoredCandidate> {
    let norm_add = min_max(candidates.iter().map(|c| c.addition as f64));
    let norm_inc = min_max(candidates.iter().map(|c| c.increase));
    let max_add = candidates
        .iter()
        .map(|c| norm_add(c.addition as f64))
        .fold(0.0, f64::max);
    candidates
        .iter()
        .map(|&c| ScoredCandidate {
            candidate: c,
            score: alpha * (max_add - norm_add(c.addition as f64))
                + (1.0 - alpha) * norm_inc(c.increase),
        })
        .collect()
}

/// Highest score; ties go to the lower dimension, then the lower value.
fn best(scored: &[ScoredCandidate]) -> ScoredCandidate {
    let mut best = scored[0];
    for s in &scored[1..] {
        let better = s.score > best.score
            || (s.score == best.score
                && (s.candidate.dim, s.candidate.value) < (best.candidate.dim, best.candidate.value));
        if better {
            best = *s;
        }
    }
    best
}

/// Grows `true_intent` into a λ-private published intent.
pub fn expand(data: &Dataset, true_intent: &Intent, config: &ExpansionConfig) -> Result<Expansion> {
    config.validate()?;
    let space = data.space();
    true_intent.check_space(space)?;

    let everything = Intent::all(space);
    let floor = intent_bounds(data, config.attack, true_intent, &everything)?.upper;
    if !within_threshold(floor, config.lambda) {
        return Err(Error::Infeasible {
            lambda: config.lambda,
            floor,
        });
    }

    let limit = config.max_iterations.unwrap_or_else(|| {
        space
            .dimensions()
            .iter()
            .enumerate()
            .map(|(i, d)| d.cardinality() - true_intent.selection_size(i))
            .sum()
    });

    let mut published = true_intent.clone();
    let mut trace = Vec::new();
    loop {
        let bounds = intent_bounds(data, config.attack, true_intent, &published)?;
        if within_threshold(bounds.upper, config.lambda) {
            return Ok(Expansion {
                published,
                trace,
                bounds,
            });
        }
        if trace.len() >= limit {
            return Err(Error::IterationLimit(limit));
        }
        let mut candidates = nearest_candidates(space, &published)?;
        evaluate_candidates(data, &published, &mut candidates, config.attack);
        let chosen = best(&score_candidates(&candidates, config.alpha));
        let c = chosen.candidate;
        let dim = space.dimension(c.dim);
        trace.push(TraceStep {
            dimension: dim.name.clone(),
            value: dim.values[c.value].clone(),
            dim: c.dim,
            value_index: c.value,
            addition: c.addition,
            increase: c.increase,
            score: chosen.score,
        });
        published = published.with_value(c.dim, c.value);
    }
}

/// Writes the trace as CSV: one row per iteration.
pub fn write_trace_csv<W: std::io::Write>(trace: &[TraceStep], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iteration", "dimension", "value", "addition", "increase", "score"])?;
    for (k, s) in trace.iter().enumerate() {
        w.write_record([
            (k + 1).to_string(),
            s.dimension.clone(),
            s.value.clone(),
            s.addition.to_string(),
            format!("{}", s.increase),
            format!("{}", s.score),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Cell, CellStats, Dimension};

    fn education_space() -> DataSpace {
        DataSpace::new(vec![
            Dimension::new(
                "education",
                &["Pre-school", "Bachelors", "Masters", "Doctorate"],
                true,
            ),
            Dimension::new(
                "workclass",
                &["Federal-gov", "Without-pay", "Private", "Self-emp-not-inc"],
                false,
            ),
        ])
        .unwrap()
    }

    #[test]
    fn accumulated_distance_picks_nearest_ordinal_value() {
        let s = education_space();
        let u = Intent::from_indices(&s, &[vec![2, 3], vec![0]]).unwrap();
        let c = nearest_candidates(&s, &u).unwrap();
        let edu: Vec<_> = c.iter().filter(|c| c.dim == 0).collect();
        assert_eq!(edu.len(), 1);
        assert_eq!(edu[0].value, 1);
        assert_eq!(edu[0].accu_dist, 3.0);
        // Pre-school would have distance 2 + 3.
        let work: Vec<usize> = c.iter().filter(|c| c.dim == 1).map(|c| c.value).collect();
        assert_eq!(work, vec![1, 2, 3]);
    }

    #[test]
    fn ordinal_ties_take_the_lower_index() {
        let s = education_space();
        let u = Intent::from_indices(&s, &[vec![1, 2], vec![0]]).unwrap();
        let c = nearest_candidates(&s, &u).unwrap();
        assert_eq!(c[0].value, 0);
    }

    #[test]
    fn saturated_dimensions_contribute_nothing() {
        let s = education_space();
        let u = Intent::from_indices(&s, &[vec![0, 1, 2, 3], vec![0]]).unwrap();
        let c = nearest_candidates(&s, &u).unwrap();
        assert!(c.iter().all(|c| c.dim == 1));
        let all = Intent::all(&s);
        assert!(matches!(nearest_candidates(&s, &all), Err(Error::NoCandidate)));
    }

    #[test]
    fn score_weight_collapse() {
        let pool = vec![
            Candidate { dim: 0, value: 0, accu_dist: 1.0, addition: 10, increase: 1.0 },
            Candidate { dim: 0, value: 1, accu_dist: 1.0, addition: 0, increase: 0.0 },
            Candidate { dim: 1, value: 0, accu_dist: 1.0, addition: 5, increase: 4.0 },
        ];
        let by_add = score_candidates(&pool, 1.0);
        assert_eq!(best(&by_add).candidate.value, 1);
        assert_eq!(by_add[1].score, 1.0);
        let by_inc = score_candidates(&pool, 0.0);
        assert_eq!(best(&by_inc).candidate.dim, 1);
        let same = vec![pool[0], pool[0], pool[0]];
        assert!(score_candidates(&same, 0.5).iter().all(|s| s.score == 0.0));
    }

    #[test]
    fn increase_and_addition_on_a_small_table() {
        let s = education_space();
        let d = Dataset::from_cells(
            s.clone(),
            vec![
                (Cell(vec![2, 0]), CellStats { freq: 3, cost: 1.0 }),
                (Cell(vec![1, 0]), CellStats { freq: 7, cost: 2.0 }),
                (Cell(vec![1, 2]), CellStats { freq: 10, cost: 1.0 }),
            ],
        )
        .unwrap();
        let u = Intent::from_indices(&s, &[vec![2], vec![0]]).unwrap();
        let c = Candidate { dim: 0, value: 1, accu_dist: 1.0, addition: 0, increase: 0.0 };
        assert_eq!(candidate_addition(&d, &u, &c), 7);
        assert_eq!(candidate_increase(&d, &u, &c, AttackerKnowledge::PI_UNIFORM), 1.0);
        assert!((candidate_increase(&d, &u, &c, AttackerKnowledge::EM_F) - 0.35).abs() < 1e-12);
        assert_eq!(candidate_increase(&d, &u, &c, AttackerKnowledge::EM_C), 2.0);
        assert!((candidate_increase(&d, &u, &c, AttackerKnowledge::EM_FC) - 0.7).abs() < 1e-12);
        let empty = Candidate { dim: 0, value: 0, accu_dist: 2.0, addition: 0, increase: 0.0 };
        assert_eq!(candidate_addition(&d, &u, &empty), 0);
    }

    #[test]
    fn lambda_one_returns_the_true_intent() {
        let s = education_space();
        let d = Dataset::from_counts(s.clone(), vec![(Cell(vec![2, 0]), 3), (Cell(vec![0, 1]), 2)])
            .unwrap();
        let v = Intent::from_indices(&s, &[vec![2], vec![0]]).unwrap();
        for attack in AttackerKnowledge::ALL {
            let out = expand(&d, &v, &ExpansionConfig::new(1.0, 0.5, attack)).unwrap();
            assert_eq!(out.published, v);
            assert!(out.trace.is_empty());
        }
    }

    #[test]
    fn unreachable_lambda_reports_the_floor() {
        let s = education_space();
        let d = Dataset::from_counts(s.clone(), vec![(Cell(vec![2, 0]), 9), (Cell(vec![0, 1]), 1)])
            .unwrap();
        let v = Intent::from_indices(&s, &[vec![2], vec![0]]).unwrap();
        let err = expand(&d, &v, &ExpansionConfig::new(0.5, 0.5, AttackerKnowledge::EM_F)).unwrap_err();
        match err {
            Error::Infeasible { floor, .. } => assert!((floor - 0.9).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_config_is_rejected() {
        assert!(ExpansionConfig::new(0.0, 0.5, AttackerKnowledge::EM_F).validate().is_err());
        assert!(ExpansionConfig::new(1.5, 0.5, AttackerKnowledge::EM_F).validate().is_err());
        assert!(ExpansionConfig::new(0.5, -0.1, AttackerKnowledge::EM_F).validate().is_err());
    }
}
