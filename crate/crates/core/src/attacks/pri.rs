use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;

use super::pvalue::{binomial_upper_tail, monte_carlo_upper_tails, PValueConfig, PValueMode};
use crate::domain::dataset::COUNT_COLUMN;
use crate::domain::{Cell, DataSpace, Dataset, Intent};
use crate::error::{Error, Result};

/// The buyer's purchased records as a multiset of cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PurchaseSet {
    counts: BTreeMap<Cell, u64>,
    q: u64,
}

impl PurchaseSet {
    pub fn from_counts<I: IntoIterator<Item = (Cell, u64)>>(counts: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut q = 0;
        for (cell, h) in counts {
            if h == 0 {
                continue;
            }
            q += h;
            *map.entry(cell).or_insert(0) += h;
        }
        if q == 0 {
            return Err(Error::Config("purchase set must hold at least one record".into()));
        }
        Ok(PurchaseSet { counts: map, q })
    }

    pub fn from_cells<I: IntoIterator<Item = Cell>>(cells: I) -> Result<Self> {
        PurchaseSet::from_counts(cells.into_iter().map(|c| (c, 1)))
    }

    /// Total number of purchased records.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Multiplicity `h(cell)`.
    pub fn count(&self, cell: &Cell) -> u64 {
        self.counts.get(cell).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cell, u64)> {
        self.counts.iter().map(|(c, &h)| (c, h))
    }

    pub fn distinct_cells(&self) -> usize {
        self.counts.len()
    }

    /// Cells expanded by multiplicity, in cell order.
    pub fn expanded(&self) -> Vec<Cell> {
        self.counts
            .iter()
            .flat_map(|(c, &h)| std::iter::repeat_n(c.clone(), h as usize))
            .collect()
    }

    /// Reads `dimension columns + __count`; without a count column every
    /// row is one record.
    pub fn load_csv<R: Read>(reader: R, space: &DataSpace) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let find = |name: &str| headers.iter().position(|h| h == name);
        let mut cols = Vec::new();
        for dim in space.dimensions() {
            cols.push(find(&dim.name).ok_or_else(|| Error::Schema {
                row: 0,
                column: dim.name.clone(),
                message: "column missing from header".into(),
            })?);
        }
        let count_col = find(COUNT_COLUMN);
        let mut counts = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut coords = Vec::with_capacity(cols.len());
            for (dim, &c) in space.dimensions().iter().zip(&cols) {
                let raw = rec.get(c).unwrap_or("");
                coords.push(dim.value_index(raw).ok_or_else(|| Error::Schema {
                    row: r + 1,
                    column: dim.name.clone(),
                    message: format!("value `{raw}` is not in the schema"),
                })?);
            }
            let h = match count_col {
                Some(c) => {
                    let raw = rec.get(c).unwrap_or("");
                    raw.parse::<u64>().map_err(|_| Error::Schema {
                        row: r + 1,
                        column: COUNT_COLUMN.into(),
                        message: format!("`{raw}` is not a non-negative integer"),
                    })?
                }
                None => 1,
            };
            counts.push((Cell(coords), h));
        }
        PurchaseSet::from_counts(counts)
    }

    pub fn write_csv<W: Write>(&self, space: &DataSpace, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = space.dimensions().iter().map(|d| d.name.as_str()).collect();
        header.push(COUNT_COLUMN);
        w.write_record(&header)?;
        for (cell, h) in self.iter() {
            let mut row: Vec<String> = space
                .value_names(cell)
                .into_iter()
                .map(str::to_string)
                .collect();
            row.push(h.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The smallest intent covering every purchased record: per dimension, the
/// set of observed values.
pub fn infer_pseudo_pi(purchased: &PurchaseSet, space: &DataSpace) -> Result<Intent> {
    let mut sel: Vec<Vec<usize>> = vec![Vec::new(); space.n_dims()];
    for (cell, _) in purchased.iter() {
        if !space.contains(cell) {
            return Err(Error::InvalidOperation(format!(
                "purchased cell {cell} is outside the space"
            )));
        }
        for (d, &v) in cell.0.iter().enumerate() {
            if !sel[d].contains(&v) {
                sel[d].push(v);
            }
        }
    }
    Intent::from_indices(space, &sel)
}

/// Observed frequency `f_P(x) = h(x) / q`.
pub fn empirical_dist(purchased: &PurchaseSet, cell: &Cell) -> f64 {
    purchased.count(cell) as f64 / purchased.q() as f64
}

/// `f_{D,PI}(x) = f_D(x) / Σ_{t ∈ PI} f_D(t)`.
pub fn conditional_density(data: &Dataset, pseudo_pi: &Intent, cell: &Cell) -> Result<f64> {
    if !pseudo_pi.contains(cell) {
        return Err(Error::InvalidIntent(format!(
            "cell {cell} is outside the pseudo published intent"
        )));
    }
    let mass = data.records_in_intent(pseudo_pi).count;
    if mass == 0 {
        return Err(Error::DegenerateIntent(
            "pseudo published intent holds no records".into(),
        ));
    }
    Ok(data.freq(cell) as f64 / mass as f64)
}

/// Probability that a null purchase of the same size contains `cell` at
/// least `h(cell)` times.
pub fn pvalue(
    cell: &Cell,
    purchased: &PurchaseSet,
    pseudo_pi: &Intent,
    data: &Dataset,
    config: &PValueConfig,
) -> Result<f64> {
    config.validate()?;
    let p0 = conditional_density(data, pseudo_pi, cell)?;
    let h = purchased.count(cell);
    match config.mode {
        PValueMode::ExactBinomial => Ok(binomial_upper_tail(purchased.q(), p0, h)),
        PValueMode::MonteCarlo => {
            let null = NullModel::new(data, pseudo_pi)?;
            let target = match null.index.get(cell) {
                Some(&i) => i,
                // Outside the null support: simulated count is always 0.
                None => return Ok(if h == 0 { 1.0 } else { 0.0 }),
            };
            Ok(monte_carlo_upper_tails(
                &null.weights,
                purchased.q(),
                &[(target, h)],
                config.replicates,
                config.seed,
            )?[0])
        }
    }
}

/// Attacker confidence that `cell` belongs to the true intent. Without
/// background knowledge this is `f_P(cell)`; with the data distribution it
/// is `1 − p-value`.
pub fn conf_pri(
    cell: &Cell,
    purchased: &PurchaseSet,
    data: Option<&Dataset>,
    config: &PValueConfig,
) -> Result<f64> {
    match data {
        None => Ok(empirical_dist(purchased, cell)),
        Some(d) => {
            let pseudo = infer_pseudo_pi(purchased, d.space())?;
            Ok(1.0 - pvalue(cell, purchased, &pseudo, d, config)?)
        }
    }
}

/// Null categorical distribution over populated cells of an intent.
struct NullModel {
    weights: Vec<f64>,
    index: BTreeMap<Cell, usize>,
}

impl NullModel {
    fn new(data: &Dataset, intent: &Intent) -> Result<Self> {
        let mut weights = Vec::new();
        let mut index = BTreeMap::new();
        for (cell, s) in data.populated() {
            if intent.contains(cell) {
                index.insert(cell.clone(), weights.len());
                weights.push(s.freq as f64);
            }
        }
        if weights.is_empty() {
            return Err(Error::DegenerateIntent(
                "pseudo published intent holds no records".into(),
            ));
        }
        Ok(NullModel { weights, index })
    }
}

/// One row of an attacker-side evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellAssessment {
    pub cell: BTreeMap<String, String>,
    #[serde(rename = "f_P")]
    pub f_p: f64,
    #[serde(rename = "f_D_PI")]
    pub f_d_pi: Option<f64>,
    pub p_value: Option<f64>,
    pub confidence: f64,
}

/// Evaluates the purchased-record inference attack on every purchased cell.
/// With `data` the attacker compares against the pseudo-PI density; the
/// Monte-Carlo mode shares one set of simulated multisets across cells.
pub fn assess_purchase(
    purchased: &PurchaseSet,
    space: &DataSpace,
    data: Option<&Dataset>,
    config: &PValueConfig,
) -> Result<Vec<CellAssessment>> {
    config.validate()?;
    let names = |cell: &Cell| -> BTreeMap<String, String> {
        space
            .dimensions()
            .iter()
            .zip(space.value_names(cell))
            .map(|(d, v)| (d.name.clone(), v.to_string()))
            .collect()
    };
    let Some(data) = data else {
        return Ok(purchased
            .iter()
            .map(|(cell, _)| {
                let f_p = empirical_dist(purchased, cell);
                CellAssessment {
                    cell: names(cell),
                    f_p,
                    f_d_pi: None,
                    p_value: None,
                    confidence: f_p,
                }
            })
            .collect());
    };
    let pseudo = infer_pseudo_pi(purchased, space)?;
    let densities = purchased
        .iter()
        .map(|(cell, _)| conditional_density(data, &pseudo, cell))
        .collect::<Result<Vec<_>>>()?;
    let pvalues: Vec<f64> = match config.mode {
        PValueMode::ExactBinomial => purchased
            .iter()
            .zip(&densities)
            .map(|((_, h), &p0)| binomial_upper_tail(purchased.q(), p0, h))
            .collect(),
        PValueMode::MonteCarlo => {
            let null = NullModel::new(data, &pseudo)?;
            let mut targets = Vec::new();
            let mut slots = Vec::new();
            for (cell, h) in purchased.iter() {
                match null.index.get(cell) {
                    Some(&i) => {
                        slots.push(Some(targets.len()));
                        targets.push((i, h));
                    }
                    None => slots.push(None),
                }
            }
            let tails = monte_carlo_upper_tails(
                &null.weights,
                purchased.q(),
                &targets,
                config.replicates,
                config.seed,
            )?;
            slots
                .into_iter()
                .map(|s| s.map_or(0.0, |t| tails[t]))
                .collect()
        }
    };
    Ok(purchased
        .iter()
        .zip(densities.into_iter().zip(pvalues))
        .map(|((cell, _), (p0, p))| CellAssessment {
            cell: names(cell),
            f_p: empirical_dist(purchased, cell),
            f_d_pi: Some(p0),
            p_value: Some(p),
            confidence: 1.0 - p,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Dimension;

    fn space() -> DataSpace {
        DataSpace::new(vec![
            Dimension::new("a", &["a1", "a2", "a3"], false),
            Dimension::new("b", &["b1", "b2"], false),
        ])
        .unwrap()
    }

    fn c(a: usize, b: usize) -> Cell {
        Cell(vec![a, b])
    }

    #[test]
    fn pseudo_pi_is_the_per_dimension_union() {
        let s = space();
        let x = PurchaseSet::from_cells([c(0, 0), c(1, 0)]).unwrap();
        let pi = infer_pseudo_pi(&x, &s).unwrap();
        assert_eq!(pi.selection(0), vec![0, 1]);
        assert_eq!(pi.selection(1), vec![0]);
        let one = PurchaseSet::from_counts([(c(2, 1), 7)]).unwrap();
        assert_eq!(infer_pseudo_pi(&one, &s).unwrap().cartesian_size(), 1);
    }

    #[test]
    fn empirical_distribution() {
        let x = PurchaseSet::from_counts([(c(0, 0), 5), (c(1, 1), 5)]).unwrap();
        assert_eq!(empirical_dist(&x, &c(0, 0)), 0.5);
        assert_eq!(empirical_dist(&x, &c(2, 0)), 0.0);
        let total: f64 = x.iter().map(|(cell, _)| empirical_dist(&x, cell)).sum();
        assert_eq!(total, 1.0);
    }

    #[test]
    fn zero_multiplicities_are_ignored_and_empty_sets_rejected() {
        let x = PurchaseSet::from_counts([(c(0, 0), 0), (c(1, 0), 2)]).unwrap();
        assert_eq!(x.distinct_cells(), 1);
        assert!(PurchaseSet::from_counts([(c(0, 0), 0)]).is_err());
    }

    #[test]
    fn conditional_density_normalizes() {
        let s = space();
        let d = Dataset::from_counts(s.clone(), [(c(0, 0), 10), (c(1, 0), 10), (c(2, 1), 30)]).unwrap();
        let pi = Intent::from_indices(&s, &[vec![0, 1], vec![0]]).unwrap();
        assert_eq!(conditional_density(&d, &pi, &c(0, 0)).unwrap(), 0.5);
        let all = Intent::all(&s);
        assert_eq!(conditional_density(&d, &all, &c(2, 1)).unwrap(), d.density(&c(2, 1)));
        let empty = Intent::from_indices(&s, &[vec![2], vec![0]]).unwrap();
        assert!(conditional_density(&d, &empty, &c(2, 0)).is_err());
    }

    #[test]
    fn exact_pvalues_and_confidence() {
        let s = space();
        let d = Dataset::from_counts(s.clone(), [(c(0, 0), 10), (c(1, 0), 10)]).unwrap();
        let x = PurchaseSet::from_counts([(c(0, 0), 3), (c(1, 0), 1)]).unwrap();
        let pi = infer_pseudo_pi(&x, &s).unwrap();
        let exact = PValueConfig::exact();
        let p = pvalue(&c(0, 0), &x, &pi, &d, &exact).unwrap();
        assert!((p - 0.3125).abs() < 1e-12);
        let conf = conf_pri(&c(0, 0), &x, Some(&d), &exact).unwrap();
        assert!((conf - 0.6875).abs() < 1e-12);
        assert_eq!(conf_pri(&c(0, 0), &x, None, &exact).unwrap(), 0.75);

        let all_ten = PurchaseSet::from_counts([(c(0, 0), 10)]).unwrap();
        let wide = Intent::from_indices(&s, &[vec![0, 1], vec![0]]).unwrap();
        let p = pvalue(&c(0, 0), &all_ten, &wide, &d, &exact).unwrap();
        assert!((p - 2f64.powi(-10)).abs() < 1e-15);
        // Unpurchased cell: every null draw is at least as extreme.
        assert_eq!(pvalue(&c(1, 0), &all_ten, &wide, &d, &exact).unwrap(), 1.0);
        assert_eq!(
            pvalue(&c(1, 0), &all_ten, &wide, &d, &PValueConfig::monte_carlo(100, 0)).unwrap(),
            1.0
        );
    }

    #[test]
    fn assessment_shares_one_simulation() {
        let s = space();
        let d = Dataset::from_counts(s.clone(), [(c(0, 0), 10), (c(1, 0), 10)]).unwrap();
        let x = PurchaseSet::from_counts([(c(0, 0), 3), (c(1, 0), 1)]).unwrap();
        let cfg = PValueConfig::monte_carlo(50_000, 9);
        let rows = assess_purchase(&x, &s, Some(&d), &cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].p_value.unwrap() - 0.3125).abs() < 0.01);
        assert!((rows[1].p_value.unwrap() - 0.9375).abs() < 0.01);
        assert_eq!(rows, assess_purchase(&x, &s, Some(&d), &cfg).unwrap());
        let blind = assess_purchase(&x, &s, None, &cfg).unwrap();
        assert_eq!(blind[0].confidence, 0.75);
        assert!(blind[0].p_value.is_none());
    }

    #[test]
    fn csv_round_trip() {
        let s = space();
        let x = PurchaseSet::from_counts([(c(0, 1), 3), (c(2, 0), 1)]).unwrap();
        let mut buf = Vec::new();
        x.write_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a,b,__count\na1,b2,3\na3,b1,1\n");
        assert_eq!(PurchaseSet::load_csv(text.as_bytes(), &s).unwrap(), x);
    }
}
