use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;

use super::intent::Intent;
use super::space::{Cell, DataSpace};
use crate::error::{Error, Result};

/// Column carrying a pre-aggregated record count.
pub const COUNT_COLUMN: &str = "__count";
/// Column carrying a per-cell record price.
pub const COST_COLUMN: &str = "__cost";

/// Tokens treated as a missing value during ingestion.
pub const MISSING_TOKENS: [&str; 2] = ["?", ""];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub freq: u64,
    pub cost: f64,
}

/// Record frequencies and prices, aggregated per cell.
///
/// Cells without an entry hold no records and cost `default_cost`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    space: DataSpace,
    cells: BTreeMap<Cell, CellStats>,
    default_cost: f64,
    total_count: u64,
}

/// Record count and purchase cost of the records falling in an intent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntentRecords {
    pub count: u64,
    pub total_cost: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Defaults to `__count` when present in the header.
    pub count_column: Option<String>,
    /// Defaults to `__cost` when present in the header.
    pub cost_column: Option<String>,
}

impl Dataset {
    /// Builds a dataset from explicit per-cell statistics. Cells listed with
    /// zero frequency keep their cost.
    pub fn from_cells<I>(space: DataSpace, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Cell, CellStats)>,
    {
        let mut map = BTreeMap::new();
        let mut total = 0u64;
        for (cell, stats) in cells {
            if !space.contains(&cell) {
                return Err(Error::InvalidOperation(format!(
                    "cell {cell} is outside the space"
                )));
            }
            if !(stats.cost > 0.0) || !stats.cost.is_finite() {
                return Err(Error::InvalidOperation(format!(
                    "cell {cell} has non-positive cost {}",
                    stats.cost
                )));
            }
            total += stats.freq;
            match map.entry(cell) {
                Entry::Vacant(e) => {
                    e.insert(stats);
                }
                Entry::Occupied(mut e) => {
                    let cur: &mut CellStats = e.get_mut();
                    cur.freq += stats.freq;
                    cur.cost = stats.cost;
                }
            }
        }
        if total == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(Dataset {
            space,
            cells: map,
            default_cost: 1.0,
            total_count: total,
        })
    }

    /// Unit-cost dataset from per-cell counts.
    pub fn from_counts<I>(space: DataSpace, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Cell, u64)>,
    {
        Dataset::from_cells(
            space,
            counts
                .into_iter()
                .map(|(c, freq)| (c, CellStats { freq, cost: 1.0 })),
        )
    }

    pub fn space(&self) -> &DataSpace {
        &self.space
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn default_cost(&self) -> f64 {
        self.default_cost
    }

    pub fn freq(&self, cell: &Cell) -> u64 {
        self.cells.get(cell).map_or(0, |s| s.freq)
    }

    pub fn cost(&self, cell: &Cell) -> f64 {
        self.cells.get(cell).map_or(self.default_cost, |s| s.cost)
    }

    /// `f_D(x) = freq(x) / total_count`.
    pub fn density(&self, cell: &Cell) -> f64 {
        self.freq(cell) as f64 / self.total_count as f64
    }

    /// Cells with an explicit entry (populated, or carrying a custom cost).
    pub fn entries(&self) -> impl Iterator<Item = (&Cell, &CellStats)> {
        self.cells.iter()
    }

    /// Cells holding at least one record.
    pub fn populated(&self) -> impl Iterator<Item = (&Cell, &CellStats)> {
        self.cells.iter().filter(|(_, s)| s.freq > 0)
    }

    pub fn records_in_intent(&self, intent: &Intent) -> IntentRecords {
        let mut count = 0u64;
        let mut total_cost = 0.0;
        for (cell, s) in self.populated() {
            if intent.contains(cell) {
                count += s.freq;
                total_cost += s.freq as f64 * s.cost;
            }
        }
        IntentRecords { count, total_cost }
    }

    /// `Σ f_D(t)` over the cells of `intent`.
    pub fn density_mass(&self, intent: &Intent) -> f64 {
        self.records_in_intent(intent).count as f64 / self.total_count as f64
    }

    /// `Σ cost(t)` over every cell of `intent`, including empty cells.
    pub fn cost_mass(&self, intent: &Intent) -> f64 {
        let mut explicit = 0u128;
        let mut sum = 0.0;
        for (cell, s) in &self.cells {
            if intent.contains(cell) {
                explicit += 1;
                sum += s.cost;
            }
        }
        let implicit = intent.cartesian_size().saturating_sub(explicit);
        sum + implicit as f64 * self.default_cost
    }

    /// `Σ f_D(t)·cost(t)` over the cells of `intent`.
    pub fn density_cost_mass(&self, intent: &Intent) -> f64 {
        self.records_in_intent(intent).total_cost / self.total_count as f64
    }

    /// Removes dimension `dim`, summing frequencies. The merged cost is the
    /// frequency-weighted mean, so `Σ freq·cost` is preserved; cells with no
    /// records fall back to the plain mean of the merged costs.
    pub fn without_dimension(&self, dim: usize) -> Result<Dataset> {
        let space = self.space.without_dimension(dim)?;
        struct Acc {
            freq: u64,
            weighted: f64,
            plain: f64,
            n: u64,
        }
        let mut acc: BTreeMap<Cell, Acc> = BTreeMap::new();
        let card = self.space.dimension(dim).cardinality() as u64;
        for (cell, s) in &self.cells {
            let a = acc.entry(cell.without_dimension(dim)).or_insert(Acc {
                freq: 0,
                weighted: 0.0,
                plain: 0.0,
                n: 0,
            });
            a.freq += s.freq;
            a.weighted += s.freq as f64 * s.cost;
            a.plain += s.cost;
            a.n += 1;
        }
        let default_cost = self.default_cost;
        let cells = acc.into_iter().map(|(cell, a)| {
            let cost = if a.freq > 0 {
                a.weighted / a.freq as f64
            } else {
                (a.plain + (card - a.n) as f64 * default_cost) / card as f64
            };
            (cell, CellStats { freq: a.freq, cost })
        });
        let mut out = Dataset::from_cells(space, cells)?;
        out.default_cost = default_cost;
        Ok(out)
    }

    /// Reads a dataset CSV with one column per dimension. Rows with a missing
    /// value are dropped; a value outside the schema is an error.
    pub fn load_csv<R: Read>(reader: R, space: &DataSpace, options: &LoadOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let find = |name: &str| headers.iter().position(|h| h == name);
        let mut dim_cols = Vec::with_capacity(space.n_dims());
        for dim in space.dimensions() {
            dim_cols.push(find(&dim.name).ok_or_else(|| Error::Schema {
                row: 0,
                column: dim.name.clone(),
                message: "column missing from header".into(),
            })?);
        }
        let count_name = options.count_column.as_deref().unwrap_or(COUNT_COLUMN);
        let cost_name = options.cost_column.as_deref().unwrap_or(COST_COLUMN);
        let count_col = find(count_name);
        let cost_col = find(cost_name);
        for (opt, col, name) in [
            (&options.count_column, count_col, count_name),
            (&options.cost_column, cost_col, cost_name),
        ] {
            if opt.is_some() && col.is_none() {
                return Err(Error::Schema {
                    row: 0,
                    column: name.to_string(),
                    message: "column missing from header".into(),
                });
            }
        }

        let mut cells: BTreeMap<Cell, CellStats> = BTreeMap::new();
        'rows: for (r, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = r + 1;
            let mut coords = Vec::with_capacity(space.n_dims());
            for (dim, &col) in space.dimensions().iter().zip(&dim_cols) {
                let raw = rec.get(col).unwrap_or("");
                if MISSING_TOKENS.contains(&raw) {
                    continue 'rows;
                }
                coords.push(dim.value_index(raw).ok_or_else(|| Error::Schema {
                    row,
                    column: dim.name.clone(),
                    message: format!("value `{raw}` is not in the schema"),
                })?);
            }
            let freq = match count_col {
                Some(c) => {
                    let raw = rec.get(c).unwrap_or("");
                    raw.parse::<u64>().map_err(|_| Error::Schema {
                        row,
                        column: count_name.to_string(),
                        message: format!("`{raw}` is not a non-negative integer"),
                    })?
                }
                None => 1,
            };
            let cost = match cost_col {
                Some(c) => {
                    let raw = rec.get(c).unwrap_or("");
                    let v = raw.parse::<f64>().map_err(|_| Error::Schema {
                        row,
                        column: cost_name.to_string(),
                        message: format!("`{raw}` is not a number"),
                    })?;
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::Schema {
                            row,
                            column: cost_name.to_string(),
                            message: format!("cost {v} must be positive"),
                        });
                    }
                    Some(v)
                }
                None => None,
            };
            let cell = Cell(coords);
            match cells.entry(cell) {
                Entry::Vacant(e) => {
                    e.insert(CellStats {
                        freq,
                        cost: cost.unwrap_or(1.0),
                    });
                }
                Entry::Occupied(mut e) => {
                    let s = e.get_mut();
                    if let Some(c) = cost {
                        if c != s.cost {
                            return Err(Error::Schema {
                                row,
                                column: cost_name.to_string(),
                                message: format!(
                                    "conflicting cost for a repeated cell ({} vs {c})",
                                    s.cost
                                ),
                            });
                        }
                    }
                    s.freq += freq;
                }
            }
        }
        Dataset::from_cells(space.clone(), cells)
    }

    /// Writes the aggregated form: dimension columns, `__count`, `__cost`,
    /// one row per explicit cell in coordinate order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self
            .space
            .dimensions()
            .iter()
            .map(|d| d.name.as_str())
            .collect();
        header.push(COUNT_COLUMN);
        header.push(COST_COLUMN);
        w.write_record(&header)?;
        for (cell, s) in &self.cells {
            let mut row: Vec<String> = self
                .space
                .value_names(cell)
                .into_iter()
                .map(str::to_string)
                .collect();
            row.push(s.freq.to_string());
            row.push(format!("{}", s.cost));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// `∏ |selection_i|` of an intent; cells without records are counted.
pub fn cartesian_size(space: &DataSpace, intent: &Intent) -> u128 {
    debug_assert!(intent.check_space(space).is_ok());
    intent.cartesian_size()
}
