use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One categorical attribute. For ordinal dimensions the order of `values`
/// defines the index distance used during expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub values: Vec<String>,
    #[serde(default)]
    pub ordinal: bool,
}

impl Dimension {
    pub fn new<S: Into<String>>(name: S, values: &[&str], ordinal: bool) -> Self {
        Dimension {
            name: name.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
            ordinal,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

/// The finite product space `D_1 × ... × D_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataSpace {
    dimensions: Vec<Dimension>,
}

#[derive(Deserialize)]
struct RawSpace {
    dimensions: Vec<Dimension>,
}

impl<'de> Deserialize<'de> for DataSpace {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpace::deserialize(de)?;
        DataSpace::new(raw.dimensions).map_err(serde::de::Error::custom)
    }
}

impl DataSpace {
    pub fn new(dimensions: Vec<Dimension>) -> Result<Self> {
        if dimensions.is_empty() {
            return Err(Error::InvalidSchema("space has no dimensions".into()));
        }
        let mut names = HashSet::new();
        for dim in &dimensions {
            if !names.insert(dim.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate dimension `{}`",
                    dim.name
                )));
            }
            if dim.values.is_empty() {
                return Err(Error::InvalidSchema(format!(
                    "dimension `{}` has no values",
                    dim.name
                )));
            }
            let mut seen = HashSet::new();
            for v in &dim.values {
                if !seen.insert(v.as_str()) {
                    return Err(Error::InvalidSchema(format!(
                        "duplicate value `{}` in dimension `{}`",
                        v, dim.name
                    )));
                }
            }
        }
        Ok(DataSpace { dimensions })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("space serializes")
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn dimension(&self, i: usize) -> &Dimension {
        &self.dimensions[i]
    }

    pub fn n_dims(&self) -> usize {
        self.dimensions.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.dimensions.iter().map(Dimension::cardinality).collect()
    }

    pub fn dimension_index(&self, name: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.name == name)
    }

    /// Number of cells in the whole space.
    pub fn size(&self) -> u128 {
        self.dimensions
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.cardinality() as u128))
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        cell.0.len() == self.n_dims()
            && cell
                .0
                .iter()
                .zip(&self.dimensions)
                .all(|(&v, d)| v < d.cardinality())
    }

    /// Resolves one value name per dimension into a cell.
    pub fn cell_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Cell> {
        if names.len() != self.n_dims() {
            return Err(Error::InvalidOperation(format!(
                "expected {} values, got {}",
                self.n_dims(),
                names.len()
            )));
        }
        let coords = names
            .iter()
            .zip(&self.dimensions)
            .map(|(name, dim)| {
                dim.value_index(name.as_ref()).ok_or_else(|| {
                    Error::InvalidOperation(format!(
                        "value `{}` not in dimension `{}`",
                        name.as_ref(),
                        dim.name
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cell(coords))
    }

    pub fn value_names(&self, cell: &Cell) -> Vec<&str> {
        cell.0
            .iter()
            .zip(&self.dimensions)
            .map(|(&v, d)| d.values[v].as_str())
            .collect()
    }

    /// All cells in lexicographic order of their coordinates.
    pub fn cells(&self) -> CellIter {
        CellIter {
            cards: self.cardinalities(),
            next: Some(vec![0; self.n_dims()]),
        }
    }

    /// The space with dimension `i` removed.
    pub fn without_dimension(&self, i: usize) -> Result<DataSpace> {
        if self.n_dims() < 2 {
            return Err(Error::InvalidOperation(
                "cannot remove the only dimension".into(),
            ));
        }
        let mut dims = self.dimensions.clone();
        dims.remove(i);
        DataSpace::new(dims)
    }
}

/// A single value combination, one value index per dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub Vec<usize>);

impl Cell {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn without_dimension(&self, i: usize) -> Cell {
        let mut c = self.0.clone();
        c.remove(i);
        Cell(c)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub struct CellIter {
    cards: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for CellIter {
    type Item = Cell;

    fn next(&mut self) -> Option<Cell> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.cards[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(Cell(current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DataSpace {
        DataSpace::new(vec![
            Dimension::new("a", &["a0", "a1"], true),
            Dimension::new("b", &["b0", "b1", "b2"], false),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_bad_schemas() {
        assert!(DataSpace::new(vec![]).is_err());
        assert!(DataSpace::new(vec![Dimension::new("a", &[], false)]).is_err());
        assert!(DataSpace::new(vec![Dimension::new("a", &["x", "x"], false)]).is_err());
        assert!(DataSpace::new(vec![
            Dimension::new("a", &["x"], false),
            Dimension::new("a", &["y"], false)
        ])
        .is_err());
    }

    #[test]
    fn enumerates_every_cell_once() {
        let s = small();
        let cells: Vec<Cell> = s.cells().collect();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0], Cell(vec![0, 0]));
        assert_eq!(cells[5], Cell(vec![1, 2]));
        let mut sorted = cells.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, cells);
    }

    #[test]
    fn schema_json_round_trip() {
        let s = small();
        let back = DataSpace::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let err = DataSpace::from_json(r#"{"dimensions":[{"name":"a","values":[]}]}"#);
        assert!(err.is_err());
    }

    #[test]
    fn names_resolve() {
        let s = small();
        let c = s.cell_from_names(&["a1", "b2"]).unwrap();
        assert_eq!(c, Cell(vec![1, 2]));
        assert_eq!(s.value_names(&c), vec!["a1", "b2"]);
        assert!(s.cell_from_names(&["a1", "zz"]).is_err());
    }
}
