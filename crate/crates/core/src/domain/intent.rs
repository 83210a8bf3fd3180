use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::space::{Cell, DataSpace};
use crate::error::{Error, Result};

/// A conjunctive selection `S_1 ∧ ... ∧ S_n`: one non-empty value set per
/// dimension. Used for both the true intent and the published intent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Intent {
    masks: Vec<Vec<bool>>,
}

impl Intent {
    /// Builds an intent from value indices per dimension.
    pub fn from_indices(space: &DataSpace, selections: &[Vec<usize>]) -> Result<Self> {
        if selections.len() != space.n_dims() {
            return Err(Error::InvalidIntent(format!(
                "expected {} selections, got {}",
                space.n_dims(),
                selections.len()
            )));
        }
        let mut masks = Vec::with_capacity(selections.len());
        for (i, sel) in selections.iter().enumerate() {
            let dim = space.dimension(i);
            let mut mask = vec![false; dim.cardinality()];
            for &v in sel {
                if v >= dim.cardinality() {
                    return Err(Error::InvalidIntent(format!(
                        "value index {v} out of range for `{}`",
                        dim.name
                    )));
                }
                mask[v] = true;
            }
            if !mask.iter().any(|&b| b) {
                return Err(Error::InvalidIntent(format!(
                    "empty selection on `{}`",
                    dim.name
                )));
            }
            masks.push(mask);
        }
        Ok(Intent { masks })
    }

    /// The intent containing every cell of the space.
    pub fn all(space: &DataSpace) -> Self {
        Intent {
            masks: space
                .dimensions()
                .iter()
                .map(|d| vec![true; d.cardinality()])
                .collect(),
        }
    }

    /// The intent containing exactly one cell.
    pub fn singleton(space: &DataSpace, cell: &Cell) -> Result<Self> {
        let sel: Vec<Vec<usize>> = cell.0.iter().map(|&v| vec![v]).collect();
        Intent::from_indices(space, &sel)
    }

    /// Builds an intent from value names; `None` selects `ALL`.
    pub fn from_names(space: &DataSpace, selections: &[Option<Vec<&str>>]) -> Result<Self> {
        if selections.len() != space.n_dims() {
            return Err(Error::InvalidIntent(format!(
                "expected {} selections, got {}",
                space.n_dims(),
                selections.len()
            )));
        }
        let mut idx = Vec::with_capacity(selections.len());
        for (i, sel) in selections.iter().enumerate() {
            let dim = space.dimension(i);
            match sel {
                None => idx.push((0..dim.cardinality()).collect()),
                Some(names) => {
                    let mut v = Vec::new();
                    for name in names {
                        v.push(dim.value_index(name).ok_or_else(|| {
                            Error::InvalidIntent(format!(
                                "value `{name}` not in dimension `{}`",
                                dim.name
                            ))
                        })?);
                    }
                    idx.push(v);
                }
            }
        }
        Intent::from_indices(space, &idx)
    }

    pub fn n_dims(&self) -> usize {
        self.masks.len()
    }

    pub fn contains_value(&self, dim: usize, value: usize) -> bool {
        self.masks[dim][value]
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        cell.0.len() == self.masks.len()
            && cell
                .0
                .iter()
                .zip(&self.masks)
                .all(|(&v, m)| m.get(v).copied().unwrap_or(false))
    }

    /// Selected value indices on dimension `dim`, ascending.
    pub fn selection(&self, dim: usize) -> Vec<usize> {
        self.masks[dim]
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
            .collect()
    }

    pub fn selection_size(&self, dim: usize) -> usize {
        self.masks[dim].iter().filter(|&&b| b).count()
    }

    pub fn selection_sizes(&self) -> Vec<usize> {
        (0..self.n_dims()).map(|i| self.selection_size(i)).collect()
    }

    pub fn is_saturated(&self, dim: usize) -> bool {
        self.masks[dim].iter().all(|&b| b)
    }

    /// `∏ |S_i|`, counting cells whether or not they hold any records.
    pub fn cartesian_size(&self) -> u128 {
        self.selection_sizes()
            .iter()
            .fold(1u128, |acc, &s| acc.saturating_mul(s as u128))
    }

    /// Componentwise containment: every selection of `self` is a subset of
    /// the matching selection of `other`.
    pub fn is_subset_of(&self, other: &Intent) -> bool {
        self.masks.len() == other.masks.len()
            && self
                .masks
                .iter()
                .zip(&other.masks)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| !x || y))
    }

    /// Returns a copy with `value` added on dimension `dim`.
    pub fn with_value(&self, dim: usize, value: usize) -> Intent {
        let mut next = self.clone();
        next.masks[dim][value] = true;
        next
    }

    /// Returns a copy whose selection on `dim` is exactly `{value}`.
    pub fn with_slab(&self, dim: usize, value: usize) -> Intent {
        let mut next = self.clone();
        next.masks[dim].iter_mut().for_each(|b| *b = false);
        next.masks[dim][value] = true;
        next
    }

    pub fn without_dimension(&self, dim: usize) -> Intent {
        let mut masks = self.masks.clone();
        masks.remove(dim);
        Intent { masks }
    }

    /// Every cell of the intent in lexicographic order.
    pub fn cells(&self) -> Vec<Cell> {
        let sels: Vec<Vec<usize>> = (0..self.n_dims()).map(|i| self.selection(i)).collect();
        let mut out = vec![Vec::with_capacity(sels.len())];
        for sel in &sels {
            let mut next = Vec::with_capacity(out.len() * sel.len());
            for prefix in &out {
                for &v in sel {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Cell).collect()
    }

    pub fn check_space(&self, space: &DataSpace) -> Result<()> {
        if self.masks.len() != space.n_dims()
            || self
                .masks
                .iter()
                .zip(space.dimensions())
                .any(|(m, d)| m.len() != d.cardinality())
        {
            return Err(Error::InvalidIntent(
                "intent does not match the data space".into(),
            ));
        }
        Ok(())
    }

    pub fn to_file(&self, space: &DataSpace) -> IntentFile {
        let mut selections = BTreeMap::new();
        for (i, dim) in space.dimensions().iter().enumerate() {
            let sel = if self.is_saturated(i) {
                Selection::All
            } else {
                Selection::Values(
                    self.selection(i)
                        .into_iter()
                        .map(|v| dim.values[v].clone())
                        .collect(),
                )
            };
            selections.insert(dim.name.clone(), sel);
        }
        IntentFile { selections }
    }

    pub fn to_json(&self, space: &DataSpace) -> String {
        serde_json::to_string_pretty(&self.to_file(space)).expect("intent serializes")
    }

    /// Parses the intent file format. Dimensions absent from the file are
    /// treated as `ALL`.
    pub fn from_json(space: &DataSpace, text: &str) -> Result<Self> {
        let file: IntentFile = serde_json::from_str(text)?;
        file.resolve(space)
    }
}

/// On-disk intent: `{"selections": {"<dim>": ["v1", "v2"] | "ALL"}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntentFile {
    pub selections: BTreeMap<String, Selection>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Values(Vec<String>),
    All,
}

impl Serialize for Selection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Selection::All => s.serialize_str("ALL"),
            Selection::Values(v) => v.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            List(Vec<String>),
        }
        match Raw::deserialize(de)? {
            Raw::Word(w) if w == "ALL" => Ok(Selection::All),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected \"ALL\" or a list of values, got \"{w}\""
            ))),
            Raw::List(v) => Ok(Selection::Values(v)),
        }
    }
}

impl IntentFile {
    pub fn resolve(&self, space: &DataSpace) -> Result<Intent> {
        for name in self.selections.keys() {
            if space.dimension_index(name).is_none() {
                return Err(Error::InvalidIntent(format!("unknown dimension `{name}`")));
            }
        }
        let sels: Vec<Option<Vec<&str>>> = space
            .dimensions()
            .iter()
            .map(|d| match self.selections.get(&d.name) {
                None | Some(Selection::All) => None,
                Some(Selection::Values(v)) => Some(v.iter().map(String::as_str).collect()),
            })
            .collect();
        Intent::from_names(space, &sels)
    }
}
