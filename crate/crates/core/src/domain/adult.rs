//! Ingestion of the UCI Adult census file into the five-dimensional space
//! used throughout the experiments: age bracket, ethnicity, gender,
//! working-hours bracket and income class.

use std::collections::BTreeMap;

use serde::Serialize;

use super::dataset::{CellStats, Dataset, MISSING_TOKENS};
use super::intent::Intent;
use super::space::{Cell, DataSpace, Dimension};
use crate::error::{Error, Result};

/// Training split of the UCI Adult dataset, unmodified.
pub const ADULT_TRAIN: &str = include_str!("../../data/adult.data");

pub const AGE_BINS: [&str; 4] = ["childhood", "young adult", "working adult", "retirement"];
pub const ETHNICITIES: [&str; 5] = [
    "White",
    "Asian-Pac-Islander",
    "Amer-Indian-Eskimo",
    "Other",
    "Black",
];
pub const GENDERS: [&str; 2] = ["Female", "Male"];
pub const HOURS_BINS: [&str; 3] = ["part-time", "full-time", "overtime"];
pub const INCOMES: [&str; 2] = [">50K", "<=50K"];

// Column positions in the headerless UCI file.
const RAW_WIDTH: usize = 15;
const COL_AGE: usize = 0;
const COL_RACE: usize = 8;
const COL_SEX: usize = 9;
const COL_HOURS: usize = 12;
const COL_INCOME: usize = 14;

/// Rows skipped while preprocessing, by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DropReport {
    pub rows_read: usize,
    pub missing_value: usize,
    pub malformed_numeric: usize,
    pub unknown_category: usize,
    pub wrong_width: usize,
}

impl DropReport {
    pub fn dropped(&self) -> usize {
        self.missing_value + self.malformed_numeric + self.unknown_category + self.wrong_width
    }
}

/// The 4 × 5 × 2 × 3 × 2 space of the Adult experiments.
pub fn adult_space() -> DataSpace {
    DataSpace::new(vec![
        Dimension::new("age", &AGE_BINS, true),
        Dimension::new("ethnicity", &ETHNICITIES, false),
        Dimension::new("gender", &GENDERS, false),
        Dimension::new("hours-per-week", &HOURS_BINS, true),
        Dimension::new("income", &INCOMES, false),
    ])
    .expect("static schema is valid")
}

/// Age brackets are right-closed: (0-17], (17-24], (24-61], >61. Zero falls
/// into the first bracket.
pub fn age_bin(age: i64) -> Option<usize> {
    match age {
        a if a < 0 => None,
        0..=17 => Some(0),
        18..=24 => Some(1),
        25..=61 => Some(2),
        _ => Some(3),
    }
}

/// Hours brackets: [0-34], (34-40], >40.
pub fn hours_bin(hours: i64) -> Option<usize> {
    match hours {
        h if h < 0 => None,
        0..=34 => Some(0),
        35..=40 => Some(1),
        _ => Some(2),
    }
}

/// Bins the raw Adult file. Accepts the headerless UCI layout (train or
/// test split) or a CSV whose header names `age`, `race`, `sex`,
/// `hours-per-week` and `income`. A row with a missing value in any column
/// is dropped; every record gets unit cost.
pub fn preprocess_adult(raw: &str) -> Result<(Dataset, DropReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'|'))
        .from_reader(raw.as_bytes());

    let mut counts: BTreeMap<Cell, u64> = BTreeMap::new();
    let mut report = DropReport::default();
    let mut layout: Option<[usize; 5]> = None;
    let mut width = RAW_WIDTH;
    let mut first = true;

    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if rec.get(0) == Some("age") {
                let pos = |name: &str| {
                    rec.iter().position(|h| h == name).ok_or_else(|| Error::Schema {
                        row: 0,
                        column: name.to_string(),
                        message: "column missing from Adult header".into(),
                    })
                };
                layout = Some([
                    pos("age")?,
                    pos("race")?,
                    pos("sex")?,
                    pos("hours-per-week")?,
                    pos("income")?,
                ]);
                width = rec.len();
                continue;
            }
        }
        report.rows_read += 1;
        if rec.len() != width {
            report.wrong_width += 1;
            continue;
        }
        if rec.iter().any(|f| MISSING_TOKENS.contains(&f)) {
            report.missing_value += 1;
            continue;
        }
        let [c_age, c_race, c_sex, c_hours, c_income] =
            layout.unwrap_or([COL_AGE, COL_RACE, COL_SEX, COL_HOURS, COL_INCOME]);

        let age = rec[c_age].parse::<i64>().ok().and_then(age_bin);
        let hours = rec[c_hours].parse::<i64>().ok().and_then(hours_bin);
        let (Some(age), Some(hours)) = (age, hours) else {
            report.malformed_numeric += 1;
            continue;
        };
        let income = rec[c_income].trim_end_matches('.');
        let race = ETHNICITIES.iter().position(|&v| v == &rec[c_race]);
        let sex = GENDERS.iter().position(|&v| v == &rec[c_sex]);
        let income = INCOMES.iter().position(|&v| v == income);
        let (Some(race), Some(sex), Some(income)) = (race, sex, income) else {
            report.unknown_category += 1;
            continue;
        };
        *counts.entry(Cell(vec![age, race, sex, hours, income])).or_default() += 1;
    }

    let dataset = Dataset::from_cells(
        adult_space(),
        counts
            .into_iter()
            .map(|(c, freq)| (c, CellStats { freq, cost: 1.0 })),
    )?;
    Ok((dataset, report))
}

/// The bundled training split, preprocessed.
pub fn adult_dataset() -> Dataset {
    preprocess_adult(ADULT_TRAIN)
        .expect("bundled Adult file parses")
        .0
}

/// Case-study true intent of size 1:
/// working adult, Black, Female, full-time, >50K.
pub fn case_study_intent_size1(space: &DataSpace) -> Result<Intent> {
    Intent::from_names(
        space,
        &[
            Some(vec!["working adult"]),
            Some(vec!["Black"]),
            Some(vec!["Female"]),
            Some(vec!["full-time"]),
            Some(vec![">50K"]),
        ],
    )
}

/// Case-study true intent of size 2: the size-1 intent plus the
/// Asian-Pac-Islander ethnicity.
pub fn case_study_intent_size2(space: &DataSpace) -> Result<Intent> {
    Intent::from_names(
        space,
        &[
            Some(vec!["working adult"]),
            Some(vec!["Black", "Asian-Pac-Islander"]),
            Some(vec!["Female"]),
            Some(vec!["full-time"]),
            Some(vec![">50K"]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_boundaries() {
        assert_eq!(age_bin(0), Some(0));
        assert_eq!(age_bin(17), Some(0));
        assert_eq!(age_bin(18), Some(1));
        assert_eq!(age_bin(24), Some(1));
        assert_eq!(age_bin(25), Some(2));
        assert_eq!(age_bin(30), Some(2));
        assert_eq!(age_bin(61), Some(2));
        assert_eq!(age_bin(62), Some(3));
        assert_eq!(age_bin(-1), None);
        assert_eq!(hours_bin(0), Some(0));
        assert_eq!(hours_bin(34), Some(0));
        assert_eq!(hours_bin(35), Some(1));
        assert_eq!(hours_bin(40), Some(1));
        assert_eq!(hours_bin(41), Some(2));
    }

    #[test]
    fn single_row_lands_in_expected_cell() {
        let raw = "30, Private, 1, Bachelors, 13, Never-married, Sales, Own-child, Black, Female, 0, 0, 40, United-States, >50K\n";
        let (d, report) = preprocess_adult(raw).unwrap();
        assert_eq!(report.dropped(), 0);
        let cell = d
            .space()
            .cell_from_names(&["working adult", "Black", "Female", "full-time", ">50K"])
            .unwrap();
        assert_eq!(d.freq(&cell), 1);
    }

    #[test]
    fn drops_are_reported() {
        let raw = "\
|1x3 Cross validator
17, Private, 1, 11th, 7, Never-married, ?, Own-child, White, Male, 0, 0, 20, United-States, <=50K.
17, Private, 1, 11th, 7, Never-married, Sales, Own-child, White, Male, 0, 0, 20, United-States, <=50K.
abc, Private, 1, 11th, 7, Never-married, Sales, Own-child, White, Male, 0, 0, 20, United-States, <=50K
";
        let (d, report) = preprocess_adult(raw).unwrap();
        assert_eq!(report.rows_read, 3);
        assert_eq!(report.missing_value, 1);
        assert_eq!(report.malformed_numeric, 1);
        assert_eq!(d.total_count(), 1);
        let cell = d
            .space()
            .cell_from_names(&["childhood", "White", "Male", "part-time", "<=50K"])
            .unwrap();
        assert_eq!(d.freq(&cell), 1);
    }

    #[test]
    fn header_layout_is_accepted() {
        let raw = "age,race,sex,hours-per-week,income\n62,White,Male,45,<=50K\n";
        let (d, _) = preprocess_adult(raw).unwrap();
        let cell = d
            .space()
            .cell_from_names(&["retirement", "White", "Male", "overtime", "<=50K"])
            .unwrap();
        assert_eq!(d.freq(&cell), 1);
    }
}
