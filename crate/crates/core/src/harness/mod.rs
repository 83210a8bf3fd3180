//! Experiment runner: expansion and allocation reports, projections,
//! parameter sweeps and the canned case-study tables.
//!
//! Everything here returns plain rows; writing them out is left to
//! [`write_csv`] and the `render_*` helpers so that library users and the
//! command-line tool share one code path.

mod experiments;
mod projection;
mod report;
mod reproduce;
mod sweep;

use std::path::PathBuf;

use crate::attacks::AttackerKnowledge;
use crate::domain::{
    adult_dataset, generate_synthetic, DataSpace, Dataset, LoadOptions, SyntheticParams,
};
use crate::error::Result;

pub use experiments::{
    run_allocation_experiment, run_expansion_experiment, AllocationExperiment, ExperimentConfig,
    Variant,
};
pub use projection::{project_dimension, ProjectionRow};
pub use report::{
    mean_std, render_allocation_table, render_expansion_table, render_projection_table,
    render_sweep_table, write_csv, AllocationRow, ReportRow,
};
pub use reproduce::{
    case_settings, reproduce_table, CaseSetting, ReproduceOptions, TableOutput,
};
pub use sweep::{sweep, SweepParam, SweepPoint};

/// Where a dataset comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    /// The bundled, preprocessed Adult training file.
    Adult,
    /// Gaussian cell counts and costs over the Adult-shaped space.
    Synthetic(SyntheticParams),
    /// A dimension-per-column CSV described by a schema.
    File {
        path: PathBuf,
        schema: DataSpace,
        options: LoadOptions,
    },
}

impl DatasetSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetSource::Adult => Ok(adult_dataset()),
            DatasetSource::Synthetic(params) => {
                generate_synthetic(&crate::domain::adult_space(), params)
            }
            DatasetSource::File {
                path,
                schema,
                options,
            } => {
                let file = std::fs::File::open(path)?;
                Dataset::load_csv(std::io::BufReader::new(file), schema, options)
            }
        }
    }
}

/// Attack variants in table order.
pub const TABLE_ATTACKS: [AttackerKnowledge; 4] = AttackerKnowledge::ALL;
