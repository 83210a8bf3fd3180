//! Data space, intents and aggregated datasets.

pub mod adult;
pub mod dataset;
pub mod intent;
pub mod space;
pub mod synthetic;

pub use adult::{adult_dataset, adult_space, preprocess_adult, DropReport};
pub use dataset::{cartesian_size, CellStats, Dataset, IntentRecords, LoadOptions};
pub use intent::{Intent, IntentFile, Selection};
pub use space::{Cell, DataSpace, Dimension};
pub use synthetic::{generate_synthetic, SyntheticParams};
