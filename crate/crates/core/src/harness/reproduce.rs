//! The four case-study tables with their published hyperparameters.

use std::io::Write;

use super::experiments::{
    run_allocation_experiment, run_expansion_experiment, AllocationExperiment, ExperimentConfig,
    Variant,
};
use super::projection::{project_dimension, ProjectionRow};
use super::report::{
    render_allocation_table, render_expansion_table, render_projection_table, write_csv,
    AllocationRow, ReportRow,
};
use super::TABLE_ATTACKS;
use crate::allocation::{AllocationConfig, AllocationMethod};
use crate::attacks::AttackerKnowledge;
use crate::domain::adult::{case_study_intent_size1, case_study_intent_size2};
use crate::domain::{adult_dataset, adult_space, generate_synthetic, Dataset, Intent, SyntheticParams};
use crate::error::{Error, Result};
use crate::expansion::{expand, ExpansionConfig};

/// A dataset / true-intent pair with its tuned parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSetting {
    pub name: &'static str,
    pub synthetic: bool,
    pub true_intent: Intent,
    /// α per attack, in [`TABLE_ATTACKS`] order.
    pub alphas: [f64; 4],
    /// Purchase size for the allocation table.
    pub q: u64,
    pub gmcmc_epsilon: f64,
}

impl CaseSetting {
    pub fn alpha(&self, attack: AttackerKnowledge) -> f64 {
        let i = TABLE_ATTACKS
            .iter()
            .position(|&a| a == attack)
            .expect("every attack has a column");
        self.alphas[i]
    }
}

/// The four case-study settings, Adult first.
pub fn case_settings() -> Vec<CaseSetting> {
    let space = adult_space();
    let ti1 = case_study_intent_size1(&space).expect("bundled intent");
    let ti2 = case_study_intent_size2(&space).expect("bundled intent");
    vec![
        CaseSetting {
            name: "adult-ti1",
            synthetic: false,
            true_intent: ti1.clone(),
            alphas: [0.5, 0.5, 0.5, 0.5],
            q: 61,
            gmcmc_epsilon: 0.07,
        },
        CaseSetting {
            name: "adult-ti2",
            synthetic: false,
            true_intent: ti2.clone(),
            alphas: [1.0, 0.6, 0.6, 0.5],
            q: 120,
            gmcmc_epsilon: 0.01,
        },
        CaseSetting {
            name: "synthetic-ti1",
            synthetic: true,
            true_intent: ti1,
            alphas: [0.8, 0.4, 0.4, 0.8],
            q: 1516,
            gmcmc_epsilon: 0.005,
        },
        CaseSetting {
            name: "synthetic-ti2",
            synthetic: true,
            true_intent: ti2,
            alphas: [0.6, 0.5, 0.4, 0.7],
            q: 2979,
            gmcmc_epsilon: 0.01,
        },
    ]
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub lambda: f64,
    pub repeats: usize,
    pub seed: u64,
    pub z: u64,
    pub synthetic: SyntheticParams,
    /// Restricts the allocation table to these settings (all when `None`).
    pub settings: Option<Vec<String>>,
    /// Purchase size for every selected allocation setting.
    pub q: Option<u64>,
    /// Published intent for every selected allocation setting; by default
    /// the EM-f expansion of the setting's true intent.
    pub published: Option<Intent>,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            lambda: 0.3,
            repeats: 10,
            seed: 0,
            z: 100_000,
            synthetic: SyntheticParams::default(),
            settings: None,
            q: None,
            published: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableOutput {
    Expansion(Vec<ReportRow>),
    Allocation(Vec<AllocationRow>),
    Projection(Vec<ProjectionRow>),
}

impl TableOutput {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        match self {
            TableOutput::Expansion(r) => write_csv(r, writer),
            TableOutput::Allocation(r) => write_csv(r, writer),
            TableOutput::Projection(r) => write_csv(r, writer),
        }
    }

    pub fn render(&self) -> String {
        match self {
            TableOutput::Expansion(r) => render_expansion_table(r),
            TableOutput::Allocation(r) => render_allocation_table(r),
            TableOutput::Projection(r) => render_projection_table(r),
        }
    }
}

fn dataset_for(setting: &CaseSetting, adult: &Dataset, opts: &ReproduceOptions) -> Result<Dataset> {
    if setting.synthetic {
        generate_synthetic(adult.space(), &opts.synthetic)
    } else {
        Ok(adult.clone())
    }
}

fn expansion_table(synthetic: bool, opts: &ReproduceOptions) -> Result<Vec<ReportRow>> {
    let adult = adult_dataset();
    let mut rows = Vec::new();
    for s in case_settings().into_iter().filter(|s| s.synthetic == synthetic) {
        let cfg = ExperimentConfig {
            setting: s.name.to_string(),
            data: dataset_for(&s, &adult, opts)?,
            true_intent: s.true_intent.clone(),
            variants: TABLE_ATTACKS
                .iter()
                .map(|&attack| Variant {
                    attack,
                    lambda: opts.lambda,
                    alpha: s.alpha(attack),
                })
                .collect(),
        };
        rows.extend(run_expansion_experiment(&cfg)?);
    }
    Ok(rows)
}

fn allocation_table(opts: &ReproduceOptions) -> Result<Vec<AllocationRow>> {
    let adult = adult_dataset();
    let mut rows = Vec::new();
    let wanted = |name: &str| {
        opts.settings
            .as_ref()
            .is_none_or(|v| v.iter().any(|s| s == name))
    };
    for s in case_settings().into_iter().filter(|s| wanted(s.name)) {
        let data = dataset_for(&s, &adult, opts)?;
        let published = match &opts.published {
            Some(pi) => pi.clone(),
            None => {
                let attack = AttackerKnowledge::EM_F;
                let cfg = ExpansionConfig::new(opts.lambda, s.alpha(attack), attack);
                expand(&data, &s.true_intent, &cfg)?.published
            }
        };
        let mut base = AllocationConfig::new(AllocationMethod::Mc, opts.q.unwrap_or(s.q), opts.lambda);
        base.z = opts.z;
        base.seed = opts.seed;
        rows.extend(run_allocation_experiment(&AllocationExperiment {
            setting: s.name.to_string(),
            data,
            true_intent: s.true_intent.clone(),
            published,
            base,
            methods: AllocationMethod::ALL.to_vec(),
            gmcmc_epsilon: Some(s.gmcmc_epsilon),
            repeats: opts.repeats,
        })?);
    }
    Ok(rows)
}

fn projection_table(opts: &ReproduceOptions) -> Result<Vec<ProjectionRow>> {
    let data = adult_dataset();
    let setting = case_settings()
        .into_iter()
        .find(|s| s.name == "adult-ti2")
        .expect("adult-ti2 is a case setting");
    let mut rows = Vec::new();
    for attack in [AttackerKnowledge::PI_UNIFORM, AttackerKnowledge::EM_FC] {
        let cfg = ExpansionConfig::new(opts.lambda, setting.alpha(attack), attack);
        let published = expand(&data, &setting.true_intent, &cfg)?.published;
        for dim in data.space().dimensions() {
            rows.push(project_dimension(
                &data,
                &setting.true_intent,
                &published,
                &dim.name,
                &cfg,
            )?);
        }
    }
    Ok(rows)
}

/// Tables 1 and 2 are expansion reports on Adult and synthetic data,
/// table 3 compares allocation methods and table 4 projects dimensions.
pub fn reproduce_table(table: u8, opts: &ReproduceOptions) -> Result<TableOutput> {
    match table {
        1 => Ok(TableOutput::Expansion(expansion_table(false, opts)?)),
        2 => Ok(TableOutput::Expansion(expansion_table(true, opts)?)),
        3 => Ok(TableOutput::Allocation(allocation_table(opts)?)),
        4 => Ok(TableOutput::Projection(projection_table(opts)?)),
        t => Err(Error::Config(format!("no table {t}; expected 1-4"))),
    }
}
