use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{Cell, Dataset, Intent};
use crate::error::{Error, Result};

/// Background knowledge held by an attacker who observes a published intent.
///
/// | distribution | cost  | attack      |
/// |--------------|-------|-------------|
/// | false        | false | PI-uniform  |
/// | true         | false | EM-f        |
/// | false        | true  | EM-c        |
/// | true         | true  | EM-fc       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttackerKnowledge {
    pub knows_distribution: bool,
    pub knows_cost: bool,
}

impl AttackerKnowledge {
    pub const PI_UNIFORM: Self = Self::new(false, false);
    pub const EM_F: Self = Self::new(true, false);
    pub const EM_C: Self = Self::new(false, true);
    pub const EM_FC: Self = Self::new(true, true);

    pub const ALL: [Self; 4] = [Self::PI_UNIFORM, Self::EM_FC, Self::EM_F, Self::EM_C];

    pub const fn new(knows_distribution: bool, knows_cost: bool) -> Self {
        AttackerKnowledge {
            knows_distribution,
            knows_cost,
        }
    }

    pub fn is_pi_uniform(&self) -> bool {
        !self.knows_distribution && !self.knows_cost
    }

    pub fn name(&self) -> &'static str {
        match (self.knows_distribution, self.knows_cost) {
            (false, false) => "pi-uniform",
            (true, false) => "em-f",
            (false, true) => "em-c",
            (true, true) => "em-fc",
        }
    }

    /// Record weight the attacker bets on: `f_D`, `f_D·cost`, `cost`, or 1
    /// for the uniform attacker.
    pub fn weight(&self, data: &Dataset, cell: &Cell) -> f64 {
        match (self.knows_distribution, self.knows_cost) {
            (false, false) => 1.0,
            (true, false) => data.density(cell),
            (false, true) => data.cost(cell),
            (true, true) => data.density(cell) * data.cost(cell),
        }
    }

    /// `Σ w(t)` over every cell of `intent`.
    pub fn mass(&self, data: &Dataset, intent: &Intent) -> f64 {
        match (self.knows_distribution, self.knows_cost) {
            (false, false) => intent.cartesian_size() as f64,
            (true, false) => data.density_mass(intent),
            (false, true) => data.cost_mass(intent),
            (true, true) => data.density_cost_mass(intent),
        }
    }

    /// `max w(r)` over the cells of `intent`, including cells with no
    /// explicit entry in the dataset.
    pub fn max_weight(&self, data: &Dataset, intent: &Intent) -> f64 {
        let mut best: f64 = 0.0;
        let mut explicit = 0u128;
        for (cell, _) in data.entries() {
            if intent.contains(cell) {
                explicit += 1;
                best = best.max(self.weight(data, cell));
            }
        }
        if intent.cartesian_size() > explicit {
            let implicit = match (self.knows_distribution, self.knows_cost) {
                (true, _) => 0.0,
                (false, true) => data.default_cost(),
                (false, false) => 1.0,
            };
            best = best.max(implicit);
        }
        best
    }
}

impl fmt::Display for AttackerKnowledge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AttackerKnowledge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pi-uniform" | "pi_uniform" | "uniform" => Ok(Self::PI_UNIFORM),
            "em-f" | "em_f" => Ok(Self::EM_F),
            "em-c" | "em_c" => Ok(Self::EM_C),
            "em-fc" | "em_fc" => Ok(Self::EM_FC),
            other => Err(Error::Config(format!("unknown attack `{other}`"))),
        }
    }
}
