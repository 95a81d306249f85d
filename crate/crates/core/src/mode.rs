use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which energy bookkeeping to apply where the source figures disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ComputationMode {
    /// Reproduce the published numbers, unit slips included.
    #[default]
    PaperFaithful,
    /// Dimensionally consistent: calories read as kilocalories throughout.
    Physical,
}

impl ComputationMode {
    pub const ALL: [ComputationMode; 2] = [ComputationMode::PaperFaithful, ComputationMode::Physical];

    pub fn label(self) -> &'static str {
        match self {
            ComputationMode::PaperFaithful => "paper_faithful",
            ComputationMode::Physical => "physical",
        }
    }
}

impl fmt::Display for ComputationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A mode, or both side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    #[default]
    #[serde(alias = "paper_faithful")]
    Paper,
    Physical,
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> Vec<ComputationMode> {
        match self {
            ModeSelection::Paper => vec![ComputationMode::PaperFaithful],
            ModeSelection::Physical => vec![ComputationMode::Physical],
            ModeSelection::Both => ComputationMode::ALL.to_vec(),
        }
    }
}

impl FromStr for ModeSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "paper" | "paper_faithful" | "paper-faithful" => Ok(ModeSelection::Paper),
            "physical" => Ok(ModeSelection::Physical),
            "both" => Ok(ModeSelection::Both),
            other => Err(format!("unknown mode `{other}` (expected paper, physical or both)")),
        }
    }
}
