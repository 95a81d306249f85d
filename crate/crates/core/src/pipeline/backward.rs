use serde::Serialize;

use super::{ErrorKind, PipelineConfig, PipelineError, Stage};
use crate::feasibility::{evaluate, joules_per_lamb, Assessment, PAPER_JOULES_PER_LAMB};
use crate::mode::ComputationMode;
use crate::quantities::{q, Quantity, Unit, KCAL_TO_JOULE};

/// Paper-faithful against physical, when both are run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeComparison {
    /// Physical per-lamb energy over paper-faithful per-lamb energy.
    pub per_lamb_energy_ratio: Quantity,
    /// Paper-faithful lambs_required over physical lambs_required.
    pub lambs_required_ratio: Quantity,
    pub verdict_flips: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackwardReport {
    pub assessments: Vec<Stage<Assessment>>,
    pub comparison: Option<ModeComparison>,
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl BackwardReport {
    pub fn stage_errors(&self) -> Vec<ErrorKind> {
        self.assessments.iter().filter_map(Stage::error_kind).collect()
    }

    pub fn for_mode(&self, mode: ComputationMode) -> Option<&Assessment> {
        self.assessments.iter().filter_map(Stage::ok).find(|a| a.ledger.mode == mode)
    }
}

pub fn run_backward(config: &PipelineConfig) -> Result<BackwardReport, PipelineError> {
    config.validate()?;
    let assessments: Vec<Stage<Assessment>> = config
        .mode
        .modes()
        .into_iter()
        .map(|mode| {
            let sheep = config.sheep_for(mode);
            Stage::from(evaluate(&config.scenario.inputs(mode), &config.fire, Some(&sheep)))
        })
        .collect();
    let mut report = BackwardReport { assessments, comparison: None, notes: Vec::new() };
    if let (Some(paper), Some(physical)) =
        (report.for_mode(ComputationMode::PaperFaithful), report.for_mode(ComputationMode::Physical))
    {
        report.comparison = Some(ModeComparison {
            per_lamb_energy_ratio: q(
                physical.ledger.intake_per_lamb.value() / paper.ledger.intake_per_lamb.value(),
                Unit::Dimensionless,
            ),
            lambs_required_ratio: q(
                paper.verdict.lambs_required as f64 / physical.verdict.lambs_required.max(1) as f64,
                Unit::Dimensionless,
            ),
            verdict_flips: paper.verdict.feasible != physical.verdict.feasible,
        });
    }
    report.notes = backward_notes(config, &report)?;
    Ok(report)
}

fn backward_notes(config: &PipelineConfig, report: &BackwardReport) -> Result<Vec<String>, PipelineError> {
    let paper_sheep = config.sheep_for(ComputationMode::PaperFaithful);
    let physical_sheep = config.sheep_for(ComputationMode::Physical);
    let physical = joules_per_lamb(ComputationMode::Physical, &physical_sheep)?;
    let forward = paper_sheep.kcal_per_lamb() * KCAL_TO_JOULE;
    let mut notes = vec![
        format!(
            "The published per-lamb intake of {PAPER_JOULES_PER_LAMB} J is 75 kg at 12,552 J/kg, which counts 3000 \
             small calories per kilogram; {} kg at {} kcal/kg gives {:.4e} J, {:.1} times more.",
            physical_sheep.edible_mass,
            physical_sheep.energy_density_kcal_per_kg,
            physical,
            physical / PAPER_JOULES_PER_LAMB
        ),
        format!(
            "The forward sheep count uses {} kcal ({:.4e} J) per lamb while the backward ledger uses {PAPER_JOULES_PER_LAMB} J, \
             a factor of {:.1} between the two halves of the same model.",
            paper_sheep.kcal_per_lamb(),
            forward,
            forward / PAPER_JOULES_PER_LAMB
        ),
    ];
    if let Some(a) = report.for_mode(ComputationMode::PaperFaithful) {
        let flight_only = a.ledger.e_flying.value() * a.ledger.assimilation_k.value() / PAPER_JOULES_PER_LAMB;
        notes.push(format!(
            "Dividing flight energy alone by the per-lamb intake gives {flight_only:.0} lambs per day; \
             dividing the full expenditure including fire gives {}.",
            a.verdict.lambs_required
        ));
    }
    Ok(notes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::ModeSelection;

    #[test]
    fn both_modes_flip() {
        let report = run_backward(&PipelineConfig::default()).unwrap();
        let paper = report.for_mode(ComputationMode::PaperFaithful).unwrap();
        let physical = report.for_mode(ComputationMode::Physical).unwrap();
        assert!(!paper.verdict.feasible);
        assert!(physical.verdict.feasible);
        let cmp = report.comparison.unwrap();
        assert!(cmp.verdict_flips);
        assert!((cmp.per_lamb_energy_ratio.value() / 274.0 - 1.0).abs() < 2e-2);
        assert!((cmp.lambs_required_ratio.value() / 274.0 - 1.0).abs() < 2e-2);
        assert_eq!(report.notes.len(), 3);
    }

    #[test]
    fn tiny_dragon_eating_nothing() {
        let mut config = PipelineConfig { mode: ModeSelection::Paper, ..Default::default() };
        config.scenario.n_sheep = 0.0;
        config.scenario.mass = 1e-3;
        let report = run_backward(&config).unwrap();
        let a = report.for_mode(ComputationMode::PaperFaithful).unwrap();
        assert!(a.ledger.e_expenditure.value() > 0.0);
        assert!(a.ledger.e_expenditure.value() < 1e5);
        assert!(!a.verdict.feasible);
        assert!(a.verdict.lambs_required >= 1);
        assert!(a.verdict.declared_balance_ratio.is_none());
        assert!(report.comparison.is_none());
    }

    #[test]
    fn rejects_invalid_flight_fraction() {
        let mut config = PipelineConfig::default();
        config.scenario.p_flight = 1.5;
        assert!(matches!(run_backward(&config), Err(PipelineError::Validation(_))));
    }
}
