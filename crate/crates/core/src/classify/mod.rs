//! Group assignment by transition-curve rules and by workspace topology.

mod table;

use serde::Serialize;
use thiserror::Error;

use crate::model::{family_case, DesignParams, FamilyCase, ModelError};
use crate::singular::ResolutionWarning;
use crate::workspace::{analyze, Analysis, GridSpec, WorkspaceError, WorkspaceMetrics};

pub use table::{
    class_rank, group_record, Extent, GroupLabel, GroupRecord, ReferenceDesign, REFERENCE_DESIGNS,
};

/// Relative gap below which a design is taken to sit on a transition curve.
pub const TRANSITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
    #[error(
        "no group of case {case} has {} nodes and {} voids",
        metrics.node_count,
        metrics.void_count
    )]
    NoSignatureMatch {
        case: FamilyCase,
        metrics: WorkspaceMetrics,
    },
}

/// Quantities entering the transition curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionAux {
    pub a: f64,
    pub b: f64,
    /// Case I threshold on `d4 / d2`; `None` unless `d3 > d2`.
    pub delta: Option<f64>,
}

impl TransitionAux {
    pub fn new(p: &DesignParams) -> Self {
        let a = (p.d3 + p.d2).hypot(p.r2);
        let b = (p.d3 - p.d2).hypot(p.r2);
        let delta = delta_squared(p).filter(|_| p.d3 > p.d2).map(f64::sqrt);
        TransitionAux { a, b, delta }
    }
}

/// `1 + r3²/(d3² − 1)` after dividing every length by `d2`.
fn delta_squared(p: &DesignParams) -> Option<f64> {
    if p.d2 <= 0.0 || p.d3 == p.d2 {
        return None;
    }
    let (d3, r3) = (p.d3 / p.d2, p.r3 / p.d2);
    Some(1.0 + r3 * r3 / (d3 * d3 - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AnalyticLabel {
    Group(GroupLabel),
    /// The design lies on a transition curve.
    Indeterminate,
}

impl AnalyticLabel {
    pub fn group(self) -> Option<GroupLabel> {
        match self {
            AnalyticLabel::Group(l) => Some(l),
            AnalyticLabel::Indeterminate => None,
        }
    }
}

impl std::fmt::Display for AnalyticLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalyticLabel::Group(l) => write!(f, "{l}"),
            AnalyticLabel::Indeterminate => f.write_str("Indeterminate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum VerdictWarning {
    /// The analytic rule was extended beyond its stated domain.
    ProvisionalRule(String),
    /// The design lies on a transition curve.
    OnTransition,
    Disagreement {
        analytic: GroupLabel,
        numeric: GroupLabel,
    },
    Resolution(ResolutionWarning),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticGroup {
    pub label: AnalyticLabel,
    pub warnings: Vec<VerdictWarning>,
}

/// Sign of `x − y`, or `None` when the two agree to [`TRANSITION_TOL`].
fn side(x: f64, y: f64) -> Option<bool> {
    let scale = x.abs().max(y.abs());
    ((x - y).abs() > TRANSITION_TOL * scale).then_some(x > y)
}

pub fn analytic_group(p: &DesignParams) -> Result<AnalyticGroup, ModelError> {
    use GroupLabel::*;
    let case = family_case(p)?;
    let mut warnings = Vec::new();
    let hyp = p.d3.hypot(p.r2);
    let label = match case {
        FamilyCase::A => match (side(p.d4, p.d3), side(p.d4, hyp)) {
            (Some(false), _) => Some(A1),
            (Some(true), Some(false)) => Some(A2),
            (Some(true), Some(true)) => Some(A3),
            _ => None,
        },
        FamilyCase::B => side(p.d4, p.d3).map(|above| if above { B2 } else { B1 }),
        FamilyCase::C => Some(C),
        FamilyCase::E => Some(E),
        FamilyCase::G => Some(G),
        FamilyCase::H => Some(H),
        FamilyCase::J => Some(J),
        FamilyCase::D => match (side(p.d4, p.d2), side(p.d3, p.d2)) {
            (Some(false), Some(true)) => Some(D1),
            (Some(false), Some(false)) => Some(D5),
            (Some(true), Some(false)) => Some(D4),
            (Some(true), Some(true)) => side(p.d4, p.d3).map(|above| if above { D3 } else { D2 }),
            _ => None,
        },
        FamilyCase::F => side(p.d4, hyp).map(|above| if above { F2 } else { F1 }),
        FamilyCase::I => {
            let d4 = p.d4 / p.d2;
            match (side(p.d3, p.d2), delta_squared(p)) {
                (Some(true), Some(d2)) => {
                    side(d4, d2.sqrt()).map(|above| if above { I1 } else { I2 })
                }
                (Some(false), Some(d2)) => {
                    warnings.push(VerdictWarning::ProvisionalRule(format!(
                        "d3 < d2 leaves delta^2 = {d2:.9} outside its stated domain; \
                         the threshold is applied with the zones swapped"
                    )));
                    if d2 <= 0.0 {
                        Some(I4)
                    } else {
                        side(d4, d2.sqrt()).map(|above| if above { I4 } else { I3 })
                    }
                }
                _ => None,
            }
        }
    };
    let label = match label {
        Some(l) => AnalyticLabel::Group(l),
        None => {
            warnings.push(VerdictWarning::OnTransition);
            AnalyticLabel::Indeterminate
        }
    };
    Ok(AnalyticGroup { label, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub analytic: AnalyticLabel,
    pub numeric: GroupLabel,
    pub agree: bool,
    pub warnings: Vec<VerdictWarning>,
    pub metrics: WorkspaceMetrics,
}

impl Verdict {
    /// The numeric label, which is authoritative.
    pub fn label(&self) -> GroupLabel {
        self.numeric
    }
}

/// Group whose tabulated node and void counts match the measured ones.
pub fn signature_group(
    p: &DesignParams,
    metrics: &WorkspaceMetrics,
) -> Result<GroupLabel, ClassifyError> {
    let case = family_case(p)?;
    let matches: Vec<GroupLabel> = GroupLabel::of_family(case)
        .filter(|&l| {
            let r = group_record(l);
            (r.nodes, r.voids) == (metrics.node_count, metrics.void_count)
        })
        .collect();
    match matches[..] {
        [l] => Ok(l),
        [GroupLabel::D2, GroupLabel::D5] => Ok(if p.d3 > p.d2 {
            GroupLabel::D2
        } else {
            GroupLabel::D5
        }),
        [GroupLabel::I2, GroupLabel::I4] => Ok(if p.d3 > p.d2 {
            GroupLabel::I2
        } else {
            GroupLabel::I4
        }),
        _ => Err(ClassifyError::NoSignatureMatch {
            case,
            metrics: *metrics,
        }),
    }
}

/// Verdict for an existing analysis.
pub fn verdict_of(a: &Analysis) -> Result<Verdict, ClassifyError> {
    let analytic = analytic_group(&a.params)?;
    let numeric = signature_group(&a.params, &a.metrics)?;
    let mut warnings = analytic.warnings;
    let agree = analytic.label.group() == Some(numeric);
    if let Some(l) = analytic.label.group().filter(|&l| l != numeric) {
        warnings.push(VerdictWarning::Disagreement {
            analytic: l,
            numeric,
        });
    }
    warnings.extend(
        a.nodes
            .warnings
            .iter()
            .cloned()
            .map(VerdictWarning::Resolution),
    );
    Ok(Verdict {
        analytic: analytic.label,
        numeric,
        agree,
        warnings,
        metrics: a.metrics,
    })
}

pub fn numeric_verdict(p: &DesignParams, g: GridSpec) -> Result<Verdict, ClassifyError> {
    family_case(p)?;
    verdict_of(&analyze(p, g)?)
}
