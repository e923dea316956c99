//! Machine-readable and text reports for one design.

use std::fmt::Write as _;

use ortho3r::classify::{
    analytic_group, class_rank, verdict_of, AnalyticLabel, ClassifyError, GroupLabel,
    VerdictWarning,
};
use ortho3r::singular::ResolutionWarning;
use ortho3r::workspace::Analysis;
use ortho3r::{DesignParams, FamilyCase, SectionPoint};
use serde::Serialize;

use crate::error::AtlasError;

/// Rounds to nine significant digits so that printed values are stable.
pub fn sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub rho: f64,
    pub z: f64,
}

impl From<SectionPoint> for Point {
    fn from(s: SectionPoint) -> Self {
        Point {
            rho: sig(s.rho),
            z: sig(s.z),
        }
    }
}

fn angles((a, b): (f64, f64)) -> [f64; 2] {
    [sig(a), sig(b)]
}

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub r2: f64,
    pub r3: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictDetail {
    pub analytic: String,
    pub numeric: Option<GroupLabel>,
    pub agree: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub node_count: usize,
    pub cusp_count: usize,
    pub void_count: usize,
    pub quaternary_ratio: f64,
    pub hole_ratio: f64,
    pub feasible_ratio: f64,
    pub aspect_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeEntry {
    pub location: Point,
    /// `(θ2, θ3)` of the two branches meeting at the node.
    pub preimages: [[f64; 2]; 2],
    pub witness_pairs: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspEntry {
    pub location: Point,
    pub preimage: [f64; 2],
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct VoidEntry {
    pub representative: Point,
    pub area: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridEntry {
    pub n: usize,
    pub rmax: f64,
    pub trace_resolution: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub params: Params,
    pub family_case: FamilyCase,
    pub label: Option<GroupLabel>,
    pub class_rank: Option<u8>,
    pub verdict: VerdictDetail,
    pub metrics: Metrics,
    pub nodes: Vec<NodeEntry>,
    pub cusps: Vec<CuspEntry>,
    pub voids: Vec<VoidEntry>,
    pub section_curves: usize,
    pub grid: GridEntry,
}

fn point_text(p: &SectionPoint) -> String {
    format!("(ρ = {}, z = {})", sig(p.rho), sig(p.z))
}

pub fn warning_text(w: &VerdictWarning) -> String {
    match w {
        VerdictWarning::ProvisionalRule(s) => format!("provisional rule: {s}"),
        VerdictWarning::OnTransition => "design lies on a transition curve".to_string(),
        VerdictWarning::Disagreement { analytic, numeric } => {
            format!("analytic rule gives {analytic}, workspace topology gives {numeric}")
        }
        VerdictWarning::Resolution(ResolutionWarning::CloseNodes { a, b, distance }) => format!(
            "nodes {} and {} are only {} apart; raise --grid",
            point_text(a),
            point_text(b),
            sig(*distance)
        ),
        VerdictWarning::Resolution(ResolutionWarning::Unconfirmed { location, pairs }) => format!(
            "curve crossing at {} shows {pairs} coincident solution pairs, not 2",
            point_text(location)
        ),
    }
}

impl Report {
    /// Builds the report; also returns whether the topology matched a
    /// group of the design's case.
    pub fn new(a: &Analysis) -> Result<(Report, bool), AtlasError> {
        let p: &DesignParams = &a.params;
        let case = ortho3r::model::family_case(p)?;
        let (label, verdict) = match verdict_of(a) {
            Ok(v) => (
                Some(v.numeric),
                VerdictDetail {
                    analytic: v.analytic.to_string(),
                    numeric: Some(v.numeric),
                    agree: v.agree,
                    warnings: v.warnings.iter().map(warning_text).collect(),
                },
            ),
            Err(e @ ClassifyError::NoSignatureMatch { .. }) => {
                let analytic = analytic_group(p)?;
                let mut warnings: Vec<String> =
                    analytic.warnings.iter().map(warning_text).collect();
                warnings.push(e.to_string());
                (
                    None,
                    VerdictDetail {
                        analytic: analytic.label.to_string(),
                        numeric: None,
                        agree: false,
                        warnings,
                    },
                )
            }
            Err(e) => return Err(e.into()),
        };
        let m = a.metrics;
        let report = Report {
            tool: "ortho3r",
            version: env!("CARGO_PKG_VERSION"),
            params: Params {
                d2: sig(p.d2),
                d3: sig(p.d3),
                d4: sig(p.d4),
                r2: sig(p.r2),
                r3: sig(p.r3),
            },
            family_case: case,
            label,
            class_rank: label.map(class_rank),
            verdict,
            metrics: Metrics {
                node_count: m.node_count,
                cusp_count: m.cusp_count,
                void_count: m.void_count,
                quaternary_ratio: sig(m.quaternary_ratio),
                hole_ratio: sig(m.hole_ratio),
                feasible_ratio: sig(m.feasible_ratio),
                aspect_count: m.aspect_count,
            },
            nodes: a
                .nodes
                .nodes
                .iter()
                .map(|n| NodeEntry {
                    location: n.location.into(),
                    preimages: [angles(n.preimages[0]), angles(n.preimages[1])],
                    witness_pairs: n.witness_pairs,
                })
                .collect(),
            cusps: a
                .cusps
                .iter()
                .map(|c| CuspEntry {
                    location: c.location.into(),
                    preimage: angles(c.preimage),
                    multiplicity: c.multiplicity,
                })
                .collect(),
            voids: a
                .cavities
                .voids
                .iter()
                .map(|v| VoidEntry {
                    representative: v.representative.into(),
                    area: sig(v.area),
                })
                .collect(),
            section_curves: a.curves.len(),
            grid: GridEntry {
                n: a.grid.n,
                rmax: sig(a.grid.rmax),
                trace_resolution: a.trace_resolution,
            },
        };
        Ok((report, label.is_some()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(
            s,
            "design     d2 = {}, d3 = {}, d4 = {}, r2 = {}, r3 = {}",
            p.d2, p.d3, p.d4, p.r2, p.r3
        );
        let _ = writeln!(s, "case       {}", self.family_case);
        match (self.label, self.class_rank) {
            (Some(l), Some(r)) => {
                let _ = writeln!(s, "label      {l}");
                let _ = writeln!(s, "class      {r}");
            }
            _ => {
                let _ = writeln!(s, "label      none (no group of this case matches)");
            }
        }
        let agreement = if self.verdict.agree {
            "agrees"
        } else if self.verdict.analytic == AnalyticLabel::Indeterminate.to_string() {
            "on a transition curve"
        } else {
            "differs"
        };
        let _ = writeln!(s, "analytic   {} ({agreement})", self.verdict.analytic);
        let m = &self.metrics;
        let _ = writeln!(s, "nodes      {}", m.node_count);
        for n in &self.nodes {
            let _ = writeln!(
                s,
                "           at ρ = {}, z = {}",
                n.location.rho, n.location.z
            );
        }
        let _ = writeln!(s, "voids      {}", m.void_count);
        let _ = writeln!(s, "cusps      {}", m.cusp_count);
        let _ = writeln!(s, "aspects    {}", m.aspect_count);
        let _ = writeln!(s, "4-IKS ratio     {}", m.quaternary_ratio);
        let _ = writeln!(s, "hole ratio      {}", m.hole_ratio);
        let _ = writeln!(s, "feasible ratio  {}", m.feasible_ratio);
        let _ = writeln!(
            s,
            "grid       n = {}, rmax = {}",
            self.grid.n, self.grid.rmax
        );
        for w in &self.verdict.warnings {
            let _ = writeln!(s, "warning    {w}");
        }
        s
    }
}
