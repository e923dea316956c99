//! The reference-design check table.

use std::fmt::Write as _;

use ortho3r::classify::{
    verdict_of, ClassifyError, GroupLabel, ReferenceDesign, REFERENCE_DESIGNS,
};
use ortho3r::workspace::{analyze, GridSpec};
use ortho3r::FamilyCase;
use rayon::prelude::*;

use crate::error::AtlasError;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub design: ReferenceDesign,
    pub label: Option<GroupLabel>,
    pub nodes: usize,
    pub voids: usize,
}

impl Row {
    pub fn passed(&self) -> bool {
        self.label == Some(self.design.label)
            && self.nodes == self.design.nodes
            && self.voids == self.design.voids
    }
}

pub fn run(grid: usize, only: Option<FamilyCase>) -> Result<Vec<Row>, AtlasError> {
    let designs: Vec<ReferenceDesign> = REFERENCE_DESIGNS
        .into_iter()
        .filter(|d| only.is_none_or(|c| d.label.family() == c))
        .collect();
    designs
        .par_iter()
        .map(|d| {
            let a = analyze(&d.params, GridSpec::for_design(&d.params, grid)?)?;
            let label = match verdict_of(&a) {
                Ok(v) => Some(v.numeric),
                Err(ClassifyError::NoSignatureMatch { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(Row {
                design: *d,
                label,
                nodes: a.metrics.node_count,
                voids: a.metrics.void_count,
            })
        })
        .collect()
}

pub fn table(rows: &[Row]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<6} {:<26} {:<9} {:>11} {:>11}  result",
        "group", "design (d2,d3,d4,r2,r3)", "label", "nodes", "voids"
    );
    for r in rows {
        let p = r.design.params;
        let design = format!("({}, {}, {}, {}, {})", p.d2, p.d3, p.d4, p.r2, p.r3);
        let label = r.label.map_or("unmatched".to_string(), |l| l.to_string());
        let _ = writeln!(
            s,
            "{:<6} {:<26} {:<9} {:>11} {:>11}  {}",
            r.design.label.to_string(),
            design,
            label,
            format!("{} / {}", r.nodes, r.design.nodes),
            format!("{} / {}", r.voids, r.design.voids),
            if r.passed() { "PASS" } else { "FAIL" }
        );
    }
    let passed = rows.iter().filter(|r| r.passed()).count();
    let _ = writeln!(s, "{passed}/{} reference designs pass", rows.len());
    s
}
