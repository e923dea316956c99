//! Raster analysis of the half cross-section.

mod aspects;
mod band;
mod cavities;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ikquartic::iks_count;
use crate::model::{DesignParams, SectionPoint};
use crate::singular::{
    find_cusps, find_nodes, section_images, singular_branches, CuspPoint, NodeReport, SectionCurve,
    DEFAULT_SPEED_TOL,
};

pub use aspects::{aspects, AspectSummary};
pub use band::BandMask;
pub use cavities::{cavities, cavities_masked, Cavities, Void};

/// Smallest accepted raster resolution.
pub const MIN_GRID: usize = 64;
/// Default resolution for single analyses.
pub const DEFAULT_GRID: usize = 512;
/// Margin between the sum of the lengths and the raster extent.
pub const EXTENT_MARGIN: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkspaceError {
    #[error("grid resolution {0} is below {MIN_GRID}")]
    ResolutionTooLow(usize),
    #[error("grid extent must be positive and finite, got {0}")]
    BadExtent(f64),
    #[error("grid extent {rmax} is too small: {cells} boundary cells are reachable")]
    GridTooSmall { rmax: f64, cells: usize },
}

/// Raster over `ρ ∈ [0, rmax]`, `z ∈ [-rmax, rmax]` with `n` square cells
/// along `ρ` and `2n` along `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub rmax: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(rmax: f64, n: usize) -> Result<Self, WorkspaceError> {
        if n < MIN_GRID {
            return Err(WorkspaceError::ResolutionTooLow(n));
        }
        if !(rmax.is_finite() && rmax > 0.0) {
            return Err(WorkspaceError::BadExtent(rmax));
        }
        Ok(GridSpec { rmax, n })
    }

    /// Extent a little beyond the sum of all lengths, which bounds the
    /// reach.
    pub fn for_design(p: &DesignParams, n: usize) -> Result<Self, WorkspaceError> {
        GridSpec::new(EXTENT_MARGIN * p.reach_bound(), n)
    }

    pub fn cell(&self) -> f64 {
        self.rmax / self.n as f64
    }

    pub fn rows(&self) -> usize {
        2 * self.n
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn center(&self, row: usize, col: usize) -> SectionPoint {
        let h = self.cell();
        SectionPoint::new((col as f64 + 0.5) * h, -self.rmax + (row as f64 + 0.5) * h)
    }

    /// Cell containing a point, if inside the raster.
    pub fn locate(&self, s: &SectionPoint) -> Option<(usize, usize)> {
        let h = self.cell();
        let col = (s.rho / h).floor();
        let row = ((s.z + self.rmax) / h).floor();
        (col >= 0.0 && row >= 0.0 && (col as usize) < self.cols() && (row as usize) < self.rows())
            .then_some((row as usize, col as usize))
    }

    /// Joint-space trace resolution matched to the raster.
    pub fn trace_resolution(&self) -> usize {
        (2 * self.n).clamp(256, 2048)
    }

    /// Joint-space resolution per axis for aspects.
    pub fn aspect_resolution(&self) -> usize {
        self.n.clamp(128, 1024).div_ceil(4) * 4
    }
}

/// Number of inverse kinematic solutions at each cell centre.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IksField {
    pub grid: GridSpec,
    /// Row-major, `2n` rows of `n` cells; row 0 is the lowest `z`.
    pub counts: Vec<u8>,
}

impl IksField {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.counts[row * self.grid.cols() + col]
    }

    pub fn all_zero(grid: GridSpec) -> Self {
        IksField {
            grid,
            counts: vec![0; grid.rows() * grid.cols()],
        }
    }

    /// Reachable cells on the outer ring (top, bottom and outer column).
    pub fn ring_count(&self) -> usize {
        let (rows, cols) = (self.grid.rows(), self.grid.cols());
        let mut n = 0;
        for col in 0..cols {
            n += usize::from(self.get(0, col) > 0) + usize::from(self.get(rows - 1, col) > 0);
        }
        for row in 1..rows - 1 {
            n += usize::from(self.get(row, cols - 1) > 0);
        }
        n
    }
}

pub fn iks_field(p: &DesignParams, g: GridSpec) -> Result<IksField, WorkspaceError> {
    let counts: Vec<u8> = (0..g.rows())
        .into_par_iter()
        .flat_map_iter(|row| (0..g.cols()).map(move |col| iks_count(p, &g.center(row, col))))
        .collect();
    let field = IksField { grid: g, counts };
    match field.ring_count() {
        0 => Ok(field),
        cells => Err(WorkspaceError::GridTooSmall {
            rmax: g.rmax,
            cells,
        }),
    }
}

/// The quantities compared against the group table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkspaceMetrics {
    pub node_count: usize,
    pub cusp_count: usize,
    pub void_count: usize,
    /// Four-solution area over reachable area.
    pub quaternary_ratio: f64,
    pub hole_ratio: f64,
    pub feasible_ratio: f64,
    pub aspect_count: usize,
}

/// Everything computed for one design on one grid.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub params: DesignParams,
    pub grid: GridSpec,
    pub trace_resolution: usize,
    pub field: IksField,
    pub curves: Vec<SectionCurve>,
    pub nodes: NodeReport,
    pub cusps: Vec<CuspPoint>,
    pub cavities: Cavities,
    pub aspects: AspectSummary,
    pub metrics: WorkspaceMetrics,
}

/// Share of off-band reachable cells with four solutions.
pub fn quaternary_ratio(field: &IksField, mask: &BandMask) -> f64 {
    let half = 0.5 * mask.diagonal();
    let (mut four, mut reach) = (0usize, 0usize);
    for row in 0..field.grid.rows() {
        for col in 0..field.grid.cols() {
            let c = field.get(row, col);
            if c == 0 || mask.within(row, col, half) {
                continue;
            }
            reach += 1;
            four += usize::from(c == 4);
        }
    }
    if reach == 0 {
        0.0
    } else {
        four as f64 / reach as f64
    }
}

pub fn analyze(p: &DesignParams, g: GridSpec) -> Result<Analysis, WorkspaceError> {
    let field = iks_field(p, g)?;
    let n = g.trace_resolution();
    let curves = section_images(&singular_branches(p, n), p);
    let nodes = find_nodes(p, &curves, crate::singular::default_tolerance(p));
    let cusps = find_cusps(p, &curves, DEFAULT_SPEED_TOL);
    let mask = BandMask::new(g, &curves);
    let cav = cavities_masked(&field, &mask).with_apexes(p, g.rmax);
    let asp = aspects(p, g.aspect_resolution(), &field, &mask);
    let metrics = WorkspaceMetrics {
        node_count: nodes.nodes.len(),
        cusp_count: cusps.len(),
        void_count: cav.voids.len(),
        quaternary_ratio: quaternary_ratio(&field, &mask),
        hole_ratio: cav.hole_ratio,
        feasible_ratio: asp.feasible_ratio,
        aspect_count: asp.count,
    };
    Ok(Analysis {
        params: *p,
        grid: g,
        trace_resolution: n,
        field,
        curves,
        nodes,
        cusps,
        cavities: cav,
        aspects: asp,
        metrics,
    })
}

pub fn metrics(p: &DesignParams, g: GridSpec) -> Result<WorkspaceMetrics, WorkspaceError> {
    analyze(p, g).map(|a| a.metrics)
}
