//! Zone maps over a plane of two design parameters.

use std::fmt::Write as _;
use std::str::FromStr;

use ortho3r::classify::{analytic_group, verdict_of, AnalyticLabel, ClassifyError, GroupLabel};
use ortho3r::workspace::{analyze, GridSpec};
use ortho3r::{DesignParams, FamilyCase};
use rayon::prelude::*;
use xmlwriter::{Options, XmlWriter};

use crate::error::AtlasError;
use crate::figure::{line, num, svg_root, text};
use crate::report::sig;

const NAMES: [&str; 5] = ["d2", "d3", "d4", "r2", "r3"];

/// One swept axis, `PARAM:LO..HI:STEPS`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("axis {s:?} is not of the form PARAM:LO..HI:STEPS");
        let mut parts = s.split(':');
        let (Some(param), Some(range), Some(steps), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let steps: usize = steps.trim().parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(format!("axis {s:?} needs finite bounds with LO <= HI"));
        }
        if steps == 0 {
            return Err(format!("axis {s:?} needs at least one step"));
        }
        Ok(Axis {
            param: param.trim().to_ascii_lowercase(),
            lo,
            hi,
            steps,
        })
    }
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + step * k as f64
                }
            })
            .collect()
    }
}

/// A fixed parameter, `NAME=VAL`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixed {
    pub param: String,
    pub value: f64,
}

impl FromStr for Fixed {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| format!("fixed value {s:?} is not of the form NAME=VAL"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("fixed value {s:?} has a non-numeric value"))?;
        Ok(Fixed {
            param: name.trim().to_ascii_lowercase(),
            value,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub case: FamilyCase,
    pub x: Axis,
    pub y: Axis,
    /// Values of all five parameters with the swept ones left at zero,
    /// ordered as `(d2, d3, d4, r2, r3)`.
    pub base: [f64; 5],
    pub grid: usize,
}

fn index_of(name: &str) -> Result<usize, AtlasError> {
    NAMES
        .iter()
        .position(|&n| n == name)
        .ok_or_else(|| AtlasError::Invalid(format!("unknown parameter {name:?}")))
}

impl SweepSpec {
    /// Checks that the sweep stays inside the case's zero pattern.
    pub fn new(
        case: FamilyCase,
        x: Axis,
        y: Axis,
        fixed: &[Fixed],
        grid: usize,
    ) -> Result<Self, AtlasError> {
        let mut set = [false; 5];
        let mut base = [0.0; 5];
        for axis in [&x, &y] {
            let i = index_of(&axis.param)?;
            if set[i] {
                return Err(AtlasError::Invalid(format!(
                    "{} is swept twice",
                    axis.param
                )));
            }
            set[i] = true;
            if case.is_free(&axis.param) != Some(true) {
                return Err(AtlasError::Invalid(format!(
                    "{} is zero in case {case} and cannot be swept",
                    axis.param
                )));
            }
            if axis.lo <= 0.0 {
                return Err(AtlasError::Invalid(format!(
                    "{} must stay positive in case {case}, but the sweep starts at {}",
                    axis.param, axis.lo
                )));
            }
        }
        for f in fixed {
            let i = index_of(&f.param)?;
            if set[i] {
                return Err(AtlasError::Invalid(format!(
                    "{} is given more than once",
                    f.param
                )));
            }
            set[i] = true;
            let free = case.is_free(&f.param) == Some(true);
            if !f.value.is_finite() || (free && f.value <= 0.0) || (!free && f.value != 0.0) {
                let want = if free { "positive" } else { "zero" };
                return Err(AtlasError::Invalid(format!(
                    "{} = {} breaks case {case}, where it must be {want}",
                    f.param, f.value
                )));
            }
            base[i] = f.value;
        }
        for (i, name) in NAMES.iter().enumerate() {
            if !set[i] && case.is_free(name) == Some(true) {
                return Err(AtlasError::Invalid(format!(
                    "{name} is nonzero in case {case}; sweep it or pass --fixed {name}=VAL"
                )));
            }
        }
        Ok(SweepSpec {
            case,
            x,
            y,
            base,
            grid,
        })
    }

    pub fn design(&self, x: f64, y: f64) -> DesignParams {
        let mut v = self.base;
        v[index_of(&self.x.param).expect("checked")] = x;
        v[index_of(&self.y.param).expect("checked")] = y;
        DesignParams::unchecked(v[0], v[1], v[2], v[3], v[4])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    /// `None` when no group of the case matches the measured topology.
    pub label: Option<GroupLabel>,
    pub indeterminate: bool,
    pub node_count: usize,
    pub void_count: usize,
}

pub fn run(spec: &SweepSpec) -> Result<Vec<Cell>, AtlasError> {
    let xs = spec.x.values();
    let ys = spec.y.values();
    let jobs: Vec<(f64, f64)> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .collect();
    jobs.par_iter()
        .map(|&(x, y)| {
            let p = spec.design(x, y);
            let a = analyze(&p, GridSpec::for_design(&p, spec.grid)?)?;
            let indeterminate = analytic_group(&p)?.label == AnalyticLabel::Indeterminate;
            let label = match verdict_of(&a) {
                Ok(v) => Some(v.numeric),
                Err(ClassifyError::NoSignatureMatch { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(Cell {
                x,
                y,
                label,
                indeterminate,
                node_count: a.metrics.node_count,
                void_count: a.metrics.void_count,
            })
        })
        .collect()
}

pub fn csv(cells: &[Cell]) -> Result<String, AtlasError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "label", "node_count", "void_count"])?;
    for c in cells {
        let label = c.label.map_or("unmatched".to_string(), |l| l.to_string());
        w.write_record([
            sig(c.x).to_string(),
            sig(c.y).to_string(),
            label,
            c.node_count.to_string(),
            c.void_count.to_string(),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| AtlasError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// One colour per group, in table order.
pub const PALETTE: [&str; 21] = [
    "#E6194B", "#3CB44B", "#FFE119", "#4363D8", "#F58231", "#911EB4", "#46F0F0", "#F032E6",
    "#BCF60C", "#FABEBE", "#008080", "#E6BEFF", "#9A6324", "#FFFAC8", "#800000", "#AAFFC3",
    "#808000", "#FFD8B1", "#000075", "#808080", "#6A3D9A",
];
const UNMATCHED: &str = "#FFFFFF";

pub fn color(label: GroupLabel) -> &'static str {
    PALETTE[label as usize]
}

/// Boundary segments of the analytic group regions, found by marching
/// squares on a lattice and refined by bisection along lattice edges.
pub fn transition_segments(spec: &SweepSpec, lattice: usize) -> Vec<[(f64, f64); 2]> {
    let (x0, x1, y0, y1) = (spec.x.lo, spec.x.hi, spec.y.lo, spec.y.hi);
    if lattice < 2 || x1 <= x0 || y1 <= y0 {
        return Vec::new();
    }
    let at = |i: usize, n: f64, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / n;
    let m = lattice as f64;
    let label = |x: f64, y: f64| analytic_group(&spec.design(x, y)).ok().map(|g| g.label);
    let grid: Vec<Vec<Option<AnalyticLabel>>> = (0..=lattice)
        .map(|j| {
            (0..=lattice)
                .map(|i| label(at(i, m, x0, x1), at(j, m, y0, y1)))
                .collect()
        })
        .collect();
    let bisect = |a: (f64, f64), b: (f64, f64), la: Option<AnalyticLabel>| {
        let (mut a, mut b) = (a, b);
        for _ in 0..40 {
            let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            let lm = label(mid.0, mid.1);
            if lm == Some(AnalyticLabel::Indeterminate) {
                return mid;
            }
            if lm == la {
                a = mid;
            } else {
                b = mid;
            }
        }
        ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
    };
    let mut segs = Vec::new();
    for j in 0..lattice {
        for i in 0..lattice {
            let corner = |di: usize, dj: usize| {
                (
                    (at(i + di, m, x0, x1), at(j + dj, m, y0, y1)),
                    grid[j + dj][i + di],
                )
            };
            let ring = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
            let mut hits = Vec::new();
            for k in 0..4 {
                let (a, la) = ring[k];
                let (b, lb) = ring[(k + 1) % 4];
                if la != lb {
                    hits.push(bisect(a, b, la));
                }
            }
            for pair in hits.chunks_exact(2) {
                if pair[0] != pair[1] {
                    segs.push([pair[0], pair[1]]);
                }
            }
        }
    }
    segs
}

pub fn zone_map_svg(spec: &SweepSpec, cells: &[Cell]) -> String {
    let (nx, ny) = (spec.x.steps, spec.y.steps);
    let size = 600.0;
    let (cw, ch) = (size / nx as f64, size / ny as f64);
    let half = |a: &Axis| {
        if a.steps > 1 {
            (a.hi - a.lo) / (a.steps - 1) as f64 / 2.0
        } else {
            0.5
        }
    };
    let (hx, hy) = (half(&spec.x), half(&spec.y));
    let px = |x: f64| (x - (spec.x.lo - hx)) / (spec.x.hi - spec.x.lo + 2.0 * hx) * size;
    let py = |y: f64| size - (y - (spec.y.lo - hy)) / (spec.y.hi - spec.y.lo + 2.0 * hy) * size;

    let mut used: Vec<GroupLabel> = cells.iter().filter_map(|c| c.label).collect();
    used.sort();
    used.dedup();
    let unmatched = cells.iter().any(|c| c.label.is_none());
    let hatched = cells.iter().any(|c| c.indeterminate);

    let (left, bottom, top, legend) = (70.0, 60.0, 20.0, 200.0);
    let mut w = XmlWriter::new(Options::default());
    svg_root(
        &mut w,
        [-left, -top, size + left + legend, size + top + bottom],
        size + left + legend,
    );

    w.start_element("defs");
    w.start_element("pattern");
    w.write_attribute("id", "hatch");
    w.write_attribute("patternUnits", "userSpaceOnUse");
    w.write_attribute("width", "8");
    w.write_attribute("height", "8");
    w.start_element("path");
    w.write_attribute("d", "M0,0 L8,8");
    w.write_attribute("stroke", "#000000");
    w.write_attribute("stroke-width", "1.2");
    w.end_element();
    w.end_element();
    w.end_element();

    w.start_element("g");
    w.write_attribute("id", "cells");
    w.write_attribute("shape-rendering", "crispEdges");
    for (k, c) in cells.iter().enumerate() {
        let (i, j) = (k % nx, k / nx);
        let (x, y) = (i as f64 * cw, size - (j + 1) as f64 * ch);
        let fill = c.label.map_or(UNMATCHED, color);
        for paint in std::iter::once(fill).chain(c.indeterminate.then_some("url(#hatch)")) {
            w.start_element("rect");
            w.write_attribute("x", &num(x));
            w.write_attribute("y", &num(y));
            w.write_attribute("width", &num(cw));
            w.write_attribute("height", &num(ch));
            w.write_attribute("fill", paint);
            w.end_element();
        }
    }
    w.end_element();

    let mut d = String::new();
    for [a, b] in transition_segments(spec, 200) {
        let _ = write!(
            d,
            "M{},{}L{},{}",
            num(px(a.0)),
            num(py(a.1)),
            num(px(b.0)),
            num(py(b.1))
        );
    }
    w.start_element("path");
    w.write_attribute("id", "transitions");
    w.write_attribute("d", &d);
    w.write_attribute("fill", "none");
    w.write_attribute("stroke", "#000000");
    w.write_attribute("stroke-width", "2");
    w.end_element();

    w.start_element("g");
    w.write_attribute("id", "axes");
    w.write_attribute("stroke", "#000000");
    line(&mut w, (0.0, 0.0), (0.0, size));
    line(&mut w, (0.0, size), (size, size));
    w.end_element();
    w.start_element("g");
    w.write_attribute("id", "labels");
    w.write_attribute("fill", "#000000");
    for v in [spec.x.lo, spec.x.hi] {
        text(
            &mut w,
            px(v),
            size + 18.0,
            12.0,
            "middle",
            &sig(v).to_string(),
        );
    }
    for v in [spec.y.lo, spec.y.hi] {
        text(&mut w, -8.0, py(v) + 4.0, 12.0, "end", &sig(v).to_string());
    }
    text(
        &mut w,
        size / 2.0,
        size + 42.0,
        16.0,
        "middle",
        &spec.x.param,
    );
    text(&mut w, -50.0, size / 2.0, 16.0, "middle", &spec.y.param);
    w.end_element();

    w.start_element("g");
    w.write_attribute("id", "legend");
    let entries = used
        .iter()
        .map(|&l| (color(l).to_string(), l.to_string()))
        .chain(unmatched.then(|| (UNMATCHED.to_string(), "unmatched".to_string())))
        .chain(hatched.then(|| ("url(#hatch)".to_string(), "on a transition".to_string())));
    let mut rows = 0;
    for (k, (fill, name)) in entries.enumerate() {
        rows += 1;
        let y = 10.0 + 26.0 * k as f64;
        w.start_element("rect");
        w.write_attribute("x", &num(size + 20.0));
        w.write_attribute("y", &num(y));
        w.write_attribute("width", "18");
        w.write_attribute("height", "18");
        w.write_attribute("fill", &fill);
        w.write_attribute("stroke", "#000000");
        w.end_element();
        text(&mut w, size + 46.0, y + 14.0, 14.0, "start", &name);
    }
    let y = 10.0 + 26.0 * rows as f64 + 9.0;
    w.start_element("g");
    w.write_attribute("stroke", "#000000");
    w.write_attribute("stroke-width", "2");
    line(&mut w, (size + 20.0, y), (size + 38.0, y));
    w.end_element();
    text(
        &mut w,
        size + 46.0,
        y + 5.0,
        14.0,
        "start",
        "analytic transition",
    );
    w.end_element();

    let mut s = w.end_document();
    s.push('\n');
    s
}
