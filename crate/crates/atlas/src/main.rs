//! `ortho3r`: classify orthogonal 3R designs, draw their cross-sections,
//! sweep zone maps and check the reference designs.

mod error;
mod figure;
mod report;
mod sweep;
mod verify;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ortho3r::classify::{class_rank, group_record, GroupLabel, GroupRecord};
use ortho3r::model::family_case;
use ortho3r::workspace::{analyze, Analysis, GridSpec, DEFAULT_GRID};
use ortho3r::{DesignParams, FamilyCase};
use serde::Serialize;

use error::AtlasError;
use report::Report;
use sweep::{Axis, Fixed, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "ortho3r", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the group label, class rank and workspace metrics of a design.
    Classify {
        #[command(flatten)]
        design: DesignArgs,
        /// Emit the full report as one JSON document.
        #[arg(long)]
        json: bool,
    },
    /// Write report.json and cross_section.svg for a design.
    Analyze {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify every design of a parameter plane and draw the zone map.
    Sweep {
        /// Family case letter, A to J.
        #[arg(long, value_parser = parse_case)]
        case: FamilyCase,
        /// Horizontal axis, PARAM:LO..HI:STEPS.
        #[arg(long)]
        x: Axis,
        /// Vertical axis, PARAM:LO..HI:STEPS.
        #[arg(long)]
        y: Axis,
        /// Remaining parameters, NAME=VAL.
        #[arg(long, num_args = 1..)]
        fixed: Vec<Fixed>,
        /// Raster resolution per map cell.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the 21 reference designs.
    Verify {
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Run only the designs of one family case.
        #[arg(long, value_parser = parse_case)]
        only: Option<FamilyCase>,
    },
    /// Print the properties of the 21 groups.
    Table {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    d2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    d3: f64,
    #[arg(long, allow_negative_numbers = true)]
    d4: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    r2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    r3: f64,
    /// Cells along ρ; the raster has twice as many along z.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
}

impl DesignArgs {
    fn analysis(&self) -> Result<Analysis, AtlasError> {
        let p = DesignParams::new(self.d2, self.d3, self.d4, self.r2, self.r3)?;
        family_case(&p)?;
        Ok(analyze(&p, GridSpec::for_design(&p, self.grid)?)?)
    }
}

fn parse_case(s: &str) -> Result<FamilyCase, String> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => FamilyCase::from_letter(c),
        _ => None,
    }
    .ok_or_else(|| format!("{s:?} is not a family case letter A to J"))
}

/// How a command that ran to completion ended.
enum Outcome {
    Done,
    /// The run finished but a check did not hold.
    Failed,
}

fn write_file(path: &Path, body: &str) -> Result<(), AtlasError> {
    fs::write(path, body).map_err(AtlasError::io(path))
}

fn prepare(dir: &Path) -> Result<(), AtlasError> {
    fs::create_dir_all(dir).map_err(AtlasError::io(dir))
}

fn classify(design: &DesignArgs, json: bool, out: &mut String) -> Result<Outcome, AtlasError> {
    let (report, matched) = Report::new(&design.analysis()?)?;
    out.push_str(&if json {
        report.to_json()
    } else {
        report.to_text()
    });
    Ok(if matched {
        Outcome::Done
    } else {
        Outcome::Failed
    })
}

fn analyze_cmd(design: &DesignArgs, dir: &Path, out: &mut String) -> Result<Outcome, AtlasError> {
    let a = design.analysis()?;
    let (report, matched) = Report::new(&a)?;
    prepare(dir)?;
    let json = dir.join("report.json");
    let svg = dir.join("cross_section.svg");
    write_file(&json, &report.to_json())?;
    write_file(&svg, &figure::cross_section(&a))?;
    out.push_str(&report.to_text());
    let _ = writeln!(out, "wrote {}", json.display());
    let _ = writeln!(out, "wrote {}", svg.display());
    Ok(if matched {
        Outcome::Done
    } else {
        Outcome::Failed
    })
}

fn sweep_cmd(spec: SweepSpec, dir: &Path, out: &mut String) -> Result<Outcome, AtlasError> {
    let cells = sweep::run(&spec)?;
    prepare(dir)?;
    let csv = dir.join("zone_map.csv");
    let svg = dir.join("zone_map.svg");
    write_file(&csv, &sweep::csv(&cells)?)?;
    write_file(&svg, &sweep::zone_map_svg(&spec, &cells))?;
    let _ = writeln!(
        out,
        "{} cells, {} unmatched, {} on a transition",
        cells.len(),
        cells.iter().filter(|c| c.label.is_none()).count(),
        cells.iter().filter(|c| c.indeterminate).count()
    );
    let _ = writeln!(out, "wrote {}", csv.display());
    let _ = writeln!(out, "wrote {}", svg.display());
    Ok(Outcome::Done)
}

fn verify_cmd(
    grid: usize,
    only: Option<FamilyCase>,
    out: &mut String,
) -> Result<Outcome, AtlasError> {
    let rows = verify::run(grid, only)?;
    out.push_str(&verify::table(&rows));
    Ok(if rows.iter().all(verify::Row::passed) {
        Outcome::Done
    } else {
        Outcome::Failed
    })
}

#[derive(Serialize)]
struct TableRow {
    #[serde(flatten)]
    record: GroupRecord,
    class_rank: u8,
}

fn table_cmd(json: bool, out: &mut String) -> Result<Outcome, AtlasError> {
    let rows: Vec<TableRow> = GroupLabel::ALL
        .into_iter()
        .map(|l| TableRow {
            record: group_record(l),
            class_rank: class_rank(l),
        })
        .collect();
    if json {
        out.push_str(&serde_json::to_string_pretty(&rows).expect("table serializes"));
        out.push('\n');
        return Ok(Outcome::Done);
    }
    let _ = writeln!(
        out,
        "{:<6} {:>5} {:>5}  {:<18} {:<18} {:<20} class",
        "group", "voids", "nodes", "4-IKS zone", "holes", "feasible paths zone"
    );
    for r in rows {
        let g = r.record;
        let _ = writeln!(
            out,
            "{:<6} {:>5} {:>5}  {:<18} {:<18} {:<20} {}",
            g.label.to_string(),
            g.voids,
            g.nodes,
            g.four_iks_zone.to_string(),
            g.holes.to_string(),
            g.feasible_paths_zone.to_string(),
            r.class_rank
        );
    }
    Ok(Outcome::Done)
}

fn run(cli: Cli, out: &mut String) -> Result<Outcome, AtlasError> {
    match cli.command {
        Command::Classify { design, json } => classify(&design, json, out),
        Command::Analyze { design, out: dir } => analyze_cmd(&design, &dir, out),
        Command::Sweep {
            case,
            x,
            y,
            fixed,
            grid,
            out: dir,
        } => sweep_cmd(SweepSpec::new(case, x, y, &fixed, grid)?, &dir, out),
        Command::Verify { grid, only } => verify_cmd(grid, only, out),
        Command::Table { json } => table_cmd(json, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut out = String::new();
    let result = run(cli, &mut out);
    // ignores a closed pipe
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
