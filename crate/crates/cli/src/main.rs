//! `visicone`: batch front end over JSON problem files.
//!
//! Exit codes: 0 success, 1 malformed input, 2 numerical failure,
//! 3 a property check failed.

mod output;
mod problem;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use visicone::projection::{project_polytope_with_budget, DEFAULT_SUBSET_BUDGET};
use visicone::suites::{self, SuiteReport};
use visicone::visibility::{
    is_visible_with, raycast_with, sample_visible_certified_with, Tolerances,
};
use visicone::{
    argmax_on_segment, project_affine, project_segment, project_simplex, separate_segment, Body,
    Endpoint, GeomError, Polytope, ProjectionResult,
};

use output::{fmt17, nums, to_json, vec, Num};
use problem::{point, ProblemFile, Query};

const SUBSET_ENV: &str = "VISICONE_MAX_SUBSETS";

#[derive(Debug, Parser)]
#[command(
    name = "visicone",
    version,
    about = "Visible points and projections for convex bodies"
)]
struct Cli {
    /// Membership tolerance for the "point lies in the body" checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// lambda* at or below this counts as visible.
    #[arg(long = "vis-tol", global = true, default_value_t = 1e-7)]
    vis_tol: f64,
    /// Default seed for `sample` and `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nearest point of the body to the query point.
    Project {
        #[arg(long)]
        input: PathBuf,
    },
    /// Whether the candidate is visible from the query point.
    Visible {
        #[arg(long)]
        input: PathBuf,
    },
    /// First point of the body on the segment from `from` toward `toward`.
    Raycast {
        #[arg(long)]
        input: PathBuf,
    },
    /// Seeded visible points, written as CSV.
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Separating functional for a segment disjoint from a polytope.
    Separate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Reproduces the disk-cone example: visible arc, blocked limit point.
    CheckExample24,
    /// Runs the randomized property suites.
    Verify {
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    Suite(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "malformed input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Suite(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Suite(_) => 3,
        }
    }
}

/// Sorts library errors into bad input versus numerical trouble.
fn lib_error(field: &str, e: GeomError) -> CliError {
    match e {
        GeomError::MaxIterationsExceeded(_)
        | GeomError::NotPositiveDefinite { .. }
        | GeomError::SubsetBudgetExceeded { .. }
        | GeomError::BudgetExceeded(_) => CliError::Numerical(e.to_string()),
        _ => CliError::Input(format!("{field}: {e}")),
    }
}

fn subset_budget() -> Result<u128, CliError> {
    match std::env::var(SUBSET_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::Input(format!("{SUBSET_ENV}: not a nonnegative integer: {s:?}"))
        }),
        Err(_) => Ok(DEFAULT_SUBSET_BUDGET),
    }
}

fn load(path: &PathBuf, expected: &'static str) -> Result<(ProblemFile, Body), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("--input {}: {e}", path.display())))?;
    let problem = problem::parse(&text)?;
    if problem.query.name() != expected {
        return Err(CliError::Input(format!(
            "query: `{expected}` command needs a `{expected}` query, found `{}`",
            problem.query.name()
        )));
    }
    let body = problem.build_body()?;
    Ok((problem, body))
}

#[derive(Serialize)]
struct ProjectDoc {
    point: Vec<Num>,
    distance: Num,
    weights: Vec<Num>,
    facet_chain: Vec<usize>,
}

#[derive(Serialize)]
struct VisibleDoc {
    visible: bool,
    lambda_star: Num,
    blocker: Option<Vec<Num>>,
    cone_agrees: Option<bool>,
}

#[derive(Serialize)]
struct RaycastDoc {
    point: Vec<Num>,
    lambda: Num,
}

#[derive(Serialize)]
struct SeparateDoc {
    normal: Vec<Num>,
    offset: Num,
    gap: Num,
    argmax: &'static str,
}

fn project(problem: &ProblemFile, body: &Body) -> Result<String, CliError> {
    let Query::Project(q) = &problem.query else {
        unreachable!("query kind checked on load")
    };
    let x = point("query.project", q, problem.dim)?;
    let r: ProjectionResult = match body {
        Body::Segment(s) => project_segment(s, &x),
        Body::Simplex(s) => project_simplex(s, &x),
        Body::Polytope(p) => project_polytope_with_budget(p, &x, subset_budget()?),
        Body::Flat(f) => project_affine(f, &x),
        Body::DiskCone(_) => {
            return Err(CliError::Input(
                "body.type: projection onto disk_cone is not supported".into(),
            ))
        }
    }
    .map_err(|e| lib_error("query.project", e))?;
    Ok(to_json(&ProjectDoc {
        point: vec(&r.point),
        distance: Num(r.distance),
        weights: nums(&r.weights),
        facet_chain: r.facet_chain,
    }))
}

fn visible(problem: &ProblemFile, body: &Body, tols: &Tolerances) -> Result<String, CliError> {
    let Query::Visible { from, candidate } = &problem.query else {
        unreachable!("query kind checked on load")
    };
    let x = point("query.visible.from", from, problem.dim)?;
    let v = point("query.visible.candidate", candidate, problem.dim)?;
    let c =
        is_visible_with(body, &x, &v, tols).map_err(|e| lib_error("query.visible.candidate", e))?;
    Ok(to_json(&VisibleDoc {
        visible: c.visible,
        lambda_star: Num(c.lambda_star),
        blocker: c.blocker.as_ref().map(vec),
        cone_agrees: c.cone_agrees,
    }))
}

fn raycast(problem: &ProblemFile, body: &Body, tols: &Tolerances) -> Result<String, CliError> {
    let Query::Raycast { from, toward } = &problem.query else {
        unreachable!("query kind checked on load")
    };
    let x = point("query.raycast.from", from, problem.dim)?;
    let y = point("query.raycast.toward", toward, problem.dim)?;
    let r = raycast_with(body, &x, &y, tols).map_err(|e| lib_error("query.raycast.toward", e))?;
    Ok(to_json(&RaycastDoc {
        point: vec(&r.point),
        lambda: Num(r.lambda),
    }))
}

fn separate(problem: &ProblemFile, body: &Body) -> Result<String, CliError> {
    let Query::Separate { x, y } = &problem.query else {
        unreachable!("query kind checked on load")
    };
    let x = point("query.separate.x", x, problem.dim)?;
    let y = point("query.separate.y", y, problem.dim)?;
    let vertices = body.vertices().ok_or_else(|| {
        CliError::Input(format!(
            "body.type: separate needs a vertex body, found {}",
            body.kind()
        ))
    })?;
    let p = Polytope::new(vertices).map_err(|e| lib_error("body.vertices", e))?;
    let cert = separate_segment(&p, &x, &y).map_err(|e| lib_error("query.separate", e))?;
    let argmax = match argmax_on_segment(&cert, &x, &y) {
        Endpoint::X => "x",
        Endpoint::Y => "y",
        Endpoint::Both => "both",
    };
    Ok(to_json(&SeparateDoc {
        normal: vec(&cert.normal),
        offset: Num(cert.offset),
        gap: Num(cert.gap),
        argmax,
    }))
}

fn sample(
    problem: &ProblemFile,
    body: &Body,
    tols: &Tolerances,
    default_seed: u64,
) -> Result<String, CliError> {
    let Query::Sample { from, count, seed } = &problem.query else {
        unreachable!("query kind checked on load")
    };
    let x = point("query.sample.from", from, problem.dim)?;
    let samples =
        sample_visible_certified_with(body, &x, *count, seed.unwrap_or(default_seed), tols)
            .map_err(|e| lib_error("query.sample", e))?;
    let mut csv = String::from("index");
    for i in 0..problem.dim {
        csv.push_str(&format!(",coord_{i}"));
    }
    csv.push_str(",lambda_star\n");
    for (i, s) in samples.iter().enumerate() {
        csv.push_str(&i.to_string());
        for c in s.point.coords() {
            csv.push(',');
            csv.push_str(&fmt17(*c));
        }
        csv.push(',');
        csv.push_str(&fmt17(s.certificate.lambda_star));
        csv.push('\n');
    }
    Ok(csv)
}

fn print_reports(reports: &[SuiteReport]) -> Result<(), CliError> {
    for r in reports {
        println!("{r}");
    }
    match reports.iter().filter(|r| !r.passed()).count() {
        0 => Ok(()),
        n => Err(CliError::Suite(n)),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    for (flag, value) in [("--tol", cli.tol), ("--vis-tol", cli.vis_tol)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(CliError::Input(format!(
                "{flag}: must be a positive number, found {value}"
            )));
        }
    }
    let tols = Tolerances {
        vis_tol: cli.vis_tol,
        body_tol: cli.tol,
        ..Tolerances::default()
    };
    let doc = match &cli.command {
        Command::Project { input } => {
            let (p, b) = load(input, "project")?;
            project(&p, &b)?
        }
        Command::Visible { input } => {
            let (p, b) = load(input, "visible")?;
            visible(&p, &b, &tols)?
        }
        Command::Raycast { input } => {
            let (p, b) = load(input, "raycast")?;
            raycast(&p, &b, &tols)?
        }
        Command::Separate { input } => {
            let (p, b) = load(input, "separate")?;
            separate(&p, &b)?
        }
        Command::Sample { input, output } => {
            let (p, b) = load(input, "sample")?;
            let csv = sample(&p, &b, &tols, cli.seed)?;
            match output {
                Some(path) => fs::write(path, csv)
                    .map_err(|e| CliError::Input(format!("--output {}: {e}", path.display())))?,
                None => print!("{csv}"),
            }
            return Ok(());
        }
        Command::CheckExample24 => return print_reports(&suites::disk_cone_checks()),
        Command::Verify { instances } => {
            if *instances == 0 {
                return Err(CliError::Input("--instances: must be positive".into()));
            }
            return print_reports(&suites::run_all(*instances, cli.seed));
        }
    };
    println!("{doc}");
    Ok(())
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("visicone: {e}");
            ExitCode::from(e.code())
        }
    }
}
