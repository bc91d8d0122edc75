//! `fcc`: command-line front end for the fcc-core library.
//!
//! Every coordinate on this surface is doubled: the grid vertex `(i, j, k)`
//! is typed as `2i 2j k`, so `x` and `y` must have the parity of `z`.
//! Pass `--paper-coords` to type half-integer `(i, j, k)` triples instead.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fcc_core::balls::{clique_lower_bound, shell_ball, GraphKind, ShellKind};
use fcc_core::colorings::{
    colors_used, read_coloring_file, verify_window, window_for, write_coloring,
    write_coloring_file, ColoringError, ColoringSpec, Construction,
};
use fcc_core::lattice::{
    ball_region, read_region_file, slab_distances_from, write_region_file, LatticeError, Metric,
    Region, Site,
};
use fcc_core::search::{
    export_dimacs_file, k_colorable, run_fact_script, Anchor, Budget, FactScript, SearchError,
    SearchProblem, SearchStats, SearchVerdict,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

const LONG_ABOUT: &str = "\
Distances, extremal balls, distance colorings and exact colorability search on the
face-centered cubic grid.

Coordinates are doubled: the vertex (i, j, k) is written as the integers 2i 2j k,
which requires x and y to have the parity of z. With --paper-coords the half-integer
triple (i, j, k) is accepted instead, e.g. `0.5 0.5 1` for the doubled `1 1 1`.

Exit codes: 0 success, 1 verdict false, 2 usage or format error, 3 budget exhausted.";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "fcc",
    version,
    about = "Distance colorings of the face-centered cubic grid"
)]
#[command(long_about = LONG_ABOUT)]
struct Cli {
    /// Write the run manifest here instead of standard error.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Worker threads for graph construction and verification.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Read coordinates typed on the command line as (i, j, k).
    #[arg(long, global = true)]
    paper_coords: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Distance between two vertices.
    Dist {
        #[arg(required = true, num_args = 6, value_names = ["X", "Y", "Z", "X2", "Y2", "Z2"], allow_negative_numbers = true)]
        coords: Vec<String>,
        #[arg(long, default_value = "F")]
        graph: GraphKind,
    },
    /// A ball around a vertex or one of the shell-family balls.
    Ball(BallArgs),
    /// Size of the clique witnessing a lower bound for the d-th power.
    CliqueBound {
        #[arg(long)]
        graph: GraphKind,
        #[arg(long)]
        d: u32,
        /// Write the witness clique as a region file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a construction's colors on a region as CSV.
    Color {
        #[arg(long)]
        construction: Construction,
        #[arg(long)]
        d: u32,
        /// Sites to color; defaults to the construction's verification window.
        #[arg(long)]
        region: Option<PathBuf>,
        /// Restrict the default window to a slab.
        #[arg(long)]
        graph: Option<GraphKind>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that no two sites within distance d share a color.
    Verify(VerifyArgs),
    /// Decide k-colorability of the d-th power on a region.
    Search {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = Budget::default().nodes)]
        budget_nodes: u64,
        #[arg(long, default_value_t = Budget::default().time.as_secs())]
        budget_secs: u64,
        #[arg(long)]
        expect: Option<Expect>,
        /// Write the coloring found, if any.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a colorability problem as DIMACS CNF.
    ExportDimacs {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a fact script.
    Facts {
        script: PathBuf,
        /// Print every assertion, not only the summary.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Debug, Args, Serialize)]
struct BallArgs {
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    radius: Option<u32>,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    center: Option<Vec<String>>,
    /// Host graph for a radius ball.
    #[arg(long, default_value = "F")]
    graph: GraphKind,
    /// Shell family, e.g. d_full or b_slab02.
    #[arg(long, requires = "level")]
    family: Option<ShellKind>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(
        long,
        conflicts_with = "coloring",
        required_unless_present = "coloring"
    )]
    construction: Option<Construction>,
    /// Coloring CSV to check.
    #[arg(long)]
    coloring: Option<PathBuf>,
    #[arg(long)]
    d: u32,
    /// Sites to check; defaults to the coloring's own sites or the
    /// construction's verification window.
    #[arg(long)]
    region: Option<PathBuf>,
    /// Restrict the default window to a slab.
    #[arg(long)]
    graph: Option<GraphKind>,
    #[arg(long, value_enum, default_value_t = MetricArg::Ambient)]
    metric: MetricArg,
}

#[derive(Debug, Args, Serialize)]
struct ProblemArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value_t = MetricArg::Ambient)]
    metric: MetricArg,
    /// `auto`, `none`, or a region file of pairwise close sites.
    #[arg(long, default_value = "auto")]
    anchor: String,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MetricArg {
    Ambient,
    Internal,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Ambient => Metric::Ambient,
            MetricArg::Internal => Metric::RegionInternal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Expect {
    Colorable,
    NotColorable,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// What a command reports back for the manifest.
#[derive(Debug, Default, Serialize)]
struct Outcome {
    exit_code: u8,
    summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<SearchStats>,
}

impl Outcome {
    fn ok(summary: impl Into<String>) -> Self {
        Outcome {
            summary: summary.into(),
            ..Outcome::default()
        }
    }
}

#[derive(Debug, Serialize)]
struct InputDigest {
    path: PathBuf,
    sha256: Option<String>,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'static str,
    flags: &'a Cli,
    inputs: Vec<InputDigest>,
    version: &'static str,
    elapsed_secs: f64,
    outcome: Outcome,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dist { .. } => "dist",
            Command::Ball(_) => "ball",
            Command::CliqueBound { .. } => "clique-bound",
            Command::Color { .. } => "color",
            Command::Verify(_) => "verify",
            Command::Search { .. } => "search",
            Command::ExportDimacs { .. } => "export-dimacs",
            Command::Facts { .. } => "facts",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        fn problem(p: &ProblemArgs) -> Vec<&Path> {
            let mut v = vec![p.region.as_path()];
            if !matches!(p.anchor.as_str(), "auto" | "none") {
                v.push(Path::new(&p.anchor));
            }
            v
        }
        match self {
            Command::Color { region, .. } => region.iter().map(PathBuf::as_path).collect(),
            Command::Verify(v) => v
                .coloring
                .iter()
                .chain(&v.region)
                .map(PathBuf::as_path)
                .collect(),
            Command::Search { problem: p, .. } | Command::ExportDimacs { problem: p, .. } => {
                problem(p)
            }
            Command::Facts { script, .. } => vec![script.as_path()],
            _ => Vec::new(),
        }
    }
}

fn digest(path: &Path) -> InputDigest {
    InputDigest {
        path: path.to_path_buf(),
        sha256: fs::read(path)
            .ok()
            .map(|bytes| hex::encode(Sha256::digest(bytes))),
    }
}

fn parse_site(parts: &[String], paper: bool) -> Result<Site, CliError> {
    let bad = |p: &String| CliError::Usage(format!("`{p}` is not a valid coordinate"));
    let [a, b, c] = parts else {
        return Err(CliError::Usage("a site needs three coordinates".into()));
    };
    if paper {
        let i: f64 = a.parse().map_err(|_| bad(a))?;
        let j: f64 = b.parse().map_err(|_| bad(b))?;
        let k: i64 = c.parse().map_err(|_| bad(c))?;
        Ok(Site::from_lattice(i, j, k)?)
    } else {
        let x: i64 = a.parse().map_err(|_| bad(a))?;
        let y: i64 = b.parse().map_err(|_| bad(b))?;
        let z: i64 = c.parse().map_err(|_| bad(c))?;
        Ok(Site::new(x, y, z)?)
    }
}

fn anchor_from(arg: &str) -> Result<Anchor, CliError> {
    Ok(match arg {
        "auto" => Anchor::Auto,
        "none" => Anchor::None,
        path => Anchor::Sites(read_region_file(path)?.sites().to_vec()),
    })
}

fn problem_from(p: &ProblemArgs) -> Result<SearchProblem, CliError> {
    Ok(SearchProblem::new(read_region_file(&p.region)?, p.d, p.k)
        .with_metric(p.metric.into())
        .with_anchor(anchor_from(&p.anchor)?))
}

fn default_window(
    spec: &ColoringSpec,
    d: u32,
    graph: Option<GraphKind>,
) -> Result<Region, CliError> {
    Ok(window_for(spec, d, graph.and_then(GraphKind::layers))?)
}

fn save_region(region: &Region, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(path) = out {
        write_region_file(region, path)?;
    }
    Ok(())
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Dist { coords, graph } => {
            let u = parse_site(&coords[..3], cli.paper_coords)?;
            let v = parse_site(&coords[3..], cli.paper_coords)?;
            let dist = graph.distance(u, v)?;
            writeln!(out, "{dist}")?;
            Ok(Outcome::ok(dist.to_string()))
        }
        Command::Ball(b) => {
            let region = match (b.family, b.level, b.radius) {
                (Some(kind), Some(level), _) => shell_ball(kind, level),
                (_, _, Some(r)) => {
                    let center = match &b.center {
                        Some(c) => parse_site(c, cli.paper_coords)?,
                        None => Site::ORIGIN,
                    };
                    match b.graph.layers() {
                        None => ball_region(center, r)?,
                        Some((k1, k2)) => Region::explicit(
                            slab_distances_from(&[center], k1, k2, r)?.into_keys(),
                        )?,
                    }
                }
                _ => {
                    return Err(CliError::Usage(
                        "give --radius or --family with --level".into(),
                    ))
                }
            };
            save_region(&region, b.out.as_deref())?;
            writeln!(out, "{}", region.len())?;
            Ok(Outcome::ok(format!("{} sites", region.len())))
        }
        Command::CliqueBound {
            graph,
            d,
            out: path,
        } => {
            let bound = clique_lower_bound(*graph, *d)?;
            save_region(&bound.witness, path.as_deref())?;
            writeln!(out, "{}", bound.size)?;
            Ok(Outcome::ok(format!("clique of {} sites", bound.size)))
        }
        Command::Color {
            construction,
            d,
            region,
            graph,
            out: path,
        } => {
            let spec = ColoringSpec::construction(*construction, *d)?;
            let sites = match region {
                Some(p) => read_region_file(p)?,
                None => default_window(&spec, *d, *graph)?,
            };
            let colors = spec.to_explicit(sites.iter())?;
            let used = colors_used(colors.values());
            let summary = format!("{} sites, {used} colors", colors.len());
            match path {
                Some(p) => {
                    write_coloring_file(&colors, p)?;
                    writeln!(out, "{summary}")?;
                }
                None => write_coloring(&colors, &mut *out)?,
            }
            Ok(Outcome::ok(summary))
        }
        Command::Verify(v) => verify(v, out),
        Command::Search {
            problem,
            budget_nodes,
            budget_secs,
            expect,
            out: path,
        } => {
            let problem = problem_from(problem)?.with_budget(Budget {
                nodes: *budget_nodes,
                time: Duration::from_secs(*budget_secs),
            });
            let cert = k_colorable(&problem)?;
            let s = cert.stats;
            writeln!(out, "{}", cert.verdict.label())?;
            writeln!(
                out,
                "nodes {}, max depth {}, anchor {}, {:.3} s",
                s.nodes,
                s.max_depth,
                s.anchor_size,
                s.elapsed.as_secs_f64()
            )?;
            let exit_code = match (&cert.verdict, expect) {
                (SearchVerdict::Inconclusive, _) => 3,
                (SearchVerdict::Colorable(_), Some(Expect::NotColorable))
                | (SearchVerdict::NotColorable, Some(Expect::Colorable)) => 1,
                _ => 0,
            };
            if let (SearchVerdict::Colorable(w), Some(p)) = (&cert.verdict, path) {
                write_coloring_file(w, p)?;
            }
            Ok(Outcome {
                exit_code,
                summary: cert.verdict.label().into(),
                stats: Some(s),
            })
        }
        Command::ExportDimacs { problem, out: path } => {
            let (vars, clauses) = export_dimacs_file(&problem_from(problem)?, path)?;
            let summary = format!("{vars} variables, {clauses} clauses");
            writeln!(out, "{summary}")?;
            Ok(Outcome::ok(summary))
        }
        Command::Facts { script, verbose } => {
            let report = run_fact_script(&FactScript::from_file(script)?)?;
            if *verbose || !report.all_pass() {
                write!(out, "{report}")?;
            }
            writeln!(out, "{}", report.summary())?;
            Ok(Outcome {
                exit_code: u8::from(!report.all_pass()),
                summary: report.summary(),
                stats: None,
            })
        }
    }
}

fn verify(v: &VerifyArgs, out: &mut impl Write) -> Result<Outcome, CliError> {
    let (spec, own_sites) = match (&v.construction, &v.coloring) {
        (Some(c), _) => (ColoringSpec::construction(*c, v.d)?, None),
        (None, Some(path)) => {
            let spec = read_coloring_file(path)?;
            let ColoringSpec::Explicit(map) = &spec else {
                unreachable!("coloring files load as explicit specs")
            };
            let sites = Region::explicit(map.keys().copied())?;
            (spec, Some(sites))
        }
        (None, None) => return Err(CliError::Usage("give --construction or --coloring".into())),
    };
    let region = match (&v.region, own_sites) {
        (Some(p), _) => read_region_file(p)?,
        (None, Some(sites)) => sites,
        (None, None) => default_window(&spec, v.d, v.graph)?,
    };
    let verdict = verify_window(&spec, &region, v.d, v.metric.into())?;
    let colors: Vec<u32> = region
        .iter()
        .map(|s| spec.color(s))
        .collect::<Result<_, _>>()?;
    let used = colors_used(&colors);
    let summary = if verdict.is_valid() {
        format!("VALID, {used} colors")
    } else {
        format!("INVALID, {} violations", verdict.violations().len())
    };
    writeln!(out, "{summary}")?;
    for bad in verdict.violations().iter().take(10) {
        writeln!(
            out,
            "  {} and {} share color {} at distance {}",
            bad.u, bad.v, bad.color, bad.dist
        )?;
    }
    Ok(Outcome {
        exit_code: u8::from(!verdict.is_valid()),
        summary,
        stats: None,
    })
}

fn emit_manifest(cli: &Cli, manifest: &RunManifest) -> io::Result<()> {
    let json = serde_json::to_string_pretty(manifest)?;
    match &cli.manifest {
        Some(path) => fs::write(path, json + "\n"),
        None => writeln!(io::stderr(), "{json}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let mut stdout = io::stdout().lock();
    let outcome = run(&cli, &mut stdout).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        Outcome {
            exit_code: 2,
            summary: e.to_string(),
            stats: None,
        }
    });
    drop(stdout);
    let code = outcome.exit_code;
    let manifest = RunManifest {
        command: cli.command.name(),
        flags: &cli,
        inputs: cli.command.inputs().into_iter().map(digest).collect(),
        version: env!("CARGO_PKG_VERSION"),
        elapsed_secs: start.elapsed().as_secs_f64(),
        outcome,
    };
    if let Err(e) = emit_manifest(&cli, &manifest) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
