use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use gridnav_bench::render::render_map;
use gridnav_bench::{
    aggregate, emit_csv, load_scenario_file, load_suite_dir, run_suite, run_trial, wall_time_ratio, Algo, AlgoParams,
    CsvOptions, SuiteConfig,
};
use gridnav_core::consensus::{verify_field, FieldCheck};
use gridnav_core::perception::{assess, binarize, read_pgm, write_pgm, BinarizeParams, QualityReport};
use gridnav_core::DistanceField;

#[derive(Parser)]
#[command(name = "gridnav", version, about = "Grid path planners, benchmarks and frame quality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one planner on one scenario and print a results row.
    Plan {
        #[arg(long)]
        algo: String,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated key=value parameter overrides.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the map with the planned path (or the planner's field).
        #[arg(long)]
        render: bool,
        #[arg(long)]
        no_walltime: bool,
        /// Write the per-iteration trace or trajectory CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run planners over every map in a directory for several seeds.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        /// Comma-separated planner names.
        #[arg(long, default_value = "ga,aco,bso")]
        algos: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Seed of the first trial; trial i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_walltime: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Score a PGM frame: spatial frequency and linear-prediction residual.
    Perceive {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        threshold: f64,
        /// Linear predictor order.
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the binarized frame here.
        #[arg(long)]
        binarized: Option<PathBuf>,
    },
    /// Check a tabulated distance field against a scenario.
    VerifyField {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

/// A run that completed but did not reach its goal.
struct Unsolved(String);

fn write_out(path: Option<&FsPath>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn map_name(path: &FsPath) -> String {
    path.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

#[allow(clippy::too_many_arguments)]
fn cmd_plan(
    algo: &str,
    map: &FsPath,
    seed: u64,
    params: &str,
    out: Option<&FsPath>,
    render: bool,
    no_walltime: bool,
    trace: Option<&FsPath>,
) -> Result<Option<Unsolved>> {
    let algo: Algo = algo.parse()?;
    let params = AlgoParams::with_overrides(algo, params)?;
    let scenario = load_scenario_file(map)?;
    let (row, plan) = run_trial(&params, &map_name(map), &scenario, seed)?;
    write_out(out, &emit_csv(std::slice::from_ref(&row), CsvOptions { wall_time: !no_walltime }))?;
    if let Some(path) = trace {
        let Some(text) = &plan.trace else {
            bail!("{algo} does not record a trace");
        };
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if render {
        let mut text = render_map(&scenario.map, plan.path.as_ref());
        if let Some(field) = &plan.field {
            text.push('\n');
            text.push_str(field);
        }
        print!("{text}");
    }
    Ok((!row.success).then(|| Unsolved(format!("{algo} found no path on {}", map.display()))))
}

fn cmd_bench(
    suite: &FsPath,
    algos: &str,
    trials: usize,
    seed: u64,
    out: Option<&FsPath>,
    no_walltime: bool,
    workers: usize,
) -> Result<()> {
    let planners = algos
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse().map(AlgoParams::defaults))
        .collect::<Result<Vec<_>, _>>()?;
    if planners.is_empty() {
        bail!("no planners given");
    }
    let cfg = SuiteConfig {
        planners,
        maps: load_suite_dir(suite)?,
        trials,
        base_seed: seed,
        workers,
    };
    let rows = run_suite(&cfg)?;
    write_out(out, &emit_csv(&rows, CsvOptions { wall_time: !no_walltime }))?;
    for a in aggregate(&rows) {
        eprintln!(
            "{:<10} {:<14} success {:>5.1}%  mean len {:>9.4}  median len {:>9.4}  iters {:>9.1}  {:>9.2} ms",
            a.algo,
            a.map,
            100.0 * a.success_rate,
            a.mean_path_len,
            a.median_path_len,
            a.mean_iterations,
            a.mean_wall_ms
        );
    }
    if let Some(r) = wall_time_ratio(&rows, Algo::Bso, Algo::Aco) {
        eprintln!("bso/aco mean wall time: {:.1}%", 100.0 * r);
    }
    Ok(())
}

fn cmd_perceive(
    frame: &FsPath,
    threshold: f64,
    order: usize,
    out: Option<&FsPath>,
    binarized: Option<&FsPath>,
) -> Result<()> {
    let text = fs::read_to_string(frame).with_context(|| format!("reading {}", frame.display()))?;
    let img = read_pgm::<f64>(&text).with_context(|| format!("parsing {}", frame.display()))?;
    let p = BinarizeParams::new(threshold)?;
    let (report, _) = assess(&img, order)?;
    write_out(out, &format!("{}\n{}\n", QualityReport::<f64>::CSV_HEADER, report.to_csv_row()))?;
    if let Some(path) = binarized {
        fs::write(path, write_pgm(&binarize(&img, &p))).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_verify(map: &FsPath, field: &FsPath, tol: f64) -> Result<Option<Unsolved>> {
    let scenario = load_scenario_file(map)?;
    let text = fs::read_to_string(field).with_context(|| format!("reading {}", field.display()))?;
    let parsed = DistanceField::parse_table(&text).with_context(|| format!("parsing {}", field.display()))?;
    let m = &scenario.map;
    if !parsed.field.matches_map(m) {
        bail!(
            "field is {}x{} but the map is {}x{}",
            parsed.field.rows(),
            parsed.field.cols(),
            m.rows(),
            m.cols()
        );
    }
    let marked: Vec<_> = m.coords().filter(|&c| m.is_obstacle(c)).collect();
    if let Some(c) = marked
        .iter()
        .find(|c| !parsed.obstacles.contains(c))
        .or_else(|| parsed.obstacles.iter().find(|c| !marked.contains(c)))
    {
        return Ok(Some(Unsolved(format!("obstacle marks disagree at {c}"))));
    }
    match verify_field(&parsed.field, m, scenario.neighborhood, &[m.target()], tol) {
        FieldCheck::Consistent => {
            println!("consistent");
            Ok(None)
        }
        FieldCheck::Violation { cell, found, expected } => {
            Ok(Some(Unsolved(format!("{cell}: found {found}, expected {expected}"))))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan {
            algo,
            map,
            seed,
            params,
            out,
            render,
            no_walltime,
            trace,
        } => cmd_plan(
            algo,
            map,
            *seed,
            params,
            out.as_deref(),
            *render,
            *no_walltime,
            trace.as_deref(),
        ),
        Command::Bench {
            suite,
            algos,
            trials,
            seed,
            out,
            no_walltime,
            workers,
        } => cmd_bench(suite, algos, *trials, *seed, out.as_deref(), *no_walltime, *workers).map(|()| None),
        Command::Perceive {
            frame,
            threshold,
            order,
            out,
            binarized,
        } => cmd_perceive(frame, *threshold, *order, out.as_deref(), binarized.as_deref()).map(|()| None),
        Command::VerifyField { map, field, tol } => cmd_verify(map, field, *tol),
    };
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Unsolved(msg))) => {
            eprintln!("gridnav: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("gridnav: {e:#}");
            ExitCode::from(2)
        }
    }
}
