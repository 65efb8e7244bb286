use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use mdflow_core::case::{builtin_names, Case};
use mdflow_core::convergence::{study_both, StudyParams, StudyResult};
use mdflow_core::driver::{run_to_dir, RunOptions, RunOutput};
use mdflow_core::flux::Scheme;
use mdflow_core::simulate::RunStatus;

#[derive(Parser)]
#[command(name = "mdflow", version, about = "Two-phase flow in fractured porous media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case with one scheme.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
    },
    /// Run both schemes side by side.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Single-step spatial convergence study.
    Converge {
        /// Bundled case name or path to a case file.
        #[arg(long, default_value = "smooth")]
        case: String,
        #[arg(long, value_parser = parse_scheme, default_value = "hu")]
        scheme: Scheme,
        /// Step length; defaults to the case's dt_max.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 128)]
        reference: usize,
        /// Optional JSON file for the result tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled cases.
    Cases,
}

#[derive(Args)]
struct Common {
    /// Bundled case name or path to a case file.
    #[arg(long)]
    case: String,
    #[arg(long)]
    dt_max: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Field snapshots written besides the initial state.
    #[arg(long, default_value_t = 10)]
    snapshots: usize,
    #[arg(long)]
    out: PathBuf,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            dt_max: self.dt_max,
            tol: self.tol,
            t_end: self.t_end,
            max_iter: self.max_iter,
            snapshots: self.snapshots,
        }
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every run completed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { common, scheme } => {
            let case = load(&common.case)?;
            header(&case);
            let out = one_run(&case, scheme, &common.options(), &common.out)?;
            println!("{}", summary_line(&out));
            Ok(out.report.status == RunStatus::Completed)
        }
        Command::Compare { common } => {
            let case = load(&common.case)?;
            header(&case);
            let options = common.options();
            let (hu, ppu) = std::thread::scope(|s| {
                let hu = s.spawn(|| one_run(&case, Scheme::Hu, &options, &common.out.join("hu")));
                let ppu = s.spawn(|| one_run(&case, Scheme::Ppu, &options, &common.out.join("ppu")));
                (hu.join(), ppu.join())
            });
            let hu = hu.map_err(|_| anyhow::anyhow!("hu run panicked"))??;
            let ppu = ppu.map_err(|_| anyhow::anyhow!("ppu run panicked"))??;
            let table = compare_table(&hu, &ppu);
            print!("{table}");
            let path = common.out.join("compare.txt");
            std::fs::write(&path, &table).with_context(|| format!("writing {}", path.display()))?;
            Ok(hu.report.status == RunStatus::Completed && ppu.report.status == RunStatus::Completed)
        }
        Command::Converge {
            case,
            scheme,
            dt,
            levels,
            reference,
            out,
        } => {
            let case = load(&case)?;
            let mut params = StudyParams::new(scheme, dt.unwrap_or(case.config.time.dt_max));
            params.levels = levels;
            params.reference = reference;
            info!(
                "convergence study of {} with {scheme}: levels {:?}, reference {}, dt {:e}",
                case.config.name, params.levels, params.reference, params.dt
            );
            let results = study_both(&case.config, &params)?;
            print!("{}", study_table(&results));
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&results)?;
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(true)
        }
        Command::Cases => {
            for name in builtin_names() {
                let case = load(name)?;
                println!("{name:16} E_A = {:<8} t_end = {}", case.buoyancy_number(), case.config.time.t_end);
            }
            Ok(true)
        }
    }
}

fn load(name: &str) -> Result<Case> {
    Case::load(name).with_context(|| format!("loading case '{name}'"))
}

fn header(case: &Case) {
    let cells: Vec<String> = case
        .domain
        .subdomains
        .iter()
        .fold([0usize; 4], |mut acc, s| {
            acc[s.dim] += s.grid.num_cells();
            acc
        })
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, n)| **n > 0)
        .map(|(d, n)| format!("{n} {d}D"))
        .collect();
    info!(
        "case {}: {} cells, {} mortar interfaces, E_A = {}",
        case.config.name,
        cells.join(" + "),
        case.domain.mortars.len(),
        case.buoyancy_number()
    );
}

fn one_run(case: &Case, scheme: Scheme, options: &RunOptions, dir: &Path) -> Result<RunOutput> {
    info!("running {} with {scheme} into {}", case.config.name, dir.display());
    let (out, files) = run_to_dir(case, scheme, options, dir)?;
    info!("{scheme}: wrote {} files", files.len());
    if out.report.status == RunStatus::DtUnderflow {
        log::error!(
            "{scheme}: time step underflow at t = {}: {}",
            out.report.t_final,
            out.report.message.as_deref().unwrap_or("")
        );
    }
    Ok(out)
}

fn summary_line(out: &RunOutput) -> String {
    let r = &out.report;
    format!(
        "{}: {} t = {} steps = {} newton = {} cuts = {} flips 2d/1d/mortar = {}/{}/{}",
        r.scheme,
        r.status.as_str(),
        r.t_final,
        r.steps.len(),
        r.cum_newton_iters,
        r.cum_cuts,
        r.cum_flips.d2,
        r.cum_flips.d1,
        r.cum_flips.mortar
    )
}

fn compare_table(hu: &RunOutput, ppu: &RunOutput) -> String {
    let (a, b) = (&hu.report, &ppu.report);
    let drift = |r: &mdflow_core::simulate::RunReport| {
        let d = r.max_mass_drift();
        format!("{:.1e}", d[0].max(d[1]))
    };
    let rows: Vec<(&str, String, String)> = vec![
        ("status", a.status.as_str().into(), b.status.as_str().into()),
        ("t_final", a.t_final.to_string(), b.t_final.to_string()),
        ("steps", a.steps.len().to_string(), b.steps.len().to_string()),
        ("newton", a.cum_newton_iters.to_string(), b.cum_newton_iters.to_string()),
        ("cuts", a.cum_cuts.to_string(), b.cum_cuts.to_string()),
        ("flips_2d", a.cum_flips.d2.to_string(), b.cum_flips.d2.to_string()),
        ("flips_1d", a.cum_flips.d1.to_string(), b.cum_flips.d1.to_string()),
        ("flips_mortar", a.cum_flips.mortar.to_string(), b.cum_flips.mortar.to_string()),
        ("wasted_flips_2d", a.cum_wasted_flips.d2.to_string(), b.cum_wasted_flips.d2.to_string()),
        ("max_mass_drift", drift(a), drift(b)),
    ];
    let mut s = format!("{:<16} {:>14} {:>14}\n", "", "hu", "ppu");
    for (k, x, y) in rows {
        s += &format!("{k:<16} {x:>14} {y:>14}\n");
    }
    s
}

fn study_table(results: &[StudyResult]) -> String {
    let fmt = |o: Option<f64>| o.map_or("-".to_string(), |v| format!("{v:.2}"));
    let mut s = String::new();
    for r in results {
        s += &format!("{:?}\n{:>6} {:>10} {:>12} {:>8} {:>12} {:>8}\n", r.interface, "n", "h", "err_p", "ord_p", "err_s", "ord_s");
        for l in &r.levels {
            s += &format!(
                "{:>6} {:>10.5} {:>12.4e} {:>8} {:>12.4e} {:>8}\n",
                l.n,
                l.h,
                l.error_p,
                fmt(l.order_p),
                l.error_s,
                fmt(l.order_s)
            );
        }
    }
    s
}
