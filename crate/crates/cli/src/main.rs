//! `photonic-dse` — design-space exploration CLI for incoherent MRR photonic
//! GEMM accelerators.
//!
//! Exit codes: 0 success, 2 input error, 3 configuration error, 4 internal
//! invariant violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use photonic_dse_core::error::Error;
use photonic_dse_core::link_budget::ScalabilityQuery;
use photonic_dse_core::mapper::{plan_model, AcceleratorConfig};
use photonic_dse_core::report;
use photonic_dse_core::simulator::{
    cell_config, compare_accelerators, run_inference, sweep_threads, CountsMode,
};
use photonic_dse_core::workload::load_model;
use photonic_dse_core::{
    sweep_scalability, CnnModel, DpuOrganization, ParamSet,
};

#[derive(Parser)]
#[command(name = "photonic-dse", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Parameter file (key=value); defaults are used when omitted.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output file path.
    #[arg(long, default_value = "out.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Organizations to include (comma-separated: asmw,masw,smwa).
    #[arg(long, value_delimiter = ',', default_values = ["asmw", "masw", "smwa"])]
    org: Vec<String>,
    /// Data rates in GS/s.
    #[arg(long, value_delimiter = ',', default_values = ["1", "5", "10"])]
    dr: Vec<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the supported DPE size N per (org, DR, B) and emit the table.
    Scalability {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Bit precisions to sweep.
        #[arg(long, value_delimiter = ',', default_values = ["1","2","3","4","5","6","7","8"])]
        b: Vec<u8>,
    },
    /// Emit per-organization crosstalk flags and loss estimates at a DPE size.
    Penalty {
        #[command(flatten)]
        common: CommonArgs,
        /// DPE size N.
        #[arg(long, default_value_t = 36)]
        n: u32,
        /// DPEs per DPU; defaults to N.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Simulate CNN inference and emit absolute metrics per (model, org, DR).
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Model descriptor CSVs.
        #[arg(long = "model", required = true)]
        model: Vec<PathBuf>,
        /// Use the published (N, DPU count) table instead of solving and
        /// area-matching.
        #[arg(long)]
        paper_counts: bool,
        /// Serialize psum reductions through the tile networks after compute
        /// instead of overlapping them.
        #[arg(long)]
        serial_reduction: bool,
    },
    /// Simulate and normalize against ASMW/ResNet50/10 GS/s, with gmean rows.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long = "model", required = true)]
        model: Vec<PathBuf>,
        #[arg(long)]
        paper_counts: bool,
    },
    /// Dump the per-layer mapping schedule for one model and design point.
    Plan {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "model", required = true)]
        model: PathBuf,
        #[arg(long, default_value = "smwa")]
        org: String,
        #[arg(long, default_value_t = 1.0)]
        dr: f64,
        /// Override the solved DPE size.
        #[arg(long)]
        n: Option<u32>,
        /// Override the DPU count.
        #[arg(long)]
        dpu_count: Option<u32>,
        #[arg(long)]
        paper_counts: bool,
    },
    /// Write the full default parameter file with unit comments.
    SeedParams {
        /// Output file path.
        #[arg(long, default_value = "params.txt")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 3,
        Error::Internal(_) => 4,
        _ => 2,
    }
}

fn load_params(path: &Option<PathBuf>) -> Result<ParamSet, Error> {
    match path {
        Some(p) => ParamSet::from_file(p),
        None => Ok(ParamSet::default()),
    }
}

fn parse_orgs(names: &[String]) -> Result<Vec<DpuOrganization>, Error> {
    names.iter().map(|s| s.parse()).collect()
}

fn load_models(paths: &[PathBuf]) -> Result<Vec<CnnModel>, Error> {
    paths.iter().map(|p| load_model(p)).collect()
}

fn counts_mode(paper: bool) -> CountsMode {
    if paper {
        CountsMode::Paper
    } else {
        CountsMode::AreaProportionate
    }
}

/// `<stem>.breakdown.csv` next to the main output.
fn breakdown_path(out: &std::path::Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.breakdown.csv"))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Scalability { common, sweep, b } => {
            let params = load_params(&common.params)?;
            let orgs = parse_orgs(&sweep.org)?;
            let rows = sweep_scalability(&b, &sweep.dr, &orgs, &params)?;
            report::write_atomic(&common.out, &report::scalability_csv(&rows))?;
            Ok(())
        }
        Command::Penalty { common, n, m } => {
            let params = load_params(&common.params)?;
            let csv = report::penalty_csv(n, m.unwrap_or(n), &params)?;
            report::write_atomic(&common.out, &csv)?;
            Ok(())
        }
        Command::Simulate {
            common,
            sweep,
            model,
            paper_counts,
            serial_reduction,
        } => {
            let params = load_params(&common.params)?;
            let orgs = parse_orgs(&sweep.org)?;
            let models = load_models(&model)?;
            let mode = counts_mode(paper_counts);
            let mut reports = Vec::new();
            for m in &models {
                for &org in &orgs {
                    for &dr in &sweep.dr {
                        let mut config = cell_config(org, dr, mode, &params)?;
                        config.pipelined_reduction = !serial_reduction;
                        eprintln!(
                            "config: {} N={} M={} dpu_count={} dr={} GS/s",
                            org.name(),
                            config.n,
                            config.m,
                            config.dpu_count,
                            dr
                        );
                        reports.push(run_inference(m, &config)?);
                    }
                }
            }
            report::write_atomic(&common.out, &report::simulate_csv(&reports))?;
            let breakdown_path = breakdown_path(&common.out);
            report::write_atomic(&breakdown_path, &report::breakdown_csv(&reports))?;
            Ok(())
        }
        Command::Compare {
            common,
            sweep,
            model,
            paper_counts,
        } => {
            let params = load_params(&common.params)?;
            let orgs = parse_orgs(&sweep.org)?;
            let models = load_models(&model)?;
            let cmp = compare_accelerators(
                &models,
                &orgs,
                &sweep.dr,
                counts_mode(paper_counts),
                &params,
                sweep_threads(),
            )?;
            report::write_atomic(&common.out, &report::compare_csv(&cmp))?;
            Ok(())
        }
        Command::Plan {
            common,
            model,
            org,
            dr,
            n,
            dpu_count,
            paper_counts,
        } => {
            let params = load_params(&common.params)?;
            let org: DpuOrganization = org.parse()?;
            let m = load_model(&model)?;
            let mut config = if paper_counts {
                AcceleratorConfig::paper(org, dr)?
            } else {
                let solved = photonic_dse_core::max_n(
                    &ScalabilityQuery {
                        bit_precision: 4,
                        datarate_gsps: dr,
                        org,
                    },
                    &params,
                )?;
                AcceleratorConfig::new(org, solved.n_max.max(1), 1, dr)
            };
            if let Some(n) = n {
                config.n = n;
                config.m = n;
            }
            if let Some(c) = dpu_count {
                config.dpu_count = c;
            }
            let items = plan_model(&m, &config)?;
            report::write_atomic(&common.out, &report::plan_csv(&items))?;
            Ok(())
        }
        Command::SeedParams { out } => {
            report::write_atomic(&out, &ParamSet::seed_file())?;
            Ok(())
        }
    }
}
