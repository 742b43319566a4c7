use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rdflow::error::{Error, Result};
use rdflow::euler::Formulation;
use rdflow::harness::output::{profile_csv, REFERENCE_FILE};
use rdflow::harness::{builtin, convergence_study, reference_profile, run_case, RunConfig, CASES};
use rdflow::mesh::Mesh1D;

#[derive(Parser)]
#[command(
    name = "rdflow",
    version,
    about = "Residual distribution solver for 1D compressible flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a case and write solution, reference and audit files.
    Run(CaseArgs),
    /// Sample the exact Riemann solution of a case at its final time.
    Riemann(CaseArgs),
    /// Grid-refinement study of a case.
    Converge {
        #[command(flatten)]
        case: CaseArgs,
        /// Comma-separated cell counts.
        #[arg(long, value_delimiter = ',', default_value = "400,800,1600,3200")]
        levels: Vec<usize>,
    },
    /// List the built-in cases.
    ListCases,
}

#[derive(Args)]
struct CaseArgs {
    /// Built-in case name (see list-cases).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    case: Option<String>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    formulation: Option<Formulation>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Final time in seconds.
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    order: Option<u32>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the per-step conservation audit (true/false).
    #[arg(long)]
    audit: Option<bool>,
}

impl CaseArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.case, &self.config) {
            (Some(name), _) => builtin(name)?,
            (None, Some(path)) => RunConfig::load(path)?,
            (None, None) => return Err(Error::config("give --case or --config")),
        };
        if let Some(f) = self.formulation {
            cfg.formulation = f;
        }
        if let Some(n) = self.cells {
            cfg.n_cells = n;
        }
        if let Some(c) = self.cfl {
            cfg.cfl = c;
        }
        if let Some(t) = self.tfinal {
            cfg.t_final = t;
            cfg.steps = None;
        }
        if let Some(o) = self.order {
            cfg.order = o;
        }
        if let Some(a) = self.audit {
            cfg.audit = a;
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(args: &CaseArgs) -> Result<()> {
    let cfg = args.config()?;
    let result = run_case(&cfg)?;
    println!(
        "{}: {} formulation, N = {}, {} steps to t = {:e} s in {:.2} s",
        cfg.case,
        cfg.formulation,
        cfg.n_cells,
        result.steps,
        result.time,
        result.wall_time.as_secs_f64()
    );
    if let Some(l1) = result.l1 {
        println!(
            "L1 errors: rho {:.6e}  u {:.6e}  p {:.6e}",
            l1.rho, l1.u, l1.p
        );
    }
    if cfg.audit {
        let t = result.totals;
        println!(
            "audit maxima: element {:.3e}, energy {:.3e}, switched energy {:.3e} on {} elements, {} clipped",
            t.conserved, t.energy, t.switched_energy, t.switched, t.clipped
        );
    }
    if let Some(dir) = &cfg.output {
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn riemann(args: &CaseArgs) -> Result<()> {
    let cfg = args.config()?;
    let mesh = Mesh1D::new(cfg.domain.x_min, cfg.domain.x_max, cfg.n_cells)?;
    let profile = reference_profile(&cfg, &mesh, cfg.t_final)?
        .ok_or_else(|| Error::config(format!("case '{}' has no exact solution", cfg.case)))?;
    let csv = profile_csv(&profile);
    match &cfg.output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.display().to_string(),
                source,
            })?;
            let path = dir.join(REFERENCE_FILE);
            std::fs::write(&path, csv).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn converge(args: &CaseArgs, levels: &[usize]) -> Result<()> {
    let mut cfg = args.config()?;
    cfg.output = None;
    let report = convergence_study(&cfg, levels)?;
    let kind = if report.richardson {
        "self-convergence"
    } else {
        "exact reference"
    };
    println!(
        "{} ({}, order {}, {kind})",
        cfg.case, cfg.formulation, cfg.order
    );
    println!("{:>8} {:>14} {:>14} {:>8}", "N", "h", "L1(rho)", "rate");
    for (i, (h, e)) in report.h.iter().zip(&report.errors).enumerate() {
        let rate = if i == 0 {
            String::from("-")
        } else {
            format!("{:.3}", report.orders[i - 1])
        };
        println!("{:>8} {h:>14.6e} {e:>14.6e} {rate:>8}", report.levels[i]);
    }
    println!("least-squares slope {:.3}", report.slope);
    if !report.monotone {
        println!("warning: errors are not monotone");
    }
    Ok(())
}

fn list_cases() {
    for (name, description) in CASES {
        println!("{name:<22} {description}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Riemann(args) => riemann(args),
        Command::Converge { case, levels } => converge(case, levels),
        Command::ListCases => {
            list_cases();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
