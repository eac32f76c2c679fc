use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trichoderma_harness::output::{render_summaries, trajectory_csv, write_file, Format};
use trichoderma_harness::sweep::BUILTIN_SWEEPS;
use trichoderma_harness::{
    builtin_scenarios, check, run_scenario, run_sweep, HarnessError, Result, Scenario, SimOverrides, SweepSpec,
};

/// Simulate the fungal hydrolysis/growth/enzyme model and check its limit theory.
#[derive(Parser, Debug)]
#[command(name = "trichoderma", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// RK4 step size (h)
    #[arg(long, global = true)]
    step: Option<f64>,

    /// integration horizon (h)
    #[arg(long, global = true)]
    horizon: Option<f64>,

    /// sup-norm of the vector field below which a run counts as converged
    #[arg(long, global = true)]
    steady_tol: Option<f64>,

    /// output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// summary format: csv, json or table
    #[arg(long, global = true, default_value = "json")]
    format: Format,

    /// add the Z function as a trajectory column
    #[arg(long, global = true)]
    with_z: bool,

    /// list built-in scenarios and sweeps, then exit
    #[arg(long)]
    list_scenarios: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one scenario (built-in name or TOML file)
    Run { scenario: String },
    /// Run a parameter sweep (x0-sweep, kd-sweep or a TOML file)
    Sweep { spec: String },
    /// Run the acceptance suite
    Check,
}

impl Cli {
    fn overrides(&self) -> SimOverrides {
        SimOverrides {
            step: self.step,
            t_end: self.horizon,
            steady_tol: self.steady_tol,
            ..Default::default()
        }
    }
}

fn list() {
    println!("scenarios:");
    for sc in builtin_scenarios() {
        let i = sc.initial;
        println!(
            "  {:<14} k_d={} mu_max={}  (X,B,s,P)0=({}, {}, {}, {})",
            sc.name,
            sc.params.k_d,
            sc.params.growth.supremum(),
            i.x,
            i.b,
            i.s,
            i.p
        );
    }
    println!("sweeps:");
    for name in BUILTIN_SWEEPS {
        let spec = trichoderma_harness::builtin_sweep(name).expect("built-in sweep");
        println!("  {name:<14} {} over {:?}", spec.parameter, spec.values);
    }
}

fn summary_file(stem: &str, format: Format) -> String {
    format!("{stem}-summary.{}", format.extension())
}

fn cmd_run(cli: &Cli, name: &str) -> Result<()> {
    let scenario = Scenario::resolve(name)?;
    let run = run_scenario(&scenario, &cli.overrides())?;
    let csv = trajectory_csv(&run.trajectory, &scenario.params, cli.with_z)?;
    let traj_path = write_file(&cli.out, &format!("{}.csv", scenario.name), &csv)?;
    let summary = render_summaries(std::slice::from_ref(&run.summary), cli.format)?;
    let sum_path = write_file(&cli.out, &summary_file(&scenario.name, cli.format), &summary)?;
    print!("{}", render_summaries(&[run.summary], Format::Table)?);
    eprintln!("wrote {} and {}", traj_path.display(), sum_path.display());
    Ok(())
}

fn cmd_sweep(cli: &Cli, name: &str) -> Result<()> {
    let spec = SweepSpec::resolve(name)?;
    let entries = run_sweep(&spec, &cli.overrides());
    let mut summaries = Vec::new();
    let mut first_err = None;
    for e in entries {
        match e.outcome {
            Ok(s) => summaries.push(s),
            Err(err) => {
                eprintln!("{} = {} failed: {err}", spec.parameter, e.value);
                first_err.get_or_insert(err);
            }
        }
    }
    if !summaries.is_empty() {
        let text = render_summaries(&summaries, cli.format)?;
        let path = write_file(&cli.out, &summary_file(&spec.name, cli.format), &text)?;
        print!("{}", render_summaries(&summaries, Format::Table)?);
        eprintln!("wrote {}", path.display());
    }
    first_err.map_or(Ok(()), Err)
}

fn cmd_check(cli: &Cli) -> Result<()> {
    let results = check::run_all(&cli.overrides())?;
    for r in &results {
        println!("{r}");
        for d in &r.details {
            println!("    {d}");
        }
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    println!("{}/{} criteria passed", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::CheckFailed(format!("criteria {} failed", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match (&cli.command, cli.list_scenarios) {
        (_, true) => {
            list();
            Ok(())
        }
        (Some(Command::Run { scenario }), _) => cmd_run(&cli, scenario),
        (Some(Command::Sweep { spec }), _) => cmd_sweep(&cli, spec),
        (Some(Command::Check), _) => cmd_check(&cli),
        (None, false) => Err(HarnessError::Validation(
            "no command given; use run, sweep, check or --list-scenarios".into(),
        )),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
