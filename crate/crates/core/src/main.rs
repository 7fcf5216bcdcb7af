use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gaugefock::config::RunConfig;
use gaugefock::group::file::load_group_file;
use gaugefock::group::parse_group_ref;
use gaugefock::link::Basis;
use gaugefock::run::{execute, group_info, load_group, RunOptions, RunResult, TaskOutput};
use gaugefock::Error;

#[derive(Parser)]
#[command(name = "gaugefock", version, about = "Lattice gauge theories in Fock space: build, verify, diagonalize")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Run configuration (TOML, or a JSON result file to re-run).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, env = "GAUGEFOCK_THREADS")]
    threads: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Link basis, overriding the config.
    #[arg(long, global = true, value_enum)]
    basis: Option<BasisArg>,
    /// Include wall-clock timings in the result.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Rep,
    Group,
}

#[derive(Subcommand)]
enum Command {
    /// Print order, classes, irreps and character table of a group.
    GroupInfo {
        /// Built-in group such as `D3`, `Z_N:N=4` or `SU2_trunc:J_max=1/2`.
        group: Option<String>,
        /// Group definition file.
        #[arg(long, conflicts_with = "group")]
        file: Option<PathBuf>,
    },
    /// Run the invariant suite for the configured model.
    Verify,
    /// Lowest eigenvalues, degeneracies and the optional sector spectrum.
    Spectrum,
    /// Expectation values in the ground state or the vacuum.
    Observables,
    /// Single-plaquette vortex masses against the character formula.
    VortexMasses,
    /// Run every task listed in the config.
    Run,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config_error() { 2 } else { 1 })
}

fn summary(result: &RunResult) -> String {
    let m = &result.model;
    let mut out = format!(
        "{} on {} vertices / {} links, {:?} basis, dimension {}\n",
        m.group, m.vertices, m.links, m.basis, m.dimension
    );
    for task in &result.tasks {
        let status = if task.passed() { "ok" } else { "FAIL" };
        let line = match task {
            TaskOutput::Verify { checks, .. } => {
                let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                format!("verify: {} checks, failed {:?}", checks.len(), failed)
            }
            TaskOutput::Spectrum { full, sector } => {
                let mut s = format!("spectrum: {} levels, lowest {:?}", full.levels.len(), full.levels.first());
                if let Some(sec) = sector {
                    s += &format!("; sector lowest {:?}", sec.levels.first());
                }
                s
            }
            TaskOutput::Observables { values, .. } => {
                let v: Vec<String> = values.iter().map(|o| format!("{}={:.10}", o.name, o.value[0])).collect();
                format!("observables: {}", v.join(" "))
            }
            TaskOutput::VortexMasses { masses, .. } => {
                let v: Vec<String> = masses.iter().map(|m| format!("{}:{:.10}", m.class, m.gap)).collect();
                format!("vortex-masses: {}", v.join(" "))
            }
            TaskOutput::Failed { task, error } => format!("{task}: {error}"),
        };
        out += &format!("{status:<4} {line}\n");
    }
    out
}

fn run_config(global: &Global, only: Option<&str>) -> Result<bool, Error> {
    let path = global
        .config
        .as_ref()
        .ok_or_else(|| Error::Parse("--config is required for this command".into()))?;
    let config = RunConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let opts = RunOptions {
        seed: global.seed,
        basis: global.basis.map(|b| match b {
            BasisArg::Rep => Basis::Rep,
            BasisArg::Group => Basis::Group,
        }),
        only: only.map(str::to_string),
        timings: global.timings,
    };
    let result = execute(&config, base, &opts)?;
    let output = global.output.clone().or_else(|| config.output.as_ref().map(|o| base.join(o)));
    match output {
        Some(file) => {
            std::fs::write(&file, result.to_json())
                .map_err(|e| Error::Parse(format!("cannot write {}: {e}", file.display())))?;
            print!("{}", summary(&result));
        }
        None => print!("{}", result.to_json()),
    }
    Ok(result.passed)
}

fn group_info_command(global: &Global, group: Option<&str>, file: Option<&Path>) -> Result<bool, Error> {
    let entry = match (group, file) {
        (Some(g), _) => parse_group_ref(g)?,
        (None, Some(f)) => load_group_file(f)?,
        (None, None) => {
            let path = global
                .config
                .as_ref()
                .ok_or_else(|| Error::Parse("give a group, --file or --config".into()))?;
            load_group(&RunConfig::load(path)?, path.parent().unwrap_or(Path::new(".")))?
        }
    };
    let text = group_info(&entry)?;
    match &global.output {
        Some(out) => std::fs::write(out, &text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", out.display())))?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => return fail(&Error::Parse(format!("thread pool: {e}"))),
    };
    let outcome = pool.install(|| match &cli.command {
        Command::GroupInfo { group, file } => group_info_command(&cli.global, group.as_deref(), file.as_deref()),
        Command::Verify => run_config(&cli.global, Some("verify")),
        Command::Spectrum => run_config(&cli.global, Some("spectrum")),
        Command::Observables => run_config(&cli.global, Some("observables")),
        Command::VortexMasses => run_config(&cli.global, Some("vortex-masses")),
        Command::Run => run_config(&cli.global, None),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
