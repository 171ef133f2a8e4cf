use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::builder::PossibleValuesParser;
use clap::Parser;

use photometrix_cli::config::{parse_flags, Config, Key};
use photometrix_cli::{pipelines, run_pipeline, sweep, write_run, CliError};

const AFTER_HELP: &str = "\
Any other `--key value` (or `--key=value`) pair overrides a pipeline or engine
parameter; `--describe` lists them with their defaults. Value lists accept
`a:b:step`, `log:a:b:n` and `x,y,z`.";

#[derive(Debug, Parser)]
#[command(name = "photometrix", version, about = "Figure pipelines and parameter sweeps", after_help = AFTER_HELP)]
struct Args {
    /// Pipeline to run, or `sweep`
    #[arg(value_parser = PossibleValuesParser::new(targets()))]
    pipeline: String,

    /// `key = value` file applied before command-line overrides
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Sweep axis `name=spec`; repeat for a Cartesian grid
    #[arg(long)]
    grid: Vec<String>,

    /// Sweep engine
    #[arg(long, default_value = "tfs", value_parser = PossibleValuesParser::new(sweep::ENGINES.iter().map(|e| e.name)))]
    engine: String,

    /// Print the parameters and their defaults, then exit
    #[arg(long)]
    describe: bool,

    /// Parameter overrides, split off by [`split_overrides`]
    #[arg(last = true, hide = true)]
    overrides: Vec<String>,
}

const VALUED: [&str; 4] = ["--config", "--out", "--grid", "--engine"];
const SWITCHES: [&str; 5] = ["--describe", "--help", "-h", "--version", "-V"];

/// Moves every `--key value` pair clap does not know behind a `--`, so that
/// overrides and regular options can be mixed in any order.
fn split_overrides(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut known = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    known.extend(it.next());
    while let Some(a) = it.next() {
        let name = a.split_once('=').map_or(a.as_str(), |(n, _)| n);
        if a == "--" {
            overrides.extend(it.by_ref());
        } else if SWITCHES.contains(&a.as_str()) || !a.starts_with('-') {
            known.push(a);
        } else if VALUED.contains(&name) {
            let inline = a.contains('=');
            known.push(a);
            if !inline {
                known.extend(it.next());
            }
        } else {
            let inline = a.contains('=');
            overrides.push(a);
            if !inline {
                overrides.extend(it.next());
            }
        }
    }
    if !overrides.is_empty() {
        known.push("--".into());
        known.extend(overrides);
    }
    known
}

fn targets() -> Vec<&'static str> {
    pipelines::PIPELINES.iter().map(|p| p.name).chain(["sweep"]).collect()
}

fn describe(about: &str, keys: &[Key]) {
    println!("{about}\n");
    let width = keys.iter().map(|k| k.name.len()).max().unwrap_or(0);
    for k in keys {
        println!("  --{:width$}  {} [default: {}]", k.name, k.help, k.default);
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    let flags = parse_flags(&args.overrides)?;
    if args.pipeline == "sweep" {
        let engine = sweep::find(&args.engine).expect("validated by clap");
        if args.describe {
            describe(engine.about, engine.keys);
            return Ok(());
        }
        let (started, clock) = (SystemTime::now(), Instant::now());
        let base = Config::resolve(engine.keys, args.config.as_deref(), &flags)?;
        let axes = sweep::parse_axes(engine, &args.grid)?;
        let table = sweep::run(engine, &base, &axes)?;
        // the manifest records the engine and the axes next to the base values
        let grid = args.grid.join(" ");
        let params = Config::from_pairs(base.iter().chain([("engine", engine.name), ("grid", grid.as_str())]));
        let manifest = write_run("sweep", &params, &[table], &args.out, started, clock)?;
        eprintln!(
            "wrote {} row(s) to {}",
            manifest.outputs[0].rows,
            args.out.join(&manifest.outputs[0].file).display()
        );
        return Ok(());
    }
    let p = pipelines::find(&args.pipeline).expect("validated by clap");
    if args.describe {
        describe(p.about, p.keys);
        return Ok(());
    }
    if !args.grid.is_empty() {
        return Err(CliError::Config("--grid only applies to `sweep`".into()));
    }
    let config = Config::resolve(p.keys, args.config.as_deref(), &flags)?;
    let manifest = run_pipeline(p.name, &config, &args.out)?;
    for o in &manifest.outputs {
        eprintln!("wrote {} row(s) to {}", o.rows, args.out.join(&o.file).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse_from(split_overrides(std::env::args()));
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("photometrix: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
