//! Cartesian sweeps of a single engine over `--grid name=spec` axes. The first
//! axis varies slowest.

use photometrix::dicke::{self, DickeConfig};
use photometrix::fisher;
use photometrix::protocol::{self, BoundaryOptions, Budget};
use photometrix::{par, Execution};

use crate::config::{key, Config, Key};
use crate::grid::parse_values;
use crate::output::{Cell, Table};
use crate::pipelines::{ac_options, ac_point, tfs_boundary, tfs_point, TfsReadout};
use crate::CliError;

pub struct Engine {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
    /// Keys that only take integer values.
    pub integer_keys: &'static [&'static str],
    /// Keys that select a mode and cannot be gridded.
    pub choice_keys: &'static [&'static str],
    pub columns: &'static [&'static str],
    pub eval: fn(&Config) -> Result<Vec<Cell>, CliError>,
}

const GAMMA: Key = key("gamma", "1", "sample absorption rate");
const T_TOTAL: Key = key("t_total", "10", "total time T");

pub const ENGINES: &[Engine] = &[
    Engine {
        name: "tfs",
        about: "optimized twin-Fock protocol",
        keys: &[
            key("n", "8", "total photon number N (even)"),
            key("n_abs", "1", "absorbed-photon budget"),
            key("eta", "1", "detector efficiency"),
            key("t_ext", "0", "overhead time per test"),
            key("readout", "qfi", "qfi or nrm"),
            GAMMA,
            T_TOTAL,
        ],
        integer_keys: &["n"],
        choice_keys: &["readout"],
        columns: &["dg2_per_gT", "nu_opt", "t", "ratio"],
        eval: eval_tfs,
    },
    Engine {
        name: "coherent",
        about: "optimized coherent-state protocol",
        keys: &[
            key("n", "8", "mean photon number"),
            key("n_abs", "1", "absorbed-photon budget"),
            key("eta", "1", "detector efficiency"),
            key("t_ext", "0", "overhead time per test"),
            GAMMA,
            T_TOTAL,
        ],
        integer_keys: &[],
        choice_keys: &[],
        columns: &["dg2_per_gT", "nu_opt", "t", "ratio"],
        eval: eval_coherent,
    },
    Engine {
        name: "boundary",
        about: "efficiency at which the twin-Fock protocol matches classical light",
        keys: &[
            key("n", "8", "total photon number N (even)"),
            key("n_abs", "1", "absorbed-photon budget"),
            key("gamma_t_ext", "0.01", "overhead per test in units of 1/gamma"),
            key("readout", "qfi", "qfi or nrm"),
            key("tol", "1e-6", "bisection tolerance in eta"),
            GAMMA,
            T_TOTAL,
        ],
        integer_keys: &["n"],
        choice_keys: &["readout"],
        columns: &["one_minus_eta"],
        eval: eval_boundary,
    },
    Engine {
        name: "ac",
        about: "atom-cavity sources against the deterministic twin-Fock probe",
        keys: &[
            key("n_at", "50", "atoms per cavity"),
            key("n", "4", "target mean photons per cavity"),
            key("eta", "1", "detector efficiency"),
            key("t_ext", "0", "overhead time per test"),
            key("n_abs", "1", "absorbed-photon budget"),
            key("coupling", "1", "atom-cavity coupling J"),
            key("omega", "1", "bare frequency"),
            key("readout", "nrm", "nrm or qfi"),
            key("q_source", "exact", "exact or linear"),
            key("prep_time", "linearized", "linearized or peak"),
            key("undamageable", "skip", "skip or cap"),
            key("dead_time", "auto", "time spent on a skipped pair (auto: t_ext)"),
            key("cutoff", "auto", "largest photon number per cavity kept (auto: all)"),
            GAMMA,
            T_TOTAL,
        ],
        integer_keys: &["n_at", "n", "cutoff"],
        choice_keys: &["readout", "q_source", "prep_time", "undamageable"],
        columns: &["dg2_ac_per_gT", "dg2_tfs_per_gT", "classical"],
        eval: eval_ac,
    },
    Engine {
        name: "perror",
        about: "photon absorption error of the atomic readout",
        keys: &[
            key("n_at", "50", "atoms per cavity"),
            key("n", "8", "photons to absorb"),
            key("rounds", "1", "absorption attempts"),
            key("coupling", "1", "atom-cavity coupling J"),
            key("omega", "1", "bare frequency"),
        ],
        integer_keys: &["n_at", "n", "rounds"],
        choice_keys: &[],
        columns: &["p_error", "eta"],
        eval: eval_perror,
    },
];

pub fn find(name: &str) -> Option<&'static Engine> {
    ENGINES.iter().find(|e| e.name == name)
}

fn eval_tfs(c: &Config) -> Result<Vec<Cell>, CliError> {
    let readout = TfsReadout::parse(&c.choice("readout", &["qfi", "nrm"])?)?;
    let (n_abs, gamma) = (c.f64("n_abs")?, c.f64("gamma")?);
    let (dg2, nu, t) =
        tfs_point(c.usize("n")?, readout, n_abs, c.f64("eta")?, c.f64("t_ext")?, gamma, c.f64("t_total")?)?;
    Ok(vec![dg2.into(), nu.into(), t.into(), (dg2 * gamma * gamma / n_abs).into()])
}

fn eval_coherent(c: &Config) -> Result<Vec<Cell>, CliError> {
    let (n, n_abs, gamma, t_total) = (c.f64("n")?, c.f64("n_abs")?, c.f64("gamma")?, c.f64("t_total")?);
    let budget = Budget::new(t_total, n_abs, c.f64("t_ext")?, c.f64("eta")?)?;
    let r =
        protocol::optimize_nu(n, &budget, gamma, &|ch: &photometrix::LossChannel| fisher::qfi_coherent(n, ch).value)?;
    let scale = gamma * t_total;
    let dg2 = r.accumulated / scale;
    Ok(vec![dg2.into(), (r.nu / scale).into(), r.t.into(), (dg2 * gamma * gamma / n_abs).into()])
}

fn eval_boundary(c: &Config) -> Result<Vec<Cell>, CliError> {
    let readout = TfsReadout::parse(&c.choice("readout", &["qfi", "nrm"])?)?;
    let opts = BoundaryOptions {
        gamma_t_ext: vec![c.f64("gamma_t_ext")?],
        tol: c.f64("tol")?,
        gamma: c.f64("gamma")?,
        t_total: c.f64("t_total")?,
        execution: Execution::Sequential,
    };
    let curve = tfs_boundary(c.usize("n")?, readout, c.f64("n_abs")?, &opts)?;
    Ok(vec![curve[0].1.into()])
}

fn eval_ac(c: &Config) -> Result<Vec<Cell>, CliError> {
    let options = ac_options(c)?;
    let (ac, tfs) = ac_point(c, c.usize("n_at")?, c.usize("n")?, c.f64("eta")?, c.f64("t_ext")?, &options)?;
    let gamma = c.f64("gamma")?;
    Ok(vec![ac.into(), tfs.into(), (c.f64("n_abs")? / (gamma * gamma)).into()])
}

fn eval_perror(c: &Config) -> Result<Vec<Cell>, CliError> {
    let n = c.usize("n")?;
    let cfg = DickeConfig::new(c.usize("n_at")?, c.f64("coupling")?, c.f64("omega")?, n as f64)?;
    let p = dicke::p_error(&cfg, n, c.usize("rounds")?)?;
    Ok(vec![p.into(), dicke::eta_from_perror(p, n).into()])
}

/// Parses `name=spec` axes, checking every name against the engine.
pub fn parse_axes(engine: &Engine, grids: &[String]) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();
    for g in grids {
        let (name, spec) =
            g.split_once('=').ok_or_else(|| CliError::Config(format!("--grid expects name=spec, got `{g}`")))?;
        let name = name.trim().replace('-', "_");
        if !engine.keys.iter().any(|k| k.name == name) || engine.choice_keys.contains(&name.as_str()) {
            let numeric: Vec<&str> =
                engine.keys.iter().map(|k| k.name).filter(|k| !engine.choice_keys.contains(k)).collect();
            return Err(CliError::Config(format!(
                "`{name}` is not a numeric key of engine `{}` (known: {})",
                engine.name,
                numeric.join(", ")
            )));
        }
        if axes.iter().any(|(n, _)| *n == name) {
            return Err(CliError::Config(format!("`{name}` is gridded twice")));
        }
        let values = parse_values(&name, spec)?;
        if engine.integer_keys.contains(&name.as_str()) && values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
            return Err(CliError::Config(format!("`{name}` takes non-negative integers, got `{spec}`")));
        }
        axes.push((name, values));
    }
    Ok(axes)
}

/// Every combination of axis values, first axis slowest.
fn cartesian(axes: &[(String, Vec<f64>)]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for (_, values) in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Evaluates `engine` on every grid point of `axes` over the base config.
pub fn run(engine: &Engine, base: &Config, axes: &[(String, Vec<f64>)]) -> Result<Table, CliError> {
    let mut columns: Vec<&str> = axes.iter().map(|(n, _)| n.as_str()).collect();
    columns.extend(engine.columns);
    let mut table = Table::new(format!("sweep_{}.csv", engine.name), &columns);
    let points = cartesian(axes);
    let rows = par::map(&points, |p| -> Result<Vec<Cell>, CliError> {
        let text: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        let overrides = axes.iter().zip(&text).map(|((n, _), v)| (n.clone(), v.clone()));
        let mut pairs: Vec<(String, String)> = base.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        pairs.extend(overrides);
        let config = Config::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())));
        let mut row: Vec<Cell> = axes
            .iter()
            .zip(p)
            .map(
                |((n, _), &v)| {
                    if engine.integer_keys.contains(&n.as_str()) {
                        Cell::Int(v as i64)
                    } else {
                        Cell::Float(v)
                    }
                },
            )
            .collect();
        row.extend((engine.eval)(&config)?);
        Ok(row)
    });
    for r in rows {
        table.push(r?);
    }
    Ok(table)
}
