//! Figure pipelines. Each one resolves its keys, computes its tables and
//! leaves writing to the caller.

use photometrix::dicke::{self, AcOptions, AcReadout, DickeConfig, PrepTime, QSource, UndamageablePairs};
use photometrix::fisher::{self, PoissonNrmOptions};
use photometrix::fock::LossChannel;
use photometrix::optimize::linspace;
use photometrix::par;
use photometrix::protocol::{self, BoundaryOptions, Budget, GeneralBound};
use photometrix::{Execution, PhotonPMF};

use crate::config::{key, Config, Key};
use crate::output::{Cell, Table};
use crate::CliError;

pub struct Pipeline {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
    pub run: fn(&Config) -> Result<Vec<Table>, CliError>,
}

pub const PIPELINES: &[Pipeline] = &[
    Pipeline {
        name: "fig1",
        about: "Poisson-limit Fisher information of each probe family against N_abs",
        keys: FIG1_KEYS,
        run: fig1,
    },
    Pipeline {
        name: "fig2",
        about: "optimized twin-Fock precision per unit time, ideal detection",
        keys: FIG2_KEYS,
        run: fig2,
    },
    Pipeline {
        name: "fig3a",
        about: "optimized twin-Fock precision per unit time with detector loss and overhead",
        keys: FIG3A_KEYS,
        run: fig3a,
    },
    Pipeline {
        name: "fig3b",
        about: "advantage boundaries of twin-Fock states in the (gamma t_ext, 1 - eta) plane",
        keys: FIG3B_KEYS,
        run: fig3b,
    },
    Pipeline {
        name: "cavity-perror",
        about: "photon absorption error of the atomic readout, plus a worked example in SI units",
        keys: PERROR_KEYS,
        run: cavity_perror,
    },
    Pipeline {
        name: "cavity-ac",
        about: "precision of atom-cavity sources against the deterministic twin-Fock probe",
        keys: AC_KEYS,
        run: cavity_ac,
    },
    Pipeline {
        name: "app-cfi",
        about: "number-resolved CFI against coupling and photon number",
        keys: APP_CFI_KEYS,
        run: app_cfi,
    },
    Pipeline {
        name: "app-regions",
        about: "general advantage ceilings and twin-Fock boundaries for both readouts",
        keys: APP_REGIONS_KEYS,
        run: app_regions,
    },
    Pipeline {
        name: "app-tfs-noise",
        about: "twin-Fock precision with detector loss and overhead for both readouts",
        keys: APP_TFS_NOISE_KEYS,
        run: app_tfs_noise,
    },
    Pipeline {
        name: "app-dicke-prep",
        about: "superradiant photon preparation: mean photon number and distribution at the peak",
        keys: APP_DICKE_PREP_KEYS,
        run: app_dicke_prep,
    },
    Pipeline {
        name: "app-timescale",
        about: "mean-field switch time against its closed-form estimate",
        keys: APP_TIMESCALE_KEYS,
        run: app_timescale,
    },
];

pub fn find(name: &str) -> Option<&'static Pipeline> {
    PIPELINES.iter().find(|p| p.name == name)
}

const GAMMA: Key = key("gamma", "1", "sample absorption rate");
const T_TOTAL: Key = key("t_total", "10", "total time T");

const FIG1_KEYS: &[Key] = &[
    key("n_abs", "0.05:5:0.05", "grid of absorbed-photon budgets"),
    GAMMA,
    key("nrm_n", "500", "photons per mode of the finite stand-in for the Poisson limit"),
    key("q_max", "10", "largest photon transfer kept in the number-resolved sum"),
    key("n_loss_max", "auto", "largest total loss kept (auto: from the Poisson tail)"),
];

const FIG2_KEYS: &[Key] = &[
    key("n", "2,4,6,8", "total photon numbers N of the twin-Fock probes"),
    key("n_abs", "log:0.01:10:61", "grid of absorbed-photon budgets"),
    GAMMA,
    T_TOTAL,
];

const FIG3A_KEYS: &[Key] = &[
    key("n", "2,4,8,12,16,20", "total photon numbers N of the twin-Fock probes"),
    key("n_abs", "log:0.01:10:61", "grid of absorbed-photon budgets"),
    key("eta", "0.96", "detector efficiency"),
    key("t_ext", "0.04", "overhead time per test"),
    GAMMA,
    T_TOTAL,
];

const FIG3B_KEYS: &[Key] = &[
    key("n", "2,4,8,12,20", "total photon numbers N of the boundary curves"),
    key("envelope_n", "2:100:2", "photon numbers over which the no-advantage envelope is taken"),
    key("n_abs", "1", "absorbed-photon budget"),
    key("gamma_t_ext", "log:0.001:1:200", "grid of overheads in units of 1/gamma"),
    key("tol", "1e-6", "bisection tolerance in eta"),
    GAMMA,
    T_TOTAL,
];

const PERROR_KEYS: &[Key] = &[
    key("n_at", "10,20,40,60,80,100", "atoms per cavity"),
    key("n", "1:20:1", "photons to absorb"),
    key("rounds", "1,2", "absorption attempts"),
    key("coupling", "1", "atom-cavity coupling J"),
    key("omega", "1", "bare frequency"),
    key("si_n_at", "40", "worked example: atoms per cavity"),
    key("si_coupling_hz", "170e6", "worked example: J / 2pi in Hz"),
    key("si_kappa_hz", "52e6", "worked example: cavity decay rate / 2pi in Hz"),
    key("si_n", "8", "worked example: photons per cavity"),
];

const AC_KEYS: &[Key] = &[
    key("n_at", "20,50,100", "atoms per cavity"),
    key("n", "1:10:1", "target mean photons per cavity"),
    key("eta", "1", "detector efficiencies"),
    key("t_ext", "0", "overhead time per test"),
    key("n_abs", "1", "absorbed-photon budget"),
    key("coupling", "1", "atom-cavity coupling J"),
    key("omega", "1", "bare frequency"),
    key("readout", "nrm", "nrm (number-resolved, g -> 0) or qfi"),
    key("q_source", "exact", "exact (ladder dynamics) or linear (thermal)"),
    key("prep_time", "linearized", "linearized or peak (first maximum of the mean)"),
    key("undamageable", "skip", "pairs with m + l <= N_abs: skip or cap"),
    key("dead_time", "auto", "time spent on a skipped pair (auto: t_ext)"),
    key("cutoff", "auto", "largest photon number per cavity kept (auto: all)"),
    GAMMA,
    T_TOTAL,
];

const APP_CFI_KEYS: &[Key] = &[
    key("photons", "12", "total photon number N of the twin-Fock probe in the phi scan"),
    key("mu", "0.2", "loss probability"),
    key("t", "1", "interrogation time"),
    key("phi", "0.01:3.13:0.01", "grid of g t"),
    key("n", "2:40:2", "total photon numbers for the scan in N"),
];

const APP_REGIONS_KEYS: &[Key] = &[
    key("n", "2,4,8,16,32", "photon numbers of the finite-N ceilings"),
    key("tfs_n", "2,4,8,12,20", "total photon numbers of the twin-Fock boundaries"),
    key("n_abs", "1", "absorbed-photon budget"),
    key("gamma_t_ext", "log:0.001:1:200", "grid of overheads in units of 1/gamma"),
    key("tol", "1e-6", "bisection tolerance in eta"),
    GAMMA,
    T_TOTAL,
];

const APP_TFS_NOISE_KEYS: &[Key] = &[
    key("n", "2,4,8,12,16,20", "total photon numbers N of the twin-Fock probes"),
    key("n_abs", "log:0.01:10:61", "grid of absorbed-photon budgets"),
    key("eta", "0.95", "detector efficiency"),
    key("t_ext", "0.05", "overhead time per test"),
    GAMMA,
    T_TOTAL,
];

const APP_DICKE_PREP_KEYS: &[Key] = &[
    key("n_at", "10,20,50,100,200", "atoms per cavity"),
    key("coupling", "1", "atom-cavity coupling J"),
    key("omega", "1", "bare frequency"),
    key("jt_max", "1.5", "end of the time grid in units of 1/J"),
    key("points", "301", "time grid points"),
    key("pmf_n_at", "50", "atoms for the photon distribution at the peak"),
];

const APP_TIMESCALE_KEYS: &[Key] = &[
    key("n", "10,20,50,100,200,500,1000,2000,5000,10000", "initial excitations N"),
    key("exact_max", "1000", "largest N for which the exact ladder peak is computed"),
];

fn core(e: photometrix::Error) -> CliError {
    CliError::Infeasible(e.to_string())
}

/// Twin-Fock photons per mode for a total `n`.
fn half(n: usize) -> Result<usize, CliError> {
    if n == 0 || n % 2 == 1 {
        return Err(CliError::Config(format!("twin-Fock photon numbers must be even and > 0, got {n}")));
    }
    Ok(n / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfsReadout {
    Qfi,
    Nrm,
}

impl TfsReadout {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "qfi" => Ok(Self::Qfi),
            "nrm" => Ok(Self::Nrm),
            _ => Err(CliError::Config(format!("readout must be qfi or nrm, got `{s}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Qfi => "qfi",
            Self::Nrm => "nrm",
        }
    }

    pub fn fisher(self, n: usize) -> impl Fn(&LossChannel) -> f64 + Sync {
        move |c: &LossChannel| match self {
            Self::Qfi => fisher::qfi_tfs_exact(n, c).value,
            Self::Nrm => fisher::cfi_nrm(n, n, c, 0.0).value,
        }
    }
}

/// `(Δg⁻²/γT, ν/γT, t)` of the optimized twin-Fock protocol.
pub fn tfs_point(
    photons: usize,
    readout: TfsReadout,
    n_abs: f64,
    eta: f64,
    t_ext: f64,
    gamma: f64,
    t_total: f64,
) -> Result<(f64, f64, f64), CliError> {
    let budget = Budget::new(t_total, n_abs, t_ext, eta).map_err(core)?;
    let r = protocol::optimize_nu(photons as f64, &budget, gamma, &readout.fisher(half(photons)?)).map_err(core)?;
    let scale = gamma * t_total;
    Ok((r.accumulated / scale, r.nu / scale, r.t))
}

fn check_gamma(c: &Config) -> Result<f64, CliError> {
    let gamma = c.f64("gamma")?;
    if !(gamma > 0.0) {
        return Err(CliError::Infeasible(format!("gamma must be > 0, got {gamma}")));
    }
    Ok(gamma)
}

fn collect_rows(rows: Vec<Result<Vec<Cell>, CliError>>, table: &mut Table) -> Result<(), CliError> {
    for r in rows {
        table.push(r?);
    }
    Ok(())
}

fn fig1(c: &Config) -> Result<Vec<Table>, CliError> {
    let grid = c.values_of("n_abs")?;
    let gamma = check_gamma(c)?;
    let opts = PoissonNrmOptions {
        n: c.usize("nrm_n")?,
        q_max: c.usize("q_max")?,
        n_loss_max: c.opt_f64("n_loss_max")?.map(|v| v as usize),
    };
    let mut t = Table::new(
        "fig1.csv",
        &["N_abs", "qfi_tfs", "qfi_noon", "cfi_nrm_g0", "cfi_nrm_gstar", "cfi_squeezed", "upper_bound"],
    );
    let rows = par::map(&grid, |&x| -> Result<Vec<Cell>, CliError> {
        if !(x >= 0.0) {
            return Err(CliError::Infeasible(format!("N_abs must be >= 0, got {x}")));
        }
        let gstar = fisher::cfi_nrm_poisson(x, gamma, None, &opts).map_err(core)?;
        let squeezed = if x > 0.0 { fisher::optimize_squeezed(x, gamma).value } else { 0.0 };
        Ok(vec![
            x.into(),
            fisher::qfi_tfs_poisson(x, gamma).into(),
            fisher::qfi_noon_poisson(x, gamma).into(),
            fisher::cfi_nrm_poisson_closed_form(x, gamma).into(),
            gstar.value.into(),
            squeezed.into(),
            (x / (gamma * gamma)).into(),
        ])
    });
    collect_rows(rows, &mut t)?;
    Ok(vec![t])
}

const PRECISION_COLUMNS: [&str; 5] = ["N_abs", "N", "dg2_per_gT", "nu_opt", "classical"];

fn precision_rows(c: &Config, file: &str, eta: f64, t_ext: f64, readouts: &[TfsReadout]) -> Result<Table, CliError> {
    let ns = c.counts_of("n")?;
    let grid = c.values_of("n_abs")?;
    let gamma = check_gamma(c)?;
    let t_total = c.f64("t_total")?;
    for &n in &ns {
        half(n)?;
    }
    let mut columns = Vec::new();
    if readouts.len() > 1 {
        columns.push("readout");
    }
    columns.extend(PRECISION_COLUMNS);
    let mut t = Table::new(file, &columns);
    let mut points = Vec::new();
    for &r in readouts {
        for &n in &ns {
            for &x in &grid {
                points.push((r, n, x));
            }
        }
    }
    let rows = par::map(&points, |&(r, n, x)| -> Result<Vec<Cell>, CliError> {
        let (dg2, nu, _) = tfs_point(n, r, x, eta, t_ext, gamma, t_total)?;
        let mut row: Vec<Cell> = Vec::new();
        if readouts.len() > 1 {
            row.push(r.name().into());
        }
        row.extend([x.into(), n.into(), dg2.into(), nu.into(), (x / (gamma * gamma)).into()]);
        Ok(row)
    });
    collect_rows(rows, &mut t)?;
    Ok(t)
}

fn fig2(c: &Config) -> Result<Vec<Table>, CliError> {
    Ok(vec![precision_rows(c, "fig2.csv", 1.0, 0.0, &[TfsReadout::Qfi])?])
}

fn fig3a(c: &Config) -> Result<Vec<Table>, CliError> {
    let (eta, x) = (c.f64("eta")?, c.f64("t_ext")?);
    Ok(vec![precision_rows(c, "fig3a.csv", eta, x, &[TfsReadout::Qfi])?])
}

fn app_tfs_noise(c: &Config) -> Result<Vec<Table>, CliError> {
    let (eta, x) = (c.f64("eta")?, c.f64("t_ext")?);
    Ok(vec![precision_rows(c, "app_tfs_noise.csv", eta, x, &[TfsReadout::Qfi, TfsReadout::Nrm])?])
}

fn boundary_options(c: &Config, grid: Vec<f64>) -> Result<BoundaryOptions, CliError> {
    Ok(BoundaryOptions {
        gamma_t_ext: grid,
        tol: c.f64("tol")?,
        gamma: check_gamma(c)?,
        t_total: c.f64("t_total")?,
        execution: Execution::available(),
    })
}

/// `1 - η` on the twin-Fock advantage boundary of `photons` at each grid point.
pub fn tfs_boundary(
    photons: usize,
    readout: TfsReadout,
    n_abs: f64,
    opts: &BoundaryOptions,
) -> Result<Vec<(f64, f64)>, CliError> {
    let f = readout.fisher(half(photons)?);
    let curve = protocol::advantage_boundary(photons as f64, n_abs, &f, opts).map_err(core)?;
    Ok(curve.iter().map(|p| (p.gamma_t_ext, p.one_minus_eta())).collect())
}

fn fig3b(c: &Config) -> Result<Vec<Table>, CliError> {
    let ns = c.counts_of("n")?;
    let env = c.counts_of("envelope_n")?;
    let n_abs = c.f64("n_abs")?;
    let opts = boundary_options(c, c.values_of("gamma_t_ext")?)?;
    let mut curves = Table::new("fig3b.csv", &["N", "gamma_t_ext", "one_minus_eta"]);
    for &n in &ns {
        for (x, y) in tfs_boundary(n, TfsReadout::Qfi, n_abs, &opts)? {
            curves.push(vec![n.into(), x.into(), y.into()]);
        }
    }
    // the grey region: no twin-Fock state of any listed N beats classical light
    let mut best: Vec<(f64, Option<usize>)> = vec![(f64::NAN, None); opts.gamma_t_ext.len()];
    for &n in &env {
        for (slot, (_, y)) in best.iter_mut().zip(tfs_boundary(n, TfsReadout::Qfi, n_abs, &opts)?) {
            if !y.is_nan() && (slot.0.is_nan() || y > slot.0) {
                *slot = (y, Some(n));
            }
        }
    }
    let mut envelope = Table::new("fig3b_envelope.csv", &["gamma_t_ext", "one_minus_eta", "N_best"]);
    for (&x, &(y, n)) in opts.gamma_t_ext.iter().zip(&best) {
        envelope.push(vec![x.into(), y.into(), n.unwrap_or(0).into()]);
    }
    Ok(vec![curves, envelope])
}

fn app_regions(c: &Config) -> Result<Vec<Table>, CliError> {
    let ns = c.counts_of("n")?;
    let tfs_ns = c.counts_of("tfs_n")?;
    let n_abs = c.f64("n_abs")?;
    let opts = boundary_options(c, c.values_of("gamma_t_ext")?)?;
    let mut bounds = Table::new("app_regions_bound.csv", &["curve", "N", "gamma_t_ext", "one_minus_eta"]);
    let mut push = |name: &str, n: usize, curve: Vec<protocol::BoundaryPoint>| {
        for p in curve {
            bounds.push(vec![name.into(), n.into(), p.gamma_t_ext.into(), p.one_minus_eta().into()]);
        }
    };
    push("any", 0, protocol::general_boundary(GeneralBound::Unconstrained, &opts).map_err(core)?);
    for &n in &ns {
        let b = GeneralBound::FiniteN { n: n as f64, n_abs };
        push("finite_n", n, protocol::general_boundary(b, &opts).map_err(core)?);
    }
    let mut tfs = Table::new("app_regions_tfs.csv", &["readout", "N", "gamma_t_ext", "one_minus_eta"]);
    for r in [TfsReadout::Qfi, TfsReadout::Nrm] {
        for &n in &tfs_ns {
            for (x, y) in tfs_boundary(n, r, n_abs, &opts)? {
                tfs.push(vec![r.name().into(), n.into(), x.into(), y.into()]);
            }
        }
    }
    Ok(vec![bounds, tfs])
}

fn cavity_perror(c: &Config) -> Result<Vec<Table>, CliError> {
    let atoms = c.counts_of("n_at")?;
    let ns = c.counts_of("n")?;
    let rounds = c.counts_of("rounds")?;
    let (j, omega) = (c.f64("coupling")?, c.f64("omega")?);
    let mut points = Vec::new();
    for &a in &atoms {
        for &r in &rounds {
            for &n in &ns {
                points.push((a, r, n));
            }
        }
    }
    let rows = par::map(&points, |&(a, r, n)| -> Result<Vec<Cell>, CliError> {
        let cfg = DickeConfig::new(a, j, omega, n as f64).map_err(core)?;
        let p = dicke::p_error(&cfg, n, r).map_err(core)?;
        Ok(vec![a.into(), n.into(), r.into(), p.into(), dicke::eta_from_perror(p, n).into()])
    });
    let mut t = Table::new("cavity_perror.csv", &["N_at", "n", "rounds", "p_error", "eta"]);
    collect_rows(rows, &mut t)?;

    let two_pi = 2.0 * std::f64::consts::PI;
    let (a, n) = (c.usize("si_n_at")?, c.usize("si_n")?);
    let j = two_pi * c.f64("si_coupling_hz")?;
    let kappa = two_pi * c.f64("si_kappa_hz")?;
    let cfg = DickeConfig::new(a, j, 0.0, n as f64).map_err(core)?;
    let (tp, tm) = (dicke::t_prep(&cfg), dicke::t_meas(&cfg));
    let mut si = Table::new(
        "cavity_perror_si.csv",
        &[
            "N_at",
            "n",
            "J_rad_per_s",
            "kappa_rad_per_s",
            "t_prep_s",
            "t_meas_s",
            "t_meas_over_t_prep",
            "cavity_survival",
            "p_error_1",
            "p_error_2",
        ],
    );
    si.push(vec![
        a.into(),
        n.into(),
        j.into(),
        kappa.into(),
        tp.into(),
        tm.into(),
        (tm / tp).into(),
        (-(tp + tm) * kappa).exp().into(),
        dicke::p_error(&cfg, n, 1).map_err(core)?.into(),
        dicke::p_error(&cfg, n, 2).map_err(core)?.into(),
    ]);
    Ok(vec![t, si])
}

/// Resolves the atom-cavity options shared by the pipeline and the sweep.
pub fn ac_options(c: &Config) -> Result<AcOptions, CliError> {
    Ok(AcOptions {
        readout: match c.choice("readout", &["nrm", "qfi"])?.as_str() {
            "qfi" => AcReadout::Qfi,
            _ => AcReadout::NrmWeak,
        },
        q_source: match c.choice("q_source", &["exact", "linear"])?.as_str() {
            "linear" => QSource::Linear,
            _ => QSource::Exact,
        },
        prep_time: match c.choice("prep_time", &["linearized", "peak"])?.as_str() {
            "peak" => PrepTime::PeakMean,
            _ => PrepTime::Linearized,
        },
        undamageable: match c.choice("undamageable", &["skip", "cap"])?.as_str() {
            "cap" => UndamageablePairs::Cap,
            _ => UndamageablePairs::Skip,
        },
        dead_time: c.opt_f64("dead_time")?,
        cutoff: c.opt_f64("cutoff")?.map(|v| v as usize),
    })
}

/// `(Δg⁻²_AC/γT, Δg⁻²_TFS/γT)` with the twin-Fock reference being `|n, n⟩`
/// under the same options.
pub fn ac_point(
    c: &Config,
    n_at: usize,
    n: usize,
    eta: f64,
    t_ext: f64,
    options: &AcOptions,
) -> Result<(f64, f64), CliError> {
    let gamma = check_gamma(c)?;
    let t_total = c.f64("t_total")?;
    let budget = Budget::new(t_total, c.f64("n_abs")?, t_ext, eta).map_err(core)?;
    let cfg = DickeConfig::new(n_at, c.f64("coupling")?, c.f64("omega")?, n as f64).map_err(core)?;
    let ac = dicke::ac_precision(&cfg, &budget, gamma, options).map_err(core)?;
    let tfs = dicke::ac_precision_with_q(&PhotonPMF::delta(n), &budget, gamma, options).map_err(core)?;
    Ok((ac / (gamma * t_total), tfs / (gamma * t_total)))
}

fn cavity_ac(c: &Config) -> Result<Vec<Table>, CliError> {
    let atoms = c.counts_of("n_at")?;
    let ns = c.counts_of("n")?;
    let etas = c.values_of("eta")?;
    let x = c.f64("t_ext")?;
    let options = ac_options(c)?;
    let gamma = check_gamma(c)?;
    let classical = c.f64("n_abs")? / (gamma * gamma);
    let mut points = Vec::new();
    for &a in &atoms {
        for &eta in &etas {
            for &n in &ns {
                points.push((a, eta, n));
            }
        }
    }
    let rows = par::map(&points, |&(a, eta, n)| -> Result<Vec<Cell>, CliError> {
        let (ac, tfs) = ac_point(c, a, n, eta, x, &options)?;
        Ok(vec![a.into(), n.into(), eta.into(), ac.into(), tfs.into(), classical.into()])
    });
    let mut t = Table::new("cavity_ac.csv", &["N_at", "n", "eta", "dg2_ac_per_gT", "dg2_tfs_per_gT", "classical"]);
    collect_rows(rows, &mut t)?;
    Ok(vec![t])
}

fn app_cfi(c: &Config) -> Result<Vec<Table>, CliError> {
    let photons = c.usize("photons")?;
    let mu = c.f64("mu")?;
    let t = c.f64("t")?;
    if !(0.0..1.0).contains(&mu) {
        return Err(CliError::Infeasible(format!("mu must lie in [0, 1), got {mu}")));
    }
    if !(t > 0.0) {
        return Err(CliError::Infeasible(format!("t must be > 0, got {t}")));
    }
    let ch = LossChannel::new(0.0, t, 1.0 - mu).map_err(core)?;
    let n = half(photons)?;
    let qfi = fisher::qfi_tfs_exact(n, &ch).value;
    let snl = fisher::qfi_coherent(photons as f64, &ch).value;
    let phis = c.values_of("phi")?;
    let cfis = par::map(&phis, |&phi| fisher::cfi_nrm(n, n, &ch, phi / t).value);
    let mut scan = Table::new("app_cfi_phi.csv", &["phi", "cfi", "qfi", "snl"]);
    for (&phi, &v) in phis.iter().zip(&cfis) {
        scan.push(vec![phi.into(), v.into(), qfi.into(), snl.into()]);
    }
    let ns = c.counts_of("n")?;
    for &m in &ns {
        half(m)?;
    }
    let rows = par::map(&ns, |&m| {
        let k = m / 2;
        let best = fisher::cfi_nrm_optimal(k, k, &ch);
        vec![
            m.into(),
            fisher::qfi_tfs_exact(k, &ch).value.into(),
            fisher::cfi_nrm(k, k, &ch, 0.0).value.into(),
            best.value.into(),
            (best.g * t).into(),
            fisher::qfi_coherent(m as f64, &ch).value.into(),
        ]
    });
    let mut by_n = Table::new("app_cfi_n.csv", &["N", "qfi", "cfi_g0", "cfi_gstar", "phi_star", "snl"]);
    for r in rows {
        by_n.push(r);
    }
    Ok(vec![scan, by_n])
}

fn app_dicke_prep(c: &Config) -> Result<Vec<Table>, CliError> {
    let atoms = c.counts_of("n_at")?;
    let (j, omega) = (c.f64("coupling")?, c.f64("omega")?);
    let times = linspace(0.0, c.f64("jt_max")? / j, c.usize("points")?);
    let mut mean = Table::new("app_dicke_prep_mean.csv", &["N_at", "t", "mean_photons", "mean_over_n_at"]);
    let mut peaks = Table::new("app_dicke_prep_peak.csv", &["N_at", "t_star", "peak_over_n_at"]);
    for &a in &atoms {
        let cfg = DickeConfig::new(a, j, omega, 1.0).map_err(core)?;
        let sector = dicke::build_sector(&cfg, dicke::Regime::Preparation);
        let prop = sector.propagator();
        let values = par::map(&times, |&t| {
            let p = prop.probabilities(t, sector.initial_index());
            p.iter().zip(sector.photons()).map(|(p, &k)| p * k as f64).sum::<f64>()
        });
        for (&t, &m) in times.iter().zip(&values) {
            mean.push(vec![a.into(), t.into(), m.into(), (m / a as f64).into()]);
        }
        let peak = dicke::superradiant_peak(&cfg);
        peaks.push(vec![a.into(), peak.x.into(), (peak.value / a as f64).into()]);
    }
    let a = c.usize("pmf_n_at")?;
    let cfg = DickeConfig::new(a, j, omega, 1.0).map_err(core)?;
    let t_star = dicke::superradiant_peak(&cfg).x;
    let pmf = dicke::photon_pmf(&cfg, t_star);
    let mut dist = Table::new("app_dicke_prep_pmf.csv", &["N_at", "t_star", "k", "prob"]);
    for (k, &p) in pmf.probs().iter().enumerate() {
        dist.push(vec![a.into(), t_star.into(), k.into(), p.into()]);
    }
    Ok(vec![mean, peaks, dist])
}

fn app_timescale(c: &Config) -> Result<Vec<Table>, CliError> {
    let ns = c.counts_of("n")?;
    let exact_max = c.usize("exact_max")?;
    let rows = par::map(&ns, |&n| -> Result<Vec<Cell>, CliError> {
        let x = n as f64;
        let st = dicke::switch_time(x).map_err(core)?;
        let formula = dicke::switch_time_formula(x);
        let exact = if n <= exact_max {
            let cfg = DickeConfig::new(n, 1.0, 0.0, 1.0).map_err(core)?;
            dicke::superradiant_peak(&cfg).x
        } else {
            f64::NAN
        };
        Ok(vec![n.into(), st.into(), formula.into(), ((st - formula).abs() / st).into(), exact.into()])
    });
    let mut t =
        Table::new("app_timescale.csv", &["N", "switch_time", "switch_time_formula", "rel_error", "ladder_peak_time"]);
    collect_rows(rows, &mut t)?;
    Ok(vec![t])
}
