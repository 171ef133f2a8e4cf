//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.

use std::f64::consts::{E, PI};
use std::io::Write;
use std::time::Instant;

use photometrix::dicke::{self, DickeConfig};
use photometrix::fisher::{self, Derivative};
use photometrix::fock::{beamsplitter_prob, LossChannel};
use photometrix::oracle::{lossy_fock_pair, spectral_qfi_oracle, DensityMatrix};
use photometrix::protocol::{self, Budget};

/// `N_abs*` for the two-photon twin-Fock state with ideal detection, located
/// by a dense scan at spacing 1e-5 before freezing.
const N_ABS_STAR_N2: f64 = 0.732_783;

fn report(n: u32, ok: bool, detail: String) {
    // straight to the handle: the test harness only captures `print!`
    let line = format!("criterion {n}: {} ({detail})\n", if ok { "PASS" } else { "FAIL" });
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    assert!(ok, "criterion {n} failed: {detail}");
}

/// Channel with `μ = mu` at `t = 1` and no sample absorption.
fn detector_loss(mu: f64) -> LossChannel {
    LossChannel::new(0.0, 1.0, 1.0 - mu).unwrap()
}

#[test]
fn criterion_01_classical_bound_saturation() {
    let start = Instant::now();
    let b = Budget::ideal(10.0, 1.0).unwrap();
    let r = protocol::optimize_nu(1e4, &b, 1.0, &|c: &LossChannel| fisher::qfi_coherent(1e4, c).value).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let rel = (r.accumulated - 10.0).abs() / 10.0;
    report(1, rel < 0.01 && elapsed < 1.0, format!("dg^-2 = {:.6}, rel err {rel:.2e}, {elapsed:.3}s", r.accumulated));
}

#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for mu in [0.0, 0.1, 0.3] {
        let c = detector_loss(mu);
        for m in 0..=8usize {
            for l in 0..=(8 - m) {
                let oracle =
                    spectral_qfi_oracle(&DensityMatrix::from_decomposition(&lossy_fock_pair(m, l, &c)), 1.0).unwrap();
                let mut values = vec![fisher::qfi_fock_pair(m, l, &c).value];
                if m == l {
                    values.push(fisher::qfi_tfs_exact(m, &c).value);
                }
                for v in values {
                    let rel = if oracle == 0.0 { v.abs() } else { (v - oracle).abs() / oracle };
                    worst = worst.max(rel);
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(2, worst < 1e-8 && elapsed < 10.0, format!("max rel dev {worst:.2e}, {elapsed:.2}s"));
}

#[test]
fn criterion_03_nrm_closed_forms() {
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let mu = k as f64 / 10.0;
        let c = detector_loss(mu);
        for m in 0..=15usize {
            for l in 0..=15usize {
                let v = fisher::cfi_nrm(m, l, &c, 0.0).value;
                let closed = if m == l {
                    2.0 * (m * (m + 1)) as f64 * (1.0 - mu).powi(m as i32 + 1)
                } else {
                    fisher::cfi_nrm_closed_form(m, l, &c)
                };
                if closed > 0.0 {
                    worst = worst.max((v - closed).abs() / closed);
                } else {
                    worst = worst.max(v.abs());
                }
            }
        }
    }
    report(3, worst < 1e-8, format!("max rel dev {worst:.2e}"));
}

#[test]
fn criterion_04_poisson_convergence() {
    let n = 10_000usize;
    let mut worst: f64 = 0.0;
    for n_abs in [0.5, 1.0, 2.0, 4.0] {
        let t = n_abs / (2.0 * n as f64);
        let exact = fisher::qfi_tfs_exact(n, &LossChannel::ideal(1.0, t).unwrap()).value;
        let limit = fisher::qfi_tfs_poisson(n_abs, 1.0);
        worst = worst.max((exact - limit).abs() / limit);
    }
    let large = fisher::g_function(50.0) * 2.0 / 50.0;
    let small = fisher::g_function(0.1) * 2.0 / 0.01;
    let ok = worst < 0.01 && (0.9..=1.1).contains(&large) && (0.9..=1.1).contains(&small);
    report(4, ok, format!("finite-n rel dev {worst:.2e}, G(50)*2/50 = {large:.4}, G(0.1)*2/0.01 = {small:.4}"));
}

#[test]
fn criterion_05_noon() {
    let v = fisher::qfi_noon_poisson(1.0, 1.0);
    let ratio = fisher::qfi_noon_poisson(1e-3, 1.0) / fisher::qfi_tfs_poisson(1e-3, 1.0);
    let ok = (v - (-1.0f64).exp()).abs() <= 1e-12 && (ratio - 2.0).abs() <= 0.04;
    report(5, ok, format!("F(1) - 1/e = {:.1e}, NOON/TFS at 1e-3 = {ratio:.5}", v - 1.0 / E));
}

#[test]
fn criterion_06_squeezed_optimizer() {
    let large = fisher::optimize_squeezed(100.0, 1.0);
    let small = fisher::optimize_squeezed(0.01, 1.0);
    let r_large = large.value / 100.0;
    let r_small = small.value / 1e-4;
    let ok = (r_large - 1.0).abs() <= 0.05 && (r_small - 1.0).abs() <= 0.10;
    report(
        6,
        ok,
        format!(
            "F*(100)/100 = {r_large:.4} at beta = ({:.4}, {:.4}); F*(0.01)/1e-4 = {r_small:.4} at beta = ({:.4}, {:.4})",
            large.beta_r, large.beta_s, small.beta_r, small.beta_s
        ),
    );
}

#[test]
fn criterion_07_optimal_measurement() {
    let mut worst: f64 = 0.0;
    for mu in [0.0, 0.1, 0.3] {
        let c = detector_loss(mu);
        for n in 1..=4 {
            let f = fisher::cfi_of_l(n, &c, 0.0).unwrap();
            let q = fisher::qfi_tfs_exact(n, &c).value;
            worst = worst.max((f - q).abs() / q);
        }
    }
    report(7, worst < 1e-6, format!("max rel dev {worst:.2e}"));
}

#[test]
fn criterion_08_advantage_region() {
    let tfs8 = |c: &LossChannel| fisher::qfi_tfs_exact(4, c).value;
    let b = Budget::new(10.0, 1.0, 0.05, 0.95).unwrap();
    let ratio = protocol::advantage_ratio(8.0, &b, 1.0, &tfs8).unwrap();
    let tfs2 = |c: &LossChannel| fisher::qfi_tfs_exact(1, c).value;
    let star = protocol::crossing_n_abs(2.0, 1.0, 10.0, &tfs2, 0.3, 1.5, 1e-6).unwrap();
    let ok = ratio > 1.0 && (star - N_ABS_STAR_N2).abs() <= 1e-4;
    report(8, ok, format!("ratio(0.95, 0.05) = {ratio:.4}, N_abs*(N=2) = {star:.6}"));
}

#[test]
fn criterion_09_cavity_worked_example() {
    let start = Instant::now();
    let j = 2.0 * PI * 170e6;
    let kappa = 2.0 * PI * 52e6;
    let c = DickeConfig::new(40, j, 0.0, 8.0).unwrap();
    let tp = dicke::t_prep(&c);
    let tm = dicke::t_meas(&c);
    let survive = (-(tp + tm) * kappa).exp();
    let p1 = dicke::p_error(&c, 8, 1).unwrap();
    let p2 = dicke::p_error(&c, 8, 2).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = (tp * 1e9 - 0.26).abs() <= 0.005
        && (tm / tp - 0.89).abs() <= 0.01
        && (survive - 0.85).abs() <= 0.01
        && (p1 - 0.04).abs() <= 0.01
        && p2 < 0.01
        && elapsed < 5.0;
    report(
        9,
        ok,
        format!(
            "t_prep = {:.4} ns, t_meas/t_prep = {:.4}, survival = {survive:.4}, p_error = {p1:.4} / {p2:.2e}, {elapsed:.3}s",
            tp * 1e9,
            tm / tp
        ),
    );
}

#[test]
fn criterion_10_superradiant_peak() {
    let c = DickeConfig::new(50, 1.0, 0.0, 1.0).unwrap();
    let peak = dicke::superradiant_peak(&c);
    let frac = peak.value / 50.0;
    report(10, (frac - 0.8).abs() <= 0.05, format!("max n/N_at = {frac:.4} at Jt = {:.4}", peak.x));
}

#[test]
fn criterion_11_mean_field_law() {
    let err = |n: f64| {
        let s = dicke::switch_time(n).unwrap();
        (s - dicke::switch_time_formula(n)).abs() / s
    };
    let (e2, e3, e4) = (err(1e2), err(1e3), err(1e4));
    let ok = e3 <= 0.10 && e2 > e3 && e3 > e4;
    report(11, ok, format!("rel err N=1e2: {e2:.4}, 1e3: {e3:.4}, 1e4: {e4:.4}"));
}

#[test]
fn criterion_12_unitarity_gradient_ordering() {
    let mut unitarity: f64 = 0.0;
    for &(k, m) in &[(0usize, 5usize), (3, 2), (7, 7), (12, 0), (40, 25), (150, 150)] {
        for &theta in &[0.0, 0.01, 0.4, 1.3, PI / 2.0, 2.9] {
            let s: f64 = (-(m as i64)..=k as i64).map(|q| beamsplitter_prob(k, m, q, theta).unwrap()).sum();
            unitarity = unitarity.max((s - 1.0).abs());
        }
    }
    let mut gradient: f64 = 0.0;
    let mut ordering: f64 = f64::NEG_INFINITY;
    for mu in [0.0, 0.2, 0.5] {
        let c = detector_loss(mu);
        for &(m, l) in &[(1usize, 1usize), (2, 3), (4, 4), (6, 2)] {
            let q = fisher::qfi_fock_pair(m, l, &c).value;
            for &g in &[0.0, 0.2, 0.9, 2.0] {
                let a = fisher::cfi_nrm_with(m, l, &c, g, Derivative::Analytic).value;
                if g > 0.0 {
                    let d = fisher::cfi_nrm_with(m, l, &c, g, Derivative::CentralDifference).value;
                    gradient = gradient.max((a - d).abs() / a);
                }
                ordering = ordering.max(a - q);
            }
        }
    }
    let ok = unitarity <= 1e-10 && gradient <= 1e-6 && ordering <= 1e-9;
    report(
        12,
        ok,
        format!("unitarity dev {unitarity:.2e}, gradient rel dev {gradient:.2e}, max(F_C - F_Q) = {ordering:.2e}"),
    );
}
