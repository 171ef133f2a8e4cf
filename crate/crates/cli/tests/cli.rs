use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn photometrix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photometrix")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = photometrix(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Self {
        let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut lines = text.lines();
        let header = lines.next().expect("header").split(',').map(String::from).collect();
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Self { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    fn f(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }
}

fn out_dir(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn fig2_defaults_have_the_documented_shape() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "fig2");
    run_ok(&["fig2", "--out", &out]);
    let csv = Csv::read(&Path::new(&out).join("fig2.csv"));
    assert_eq!(csv.header, ["N_abs", "N", "dg2_per_gT", "nu_opt", "classical"]);
    assert_eq!(csv.rows.len(), 4 * 61);
    for r in 0..csv.rows.len() {
        let (x, n, nu) = (csv.f(r, "N_abs"), csv.f(r, "N"), csv.f(r, "nu_opt"));
        assert_eq!(csv.f(r, "classical"), x);
        // with t_ext = 0 and T = 10, nu_opt = 1/(gamma t); each sample stays within budget
        let absorbed = n * (1.0 - (-1.0 / nu).exp());
        assert!(absorbed <= x * (1.0 + 1e-9), "row {r}: absorbed {absorbed} > {x}");
        assert!(csv.f(r, "dg2_per_gT") > 0.0);
    }
}

#[test]
fn fig1_noon_column_is_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "fig1");
    run_ok(&["fig1", "--out", &out, "--n_abs", "0.5,1", "--nrm_n", "40"]);
    let csv = Csv::read(&Path::new(&out).join("fig1.csv"));
    assert_eq!(
        csv.header,
        ["N_abs", "qfi_tfs", "qfi_noon", "cfi_nrm_g0", "cfi_nrm_gstar", "cfi_squeezed", "upper_bound"]
    );
    assert!((csv.f(1, "qfi_noon") - (-1.0f64).exp()).abs() < 1e-12);
    for r in 0..2 {
        let bound = csv.f(r, "upper_bound");
        for c in ["qfi_tfs", "qfi_noon", "cfi_nrm_g0", "cfi_nrm_gstar", "cfi_squeezed"] {
            assert!(csv.f(r, c) <= bound, "{c} above the bound");
        }
        assert!(csv.f(r, "cfi_nrm_gstar") >= csv.f(r, "cfi_nrm_g0"));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (out_dir(&dir, "a"), out_dir(&dir, "b"));
    for out in [&a, &b] {
        run_ok(&["fig3a", "--out", out, "--n", "2,8", "--n_abs", "log:0.1:10:7"]);
    }
    let read = |d: &str| std::fs::read(Path::new(d).join("fig3a.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn manifest_describes_the_outputs() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "perror");
    run_ok(&["cavity-perror", "--out", &out, "--n_at", "10,20", "--n", "1:3:1", "--rounds", "1"]);
    let text = std::fs::read_to_string(Path::new(&out).join("manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(m["pipeline"], "cavity-perror");
    assert_eq!(m["parameters"]["n_at"], "10,20");
    assert_eq!(m["outputs"][0]["file"], "cavity_perror.csv");
    assert_eq!(m["outputs"][0]["rows"], 6);
    assert_eq!(m["outputs"][1]["rows"], 1);
    let csv = Csv::read(&Path::new(&out).join("cavity_perror.csv"));
    assert_eq!(csv.rows.len(), 6);
    for r in 0..6 {
        let p = csv.f(r, "p_error");
        assert!((0.0..1.0).contains(&p));
    }
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\nn = 2,4\nn_abs = 1\nt_total = 5\n").unwrap();
    let out = out_dir(&dir, "fig2");
    run_ok(&["fig2", "--out", &out, "--config", cfg.to_str().unwrap(), "--n", "6"]);
    let csv = Csv::read(&Path::new(&out).join("fig2.csv"));
    assert_eq!(csv.rows.len(), 1);
    assert_eq!(csv.rows[0][csv.col("N")], "6");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "x");
    assert_eq!(photometrix(&["fig2", "--out", &out, "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(photometrix(&["no-such-pipeline"]).status.code(), Some(2));
    assert_eq!(photometrix(&["fig2", "--out", &out, "--n", "3"]).status.code(), Some(2));
    assert_eq!(photometrix(&["fig2", "--out", &out, "--n_abs", "1:2"]).status.code(), Some(2));
    assert_eq!(photometrix(&["fig2", "--out", &out, "--gamma", "-1"]).status.code(), Some(3));
    assert_eq!(photometrix(&["sweep", "--out", &out, "--grid", "readout=1"]).status.code(), Some(2));
    assert_eq!(photometrix(&["sweep", "--out", &out, "--grid", "eta"]).status.code(), Some(2));
}

#[test]
fn sweep_is_cartesian_with_the_first_axis_slowest() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "sweep");
    run_ok(&["sweep", "--engine", "tfs", "--grid", "eta=0.9,0.95,1", "--grid", "t_ext=0,0.05", "--out", &out]);
    let csv = Csv::read(&Path::new(&out).join("sweep_tfs.csv"));
    assert_eq!(csv.header, ["eta", "t_ext", "dg2_per_gT", "nu_opt", "t", "ratio"]);
    assert_eq!(csv.rows.len(), 6);
    let etas: Vec<f64> = (0..6).map(|r| csv.f(r, "eta")).collect();
    assert_eq!(etas, [0.9, 0.9, 0.95, 0.95, 1.0, 1.0]);
    for r in 0..6 {
        // n_abs = 1 and gamma = 1, so the ratio is the precision itself
        assert_eq!(csv.f(r, "ratio"), csv.f(r, "dg2_per_gT"));
    }
    // overhead only costs precision
    assert!(csv.f(1, "dg2_per_gT") < csv.f(0, "dg2_per_gT"));
}

#[test]
fn empty_grid_writes_only_the_header() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "empty");
    run_ok(&["sweep", "--grid", "eta=1:0:0.1", "--out", &out]);
    let text = std::fs::read_to_string(Path::new(&out).join("sweep_tfs.csv")).unwrap();
    assert_eq!(text, "eta,dg2_per_gT,nu_opt,t,ratio\n");
}

#[test]
fn sweep_engines_agree_with_pipelines() {
    let dir = TempDir::new().unwrap();
    let (fig, sw) = (out_dir(&dir, "fig3b"), out_dir(&dir, "sweep"));
    run_ok(&["fig3b", "--out", &fig, "--n", "8", "--envelope_n", "8", "--gamma_t_ext", "0.01,0.1"]);
    run_ok(&["sweep", "--engine", "boundary", "--n", "8", "--grid", "gamma_t_ext=0.01,0.1", "--out", &sw]);
    let a = Csv::read(&Path::new(&fig).join("fig3b.csv"));
    let b = Csv::read(&Path::new(&sw).join("sweep_boundary.csv"));
    assert_eq!(a.rows.len(), 2);
    for r in 0..2 {
        assert_eq!(a.rows[r][a.col("one_minus_eta")], b.rows[r][b.col("one_minus_eta")]);
        assert!(a.f(r, "one_minus_eta") > 0.0);
    }

    let (f2, s2) = (out_dir(&dir, "fig2"), out_dir(&dir, "tfs"));
    run_ok(&["fig2", "--out", &f2, "--n", "4", "--n_abs", "0.5"]);
    run_ok(&["sweep", "--n", "4", "--n_abs", "0.5", "--out", &s2]);
    let a = Csv::read(&Path::new(&f2).join("fig2.csv"));
    let b = Csv::read(&Path::new(&s2).join("sweep_tfs.csv"));
    assert_eq!(a.rows[0][a.col("dg2_per_gT")], b.rows[0][b.col("dg2_per_gT")]);
}

#[test]
fn every_pipeline_describes_itself() {
    for p in photometrix_cli::pipelines::PIPELINES {
        let out = photometrix(&[p.name, "--describe"]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        for k in p.keys {
            assert!(text.contains(&format!("--{}", k.name)), "{}: {}", p.name, k.name);
        }
    }
}
