use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slicelab::{Quaternion, SliceLaurentSeries};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_slicelab"));
    for var in [
        "SLICELAB_MAX_DEGREE",
        "SLICELAB_TOL",
        "SLICELAB_GRID_T",
        "SLICELAB_GRID_SPHERE",
        "SLICELAB_DEPTH",
        "SLICELAB_SEED",
    ] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, f: &SliceLaurentSeries) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, f.to_json()).unwrap();
    p
}

fn read(p: &Path) -> SliceLaurentSeries {
    SliceLaurentSeries::from_json(&fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn poly(c: &[f64]) -> SliceLaurentSeries {
    SliceLaurentSeries::new(0, c.iter().map(|&x| Quaternion::real(x)).collect())
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn star_of_monomials() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &SliceLaurentSeries::monomial(1, Quaternion::I));
    let b = write(&dir, "b.json", &SliceLaurentSeries::monomial(1, Quaternion::J));
    let out = dir.path().join("ab.json");
    let o = run(&["star", s(&a), s(&b), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read(&out), SliceLaurentSeries::monomial(2, Quaternion::K));
}

#[test]
fn star_with_inverse_is_one() {
    let dir = TempDir::new().unwrap();
    let f = SliceLaurentSeries::new(0, vec![Quaternion::new(1.0, 0.2, 0.0, -0.1), Quaternion::new(0.0, 0.3, 0.4, 0.0)]);
    let fp = write(&dir, "f.json", &f);
    let inv = dir.path().join("inv.json");
    assert_eq!(run(&["inv", s(&fp), "--order", "80", "-o", s(&inv)]).status.code(), Some(0));
    let prod = dir.path().join("prod.json");
    assert_eq!(run(&["star", s(&fp), s(&inv), "-o", s(&prod)]).status.code(), Some(0));
    let r = read(&prod).restrict(slicelab::Support::new(0, 80));
    assert!(r.max_coeff_distance(&SliceLaurentSeries::one()) < 1e-8);
}

#[test]
fn overflow_exits_three_and_names_the_limit() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &SliceLaurentSeries::monomial(6, Quaternion::ONE));
    let o = run(&["star", s(&a), s(&a), "--max-degree", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("max_degree 10"), "{}", stderr(&o));
}

#[test]
fn parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n_min\": 0}").unwrap();
    assert_eq!(run(&["conj", s(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["conj", "/nonexistent/f.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "unknown"]).status.code(), Some(2));
    assert_eq!(run(&["--tol", "0.5", "verify", "algebra"]).status.code(), Some(2));
}

#[test]
fn factor_splits_off_the_shift() {
    let dir = TempDir::new().unwrap();
    let h = poly(&[1.0, 0.5]);
    let f = SliceLaurentSeries::monomial(1, Quaternion::ONE).star(&h).unwrap();
    let fp = write(&dir, "f.json", &f);
    let rep = dir.path().join("rep.json");
    let o = run(&["factor", s(&fp), "-o", s(&rep)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    let phi: SliceLaurentSeries = serde_json::from_value(v["phi"].clone()).unwrap();
    let g: SliceLaurentSeries = serde_json::from_value(v["g"].clone()).unwrap();
    assert!(phi.max_coeff_distance(&SliceLaurentSeries::monomial(1, Quaternion::ONE)) < 1e-8);
    assert!(g.max_coeff_distance(&h) < 1e-8);
    for key in ["reconstruction", "unimodularity", "cyclicity"] {
        assert!(v["residuals"][key].as_f64().unwrap() < 1e-8);
    }
    assert_eq!(v["max_degree"], 256);
    assert!(v["depth"].as_u64().is_some());
}

#[test]
fn factor_of_cyclic_input_has_trivial_inner_part() {
    let dir = TempDir::new().unwrap();
    let fp = write(&dir, "h.json", &poly(&[1.0, 0.5]));
    let o = run(&["factor", s(&fp)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let phi: SliceLaurentSeries = serde_json::from_value(v["phi"].clone()).unwrap();
    assert!(phi.max_coeff_distance(&SliceLaurentSeries::one()) < 1e-8);
}

#[test]
fn factor_rejects_negative_support() {
    let dir = TempDir::new().unwrap();
    let fp = write(&dir, "f.json", &SliceLaurentSeries::new(-1, vec![Quaternion::ONE, Quaternion::ONE]));
    let o = run(&["factor", s(&fp)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not in H²"));
}

#[test]
fn shallow_factorization_exits_four_and_still_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let fp = write(&dir, "f.json", &poly(&[-0.5, 1.0]));
    let rep = dir.path().join("rep.json");
    let o = run(&["factor", s(&fp), "--depth", "4", "-o", s(&rep)]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(v["residuals"]["unimodularity"].as_f64().unwrap() > 1e-6);
    assert_eq!(v["depth"], 4);
}

#[test]
fn negligible_generator_is_doubly_invariant() {
    let dir = TempDir::new().unwrap();
    let fp = write(&dir, "g.json", &SliceLaurentSeries::monomial(1, Quaternion::real(1e-10)));
    assert_eq!(run(&["wander", s(&fp)]).status.code(), Some(5));
    assert_eq!(run(&["factor", s(&fp)]).status.code(), Some(5));
}

#[test]
fn wander_and_cyclic() {
    let dir = TempDir::new().unwrap();
    let u = Quaternion::new(0.5, 0.5, -0.5, 0.5);
    let gp = write(&dir, "g.json", &SliceLaurentSeries::monomial(2, u));
    let o = run(&["wander", s(&gp), "--depth", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let phi = SliceLaurentSeries::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(phi.max_coeff_distance(&SliceLaurentSeries::monomial(2, Quaternion::ONE)) < 1e-12);

    let hp = write(&dir, "h.json", &poly(&[1.0, 0.5]));
    let v: serde_json::Value = serde_json::from_slice(&run(&["cyclic", s(&hp)]).stdout).unwrap();
    assert_eq!(v["verdict"], "cyclic");
    let v: serde_json::Value = serde_json::from_slice(&run(&["cyclic", s(&gp)]).stdout).unwrap();
    assert_eq!(v["verdict"], "non-cyclic");
    assert!((v["residual"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn eval_and_conj_and_sym() {
    let dir = TempDir::new().unwrap();
    let fp = write(&dir, "f.json", &SliceLaurentSeries::new(0, vec![Quaternion::I, Quaternion::ONE]));
    let o = run(&["eval", s(&fp), "--at", "0,0,1,0"]);
    let v: Quaternion = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, Quaternion::new(0.0, 1.0, 1.0, 0.0));

    let o = run(&["conj", s(&fp)]);
    let c = SliceLaurentSeries::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(c, SliceLaurentSeries::new(0, vec![-Quaternion::I, Quaternion::ONE]));

    let o = run(&["sym", s(&fp)]);
    let sym = SliceLaurentSeries::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let f = read(&fp);
    assert!(sym.max_coeff_distance(&f.symmetrize().unwrap()) < 1e-15);
}

fn abs_column(csv: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,Ix,Iy,Iz,fw,fx,fy,fz,abs"));
    lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect()
}

#[test]
fn trace_columns_and_values() {
    let dir = TempDir::new().unwrap();
    let one = write(&dir, "one.json", &SliceLaurentSeries::one());
    let o = run(&["trace", s(&one), "--grid", "4x6"]);
    assert_eq!(o.status.code(), Some(0));
    let abs = abs_column(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(abs.len(), 24);
    assert!(abs.iter().all(|&a| a == 1.0));

    let b = slicelab::subspaces::blaschke_factor(Quaternion::new(0.0, 0.3, 0.2, 0.0), 128).unwrap();
    let bp = write(&dir, "b.json", &b);
    let o = run(&["trace", s(&bp), "--grid-t", "16", "--grid-sphere", "16"]);
    assert!(abs_column(std::str::from_utf8(&o.stdout).unwrap()).iter().all(|a| (a - 1.0).abs() < 1e-6));
}

#[test]
fn idempotent_build_verify_and_trace() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"intervals":[{"t0":0.0,"t1":3.141592653589793,"tag":"pair","J":[0,0,-1],"K":[0,0,1]}],"real_points":{"+1":1,"-1":0}}"#,
    )
    .unwrap();
    let ell = dir.path().join("ell.json");
    let o = run(&["idem-build", s(&spec), "--grid-t", "32", "-o", s(&ell)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = run(&["idem-verify", s(&ell), "--grid-t", "32", "--grid-sphere", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["residual"].as_f64().unwrap() < 1e-8);

    let q = write(&dir, "q.json", &SliceLaurentSeries::monomial(1, Quaternion::ONE));
    assert_eq!(run(&["idem-verify", s(&q), "--grid-t", "8", "--grid-sphere", "8"]).status.code(), Some(4));

    let o = run(&["trace", s(&ell), "--grid-t", "32", "--grid-sphere", "256"]);
    let abs = abs_column(std::str::from_utf8(&o.stdout).unwrap());
    let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().cloned().fold(0.0, f64::max);
    assert!(lo >= 0.0 && hi <= 1.0 + 1e-9, "{lo} {hi}");
    assert!(lo < 0.1 && hi > 0.99, "{lo} {hi}");
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "algebra"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("star associativity") && table.contains("PASS") && !table.contains("FAIL"));

    let o = run(&["verify", "idempotent", "--grid-t", "32", "--grid-sphere", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().contains("spherical indicator"));
}

#[test]
fn failing_verification_exits_six() {
    // a depth of 2 is far too shallow to factor through a Blaschke zero
    let o = run(&["verify", "factorization", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(6));
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn environment_fallbacks_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &SliceLaurentSeries::monomial(6, Quaternion::ONE));
    let o = bin().args(["star", s(&a), s(&a)]).env("SLICELAB_MAX_DEGREE", "10").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = bin().args(["star", s(&a), s(&a), "--max-degree", "20"]).env("SLICELAB_MAX_DEGREE", "10").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let f = SliceLaurentSeries::new(0, vec![Quaternion::new(1.0, 0.1, 0.2, 0.3), Quaternion::new(-0.2, 0.0, 0.4, 0.1)]);
    let fp = write(&dir, "f.json", &f);
    for args in [
        vec!["factor", s(&fp)],
        vec!["trace", s(&fp), "--grid", "8x8"],
        vec!["inv", s(&fp), "--order", "20"],
        vec!["verify", "adjoint", "--seed", "7"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
