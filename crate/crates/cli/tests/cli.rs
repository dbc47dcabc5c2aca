use std::path::Path;
use std::process::{Command, Output};

use mimo_duel_cli::table::CurveTable;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mimo-duel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: &Path) -> CurveTable {
    CurveTable::read_csv(path).unwrap()
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "# comment\nC = 9\nantennae = 4\n").unwrap();
    let o = run(&["simulate", "--preset", "table1", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("antennae"));
}

#[test]
fn k_above_m_exits_2_naming_k() {
    let o = run(&["simulate", "--set", "K=7", "--set", "M=5", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("`K`"), "{}", stderr(&o));
}

#[test]
fn non_numeric_value_exits_2() {
    let o = run(&["simulate", "--set", "alpha=steep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha"));
}

#[test]
fn unknown_figure_exits_2() {
    let o = run(&["figure", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = run(&["simulate", "--trials", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["simulate", "--trials", "40", "--seed", "11", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let x = std::fs::read(a.path().join("simulate.csv")).unwrap();
    let y = std::fs::read(b.path().join("simulate.csv")).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let t = read(&a.path().join("simulate.csv"));
    assert!(t.series("lsm_zf_dof9_signal_ccdf").is_some());
    assert!(t.series("nm_zf_dof9_interference_ccdf").is_some());
    assert_eq!(t.meta["seed"], "11");
}

#[test]
fn fig5_has_four_empirical_and_two_identical_analytic_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure", "fig5", "--trials", "300", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = read(&dir.path().join("fig5.csv"));
    let names: Vec<&str> = t.series.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        ["lsm_zf_dof9", "nm_zf_dof9", "lsm_beamlaw_dof9", "nm_beamlaw_dof9", "lsm_approx_dof9", "nm_approx_dof9"]
    );
    assert_eq!(t.series("lsm_approx_dof9"), t.series("nm_approx_dof9"));
    for (_, v) in &t.series {
        assert!(v.iter().all(|p| (0.0..=1.0).contains(p)));
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
    assert!(t.x.windows(2).all(|w| w[0] < w[1]));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig5_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["laws_identical"], serde_json::Value::Bool(true));
}

#[test]
fn fig7_has_rzf_series_for_both_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure", "fig7", "--trials", "2", "--set", "slots=12", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = read(&dir.path().join("fig7.csv"));
    for s in ["lsm_zf_dof9", "lsm_rzf_dof9", "nm_zf_dof9", "nm_rzf_dof9"] {
        let v = t.series(s).unwrap_or_else(|| panic!("missing {s}"));
        assert!(v.windows(2).all(|w| w[0] <= w[1]) && *v.last().unwrap() > 0.9 && *v.last().unwrap() <= 1.0);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig7_summary.json")).unwrap()).unwrap();
    assert!(summary["summary"]["lsm_rzf_dof9"]["p10"].is_number());
}
