use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dtc_core::io::table::read_diagram_csv;

fn dtc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtc"))
        .args(args)
        .env("DTC_OUT_DIR", out)
        .output()
        .expect("spawn dtc")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fig2a_sweep_writes_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = dtc(
        &[
            "sweep",
            "--preset",
            "fig2a",
            "--grid",
            "20x20",
            "--realizations",
            "20",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("fig2a.csv")).unwrap();
    assert_eq!(text.lines().count(), 401);
    let rows = read_diagram_csv(text.as_bytes()).unwrap();
    assert!(rows.iter().all(|r| r.n_realizations == 20));
    assert!(rows
        .iter()
        .all(|r| r.value.is_some_and(|v| (-1.0..=1.0).contains(&v))));
    let svg = fs::read_to_string(dir.path().join("fig2a.svg")).unwrap();
    assert!(svg.contains("<metadata>") && svg.contains("scale_max"));
    let bundle = fs::read_to_string(dir.path().join("fig2a.bundle.toml")).unwrap();
    assert!(bundle.contains("master_seed = 2018"));
}

#[test]
fn rerun_from_echoed_config_is_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = dtc(
        &[
            "sweep",
            "--preset",
            "fig7e",
            "--grid",
            "5x4",
            "--realizations",
            "3",
            "--seed",
            "11",
        ],
        a.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = a.path().join("fig7e.config.toml");
    let o = dtc(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            b.path().to_str().unwrap(),
            "--workers",
            "3",
        ],
        a.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read(a.path().join("fig7e.csv")).unwrap(),
        fs::read(b.path().join("fig7e.csv")).unwrap()
    );
}

#[test]
fn fig12a_trace_alternates_each_period() {
    let dir = tempfile::tempdir().unwrap();
    let o = dtc(
        &["trace", "--preset", "fig12a", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("fig12a.csv")).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["period", "tag", "time", "site", "x", "y", "z", "length"]
    );
    let mut seen = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let period: usize = rec[0].parse().unwrap();
        let z: f64 = rec[6].parse().unwrap();
        if &rec[1] == "post" && period > 0 {
            assert_eq!(z < 0.0, period % 2 == 1, "period {period}: z = {z}");
            seen += 1;
        }
    }
    assert_eq!(seen, 200);
    assert!(!dir.path().join("fig12a.svg").exists());
}

#[test]
fn verify_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = dtc(&["verify"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn purity_cut_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.toml");
    fs::write(
        &cfg,
        r#"
[output]
name = "cut"
format = "both"

[purity]
model = "heisenberg"
realizations = 2
master_seed = 4
ell = 10

[purity.chain]
n_sites = 4
geometry = "open_chain"
j_mean = 0.0
field_mean = [0.0, 0.0, 20000.0]
field_width = [0.0, 0.0, 50.0]

[purity.protocol]
floquet_axis = "x"
floquet_error = 0.0
h2i_count = 16

[purity.initial]
kind = "product_z"
spins = "uuuu"

[purity.x_axis]
param = "epsilon"
values = [0.05, 0.1]

[purity.y_axis]
param = "j_mean"
values = [0.0, 0.8]

[purity.observable]
kind = "bloch_purity"
n_theta = 2
n_chi = 2
"#,
    )
    .unwrap();
    let o = dtc(&["purity", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_diagram_csv(fs::File::open(dir.path().join("cut.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r.value.is_some_and(|v| (0.0..=1.0).contains(&v))));
    assert!(dir.path().join("cut.svg").exists());
}

#[test]
fn schema_errors_exit_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[sweep]\nmodel = \"ising\"\nrealisations = 3\n").unwrap();
    let o = dtc(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(
        msg.contains("line 3") && msg.contains("realisations"),
        "{msg}"
    );
}

#[test]
fn wrong_job_or_preset_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        dtc(&["trace", "--preset", "fig2a"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dtc(&["sweep", "--preset", "nope"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(dtc(&["sweep"], dir.path()).status.code(), Some(2));
    assert_eq!(
        dtc(&["sweep", "--preset", "fig2a", "--grid", "0x3"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn presets_list_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let o = dtc(&["presets"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "fig2a", "fig6a", "fig6e", "fig7a", "fig7e", "fig8d", "fig9a", "fig10d", "fig11a",
        "fig12a", "fig13e", "fig14d",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}
