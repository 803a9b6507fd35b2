use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn shellcompat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shellcompat"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const SPHERE: &str = "[run]\nexperiment = \"surface-check\"\n[surface]\nname = \"sphere\"\n";

#[test]
fn exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SPHERE);
    let out = dir.path().join("out").display().to_string();

    let ok = shellcompat(&["--config", &cfg, "--out-dir", &out]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASSED"));

    let fail = shellcompat(&["--config", &cfg, "--out-dir", &out, "--negative-control"]);
    assert_eq!(fail.status.code(), Some(1));

    let bad = write_config(
        dir.path(),
        "[run]\nexperiment = \"surface-check\"\n[surface\n",
    );
    assert_eq!(shellcompat(&["--config", &bad]).status.code(), Some(2));
    assert_eq!(
        shellcompat(&["--config", "/does/not/exist.toml"])
            .status
            .code(),
        Some(2)
    );
    let cfg = write_config(dir.path(), SPHERE);
    assert_eq!(
        shellcompat(&["--config", &cfg, "--grids", "65,33"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn solver_failure_exits_one_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[run]\nexperiment = \"symmetry-demo\"\n[seed]\nname = \"sg_kink\"\nsymmetry = \"solve\"\n",
    );
    let out = shellcompat(&["--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SPHERE);
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        let run = shellcompat(&[
            "--config",
            &cfg,
            "--out-dir",
            out.to_str().unwrap(),
            "--grids",
            "17,33",
        ]);
        assert_eq!(run.status.code(), Some(0));
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        v["provenance"]["wall_time_s"] = 0.into();
        // The echoed config carries the output directory, which differs by design.
        v["provenance"]["config"]["run"]["out_dir"] = "".into();
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn csv_dumps_are_named_by_residual_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SPHERE);
    let out = dir.path().join("out");
    let run = shellcompat(&[
        "--config",
        &cfg,
        "--out-dir",
        out.to_str().unwrap(),
        "--format",
        "csv",
        "--grids",
        "17,33",
    ]);
    assert_eq!(run.status.code(), Some(0));
    for name in [
        "gauss_17.csv",
        "gauss_33.csv",
        "codazzi1_33.csv",
        "codazzi2_17.csv",
    ] {
        assert!(out.join(name).exists(), "{name}");
    }
    assert!(!out.join("report.json").exists());
    let text = fs::read_to_string(out.join("gauss_33.csv")).unwrap();
    assert!(text.lines().count() > 33);
}

#[test]
fn surface_bundle_round_trips_through_the_cli() {
    use shell_compat::CatalogSurface;
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    fs::create_dir_all(&bundle).unwrap();
    let g = CatalogSurface::by_name("catenoid")
        .unwrap()
        .build(33, 33)
        .unwrap();
    for (name, f) in [("a1", &g.a1), ("a2", &g.a2), ("hc", &g.hc), ("kc", &g.kc)] {
        let file = fs::File::create(bundle.join(format!("{name}.csv"))).unwrap();
        f.write_csv(std::io::BufWriter::new(file)).unwrap();
    }
    let cfg = write_config(
        dir.path(),
        &format!(
            "[run]\nexperiment = \"reconstruct\"\ngrids = [33]\n[surface]\ncsv_dir = {:?}\n",
            bundle.display().to_string()
        ),
    );
    let out = dir.path().join("out");
    let run = shellcompat(&["--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stdout)
    );
    let report = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"closure\""));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            shell_compat_cli::RunConfig::load(&path).unwrap();
            count += 1;
        }
    }
    assert!(count >= 5);
}
