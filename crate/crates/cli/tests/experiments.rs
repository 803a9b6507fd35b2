use shell_compat_cli::{run, Expectation, ResidualReport, RunConfig};

fn config(text: &str) -> RunConfig {
    RunConfig::from_toml(text).unwrap()
}

fn run_toml(text: &str) -> ResidualReport {
    run(&config(text)).unwrap()
}

fn finest(r: &ResidualReport, name: &str) -> f64 {
    r.residual(name).unwrap().norms.last().unwrap().linf
}

fn last_order(r: &ResidualReport, name: &str) -> f64 {
    let s = r.residual(name).unwrap();
    s.orders.as_ref().unwrap().last().unwrap().unwrap()
}

const SPHERE_RIGID: &str = r#"
[run]
experiment = "strain-check"
[surface]
name = "sphere"
[displacement]
kind = "rigid"
translation = [0.0, 0.0, 1.0]
rotation = [0.3, -0.2, 0.1]
"#;

#[test]
fn plane_surface_is_exact() {
    let r = run_toml(
        "[run]\nexperiment = \"surface-check\"\ngrids = [33, 65]\n[surface]\nname = \"plane\"\n",
    );
    assert!(r.passed);
    for name in ["gauss", "codazzi1", "codazzi2"] {
        assert!(r
            .residual(name)
            .unwrap()
            .norms
            .iter()
            .all(|g| g.linf <= 1e-13));
    }
}

#[test]
fn sphere_surface_converges_at_second_order() {
    let r = run_toml("[run]\nexperiment = \"surface-check\"\n[surface]\nname = \"sphere\"\n");
    assert!(r.passed);
    assert_eq!(r.grids, vec![33, 65, 129]);
    for name in ["gauss", "codazzi2"] {
        let o = last_order(&r, name);
        assert!((1.7..=2.3).contains(&o), "{name}: {o}");
    }
}

#[test]
fn scaled_sphere_fails_the_gauss_check() {
    let mut cfg = config("[run]\nexperiment = \"surface-check\"\n[surface]\nname = \"sphere\"\n");
    cfg.run.negative_control = true;
    let r = run(&cfg).unwrap();
    assert!(!r.passed);
    let gauss = r.residual("gauss").unwrap();
    assert_eq!(gauss.pass, Some(false));
    assert!(last_order(&r, "gauss").abs() < 0.5);
    assert!((finest(&r, "gauss") - 0.1).abs() < 0.01);
}

#[test]
fn zero_displacement_gives_zero_residuals() {
    let r = run_toml(
        "[run]\nexperiment = \"strain-check\"\ngrids = [17, 33]\n[surface]\nname = \"catenoid\"\n[displacement]\nkind = \"zero\"\n",
    );
    assert!(r.passed);
    assert!(r
        .residuals
        .iter()
        .all(|s| s.norms.iter().all(|g| g.linf == 0.0)));
}

#[test]
fn rigid_sphere_passes_every_strain_check() {
    let r = run_toml(SPHERE_RIGID);
    assert!(
        r.passed,
        "{:?}",
        r.failures().map(|f| &f.name).collect::<Vec<_>>()
    );
    for name in [
        "eps1",
        "k2",
        "goldenweizer1",
        "goldenweizer_matrix",
        "novozhilov3",
        "cross_form1",
    ] {
        let o = last_order(&r, name);
        assert!(o >= 1.7 || finest(&r, name) <= 1e-12, "{name}: {o}");
    }
}

#[test]
fn injected_strain_fails_compatibility() {
    let mut cfg = config(SPHERE_RIGID);
    cfg.displacement.as_mut().unwrap().inject_eps1 = Some(0.01);
    let r = run(&cfg).unwrap();
    assert!(!r.passed);
    for name in ["goldenweizer1", "goldenweizer_matrix"] {
        assert_eq!(r.residual(name).unwrap().pass, Some(false));
        assert!(last_order(&r, name) < 0.5);
    }
}

#[test]
fn inflation_strains_are_reported_but_not_judged() {
    let r = run_toml(
        "[run]\nexperiment = \"strain-check\"\n[surface]\nname = \"sphere\"\n[displacement]\nkind = \"inflation\"\nc = 0.1\n",
    );
    assert!(r.passed);
    let eps1 = r.residual("eps1").unwrap();
    assert_eq!(eps1.expectation, Expectation::Informational);
    // Uniform inflation w = c of the unit sphere stretches by c.
    assert!((eps1.norms[0].linf - 0.1).abs() < 1e-3);
}

#[test]
fn kink_symmetry_demo_passes() {
    let r =
        run_toml("[run]\nexperiment = \"symmetry-demo\"\n[seed]\nname = \"sg_kink\"\nrho = 1.0\n");
    assert!(r.passed);
    for name in [
        "pde",
        "linearized",
        "gauss",
        "goldenweizer1",
        "goldenweizer_matrix",
    ] {
        let o = last_order(&r, name);
        assert!((1.7..=2.3).contains(&o), "{name}: {o}");
    }
}

#[test]
fn solved_catenoid_symmetry_passes() {
    let r = run_toml(
        "[run]\nexperiment = \"symmetry-demo\"\n[seed]\nname = \"catenoid_log_cosh\"\nsymmetry = \"solve\"\n",
    );
    assert!(r.passed);
    assert!(finest(&r, "linearized") <= 1e-8);
    assert!((1.7..=2.3).contains(&last_order(&r, "symmetry_error")));
    assert!(r.notes.iter().any(|n| n.contains("condition estimate")));
}

#[test]
fn edge_data_symmetry_passes() {
    let r = run_toml(
        "[run]\nexperiment = \"symmetry-demo\"\n[seed]\nname = \"cmc_ode_profile\"\nsymmetry = \"edge\"\n",
    );
    assert!(
        r.passed,
        "{:?}",
        r.failures().map(|f| &f.name).collect::<Vec<_>>()
    );
    assert!(r.residual("symmetry_error").is_none());
}

#[test]
fn constant_is_not_a_kink_symmetry() {
    let r = run_toml(
        "[run]\nexperiment = \"symmetry-demo\"\n[seed]\nname = \"sg_kink\"\nsymmetry = \"constant\"\n",
    );
    assert!(!r.passed);
    assert_eq!(r.residual("linearized").unwrap().pass, Some(false));
    assert_eq!(r.residual("goldenweizer1").unwrap().pass, Some(false));
    assert_eq!(r.residual("pde").unwrap().pass, Some(true));
}

#[test]
fn hyperbolic_seed_cannot_be_solved() {
    let cfg = config(
        "[run]\nexperiment = \"symmetry-demo\"\n[seed]\nname = \"sg_kink\"\nsymmetry = \"solve\"\n",
    );
    let e = run(&cfg).unwrap_err();
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn plane_reconstruction_is_exact() {
    let r = run_toml(
        "[run]\nexperiment = \"reconstruct\"\ngrids = [17, 33]\n[surface]\nname = \"plane\"\n",
    );
    assert!(r.passed);
    assert!(r
        .residuals
        .iter()
        .all(|s| s.norms.iter().all(|g| g.linf <= 1e-13)));
}

#[test]
fn sphere_positions_converge() {
    let r = run_toml("[run]\nexperiment = \"reconstruct\"\n[surface]\nname = \"sphere\"\n");
    assert!(r.passed);
    let pos = r.residual("position_error").unwrap();
    assert!(pos
        .orders
        .as_ref()
        .unwrap()
        .iter()
        .all(|o| o.unwrap() >= 2.0));
}

#[test]
fn gmc_violation_breaks_closure() {
    let r = run_toml(
        "[run]\nexperiment = \"reconstruct\"\n[surface]\nname = \"sphere\"\nhc_scale = 1.1\n",
    );
    assert!(!r.passed);
    assert_eq!(r.residual("closure").unwrap().pass, Some(false));
    assert!(r.residual("position_error").is_none());
}

#[test]
fn convergence_combines_families() {
    let r = run_toml(
        &(SPHERE_RIGID.replace("strain-check", "convergence")
            + "[seed]\nname = \"catenoid_log_cosh\"\n"),
    );
    assert!(r.passed);
    for name in [
        "surface.gauss",
        "reconstruct.closure",
        "strain.goldenweizer1",
        "symmetry.linearized",
    ] {
        assert!(r.residual(name).is_some(), "{name}");
    }
}

#[test]
fn parameter_for_another_surface_is_rejected() {
    let cfg =
        config("[run]\nexperiment = \"surface-check\"\n[surface]\nname = \"plane\"\nrho = 2.0\n");
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
}

#[test]
fn single_grid_orders_are_absent() {
    let r = run_toml(
        "[run]\nexperiment = \"surface-check\"\ngrids = [33]\n[surface]\nname = \"sphere\"\n",
    );
    let gauss = r.residual("gauss").unwrap();
    assert!(gauss.orders.is_none());
    assert_eq!(gauss.pass, None);
    assert!(r.passed);
}

#[test]
fn json_report_has_schema_and_provenance() {
    let r = run_toml(
        "[run]\nexperiment = \"surface-check\"\ngrids = [17, 33]\n[surface]\nname = \"sphere\"\n",
    );
    let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["provenance"]["config"]["surface"]["name"], "sphere");
    assert!(v["provenance"]["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["residuals"][0]["norms"][1]["n"], 33);
}
