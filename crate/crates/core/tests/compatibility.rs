mod common;

use common::*;
use shell_compat::strain::*;
use shell_compat::{ScalarField, SurfaceGeometry};

const GRIDS: [usize; 3] = [33, 65, 129];

fn rigid_state(name: &str, n: usize) -> (SurfaceGeometry, DisplacementStrains) {
    let g = surface(name, n);
    let d = rigid(&g);
    let s = full_strain_state(&g, &d).unwrap();
    (g, s)
}

fn inflation_state(name: &str, n: usize) -> (SurfaceGeometry, StrainState) {
    let g = surface(name, n);
    // Non-uniform normal displacement so every strain is nontrivial.
    let w = ScalarField::from_fn(*g.grid(), |a, b| 0.05 * (1.0 + 0.5 * a.sin() * b.cos()));
    let d = DisplacementField::new(
        ScalarField::zeros(*g.grid()),
        ScalarField::zeros(*g.grid()),
        w,
    )
    .unwrap();
    let s = full_strain_state(&g, &d).unwrap().state;
    (g, s)
}

#[test]
fn rigid_motion_is_strain_free_on_curved_surfaces() {
    for name in ["sphere", "catenoid", "cmc_profile"] {
        let per_grid: Vec<Vec<f64>> = GRIDS
            .iter()
            .map(|&n| {
                let (_, s) = rigid_state(name, n);
                s.state
                    .six_strains()
                    .iter()
                    .enumerate()
                    .map(|(k, (_, f))| linf(f, if k < 3 { 1 } else { 2 }))
                    .collect()
            })
            .collect();
        for k in 0..6 {
            let errs: Vec<f64> = per_grid.iter().map(|v| v[k]).collect();
            assert!(at_least_second_order(&errs), "{name} strain {k}: {errs:?}");
        }
    }
}

#[test]
fn rigid_motion_satisfies_compatibility() {
    for name in ["sphere", "catenoid", "cmc_profile"] {
        let mut gw = vec![];
        let mut mat = vec![];
        let mut nv = vec![];
        let mut tc = vec![];
        let mut tau = vec![];
        for &n in &GRIDS {
            let (g, s) = rigid_state(name, n);
            let fmax = |r: &CompatibilityResiduals, t| {
                r.fields().iter().map(|f| linf(f, t)).fold(0.0, f64::max)
            };
            gw.push(fmax(&goldenweizer_residuals(&g, &s.state), 3));
            mat.push(linf(&goldenweizer_matrix_residual(&g, &s.state), 3));
            nv.push(fmax(&novozhilov_residuals(&g, &s.state), 3));
            tc.push(fmax(&tangential_compat_residuals(&g, &s.state), 2));
            tau.push(linf(&s.tau_mismatch, 2));
        }
        for (label, errs) in [
            ("goldenweizer", &gw),
            ("matrix", &mat),
            ("novozhilov", &nv),
            ("tangential", &tc),
            ("tau", &tau),
        ] {
            assert!(at_least_second_order(errs), "{name} {label}: {errs:?}");
        }
    }
}

#[test]
fn lm_prime_forms_agree() {
    let errs: Vec<f64> = GRIDS
        .iter()
        .map(|&n| {
            let (g, s) = rigid_state("sphere", n);
            linf(&lm_prime_difference(&g, &s.state), 2)
        })
        .collect();
    assert!(errs[1] <= 1e-3, "rigid: {errs:?}");
    assert!(second_order(&errs), "rigid: {errs:?}");
    let errs: Vec<f64> = GRIDS
        .iter()
        .map(|&n| {
            let (g, s) = inflation_state("sphere", n);
            linf(&lm_prime_difference(&g, &s), 2)
        })
        .collect();
    assert!(errs[1] <= 1e-3, "inflation: {errs:?}");
    assert!(second_order(&errs), "inflation: {errs:?}");
}

#[test]
fn novozhilov_and_goldenweizer_forms_agree() {
    for (name, grids) in [
        ("sphere", [33, 65, 129]),
        ("catenoid", [33, 65, 129]),
        ("cmc_profile", [33, 65, 129]),
        // A₂ = sech x is small at x = −3, so the kink needs finer grids to
        // reach the asymptotic regime.
        ("pseudosphere_kink", [129, 257, 513]),
    ] {
        let errs: Vec<f64> = grids
            .iter()
            .map(|&n| {
                let (g, s) = inflation_state(name, n);
                cross_form_difference(&g, &s)
                    .fields()
                    .iter()
                    .map(|f| linf(f, 3))
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(at_least_second_order(&errs), "{name}: {errs:?}");
    }
}

#[test]
fn perturbed_normal_strain_breaks_compatibility() {
    let per_grid: Vec<(f64, f64)> = GRIDS
        .iter()
        .map(|&n| {
            let g = surface("sphere", n);
            let d = rigid(&g);
            let s = strains_from_displacement(&g, &d).unwrap();
            let (mut s, _) = bending_strains(&g, s).unwrap();
            s.eps1 = &s.eps1 + &ScalarField::from_fn(*g.grid(), |a, _| 0.01 * a.sin());
            let (s, _) = pq_deformed(&g, s).unwrap();
            let gw = goldenweizer_residuals(&g, &s)
                .fields()
                .iter()
                .map(|f| linf(f, 3))
                .fold(0.0, f64::max);
            (gw, linf(&goldenweizer_matrix_residual(&g, &s), 3))
        })
        .collect();
    let gw: Vec<f64> = per_grid.iter().map(|p| p.0).collect();
    let mat: Vec<f64> = per_grid.iter().map(|p| p.1).collect();
    for errs in [&gw, &mat] {
        assert!(orders(errs).iter().all(|o| *o < 0.5), "{errs:?}");
        assert!(errs[2] > 1e-3);
    }
}

#[test]
fn deformed_tangents_match_strains() {
    // The tangent relation is exact and linear in Δ, so the excess over the
    // FD floor of r alone scales with the displacement and with h².
    let excess = |n: usize, eps: f64| {
        let g = surface("sphere", n);
        let (frames, r) = frames_and_positions(&g);
        let d = rigid(&g).scaled(eps);
        let zero = DisplacementField::zeros(*g.grid());
        let (c1, c2) = deformation_consistency(&g, &frames, &r, &d).unwrap();
        let (f1, f2) = deformation_consistency(&g, &frames, &r, &zero).unwrap();
        linf(&(&c1 - &f1).abs(), 0).max(linf(&(&c2 - &f2).abs(), 0))
    };
    let errs: Vec<f64> = GRIDS.iter().map(|&n| excess(n, 0.1)).collect();
    assert!(at_least_second_order(&errs), "{errs:?}");
    let ratio = excess(65, 0.1) / excess(65, 0.01);
    assert!((5.0..=15.0).contains(&ratio), "{ratio}");

    let floor: Vec<f64> = GRIDS
        .iter()
        .map(|&n| {
            let g = surface("sphere", n);
            let (frames, r) = frames_and_positions(&g);
            let (c1, c2) =
                deformation_consistency(&g, &frames, &r, &DisplacementField::zeros(*g.grid()))
                    .unwrap();
            linf(&c1, 0).max(linf(&c2, 0))
        })
        .collect();
    assert!(second_order(&floor), "{floor:?}");
}

#[test]
fn grid_mismatch_is_rejected() {
    let g = surface("sphere", 17);
    let d = DisplacementField::zeros(*surface("sphere", 9).grid());
    assert!(full_strain_state(&g, &d).is_err());
}
