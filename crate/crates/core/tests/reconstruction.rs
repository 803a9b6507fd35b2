mod common;

use common::*;
use nalgebra::Vector3;
use shell_compat::frames::*;
use shell_compat::surface::gmc_residuals;

const GRIDS: [usize; 3] = [33, 65, 129];

#[test]
fn sphere_positions_converge_to_chart() {
    let errs: Vec<f64> = GRIDS
        .iter()
        .map(|&n| {
            let g = surface("sphere", n);
            let (exact_frames, exact_r) = analytic_frames(&g).unwrap();
            let out = integrate_frames(&g, exact_frames.at(0, 0)).unwrap();
            let r = reconstruct_positions(&g, &out.frames, exact_r.at(0, 0)).unwrap();
            let diff = r.zip_map(&exact_r, |a, b| a - b).norm();
            diff.max_abs()
        })
        .collect();
    assert!(orders(&errs).iter().all(|o| *o >= 2.0), "{errs:?}");
}

#[test]
fn closure_converges_only_when_gmc_holds() {
    let good: Vec<f64> = GRIDS
        .iter()
        .map(|&n| {
            integrate_frames(&surface("sphere", n), Frame3::identity())
                .unwrap()
                .closure
                .max_abs()
        })
        .collect();
    assert!(good[2] < 1e-6, "{good:?}");

    let bad: Vec<f64> = GRIDS
        .iter()
        .map(|&n| {
            let g = surface("sphere", n).with_scaled_hc(1.1);
            integrate_frames(&g, Frame3::identity())
                .unwrap()
                .closure
                .max_abs()
        })
        .collect();
    assert!(bad.iter().all(|c| *c > 1e-2), "{bad:?}");
    assert!(orders(&bad).iter().all(|o| *o < 0.5), "{bad:?}");
}

#[test]
fn scaled_normal_stalls_the_gauss_residual() {
    let errs: Vec<f64> = GRIDS
        .iter()
        .map(|&n| {
            linf(
                &gmc_residuals(&surface("sphere", n).with_scaled_hc(1.1)).gauss,
                2,
            )
        })
        .collect();
    assert!(orders(&errs).iter().all(|o| *o < 0.5), "{errs:?}");
    assert!((errs[2] - 0.1).abs() < 5e-3, "{errs:?}");
}

#[test]
fn integrated_frames_reproduce_weingarten_relations() {
    for name in ["catenoid", "pseudosphere_kink", "cmc_profile"] {
        let errs: Vec<f64> = GRIDS
            .iter()
            .map(|&n| {
                let g = surface(name, n);
                let phi0 = initial_frame(&g).unwrap_or_else(Frame3::identity);
                let out = integrate_frames(&g, phi0).unwrap();
                let r = reconstruct_positions(&g, &out.frames, Vector3::zeros()).unwrap();
                let (w1, w2) = weingarten_residual(&g, &out.frames, &r).unwrap();
                linf(&w1, 1).max(linf(&w2, 1))
            })
            .collect();
        assert!(at_least_second_order(&errs), "{name}: {errs:?}");
    }
}

#[test]
fn frames_and_positions_write_csv() {
    let g = surface("sphere", 5);
    let (frames, r) = analytic_frames(&g).unwrap();
    let mut buf = Vec::new();
    frames.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("alpha,beta,e1x,"));
    assert_eq!(text.lines().count(), 26);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap().lines().next(),
        Some("alpha,beta,x,y,z")
    );
}
