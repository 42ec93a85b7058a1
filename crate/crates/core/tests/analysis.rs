use std::f64::consts::PI;

use tisr::analysis::{
    estimate_resonance_dz, gate_phase_time, locate_avoided_crossing, perturbative_shift, variational_gap,
    variational_gap_for, variational_gap_minimum, CrossingOptions,
};
use tisr::numerics::quadrature::integrate_half_line;
use tisr::spectrum::{spectrum_sweep, FixedA, LevelModel, SeparationGrid, SweepOptions};
use tisr::trap_basis::{busch_energies, BasisSpec};
use tisr::Error;

#[test]
fn estimate_decreases_with_length() {
    let mut prev = f64::INFINITY;
    for i in 1..200 {
        let a = 0.05 * i as f64;
        let d = estimate_resonance_dz(a).unwrap();
        assert!(d < prev);
        prev = d;
    }
}

#[test]
fn no_crossing_for_negative_length() {
    let grid = SeparationGrid::from_range(0.0, 3.0, 0.05).unwrap();
    let model = FixedA::from_length(-0.5, BasisSpec::default()).unwrap();
    let r = tisr::spectrum::sweep(&model, &grid, 2, &SweepOptions::fast()).unwrap();
    assert!(r.energies(1).iter().all(|&e| e < 3.0));
    match locate_avoided_crossing(&model, &r, 0, CrossingOptions::default()) {
        Err(Error::NoCrossing { lower: 0, upper: 1 }) => {}
        other => panic!("expected no crossing, got {other:?}"),
    }
}

#[test]
fn location_stable_under_grid_refinement() {
    let model = FixedA::from_length(1.0, BasisSpec::default()).unwrap();
    let coarse = SeparationGrid::from_range(0.0, 3.5, 0.1).unwrap();
    let fine = SeparationGrid::from_range(0.0, 3.5, 0.05).unwrap();
    let opts = CrossingOptions::default();
    let a = locate_avoided_crossing(&model, &tisr::spectrum::sweep(&model, &coarse, 2, &SweepOptions::fast()).unwrap(), 0, opts)
        .unwrap();
    let b = locate_avoided_crossing(&model, &tisr::spectrum::sweep(&model, &fine, 2, &SweepOptions::fast()).unwrap(), 0, opts)
        .unwrap();
    assert!((a.dz_res - b.dz_res).abs() < 1e-6, "{a:?} {b:?}");
    assert!((a.gap - b.gap).abs() < 1e-8, "{a:?} {b:?}");
    assert!(a.curvature > 0.0);
}

#[test]
fn variational_levels_bound_exact_levels() {
    let model = FixedA::from_length(0.5, BasisSpec::shells(30)).unwrap();
    for dz in [1.0, 2.0, 3.0] {
        let v = variational_gap(0.5, dz).unwrap();
        let e = model.levels(dz, 2).unwrap();
        assert!(v.lower >= e[0].energy - 1e-9, "dz = {dz}: {v:?} vs {}", e[0].energy);
        assert!(v.upper >= e[1].energy - 1e-9, "dz = {dz}: {v:?} vs {}", e[1].energy);
    }
}

#[test]
fn variational_minimum_near_estimate() {
    let v = variational_gap_minimum(0.5, 0.5, 5.0, 1e-6).unwrap();
    let est = estimate_resonance_dz(0.5).unwrap();
    assert!((v.dz - est).abs() < 0.15 * est, "{} vs {est}", v.dz);
}

#[test]
fn variational_gap_grows_with_length() {
    let mut prev = 0.0;
    for i in 0..=9 {
        let a = 0.2 + 0.2 * i as f64;
        let est = estimate_resonance_dz(a).unwrap();
        let g = variational_gap_minimum(a, 0.5 * est, 1.5 * est, 1e-6).unwrap().gap;
        assert!(g > prev, "a = {a}: {g} after {prev}");
        prev = g;
    }
}

#[test]
fn variational_levels_decouple_far_apart() {
    let eb = busch_energies(2.0, 1).unwrap()[0].energy;
    let dz = 8.0;
    let v = variational_gap(0.5, dz).unwrap();
    assert!((v.lower - 1.5).abs() < 1e-8, "{v:?}");
    assert!((v.upper - (eb + 0.5 * dz * dz)).abs() < 1e-8, "{v:?}");
    assert!((v.gap - (eb + 0.5 * dz * dz - 1.5)).abs() < 1e-8);
}

#[test]
fn identical_trial_states_are_flagged() {
    let ground = busch_energies(f64::INFINITY, 1).unwrap()[0];
    match variational_gap_for(&ground, 0.0) {
        Err(Error::SingularOverlap(det)) => assert!(det.abs() < 1e-9),
        other => panic!("expected singular overlap, got {other:?}"),
    }
}

#[test]
fn first_order_shift_from_quadrature() {
    // |phi_0(0)|^2 of the displaced Gaussian via its numerically integrated norm
    let dz: f64 = 0.0;
    let norm = 4.0 * PI * integrate_half_line(|r| r * r * (-r * r).exp(), 0.0).unwrap();
    let oracle = 2.0 * PI * 0.5 * (-dz * dz).exp() / norm;
    assert!((perturbative_shift(0.5, dz) - oracle).abs() < 1e-10);
    assert!((perturbative_shift(0.5, 0.0) - 0.56419).abs() < 1e-5);
    assert!(perturbative_shift(0.5, 30.0).abs() < 1e-300);
}

#[test]
fn first_order_shift_in_weak_coupling() {
    let dz = 3.0;
    for a in [0.01, -0.01] {
        let model = FixedA::from_length(a, BasisSpec::shells(30)).unwrap();
        // for a > 0 the deep bound state sits below the trap-like branch
        let branch = if a > 0.0 { 1 } else { 0 };
        let shift = model.levels(dz, 2).unwrap()[branch].energy - 1.5;
        let first = perturbative_shift(a, dz);
        assert!((shift - first).abs() < 0.1 * first.abs(), "a = {a}: {shift} vs {first}");
    }
    for a in [0.5, -0.5] {
        let model = FixedA::from_length(a, BasisSpec::shells(30)).unwrap();
        let lv = model.levels(dz, 2).unwrap();
        println!("a = {a}: first order {:.4e}, levels - 1.5 = {:.4e}, {:.4e}", perturbative_shift(a, dz), lv[0].energy - 1.5, lv[1].energy - 1.5);
    }
}

#[test]
fn gate_time_from_two_level_evolution() {
    let gap = 0.5640;
    let timing = gate_phase_time(gap).unwrap();
    // i d/dt (c1, c2) = (gap / 2) sigma_x (c1, c2), RK4 until the trap amplitude returns
    let h = 1e-4;
    let (mut t, mut c) = (0.0, [(1.0_f64, 0.0_f64), (0.0_f64, 0.0_f64)]);
    let rhs = |c: [(f64, f64); 2]| {
        let w = 0.5 * gap;
        // -i w (c2, c1)
        [(w * c[1].1, -w * c[1].0), (w * c[0].1, -w * c[0].0)]
    };
    let add = |c: [(f64, f64); 2], k: [(f64, f64); 2], s: f64| {
        [(c[0].0 + s * k[0].0, c[0].1 + s * k[0].1), (c[1].0 + s * k[1].0, c[1].1 + s * k[1].1)]
    };
    let mut left = false;
    let mut prev_pop: f64 = 1.0;
    loop {
        let k1 = rhs(c);
        let k2 = rhs(add(c, k1, 0.5 * h));
        let k3 = rhs(add(c, k2, 0.5 * h));
        let k4 = rhs(add(c, k3, h));
        for i in 0..2 {
            c[i].0 += h / 6.0 * (k1[i].0 + 2.0 * k2[i].0 + 2.0 * k3[i].0 + k4[i].0);
            c[i].1 += h / 6.0 * (k1[i].1 + 2.0 * k2[i].1 + 2.0 * k3[i].1 + k4[i].1);
        }
        t += h;
        let pop = c[0].0 * c[0].0 + c[0].1 * c[0].1;
        if pop < 0.5 {
            left = true;
        }
        if left && pop < prev_pop && prev_pop > 0.999_999 {
            break;
        }
        prev_pop = pop;
    }
    assert!((t - timing.period).abs() < 1e-3, "{t} vs {}", timing.period);
    assert!((timing.period - 11.141).abs() < 1e-3);
    // amplitude -1: phase pi
    assert!((c[0].0 + 1.0).abs() < 1e-6 && c[0].1.abs() < 1e-3);
    assert_eq!(timing.phase, PI);
}

#[test]
fn resonance_table_row() {
    let grid = SeparationGrid::from_range(0.0, 3.5, 0.05).unwrap();
    let r = spectrum_sweep(1.0, &grid, BasisSpec::default(), 2, &SweepOptions::fast()).unwrap();
    let model = FixedA::from_length(1.0, BasisSpec::default()).unwrap();
    let c = locate_avoided_crossing(&model, &r, 0, CrossingOptions::default()).unwrap();
    let est = estimate_resonance_dz(1.0).unwrap();
    assert!((c.dz_res - est).abs() < 0.1 * est);
    let row = tisr::analysis::ResonanceRow {
        a: 1.0,
        dz_res_estimate: est,
        dz_res_located: c.dz_res,
        gap: c.gap,
        gap_variational: variational_gap_minimum(1.0, 0.5, 5.0, 1e-6).unwrap().gap,
    };
    assert_eq!(row.csv_row()[0], "1");
    assert_eq!(row.csv_row()[1], "2");
}
