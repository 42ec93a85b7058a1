use tisr::analysis::{estimate_resonance_dz, locate_avoided_crossing, CrossingOptions};
use tisr::oracle::{
    exact_spectrum, radial_numerov, well_matrix, ExactModel, NumerovOptions, OracleBasis, OracleCutoffs,
    WELL_QUADRATURE_ORDER,
};
use tisr::scattering::StepWell;
use tisr::spectrum::{sweep, SeparationGrid, SweepOptions};

fn well() -> StepWell {
    StepWell::new(36.79, 0.2).unwrap()
}

#[test]
fn zero_separation_matches_radial_integration() {
    let opts = NumerovOptions::default();
    let mut reference: Vec<f64> = (0..3)
        .flat_map(|l| radial_numerov(&well(), l, (-5.0, 4.6), &opts).unwrap())
        .collect();
    reference.sort_by(f64::total_cmp);
    reference.truncate(5);
    let oracle = exact_spectrum(well(), 0.0, OracleCutoffs::default(), 5).unwrap();
    for (o, r) in oracle.iter().zip(&reference) {
        assert!((o - r).abs() < 1e-4, "{oracle:?} vs {reference:?}");
    }
}

#[test]
fn single_trap_dressed_bound_level() {
    let b = radial_numerov(&well(), 0, (-20.0, 0.0), &NumerovOptions::default()).unwrap();
    assert_eq!(b.len(), 1);
    // lies between the free-space bound state and the trap threshold
    let free = well().bound_states()[0].energy;
    assert!(b[0] > free && b[0] < 0.0, "{b:?}");
}

#[test]
fn free_displaced_oscillator() {
    let free = StepWell::new(0.0, 0.2).unwrap();
    let cutoffs = OracleCutoffs::new(20, 40);
    let basis = OracleBasis::new(free, cutoffs).unwrap();
    // m = 0 levels N + 3/2 with multiplicity floor(N/2) + 1
    let expect = [1.5, 2.5, 3.5, 3.5, 4.5, 4.5];
    for dz in [0.0, 1.0, 2.5, 4.0] {
        let lv = basis.levels(dz, 6).unwrap();
        for (a, b) in lv.iter().zip(expect) {
            assert!((a - b).abs() < 1e-6, "dz = {dz}: {lv:?}");
        }
    }
}

#[test]
fn enlarging_cutoffs_never_raises_levels() {
    let small = OracleCutoffs { n_max: 40, l_max: 6, length: 0.5, keep: None };
    let big = OracleCutoffs { n_max: 60, l_max: 9, length: 0.5, keep: None };
    let (s, b) = (OracleBasis::new(well(), small).unwrap(), OracleBasis::new(well(), big).unwrap());
    for dz in [0.0, 1.0, 2.0, 3.0] {
        let (x, y) = (s.levels(dz, 5).unwrap(), b.levels(dz, 5).unwrap());
        for (p, q) in x.iter().zip(&y) {
            assert!(q <= &(p + 1e-10), "dz = {dz}: {x:?} -> {y:?}");
        }
    }
}

#[test]
fn well_integrals_converged_in_quadrature_order() {
    for l in [0, 3] {
        let a = well_matrix(&well(), l, 120, 0.2, WELL_QUADRATURE_ORDER);
        let b = well_matrix(&well(), l, 120, 0.2, WELL_QUADRATURE_ORDER + 80);
        let scale = b.amax();
        assert!((a - b).amax() < 1e-11 * scale.max(1.0));
    }
}

#[test]
fn lowest_crossing_near_estimate() {
    let model = ExactModel::new(well(), OracleCutoffs::default()).unwrap();
    let grid = SeparationGrid::from_range(1.0, 3.0, 0.1).unwrap();
    let r = sweep(&model, &grid, 2, &SweepOptions::fast()).unwrap();
    let c = locate_avoided_crossing(&model, &r, 0, CrossingOptions { dz_tol: 1e-5, gap_tol: 1e-8 }).unwrap();
    let est = estimate_resonance_dz(well().scattering_length().unwrap()).unwrap();
    assert!((c.dz_res - est).abs() < 0.1 * est, "{} vs {est}", c.dz_res);
    let csv = r.to_csv().unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "oracle");
    assert!(row[4].is_empty());
}
