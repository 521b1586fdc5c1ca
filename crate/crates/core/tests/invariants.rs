//! Property tests for the multiplier and projection machinery.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use zkb::dyadic::{closed_weights, phi_dyad, project_pn, project_pnm};
use zkb::grid::GridSpec;
use zkb::propagators::{apply_u, apply_w, omega};
use zkb::snapshot;
use zkb::spectral::{to_physical, SpectralField};
use zkb::symmetry::{desymmetrize_onto, symmetrize_data};

fn grid() -> GridSpec {
    GridSpec::new(16, 16, 4.0 * PI, 4.0 * PI).unwrap()
}

/// Real fields from a flat list of coefficient pairs.
fn field_from(vals: &[(f64, f64)]) -> SpectralField {
    let g = grid();
    let mut f = SpectralField::from_coeffs(g, vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap();
    f.symmetrize_hermitian();
    f
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 256)
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    let scale = a.l2_norm().max(b.l2_norm()).max(1e-300);
    a.sub(b).unwrap().l2_norm() / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multipliers_are_linear(a in coeffs(), b in coeffs(), s in -3.0f64..3.0, t in -2.0f64..2.0) {
        let (f, g) = (field_from(&a), field_from(&b));
        let lhs = apply_w(&f.axpy(Complex64::new(s, 0.0), &g).unwrap(), t);
        let rhs = apply_w(&f, t).axpy(Complex64::new(s, 0.0), &apply_w(&g, t)).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn semigroup_composition(a in coeffs(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let f = field_from(&a);
        prop_assert!(rel(&apply_w(&apply_w(&f, s), t), &apply_w(&f, s + t)) < 1e-12);
        prop_assert!(rel(&apply_u(&apply_u(&f, s), -t), &apply_u(&f, s - t)) < 1e-12);
    }

    #[test]
    fn unimodular_flow_is_isometric_and_w_contracts(a in coeffs(), t in -5.0f64..5.0) {
        let f = field_from(&a);
        let n0 = f.l2_norm();
        prop_assert!((apply_u(&f, t).l2_norm() - n0).abs() <= 1e-12 * n0);
        prop_assert!(apply_w(&f, t).l2_norm() <= n0 * (1.0 + 1e-14));
    }

    #[test]
    fn flows_keep_band_limited_fields_real(a in coeffs(), t in -3.0f64..3.0) {
        // Nyquist modes are their own partners and Ω is odd, so only
        // dealiased fields stay exactly real
        let f = field_from(&a).dealias();
        prop_assert!(apply_w(&f, t).hermitian_defect() < 1e-13);
    }

    #[test]
    fn plancherel(a in coeffs()) {
        let f = field_from(&a);
        let g = *f.grid();
        let u = to_physical(&f).unwrap();
        let phys = (u.iter().map(|x| x * x).sum::<f64>() * g.cell_area()).sqrt();
        prop_assert!((phys - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn littlewood_paley_pieces_are_bounded(a in coeffs(), n in -3i32..6, m in -3i32..6) {
        let f = field_from(&a);
        let n0 = f.l2_norm() * (1.0 + 1e-14);
        prop_assert!(project_pn(&f, n).l2_norm() <= n0);
        prop_assert!(project_pnm(&f, n, m).l2_norm() <= n0);
        // pieces are orthogonal up to the overlap of neighbouring shells
        let far = project_pn(&f, n).sub(&project_pn(&project_pn(&f, n), n + 2)).unwrap();
        prop_assert!(rel(&far, &project_pn(&f, n)) < 1e-14);
    }

    #[test]
    fn partition_of_unity(t in 1e-3f64..1e4, floor in -6i32..0) {
        let sum: f64 = (-14..20).map(|e| phi_dyad(t, e)).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        let (pairs, count) = closed_weights(t, floor);
        let closed: f64 = pairs[..count].iter().map(|p| p.1).sum();
        prop_assert!((closed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn omega_is_odd(xi in -50.0f64..50.0, eta in -50.0f64..50.0) {
        prop_assert_eq!(omega(-xi, -eta), -omega(xi, eta));
    }

    #[test]
    fn snapshot_round_trip(a in coeffs()) {
        let f = field_from(&a);
        let back = snapshot::decode(&snapshot::encode(&f)).unwrap();
        prop_assert_eq!(back.coeffs(), f.coeffs());
        prop_assert_eq!(back.grid(), f.grid());
    }

    #[test]
    fn symmetrize_round_trip(a in coeffs()) {
        let ug = GridSpec::new(16, 16, 8.0 * PI, 8.0 * PI / 3f64.sqrt()).unwrap();
        let f = SpectralField::from_coeffs(ug, field_from(&a).into_coeffs()).unwrap();
        let v = symmetrize_data(&f).unwrap();
        let back = desymmetrize_onto(&v, ug).unwrap();
        prop_assert!(rel(&back, &f) < 1e-13);
    }
}
