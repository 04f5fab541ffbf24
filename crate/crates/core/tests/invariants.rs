use std::f64::consts::{FRAC_PI_4, SQRT_2};

use bellforge::lhv::enumerate_lhv_with;
use bellforge::quantum::{chi_curve_t, global_quantum_range_with, singlet_curve_t, theta_grid};
use bellforge::*;

#[test]
fn t_curves_stay_inside_band() {
    for th in theta_grid(721).unwrap() {
        let band = quantum_band(&t_polynomial(), &family_t(), th).unwrap();
        assert!(band.contains(singlet_curve_t(th), 1e-9), "f at {th}");
        assert!(band.contains(chi_curve_t(th), 1e-9), "g at {th}");
    }
}

#[test]
fn singlet_t_curve_range() {
    let r = 2.0 * SQRT_2;
    let values: Vec<f64> = theta_grid(721).unwrap().into_iter().map(singlet_curve_t).collect();
    let lo = values.iter().copied().fold(f64::MAX, f64::min);
    let hi = values.iter().copied().fold(f64::MIN, f64::max);
    assert!((lo + 3.0 * r).abs() < 1e-6);
    assert!(hi <= 3.0 * r + 1e-9);
}

#[test]
fn t_lhv_bounds_inside_global_quantum_range() {
    let h = enumerate_lhv(&t_polynomial()).unwrap().bounds;
    let q = global_quantum_range(&t_polynomial(), &family_t(), 721).unwrap();
    assert!(q.includes(&h, 1e-12));
    assert!(q.width() > h.width());
}

#[test]
fn t_lhv_band_escapes_quantum_band_at_quarter_pi() {
    let h = enumerate_lhv(&t_polynomial()).unwrap().bounds;
    let q = quantum_band(&t_polynomial(), &family_t(), FRAC_PI_4).unwrap();
    assert!(!q.includes(&h, 1e-9));
    assert!(h.hi > q.hi && h.lo > q.lo);
}

#[test]
fn sequential_and_parallel_scans_agree() {
    let p = t_polynomial();
    let f = family_t();
    let a = global_quantum_range_with(&p, &f, 181, Execution::Sequential).unwrap();
    let b = global_quantum_range_with(&p, &f, 181, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    let a = enumerate_lhv_with(&p, Execution::Sequential).unwrap();
    let b = enumerate_lhv_with(&p, Execution::Parallel).unwrap();
    assert_eq!(a.value_set, b.value_set);
}
