//! Quantum predictions for two-qubit Bell operators: spectral bands,
//! expectation values on pure and mixed states, closed-form reference
//! curves and the interference split of a superposition.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::interval::Interval;
use crate::lhv::CorrelationTable;
use crate::linalg::{hermitian_eigenvalues, inner, kron, mat_vec, CMatrix, C64, HERMITIAN_TOL};
use crate::pauli::ObservableFamily;
use crate::polynomial::{assemble, BellPolynomial};

/// Imaginary residue tolerated in an expectation value before it is dropped.
pub const IMAG_TOL: f64 = 1e-10;

/// Default θ grid size: 0.5° steps over [0, 2π] inclusive.
pub const DEFAULT_GRID: usize = 721;

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Normalizes `amps`; fails on a zero or non-finite vector.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = norm(&amps);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amps: amps.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &[C64]) -> f64 {
        inner(&self.amps, other).norm_sqr() / inner(other, other).re
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let evs = hermitian_eigenvalues(&m)?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("density matrix trace {tr} != 1")));
        }
        if evs.first().is_some_and(|&e| e < -1e-10) {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {}",
                evs[0]
            )));
        }
        Ok(Self { m })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(s: &StateVector) -> Self {
        let col = CMatrix::column(s.amplitudes());
        Self { m: &col * &col.adjoint() }
    }

    /// `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    /// Equal mixture of |↑↓⟩ and |↓↑⟩, i.e. `diag(0, 1, 1, 0)/2`.
    pub fn anti_aligned_mixture() -> Self {
        let up = CMatrix::diag_real(&[1.0, 0.0]);
        let down = CMatrix::diag_real(&[0.0, 1.0]);
        let m = &kron(&up, &down).scale_real(0.5) + &kron(&down, &up).scale_real(0.5);
        Self { m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

/// Named two-qubit states, in the computational basis |00⟩, |01⟩, |10⟩, |11⟩.
#[derive(Debug, Clone)]
pub struct NamedStates {
    /// (0, 1, −1, 0)/√2
    pub singlet: StateVector,
    /// (1, 0, 0, 1)/√2
    pub chi: StateVector,
    /// |00⟩, (|01⟩ + |10⟩)/√2, |11⟩
    pub triplet: [StateVector; 3],
}

pub fn named_states() -> NamedStates {
    let h = FRAC_1_SQRT_2;
    let s = |v: [f64; 4]| StateVector::from_real(&v).expect("nonzero literal");
    NamedStates {
        singlet: s([0.0, h, -h, 0.0]),
        chi: s([h, 0.0, 0.0, h]),
        triplet: [
            s([1.0, 0.0, 0.0, 0.0]),
            s([0.0, h, h, 0.0]),
            s([0.0, 0.0, 0.0, 1.0]),
        ],
    }
}

fn check_observable(dim: usize, m: &CMatrix) -> Result<()> {
    if !m.is_square() || m.rows() != dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{dim}x{dim}"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::NotHermitian { deviation: z.im.abs() });
    }
    Ok(z.re)
}

/// `⟨s|m|s⟩` for Hermitian `m`.
pub fn expectation(s: &StateVector, m: &CMatrix) -> Result<f64> {
    check_observable(s.dim(), m)?;
    let mv = mat_vec(m, s.amplitudes())?;
    real_part(inner(s.amplitudes(), &mv))
}

/// `Tr(m·ρ)`.
pub fn mixed_expectation(rho: &DensityMatrix, m: &CMatrix) -> Result<f64> {
    let r = rho.matrix();
    if m.rows() != r.rows() || m.cols() != r.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", r.rows(), r.cols()),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    real_part(m.try_mul(r)?.trace())
}

/// Expectation of a superposition split into the two diagonal
/// contributions and the interference cross terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceSplit {
    /// `(⟨ψ1|m|ψ1⟩ + ⟨ψ2|m|ψ2⟩)/N²`
    pub diagonal: f64,
    /// `(⟨ψ1|m|ψ2⟩ + ⟨ψ2|m|ψ1⟩)/N²`
    pub cross: f64,
}

impl InterferenceSplit {
    pub fn total(&self) -> f64 {
        self.diagonal + self.cross
    }
}

/// Splits `⟨ψ|m|ψ⟩` for `ψ = (ψ1 + ψ2)/N`, `N = ‖ψ1 + ψ2‖`. The inputs are
/// not normalized individually.
pub fn interference_split(psi1: &[C64], psi2: &[C64], m: &CMatrix) -> Result<InterferenceSplit> {
    if psi1.len() != psi2.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("length {}", psi1.len()),
            found: format!("length {}", psi2.len()),
        });
    }
    check_observable(psi1.len(), m)?;
    let sum: Vec<C64> = psi1.iter().zip(psi2).map(|(a, b)| a + b).collect();
    let n2 = norm(&sum).powi(2);
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let m1 = mat_vec(m, psi1)?;
    let m2 = mat_vec(m, psi2)?;
    let diagonal = real_part(inner(psi1, &m1) + inner(psi2, &m2))? / n2;
    let cross = real_part(inner(psi1, &m2) + inner(psi2, &m1))? / n2;
    Ok(InterferenceSplit { diagonal, cross })
}

/// `[λ_min, λ_max]` of the assembled operator: exactly the set of
/// expectation values reachable by some state at this θ.
pub fn quantum_band(p: &BellPolynomial, fam: &ObservableFamily, theta: f64) -> Result<Interval> {
    let evs = hermitian_eigenvalues(&assemble(p, fam, theta)?)?;
    Ok(Interval {
        lo: evs[0],
        hi: evs[evs.len() - 1],
    })
}

/// `grid` uniformly spaced angles covering [0, 2π] inclusive.
pub fn theta_grid(grid: usize) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("θ grid needs at least 2 points, got {grid}")));
    }
    let step = 2.0 * PI / (grid - 1) as f64;
    Ok((0..grid)
        .map(|k| if k == grid - 1 { 2.0 * PI } else { k as f64 * step })
        .collect())
}

pub fn global_quantum_range(p: &BellPolynomial, fam: &ObservableFamily, grid: usize) -> Result<Interval> {
    global_quantum_range_with(p, fam, grid, Execution::default())
}

/// Hull of [`quantum_band`] over a uniform θ grid.
pub fn global_quantum_range_with(
    p: &BellPolynomial,
    fam: &ObservableFamily,
    grid: usize,
    exec: Execution,
) -> Result<Interval> {
    let thetas = theta_grid(grid)?;
    let bands = map_range(exec, thetas.len(), |k| quantum_band(p, fam, thetas[k]));
    let mut out: Option<Interval> = None;
    for b in bands {
        let b = b?;
        out = Some(out.map_or(b, |o| o.hull(&b)));
    }
    Ok(out.expect("grid is non-empty"))
}

/// One θ sample of a band scan.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSample {
    pub theta: f64,
    pub q: Interval,
    /// Expectation per named state, in the order the states were supplied.
    pub expectations: Vec<(String, f64)>,
}

/// Band and named-state expectations at every grid angle.
pub fn band_scan(
    p: &BellPolynomial,
    fam: &ObservableFamily,
    grid: usize,
    states: &[(String, StateVector)],
    exec: Execution,
) -> Result<Vec<BandSample>> {
    let thetas = theta_grid(grid)?;
    map_range(exec, thetas.len(), |k| {
        let theta = thetas[k];
        let m = assemble(p, fam, theta)?;
        let evs = hermitian_eigenvalues(&m)?;
        let expectations = states
            .iter()
            .map(|(name, s)| expectation(s, &m).map(|v| (name.clone(), v)))
            .collect::<Result<_>>()?;
        Ok(BandSample {
            theta,
            q: Interval {
                lo: evs[0],
                hi: evs[evs.len() - 1],
            },
            expectations,
        })
    })
    .into_iter()
    .collect()
}

/// `⟨A_i B_j⟩` in state `s` for every setting pair of `fam` at `theta`.
pub fn correlation_table(s: &StateVector, fam: &ObservableFamily, theta: f64) -> Result<CorrelationTable> {
    let scenario = crate::polynomial::Scenario::new(fam.m_a(), fam.n_b())?;
    let mut entries = Vec::new();
    for i in 1..=fam.m_a() {
        let a = fam.a_matrix(i, theta)?;
        for j in 1..=fam.n_b() {
            let ab = &a * &fam.b_matrix(j, theta)?;
            entries.push(((i, j), expectation(s, &ab)?));
        }
    }
    CorrelationTable::new(scenario, entries)
}

/// Closed-form eigenvalues of the CHSH operator:
/// `{2cos2θ, −2cos2θ, 2√(1+sin²2θ), −2√(1+sin²2θ)}`.
pub fn analytic_spectrum_s(theta: f64) -> [f64; 4] {
    let c2 = (2.0 * theta).cos();
    let r = 2.0 * (1.0 + (2.0 * theta).sin().powi(2)).sqrt();
    [2.0 * c2, -2.0 * c2, r, -r]
}

/// Closed-form eigenvalues of the T operator:
/// `k(−sin2θ ± √(cos²2θ + 2 + 2sin2θ))` and `k(sin2θ ± √(cos²2θ + 2 − 2sin2θ))`
/// with `k = 2(cosθ + sinθ)`.
pub fn analytic_spectrum_t(theta: f64) -> [f64; 4] {
    let k = 2.0 * (theta.cos() + theta.sin());
    let (s2, c2) = ((2.0 * theta).sin(), (2.0 * theta).cos());
    let r1 = (c2 * c2 + 2.0 + 2.0 * s2).max(0.0).sqrt();
    let r2 = (c2 * c2 + 2.0 - 2.0 * s2).max(0.0).sqrt();
    [k * (-s2 + r1), k * (-s2 - r1), k * (s2 + r2), k * (s2 - r2)]
}

/// Singlet expectation of the CHSH operator, `−2cosθ − 2sin2θ·sinθ`.
pub fn singlet_curve_s(theta: f64) -> f64 {
    -2.0 * theta.cos() - 2.0 * (2.0 * theta).sin() * theta.sin()
}

/// Singlet expectation of the T operator, `−2(cosθ + sinθ)(1 + 2sin2θ)`.
pub fn singlet_curve_t(theta: f64) -> f64 {
    -2.0 * (theta.cos() + theta.sin()) * (1.0 + 2.0 * (2.0 * theta).sin())
}

/// χ expectation of the T operator, `2(cosθ + sinθ)`.
pub fn chi_curve_t(theta: f64) -> f64 {
    2.0 * (theta.cos() + theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{family_s, family_t, Pauli};
    use crate::polynomial::{chsh_polynomial, t_polynomial};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, SQRT_2};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    fn sorted(mut v: [f64; 4]) -> [f64; 4] {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn named_state_amplitudes() {
        let ns = named_states();
        let h = FRAC_1_SQRT_2;
        let re: Vec<f64> = ns.singlet.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![0.0, h, -h, 0.0]);
        let re: Vec<f64> = ns.chi.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![h, 0.0, 0.0, h]);
    }

    #[test]
    fn singlet_is_bottom_of_t() {
        let t = assemble(&t_polynomial(), &family_t(), FRAC_PI_4).unwrap();
        let ns = named_states();
        assert!(close(expectation(&ns.singlet, &t).unwrap(), -6.0 * SQRT_2, 1e-12));
        for s in &ns.triplet {
            assert!(close(expectation(s, &t).unwrap(), 2.0 * SQRT_2, 1e-12));
        }
    }

    #[test]
    fn band_examples() {
        let b = quantum_band(&chsh_polynomial(), &family_s(), 0.0).unwrap();
        assert!(b.approx_eq(&Interval { lo: -2.0, hi: 2.0 }, 1e-12));
        let b = quantum_band(&t_polynomial(), &family_t(), FRAC_PI_4).unwrap();
        assert!(b.approx_eq(&Interval { lo: -6.0 * SQRT_2, hi: 2.0 * SQRT_2 }, 1e-12));
        for t in [0.2f64, 1.0, 2.2] {
            let r = 2.0 * (1.0 + (2.0 * t).sin().powi(2)).sqrt();
            let b = quantum_band(&chsh_polynomial(), &family_s(), t).unwrap();
            assert!(b.approx_eq(&Interval { lo: -r, hi: r }, 1e-12));
        }
    }

    #[test]
    fn grid_endpoints_only() {
        let r = global_quantum_range(&chsh_polynomial(), &family_s(), 2).unwrap();
        assert!(r.approx_eq(&Interval { lo: -2.0, hi: 2.0 }, 1e-12));
        assert!(global_quantum_range(&chsh_polynomial(), &family_s(), 1).is_err());
    }

    #[test]
    fn analytic_spectrum_examples() {
        let s = sorted(analytic_spectrum_s(FRAC_PI_4));
        let want = [-2.0 * SQRT_2, 0.0, 0.0, 2.0 * SQRT_2];
        assert!(s.iter().zip(&want).all(|(a, b)| close(*a, *b, 1e-12)));
        let t = sorted(analytic_spectrum_t(FRAC_PI_4));
        let want = [-6.0 * SQRT_2, 2.0 * SQRT_2, 2.0 * SQRT_2, 2.0 * SQRT_2];
        assert!(t.iter().zip(&want).all(|(a, b)| close(*a, *b, 1e-12)));
        assert_eq!(analytic_spectrum_s(0.0), [2.0, -2.0, 2.0, -2.0]);
    }

    #[test]
    fn curve_examples() {
        let ns = named_states();
        let s = assemble(&chsh_polynomial(), &family_s(), FRAC_PI_4).unwrap();
        assert!(close(expectation(&ns.singlet, &s).unwrap(), -2.0 * SQRT_2, 1e-12));
        let t = assemble(&t_polynomial(), &family_t(), 0.0).unwrap();
        assert!(close(expectation(&ns.chi, &t).unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn mixed_state_examples() {
        let rho = DensityMatrix::anti_aligned_mixture();
        for t in [0.0, FRAC_PI_3, FRAC_PI_2] {
            let s = assemble(&chsh_polynomial(), &family_s(), t).unwrap();
            assert!(close(mixed_expectation(&rho, &s).unwrap(), -2.0 * t.cos(), 1e-12));
            let mm = DensityMatrix::maximally_mixed(4);
            assert!(close(mixed_expectation(&mm, &s).unwrap(), 0.0, 1e-12));
        }
        let up_up = DensityMatrix::pure(&StateVector::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap());
        let zz = kron(&Pauli::Z.matrix(), &Pauli::Z.matrix());
        assert_eq!(mixed_expectation(&up_up, &zz).unwrap(), 1.0);
        assert!(mixed_expectation(&up_up, &Pauli::Z.matrix()).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(CMatrix::diag_real(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(CMatrix::diag_real(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn interference_of_singlet_halves() {
        let h = FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let psi1 = [z, C64::new(h, 0.0), z, z];
        let psi2 = [z, z, C64::new(-h, 0.0), z];
        for t in [0.1, FRAC_PI_4, 1.7] {
            let s = assemble(&chsh_polynomial(), &family_s(), t).unwrap();
            let split = interference_split(&psi1, &psi2, &s).unwrap();
            assert!(close(split.diagonal, -2.0 * t.cos(), 1e-12));
            assert!(close(split.cross, -2.0 * (2.0 * t).sin() * t.sin(), 1e-12));
        }
    }

    #[test]
    fn interference_orthogonal_diagonal_has_no_cross() {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let zz = kron(&Pauli::Z.matrix(), &Pauli::Z.matrix());
        let split = interference_split(&[o, z, z, z], &[z, o, z, z], &zz).unwrap();
        assert_eq!(split.cross, 0.0);
        assert!(close(split.diagonal, 0.0, 1e-15));
        assert_eq!(
            interference_split(&[o, z], &[-o, z], &Pauli::Z.matrix()),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn expectation_errors() {
        let ns = named_states();
        assert!(matches!(
            expectation(&ns.singlet, &Pauli::Z.matrix()),
            Err(Error::DimensionMismatch { .. })
        ));
        let non_h = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let up = StateVector::from_real(&[1.0, 0.0]).unwrap();
        assert!(matches!(expectation(&up, &non_h), Err(Error::NotHermitian { .. })));
        assert_eq!(StateVector::from_real(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn singlet_correlations_at_quarter_pi() {
        let c = correlation_table(&named_states().singlet, &family_s(), FRAC_PI_4).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(close(c.get(1, 1).unwrap(), -h, 1e-12));
        assert!(close(c.get(1, 2).unwrap(), -h, 1e-12));
        assert!(close(c.get(2, 1).unwrap(), -h, 1e-12));
        assert!(close(c.get(2, 2).unwrap(), h, 1e-12));
    }

    #[test]
    fn band_scan_modes_agree() {
        let states = vec![("singlet".to_string(), named_states().singlet)];
        let a = band_scan(&t_polynomial(), &family_t(), 37, &states, Execution::Sequential).unwrap();
        let b = band_scan(&t_polynomial(), &family_t(), 37, &states, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.q.contains(s.expectations[0].1, 1e-9));
        }
    }

    proptest! {
        #[test]
        fn split_sums_to_expectation(
            raw1 in proptest::collection::vec(-1.0f64..1.0, 8),
            raw2 in proptest::collection::vec(-1.0f64..1.0, 8),
            t in 0.0f64..(2.0 * PI),
        ) {
            let to_c = |r: &[f64]| -> Vec<C64> { r.chunks(2).map(|p| C64::new(p[0], p[1])).collect() };
            let (p1, p2) = (to_c(&raw1), to_c(&raw2));
            let sum: Vec<C64> = p1.iter().zip(&p2).map(|(a, b)| a + b).collect();
            prop_assume!(norm(&sum) > 1e-3);
            let m = assemble(&t_polynomial(), &family_t(), t).unwrap();
            let split = interference_split(&p1, &p2, &m).unwrap();
            // direct evaluation oracle: ⟨ψ|m|ψ⟩/⟨ψ|ψ⟩ on the raw sum
            let direct = inner(&sum, &mat_vec(&m, &sum).unwrap()).re / inner(&sum, &sum).re;
            prop_assert!((split.total() - direct).abs() < 1e-10);
        }
    }
}
