//! Synthesis of Bell-like polynomials from commuting Pauli-string seeds.
//!
//! A seed `Σ c·σa⊗σp` has commuting terms, so its spectrum follows the
//! naive additive arithmetic. Rewriting every B-side factor with
//!
//! ```text
//! σp = ½[(σp + σq) + (σp − σq)]      (p first in the pair)
//! σq = ½[(σp + σq) − (σp − σq)]      (q second in the pair)
//! ```
//!
//! turns the seed into a polynomial over the ±1 observables `(σp ± σq)/√2`,
//! which no longer commute. Hidden-variable arithmetic then applies to the
//! polynomial while the operator (and its spectrum) is unchanged.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::lhv::enumerate_lhv;
use crate::linalg::{commutator, hermitian_eigenvalues, kron, CMatrix};
use crate::pauli::{BlochObservable, ObservableFamily, Pauli, Side};
use crate::polynomial::{assemble, BellPolynomial, Scenario, Term};
use crate::quantum::quantum_band;

/// Angle at which the forged B observables equal `(σp ± σq)/√2`.
pub const CONSTRUCTION_ANGLE: f64 = FRAC_PI_4;

/// Entrywise tolerance for the forged-operator check.
pub const VERIFY_TOL: f64 = 1e-12;

/// Boundary-equality tolerance of [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-9;

const COMMUTE_TOL: f64 = 1e-12;

/// `coeff · σ_a ⊗ σ_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedTerm {
    pub coeff: f64,
    pub a: Pauli,
    pub b: Pauli,
}

impl SeedTerm {
    pub fn new(coeff: f64, a: Pauli, b: Pauli) -> Self {
        Self { coeff, a, b }
    }

    pub fn matrix(&self) -> CMatrix {
        kron(&self.a.matrix(), &self.b.matrix()).scale_real(self.coeff)
    }
}

/// Sum of pairwise-commuting two-qubit Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingSeed {
    terms: Vec<SeedTerm>,
}

impl CommutingSeed {
    pub fn new(terms: Vec<SeedTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("seed has no terms".into()));
        }
        if terms.iter().any(|t| !t.coeff.is_finite()) {
            return Err(Error::NonFinite);
        }
        let bare: Vec<CMatrix> = terms
            .iter()
            .map(|t| kron(&t.a.matrix(), &t.b.matrix()))
            .collect();
        for i in 0..bare.len() {
            for j in i + 1..bare.len() {
                if commutator(&bare[i], &bare[j])?.frobenius_norm() >= COMMUTE_TOL {
                    return Err(Error::NonCommutingSeed(i + 1, j + 1));
                }
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[SeedTerm] {
        &self.terms
    }

    pub fn matrix(&self) -> CMatrix {
        self.terms
            .iter()
            .fold(CMatrix::zeros(4, 4), |acc, t| &acc + &t.matrix())
    }

    /// Parses `<coeff> <A-axis> <B-axis>` lines. Coefficients are decimal
    /// numbers or products such as `2*sqrt(2)`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, fields) in data_lines(text) {
            let err = |message: String| Error::Parse { line: lineno, message };
            let [coeff, a, b] = fields[..] else {
                return Err(err(format!(
                    "expected `<coeff> <A-axis> <B-axis>`, got `{}`",
                    fields.join(" ")
                )));
            };
            let coeff = parse_coefficient(coeff).map_err(err)?;
            let a = a.parse::<Pauli>().map_err(err)?;
            let b = b.parse::<Pauli>().map_err(err)?;
            terms.push(SeedTerm::new(coeff, a, b));
        }
        Self::new(terms)
    }
}

impl fmt::Display for CommutingSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} {} {}", t.coeff, t.a, t.b)?;
        }
        Ok(())
    }
}

/// Axis pairs `(p, q)` used to expand B-side Paulis.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingScheme {
    pairs: Vec<(Pauli, Pauli)>,
}

impl PairingScheme {
    pub fn new(pairs: Vec<(Pauli, Pauli)>) -> Result<Self> {
        for (k, &(p, q)) in pairs.iter().enumerate() {
            if p == q {
                return Err(Error::InvalidScheme(format!("pair {} repeats axis {p}", k + 1)));
            }
            let dup = pairs[..k]
                .iter()
                .any(|&(r, s)| (r, s) == (p, q) || (r, s) == (q, p));
            if dup {
                return Err(Error::InvalidScheme(format!("pair ({p},{q}) listed twice")));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(Pauli, Pauli)] {
        &self.pairs
    }

    /// Parses `<p-axis> <q-axis>` lines.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, fields) in data_lines(text) {
            let err = |message: String| Error::Parse { line: lineno, message };
            let [p, q] = fields[..] else {
                return Err(err(format!("expected `<p-axis> <q-axis>`, got `{}`", fields.join(" "))));
            };
            pairs.push((p.parse::<Pauli>().map_err(err)?, q.parse::<Pauli>().map_err(err)?));
        }
        Self::new(pairs)
    }

    /// Pairs containing `axis`, with `true` when it is the first member.
    fn uses(&self, axis: Pauli) -> Vec<(usize, bool)> {
        self.pairs
            .iter()
            .enumerate()
            .filter_map(|(k, &(p, q))| {
                if p == axis {
                    Some((k, true))
                } else if q == axis {
                    Some((k, false))
                } else {
                    None
                }
            })
            .collect()
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('#')).then(|| (k + 1, line.split_whitespace().collect()))
    })
}

fn parse_coefficient(s: &str) -> std::result::Result<f64, String> {
    let mut value = 1.0;
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    for factor in body.split('*') {
        let f = if let Some(inner) = factor.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            inner.parse::<f64>().ok().filter(|x| *x >= 0.0).map(f64::sqrt)
        } else {
            factor.parse::<f64>().ok()
        };
        value *= f.ok_or_else(|| format!("bad coefficient `{s}`"))?;
    }
    if !value.is_finite() {
        return Err(format!("bad coefficient `{s}`"));
    }
    Ok(sign * value)
}

/// Hidden-variable range `[a, b]` against quantum range `[c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestType {
    /// `c < a < b < d`: hidden-variable range strictly inside the quantum one.
    Type1,
    /// `c < a < d < b` or `a < c < b < d`: proper overlap.
    Type2,
    /// `a < c < d < b`: quantum range strictly inside.
    Type3,
    /// `d < a` or `b < c`: disjoint.
    Type4,
    /// Some endpoint coincidence prevents a strict ordering.
    Degenerate,
}

impl fmt::Display for TestType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TestType::Type1 => "Type1",
            TestType::Type2 => "Type2",
            TestType::Type3 => "Type3",
            TestType::Type4 => "Type4",
            TestType::Degenerate => "Degenerate",
        };
        f.write_str(s)
    }
}

impl FromStr for TestType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Type1" => Ok(TestType::Type1),
            "Type2" => Ok(TestType::Type2),
            "Type3" => Ok(TestType::Type3),
            "Type4" => Ok(TestType::Type4),
            "Degenerate" => Ok(TestType::Degenerate),
            other => Err(format!("unknown test type `{other}`")),
        }
    }
}

/// Orders the hidden-variable interval `hlv = [a, b]` against the quantum
/// interval `quantum = [c, d]`.
pub fn classify(hlv: Interval, quantum: Interval) -> Result<TestType> {
    let (a, b) = (hlv.lo, hlv.hi);
    let (c, d) = (quantum.lo, quantum.hi);
    for (lo, hi) in [(a, b), (c, d)] {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::MalformedInterval { lo, hi });
        }
    }
    let eq = |x: f64, y: f64| (x - y).abs() <= CLASSIFY_TOL;
    if eq(a, b) || eq(c, d) || eq(a, c) || eq(a, d) || eq(b, c) || eq(b, d) {
        return Ok(TestType::Degenerate);
    }
    Ok(if c < a && b < d {
        TestType::Type1
    } else if (c < a && a < d && d < b) || (a < c && c < b && b < d) {
        TestType::Type2
    } else if a < c && d < b {
        TestType::Type3
    } else {
        TestType::Type4
    })
}

/// Spectral range of a seed plus the naive sign-sum candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSpectrum {
    pub bounds: Interval,
    /// Distinct values of `Σ ±c_k`, ascending. The actual spectrum is a
    /// subset because the terms commute.
    pub candidates: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

pub fn seed_spectrum_bound(s: &CommutingSeed) -> Result<SeedSpectrum> {
    let seed = CommutingSeed::new(s.terms.clone())?;
    let eigenvalues = hermitian_eigenvalues(&seed.matrix())?;
    let k = seed.terms.len();
    let mut candidates: Vec<f64> = (0..1u64 << k.min(20))
        .map(|mask| {
            seed.terms
                .iter()
                .enumerate()
                .map(|(i, t)| if (mask >> i) & 1 == 1 { -t.coeff } else { t.coeff })
                .sum()
        })
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    Ok(SeedSpectrum {
        bounds: Interval {
            lo: eigenvalues[0],
            hi: eigenvalues[eigenvalues.len() - 1],
        },
        candidates,
        eigenvalues,
    })
}

/// B-side setting created by the expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForgedSetting {
    pub p: Pauli,
    pub q: Pauli,
    /// +1 for `σp + σq`, −1 for `σp − σq`.
    pub sign: f64,
}

impl fmt::Display for ForgedSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.sign > 0.0 { '+' } else { '-' };
        write!(f, "({}{op}{})/sqrt2", self.p, self.q)
    }
}

#[derive(Debug, Clone)]
pub struct ForgeReport {
    pub seed: CommutingSeed,
    pub scheme: PairingScheme,
    pub polynomial: BellPolynomial,
    /// Forged observables; A settings are fixed Paulis, B settings are
    /// `σp cosθ ± σq sinθ`.
    pub family: ObservableFamily,
    pub a_settings: Vec<Pauli>,
    pub b_settings: Vec<ForgedSetting>,
    pub construction_angle: f64,
    /// Largest entrywise deviation between the assembled polynomial and the
    /// seed at the construction angle.
    pub deviation: f64,
    pub hlv_bounds: Interval,
    pub quantum_bounds: Interval,
    pub test_type: TestType,
    pub seed_spectrum: SeedSpectrum,
}

/// Rewrites the seed into a Bell polynomial, checks that it reproduces the
/// seed operator, and evaluates both theories' bounds.
///
/// Every B-side axis is expanded with each scheme pair that contains it, and
/// the expansions are averaged. B settings are numbered with all `+`
/// combinations first, then all `−` ones, each in scheme order.
pub fn forge(s: &CommutingSeed, scheme: &PairingScheme) -> Result<ForgeReport> {
    let seed = CommutingSeed::new(s.terms.clone())?;

    let mut a_settings: Vec<Pauli> = Vec::new();
    for t in &seed.terms {
        if !a_settings.contains(&t.a) {
            a_settings.push(t.a);
        }
    }

    let mut used = vec![false; scheme.pairs.len()];
    for t in &seed.terms {
        let uses = scheme.uses(t.b);
        if uses.is_empty() {
            return Err(Error::IncompletePairing(t.b.letter()));
        }
        for (k, _) in uses {
            used[k] = true;
        }
    }
    let mut b_settings = Vec::new();
    let mut slot = vec![[0usize; 2]; scheme.pairs.len()];
    for (sign_idx, sign) in [1.0, -1.0].into_iter().enumerate() {
        for (k, &(p, q)) in scheme.pairs.iter().enumerate() {
            if used[k] {
                b_settings.push(ForgedSetting { p, q, sign });
                slot[k][sign_idx] = b_settings.len();
            }
        }
    }

    let mut terms = Vec::new();
    for t in &seed.terms {
        let a = a_settings.iter().position(|&x| x == t.a).expect("collected above") + 1;
        let uses = scheme.uses(t.b);
        let w = t.coeff * SQRT_2 / (2.0 * uses.len() as f64);
        for (k, first) in uses {
            terms.push(Term::new(w, a, slot[k][0]));
            terms.push(Term::new(if first { w } else { -w }, a, slot[k][1]));
        }
    }
    let scenario = Scenario::new(a_settings.len(), b_settings.len())?;
    let polynomial = BellPolynomial::new(scenario, terms)?;

    let a_obs: Vec<BlochObservable> = a_settings.iter().map(|&p| BlochObservable::along(p)).collect();
    let b_spec = b_settings.clone();
    let family = ObservableFamily::new("forged", a_obs.len(), b_spec.len(), move |side, i, theta| match side {
        Side::A => a_obs[i - 1],
        Side::B => {
            let s = b_spec[i - 1];
            BlochObservable::rotated(s.p, s.q, s.sign, theta)
        }
    });

    let deviation = verify(&polynomial, &family, &seed)?;
    let hlv_bounds = enumerate_lhv(&polynomial)?.bounds;
    let quantum_bounds = quantum_band(&polynomial, &family, CONSTRUCTION_ANGLE)?;
    let test_type = classify(hlv_bounds, quantum_bounds)?;
    let seed_spectrum = seed_spectrum_bound(&seed)?;

    Ok(ForgeReport {
        seed,
        scheme: scheme.clone(),
        polynomial,
        family,
        a_settings,
        b_settings,
        construction_angle: CONSTRUCTION_ANGLE,
        deviation,
        hlv_bounds,
        quantum_bounds,
        test_type,
        seed_spectrum,
    })
}

/// Checks `assemble(p, fam, θ*) == seed` entrywise and returns the
/// deviation.
pub fn verify(p: &BellPolynomial, fam: &ObservableFamily, seed: &CommutingSeed) -> Result<f64> {
    let deviation = assemble(p, fam, CONSTRUCTION_ANGLE)?.max_abs_diff(&seed.matrix());
    if deviation >= VERIFY_TOL {
        return Err(Error::VerificationFailed { deviation });
    }
    Ok(deviation)
}

/// `√2(ZZ + XX)`.
pub fn chsh_seed() -> CommutingSeed {
    CommutingSeed::new(vec![
        SeedTerm::new(SQRT_2, Pauli::Z, Pauli::Z),
        SeedTerm::new(SQRT_2, Pauli::X, Pauli::X),
    ])
    .expect("ZZ and XX commute")
}

/// `{(Z, X)}`.
pub fn chsh_scheme() -> PairingScheme {
    PairingScheme::new(vec![(Pauli::Z, Pauli::X)]).expect("distinct axes")
}

/// `2√2(XX + YY + ZZ)`.
pub fn t_seed() -> CommutingSeed {
    CommutingSeed::new(
        Pauli::ALL
            .iter()
            .map(|&p| SeedTerm::new(2.0 * SQRT_2, p, p))
            .collect(),
    )
    .expect("XX, YY, ZZ commute")
}

/// `{(X, Y), (Y, Z), (Z, X)}`.
pub fn cyclic_scheme() -> PairingScheme {
    PairingScheme::new(vec![(Pauli::X, Pauli::Y), (Pauli::Y, Pauli::Z), (Pauli::Z, Pauli::X)])
        .expect("distinct axes")
}
