//! Pauli matrices, unit Bloch-vector observables, and θ-parametrized
//! families of local observables for two-qubit Bell scenarios.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix, C64, I, ONE, ZERO};

/// Tolerance on `|n| == 1` for Bloch vectors.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let rows = match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        };
        CMatrix::from_rows(&rows).expect("2x2 literal")
    }

    /// Unit Bloch vector along this axis.
    pub fn axis(self) -> [f64; 3] {
        match self {
            Pauli::X => [1.0, 0.0, 0.0],
            Pauli::Y => [0.0, 1.0, 0.0],
            Pauli::Z => [0.0, 0.0, 1.0],
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-qubit Hadamard gate; handy for unitary-invariance checks.
    pub fn hadamard() -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real_rows(&[[h, h], [h, -h]]).expect("2x2 literal")
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Pauli {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(format!("unknown Pauli axis `{other}` (expected X, Y or Z)")),
        }
    }
}

/// Observable `n·σ` for a unit vector `n`; its spectrum is exactly {−1, +1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochObservable {
    n: [f64; 3],
}

impl BlochObservable {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitVector { norm });
        }
        Ok(Self { n })
    }

    pub fn along(axis: Pauli) -> Self {
        Self { n: axis.axis() }
    }

    /// `p·cosθ + s·q·sinθ` for orthogonal axes `p ≠ q`, `s = ±1`.
    pub fn rotated(p: Pauli, q: Pauli, sign: f64, theta: f64) -> Self {
        debug_assert!(p != q);
        let mut n = [0.0; 3];
        let (pa, qa) = (p.axis(), q.axis());
        for k in 0..3 {
            n[k] = pa[k] * theta.cos() + sign * qa[k] * theta.sin();
        }
        Self { n }
    }

    fn from_trig(n: [f64; 3]) -> Self {
        debug_assert!((n.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() <= UNIT_TOL);
        Self { n }
    }

    pub fn vector(&self) -> [f64; 3] {
        self.n
    }

    pub fn matrix(&self) -> CMatrix {
        let [x, y, z] = self.n;
        CMatrix::from_rows(&[
            [C64::new(z, 0.0), C64::new(x, -y)],
            [C64::new(x, y), C64::new(-z, 0.0)],
        ])
        .expect("2x2 literal")
    }
}

/// `nx·σx + ny·σy + nz·σz`.
pub fn bloch_matrix(o: &BlochObservable) -> CMatrix {
    o.matrix()
}

/// Which party a setting belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

type Generator = dyn Fn(Side, usize, f64) -> BlochObservable + Send + Sync;

/// θ-parametrized assignment of a single-qubit observable to each setting.
///
/// Indices are 1-based, matching `A1`, `B2`, … in polynomial text. A-side
/// observables act as `obs ⊗ I`, B-side as `I ⊗ obs`.
#[derive(Clone)]
pub struct ObservableFamily {
    name: String,
    m_a: usize,
    n_b: usize,
    generator: Arc<Generator>,
}

impl ObservableFamily {
    /// `generator(side, index, θ)` receives 1-based indices within
    /// `1..=m_a` / `1..=n_b`.
    pub fn new<F>(name: impl Into<String>, m_a: usize, n_b: usize, generator: F) -> Self
    where
        F: Fn(Side, usize, f64) -> BlochObservable + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            m_a,
            n_b,
            generator: Arc::new(generator),
        }
    }

    /// θ-independent family from explicit observable lists.
    pub fn fixed(name: impl Into<String>, a: Vec<BlochObservable>, b: Vec<BlochObservable>) -> Self {
        let (m_a, n_b) = (a.len(), b.len());
        Self::new(name, m_a, n_b, move |side, i, _| match side {
            Side::A => a[i - 1],
            Side::B => b[i - 1],
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn m_a(&self) -> usize {
        self.m_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn observable(&self, side: Side, index: usize, theta: f64) -> Result<BlochObservable> {
        let count = match side {
            Side::A => self.m_a,
            Side::B => self.n_b,
        };
        if index == 0 || index > count {
            return Err(Error::InvalidIndex(format!(
                "{side:?}{index} outside 1..={count} in family `{}`",
                self.name
            )));
        }
        Ok((self.generator)(side, index, theta))
    }

    /// The setting's operator on the two-qubit space.
    pub fn local_matrix(&self, side: Side, index: usize, theta: f64) -> Result<CMatrix> {
        let obs = self.observable(side, index, theta)?.matrix();
        let id = CMatrix::identity(2);
        Ok(match side {
            Side::A => kron(&obs, &id),
            Side::B => kron(&id, &obs),
        })
    }

    pub fn a_matrix(&self, index: usize, theta: f64) -> Result<CMatrix> {
        self.local_matrix(Side::A, index, theta)
    }

    pub fn b_matrix(&self, index: usize, theta: f64) -> Result<CMatrix> {
        self.local_matrix(Side::B, index, theta)
    }
}

impl fmt::Debug for ObservableFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObservableFamily")
            .field("name", &self.name)
            .field("m_a", &self.m_a)
            .field("n_b", &self.n_b)
            .finish()
    }
}

/// The CHSH detector family:
///
/// ```text
/// A1 = σz                       B1 = σz cosθ + σx sinθ
/// A2 = σz cos2θ + σx sin2θ      B2 = σz cosθ − σx sinθ
/// ```
pub fn family_s() -> ObservableFamily {
    ObservableFamily::new("S", 2, 2, |side, i, t| {
        let (c, s, c2, s2) = (t.cos(), t.sin(), (2.0 * t).cos(), (2.0 * t).sin());
        BlochObservable::from_trig(match (side, i) {
            (Side::A, 1) => [0.0, 0.0, 1.0],
            (Side::A, 2) => [s2, 0.0, c2],
            (Side::B, 1) => [s, 0.0, c],
            (Side::B, 2) => [-s, 0.0, c],
            _ => unreachable!("index checked by ObservableFamily"),
        })
    })
}

/// The nine-observable family of the T operator (three A settings, six B
/// settings). At θ = π/4 the B settings are `(σp ± σq)/√2` and the A
/// settings are σx, σy, σz.
pub fn family_t() -> ObservableFamily {
    ObservableFamily::new("T", 3, 6, |side, i, t| {
        let (c, s, c2, s2) = (t.cos(), t.sin(), (2.0 * t).cos(), (2.0 * t).sin());
        BlochObservable::from_trig(match (side, i) {
            (Side::A, 1) => [s2, 0.0, c2],
            (Side::A, 2) => [0.0, s2, c2],
            (Side::A, 3) => [0.0, 0.0, 1.0],
            (Side::B, 1) => [0.0, c, s],
            (Side::B, 2) => [s, 0.0, c],
            (Side::B, 3) => [c, s, 0.0],
            (Side::B, 4) => [0.0, c, -s],
            (Side::B, 5) => [-s, 0.0, c],
            (Side::B, 6) => [c, -s, 0.0],
            _ => unreachable!("index checked by ObservableFamily"),
        })
    })
}
