//! Symbolic Bell quantities `Σ c·A_i B_j` and their assembly into operators.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix};
use crate::pauli::{ObservableFamily, Side};

/// Largest `m_a + n_b` for which strategy enumeration is allowed.
pub const MAX_SETTINGS: usize = 24;

/// Number of measurement settings on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    m_a: usize,
    n_b: usize,
}

impl Scenario {
    pub fn new(m_a: usize, n_b: usize) -> Result<Self> {
        if m_a == 0 || n_b == 0 {
            return Err(Error::InvalidArgument(format!(
                "scenario ({m_a},{n_b}) needs at least one setting per side"
            )));
        }
        if m_a + n_b > MAX_SETTINGS {
            return Err(Error::ScenarioTooLarge {
                m_a,
                n_b,
                cap: MAX_SETTINGS,
            });
        }
        Ok(Self { m_a, n_b })
    }

    pub fn m_a(&self) -> usize {
        self.m_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn settings(&self) -> usize {
        self.m_a + self.n_b
    }

    /// Number of deterministic strategies, `2^(m_a + n_b)`.
    pub fn strategy_count(&self) -> u64 {
        1u64 << self.settings()
    }

    pub fn matches(&self, fam: &ObservableFamily) -> bool {
        self.m_a == fam.m_a() && self.n_b == fam.n_b()
    }
}

/// One `coeff · A_a B_b` term; indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub a: usize,
    pub b: usize,
}

impl Term {
    pub fn new(coeff: f64, a: usize, b: usize) -> Self {
        Self { coeff, a, b }
    }
}

/// A real linear combination of `A_i B_j` products.
///
/// Duplicate `(i, j)` pairs are merged on construction and terms whose
/// merged coefficient is exactly zero are dropped. Term order is the order
/// of first appearance.
#[derive(Debug, Clone)]
pub struct BellPolynomial {
    scenario: Scenario,
    terms: Vec<Term>,
}

impl BellPolynomial {
    pub fn new(scenario: Scenario, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            if !t.coeff.is_finite() {
                return Err(Error::NonFinite);
            }
            if t.a == 0 || t.a > scenario.m_a || t.b == 0 || t.b > scenario.n_b {
                return Err(Error::InvalidIndex(format!(
                    "A{}B{} outside scenario ({},{})",
                    t.a, t.b, scenario.m_a, scenario.n_b
                )));
            }
            match merged.iter_mut().find(|m| m.a == t.a && m.b == t.b) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Ok(Self {
            scenario,
            terms: merged,
        })
    }

    pub fn zero(scenario: Scenario) -> Self {
        Self {
            scenario,
            terms: Vec::new(),
        }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `A_a B_b`, zero when absent.
    pub fn coefficient(&self, a: usize, b: usize) -> f64 {
        self.terms
            .iter()
            .find(|t| t.a == a && t.b == b)
            .map_or(0.0, |t| t.coeff)
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff).sum()
    }

    pub fn try_add(&self, other: &BellPolynomial) -> Result<BellPolynomial> {
        if self.scenario != other.scenario {
            return Err(Error::ScenarioMismatch {
                poly_a: self.scenario.m_a,
                poly_b: self.scenario.n_b,
                fam_a: other.scenario.m_a,
                fam_b: other.scenario.n_b,
            });
        }
        Self::new(self.scenario, self.terms.iter().chain(&other.terms).copied())
    }

    pub fn scaled(&self, factor: f64) -> BellPolynomial {
        Self::new(
            self.scenario,
            self.terms.iter().map(|t| Term::new(t.coeff * factor, t.a, t.b)),
        )
        .expect("scaling preserves indices")
    }

    /// Value on ±1 assignments `a[i-1]`, `b[j-1]`.
    pub fn evaluate(&self, a: &[i8], b: &[i8]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * f64::from(a[t.a - 1] * b[t.b - 1]))
            .sum()
    }

    /// Whether the two polynomials agree after some relabeling of the A
    /// settings and of the B settings (coefficients compared within `tol`).
    pub fn equivalent_up_to_relabeling(&self, other: &BellPolynomial, tol: f64) -> bool {
        if self.scenario != other.scenario || self.len() != other.len() {
            return false;
        }
        let (m, n) = (self.scenario.m_a, self.scenario.n_b);
        (0..m).permutations(m).any(|pa| {
            (0..n).permutations(n).any(|pb| {
                self.terms.iter().all(|t| {
                    (other.coefficient(pa[t.a - 1] + 1, pb[t.b - 1] + 1) - t.coeff).abs() <= tol
                })
            })
        })
    }

    /// Parses one `<coeff> A<i> B<j>` term per line. Blank lines and lines
    /// starting with `#` are skipped. Without an explicit scenario the
    /// largest indices seen define it.
    pub fn from_text(text: &str, scenario: Option<Scenario>) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [coeff, a, b] = fields[..] else {
                return Err(err(format!("expected `<coeff> A<i> B<j>`, got `{line}`")));
            };
            let coeff: f64 = coeff
                .parse()
                .map_err(|_| err(format!("bad coefficient `{coeff}`")))?;
            let index = |field: &str, prefix: char| -> Result<usize> {
                field
                    .strip_prefix(prefix)
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&i| i > 0)
                    .ok_or_else(|| err(format!("expected {prefix}<index>, got `{field}`")))
            };
            terms.push(Term::new(coeff, index(a, 'A')?, index(b, 'B')?));
        }
        let scenario = match scenario {
            Some(s) => s,
            None => Scenario::new(
                terms.iter().map(|t| t.a).max().unwrap_or(1),
                terms.iter().map(|t| t.b).max().unwrap_or(1),
            )?,
        };
        Self::new(scenario, terms)
    }
}

impl PartialEq for BellPolynomial {
    fn eq(&self, other: &Self) -> bool {
        let key = |p: &BellPolynomial| {
            let mut t = p.terms.clone();
            t.sort_by_key(|t| (t.a, t.b));
            t
        };
        self.scenario == other.scenario && key(self) == key(other)
    }
}

impl fmt::Display for BellPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} A{} B{}", t.coeff, t.a, t.b)?;
        }
        Ok(())
    }
}

/// `A1B1 + A1B2 + A2B1 − A2B2`.
pub fn chsh_polynomial() -> BellPolynomial {
    BellPolynomial::new(
        Scenario::new(2, 2).unwrap(),
        [(1.0, 1, 1), (1.0, 1, 2), (1.0, 2, 1), (-1.0, 2, 2)]
            .map(|(c, a, b)| Term::new(c, a, b)),
    )
    .unwrap()
}

/// The twelve-term operator over three A and six B settings.
pub fn t_polynomial() -> BellPolynomial {
    BellPolynomial::new(
        Scenario::new(3, 6).unwrap(),
        [
            (1.0, 1, 3),
            (1.0, 1, 6),
            (1.0, 2, 3),
            (-1.0, 2, 6),
            (1.0, 3, 2),
            (1.0, 3, 5),
            (1.0, 1, 2),
            (-1.0, 1, 5),
            (1.0, 2, 1),
            (1.0, 2, 4),
            (1.0, 3, 1),
            (-1.0, 3, 4),
        ]
        .map(|(c, a, b)| Term::new(c, a, b)),
    )
    .unwrap()
}

/// `Σ coeff · (A_i ⊗ I)(I ⊗ B_j)` with observables taken from `fam` at `theta`.
pub fn assemble(p: &BellPolynomial, fam: &ObservableFamily, theta: f64) -> Result<CMatrix> {
    if !p.scenario.matches(fam) {
        return Err(Error::ScenarioMismatch {
            poly_a: p.scenario.m_a,
            poly_b: p.scenario.n_b,
            fam_a: fam.m_a(),
            fam_b: fam.n_b(),
        });
    }
    let a: Vec<CMatrix> = (1..=fam.m_a())
        .map(|i| fam.observable(Side::A, i, theta).map(|o| o.matrix()))
        .collect::<Result<_>>()?;
    let b: Vec<CMatrix> = (1..=fam.n_b())
        .map(|j| fam.observable(Side::B, j, theta).map(|o| o.matrix()))
        .collect::<Result<_>>()?;
    let mut out = CMatrix::zeros(4, 4);
    for t in &p.terms {
        out = &out + &kron(&a[t.a - 1], &b[t.b - 1]).scale_real(t.coeff);
    }
    Ok(out)
}
