//! Local hidden-variable predictions.
//!
//! A hidden-variable model assigns ±1 to every setting; any distribution
//! over hidden variables is a mixture of such deterministic strategies, so
//! bounds on a Bell polynomial come from enumerating strategies and
//! realizability of a correlation table is an LP over the strategy simplex.

pub mod simplex;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fold_range, Execution};
use crate::interval::Interval;
use crate::polynomial::{BellPolynomial, Scenario};
use simplex::{LinearProgram, LpOutcome};

/// Tolerance on witnesses returned by [`fine_feasible`].
pub const WITNESS_TOL: f64 = 1e-9;

/// Correlations within this distance outside [−1, 1] are clamped.
pub const CLAMP_TOL: f64 = 1e-12;

/// Strategy-count limit for the LP routes (the enumeration route goes up to
/// the full scenario cap).
pub const MAX_LP_STRATEGIES: u64 = 1 << 14;

/// Values closer than this are reported as one element of a value set.
const VALUE_RESOLUTION: f64 = 1e-9;

/// One point λ of the hidden-variable space: a fixed ±1 outcome for every
/// setting.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub a: Vec<i8>,
    pub b: Vec<i8>,
}

impl DeterministicStrategy {
    /// Bit `k` of `index` set means setting `k` outputs −1; A settings take
    /// the low bits. Index 0 is the all-(+1) strategy.
    pub fn from_index(scenario: Scenario, index: u64) -> Self {
        let bit = |k: usize| if (index >> k) & 1 == 1 { -1 } else { 1 };
        Self {
            a: (0..scenario.m_a()).map(bit).collect(),
            b: (scenario.m_a()..scenario.settings()).map(bit).collect(),
        }
    }

    pub fn index(&self) -> u64 {
        self.a
            .iter()
            .chain(&self.b)
            .enumerate()
            .filter(|(_, &v)| v < 0)
            .fold(0, |acc, (k, _)| acc | (1 << k))
    }

    /// `a_i · b_j` for 1-based indices.
    pub fn correlation(&self, a: usize, b: usize) -> f64 {
        f64::from(self.a[a - 1] * self.b[b - 1])
    }
}

/// Evaluates a polynomial on strategy indices without materializing the
/// strategies.
struct StrategyEvaluator {
    shifts: Vec<(f64, u32, u32)>,
}

impl StrategyEvaluator {
    fn new(p: &BellPolynomial) -> Self {
        let m = p.scenario().m_a();
        let shifts = p
            .terms()
            .iter()
            .map(|t| (t.coeff, (t.a - 1) as u32, (m + t.b - 1) as u32))
            .collect();
        Self { shifts }
    }

    fn value(&self, index: u64) -> f64 {
        self.shifts
            .iter()
            .map(|&(c, sa, sb)| if ((index >> sa) ^ (index >> sb)) & 1 == 1 { -c } else { c })
            .sum()
    }
}

/// Achievable values of a polynomial over deterministic strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvVerdict {
    /// Sorted ascending; values within 1e-9 of each other are merged.
    pub value_set: Vec<f64>,
    pub bounds: Interval,
}

fn check_enumerable(s: Scenario, cap: u64) -> Result<()> {
    if s.strategy_count() > cap {
        return Err(Error::ScenarioTooLarge {
            m_a: s.m_a(),
            n_b: s.n_b(),
            cap: cap.trailing_zeros() as usize,
        });
    }
    Ok(())
}

pub fn enumerate_lhv(p: &BellPolynomial) -> Result<LhvVerdict> {
    enumerate_lhv_with(p, Execution::default())
}

/// Visits all `2^(m_a+n_b)` strategies and collects the exact value set.
pub fn enumerate_lhv_with(p: &BellPolynomial, exec: Execution) -> Result<LhvVerdict> {
    let scenario = p.scenario();
    check_enumerable(scenario, 1 << crate::polynomial::MAX_SETTINGS)?;
    let eval = StrategyEvaluator::new(p);
    let key = |v: f64| (v / VALUE_RESOLUTION).round() as i64;
    let values: BTreeMap<i64, f64> = fold_range(
        exec,
        scenario.strategy_count(),
        BTreeMap::new,
        |mut acc, idx| {
            let v = eval.value(idx);
            acc.entry(key(v)).or_insert(v);
            acc
        },
        |mut left, right| {
            for (k, v) in right {
                left.entry(k).or_insert(v);
            }
            left
        },
    );
    let value_set: Vec<f64> = values.into_values().map(|v| if v == 0.0 { 0.0 } else { v }).collect();
    let bounds = Interval {
        lo: value_set[0],
        hi: *value_set.last().expect("at least one strategy"),
    };
    Ok(LhvVerdict { value_set, bounds })
}

/// `[min, max]` of the polynomial's hidden-variable expectation.
pub fn lhv_expectation_bounds(p: &BellPolynomial) -> Result<Interval> {
    enumerate_lhv(p).map(|v| v.bounds)
}

/// The same bounds obtained by optimizing the expectation over the strategy
/// simplex with the LP solver.
pub fn lp_expectation_bounds(p: &BellPolynomial) -> Result<Interval> {
    let scenario = p.scenario();
    check_enumerable(scenario, MAX_LP_STRATEGIES)?;
    let eval = StrategyEvaluator::new(p);
    let values: Vec<f64> = (0..scenario.strategy_count()).map(|i| eval.value(i)).collect();
    let row = vec![vec![1.0; values.len()]];
    let solve = |cost: Vec<f64>| match LinearProgram::new(row.clone(), vec![1.0], cost).solve() {
        LpOutcome::Optimal { objective, .. } => Ok(objective),
        other => Err(Error::MalformedTable(format!("expectation LP failed: {other:?}"))),
    };
    let lo = solve(values.clone())?;
    let hi = -solve(values.iter().map(|v| -v).collect())?;
    Interval::new(lo, hi)
}

/// Two-party correlations `⟨A_i B_j⟩` for some subset of setting pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    scenario: Scenario,
    values: BTreeMap<(usize, usize), f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    #[serde(rename = "aIndex")]
    a_index: usize,
    #[serde(rename = "bIndex")]
    b_index: usize,
    value: f64,
}

impl CorrelationTable {
    /// Entries within [`CLAMP_TOL`] outside [−1, 1] are clamped; anything
    /// further out, non-finite, or out of scenario range is rejected.
    pub fn new(
        scenario: Scenario,
        entries: impl IntoIterator<Item = ((usize, usize), f64)>,
    ) -> Result<Self> {
        let mut values = BTreeMap::new();
        for ((a, b), v) in entries {
            if a == 0 || a > scenario.m_a() || b == 0 || b > scenario.n_b() {
                return Err(Error::MalformedTable(format!(
                    "entry A{a}B{b} outside scenario ({},{})",
                    scenario.m_a(),
                    scenario.n_b()
                )));
            }
            if !v.is_finite() || v.abs() > 1.0 + CLAMP_TOL {
                return Err(Error::MalformedTable(format!("A{a}B{b} = {v} is outside [-1, 1]")));
            }
            if values.insert((a, b), v.clamp(-1.0, 1.0)).is_some() {
                return Err(Error::MalformedTable(format!("duplicate entry A{a}B{b}")));
            }
        }
        Ok(Self { scenario, values })
    }

    /// Table with every `(i, j)` entry set from `f(i, j)`.
    pub fn full(scenario: Scenario, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let entries: Vec<_> = (1..=scenario.m_a())
            .flat_map(|a| (1..=scenario.n_b()).map(move |b| (a, b)))
            .map(|(a, b)| ((a, b), f(a, b)))
            .collect();
        Self::new(scenario, entries)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        self.values.get(&(a, b)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Reads the `aIndex,bIndex,value` CSV form. The scenario is taken from
    /// the largest indices present.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["aIndex", "bIndex", "value"] {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `aIndex,bIndex,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut rows = Vec::new();
        for (k, rec) in rdr.deserialize::<CsvRow>().enumerate() {
            let row = rec.map_err(|e| Error::Parse {
                line: k + 2,
                message: e.to_string(),
            })?;
            rows.push(((row.a_index, row.b_index), row.value));
        }
        if rows.is_empty() {
            return Err(Error::MalformedTable("no entries".into()));
        }
        let m_a = rows.iter().map(|((a, _), _)| *a).max().unwrap_or(1);
        let n_b = rows.iter().map(|((_, b), _)| *b).max().unwrap_or(1);
        let scenario = Scenario::new(m_a.max(1), n_b.max(1)).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::MalformedTable(m),
            other => other,
        })?;
        Self::new(scenario, rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for ((a, b), v) in self.entries() {
            w.serialize(CsvRow {
                a_index: a,
                b_index: b,
                value: v,
            })
            .map_err(|e| Error::MalformedTable(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::MalformedTable(e.to_string()))
    }
}

/// Result of the hidden-variable realizability LP.
#[derive(Debug, Clone, PartialEq)]
pub struct FineResult {
    pub feasible: bool,
    /// Strategy weights with nonzero mass, in strategy-index order.
    pub witness: Option<Vec<(DeterministicStrategy, f64)>>,
}

/// Decides whether some distribution over deterministic strategies
/// reproduces every entry of `c`. Only pair correlations are constrained.
pub fn fine_feasible(c: &CorrelationTable) -> Result<FineResult> {
    let scenario = c.scenario();
    check_enumerable(scenario, MAX_LP_STRATEGIES)?;
    let n = scenario.strategy_count() as usize;
    let strategies: Vec<DeterministicStrategy> = (0..n as u64)
        .map(|i| DeterministicStrategy::from_index(scenario, i))
        .collect();

    // The uniform mixture is the natural witness whenever it works.
    let uniform = 1.0 / n as f64;
    let uniform_fits = c.entries().all(|((a, b), v)| {
        let mean: f64 = strategies.iter().map(|s| s.correlation(a, b)).sum::<f64>() * uniform;
        (mean - v).abs() <= WITNESS_TOL
    });
    let weights = if uniform_fits {
        vec![uniform; n]
    } else {
        let mut rows = vec![vec![1.0; n]];
        let mut rhs = vec![1.0];
        for ((a, b), v) in c.entries() {
            rows.push(strategies.iter().map(|s| s.correlation(a, b)).collect());
            rhs.push(v);
        }
        match LinearProgram::feasibility(rows, rhs).solve() {
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Infeasible { .. } => {
                return Ok(FineResult {
                    feasible: false,
                    witness: None,
                })
            }
            other => {
                return Err(Error::MalformedTable(format!(
                    "feasibility LP did not finish: {other:?}"
                )))
            }
        }
    };
    let witness = strategies
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0.0)
        .collect();
    Ok(FineResult {
        feasible: true,
        witness: Some(witness),
    })
}

/// The four CHSH combinations of a (2,2) table, each with the minus sign on
/// a different pair:
///
/// ```text
/// c11 + c12 + c21 − c22
/// c12 + c21 + c22 − c11
/// c21 + c22 + c11 − c12
/// c22 + c11 + c12 − c21
/// ```
///
/// A table admits a hidden-variable model iff all four lie in [−2, 2].
pub fn fine_inequalities(c: &CorrelationTable) -> Result<[f64; 4]> {
    let s = c.scenario();
    if (s.m_a(), s.n_b()) != (2, 2) {
        return Err(Error::ScenarioMismatch {
            poly_a: 2,
            poly_b: 2,
            fam_a: s.m_a(),
            fam_b: s.n_b(),
        });
    }
    let get = |a, b| {
        c.get(a, b)
            .ok_or_else(|| Error::MalformedTable(format!("missing entry A{a}B{b}")))
    };
    let (c11, c12, c21, c22) = (get(1, 1)?, get(1, 2)?, get(2, 1)?, get(2, 2)?);
    Ok([
        c11 + c12 + c21 - c22,
        c12 + c21 + c22 - c11,
        c21 + c22 + c11 - c12,
        c22 + c11 + c12 - c21,
    ])
}

/// Whether all four values of [`fine_inequalities`] lie in [−2, 2] (with
/// `slack`).
pub fn fine_inequalities_hold(values: &[f64; 4], slack: f64) -> bool {
    values.iter().all(|v| v.abs() <= 2.0 + slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{chsh_polynomial, t_polynomial, Term};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn s22() -> Scenario {
        Scenario::new(2, 2).unwrap()
    }

    #[test]
    fn chsh_and_t_value_sets() {
        let v = enumerate_lhv(&chsh_polynomial()).unwrap();
        assert_eq!(v.value_set, vec![-2.0, 2.0]);
        assert_eq!(v.bounds, Interval { lo: -2.0, hi: 2.0 });

        let v = enumerate_lhv(&t_polynomial()).unwrap();
        assert_eq!(v.value_set, vec![-6.0, -2.0, 2.0, 6.0]);
        assert_eq!(v.bounds, Interval { lo: -6.0, hi: 6.0 });
    }

    #[test]
    fn single_term_and_zero_polynomial() {
        let p = BellPolynomial::new(s22(), [Term::new(1.0, 1, 1)]).unwrap();
        assert_eq!(enumerate_lhv(&p).unwrap().value_set, vec![-1.0, 1.0]);
        let z = BellPolynomial::zero(s22());
        assert_eq!(lhv_expectation_bounds(&z).unwrap(), Interval::point(0.0));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        for p in [chsh_polynomial(), t_polynomial()] {
            assert_eq!(
                enumerate_lhv_with(&p, Execution::Sequential).unwrap(),
                enumerate_lhv_with(&p, Execution::Parallel).unwrap()
            );
        }
    }

    #[test]
    fn lp_bounds_match_enumeration_for_named_polynomials() {
        for p in [chsh_polynomial(), t_polynomial()] {
            let a = lhv_expectation_bounds(&p).unwrap();
            let b = lp_expectation_bounds(&p).unwrap();
            assert!(a.approx_eq(&b, 1e-9), "{a} vs {b}");
        }
    }

    #[test]
    fn strategy_index_round_trip() {
        let s = Scenario::new(3, 6).unwrap();
        for i in [0, 1, 77, 511] {
            assert_eq!(DeterministicStrategy::from_index(s, i).index(), i);
        }
        let all_plus = DeterministicStrategy::from_index(s, 0);
        assert!(all_plus.a.iter().chain(&all_plus.b).all(|&v| v == 1));
    }

    #[test]
    fn zero_table_gets_uniform_witness() {
        let c = CorrelationTable::full(s22(), |_, _| 0.0).unwrap();
        let r = fine_feasible(&c).unwrap();
        assert!(r.feasible);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 16);
        assert!(w.iter().all(|(_, x)| (x - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn all_ones_table_gets_point_mass() {
        let c = CorrelationTable::full(s22(), |_, _| 1.0).unwrap();
        let r = fine_feasible(&c).unwrap();
        assert!(r.feasible);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0.index(), 0);
        assert!((w[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_quarter_pi_table_is_infeasible() {
        let h = FRAC_1_SQRT_2;
        let c = CorrelationTable::full(s22(), |a, b| if (a, b) == (2, 2) { h } else { -h }).unwrap();
        assert!(!fine_feasible(&c).unwrap().feasible);
        let f = fine_inequalities(&c).unwrap();
        assert!((f[0] + 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(!fine_inequalities_hold(&f, 1e-9));
    }

    #[test]
    fn fine_inequality_trivial_cases() {
        let zero = CorrelationTable::full(s22(), |_, _| 0.0).unwrap();
        assert_eq!(fine_inequalities(&zero).unwrap(), [0.0; 4]);
        let ones = CorrelationTable::full(s22(), |_, _| 1.0).unwrap();
        assert_eq!(fine_inequalities(&ones).unwrap(), [2.0; 4]);
        let big = CorrelationTable::full(Scenario::new(3, 2).unwrap(), |_, _| 0.0).unwrap();
        assert!(matches!(fine_inequalities(&big), Err(Error::ScenarioMismatch { .. })));
        let partial = CorrelationTable::new(s22(), [((1, 1), 0.5)]).unwrap();
        assert!(matches!(fine_inequalities(&partial), Err(Error::MalformedTable(_))));
    }

    #[test]
    fn table_validation() {
        assert!(CorrelationTable::new(s22(), [((1, 1), 1.0 + 1e-13)]).unwrap().get(1, 1) == Some(1.0));
        assert!(matches!(
            CorrelationTable::new(s22(), [((1, 1), 1.01)]),
            Err(Error::MalformedTable(_))
        ));
        assert!(CorrelationTable::new(s22(), [((3, 1), 0.0)]).is_err());
        assert!(CorrelationTable::new(s22(), [((1, 1), 0.0), ((1, 1), 0.1)]).is_err());
        assert!(CorrelationTable::new(s22(), [((1, 1), f64::NAN)]).is_err());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let c = CorrelationTable::full(s22(), |a, b| 0.25 * (a as f64) - 0.1 * (b as f64)).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("aIndex,bIndex,value\n"));
        assert_eq!(CorrelationTable::from_csv(buf.as_slice()).unwrap(), c);

        assert!(CorrelationTable::from_csv("a,b,c\n1,1,0\n".as_bytes()).is_err());
        assert!(matches!(
            CorrelationTable::from_csv("aIndex,bIndex,value\n1,1,zz\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            CorrelationTable::from_csv("aIndex,bIndex,value\n1,1,3\n".as_bytes()),
            Err(Error::MalformedTable(_))
        ));
    }

    #[test]
    fn oversized_scenarios_rejected_by_lp() {
        let c = CorrelationTable::full(Scenario::new(8, 8).unwrap(), |_, _| 0.0).unwrap();
        assert!(matches!(fine_feasible(&c), Err(Error::ScenarioTooLarge { .. })));
    }

    #[test]
    fn integer_parity_of_value_set() {
        let p = chsh_polynomial();
        let parity = p.coefficient_sum().rem_euclid(2.0);
        for v in enumerate_lhv(&p).unwrap().value_set {
            assert_eq!(v.fract(), 0.0);
            assert_eq!(v.rem_euclid(2.0), parity);
        }
    }

    fn small_poly() -> impl Strategy<Value = BellPolynomial> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(m, n)| {
            proptest::collection::vec((-4i32..=4, 1..=m, 1..=n), 0..8).prop_map(move |raw| {
                BellPolynomial::new(
                    Scenario::new(m, n).unwrap(),
                    raw.into_iter().map(|(c, a, b)| Term::new(f64::from(c), a, b)),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn negation_swaps_bounds(p in small_poly()) {
            let b = lhv_expectation_bounds(&p).unwrap();
            let nb = lhv_expectation_bounds(&p.scaled(-1.0)).unwrap();
            prop_assert_eq!(nb, Interval { lo: -b.hi, hi: -b.lo });
        }

        #[test]
        fn enumeration_matches_lp(p in small_poly()) {
            let a = lhv_expectation_bounds(&p).unwrap();
            let b = lp_expectation_bounds(&p).unwrap();
            prop_assert!(a.approx_eq(&b, 1e-9));
        }

        #[test]
        fn integer_values_share_parity(p in small_poly()) {
            let parity = p.coefficient_sum().rem_euclid(2.0);
            for v in enumerate_lhv(&p).unwrap().value_set {
                prop_assert_eq!(v.rem_euclid(2.0), parity);
            }
        }

        #[test]
        fn witnesses_reproduce_tables(c in proptest::collection::vec(-1.0f64..=1.0, 4)) {
            let t = CorrelationTable::full(s22(), |a, b| c[(a - 1) * 2 + (b - 1)]).unwrap();
            let r = fine_feasible(&t).unwrap();
            if let Some(w) = r.witness {
                let total: f64 = w.iter().map(|(_, x)| x).sum();
                prop_assert!((total - 1.0).abs() < WITNESS_TOL);
                for ((a, b), v) in t.entries() {
                    let got: f64 = w.iter().map(|(s, x)| x * s.correlation(a, b)).sum();
                    prop_assert!((got - v).abs() < WITNESS_TOL);
                }
            }
        }
    }
}
