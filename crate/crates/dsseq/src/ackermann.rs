//! Ackermann hierarchy, its inverses, the hatted hierarchy used by the
//! even-order construction analysis, and sandwich comparisons between
//! Ackermann-like rows.

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::bounds::m0;
use crate::error::{Error, Result};
use crate::tower::{Dir, Level, Magnitude, TowerNumber, DEFAULT_BIT_BUDGET};

/// Lower bound for `A_3(x)` once `x` no longer fits in a `u64`.
fn beyond_u64_bound() -> Magnitude {
    Magnitude::Bounds {
        lower: TowerNumber::new(u64::MAX, BigRational::from_integer(2.into())),
        upper: None,
    }
}

fn exact_or_bounds(n: BigUint, budget: u64) -> Magnitude {
    if n.bits() <= budget {
        Magnitude::Exact(n)
    } else {
        Magnitude::from_levels(
            Level::from_int(&n, Dir::Down),
            Some(Level::from_int(&n, Dir::Up)),
            budget,
        )
    }
}

fn exact_tower(t: TowerNumber, budget: u64) -> Magnitude {
    match t.materialize(budget) {
        Some(n) => Magnitude::Exact(n),
        None => Magnitude::Bounds {
            lower: t.clone(),
            upper: Some(t),
        },
    }
}

pub(crate) fn mag_exp2(x: &Magnitude, budget: u64) -> Magnitude {
    match x {
        Magnitude::Exact(n) => match n.to_u64().filter(|&e| e <= budget) {
            Some(e) => Magnitude::Exact(BigUint::one() << e),
            None => exact_tower(TowerNumber::from_int(n).exp2(), budget),
        },
        Magnitude::Bounds { lower, upper } => Magnitude::Bounds {
            lower: lower.exp2(),
            upper: upper.as_ref().map(|u| u.exp2()),
        },
    }
}

pub(crate) fn mag_mul(x: &Magnitude, y: &Magnitude, budget: u64) -> Magnitude {
    if let (Magnitude::Exact(a), Magnitude::Exact(b)) = (x, y) {
        if a.bits() + b.bits() <= budget + 1 {
            return exact_or_bounds(a * b, budget);
        }
    }
    let lo = x.lower_level().mul(y.lower_level(), Dir::Down);
    let hi = match (x.upper_level(), y.upper_level()) {
        (Some(a), Some(b)) => Some(a.mul(b, Dir::Up)),
        _ => None,
    };
    Magnitude::from_levels(lo, hi, budget)
}

fn small(x: &Magnitude) -> Option<u64> {
    x.exact().and_then(|n| n.to_u64())
}

/// `A_k(n)` as an exact integer or tower bounds.
pub fn ackermann_magnitude(k: u32, n: u64, budget: u64) -> Magnitude {
    assert!(k >= 1, "hierarchy levels start at 1");
    apply_level(k, &Magnitude::Exact(BigUint::from(n)), budget)
}

fn apply_level(k: u32, x: &Magnitude, budget: u64) -> Magnitude {
    match k {
        1 => mag_mul(x, &Magnitude::Exact(BigUint::from(2u32)), budget),
        2 => mag_exp2(x, budget),
        _ => {
            let Some(n) = small(x) else {
                return beyond_u64_bound();
            };
            if n == 0 {
                return Magnitude::Exact(BigUint::one());
            }
            if k == 3 {
                let t = TowerNumber::new(n - 1, BigRational::from_integer(2.into()));
                return exact_tower(t, budget);
            }
            let mut v = Magnitude::Exact(BigUint::one());
            for _ in 0..n {
                v = apply_level(k - 1, &v, budget);
            }
            v
        }
    }
}

fn budget_error(what: String, needed: Magnitude) -> Error {
    Error::BudgetExceeded {
        what,
        needed: Box::new(needed),
        budget: DEFAULT_BIT_BUDGET,
    }
}

/// Exact `A_k(n)` within the default bit budget.
pub fn ackermann_level(k: u32, n: u64) -> Result<BigUint> {
    match ackermann_magnitude(k, n, DEFAULT_BIT_BUDGET) {
        Magnitude::Exact(v) => Ok(v),
        m => Err(budget_error(format!("A_{k}({n})"), m)),
    }
}

/// `A(n) = A_n(3)` as a magnitude.
pub fn ackermann_function_magnitude(n: u32, budget: u64) -> Magnitude {
    ackermann_magnitude(n, 3, budget)
}

/// Exact `A(n) = A_n(3)`; only `n <= 4` fits any realistic budget.
pub fn ackermann(n: u32) -> Result<BigUint> {
    match ackermann_function_magnitude(n, DEFAULT_BIT_BUDGET) {
        Magnitude::Exact(v) => Ok(v),
        m => Err(budget_error(format!("A({n})"), m)),
    }
}

/// `A(n)` evaluated through `A(n) = A_{n-2}(A(n-1))` starting from `A(1)`, `A(2)`.
pub fn ackermann_by_diagonal_recurrence(n: u32) -> Result<BigUint> {
    let base = |m: u32| ackermann_level(m, 3);
    if n <= 2 {
        return base(n);
    }
    let mut v = base(2)?;
    for j in 3..=n {
        let arg = v
            .to_u64()
            .ok_or_else(|| budget_error(format!("A({j})"), beyond_u64_bound()))?;
        v = ackermann_level(j - 2, arg)?;
    }
    Ok(v)
}

/// `alpha_k(x)` by its recursive definition:
/// `alpha_1(x) = ceil(x/2)` and `alpha_k(x) = 1 + alpha_k(alpha_{k-1}(x))` for `x > 1`.
pub fn alpha_level(k: u32, x: u64) -> u64 {
    assert!(k >= 1, "hierarchy levels start at 1");
    if k == 1 {
        return x.div_ceil(2);
    }
    let (mut x, mut steps) = (x, 0);
    while x > 1 {
        x = alpha_level(k - 1, x);
        steps += 1;
    }
    steps
}

/// `min { n : A_k(n) >= x }`, precomputed for all `x <= limit`.
pub struct LevelInverse {
    values: Vec<u64>,
}

impl LevelInverse {
    pub fn new(k: u32, limit: u64) -> Self {
        let mut values = Vec::new();
        loop {
            let n = values.len() as u64;
            let v = ackermann_magnitude(k, n, 64);
            let v = small(&v).unwrap_or(u64::MAX);
            values.push(v);
            if v >= limit {
                break;
            }
        }
        LevelInverse { values }
    }

    pub fn min_n(&self, x: u64) -> u64 {
        self.values.partition_point(|&v| v < x) as u64
    }
}

/// `alpha_k(x)` as the least `n` with `A_k(n) >= x`.
pub fn alpha_level_by_inverse(k: u32, x: u64) -> u64 {
    LevelInverse::new(k, x).min_n(x)
}

/// `alpha(x) = min { k : alpha_k(x) <= 3 }`.
pub fn alpha(x: u64) -> u64 {
    (1..).find(|&k| alpha_level(k as u32, x) <= 3).unwrap()
}

/// `alpha(x)` as the least `n >= 1` with `A(n) >= x`.
pub fn alpha_by_inverse(x: u64) -> u64 {
    let target = Magnitude::Exact(BigUint::from(x));
    (1u32..)
        .find(|&n| {
            target
                .le(&ackermann_function_magnitude(n, DEFAULT_BIT_BUDGET))
                .expect("A(n) is comparable with a u64")
        })
        .unwrap() as u64
}

/// `Â_k(m)`: `Â_0(m) = m`, `Â_k(1) = 1`, and
/// `Â_k(m) = m * Â_{k-1}(Â_{k-1}(2^(2^k) * Â_k(m-1)))`.
pub fn a_hat(k: u32, m: u64, budget: u64) -> Magnitude {
    a_hat_apply(k, &Magnitude::Exact(BigUint::from(m)), budget)
}

/// Arguments above this are handled by closed-form bounds rather than recursion.
const A_HAT_RECURSION_LIMIT: u64 = 1 << 16;

fn a_hat_apply(k: u32, x: &Magnitude, budget: u64) -> Magnitude {
    if k == 0 {
        return x.clone();
    }
    if let Some(m) = small(x).filter(|&m| m <= A_HAT_RECURSION_LIMIT) {
        let factor = Magnitude::Exact(BigUint::one() << (1u64 << k));
        let mut v = Magnitude::Exact(BigUint::one());
        for j in 2..=m {
            let inner = mag_mul(&factor, &v, budget);
            let once = a_hat_apply(k - 1, &inner, budget);
            let twice = a_hat_apply(k - 1, &once, budget);
            v = mag_mul(&Magnitude::Exact(BigUint::from(j)), &twice, budget);
        }
        return v;
    }
    if k == 1 {
        return a_hat_1_bounds(x, budget);
    }
    // Only the trivial bound Â_k(y) >= y is available here.
    Magnitude::Bounds {
        lower: x.lower(),
        upper: None,
    }
}

/// Bounds on `Â_1(y) = 4^(y-1) y!` for large `y`:
/// `2^(y log2 y) <= Â_1(y) <= 2^(y log2(4y))`.
fn a_hat_1_bounds(y: &Magnitude, budget: u64) -> Magnitude {
    let lo = y.lower_level();
    let lo = lo.mul(lo.log2(Dir::Down), Dir::Down).exp2(Dir::Down);
    let hi = y.upper_level().map(|h| {
        let four_h = h.mul(Level::from_f64(4.0), Dir::Up);
        h.mul(four_h.log2(Dir::Up), Dir::Up).exp2(Dir::Up)
    });
    Magnitude::from_levels(lo, hi, budget)
}

/// `Â_1(m) = 2^(2m-2) m!` evaluated directly.
pub fn a_hat_1_closed_form(m: u64) -> BigUint {
    let fact: BigUint = (1..=m).map(BigUint::from).product();
    fact << (2 * m - 2)
}

/// The hatted inverse: `α̂_2(x) = ceil(log2 x)` and, for `k >= 3`,
/// `α̂_k(x) = 1` if `x <= m0(s)`, else `1 + α̂_k(1 + 2 α̂_{k-1}(x)^(s-2))`.
pub fn alpha_hat_level(k: u32, x: u64, s: u32, m0_s: u64) -> u64 {
    assert!(k >= 2, "hatted inverse levels start at 2");
    if k == 2 {
        return if x <= 1 { 0 } else { 64 - (x - 1).leading_zeros() as u64 };
    }
    let (mut x, mut steps) = (x, 1);
    while x > m0_s {
        let inner = alpha_hat_level(k - 1, x, s, m0_s);
        x = 1 + 2 * inner.pow(s - 2);
        steps += 1;
    }
    steps
}

/// Largest `|α̂_k(x) - α_k(x)|` over `2 <= k <= k_max` and `1 <= x <= x_max`.
pub fn alpha_hat_deviation(s: u32, k_max: u32, x_max: u64) -> u64 {
    let m0_s = m0(s);
    let mut worst = 0;
    for k in 2..=k_max {
        for x in 1..=x_max {
            let d = alpha_hat_level(k, x, s, m0_s).abs_diff(alpha_level(k, x));
            worst = worst.max(d);
        }
    }
    worst
}

/// A row of an Ackermann-like hierarchy, viewed as a function of one argument.
#[derive(Clone)]
pub enum HierarchySpec {
    /// `n -> A_k(n)`.
    Ackermann { level: u32 },
    /// `n -> Â_k(n)`.
    AHat { level: u32 },
    /// Any other row supplied as an evaluator `(n, bit budget) -> value`.
    Row {
        name: String,
        eval: fn(u64, u64) -> Magnitude,
    },
}

impl HierarchySpec {
    pub fn eval(&self, n: u64, budget: u64) -> Magnitude {
        match self {
            HierarchySpec::Ackermann { level } => ackermann_magnitude(*level, n, budget),
            HierarchySpec::AHat { level } => a_hat(*level, n, budget),
            HierarchySpec::Row { eval, .. } => eval(n, budget),
        }
    }

    pub fn name(&self) -> String {
        match self {
            HierarchySpec::Ackermann { level } => format!("A_{level}"),
            HierarchySpec::AHat { level } => format!("Ahat_{level}"),
            HierarchySpec::Row { name, .. } => name.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SandwichOutcome {
    Holds,
    Violated,
    Incomparable,
}

#[derive(Debug, Clone)]
pub struct SandwichRow {
    pub n: u64,
    pub lhs: Magnitude,
    pub rhs: Magnitude,
    pub outcome: SandwichOutcome,
}

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub lhs_name: String,
    pub rhs_name: String,
    pub d: u64,
    pub c: u64,
    pub rows: Vec<SandwichRow>,
}

impl SandwichReport {
    pub fn count(&self, outcome: SandwichOutcome) -> usize {
        self.rows.iter().filter(|r| r.outcome == outcome).count()
    }

    pub fn all_hold(&self) -> bool {
        self.count(SandwichOutcome::Holds) == self.rows.len()
    }
}

/// Checks `F(n) <= G(d n + c)` for each `n` in `range`.
pub fn hierarchy_sandwich_check(
    f: &HierarchySpec,
    g: &HierarchySpec,
    d: u64,
    c: u64,
    range: RangeInclusive<u64>,
    budget: u64,
) -> SandwichReport {
    let rows = range
        .map(|n| {
            let lhs = f.eval(n, budget);
            let rhs = g.eval(d * n + c, budget);
            let outcome = match lhs.le(&rhs) {
                Some(true) => SandwichOutcome::Holds,
                Some(false) => SandwichOutcome::Violated,
                None => SandwichOutcome::Incomparable,
            };
            SandwichRow { n, lhs, rhs, outcome }
        })
        .collect();
    SandwichReport {
        lhs_name: f.name(),
        rhs_name: g.name(),
        d,
        c,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn level_examples() {
        assert_eq!(ackermann_level(2, 10).unwrap(), big(1024));
        for k in 1..=10 {
            assert_eq!(ackermann_level(k, 1).unwrap(), big(2));
            assert_eq!(ackermann_level(k, 2).unwrap(), big(4));
        }
        assert_eq!(ackermann_level(1, 7).unwrap(), big(14));
        assert_eq!(ackermann_level(3, 4).unwrap(), big(65536));
    }

    #[test]
    fn diagonal_values_and_recurrence() {
        let expect = [6u64, 8, 16, 65536];
        for (i, &v) in expect.iter().enumerate() {
            let n = i as u32 + 1;
            assert_eq!(ackermann(n).unwrap(), big(v));
            assert_eq!(ackermann_by_diagonal_recurrence(n).unwrap(), big(v));
        }
        match ackermann(5) {
            Err(Error::BudgetExceeded { needed, .. }) => {
                assert!(needed.lower().height() >= 60000);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(alpha_level(2, 1024), 10);
        assert_eq!(alpha_level(3, 65536), 4);
        for k in 2..6 {
            assert_eq!(alpha_level(k, 1), 0);
        }
        assert_eq!(alpha(65536), 4);
        assert_eq!(alpha(17), 4);
        assert_eq!(alpha(6), 1);
        assert_eq!(alpha_by_inverse(17), 4);
        assert_eq!(alpha_by_inverse(65537), 5);
    }

    #[test]
    fn inverse_definitions_agree_on_a_prefix() {
        for k in 1..=5 {
            let table = LevelInverse::new(k, 5000);
            for x in 0..=5000 {
                assert_eq!(alpha_level(k, x), table.min_n(x), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn a_hat_examples() {
        assert_eq!(a_hat(0, 9, 1000), Magnitude::Exact(big(9)));
        assert_eq!(a_hat(1, 3, 1000), Magnitude::Exact(big(96)));
        assert_eq!(a_hat(1, 5, 1000), Magnitude::Exact(big(30720)));
        assert_eq!(a_hat(2, 1, 1000), Magnitude::Exact(big(1)));
        assert_eq!(a_hat_1_closed_form(5), big(30720));
    }

    #[test]
    fn sandwich_reflexive_and_a_hat_base() {
        let a3 = HierarchySpec::Ackermann { level: 3 };
        let r = hierarchy_sandwich_check(&a3, &a3, 1, 0, 0..=6, 1000);
        assert!(r.all_hold());
        let h2 = HierarchySpec::AHat { level: 2 };
        let r = hierarchy_sandwich_check(&h2, &a3, 2, 4, 1..=1, 1000);
        assert!(r.all_hold());
    }
}
