//! Iterated powers of two for ordering numbers too large to materialize.
//!
//! [`TowerNumber`] is an exact value `2^2^...^top` with `height` exponentials.
//! [`Magnitude`] is either an exact integer or a pair of tower bounds.
//! Internally, bound arithmetic runs on [`Level`], a `(height, f64)` form with
//! outward rounding after every step.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Default limit on materialized bit lengths.
pub const DEFAULT_BIT_BUDGET: u64 = 1_000_000;

/// Tops are kept below `2^NORMALIZATION_BITS` whenever that can be done exactly.
pub const NORMALIZATION_BITS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerNumber {
    height: u64,
    top: BigRational,
}

impl TowerNumber {
    /// `2^...^top` with `height` exponentials. `top` must be at least 1.
    pub fn new(height: u64, top: BigRational) -> Self {
        assert!(top >= BigRational::one(), "tower top must be at least 1");
        let mut t = TowerNumber { height, top };
        t.normalize();
        t
    }

    pub fn from_int(n: &BigUint) -> Self {
        TowerNumber::new(0, BigRational::from_integer(n.clone().into()))
    }

    pub fn from_u64(n: u64) -> Self {
        TowerNumber::from_int(&BigUint::from(n))
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn top(&self) -> &BigRational {
        &self.top
    }

    /// `2^self`.
    pub fn exp2(&self) -> Self {
        TowerNumber::new(self.height + 1, self.top.clone())
    }

    fn normalize(&mut self) {
        loop {
            if let Some(e) = exact_log2(&self.top) {
                if e >= NORMALIZATION_BITS {
                    self.height += 1;
                    self.top = BigRational::from_integer(e.into());
                    continue;
                }
            }
            if self.height > 0 && self.top.is_integer() {
                if let Some(e) = self.top.to_integer().to_u64() {
                    if e < NORMALIZATION_BITS {
                        self.height -= 1;
                        self.top = BigRational::from_integer((BigUint::one() << e).into());
                        continue;
                    }
                }
            }
            break;
        }
    }

    /// Exact integer value when it has at most `bit_budget` bits.
    pub fn materialize(&self, bit_budget: u64) -> Option<BigUint> {
        if !self.top.is_integer() {
            return None;
        }
        let mut v = self.top.to_integer().to_biguint()?;
        for _ in 0..self.height {
            let e = v.to_u64().filter(|&e| e <= bit_budget)?;
            v = BigUint::one() << e;
        }
        Some(v)
    }

    pub(crate) fn level(&self, dir: Dir) -> Level {
        let base = Level::from_rational(&self.top, dir);
        let mut l = base;
        for _ in 0..self.height.min(4) {
            l = l.exp2(dir);
        }
        if self.height > 4 {
            l = Level::normalized(l.h + (self.height - 4), l.x, dir);
        }
        l
    }

    /// Ordering of the represented values, or `None` when the rounding
    /// intervals overlap and no exact evaluation is possible.
    pub fn compare(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            return Some(Ordering::Equal);
        }
        if self.height == 0 && other.height == 0 {
            return Some(self.top.cmp(&other.top));
        }
        if let (Some(a), Some(b)) = (
            self.materialize(DEFAULT_BIT_BUDGET),
            other.materialize(DEFAULT_BIT_BUDGET),
        ) {
            return Some(a.cmp(&b));
        }
        let (alo, ahi) = (self.level(Dir::Down), self.level(Dir::Up));
        let (blo, bhi) = (other.level(Dir::Down), other.level(Dir::Up));
        if ahi.lt(&blo) {
            Some(Ordering::Less)
        } else if bhi.lt(&alo) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

impl fmt::Display for TowerNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.height == 0 {
            write!(f, "{}", self.top)
        } else {
            write!(f, "tower(height={}, top={})", self.height, self.top)
        }
    }
}

fn exact_log2(q: &BigRational) -> Option<u64> {
    if !q.is_integer() {
        return None;
    }
    let n = q.to_integer().to_biguint()?;
    if n.is_zero() {
        return None;
    }
    let b = n.bits() - 1;
    (n == BigUint::one() << b).then_some(b)
}

/// Serialized form: `{"height": h, "top": "p/q"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerJson {
    pub height: u64,
    pub top: String,
}

impl From<&TowerNumber> for TowerJson {
    fn from(t: &TowerNumber) -> Self {
        TowerJson {
            height: t.height,
            top: t.top.to_string(),
        }
    }
}

/// An exact integer, or bounds on one that was too large to materialize.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitude {
    Exact(BigUint),
    Bounds {
        lower: TowerNumber,
        upper: Option<TowerNumber>,
    },
}

impl Magnitude {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Magnitude::Exact(n) => Some(n),
            Magnitude::Bounds { .. } => None,
        }
    }

    pub fn lower(&self) -> TowerNumber {
        match self {
            Magnitude::Exact(n) => TowerNumber::from_int(n),
            Magnitude::Bounds { lower, .. } => lower.clone(),
        }
    }

    pub fn upper(&self) -> Option<TowerNumber> {
        match self {
            Magnitude::Exact(n) => Some(TowerNumber::from_int(n)),
            Magnitude::Bounds { upper, .. } => upper.clone(),
        }
    }

    /// Decides `self <= other` when the bounds allow it.
    pub fn le(&self, other: &Magnitude) -> Option<bool> {
        if let (Magnitude::Exact(a), Magnitude::Exact(b)) = (self, other) {
            return Some(a <= b);
        }
        if let Some(up) = self.upper() {
            if matches!(up.compare(&other.lower()), Some(Ordering::Less | Ordering::Equal)) {
                return Some(true);
            }
        }
        if let Some(up) = other.upper() {
            if matches!(self.lower().compare(&up), Some(Ordering::Greater)) {
                return Some(false);
            }
        }
        None
    }

    pub(crate) fn from_levels(lo: Level, hi: Option<Level>, bit_budget: u64) -> Magnitude {
        let lower = lo.to_tower();
        let upper = hi.map(|h| h.to_tower());
        if let (Some(a), Some(b)) = (
            lower.materialize(bit_budget),
            upper.as_ref().and_then(|u| u.materialize(bit_budget)),
        ) {
            if a == b {
                return Magnitude::Exact(a);
            }
        }
        Magnitude::Bounds { lower, upper }
    }

    pub(crate) fn lower_level(&self) -> Level {
        match self {
            Magnitude::Exact(n) => Level::from_int(n, Dir::Down),
            Magnitude::Bounds { lower, .. } => lower.level(Dir::Down),
        }
    }

    pub(crate) fn upper_level(&self) -> Option<Level> {
        match self {
            Magnitude::Exact(n) => Some(Level::from_int(n, Dir::Up)),
            Magnitude::Bounds { upper, .. } => upper.as_ref().map(|u| u.level(Dir::Up)),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Magnitude::Exact(n) => serde_json::json!({ "value": n.to_string() }),
            Magnitude::Bounds { lower, upper } => serde_json::json!({
                "tower": {
                    "lower": TowerJson::from(lower),
                    "upper": upper.as_ref().map(TowerJson::from),
                }
            }),
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(n) if n.bits() <= 256 => write!(f, "{n}"),
            Magnitude::Exact(n) => write!(f, "<{}-bit integer>", n.bits()),
            Magnitude::Bounds { lower, upper: Some(u) } => write!(f, "between {lower} and {u}"),
            Magnitude::Bounds { lower, upper: None } => write!(f, "at least {lower}"),
        }
    }
}

/// Rounding direction for one-sided bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    Down,
    Up,
}

const EPS: f64 = 1e-12;
/// Float tops live below `2^LEVEL_BITS`; above that one more exponential is split off.
const LEVEL_BITS: f64 = 60.0;

fn nudge(x: f64, dir: Dir) -> f64 {
    let d = x.abs() * EPS + 1e-300;
    match dir {
        Dir::Down => x - d,
        Dir::Up => x + d,
    }
}

/// `E^h(x)` where `E(y) = 2^y`, kept canonical: `h = 0` and `x < 2^60`, or
/// `h >= 1` and `60 < x < 2^60`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Level {
    pub h: u64,
    pub x: f64,
}

impl Level {
    pub fn normalized(mut h: u64, mut x: f64, dir: Dir) -> Level {
        loop {
            if x >= LEVEL_BITS.exp2() {
                x = nudge(x.log2(), dir);
                h += 1;
            } else if h >= 1 && x <= LEVEL_BITS {
                x = nudge(x.exp2(), dir);
                h -= 1;
            } else {
                return Level { h, x };
            }
        }
    }

    pub fn from_f64(x: f64) -> Level {
        Level::normalized(0, x, Dir::Down)
    }

    pub fn from_int(n: &BigUint, dir: Dir) -> Level {
        if n.bits() <= 52 {
            return Level::normalized(0, n.to_f64().unwrap(), dir);
        }
        Level::normalized(1, log2_big(n, dir), dir)
    }

    fn from_rational(q: &BigRational, dir: Dir) -> Level {
        let num = q.numer().to_biguint().expect("tower top is positive");
        let den = q.denom().to_biguint().expect("denominator is positive");
        if num.bits() <= 52 && den.bits() <= 52 {
            let v = num.to_f64().unwrap() / den.to_f64().unwrap();
            return Level::normalized(0, nudge(v, dir), dir);
        }
        let flip = match dir {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        };
        let lg = nudge(log2_big(&num, dir) - log2_big(&den, flip), dir);
        Level::normalized(0, nudge(lg.exp2(), dir), dir).max_with_log(lg, dir)
    }

    /// Picks the exponential form when the direct float overflows.
    fn max_with_log(self, lg: f64, dir: Dir) -> Level {
        if self.x.is_finite() {
            self
        } else {
            Level::normalized(1, lg, dir)
        }
    }

    pub fn exp2(self, dir: Dir) -> Level {
        Level::normalized(self.h + 1, self.x, dir)
    }

    pub fn log2(self, dir: Dir) -> Level {
        if self.h >= 1 {
            Level::normalized(self.h - 1, self.x, dir)
        } else {
            Level::normalized(0, nudge(self.x.log2(), dir), dir)
        }
    }

    pub fn lt(&self, other: &Level) -> bool {
        (self.h, self.x) < (other.h, other.x)
    }

    pub fn add(self, other: Level, dir: Dir) -> Level {
        let (a, b) = if self.lt(&other) { (other, self) } else { (self, other) };
        if a.h == 0 {
            return Level::normalized(0, nudge(a.x + b.x, dir), dir);
        }
        match dir {
            Dir::Down => a,
            Dir::Up if a.h == 1 => {
                let la = a.x;
                let lb = if b.h == 0 { b.x.max(1e-300).log2() } else { b.x };
                let lg = la + (1.0 + (lb - la).exp2()).log2();
                Level::normalized(1, nudge(nudge(lg, dir), dir), dir)
            }
            Dir::Up => Level::normalized(a.h, nudge(a.x, dir), dir),
        }
    }

    /// Product of two values that are both at least 1.
    pub fn mul(self, other: Level, dir: Dir) -> Level {
        if self.h == 0 && other.h == 0 {
            return Level::normalized(0, nudge(self.x * other.x, dir), dir);
        }
        self.log2(dir).add(other.log2(dir), dir).exp2(dir)
    }

    pub fn to_tower(self) -> TowerNumber {
        let top = BigRational::from_float(self.x.max(1.0)).expect("finite level");
        TowerNumber::new(self.h, top)
    }
}

/// Directed bound on `log2 n` for a positive integer.
pub(crate) fn log2_big(n: &BigUint, dir: Dir) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return nudge(n.to_f64().unwrap().log2(), dir);
    }
    let shift = bits - 64;
    let lead: BigUint = n >> shift;
    let lead = lead.to_u64().unwrap() as f64;
    let v = match dir {
        Dir::Down => lead.log2(),
        Dir::Up => (lead + 1.0).log2(),
    };
    nudge(v + shift as f64, dir)
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: &BigUint) -> u64 {
    if n.is_zero() {
        return 0;
    }
    let b = n.bits();
    if n == &(BigUint::one() << (b - 1)) {
        b - 1
    } else {
        b
    }
}

/// Integer division rounding up.
pub fn div_ceil(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(h: u64, top: u64) -> TowerNumber {
        TowerNumber::new(h, BigRational::from_integer(top.into()))
    }

    #[test]
    fn normalization_is_canonical_for_powers() {
        assert_eq!(t(0, 16), t(1, 4));
        assert_eq!(t(2, 2), t(0, 16));
        let big = BigUint::one() << 100u32;
        assert_eq!(TowerNumber::from_int(&big), t(1, 100));
        assert_eq!(t(1, 100).height(), 1);
        assert_eq!(t(3, 2).materialize(100), Some(BigUint::from(65536u32)));
    }

    #[test]
    fn huge_towers_order_by_height() {
        assert_eq!(t(65535, 2).compare(&t(65534, 16)), Some(Ordering::Less));
        assert_eq!(t(10, 3).compare(&t(11, 2)), Some(Ordering::Less));
        assert_eq!(t(10, 100).compare(&t(12, 2)), Some(Ordering::Greater));
        assert_eq!(t(5, 70).compare(&t(5, 71)), Some(Ordering::Less));
    }

    #[test]
    fn levels_bracket_exact_values() {
        for n in [1u64, 2, 3, 1000, 123_456_789, 1 << 52] {
            let b = BigUint::from(n);
            let lo = Level::from_int(&b, Dir::Down);
            let hi = Level::from_int(&b, Dir::Up);
            assert!(lo.x <= n as f64 && (n as f64) <= hi.x * (1.0 + 1e-9));
        }
        let big = (BigUint::one() << 5000u32) + 12345u32;
        let lo = Level::from_int(&big, Dir::Down);
        let hi = Level::from_int(&big, Dir::Up);
        assert_eq!((lo.h, hi.h), (1, 1));
        assert!(lo.x <= 5000.0 && hi.x > 5000.0);
    }

    #[test]
    fn magnitude_le_decides_separated_values() {
        let small = Magnitude::Exact(BigUint::from(65536u32));
        let huge = Magnitude::Bounds {
            lower: t(4, 100),
            upper: None,
        };
        assert_eq!(small.le(&huge), Some(true));
        assert_eq!(huge.le(&small), Some(false));
    }
}
