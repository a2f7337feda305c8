//! Constant families of the upper-bound recurrences and their growth.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ackermann::{alpha_hat_deviation, alpha_level};
use crate::constructions::multiplicity;
use crate::error::{Error, Result};
use crate::tower::{log2_big, Dir};

/// Smallest `M` with `m >= 2 + 2 ceil(log2 m)^(s-2)` for every `m >= M`.
pub fn m0(s: u32) -> u64 {
    assert!((3..=12).contains(&s), "m0 is tabulated for 3 <= s <= 12");
    // On (2^(j-1), 2^j] the right-hand side is constant, so the last failing m
    // in that range is min(2^j, 1 + 2 j^(s-2)).
    let mut last_fail: u128 = 0;
    for j in 0u32..=126 {
        let rhs = (j as u128)
            .checked_pow(s - 2)
            .and_then(|p| p.checked_mul(2))
            .and_then(|p| p.checked_add(2))
            .unwrap_or(u128::MAX);
        let (lo, hi) = if j == 0 {
            (1, 1)
        } else {
            ((1u128 << (j - 1)) + 1, 1u128 << j)
        };
        if rhs > lo {
            last_fail = last_fail.max(hi.min(rhs - 1));
        }
    }
    (last_fail + 1) as u64
}

/// Multiplicative slack constants of the `k >= 3` recurrence. Both default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tuning {
    pub d_s: u64,
    pub d_prime_s: u64,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning { d_s: 1, d_prime_s: 1 }
    }
}

/// Memoized `P_{s,k}`, `Q_{s,k}`.
#[derive(Debug, Default)]
pub struct PqTable {
    tuning: Tuning,
    memo: HashMap<(u32, u32), (BigUint, BigUint)>,
}

impl PqTable {
    pub fn new(tuning: Tuning) -> Self {
        PqTable {
            tuning,
            memo: HashMap::new(),
        }
    }

    pub fn get(&mut self, s: u32, k: u32) -> (BigUint, BigUint) {
        assert!(s >= 1 && k >= 2, "P, Q are defined for s >= 1, k >= 2");
        match s {
            1 => return (BigUint::zero(), BigUint::one()),
            2 => return (BigUint::zero(), BigUint::from(2u32)),
            _ => {}
        }
        if let Some(v) = self.memo.get(&(s, k)) {
            return v.clone();
        }
        let (p1, q1) = self.get(s - 1, k);
        let (p2, q2) = self.get(s - 2, k);
        let v = if k == 2 {
            let p = 4u32 * p1 + 2u32 * p2 + 2u32 * &q2 + 8u32;
            let q = (2u32 * q1 + 2u32 * q2).max(BigUint::from(m0(s)));
            (p, q)
        } else {
            let (pk, qk) = self.get(s, k - 1);
            let p = &q2 * (BigUint::one() + pk) + 2u64 * self.tuning.d_s * p1 + self.tuning.d_prime_s * p2 + 4u32;
            let q = q2 * qk + 2u32 * q1;
            (p, q)
        };
        self.memo.insert((s, k), v.clone());
        v
    }
}

/// `(P_{s,k}, Q_{s,k})` with default tuning.
pub fn pq_constants(s: u32, k: u32) -> (BigUint, BigUint) {
    PqTable::default().get(s, k)
}

/// Memoized `R_s(d)`.
#[derive(Debug, Default)]
pub struct RTable {
    memo: HashMap<(u32, u32), BigInt>,
}

impl RTable {
    pub fn get(&mut self, s: u32, d: u32) -> BigInt {
        assert!(s >= 1 && d >= 2, "R is defined for s >= 1, d >= 2");
        match s {
            1 => return BigInt::from(2),
            2 => return BigInt::from(3),
            _ => {}
        }
        if d == 2 {
            return (BigInt::one() << (s - 1)) + 1;
        }
        if let Some(v) = self.memo.get(&(s, d)) {
            return v.clone();
        }
        let prev = self.get(s, d - 1);
        let two_below = self.get(s - 2, d);
        let below = self.get(s - 1, d);
        let v: BigInt = &prev * &two_below + 2 * below - 3 * two_below - prev + 2;
        self.memo.insert((s, d), v.clone());
        v
    }
}

/// `R_s(d)`.
pub fn r_constants(s: u32, d: u32) -> Result<BigUint> {
    RTable::default()
        .get(s, d)
        .to_biguint()
        .ok_or_else(|| Error::Internal(format!("R_{s}({d}) evaluated negative")))
}

/// `P_{s,k} m (alpha_k(m) + c)^(s-2) + Q_{s,k} n`, the upper bound on the
/// length of order-`s` DS sequences made of `m` blocks on `n` symbols.
pub fn psi_upper_eval(table: &mut PqTable, s: u32, k: u32, m: u64, n: u64, c: u64) -> BigUint {
    let (p, q) = table.get(s, k);
    let q_term = q * n;
    if s < 2 || m == 0 {
        return q_term;
    }
    let a = BigUint::from(alpha_level(k, m) + c);
    p * m * a.pow(s - 2) + q_term
}

/// The deviation constant `max |α̂_k - α_k|` over `2 <= k <= 4`, `x <= x_max`.
pub fn measured_deviation(s: u32, x_max: u64) -> u64 {
    alpha_hat_deviation(s, 4, x_max)
}

/// Which constant family a growth report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    P,
    Q,
    R,
    Mu,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" => Ok(Family::P),
            "q" => Ok(Family::Q),
            "r" => Ok(Family::R),
            "mu" => Ok(Family::Mu),
            _ => Err(Error::InvalidInput(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub index: u32,
    pub log2: f64,
    /// `log2 C / (k^t / t!)` for even `s`, `log2 C / (k^t log2 k / t!)` for odd `s`.
    pub normalized: f64,
    pub first_diff: Option<f64>,
    pub second_diff: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub family: Family,
    pub s: u32,
    pub t: u32,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    /// Largest `|second difference - target|` over rows with `index >= from`.
    pub fn second_diff_deviation(&self, from: u32, target: f64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.index >= from)
            .filter_map(|r| r.second_diff)
            .map(|x| (x - target).abs())
            .fold(0.0, f64::max)
    }
}

fn log2_value(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    (log2_big(v, Dir::Down) + log2_big(v, Dir::Up)) / 2.0
}

/// Log-space growth diagnostics of a constant family for fixed `s`.
pub fn growth_check(family: Family, s: u32, range: std::ops::RangeInclusive<u32>) -> Result<GrowthReport> {
    let t = s.saturating_sub(2) / 2;
    let mut pq = PqTable::default();
    let mut r = RTable::default();
    let mut values = Vec::new();
    for i in range {
        let v = match family {
            Family::P => pq.get(s, i.max(2)).0,
            Family::Q => pq.get(s, i.max(2)).1,
            Family::R => r
                .get(s, i.max(2))
                .to_biguint()
                .ok_or_else(|| Error::Internal(format!("R_{s}({i}) evaluated negative")))?,
            Family::Mu => {
                if s % 2 == 1 {
                    return Err(Error::InvalidInput("multiplicities exist only for even s".into()));
                }
                multiplicity(s as u64, i as u64)
            }
        };
        values.push((i, log2_value(&v)));
    }
    let fact: f64 = (1..=t).map(f64::from).product();
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(values.len());
    for (j, &(i, lg)) in values.iter().enumerate() {
        let k = f64::from(i);
        let mut scale = k.powi(t as i32) / fact;
        if s % 2 == 1 {
            scale *= k.log2();
        }
        let first_diff = (j >= 1).then(|| lg - values[j - 1].1);
        let second_diff = (j >= 2).then(|| lg - 2.0 * values[j - 1].1 + values[j - 2].1);
        rows.push(GrowthRow {
            index: i,
            log2: lg,
            normalized: lg / scale,
            first_diff,
            second_diff,
        });
    }
    Ok(GrowthReport { family, s, t, rows })
}
