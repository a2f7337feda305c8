//! The verification suite: one check per acceptance criterion, each
//! producing a pass/fail verdict and a deterministic JSON detail record.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use dsseq::ackermann::{
    a_hat, a_hat_1_closed_form, ackermann, ackermann_by_diagonal_recurrence, alpha, alpha_level,
    hierarchy_sandwich_check, HierarchySpec, LevelInverse, SandwichOutcome,
};
use dsseq::bounds::{growth_check, measured_deviation, psi_upper_eval, r_constants, Family, PqTable};
use dsseq::constructions::{build_s_even, build_z, check_even, check_z, multiplicity, EvenStatsTable, ZStatsTable};
use dsseq::formations::{build_aff_extremal, embed_pattern, formation_contains, is_aff, is_subsequence, Formation};
use dsseq::oracles::{
    oracle_ads_symbols, oracle_aff_symbols, oracle_ex, oracle_f, oracle_lambda, oracle_psi, OracleCache, OracleResult,
    OracleValue, SearchBudget,
};
use dsseq::sequence::{canonicalize, contains_pattern, parse_symbols};
use dsseq::tower::Magnitude;
use dsseq::{Error as LibError, Symbol};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::cached;
use crate::{Output, RunConfig, Status};

/// Length budget for materialized constructions.
const MAX_LENGTH: u64 = 1_000_000;

/// Frozen tolerances for the second differences of `log2 R_6(d)`, from the
/// calibration run over `10 <= d <= 40` (observed 1.027e-2 and 2.09e-5).
const GROWTH_TOL_FROM_10: f64 = 1.1e-2;
const GROWTH_TOL_FROM_20: f64 = 2.5e-5;

type CheckFn = fn(&mut Suite) -> Result<(bool, Value)>;

/// Every check, in report order.
pub const CHECKS: &[(&str, &str, CheckFn)] = &[
    (
        "c1-z-construction",
        "materialized Z_d(m) satisfies its invariants",
        z_construction,
    ),
    (
        "c2-z-closed-forms",
        "Z statistics match closed forms and size bounds",
        z_closed_forms,
    ),
    (
        "c3-even-construction",
        "materialized S^s_k(m) satisfies its invariants",
        even_construction,
    ),
    (
        "c4-oracle-values",
        "oracle values match known exact values and bounds",
        oracle_values,
    ),
    (
        "c5-bridge-inequalities",
        "inequalities between oracle values hold",
        bridge_inequalities,
    ),
    ("c6-embedding", "pattern embedding into formations", embedding),
    (
        "c7-ackermann",
        "Ackermann hierarchy values, inverses and comparisons",
        ackermann_checks,
    ),
    (
        "c8-constants",
        "constant families and growth calibration",
        constants_checks,
    ),
];

#[derive(Debug, Clone)]
pub struct Check {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    pub fn to_json(&self) -> Value {
        json!({"id": self.id, "title": self.title, "passed": self.passed, "detail": self.detail})
    }
}

/// Shared state for a suite run: oracle results are memoized so that checks
/// reuse each other's searches.
pub struct Suite {
    seed: u64,
    budget: SearchBudget,
    cache: Option<OracleCache>,
    memo: BTreeMap<String, OracleResult>,
}

impl Suite {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        Ok(Suite {
            seed: cfg.seed,
            budget: cfg.budget,
            cache: cfg.cache.as_ref().map(OracleCache::open).transpose()?,
            memo: BTreeMap::new(),
        })
    }

    pub fn run_check(&mut self, id: &str) -> Result<Check> {
        let Some(&(id, title, f)) = CHECKS.iter().find(|c| c.0 == id) else {
            bail!(LibError::InvalidInput(format!("unknown check {id:?}")));
        };
        let (passed, detail) = f(self)?;
        Ok(Check {
            id,
            title,
            passed,
            detail,
        })
    }

    fn oracle(
        &mut self,
        func: &str,
        params: Value,
        compute: impl FnOnce(&SearchBudget) -> dsseq::Result<OracleResult>,
    ) -> Result<OracleResult> {
        let key = format!("{func}:{params}");
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let budget = self.budget;
        let r = cached(&mut self.cache, func, params, || compute(&budget))?;
        self.memo.insert(key, r.clone());
        Ok(r)
    }

    fn lambda(&mut self, s: usize, n: usize) -> Result<OracleResult> {
        self.oracle("lambda", json!({"s": s, "n": n}), |b| oracle_lambda(s, n, b))
    }

    fn psi(&mut self, s: usize, m: usize, n: usize) -> Result<OracleResult> {
        self.oracle("psi", json!({"s": s, "m": m, "n": n}), |b| oracle_psi(s, m, n, b))
    }

    fn ads(&mut self, s: usize, k: usize, m: usize) -> Result<OracleResult> {
        self.oracle("ads", json!({"s": s, "k": k, "m": m}), |b| {
            oracle_ads_symbols(s, k, m, b)
        })
    }

    fn aff(&mut self, r: usize, s: usize, k: usize, m: usize) -> Result<OracleResult> {
        self.oracle("aff", json!({"r": r, "s": s, "k": k, "m": m}), |b| {
            oracle_aff_symbols(r, s, k, m, b)
        })
    }

    fn f(&mut self, r: usize, s: usize, n: usize) -> Result<OracleResult> {
        self.oracle("f", json!({"r": r, "s": s, "n": n}), |b| oracle_f(r, s, n, b))
    }

    fn ex(&mut self, u: &[Symbol], n: usize) -> Result<OracleResult> {
        self.oracle("ex", json!({"pattern": u, "n": n}), |b| oracle_ex(u, n, b))
    }
}

/// Runs the requested checks (all by default) and assembles the report.
pub fn run_report(cfg: &RunConfig, only: Option<&[String]>) -> Result<Output> {
    let mut suite = Suite::new(cfg)?;
    let mut ids: Vec<&str> = match only {
        Some(list) => list.iter().map(String::as_str).collect(),
        None => CHECKS.iter().map(|c| c.0).collect(),
    };
    ids.sort_unstable();
    ids.dedup();
    let mut checks = Vec::with_capacity(ids.len());
    for id in ids {
        checks.push(suite.run_check(id)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(text, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.title);
    }
    let json = json!({
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(Output {
        json,
        text,
        status: if passed { Status::Ok } else { Status::Failed },
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn exact_is(r: &OracleResult, v: u64) -> bool {
    r.exact && r.value == OracleValue::Finite(v)
}

fn verdicts(items: &[(String, bool)]) -> (bool, Value) {
    let failed: Vec<&String> = items.iter().filter(|i| !i.1).map(|i| &i.0).collect();
    (failed.is_empty(), json!({"checked": items.len(), "failed": failed}))
}

fn z_construction(_: &mut Suite) -> Result<(bool, Value)> {
    let mut cells: Vec<(u64, u64)> = (1..=1000).map(|m| (1, m)).collect();
    let mut table = ZStatsTable::default();
    for d in 2..=8 {
        for m in 1.. {
            match table.stats(d, m) {
                Ok(st) if st.length <= BigUint::from(MAX_LENGTH) => cells.push((d, m)),
                _ => break,
            }
        }
    }
    let mut failed = Vec::new();
    for &(d, m) in &cells {
        let st = table.stats(d, m)?;
        let z = build_z(d, m, MAX_LENGTH)?;
        let c = check_z(&z, d, m, &st);
        if !c.passed() {
            failed.push(json!({"d": d, "m": m, "check": format!("{c:?}")}));
        }
    }
    let largest = |d: u64| cells.iter().filter(|c| c.0 == d).map(|c| c.1).max();
    let reach: BTreeMap<String, Option<u64>> = (1..=8).map(|d| (format!("d{d}"), largest(d))).collect();
    let minimum_met = largest(1) >= Some(1000) && largest(2) >= Some(14) && largest(3) >= Some(3);
    let detail = json!({"cells": cells.len(), "largest_m": reach, "failed": failed});
    Ok((failed.is_empty() && minimum_met, detail))
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn z_closed_forms(_: &mut Suite) -> Result<(bool, Value)> {
    let one = || BigUint::from(1u32);
    let mut items = Vec::new();
    let mut table = ZStatsTable::default();
    for m in 1..=64u64 {
        let st = table.stats(2, m)?;
        items.push((format!("S_2({m})"), st.special == one() << m));
        items.push((format!("M_2({m})"), st.blocks == (one() << (m + 2)) - 1u32));
        let x = ratio((one() << (m + 2)) - 1u32, one() << m);
        items.push((format!("X_2({m})"), st.block_ratio == x));
    }
    for d in 1..=64u64 {
        let st = table.stats(d, 2)?;
        items.push((format!("S_{d}(2)"), st.special == one() << d));
        items.push((format!("M_{d}(2)"), st.blocks == (BigUint::from(d) << (d + 1)) - 1u32));
        let x = ratio((BigUint::from(d) << (d + 1)) - 1u32, one() << d);
        items.push((format!("X_{d}(2)"), st.block_ratio == x));
    }
    let (closed_ok, closed) = verdicts(&items);

    let mut bound_items = Vec::new();
    let mut skipped = 0;
    for d in 1..=64u64 {
        for m in 1..=64u64 {
            let st = match table.stats(d, m) {
                Ok(st) => st,
                Err(LibError::BudgetExceeded { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let x_ok = st.block_ratio <= BigRational::from_integer((2 * d + 1).into());
            let v_ok = st.mean_block_len >= BigRational::new(m.into(), 2.into());
            bound_items.push((format!("d={d} m={m}"), x_ok && v_ok));
        }
    }
    let (bounds_ok, mut bounds) = verdicts(&bound_items);
    bounds["beyond_budget"] = json!(skipped);
    Ok((
        closed_ok && bounds_ok,
        json!({"closed_forms": closed, "size_bounds": bounds}),
    ))
}

fn even_construction(_: &mut Suite) -> Result<(bool, Value)> {
    let mut table = EvenStatsTable::default();
    let mut cells = Vec::new();
    for s in [4u64, 6] {
        for k in 0.. {
            let mut any = false;
            for m in 1..=64 {
                match table.stats(s, k, m) {
                    Ok(st) if st.length <= BigUint::from(MAX_LENGTH) => {
                        cells.push((s, k, m));
                        any = true;
                    }
                    _ => break,
                }
            }
            if !any {
                break;
            }
        }
    }
    let mut failed = Vec::new();
    for &(s, k, m) in &cells {
        let st = table.stats(s, k, m)?;
        let seq = build_s_even(s, k, m, MAX_LENGTH)?;
        let c = check_even(&seq, s, m, &st);
        if !c.passed(s) {
            failed.push(json!({"s": s, "k": k, "m": m, "check": format!("{c:?}")}));
        }
    }
    let mut mu_items = Vec::new();
    for s in [4u64, 6] {
        let t = (s - 2) / 2;
        for k in 0..=40 {
            let expect = BigUint::from(1u32) << binomial(k, t);
            mu_items.push((format!("mu_{s}({k})"), multiplicity(s, k) == expect));
        }
    }
    let (mu_ok, mu) = verdicts(&mu_items);
    let detail = json!({"cells": cells.len(), "failed": failed, "multiplicity_closed_form": mu});
    Ok((failed.is_empty() && mu_ok, detail))
}

fn oracle_values(suite: &mut Suite) -> Result<(bool, Value)> {
    let mut items = Vec::new();
    for n in 1..=6 {
        items.push((format!("lambda_1({n})"), exact_is(&suite.lambda(1, n)?, n as u64)));
        items.push((
            format!("lambda_2({n})"),
            exact_is(&suite.lambda(2, n)?, 2 * n as u64 - 1),
        ));
    }
    items.push(("lambda_3(2)".into(), exact_is(&suite.lambda(3, 2)?, 4)));
    for m in 1..=8 {
        items.push((format!("N^1_2({m})"), exact_is(&suite.ads(1, 2, m)?, m as u64 - 1)));
    }
    for s in 1..=4 {
        for m in s..=8 {
            let r = suite.ads(s, s, m)?;
            items.push((format!("N^{s}_{s}({m}) unbounded"), r.value == OracleValue::Unbounded));
        }
    }
    for s in [2usize, 3] {
        for m in 2..=7 {
            let r = suite.ads(s, s + 1, m)?;
            let cap = binomial(m as u64 - 2, s as u64 - 1);
            items.push((
                format!("N^{s}_{}({m}) <= {cap}", s + 1),
                r.upper.is_some_and(|u| u <= cap),
            ));
        }
    }
    for r in 1..=3 {
        for m in 1..=5 {
            let expect = ((r - 1) * (m - 1)) as u64;
            items.push((
                format!("Nf_{{{r},2,2}}({m})"),
                exact_is(&suite.aff(r, 2, 2, m)?, expect),
            ));
            if r >= 2 {
                let b = build_aff_extremal(r, m)?;
                let attains = is_aff(&b, r, 2, 2)? && b.alphabet_size() as u64 == expect;
                items.push((format!("extremal AFF r={r} m={m}"), attains));
            }
        }
    }
    Ok(verdicts(&items))
}

/// A value in the extended naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ext {
    Fin(u128),
    Inf,
}

impl Ext {
    fn add(self, o: Ext) -> Ext {
        match (self, o) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            _ => Ext::Inf,
        }
    }

    fn times(self, c: u128) -> Ext {
        match self {
            Ext::Fin(a) => Ext::Fin(a * c),
            Ext::Inf if c == 0 => Ext::Fin(0),
            Ext::Inf => Ext::Inf,
        }
    }
}

fn fin(v: impl Into<u128>) -> Ext {
    Ext::Fin(v.into())
}

/// Proven lower bound: the witnessed value.
fn lo(r: &OracleResult) -> Ext {
    match r.value {
        OracleValue::Unbounded => Ext::Inf,
        OracleValue::Finite(v) => fin(v),
    }
}

/// Proven upper bound, if the search established one.
fn hi(r: &OracleResult) -> Option<Ext> {
    match r.value {
        OracleValue::Unbounded => Some(Ext::Inf),
        OracleValue::Finite(_) => r.upper.map(fin),
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    skipped: usize,
    violations: Vec<String>,
}

impl Tally {
    /// Records `lhs <= rhs`. An unknown left side skips the cell; an
    /// unbounded right side always holds.
    fn record(&mut self, label: String, lhs: Option<Ext>, rhs: Ext) {
        let Some(lhs) = lhs else {
            self.skipped += 1;
            return;
        };
        self.checked += 1;
        if rhs != Ext::Inf && lhs > rhs {
            self.violations.push(label);
        }
    }

    fn to_json(&self) -> Value {
        json!({"checked": self.checked, "skipped": self.skipped, "violations": self.violations})
    }

    fn ok(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

/// The `ψ_s(m, n)` cells shared by the bridge and constant checks.
fn psi_grid() -> Vec<(usize, usize, usize)> {
    let mut cells = Vec::new();
    for s in 1..=3 {
        for m in 1..=5 {
            for n in 1..=4 {
                cells.push((s, m, n));
            }
        }
    }
    cells.extend((1..=4).map(|n| (3, 2 * n, n)));
    cells.extend((1..=3).map(|n| (4, 2 * n, n)));
    for ell in [1, 2] {
        cells.extend((1..=4).map(|n| (3, 1 + 2 * n / ell, n)));
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// Largest block counts for which `N^s_k` is tabulated in the recurrence checks.
const ADS_TABLE: &[(usize, usize, usize)] = &[(1, 2, 8), (2, 3, 8), (3, 4, 7), (3, 5, 8), (3, 6, 8)];

fn ads_tabulated(s: usize, k: usize, m: usize) -> bool {
    k <= s || m < k || ADS_TABLE.iter().any(|&(ts, tk, tm)| (ts, tk) == (s, k) && m <= tm)
}

fn bridge_inequalities(suite: &mut Suite) -> Result<(bool, Value)> {
    // λ_s(n) <= φ_{s-2}(n) (ψ_s(2n, n) + 2n), φ_j(n) = max_{n' <= n} λ_j(n')/n'.
    let mut lemma_lambda_psi = Tally::default();
    for (s, n_max) in [(3usize, 4usize), (4, 3)] {
        let (mut num, mut den) = (0u128, 1u128);
        for n in 1..=n_max {
            let Ext::Fin(v) = lo(&suite.lambda(s - 2, n)?) else {
                bail!("lambda is finite")
            };
            if v * den > num * n as u128 {
                (num, den) = (v, n as u128);
            }
            let lhs = hi(&suite.lambda(s, n)?).map(|x| x.times(den));
            let rhs = lo(&suite.psi(s, 2 * n, n)?).add(fin(2 * n as u128)).times(num);
            lemma_lambda_psi.record(format!("s={s} n={n}"), lhs, rhs);
        }
    }

    // ψ_s(m, n) <= k (N^s_k(m) + n) for every k.
    let mut lemma_psi_ads = Tally::default();
    for (s, m, n) in psi_grid().into_iter().filter(|c| c.0 <= 3 && c.1 <= 5 && c.2 <= 4) {
        let lhs = hi(&suite.psi(s, m, n)?);
        for k in 1..=m + 1 {
            let rhs = lo(&suite.ads(s, k, m)?).add(fin(n as u128)).times(k as u128);
            lemma_psi_ads.record(format!("s={s} m={m} n={n} k={k}"), lhs, rhs);
        }
    }

    // λ_3(n) <= ψ_3(1 + 2n/ℓ, n) + 3nℓ.
    let mut klazar = Tally::default();
    for ell in [1usize, 2] {
        for n in 1..=4 {
            let lhs = hi(&suite.lambda(3, n)?);
            let rhs = lo(&suite.psi(3, 1 + 2 * n / ell, n)?).add(fin((3 * n * ell) as u128));
            klazar.record(format!("l={ell} n={n}"), lhs, rhs);
        }
    }

    // Ex_u(n) <= F_{||u||, |u| - ||u|| + 1}(n).
    let mut ex_f = Tally::default();
    for pattern in ["aba", "abab", "ababa", "abca", "abcab", "abcacb"] {
        let u = canonicalize(&parse_symbols(pattern)?);
        let r = u.iter().map(|&a| a as usize + 1).max().unwrap_or(0);
        let s = u.len() - r + 1;
        for n in 1..=4 {
            let lhs = hi(&suite.ex(&u, n)?);
            let rhs = lo(&suite.f(r, s, n)?);
            ex_f.record(format!("u={pattern} n={n}"), lhs, rhs);
        }
    }

    // N^s_{2k-1}(2m) <= 2 N^s_{2k-1}(m) + 2 N^{s-1}_k(m) at s = 3, k = 3.
    let mut doubling = Tally::default();
    let (s, k) = (3, 3);
    for m in 1..=4 {
        let lhs = hi(&suite.ads(s, 2 * k - 1, 2 * m)?);
        let rhs = lo(&suite.ads(s, 2 * k - 1, m)?)
            .times(2)
            .add(lo(&suite.ads(s - 1, k, m)?).times(2));
        doubling.record(format!("m={m}"), lhs, rhs);
    }

    // Layered recurrences with t <= sqrt(m); multiplied through by t.
    // Non-integral block counts 1 + m/t are rounded down, which only
    // shrinks the right side.
    let mut layered = Tally::default();
    let mut layered_mixed = Tally::default();
    for m in 1..=8usize {
        for t in (1..=m).take_while(|t| t * t <= m) {
            let b = 1 + m / t;
            let (tt, mm) = (t as u128, m as u128);
            for k in [4usize, 5, 6] {
                if !(ads_tabulated(3, k, m) && ads_tabulated(3, k, t) && ads_tabulated(3, k - 2, b)) {
                    continue;
                }
                // N^3_k(m) <= (1 + m/t) N^3_k(t) + N^3_{k-2}(1 + m/t) + 3m
                let lhs = hi(&suite.ads(3, k, m)?).map(|x| x.times(tt));
                let rhs = lo(&suite.ads(3, k, t)?)
                    .times(tt + mm)
                    .add(lo(&suite.ads(3, k - 2, b)?).add(fin(3 * mm)).times(tt));
                layered.record(format!("k={k} m={m} t={t}"), lhs, rhs);
            }
            // (k1, k2, k3) = (3, 2, 4) gives k = 6:
            // N^3_6(m) <= (1 + m/t)(N^3_6(t) + 2 N^2_3(t) + N^1_2(t)) + N^3_4(1 + m/t)
            if ads_tabulated(3, 6, m) && ads_tabulated(3, 4, b) {
                let lhs = hi(&suite.ads(3, 6, m)?).map(|x| x.times(tt));
                let inner = lo(&suite.ads(3, 6, t)?)
                    .add(lo(&suite.ads(2, 3, t)?).times(2))
                    .add(lo(&suite.ads(1, 2, t)?));
                let rhs = inner.times(tt + mm).add(lo(&suite.ads(3, 4, b)?).times(tt));
                layered_mixed.record(format!("m={m} t={t}"), lhs, rhs);
            }
        }
    }

    let parts = [
        ("lambda_vs_psi", &lemma_lambda_psi),
        ("psi_vs_ads", &lemma_psi_ads),
        ("klazar", &klazar),
        ("ex_vs_f", &ex_f),
        ("doubling_recurrence", &doubling),
        ("layered_recurrence", &layered),
        ("layered_recurrence_mixed", &layered_mixed),
    ];
    let passed = parts.iter().all(|p| p.1.ok());
    let detail: BTreeMap<&str, Value> = parts.iter().map(|p| (p.0, p.1.to_json())).collect();
    Ok((passed, json!(detail)))
}

fn random_pattern(rng: &mut ChaCha8Rng, r: usize, len: usize) -> Vec<Symbol> {
    loop {
        let mut u = Vec::with_capacity(len);
        let mut used = 0;
        for _ in 0..len {
            let a = rng.gen_range(0..=used.min(r - 1));
            used = used.max(a + 1);
            u.push(a as Symbol);
        }
        if used == r {
            return u;
        }
    }
}

fn embedding(suite: &mut Suite) -> Result<(bool, Value)> {
    let digits = |t: &str| -> Vec<Symbol> { t.bytes().map(|c| (c - b'1') as Symbol).collect() };
    let u = digits("1112134241255");
    let mut perms = vec![digits("12345"); 9];
    perms[2] = digits("32514");
    perms[3] = digits("35421");
    perms[7] = digits("35142");
    let sigma = embed_pattern(&u, &Formation::new(perms)?)?;
    let worked: Vec<Symbol> = sigma.iter().map(|a| a + 1).collect();
    let worked_ok = worked == [3, 5, 4, 1, 2];

    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed);
    let mut random_failures = Vec::new();
    const CASES: usize = 1000;
    for case in 0..CASES {
        let r = rng.gen_range(1..=4);
        let len = rng.gen_range(r..=8);
        let u = random_pattern(&mut rng, r, len);
        let base: Vec<Symbol> = (0..r as Symbol).collect();
        let perms: Vec<Vec<Symbol>> = (0..len - r + 1)
            .map(|_| {
                let mut p = base.clone();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let f = Formation::new(perms)?;
        let flat = f.flatten();
        let ok = match embed_pattern(&u, &f) {
            Ok(sigma) => {
                let mut seen = sigma.clone();
                seen.sort_unstable();
                let image: Vec<Symbol> = u.iter().map(|&a| sigma[a as usize]).collect();
                seen == base && is_subsequence(&image, &flat) && contains_pattern(&u, &flat)?.is_some()
            }
            Err(_) => false,
        };
        if !ok {
            random_failures.push(json!({"case": case, "pattern": u, "formation": f.perms()}));
        }
    }

    let u = parse_symbols("abcabca")?;
    let perms3: Vec<Vec<Symbol>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    let mut remark_missing = 0;
    let total = 6usize.pow(4);
    for code in 0..total {
        let perms = (0..4).map(|i| perms3[code / 6usize.pow(i) % 6].clone()).collect();
        if !formation_contains(&u, &Formation::new(perms)?)? {
            remark_missing += 1;
        }
    }

    let passed = worked_ok && random_failures.is_empty() && remark_missing == 0;
    let detail = json!({
        "worked_example_sigma": worked,
        "random_cases": CASES,
        "random_failures": random_failures,
        "three_four_formations": total,
        "three_four_missing": remark_missing,
    });
    Ok((passed, detail))
}

fn special_row_2(n: u64, budget: u64) -> Magnitude {
    dsseq::constructions::z::special_magnitude(2, n, budget)
}

fn special_row_3(n: u64, budget: u64) -> Magnitude {
    dsseq::constructions::z::special_magnitude(3, n, budget)
}

fn special_row_4(n: u64, budget: u64) -> Magnitude {
    dsseq::constructions::z::special_magnitude(4, n, budget)
}

fn ackermann_checks(_: &mut Suite) -> Result<(bool, Value)> {
    let mut items = Vec::new();
    for (n, v) in [(1u32, 6u64), (2, 8), (3, 16), (4, 65536)] {
        let v = BigUint::from(v);
        items.push((format!("A({n})"), ackermann(n)? == v));
        items.push((
            format!("A({n}) by recurrence"),
            ackermann_by_diagonal_recurrence(n)? == v,
        ));
        let x = u64::try_from(&v).expect("small");
        items.push((format!("alpha(A({n}))"), alpha(x) == n as u64));
    }
    const X_MAX: u64 = 1_000_000;
    for k in 1..=5 {
        let inv = LevelInverse::new(k, X_MAX);
        let agree = (0..=X_MAX).all(|x| alpha_level(k, x) == inv.min_n(x));
        items.push((format!("alpha_{k} definitions agree up to {X_MAX}"), agree));
    }
    for m in 1..=10 {
        let rec = a_hat(1, m, dsseq::tower::DEFAULT_BIT_BUDGET);
        items.push((format!("Ahat_1({m})"), rec == Magnitude::Exact(a_hat_1_closed_form(m))));
    }
    let (values_ok, values) = verdicts(&items);

    let budget = dsseq::tower::DEFAULT_BIT_BUDGET;
    let rows: [(HierarchySpec, HierarchySpec, u64, u64, std::ops::RangeInclusive<u64>); 5] = [
        (
            HierarchySpec::Ackermann { level: 2 },
            row("S_2", special_row_2),
            1,
            0,
            1..=64,
        ),
        (
            HierarchySpec::Ackermann { level: 3 },
            row("S_3", special_row_3),
            1,
            0,
            1..=4,
        ),
        (
            HierarchySpec::Ackermann { level: 4 },
            row("S_4", special_row_4),
            1,
            0,
            1..=2,
        ),
        (
            HierarchySpec::AHat { level: 2 },
            HierarchySpec::Ackermann { level: 3 },
            2,
            4,
            1..=3,
        ),
        (
            HierarchySpec::AHat { level: 3 },
            HierarchySpec::Ackermann { level: 4 },
            2,
            4,
            1..=1,
        ),
    ];
    let mut sandwiches = Vec::new();
    let mut sandwich_ok = true;
    for (f, g, d, c, range) in rows {
        let rep = hierarchy_sandwich_check(&f, &g, d, c, range, budget);
        let violated = rep.count(SandwichOutcome::Violated);
        let incomparable = rep.count(SandwichOutcome::Incomparable);
        sandwich_ok &= violated == 0 && incomparable == 0 && !rep.rows.is_empty();
        sandwiches.push(json!({
            "lhs": rep.lhs_name,
            "rhs": rep.rhs_name,
            "scale": d,
            "shift": c,
            "rows": rep.rows.len(),
            "violated": violated,
            "incomparable": incomparable,
        }));
    }
    Ok((
        values_ok && sandwich_ok,
        json!({"values": values, "sandwiches": sandwiches}),
    ))
}

fn row(name: &str, eval: fn(u64, u64) -> Magnitude) -> HierarchySpec {
    HierarchySpec::Row {
        name: name.to_string(),
        eval,
    }
}

fn constants_checks(suite: &mut Suite) -> Result<(bool, Value)> {
    let mut items = Vec::new();
    for d in 2..=30u32 {
        let r3 = r_constants(3, d)?;
        items.push((format!("R_3({d})"), r3 == BigUint::from(2 * d + 1)));
        let r4 = r_constants(4, d)?;
        let expect = (BigUint::from(5u32) << d) - BigUint::from(4 * d + 3);
        items.push((format!("R_4({d})"), r4 == expect));
    }
    for s in 1..=12u32 {
        let expect = (BigUint::from(1u32) << (s - 1)) + 1u32;
        items.push((format!("R_{s}(2)"), r_constants(s, 2)? == expect));
    }
    let (values_ok, values) = verdicts(&items);

    let mut table = PqTable::default();
    let mut dominance = Tally::default();
    let mut deviations = BTreeMap::new();
    for (s, m, n) in psi_grid() {
        let c = if s >= 3 {
            *deviations
                .entry(s)
                .or_insert_with(|| measured_deviation(s as u32, 1_000_000))
        } else {
            0
        };
        let lhs = hi(&suite.psi(s, m, n)?);
        for k in 2..=4 {
            let bound = psi_upper_eval(&mut table, s as u32, k, m as u64, n as u64, c);
            let rhs = u128::try_from(&bound).map_or(Ext::Inf, Ext::Fin);
            dominance.record(format!("s={s} m={m} n={n} k={k}"), lhs, rhs);
        }
    }

    let report = growth_check(Family::R, 6, 8..=40)?;
    let diffs: Vec<(u32, f64)> = report
        .rows
        .iter()
        .filter_map(|r| r.second_diff.map(|x| (r.index, x)))
        .collect();
    let dev10 = report.second_diff_deviation(10, 1.0);
    let dev20 = report.second_diff_deviation(20, 1.0);
    let decreasing = diffs.windows(2).all(|w| w[1].1 < w[0].1 && w[1].1 > 1.0);
    let growth_ok = decreasing && dev10 <= GROWTH_TOL_FROM_10 && dev20 <= GROWTH_TOL_FROM_20;

    let passed = values_ok && dominance.ok() && growth_ok;
    let detail = json!({
        "values": values,
        "psi_upper_dominance": dominance.to_json(),
        "deviation_constants": deviations,
        "growth": {
            "second_diff_first": diffs.first().map(|d| d.1),
            "second_diff_last": diffs.last().map(|d| d.1),
            "max_deviation_from_10": dev10,
            "max_deviation_from_20": dev20,
            "tolerance_from_10": GROWTH_TOL_FROM_10,
            "tolerance_from_20": GROWTH_TOL_FROM_20,
            "monotone": decreasing,
        },
    });
    Ok((passed, detail))
}
