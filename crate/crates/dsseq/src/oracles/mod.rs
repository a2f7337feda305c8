//! Exact brute-force values of the extremal functions at desk scale.

mod search;

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::sequence::{alphabet_size, contains_pattern_with_cap, BlockedSequence, Symbol};
use search::{Alternation, Formations, Objective, Shape, SymbolBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_length: usize,
    pub max_nodes: u64,
    pub time_limit: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_length: 200,
            max_nodes: 5_000_000,
            time_limit: Duration::from_secs(300),
        }
    }
}

impl SearchBudget {
    pub fn with_nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleValue {
    Finite(u64),
    Unbounded,
}

impl OracleValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            OracleValue::Finite(v) => Some(v),
            OracleValue::Unbounded => None,
        }
    }

    fn to_json(self) -> Value {
        match self {
            OracleValue::Finite(v) => json!(v),
            OracleValue::Unbounded => json!("UNBOUNDED"),
        }
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) if s == "UNBOUNDED" => Some(OracleValue::Unbounded),
            other => other.as_u64().map(OracleValue::Finite),
        }
    }
}

impl std::fmt::Display for OracleValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleValue::Finite(v) => write!(f, "{v}"),
            OracleValue::Unbounded => f.write_str("UNBOUNDED"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Sequence(Vec<Symbol>),
    Blocked(BlockedSequence),
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::Sequence(s) => json!(s),
            Witness::Blocked(b) => b.to_json(),
        }
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Array(_) => serde_json::from_value(v.clone()).ok().map(Witness::Sequence),
            Value::Object(_) => BlockedSequence::from_json(v).ok().map(Witness::Blocked),
            _ => None,
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        match self {
            Witness::Sequence(s) => s,
            Witness::Blocked(b) => b.symbols(),
        }
    }
}

/// A search outcome. `exact` means the search ran to completion and
/// `value` is optimal; otherwise `value` is only a lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub value: OracleValue,
    /// Proven upper bound on the true value; equals `value` when exact.
    pub upper: Option<u64>,
    pub witness: Option<Witness>,
    pub exact: bool,
    pub nodes: u64,
}

impl OracleResult {
    fn exact_value(v: u64) -> Self {
        OracleResult {
            value: OracleValue::Finite(v),
            upper: Some(v),
            witness: None,
            exact: true,
            nodes: 0,
        }
    }

    fn unbounded() -> Self {
        OracleResult {
            value: OracleValue::Unbounded,
            upper: None,
            witness: None,
            exact: true,
            nodes: 0,
        }
    }

    /// The value when it is exact and finite.
    pub fn exact_finite(&self) -> Option<u64> {
        self.exact.then(|| self.value.finite()).flatten()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_json(),
            "upper": self.upper,
            "exact": self.exact,
            "nodes": self.nodes,
            "witness": self.witness.as_ref().map(Witness::to_json),
        })
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn finish(out: search::Outcome, blocked: bool, cap: Option<usize>) -> OracleResult {
    // Reaching the cap only shows the cap was too small.
    let upper = out.upper.filter(|_| !cap.is_some_and(|c| out.value as usize >= c));
    let witness = if blocked {
        Witness::Blocked(search::to_blocked(out.witness))
    } else {
        Witness::Sequence(out.witness.concat())
    };
    OracleResult {
        value: OracleValue::Finite(out.value),
        upper,
        witness: Some(witness),
        exact: upper == Some(out.value),
        nodes: out.nodes,
    }
}

/// `λ_s(n)`: longest order-`s` DS sequence on `n` symbols.
pub fn oracle_lambda(s: usize, n: usize, budget: &SearchBudget) -> Result<OracleResult> {
    if s == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let shape = Shape {
        blocks: None,
        sparsity: 1,
        multiplicity: None,
        symbol_cap: n,
        objective: Objective::Length,
    };
    Ok(finish(search::run(shape, Alternation::new(s), budget), false, None))
}

/// `ψ_s(m, n)`: longest order-`s` DS sequence on `n` symbols made of at most
/// `m` blocks of distinct symbols.
pub fn oracle_psi(s: usize, m: usize, n: usize, budget: &SearchBudget) -> Result<OracleResult> {
    if s == 0 || m == 0 {
        return Err(Error::InvalidInput("need s >= 1 and m >= 1".into()));
    }
    let shape = Shape {
        blocks: Some(m),
        sparsity: 1,
        multiplicity: None,
        symbol_cap: n,
        objective: Objective::Length,
    };
    Ok(finish(search::run(shape, Alternation::new(s), budget), true, None))
}

/// `N^s_k(m)`: most symbols in `m` blocks of distinct symbols where every
/// symbol occurs in `k` blocks and no alternation of length `s + 2` occurs.
pub fn oracle_ads_symbols(s: usize, k: usize, m: usize, budget: &SearchBudget) -> Result<OracleResult> {
    if s == 0 || k == 0 || k > u8::MAX as usize {
        return Err(Error::InvalidInput("need s >= 1 and 1 <= k <= 255".into()));
    }
    if m < k {
        return Ok(OracleResult::exact_value(0));
    }
    if k <= s {
        return Ok(OracleResult::unbounded());
    }
    let mut bounds = SymbolBounds::default();
    if s >= 2 {
        // An alternation of length s+1 among open symbols after the current
        // position extends to s+2 through an earlier occurrence.
        for j in s..k {
            let table = (0..=m)
                .map(|b| {
                    Ok(oracle_ads_symbols(s - 1, j, b, budget)?
                        .exact_finite()
                        .map(|v| v as usize))
                })
                .collect::<Result<Vec<_>>>()?;
            bounds.owing.push((j as u8, table));
        }
    }
    for b in 0..m {
        let v = if b < k {
            Some(0)
        } else {
            ads_search(s, k, b, budget, &bounds).exact_finite()
        };
        bounds.same.push(v.map(|v| v as usize));
    }
    Ok(ads_search(s, k, m, budget, &bounds))
}

fn ads_search(s: usize, k: usize, m: usize, budget: &SearchBudget, bounds: &SymbolBounds) -> OracleResult {
    // Caps the symbol count; a search that reaches the cap is cut off and
    // therefore reported inexact.
    let cap = if s == 1 {
        m
    } else {
        binomial(m as u64 - 2, s as u64 - 1) as usize + 1
    };
    let shape = Shape {
        blocks: Some(m),
        sparsity: 0,
        multiplicity: Some(k as u8),
        symbol_cap: cap,
        objective: Objective::Symbols,
    };
    let out = search::run_max_symbols(shape, Alternation::new(s), budget, bounds.clone());
    finish(out, true, Some(cap))
}

/// `Nf_{r,s,k}(m)`: most symbols in `m` blocks of distinct symbols where every
/// symbol occurs in `k` blocks and no `(r,s)`-formation occurs.
pub fn oracle_aff_symbols(r: usize, s: usize, k: usize, m: usize, budget: &SearchBudget) -> Result<OracleResult> {
    if r == 0 || s == 0 || k == 0 || k > u8::MAX as usize || r > 5 {
        return Err(Error::InvalidInput("need 1 <= r <= 5, s >= 1 and 1 <= k <= 255".into()));
    }
    if m < k {
        return Ok(OracleResult::exact_value(0));
    }
    if k < s {
        // k blocks repeating one arbitrarily long block give at most k windows.
        return Ok(OracleResult::unbounded());
    }
    let mut bounds = SymbolBounds::default();
    for b in 0..m {
        let v = if b < k {
            Some(0)
        } else {
            aff_search(r, s, k, b, budget, &bounds).exact_finite()
        };
        bounds.same.push(v.map(|v| v as usize));
    }
    Ok(aff_search(r, s, k, m, budget, &bounds))
}

fn aff_search(r: usize, s: usize, k: usize, m: usize, budget: &SearchBudget, bounds: &SymbolBounds) -> OracleResult {
    let cap = match (r, s) {
        (1, _) => 1,
        (_, 1) => r,
        (_, 2) => (r - 1) * (m - 1) + 1,
        _ => (r - 1) * binomial(m as u64 - 2, s as u64 - 2) as usize + 1,
    };
    let shape = Shape {
        blocks: Some(m),
        sparsity: 0,
        multiplicity: Some(k as u8),
        symbol_cap: cap,
        objective: Objective::Symbols,
    };
    let out = search::run_max_symbols(shape, Formations::new(r, s), budget, bounds.clone());
    finish(out, true, Some(cap))
}

/// `F_{r,s}(n)`: longest `r`-sparse sequence on `n` symbols without an
/// `(r,s)`-formation.
pub fn oracle_f(r: usize, s: usize, n: usize, budget: &SearchBudget) -> Result<OracleResult> {
    if r == 0 || s == 0 || r > 5 {
        return Err(Error::InvalidInput("need 1 <= r <= 5 and s >= 1".into()));
    }
    let shape = Shape {
        blocks: None,
        sparsity: r - 1,
        multiplicity: None,
        symbol_cap: n,
        objective: Objective::Length,
    };
    Ok(finish(search::run(shape, Formations::new(r, s), budget), false, None))
}

/// `Ex_u(n)`: longest `||u||`-sparse sequence on `n` symbols avoiding `u`.
pub fn oracle_ex(u: &[Symbol], n: usize, budget: &SearchBudget) -> Result<OracleResult> {
    let r = alphabet_size(u);
    if r == 0 {
        return Err(Error::InvalidInput("pattern must be nonempty".into()));
    }
    let mut dfs = ExSearch {
        u,
        r,
        n,
        budget: *budget,
        start: Instant::now(),
        nodes: 0,
        truncated: false,
        current: Vec::new(),
        best: Vec::new(),
    };
    dfs.extend(0)?;
    Ok(OracleResult {
        value: OracleValue::Finite(dfs.best.len() as u64),
        upper: (!dfs.truncated).then_some(dfs.best.len() as u64),
        witness: Some(Witness::Sequence(dfs.best)),
        exact: !dfs.truncated,
        nodes: dfs.nodes,
    })
}

struct ExSearch<'a> {
    u: &'a [Symbol],
    r: usize,
    n: usize,
    budget: SearchBudget,
    start: Instant,
    nodes: u64,
    truncated: bool,
    current: Vec<Symbol>,
    best: Vec<Symbol>,
}

impl ExSearch<'_> {
    fn extend(&mut self, used: usize) -> Result<()> {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        self.nodes += 1;
        if self.current.len() >= self.budget.max_length
            || self.nodes > self.budget.max_nodes
            || (self.nodes.is_multiple_of(1024) && self.start.elapsed() > self.budget.time_limit)
        {
            self.truncated = true;
        }
        if self.truncated {
            return Ok(());
        }
        let tail_from = self.current.len().saturating_sub(self.r - 1);
        for a in 0..(used + 1).min(self.n) as Symbol {
            if self.current[tail_from..].contains(&a) {
                continue;
            }
            self.current.push(a);
            let cap = self.r.max(crate::sequence::DEFAULT_PATTERN_CAP);
            if contains_pattern_with_cap(self.u, &self.current, cap)?.is_none() {
                self.extend(used.max(a as usize + 1))?;
            }
            self.current.pop();
            if self.truncated {
                break;
            }
        }
        Ok(())
    }
}

/// Line-delimited JSON store of oracle results keyed by function and parameters.
#[derive(Debug)]
pub struct OracleCache {
    path: PathBuf,
    entries: HashMap<String, OracleResult>,
}

fn cache_key(func: &str, params: &Value) -> String {
    format!("{func}:{params}")
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

impl OracleCache {
    /// Loads an existing cache file; a missing file starts an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path).map_err(io_err)?).lines() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: Value =
                    serde_json::from_str(&line).map_err(|e| Error::InvalidInput(format!("corrupt cache line: {e}")))?;
                let (Some(func), Some(value)) = (rec["fn"].as_str(), OracleValue::from_json(&rec["value"])) else {
                    continue;
                };
                let result = OracleResult {
                    value,
                    upper: rec["upper"].as_u64(),
                    witness: Witness::from_json(&rec["witness"]),
                    exact: rec["exact"].as_bool().unwrap_or(false),
                    nodes: rec["nodes"].as_u64().unwrap_or(0),
                };
                let key = cache_key(func, &rec["params"]);
                // A later exact record supersedes earlier ones; never downgrade.
                if result.exact || !entries.get(&key).is_some_and(|r: &OracleResult| r.exact) {
                    entries.insert(key, result);
                }
            }
        }
        Ok(OracleCache { path, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, func: &str, params: &Value) -> Option<&OracleResult> {
        self.entries.get(&cache_key(func, params))
    }

    /// Returns a cached exact result or runs `compute` and appends its record.
    pub fn get_or_run(
        &mut self,
        func: &str,
        params: Value,
        compute: impl FnOnce() -> Result<OracleResult>,
    ) -> Result<OracleResult> {
        if let Some(hit) = self.get(func, &params).filter(|r| r.exact) {
            return Ok(hit.clone());
        }
        let result = compute()?;
        let mut rec = result.to_json();
        rec["fn"] = json!(func);
        rec["params"] = params.clone();
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(io_err)?;
        writeln!(file, "{rec}").map_err(io_err)?;
        self.entries.insert(cache_key(func, &params), result.clone());
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formations::{build_aff_extremal, contains_formation};
    use crate::sequence::{is_ds, max_alternation, parse_symbols};

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    fn exact(r: Result<OracleResult>) -> u64 {
        let r = r.unwrap();
        assert!(r.exact, "search did not complete");
        r.value.finite().unwrap()
    }

    #[test]
    fn lambda_small_orders() {
        for n in 1..=6 {
            assert_eq!(exact(oracle_lambda(1, n, &budget())), n as u64);
            assert_eq!(exact(oracle_lambda(2, n, &budget())), 2 * n as u64 - 1);
        }
        let r = oracle_lambda(3, 2, &budget()).unwrap();
        assert_eq!(r.value, OracleValue::Finite(4));
        let w = r.witness.unwrap();
        assert!(is_ds(w.symbols(), 3));
        assert_eq!(w.symbols().len(), 4);
    }

    #[test]
    fn lambda_three_known_values() {
        let known = [1, 4, 8, 12, 17];
        for (n, &v) in known.iter().enumerate() {
            let r = oracle_lambda(3, n + 1, &budget()).unwrap();
            assert_eq!(r.exact_finite(), Some(v), "n = {}", n + 1);
            assert!(is_ds(r.witness.as_ref().unwrap().symbols(), 3));
        }
    }

    #[test]
    fn psi_small() {
        for s in 1..=3 {
            for n in 1..=4 {
                assert_eq!(exact(oracle_psi(s, 1, n, &budget())), n as u64);
            }
        }
        for n in 1..=4 {
            for m in 1..=5 {
                assert!(exact(oracle_psi(2, m, n, &budget())) < 2 * n as u64);
            }
        }
        assert_eq!(exact(oracle_psi(3, 4, 2, &budget())), 4);
        let r = oracle_psi(3, 3, 3, &budget()).unwrap();
        let Some(Witness::Blocked(b)) = &r.witness else {
            panic!()
        };
        assert!(b.block_count() <= 3 && b.blocks_distinct() && is_ds(b.symbols(), 3));
        assert_eq!(b.len() as u64, r.value.finite().unwrap());
    }

    #[test]
    fn ads_rules_and_values() {
        for m in 2..=8 {
            assert_eq!(exact(oracle_ads_symbols(1, 2, m, &budget())), m as u64 - 1);
        }
        assert_eq!(
            oracle_ads_symbols(2, 2, 5, &budget()).unwrap().value,
            OracleValue::Unbounded
        );
        assert_eq!(exact(oracle_ads_symbols(2, 3, 2, &budget())), 0);
        for m in 3..=7 {
            let r = oracle_ads_symbols(2, 3, m, &budget()).unwrap();
            assert!(r.exact);
            assert!(r.value.finite().unwrap() <= m as u64 - 2);
            let Some(Witness::Blocked(b)) = &r.witness else {
                panic!()
            };
            assert!(max_alternation(b.symbols()).0 <= 3);
        }
    }

    #[test]
    fn aff_values() {
        assert_eq!(exact(oracle_aff_symbols(3, 2, 2, 4, &budget())), 6);
        assert_eq!(exact(oracle_aff_symbols(2, 2, 2, 5, &budget())), 4);
        assert_eq!(exact(oracle_aff_symbols(2, 3, 3, 2, &budget())), 0);
        assert_eq!(
            oracle_aff_symbols(2, 3, 2, 4, &budget()).unwrap().value,
            OracleValue::Unbounded
        );
        let r = oracle_aff_symbols(3, 2, 2, 3, &budget()).unwrap();
        let Some(Witness::Blocked(b)) = &r.witness else {
            panic!()
        };
        assert!(contains_formation(b.symbols(), 3, 2).unwrap().is_none());
        assert_eq!(
            r.value.finite(),
            Some(build_aff_extremal(3, 3).unwrap().alphabet_size() as u64)
        );
    }

    #[test]
    fn formation_free_lengths() {
        assert!(exact(oracle_f(2, 2, 2, &budget())) <= 4);
        for r in 1..=3 {
            for s in 1..=3 {
                let v = exact(oracle_f(r, s, 2, &budget()));
                assert!(v <= (s * 4) as u64);
            }
        }
        // Fewer symbols than r: every entry must be distinct.
        assert_eq!(exact(oracle_f(3, 2, 2, &budget())), 2);
    }

    #[test]
    fn ex_examples() {
        let aba = parse_symbols("aba").unwrap();
        for n in 1..=3 {
            assert_eq!(exact(oracle_ex(&aba, n, &budget())), n as u64);
        }
        let abab = parse_symbols("abab").unwrap();
        assert_eq!(exact(oracle_ex(&abab, 3, &budget())), 5);
    }

    #[test]
    fn budget_truncation_is_reported() {
        let r = oracle_lambda(3, 5, &SearchBudget::with_nodes(50)).unwrap();
        assert!(!r.exact);
        assert!(is_ds(r.witness.unwrap().symbols(), 3));
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("dsseq-cache-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let mut cache = OracleCache::open(&dir).unwrap();
        let params = json!({"s": 2, "n": 3});
        let first = cache
            .get_or_run("lambda", params.clone(), || oracle_lambda(2, 3, &budget()))
            .unwrap();
        let reopened = OracleCache::open(&dir).unwrap();
        assert_eq!(reopened.get("lambda", &params), Some(&first));
        let mut reopened = reopened;
        let again = reopened
            .get_or_run("lambda", params, || Err(Error::Internal("should not run".into())))
            .unwrap();
        assert_eq!(again, first);
        std::fs::remove_file(&dir).unwrap();
    }
}
