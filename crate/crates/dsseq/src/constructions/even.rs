//! The even-order construction `S^s_k(m)`: blocks of length `m`, every symbol
//! with the same multiplicity, and no alternation of length `s+2`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::json;

use crate::error::{Error, Result};
use crate::sequence::{is_r_sparse, max_alternation, BlockedSequence, Symbol};
use crate::tower::{Magnitude, DEFAULT_BIT_BUDGET};

/// Exact statistics of `S^s_k(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenStats {
    /// Multiplicity of every symbol.
    pub mu: BigUint,
    /// Distinct symbols.
    pub symbols: BigUint,
    /// Number of blocks.
    pub blocks: BigUint,
    pub length: BigUint,
}

impl EvenStats {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "mu": self.mu.to_string(),
            "N": self.symbols.to_string(),
            "F": self.blocks.to_string(),
            "length": self.length.to_string(),
        })
    }
}

fn check_params(s: u64, m: u64) -> Result<()> {
    if s < 2 || s % 2 == 1 {
        return Err(Error::InvalidInput(format!(
            "order must be even and at least 2, got {s}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidInput("block length must be positive".into()));
    }
    Ok(())
}

/// Symbol multiplicity: `mu_2(k) = 2`, `mu_s(0) = 1`, `mu_s(k) = mu_{s-2}(k-1) mu_s(k-1)`.
pub fn multiplicity(s: u64, k: u64) -> BigUint {
    let mut memo = HashMap::new();
    mu_rec(s, k, &mut memo)
}

fn mu_rec(s: u64, k: u64, memo: &mut HashMap<(u64, u64), BigUint>) -> BigUint {
    if s == 2 {
        return BigUint::from(2u32);
    }
    if k == 0 {
        return BigUint::one();
    }
    if let Some(v) = memo.get(&(s, k)) {
        return v.clone();
    }
    let v = mu_rec(s - 2, k - 1, memo) * mu_rec(s, k - 1, memo);
    memo.insert((s, k), v.clone());
    v
}

/// Rows longer than this are not evaluated.
const MAX_ROW_LEN: u64 = 1 << 20;

/// Memoized evaluation of the symbol-count and block-count recurrences.
pub struct EvenStatsTable {
    bit_budget: u64,
    rows: HashMap<(u64, u64), Vec<(BigUint, BigUint)>>,
}

impl Default for EvenStatsTable {
    fn default() -> Self {
        EvenStatsTable::new(DEFAULT_BIT_BUDGET)
    }
}

impl EvenStatsTable {
    pub fn new(bit_budget: u64) -> Self {
        EvenStatsTable {
            bit_budget,
            rows: HashMap::new(),
        }
    }

    fn arg(&self, what: String, v: &BigUint) -> Result<u64> {
        match v.to_u64() {
            Some(x) if x <= MAX_ROW_LEN => Ok(x),
            _ => Err(Error::BudgetExceeded {
                what,
                needed: Box::new(Magnitude::Bounds {
                    lower: crate::tower::TowerNumber::from_int(v),
                    upper: None,
                }),
                budget: self.bit_budget,
            }),
        }
    }

    /// `(N^s_k(m), F^s_k(m))`.
    pub fn symbols_and_blocks(&mut self, s: u64, k: u64, m: u64) -> Result<(BigUint, BigUint)> {
        check_params(s, m)?;
        if s == 2 {
            return Ok((BigUint::from(m), BigUint::from(2u32)));
        }
        if k == 0 {
            return Ok((BigUint::from(m), BigUint::one()));
        }
        if m == 1 {
            return Ok((BigUint::one(), multiplicity(s, k)));
        }
        let have = self.rows.get(&(s, k)).map_or(0, |r| r.len() as u64);
        if have == 0 {
            self.rows.insert((s, k), vec![(BigUint::one(), multiplicity(s, k))]);
        }
        for j in have.max(1) + 1..=m {
            let (prev_n, f) = self.rows[&(s, k)][(j - 2) as usize].clone();
            let f_arg = self.arg(format!("F^{s}_{k}({})", j - 1), &f)?;
            let (g, bar_blocks) = self.symbols_and_blocks(s - 2, k - 1, f_arg)?;
            let g_arg = self.arg(format!("N^{}_{}({f_arg})", s - 2, k - 1), &g)?;
            let (star_symbols, star_blocks) = self.symbols_and_blocks(s, k - 1, g_arg)?;
            let h = star_blocks * bar_blocks;
            let blocks = &f * &h;
            let symbols = &h * prev_n + star_symbols;
            if blocks.bits() > self.bit_budget || symbols.bits() > self.bit_budget {
                return Err(Error::BudgetExceeded {
                    what: format!("S^{s}_{k}({j})"),
                    needed: Box::new(Magnitude::Exact(symbols)),
                    budget: self.bit_budget,
                });
            }
            self.rows.get_mut(&(s, k)).unwrap().push((symbols, blocks));
        }
        Ok(self.rows[&(s, k)][(m - 1) as usize].clone())
    }

    pub fn stats(&mut self, s: u64, k: u64, m: u64) -> Result<EvenStats> {
        let (symbols, blocks) = self.symbols_and_blocks(s, k, m)?;
        let length = BigUint::from(m) * &blocks;
        Ok(EvenStats {
            mu: multiplicity(s, k),
            symbols,
            blocks,
            length,
        })
    }
}

/// Exact statistics of `S^s_k(m)` from the recurrences alone.
pub fn even_stats(s: u64, k: u64, m: u64) -> Result<EvenStats> {
    EvenStatsTable::default().stats(s, k, m)
}

/// Materializes `S^s_k(m)` if its predicted length is within `length_budget`.
pub fn build_s_even(s: u64, k: u64, m: u64, length_budget: u64) -> Result<BlockedSequence> {
    let st = even_stats(s, k, m)?;
    match st.length.to_u64() {
        Some(l) if l <= length_budget => Ok(build(s, k, m)),
        _ => Err(Error::BudgetExceeded {
            what: format!("length of S^{s}_{k}({m})"),
            needed: Box::new(Magnitude::Exact(st.length)),
            budget: length_budget,
        }),
    }
}

fn build(s: u64, k: u64, m: u64) -> BlockedSequence {
    let up: Vec<Symbol> = (0..m as Symbol).collect();
    if s == 2 {
        let down: Vec<Symbol> = up.iter().rev().copied().collect();
        return BlockedSequence::new(vec![up, down], Default::default()).unwrap();
    }
    if k == 0 {
        return BlockedSequence::single(&up);
    }
    if m == 1 {
        let mu = multiplicity(s, k).to_usize().expect("materializable multiplicity");
        return BlockedSequence::new(vec![vec![0]; mu], Default::default()).unwrap();
    }
    let outer = build(s, k, m - 1);
    let f = outer.block_count();
    let bar = build(s - 2, k - 1, f as u64);
    let star = build(s, k - 1, bar.alphabet_size() as u64);

    // Symbols of `bar` in order of first appearance.
    let mut order = Vec::new();
    let mut seen = vec![false; bar.alphabet_size()];
    for &a in bar.symbols() {
        if !std::mem::replace(&mut seen[a as usize], true) {
            order.push(a);
        }
    }
    let mut rename = vec![0 as Symbol; order.len()];
    let mut hat: Vec<Symbol> = Vec::with_capacity(star.block_count() * bar.len());
    for block in star.blocks() {
        for (i, &a) in order.iter().enumerate() {
            rename[a as usize] = block[i];
        }
        hat.extend(bar.symbols().iter().map(|&a| rename[a as usize]));
    }

    let base = star.alphabet_size() as Symbol;
    let width = outer.alphabet_size() as Symbol;
    let copies = hat.len() / f;
    let mut out = BlockedSequence::with_capacity(hat.len() * m as usize, hat.len());
    for c in 0..copies {
        let offset = base + c as Symbol * width;
        for (i, ob) in outer.blocks().enumerate() {
            for &b in ob {
                out.push_symbol(b + offset);
            }
            out.push_symbol(hat[c * f + i]);
            out.close_block(false);
        }
    }
    out
}

/// Outcome of checking the structural guarantees of a materialized `S^s_k(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenCheck {
    pub block_len_ok: bool,
    pub multiplicity_ok: bool,
    pub max_alternation: usize,
    pub sparse_ok: bool,
    pub fixed_depth_ok: bool,
    pub co_block_ok: bool,
    pub counts_match: bool,
    pub identity_ok: bool,
}

impl EvenCheck {
    pub fn passed(&self, s: u64) -> bool {
        self.block_len_ok
            && self.multiplicity_ok
            && self.max_alternation as u64 <= s + 1
            && self.sparse_ok
            && self.fixed_depth_ok
            && self.co_block_ok
            && self.counts_match
            && self.identity_ok
    }
}

/// Checks `seq` against the guarantees of `S^s_k(m)` and its predicted stats.
pub fn check_even(seq: &BlockedSequence, s: u64, m: u64, stats: &EvenStats) -> EvenCheck {
    let n = seq.alphabet_size();
    let mut count = vec![0u64; n];
    let mut depth = vec![usize::MAX; n];
    let mut fixed_depth_ok = true;
    let mut pairs: Vec<u64> = Vec::new();
    // A single block cannot repeat a pair.
    let collect_pairs = seq.block_count() > 1;
    for b in seq.blocks() {
        for (i, &a) in b.iter().enumerate() {
            count[a as usize] += 1;
            let d = &mut depth[a as usize];
            if *d == usize::MAX {
                *d = i;
            } else if *d != i {
                fixed_depth_ok = false;
            }
            for &c in if collect_pairs { &b[..i] } else { &[] } {
                let (x, y) = if c < a { (c, a) } else { (a, c) };
                pairs.push((x as u64) << 32 | y as u64);
            }
        }
    }
    pairs.sort_unstable();
    let co_block_ok = pairs.windows(2).all(|w| w[0] != w[1]);
    let mu = stats.mu.to_u64();
    let check_depth = s >= 4;
    EvenCheck {
        block_len_ok: seq.blocks().all(|b| b.len() as u64 == m) && seq.blocks_distinct(),
        multiplicity_ok: count.iter().all(|&c| Some(c) == mu),
        max_alternation: max_alternation(seq.symbols()).0,
        sparse_ok: s < 4 || m < 2 || is_r_sparse(seq.symbols(), 2),
        fixed_depth_ok: !check_depth || fixed_depth_ok,
        co_block_ok: !check_depth || co_block_ok,
        counts_match: BigUint::from(n) == stats.symbols
            && BigUint::from(seq.block_count()) == stats.blocks
            && BigUint::from(seq.len()) == stats.length,
        identity_ok: &stats.mu * &stats.symbols == BigUint::from(m) * &stats.blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn base_cases() {
        assert_eq!(build_s_even(4, 0, 3, 100).unwrap().render_text(), "(0 1 2)");
        assert_eq!(build_s_even(2, 5, 3, 100).unwrap().render_text(), "(0 1 2) | (2 1 0)");
        let unit = build_s_even(4, 3, 1, 100).unwrap();
        assert_eq!(unit.block_count(), 8);
        assert!(unit.symbols().iter().all(|&a| a == 0));
    }

    #[test]
    fn multiplicity_matches_binomial_power() {
        for (s, t) in [(4u64, 1u64), (6, 2), (8, 3)] {
            for k in 0..=20 {
                assert_eq!(multiplicity(s, k), BigUint::one() << binom(k, t));
            }
        }
        assert_eq!(multiplicity(2, 17), BigUint::from(2u32));
    }

    #[test]
    fn symbol_count_closed_recurrence() {
        // N^s_k(m) = m N^s_{k-1}(N^{s-2}_{k-1}(F^s_k(m-1))).
        let mut t = EvenStatsTable::default();
        for s in [4u64, 6] {
            for k in 1..=4 {
                for m in 2..=5 {
                    let Ok((n, _)) = t.symbols_and_blocks(s, k, m) else {
                        continue;
                    };
                    let (_, f) = t.symbols_and_blocks(s, k, m - 1).unwrap();
                    let (g, _) = t.symbols_and_blocks(s - 2, k - 1, f.to_u64().unwrap()).unwrap();
                    let (inner, _) = t.symbols_and_blocks(s, k - 1, g.to_u64().unwrap()).unwrap();
                    assert_eq!(n, BigUint::from(m) * inner, "s={s} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn small_instances_pass_checks() {
        for s in [4u64, 6] {
            for k in 0..=3 {
                for m in 1..=4 {
                    let Ok(st) = even_stats(s, k, m) else { continue };
                    if st.length > BigUint::from(200_000u32) {
                        continue;
                    }
                    let seq = build_s_even(s, k, m, 200_000).unwrap();
                    let c = check_even(&seq, s, m, &st);
                    assert!(c.passed(s), "s={s} k={k} m={m}: {c:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_odd_order() {
        assert!(matches!(even_stats(5, 1, 2), Err(Error::InvalidInput(_))));
    }
}
