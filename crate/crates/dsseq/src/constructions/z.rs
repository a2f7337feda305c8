//! The order-3 construction `Z_d(m)`: a blocked sequence in which every symbol
//! appears exactly `2d+1` times and no pair alternates five times.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::json;

use crate::ackermann::mag_exp2;
use crate::error::{Error, Result};
use crate::sequence::{remove_adjacent_repeats, BlockedSequence, Symbol};
use crate::tower::{Magnitude, DEFAULT_BIT_BUDGET};

/// Exact statistics of `Z_d(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZStats {
    /// Special blocks.
    pub special: BigUint,
    /// Distinct symbols.
    pub symbols: BigUint,
    /// Total length.
    pub length: BigUint,
    /// Total blocks, counting empty ones.
    pub blocks: BigUint,
    /// `blocks / special`.
    pub block_ratio: BigRational,
    /// `length / blocks`.
    pub mean_block_len: BigRational,
}

impl ZStats {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "S": self.special.to_string(),
            "N": self.symbols.to_string(),
            "L": self.length.to_string(),
            "M": self.blocks.to_string(),
            "X": self.block_ratio.to_string(),
            "V": self.mean_block_len.to_string(),
        })
    }
}

/// Memoized evaluation of the special-block and block-count recurrences.
pub struct ZStatsTable {
    bit_budget: u64,
    rows: HashMap<u64, Vec<(BigUint, BigUint)>>,
}

impl Default for ZStatsTable {
    fn default() -> Self {
        ZStatsTable::new(DEFAULT_BIT_BUDGET)
    }
}

impl ZStatsTable {
    pub fn new(bit_budget: u64) -> Self {
        ZStatsTable {
            bit_budget,
            rows: HashMap::new(),
        }
    }

    /// `(S_d(m), M_d(m))`.
    pub fn special_and_blocks(&mut self, d: u64, m: u64) -> Result<(BigUint, BigUint)> {
        assert!(d >= 1 && m >= 1, "Z_d(m) needs d, m >= 1");
        if d == 1 {
            return Ok((BigUint::from(2u32), BigUint::from(3u32)));
        }
        if m == 1 {
            return Ok((BigUint::from(2u32), BigUint::from(2 * d + 3)));
        }
        let have = self.rows.get(&d).map_or(0, |r| r.len() as u64);
        if have == 0 {
            let base = (BigUint::from(2u32), BigUint::from(2 * d + 3));
            self.rows.insert(d, vec![base]);
        }
        for j in have.max(1) + 1..=m {
            let (f, prev_blocks) = self.rows[&d][(j - 2) as usize].clone();
            let budget = self.bit_budget;
            let too_big = |f: &BigUint| special_overflow(format!("S_{d}({j})"), f, budget);
            // S_{d-1}(f) >= 2^f, so an f beyond the budget cannot be evaluated.
            let f_small = match f.to_u64() {
                Some(v) if d == 2 || v <= self.bit_budget => v,
                _ => return Err(too_big(&f)),
            };
            let (g, inner_blocks) = self.special_and_blocks(d - 1, f_small)?;
            let special = &f * &g;
            let blocks = &g * (prev_blocks - 1u32) + inner_blocks;
            if special.bits() > self.bit_budget || blocks.bits() > self.bit_budget {
                return Err(too_big(&f));
            }
            self.rows.get_mut(&d).unwrap().push((special, blocks));
        }
        Ok(self.rows[&d][(m - 1) as usize].clone())
    }

    pub fn stats(&mut self, d: u64, m: u64) -> Result<ZStats> {
        let (special, blocks) = self.special_and_blocks(d, m)?;
        let symbols = BigUint::from(m) * &special / 2u32;
        let length = BigUint::from(2 * d + 1) * &symbols;
        let q = |a: &BigUint, b: &BigUint| BigRational::new(a.clone().into(), b.clone().into());
        Ok(ZStats {
            block_ratio: q(&blocks, &special),
            mean_block_len: q(&length, &blocks),
            special,
            symbols,
            length,
            blocks,
        })
    }
}

/// `S_d(j) = f S_{d-1}(f) >= 2^f` once `f` is too large to continue.
fn special_overflow(what: String, f: &BigUint, budget: u64) -> Error {
    let needed = match mag_exp2(&Magnitude::Exact(f.clone()), budget) {
        Magnitude::Exact(v) => Magnitude::Exact(v * f),
        m => Magnitude::Bounds {
            lower: m.lower(),
            upper: None,
        },
    };
    Error::BudgetExceeded {
        what,
        needed: Box::new(needed),
        budget,
    }
}

/// Exact statistics of `Z_d(m)` from the recurrences alone.
pub fn z_stats(d: u64, m: u64) -> Result<ZStats> {
    ZStatsTable::default().stats(d, m)
}

fn budget_check(what: String, length: &BigUint, budget: u64) -> Result<usize> {
    match length.to_u64() {
        Some(l) if l <= budget => Ok(l as usize),
        _ => Err(Error::BudgetExceeded {
            what,
            needed: Box::new(Magnitude::Exact(length.clone())),
            budget,
        }),
    }
}

/// Materializes `Z_d(m)` if its predicted length is within `length_budget`.
pub fn build_z(d: u64, m: u64, length_budget: u64) -> Result<BlockedSequence> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidInput("Z_d(m) needs d, m >= 1".into()));
    }
    let stats = match z_stats(d, m) {
        Ok(s) => s,
        Err(Error::BudgetExceeded { needed, .. }) => {
            return Err(Error::BudgetExceeded {
                what: format!("Z_{d}({m})"),
                needed,
                budget: length_budget,
            })
        }
        Err(e) => return Err(e),
    };
    budget_check(format!("length of Z_{d}({m})"), &stats.length, length_budget)?;
    Ok(build(d, m))
}

fn build(d: u64, m: u64) -> BlockedSequence {
    let m32 = m as Symbol;
    if d == 1 {
        let up: Vec<Symbol> = (0..m32).collect();
        let down: Vec<Symbol> = (0..m32).rev().collect();
        let mut z = BlockedSequence::with_capacity(3 * m as usize, 3);
        z.push_block(&up);
        z.push_block(&down);
        z.push_block(&up);
        z.mark_special(0);
        z.mark_special(2);
        return z;
    }
    if m == 1 {
        let mut z = BlockedSequence::with_capacity(2 * d as usize + 1, 2 * d as usize + 3);
        z.push_block(&[]);
        for _ in 0..2 * d + 1 {
            z.push_block(&[0]);
        }
        z.push_block(&[]);
        z.mark_special(1);
        z.mark_special(2 * d as usize + 1);
        return z;
    }
    let outer = build(d, m - 1);
    let f = outer.special().len();
    let inner = build(d - 1, f as u64);
    splice(&outer, &inner)
}

/// Replaces the i-th special block of `inner` by the i-th copy of `outer`,
/// threading each of that block's symbols into the copy as an adjacent pair.
fn splice(outer: &BlockedSequence, inner: &BlockedSequence) -> BlockedSequence {
    let outer_special: Vec<usize> = outer.special().iter().copied().collect();
    let outer_alphabet = outer.alphabet_size() as Symbol;
    let inner_alphabet = inner.alphabet_size() as Symbol;

    let mut first_pos = vec![usize::MAX; inner_alphabet as usize];
    for (p, &a) in inner.symbols().iter().enumerate() {
        if first_pos[a as usize] == usize::MAX {
            first_pos[a as usize] = p;
        }
    }

    let g = inner.special().len();
    let nb = outer.block_count();
    let len = inner.len() + g * (outer.len() + 2 * outer_special.len()) - g * outer_special.len();
    let blocks = inner.block_count() + g * nb - g;
    let mut z = BlockedSequence::with_capacity(len, blocks);

    let mut prefix: Vec<Option<Symbol>> = vec![None; nb];
    let mut suffix: Vec<Option<Symbol>> = vec![None; nb];
    let mut copy = 0 as Symbol;
    for (i, block) in inner.blocks().enumerate() {
        if !inner.is_special(i) {
            z.push_block(block);
            continue;
        }
        prefix.iter_mut().for_each(|x| *x = None);
        suffix.iter_mut().for_each(|x| *x = None);
        let start = inner.block_start(i);
        for (l, &a) in block.iter().enumerate() {
            let target = outer_special[l];
            if first_pos[a as usize] == start + l {
                suffix[target] = Some(a);
                prefix[target + 1] = Some(a);
            } else {
                suffix[target - 1] = Some(a);
                prefix[target] = Some(a);
            }
        }
        let offset = inner_alphabet + copy * outer_alphabet;
        for (j, ob) in outer.blocks().enumerate() {
            if let Some(a) = prefix[j] {
                z.push_symbol(a);
            }
            for &b in ob {
                z.push_symbol(b + offset);
            }
            if let Some(a) = suffix[j] {
                z.push_symbol(a);
            }
            z.close_block(outer.is_special(j));
        }
        copy += 1;
    }
    z
}

/// Outcome of checking the structural guarantees of a materialized `Z_d(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZCheck {
    pub multiplicity_ok: bool,
    pub max_alternation: usize,
    pub special_blocks_ok: bool,
    pub flanking_ok: bool,
    pub counts_match: bool,
}

impl ZCheck {
    pub fn passed(&self) -> bool {
        self.multiplicity_ok
            && self.max_alternation <= 4
            && self.special_blocks_ok
            && self.flanking_ok
            && self.counts_match
    }
}

/// Checks multiplicity, alternation, special-block, flanking and count
/// properties of `z` against `Z_d(m)`.
pub fn check_z(z: &BlockedSequence, d: u64, m: u64, stats: &ZStats) -> ZCheck {
    let syms = z.symbols();
    let n = z.alphabet_size();
    let mut count = vec![0u64; n];
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0usize; n];
    for (p, &a) in syms.iter().enumerate() {
        let a = a as usize;
        count[a] += 1;
        first[a] = first[a].min(p);
        last[a] = p;
    }
    let multiplicity_ok = count.iter().all(|&c| c == 2 * d + 1);

    let special_blocks_ok = z.blocks_distinct()
        && z.special().iter().all(|&i| {
            let start = z.block_start(i);
            let b = z.block(i);
            b.len() as u64 == m
                && b.iter().enumerate().all(|(l, &a)| {
                    let p = start + l;
                    first[a as usize] == p || last[a as usize] == p
                })
        })
        && (0..n).all(|a| {
            let block_of = |p: usize| z.block_index_of(p);
            z.is_special(block_of(first[a])) && z.is_special(block_of(last[a]))
        });

    let nb = z.block_count();
    let flanking_ok = d < 2
        || ((0..nb).all(|i| !z.is_special(i) || (i > 0 && i + 1 < nb && !z.is_special(i - 1) && !z.is_special(i + 1)))
            && (1..nb.saturating_sub(1)).all(|i| z.is_special(i) || !(z.is_special(i - 1) && z.is_special(i + 1))));

    let counts_match = BigUint::from(z.special().len()) == stats.special
        && BigUint::from(n) == stats.symbols
        && BigUint::from(z.len()) == stats.length
        && BigUint::from(nb) == stats.blocks;

    ZCheck {
        multiplicity_ok,
        max_alternation: crate::sequence::max_alternation(syms).0,
        special_blocks_ok,
        flanking_ok,
        counts_match,
    }
}

/// Plan for the interpolated construction on at most `n` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpolationPlan {
    /// Diagonal index: copies of repeat-stripped `Z_d(d)` are used.
    pub d: u64,
    /// Number of disjoint copies.
    pub copies: u64,
    /// Length of one repeat-stripped copy.
    pub copy_len: usize,
}

/// Concatenates `floor(n / N_d(d))` disjoint copies of `Z_d(d)` with adjacent
/// repeats removed, using the largest `d` with `N_d(d) <= n` that fits the
/// budget. The result is an order-3 DS sequence on at most `n` symbols.
pub fn build_z_interpolated(n: u64, length_budget: u64) -> Result<(Vec<Symbol>, InterpolationPlan)> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one symbol".into()));
    }
    let mut table = ZStatsTable::default();
    let mut chosen = None;
    for d in 1.. {
        let Ok(st) = table.stats(d, d) else { break };
        let Some(nd) = st.symbols.to_u64().filter(|&nd| nd <= n) else {
            break;
        };
        chosen = Some((d, nd, st.length));
    }
    let (d, nd, diag_len) = chosen.expect("N_1(1) = 1");
    let copies = n / nd;
    let approx = diag_len * BigUint::from(copies);
    budget_check(format!("interpolated Z for n={n}"), &approx, length_budget)?;

    let stripped = remove_adjacent_repeats(&build(d, d));
    let width = nd as Symbol;
    let mut out = Vec::with_capacity(stripped.len() * copies as usize);
    for c in 0..copies as Symbol {
        out.extend(stripped.iter().map(|&a| a + c * width));
    }
    let plan = InterpolationPlan {
        d,
        copies,
        copy_len: stripped.len(),
    };
    Ok((out, plan))
}

/// `A_d(m) <= S_d(m)` style comparisons need `S_d(m)` as a magnitude.
pub fn special_magnitude(d: u64, m: u64, bit_budget: u64) -> Magnitude {
    match ZStatsTable::new(bit_budget).special_and_blocks(d, m) {
        Ok((s, _)) => Magnitude::Exact(s),
        Err(Error::BudgetExceeded { needed, .. }) => Magnitude::Bounds {
            lower: needed.lower(),
            upper: None,
        },
        Err(_) => Magnitude::Exact(BigUint::one()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::is_ds;

    #[test]
    fn base_cases_render() {
        assert_eq!(build_z(1, 3, 100).unwrap().render_text(), "[0 1 2] | (2 1 0) | [0 1 2]");
        assert_eq!(
            build_z(2, 1, 100).unwrap().render_text(),
            "() | [0] | (0) | (0) | (0) | [0] | ()"
        );
    }

    #[test]
    fn z22_matches_counts() {
        let z = build_z(2, 2, 1000).unwrap();
        let st = z_stats(2, 2).unwrap();
        assert_eq!(st.special, BigUint::from(4u32));
        assert_eq!(st.length, BigUint::from(20u32));
        assert!(check_z(&z, 2, 2, &st).passed());
    }

    #[test]
    fn small_grid_passes_checks() {
        for d in 1..=3 {
            for m in 1..=3 {
                let st = z_stats(d, m).unwrap();
                if st.length > BigUint::from(100_000u32) {
                    continue;
                }
                let z = build_z(d, m, 100_000).unwrap();
                let c = check_z(&z, d, m, &st);
                assert!(c.passed(), "d={d} m={m}: {c:?}");
            }
        }
    }

    #[test]
    fn closed_form_rows() {
        let st = z_stats(2, 5).unwrap();
        assert_eq!(st.special, BigUint::from(32u32));
        assert_eq!(st.blocks, BigUint::from(127u32));
        let st = z_stats(3, 2).unwrap();
        assert_eq!(st.block_ratio, BigRational::new(47.into(), 8.into()));
    }

    #[test]
    fn budget_error_is_reported() {
        assert!(matches!(build_z(2, 14, 1000), Err(Error::BudgetExceeded { .. })));
        match z_stats(4, 4) {
            Err(Error::BudgetExceeded { needed, .. }) => assert!(needed.lower().height() >= 1),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn interpolation_is_ds3() {
        let (s, plan) = build_z_interpolated(1, 1000).unwrap();
        assert_eq!((plan.d, plan.copies), (1, 1));
        assert!(is_ds(&s, 3));
        let (s2, plan) = build_z_interpolated(8, 10_000).unwrap();
        assert_eq!((plan.d, plan.copies), (2, 2));
        assert_eq!(s2.len(), 2 * plan.copy_len);
        assert!(is_ds(&s2, 3));
    }
}
