//! Decompositions of sequences into blocks, layers and segments, together
//! with checks of the structural claims each decomposition is used for.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sequence::{alphabet_size, is_ds, is_r_sparse, remove_adjacent_repeats, BlockedSequence, Symbol};

/// Splits `s` left to right into blocks of order `r`, starting a new block
/// only when the next symbol would complete an alternation of length `r+2`.
pub fn greedy_order_partition(s: &[Symbol], r: usize) -> Result<BlockedSequence> {
    if r == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    if !is_r_sparse(s, 2) {
        return Err(Error::InvalidInput("sequence has adjacent repeats".into()));
    }
    let mut out = BlockedSequence::with_capacity(s.len(), 1);
    // Runs of the block restricted to each pair {x, y} equal their longest alternation.
    let mut runs: HashMap<(Symbol, Symbol), usize> = HashMap::new();
    let mut last_pos: HashMap<Symbol, usize> = HashMap::new();
    let mut open = false;
    for (p, &x) in s.iter().enumerate() {
        let mut fits = true;
        let mut updates = Vec::with_capacity(last_pos.len());
        for (&y, &py) in &last_pos {
            if y == x {
                continue;
            }
            let key = (x.min(y), x.max(y));
            let cur = runs.get(&key).copied().unwrap_or(1);
            let grown = match last_pos.get(&x) {
                Some(&px) if px > py => cur,
                _ => cur + 1,
            };
            if grown >= r + 2 {
                fits = false;
                break;
            }
            updates.push((key, grown));
        }
        if !fits {
            out.close_block(false);
            runs.clear();
            last_pos.clear();
            updates.clear();
        }
        runs.extend(updates);
        last_pos.insert(x, p);
        out.push_symbol(x);
        open = true;
    }
    if open {
        out.close_block(false);
    }
    Ok(out)
}

/// Whether a symbol stays within one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolClass {
    Local(usize),
    Global,
}

/// Role of a global symbol within one layer it occurs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccurrenceClass {
    Starting,
    Middle,
    Ending,
}

#[derive(Debug, Clone)]
pub struct LayerDecomposition {
    /// Block ranges `[start, end)` of each layer.
    pub layers: Vec<(usize, usize)>,
    pub symbol_classes: HashMap<Symbol, SymbolClass>,
    pub occurrence_classes: HashMap<(Symbol, usize), OccurrenceClass>,
    /// Occurrences of local symbols.
    pub local: BlockedSequence,
    pub starting: BlockedSequence,
    pub middle: BlockedSequence,
    pub ending: BlockedSequence,
}

/// Groups the blocks of `b` into consecutive layers of the given sizes and
/// splits the sequence by symbol class.
pub fn layer_decompose(b: &BlockedSequence, layer_sizes: &[usize]) -> Result<LayerDecomposition> {
    if layer_sizes.contains(&0) || layer_sizes.iter().sum::<usize>() != b.block_count() {
        return Err(Error::InvalidInput(format!(
            "layer sizes must be positive and sum to {} blocks",
            b.block_count()
        )));
    }
    let mut layers = Vec::with_capacity(layer_sizes.len());
    let mut layer_of_block = Vec::with_capacity(b.block_count());
    let mut start = 0;
    for (i, &size) in layer_sizes.iter().enumerate() {
        layers.push((start, start + size));
        layer_of_block.extend(std::iter::repeat_n(i, size));
        start += size;
    }
    let mut layer_of_pos = Vec::with_capacity(b.len());
    for (bi, block) in b.blocks().enumerate() {
        layer_of_pos.extend(std::iter::repeat_n(layer_of_block[bi], block.len()));
    }

    let mut span: HashMap<Symbol, (usize, usize)> = HashMap::new();
    for (&a, &l) in b.symbols().iter().zip(&layer_of_pos) {
        span.entry(a).and_modify(|e| e.1 = l).or_insert((l, l));
    }
    let symbol_classes: HashMap<Symbol, SymbolClass> = span
        .iter()
        .map(|(&a, &(lo, hi))| {
            (
                a,
                if lo == hi {
                    SymbolClass::Local(lo)
                } else {
                    SymbolClass::Global
                },
            )
        })
        .collect();
    let classify = |a: Symbol, l: usize| {
        let (lo, hi) = span[&a];
        if l == lo {
            OccurrenceClass::Starting
        } else if l == hi {
            OccurrenceClass::Ending
        } else {
            OccurrenceClass::Middle
        }
    };
    let mut occurrence_classes = HashMap::new();
    for (&a, &l) in b.symbols().iter().zip(&layer_of_pos) {
        if symbol_classes[&a] == SymbolClass::Global {
            occurrence_classes.insert((a, l), classify(a, l));
        }
    }
    let class_at = |p: usize| {
        let a = b.symbols()[p];
        match symbol_classes[&a] {
            SymbolClass::Local(_) => None,
            SymbolClass::Global => Some(classify(a, layer_of_pos[p])),
        }
    };
    Ok(LayerDecomposition {
        local: b.filter_positions(|p| class_at(p).is_none()),
        starting: b.filter_positions(|p| class_at(p) == Some(OccurrenceClass::Starting)),
        middle: b.filter_positions(|p| class_at(p) == Some(OccurrenceClass::Middle)),
        ending: b.filter_positions(|p| class_at(p) == Some(OccurrenceClass::Ending)),
        layers,
        symbol_classes,
        occurrence_classes,
    })
}

/// Outcome of checking the claims a layer decomposition of an order-`s`
/// sequence is used for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerClaims {
    pub lengths_add_up: bool,
    pub starting_order_ok: bool,
    pub ending_order_ok: bool,
    pub middle_layers_order_ok: bool,
}

impl LayerClaims {
    pub fn all_hold(&self) -> bool {
        self.lengths_add_up && self.starting_order_ok && self.ending_order_ok && self.middle_layers_order_ok
    }
}

/// After repeat removal, the starting and ending parts must be of order
/// `s-1` and every single layer of the middle part of order `s-2`.
pub fn check_layer_claims(b: &BlockedSequence, dec: &LayerDecomposition, s: usize) -> LayerClaims {
    assert!(s >= 2, "claims concern orders s-1 and s-2");
    let total = dec.local.len() + dec.starting.len() + dec.middle.len() + dec.ending.len();
    LayerClaims {
        lengths_add_up: total == b.len(),
        starting_order_ok: is_ds(&remove_adjacent_repeats(&dec.starting), s - 1),
        ending_order_ok: is_ds(&remove_adjacent_repeats(&dec.ending), s - 1),
        middle_layers_order_ok: dec
            .layers
            .iter()
            .all(|&(lo, hi)| is_ds(&remove_adjacent_repeats(&dec.middle.slice_blocks(lo, hi)), s - 2)),
    }
}

/// Cuts an order-3 DS sequence into segments that each begin at a terminal
/// (first or last) occurrence and hold `ell` terminal occurrences.
///
/// A symbol occurring once contributes two terminal occurrences at the same
/// position; if that position is reached with `ell - 1` already counted, the
/// segment takes `ell + 1`.
pub fn klazar_partition(s: &[Symbol], ell: usize) -> Result<BlockedSequence> {
    if ell == 0 {
        return Err(Error::InvalidInput("segment weight must be positive".into()));
    }
    if !is_ds(s, 3) {
        return Err(Error::InvalidInput("input is not an order-3 DS sequence".into()));
    }
    let weights = terminal_weights(s);
    let mut out = BlockedSequence::with_capacity(s.len(), 0);
    let mut count = 0;
    for (p, &a) in s.iter().enumerate() {
        if weights[p] > 0 && count >= ell {
            out.close_block(false);
            count = 0;
        }
        count += weights[p];
        out.push_symbol(a);
    }
    if !s.is_empty() {
        out.close_block(false);
    }
    Ok(out)
}

/// Number of terminal occurrences at each position: 2 for a symbol that
/// occurs once, 1 at the first and last occurrence otherwise.
pub fn terminal_weights(s: &[Symbol]) -> Vec<usize> {
    let mut first: HashMap<Symbol, usize> = HashMap::new();
    let mut last: HashMap<Symbol, usize> = HashMap::new();
    for (p, &a) in s.iter().enumerate() {
        first.entry(a).or_insert(p);
        last.insert(a, p);
    }
    let mut w = vec![0; s.len()];
    for (&a, &p) in &first {
        w[p] += 1;
        w[last[&a]] += 1;
    }
    w
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KlazarClaims {
    pub segment_count_ok: bool,
    pub per_symbol_count_ok: bool,
    pub segment_length_ok: bool,
}

impl KlazarClaims {
    pub fn all_hold(&self) -> bool {
        self.segment_count_ok && self.per_symbol_count_ok && self.segment_length_ok
    }
}

/// Checks the segment count `<= ceil(2n / ell)` and, per segment, that no
/// symbol occurs more than `ell` times and `|S_i| <= ||S_i|| + ell^2 - 1`.
pub fn check_klazar_claims(s: &[Symbol], parts: &BlockedSequence, ell: usize) -> KlazarClaims {
    let n = alphabet_size(s);
    let mut per_symbol_count_ok = true;
    let mut segment_length_ok = true;
    for seg in parts.blocks() {
        let mut counts: HashMap<Symbol, usize> = HashMap::new();
        for &a in seg {
            *counts.entry(a).or_default() += 1;
        }
        per_symbol_count_ok &= counts.values().all(|&c| c <= ell);
        segment_length_ok &= seg.len() < counts.len() + ell * ell;
    }
    KlazarClaims {
        segment_count_ok: parts.block_count() <= (2 * n).div_ceil(ell),
        per_symbol_count_ok,
        segment_length_ok,
    }
}

/// Keeps a symbol only if it differs from each of the last `r-1` kept symbols.
pub fn sparsify(b: &BlockedSequence, r: usize) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = Vec::with_capacity(b.len());
    let window = r.saturating_sub(1);
    for &a in b.symbols() {
        let lo = out.len().saturating_sub(window);
        if !out[lo..].contains(&a) {
            out.push(a);
        }
    }
    out
}

/// Groups each symbol's occurrences left to right into runs of `k`, drops
/// the incomplete tail and renames every run to a fresh symbol numbered after
/// all original ids, in order of the run's first occurrence.
pub fn cluster_multiplicity(b: &BlockedSequence, k: usize) -> Result<BlockedSequence> {
    if k == 0 {
        return Err(Error::InvalidInput("cluster size must be positive".into()));
    }
    let syms = b.symbols();
    let base = syms.iter().map(|&a| a + 1).max().unwrap_or(0);
    let mut total: HashMap<Symbol, usize> = HashMap::new();
    for &a in syms {
        *total.entry(a).or_default() += 1;
    }
    let mut seen: HashMap<Symbol, usize> = HashMap::new();
    let mut current: HashMap<Symbol, Symbol> = HashMap::new();
    let mut next_fresh = base;
    let mut renamed: Vec<Option<Symbol>> = Vec::with_capacity(syms.len());
    for &a in syms {
        let i = seen.entry(a).or_default();
        let keep = *i < total[&a] / k * k;
        if keep && (*i).is_multiple_of(k) {
            current.insert(a, next_fresh);
            next_fresh += 1;
        }
        renamed.push(keep.then(|| current[&a]));
        *i += 1;
    }
    let mut out = BlockedSequence::with_capacity(syms.len(), b.block_count());
    let mut p = 0;
    for (bi, block) in b.blocks().enumerate() {
        for _ in block {
            if let Some(x) = renamed[p] {
                out.push_symbol(x);
            }
            p += 1;
        }
        out.close_block(b.is_special(bi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::sequence::{max_alternation, parse_symbols};

    fn seq(t: &str) -> Vec<Symbol> {
        parse_symbols(t).unwrap()
    }

    fn blocked(parts: &[&str]) -> BlockedSequence {
        BlockedSequence::new(parts.iter().map(|p| seq(p)).collect(), BTreeSet::new()).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let abab = seq("abab");
        assert_eq!(greedy_order_partition(&abab, 1).unwrap().render_text(), "(0 1) | (0 1)");
        assert_eq!(greedy_order_partition(&abab, 2).unwrap().render_text(), "(0 1 0) | (1)");
        assert_eq!(greedy_order_partition(&abab, 3).unwrap().block_count(), 1);
        assert!(greedy_order_partition(&seq("aab"), 2).is_err());
    }

    #[test]
    fn greedy_is_minimal_on_small_words() {
        // Minimum number of order-r segments by dynamic programming.
        fn min_blocks(s: &[Symbol], r: usize) -> usize {
            let n = s.len();
            let mut best = vec![usize::MAX; n + 1];
            best[0] = 0;
            for j in 1..=n {
                for i in 0..j {
                    if best[i] != usize::MAX && max_alternation(&s[i..j]).0 <= r + 1 {
                        best[j] = best[j].min(best[i] + 1);
                    }
                }
            }
            best[n]
        }
        let words = ["abcacbab", "abacabadab", "abcbadcdab", "abab", "abcabcabca"];
        for w in words {
            let s = seq(w);
            for r in 1..=3 {
                assert_eq!(
                    greedy_order_partition(&s, r).unwrap().block_count(),
                    min_blocks(&s, r),
                    "{w} r={r}"
                );
            }
        }
    }

    #[test]
    fn layers_examples() {
        let b = blocked(&["ab", "ba"]);
        let one = layer_decompose(&b, &[2]).unwrap();
        assert!(one.symbol_classes.values().all(|c| matches!(c, SymbolClass::Local(0))));
        assert_eq!(one.local.len(), 4);

        let two = layer_decompose(&b, &[1, 1]).unwrap();
        assert!(two.symbol_classes.values().all(|&c| c == SymbolClass::Global));
        assert_eq!(two.occurrence_classes[&(0, 0)], OccurrenceClass::Starting);
        assert_eq!(two.occurrence_classes[&(0, 1)], OccurrenceClass::Ending);
        assert!(two.middle.is_empty());
        assert!(check_layer_claims(&b, &two, 3).all_hold());
        assert!(layer_decompose(&b, &[1]).is_err());
    }

    #[test]
    fn klazar_examples() {
        let abab = seq("abab");
        assert_eq!(klazar_partition(&abab, 4).unwrap().block_count(), 1);
        let two = klazar_partition(&abab, 2).unwrap();
        assert_eq!(two.render_text(), "(0 1) | (0 1)");
        assert!(check_klazar_claims(&abab, &two, 2).all_hold());
        assert!(klazar_partition(&seq("ababa"), 2).is_err());
    }

    #[test]
    fn sparsify_examples() {
        assert_eq!(sparsify(&blocked(&["ab", "ba"]), 2), seq("aba"));
        assert_eq!(sparsify(&blocked(&["abc"]), 3), seq("abc"));
        assert_eq!(sparsify(&blocked(&["ab", "ba"]), 1), seq("abba"));
    }

    #[test]
    fn clustering_examples() {
        let c = cluster_multiplicity(&blocked(&["a", "a", "a", "a"]), 2).unwrap();
        assert_eq!(c.render_text(), "(1) | (1) | (2) | (2)");
        let c = cluster_multiplicity(&blocked(&["a", "b", "a"]), 2).unwrap();
        assert_eq!(c.render_text(), "(2) | () | (2)");
    }
}
