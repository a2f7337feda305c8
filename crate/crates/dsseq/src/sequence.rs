//! Sequence data model and per-sequence predicates.
//!
//! Symbols are plain `u32` ids. A [`BlockedSequence`] stores its symbols
//! flat together with block offsets, so that very long constructions do not
//! pay one allocation per block.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u32;

/// Default limit on the alphabet size of a pattern in [`contains_pattern`].
pub const DEFAULT_PATTERN_CAP: usize = 6;

/// Number of distinct symbols.
pub fn alphabet_size(s: &[Symbol]) -> usize {
    s.iter().collect::<HashSet<_>>().len()
}

/// Renames symbols to `0, 1, 2, ...` in order of first appearance.
pub fn canonicalize(s: &[Symbol]) -> Vec<Symbol> {
    let mut names: HashMap<Symbol, Symbol> = HashMap::new();
    s.iter()
        .map(|&a| {
            let next = names.len() as Symbol;
            *names.entry(a).or_insert(next)
        })
        .collect()
}

/// True iff every window of `r` consecutive symbols has distinct entries.
pub fn is_r_sparse(s: &[Symbol], r: usize) -> bool {
    if r <= 1 {
        return true;
    }
    if r == 2 {
        return s.windows(2).all(|w| w[0] != w[1]);
    }
    let mut last_seen: HashMap<Symbol, usize> = HashMap::new();
    for (i, &a) in s.iter().enumerate() {
        if let Some(&j) = last_seen.get(&a) {
            if i - j < r {
                return false;
            }
        }
        last_seen.insert(a, i);
    }
    true
}

/// Length of the longest alternation `a b a b ...` between `a` and `b`,
/// found by a direct scan of the whole sequence.
pub fn pair_alternation(s: &[Symbol], a: Symbol, b: Symbol) -> usize {
    let mut len = 0;
    let mut last = None;
    for &x in s {
        if (x == a || x == b) && last != Some(x) {
            len += 1;
            last = Some(x);
        }
    }
    len
}

/// Longest two-symbol alternation in `s`, with a pair attaining it.
///
/// With fewer than two distinct symbols the result is the alphabet size and
/// no pair.
pub fn max_alternation(s: &[Symbol]) -> (usize, Option<(Symbol, Symbol)>) {
    let canon = canonicalize(s);
    let n = canon.iter().map(|&a| a as usize + 1).max().unwrap_or(0);
    if n < 2 {
        return (n, None);
    }
    let back = original_names(s, &canon, n);
    let (len, (a, b)) = AlternationIndex::new(&canon, n).maximum();
    (len, Some((back[a as usize], back[b as usize])))
}

fn original_names(s: &[Symbol], canon: &[Symbol], n: usize) -> Vec<Symbol> {
    let mut back = vec![0; n];
    for (&orig, &c) in s.iter().zip(canon) {
        back[c as usize] = orig;
    }
    back
}

/// True iff `s` is 2-sparse and has no alternation of length `order + 2`.
pub fn is_ds(s: &[Symbol], order: usize) -> bool {
    is_r_sparse(s, 2) && max_alternation(s).0 <= order + 1
}

/// Exact maximum alternation over all pairs without touching every pair.
///
/// Alternations of length at most 4 are located with range queries over the
/// gaps between consecutive occurrences. Any pair alternating at least five
/// times contains `y x y x y` for one orientation, which means a gap of `x`
/// crosses a gap of `y` while `x` also occurs after the `y` gap ends; such
/// crossings are reported output-sensitively and each candidate pair is then
/// measured exactly by merging occurrence lists.
struct AlternationIndex<'a> {
    s: &'a [Symbol],
    occ: Vec<Vec<usize>>,
    prev: Vec<usize>,
    next: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl<'a> AlternationIndex<'a> {
    fn new(s: &'a [Symbol], n: usize) -> Self {
        let mut occ = vec![Vec::new(); n];
        let mut prev = vec![NONE; s.len()];
        let mut next = vec![NONE; s.len()];
        for (i, &a) in s.iter().enumerate() {
            let list: &mut Vec<usize> = &mut occ[a as usize];
            if let Some(&p) = list.last() {
                prev[i] = p;
                next[p] = i;
            }
            list.push(i);
        }
        AlternationIndex { s, occ, prev, next }
    }

    fn first(&self, a: Symbol) -> usize {
        self.occ[a as usize][0]
    }

    fn last(&self, a: Symbol) -> usize {
        *self.occ[a as usize].last().unwrap()
    }

    fn merged_runs(&self, a: Symbol, b: Symbol) -> usize {
        let (xa, xb) = (&self.occ[a as usize], &self.occ[b as usize]);
        let (mut i, mut j, mut runs, mut last) = (0, 0, 0, 2u8);
        while i < xa.len() || j < xb.len() {
            let take_a = j == xb.len() || (i < xa.len() && xa[i] < xb[j]);
            let side = if take_a { 0 } else { 1 };
            if take_a {
                i += 1;
            } else {
                j += 1;
            }
            if side != last {
                runs += 1;
                last = side;
            }
        }
        runs
    }

    fn maximum(&self) -> (usize, (Symbol, Symbol)) {
        let s = self.s;
        let len = s.len();
        // Two distinct symbols always alternate twice.
        let mut best = (2, (s[0], *s.iter().find(|&&x| x != s[0]).unwrap()));

        // Length 3: some gap between consecutive equal symbols is nonempty.
        for i in 0..len {
            let p = self.prev[i];
            if p != NONE && i - p >= 2 {
                best = (3, (s[i], s[p + 1]));
                break;
            }
        }
        if best.0 < 3 {
            return best;
        }

        // Length 4: a gap of x holds a y that also occurs after (or before) it.
        let lasts: Vec<usize> = s.iter().map(|&a| self.last(a)).collect();
        let firsts: Vec<usize> = s.iter().map(|&a| len - 1 - self.first(a)).collect();
        let max_last = MaxTree::build(&lasts);
        let max_first = MaxTree::build(&firsts);
        'four: for i in 0..len {
            let p = self.prev[i];
            if p == NONE || i - p < 2 {
                continue;
            }
            if let Some((v, j)) = max_last.query(p + 1, i) {
                if v > i {
                    best = (4, (s[i], s[j]));
                    break 'four;
                }
            }
            if let Some((v, j)) = max_first.query(p + 1, i) {
                if len - 1 - v < p {
                    best = (4, (s[i], s[j]));
                    break 'four;
                }
            }
        }
        if best.0 < 4 {
            return best;
        }

        // Length >= 5: enumerate crossings of an x-gap (p, i) with a y-gap
        // (l, r) where p < l < i < r and x occurs after r.
        let mut active = MaxTree::empty(len);
        let mut candidates: HashSet<(Symbol, Symbol)> = HashSet::new();
        let mut hits = Vec::new();
        for l in 0..len {
            if l > 0 {
                let p = l - 1;
                let i = self.next[p];
                if i != NONE {
                    active.set(i, lasts[p]);
                }
            }
            let r = self.next[l];
            if r == NONE || r - l < 2 {
                continue;
            }
            hits.clear();
            active.report_above(l + 1, r, r, &mut hits);
            for &i in &hits {
                let (x, y) = (s[i], s[l]);
                candidates.insert((x.min(y), x.max(y)));
            }
        }
        let mut sorted: Vec<_> = candidates.into_iter().collect();
        sorted.sort_unstable();
        for (a, b) in sorted {
            let runs = self.merged_runs(a, b);
            if runs > best.0 {
                best = (runs, (a, b));
            }
        }
        best
    }
}

/// Segment tree for range maximum with position; empty slots hold `None`.
struct MaxTree {
    size: usize,
    data: Vec<Option<(usize, usize)>>,
}

impl MaxTree {
    fn empty(n: usize) -> Self {
        let size = n.next_power_of_two().max(1);
        MaxTree {
            size,
            data: vec![None; 2 * size],
        }
    }

    fn build(values: &[usize]) -> Self {
        let mut t = Self::empty(values.len());
        for (i, &v) in values.iter().enumerate() {
            t.data[t.size + i] = Some((v, i));
        }
        for k in (1..t.size).rev() {
            t.data[k] = Self::combine(t.data[2 * k], t.data[2 * k + 1]);
        }
        t
    }

    fn combine(a: Option<(usize, usize)>, b: Option<(usize, usize)>) -> Option<(usize, usize)> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if y.0 > x.0 { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn set(&mut self, i: usize, v: usize) {
        let mut k = self.size + i;
        self.data[k] = Some((v, i));
        while k > 1 {
            k /= 2;
            self.data[k] = Self::combine(self.data[2 * k], self.data[2 * k + 1]);
        }
    }

    /// Maximum over positions `lo..hi` (half-open).
    fn query(&self, lo: usize, hi: usize) -> Option<(usize, usize)> {
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        let mut acc = None;
        while l < r {
            if l & 1 == 1 {
                acc = Self::combine(acc, self.data[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                acc = Self::combine(acc, self.data[r]);
            }
            l /= 2;
            r /= 2;
        }
        acc
    }

    /// Pushes every position in `lo..hi` whose value exceeds `bound`.
    fn report_above(&self, lo: usize, hi: usize, bound: usize, out: &mut Vec<usize>) {
        self.report_rec(1, 0, self.size, lo, hi, bound, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn report_rec(&self, k: usize, nl: usize, nr: usize, lo: usize, hi: usize, bound: usize, out: &mut Vec<usize>) {
        if nr <= lo || hi <= nl {
            return;
        }
        match self.data[k] {
            Some((v, _)) if v > bound => {}
            _ => return,
        }
        if nr - nl == 1 {
            out.push(nl);
            return;
        }
        let mid = (nl + nr) / 2;
        self.report_rec(2 * k, nl, mid, lo, hi, bound, out);
        self.report_rec(2 * k + 1, mid, nr, lo, hi, bound, out);
    }
}

/// A witness that a pattern occurs in a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternWitness {
    /// Pairs `(pattern symbol, sequence symbol)` of the injective renaming.
    pub map: Vec<(Symbol, Symbol)>,
    /// Matched positions in the sequence, one per pattern entry.
    pub positions: Vec<usize>,
}

/// Searches for a subsequence of `s` isomorphic to `u`, with the default cap.
pub fn contains_pattern(u: &[Symbol], s: &[Symbol]) -> Result<Option<PatternWitness>> {
    contains_pattern_with_cap(u, s, DEFAULT_PATTERN_CAP)
}

pub fn contains_pattern_with_cap(u: &[Symbol], s: &[Symbol], cap: usize) -> Result<Option<PatternWitness>> {
    let k = alphabet_size(u);
    if k > cap {
        return Err(Error::CapExceeded { size: k, cap });
    }
    let cu = canonicalize(u);
    let cs = canonicalize(s);
    let n = cs.iter().map(|&a| a as usize + 1).max().unwrap_or(0);
    if k > n {
        return Ok(None);
    }
    let mut occ = vec![Vec::new(); n];
    for (i, &a) in cs.iter().enumerate() {
        occ[a as usize].push(i);
    }
    let mut search = PatternSearch {
        u: &cu,
        occ: &occ,
        image: vec![None; k],
        used: vec![false; n],
        positions: Vec::with_capacity(u.len()),
    };
    if !search.run(0, 0) {
        return Ok(None);
    }
    let s_names = original_names(s, &cs, n);
    let u_names = original_names(u, &cu, k);
    let map = search
        .image
        .iter()
        .enumerate()
        .map(|(a, b)| (u_names[a], s_names[b.unwrap() as usize]))
        .collect();
    Ok(Some(PatternWitness {
        map,
        positions: search.positions,
    }))
}

struct PatternSearch<'a> {
    u: &'a [Symbol],
    occ: &'a [Vec<usize>],
    image: Vec<Option<Symbol>>,
    used: Vec<bool>,
    positions: Vec<usize>,
}

impl PatternSearch<'_> {
    fn next_at(&self, b: Symbol, from: usize) -> Option<usize> {
        let list = &self.occ[b as usize];
        let k = list.partition_point(|&p| p < from);
        list.get(k).copied()
    }

    fn run(&mut self, j: usize, from: usize) -> bool {
        if j == self.u.len() {
            return true;
        }
        let a = self.u[j] as usize;
        if let Some(b) = self.image[a] {
            return match self.next_at(b, from) {
                Some(p) => {
                    self.positions.push(p);
                    if self.run(j + 1, p + 1) {
                        return true;
                    }
                    self.positions.pop();
                    false
                }
                None => false,
            };
        }
        for b in 0..self.occ.len() {
            if self.used[b] {
                continue;
            }
            let Some(p) = self.next_at(b as Symbol, from) else {
                continue;
            };
            self.used[b] = true;
            self.image[a] = Some(b as Symbol);
            self.positions.push(p);
            if self.run(j + 1, p + 1) {
                return true;
            }
            self.positions.pop();
            self.image[a] = None;
            self.used[b] = false;
        }
        false
    }
}

/// A sequence split into contiguous blocks, some of which may be flagged
/// special. Blocks may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockedSequence {
    symbols: Vec<Symbol>,
    offsets: Vec<usize>,
    special: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
struct BlockedJson {
    blocks: Vec<Vec<Symbol>>,
    #[serde(default)]
    special: Vec<usize>,
}

impl BlockedSequence {
    /// Builds from explicit blocks. Fails if a special index is out of range.
    pub fn new(blocks: Vec<Vec<Symbol>>, special: BTreeSet<usize>) -> Result<Self> {
        if let Some(&k) = special.iter().next_back() {
            if k >= blocks.len() {
                return Err(Error::InvalidInput(format!(
                    "special block {k} out of range for {} blocks",
                    blocks.len()
                )));
            }
        }
        let mut b = BlockedSequence::with_capacity(0, blocks.len());
        for block in blocks {
            b.push_block(&block);
        }
        b.special = special;
        Ok(b)
    }

    /// A one-block sequence.
    pub fn single(s: &[Symbol]) -> Self {
        let mut b = BlockedSequence::with_capacity(s.len(), 1);
        b.push_block(s);
        b
    }

    pub(crate) fn with_capacity(len: usize, blocks: usize) -> Self {
        let mut offsets = Vec::with_capacity(blocks + 1);
        offsets.push(0);
        BlockedSequence {
            symbols: Vec::with_capacity(len),
            offsets,
            special: BTreeSet::new(),
        }
    }

    pub(crate) fn push_block(&mut self, block: &[Symbol]) {
        self.symbols.extend_from_slice(block);
        self.offsets.push(self.symbols.len());
    }

    /// Appends one symbol to the open tail; call [`Self::close_block`] to end it.
    pub(crate) fn push_symbol(&mut self, a: Symbol) {
        self.symbols.push(a);
    }

    pub(crate) fn close_block(&mut self, special: bool) {
        if special {
            self.special.insert(self.offsets.len() - 1);
        }
        self.offsets.push(self.symbols.len());
    }

    pub(crate) fn mark_special(&mut self, i: usize) {
        self.special.insert(i);
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn block(&self, i: usize) -> &[Symbol] {
        &self.symbols[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[Symbol]> + '_ {
        self.offsets.windows(2).map(|w| &self.symbols[w[0]..w[1]])
    }

    /// Start offset of block `i` in the flat symbol list.
    pub fn block_start(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Index of the block holding position `p`.
    pub fn block_index_of(&self, p: usize) -> usize {
        self.offsets.partition_point(|&o| o <= p) - 1
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn special(&self) -> &BTreeSet<usize> {
        &self.special
    }

    pub fn is_special(&self, i: usize) -> bool {
        self.special.contains(&i)
    }

    pub fn alphabet_size(&self) -> usize {
        alphabet_size(&self.symbols)
    }

    /// True iff every block consists of pairwise distinct symbols.
    pub fn blocks_distinct(&self) -> bool {
        let mut seen = HashSet::new();
        self.blocks().all(|b| {
            seen.clear();
            b.iter().all(|a| seen.insert(*a))
        })
    }

    /// The same block structure with symbols renamed by first appearance.
    pub fn canonicalized(&self) -> Self {
        BlockedSequence {
            symbols: canonicalize(&self.symbols),
            offsets: self.offsets.clone(),
            special: self.special.clone(),
        }
    }

    /// Keeps only the occurrences for which `keep(position)` holds; block
    /// structure and flags are preserved, possibly leaving empty blocks.
    pub fn filter_positions(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let mut out = BlockedSequence::with_capacity(self.len(), self.block_count());
        for i in 0..self.block_count() {
            for p in self.offsets[i]..self.offsets[i + 1] {
                if keep(p) {
                    out.push_symbol(self.symbols[p]);
                }
            }
            out.close_block(self.is_special(i));
        }
        out
    }

    /// Blocks `lo..hi` as a new blocked sequence.
    pub fn slice_blocks(&self, lo: usize, hi: usize) -> Self {
        let mut out = BlockedSequence::with_capacity(0, hi - lo);
        for i in lo..hi {
            out.push_block(self.block(i));
            if self.is_special(i) {
                out.mark_special(i - lo);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BlockedJson {
            blocks: self.blocks().map(|b| b.to_vec()).collect(),
            special: self.special.iter().copied().collect(),
        })
        .expect("blocked sequence serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: BlockedJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(format!("sequence json: {e}")))?;
        BlockedSequence::new(raw.blocks, raw.special.into_iter().collect())
    }

    /// Bracket notation: special blocks in `[ ]`, regular ones in `( )`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, b) in self.blocks().enumerate() {
            if i > 0 {
                out.push_str(" | ");
            }
            let (open, close) = if self.is_special(i) { ('[', ']') } else { ('(', ')') };
            out.push(open);
            let body: Vec<String> = b.iter().map(|a| a.to_string()).collect();
            out.push_str(&body.join(" "));
            out.push(close);
        }
        out
    }
}

impl fmt::Display for BlockedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

/// Deletes the first symbol of a block whenever it equals the last symbol
/// kept so far, so that no two adjacent symbols are equal.
pub fn remove_adjacent_repeats(b: &BlockedSequence) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = Vec::with_capacity(b.len());
    for block in b.blocks() {
        let mut rest = block;
        if let (Some(&first), Some(&last)) = (block.first(), out.last()) {
            if first == last {
                rest = &block[1..];
            }
        }
        out.extend_from_slice(rest);
    }
    out
}

/// Parses whitespace- or comma-separated symbol ids; letters `a..z` are also
/// accepted and mapped to `0..25`.
pub fn parse_symbols(text: &str) -> Result<Vec<Symbol>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if text.chars().all(|c| c.is_ascii_lowercase()) {
        return Ok(text.bytes().map(|c| (c - b'a') as Symbol).collect());
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t.len() == 1 && t.as_bytes()[0].is_ascii_lowercase() {
                Ok((t.as_bytes()[0] - b'a') as Symbol)
            } else {
                t.parse::<Symbol>()
                    .map_err(|_| Error::InvalidInput(format!("bad symbol '{t}'")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(t: &str) -> Vec<Symbol> {
        parse_symbols(t).unwrap()
    }

    fn blocked(parts: &[&str]) -> BlockedSequence {
        BlockedSequence::new(parts.iter().map(|p| seq(p)).collect(), BTreeSet::new()).unwrap()
    }

    fn brute_max_alternation(s: &[Symbol]) -> usize {
        let alphabet: BTreeSet<Symbol> = s.iter().copied().collect();
        if alphabet.len() < 2 {
            return alphabet.len();
        }
        let v: Vec<Symbol> = alphabet.into_iter().collect();
        let mut best = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(pair_alternation(s, v[i], v[j]));
            }
        }
        best
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonicalize(&seq("baba")), vec![0, 1, 0, 1]);
        assert_eq!(canonicalize(&[]), Vec::<Symbol>::new());
        assert_eq!(canonicalize(&[7, 7, 3]), vec![0, 0, 1]);
    }

    #[test]
    fn sparsity_examples() {
        assert!(is_r_sparse(&seq("abab"), 2));
        assert!(!is_r_sparse(&seq("abab"), 3));
        assert!(is_r_sparse(&seq("aaaa"), 1));
        assert!(is_r_sparse(&seq("abcabc"), 3));
        assert!(!is_r_sparse(&seq("abcab"), 4));
    }

    #[test]
    fn alternation_examples() {
        let (len, pair) = max_alternation(&seq("abab"));
        assert_eq!(len, 4);
        assert_eq!(pair, Some((0, 1)));
        assert_eq!(max_alternation(&seq("abba")).0, 3);
        assert_eq!(max_alternation(&[1, 2, 2, 1, 1, 2]).0, 4);
        assert_eq!(max_alternation(&[]), (0, None));
        assert_eq!(max_alternation(&[5, 5]), (1, None));
        assert_eq!(max_alternation(&seq("ababab")).0, 6);
        assert_eq!(max_alternation(&seq("abcbcbca")).0, 6);
    }

    #[test]
    fn alternation_matches_brute_force_on_small_words() {
        // Every word of length 7 over 3 letters.
        for code in 0..3usize.pow(7) {
            let mut c = code;
            let s: Vec<Symbol> = (0..7)
                .map(|_| {
                    let a = (c % 3) as Symbol;
                    c /= 3;
                    a
                })
                .collect();
            let (len, pair) = max_alternation(&s);
            assert_eq!(len, brute_max_alternation(&s), "{s:?}");
            if let Some((a, b)) = pair {
                assert_eq!(pair_alternation(&s, a, b), len);
            }
        }
    }

    #[test]
    fn ds_examples() {
        assert!(!is_ds(&seq("abab"), 2));
        assert!(is_ds(&seq("abab"), 3));
        assert!(!is_ds(&seq("aab"), 5));
    }

    #[test]
    fn pattern_examples() {
        let s = seq("abcdbc");
        let w = contains_pattern(&seq("abab"), &s).unwrap().unwrap();
        assert_eq!(w.positions.len(), 4);
        assert!(contains_pattern(&seq("abba"), &s).unwrap().is_none());
        assert!(contains_pattern(&seq("a"), &seq("x")).unwrap().is_some());
        let big = seq("abcdefg");
        assert!(matches!(
            contains_pattern(&big, &big),
            Err(Error::CapExceeded { size: 7, cap: 6 })
        ));
    }

    #[test]
    fn pattern_witness_is_faithful() {
        let u = seq("abcacb");
        let s = seq("dcabdacbd");
        let w = contains_pattern(&u, &s).unwrap().unwrap();
        let map: HashMap<Symbol, Symbol> = w.map.iter().copied().collect();
        for (j, &p) in w.positions.iter().enumerate() {
            assert_eq!(s[p], map[&u[j]]);
        }
        assert!(w.positions.windows(2).all(|x| x[0] < x[1]));
    }

    #[test]
    fn repeat_removal_examples() {
        assert_eq!(remove_adjacent_repeats(&blocked(&["ab", "ba"])), seq("aba"));
        assert_eq!(remove_adjacent_repeats(&blocked(&["abc"])), seq("abc"));
        assert_eq!(remove_adjacent_repeats(&blocked(&["a", "a", "a"])), seq("a"));
        assert_eq!(remove_adjacent_repeats(&blocked(&["ab", "", "ba"])), seq("aba"));
    }

    #[test]
    fn json_and_text_round_trip() {
        let b = BlockedSequence::new(
            vec![vec![0, 1, 2], vec![2, 1, 0], vec![0, 1, 2]],
            [0, 2].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(b.render_text(), "[0 1 2] | (2 1 0) | [0 1 2]");
        let j = b.to_json();
        assert_eq!(j.to_string(), r#"{"blocks":[[0,1,2],[2,1,0],[0,1,2]],"special":[0,2]}"#);
        assert_eq!(BlockedSequence::from_json(&j).unwrap(), b);
        assert!(BlockedSequence::new(vec![vec![0]], [1].into_iter().collect()).is_err());
    }
}
