//! `(r,s)`-formations: `s` consecutive permutations of the same `r` symbols.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{canonicalize, contains_pattern_with_cap, is_r_sparse, BlockedSequence, Symbol};

/// Default cap on `r` for formation searches.
pub const DEFAULT_FORMATION_CAP: usize = 4;
/// Default cap on the alphabet size of a searched sequence.
pub const DEFAULT_ALPHABET_CAP: usize = 64;

/// `s` permutations of the symbols `0..r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Formation {
    r: usize,
    perms: Vec<Vec<Symbol>>,
}

impl Formation {
    pub fn new(perms: Vec<Vec<Symbol>>) -> Result<Self> {
        let r = perms.first().map_or(0, Vec::len);
        for p in &perms {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if sorted != (0..r as Symbol).collect::<Vec<_>>() {
                return Err(Error::InvalidInput(format!("{p:?} is not a permutation of 0..{r}")));
            }
        }
        Ok(Formation { r, perms })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Vec<Symbol>] {
        &self.perms
    }

    pub fn flatten(&self) -> Vec<Symbol> {
        self.perms.concat()
    }

    /// Parses a JSON list of permutations.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let perms: Vec<Vec<Symbol>> =
            serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(format!("bad formation: {e}")))?;
        Formation::new(perms)
    }
}

/// `r` symbols and `s` disjoint consecutive windows, each containing all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormationWitness {
    pub symbols: Vec<Symbol>,
    /// Inclusive position ranges.
    pub windows: Vec<(usize, usize)>,
}

/// Finds an `(r,s)`-formation in `seq` if one exists.
pub fn contains_formation(seq: &[Symbol], r: usize, s: usize) -> Result<Option<FormationWitness>> {
    contains_formation_with_caps(seq, r, s, DEFAULT_FORMATION_CAP, DEFAULT_ALPHABET_CAP)
}

pub fn contains_formation_with_caps(
    seq: &[Symbol],
    r: usize,
    s: usize,
    r_cap: usize,
    alphabet_cap: usize,
) -> Result<Option<FormationWitness>> {
    if r > r_cap {
        return Err(Error::CapExceeded { size: r, cap: r_cap });
    }
    let alphabet: Vec<Symbol> = seq.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if alphabet.len() > alphabet_cap {
        return Err(Error::CapExceeded {
            size: alphabet.len(),
            cap: alphabet_cap,
        });
    }
    if r == 0 || s == 0 {
        return Ok(Some(FormationWitness {
            symbols: vec![],
            windows: vec![],
        }));
    }
    if r > alphabet.len() {
        return Ok(None);
    }
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        let symbols: Vec<Symbol> = subset.iter().map(|&i| alphabet[i]).collect();
        if let Some(windows) = pack_windows(seq, &symbols, s) {
            return Ok(Some(FormationWitness { symbols, windows }));
        }
        if !next_subset(&mut subset, alphabet.len()) {
            return Ok(None);
        }
    }
}

/// Cuts windows greedily, each ending as soon as it has seen every symbol.
fn pack_windows(seq: &[Symbol], symbols: &[Symbol], s: usize) -> Option<Vec<(usize, usize)>> {
    let mut windows = Vec::with_capacity(s);
    let mut seen = vec![false; symbols.len()];
    let mut missing = symbols.len();
    let mut start = None;
    for (p, a) in seq.iter().enumerate() {
        let Some(i) = symbols.iter().position(|x| x == a) else {
            continue;
        };
        start.get_or_insert(p);
        if !std::mem::replace(&mut seen[i], true) {
            missing -= 1;
        }
        if missing == 0 {
            windows.push((start.take().unwrap(), p));
            if windows.len() == s {
                return Some(windows);
            }
            seen.iter_mut().for_each(|x| *x = false);
            missing = symbols.len();
        }
    }
    None
}

fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `r`-sparse and free of `(r,s)`-formations.
pub fn is_formation_free(seq: &[Symbol], r: usize, s: usize) -> Result<bool> {
    Ok(is_r_sparse(seq, r) && contains_formation(seq, r, s)?.is_none())
}

/// Splits a canonical pattern into increasing blocks: a block ends before
/// every position that is not the first occurrence of its symbol.
pub fn pattern_blocks(u: &[Symbol]) -> Result<Vec<Vec<Symbol>>> {
    if canonicalize(u) != u {
        return Err(Error::InvalidInput(
            "pattern must number its symbols 0, 1, ... by first appearance".into(),
        ));
    }
    let mut blocks: Vec<Vec<Symbol>> = Vec::new();
    let mut next_new = 0;
    for (p, &a) in u.iter().enumerate() {
        let first = a == next_new;
        if first {
            next_new += 1;
        }
        if p == 0 || !first {
            blocks.push(vec![a]);
        } else {
            blocks.last_mut().unwrap().push(a);
        }
    }
    Ok(blocks)
}

/// A renaming `sigma` of the pattern's symbols under which `sigma(u)` is a
/// subsequence of the flattened formation. `sigma[i]` is the image of `i`.
///
/// Requires `u` canonical, `||u|| = r` and exactly `|u| - ||u|| + 1` permutations.
pub fn embed_pattern(u: &[Symbol], formation: &Formation) -> Result<Vec<Symbol>> {
    let blocks = pattern_blocks(u)?;
    let r = u.iter().map(|&a| a as usize + 1).max().unwrap_or(0);
    if r != formation.r() || blocks.len() != formation.s() {
        return Err(Error::InvalidInput(format!(
            "pattern with {} symbols and {} blocks needs a ({}, {}) formation",
            r,
            blocks.len(),
            r,
            blocks.len()
        )));
    }
    let mut sigma: Vec<Option<Symbol>> = vec![None; r];
    let mut used = vec![false; r];
    for (block, perm) in blocks.iter().zip(formation.perms()).rev() {
        let free: Vec<Symbol> = perm.iter().rev().copied().filter(|&x| !used[x as usize]).collect();
        let mut free = free.into_iter();
        for &a in block[1..].iter().rev() {
            let x = free
                .next()
                .ok_or_else(|| Error::Internal("ran out of free symbols".into()))?;
            sigma[a as usize] = Some(x);
            used[x as usize] = true;
        }
    }
    let mut rest = (0..r as Symbol).filter(|&x| !used[x as usize]);
    let sigma: Vec<Symbol> = sigma
        .into_iter()
        .map(|s| s.or_else(|| rest.next()))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("incomplete renaming".into()))?;
    let image: Vec<Symbol> = u.iter().map(|&a| sigma[a as usize]).collect();
    if !is_subsequence(&image, &formation.flatten()) {
        return Err(Error::Internal("renamed pattern is not embedded".into()));
    }
    Ok(sigma)
}

pub fn is_subsequence(needle: &[Symbol], hay: &[Symbol]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|a| it.any(|b| b == a))
}

/// Whether `u` (up to renaming) occurs in the flattened formation.
pub fn formation_contains(u: &[Symbol], formation: &Formation) -> Result<bool> {
    Ok(contains_pattern_with_cap(u, &formation.flatten(), DEFAULT_FORMATION_CAP.max(u.len()))?.is_some())
}

/// The sequence of `m` blocks on `(r-1)(m-1)` symbols, each twice, with no
/// `(r,2)`-formation: group `i` of `r-1` symbols closes block `i` and opens block `i+1`.
pub fn build_aff_extremal(r: usize, m: usize) -> Result<BlockedSequence> {
    if r < 2 || m == 0 {
        return Err(Error::InvalidInput("need r >= 2 and m >= 1".into()));
    }
    let group = |i: usize| (i * (r - 1)..(i + 1) * (r - 1)).map(|a| a as Symbol);
    let blocks = (0..m)
        .map(|i| {
            let mut b: Vec<Symbol> = Vec::new();
            if i > 0 {
                b.extend(group(i - 1));
            }
            if i + 1 < m {
                b.extend(group(i));
            }
            b
        })
        .collect();
    BlockedSequence::new(blocks, BTreeSet::new())
}

/// Blocks hold distinct symbols, every symbol occurs in at least `k` blocks,
/// and there is no `(r,s)`-formation.
pub fn is_aff(b: &BlockedSequence, r: usize, s: usize, k: usize) -> Result<bool> {
    let mut counts = std::collections::HashMap::new();
    for &a in b.symbols() {
        *counts.entry(a).or_insert(0usize) += 1;
    }
    Ok(b.blocks_distinct() && counts.values().all(|&c| c >= k) && contains_formation(b.symbols(), r, s)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::parse_symbols;

    fn seq(t: &str) -> Vec<Symbol> {
        parse_symbols(t).unwrap()
    }

    fn perm(digits: &str) -> Vec<Symbol> {
        digits.bytes().map(|c| (c - b'1') as Symbol).collect()
    }

    #[test]
    fn formation_detection() {
        let f = seq("abcddcabdcabcdbadabc");
        let w = contains_formation(&f, 4, 5).unwrap().unwrap();
        assert_eq!(w.windows.len(), 5);
        assert!(contains_formation(&f, 4, 6).unwrap().is_none());
        assert!(contains_formation(&seq("ab"), 2, 2).unwrap().is_none());
        assert!(contains_formation(&seq("abaca"), 1, 3).unwrap().is_some());
        assert!(matches!(contains_formation(&f, 5, 1), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn formation_freeness() {
        assert!(!is_formation_free(&seq("abab"), 2, 2).unwrap());
        assert!(is_formation_free(&seq("abab"), 2, 3).unwrap());
        assert!(is_formation_free(&seq("abcde"), 3, 2).unwrap());
        assert!(!is_formation_free(&seq("aa"), 2, 5).unwrap());
    }

    #[test]
    fn pattern_blocks_example() {
        let u: Vec<Symbol> = perm("1112134241255");
        let blocks = pattern_blocks(&u).unwrap();
        let shown: Vec<String> = blocks
            .iter()
            .map(|b| b.iter().map(|a| (a + 1).to_string()).collect())
            .collect();
        assert_eq!(shown, ["1", "1", "12", "134", "2", "4", "1", "25", "5"]);
        assert_eq!(pattern_blocks(&perm("123")).unwrap().len(), 1);
        assert_eq!(pattern_blocks(&perm("11")).unwrap().len(), 2);
        assert!(pattern_blocks(&perm("21")).is_err());
    }

    #[test]
    fn embedding_worked_example() {
        let u = perm("1112134241255");
        let filler = perm("12345");
        let mut perms = vec![filler.clone(); 9];
        perms[2] = perm("32514");
        perms[3] = perm("35421");
        perms[7] = perm("35142");
        let sigma = embed_pattern(&u, &Formation::new(perms).unwrap()).unwrap();
        let shown: Vec<Symbol> = sigma.iter().map(|a| a + 1).collect();
        assert_eq!(shown, [3, 5, 4, 1, 2]);
    }

    #[test]
    fn embedding_trivial() {
        let f = Formation::new(vec![vec![0, 1]]).unwrap();
        assert_eq!(embed_pattern(&[0, 1], &f).unwrap(), vec![0, 1]);
    }

    #[test]
    fn abcabca_in_every_three_four_formation() {
        let perms3: Vec<Vec<Symbol>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        let u = seq("abcabca");
        for code in 0..6usize.pow(4) {
            let perms = (0..4).map(|i| perms3[code / 6usize.pow(i) % 6].clone()).collect();
            let f = Formation::new(perms).unwrap();
            assert!(formation_contains(&u, &f).unwrap());
        }
        let f = Formation::new(vec![vec![0, 1, 2]; 2]).unwrap();
        assert!(!formation_contains(&u, &f).unwrap());
    }

    #[test]
    fn aff_extremal_shapes() {
        let b = build_aff_extremal(2, 3).unwrap();
        assert_eq!(b.render_text(), "(0) | (0 1) | (1)");
        assert_eq!(b.alphabet_size(), 2);
        assert!(is_aff(&b, 2, 2, 2).unwrap());
        let b = build_aff_extremal(3, 2).unwrap();
        assert_eq!(b.render_text(), "(0 1) | (0 1)");
        assert!(is_aff(&b, 3, 2, 2).unwrap());
        assert_eq!(build_aff_extremal(2, 1).unwrap().alphabet_size(), 0);
    }
}
