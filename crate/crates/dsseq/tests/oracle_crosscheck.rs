//! Oracle values checked against a deliberately naive enumerator that only
//! uses the public predicates.

use dsseq::constructions::z::build_z;
use dsseq::formations::contains_formation;
use dsseq::oracles::{
    oracle_ads_symbols, oracle_aff_symbols, oracle_ex, oracle_f, oracle_lambda, oracle_psi, OracleValue, SearchBudget,
};
use dsseq::sequence::{alphabet_size, contains_pattern, is_ds, is_r_sparse, max_alternation, remove_adjacent_repeats};
use dsseq::Symbol;

/// Longest sequence on at most `n` symbols whose every prefix satisfies `ok`.
/// Symbols are introduced in order of first appearance.
fn longest(n: usize, ok: &dyn Fn(&[Symbol]) -> bool) -> usize {
    fn go(seq: &mut Vec<Symbol>, used: usize, n: usize, ok: &dyn Fn(&[Symbol]) -> bool) -> usize {
        let mut best = seq.len();
        for a in 0..(used + 1).min(n) {
            seq.push(a as Symbol);
            if ok(seq) {
                best = best.max(go(seq, used.max(a + 1), n, ok));
            }
            seq.pop();
        }
        best
    }
    go(&mut Vec::new(), 0, n, ok)
}

/// Fewest blocks of distinct symbols covering `s`; cutting late is optimal.
fn greedy_blocks(s: &[Symbol]) -> usize {
    let mut blocks = 0;
    let mut current: Vec<Symbol> = Vec::new();
    for &a in s {
        if blocks == 0 || current.contains(&a) {
            blocks += 1;
            current.clear();
        }
        current.push(a);
    }
    blocks
}

/// Most symbols in `m` blocks of distinct symbols, every symbol in exactly
/// `k` blocks, with `ok` holding on the concatenation. Blocks may be empty and
/// at most `cap` symbols are tried.
fn most_symbols(m: usize, k: usize, cap: usize, ok: &dyn Fn(&[Symbol]) -> bool) -> usize {
    struct Ctx<'a> {
        m: usize,
        k: usize,
        cap: usize,
        ok: &'a dyn Fn(&[Symbol]) -> bool,
    }

    fn block(cx: &Ctx, seq: &mut Vec<Symbol>, counts: &mut Vec<usize>, done: usize, start: usize) -> Option<usize> {
        // `start` is where the current block begins in `seq`.
        let left = cx.m - done - 1;
        let mut best = None;
        // Close the current block.
        if counts.iter().all(|&c| c + left >= cx.k) {
            best = if left == 0 {
                Some(counts.len())
            } else {
                block(cx, seq, counts, done + 1, seq.len())
            };
        }
        let fresh = counts.len();
        for a in 0..=fresh.min(cx.cap.saturating_sub(1)) {
            let is_new = a == fresh;
            if (!is_new && counts[a] == cx.k) || seq[start..].contains(&(a as Symbol)) {
                continue;
            }
            seq.push(a as Symbol);
            if (cx.ok)(seq) {
                if is_new {
                    counts.push(0);
                }
                counts[a] += 1;
                best = best.max(block(cx, seq, counts, done, start));
                counts[a] -= 1;
                if is_new {
                    counts.pop();
                }
            }
            seq.pop();
        }
        best
    }

    let cx = Ctx { m, k, cap, ok };
    block(&cx, &mut Vec::new(), &mut Vec::new(), 0, 0).unwrap_or(0)
}

fn budget() -> SearchBudget {
    SearchBudget::with_nodes(2_000_000)
}

fn exact(v: dsseq::Result<dsseq::oracles::OracleResult>) -> usize {
    let r = v.unwrap();
    assert!(r.exact, "oracle did not finish: {r:?}");
    r.value.finite().expect("finite value") as usize
}

#[test]
fn lambda_matches_enumeration() {
    for (s, max_n) in [(1, 5), (2, 5), (3, 4)] {
        for n in 1..=max_n {
            let naive = longest(n, &|q| is_ds(q, s));
            assert_eq!(exact(oracle_lambda(s, n, &budget())), naive, "lambda_{s}({n})");
        }
    }
}

#[test]
fn psi_matches_enumeration() {
    for s in 1..=3 {
        for n in 1..=3 {
            for m in 1..=6 {
                let naive = longest(n, &|q| is_ds(q, s) && greedy_blocks(q) <= m);
                assert_eq!(exact(oracle_psi(s, m, n, &budget())), naive, "psi_{s}({m},{n})");
            }
        }
    }
}

#[test]
fn f_matches_enumeration() {
    for (r, s, max_n) in [(2, 1, 4), (2, 2, 4), (2, 3, 4), (3, 2, 3)] {
        for n in 1..=max_n {
            let naive = longest(n, &|q| {
                is_r_sparse(q, r) && contains_formation(q, r, s).unwrap().is_none()
            });
            assert_eq!(exact(oracle_f(r, s, n, &budget())), naive, "F_{r},{s}({n})");
        }
    }
}

#[test]
fn ex_matches_enumeration() {
    let patterns: [&[Symbol]; 4] = [&[0, 1, 0], &[0, 1, 0, 1], &[0, 1, 2, 0], &[0, 1, 2, 0, 1]];
    for u in patterns {
        let r = alphabet_size(u);
        for n in 1..=4 {
            let naive = longest(n, &|q| is_r_sparse(q, r) && contains_pattern(u, q).unwrap().is_none());
            assert_eq!(exact(oracle_ex(u, n, &budget())), naive, "Ex_{u:?}({n})");
        }
    }
}

#[test]
fn ads_matches_block_enumeration() {
    for (s, k, max_m) in [(1, 2, 6), (2, 3, 5), (2, 4, 5), (3, 4, 5)] {
        for m in 1..=max_m {
            let engine = exact(oracle_ads_symbols(s, k, m, &budget()));
            let naive = most_symbols(m, k, engine + 1, &|q| max_alternation(q).0 <= s + 1);
            assert_eq!(engine, naive, "ADS^{s}_{k}({m})");
        }
    }
}

#[test]
fn aff_matches_block_enumeration() {
    for (r, s, k, max_m) in [(2, 2, 2, 5), (3, 2, 2, 4), (2, 3, 3, 5)] {
        for m in 1..=max_m {
            let engine = exact(oracle_aff_symbols(r, s, k, m, &budget()));
            let naive = most_symbols(m, k, engine + 1, &|q| contains_formation(q, r, s).unwrap().is_none());
            assert_eq!(engine, naive, "AFF_{r},{s},{k}({m})");
        }
    }
}

#[test]
fn small_thresholds() {
    assert_eq!(
        oracle_ads_symbols(2, 2, 5, &budget()).unwrap().value,
        OracleValue::Unbounded
    );
    assert_eq!(
        oracle_aff_symbols(2, 3, 2, 5, &budget()).unwrap().value,
        OracleValue::Unbounded
    );
    assert_eq!(exact(oracle_ads_symbols(3, 5, 4, &budget())), 0);
}

#[test]
fn values_are_monotone() {
    let b = budget();
    for s in 1..=3 {
        let row: Vec<usize> = (1..=4).map(|n| exact(oracle_lambda(s, n, &b))).collect();
        assert!(row.windows(2).all(|w| w[0] < w[1]), "lambda_{s} row {row:?}");
        if s > 1 {
            let lower: Vec<usize> = (1..=4).map(|n| exact(oracle_lambda(s - 1, n, &b))).collect();
            assert!(lower.iter().zip(&row).all(|(a, b)| a <= b));
        }
        for n in 1..=3 {
            let col: Vec<usize> = (1..=6).map(|m| exact(oracle_psi(s, m, n, &b))).collect();
            assert!(col.windows(2).all(|w| w[0] <= w[1]), "psi_{s}(.,{n}) {col:?}");
            assert!(*col.last().unwrap() <= exact(oracle_lambda(s, n, &b)));
        }
    }
}

#[test]
fn z_sequences_fit_under_lambda() {
    let lambda3_4 = exact(oracle_lambda(3, 4, &budget()));
    for (d, m) in [(1, 1), (1, 2), (1, 3), (1, 4), (2, 2)] {
        let z = build_z(d, m, 1_000_000).unwrap();
        let stripped = remove_adjacent_repeats(&z);
        let n = alphabet_size(&stripped);
        assert!(is_ds(&stripped, 3));
        if n <= 4 {
            assert!(
                stripped.len() <= lambda3_4,
                "Z_{d}({m}) has {} > lambda_3(4)",
                stripped.len()
            );
        }
    }
}
