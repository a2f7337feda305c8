use std::cmp::Ordering;
use std::collections::BTreeSet;

use dsseq::ackermann::ackermann_magnitude;
use dsseq::decompositions::{
    check_klazar_claims, check_layer_claims, cluster_multiplicity, greedy_order_partition, klazar_partition,
    layer_decompose,
};
use dsseq::formations::{contains_formation, embed_pattern, is_subsequence, Formation};
use dsseq::sequence::{
    alphabet_size, canonicalize, contains_pattern, is_ds, is_r_sparse, max_alternation, remove_adjacent_repeats,
};
use dsseq::tower::{Magnitude, TowerNumber};
use dsseq::{BlockedSequence, Symbol};
use num_bigint::BigUint;
use proptest::prelude::*;

fn word(alphabet: Symbol, max_len: usize) -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(0..alphabet, 0..=max_len)
}

fn without_repeats(mut s: Vec<Symbol>) -> Vec<Symbol> {
    s.dedup();
    s
}

fn ds_word(order: usize, alphabet: Symbol, max_len: usize) -> impl Strategy<Value = Vec<Symbol>> {
    word(alphabet, max_len)
        .prop_map(without_repeats)
        .prop_filter("not a DS sequence of the requested order", move |s| is_ds(s, order))
}

fn blocks_from_cuts(s: &[Symbol], cuts: &[bool]) -> BlockedSequence {
    let mut blocks = vec![Vec::new()];
    for (i, &a) in s.iter().enumerate() {
        if i > 0 && cuts[i % cuts.len()] {
            blocks.push(Vec::new());
        }
        blocks.last_mut().unwrap().push(a);
    }
    BlockedSequence::new(blocks, BTreeSet::new()).unwrap()
}

/// Alternation length of `a`, `b` counted by scanning for the next wanted symbol.
fn alternation_by_scan(s: &[Symbol], a: Symbol, b: Symbol) -> usize {
    let best = |first: Symbol, second: Symbol| {
        let mut want = first;
        let mut n = 0;
        for &x in s {
            if x == want {
                n += 1;
                want = if want == first { second } else { first };
            }
        }
        n
    };
    best(a, b).max(best(b, a))
}

/// Fewest distinct-symbol blocks by exhaustive splitting.
fn min_blocks_brute(s: &[Symbol], order: usize) -> usize {
    let n = s.len();
    let mut best = vec![usize::MAX; n + 1];
    best[0] = 0;
    for end in 1..=n {
        for start in 0..end {
            if best[start] != usize::MAX && is_ds(&s[start..end], order) {
                best[end] = best[end].min(best[start] + 1);
            }
        }
    }
    best[n]
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_faithful(s in word(6, 14)) {
        let c = canonicalize(&s);
        prop_assert_eq!(canonicalize(&c), c.clone());
        prop_assert_eq!(c.len(), s.len());
        prop_assert_eq!(alphabet_size(&c), alphabet_size(&s));
        prop_assert_eq!(max_alternation(&c).0, max_alternation(&s).0);
        prop_assert!(contains_pattern(&c, &s).unwrap().is_some());
    }

    #[test]
    fn ds_order_is_monotone(s in word(4, 12), order in 1usize..6) {
        if is_ds(&s, order) {
            prop_assert!(is_ds(&s, order + 1));
        }
    }

    #[test]
    fn pattern_containment_is_reflexive_and_transitive(
        v in word(4, 8),
        drop in prop::collection::vec(any::<bool>(), 8),
        extra in word(5, 6),
        at in prop::collection::vec(0usize..10, 6),
    ) {
        let v = canonicalize(&v);
        prop_assert!(contains_pattern(&v, &v).unwrap().is_some());
        let u: Vec<Symbol> = v.iter().zip(drop.iter().cycle()).filter(|p| !*p.1).map(|p| *p.0).collect();
        let mut s = v.clone();
        for (&x, &p) in extra.iter().zip(&at) {
            s.insert(p.min(s.len()), x + 4);
        }
        let u = canonicalize(&u);
        prop_assert!(contains_pattern(&u, &v).unwrap().is_some());
        prop_assert!(contains_pattern(&v, &s).unwrap().is_some());
        prop_assert!(contains_pattern(&u, &s).unwrap().is_some());
    }

    #[test]
    fn repeat_removal_is_sparse_subsequence(s in word(4, 16), cuts in prop::collection::vec(any::<bool>(), 1..6)) {
        let b = blocks_from_cuts(&s, &cuts);
        let out = remove_adjacent_repeats(&b);
        prop_assert!(is_subsequence(&out, b.symbols()));
        if b.blocks_distinct() {
            prop_assert!(is_r_sparse(&out, 2));
            prop_assert!(b.len() - out.len() < b.block_count().max(1));
        }
    }

    #[test]
    fn max_alternation_matches_pair_scan(s in word(5, 14)) {
        let expect = (0..5)
            .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
            .filter(|&(a, b)| s.contains(&a) && s.contains(&b))
            .map(|(a, b)| alternation_by_scan(&s, a, b))
            .max();
        let (got, _) = max_alternation(&s);
        match expect {
            Some(e) => prop_assert_eq!(got, e),
            None => prop_assert_eq!(got, alphabet_size(&s)),
        }
    }

    #[test]
    fn greedy_partition_is_minimal_and_short(s in ds_word(3, 4, 12)) {
        let p = greedy_order_partition(&s, 1).unwrap();
        prop_assert!(p.block_count() <= 2 * alphabet_size(&s).max(1));
        prop_assert_eq!(p.block_count(), min_blocks_brute(&s, 1));
    }

    #[test]
    fn layer_claims_hold(s in ds_word(3, 4, 14), sizes in prop::collection::vec(1usize..4, 1..6)) {
        let b = greedy_order_partition(&s, 1).unwrap();
        let mut layers = Vec::new();
        let mut left = b.block_count();
        for &x in sizes.iter().cycle() {
            if left == 0 {
                break;
            }
            let take = x.min(left);
            layers.push(take);
            left -= take;
        }
        prop_assume!(!layers.is_empty());
        let dec = layer_decompose(&b, &layers).unwrap();
        let claims = check_layer_claims(&b, &dec, 3);
        prop_assert!(claims.all_hold(), "{:?}", claims);
    }

    #[test]
    fn klazar_claims_hold(s in ds_word(3, 5, 14), ell in 1usize..4) {
        let parts = klazar_partition(&s, ell).unwrap();
        prop_assert_eq!(parts.symbols(), &s[..]);
        let claims = check_klazar_claims(&s, &parts, ell);
        prop_assert!(claims.all_hold(), "{:?}", claims);
    }

    #[test]
    fn clustering_keeps_order_and_formations(s in ds_word(3, 4, 14), k in 1usize..4) {
        let b = greedy_order_partition(&s, 1).unwrap();
        let c = cluster_multiplicity(&b, k).unwrap();
        let syms = c.symbols();
        for a in syms.iter().copied().collect::<BTreeSet<_>>() {
            prop_assert_eq!(syms.iter().filter(|&&x| x == a).count(), k);
        }
        prop_assert!(max_alternation(syms).0 <= max_alternation(&s).0);
        for (r, f) in [(2usize, 3usize), (3, 2)] {
            if contains_formation(&s, r, f).unwrap().is_none() {
                prop_assert!(contains_formation(syms, r, f).unwrap().is_none());
            }
        }
    }

    #[test]
    fn embedding_supplies_a_witness(
        raw in prop::collection::vec(0u32..3, 1..=7),
        perms in prop::collection::vec(Just(vec![0u32, 1, 2]).prop_shuffle(), 7),
    ) {
        let u = canonicalize(&raw);
        let r = alphabet_size(&u);
        let perms: Vec<Vec<Symbol>> = perms[..u.len() - r + 1]
            .iter()
            .map(|p| p.iter().copied().filter(|&x| (x as usize) < r).collect())
            .collect();
        let f = Formation::new(perms).unwrap();
        let sigma = embed_pattern(&u, &f).unwrap();
        let image: Vec<Symbol> = u.iter().map(|&a| sigma[a as usize]).collect();
        prop_assert!(is_subsequence(&image, &f.flatten()));
        prop_assert!(contains_pattern(&u, &f.flatten()).unwrap().is_some());
    }

    #[test]
    fn tower_order_matches_integers(a in 1u64..u64::MAX, b in 1u64..u64::MAX, e in 0u32..3) {
        let (x, y) = (BigUint::from(a), BigUint::from(b));
        let (mut tx, mut ty) = (TowerNumber::from_int(&x), TowerNumber::from_int(&y));
        let (mut ex, mut ey) = (x.clone(), y.clone());
        for _ in 0..e {
            if ex.bits() > 24 || ey.bits() > 24 {
                break;
            }
            tx = tx.exp2();
            ty = ty.exp2();
            ex = BigUint::from(1u32) << u64::try_from(&ex).unwrap();
            ey = BigUint::from(1u32) << u64::try_from(&ey).unwrap();
        }
        prop_assert_eq!(tx.compare(&ty), Some(ex.cmp(&ey)));
    }
}

#[test]
fn ackermann_levels_are_monotone() {
    let budget = 1_000_000;
    let exact = |k: u32, n: u64| match ackermann_magnitude(k, n, budget) {
        Magnitude::Exact(v) => Some(v),
        _ => None,
    };
    for k in 1..=4 {
        let mut prev: Option<BigUint> = None;
        for n in 1..=20 {
            let Some(v) = exact(k, n) else { break };
            if let Some(p) = &prev {
                assert_eq!(p.cmp(&v), Ordering::Less, "A_{k} not increasing at {n}");
            }
            if n >= 3 {
                if let Some(next) = exact(k + 1, n) {
                    assert!(v <= next, "A_{k}({n}) > A_{}({n})", k + 1);
                }
            }
            prev = Some(v);
        }
    }
}
