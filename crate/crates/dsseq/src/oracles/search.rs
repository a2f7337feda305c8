//! Memoized exhaustive search over sequences built left to right.
//!
//! Every placement either keeps its symbol open (it will occur again) or
//! closes it for good. Closed symbols are forgotten, so the state only
//! describes the open symbols; new symbols are always the next unused id,
//! which removes renaming symmetry.

use std::collections::HashMap;
use std::time::Instant;

use super::SearchBudget;
use crate::sequence::{BlockedSequence, Symbol};

/// Tracks the forbidden-substructure state over the open symbols.
pub(crate) trait Constraint: Clone {
    /// A fresh symbol becomes open with index `open_count`.
    fn add(&mut self, open_count: usize) -> bool;
    fn place(&mut self, i: usize, open_count: usize) -> bool;
    /// Called right after a placement of `i`; the symbol then leaves the open set.
    fn close(&mut self, i: usize, open_count: usize) -> bool;
    fn encode(&self, open_count: usize, key: &mut Vec<u8>);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Objective {
    Length,
    Symbols,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Shape {
    /// At most this many blocks of distinct symbols; `None` for plain sequences.
    pub blocks: Option<usize>,
    /// Each window of `sparsity + 1` consecutive entries is repetition-free.
    pub sparsity: usize,
    /// Every symbol occurs exactly this often (in distinct blocks).
    pub multiplicity: Option<u8>,
    pub symbol_cap: usize,
    pub objective: Objective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Finish,
    EndBlock,
    /// `None` places a fresh symbol.
    Place(Option<u8>, bool),
}

#[derive(Clone)]
struct State<C> {
    labels: Vec<Symbol>,
    counts: Vec<u8>,
    in_block: Vec<bool>,
    recent: Vec<Option<u8>>,
    introduced: usize,
    blocks_left: usize,
    block_open: bool,
    constraint: C,
}

const NEG: i32 = i32::MIN / 2;

pub(crate) struct Outcome {
    pub value: u64,
    /// Proven upper bound on the optimum, if any.
    pub upper: Option<u64>,
    pub witness: Vec<Vec<Symbol>>,
    pub nodes: u64,
}

pub(crate) fn run<C: Constraint>(shape: Shape, constraint: C, budget: &SearchBudget) -> Outcome {
    let root = State {
        labels: Vec::new(),
        counts: Vec::new(),
        in_block: Vec::new(),
        recent: vec![None; shape.sparsity],
        introduced: 0,
        blocks_left: shape.blocks.unwrap_or(1),
        block_open: false,
        constraint,
    };
    let mut search = Search {
        shape,
        memo: HashMap::new(),
        failed: HashMap::new(),
        bounds: SymbolBounds::default(),
        nodes: 0,
        budget: *budget,
        start: Instant::now(),
        truncated: false,
    };
    let value = search.solve(&root, 0);
    let witness = search.replay(root);
    Outcome {
        value: value.max(0) as u64,
        upper: (!search.truncated).then_some(value.max(0) as u64),
        witness,
        nodes: search.nodes,
    }
}

/// Exact optima of smaller instances, used to prune the symbol search.
#[derive(Debug, Clone, Default)]
pub(crate) struct SymbolBounds {
    /// `same[b]`: optimum of the same problem on `b` blocks. Fresh symbols
    /// confined to the last `b` blocks form such an instance, and so do they
    /// together with the symbols seen once, whose occurrences fit one extra block.
    pub same: Vec<Option<usize>>,
    /// `(j, table)`: open symbols owing at least `j` more occurrences, restricted
    /// to the last `b` blocks, form an instance with optimum `table[b]`.
    pub owing: Vec<(u8, Vec<Option<usize>>)>,
}

fn known(table: &[Option<usize>], b: usize) -> Option<usize> {
    table.get(b).copied().flatten()
}

/// Maximizes the number of symbols; targets are refuted from the cap down.
pub(crate) fn run_max_symbols<C: Constraint>(
    shape: Shape,
    constraint: C,
    budget: &SearchBudget,
    bounds: SymbolBounds,
) -> Outcome {
    let root = State {
        labels: Vec::new(),
        counts: Vec::new(),
        in_block: Vec::new(),
        recent: vec![None; shape.sparsity],
        introduced: 0,
        blocks_left: shape.blocks.unwrap_or(1),
        block_open: false,
        constraint,
    };
    let mut search = Search {
        shape,
        memo: HashMap::new(),
        failed: HashMap::new(),
        bounds,
        nodes: 0,
        budget: *budget,
        start: Instant::now(),
        truncated: false,
    };
    // Refute targets from the cap downwards; the first feasible one is optimal.
    let mut upper = None;
    let mut found = None;
    for target in (1..=shape.symbol_cap).rev() {
        let mut path = Vec::new();
        if search.feasible(&root, target as i32, &mut path) {
            path.reverse();
            found = Some((target, search.follow(root.clone(), &path)));
            break;
        }
        if search.truncated {
            break;
        }
        upper = Some(target - 1);
    }
    if found.is_none() && search.truncated {
        // Spend a little more effort on a witnessed lower bound.
        search.truncated = false;
        search.budget.max_nodes = search.nodes + budget.max_nodes / 10;
        let mut best = 0;
        while best < upper.unwrap_or(shape.symbol_cap) {
            let mut path = Vec::new();
            if !search.feasible(&root, best as i32 + 1, &mut path) {
                break;
            }
            best += 1;
            path.reverse();
            found = Some((best, search.follow(root.clone(), &path)));
        }
        search.truncated = true;
    }
    if upper.is_none() && !search.truncated {
        upper = Some(0);
    }
    let solved = found.is_some() && !search.truncated;
    let (value, witness) = found.unwrap_or((0, Vec::new()));
    Outcome {
        value: value as u64,
        upper: if solved {
            Some(value as u64)
        } else {
            upper.map(|u| u as u64)
        },
        witness,
        nodes: search.nodes,
    }
}

struct Search {
    shape: Shape,
    memo: HashMap<Vec<u8>, (i32, Move)>,
    /// Smallest symbol deficit known to be unreachable from a state.
    failed: HashMap<Vec<u8>, i32>,
    bounds: SymbolBounds,
    nodes: u64,
    budget: SearchBudget,
    start: Instant,
    truncated: bool,
}

impl Search {
    fn key<C: Constraint>(&self, st: &State<C>) -> Vec<u8> {
        let o = st.labels.len();
        let mut key = Vec::with_capacity(8 + 2 * o + o * o / 2);
        key.extend([st.introduced as u8, st.blocks_left as u8, st.block_open as u8, o as u8]);
        if self.shape.multiplicity.is_some() {
            key.extend(&st.counts);
        }
        if self.shape.blocks.is_some() {
            key.extend(st.in_block.iter().map(|&b| b as u8));
        }
        key.extend(st.recent.iter().map(|r| r.map_or(0xff, |i| i)));
        st.constraint.encode(o, &mut key);
        key
    }

    fn out_of_budget(&mut self) -> bool {
        if self.truncated {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes
            || (self.nodes.is_multiple_of(4096) && self.start.elapsed() > self.budget.time_limit)
        {
            self.truncated = true;
        }
        self.truncated
    }

    fn moves<C: Constraint>(&self, st: &State<C>) -> Vec<Move> {
        let mut moves = Vec::new();
        if st.labels.is_empty() {
            moves.push(Move::Finish);
        }
        if self.shape.blocks.is_some() && st.block_open && st.blocks_left > 1 {
            moves.push(Move::EndBlock);
        }
        let closes: &[bool] = if self.shape.multiplicity.is_some() {
            &[false]
        } else {
            &[false, true]
        };
        for i in 0..st.labels.len() {
            for &c in closes {
                moves.push(Move::Place(Some(i as u8), c));
            }
        }
        if st.introduced < self.shape.symbol_cap {
            for &c in closes {
                moves.push(Move::Place(None, c));
            }
        }
        moves
    }

    /// Applies a move, returning the successor and the objective gain.
    fn apply<C: Constraint>(&self, st: &State<C>, mv: Move) -> Option<(State<C>, i32)> {
        let mut next = st.clone();
        match mv {
            Move::Finish => return None,
            Move::EndBlock => {
                next.blocks_left -= 1;
                next.block_open = false;
                next.in_block.iter_mut().for_each(|b| *b = false);
            }
            Move::Place(target, close) => {
                let o = st.labels.len();
                let i = match target {
                    Some(i) => {
                        let i = i as usize;
                        if st.recent.contains(&Some(i as u8)) || (self.shape.blocks.is_some() && st.in_block[i]) {
                            return None;
                        }
                        if !next.constraint.place(i, o) {
                            return None;
                        }
                        next.counts[i] += 1;
                        next.in_block[i] = true;
                        i
                    }
                    None => {
                        if !next.constraint.add(o) {
                            return None;
                        }
                        next.labels.push(st.introduced as Symbol);
                        next.counts.push(1);
                        next.in_block.push(true);
                        next.introduced += 1;
                        o
                    }
                };
                next.block_open = true;
                if !next.recent.is_empty() {
                    next.recent.rotate_left(1);
                    *next.recent.last_mut().unwrap() = Some(i as u8);
                }
                let close = match self.shape.multiplicity {
                    Some(k) => next.counts[i] == k,
                    None => close,
                };
                if close {
                    let o = next.labels.len();
                    if !next.constraint.close(i, o) {
                        return None;
                    }
                    next.labels.remove(i);
                    next.counts.remove(i);
                    next.in_block.remove(i);
                    for r in next.recent.iter_mut() {
                        *r = match *r {
                            Some(j) if j as usize == i => None,
                            Some(j) if j as usize > i => Some(j - 1),
                            other => other,
                        };
                    }
                }
                if let Some(k) = self.shape.multiplicity {
                    let later = next.blocks_left - 1;
                    let feasible = next
                        .counts
                        .iter()
                        .zip(&next.in_block)
                        .all(|(&c, &here)| (k - c) as usize <= later + usize::from(!here));
                    if !feasible {
                        return None;
                    }
                }
                let gain = match (self.shape.objective, target) {
                    (Objective::Length, _) => 1,
                    (Objective::Symbols, None) => 1,
                    (Objective::Symbols, Some(_)) => 0,
                };
                return Some((next, gain));
            }
        }
        Some((next, 0))
    }

    fn solve<C: Constraint>(&mut self, st: &State<C>, len: usize) -> i32 {
        let key = self.key(st);
        if let Some(&(v, _)) = self.memo.get(&key) {
            return v;
        }
        if len > self.budget.max_length || self.out_of_budget() {
            self.truncated = true;
            let v = if st.labels.is_empty() { 0 } else { NEG };
            self.memo.insert(key, (v, Move::Finish));
            return v;
        }
        let mut best = (NEG, Move::Finish);
        for mv in self.moves(st) {
            let v = if mv == Move::Finish {
                0
            } else {
                match self.apply(st, mv) {
                    Some((child, gain)) => {
                        let len = len + usize::from(matches!(mv, Move::Place(..)));
                        let v = self.solve(&child, len);
                        if v == NEG {
                            continue;
                        }
                        v + gain
                    }
                    None => continue,
                }
            };
            if v > best.0 {
                best = (v, mv);
            }
        }
        self.memo.insert(key, best);
        best.0
    }

    fn feasible<C: Constraint>(&mut self, st: &State<C>, need: i32, path: &mut Vec<Move>) -> bool {
        if need <= 0 && st.labels.is_empty() {
            path.push(Move::Finish);
            return true;
        }
        let mut reachable = self.shape.symbol_cap - st.introduced;
        let rest = st.blocks_left;
        if let Some(b) = known(&self.bounds.same, rest) {
            reachable = reachable.min(b);
        }
        if let Some(b) = known(&self.bounds.same, rest + 1) {
            let once = st.counts.iter().filter(|&&c| c == 1).count();
            if once > b {
                return false;
            }
            reachable = reachable.min(b - once);
        }
        if need > reachable as i32 {
            return false;
        }
        if let Some(k) = self.shape.multiplicity {
            for (j, table) in &self.bounds.owing {
                if let Some(b) = known(table, rest) {
                    if st.counts.iter().filter(|&&c| k - c >= *j).count() > b {
                        return false;
                    }
                }
            }
        }
        let key = self.key(st);
        if self.failed.get(&key).is_some_and(|&f| need >= f) {
            return false;
        }
        if self.out_of_budget() {
            return false;
        }
        let mut moves = self.moves(st);
        if need <= 0 {
            // Extra symbols can always be deleted again.
            moves.retain(|m| !matches!(m, Move::Place(None, _)));
        } else {
            moves.sort_by_key(|m| !matches!(m, Move::Place(None, _)));
        }
        for mv in moves {
            if mv == Move::Finish {
                continue;
            }
            if let Some((child, gain)) = self.apply(st, mv) {
                if self.feasible(&child, need - gain, path) {
                    path.push(mv);
                    return true;
                }
                if self.truncated {
                    return false;
                }
            }
        }
        let entry = self.failed.entry(key).or_insert(need);
        *entry = (*entry).min(need);
        false
    }

    fn follow<C: Constraint>(&self, mut st: State<C>, path: &[Move]) -> Vec<Vec<Symbol>> {
        let mut blocks: Vec<Vec<Symbol>> = vec![Vec::new()];
        for &mv in path {
            match mv {
                Move::Finish => break,
                Move::EndBlock => blocks.push(Vec::new()),
                Move::Place(Some(i), _) => blocks.last_mut().unwrap().push(st.labels[i as usize]),
                Move::Place(None, _) => blocks.last_mut().unwrap().push(st.introduced as Symbol),
            }
            st = self.apply(&st, mv).expect("recorded path replays").0;
        }
        blocks.retain(|b| !b.is_empty());
        blocks
    }

    fn replay<C: Constraint>(&self, mut st: State<C>) -> Vec<Vec<Symbol>> {
        let mut blocks: Vec<Vec<Symbol>> = vec![Vec::new()];
        while let Some(&(v, mv)) = self.memo.get(&self.key(&st)) {
            if v == NEG || mv == Move::Finish {
                break;
            }
            match mv {
                Move::EndBlock => blocks.push(Vec::new()),
                Move::Place(Some(i), _) => blocks.last_mut().unwrap().push(st.labels[i as usize]),
                Move::Place(None, _) => blocks.last_mut().unwrap().push(st.introduced as Symbol),
                Move::Finish => unreachable!(),
            }
            match self.apply(&st, mv) {
                Some((next, _)) => st = next,
                None => break,
            }
        }
        blocks.retain(|b| !b.is_empty());
        blocks
    }
}

pub(crate) fn to_blocked(blocks: Vec<Vec<Symbol>>) -> BlockedSequence {
    BlockedSequence::new(blocks, Default::default()).expect("search emits distinct-symbol blocks")
}

/// Pairwise alternation lengths among open symbols; forbids length `s + 2`.
#[derive(Clone)]
pub(crate) struct Alternation {
    s: u8,
    /// `cell(i, j) = len << 1 | (last occurrence in the pair was j)`.
    cells: Vec<u8>,
}

const STRIDE: usize = 24;

impl Alternation {
    pub(crate) fn new(s: usize) -> Self {
        Alternation {
            s: s as u8,
            cells: vec![0; STRIDE * STRIDE],
        }
    }

    fn at(i: usize, j: usize) -> usize {
        i * STRIDE + j
    }
}

impl Constraint for Alternation {
    fn add(&mut self, o: usize) -> bool {
        if o >= STRIDE {
            return false;
        }
        for j in 0..o {
            self.cells[Self::at(o, j)] = 2 << 1;
            self.cells[Self::at(j, o)] = 2 << 1 | 1;
        }
        true
    }

    fn place(&mut self, i: usize, o: usize) -> bool {
        for j in (0..o).filter(|&j| j != i) {
            let c = self.cells[Self::at(i, j)];
            let mut len = c >> 1;
            if c & 1 == 1 {
                len += 1;
                if len > self.s + 1 {
                    return false;
                }
            }
            self.cells[Self::at(i, j)] = len << 1;
            self.cells[Self::at(j, i)] = len << 1 | 1;
        }
        true
    }

    fn close(&mut self, i: usize, o: usize) -> bool {
        // Every other open symbol occurs again, extending its pair with `i` by one.
        if (0..o).any(|j| j != i && self.cells[Self::at(i, j)] >> 1 > self.s) {
            return false;
        }
        for row in 0..o {
            for col in i..o - 1 {
                self.cells[Self::at(row, col)] = self.cells[Self::at(row, col + 1)];
            }
        }
        for row in i..o - 1 {
            for col in 0..o - 1 {
                self.cells[Self::at(row, col)] = self.cells[Self::at(row + 1, col)];
            }
        }
        true
    }

    fn encode(&self, o: usize, key: &mut Vec<u8>) {
        for i in 0..o {
            for j in i + 1..o {
                key.push(self.cells[Self::at(i, j)]);
            }
        }
    }
}

/// Greedy window packing for every `r`-subset of open symbols; forbids `s` windows.
#[derive(Clone)]
pub(crate) struct Formations {
    r: usize,
    s: u8,
    /// `(members, seen, windows)` sorted by `members`, one per `r`-subset of open symbols.
    subsets: Vec<(u32, u32, u8)>,
    /// Symbols introduced so far, open or closed.
    introduced: usize,
}

impl Formations {
    pub(crate) fn new(r: usize, s: usize) -> Self {
        Formations {
            r,
            s: s as u8,
            subsets: Vec::new(),
            introduced: 0,
        }
    }
}

fn drop_bit(mask: u32, i: usize) -> u32 {
    let low = mask & ((1 << i) - 1);
    ((mask >> (i + 1)) << i) | low
}

fn for_each_subset(o: usize, size: usize, f: &mut impl FnMut(u32)) {
    fn go(start: usize, o: usize, left: usize, mask: u32, f: &mut impl FnMut(u32)) {
        if left == 0 {
            f(mask);
            return;
        }
        for i in start..=o - left {
            go(i + 1, o, left - 1, mask | 1 << i, f);
        }
    }
    if size <= o {
        go(0, o, size, 0, f);
    }
}

impl Constraint for Formations {
    fn add(&mut self, o: usize) -> bool {
        if o >= 32 {
            return false;
        }
        // A single window is any r distinct symbols, closed ones included.
        self.introduced += 1;
        if self.s <= 1 && self.introduced >= self.r {
            return false;
        }
        let mut fresh = Vec::new();
        for_each_subset(o, self.r - 1, &mut |m| fresh.push((m | 1 << o, 0, 1)));
        self.subsets.extend(fresh);
        self.subsets.sort_unstable_by_key(|e| e.0);
        true
    }

    fn place(&mut self, i: usize, _o: usize) -> bool {
        let bit = 1u32 << i;
        for (members, seen, windows) in self.subsets.iter_mut() {
            if *members & bit == 0 {
                continue;
            }
            *seen |= bit;
            if *seen == *members {
                *seen = 0;
                *windows += 1;
                if *windows >= self.s {
                    return false;
                }
            }
        }
        true
    }

    fn close(&mut self, i: usize, _o: usize) -> bool {
        let bit = 1u32 << i;
        // The other members are open and occur again, so a window that has
        // already seen `i` is bound to complete.
        let doomed = self
            .subsets
            .iter()
            .any(|&(m, seen, w)| m & bit != 0 && seen & bit != 0 && w + 1 >= self.s);
        if doomed {
            return false;
        }
        self.subsets.retain(|&(m, _, _)| m & bit == 0);
        for (members, seen, _) in self.subsets.iter_mut() {
            *members = drop_bit(*members, i);
            *seen = drop_bit(*seen, i);
        }
        true
    }

    fn encode(&self, _o: usize, key: &mut Vec<u8>) {
        if self.s <= 1 {
            key.push(self.introduced.min(u8::MAX as usize) as u8);
        }
        for &(members, seen, windows) in &self.subsets {
            let mut rel = 0u8;
            let mut k = 0;
            for i in 0..32 {
                if members & 1 << i != 0 {
                    if seen & 1 << i != 0 {
                        rel |= 1 << k;
                    }
                    k += 1;
                }
            }
            key.push(windows << 4 | rel);
        }
    }
}
