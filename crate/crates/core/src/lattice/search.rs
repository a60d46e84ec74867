//! Backtracking search for join- and meet-preserving injections.
//!
//! Pattern elements are placed bottom first, top second, then along a linear
//! extension. Candidates are pruned by down-set and up-set sizes (an
//! injective order embedding can only grow both) and every assignment is
//! checked against all earlier ones for order, join and meet agreement.

use serde::Serialize;

use super::{FiniteLattice, LatticeHom};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome", content = "map")]
pub enum SearchOutcome {
    Found(Vec<usize>),
    Exhausted,
    BudgetExceeded,
}

pub struct EmbeddingSearch<'a> {
    pattern: &'a FiniteLattice,
    target: &'a FiniteLattice,
    cover_preserving: bool,
    budget: Option<u64>,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    pattern_covers: Vec<bool>,
    target_covers: Vec<bool>,
}

impl<'a> EmbeddingSearch<'a> {
    pub fn new(pattern: &'a FiniteLattice, target: &'a FiniteLattice) -> Self {
        let pd: Vec<usize> = (0..pattern.size()).map(|x| pattern.down_count(x)).collect();
        let pu: Vec<usize> = (0..pattern.size()).map(|x| pattern.up_count(x)).collect();
        let td: Vec<usize> = (0..target.size()).map(|x| target.down_count(x)).collect();
        let tu: Vec<usize> = (0..target.size()).map(|x| target.up_count(x)).collect();

        let mut order = vec![pattern.bottom()];
        if pattern.top() != pattern.bottom() {
            order.push(pattern.top());
        }
        let mut rest: Vec<usize> = (0..pattern.size()).filter(|x| !order.contains(x)).collect();
        rest.sort_by_key(|&x| (pd[x], x));
        order.extend(rest);

        let candidates = (0..pattern.size())
            .map(|p| {
                (0..target.size())
                    .filter(|&x| td[x] >= pd[p] && tu[x] >= pu[p])
                    .collect()
            })
            .collect();
        Self {
            pattern,
            target,
            cover_preserving: false,
            budget: None,
            order,
            candidates,
            pattern_covers: Vec::new(),
            target_covers: Vec::new(),
        }
    }

    pub fn cover_preserving(mut self, yes: bool) -> Self {
        self.cover_preserving = yes;
        if yes {
            self.pattern_covers = cover_matrix(self.pattern);
            self.target_covers = cover_matrix(self.target);
        }
        self
    }

    /// Caps the number of tentative assignments.
    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Stable-sorts every candidate list by a key on target elements.
    pub fn order_candidates_by<K: Ord>(mut self, key: impl Fn(usize) -> K) -> Self {
        for c in &mut self.candidates {
            c.sort_by_key(|&x| key(x));
        }
        self
    }

    /// Moves the preferred image of `p` to the front of its candidate list.
    pub fn prefer(mut self, p: usize, x: usize) -> Self {
        let c = &mut self.candidates[p];
        if let Some(i) = c.iter().position(|&y| y == x) {
            let v = c.remove(i);
            c.insert(0, v);
        }
        self
    }

    pub fn run(&self) -> SearchOutcome {
        if self.pattern.size() > self.target.size() {
            return SearchOutcome::Exhausted;
        }
        let mut state = State {
            img: vec![usize::MAX; self.pattern.size()],
            owner: vec![usize::MAX; self.target.size()],
            steps: 0,
            over_budget: false,
        };
        if self.place(0, &mut state) {
            SearchOutcome::Found(state.img)
        } else if state.over_budget {
            SearchOutcome::BudgetExceeded
        } else {
            SearchOutcome::Exhausted
        }
    }

    fn place(&self, depth: usize, st: &mut State) -> bool {
        let Some(&p) = self.order.get(depth) else {
            return true;
        };
        for &x in &self.candidates[p] {
            if st.owner[x] != usize::MAX {
                continue;
            }
            st.steps += 1;
            if self.budget.is_some_and(|b| st.steps > b) {
                st.over_budget = true;
                return false;
            }
            if !self.consistent(p, x, depth, st) {
                continue;
            }
            st.img[p] = x;
            st.owner[x] = p;
            if self.place(depth + 1, st) {
                return true;
            }
            st.img[p] = usize::MAX;
            st.owner[x] = usize::MAX;
            if st.over_budget {
                return false;
            }
        }
        false
    }

    fn consistent(&self, p: usize, x: usize, depth: usize, st: &State) -> bool {
        let (pat, tgt) = (self.pattern, self.target);
        for &q in &self.order[..depth] {
            let y = st.img[q];
            if pat.leq(p, q) != tgt.leq(x, y) || pat.leq(q, p) != tgt.leq(y, x) {
                return false;
            }
            for (s, t) in [
                (pat.join(p, q), tgt.join(x, y)),
                (pat.meet(p, q), tgt.meet(x, y)),
            ] {
                if s != p && t == x {
                    return false;
                }
                let expected = if s == p { x } else { st.img[s] };
                if expected == usize::MAX {
                    // s not yet placed: t must still be free for it
                    if st.owner[t] != usize::MAX || !self.candidates[s].contains(&t) {
                        return false;
                    }
                } else if expected != t {
                    return false;
                }
            }
            if self.cover_preserving {
                let (np, nt) = (pat.size(), tgt.size());
                if self.pattern_covers[p * np + q] && !self.target_covers[x * nt + y]
                    || self.pattern_covers[q * np + p] && !self.target_covers[y * nt + x]
                {
                    return false;
                }
            }
        }
        true
    }
}

struct State {
    img: Vec<usize>,
    owner: Vec<usize>,
    steps: u64,
    over_budget: bool,
}

fn cover_matrix(l: &FiniteLattice) -> Vec<bool> {
    let n = l.size();
    let mut m = vec![false; n * n];
    for (a, b) in l.covers() {
        m[a * n + b] = true;
    }
    m
}

impl FiniteLattice {
    /// An injective join- and meet-preserving copy of `pattern` inside
    /// `self`. The search is exhaustive, so `None` is a proof of absence.
    pub fn find_sublattice<'a>(&'a self, pattern: &'a FiniteLattice) -> Option<LatticeHom<'a>> {
        match EmbeddingSearch::new(pattern, self).run() {
            SearchOutcome::Found(map) => {
                Some(LatticeHom::new(pattern, self, map).expect("search preserves operations"))
            }
            _ => None,
        }
    }

    /// An isomorphism `other -> self`, if one exists.
    pub fn isomorphism_from<'a>(&'a self, other: &'a FiniteLattice) -> Option<LatticeHom<'a>> {
        if other.size() != self.size() {
            return None;
        }
        self.find_sublattice(other)
    }
}

/// Four elements over a common bottom such that any three of them are
/// independent and join to the same top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoDiamond {
    pub bottom: usize,
    pub top: usize,
    pub elements: [usize; 4],
}

fn independent_over(l: &FiniteLattice, b: usize, [x, y, z]: [usize; 3]) -> bool {
    l.meet(x, l.join(y, z)) == b && l.meet(y, l.join(x, z)) == b && l.meet(z, l.join(x, y)) == b
}

/// Searches for a 2-diamond in lexicographic order of the four elements.
pub fn find_two_diamond(l: &FiniteLattice) -> Option<TwoDiamond> {
    let n = l.size();
    for a0 in 0..n {
        for a1 in (a0 + 1)..n {
            let b = l.meet(a0, a1);
            if b == a0 || b == a1 {
                continue;
            }
            for a2 in (a1 + 1)..n {
                if a2 == b || !independent_over(l, b, [a0, a1, a2]) {
                    continue;
                }
                let t = l.join(l.join(a0, a1), a2);
                for a3 in (a2 + 1)..n {
                    if a3 == b {
                        continue;
                    }
                    let ok = [[a0, a1, a3], [a0, a2, a3], [a1, a2, a3]]
                        .into_iter()
                        .all(|tri| {
                            independent_over(l, b, tri)
                                && l.join(l.join(tri[0], tri[1]), tri[2]) == t
                        });
                    if ok {
                        return Some(TwoDiamond {
                            bottom: b,
                            top: t,
                            elements: [a0, a1, a2, a3],
                        });
                    }
                }
            }
        }
    }
    None
}
