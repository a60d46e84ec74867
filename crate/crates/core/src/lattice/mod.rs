//! Finite lattices stored as dense order matrices and join/meet tables.
//!
//! Elements are the indices `0..size`. Every constructor validates
//! latticehood before handing out a [`FiniteLattice`], so downstream
//! checkers can index the tables without further checks.

mod builders;
mod hom;
mod json;
mod predicates;
mod search;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use builders::{
    boolean, chain, diamond, direct_product, direct_product_capped, m3, n5, singleton,
};
pub use hom::{homomorphisms, LatticeHom};
pub use json::LatticeJson;
pub use predicates::{LawViolation, Side};
pub use search::{find_two_diamond, EmbeddingSearch, SearchOutcome, TwoDiamond};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Join,
    Meet,
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Join => f.write_str("least upper bound"),
            Bound::Meet => f.write_str("greatest lower bound"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("element {index} out of range for a lattice of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("not a partial order: {0} and {1} lie on a cycle")]
    NotAPartialOrder(usize, usize),
    #[error("not a lattice: {a} and {b} have no unique {bound}")]
    NotALattice { a: usize, b: usize, bound: Bound },
    #[error("{lo} is not below {hi}")]
    NotComparable { lo: usize, hi: usize },
    #[error("lattice of size {size} exceeds the cap of {cap} elements")]
    SizeLimit { size: usize, cap: usize },
    #[error("{labels} labels supplied for {size} elements")]
    LabelCount { labels: usize, size: usize },
    #[error("map is not a lattice homomorphism: {0}")]
    NotAHomomorphism(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    size: usize,
    leq: Vec<bool>,
    join: Vec<u32>,
    meet: Vec<u32>,
    bottom: usize,
    top: usize,
    labels: Option<Vec<String>>,
}

impl FiniteLattice {
    /// Builds a lattice from a (not necessarily reduced) cover list by taking
    /// the reflexive-transitive closure and computing both tables.
    pub fn from_cover_relation(
        size: usize,
        covers: &[(usize, usize)],
    ) -> Result<Self, LatticeError> {
        if size == 0 {
            return Err(LatticeError::Empty);
        }
        let mut leq = vec![false; size * size];
        for i in 0..size {
            leq[i * size + i] = true;
        }
        for &(lo, hi) in covers {
            for index in [lo, hi] {
                if index >= size {
                    return Err(LatticeError::IndexOutOfRange { index, size });
                }
            }
            leq[lo * size + hi] = true;
        }
        // Warshall closure.
        for k in 0..size {
            for i in 0..size {
                if leq[i * size + k] {
                    for j in 0..size {
                        if leq[k * size + j] {
                            leq[i * size + j] = true;
                        }
                    }
                }
            }
        }
        Self::from_order(size, leq)
    }

    /// Builds a lattice from a full order matrix (row-major, `leq[a*size+b]`
    /// is `a <= b`). The matrix must already be reflexive and transitive.
    pub fn from_order(size: usize, leq: Vec<bool>) -> Result<Self, LatticeError> {
        if size == 0 {
            return Err(LatticeError::Empty);
        }
        assert_eq!(leq.len(), size * size, "order matrix has wrong shape");
        for a in 0..size {
            for b in (a + 1)..size {
                if leq[a * size + b] && leq[b * size + a] {
                    return Err(LatticeError::NotAPartialOrder(a, b));
                }
            }
        }
        let mut up = Vec::with_capacity(size);
        let mut down = Vec::with_capacity(size);
        for a in 0..size {
            let mut u = FixedBitSet::with_capacity(size);
            let mut d = FixedBitSet::with_capacity(size);
            for b in 0..size {
                u.set(b, leq[a * size + b]);
                d.set(b, leq[b * size + a]);
            }
            up.push(u);
            down.push(d);
        }
        let up_count: Vec<usize> = up.iter().map(|s| s.count_ones(..)).collect();
        let down_count: Vec<usize> = down.iter().map(|s| s.count_ones(..)).collect();

        let mut join = vec![0u32; size * size];
        let mut meet = vec![0u32; size * size];
        for a in 0..size {
            for b in a..size {
                let mut common = up[a].clone();
                common.intersect_with(&up[b]);
                let n = common.count_ones(..);
                let j =
                    common
                        .ones()
                        .find(|&c| up_count[c] == n)
                        .ok_or(LatticeError::NotALattice {
                            a,
                            b,
                            bound: Bound::Join,
                        })?;
                let mut common = down[a].clone();
                common.intersect_with(&down[b]);
                let n = common.count_ones(..);
                let m = common.ones().find(|&c| down_count[c] == n).ok_or(
                    LatticeError::NotALattice {
                        a,
                        b,
                        bound: Bound::Meet,
                    },
                )?;
                join[a * size + b] = j as u32;
                join[b * size + a] = j as u32;
                meet[a * size + b] = m as u32;
                meet[b * size + a] = m as u32;
            }
        }
        let bottom = (0..size)
            .find(|&x| down_count[x] == 1 && up_count[x] == size)
            .expect("finite lattice has a bottom");
        let top = (0..size)
            .find(|&x| up_count[x] == 1 && down_count[x] == size)
            .expect("finite lattice has a top");
        Ok(Self {
            size,
            leq,
            join,
            meet,
            bottom,
            top,
            labels: None,
        })
    }

    /// Builds a lattice from concrete join and meet operations on `0..size`.
    ///
    /// The order is read off the meet (`a <= b` iff `a /\ b = a`) and checked
    /// against the join; the full law scan is left to [`Self::check_laws`].
    pub fn from_operations(
        size: usize,
        mut join_of: impl FnMut(usize, usize) -> usize,
        mut meet_of: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self, LatticeError> {
        if size == 0 {
            return Err(LatticeError::Empty);
        }
        let cap = crate::cap::lattice_cap();
        if size > cap {
            return Err(LatticeError::SizeLimit { size, cap });
        }
        let mut join = vec![0u32; size * size];
        let mut meet = vec![0u32; size * size];
        for a in 0..size {
            for b in a..size {
                let j = join_of(a, b);
                let m = meet_of(a, b);
                for index in [j, m] {
                    if index >= size {
                        return Err(LatticeError::IndexOutOfRange { index, size });
                    }
                }
                join[a * size + b] = j as u32;
                join[b * size + a] = j as u32;
                meet[a * size + b] = m as u32;
                meet[b * size + a] = m as u32;
            }
        }
        let mut leq = vec![false; size * size];
        for a in 0..size {
            for b in 0..size {
                let below = meet[a * size + b] as usize == a;
                if below != (join[a * size + b] as usize == b) {
                    return Err(LatticeError::NotALattice {
                        a,
                        b,
                        bound: Bound::Join,
                    });
                }
                leq[a * size + b] = below;
            }
        }
        let bottom = (0..size)
            .find(|&x| (0..size).all(|y| leq[x * size + y]))
            .ok_or(LatticeError::NotALattice {
                a: 0,
                b: 0,
                bound: Bound::Meet,
            })?;
        let top = (0..size)
            .find(|&x| (0..size).all(|y| leq[y * size + x]))
            .ok_or(LatticeError::NotALattice {
                a: 0,
                b: 0,
                bound: Bound::Join,
            })?;
        Ok(Self {
            size,
            leq,
            join,
            meet,
            bottom,
            top,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, LatticeError> {
        if labels.len() != self.size {
            return Err(LatticeError::LabelCount {
                labels: labels.len(),
                size: self.size,
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn bottom(&self) -> usize {
        self.bottom
    }

    #[inline]
    pub fn top(&self) -> usize {
        self.top
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b] as usize
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b] as usize
    }

    /// Row-major join table, for tight evaluation loops.
    pub(crate) fn join_table(&self) -> &[u32] {
        &self.join
    }

    pub(crate) fn meet_table(&self) -> &[u32] {
        &self.meet
    }

    pub fn join_all(&self, elems: impl IntoIterator<Item = usize>) -> usize {
        elems
            .into_iter()
            .fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, elems: impl IntoIterator<Item = usize>) -> usize {
        elems.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `x`, falling back to its index.
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// Index of the element carrying `label`, if labels are present.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.lt(a, b)
            && !(0..self.size).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b))
    }

    /// Hasse diagram as `(lower, upper)` pairs in lexicographic order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.size;
        let mut up = Vec::with_capacity(n);
        let mut down = Vec::with_capacity(n);
        for a in 0..n {
            let mut u = FixedBitSet::with_capacity(n);
            let mut d = FixedBitSet::with_capacity(n);
            for b in 0..n {
                u.set(b, self.leq(a, b));
                d.set(b, self.leq(b, a));
            }
            up.push(u);
            down.push(d);
        }
        let mut out = Vec::new();
        for a in 0..n {
            for b in up[a].ones() {
                if a != b && up[a].intersection_count(&down[b]) == 2 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn atoms(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&x| self.is_cover(self.bottom, x))
            .collect()
    }

    pub fn coatoms(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&x| self.is_cover(x, self.top))
            .collect()
    }

    /// Number of elements `<= x`.
    pub fn down_count(&self, x: usize) -> usize {
        (0..self.size).filter(|&y| self.leq(y, x)).count()
    }

    /// Number of elements `>= x`.
    pub fn up_count(&self, x: usize) -> usize {
        (0..self.size).filter(|&y| self.leq(x, y)).count()
    }

    /// Length of the longest chain from bottom to `x`.
    pub fn height(&self, x: usize) -> usize {
        self.heights()[x]
    }

    pub fn heights(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&x| self.down_count(x));
        let mut h = vec![0usize; self.size];
        for (i, &x) in order.iter().enumerate() {
            for &y in &order[..i] {
                if self.lt(y, x) {
                    h[x] = h[x].max(h[y] + 1);
                }
            }
        }
        h
    }

    /// Length of the lattice: the longest chain from bottom to top.
    pub fn length(&self) -> usize {
        self.height(self.top)
    }

    /// Least subset containing `seed` that is closed under join and meet.
    pub fn sublattice_closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.size];
        let mut elems = Vec::new();
        for &s in seed {
            if !member[s] {
                member[s] = true;
                elems.push(s);
            }
        }
        let mut done = 0;
        while done < elems.len() {
            let x = elems[done];
            let mut i = 0;
            while i <= done {
                let y = elems[i];
                for z in [self.join(x, y), self.meet(x, y)] {
                    if !member[z] {
                        member[z] = true;
                        elems.push(z);
                    }
                }
                i += 1;
            }
            done += 1;
        }
        elems.sort_unstable();
        elems
    }

    /// The restriction of the lattice to `elems` (which must be a
    /// sublattice), re-indexed in the given order.
    pub fn restrict(&self, elems: &[usize]) -> Result<Self, LatticeError> {
        let mut index = vec![usize::MAX; self.size];
        for (i, &x) in elems.iter().enumerate() {
            index[x] = i;
        }
        let sub = Self::from_operations(
            elems.len(),
            |a, b| index[self.join(elems[a], elems[b])],
            |a, b| index[self.meet(elems[a], elems[b])],
        )?;
        match &self.labels {
            Some(l) => sub.with_labels(elems.iter().map(|&x| l[x].clone()).collect()),
            None => Ok(sub),
        }
    }

    /// The interval `[lo, hi]` as a lattice, with the map back into `self`.
    pub fn interval(&self, lo: usize, hi: usize) -> Result<(Self, Vec<usize>), LatticeError> {
        for index in [lo, hi] {
            if index >= self.size {
                return Err(LatticeError::IndexOutOfRange {
                    index,
                    size: self.size,
                });
            }
        }
        if !self.leq(lo, hi) {
            return Err(LatticeError::NotComparable { lo, hi });
        }
        let elems: Vec<usize> = (0..self.size)
            .filter(|&x| self.leq(lo, x) && self.leq(x, hi))
            .collect();
        Ok((self.restrict(&elems)?, elems))
    }

    /// Exhaustive scan of the lattice laws and the order/table agreement.
    pub fn check_laws(&self) -> Result<(), LawViolation> {
        predicates::check_laws(self)
    }
}
