use serde::{Deserialize, Serialize};

use super::FiniteLattice;

/// Which half of a self-dual pair of conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Meet,
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawViolation {
    Commutative { a: usize, b: usize },
    Idempotent { a: usize },
    Associative { a: usize, b: usize, c: usize },
    Absorption { a: usize, b: usize },
    OrderMismatch { a: usize, b: usize },
}

pub(super) fn check_laws(l: &FiniteLattice) -> Result<(), LawViolation> {
    let n = l.size();
    for a in 0..n {
        if l.join(a, a) != a || l.meet(a, a) != a {
            return Err(LawViolation::Idempotent { a });
        }
        for b in 0..n {
            if l.join(a, b) != l.join(b, a) || l.meet(a, b) != l.meet(b, a) {
                return Err(LawViolation::Commutative { a, b });
            }
            if l.join(a, l.meet(a, b)) != a || l.meet(a, l.join(a, b)) != a {
                return Err(LawViolation::Absorption { a, b });
            }
            let le = l.leq(a, b);
            if le != (l.join(a, b) == b) || le != (l.meet(a, b) == a) {
                return Err(LawViolation::OrderMismatch { a, b });
            }
            for c in 0..n {
                if l.join(l.join(a, b), c) != l.join(a, l.join(b, c))
                    || l.meet(l.meet(a, b), c) != l.meet(a, l.meet(b, c))
                {
                    return Err(LawViolation::Associative { a, b, c });
                }
            }
        }
    }
    Ok(())
}

impl FiniteLattice {
    /// First triple `(a, b, c)` with `a <= c` and `a \/ (b /\ c) != (a \/ b) /\ c`,
    /// scanning `a`, then `c`, then `b` in increasing order.
    pub fn modularity_counterexample(&self) -> Option<(usize, usize, usize)> {
        let n = self.size();
        for a in 0..n {
            for c in 0..n {
                if !self.leq(a, c) || a == c {
                    continue;
                }
                for b in 0..n {
                    if self.join(a, self.meet(b, c)) != self.meet(self.join(a, b), c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_modular(&self) -> bool {
        self.modularity_counterexample().is_none()
    }

    pub fn distributivity_counterexample(&self) -> Option<(usize, usize, usize)> {
        let n = self.size();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.meet(x, self.join(y, z)) != self.join(self.meet(x, y), self.meet(x, z))
                    {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_counterexample().is_none()
    }

    /// First `(x, y, z)` violating the semidistributive law on `side`.
    ///
    /// Meet side: `x /\ y = x /\ z` implies `x /\ y = x /\ (y \/ z)`; the join
    /// side is the order dual.
    pub fn semidistributivity_counterexample(&self, side: Side) -> Option<(usize, usize, usize)> {
        let n = self.size();
        let (op, dual): (
            fn(&Self, usize, usize) -> usize,
            fn(&Self, usize, usize) -> usize,
        ) = match side {
            Side::Meet => (Self::meet, Self::join),
            Side::Join => (Self::join, Self::meet),
        };
        for x in 0..n {
            for y in 0..n {
                let xy = op(self, x, y);
                for z in 0..n {
                    if op(self, x, z) == xy && op(self, x, dual(self, y, z)) != xy {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_semidistributive(&self, side: Side) -> bool {
        self.semidistributivity_counterexample(side).is_none()
    }

    /// Some `y` with `x /\ y = lo` and `x \/ y = hi`, searching `[lo, hi]`.
    pub fn relative_complement(&self, x: usize, lo: usize, hi: usize) -> Option<usize> {
        (0..self.size()).find(|&y| {
            self.leq(lo, y) && self.leq(y, hi) && self.meet(x, y) == lo && self.join(x, y) == hi
        })
    }

    pub fn is_complemented(&self) -> bool {
        (0..self.size()).all(|x| {
            self.relative_complement(x, self.bottom(), self.top())
                .is_some()
        })
    }
}
