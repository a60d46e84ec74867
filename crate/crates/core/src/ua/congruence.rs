use std::collections::HashSet;

use super::{Congruence, FiniteAlgebra, UaError};
use crate::partition::{EqRelLattice, Partition};

/// `Con(A)`, with elements sorted from the identity relation upwards.
pub type ConLattice = EqRelLattice;

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let up = self.parent[self.parent[x] as usize];
            self.parent[x] = up;
            x = up as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo as u32;
        true
    }

    fn into_partition(mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|i| self.find(i)).collect();
        Partition::from_labels(&roots)
    }
}

/// The least congruence containing all `pairs`.
///
/// Every pair that merges two classes is pushed through all basic
/// translations `x -> f(c_1, .., x, .., c_k)`; the images are merged in turn.
pub fn generated_congruence(
    a: &FiniteAlgebra,
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> Congruence {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for (x, y) in pairs {
        if uf.union(x, y) {
            queue.push((x, y));
        }
    }
    let mut args = Vec::new();
    while let Some((x, y)) = queue.pop() {
        for op in a.ops() {
            let k = op.arity;
            if k == 0 {
                continue;
            }
            let others = n.pow(k as u32 - 1);
            for pos in 0..k {
                for mut code in 0..others {
                    args.clear();
                    args.resize(k, 0);
                    for i in (0..k).rev().filter(|&i| i != pos) {
                        args[i] = code % n;
                        code /= n;
                    }
                    args[pos] = x;
                    let fx = op.apply(n, &args);
                    args[pos] = y;
                    let fy = op.apply(n, &args);
                    if uf.union(fx, fy) {
                        queue.push((fx, fy));
                    }
                }
            }
        }
    }
    uf.into_partition()
}

pub fn principal_congruence(a: &FiniteAlgebra, x: usize, y: usize) -> Congruence {
    generated_congruence(a, [(x, y)])
}

/// Full compatibility scan against every operation.
pub fn is_congruence(a: &FiniteAlgebra, p: &Partition) -> Result<(), UaError> {
    let n = a.size();
    for op in a.ops() {
        let k = op.arity;
        let total = n.pow(k as u32);
        let mut args = vec![0; k];
        let mut brgs = vec![0; k];
        // compare each argument tuple with every tuple that differs by a
        // related substitution in one place; by transitivity this suffices
        for code in 0..total {
            let mut c = code;
            for i in (0..k).rev() {
                args[i] = c % n;
                c /= n;
            }
            let base = op.apply(n, &args);
            for pos in 0..k {
                brgs.copy_from_slice(&args);
                for z in (0..n).filter(|&z| p.related(z, args[pos])) {
                    brgs[pos] = z;
                    if !p.related(base, op.apply(n, &brgs)) {
                        return Err(UaError::NotACongruence(op.name.clone()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// All congruences: join-closure of the principal ones plus the identity.
pub fn con_lattice(a: &FiniteAlgebra) -> Result<ConLattice, UaError> {
    let n = a.size();
    let cap = crate::cap::lattice_cap();
    let mut seen: HashSet<Partition> = HashSet::new();
    let mut elems: Vec<Partition> = Vec::new();
    let mut push = |p: Partition, elems: &mut Vec<Partition>| -> Result<(), UaError> {
        if seen.insert(p.clone()) {
            elems.push(p);
            if elems.len() > cap {
                return Err(UaError::SizeLimit {
                    size: elems.len(),
                    cap,
                });
            }
        }
        Ok(())
    };
    push(Partition::discrete(n), &mut elems)?;
    for x in 0..n {
        for y in (x + 1)..n {
            push(principal_congruence(a, x, y), &mut elems)?;
        }
    }
    let mut i = 0;
    while i < elems.len() {
        for j in 0..i {
            let joined = elems[i].join(&elems[j]);
            debug_assert!(is_congruence(a, &joined).is_ok());
            push(joined, &mut elems)?;
        }
        i += 1;
    }
    Ok(EqRelLattice::from_closed(elems)?)
}
