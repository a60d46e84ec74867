//! Term-condition centrality via 2x2 matrix closure.
//!
//! A matrix `[m00, m01, m10, m11]` stands for
//! `[[t(a,u), t(a,v)], [t(b,u), t(b,v)]]` with `a alpha b` and `u beta v`
//! componentwise. Generators are `[a, a, b, b]` for `a alpha b` and
//! `[u, v, u, v]` for `u beta v`; closing under the basic operations applied
//! entrywise yields every such matrix.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{generated_congruence, Congruence, FiniteAlgebra, UaError};
use crate::lattice::FiniteLattice;
use crate::partition::Partition;

/// All (alpha, beta)-matrices of `a`.
pub fn matrices(a: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Vec<[u32; 4]> {
    let n = a.size();
    let code = |m: &[u32; 4]| m.iter().fold(0usize, |acc, &x| acc * n + x as usize);
    let mut seen = FixedBitSet::with_capacity(n.pow(4));
    let mut list: Vec<[u32; 4]> = Vec::new();
    let mut add = |m: [u32; 4], list: &mut Vec<[u32; 4]>| {
        let c = code(&m);
        if !seen.put(c) {
            list.push(m);
        }
    };
    for x in 0..n {
        for y in (0..n).filter(|&y| alpha.related(x, y)) {
            add([x as u32, x as u32, y as u32, y as u32], &mut list);
        }
        for y in (0..n).filter(|&y| beta.related(x, y)) {
            add([x as u32, y as u32, x as u32, y as u32], &mut list);
        }
    }
    // semi-naive closure: when item i is processed, apply each operation to
    // every tuple over items 0..=i that uses i at least once
    let mut i = 0;
    let mut idx: Vec<usize> = Vec::new();
    let mut args = Vec::new();
    while i < list.len() {
        for op in a.ops() {
            let k = op.arity;
            if k == 0 {
                continue;
            }
            // `p` is the first position holding `i`: earlier positions range
            // over 0..i, later ones over 0..=i
            for p in 0..k {
                let total = i.pow(p as u32) * (i + 1).pow((k - p - 1) as u32);
                for mut c in 0..total {
                    idx.clear();
                    for q in 0..k {
                        if q == p {
                            idx.push(i);
                        } else {
                            let base = if q < p { i } else { i + 1 };
                            idx.push(c % base);
                            c /= base;
                        }
                    }
                    let mut m = [0u32; 4];
                    for (e, slot) in m.iter_mut().enumerate() {
                        args.clear();
                        args.extend(idx.iter().map(|&j| list[j][e] as usize));
                        *slot = op.apply(n, &args) as u32;
                    }
                    add(m, &mut list);
                }
            }
        }
        i += 1;
    }
    list
}

fn violating(ms: &[[u32; 4]], delta: &Partition) -> Option<[u32; 4]> {
    ms.iter().copied().find(|m| {
        delta.related(m[0] as usize, m[1] as usize) && !delta.related(m[2] as usize, m[3] as usize)
    })
}

/// A matrix witnessing the failure of `C(alpha, beta; delta)`, if any.
pub fn centrality_witness(
    a: &FiniteAlgebra,
    alpha: &Congruence,
    beta: &Congruence,
    delta: &Congruence,
) -> Option<[u32; 4]> {
    violating(&matrices(a, alpha, beta), delta)
}

/// Decides `C(alpha, beta; delta)`.
pub fn centrality(
    a: &FiniteAlgebra,
    alpha: &Congruence,
    beta: &Congruence,
    delta: &Congruence,
) -> bool {
    centrality_witness(a, alpha, beta, delta).is_none()
}

/// `[alpha, beta]`, the least `delta` with `C(alpha, beta; delta)`.
///
/// Ascending fixpoint: start from the identity relation and keep adding the
/// bottom rows of matrices whose top row is already related.
pub fn commutator(
    a: &FiniteAlgebra,
    alpha: &Congruence,
    beta: &Congruence,
) -> Result<Congruence, UaError> {
    let ms = matrices(a, alpha, beta);
    let n = a.size();
    let mut delta = Partition::discrete(n);
    // each round merges at least two classes
    for _ in 0..=n {
        let forced: Vec<(usize, usize)> = ms
            .iter()
            .filter(|m| delta.related(m[0] as usize, m[1] as usize))
            .map(|m| (m[2] as usize, m[3] as usize))
            .collect();
        let old = delta
            .rep()
            .iter()
            .enumerate()
            .map(|(i, &r)| (i, r as usize));
        let next = generated_congruence(a, old.chain(forced));
        if next == delta {
            debug_assert!(violating(&ms, &delta).is_none());
            return Ok(delta);
        }
        delta = next;
    }
    Err(UaError::NonConvergence)
}

/// `[alpha]^0 = alpha`, `[alpha]^{k+1} = [[alpha]^k, [alpha]^k]`, up to the
/// first repeat or `max_n` steps.
pub fn solvable_series(
    a: &FiniteAlgebra,
    alpha: &Congruence,
    max_n: usize,
) -> Result<Vec<Congruence>, UaError> {
    let mut out = vec![alpha.clone()];
    for _ in 0..max_n {
        let last = out.last().unwrap();
        let next = commutator(a, last, last)?;
        if &next == last {
            break;
        }
        out.push(next);
    }
    Ok(out)
}

/// Whether some `[alpha]^k <= beta`. The series is strictly descending until
/// it repeats, so running it to stabilization is decisive.
pub fn is_solvable_interval(
    a: &FiniteAlgebra,
    beta: &Congruence,
    alpha: &Congruence,
) -> Result<bool, UaError> {
    let series = solvable_series(a, alpha, a.size() + 1)?;
    Ok(series.iter().any(|s| s.leq(beta)))
}

/// `I[beta, alpha]` is abelian iff `C(alpha, alpha; beta)`.
pub fn abelian_interval(a: &FiniteAlgebra, beta: &Congruence, alpha: &Congruence) -> bool {
    centrality(a, alpha, alpha, beta)
}

/// The sequences `beta^k`, `gamma^k` up to the first index `m` where both
/// repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaGamma {
    pub m: usize,
    pub beta: Vec<usize>,
    pub gamma: Vec<usize>,
}

impl BetaGamma {
    pub fn beta_m(&self) -> usize {
        self.beta[self.m]
    }

    pub fn gamma_m(&self) -> usize {
        self.gamma[self.m]
    }
}

/// `beta^{k+1} = beta /\ (alpha \/ gamma^k)`,
/// `gamma^{k+1} = gamma /\ (alpha \/ beta^k)`. Both sequences descend, so
/// they settle within `|L|` steps; `max_m` only caps the trace.
pub fn beta_gamma_iteration(
    l: &FiniteLattice,
    alpha: usize,
    beta: usize,
    gamma: usize,
    max_m: usize,
) -> BetaGamma {
    let mut bs = vec![beta];
    let mut gs = vec![gamma];
    let limit = max_m.min(l.size() + 1);
    for k in 0..limit {
        let b = l.meet(beta, l.join(alpha, gs[k]));
        let g = l.meet(gamma, l.join(alpha, bs[k]));
        if b == bs[k] && g == gs[k] {
            return BetaGamma {
                m: k,
                beta: bs,
                gamma: gs,
            };
        }
        bs.push(b);
        gs.push(g);
    }
    let m = bs.len() - 1;
    BetaGamma {
        m,
        beta: bs,
        gamma: gs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{m3, n5};
    use crate::partition::all_partitions;
    use crate::ua::{
        con_lattice, cyclic_group, group_product, is_congruence, majority3, s3, semilattice2,
    };
    use std::collections::BTreeSet;

    fn corpus() -> Vec<FiniteAlgebra> {
        vec![
            cyclic_group(2),
            cyclic_group(3),
            cyclic_group(4),
            group_product(&cyclic_group(2), &cyclic_group(2)),
            s3(),
            semilattice2(),
            majority3(),
        ]
    }

    /// Oracle: meet of every congruence delta with C(alpha, beta; delta).
    fn commutator_by_descent(a: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Partition {
        let con = con_lattice(a).unwrap();
        con.partitions()
            .iter()
            .filter(|d| centrality(a, alpha, beta, d))
            .fold(Partition::indiscrete(a.size()), |acc, d| acc.meet(d))
    }

    /// Oracle: the coset partition of the commutator subgroup.
    fn derived_subgroup_partition(g: &FiniteAlgebra) -> Partition {
        let n = g.size();
        let (m, i) = (g.op("mul").unwrap(), g.op("inv").unwrap());
        let mul = |a, b| m.apply(n, &[a, b]);
        let inv = |a| i.apply(n, &[a]);
        let mut h: BTreeSet<usize> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| mul(mul(inv(a), inv(b)), mul(a, b)))
            .collect();
        loop {
            let next: BTreeSet<usize> = h
                .iter()
                .flat_map(|&x| h.iter().map(move |&y| (x, y)))
                .map(|(x, y)| mul(x, y))
                .collect();
            if next.is_subset(&h) {
                break;
            }
            h.extend(next);
        }
        let labels: Vec<usize> = (0..n)
            .map(|x| (0..n).find(|&y| h.contains(&mul(inv(y), x))).unwrap())
            .collect();
        Partition::from_labels(&labels)
    }

    #[test]
    fn abelian_groups_are_abelian() {
        for n in [2, 3, 4] {
            let g = cyclic_group(n);
            let (one, zero) = (Partition::indiscrete(n), Partition::discrete(n));
            assert!(centrality(&g, &one, &one, &zero));
            assert_eq!(commutator(&g, &one, &one).unwrap(), zero);
        }
    }

    #[test]
    fn s3_is_not_abelian() {
        let g = s3();
        let (one, zero) = (Partition::indiscrete(6), Partition::discrete(6));
        assert!(!centrality(&g, &one, &one, &zero));
        let a3 = Partition::from_blocks(6, &[vec![0, 3, 4], vec![1, 2, 5]]).unwrap();
        assert_eq!(commutator(&g, &one, &one).unwrap(), a3);
        assert_eq!(
            solvable_series(&g, &one, 10).unwrap(),
            vec![one.clone(), a3, zero.clone()]
        );
        assert!(is_solvable_interval(&g, &zero, &one).unwrap());
        assert!(!abelian_interval(&g, &zero, &one));
    }

    #[test]
    fn group_commutators_match_derived_subgroups() {
        for g in corpus().into_iter().filter(|a| a.op("mul").is_some()) {
            let one = Partition::indiscrete(g.size());
            assert_eq!(
                commutator(&g, &one, &one).unwrap(),
                derived_subgroup_partition(&g)
            );
        }
    }

    #[test]
    fn ascending_fixpoint_matches_descending_search() {
        for a in corpus() {
            let con = con_lattice(&a).unwrap();
            for x in con.partitions() {
                for y in con.partitions() {
                    let c = commutator(&a, x, y).unwrap();
                    assert_eq!(c, commutator_by_descent(&a, x, y));
                    assert!(c.leq(&x.meet(y)));
                    assert!(is_congruence(&a, &c).is_ok());
                }
            }
        }
    }

    #[test]
    fn commutator_is_monotone() {
        for a in corpus() {
            let con = con_lattice(&a).unwrap();
            let ps = con.partitions();
            let comm: Vec<Vec<Partition>> = ps
                .iter()
                .map(|x| ps.iter().map(|y| commutator(&a, x, y).unwrap()).collect())
                .collect();
            for i in 0..ps.len() {
                for j in 0..ps.len() {
                    for k in 0..ps.len() {
                        if ps[i].leq(&ps[k]) {
                            assert!(comm[i][j].leq(&comm[k][j]));
                            assert!(comm[j][i].leq(&comm[j][k]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_centralities() {
        for a in corpus() {
            let n = a.size();
            let (one, zero) = (Partition::indiscrete(n), Partition::discrete(n));
            for p in all_partitions(n)
                .iter()
                .filter(|p| is_congruence(&a, p).is_ok())
            {
                assert!(centrality(&a, p, p, &one));
                assert_eq!(commutator(&a, &zero, p).unwrap(), zero);
                assert!(abelian_interval(&a, p, p));
            }
            assert_eq!(solvable_series(&a, &zero, 5).unwrap(), vec![zero.clone()]);
        }
    }

    #[test]
    fn semilattice_is_neutral() {
        let a = semilattice2();
        let one = Partition::indiscrete(2);
        assert_eq!(commutator(&a, &one, &one).unwrap(), one);
    }

    #[test]
    fn beta_gamma_examples() {
        let l = m3();
        let r = beta_gamma_iteration(&l, 1, 2, 3, 10);
        assert_eq!((r.m, r.beta_m(), r.gamma_m()), (0, 2, 3));
        let l = n5();
        let (a, b, c) = (
            l.find_label("a").unwrap(),
            l.find_label("b").unwrap(),
            l.find_label("c").unwrap(),
        );
        let r = beta_gamma_iteration(&l, a, b, c, 10);
        assert_eq!(r.m, 2);
        assert_eq!(r.beta_m(), l.bottom());
        assert_eq!(r.gamma_m(), a);
        assert_eq!(r.gamma, vec![c, c, a]);
        // beta below alpha never moves
        let r = beta_gamma_iteration(&l, c, a, b, 10);
        assert!(r.beta.iter().all(|&x| x == a));
    }
}
