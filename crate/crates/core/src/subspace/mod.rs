//! Subspaces of `GF(p)^d` in reduced row-echelon form.

mod kinf;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{EmbeddingSearch, FiniteLattice, LatticeError, SearchOutcome};

pub use kinf::{k_infinity_member, KInfinityReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubspaceError {
    #[error("{0} is not a prime below 65536")]
    NotPrime(u32),
    #[error("subspaces over GF({0}) and GF({1}) cannot be combined")]
    FieldMismatch(u32, u32),
    #[error("ambient dimensions {0} and {1} differ")]
    DimensionMismatch(usize, usize),
    #[error("cannot parse subspace `{0}`")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u32) -> Result<(), SubspaceError> {
    if p < 1 << 16 && is_prime(p) {
        Ok(())
    } else {
        Err(SubspaceError::NotPrime(p))
    }
}

fn inv(a: u32, p: u32) -> u32 {
    // Fermat: a^(p-2)
    let (mut base, mut e, mut acc) = (a as u64, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Row-reduces in place and drops zero rows.
fn rref(rows: &mut Vec<Vec<u32>>, p: u32) {
    let width = rows.first().map_or(0, |r| r.len());
    let pm = p as u64;
    let mut r = 0;
    for c in 0..width {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let s = inv(rows[r][c], p) as u64;
        for x in rows[r].iter_mut() {
            *x = (*x as u64 * s % pm) as u32;
        }
        for i in 0..rows.len() {
            let f = rows[i][c] as u64;
            if i != r && f != 0 {
                for j in 0..width {
                    let sub = f * rows[r][j] as u64 % pm;
                    rows[i][j] = ((rows[i][j] as u64 + pm - sub) % pm) as u32;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    p: u32,
    dim: usize,
    basis: Vec<Vec<u32>>,
}

impl Subspace {
    /// The span of arbitrary vectors (reduced mod `p`).
    pub fn span(p: u32, dim: usize, vectors: &[Vec<u32>]) -> Result<Self, SubspaceError> {
        check_prime(p)?;
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != dim {
                return Err(SubspaceError::DimensionMismatch(dim, v.len()));
            }
            rows.push(v.iter().map(|x| x % p).collect());
        }
        rref(&mut rows, p);
        Ok(Self {
            p,
            dim,
            basis: rows,
        })
    }

    pub fn zero(p: u32, dim: usize) -> Self {
        Self {
            p,
            dim,
            basis: Vec::new(),
        }
    }

    pub fn whole(p: u32, dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| (0..dim).map(|j| (i == j) as u32).collect())
            .collect();
        Self { p, dim, basis }
    }

    /// Parses comma-separated digit rows such as `101,010`; angle brackets
    /// are optional and `<>` (or the empty string) is the zero subspace.
    pub fn parse(s: &str, p: u32, dim: usize) -> Result<Self, SubspaceError> {
        let bad = || SubspaceError::Parse(s.to_string());
        let body = s.trim();
        let body = body
            .strip_prefix('<')
            .and_then(|b| b.strip_suffix('>'))
            .unwrap_or(body)
            .trim();
        if body.is_empty() {
            check_prime(p)?;
            return Ok(Self::zero(p, dim));
        }
        let rows = body
            .split(',')
            .map(|row| {
                row.trim()
                    .chars()
                    .map(|c| c.to_digit(10).filter(|&d| d < p).ok_or_else(bad))
                    .collect()
            })
            .collect::<Result<Vec<Vec<u32>>, _>>()?;
        Self::span(p, dim, &rows)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    fn compatible(&self, other: &Subspace) -> Result<(), SubspaceError> {
        if self.p != other.p {
            Err(SubspaceError::FieldMismatch(self.p, other.p))
        } else if self.dim != other.dim {
            Err(SubspaceError::DimensionMismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows: Vec<Vec<u32>> = self.basis.iter().chain(&other.basis).cloned().collect();
        rref(&mut rows, self.p);
        Subspace {
            p: self.p,
            dim: self.dim,
            basis: rows,
        }
    }

    /// Zassenhaus: reduce `[[U, U], [W, 0]]`; rows with zero left half span
    /// the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let d = self.dim;
        let mut rows: Vec<Vec<u32>> = self
            .basis
            .iter()
            .map(|u| u.iter().chain(u).copied().collect())
            .chain(
                other
                    .basis
                    .iter()
                    .map(|w| w.iter().copied().chain(std::iter::repeat_n(0, d)).collect()),
            )
            .collect();
        rref(&mut rows, self.p);
        let mut basis: Vec<Vec<u32>> = rows
            .into_iter()
            .filter(|r| r[..d].iter().all(|&x| x == 0))
            .map(|r| r[d..].to_vec())
            .collect();
        rref(&mut basis, self.p);
        Subspace {
            p: self.p,
            dim: d,
            basis,
        }
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.sum(other).dim() == self.dim()
    }

    /// Total number of nonzero basis entries.
    pub fn weight(&self) -> usize {
        self.basis.iter().flatten().filter(|&&x| x != 0).count()
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, row) in self.basis.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            for x in row {
                if self.p > 10 {
                    write!(f, "{x}.")?;
                } else {
                    write!(f, "{x}")?;
                }
            }
        }
        f.write_str(">")
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn s_sum(u: &Subspace, w: &Subspace) -> Result<Subspace, SubspaceError> {
    u.compatible(w)?;
    Ok(u.sum(w))
}

pub fn s_intersect(u: &Subspace, w: &Subspace) -> Result<Subspace, SubspaceError> {
    u.compatible(w)?;
    Ok(u.intersect(w))
}

/// Every RREF matrix of rank `k` with `dim` columns over GF(p).
fn rref_matrices(p: u32, dim: usize, k: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    choose_pivots(dim, k, 0, &mut pivots, &mut |piv| {
        // free positions: row r, column c > piv[r] with c not a pivot column
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                ((piv[r] + 1)..dim)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let total = (p as u64).pow(free.len() as u32);
        for code in 0..total {
            let mut m = vec![vec![0u32; dim]; k];
            for (r, &c) in piv.iter().enumerate() {
                m[r][c] = 1;
            }
            let mut rest = code;
            for &(r, c) in &free {
                m[r][c] = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            out.push(m);
        }
    });
    out
}

fn choose_pivots(
    dim: usize,
    k: usize,
    from: usize,
    cur: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in from..dim {
        cur.push(c);
        choose_pivots(dim, k, c + 1, cur, f);
        cur.pop();
    }
}

/// `Sub(GF(p)^dim)` as a lattice.
#[derive(Debug, Clone)]
pub struct SubspaceLattice {
    p: u32,
    dim: usize,
    lattice: FiniteLattice,
    elems: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
}

/// Number of subspaces of `GF(p)^dim`, by the Gaussian binomial recurrence
/// `G(n+1) = 2 G(n) + (p^n - 1) G(n-1)`.
pub fn subspace_count(dim: usize, p: u32) -> u128 {
    let (mut prev, mut cur) = (1u128, 2u128);
    if dim == 0 {
        return 1;
    }
    for n in 1..dim {
        let next = 2 * cur + ((p as u128).pow(n as u32) - 1) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Builds the full subspace lattice. Elements are ordered by dimension and,
/// within a dimension, by decreasing canonical basis, so index 0 is the zero
/// subspace and the last index is the whole space.
pub fn subspace_lattice(dim: usize, p: u32) -> Result<SubspaceLattice, SubspaceError> {
    check_prime(p)?;
    let cap = crate::cap::lattice_cap();
    let count = subspace_count(dim, p);
    if count > cap as u128 {
        return Err(LatticeError::SizeLimit {
            size: count.min(usize::MAX as u128) as usize,
            cap,
        }
        .into());
    }
    let mut elems: Vec<Subspace> = Vec::new();
    for k in 0..=dim {
        let mut layer: Vec<Subspace> = rref_matrices(p, dim, k)
            .into_iter()
            .map(|basis| Subspace { p, dim, basis })
            .collect();
        layer.sort_by(|a, b| b.basis.cmp(&a.basis));
        elems.extend(layer);
    }
    let index: HashMap<Subspace, usize> = elems
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let lattice = FiniteLattice::from_operations(
        elems.len(),
        |a, b| index[&elems[a].sum(&elems[b])],
        |a, b| index[&elems[a].intersect(&elems[b])],
    )?
    .with_labels(elems.iter().map(|s| s.to_string()).collect())?;
    Ok(SubspaceLattice {
        p,
        dim,
        lattice,
        elems,
        index,
    })
}

impl SubspaceLattice {
    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn into_lattice(self) -> FiniteLattice {
        self.lattice
    }

    pub fn subspace(&self, i: usize) -> &Subspace {
        &self.elems[i]
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }
}

/// Outcome of [`embed_search`] with the images spelled out as subspaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubspaceEmbedding {
    pub outcome: SearchOutcome,
    pub images: Option<Vec<Subspace>>,
}

/// Looks for a lattice embedding of `l` into `Sub(GF(p)^dim)`. Bottom and top
/// are tried at the zero and whole space first, and remaining candidates are
/// tried sparsest basis first.
pub fn embed_search(
    l: &FiniteLattice,
    dim: usize,
    p: u32,
    cover_preserving: bool,
    budget: Option<u64>,
) -> Result<SubspaceEmbedding, SubspaceError> {
    let sub = subspace_lattice(dim, p)?;
    if !l.is_modular() {
        return Ok(SubspaceEmbedding {
            outcome: SearchOutcome::Exhausted,
            images: None,
        });
    }
    let target = sub.lattice();
    let mut search = EmbeddingSearch::new(l, target)
        .order_candidates_by(|x| (sub.subspace(x).weight(), x))
        .prefer(l.bottom(), target.bottom())
        .prefer(l.top(), target.top())
        .cover_preserving(cover_preserving);
    if let Some(b) = budget {
        search = search.budget(b);
    }
    let outcome = search.run();
    let images = match &outcome {
        SearchOutcome::Found(map) => Some(map.iter().map(|&i| sub.subspace(i).clone()).collect()),
        _ => None,
    };
    Ok(SubspaceEmbedding { outcome, images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{boolean, chain, m3, n5};
    use crate::term::{
        check, eval, modular_law, two_distributive, Assignment, CheckMode, QuasiIdentity, Verdict,
    };
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn s(text: &str, p: u32, dim: usize) -> Subspace {
        Subspace::parse(text, p, dim).unwrap()
    }

    /// Brute-force oracle: the distinct spans of all sets of at most `dim`
    /// vectors, each span as the explicit set of its vectors.
    fn count_by_spans(dim: usize, p: u32) -> usize {
        let q = (p as usize).pow(dim as u32);
        let vec_of = |mut code: usize| -> Vec<u32> {
            (0..dim)
                .map(|_| {
                    let d = (code % p as usize) as u32;
                    code /= p as usize;
                    d
                })
                .collect()
        };
        let add = |a: &[u32], b: &[u32]| -> Vec<u32> {
            a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
        };
        let scale = |c: u32, a: &[u32]| -> Vec<u32> { a.iter().map(|x| x * c % p).collect() };
        let span = |gens: &[Vec<u32>]| -> BTreeSet<Vec<u32>> {
            let mut set: BTreeSet<Vec<u32>> = [vec![0; dim]].into();
            for g in gens {
                let cur: Vec<Vec<u32>> = set.iter().cloned().collect();
                for v in cur {
                    for c in 1..p {
                        set.insert(add(&v, &scale(c, g)));
                    }
                }
            }
            set
        };
        let mut found: BTreeSet<BTreeSet<Vec<u32>>> = BTreeSet::new();
        fn subsets(
            q: usize,
            k: usize,
            from: usize,
            cur: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            f(cur);
            if cur.len() == k {
                return;
            }
            for i in from..q {
                cur.push(i);
                subsets(q, k, i + 1, cur, f);
                cur.pop();
            }
        }
        subsets(q, dim, 1, &mut Vec::new(), &mut |idx| {
            let gens: Vec<Vec<u32>> = idx.iter().map(|&i| vec_of(i)).collect();
            found.insert(span(&gens));
        });
        found.len()
    }

    #[test]
    fn sums_and_intersections() {
        assert_eq!(
            s_sum(&s("100", 2, 3), &s("010", 2, 3)).unwrap(),
            s("100,010", 2, 3)
        );
        assert_eq!(
            s_intersect(&s("100,010", 2, 3), &s("010,001", 2, 3)).unwrap(),
            s("010", 2, 3)
        );
        let u = s("110,011", 2, 3);
        assert_eq!(u.sum(&u), u);
        assert_eq!(
            s_sum(&s("10", 2, 2), &s("10", 3, 2)),
            Err(SubspaceError::FieldMismatch(2, 3))
        );
        assert_eq!(
            s_sum(&s("10", 2, 2), &s("100", 2, 3)),
            Err(SubspaceError::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn canonical_bases() {
        assert_eq!(s("110,011", 2, 3), s("101,011", 2, 3));
        assert_eq!(s("22", 3, 2), s("11", 3, 2));
        assert_eq!(s("12", 3, 2).basis(), &[vec![1, 2]]);
        assert_eq!(s("<>", 5, 2), Subspace::zero(5, 2));
        assert!(Subspace::parse("12", 2, 2).is_err());
        assert!(Subspace::parse("10", 4, 2).is_err());
    }

    #[test]
    fn counts_match_the_span_oracle() {
        for (dim, p, expected) in [
            (2, 2, 5),
            (3, 2, 16),
            (2, 3, 6),
            (4, 2, 67),
            (1, 5, 2),
            (3, 3, 28),
        ] {
            let l = subspace_lattice(dim, p).unwrap();
            assert_eq!(l.size(), expected);
            assert_eq!(subspace_count(dim, p), expected as u128);
            if dim <= 3 || p == 2 {
                assert_eq!(count_by_spans(dim, p), expected);
            }
        }
    }

    #[test]
    fn subspace_lattices_are_modular() {
        for (dim, p) in [(1, 3), (2, 2), (2, 3), (3, 2), (2, 5)] {
            let sub = subspace_lattice(dim, p).unwrap();
            let l = sub.lattice();
            assert!(l.is_modular());
            assert_eq!(sub.subspace(l.bottom()), &Subspace::zero(p, dim));
            assert_eq!(sub.subspace(l.top()), &Subspace::whole(p, dim));
            for a in 0..l.size() {
                for b in 0..l.size() {
                    assert_eq!(l.leq(a, b), sub.subspace(b).contains(sub.subspace(a)));
                }
            }
        }
        assert!(subspace_lattice(2, 2)
            .unwrap()
            .lattice()
            .isomorphism_from(&m3())
            .is_some());
        assert!(subspace_lattice(1, 7)
            .unwrap()
            .lattice()
            .isomorphism_from(&chain(2))
            .is_some());
    }

    #[test]
    fn two_distributivity_fails_at_the_all_ones_line() {
        let sub = subspace_lattice(3, 2).unwrap();
        let l = sub.lattice();
        let at = |t: &str| sub.index_of(&s(t, 2, 3)).unwrap();
        let id = two_distributive();
        let env: Assignment = [
            ("u", at("111")),
            ("x", at("100")),
            ("y", at("010")),
            ("z", at("001")),
        ]
        .into_iter()
        .map(|(k, v)| (Arc::from(k), v))
        .collect();
        assert_eq!(eval(l, &id.lhs, &env).unwrap(), at("111"));
        assert_eq!(eval(l, &id.rhs, &env).unwrap(), l.bottom());
        let q = QuasiIdentity {
            premises: vec![],
            conclusion: id,
        };
        let Verdict::Fails { assignment } = check(l, &q, CheckMode::exhaustive()).unwrap() else {
            panic!("Sub(GF(2)^3) is not 2-distributive")
        };
        assert_eq!(assignment["u"], at("111"));
    }

    #[test]
    fn embeddings() {
        let m = m3();
        let out = embed_search(&m, 2, 2, false, None).unwrap();
        assert!(matches!(out.outcome, SearchOutcome::Found(_)));
        assert_eq!(
            embed_search(&n5(), 3, 2, false, None).unwrap().outcome,
            SearchOutcome::Exhausted
        );
        let square = boolean(2);
        let out = embed_search(&square, 2, 3, false, None).unwrap();
        let images: BTreeSet<Subspace> = out.images.unwrap().into_iter().collect();
        let expected: BTreeSet<Subspace> = [
            Subspace::zero(3, 2),
            s("10", 3, 2),
            s("01", 3, 2),
            Subspace::whole(3, 2),
        ]
        .into();
        assert_eq!(images, expected);
        // covers must go to covers, so M3 lands in a plane
        let cov = embed_search(&m, 3, 2, true, None).unwrap();
        let images = cov.images.unwrap();
        assert_eq!(images[0], Subspace::zero(2, 3));
        assert_eq!(images[4].dim(), 2);
    }

    #[test]
    fn embeddings_preserve_the_modular_law() {
        let sub = subspace_lattice(3, 2).unwrap();
        let src = boolean(3);
        let out = embed_search(&src, 3, 2, true, None).unwrap();
        let SearchOutcome::Found(map) = out.outcome else {
            panic!("B3 sits in Sub(GF(2)^3)")
        };
        let ml = modular_law();
        for x in 0..8 {
            for y in 0..8 {
                for z in 0..8 {
                    let env = |m: &dyn Fn(usize) -> usize| -> Assignment {
                        [("x", m(x)), ("y", m(y)), ("z", m(z))]
                            .into_iter()
                            .map(|(k, v)| (Arc::from(k), v))
                            .collect()
                    };
                    let here = ml.holds_at(&src, &env(&|v| v)).unwrap();
                    let there = ml.holds_at(sub.lattice(), &env(&|v| map[v])).unwrap();
                    assert_eq!(here, there);
                }
            }
        }
    }
}
