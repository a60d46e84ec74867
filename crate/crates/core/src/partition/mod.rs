//! Equivalence relations on `{0, ..., n-1}` and lattices of them.

mod random;

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cap::DEFAULT_PARTITION_CAP;
use crate::lattice::{FiniteLattice, LatticeError};
use crate::term::{d_n_star, eval, Assignment, PartitionOps};

pub use random::{abelian_groups, coset_partitions, random_permuting_instance, AbelianGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("base sizes differ: {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
    #[error("pair {0} does not permute")]
    NotPermuting(usize),
    #[error("need n >= 3 pairs with matching lengths, got {0} and {1}")]
    BadFamily(usize, usize),
    #[error("no partitions given")]
    Empty,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A partition in canonical form: `rep[i]` is the least element of the block
/// of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rep: Vec<u32>,
}

impl Partition {
    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Self {
            rep: (0..n as u32).collect(),
        }
    }

    /// One block.
    pub fn indiscrete(n: usize) -> Self {
        Self { rep: vec![0; n] }
    }

    /// The kernel of a labelling: `i` and `j` share a block iff their labels
    /// are equal.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut first: HashMap<&T, u32> = HashMap::new();
        let rep = labels
            .iter()
            .enumerate()
            .map(|(i, l)| *first.entry(l).or_insert(i as u32))
            .collect();
        Self { rep }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::InvalidBlocks(format!("block {b} is empty")));
            }
            for &x in block {
                if x >= n {
                    return Err(PartitionError::InvalidBlocks(format!(
                        "{x} is outside 0..{n}"
                    )));
                }
                if label[x] != usize::MAX {
                    return Err(PartitionError::InvalidBlocks(format!("{x} occurs twice")));
                }
                label[x] = b;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(PartitionError::InvalidBlocks(format!("{x} is in no block")));
        }
        Ok(Self::from_labels(&label))
    }

    pub fn base_size(&self) -> usize {
        self.rep.len()
    }

    pub fn rep(&self) -> &[u32] {
        &self.rep
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.rep[a] == self.rep[b]
    }

    /// Blocks in order of their least element, each sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.rep.len()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, &r) in self.rep.iter().enumerate() {
            let r = r as usize;
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }

    pub fn block_count(&self) -> usize {
        self.rep
            .iter()
            .enumerate()
            .filter(|&(i, &r)| i == r as usize)
            .count()
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &Partition) -> bool {
        assert_eq!(self.base_size(), other.base_size());
        (0..self.rep.len()).all(|i| other.related(i, self.rep[i] as usize))
    }

    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(
            self.base_size(),
            other.base_size(),
            "partitions on different base sets"
        );
        let n = self.rep.len();
        let mut parent: Vec<u32> = self.rep.clone();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                let up = p[p[x as usize] as usize];
                p[x as usize] = up;
                x = up;
            }
            x
        }
        for i in 0..n {
            let (a, b) = (find(&mut parent, i as u32), find(&mut parent, other.rep[i]));
            // always hang the larger root under the smaller, so roots stay least
            if a < b {
                parent[b as usize] = a;
            } else if b < a {
                parent[a as usize] = b;
            }
        }
        let rep = (0..n as u32).map(|i| find(&mut parent, i)).collect();
        Partition { rep }
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(
            self.base_size(),
            other.base_size(),
            "partitions on different base sets"
        );
        let mut first: HashMap<(u32, u32), u32> = HashMap::new();
        let rep = (0..self.rep.len())
            .map(|i| *first.entry((self.rep[i], other.rep[i])).or_insert(i as u32))
            .collect();
        Partition { rep }
    }

    /// The relation `self ∘ other = {(x, z) : x self y other z}` as one
    /// bitset row per `x`.
    pub fn compose(&self, other: &Partition) -> Vec<FixedBitSet> {
        let n = self.rep.len();
        let other_blocks = block_sets(other);
        let mut by_rep: HashMap<u32, FixedBitSet> = HashMap::new();
        (0..n)
            .map(|x| {
                by_rep
                    .entry(self.rep[x])
                    .or_insert_with(|| {
                        let mut row = FixedBitSet::with_capacity(n);
                        for y in (0..n).filter(|&y| self.related(x, y)) {
                            row.union_with(&other_blocks[other.rep[y] as usize]);
                        }
                        row
                    })
                    .clone()
            })
            .collect()
    }

    /// Whether `self ∘ other = other ∘ self`, tested as `self ∘ other ⊇ self ∨ other`.
    pub fn permutes_with(&self, other: &Partition) -> bool {
        assert_eq!(self.base_size(), other.base_size());
        let join = self.join(other);
        let comp = self.compose(other);
        (0..self.rep.len()).all(|x| {
            comp[x].count_ones(..) == join.rep.iter().filter(|&&r| r == join.rep[x]).count()
        })
    }
}

/// `blocks[r]` is the block with least element `r` as a bitset.
fn block_sets(p: &Partition) -> Vec<FixedBitSet> {
    let n = p.base_size();
    let mut out = vec![FixedBitSet::with_capacity(n); n];
    for (i, &r) in p.rep.iter().enumerate() {
        out[r as usize].insert(i);
    }
    out
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.base_size() > 10 { "," } else { "" };
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            let items: Vec<String> = block.iter().map(|x| x.to_string()).collect();
            f.write_str(&items.join(sep))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    base_size: usize,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PartitionJson {
            base_size: self.base_size(),
            blocks: self.blocks(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PartitionJson::deserialize(d)?;
        Partition::from_blocks(j.base_size, &j.blocks).map_err(serde::de::Error::custom)
    }
}

fn same_size(a: &Partition, b: &Partition) -> Result<(), PartitionError> {
    if a.base_size() == b.base_size() {
        Ok(())
    } else {
        Err(PartitionError::SizeMismatch(a.base_size(), b.base_size()))
    }
}

pub fn p_join(a: &Partition, b: &Partition) -> Result<Partition, PartitionError> {
    same_size(a, b)?;
    Ok(a.join(b))
}

pub fn p_meet(a: &Partition, b: &Partition) -> Result<Partition, PartitionError> {
    same_size(a, b)?;
    Ok(a.meet(b))
}

pub fn permutes(a: &Partition, b: &Partition) -> Result<bool, PartitionError> {
    same_size(a, b)?;
    Ok(a.permutes_with(b))
}

/// A lattice whose elements are partitions of one base set.
#[derive(Debug, Clone)]
pub struct EqRelLattice {
    lattice: FiniteLattice,
    elems: Vec<Partition>,
    index: HashMap<Partition, usize>,
}

impl EqRelLattice {
    /// Packages a join- and meet-closed family. Elements are ordered by
    /// decreasing block count, then by canonical form, so the discrete
    /// partition (if present) comes first.
    pub(crate) fn from_closed(mut elems: Vec<Partition>) -> Result<Self, PartitionError> {
        elems.sort_by(|a, b| b.block_count().cmp(&a.block_count()).then_with(|| a.cmp(b)));
        let index: HashMap<Partition, usize> = elems
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let lattice = FiniteLattice::from_operations(
            elems.len(),
            |a, b| index[&elems[a].join(&elems[b])],
            |a, b| index[&elems[a].meet(&elems[b])],
        )?;
        let labels = elems.iter().map(|p| p.to_string()).collect();
        let lattice = lattice.with_labels(labels)?;
        Ok(Self {
            lattice,
            elems,
            index,
        })
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn into_lattice(self) -> FiniteLattice {
        self.lattice
    }

    pub fn partition(&self, i: usize) -> &Partition {
        &self.elems[i]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.elems
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn base_size(&self) -> usize {
        self.elems[0].base_size()
    }
}

/// All partitions of an `n`-set, by restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn go(i: usize, labels: &mut Vec<usize>, max: usize, out: &mut Vec<Partition>) {
        if i == labels.len() {
            out.push(Partition::from_labels(labels));
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            go(i + 1, labels, max.max(l), out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Partition::discrete(0));
        return out;
    }
    let mut labels = vec![0; n];
    go(1, &mut labels, 0, &mut out);
    out
}

/// The full partition lattice Π_n.
pub fn full_partition_lattice(n: usize) -> Result<EqRelLattice, PartitionError> {
    if n > DEFAULT_PARTITION_CAP {
        return Err(LatticeError::SizeLimit {
            size: n,
            cap: DEFAULT_PARTITION_CAP,
        }
        .into());
    }
    EqRelLattice::from_closed(all_partitions(n))
}

/// Closure of `gens` under join and meet.
pub fn closed_sublattice(gens: &[Partition]) -> Result<EqRelLattice, PartitionError> {
    let first = gens.first().ok_or(PartitionError::Empty)?;
    for g in gens {
        same_size(first, g)?;
    }
    let cap = crate::cap::lattice_cap();
    let mut elems: Vec<Partition> = Vec::new();
    let mut seen: HashMap<Partition, ()> = HashMap::new();
    for g in gens {
        if seen.insert(g.clone(), ()).is_none() {
            elems.push(g.clone());
        }
    }
    // every new element is combined with everything before it exactly once
    let mut i = 0;
    while i < elems.len() {
        for j in 0..i {
            for p in [elems[i].join(&elems[j]), elems[i].meet(&elems[j])] {
                if seen.insert(p.clone(), ()).is_none() {
                    elems.push(p);
                    if elems.len() > cap {
                        return Err(LatticeError::SizeLimit {
                            size: elems.len(),
                            cap,
                        }
                        .into());
                    }
                }
            }
        }
        i += 1;
    }
    EqRelLattice::from_closed(elems)
}

/// Outcome of evaluating the (D_n*) instance on a family of partitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DnCheck {
    pub n: usize,
    pub holds: bool,
    pub lhs: Partition,
    pub rhs: Partition,
}

/// Evaluates the (D_n*) instance with `x_i := alphas[i]` and
/// `x_i' := alpha_primes[i]` after checking that each pair permutes.
///
/// Evaluation runs directly on partitions; the result is the same as inside
/// the generated sublattice because that sublattice is closed under the
/// same operations.
pub fn verify_dn_permuting(
    alphas: &[Partition],
    alpha_primes: &[Partition],
) -> Result<DnCheck, PartitionError> {
    let n = alphas.len();
    if n < 3 || alpha_primes.len() != n {
        return Err(PartitionError::BadFamily(n, alpha_primes.len()));
    }
    for p in alphas.iter().chain(alpha_primes) {
        same_size(&alphas[0], p)?;
    }
    for i in 0..n {
        if !alphas[i].permutes_with(&alpha_primes[i]) {
            return Err(PartitionError::NotPermuting(i));
        }
    }
    let id = d_n_star(n).expect("n >= 3");
    let mut env: Assignment<Partition> = Assignment::new();
    for i in 0..n {
        env.insert(format!("x{i}").into(), alphas[i].clone());
        env.insert(format!("x{i}'").into(), alpha_primes[i].clone());
    }
    let lhs = eval(&PartitionOps, &id.lhs, &env).expect("all variables bound");
    let rhs = eval(&PartitionOps, &id.rhs, &env).expect("all variables bound");
    Ok(DnCheck {
        n,
        holds: lhs.leq(&rhs),
        lhs,
        rhs,
    })
}
