//! Permuting families from coset partitions of small abelian groups.
//!
//! Congruences of an abelian group are coset partitions of its subgroups and
//! any two of them permute, so drawing from one group's coset partitions
//! gives pairwise permuting families without rejection sampling.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::Partition;

/// `Z_{m_1} x ... x Z_{m_k}`, elements encoded in mixed radix (first factor
/// least significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub factors: Vec<usize>,
}

impl AbelianGroup {
    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    fn digits(&self, mut x: usize) -> Vec<usize> {
        self.factors
            .iter()
            .map(|&m| {
                let d = x % m;
                x /= m;
                d
            })
            .collect()
    }

    fn encode(&self, digits: &[usize]) -> usize {
        self.factors
            .iter()
            .zip(digits)
            .rev()
            .fold(0, |acc, (&m, &d)| acc * m + d)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<usize> = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, &m)| (da[i] + db[i]) % m)
            .collect();
        self.encode(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let d: Vec<usize> = self
            .factors
            .iter()
            .zip(self.digits(a))
            .map(|(&m, x)| (m - x) % m)
            .collect();
        self.encode(&d)
    }

    fn generated(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut h: BTreeSet<usize> = [0].into();
        loop {
            let next: BTreeSet<usize> = h
                .iter()
                .flat_map(|&x| gens.iter().map(move |&g| (x, g)))
                .map(|(x, g)| self.add(x, g))
                .collect();
            let before = h.len();
            h.extend(next);
            if h.len() == before {
                return h;
            }
        }
    }

    /// Every subgroup, each listed once.
    pub fn subgroups(&self) -> Vec<BTreeSet<usize>> {
        let n = self.order();
        let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        // groups of order <= 8 are generated by at most three elements
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    found.insert(self.generated(&[a, b, c]));
                }
            }
        }
        found.into_iter().collect()
    }
}

/// The abelian groups of order 2 through 8, up to isomorphism.
pub fn abelian_groups() -> Vec<AbelianGroup> {
    [
        &[2][..],
        &[3],
        &[4],
        &[2, 2],
        &[5],
        &[6],
        &[7],
        &[8],
        &[4, 2],
        &[2, 2, 2],
    ]
    .iter()
    .map(|f| AbelianGroup {
        factors: f.to_vec(),
    })
    .collect()
}

/// Coset partitions of all subgroups.
pub fn coset_partitions(g: &AbelianGroup) -> Vec<Partition> {
    let n = g.order();
    g.subgroups()
        .into_iter()
        .map(|h| {
            let labels: Vec<usize> = (0..n)
                .map(|x| (0..n).find(|&y| h.contains(&g.add(x, g.neg(y)))).unwrap())
                .collect();
            Partition::from_labels(&labels)
        })
        .collect()
}

/// `n` pairs `(alpha_i, alpha_i')` of coset partitions of one random group,
/// with the base set relabelled by a random permutation.
pub fn random_permuting_instance<R: Rng>(
    rng: &mut R,
    n: usize,
) -> (Vec<Partition>, Vec<Partition>) {
    let groups = abelian_groups();
    let g = groups.choose(rng).expect("nonempty");
    let parts = coset_partitions(g);
    let order = g.order();
    let mut perm: Vec<usize> = (0..order).collect();
    perm.shuffle(rng);
    let relabel = |p: &Partition| {
        let mut labels = vec![0u32; order];
        for x in 0..order {
            labels[perm[x]] = p.rep()[x];
        }
        Partition::from_labels(&labels)
    };
    let mut draw = || {
        (0..n)
            .map(|_| relabel(parts.choose(rng).expect("nonempty")))
            .collect::<Vec<_>>()
    };
    let alphas = draw();
    let primes = draw();
    (alphas, primes)
}
