use super::{FiniteLattice, LatticeError};

/// A join- and meet-preserving map between two finite lattices.
#[derive(Debug, Clone)]
pub struct LatticeHom<'a> {
    source: &'a FiniteLattice,
    target: &'a FiniteLattice,
    map: Vec<usize>,
    surjective: bool,
}

impl<'a> LatticeHom<'a> {
    pub fn new(
        source: &'a FiniteLattice,
        target: &'a FiniteLattice,
        map: Vec<usize>,
    ) -> Result<Self, LatticeError> {
        if map.len() != source.size() {
            return Err(LatticeError::NotAHomomorphism(format!(
                "map has {} entries for {} elements",
                map.len(),
                source.size()
            )));
        }
        if let Some(&index) = map.iter().find(|&&x| x >= target.size()) {
            return Err(LatticeError::IndexOutOfRange {
                index,
                size: target.size(),
            });
        }
        for a in 0..source.size() {
            for b in a..source.size() {
                if map[source.join(a, b)] != target.join(map[a], map[b]) {
                    return Err(LatticeError::NotAHomomorphism(format!(
                        "join of {a} and {b} is not preserved"
                    )));
                }
                if map[source.meet(a, b)] != target.meet(map[a], map[b]) {
                    return Err(LatticeError::NotAHomomorphism(format!(
                        "meet of {a} and {b} is not preserved"
                    )));
                }
            }
        }
        let surjective = image_is_everything(&map, target.size());
        Ok(Self {
            source,
            target,
            map,
            surjective,
        })
    }

    pub fn identity(l: &'a FiniteLattice) -> Self {
        Self {
            source: l,
            target: l,
            map: (0..l.size()).collect(),
            surjective: true,
        }
    }

    pub fn source(&self) -> &'a FiniteLattice {
        self.source
    }

    pub fn target(&self) -> &'a FiniteLattice {
        self.target
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Recorded surjectivity, re-verified against the image set.
    pub fn is_surjective(&self) -> bool {
        debug_assert_eq!(
            self.surjective,
            image_is_everything(&self.map, self.target.size())
        );
        self.surjective
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        self.map
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y], true))
    }
}

fn image_is_everything(map: &[usize], size: usize) -> bool {
    let mut hit = vec![false; size];
    for &y in map {
        hit[y] = true;
    }
    hit.into_iter().all(|h| h)
}

/// All lattice homomorphisms `source -> target` (as maps), in lexicographic
/// order of the map vector, stopping after `limit` results.
pub fn homomorphisms(
    source: &FiniteLattice,
    target: &FiniteLattice,
    limit: usize,
) -> Vec<Vec<usize>> {
    let mut search = HomSearch {
        source,
        target,
        img: vec![usize::MAX; source.size()],
        assigned: Vec::new(),
        out: Vec::new(),
        limit,
    };
    search.extend(0);
    search.out
}

struct HomSearch<'a> {
    source: &'a FiniteLattice,
    target: &'a FiniteLattice,
    img: Vec<usize>,
    assigned: Vec<usize>,
    out: Vec<Vec<usize>>,
    limit: usize,
}

impl HomSearch<'_> {
    fn extend(&mut self, next: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        let Some(p) = (next..self.source.size()).find(|&p| self.img[p] == usize::MAX) else {
            self.out.push(self.img.clone());
            return;
        };
        for x in 0..self.target.size() {
            let mark = self.assigned.len();
            if self.assign(p, x) {
                self.extend(p + 1);
            }
            for q in self.assigned.drain(mark..) {
                self.img[q] = usize::MAX;
            }
            if self.out.len() >= self.limit {
                return;
            }
        }
    }

    /// Assigns `p -> x` and propagates every forced join and meet. Returns
    /// false on conflict; the caller undoes the trail either way.
    fn assign(&mut self, p: usize, x: usize) -> bool {
        let mut queue = vec![(p, x)];
        while let Some((p, x)) = queue.pop() {
            match self.img[p] {
                usize::MAX => {
                    self.img[p] = x;
                    self.assigned.push(p);
                }
                y if y == x => continue,
                _ => return false,
            }
            for i in 0..self.assigned.len() {
                let q = self.assigned[i];
                let fq = self.img[q];
                for (s, t) in [
                    (self.source.join(p, q), self.target.join(x, fq)),
                    (self.source.meet(p, q), self.target.meet(x, fq)),
                ] {
                    match self.img[s] {
                        usize::MAX => queue.push((s, t)),
                        y if y != t => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}
