//! The algebra `A^n(alpha)` of alpha-constant tuples and the congruence
//! lattice `L_n = I[0, alpha-bar]` built from it.

use std::collections::HashMap;

use serde::Serialize;

use super::{
    abelian_interval, con_lattice, generated_congruence, Congruence, FiniteAlgebra, Operation,
    UaError,
};
use crate::lattice::FiniteLattice;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerAlgebra {
    pub algebra: FiniteAlgebra,
    /// Element `i` of `algebra` is the tuple `tuples[i]`, in lexicographic
    /// order.
    pub tuples: Vec<Vec<usize>>,
    pub alpha_bar: Congruence,
    /// `etas[i]` is the kernel of the `i`-th projection.
    pub etas: Vec<Congruence>,
}

/// The subalgebra of `A^n` on tuples whose entries are pairwise
/// alpha-related.
pub fn construct_a_alpha_n(
    a: &FiniteAlgebra,
    alpha: &Congruence,
    n: usize,
) -> Result<PowerAlgebra, UaError> {
    let size = a.size();
    let cap = FiniteAlgebra::power_cap();
    if n == 0 {
        return Err(UaError::PreconditionFailed("n must be positive".into()));
    }
    if alpha.base_size() != size {
        return Err(UaError::PreconditionFailed(
            "alpha is not a partition of the universe".into(),
        ));
    }
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    for block in alpha.blocks() {
        let count = block.len().checked_pow(n as u32).unwrap_or(usize::MAX);
        if count > cap || tuples.len() + count > cap {
            return Err(UaError::SizeLimit {
                size: tuples.len().saturating_add(count),
                cap,
            });
        }
        for mut code in 0..count {
            let mut t = vec![0; n];
            for slot in t.iter_mut().rev() {
                *slot = block[code % block.len()];
                code /= block.len();
            }
            tuples.push(t);
        }
    }
    tuples.sort();
    let index: HashMap<&[usize], usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();
    let m = tuples.len();
    let mut ops = Vec::new();
    for op in a.ops() {
        let mut column = vec![0; op.arity];
        let mut image = vec![0; n];
        let table = Operation::from_fn(&op.name, op.arity, m, |args| {
            for (c, slot) in image.iter_mut().enumerate() {
                for (j, &arg) in args.iter().enumerate() {
                    column[j] = tuples[arg][c];
                }
                *slot = op.apply(size, &column);
            }
            index[image.as_slice()]
        });
        ops.push(table);
    }
    let algebra = FiniteAlgebra::with_cap(m, ops, cap)?;
    let alpha_bar = Partition::from_labels(
        &tuples
            .iter()
            .map(|t| alpha.rep()[t[0]] as usize)
            .collect::<Vec<_>>(),
    );
    let etas = (0..n)
        .map(|i| Partition::from_labels(&tuples.iter().map(|t| t[i]).collect::<Vec<_>>()))
        .collect();
    Ok(PowerAlgebra {
        algebra,
        tuples,
        alpha_bar,
        etas,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: Option<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub power: PowerAlgebra,
    pub delta: Congruence,
    pub abelian: bool,
    /// `delta \/ eta_i = alpha-bar` and `delta /\ eta_i = 0` for both `i`.
    pub checks: Vec<CheckOutcome>,
}

/// `Delta` on `A^2(alpha)`: the congruence generated by all
/// `((a, a), (b, b))` with `a alpha b`.
pub fn construct_delta(a: &FiniteAlgebra, alpha: &Congruence) -> Result<DeltaReport, UaError> {
    let power = construct_a_alpha_n(a, alpha, 2)?;
    let idx = |x: usize, y: usize| {
        power
            .tuples
            .binary_search(&vec![x, y])
            .expect("diagonal tuple")
    };
    let n = a.size();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| alpha.related(x, y))
        .map(|(x, y)| (idx(x, x), idx(y, y)))
        .collect();
    let delta = generated_congruence(&power.algebra, pairs);
    let bottom = Partition::discrete(power.tuples.len());
    let mut checks = Vec::new();
    for (i, eta) in power.etas.iter().enumerate() {
        checks.push(CheckOutcome::new(
            &format!("delta join eta_{i} = alpha_bar"),
            delta.join(eta) == power.alpha_bar,
            None,
        ));
        checks.push(CheckOutcome::new(
            &format!("delta meet eta_{i} = 0"),
            delta.meet(eta) == bottom,
            None,
        ));
    }
    let abelian = abelian_interval(a, &Partition::discrete(n), alpha);
    Ok(DeltaReport {
        power,
        delta,
        abelian,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub n: usize,
    pub universe_size: usize,
    pub con_size: usize,
    pub interval_size: usize,
    pub checks: Vec<CheckOutcome>,
    /// `L_n` with elements labelled by their partitions.
    #[serde(skip)]
    pub interval: FiniteLattice,
}

impl EmbeddingReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Builds `Con(A^n(alpha))`, cuts out `L_n = I[0, alpha-bar]` and checks the
/// structure the construction promises.
pub fn verify_embedding_construction(
    a: &FiniteAlgebra,
    alpha: &Congruence,
    n: usize,
) -> Result<EmbeddingReport, UaError> {
    if !abelian_interval(a, &Partition::discrete(a.size()), alpha) {
        return Err(UaError::PreconditionFailed("alpha is not abelian".into()));
    }
    let power = construct_a_alpha_n(a, alpha, n)?;
    let con = con_lattice(&power.algebra)?;
    let find = |p: &Partition| {
        con.index_of(p)
            .ok_or_else(|| UaError::NotACongruence(format!("{p}")))
    };
    let top = find(&power.alpha_bar)?;
    let etas = power.etas.iter().map(find).collect::<Result<Vec<_>, _>>()?;
    let whole = con.lattice();
    let bottom = whole.bottom();
    let (ln, map) = whole.interval(bottom, top)?;
    let local = |x: usize| map.binary_search(&x).expect("eta lies below alpha_bar");
    let local_etas: Vec<usize> = etas.iter().map(|&e| local(e)).collect();

    let mut checks = Vec::new();
    let modular = ln.modularity_counterexample();
    checks.push(CheckOutcome::new(
        "modular",
        modular.is_none(),
        modular.map(|t| format!("{t:?}")),
    ));
    checks.push(CheckOutcome::new(
        "length n",
        ln.length() == n,
        Some(format!("length {}", ln.length())),
    ));
    checks.push(CheckOutcome::new(
        "complemented",
        ln.is_complemented(),
        None,
    ));
    let eta_meet = ln.meet_all(local_etas.iter().copied());
    checks.push(CheckOutcome::new(
        "eta meet is bottom",
        eta_meet == ln.bottom(),
        None,
    ));
    let coatoms = ln.coatoms();
    let eta_coatoms = local_etas.iter().all(|e| coatoms.contains(e));
    checks.push(CheckOutcome::new("etas are coatoms", eta_coatoms, None));
    let coatom_meet = ln.meet_all(coatoms.iter().copied());
    checks.push(CheckOutcome::new(
        "coatom meet is bottom",
        coatom_meet == ln.bottom(),
        None,
    ));
    let mut missing = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (ei, ej) = (local_etas[i], local_etas[j]);
            let lo = ln.meet(ei, ej);
            let hi = ln.top();
            let common = (0..ln.size()).any(|x| {
                ln.leq(lo, x)
                    && ln.meet(x, ei) == lo
                    && ln.join(x, ei) == hi
                    && ln.meet(x, ej) == lo
                    && ln.join(x, ej) == hi
            });
            if !common {
                missing.push((i, j));
            }
        }
    }
    let detail = (!missing.is_empty()).then(|| format!("no common complement for {missing:?}"));
    checks.push(CheckOutcome::new(
        "common complements",
        missing.is_empty(),
        detail,
    ));

    Ok(EmbeddingReport {
        n,
        universe_size: power.tuples.len(),
        con_size: whole.size(),
        interval_size: ln.size(),
        checks,
        interval: ln,
    })
}
