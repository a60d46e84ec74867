//! Finite algebras, their congruences and the term-condition commutator.

mod algebras;
mod commutator;
mod congruence;
mod power;
mod wdt;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cap::{DEFAULT_ALGEBRA_CAP, DEFAULT_POWER_CAP};
use crate::lattice::LatticeError;
use crate::partition::{Partition, PartitionError};

pub use algebras::{cyclic_group, group_product, majority3, s3, semilattice2};
pub use commutator::{
    abelian_interval, beta_gamma_iteration, centrality, centrality_witness, commutator,
    is_solvable_interval, matrices, solvable_series, BetaGamma,
};
pub use congruence::{
    con_lattice, generated_congruence, is_congruence, principal_congruence, ConLattice,
};
pub use power::{
    construct_a_alpha_n, construct_delta, verify_embedding_construction, CheckOutcome, DeltaReport,
    EmbeddingReport, PowerAlgebra,
};
pub use wdt::{check_weak_difference_term, TermExpr, WdtReport, WdtViolation};

/// The congruences of an algebra are partitions of its universe.
pub type Congruence = Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UaError {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("universe of size {size} exceeds the cap of {cap}")]
    SizeLimit { size: usize, cap: usize },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("partition is not compatible with operation `{0}`")]
    NotACongruence(String),
    #[error("commutator iteration did not converge")]
    NonConvergence,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    /// Row-major: the first argument is the most significant digit.
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraJson", into = "AlgebraJson")]
pub struct FiniteAlgebra {
    size: usize,
    ops: Vec<Operation>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    size: usize,
    ops: Vec<Operation>,
}

impl TryFrom<AlgebraJson> for FiniteAlgebra {
    type Error = UaError;
    fn try_from(j: AlgebraJson) -> Result<Self, UaError> {
        FiniteAlgebra::new(j.size, j.ops)
    }
}

impl From<FiniteAlgebra> for AlgebraJson {
    fn from(a: FiniteAlgebra) -> Self {
        AlgebraJson {
            size: a.size,
            ops: a.ops,
        }
    }
}

impl FiniteAlgebra {
    /// Validates tables and enforces the algebra size cap.
    pub fn new(size: usize, ops: Vec<Operation>) -> Result<Self, UaError> {
        if size > DEFAULT_ALGEBRA_CAP {
            return Err(UaError::SizeLimit {
                size,
                cap: DEFAULT_ALGEBRA_CAP,
            });
        }
        Self::with_cap(size, ops, DEFAULT_ALGEBRA_CAP)
    }

    pub(crate) fn with_cap(size: usize, ops: Vec<Operation>, cap: usize) -> Result<Self, UaError> {
        if size == 0 {
            return Err(UaError::InvalidAlgebra("empty universe".into()));
        }
        if size > cap {
            return Err(UaError::SizeLimit { size, cap });
        }
        let mut names = HashSet::new();
        for op in &ops {
            if !names.insert(op.name.as_str()) {
                return Err(UaError::InvalidAlgebra(format!(
                    "operation `{}` listed twice",
                    op.name
                )));
            }
            let expected = size.checked_pow(op.arity as u32).filter(|&e| e <= 1 << 26);
            if expected != Some(op.table.len()) {
                return Err(UaError::InvalidAlgebra(format!(
                    "operation `{}` of arity {} has {} table entries",
                    op.name,
                    op.arity,
                    op.table.len()
                )));
            }
            if let Some(v) = op.table.iter().find(|&&v| v >= size) {
                return Err(UaError::InvalidAlgebra(format!(
                    "operation `{}` produces {v}",
                    op.name
                )));
            }
        }
        Ok(Self { size, ops })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn from_json_str(s: &str) -> Result<Self, crate::Error> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("algebras serialize")
    }

    pub(crate) fn power_cap() -> usize {
        DEFAULT_POWER_CAP
    }
}

impl Operation {
    /// Builds the table of a `k`-ary operation from a function on argument
    /// slices.
    pub fn from_fn(
        name: &str,
        arity: usize,
        size: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Self {
        let total = size.pow(arity as u32);
        let mut args = vec![0; arity];
        let table = (0..total)
            .map(|mut code| {
                for i in (0..arity).rev() {
                    args[i] = code % size;
                    code /= size;
                }
                f(&args)
            })
            .collect();
        Operation {
            name: name.to_string(),
            arity,
            table,
        }
    }

    #[inline]
    pub fn apply(&self, size: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        let idx = args.iter().fold(0, |acc, &a| acc * size + a);
        self.table[idx]
    }
}
