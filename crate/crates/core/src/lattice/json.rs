use serde::{Deserialize, Serialize};

use super::{FiniteLattice, LatticeError};

/// On-disk lattice: the Hasse diagram plus optional labels. Tables are
/// always recomputed on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub size: usize,
    pub covers: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl LatticeJson {
    pub fn build(&self) -> Result<FiniteLattice, LatticeError> {
        let covers: Vec<(usize, usize)> = self.covers.iter().map(|&[a, b]| (a, b)).collect();
        let l = FiniteLattice::from_cover_relation(self.size, &covers)?;
        match &self.labels {
            Some(labels) => l.with_labels(labels.clone()),
            None => Ok(l),
        }
    }
}

impl From<&FiniteLattice> for LatticeJson {
    fn from(l: &FiniteLattice) -> Self {
        LatticeJson {
            size: l.size(),
            covers: l.covers().into_iter().map(|(a, b)| [a, b]).collect(),
            labels: l.labels().map(|s| s.to_vec()),
        }
    }
}

impl FiniteLattice {
    pub fn to_json(&self) -> LatticeJson {
        LatticeJson::from(self)
    }

    pub fn from_json_str(text: &str) -> Result<Self, crate::Error> {
        let raw: LatticeJson = serde_json::from_str(text)?;
        Ok(raw.build()?)
    }
}
