//! The pinned fixture corpus, compiled into the crate.
//!
//! The same files live under `fixtures/` in this crate so the CLI can load
//! an edited copy from disk.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::lattice::{FiniteLattice, LatticeHom, LatticeJson};
use crate::ua::FiniteAlgebra;

macro_rules! embed {
    ($dir:literal, $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $dir, "/", $name, ".json")))),*]
    };
}

pub const LATTICES: &[(&str, &str)] = embed!(
    "lattices",
    "m3",
    "n5",
    "m3x2",
    "pi3",
    "pi4",
    "pi5",
    "sub_2_2",
    "sub_3_2",
    "sub_2_3",
    "figure2_left",
    "figure2_right",
);

pub const ALGEBRAS: &[(&str, &str)] = embed!(
    "algebras",
    "z2",
    "z3",
    "z4",
    "z2z2",
    "s3",
    "semilattice2",
    "majority3"
);

pub const PROJECTIVITY_FAILURE: &str = include_str!("../fixtures/projectivity_failure.json");

/// A lattice, a homomorphism onto `M3` and preimages of its three atoms on
/// which the witness pipeline breaks down.
#[derive(Debug, Clone, Deserialize)]
pub struct ProjectivityFailure {
    pub lattice: LatticeJson,
    pub hom: Vec<usize>,
    pub preimages: [usize; 3],
}

/// Every fixture, parsed.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub lattices: BTreeMap<String, FiniteLattice>,
    pub algebras: BTreeMap<String, FiniteAlgebra>,
    pub failure: ProjectivityFailure,
    pub failure_lattice: FiniteLattice,
}

impl Corpus {
    pub fn embedded() -> Self {
        let lattices = LATTICES.iter().map(|(n, t)| (n.to_string(), t.to_string()));
        let algebras = ALGEBRAS.iter().map(|(n, t)| (n.to_string(), t.to_string()));
        Self::parse(lattices, algebras, PROJECTIVITY_FAILURE).expect("embedded fixtures are valid")
    }

    /// Reads `lattices/*.json`, `algebras/*.json` and
    /// `projectivity_failure.json` below `dir`. Every embedded name must be
    /// present.
    pub fn load(dir: &Path) -> Result<Self, crate::Error> {
        let read = |sub: &str, name: &str| -> Result<(String, String), crate::Error> {
            let path = dir.join(sub).join(format!("{name}.json"));
            std::fs::read_to_string(&path)
                .map(|t| (name.to_string(), t))
                .map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))
        };
        let lattices = LATTICES
            .iter()
            .map(|(n, _)| read("lattices", n))
            .collect::<Result<Vec<_>, _>>()?;
        let algebras = ALGEBRAS
            .iter()
            .map(|(n, _)| read("algebras", n))
            .collect::<Result<Vec<_>, _>>()?;
        let (_, failure) = read("", "projectivity_failure")?;
        Self::parse(lattices, algebras, &failure)
    }

    fn parse(
        lattices: impl IntoIterator<Item = (String, String)>,
        algebras: impl IntoIterator<Item = (String, String)>,
        failure: &str,
    ) -> Result<Self, crate::Error> {
        let lattices = lattices
            .into_iter()
            .map(|(n, t)| Ok((n, FiniteLattice::from_json_str(&t)?)))
            .collect::<Result<_, crate::Error>>()?;
        let algebras = algebras
            .into_iter()
            .map(|(n, t)| Ok((n, FiniteAlgebra::from_json_str(&t)?)))
            .collect::<Result<_, crate::Error>>()?;
        let failure: ProjectivityFailure = serde_json::from_str(failure)?;
        let failure_lattice = failure.lattice.build()?;
        Ok(Self {
            lattices,
            algebras,
            failure,
            failure_lattice,
        })
    }

    pub fn lattice(&self, name: &str) -> &FiniteLattice {
        &self.lattices[name]
    }

    pub fn algebra(&self, name: &str) -> &FiniteAlgebra {
        &self.algebras[name]
    }

    /// The failure fixture's homomorphism into `target`, which must be `M3`.
    pub fn failure_hom<'a>(
        &'a self,
        target: &'a FiniteLattice,
    ) -> Result<LatticeHom<'a>, crate::Error> {
        Ok(LatticeHom::new(
            &self.failure_lattice,
            target,
            self.failure.hom.clone(),
        )?)
    }
}
