//! JSON forms of spaces, lattices and vectors.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{HermLattice, HermSpace};
use crate::efield::{Elem, FieldConfig, Matrix, Vector};
use crate::error::{Error, Result};
use crate::rational::parse_q;

/// An element as `["a_num/a_den", "b_num/b_den"]`.
pub type ElemJson = [String; 2];

pub fn elem_to_json(x: &Elem) -> ElemJson {
    x.to_strings()
}

pub fn elem_from_json(cfg: FieldConfig, x: &ElemJson) -> Result<Elem> {
    Ok(Elem::new(cfg, parse_q(&x[0])?, parse_q(&x[1])?))
}

pub fn vector_to_json(v: &[Elem]) -> Vec<ElemJson> {
    v.iter().map(elem_to_json).collect()
}

pub fn vector_from_json(cfg: FieldConfig, v: &[ElemJson]) -> Result<Vector> {
    v.iter().map(|x| elem_from_json(cfg, x)).collect()
}

fn matrix_from_json(cfg: FieldConfig, rows: &[Vec<ElemJson>]) -> Result<Matrix> {
    let rows = rows.iter().map(|r| vector_from_json(cfg, r)).collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(cfg, rows)
}

fn matrix_to_json(m: &Matrix) -> Vec<Vec<ElemJson>> {
    m.to_rows().iter().map(|r| vector_to_json(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub p: u64,
    pub eps0: i64,
    pub gram: Vec<Vec<ElemJson>>,
}

/// `{"space": {...}, "basis": [[elem, ...], ...]}` with n rows and m columns;
/// an omitted basis means the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub space: SpaceJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<ElemJson>>>,
}

impl SpaceJson {
    pub fn to_space(&self) -> Result<Arc<HermSpace>> {
        let cfg = FieldConfig::new(self.p, self.eps0)?;
        HermSpace::new(matrix_from_json(cfg, &self.gram)?)
    }

    pub fn from_space(space: &HermSpace) -> Self {
        let cfg = space.cfg();
        Self { p: cfg.p, eps0: cfg.eps0, gram: matrix_to_json(space.gram()) }
    }
}

impl LatticeJson {
    pub fn to_lattice(&self) -> Result<HermLattice> {
        let space = self.space.to_space()?;
        match &self.basis {
            None => Ok(HermLattice::standard(space)),
            Some(rows) => {
                let b = matrix_from_json(space.cfg(), rows)?;
                if b.rows() != space.dim() {
                    return Err(Error::Dimension(format!(
                        "basis has {} rows, space has dimension {}",
                        b.rows(),
                        space.dim()
                    )));
                }
                HermLattice::from_matrix(space, &b)
            }
        }
    }

    pub fn from_lattice(l: &HermLattice) -> Self {
        Self {
            space: SpaceJson::from_space(l.space()),
            basis: Some(matrix_to_json(&l.basis_matrix())),
        }
    }

    pub fn parse(s: &str) -> Result<HermLattice> {
        let j: LatticeJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        j.to_lattice()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = r#"{"space": {"p": 3, "eps0": 1,
            "gram": [[["1/1","0/1"],["0/1","0/1"]],[["0/1","0/1"],["3/1","0/1"]]]}}"#;
        let l = LatticeJson::parse(s).unwrap();
        assert_eq!(l.invariants().unwrap().a, vec![1, 3]);
        let back = serde_json::to_string(&LatticeJson::from_lattice(&l)).unwrap();
        assert_eq!(LatticeJson::parse(&back).unwrap(), l);
    }

    #[test]
    fn rejects_non_hermitian() {
        let s = r#"{"space": {"p": 3, "eps0": 1,
            "gram": [[["1","0"],["0","1"]],[["0","1"],["3","0"]]]}}"#;
        assert_eq!(LatticeJson::parse(s), Err(Error::NotHermitian));
    }
}
