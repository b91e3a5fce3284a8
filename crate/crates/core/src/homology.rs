//! Integral homology of chain complexes and of finite spaces.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chains::{contraction_cokernel, order_complex, ChainComplex};
use crate::contraction::EdgeContraction;
use crate::error::Result;
use crate::matrix::smith_normal_form;
use crate::poset::FinitePoset;

/// Unreduced integral homology: free ranks and torsion invariant factors per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<u64>>,
}

impl HomologyResult {
    /// `b_r`, zero beyond the stored degrees.
    pub fn betti_at(&self, r: usize) -> usize {
        self.betti.get(r).copied().unwrap_or(0)
    }

    pub fn torsion_at(&self, r: usize) -> &[u64] {
        self.torsion.get(r).map_or(&[], Vec::as_slice)
    }

    pub fn is_zero(&self) -> bool {
        self.betti.iter().all(|&b| b == 0) && self.torsion.iter().all(Vec::is_empty)
    }

    /// Largest degree with nonzero homology, if any.
    pub fn top_degree(&self) -> Option<usize> {
        (0..self.betti.len().max(self.torsion.len()))
            .rev()
            .find(|&r| self.betti_at(r) != 0 || !self.torsion_at(r).is_empty())
    }

    /// Betti numbers with trailing zeros dropped.
    pub fn trimmed_betti(&self) -> Vec<usize> {
        let mut b = self.betti.clone();
        while b.last() == Some(&0) {
            b.pop();
        }
        b
    }

    /// Homology of a point.
    pub fn is_point_like(&self) -> bool {
        self.trimmed_betti() == [1] && self.torsion.iter().all(Vec::is_empty)
    }
}

/// `b_r = dim C_r − rank ∂_r − rank ∂_{r+1}`; torsion in degree `r` is the
/// invariant factors of `∂_{r+1}` exceeding one.
pub fn homology(c: &ChainComplex) -> Result<HomologyResult> {
    let degrees = c.degrees();
    let mut ranks = Vec::with_capacity(degrees + 1);
    let mut torsion_by_source = Vec::with_capacity(degrees + 1);
    for r in 0..=degrees {
        match c.boundary_ref(r) {
            Some(d) if r > 0 => {
                let snf = smith_normal_form(d)?;
                ranks.push(snf.rank());
                torsion_by_source.push(snf.torsion());
            }
            _ => {
                ranks.push(0);
                torsion_by_source.push(Vec::new());
            }
        }
    }
    let betti = (0..degrees)
        .map(|r| c.dim(r) - ranks[r] - ranks[r + 1])
        .collect();
    let torsion = (0..degrees).map(|r| torsion_by_source[r + 1].clone()).collect();
    Ok(HomologyResult { betti, torsion })
}

/// Homology of a finite space via its order complex.
pub fn space_homology(space: &Arc<FinitePoset>) -> Result<HomologyResult> {
    homology(&order_complex(space)?.chain_complex())
}

/// All homology groups vanish, including degree zero.
pub fn is_acyclic(c: &ChainComplex) -> Result<bool> {
    Ok(homology(c)?.is_zero())
}

/// Largest `r` with `H_r(X) ≠ 0`.
pub fn homological_dimension(space: &Arc<FinitePoset>) -> Result<usize> {
    Ok(space_homology(space)?.top_degree().unwrap_or(0))
}

/// `κ_e` induces an isomorphism on homology iff `H_*(𝒦_e) = 0`.
pub fn is_quasi_iso_contraction(ec: &EdgeContraction) -> Result<bool> {
    is_acyclic(&contraction_cokernel(ec)?.complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::contract_edge;
    use crate::matrix::IntegerMatrix;

    fn circle() -> Arc<FinitePoset> {
        Arc::new(
            FinitePoset::build(
                &["a", "b", "c", "d"],
                &[("c", "a"), ("d", "a"), ("c", "b"), ("d", "b")],
            )
            .unwrap(),
        )
    }

    #[test]
    fn single_vertex() {
        let c = ChainComplex::from_boundaries(vec![IntegerMatrix::zeros(0, 1)]).unwrap();
        assert_eq!(homology(&c).unwrap().betti, vec![1]);
    }

    #[test]
    fn multiplication_by_two() {
        let c = ChainComplex::from_boundaries(vec![
            IntegerMatrix::zeros(0, 1),
            IntegerMatrix::from_rows(&[vec![2]]),
        ])
        .unwrap();
        let h = homology(&c).unwrap();
        assert_eq!(h.betti, vec![0, 0]);
        assert_eq!(h.torsion, vec![vec![2], vec![]]);
        assert!(!is_acyclic(&c).unwrap());
    }

    #[test]
    fn spaces() {
        assert_eq!(space_homology(&Arc::new(FinitePoset::chain(1))).unwrap().betti, vec![1]);
        let h = space_homology(&circle()).unwrap();
        assert_eq!(h.betti, vec![1, 1]);
        assert!(h.torsion.iter().all(Vec::is_empty));
        let ex = Arc::new(
            FinitePoset::build(&["a", "b", "s", "t"], &[("b", "a"), ("t", "a"), ("b", "s")])
                .unwrap(),
        );
        assert_eq!(space_homology(&ex).unwrap().trimmed_betti(), vec![1]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(homological_dimension(&Arc::new(FinitePoset::chain(1))).unwrap(), 0);
        assert_eq!(homological_dimension(&circle()).unwrap(), 1);
        assert_eq!(homological_dimension(&Arc::new(FinitePoset::chain(3))).unwrap(), 0);
    }

    #[test]
    fn zero_complex_is_acyclic() {
        assert!(is_acyclic(&ChainComplex::zero()).unwrap());
    }

    #[test]
    fn quasi_iso_contractions() {
        let two = Arc::new(FinitePoset::chain(2));
        assert!(is_quasi_iso_contraction(&contract_edge(&two, (1, 0)).unwrap()).unwrap());
        let c = circle();
        let ec = contract_edge(&c, (0, 2)).unwrap();
        assert!(!is_quasi_iso_contraction(&ec).unwrap());
        let h = homology(&contraction_cokernel(&ec).unwrap().complex).unwrap();
        assert_eq!(h.betti, vec![0, 0, 1]);
    }
}
