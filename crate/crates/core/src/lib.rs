//! Finite T0-spaces as posets, Hasse-edge contractions and the integral
//! homology bookkeeping of monotone maps between them.
//!
//! A monotone surjection `f: X → Y` factors as a sequence of Hasse-edge
//! contractions followed by a homeomorphism. Each contraction `κ_e` has an
//! acyclic kernel complex and a cokernel complex `𝒦_e`, and the Betti numbers
//! satisfy `b_r(X) = b_r(Y) + Σ_i b_{r+1}(𝒦_{e_i})`.
//!
//! ```
//! use std::sync::Arc;
//! use monohom::{contract_edge, contraction_cokernel, homology, space_homology, FinitePoset};
//!
//! let circle = Arc::new(
//!     FinitePoset::build(&["a", "b", "c", "d"], &[("c", "a"), ("d", "a"), ("c", "b"), ("d", "b")])
//!         .unwrap(),
//! );
//! assert_eq!(space_homology(&circle).unwrap().betti, vec![1, 1]);
//! let ec = contract_edge(&circle, (0, 2)).unwrap();
//! let k = homology(&contraction_cokernel(&ec).unwrap().complex).unwrap();
//! assert_eq!(k.betti, vec![0, 0, 1]);
//! ```

pub mod chains;
pub mod cli;
pub mod contraction;
pub mod enumerate;
pub mod error;
pub mod homology;
pub mod io;
pub mod map;
pub mod matrix;
pub mod poset;
pub mod verify;

pub use chains::{
    cokernel_complex, contraction_cokernel, image_membership, induced_map, kernel_complex,
    order_complex, ChainComplex, CokernelComplex, InducedChainMap, KernelComplex, OrderComplex,
    Simplex, TraceChains,
};
pub use contraction::{
    beat_edge_whe, contract_edge, decompose, decompose_with, edge_subspace, factorize,
    is_g_minimal, is_minimal, star, whe_criterion, ContractionTrace, EdgeContraction, EdgeOrder,
    Factorization, WheCriterion,
};
pub use error::{Error, Result};
pub use homology::{
    homological_dimension, homology, is_acyclic, is_quasi_iso_contraction, space_homology,
    HomologyResult,
};
pub use map::{MonotoneViolation, PointMap};
pub use matrix::{integer_kernel, smith_normal_form, IntegerMatrix, SmithForm};
pub use poset::{CoreReduction, ElementSet, FinitePoset};
pub use verify::{
    betti_decomposition, betti_report, factorization_report, random_trace_suite, sweep,
    verify_trace, BettiReport, CheckEntry, CheckLedger, SweepCheck, SweepConfig, SweepSummary,
};
