//! Order complexes, their simplicial chain complexes, and the chain maps
//! induced by edge contractions together with their kernels and cokernels.
//!
//! Simplices are chains `x_0 < … < x_n` stored in increasing poset order.
//! Because the quotient order of a contraction extends the image of the source
//! order, a nondegenerate image of a simplex is again increasing and carries
//! sign `+1`; degenerate images map to zero.

use std::collections::HashMap;
use std::sync::Arc;

use crate::contraction::{ContractionTrace, EdgeContraction};
use crate::error::{Error, Result};
use crate::matrix::{integer_kernel, IntegerMatrix};
use crate::poset::FinitePoset;

pub type Simplex = Vec<usize>;

/// Default cap on the total number of simplices of an order complex.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 2_000_000;

/// The simplicial complex of all chains of a finite poset.
#[derive(Clone, Debug)]
pub struct OrderComplex {
    space: Arc<FinitePoset>,
    /// `simplices[r]` lists the `r`-simplices in lexicographic order.
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

pub fn order_complex(space: &Arc<FinitePoset>) -> Result<OrderComplex> {
    OrderComplex::with_budget(space, DEFAULT_SIMPLEX_BUDGET)
}

impl OrderComplex {
    pub fn with_budget(space: &Arc<FinitePoset>, budget: usize) -> Result<Self> {
        if space.is_empty() {
            return Err(Error::EmptySpace);
        }
        let n = space.len();
        let above: Vec<Vec<usize>> = (0..n)
            .map(|x| (0..n).filter(|&y| space.lt(x, y)).collect())
            .collect();
        let mut simplices: Vec<Vec<Simplex>> = Vec::new();
        let mut count = 0usize;
        let mut stack: Vec<Simplex> = (0..n).rev().map(|x| vec![x]).collect();
        while let Some(s) = stack.pop() {
            count += 1;
            if count > budget {
                return Err(Error::SimplexBudgetExceeded { budget });
            }
            let last = *s.last().expect("nonempty simplex");
            for &y in above[last].iter().rev() {
                let mut t = s.clone();
                t.push(y);
                stack.push(t);
            }
            let r = s.len() - 1;
            if simplices.len() <= r {
                simplices.resize(r + 1, Vec::new());
            }
            simplices[r].push(s);
        }
        for level in &mut simplices {
            level.sort_unstable();
        }
        let index = simplices
            .iter()
            .map(|level| {
                level
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();
        Ok(Self {
            space: space.clone(),
            simplices,
            index,
        })
    }

    pub fn space(&self) -> &Arc<FinitePoset> {
        &self.space
    }

    /// Number of degrees, i.e. top dimension plus one.
    pub fn degrees(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self, r: usize) -> &[Simplex] {
        self.simplices.get(r).map_or(&[], Vec::as_slice)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn position(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.position(s).is_some()
    }

    pub fn simplex_label(&self, s: &[usize]) -> String {
        simplex_label(&self.space, s)
    }

    /// Boundary matrix `∂_r: C_r → C_{r-1}` with the alternating-sum signs.
    pub fn boundary(&self, r: usize) -> IntegerMatrix {
        if r == 0 || r >= self.degrees() {
            let rows = if r == 0 { 0 } else { self.simplices(r - 1).len() };
            return IntegerMatrix::zeros(rows, self.simplices(r).len());
        }
        let columns = self.simplices[r]
            .iter()
            .map(|s| {
                let mut col: Vec<(usize, i64)> = (0..s.len())
                    .map(|i| {
                        let mut face = s.clone();
                        face.remove(i);
                        let row = self.index[r - 1][&face];
                        (row, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        IntegerMatrix::from_columns(self.simplices[r - 1].len(), columns)
            .expect("boundary entries are ±1")
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let labels = self
            .simplices
            .iter()
            .map(|level| level.iter().map(|s| self.simplex_label(s)).collect())
            .collect();
        let boundaries = (0..self.degrees()).map(|r| self.boundary(r)).collect();
        ChainComplex { labels, boundaries }
    }
}

pub fn simplex_label(space: &FinitePoset, s: &[usize]) -> String {
    let names: Vec<&str> = s.iter().map(|&x| space.label(x)).collect();
    format!("({})", names.join("<"))
}

/// A bounded chain complex of free abelian groups with chosen bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    labels: Vec<Vec<String>>,
    /// `boundaries[r]` is `∂_r`, a `dim(r-1) × dim(r)` matrix (`∂_0` has no rows).
    boundaries: Vec<IntegerMatrix>,
}

impl ChainComplex {
    /// Builds a complex from basis labels and boundary matrices `∂_0, ∂_1, …`.
    pub fn new(labels: Vec<Vec<String>>, boundaries: Vec<IntegerMatrix>) -> Result<Self> {
        let err = |msg: String| Err(Error::DomainMismatch(msg));
        if labels.len() != boundaries.len() {
            return err("one boundary matrix per degree is required".into());
        }
        for (r, d) in boundaries.iter().enumerate() {
            let rows = if r == 0 { 0 } else { labels[r - 1].len() };
            if d.cols() != labels[r].len() || d.rows() != rows {
                return err(format!(
                    "boundary in degree {r} is {}×{}, expected {rows}×{}",
                    d.rows(),
                    d.cols(),
                    labels[r].len()
                ));
            }
        }
        Ok(Self { labels, boundaries })
    }

    /// Unlabelled complex from matrices; basis sizes are read off the columns.
    pub fn from_boundaries(boundaries: Vec<IntegerMatrix>) -> Result<Self> {
        let labels = boundaries
            .iter()
            .enumerate()
            .map(|(r, d)| (0..d.cols()).map(|i| format!("e{r}_{i}")).collect())
            .collect();
        Self::new(labels, boundaries)
    }

    pub fn zero() -> Self {
        Self {
            labels: Vec::new(),
            boundaries: Vec::new(),
        }
    }

    pub fn degrees(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self, r: usize) -> usize {
        self.labels.get(r).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, r: usize) -> &[String] {
        self.labels.get(r).map_or(&[], Vec::as_slice)
    }

    /// `∂_r`; zero matrices outside the stored range.
    pub fn boundary(&self, r: usize) -> IntegerMatrix {
        match self.boundaries.get(r) {
            Some(d) => d.clone(),
            None => {
                let rows = if r == 0 { 0 } else { self.dim(r - 1) };
                IntegerMatrix::zeros(rows, self.dim(r))
            }
        }
    }

    pub fn boundary_ref(&self, r: usize) -> Option<&IntegerMatrix> {
        self.boundaries.get(r)
    }

    pub fn is_zero(&self) -> bool {
        self.labels.iter().all(Vec::is_empty)
    }

    /// `∂_r ∘ ∂_{r+1} = 0` in every degree.
    pub fn boundary_squares_to_zero(&self) -> Result<bool> {
        for r in 1..self.degrees() {
            if r + 1 < self.degrees() && !self.boundaries[r].mul(&self.boundaries[r + 1])?.is_zero()
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Chain map between order complexes induced by a point map.
#[derive(Clone, Debug)]
pub struct InducedChainMap {
    /// `maps[r]`: `target dim(r) × source dim(r)`.
    maps: Vec<IntegerMatrix>,
}

impl InducedChainMap {
    pub fn from_point_map(source: &OrderComplex, target: &OrderComplex, img: &[usize]) -> Self {
        let degrees = source.degrees().max(target.degrees());
        let maps = (0..degrees)
            .map(|r| {
                let columns = source
                    .simplices(r)
                    .iter()
                    .map(|s| match image_simplex(s, img) {
                        Some(t) => {
                            let row = target
                                .position(&t)
                                .expect("image of a chain is a chain of the quotient");
                            vec![(row, 1)]
                        }
                        None => Vec::new(),
                    })
                    .collect();
                IntegerMatrix::from_columns(target.simplices(r).len(), columns)
                    .expect("entries are 0 or 1")
            })
            .collect();
        Self { maps }
    }

    pub fn degrees(&self) -> usize {
        self.maps.len()
    }

    pub fn matrix(&self, r: usize) -> &IntegerMatrix {
        &self.maps[r]
    }

    /// `∂ ∘ F = F ∘ ∂` in every degree.
    pub fn commutes(&self, source: &ChainComplex, target: &ChainComplex) -> Result<bool> {
        for r in 1..self.maps.len() {
            let lhs = target.boundary(r).mul(&self.maps[r])?;
            let rhs = self.maps[r - 1].mul(&source.boundary(r))?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Image of a simplex under a point map, or `None` if degenerate.
pub fn image_simplex(s: &[usize], img: &[usize]) -> Option<Simplex> {
    let t: Simplex = s.iter().map(|&x| img[x]).collect();
    t.windows(2).all(|w| w[0] != w[1]).then_some(t)
}

/// Decides whether simplices of a target complex are images of chains of the
/// source, by backtracking over fiber preimages.
pub struct Lifter<'a> {
    source: &'a FinitePoset,
    fibers: Vec<Vec<usize>>,
}

impl<'a> Lifter<'a> {
    pub fn new(source: &'a FinitePoset, img: &[usize], target_size: usize) -> Self {
        let mut fibers = vec![Vec::new(); target_size];
        for (x, &y) in img.iter().enumerate() {
            fibers[y].push(x);
        }
        Self { source, fibers }
    }

    /// A strictly increasing chain of the source lifting `sigma`, if any.
    pub fn lift(&self, sigma: &[usize]) -> Option<Simplex> {
        let mut chosen = Vec::with_capacity(sigma.len());
        self.extend(sigma, &mut chosen).then_some(chosen)
    }

    pub fn lifts(&self, sigma: &[usize]) -> bool {
        self.lift(sigma).is_some()
    }

    fn extend(&self, sigma: &[usize], chosen: &mut Vec<usize>) -> bool {
        let Some(&y) = sigma.get(chosen.len()) else {
            return true;
        };
        for &x in &self.fibers[y] {
            if chosen.last().is_none_or(|&p| self.source.lt(p, x)) {
                chosen.push(x);
                if self.extend(sigma, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
}

/// Quotient of a target complex by the image of a chain map, in the basis of
/// target simplices that do not lift.
#[derive(Clone, Debug)]
pub struct CokernelComplex {
    pub basis: Vec<Vec<Simplex>>,
    pub complex: ChainComplex,
}

impl CokernelComplex {
    pub fn build(target: &OrderComplex, lifter: &Lifter<'_>) -> Self {
        let degrees = target.degrees();
        let mut keep: Vec<Vec<usize>> = Vec::with_capacity(degrees);
        let mut basis = Vec::with_capacity(degrees);
        for r in 0..degrees {
            let idx: Vec<usize> = (0..target.simplices(r).len())
                .filter(|&i| !lifter.lifts(&target.simplices(r)[i]))
                .collect();
            basis.push(idx.iter().map(|&i| target.simplices(r)[i].clone()).collect());
            keep.push(idx);
        }
        let labels: Vec<Vec<String>> = basis
            .iter()
            .map(|lvl: &Vec<Simplex>| lvl.iter().map(|s| target.simplex_label(s)).collect())
            .collect();
        let boundaries = (0..degrees)
            .map(|r| {
                let rows: &[usize] = if r == 0 { &[] } else { &keep[r - 1] };
                target.boundary(r).submatrix(rows, &keep[r])
            })
            .collect();
        Self {
            basis,
            complex: ChainComplex { labels, boundaries },
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.complex.dims()
    }
}

/// Kernel of an induced chain map, with bases given as integer combinations
/// of source simplices.
#[derive(Clone, Debug)]
pub struct KernelComplex {
    /// `basis[r][k]` is a coefficient vector over the source `r`-simplices.
    pub basis: Vec<Vec<Vec<i64>>>,
    /// Rank of the induced map in each degree.
    pub map_ranks: Vec<usize>,
    pub complex: ChainComplex,
}

impl KernelComplex {
    pub fn build(source: &OrderComplex, map: &InducedChainMap) -> Result<Self> {
        let degrees = source.degrees();
        let kernels = (0..degrees)
            .map(|r| integer_kernel(map.matrix(r)))
            .collect::<Result<Vec<_>>>()?;
        let mut boundaries = Vec::with_capacity(degrees);
        for r in 0..degrees {
            let rows = if r == 0 { 0 } else { kernels[r - 1].basis.len() };
            if r == 0 {
                boundaries.push(IntegerMatrix::zeros(0, kernels[0].basis.len()));
                continue;
            }
            let d = source.boundary(r);
            let mut columns = Vec::with_capacity(kernels[r].basis.len());
            for k in &kernels[r].basis {
                let image = d.mul_vec(k)?;
                let coords = kernels[r - 1]
                    .coordinates(&image)?
                    .expect("boundary of a kernel chain lies in the kernel");
                columns.push(
                    coords
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, c)| c != 0)
                        .collect(),
                );
            }
            boundaries.push(IntegerMatrix::from_columns(rows, columns)?);
        }
        let labels = kernels
            .iter()
            .enumerate()
            .map(|(r, k)| {
                k.basis
                    .iter()
                    .map(|v| combination_label(source, r, v))
                    .collect()
            })
            .collect();
        Ok(Self {
            map_ranks: kernels.iter().map(|k| k.rank).collect(),
            basis: kernels.into_iter().map(|k| k.basis).collect(),
            complex: ChainComplex { labels, boundaries },
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.complex.dims()
    }
}

fn combination_label(oc: &OrderComplex, r: usize, v: &[i64]) -> String {
    let terms: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 0)
        .map(|(i, &c)| {
            let s = oc.simplex_label(&oc.simplices(r)[i]);
            match c {
                1 => s,
                -1 => format!("-{s}"),
                _ => format!("{c}{s}"),
            }
        })
        .collect();
    terms.join("+").replace("+-", "-")
}

/// Order and chain complexes for every space along a contraction trace.
pub struct TraceChains<'t> {
    trace: &'t ContractionTrace,
    complexes: Vec<OrderComplex>,
    chains: Vec<ChainComplex>,
    prefix_images: Vec<Vec<usize>>,
}

impl<'t> TraceChains<'t> {
    pub fn new(trace: &'t ContractionTrace) -> Result<Self> {
        Self::with_budget(trace, DEFAULT_SIMPLEX_BUDGET)
    }

    pub fn with_budget(trace: &'t ContractionTrace, budget: usize) -> Result<Self> {
        let complexes = (0..=trace.len())
            .map(|i| OrderComplex::with_budget(trace.space(i), budget))
            .collect::<Result<Vec<_>>>()?;
        let chains = complexes.iter().map(OrderComplex::chain_complex).collect();
        let prefix_images = (0..=trace.len())
            .map(|i| trace.prefix_map(i).images().to_vec())
            .collect();
        Ok(Self {
            trace,
            complexes,
            chains,
            prefix_images,
        })
    }

    pub fn trace(&self) -> &ContractionTrace {
        self.trace
    }

    pub fn order_complex(&self, i: usize) -> &OrderComplex {
        &self.complexes[i]
    }

    pub fn chain_complex(&self, i: usize) -> &ChainComplex {
        &self.chains[i]
    }

    /// `κ_{1…i*}: 𝒦(X) → 𝒦(X_{e_1…e_i})`.
    pub fn induced_map(&self, i: usize) -> InducedChainMap {
        InducedChainMap::from_point_map(&self.complexes[0], &self.complexes[i], &self.prefix_images[i])
    }

    /// `κ_{i*}: 𝒦(X_{e_1…e_{i-1}}) → 𝒦(X_{e_1…e_i})`.
    pub fn step_map(&self, i: usize) -> InducedChainMap {
        let step = &self.trace.steps()[i - 1];
        InducedChainMap::from_point_map(
            &self.complexes[i - 1],
            &self.complexes[i],
            step.kappa().images(),
        )
    }

    fn prefix_lifter(&self, i: usize) -> Lifter<'_> {
        Lifter::new(self.trace.start(), &self.prefix_images[i], self.trace.space(i).len())
    }

    /// Whether `sigma`, a simplex of `X_{e_1…e_i}`, lies in `κ_{1…i}(𝒦(X))`.
    pub fn image_membership(&self, sigma: &[usize], i: usize) -> bool {
        self.prefix_lifter(i).lifts(sigma)
    }

    /// `𝒦_{e_1…e_i}`.
    pub fn cokernel(&self, i: usize) -> CokernelComplex {
        CokernelComplex::build(&self.complexes[i], &self.prefix_lifter(i))
    }

    /// `𝒦_{e_i}`, the cokernel of the single step `κ_i`.
    pub fn step_cokernel(&self, i: usize) -> CokernelComplex {
        let step = &self.trace.steps()[i - 1];
        let lifter = Lifter::new(step.source(), step.kappa().images(), step.result().len());
        CokernelComplex::build(&self.complexes[i], &lifter)
    }

    /// `𝒞_{e_1…e_i}`, the kernel of `κ_{1…i*}`.
    pub fn kernel(&self, i: usize) -> Result<KernelComplex> {
        KernelComplex::build(&self.complexes[0], &self.induced_map(i))
    }
}

pub fn induced_map(trace: &ContractionTrace, i: usize) -> Result<InducedChainMap> {
    Ok(TraceChains::new(trace)?.induced_map(i))
}

pub fn image_membership(sigma: &[usize], trace: &ContractionTrace, i: usize) -> bool {
    let img = trace.prefix_map(i);
    Lifter::new(trace.start(), img.images(), trace.space(i).len()).lifts(sigma)
}

pub fn cokernel_complex(trace: &ContractionTrace, i: usize) -> Result<CokernelComplex> {
    let oc = order_complex(trace.space(i))?;
    let img = trace.prefix_map(i);
    let lifter = Lifter::new(trace.start(), img.images(), trace.space(i).len());
    Ok(CokernelComplex::build(&oc, &lifter))
}

pub fn kernel_complex(trace: &ContractionTrace, i: usize) -> Result<KernelComplex> {
    TraceChains::new(trace)?.kernel(i)
}

/// `𝒦_e` for a single contraction.
pub fn contraction_cokernel(ec: &EdgeContraction) -> Result<CokernelComplex> {
    let oc = order_complex(ec.result())?;
    let lifter = Lifter::new(ec.source(), ec.kappa().images(), ec.result().len());
    Ok(CokernelComplex::build(&oc, &lifter))
}
