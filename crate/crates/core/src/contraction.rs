//! Hasse-edge contractions and the decomposition of surjective monotone maps.
//!
//! An edge `e = (a, b)` always means `a` covers `b`. Contracting it identifies
//! the two endpoints; the quotient order is
//! `[x] <= [y]  iff  x <= y  or  (x <= a and b <= y)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::is_quasi_iso_contraction;
use crate::map::{MonotoneViolation, PointMap};
use crate::poset::{ElementSet, FinitePoset};

/// A single contraction `κ_e: X → X_e`.
#[derive(Clone, Debug)]
pub struct EdgeContraction {
    source: Arc<FinitePoset>,
    edge: (usize, usize),
    result: Arc<FinitePoset>,
    kappa: PointMap,
    merged: usize,
}

impl EdgeContraction {
    pub fn source(&self) -> &Arc<FinitePoset> {
        &self.source
    }

    /// `(a, b)` with `a` covering `b`, as indices into the source.
    pub fn edge(&self) -> (usize, usize) {
        self.edge
    }

    pub fn edge_labels(&self) -> (String, String) {
        let (a, b) = self.edge;
        (
            self.source.label(a).to_string(),
            self.source.label(b).to_string(),
        )
    }

    pub fn result(&self) -> &Arc<FinitePoset> {
        &self.result
    }

    pub fn kappa(&self) -> &PointMap {
        &self.kappa
    }

    /// Index of the merged point in the result.
    pub fn merged(&self) -> usize {
        self.merged
    }
}

/// Contracts the Hasse edge `(a, b)` of `space`.
///
/// Elements keep their relative order; `b` disappears and `a`'s slot holds the
/// merged point, labelled `"{a}+{b}"`.
pub fn contract_edge(space: &Arc<FinitePoset>, edge: (usize, usize)) -> Result<EdgeContraction> {
    let (a, b) = edge;
    space.check_index(a)?;
    space.check_index(b)?;
    if !space.is_cover(a, b) {
        return Err(Error::NotAHasseEdge(
            space.label(a).to_string(),
            space.label(b).to_string(),
        ));
    }
    let n = space.len();
    let shift = |x: usize| if x > b { x - 1 } else { x };
    let img: Vec<usize> = (0..n).map(|x| shift(if x == b { a } else { x })).collect();
    let merged = shift(a);

    let m = n - 1;
    let reps = |u: usize| -> Vec<usize> {
        if u == merged {
            vec![a, b]
        } else {
            vec![if u >= b { u + 1 } else { u }]
        }
    };
    let mut leq = vec![false; m * m];
    for u in 0..m {
        for v in 0..m {
            leq[u * m + v] = reps(u).iter().any(|&x| {
                reps(v)
                    .iter()
                    .any(|&y| space.leq(x, y) || (space.leq(x, a) && space.leq(b, y)))
            });
        }
    }

    let mut labels: Vec<String> = (0..n)
        .filter(|&x| x != b)
        .map(|x| space.label(x).to_string())
        .collect();
    let mut merged_label = format!("{}+{}", space.label(a), space.label(b));
    while labels.contains(&merged_label) {
        merged_label.push('\'');
    }
    labels[merged] = merged_label;

    let result = FinitePoset::from_leq_table(labels, leq)
        .expect("quotient by a Hasse edge is a partial order");
    let result = Arc::new(result);
    let kappa = PointMap::new(space.clone(), result.clone(), img)?;
    Ok(EdgeContraction {
        source: space.clone(),
        edge,
        result,
        kappa,
        merged,
    })
}

/// Elements `x` with `x <= b` or `a <= x`, for the edge `(a, b)`.
pub fn edge_subspace_elements(space: &FinitePoset, edge: (usize, usize)) -> Result<ElementSet> {
    let (a, b) = edge;
    if a >= space.len() || b >= space.len() || !space.is_cover(a, b) {
        return Err(not_an_edge(space, edge));
    }
    Ok((0..space.len())
        .filter(|&x| space.leq(x, b) || space.leq(a, x))
        .collect())
}

/// The subspace `X(e)` on [`edge_subspace_elements`].
pub fn edge_subspace(space: &FinitePoset, edge: (usize, usize)) -> Result<FinitePoset> {
    let elems: Vec<usize> = edge_subspace_elements(space, edge)?.into_iter().collect();
    Ok(space.induced(&elems))
}

/// `U_x ∪ F_x`.
pub fn star(space: &FinitePoset, x: usize) -> ElementSet {
    let mut s = space.min_open(x);
    s.extend(space.closure_of(x));
    s
}

fn not_an_edge(space: &FinitePoset, (a, b): (usize, usize)) -> Error {
    let name = |x: usize| {
        if x < space.len() {
            space.label(x).to_string()
        } else {
            format!("#{x}")
        }
    };
    Error::NotAHasseEdge(name(a), name(b))
}

/// A chain of edge contractions followed by a bijection onto the target.
#[derive(Clone, Debug)]
pub struct ContractionTrace {
    start: Arc<FinitePoset>,
    steps: Vec<EdgeContraction>,
    final_map: PointMap,
    target: Arc<FinitePoset>,
}

impl ContractionTrace {
    /// Contracts `edges` in sequence; each pair indexes the space produced by
    /// the previous contraction. The final map is the identity.
    pub fn from_edges(start: Arc<FinitePoset>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut steps: Vec<EdgeContraction> = Vec::with_capacity(edges.len());
        for &e in edges {
            let current = steps.last().map_or(&start, |s| &s.result);
            steps.push(contract_edge(current, e)?);
        }
        let end = steps.last().map_or(&start, |s| &s.result).clone();
        Ok(Self {
            start,
            steps,
            final_map: PointMap::identity(end.clone()),
            target: end,
        })
    }

    /// Like [`Self::from_edges`], with edges named by labels of the current space.
    pub fn from_edge_labels<S: AsRef<str>>(start: Arc<FinitePoset>, edges: &[(S, S)]) -> Result<Self> {
        let mut trace = Self::from_edges(start, &[])?;
        for (a, b) in edges {
            let current = trace.end_space();
            let e = (current.index_of(a.as_ref())?, current.index_of(b.as_ref())?);
            trace.push(e)?;
        }
        Ok(trace)
    }

    /// Contracts one more edge of the end space; the final map resets to the identity.
    pub fn push(&mut self, edge: (usize, usize)) -> Result<()> {
        let step = contract_edge(self.end_space(), edge)?;
        self.steps.push(step);
        let end = self.end_space().clone();
        self.final_map = PointMap::identity(end.clone());
        self.target = end;
        Ok(())
    }

    pub fn start(&self) -> &Arc<FinitePoset> {
        &self.start
    }

    pub fn steps(&self) -> &[EdgeContraction] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_map(&self) -> &PointMap {
        &self.final_map
    }

    pub fn target(&self) -> &Arc<FinitePoset> {
        &self.target
    }

    /// `X_{e_1…e_i}`; `space(0)` is the start.
    pub fn space(&self, i: usize) -> &Arc<FinitePoset> {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].result
        }
    }

    pub fn end_space(&self) -> &Arc<FinitePoset> {
        self.space(self.steps.len())
    }

    /// `κ_i ∘ … ∘ κ_1` as a point map from the start.
    pub fn prefix_map(&self, i: usize) -> PointMap {
        let mut img: Vec<usize> = (0..self.start.len()).collect();
        for step in &self.steps[..i] {
            for y in img.iter_mut() {
                *y = step.kappa.apply(*y);
            }
        }
        PointMap::new(self.start.clone(), self.space(i).clone(), img)
            .expect("composite of contractions is a valid map")
    }

    /// `g ∘ κ_n ∘ … ∘ κ_1`.
    pub fn composite(&self) -> PointMap {
        self.prefix_map(self.steps.len())
            .then(&self.final_map)
            .expect("final map starts at the end space")
    }

    /// Edges as label pairs of the space each one was contracted in.
    pub fn edge_labels(&self) -> Vec<(String, String)> {
        self.steps.iter().map(|s| s.edge_labels()).collect()
    }
}

/// Decomposes a surjective monotone map into Hasse-edge contractions followed
/// by a homeomorphism.
///
/// Greedy: while a Hasse edge of the current space has both endpoints in one
/// fiber, contract the lexicographically smallest one. Fails with
/// [`Error::NotMonotone`] if a fiber is left with several points or the
/// remaining bijection does not reflect the order.
///
/// Every monotone surjection decomposes, but not every map that decomposes is
/// monotone: contracting `(a,b)` in `{b<a, t<a, b<s}` relates `t < s`, while
/// the preimage `{t,s}` is discrete. The Betti bookkeeping only needs the
/// decomposition.
pub fn decompose(f: &PointMap) -> Result<ContractionTrace> {
    decompose_with(f, EdgeOrder::Lexicographic)
}

/// Which fiber-internal Hasse edge the greedy decomposition contracts next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeOrder {
    #[default]
    Lexicographic,
    ReverseLexicographic,
}

/// [`decompose`] with an explicit greedy edge order.
pub fn decompose_with(f: &PointMap, order: EdgeOrder) -> Result<ContractionTrace> {
    check_surjective_continuous(f)?;
    let (trace, img) = contract_within_fibers(f, order)?;
    let end = trace.end_space().clone();
    let cod = f.cod();

    if end.len() != cod.len() {
        // Some fiber still has two classes with no Hasse edge between them.
        let mut classes = vec![0usize; cod.len()];
        for &y in &img {
            classes[y] += 1;
        }
        let x = (0..f.dom().len())
            .find(|&x| classes[f.apply(x)] > 1)
            .expect("a fiber with several classes exists");
        let y = f.apply(x);
        return Err(Error::NotMonotone(MonotoneViolation::DisconnectedFiber {
            point: cod.label(y).to_string(),
            fiber: f.labels_of(&f.fiber(y)),
        }));
    }

    let g = PointMap::new(end.clone(), cod.clone(), img)?;
    if !g.is_homeomorphism() {
        let mut inverse = vec![0; cod.len()];
        for (u, &y) in g.images().iter().enumerate() {
            inverse[y] = u;
        }
        let (lo, hi) = cod
            .strict_relations()
            .into_iter()
            .find(|&(lo, hi)| !end.leq(inverse[lo], inverse[hi]))
            .expect("a continuous bijection that is not a homeomorphism misses a relation");
        let pair: ElementSet = [lo, hi].into_iter().collect();
        return Err(Error::NotMonotone(MonotoneViolation::OrderNotReflected {
            lower: cod.label(lo).to_string(),
            upper: cod.label(hi).to_string(),
            preimage: f.labels_of(&f.preimage(&pair)),
        }));
    }
    Ok(ContractionTrace {
        start: trace.start,
        steps: trace.steps,
        final_map: g,
        target: cod.clone(),
    })
}

fn check_surjective_continuous(f: &PointMap) -> Result<()> {
    if let Some(y) = f.missed_point() {
        return Err(Error::NotSurjective(f.cod().label(y).to_string()));
    }
    if let Some((lo, hi)) = f.continuity_violation() {
        return Err(Error::NotContinuous {
            lower: f.dom().label(lo).to_string(),
            upper: f.dom().label(hi).to_string(),
        });
    }
    Ok(())
}

/// Greedily contracts Hasse edges lying inside fibers of `f`. Returns the
/// trace (identity final map) and the induced map on the end space.
fn contract_within_fibers(
    f: &PointMap,
    order: EdgeOrder,
) -> Result<(ContractionTrace, Vec<usize>)> {
    let mut trace = ContractionTrace::from_edges(f.dom().clone(), &[])?;
    let mut img: Vec<usize> = f.images().to_vec();
    loop {
        let covers = trace.end_space().covers();
        let inside = |&&(a, b): &&(usize, usize)| img[a] == img[b];
        let edge = match order {
            EdgeOrder::Lexicographic => covers.iter().find(inside),
            EdgeOrder::ReverseLexicographic => covers.iter().rev().find(inside),
        };
        let Some(&edge) = edge else { break };
        trace.push(edge)?;
        let kappa = trace.steps.last().expect("just pushed").kappa();
        let mut next = vec![0; kappa.cod().len()];
        for (x, &y) in img.iter().enumerate() {
            next[kappa.apply(x)] = y;
        }
        img = next;
    }
    Ok((trace, img))
}

/// Verdict of the contractibility criterion for a single edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WheCriterion {
    /// `U_x ∩ U_a` is contractible for every `x` strictly above `b`.
    GuaranteedByOpenSets,
    /// `F_y ∩ F_b` is contractible for every `y` strictly below `a`.
    GuaranteedByClosures,
    /// Neither hypothesis holds; the criterion says nothing.
    NotGuaranteed,
}

impl WheCriterion {
    pub fn is_guaranteed(self) -> bool {
        self != WheCriterion::NotGuaranteed
    }
}

/// Sufficient condition for `κ_e` to be a weak homotopy equivalence.
pub fn whe_criterion(space: &FinitePoset, edge: (usize, usize)) -> Result<WheCriterion> {
    let (a, b) = edge;
    if a >= space.len() || b >= space.len() || !space.is_cover(a, b) {
        return Err(not_an_edge(space, edge));
    }
    let contractible = |set: ElementSet| -> Result<bool> {
        let elems: Vec<usize> = set.into_iter().collect();
        space.induced(&elems).is_contractible()
    };
    let u_a = space.min_open(a);
    let mut by_open = true;
    for x in space.punctured_up(b) {
        let meet: ElementSet = space.min_open(x).intersection(&u_a).copied().collect();
        if !contractible(meet)? {
            by_open = false;
            break;
        }
    }
    if by_open {
        return Ok(WheCriterion::GuaranteedByOpenSets);
    }
    let f_b = space.closure_of(b);
    for y in space.punctured_down(a) {
        let meet: ElementSet = space.closure_of(y).intersection(&f_b).copied().collect();
        if !contractible(meet)? {
            return Ok(WheCriterion::NotGuaranteed);
        }
    }
    Ok(WheCriterion::GuaranteedByClosures)
}

/// `a` is a down beat point or `b` is an up beat point.
pub fn beat_edge_whe(space: &FinitePoset, edge: (usize, usize)) -> Result<bool> {
    let (a, b) = edge;
    if a >= space.len() || b >= space.len() || !space.is_cover(a, b) {
        return Err(not_an_edge(space, edge));
    }
    Ok(space.is_down_beat(a) || space.is_up_beat(b))
}

/// `f = h ∘ g` with `g` contracting connected components of fibers and `h`
/// having discrete fibers.
#[derive(Clone, Debug)]
pub struct Factorization {
    /// Trace of `g: X → Z`; its final map is the identity on `Z`.
    pub g: ContractionTrace,
    pub z: Arc<FinitePoset>,
    pub h: PointMap,
}

pub fn factorize(f: &PointMap) -> Result<Factorization> {
    check_surjective_continuous(f)?;
    let (g, img) = contract_within_fibers(f, EdgeOrder::Lexicographic)?;
    let z = g.end_space().clone();
    let h = PointMap::new(z.clone(), f.cod().clone(), img)?;
    for &(u, v) in z.covers() {
        if h.apply(u) == h.apply(v) {
            return Err(Error::DiscreteFiberViolation {
                point: f.cod().label(h.apply(u)).to_string(),
                lower: z.label(v).to_string(),
                upper: z.label(u).to_string(),
            });
        }
    }
    Ok(Factorization { g, z, h })
}

/// No beat points.
pub fn is_minimal(space: &FinitePoset) -> bool {
    space.beat_points().is_empty()
}

/// No single Hasse-edge contraction is a quasi-isomorphism.
///
/// Every contraction is surjective on homology. If a composite of
/// contractions is an isomorphism on homology, the first contraction is
/// therefore injective as well, so single edges suffice.
pub fn is_g_minimal(space: &Arc<FinitePoset>) -> Result<bool> {
    for &edge in space.covers() {
        let ec = contract_edge(space, edge)?;
        if is_quasi_iso_contraction(&ec)? {
            return Ok(false);
        }
    }
    Ok(true)
}
