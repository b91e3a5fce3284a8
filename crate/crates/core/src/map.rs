//! Maps between finite spaces and their topological properties.
//!
//! Continuity between finite T0-spaces is order preservation. Monotonicity
//! (connected sets have connected preimages) is decided either by brute force
//! over all subsets of the codomain or, for surjective continuous maps, by
//! attempting the Hasse-edge decomposition: fibers of a continuous map into a
//! T0-space are order-convex, so a fiber is connected exactly when Hasse edges
//! inside it connect it, and the greedy contraction sees every such edge.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::contraction::decompose;
use crate::error::{Error, Result};
use crate::poset::{ElementSet, FinitePoset};

/// Default largest codomain accepted by [`PointMap::is_monotone_exhaustive`].
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 20;
const HARD_EXHAUSTIVE_BOUND: usize = 30;

/// A total function between the element sets of two finite spaces.
#[derive(Clone, Debug)]
pub struct PointMap {
    dom: Arc<FinitePoset>,
    cod: Arc<FinitePoset>,
    img: Vec<usize>,
}

/// Why a map fails to be monotone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneViolation {
    /// The fiber over `point` is disconnected.
    DisconnectedFiber { point: String, fiber: Vec<String> },
    /// The connected set `subset` has a disconnected preimage.
    DisconnectedPreimage {
        subset: Vec<String>,
        preimage: Vec<String>,
    },
    /// `lower < upper` in the codomain, but no element over `lower` lies below
    /// one over `upper` after all fibers are contracted.
    OrderNotReflected {
        lower: String,
        upper: String,
        preimage: Vec<String>,
    },
}

impl MonotoneViolation {
    /// The disconnected preimage witnessing the failure.
    pub fn witness(&self) -> &[String] {
        match self {
            Self::DisconnectedFiber { fiber, .. } => fiber,
            Self::DisconnectedPreimage { preimage, .. } => preimage,
            Self::OrderNotReflected { preimage, .. } => preimage,
        }
    }
}

impl fmt::Display for MonotoneViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DisconnectedFiber { point, fiber } => {
                write!(f, "fiber over `{point}` = {{{}}} is disconnected", fiber.join(","))
            }
            Self::DisconnectedPreimage { subset, preimage } => write!(
                f,
                "preimage of connected {{{}}} is the disconnected {{{}}}",
                subset.join(","),
                preimage.join(",")
            ),
            Self::OrderNotReflected {
                lower,
                upper,
                preimage,
            } => write!(
                f,
                "`{lower}` < `{upper}` is not reflected; preimage {{{}}} is disconnected",
                preimage.join(",")
            ),
        }
    }
}

impl PointMap {
    pub fn new(dom: Arc<FinitePoset>, cod: Arc<FinitePoset>, img: Vec<usize>) -> Result<Self> {
        if img.len() != dom.len() {
            return Err(Error::DomainMismatch(format!(
                "map has {} entries but the domain has {} elements",
                img.len(),
                dom.len()
            )));
        }
        if let Some((x, &y)) = img.iter().enumerate().find(|(_, &y)| y >= cod.len()) {
            return Err(Error::DomainMismatch(format!(
                "`{}` maps to index {y}, outside a codomain of {} elements",
                dom.label(x),
                cod.len()
            )));
        }
        Ok(Self { dom, cod, img })
    }

    /// Builds a map from `(source label, target label)` pairs covering the domain.
    pub fn from_labels<S: AsRef<str>>(
        dom: Arc<FinitePoset>,
        cod: Arc<FinitePoset>,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut img = vec![None; dom.len()];
        for (x, y) in pairs {
            let xi = dom.index_of(x.as_ref())?;
            let yi = cod.index_of(y.as_ref())?;
            if img[xi].replace(yi).is_some_and(|prev| prev != yi) {
                return Err(Error::DomainMismatch(format!(
                    "`{}` is assigned twice",
                    x.as_ref()
                )));
            }
        }
        let img = img
            .into_iter()
            .enumerate()
            .map(|(x, y)| {
                y.ok_or_else(|| {
                    Error::DomainMismatch(format!("`{}` has no image", dom.label(x)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dom, cod, img)
    }

    pub fn identity(space: Arc<FinitePoset>) -> Self {
        let img = (0..space.len()).collect();
        Self {
            dom: space.clone(),
            cod: space,
            img,
        }
    }

    pub fn constant(dom: Arc<FinitePoset>, cod: Arc<FinitePoset>, point: usize) -> Result<Self> {
        let img = vec![point; dom.len()];
        Self::new(dom, cod, img)
    }

    pub fn dom(&self) -> &Arc<FinitePoset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinitePoset> {
        &self.cod
    }

    pub fn images(&self) -> &[usize] {
        &self.img
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.img[x]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &PointMap) -> Result<PointMap> {
        if !Arc::ptr_eq(&self.cod, &then.dom) && *self.cod != *then.dom {
            return Err(Error::DomainMismatch(
                "codomain of the first map is not the domain of the second".into(),
            ));
        }
        let img = self.img.iter().map(|&y| then.img[y]).collect();
        Ok(PointMap {
            dom: self.dom.clone(),
            cod: then.cod.clone(),
            img,
        })
    }

    pub fn fiber(&self, y: usize) -> ElementSet {
        (0..self.dom.len()).filter(|&x| self.img[x] == y).collect()
    }

    pub fn fibers(&self) -> Vec<ElementSet> {
        let mut out = vec![ElementSet::new(); self.cod.len()];
        for (x, &y) in self.img.iter().enumerate() {
            out[y].insert(x);
        }
        out
    }

    pub fn preimage(&self, subset: &ElementSet) -> ElementSet {
        (0..self.dom.len())
            .filter(|&x| subset.contains(&self.img[x]))
            .collect()
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        for &y in &self.img {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        self.img.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective()
    }

    /// First codomain point with an empty fiber.
    pub fn missed_point(&self) -> Option<usize> {
        let mut hit = vec![false; self.cod.len()];
        for &y in &self.img {
            hit[y] = true;
        }
        hit.iter().position(|&h| !h)
    }

    /// Order preservation: `x <= x'` implies `f(x) <= f(x')`.
    pub fn is_continuous(&self) -> bool {
        self.continuity_violation().is_none()
    }

    /// A pair `x <= x'` whose images are not ordered, if any.
    pub fn continuity_violation(&self) -> Option<(usize, usize)> {
        self.dom
            .covers()
            .iter()
            .map(|&(a, b)| (b, a))
            .find(|&(lo, hi)| !self.cod.leq(self.img[lo], self.img[hi]))
    }

    /// Bijective, with both the map and its inverse order-preserving.
    pub fn is_homeomorphism(&self) -> bool {
        if !self.is_bijective() {
            return false;
        }
        let n = self.dom.len();
        (0..n).all(|x| (0..n).all(|y| self.dom.leq(x, y) == self.cod.leq(self.img[x], self.img[y])))
    }

    /// Monotonicity by enumerating every subset of the codomain.
    pub fn is_monotone_exhaustive(&self) -> Result<bool> {
        Ok(self
            .exhaustive_monotone_witness(DEFAULT_EXHAUSTIVE_BOUND)?
            .is_none())
    }

    /// Brute-force search for a connected subset of the codomain with a
    /// disconnected preimage. Fibers are tried first, in the order in which
    /// their elements first appear in the domain; then all larger subsets.
    pub fn exhaustive_monotone_witness(&self, bound: usize) -> Result<Option<MonotoneViolation>> {
        let m = self.cod.len();
        let bound = bound.min(HARD_EXHAUSTIVE_BOUND);
        if m > bound {
            return Err(Error::CodomainTooLarge { size: m, bound });
        }
        let mut checker = PreimageChecker::new(self);
        let mut tried = vec![false; m];
        for x in 0..self.dom.len() {
            let y = self.img[x];
            if std::mem::replace(&mut tried[y], true) {
                continue;
            }
            if !checker.preimage_connected(1u64 << y) {
                return Ok(Some(MonotoneViolation::DisconnectedFiber {
                    point: self.cod.label(y).to_string(),
                    fiber: self.labels_of(&self.fiber(y)),
                }));
            }
        }
        for mask in 1u64..(1u64 << m) {
            if mask.count_ones() < 2 || !checker.codomain_connected(mask) {
                continue;
            }
            if !checker.preimage_connected(mask) {
                let subset: ElementSet = (0..m).filter(|&y| mask >> y & 1 == 1).collect();
                return Ok(Some(MonotoneViolation::DisconnectedPreimage {
                    subset: subset.iter().map(|&y| self.cod.label(y).to_string()).collect(),
                    preimage: self.labels_of(&self.preimage(&subset)),
                }));
            }
        }
        Ok(None)
    }

    /// Monotonicity. Surjective continuous maps are decided through the
    /// Hasse-edge decomposition (fibers connected) plus a lift of every strict
    /// relation of the codomain; everything else by brute force.
    pub fn is_monotone(&self) -> Result<bool> {
        Ok(self.monotone_witness()?.is_none())
    }

    /// Same as [`Self::is_monotone`], returning the failure witness.
    pub fn monotone_witness(&self) -> Result<Option<MonotoneViolation>> {
        if self.is_surjective() && self.is_continuous() {
            return match decompose(self) {
                Ok(_) => Ok(self.unlifted_relation()),
                Err(Error::NotMonotone(v)) => Ok(Some(v)),
                Err(e) => Err(e),
            };
        }
        self.exhaustive_monotone_witness(DEFAULT_EXHAUSTIVE_BOUND)
    }

    /// For a continuous surjection with connected fibers, the preimage of a
    /// connected set is a union of connected fibers, so it is connected iff
    /// every comparable pair `y < y'` of the set is hit by some `x < x'`.
    fn unlifted_relation(&self) -> Option<MonotoneViolation> {
        let fibers = self.fibers();
        let (lo, hi) = self.cod.strict_relations().into_iter().find(|&(lo, hi)| {
            !fibers[lo]
                .iter()
                .any(|&x| fibers[hi].iter().any(|&z| self.dom.lt(x, z)))
        })?;
        let pair: ElementSet = [lo, hi].into_iter().collect();
        Some(MonotoneViolation::DisconnectedPreimage {
            subset: vec![self.cod.label(lo).to_string(), self.cod.label(hi).to_string()],
            preimage: self.labels_of(&self.preimage(&pair)),
        })
    }

    pub(crate) fn labels_of(&self, set: &ElementSet) -> Vec<String> {
        set.iter().map(|&x| self.dom.label(x).to_string()).collect()
    }
}

/// Bitmask connectivity for codomain subsets and BFS for their preimages.
struct PreimageChecker<'a> {
    map: &'a PointMap,
    cod_adj: Vec<u64>,
    dom_adj: Vec<Vec<usize>>,
    member: Vec<bool>,
    seen: Vec<bool>,
}

impl<'a> PreimageChecker<'a> {
    fn new(map: &'a PointMap) -> Self {
        let (dom, cod) = (&map.dom, &map.cod);
        let cod_adj = (0..cod.len())
            .map(|y| {
                (0..cod.len())
                    .filter(|&z| z != y && cod.comparable(y, z))
                    .fold(0u64, |acc, z| acc | 1 << z)
            })
            .collect();
        let dom_adj = (0..dom.len())
            .map(|x| {
                (0..dom.len())
                    .filter(|&z| z != x && dom.comparable(x, z))
                    .collect()
            })
            .collect();
        Self {
            map,
            cod_adj,
            dom_adj,
            member: vec![false; dom.len()],
            seen: vec![false; dom.len()],
        }
    }

    fn codomain_connected(&self, mask: u64) -> bool {
        let start = mask & mask.wrapping_neg();
        let mut reached = start;
        let mut frontier = start;
        while frontier != 0 {
            let y = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.cod_adj[y] & mask & !reached;
            reached |= new;
            frontier |= new;
        }
        reached == mask
    }

    fn preimage_connected(&mut self, mask: u64) -> bool {
        let mut elems = Vec::new();
        for (x, &y) in self.map.img.iter().enumerate() {
            let inside = mask >> y & 1 == 1;
            self.member[x] = inside;
            self.seen[x] = false;
            if inside {
                elems.push(x);
            }
        }
        let Some(&start) = elems.first() else {
            return true;
        };
        let mut queue = VecDeque::from([start]);
        self.seen[start] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &z in &self.dom_adj[x] {
                if self.member[z] && !self.seen[z] {
                    self.seen[z] = true;
                    count += 1;
                    queue.push_back(z);
                }
            }
        }
        count == elems.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> Arc<FinitePoset> {
        Arc::new(
            FinitePoset::build(
                &["a", "b", "c", "d"],
                &[("c", "a"), ("d", "a"), ("c", "b"), ("d", "b")],
            )
            .unwrap(),
        )
    }

    fn circle_to_chain() -> PointMap {
        let x = circle();
        let y = Arc::new(FinitePoset::chain(2));
        PointMap::from_labels(x, y, &[("a", "1"), ("b", "1"), ("c", "0"), ("d", "0")]).unwrap()
    }

    #[test]
    fn identity_properties() {
        let id = PointMap::identity(circle());
        assert!(id.is_continuous());
        assert!(id.is_homeomorphism());
        assert!(id.is_monotone().unwrap());
        assert!(id.is_monotone_exhaustive().unwrap());
    }

    #[test]
    fn circle_to_chain_is_continuous_not_monotone() {
        let f = circle_to_chain();
        assert!(f.is_continuous());
        assert!(f.is_surjective());
        assert!(!f.is_monotone_exhaustive().unwrap());
        let w = f.exhaustive_monotone_witness(20).unwrap().unwrap();
        assert_eq!(w.witness(), &["a".to_string(), "b".to_string()]);
        let fast = f.monotone_witness().unwrap().unwrap();
        assert_eq!(fast.witness(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn reversing_a_chain_is_not_continuous() {
        let x = Arc::new(FinitePoset::chain(2));
        let y = Arc::new(x.opposite());
        let f = PointMap::new(x, y, vec![0, 1]).unwrap();
        assert!(!f.is_continuous());
        assert!(!f.is_homeomorphism());
    }

    #[test]
    fn chain_to_antichain_is_not_a_homeomorphism() {
        let x = Arc::new(FinitePoset::chain(2));
        let y = Arc::new(FinitePoset::antichain(2));
        let f = PointMap::new(x, y, vec![0, 1]).unwrap();
        assert!(!f.is_continuous());
        assert!(!f.is_homeomorphism());
    }

    #[test]
    fn swap_symmetry_of_circle_is_a_homeomorphism() {
        let x = circle();
        let f = PointMap::new(x.clone(), x, vec![1, 0, 3, 2]).unwrap();
        assert!(f.is_homeomorphism());
        assert!(f.is_monotone().unwrap());
    }

    #[test]
    fn constant_map_on_connected_space_is_monotone() {
        let y = Arc::new(FinitePoset::chain(3));
        let f = PointMap::constant(circle(), y, 1).unwrap();
        assert!(f.is_monotone_exhaustive().unwrap());
        assert!(f.is_monotone().unwrap());
    }

    #[test]
    fn exhaustive_bound_is_enforced() {
        let x = Arc::new(FinitePoset::antichain(3));
        let f = PointMap::identity(x);
        assert!(matches!(
            f.exhaustive_monotone_witness(2),
            Err(Error::CodomainTooLarge { size: 3, bound: 2 })
        ));
    }

    #[test]
    fn bad_maps_are_rejected() {
        let x = circle();
        let y = Arc::new(FinitePoset::chain(2));
        assert!(matches!(
            PointMap::new(x.clone(), y.clone(), vec![0, 0, 5, 0]),
            Err(Error::DomainMismatch(_))
        ));
        assert!(matches!(
            PointMap::from_labels(x, y, &[("a", "0")]),
            Err(Error::DomainMismatch(_))
        ));
    }
}
