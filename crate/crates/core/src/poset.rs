//! Finite T0-spaces as partial orders.
//!
//! A finite topological space with the T0 property is the same thing as a
//! finite partially ordered set: `x <= y` exactly when the minimal open set of
//! `x` is contained in that of `y`. Elements are addressed by positional index;
//! labels are kept for presentation only.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub type ElementSet = BTreeSet<usize>;

/// A finite partial order together with its Hasse diagram.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    labels: Vec<String>,
    /// Row-major `size * size` table, `leq[x * size + y]` iff `x <= y`.
    leq: Vec<bool>,
    /// Cover pairs `(a, b)` with `a` covering `b`, sorted lexicographically.
    covers: Vec<(usize, usize)>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .covers
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.labels[b], self.labels[a]))
            .collect();
        f.debug_struct("FinitePoset")
            .field("elements", &self.labels)
            .field("covers", &edges)
            .finish()
    }
}

impl FinitePoset {
    /// Builds a poset from labels and `(lower, upper)` label pairs.
    ///
    /// Relations may be arbitrary comparable pairs; the order is their
    /// reflexive-transitive closure and the covers are its transitive reduction.
    pub fn build<S: AsRef<str>>(labels: &[S], relations: &[(S, S)]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.as_str(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownLabel(s.to_string()))
        };
        let mut pairs = Vec::with_capacity(relations.len());
        for (lo, hi) in relations {
            pairs.push((lookup(lo.as_ref())?, lookup(hi.as_ref())?));
        }
        Self::from_relations(labels, &pairs)
    }

    /// Builds a poset from labels and `(lower, upper)` index pairs.
    pub fn from_relations(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        check_distinct(&labels)?;
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(lo, hi) in relations {
            for idx in [lo, hi] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, size: n });
                }
            }
            leq[lo * n + hi] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::CycleDetected(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(Self::from_leq_unchecked(labels, leq))
    }

    /// Builds a poset from a full `size * size` relation table, validating it.
    pub fn from_leq_table(labels: Vec<String>, leq: Vec<bool>) -> Result<Self> {
        check_distinct(&labels)?;
        let n = labels.len();
        if leq.len() != n * n {
            return Err(Error::NotAPartialOrder(format!(
                "table has {} entries, expected {}",
                leq.len(),
                n * n
            )));
        }
        if let Some(msg) = partial_order_defect(&leq, n) {
            return Err(Error::NotAPartialOrder(msg));
        }
        Ok(Self::from_leq_unchecked(labels, leq))
    }

    /// Caller guarantees `leq` is a partial order and labels are distinct.
    pub(crate) fn from_leq_unchecked(labels: Vec<String>, leq: Vec<bool>) -> Self {
        let n = labels.len();
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || !leq[b * n + a] {
                    continue;
                }
                let intermediate =
                    (0..n).any(|z| z != a && z != b && leq[b * n + z] && leq[z * n + a]);
                if !intermediate {
                    covers.push((a, b));
                }
            }
        }
        Self { labels, leq, covers }
    }

    /// Totally ordered space `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let rel: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relations(labels, &rel).expect("a chain is a partial order")
    }

    /// Discrete space on `n` points.
    pub fn antichain(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_relations(labels, &[]).expect("an antichain is a partial order")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub(crate) fn check_index(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: x,
                size: self.len(),
            })
        }
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.len() + y]
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    pub fn leq_table(&self) -> &[bool] {
        &self.leq
    }

    /// Hasse edges `(a, b)` with `a` covering `b`, in lexicographic order.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.covers.binary_search(&(a, b)).is_ok()
    }

    /// Number of pairs `x < y`.
    pub fn strict_relation_count(&self) -> usize {
        self.leq.iter().filter(|&&v| v).count() - self.len()
    }

    /// Strict relations as `(lower, upper)` pairs.
    pub fn strict_relations(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.lt(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// `U_x = {z : z <= x}`, the minimal open neighbourhood of `x`.
    pub fn min_open(&self, x: usize) -> ElementSet {
        (0..self.len()).filter(|&z| self.leq(z, x)).collect()
    }

    /// `F_x = {z : x <= z}`, the closure of `x`.
    pub fn closure_of(&self, x: usize) -> ElementSet {
        (0..self.len()).filter(|&z| self.leq(x, z)).collect()
    }

    /// `F_x` without `x`.
    pub fn punctured_up(&self, x: usize) -> ElementSet {
        (0..self.len()).filter(|&z| self.lt(x, z)).collect()
    }

    /// `U_x` without `x`.
    pub fn punctured_down(&self, x: usize) -> ElementSet {
        (0..self.len()).filter(|&z| self.lt(z, x)).collect()
    }

    /// The opposite space: closed sets become open, the order is transposed.
    pub fn opposite(&self) -> Self {
        let n = self.len();
        let mut leq = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                leq[x * n + y] = self.leq(y, x);
            }
        }
        Self::from_leq_unchecked(self.labels.clone(), leq)
    }

    /// Subspace on `elements`, which are reindexed in the given order.
    pub fn induced(&self, elements: &[usize]) -> Self {
        let m = elements.len();
        let mut leq = vec![false; m * m];
        for (i, &x) in elements.iter().enumerate() {
            for (j, &y) in elements.iter().enumerate() {
                leq[i * m + j] = self.leq(x, y);
            }
        }
        let labels = elements.iter().map(|&x| self.labels[x].clone()).collect();
        Self::from_leq_unchecked(labels, leq)
    }

    /// Connectivity of the subspace `subset`; the empty set counts as connected.
    pub fn is_connected(&self, subset: &ElementSet) -> bool {
        self.connected_components(subset).len() <= 1
    }

    /// Components of the comparability graph restricted to `subset`.
    pub fn connected_components(&self, subset: &ElementSet) -> Vec<ElementSet> {
        let mut seen = HashSet::with_capacity(subset.len());
        let mut out = Vec::new();
        for &start in subset {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = ElementSet::new();
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                comp.insert(x);
                for &y in subset {
                    if !seen.contains(&y) && self.comparable(x, y) {
                        seen.insert(y);
                        queue.push_back(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected_space(&self) -> bool {
        self.is_connected(&(0..self.len()).collect())
    }

    /// `x` is an up beat point if `F̂_x = F_y` for some `y`.
    pub fn is_up_beat(&self, x: usize) -> bool {
        let up = self.punctured_up(x);
        up.iter().any(|&y| self.closure_of(y) == up)
    }

    /// `x` is a down beat point if `Û_x = U_y` for some `y`.
    pub fn is_down_beat(&self, x: usize) -> bool {
        let down = self.punctured_down(x);
        down.iter().any(|&y| self.min_open(y) == down)
    }

    pub fn is_beat_point(&self, x: usize) -> bool {
        self.is_up_beat(x) || self.is_down_beat(x)
    }

    pub fn beat_points(&self) -> ElementSet {
        (0..self.len()).filter(|&x| self.is_beat_point(x)).collect()
    }

    /// Removes beat points one at a time (smallest remaining index first)
    /// until none are left.
    pub fn core(&self) -> Result<CoreReduction> {
        if self.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut kept: Vec<usize> = (0..self.len()).collect();
        let mut current = self.clone();
        let mut removed = Vec::new();
        while let Some(p) = (0..current.len()).find(|&x| current.is_beat_point(x)) {
            removed.push(kept.remove(p));
            current = self.induced(&kept);
        }
        Ok(CoreReduction {
            core: current,
            kept,
            removed,
        })
    }

    /// Contractible iff the core is a single point.
    pub fn is_contractible(&self) -> Result<bool> {
        Ok(self.core()?.core.len() == 1)
    }

    /// Order-isomorphism test by backtracking, ignoring labels.
    pub fn is_isomorphic(&self, other: &FinitePoset) -> bool {
        self.find_isomorphism(other).is_some()
    }

    /// Returns `phi` with `x <= y` iff `phi[x] <= phi[y]`, if one exists.
    pub fn find_isomorphism(&self, other: &FinitePoset) -> Option<Vec<usize>> {
        let n = self.len();
        if n != other.len() || self.covers.len() != other.covers.len() {
            return None;
        }
        let sig = |p: &FinitePoset, x: usize| {
            let down = (0..n).filter(|&z| p.lt(z, x)).count();
            let up = (0..n).filter(|&z| p.lt(x, z)).count();
            (down, up)
        };
        let a_sig: Vec<_> = (0..n).map(|x| sig(self, x)).collect();
        let b_sig: Vec<_> = (0..n).map(|x| sig(other, x)).collect();
        let mut a_sorted = a_sig.clone();
        let mut b_sorted = b_sig.clone();
        a_sorted.sort_unstable();
        b_sorted.sort_unstable();
        if a_sorted != b_sorted {
            return None;
        }
        let mut phi = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn extend(
            x: usize,
            a: &FinitePoset,
            b: &FinitePoset,
            a_sig: &[(usize, usize)],
            b_sig: &[(usize, usize)],
            phi: &mut [usize],
            used: &mut [bool],
        ) -> bool {
            if x == a.len() {
                return true;
            }
            for cand in 0..b.len() {
                if used[cand] || a_sig[x] != b_sig[cand] {
                    continue;
                }
                let consistent = (0..x).all(|y| {
                    a.leq(x, y) == b.leq(cand, phi[y]) && a.leq(y, x) == b.leq(phi[y], cand)
                });
                if !consistent {
                    continue;
                }
                phi[x] = cand;
                used[cand] = true;
                if extend(x + 1, a, b, a_sig, b_sig, phi, used) {
                    return true;
                }
                used[cand] = false;
            }
            false
        }
        if extend(0, self, other, &a_sig, &b_sig, &mut phi, &mut used) {
            Some(phi)
        } else {
            None
        }
    }

    pub fn format_set(&self, set: &ElementSet) -> String {
        let names: Vec<&str> = set.iter().map(|&x| self.label(x)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Result of dismantling a space down to its core.
#[derive(Clone, Debug)]
pub struct CoreReduction {
    pub core: FinitePoset,
    /// Original indices of the core's elements.
    pub kept: Vec<usize>,
    /// Original indices of the removed beat points, in removal order.
    pub removed: Vec<usize>,
}

fn check_distinct(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn partial_order_defect(leq: &[bool], n: usize) -> Option<String> {
    for i in 0..n {
        if !leq[i * n + i] {
            return Some(format!("element {i} is not reflexive"));
        }
        for j in 0..n {
            if i != j && leq[i * n + j] && leq[j * n + i] {
                return Some(format!("elements {i} and {j} violate antisymmetry"));
            }
            if !leq[i * n + j] {
                continue;
            }
            for k in 0..n {
                if leq[j * n + k] && !leq[i * n + k] {
                    return Some(format!("{i} <= {j} <= {k} violates transitivity"));
                }
            }
        }
    }
    None
}
