//! Labelled poset enumeration and seeded random generation.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::contraction::ContractionTrace;
use crate::error::Result;
use crate::poset::FinitePoset;

/// Edge probability of the random DAG generator.
pub const DEFAULT_EDGE_PROBABILITY: f64 = 0.3;

/// Order relations as bitmasks: `below[x]` holds every `z <= x`.
#[derive(Clone)]
struct MaskOrder {
    below: Vec<u32>,
    above: Vec<u32>,
}

impl MaskOrder {
    fn to_poset(&self) -> FinitePoset {
        let n = self.below.len();
        let mut leq = vec![false; n * n];
        for y in 0..n {
            for x in 0..n {
                leq[x * n + y] = self.below[y] >> x & 1 == 1;
            }
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        FinitePoset::from_leq_unchecked(labels, leq)
    }
}

/// Every partial order on `{0, …, n-1}`, each exactly once.
///
/// Built by adding the element `n-1` to every order on `n-1` elements with
/// a down-closed set `D` below it and an up-closed set `U` above it such that
/// `D` lies entirely below `U`.
pub fn labeled_posets(n: usize) -> Vec<FinitePoset> {
    let mut out = Vec::new();
    for_each_labeled_poset(n, |p| out.push(p.clone()));
    out
}

pub fn for_each_labeled_poset(n: usize, mut visit: impl FnMut(&FinitePoset)) {
    assert!(n <= 31, "labelled enumeration is limited to 31 elements");
    let mut level = vec![MaskOrder {
        below: Vec::new(),
        above: Vec::new(),
    }];
    for k in 0..n {
        let mut next = Vec::new();
        for order in &level {
            extend_orders(order, k, &mut next);
        }
        level = next;
    }
    for order in &level {
        visit(&order.to_poset());
    }
}

/// Number of labelled posets on `n` elements.
pub fn count_labeled_posets(n: usize) -> usize {
    let mut level = vec![MaskOrder {
        below: Vec::new(),
        above: Vec::new(),
    }];
    for k in 0..n {
        let mut next = Vec::new();
        for order in &level {
            extend_orders(order, k, &mut next);
        }
        level = next;
    }
    level.len()
}

fn extend_orders(order: &MaskOrder, k: usize, out: &mut Vec<MaskOrder>) {
    let full = (1u32 << k) - 1;
    let down_closed = |s: u32| (0..k).all(|x| s >> x & 1 == 0 || order.below[x] & !s == 0);
    let up_closed = |s: u32| (0..k).all(|x| s >> x & 1 == 0 || order.above[x] & !s == 0);
    let downs: Vec<u32> = (0..=full).filter(|&s| down_closed(s)).collect();
    let ups: Vec<u32> = (0..=full).filter(|&s| up_closed(s)).collect();
    for &d in &downs {
        // Everything above some element of D must be allowed in U.
        let allowed = (0..k)
            .filter(|&x| d >> x & 1 == 1)
            .fold(full, |acc, x| acc & order.above[x]);
        for &u in &ups {
            if u & d != 0 || u & !allowed != 0 {
                continue;
            }
            let mut below = order.below.clone();
            let mut above = order.above.clone();
            let me = 1u32 << k;
            for x in 0..k {
                if u >> x & 1 == 1 {
                    below[x] |= me;
                }
                if d >> x & 1 == 1 {
                    above[x] |= me;
                }
            }
            below.push(d | me);
            above.push(u | me);
            out.push(MaskOrder { below, above });
        }
    }
}

/// Random order on `n` points: each pair `j < i` of indices becomes a relation
/// with probability `p`, then the transitive closure is taken.
pub fn random_poset<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> FinitePoset {
    let mut rel = Vec::new();
    for i in 0..n {
        for j in 0..i {
            if rng.random_bool(p) {
                rel.push((j, i));
            }
        }
    }
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    FinitePoset::from_relations(labels, &rel).expect("index-increasing relations are acyclic")
}

/// Like [`random_poset`], resampling until the space is connected.
pub fn random_connected_poset<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> FinitePoset {
    loop {
        let x = random_poset(n, p, rng);
        if x.is_connected_space() {
            return x;
        }
    }
}

/// Contracts uniformly random Hasse edges until at most `max_steps` have been
/// taken or no edge is left. On a connected space with no step limit this
/// ends at a point.
pub fn random_trace<R: Rng + ?Sized>(
    space: Arc<FinitePoset>,
    max_steps: usize,
    rng: &mut R,
) -> Result<ContractionTrace> {
    let mut trace = ContractionTrace::from_edges(space, &[])?;
    while trace.len() < max_steps {
        let Some(&e) = trace.end_space().covers().choose(rng) else {
            break;
        };
        trace.push(e)?;
    }
    Ok(trace)
}
