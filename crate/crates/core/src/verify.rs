//! Betti bookkeeping for monotone maps and mechanical checks of the exact
//! sequences attached to a contraction trace.
//!
//! Every exact-sequence statement is checked through the rank identities it
//! implies, plus vanishing of homology where a complex is claimed acyclic.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{order_complex, ChainComplex, Lifter, TraceChains};
use crate::contraction::{
    beat_edge_whe, contract_edge, decompose, decompose_with, edge_subspace_elements, factorize,
    is_g_minimal, is_minimal, whe_criterion, ContractionTrace, EdgeOrder,
};
use crate::enumerate::{
    for_each_labeled_poset, labeled_posets, random_connected_poset, random_trace,
    DEFAULT_EDGE_PROBABILITY,
};
use crate::error::{Error, Result};
use crate::homology::{homology, space_homology, HomologyResult};
use crate::io::PosetJson;
use crate::map::PointMap;
use crate::matrix::smith_normal_form;
use crate::poset::{ElementSet, FinitePoset};

/// Largest poset size accepted by [`sweep`].
pub const SWEEP_LIMIT: usize = 6;
/// Maps are enumerated for the monotonicity agreement check up to this size.
pub const MONOTONE_SWEEP_LIMIT: usize = 4;
const STORED_FAILURES: usize = 50;

/// Per-degree dimensions and homology of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexSummary {
    pub dims: Vec<usize>,
    pub homology: HomologyResult,
}

impl ComplexSummary {
    fn of(c: &ChainComplex) -> Result<Self> {
        Ok(Self {
            dims: c.dims(),
            homology: homology(c)?,
        })
    }
}

/// One contraction step of a [`BettiReport`].
#[derive(Clone, Debug, Serialize)]
pub struct StepBetti {
    /// `[a, b]`, labels in the space the edge was contracted in.
    pub edge: (String, String),
    /// `𝒦_{e_i}`.
    pub cokernel: ComplexSummary,
    /// `𝒦_{e_1…e_i}`.
    pub cumulative: ComplexSummary,
}

/// `b_r(X) = b_r(Y) + Σ_i b_{r+1}(𝒦_{e_i})` with its per-degree residuals.
#[derive(Clone, Debug, Serialize)]
pub struct BettiReport {
    pub source: HomologyResult,
    pub target: HomologyResult,
    pub steps: Vec<StepBetti>,
    /// `b_r(X) − b_r(Y) − Σ_i b_{r+1}(𝒦_{e_i})` for each `r`.
    pub residuals: Vec<i64>,
}

impl BettiReport {
    pub fn passes(&self) -> bool {
        self.residuals.iter().all(|&r| r == 0)
    }
}

/// A named claim with the number of instances evaluated and the first failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub evaluated: usize,
    pub failures: usize,
    /// True when the claim had no instance to evaluate.
    pub vacuous: bool,
    pub counterexample: Option<String>,
}

/// Torsion seen at one step: `H_r(X_{i-1})`, `H_r(X_i)` and `H_{r+1}(𝒦_{e_i})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionObservation {
    pub step: usize,
    pub degree: usize,
    pub before: Vec<u64>,
    pub after: Vec<u64>,
    pub cokernel: Vec<u64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckLedger {
    pub entries: Vec<CheckEntry>,
    pub torsion: Vec<TorsionObservation>,
}

impl CheckLedger {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

/// Accumulates check outcomes by name, preserving first-seen order.
#[derive(Clone, Debug, Default)]
struct Tally {
    order: Vec<String>,
    stats: BTreeMap<String, (usize, usize, Option<String>)>,
}

impl Tally {
    fn declare(&mut self, name: &str) {
        if !self.stats.contains_key(name) {
            self.order.push(name.to_string());
            self.stats.insert(name.to_string(), (0, 0, None));
        }
    }

    fn record(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) -> bool {
        self.declare(name);
        let s = self.stats.get_mut(name).expect("declared");
        s.0 += 1;
        if !ok {
            s.1 += 1;
            if s.2.is_none() {
                s.2 = Some(detail());
            }
        }
        ok
    }

    fn merge(&mut self, other: Tally) {
        for name in other.order {
            self.declare(&name);
            let (e, f, c) = other.stats[&name].clone();
            let s = self.stats.get_mut(&name).expect("declared");
            s.0 += e;
            s.1 += f;
            if s.2.is_none() {
                s.2 = c;
            }
        }
    }

    fn entries(&self) -> Vec<CheckEntry> {
        self.order
            .iter()
            .map(|name| {
                let (evaluated, failures, c) = &self.stats[name];
                CheckEntry {
                    name: name.clone(),
                    passed: *failures == 0,
                    evaluated: *evaluated,
                    failures: *failures,
                    vacuous: *evaluated == 0,
                    counterexample: c.clone(),
                }
            })
            .collect()
    }
}

/// Everything computed once along a trace.
struct TraceAnalysis {
    spaces: Vec<HomologyResult>,
    target: HomologyResult,
    step_cokernels: Vec<ComplexSummary>,
    cumulative: Vec<ComplexSummary>,
    kernels: Vec<ComplexSummary>,
    chain_dims: Vec<Vec<usize>>,
    map_ranks: Vec<Vec<usize>>,
    image_counts: Vec<Vec<usize>>,
    distinct_images: Vec<Vec<usize>>,
    maps_commute: Vec<bool>,
    boundaries_square_to_zero: bool,
}

impl TraceAnalysis {
    fn new(trace: &ContractionTrace) -> Result<Self> {
        let tc = TraceChains::new(trace)?;
        let n = trace.len();
        let spaces = (0..=n)
            .map(|i| homology(tc.chain_complex(i)))
            .collect::<Result<Vec<_>>>()?;
        let target = space_homology(trace.target())?;
        let chain_dims: Vec<Vec<usize>> = (0..=n).map(|i| tc.chain_complex(i).dims()).collect();
        let mut a = Self {
            spaces,
            target,
            step_cokernels: Vec::with_capacity(n),
            cumulative: Vec::with_capacity(n),
            kernels: Vec::with_capacity(n),
            chain_dims,
            map_ranks: Vec::with_capacity(n),
            image_counts: Vec::with_capacity(n),
            distinct_images: Vec::with_capacity(n),
            maps_commute: Vec::with_capacity(n),
            boundaries_square_to_zero: true,
        };
        for i in 1..=n {
            let step = tc.step_cokernel(i);
            let cum = tc.cokernel(i);
            let ker = tc.kernel(i)?;
            let map = tc.induced_map(i);
            a.maps_commute
                .push(map.commutes(tc.chain_complex(0), tc.chain_complex(i))?);
            for c in [&step.complex, &cum.complex, &ker.complex] {
                a.boundaries_square_to_zero &= c.boundary_squares_to_zero()?;
            }
            let cum_dims = cum.dims();
            a.image_counts.push(
                a.chain_dims[i]
                    .iter()
                    .enumerate()
                    .map(|(r, &d)| d - cum_dims.get(r).copied().unwrap_or(0))
                    .collect(),
            );
            a.distinct_images.push(
                (0..a.chain_dims[i].len())
                    .map(|r| {
                        let m = map.matrix(r);
                        let mut rows: Vec<usize> =
                            (0..m.cols()).flat_map(|j| m.column(j).iter().map(|e| e.0)).collect();
                        rows.sort_unstable();
                        rows.dedup();
                        rows.len()
                    })
                    .collect(),
            );
            a.map_ranks.push(ker.map_ranks.clone());
            a.step_cokernels.push(ComplexSummary::of(&step.complex)?);
            a.cumulative.push(ComplexSummary::of(&cum.complex)?);
            a.kernels.push(ComplexSummary::of(&ker.complex)?);
        }
        Ok(a)
    }

    fn degree_bound(&self) -> usize {
        let spaces = self.spaces.iter().map(|h| h.betti.len()).max().unwrap_or(0);
        let cok = self
            .step_cokernels
            .iter()
            .chain(&self.cumulative)
            .map(|c| c.dims.len())
            .max()
            .unwrap_or(0);
        spaces.max(cok).max(self.target.betti.len())
    }

    fn residuals(&self) -> Vec<i64> {
        let source = self.spaces.first().expect("start space");
        (0..self.degree_bound())
            .map(|r| {
                let sum: usize = self
                    .step_cokernels
                    .iter()
                    .map(|c| c.homology.betti_at(r + 1))
                    .sum();
                source.betti_at(r) as i64 - self.target.betti_at(r) as i64 - sum as i64
            })
            .collect()
    }
}

fn fmt_betti(h: &HomologyResult) -> String {
    format!("{:?}", h.betti)
}

/// Decomposes `f` and computes the Betti bookkeeping of its trace.
pub fn betti_decomposition(f: &PointMap) -> Result<BettiReport> {
    let trace = decompose(f)?;
    betti_report(&trace)
}

pub fn betti_report(trace: &ContractionTrace) -> Result<BettiReport> {
    let a = TraceAnalysis::new(trace)?;
    let steps = trace
        .steps()
        .iter()
        .enumerate()
        .map(|(k, s)| StepBetti {
            edge: s.edge_labels(),
            cokernel: a.step_cokernels[k].clone(),
            cumulative: a.cumulative[k].clone(),
        })
        .collect();
    Ok(BettiReport {
        source: a.spaces[0].clone(),
        target: a.target.clone(),
        steps,
        residuals: a.residuals(),
    })
}

/// Names of the ledger entries produced by [`verify_trace`], in order.
pub const TRACE_CHECKS: &[&str] = &[
    "kernel_acyclic",
    "step_betti_identity",
    "step_cokernel_degree0_zero",
    "cumulative_cokernel_additivity",
    "end_to_end_betti_identity",
    "homological_dimension_nonincreasing",
    "degreewise_exactness",
    "chain_maps_commute",
    "boundary_squares_to_zero",
    "final_map_homeomorphism",
    "betti_sum_formula",
    "acyclic_target_betti_sum",
];

/// Runs every trace-level check; failures become ledger entries.
pub fn verify_trace(trace: &ContractionTrace) -> Result<CheckLedger> {
    let a = TraceAnalysis::new(trace)?;
    let mut t = Tally::default();
    for name in TRACE_CHECKS {
        t.declare(name);
    }
    let n = trace.len();
    let degrees = a.degree_bound() + 1;
    let step_name = |i: usize| {
        let (x, y) = trace.steps()[i - 1].edge_labels();
        format!("step {i} ({x},{y})")
    };

    for i in 1..=n {
        let ker = &a.kernels[i - 1];
        t.record("kernel_acyclic", ker.homology.is_zero(), || {
            format!("prefix {i}: kernel homology {:?}", ker.homology)
        });
        let step = &a.step_cokernels[i - 1];
        for r in 0..degrees {
            let lhs = a.spaces[i - 1].betti_at(r);
            let rhs = a.spaces[i].betti_at(r) + step.homology.betti_at(r + 1);
            t.record("step_betti_identity", lhs == rhs, || {
                format!("{}: b_{r} before {lhs} != after + cokernel {rhs}", step_name(i))
            });
        }
        t.record(
            "step_cokernel_degree0_zero",
            step.dims.first().copied().unwrap_or(0) == 0,
            || format!("{}: cokernel dims {:?}", step_name(i), step.dims),
        );
        let before = a.spaces[i - 1].top_degree().unwrap_or(0);
        let after = a.spaces[i].top_degree().unwrap_or(0);
        t.record("homological_dimension_nonincreasing", after <= before, || {
            format!("{}: dimension {before} -> {after}", step_name(i))
        });
        for r in 0..a.chain_dims[0].len().max(a.chain_dims[i].len()) {
            let src = a.chain_dims[0].get(r).copied().unwrap_or(0);
            let tgt = a.chain_dims[i].get(r).copied().unwrap_or(0);
            let k = ker.dims.get(r).copied().unwrap_or(0);
            let rank = a.map_ranks[i - 1].get(r).copied().unwrap_or(0);
            let img = a.image_counts[i - 1].get(r).copied().unwrap_or(0);
            let distinct = a.distinct_images[i - 1].get(r).copied().unwrap_or(0);
            let cok = a.cumulative[i - 1].dims.get(r).copied().unwrap_or(0);
            let ok = src == k + rank && tgt == img + cok && rank == img && img == distinct;
            t.record("degreewise_exactness", ok, || {
                format!(
                    "prefix {i}, degree {r}: dim X {src}, kernel {k}, rank {rank}, \
                     lifted {img}, images {distinct}, dim X_i {tgt}, cokernel {cok}"
                )
            });
        }
        t.record("chain_maps_commute", a.maps_commute[i - 1], || {
            format!("prefix {i}: induced map does not commute with boundaries")
        });
    }
    for i in 1..n {
        for r in 1..degrees {
            let lhs = a.cumulative[i].homology.betti_at(r);
            let rhs = a.cumulative[i - 1].homology.betti_at(r)
                + a.step_cokernels[i].homology.betti_at(r);
            t.record("cumulative_cokernel_additivity", lhs == rhs, || {
                format!("prefix {}: b_{r} {lhs} != {rhs}", i + 1)
            });
        }
    }
    for r in 0..degrees {
        let lhs = a.spaces[0].betti_at(r);
        let total = a.cumulative.last().map_or(0, |c| c.homology.betti_at(r + 1));
        let rhs = a.target.betti_at(r) + total;
        t.record("end_to_end_betti_identity", lhs == rhs, || {
            format!("b_{r}(X) = {lhs}, b_{r}(Y) + b_{}(total cokernel) = {rhs}", r + 1)
        });
    }
    t.record(
        "boundary_squares_to_zero",
        a.boundaries_square_to_zero,
        || "a kernel or cokernel boundary does not square to zero".into(),
    );
    t.record(
        "final_map_homeomorphism",
        trace.final_map().is_homeomorphism() && trace.composite().is_surjective(),
        || "final map is not a homeomorphism onto the target".into(),
    );
    let residuals = a.residuals();
    t.record("betti_sum_formula", residuals.iter().all(|&x| x == 0), || {
        format!(
            "residuals {residuals:?} (source {}, target {})",
            fmt_betti(&a.spaces[0]),
            fmt_betti(&a.target)
        )
    });
    if a.target.is_point_like() {
        for r in 1..degrees {
            let lhs = a.spaces[0].betti_at(r);
            let rhs: usize = a.step_cokernels.iter().map(|c| c.homology.betti_at(r + 1)).sum();
            t.record("acyclic_target_betti_sum", lhs == rhs, || {
                format!("b_{r}(X) = {lhs} but the cokernels sum to {rhs}")
            });
        }
    }

    let mut torsion = Vec::new();
    for i in 1..=n {
        for r in 0..degrees {
            a_torsion(&a, i, r, &mut torsion);
        }
    }
    Ok(CheckLedger {
        entries: t.entries(),
        torsion,
    })
}

fn a_torsion(a: &TraceAnalysis, i: usize, r: usize, out: &mut Vec<TorsionObservation>) {
    let before = a.spaces[i - 1].torsion_at(r).to_vec();
    let after = a.spaces[i].torsion_at(r).to_vec();
    let cokernel = a.step_cokernels[i - 1].homology.torsion_at(r + 1).to_vec();
    if !(before.is_empty() && after.is_empty() && cokernel.is_empty()) {
        out.push(TorsionObservation {
            step: i,
            degree: r,
            before,
            after,
            cokernel,
        });
    }
}

/// Runs [`factorize`] and checks `f = h ∘ g`, discreteness of the fibers of
/// `h`, monotonicity of `g`, and the Betti witness for surjectivity of `g_*`.
pub fn factorization_report(f: &PointMap) -> Result<(crate::contraction::Factorization, CheckLedger)> {
    let fac = factorize(f)?;
    let mut t = Tally::default();
    let g_map = fac.g.composite();
    let composite = g_map.then(&fac.h)?;
    t.record("factors_pointwise", composite.images() == f.images(), || {
        format!("h∘g = {:?}, f = {:?}", composite.images(), f.images())
    });
    let antichains = fac.h.fibers().iter().all(|fib| {
        fib.iter()
            .all(|&u| fib.iter().all(|&v| u == v || !fac.z.comparable(u, v)))
    });
    t.record("h_fibers_discrete", antichains, || "a fiber of h is not an antichain".into());
    let g_monotone = g_map.is_monotone()?;
    t.record("g_monotone", g_monotone, || "g is not monotone".into());
    let report = betti_report(&fac.g)?;
    t.record("g_betti_surjectivity_witness", report.passes(), || {
        format!("residuals {:?}", report.residuals)
    });
    let ledger = CheckLedger {
        entries: t.entries(),
        torsion: Vec::new(),
    };
    Ok((fac, ledger))
}

/// Groups of checks the sweep can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCheck {
    /// Per-poset structure: order/topology dictionary, Hasse reduction, core, minimality.
    Poset,
    /// Per Hasse edge: contraction properties and single-step exact sequences.
    Edge,
    /// One seeded random trace per poset, run through [`verify_trace`].
    Trace,
    /// Fast versus exhaustive monotonicity over all surjective continuous maps.
    Monotone,
}

impl SweepCheck {
    pub const ALL: [SweepCheck; 4] = [Self::Poset, Self::Edge, Self::Trace, Self::Monotone];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "poset" | "posets" => Some(Self::Poset),
            "edge" | "edges" => Some(Self::Edge),
            "trace" | "traces" => Some(Self::Trace),
            "monotone" => Some(Self::Monotone),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub max_n: usize,
    pub checks: Vec<SweepCheck>,
    pub seed: u64,
    /// Worker threads; `1` runs sequentially.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            max_n: 4,
            checks: vec![SweepCheck::Poset, SweepCheck::Edge, SweepCheck::Monotone],
            seed: 0,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepFailure {
    pub check: String,
    pub poset: PosetJson,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    /// `posets_by_size[k]` counts posets with `k + 1` elements.
    pub posets_by_size: Vec<usize>,
    pub posets: usize,
    pub edges: usize,
    pub traces: usize,
    pub maps: usize,
    pub checks: Vec<CheckEntry>,
    pub failures: usize,
    pub failure_examples: Vec<SweepFailure>,
    /// Posets where two greedy orders to a point gave different multisets of
    /// per-step cokernel Betti vectors.
    pub greedy_order_mismatches: usize,
    /// Hasse edges whose contraction has a connected subset with a
    /// disconnected preimage (some `t < s` created by the merge).
    pub non_monotone_contractions: usize,
    /// Surjective continuous maps that decompose into contractions followed
    /// by a homeomorphism without being monotone.
    pub decomposable_non_monotone_maps: usize,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Default)]
struct Partial {
    tally: Tally,
    edges: usize,
    traces: usize,
    maps: usize,
    failures: Vec<SweepFailure>,
    greedy_mismatches: usize,
    non_monotone_contractions: usize,
    decomposable_non_monotone: usize,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.tally.merge(other.tally);
        self.edges += other.edges;
        self.traces += other.traces;
        self.maps += other.maps;
        self.greedy_mismatches += other.greedy_mismatches;
        self.non_monotone_contractions += other.non_monotone_contractions;
        self.decomposable_non_monotone += other.decomposable_non_monotone;
        for f in other.failures {
            if self.failures.len() < STORED_FAILURES {
                self.failures.push(f);
            }
        }
        self
    }

    fn check(&mut self, poset: &FinitePoset, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        let mut text = None;
        self.tally.record(name, ok, || {
            let d = detail();
            text = Some(d.clone());
            d
        });
        if !ok && self.failures.len() < STORED_FAILURES {
            self.failures.push(SweepFailure {
                check: name.to_string(),
                poset: PosetJson::from_poset(poset),
                detail: text.unwrap_or_default(),
            });
        }
    }

    fn absorb_ledger(&mut self, poset: &FinitePoset, prefix: &str, ledger: &CheckLedger) {
        for e in &ledger.entries {
            let name = format!("{prefix}{}", e.name);
            self.tally.declare(&name);
            if e.vacuous {
                continue;
            }
            self.check(poset, &name, e.passed, || {
                e.counterexample.clone().unwrap_or_default()
            });
        }
    }
}

/// Exhaustive checks over every labelled poset with up to `max_n` elements.
pub fn sweep(config: &SweepConfig) -> Result<SweepSummary> {
    if config.max_n > SWEEP_LIMIT {
        return Err(Error::SweepTooLarge {
            requested: config.max_n,
            limit: SWEEP_LIMIT,
        });
    }
    let mut posets_by_size = Vec::new();
    let mut total = Partial::default();
    let small: Vec<Arc<FinitePoset>> = if config.checks.contains(&SweepCheck::Monotone) {
        (1..=config.max_n.min(MONOTONE_SWEEP_LIMIT))
            .flat_map(labeled_posets)
            .map(Arc::new)
            .collect()
    } else {
        Vec::new()
    };
    for n in 1..=config.max_n {
        let mut level = Vec::new();
        for_each_labeled_poset(n, |p| level.push(p.clone()));
        posets_by_size.push(level.len());
        let run = |(k, p): (usize, &FinitePoset)| -> Result<Partial> {
            let seed = config.seed ^ ((n as u64) << 32) ^ k as u64;
            check_poset(p, config, seed, &small)
        };
        let partial = if config.jobs <= 1 {
            level
                .iter()
                .enumerate()
                .map(run)
                .try_fold(Partial::default(), |acc, p| p.map(|p| acc.merge(p)))?
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .expect("thread pool");
            pool.install(|| {
                level
                    .par_iter()
                    .enumerate()
                    .map(run)
                    .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))
            })?
        };
        total = total.merge(partial);
    }
    let checks = total.tally.entries();
    let failures = checks.iter().map(|c| c.failures).sum();
    Ok(SweepSummary {
        posets: posets_by_size.iter().sum(),
        posets_by_size,
        edges: total.edges,
        traces: total.traces,
        maps: total.maps,
        checks,
        failures,
        failure_examples: total.failures,
        greedy_order_mismatches: total.greedy_mismatches,
        non_monotone_contractions: total.non_monotone_contractions,
        decomposable_non_monotone_maps: total.decomposable_non_monotone,
    })
}

fn check_poset(
    p: &FinitePoset,
    config: &SweepConfig,
    seed: u64,
    small: &[Arc<FinitePoset>],
) -> Result<Partial> {
    let mut out = Partial::default();
    let x = Arc::new(p.clone());
    if config.checks.contains(&SweepCheck::Poset) {
        poset_checks(&x, &mut out)?;
    }
    if config.checks.contains(&SweepCheck::Edge) {
        for &e in x.covers() {
            out.edges += 1;
            edge_checks(&x, e, &mut out)?;
        }
    }
    if config.checks.contains(&SweepCheck::Trace) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = random_trace(x.clone(), usize::MAX, &mut rng)?;
        out.traces += 1;
        let ledger = verify_trace(&trace)?;
        out.absorb_ledger(&x, "trace.", &ledger);
    }
    if config.checks.contains(&SweepCheck::Monotone) && x.len() <= MONOTONE_SWEEP_LIMIT {
        for y in small.iter().filter(|y| y.len() <= x.len()) {
            monotone_checks(&x, y, &mut out)?;
        }
    }
    Ok(out)
}

fn poset_checks(x: &Arc<FinitePoset>, out: &mut Partial) -> Result<()> {
    let n = x.len();
    let dictionary = (0..n).all(|a| {
        (0..n).all(|b| x.leq(a, b) == x.min_open(a).is_subset(&x.min_open(b)))
    });
    out.check(x, "order_topology_dictionary", dictionary, || "x <= y disagrees with U_x ⊆ U_y".into());

    let reduction = covers_are_transitive_reduction(x);
    out.check(x, "covers_transitive_reduction", reduction, || {
        format!("covers {:?}", x.covers())
    });

    let core = x.core()?;
    let core_space = Arc::new(core.core.clone());
    let hx = space_homology(x)?;
    let hc = space_homology(&core_space)?;
    let ok = core_space.beat_points().is_empty() && hx.trimmed_betti() == hc.trimmed_betti()
        && (0..hx.torsion.len().max(hc.torsion.len())).all(|r| hx.torsion_at(r) == hc.torsion_at(r));
    out.check(x, "core_homology", ok, || format!("H(X) {hx:?}, H(core) {hc:?}"));

    let g_min = is_g_minimal(x)?;
    out.check(x, "g_minimal_implies_minimal", !g_min || is_minimal(x), || {
        "g-minimal space with a beat point".into()
    });

    let oc = order_complex(x)?;
    let euler_chain: i64 = oc
        .counts()
        .iter()
        .enumerate()
        .map(|(r, &c)| if r % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    let euler_betti: i64 = hx
        .betti
        .iter()
        .enumerate()
        .map(|(r, &b)| if r % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    out.check(x, "euler_characteristic", euler_chain == euler_betti, || {
        format!("chains {euler_chain}, betti {euler_betti}")
    });

    if x.is_connected_space() && x.len() > 1 {
        let point = Arc::new(FinitePoset::chain(1));
        let f = PointMap::constant(x.clone(), point, 0)?;
        let fwd = betti_report(&decompose_with(&f, EdgeOrder::Lexicographic)?)?;
        let rev = betti_report(&decompose_with(&f, EdgeOrder::ReverseLexicographic)?)?;
        let multiset = |r: &BettiReport| {
            let mut v: Vec<Vec<usize>> = r.steps.iter().map(|s| s.cokernel.homology.trimmed_betti()).collect();
            v.sort();
            v
        };
        if multiset(&fwd) != multiset(&rev) {
            out.greedy_mismatches += 1;
        }
    }
    Ok(())
}

fn covers_are_transitive_reduction(x: &FinitePoset) -> bool {
    let n = x.len();
    let closure = |edges: &[(usize, usize)]| {
        let mut reach = vec![false; n * n];
        for &(a, b) in edges {
            reach[b * n + a] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i * n + k] {
                    for j in 0..n {
                        if reach[k * n + j] {
                            reach[i * n + j] = true;
                        }
                    }
                }
            }
        }
        reach
    };
    let full = closure(x.covers());
    let strict_matches = (0..n).all(|i| (0..n).all(|j| full[i * n + j] == x.lt(i, j)));
    let minimal = x.covers().iter().enumerate().all(|(k, &(a, b))| {
        let mut rest = x.covers().to_vec();
        rest.remove(k);
        !closure(&rest)[b * n + a]
    });
    strict_matches && minimal
}

fn edge_checks(x: &Arc<FinitePoset>, e: (usize, usize), out: &mut Partial) -> Result<()> {
    let (a, b) = e;
    let edge_name = format!("({},{})", x.label(a), x.label(b));
    let ec = contract_edge(x, e)?;
    let xe = ec.result();
    let kappa = ec.kappa();

    let shared: Vec<usize> = (0..x.len())
        .filter(|&z| kappa.apply(z) == ec.merged())
        .collect();
    out.check(
        x,
        "contraction_quotient",
        xe.len() + 1 == x.len() && kappa.is_surjective() && shared == [a.min(b), a.max(b)],
        || format!("edge {edge_name}"),
    );
    let fibers_connected = kappa.is_continuous()
        && kappa.fibers().iter().all(|fib| x.is_connected(fib));
    out.check(x, "contraction_fibers_connected", fibers_connected, || {
        format!("edge {edge_name}")
    });
    if !kappa.is_monotone_exhaustive()? {
        out.non_monotone_contractions += 1;
    }
    let preimages_ok = preimage_formulas_hold(x, &ec);
    out.check(x, "preimage_formulas", preimages_ok, || format!("edge {edge_name}"));

    let trace = ContractionTrace::from_edges(x.clone(), &[e])?;
    let ledger = verify_trace(&trace)?;
    for name in [
        "kernel_acyclic",
        "step_cokernel_degree0_zero",
        "step_betti_identity",
        "homological_dimension_nonincreasing",
        "degreewise_exactness",
        "chain_maps_commute",
    ] {
        let entry = ledger.get(name).expect("trace check present");
        out.check(x, &format!("edge.{name}"), entry.passed, || {
            format!("edge {edge_name}: {}", entry.counterexample.clone().unwrap_or_default())
        });
    }

    let tc = TraceChains::new(&trace)?;
    let cokernel = homology(&tc.step_cokernel(1).complex)?;
    if beat_edge_whe(x, e)? {
        out.check(x, "beat_edge_quasi_iso", cokernel.is_zero(), || {
            format!("edge {edge_name}: cokernel homology {cokernel:?}")
        });
    }
    if whe_criterion(x, e)?.is_guaranteed() {
        out.check(x, "whe_criterion_quasi_iso", cokernel.is_zero(), || {
            format!("edge {edge_name}: cokernel homology {cokernel:?}")
        });
    }

    // Contraction inside X(e): every simplex of the contracted star lifts,
    // and both spaces are contractible.
    let elems: Vec<usize> = edge_subspace_elements(x, e)?.into_iter().collect();
    let xe_sub = Arc::new(x.induced(&elems));
    let pos = |z: usize| elems.iter().position(|&w| w == z).expect("edge endpoints in X(e)");
    let sub_ec = contract_edge(&xe_sub, (pos(a), pos(b)))?;
    let star_oc = order_complex(sub_ec.result())?;
    let lifter = Lifter::new(&xe_sub, sub_ec.kappa().images(), sub_ec.result().len());
    let all_lift = (0..star_oc.degrees())
        .all(|r| star_oc.simplices(r).iter().all(|s| lifter.lifts(s)));
    let star_is_star = star_of(sub_ec.result(), sub_ec.merged()).len() == sub_ec.result().len();
    out.check(x, "star_lift_surjective", all_lift && star_is_star, || {
        format!("edge {edge_name}")
    });
    let contractible = xe_sub.is_contractible()? && sub_ec.result().is_contractible()?;
    out.check(x, "edge_subspace_contractible", contractible, || format!("edge {edge_name}"));

    // 𝒞_e is generated by the degenerate chains (containing both endpoints)
    // and their boundaries.
    let ker = tc.kernel(1)?;
    let oc = tc.order_complex(0);
    let mut generated = true;
    for r in 0..oc.degrees() {
        let mut gens: Vec<Vec<(usize, i64)>> = Vec::new();
        for (j, s) in oc.simplices(r).iter().enumerate() {
            if s.contains(&a) && s.contains(&b) {
                gens.push(vec![(j, 1)]);
            }
        }
        if r + 1 < oc.degrees() {
            let d = oc.boundary(r + 1);
            for (j, s) in oc.simplices(r + 1).iter().enumerate() {
                if s.contains(&a) && s.contains(&b) {
                    gens.push(d.column(j).to_vec());
                }
            }
        }
        let g = crate::matrix::IntegerMatrix::from_columns(oc.simplices(r).len(), gens)?;
        let snf = smith_normal_form(&g)?;
        let in_kernel = tc.induced_map(1).matrix(r).mul(&g)?.is_zero();
        generated &= in_kernel && snf.rank() == ker.basis[r].len() && snf.torsion().is_empty();
    }
    out.check(x, "kernel_generated_by_edge_chains", generated, || format!("edge {edge_name}"));
    Ok(())
}

fn star_of(space: &FinitePoset, x: usize) -> ElementSet {
    crate::contraction::star(space, x)
}

fn preimage_formulas_hold(x: &FinitePoset, ec: &crate::contraction::EdgeContraction) -> bool {
    let (a, b) = ec.edge();
    let xe = ec.result();
    let kappa = ec.kappa();
    let e = ec.merged();
    (0..x.len()).all(|z| {
        let kz = kappa.apply(z);
        let open = kappa.preimage(&xe.min_open(kz));
        let mut expected_open = x.min_open(z);
        if xe.leq(e, kz) {
            expected_open.extend(x.min_open(a));
        }
        let closed = kappa.preimage(&xe.closure_of(kz));
        let mut expected_closed = x.closure_of(z);
        if xe.leq(kz, e) {
            expected_closed.extend(x.closure_of(b));
        }
        open == expected_open && closed == expected_closed
    })
}

fn monotone_checks(x: &Arc<FinitePoset>, y: &Arc<FinitePoset>, out: &mut Partial) -> Result<()> {
    let (n, m) = (x.len(), y.len());
    let mut img = vec![0usize; n];
    loop {
        let f = PointMap::new(x.clone(), y.clone(), img.clone())?;
        if f.is_surjective() && f.is_continuous() {
            out.maps += 1;
            let exhaustive = f.is_monotone_exhaustive()?;
            let fast = f.is_monotone()?;
            out.check(x, "monotone_fast_path_agrees", fast == exhaustive, || {
                format!("map {img:?} onto {:?}: fast {fast}, exhaustive {exhaustive}", y)
            });
            let decomposes = decompose(&f).is_ok();
            out.check(x, "monotone_implies_decomposes", decomposes || !exhaustive, || {
                format!("map {img:?} onto {:?}", y)
            });
            if decomposes && !exhaustive {
                out.decomposable_non_monotone += 1;
            }
        }
        // Next assignment in base m.
        let mut k = 0;
        while k < n {
            img[k] += 1;
            if img[k] < m {
                break;
            }
            img[k] = 0;
            k += 1;
        }
        if k == n {
            return Ok(());
        }
    }
}

/// Aggregated ledgers from seeded random posets with full traces to a point.
#[derive(Clone, Debug, Serialize)]
pub struct RandomTraceSummary {
    pub traces: usize,
    pub checks: Vec<CheckEntry>,
    pub failures: usize,
}

impl RandomTraceSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// `count` random connected posets with `1..=max_n` elements, each contracted
/// along a random trace down to a point and verified.
pub fn random_trace_suite(count: usize, max_n: usize, seed: u64, jobs: usize) -> Result<RandomTraceSummary> {
    let run = |k: usize| -> Result<Tally> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let n = rng.random_range(1..=max_n.max(1));
        let x = Arc::new(random_connected_poset(n, DEFAULT_EDGE_PROBABILITY, &mut rng));
        let trace = random_trace(x, usize::MAX, &mut rng)?;
        let ledger = verify_trace(&trace)?;
        let mut t = Tally::default();
        for e in &ledger.entries {
            t.declare(&e.name);
            let s = t.stats.get_mut(&e.name).expect("declared");
            s.0 += e.evaluated;
            s.1 += e.failures;
            if !e.passed {
                s.2 = Some(format!("trace {k}: {}", e.counterexample.clone().unwrap_or_default()));
            }
        }
        Ok(t)
    };
    let merge = |mut a: Tally, b: Tally| {
        a.merge(b);
        a
    };
    let tally = if jobs <= 1 {
        (0..count).map(run).try_fold(Tally::default(), |acc, t| t.map(|t| merge(acc, t)))?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(run)
                .try_reduce(Tally::default, |a, b| Ok(merge(a, b)))
        })?
    };
    let checks = tally.entries();
    let failures = checks.iter().map(|c| c.failures).sum();
    Ok(RandomTraceSummary {
        traces: count,
        checks,
        failures,
    })
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

    #[test]
    fn identity_report() {
        let f = PointMap::identity(circle());
        let r = betti_decomposition(&f).unwrap();
        assert!(r.steps.is_empty());
        assert!(r.passes());
        let ledger = verify_trace(&decompose(&f).unwrap()).unwrap();
        assert!(ledger.all_passed());
        assert_eq!(ledger.entries.len(), TRACE_CHECKS.len());
    }

    #[test]
    fn circle_to_point_report() {
        let point = Arc::new(FinitePoset::chain(1));
        let f = PointMap::constant(circle(), point, 0).unwrap();
        let r = betti_decomposition(&f).unwrap();
        assert_eq!(r.source.betti, vec![1, 1]);
        assert_eq!(r.target.betti, vec![1]);
        let b2: Vec<usize> = r.steps.iter().map(|s| s.cokernel.homology.betti_at(2)).collect();
        assert_eq!(b2.iter().sum::<usize>(), 1);
        assert_eq!(b2.iter().filter(|&&b| b == 1).count(), 1);
        assert!(r.passes());
        // Every point of the end space lifts, so the composite cokernel is
        // zero while H_1 of the circle survives in the composite kernel.
        let last = &r.steps.last().unwrap().cumulative;
        assert!(last.dims.iter().all(|&d| d == 0));
        let ledger = verify_trace(&decompose(&f).unwrap()).unwrap();
        let failed: Vec<&str> = ledger.failures().map(|e| e.name.as_str()).collect();
        assert_eq!(
            failed,
            ["kernel_acyclic", "cumulative_cokernel_additivity", "end_to_end_betti_identity"]
        );
        let k = ledger.get("kernel_acyclic").unwrap();
        assert_eq!(k.failures, 2);
        assert!(ledger.get("step_betti_identity").unwrap().passed);
        assert!(ledger.get("betti_sum_formula").unwrap().passed);
        let sum = ledger.get("acyclic_target_betti_sum").unwrap();
        assert!(sum.passed && !sum.vacuous);
    }

    #[test]
    fn contractible_trace_passes_everything() {
        let x = Arc::new(FinitePoset::chain(4));
        let point = Arc::new(FinitePoset::chain(1));
        let f = PointMap::constant(x, point, 0).unwrap();
        let ledger = verify_trace(&decompose(&f).unwrap()).unwrap();
        assert!(ledger.all_passed(), "{ledger:#?}");
    }

    #[test]
    fn sweep_guard() {
        let cfg = SweepConfig {
            max_n: 7,
            ..Default::default()
        };
        assert!(matches!(sweep(&cfg), Err(Error::SweepTooLarge { .. })));
    }

    #[test]
    fn tiny_sweep() {
        let s = sweep(&SweepConfig {
            max_n: 3,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(s.posets_by_size, vec![1, 3, 19]);
        assert!(s.passed(), "{:#?}", s.failure_examples);
    }
}
