//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use monohom::chains::ChainComplex;
use monohom::cli::run;
use monohom::enumerate::count_labeled_posets;
use monohom::{
    contract_edge, contraction_cokernel, factorization_report, homology, random_trace_suite,
    smith_normal_form, space_homology, sweep, FinitePoset, IntegerMatrix, PointMap, SweepCheck,
    SweepConfig,
};

const FAST_LIMIT: Duration = Duration::from_secs(1);
const SWEEP_TIME_LIMIT: Duration = Duration::from_secs(300);
const SWEEP_MAX_N: usize = 5;
const EXPECTED_COUNTS: [usize; 5] = [1, 3, 19, 219, 4231];
const RANDOM_TRACES: usize = 1000;
const RANDOM_MAX_N: usize = 10;
const RANDOM_SEED: u64 = 20_240_601;
const MONOTONE_MAX_N: usize = 4;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn example_space(extra: &[(&str, &str)]) -> Arc<FinitePoset> {
    let mut rel = vec![("b", "a"), ("t", "a"), ("b", "s")];
    rel.extend_from_slice(extra);
    Arc::new(FinitePoset::build(&["a", "b", "s", "t"], &rel).unwrap())
}

fn circle() -> Arc<FinitePoset> {
    Arc::new(
        FinitePoset::build(&["a", "b", "c", "d"], &[("c", "a"), ("d", "a"), ("c", "b"), ("d", "b")])
            .unwrap(),
    )
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let x = example_space(&[]);
    let ec = contract_edge(&x, (0, 1)).map_err(|e| e.to_string())?;
    let r = ec.result();
    let (t, e, s) = (r.index_of("t").unwrap(), ec.merged(), r.index_of("s").unwrap());
    ensure(r.len() == 3 && r.lt(t, e) && r.lt(e, s), || format!("quotient {r:?}"))?;
    let k = contraction_cokernel(&ec).map_err(|e| e.to_string())?;
    let basis = |c: &ChainComplex| -> Vec<Vec<String>> {
        (0..c.degrees()).map(|d| c.labels(d).to_vec()).collect()
    };
    let expected = vec![
        vec![],
        vec!["(t<s)".to_string()],
        vec!["(t<a+b<s)".to_string()],
    ];
    ensure(basis(&k.complex) == expected, || format!("cokernel basis {:?}", basis(&k.complex)))?;

    let y = example_space(&[("t", "s")]);
    let ec2 = contract_edge(&y, (0, 1)).map_err(|e| e.to_string())?;
    let k2 = contraction_cokernel(&ec2).map_err(|e| e.to_string())?;
    let b2 = basis(&k2.complex);
    ensure(
        b2.iter().flatten().all(|l| l != "(t<s)") && b2.iter().flatten().any(|l| l == "(t<a+b<s)"),
        || format!("with t<s the cokernel basis is {b2:?}"),
    )?;
    let t = within(start, FAST_LIMIT)?;
    Ok(format!("t < a+b < s, bases {{(t<s)}} and {{(t<a+b<s)}}, (t<s) lifts once t<s ({t:?})"))
}

fn circle_model() -> Outcome {
    let start = Instant::now();
    let x = circle();
    let hx = space_homology(&x).map_err(|e| e.to_string())?;
    ensure(hx.betti == [1, 1], || format!("b(X) = {:?}", hx.betti))?;
    let ec = contract_edge(&x, (0, 2)).map_err(|e| e.to_string())?;
    let he = space_homology(ec.result()).map_err(|e| e.to_string())?;
    ensure(he.trimmed_betti() == [1], || format!("b(X_e) = {:?}", he.betti))?;
    let hk = homology(&contraction_cokernel(&ec).map_err(|e| e.to_string())?.complex)
        .map_err(|e| e.to_string())?;
    ensure(hk.betti == [0, 0, 1], || format!("b(K_e) = {:?}", hk.betti))?;
    ensure(hx.betti_at(1) == he.betti_at(1) + hk.betti_at(2), || "b_1 formula".into())?;
    let t = within(start, FAST_LIMIT)?;
    Ok(format!("b(X) = (1,1), b(X_e) = (1), b(K_e) = (0,0,1), 1 = 0 + 1 ({t:?})"))
}

fn exhaustive_sweep() -> Outcome {
    let counts: Vec<usize> = (1..=SWEEP_MAX_N).map(count_labeled_posets).collect();
    let oracle: Vec<usize> = (1..=SWEEP_MAX_N).map(common::brute_force_poset_count).collect();
    ensure(counts == EXPECTED_COUNTS && oracle == EXPECTED_COUNTS, || {
        format!("counts {counts:?}, brute force {oracle:?}")
    })?;
    let start = Instant::now();
    let summary = sweep(&SweepConfig {
        max_n: SWEEP_MAX_N,
        checks: vec![SweepCheck::Edge],
        seed: 0,
        jobs: 1,
    })
    .map_err(|e| e.to_string())?;
    let t = within(start, SWEEP_TIME_LIMIT)?;
    ensure(summary.posets_by_size == EXPECTED_COUNTS, || {
        format!("sweep saw {:?}", summary.posets_by_size)
    })?;
    for name in [
        "edge.kernel_acyclic",
        "edge.step_cokernel_degree0_zero",
        "edge.step_betti_identity",
        "edge.homological_dimension_nonincreasing",
        "beat_edge_quasi_iso",
    ] {
        let entry = summary
            .checks
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| format!("{name} missing"))?;
        ensure(entry.passed && entry.evaluated > 0, || {
            format!("{name}: {} failures, e.g. {:?}", entry.failures, entry.counterexample)
        })?;
    }
    Ok(format!(
        "{} posets, {} edges, 0 failures ({t:?})",
        summary.posets, summary.edges
    ))
}

fn random_traces() -> Outcome {
    let start = Instant::now();
    let summary = random_trace_suite(RANDOM_TRACES, RANDOM_MAX_N, RANDOM_SEED, 1)
        .map_err(|e| e.to_string())?;
    let t = within(start, SWEEP_TIME_LIMIT)?;
    let required = [
        "kernel_acyclic",
        "step_betti_identity",
        "step_cokernel_degree0_zero",
        "cumulative_cokernel_additivity",
        "end_to_end_betti_identity",
        "homological_dimension_nonincreasing",
        "degreewise_exactness",
        "acyclic_target_betti_sum",
    ];
    let failing: Vec<String> = required
        .iter()
        .map(|name| summary.checks.iter().find(|c| c.name == *name).expect("check present"))
        .filter(|c| !c.passed)
        .map(|c| {
            format!(
                "{} {}/{} ({})",
                c.name,
                c.failures,
                c.evaluated,
                c.counterexample.clone().unwrap_or_default()
            )
        })
        .collect();
    ensure(failing.is_empty(), || failing.join("; "))?;
    Ok(format!("{} traces, all checks pass ({t:?})", summary.traces))
}

fn monotone_agreement() -> Outcome {
    let start = Instant::now();
    let summary = sweep(&SweepConfig {
        max_n: MONOTONE_MAX_N,
        checks: vec![SweepCheck::Monotone],
        seed: 0,
        jobs: 1,
    })
    .map_err(|e| e.to_string())?;
    let entry = summary
        .checks
        .iter()
        .find(|c| c.name == "monotone_fast_path_agrees")
        .ok_or("agreement check missing")?;
    ensure(entry.passed && entry.evaluated == summary.maps && summary.maps > 0, || {
        format!("{} disagreements, e.g. {:?}", entry.failures, entry.counterexample)
    })?;
    Ok(format!("{} maps, 0 disagreements ({:?})", summary.maps, start.elapsed()))
}

fn torsion() -> Outcome {
    let c = ChainComplex::from_boundaries(vec![
        IntegerMatrix::zeros(0, 1),
        IntegerMatrix::from_rows(&[vec![2]]),
    ])
    .map_err(|e| e.to_string())?;
    let h = homology(&c).map_err(|e| e.to_string())?;
    ensure(h.torsion_at(0) == [2] && h.betti_at(0) == 0, || format!("H = {h:?}"))?;

    let m = [vec![2i64, 0], vec![0, 3]];
    let snf = smith_normal_form(&IntegerMatrix::from_rows(&m)).map_err(|e| e.to_string())?;
    // d_1 = gcd of entries, d_1 d_2 = |det|.
    let d1 = m.iter().flatten().fold(0i64, |g, &x| gcd(g, x.abs()));
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    let expected = vec![d1 as u64, (det / d1) as u64];
    ensure(snf.factors == expected && expected == [1, 6], || format!("factors {:?}", snf.factors))?;
    Ok("H_0 torsion (2); diag(2,3) has factors (1,6)".into())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn factorization() -> Outcome {
    let start = Instant::now();
    let x = circle();
    let y = Arc::new(FinitePoset::chain(2));
    let f = PointMap::from_labels(x.clone(), y, &[("a", "1"), ("b", "1"), ("c", "0"), ("d", "0")])
        .map_err(|e| e.to_string())?;
    let (fac, ledger) = factorization_report(&f).map_err(|e| e.to_string())?;
    ensure(fac.g.is_empty() && fac.z.leq_table() == x.leq_table(), || {
        format!("g contracts {:?}", fac.g.edge_labels())
    })?;
    ensure(fac.h.images() == f.images(), || format!("h = {:?}", fac.h.images()))?;
    ensure(ledger.all_passed(), || format!("{ledger:?}"))?;

    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let arg = |name: &str| data.join(name).to_string_lossy().into_owned();
    let mut out = Vec::new();
    let code = run(
        [
            "monohom".to_string(),
            "--json".into(),
            "monotone".into(),
            "--domain".into(),
            arg("circle.poset"),
            "--codomain".into(),
            arg("two_chain.poset"),
            "--map".into(),
            arg("circle_to_two_chain.map"),
        ],
        &mut out,
        &mut std::io::sink(),
    );
    let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    ensure(code == 0 && v["monotone"] == false && v["witness"] == serde_json::json!(["a", "b"]), || {
        format!("monotone command gave {v}")
    })?;
    let t = within(start, FAST_LIMIT)?;
    Ok(format!("g = identity, h = f with antichain fibers, witness {{a,b}} ({t:?})"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("worked example contraction and cokernel", worked_example),
        ("circle model Betti numbers", circle_model),
        ("exhaustive sweep to 5 elements", exhaustive_sweep),
        ("random trace suite", random_traces),
        ("fast versus exhaustive monotonicity", monotone_agreement),
        ("torsion machinery", torsion),
        ("factorization of circle onto 2-chain", factorization),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
