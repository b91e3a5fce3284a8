//! The `monohom` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input
//! errors. Predicate commands (`monotone`, `gminimal`) report their verdict
//! in the output and exit 0.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::chains::contraction_cokernel;
use crate::contraction::{contract_edge, decompose, is_g_minimal, is_minimal, whe_criterion};
use crate::error::{Error, Result};
use crate::homology::{homology, homological_dimension, space_homology};
use crate::io::{read_map, read_poset, PosetJson};
use crate::map::PointMap;
use crate::poset::FinitePoset;
use crate::verify::{
    betti_report, factorization_report, sweep, verify_trace, BettiReport, CheckLedger, SweepCheck,
    SweepConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "monohom", version, about = "Homology of finite spaces through Hasse-edge contractions")]
pub struct Cli {
    /// Emit JSON on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Elements, relations, Hasse edges, beat points and core size.
    Info { poset: PathBuf },
    /// Integral homology of a poset file.
    Homology { poset: PathBuf },
    /// Contract one Hasse edge and report its cokernel complex.
    Contract {
        poset: PathBuf,
        /// Upper and lower endpoint, e.g. `a,b`.
        #[arg(long, value_parser = parse_edge)]
        edge: (String, String),
    },
    /// Decompose a monotone surjection into edge contractions.
    Decompose(MapArgs),
    /// Decompose and run every exact-sequence check along the trace.
    Verify(MapArgs),
    /// Decide monotonicity of a map.
    Monotone(MapArgs),
    /// Factor a continuous surjection as monotone followed by discrete fibers.
    Factorize(MapArgs),
    /// Whether no single edge contraction is a quasi-isomorphism.
    Gminimal { poset: PathBuf },
    /// Exhaustive checks over every labelled poset up to a size.
    Sweep {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// Comma-separated groups: poset, edge, trace, monotone.
        #[arg(long, value_delimiter = ',', default_value = "poset,edge,monotone")]
        checks: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub codomain: PathBuf,
    #[arg(long)]
    pub map: PathBuf,
}

fn parse_edge(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
            Ok((a.trim().to_string(), b.trim().to_string()))
        }
        _ => Err(format!("expected UPPER,LOWER, got {s:?}")),
    }
}

/// What a command produced: a JSON value, its text rendering and an exit code.
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn new(json: Value, text: String, passed: bool) -> Self {
        Self {
            json,
            text,
            code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn load_map(args: &MapArgs) -> Result<PointMap> {
    let dom = Arc::new(read_poset(&args.domain)?);
    let cod = Arc::new(read_poset(&args.codomain)?);
    read_map(&args.map, dom, cod)
}

fn fmt_list<T: std::fmt::Debug>(v: &[T]) -> String {
    format!("{v:?}")
}

fn names(p: &FinitePoset, set: impl IntoIterator<Item = usize>) -> Vec<String> {
    set.into_iter().map(|x| p.label(x).to_string()).collect()
}

fn ledger_text(out: &mut String, ledger: &CheckLedger) {
    for e in &ledger.entries {
        let status = if !e.passed {
            "FAIL"
        } else if e.vacuous {
            "vacuous"
        } else {
            "ok"
        };
        let _ = write!(out, "  {:<40} {status} ({} evaluated)", e.name, e.evaluated);
        if let Some(c) = &e.counterexample {
            let _ = write!(out, ": {c}");
        }
        out.push('\n');
    }
    for t in &ledger.torsion {
        let _ = writeln!(
            out,
            "  torsion at step {} degree {}: before {:?}, after {:?}, cokernel {:?}",
            t.step, t.degree, t.before, t.after, t.cokernel
        );
    }
}

fn report_text(out: &mut String, r: &BettiReport) {
    let _ = writeln!(out, "source betti {:?}", r.source.betti);
    let _ = writeln!(out, "target betti {:?}", r.target.betti);
    for (i, s) in r.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "step {} contract ({},{}): cokernel dims {:?} betti {:?}, cumulative betti {:?}",
            i + 1,
            s.edge.0,
            s.edge.1,
            s.cokernel.dims,
            s.cokernel.homology.betti,
            s.cumulative.homology.betti
        );
    }
    let _ = writeln!(out, "residuals {:?}", r.residuals);
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Info { poset } => {
            let p = read_poset(poset)?;
            let core = p.core()?;
            let edges: Vec<(String, String)> = p
                .covers()
                .iter()
                .map(|&(a, b)| (p.label(a).to_string(), p.label(b).to_string()))
                .collect();
            let beat = names(&p, p.beat_points());
            let json = json!({
                "elements": p.labels(),
                "relations": p.strict_relation_count(),
                "hasse_edges": edges,
                "beat_points": beat,
                "minimal": is_minimal(&p),
                "core_size": core.core.len(),
            });
            let mut text = String::new();
            let _ = writeln!(text, "elements     {}", p.labels().join(" "));
            let _ = writeln!(text, "relations    {}", p.strict_relation_count());
            let _ = writeln!(
                text,
                "hasse edges  {}",
                edges.iter().map(|(a, b)| format!("{a}>{b}")).collect::<Vec<_>>().join(" ")
            );
            let _ = writeln!(text, "beat points  {}", beat.join(" "));
            let _ = writeln!(text, "minimal      {}", is_minimal(&p));
            let _ = writeln!(text, "core size    {}", core.core.len());
            Ok(Outcome::new(json, text, true))
        }
        Command::Homology { poset } => {
            let p = Arc::new(read_poset(poset)?);
            let h = space_homology(&p)?;
            let hdim = homological_dimension(&p)?;
            let json = json!({ "betti": h.betti, "torsion": h.torsion, "hdim": hdim });
            let text = format!(
                "betti   {}\ntorsion {}\nhdim    {hdim}\n",
                fmt_list(&h.betti),
                fmt_list(&h.torsion)
            );
            Ok(Outcome::new(json, text, true))
        }
        Command::Contract { poset, edge } => {
            let p = Arc::new(read_poset(poset)?);
            let e = (p.index_of(&edge.0)?, p.index_of(&edge.1)?);
            let ec = contract_edge(&p, e)?;
            let cok = contraction_cokernel(&ec)?;
            let h = homology(&cok.complex)?;
            let whe = whe_criterion(&p, e)?;
            let quasi_iso = h.is_zero();
            let result = ec.result();
            let json = json!({
                "result": PosetJson::from_poset(result),
                "merged": result.label(ec.merged()),
                "cokernel_dims": cok.dims(),
                "cokernel_basis": (0..cok.complex.degrees()).map(|r| cok.complex.labels(r).to_vec()).collect::<Vec<_>>(),
                "betti": h.betti,
                "torsion": h.torsion,
                "quasi_iso": quasi_iso,
                "whe_criterion": whe,
            });
            let mut text = String::new();
            let _ = writeln!(text, "result elements {}", result.labels().join(" "));
            let _ = writeln!(
                text,
                "result covers   {}",
                result
                    .covers()
                    .iter()
                    .map(|&(a, b)| format!("{}>{}", result.label(a), result.label(b)))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            let _ = writeln!(text, "cokernel dims   {:?}", cok.dims());
            for r in 0..cok.complex.degrees() {
                if cok.complex.dim(r) > 0 {
                    let _ = writeln!(text, "  degree {r}: {}", cok.complex.labels(r).join(" "));
                }
            }
            let _ = writeln!(text, "cokernel betti  {:?} torsion {:?}", h.betti, h.torsion);
            let _ = writeln!(text, "quasi-iso       {quasi_iso}");
            let _ = writeln!(text, "whe criterion   {whe:?}");
            Ok(Outcome::new(json, text, true))
        }
        Command::Decompose(args) => {
            let f = load_map(args)?;
            let trace = decompose(&f)?;
            let report = betti_report(&trace)?;
            let mut json = to_json(&report);
            json["edges"] = to_json(&trace.edge_labels());
            let mut text = String::new();
            report_text(&mut text, &report);
            Ok(Outcome::new(json, text, report.passes()))
        }
        Command::Verify(args) => {
            let f = load_map(args)?;
            let trace = decompose(&f)?;
            let report = betti_report(&trace)?;
            let ledger = verify_trace(&trace)?;
            let passed = report.passes() && ledger.all_passed();
            let mut json = to_json(&report);
            json["ledger"] = to_json(&ledger);
            let mut text = String::new();
            report_text(&mut text, &report);
            text.push_str("ledger\n");
            ledger_text(&mut text, &ledger);
            Ok(Outcome::new(json, text, passed))
        }
        Command::Monotone(args) => {
            let f = load_map(args)?;
            let witness = f.monotone_witness()?;
            let json = json!({
                "monotone": witness.is_none(),
                "witness": witness.as_ref().map(|w| w.witness().to_vec()),
                "violation": witness,
            });
            let text = match &witness {
                None => "monotone\n".to_string(),
                Some(w) => format!("not monotone: {w}\n"),
            };
            Ok(Outcome::new(json, text, true))
        }
        Command::Factorize(args) => {
            let f = load_map(args)?;
            let (fac, ledger) = factorization_report(&f)?;
            let h_map: Vec<(String, String)> = (0..fac.z.len())
                .map(|z| (fac.z.label(z).to_string(), fac.h.cod().label(fac.h.apply(z)).to_string()))
                .collect();
            let json = json!({
                "steps": fac.g.edge_labels(),
                "z": PosetJson::from_poset(&fac.z),
                "h": h_map,
                "ledger": ledger,
            });
            let mut text = String::new();
            let _ = writeln!(
                text,
                "g contracts {}",
                if fac.g.is_empty() {
                    "nothing (identity)".to_string()
                } else {
                    fac.g
                        .edge_labels()
                        .iter()
                        .map(|(a, b)| format!("({a},{b})"))
                        .collect::<Vec<_>>()
                        .join(" ")
                }
            );
            let _ = writeln!(text, "Z elements  {}", fac.z.labels().join(" "));
            for (z, y) in &h_map {
                let _ = writeln!(text, "h: {z} -> {y}");
            }
            ledger_text(&mut text, &ledger);
            Ok(Outcome::new(json, text, ledger.all_passed()))
        }
        Command::Gminimal { poset } => {
            let p = Arc::new(read_poset(poset)?);
            let g = is_g_minimal(&p)?;
            let json = json!({ "g_minimal": g, "minimal": is_minimal(&p) });
            let text = format!("g-minimal {g}\nminimal   {}\n", is_minimal(&p));
            Ok(Outcome::new(json, text, true))
        }
        Command::Sweep {
            max_n,
            checks,
            seed,
            jobs,
        } => {
            let checks = checks
                .iter()
                .map(|c| {
                    SweepCheck::parse(c.trim())
                        .ok_or_else(|| Error::Io(format!("unknown check group {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let summary = sweep(&SweepConfig {
                max_n: *max_n,
                checks,
                seed: *seed,
                jobs: (*jobs).max(1),
            })?;
            let mut text = String::new();
            let _ = writeln!(text, "posets by size {:?}", summary.posets_by_size);
            let _ = writeln!(
                text,
                "posets {}, edges {}, traces {}, maps {}",
                summary.posets, summary.edges, summary.traces, summary.maps
            );
            for c in &summary.checks {
                let _ = writeln!(text, "  {:<40} {} / {} failed", c.name, c.failures, c.evaluated);
            }
            let _ = writeln!(text, "greedy order mismatches {}", summary.greedy_order_mismatches);
            let _ = writeln!(text, "non-monotone contractions {}", summary.non_monotone_contractions);
            let _ = writeln!(
                text,
                "decomposable non-monotone maps {}",
                summary.decomposable_non_monotone_maps
            );
            let _ = writeln!(text, "failures {}", summary.failures);
            Ok(Outcome::new(to_json(&summary), text, summary.passed()))
        }
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut impl std::io::Write, stderr: &mut impl std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
            } else {
                let _ = write!(stdout, "{e}");
            }
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                let _ = write!(stdout, "{}", out.text);
            }
            out.code
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", json!({ "error": e.to_string() }));
            }
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::NotMonotone(_) | Error::DiscreteFiberViolation { .. } => EXIT_CHECK_FAILED,
                _ => EXIT_INPUT_ERROR,
            }
        }
    }
}
