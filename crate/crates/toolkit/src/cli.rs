//! Command dispatch. Every verb prints JSON (or DOT) and maps its outcome
//! to an exit code: 0 ok or proof, 1 checked and failed, 2 malformed input.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use resetproof_core::automata::{board_bound, build_buchi, build_safra_automaton, published_board_bound};
use resetproof_core::gtc::{check_gtc, GtcError, Product, Verdict};
use resetproof_core::proof::{NodeLasso, Retarget};
use resetproof_core::reset::{check_reset_condition, strip, validate_reset_proof, ResetError, ResetVerdict};
use resetproof_core::search::{annotate, default_k, expand, SearchError};
use resetproof_core::Address;
use serde_json::{json, Value};

use crate::bundle::{Body, Bundle, Loaded};
use crate::dot::to_dot;

pub const OK: u8 = 0;
pub const FAILED: u8 = 1;
pub const MALFORMED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "resetproof", version, about = "Check, translate and inspect cyclic proof bundles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RetargetArg {
    /// the fresh bud points to the unfolded bud itself
    New,
    /// the fresh bud keeps the old companion
    Old,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the preproof (or reset preproof) invariants
    Validate { file: PathBuf },
    /// Decide the global trace condition
    CheckGtc { file: PathBuf },
    /// Validate a reset bundle and check the reset condition
    CheckReset { file: PathBuf },
    /// Forget boards and structural steps of a reset bundle
    Strip {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Annotate a proof with greedy boards and expand it into a reset proof
    Annotate {
        file: PathBuf,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lasso membership in the Büchi automaton over the bundle's morphisms
    LassoBuchi {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<usize>,
        #[arg(long = "loop", value_delimiter = ',', required = true)]
        lp: Vec<usize>,
    },
    /// Lasso membership in the Safra automaton over the bundle's morphisms
    LassoRabin {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<usize>,
        #[arg(long = "loop", value_delimiter = ',', required = true)]
        lp: Vec<usize>,
    },
    /// Unfold the preproof once at a bud
    Unfold {
        file: PathBuf,
        #[arg(long)]
        bud: String,
        #[arg(long, value_enum, default_value = "new")]
        retarget: RetargetArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graphviz rendering of the proof graph
    ExportDot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sizes of the proof, its automata and the board bounds
    Info {
        file: PathBuf,
        #[arg(long = "K")]
        k: Option<u32>,
    },
}

/// An outcome: exit code plus the JSON document printed for it.
struct Outcome(u8, Value);

fn malformed(msg: impl ToString) -> Outcome {
    Outcome(MALFORMED, json!({ "error": msg.to_string() }))
}

fn lasso_json(l: &NodeLasso) -> Value {
    let addrs = |v: &[Address]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>();
    json!({ "prefix": addrs(&l.prefix), "cycle": addrs(&l.cycle) })
}

fn load(path: &Path) -> Result<Loaded, Outcome> {
    let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    Bundle::from_json(&text).and_then(|b| b.load()).map_err(malformed)
}

fn plain_of(l: &Loaded) -> Result<resetproof_core::Preproof, Outcome> {
    match &l.body {
        Body::Plain(p) => Ok(p.clone()),
        Body::Reset(rp) => strip(&l.system, rp).map_err(malformed),
    }
}

fn write_output(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => writeln!(out, "{text}"),
    }
}

/// Parses `args` (including the program name) and runs one verb.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { MALFORMED } else { OK };
            if e.use_stderr() {
                write!(err, "{e}")?;
            } else {
                write!(out, "{e}")?;
            }
            return Ok(code);
        }
    };
    let Outcome(code, doc) = match dispatch(cli.cmd, out, err)? {
        Ok(o) | Err(o) => o,
    };
    if !doc.is_null() {
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
    }
    Ok(code)
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<Result<Outcome, Outcome>> {
    Ok(match cmd {
        Cmd::Validate { file } => validate(&file),
        Cmd::CheckGtc { file } => check_gtc_verb(&file),
        Cmd::CheckReset { file } => check_reset(&file),
        Cmd::Strip { file, output } => match load(&file).and_then(|l| {
            let rp = l.reset().ok_or_else(|| malformed("strip expects a reset bundle"))?.clone();
            let p = strip(&l.system, &rp).map_err(malformed)?;
            Ok(Bundle::from_plain(l.instance, &l.system, &l.iota, &p))
        }) {
            Ok(b) => {
                write_output(&output, &b.to_json(), out)?;
                Ok(Outcome(OK, Value::Null))
            }
            Err(o) => Err(o),
        },
        Cmd::Annotate { file, k, max_depth, output } => match annotate_verb(&file, k, max_depth) {
            Ok((bundle, report)) => {
                write_output(&output, &bundle.to_json(), out)?;
                let report = serde_json::to_string_pretty(&report).expect("json");
                if output.is_some() {
                    writeln!(out, "{report}")?;
                } else {
                    writeln!(err, "{report}")?;
                }
                Ok(Outcome(OK, Value::Null))
            }
            Err(o) => Err(o),
        },
        Cmd::LassoBuchi { file, prefix, lp } => load(&file).and_then(|l| {
            let aut = build_buchi(&l.iota.algebra, l.morphisms.clone());
            let acc = aut.accepts_lasso(&prefix, &lp).map_err(malformed)?;
            Ok(Outcome(if acc { OK } else { FAILED }, json!({ "accepted": acc, "states": aut.state_count() })))
        }),
        Cmd::LassoRabin { file, prefix, lp } => load(&file).and_then(|l| {
            let first = *prefix.first().or(lp.first()).ok_or_else(|| malformed("empty lasso"))?;
            let start = l.morphisms.get(first).ok_or_else(|| malformed(format!("unknown letter {first}")))?.dom();
            let objects = l.iota.objects().map(|(_, o)| o.obj).collect();
            let aut = build_safra_automaton(&l.iota.algebra, &objects, l.morphisms.clone(), start).map_err(malformed)?;
            let acc = aut.accepts_lasso(&prefix, &lp).map_err(malformed)?;
            Ok(Outcome(
                if acc { OK } else { FAILED },
                json!({ "accepted": acc, "K": aut.k(), "pairs": aut.pair_count(), "states": aut.known_states() }),
            ))
        }),
        Cmd::Unfold { file, bud, retarget, output } => match load(&file).and_then(|l| {
            let p = l.plain().ok_or_else(|| malformed("unfold expects a plain bundle"))?;
            let t = Address::parse(&bud).ok_or_else(|| malformed(format!("bad address {bud}")))?;
            let rt = match retarget {
                RetargetArg::New => Retarget::NewBud,
                RetargetArg::Old => Retarget::OldCompanion,
            };
            let q = p.unfold_at(&t, rt).map_err(malformed)?;
            Ok(Bundle::from_plain(l.instance, &l.system, &l.iota, &q))
        }) {
            Ok(b) => {
                write_output(&output, &b.to_json(), out)?;
                Ok(Outcome(OK, Value::Null))
            }
            Err(o) => Err(o),
        },
        Cmd::ExportDot { file, output } => match load(&file) {
            Ok(l) => {
                write_output(&output, to_dot(&l).trim_end(), out)?;
                Ok(Outcome(OK, Value::Null))
            }
            Err(o) => Err(o),
        },
        Cmd::Info { file, k } => info(&file, k),
    })
}

fn validate(file: &Path) -> Result<Outcome, Outcome> {
    let l = load(file)?;
    let res = match &l.body {
        Body::Plain(p) => p
            .validate(&l.system)
            .map_err(|v| json!({ "error": v.to_string(), "at": v.address.to_string() }))
            .and_then(|_| l.iota.check_proof(p).map_err(|e| json!({ "error": e.to_string() }))),
        Body::Reset(rp) => validate_reset_proof(&l.system, &l.iota, rp).map_err(|e| match &e {
            ResetError::IllegalTransition { at, .. } => json!({ "error": e.to_string(), "at": at.to_string() }),
            ResetError::InvalidPreproof(v) => json!({ "error": e.to_string(), "at": v.address.to_string() }),
            _ => json!({ "error": e.to_string() }),
        }),
    };
    let (nodes, buds) = match &l.body {
        Body::Plain(p) => (p.len(), p.beta().len()),
        Body::Reset(r) => (r.len(), r.beta().len()),
    };
    match res {
        Ok(()) => Ok(Outcome(OK, json!({ "valid": true, "nodes": nodes, "buds": buds }))),
        Err(doc) => Err(Outcome(MALFORMED, doc)),
    }
}

fn check_gtc_verb(file: &Path) -> Result<Outcome, Outcome> {
    let l = load(file)?;
    let p = plain_of(&l)?;
    match check_gtc(&p, &l.iota) {
        Ok(Verdict::Proof) => Ok(Outcome(OK, json!({ "verdict": "proof" }))),
        Ok(Verdict::Counterexample(lasso)) => {
            Ok(Outcome(FAILED, json!({ "verdict": "counterexample", "lasso": lasso_json(&lasso) })))
        }
        Err(e @ GtcError::OpenLeaves(_)) | Err(e @ GtcError::Invalid(_)) | Err(e @ GtcError::InterpretationMismatch(_)) => {
            Err(malformed(e))
        }
    }
}

fn check_reset(file: &Path) -> Result<Outcome, Outcome> {
    let l = load(file)?;
    let rp = l.reset().ok_or_else(|| malformed("check-reset expects a reset bundle"))?;
    match check_reset_condition(&l.system, &l.iota, rp) {
        Ok(ResetVerdict::Proof(inv)) => {
            let inv: serde_json::Map<String, Value> = inv.iter().map(|(t, th)| (t.to_string(), json!(th))).collect();
            Ok(Outcome(OK, json!({ "verdict": "proof", "invariants": inv })))
        }
        Ok(ResetVerdict::FailingBud(t)) => Ok(Outcome(FAILED, json!({ "verdict": "failing-bud", "bud": t.to_string() }))),
        Err(ResetError::IllegalTransition { at, kind, detail }) => Ok(Outcome(
            FAILED,
            json!({ "verdict": "illegal-step", "at": at.to_string(), "kind": kind, "detail": detail }),
        )),
        Err(e) => Err(malformed(e)),
    }
}

fn annotate_verb(file: &Path, k: Option<u32>, max_depth: Option<usize>) -> Result<(Bundle, Value), Outcome> {
    let l = load(file)?;
    let p = l.plain().ok_or_else(|| malformed("annotate expects a plain bundle"))?;
    let k = k.unwrap_or_else(|| default_k(p, &l.iota));
    let an = match annotate(p, &l.iota, k, max_depth) {
        Ok(an) => an,
        Err(SearchError::GtcFails) => {
            let lasso = match check_gtc(p, &l.iota) {
                Ok(Verdict::Counterexample(lasso)) => lasso_json(&lasso),
                _ => Value::Null,
            };
            return Err(Outcome(FAILED, json!({ "error": "the preproof fails the trace condition", "lasso": lasso })));
        }
        Err(e @ SearchError::DepthExceeded(_)) => return Err(Outcome(FAILED, json!({ "error": e.to_string() }))),
        Err(e) => return Err(malformed(e)),
    };
    let rp = expand(&an.proof).map_err(malformed)?;
    let chips: BTreeSet<u32> = rp.nodes().values().flat_map(|n| n.label.board.control().to_vec()).collect();
    let invariants = match check_reset_condition(&l.system, &l.iota, &rp) {
        Ok(ResetVerdict::Proof(inv)) => inv.iter().map(|(t, th)| (t.to_string(), json!(th))).collect(),
        _ => serde_json::Map::new(),
    };
    let r = &an.report;
    let report = json!({
        "K": k,
        "input_nodes": r.input_nodes,
        "search_nodes": r.output_nodes,
        "reset_nodes": rp.len(),
        "depth": r.depth,
        "product_states": r.product_states,
        "reachable_boards": r.reachable_boards,
        "bound": r.bound(),
        "closures": r.closures,
        "chips_used": chips,
        "invariants": invariants,
    });
    Ok((Bundle::from_reset(l.instance, &l.system, &l.iota, &rp), report))
}

fn info(file: &Path, k: Option<u32>) -> Result<Outcome, Outcome> {
    let l = load(file)?;
    let p = plain_of(&l)?;
    let alg = &l.iota.algebra;
    let k = k.unwrap_or_else(|| default_k(&p, &l.iota));
    let x = l.iota.objects().map(|(_, o)| o.obj.size).max().unwrap_or(0);
    let product = Product::build(&p, &l.iota).map_err(malformed)?;
    let buchi = build_buchi(alg, product.letters.list.clone());
    Ok(Outcome(
        OK,
        json!({
            "instance": l.instance,
            "nodes": p.len(),
            "buds": p.beta().len(),
            "sequents": l.system.sequent_count(),
            "rules": l.system.rule_count(),
            "morphisms": l.morphisms.len(),
            "algebra": { "elements": alg.len(), "alpha": alg.alpha().0 },
            "K": k,
            "largest_object": x,
            "letters": product.letters.list.len(),
            "buchi_states": buchi.state_count(),
            "rabin_pairs": product.automaton.pair_count(),
            "rabin_states_explored": product.automaton.known_states(),
            "product_states": product.nodes.len(),
            "board_bound": board_bound(alg, k, x),
            "published_board_bound": published_board_bound(alg, k, x),
        }),
    ))
}
