//! Command line front end: run machines, dovetail batches, probe operators,
//! transform programs, and work with ordinal codes.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad programs, failed
//! decodes, operator mismatches), 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ittm::classify::{classify_operator, CorpusParams};
use ittm::codes::{decode_order_type, encode_ordinal, encode_ordinal_at, DecodeOutcome, Real};
use ittm::harness::{dovetail, harvest_constants};
use ittm::machine::{Program, RunOptions, RunOutcome, RunReport, Runner, TapeTriple};
use ittm::operator::LimitOperator;
use ittm::transform::{emulate_limsup_in_n, encode_n_in_2};
use ittm::{Ordinal, WordExpr};

#[derive(Parser)]
#[command(name = "ittm", version, about = "Transfinite machine workbench")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one program under a limit operator.
    Run {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        op: String,
        /// Stop once this stage is reached (ordinal in CNF syntax, e.g. w*4).
        #[arg(long)]
        horizon: Option<String>,
        #[arg(long, default_value_t = 200_000)]
        fuel: u64,
        #[arg(long, default_value_t = 2_000)]
        max_limits: u64,
        /// Disable limit-stage acceleration.
        #[arg(long)]
        no_accelerate: bool,
        /// Disable loop certificates.
        #[arg(long)]
        no_certify: bool,
    },
    /// Run every .tm program in a directory on a shared stage clock.
    Dovetail {
        #[arg(long)]
        programs: PathBuf,
        #[arg(long)]
        op: String,
        #[arg(long)]
        horizon: Option<String>,
        #[arg(long, default_value_t = 200_000)]
        fuel: u64,
        /// Region convention for reading ordinal codes off tapes.
        #[arg(long, default_value_t = 64)]
        region: u64,
    },
    /// Probe a limit operator for its structural properties.
    Classify {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 2000)]
        count: usize,
    },
    /// Rewrite a 2-symbol program for an n-symbol priority operator.
    Emulate {
        #[arg(long)]
        program: PathBuf,
        #[arg(long = "to-n")]
        to_n: u8,
        #[arg(long)]
        op: String,
    },
    /// Rewrite an n-symbol program over blocks of 2 symbols.
    Encode2 {
        #[arg(long)]
        program: PathBuf,
    },
    /// Contract a word expression (letters are digits, e.g. "(10)^w").
    Contract { word: String },
    /// Encode an ordinal below w^3 as a relation real.
    Encode {
        ordinal: String,
        /// Use a fixed region instead of the ordinal's own.
        #[arg(long)]
        region: Option<u64>,
    },
    /// Decode a relation real back to an ordinal.
    Decode {
        #[arg(long)]
        real: String,
        #[arg(long)]
        region: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), String> {
    match &cli.cmd {
        Cmd::Run { program, op, horizon, fuel, max_limits, no_accelerate, no_certify } => {
            let p = load_program(program)?;
            let op = parse_op(op)?;
            let opts = RunOptions {
                horizon: horizon.as_deref().map(parse_ordinal).transpose()?,
                fuel: *fuel,
                max_limits: *max_limits,
                accelerate: !no_accelerate,
                certify_loops: !no_certify,
                ..RunOptions::default()
            };
            let report = Runner::new(p.clone(), op, opts).run(TapeTriple::zeros());
            if cli.json {
                println!("{}", to_json_pretty(&run_json(&report, &p)));
            } else {
                for entry in &report.trace {
                    println!("{}", entry.render(&p));
                }
                println!("outcome: {}", outcome_text(&report.outcome));
                println!("final: state={} tapes={}", p.state_name(report.state), report.tapes);
            }
            Ok(())
        }
        Cmd::Dovetail { programs, op, horizon, fuel, region } => {
            let mut entries: Vec<(String, Program)> = Vec::new();
            let dir = fs::read_dir(programs)
                .map_err(|e| format!("cannot read {}: {e}", programs.display()))?;
            let mut paths: Vec<PathBuf> = dir
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "tm"))
                .collect();
            paths.sort();
            for path in &paths {
                entries.push((
                    path.file_stem().unwrap().to_string_lossy().into_owned(),
                    load_program(path)?,
                ));
            }
            if entries.is_empty() {
                return Err(format!("no .tm programs in {}", programs.display()));
            }
            let op = parse_op(op)?;
            let opts = RunOptions {
                horizon: horizon.as_deref().map(parse_ordinal).transpose()?,
                fuel: *fuel,
                ..RunOptions::default()
            };
            let progs: Vec<Program> = entries.iter().map(|(_, p)| p.clone()).collect();
            let batch = dovetail(&progs, &op, &opts);
            let consts = harvest_constants(&batch, *region);
            if cli.json {
                let runs: Vec<Value> = entries
                    .iter()
                    .zip(&batch.runs)
                    .map(|((name, p), r)| {
                        let mut v = run_json(r, p);
                        v["name"] = json!(name);
                        v
                    })
                    .collect();
                let appearances: Vec<Value> = batch
                    .log
                    .global
                    .iter()
                    .map(|a| {
                        json!({
                            "stage": a.stage.to_string(),
                            "machine": entries[a.machine].0,
                            "tape": a.tape,
                            "content": a.content,
                            "input_only": a.input_only,
                        })
                    })
                    .collect();
                let fmt = |o: &Option<Ordinal>| o.as_ref().map(|x| x.to_string());
                println!(
                    "{}",
                    to_json_pretty(&json!({
                        "runs": runs,
                        "first_appearances": appearances,
                        "constants": {
                            "horizon": fmt(&consts.horizon),
                            "lambda": fmt(&consts.lambda),
                            "zeta": fmt(&consts.zeta),
                            "sigma": fmt(&consts.sigma),
                            "gamma": fmt(&consts.gamma),
                            "eta": fmt(&consts.eta),
                            "tee": fmt(&consts.tee),
                            "undecodable": consts.undecodable,
                        },
                    }))
                );
            } else {
                for ((name, _), r) in entries.iter().zip(&batch.runs) {
                    println!("{name}: {}", outcome_text(&r.outcome));
                }
                println!("first appearances:");
                for a in &batch.log.global {
                    let flag = if a.input_only { " input-only" } else { "" };
                    println!(
                        "  stage={} machine={} tape={} content={}{flag}",
                        a.stage, entries[a.machine].0, a.tape, a.content
                    );
                }
                let fmt = |o: &Option<Ordinal>| {
                    o.as_ref().map_or_else(|| "-".into(), |x| x.to_string())
                };
                println!("constants:");
                println!("  horizon={}", fmt(&consts.horizon));
                println!("  lambda={} zeta={} sigma={}", fmt(&consts.lambda), fmt(&consts.zeta), fmt(&consts.sigma));
                println!("  gamma={} eta={} tee={}", fmt(&consts.gamma), fmt(&consts.eta), fmt(&consts.tee));
                println!("  undecodable={}", consts.undecodable);
            }
            Ok(())
        }
        Cmd::Classify { op, seed, depth, count } => {
            let op = parse_op(op)?;
            let params = CorpusParams { seed: *seed, depth: *depth, count: *count, ..CorpusParams::default() };
            let report = classify_operator(&op, &params);
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
                );
            } else {
                println!("{report}");
            }
            Ok(())
        }
        Cmd::Emulate { program, to_n, op } => {
            let p = load_program(program)?;
            let op = parse_op(op)?;
            if op.alphabet() != Some(*to_n) {
                return Err(format!(
                    "operator works over {} symbols, --to-n asked for {to_n}",
                    op.alphabet().map_or_else(|| "any".into(), |n| n.to_string())
                ));
            }
            let em = emulate_limsup_in_n(&p, &op).map_err(|e| e.to_string())?;
            let decode: Vec<Value> = em.decode.iter().map(|d| json!(d)).collect();
            if cli.json {
                println!(
                    "{}",
                    to_json_pretty(&json!({
                        "program": em.program.to_string(),
                        "decode": decode,
                        "preferred": em.preferred,
                    }))
                );
            } else {
                let table: Vec<String> = em
                    .decode
                    .iter()
                    .map(|d| d.map_or_else(|| "-".into(), |v| v.to_string()))
                    .collect();
                println!("# preferred symbol: {}", em.preferred);
                println!("# decode table: {}", table.join(" "));
                print!("{}", em.program);
            }
            Ok(())
        }
        Cmd::Encode2 { program } => {
            let p = load_program(program)?;
            let enc = encode_n_in_2(&p).map_err(|e| e.to_string())?;
            if cli.json {
                println!(
                    "{}",
                    to_json_pretty(&json!({
                        "program": enc.program.to_string(),
                        "block": enc.n - 1,
                    }))
                );
            } else {
                println!("# blocks of {} bits", enc.n - 1);
                print!("{}", enc.program);
            }
            Ok(())
        }
        Cmd::Contract { word } => {
            let w: WordExpr<u8> = word.parse().map_err(|e| format!("{e}"))?;
            let c = w.contract();
            if cli.json {
                println!(
                    "{}",
                    to_json_pretty(&json!({
                        "input": w.to_string(),
                        "contracted": c.to_string(),
                        "length": c.length().to_string(),
                    }))
                );
            } else {
                println!("{c}");
            }
            Ok(())
        }
        Cmd::Encode { ordinal, region } => {
            let a = parse_ordinal(ordinal)?;
            let code = match region {
                Some(r) => encode_ordinal_at(&a, *r),
                None => encode_ordinal(&a),
            }
            .map_err(|e| e.to_string())?;
            if cli.json {
                println!(
                    "{}",
                    to_json_pretty(&json!({
                        "real": code.real.to_string(),
                        "region": code.region,
                    }))
                );
            } else {
                println!("real={} region={}", code.real, code.region);
            }
            Ok(())
        }
        Cmd::Decode { real, region } => {
            let r: Real = real.parse().map_err(|e| format!("{e}"))?;
            match decode_order_type(&r, *region) {
                DecodeOutcome::Ordinal(a) => {
                    if cli.json {
                        println!("{}", to_json_pretty(&json!({ "ordinal": a.to_string() })));
                    } else {
                        println!("ordinal {a}");
                    }
                    Ok(())
                }
                DecodeOutcome::NotWellOrder { witness } => Err(format!(
                    "not a well-order; offending indices {witness:?}"
                )),
                DecodeOutcome::Indeterminate => {
                    Err("every index participates; order type exceeds the region".into())
                }
            }
        }
    }
}

fn load_program(path: &Path) -> Result<Program, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    text.parse().map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_op(s: &str) -> Result<LimitOperator, String> {
    s.parse().map_err(|e| format!("bad operator spec {s:?}: {e}"))
}

fn parse_ordinal(s: &str) -> Result<Ordinal, String> {
    s.parse().map_err(|e| format!("bad ordinal {s:?}: {e}"))
}

fn outcome_text(o: &RunOutcome) -> String {
    match o {
        RunOutcome::Halted(s) => format!("halted at stage {s}"),
        RunOutcome::LoopCertified { alpha, beta, seen_at } => {
            format!("loop certified: repeats from {alpha} with period {beta} (seen at {seen_at})")
        }
        RunOutcome::FuelExhausted(s) => format!("stopped at stage {s} (budget reached)"),
        RunOutcome::LimitNotInferable { stage, diagnostic } => {
            format!("limit not inferable at stage {stage}: {diagnostic}")
        }
    }
}

fn outcome_json(o: &RunOutcome) -> Value {
    match o {
        RunOutcome::Halted(s) => json!({ "kind": "halted", "stage": s.to_string() }),
        RunOutcome::LoopCertified { alpha, beta, seen_at } => json!({
            "kind": "loop",
            "alpha": alpha.to_string(),
            "beta": beta.to_string(),
            "seen_at": seen_at.to_string(),
        }),
        RunOutcome::FuelExhausted(s) => {
            json!({ "kind": "budget", "stage": s.to_string() })
        }
        RunOutcome::LimitNotInferable { stage, diagnostic } => json!({
            "kind": "not-inferable",
            "stage": stage.to_string(),
            "diagnostic": diagnostic,
        }),
    }
}

fn run_json(r: &RunReport, p: &Program) -> Value {
    let trace: Vec<Value> = r
        .trace
        .iter()
        .map(|e| {
            json!({
                "stage": e.stage.to_string(),
                "state": p.state_name(e.state),
                "head": e.head,
                "tapes": [e.tapes.0[0].to_string(), e.tapes.0[1].to_string(), e.tapes.0[2].to_string()],
            })
        })
        .collect();
    json!({
        "outcome": outcome_json(&r.outcome),
        "state": p.state_name(r.state),
        "head": r.head,
        "tapes": [r.tapes.0[0].to_string(), r.tapes.0[1].to_string(), r.tapes.0[2].to_string()],
        "steps": r.steps,
        "limits": r.limits,
        "trace": trace,
    })
}

fn to_json_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}
