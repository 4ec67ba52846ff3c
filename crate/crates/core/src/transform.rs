//! Program transformations between alphabets, with a co-simulation verifier.
//!
//! `emulate_limsup_in_n` rewrites a 2-symbol machine so that an n-symbol
//! priority operator reproduces the limsup rule on it. The idea: rename
//! symbols so the operator's most preferred symbol plays the role of 1, and
//! replace every write of 0 over 1 by a finite chain that drags the cell
//! through all remaining symbols before settling on the encoding of 0. A
//! cell that blinks forever then shows every symbol cofinally, so any
//! priority order elects the symbol standing for 1, which is exactly the
//! limsup verdict.
//!
//! `encode_n_in_2` goes the other way: each logical n-symbol cell becomes a
//! block of n-1 bits holding value k as 1^k 0^(n-1-k). Under the plain
//! limsup rule each bit settles to "was the value above me cofinally", so
//! limit blocks decode to the natural-priority limit of the logical cell.

use crate::machine::engine::{RunOptions, RunOutcome, Runner};
use crate::machine::program::{Move, Program};
use crate::machine::tape::{SymbolicTape, TapeTriple};
use crate::operator::{CellRule, LimitOperator};
use crate::ordinal::Ordinal;
use crate::word::WordExpr;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("operator is not an n-symbol priority rule with n > 2")]
    NotPriorityRule,
    #[error("operator prefers the blank symbol; blanks cannot encode 1")]
    BlankPreferred,
    #[error("source program must use exactly 2 symbols")]
    NotTwoSymbols,
    #[error("generated program failed to load: {0}")]
    Generation(String),
}

/// A transformed program together with its symbol decode table
/// (`decode[physical]` is the logical symbol, `None` marking chain junk).
#[derive(Clone, Debug)]
pub struct Emulated {
    pub program: Program,
    pub decode: Vec<Option<u8>>,
    /// The operator's elected symbol: what a forever-blinking cell reads at
    /// limits, standing for logical 1.
    pub preferred: u8,
}

/// Rewrite a 2-symbol program for an n-symbol priority operator so limits
/// behave like limsup.
pub fn emulate_limsup_in_n(p2: &Program, op: &LimitOperator) -> Result<Emulated, TransformError> {
    if p2.symbols != 2 {
        return Err(TransformError::NotTwoSymbols);
    }
    let caps = op.capabilities();
    let rule = match op {
        LimitOperator::CellByCell(r @ CellRule::SupN(_)) if caps.looping_stable => r,
        _ => return Err(TransformError::NotPriorityRule),
    };
    let n = rule.alphabet().unwrap();
    if n <= 2 {
        return Err(TransformError::NotPriorityRule);
    }
    // The cycle 1, 2, ..., n-1, 0 shown to the operator forever; the result
    // is the symbol that will stand for logical 1.
    let cyc: Vec<u8> = (1..n).chain([0]).collect();
    let probe = WordExpr::power(WordExpr::from_letters(&cyc), Ordinal::omega());
    let k = rule.apply(&probe).map_err(|e| TransformError::Generation(e.to_string()))?;
    if k == 0 {
        return Err(TransformError::BlankPreferred);
    }
    // Rotation renaming along the cycle with rho(1) = k; rho(0) encodes
    // logical 0 and the chain passes through rho(2), ..., rho(n-1), rho(0).
    let pos = |j: u8| if j == 0 { n - 1 } else { j - 1 };
    let rho = |j: u8| cyc[((pos(j) + k - 1) % n) as usize];

    let mut src = String::new();
    writeln!(src, "symbols {n}").unwrap();
    let halt = p2.state_name(p2.halt).to_string();
    let mut chain_states: Vec<(String, [bool; 3], Move, String)> = Vec::new();
    let mut chain_index: HashMap<([bool; 3], Move, String), String> = HashMap::new();
    let mut rows: Vec<String> = Vec::new();

    for q in 0..p2.num_states() {
        if q == p2.halt {
            continue;
        }
        let qn = p2.state_name(q);
        let mut emitted: BTreeSet<[u8; 3]> = BTreeSet::new();
        for r0 in 0..2u8 {
            for r1 in 0..2u8 {
                for r2 in 0..2u8 {
                    let r = [r0, r1, r2];
                    let t = p2.lookup(q, r);
                    let mask = [0, 1, 2].map(|j| r[j] == 1 && t.write[j] == 0);
                    let chained = mask.iter().any(|&b| b);
                    let next = p2.state_name(t.next).to_string();
                    // First-step writes: chained tapes start the chain,
                    // others take their final encoded value.
                    let w: [u8; 3] = [0, 1, 2].map(|j| {
                        if mask[j] {
                            rho(2)
                        } else {
                            rho(t.write[j])
                        }
                    });
                    let (mv, target) = if chained {
                        let key = (mask, t.mv, next.clone());
                        let name = chain_index.entry(key.clone()).or_insert_with(|| {
                            let name = format!("x{}", chain_states.len());
                            chain_states.push((name.clone(), mask, t.mv, next.clone()));
                            name
                        });
                        (Move::Stay, name.clone())
                    } else {
                        (t.mv, next)
                    };
                    // Logical 0 is read as blank or as its encoding.
                    let opts = |b: u8| -> Vec<u8> {
                        if b == 1 {
                            vec![rho(1)]
                        } else if rho(0) == 0 {
                            vec![0]
                        } else {
                            vec![0, rho(0)]
                        }
                    };
                    for &a in &opts(r0) {
                        for &b in &opts(r1) {
                            for &c in &opts(r2) {
                                if emitted.insert([a, b, c]) {
                                    rows.push(format!(
                                        "{qn} {a},{b},{c} -> {},{},{} {} {target}",
                                        w[0], w[1], w[2], mv
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        // Junk reads never occur at the head; park them on the halt state so
        // a violation would surface in co-simulation.
        rows.push(format!("{qn} *,*,* -> =,=,= S {halt}"));
    }
    // Chain states: steps 1..n-2 write the remaining symbols in place, the
    // last step writes the encoding of 0 and performs the original move.
    let mut chain_rows: Vec<String> = Vec::new();
    let mut extra_names: Vec<String> = Vec::new();
    let mut ci = 0;
    while ci < chain_states.len() {
        let (name, mask, mv, next) = chain_states[ci].clone();
        extra_names.push(name.clone());
        let mut cur = name;
        for step in 1..(n - 1) as usize {
            let last = step == (n - 2) as usize;
            let sym = if last { rho(0) } else { rho(2 + step as u8) };
            let w: Vec<String> = (0..3)
                .map(|j| if mask[j] { sym.to_string() } else { "=".to_string() })
                .collect();
            let (m, target) = if last {
                (mv, next.clone())
            } else {
                let nn = format!("{cur}s");
                extra_names.push(nn.clone());
                (Move::Stay, nn)
            };
            chain_rows.push(format!("{cur} *,*,* -> {},{},{} {m} {target}", w[0], w[1], w[2]));
            if !last {
                cur = format!("{cur}s");
            }
        }
        ci += 1;
    }

    let mut names: Vec<String> =
        (0..p2.num_states()).filter(|&q| q != p2.halt).map(|q| p2.state_name(q).to_string()).collect();
    names.extend(extra_names);
    writeln!(src, "states {}", names.join(" ")).unwrap();
    writeln!(src, "start {}", p2.state_name(p2.start)).unwrap();
    writeln!(src, "limit {}", p2.state_name(p2.limit)).unwrap();
    writeln!(src, "halt {halt}").unwrap();
    for row in rows.iter().chain(chain_rows.iter()) {
        writeln!(src, "{row}").unwrap();
    }

    let program: Program = src.parse().map_err(|e| TransformError::Generation(format!("{e}")))?;
    let mut decode = vec![None; n as usize];
    decode[0] = Some(0);
    decode[rho(0) as usize] = Some(0);
    decode[rho(1) as usize] = Some(1);
    Ok(Emulated { program, decode, preferred: k })
}

/// An n-symbol program compiled to 2 symbols via 1^k 0^(n-k-1) blocks.
#[derive(Clone, Debug)]
pub struct Encoded {
    pub program: Program,
    pub n: u8,
}

/// Compile an n-symbol program to a 2-symbol one, mapping each logical cell
/// to a block of n-1 bits.
pub fn encode_n_in_2(pn: &Program) -> Result<Encoded, TransformError> {
    let n = pn.symbols;
    let w = (n - 1) as usize;
    // A logical step becomes: scan the block left to right counting leading
    // ones per tape, step back, rewrite the block right to left, then shift
    // by a whole block in the logical direction.
    let scan_name = |q: usize, j: usize, vals: &[Option<u8>; 3]| {
        let v: String = vals
            .iter()
            .map(|x| x.map_or("o".to_string(), |v| v.to_string()))
            .collect::<Vec<_>>()
            .join("");
        format!("{}.s{}.{}", pn.state_name(q), j, v)
    };
    let entry = |q: usize| {
        if q == pn.halt {
            pn.state_name(q).to_string()
        } else {
            scan_name(q, 0, &[None, None, None])
        }
    };

    let mut rows: Vec<String> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut queued: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<(usize, usize, [Option<u8>; 3])> = VecDeque::new();
    let mut aux: BTreeSet<String> = BTreeSet::new();
    for q in 0..pn.num_states() {
        if q != pn.halt {
            let name = scan_name(q, 0, &[None, None, None]);
            queued.insert(name);
            queue.push_back((q, 0, [None, None, None]));
        }
    }
    while let Some((q, j, vals)) = queue.pop_front() {
        let name = scan_name(q, j, &vals);
        names.push(name.clone());
        for b0 in 0..2u8 {
            for b1 in 0..2u8 {
                for b2 in 0..2u8 {
                    let bits = [b0, b1, b2];
                    let mut nv = vals;
                    for t in 0..3 {
                        if nv[t].is_none() {
                            if bits[t] == 0 {
                                nv[t] = Some(j as u8);
                            } else if j == w - 1 {
                                nv[t] = Some(n - 1);
                            }
                        }
                    }
                    let target = if j + 1 < w {
                        let tn = scan_name(q, j + 1, &nv);
                        if queued.insert(tn.clone()) {
                            queue.push_back((q, j + 1, nv));
                        }
                        tn
                    } else {
                        // Block read; commit to the logical transition.
                        let v = [nv[0].unwrap(), nv[1].unwrap(), nv[2].unwrap()];
                        let t = pn.lookup(q, v);
                        let bk = format!(
                            "bk.{}{}{}.{}.{}",
                            t.write[0],
                            t.write[1],
                            t.write[2],
                            t.mv,
                            pn.state_name(t.next)
                        );
                        if aux.insert(bk.clone()) {
                            emit_writeback(
                                &mut rows,
                                &mut aux,
                                &bk,
                                t.write,
                                t.mv,
                                t.next,
                                &entry,
                                w,
                            );
                        }
                        bk
                    };
                    rows.push(format!(
                        "{name} {b0},{b1},{b2} -> =,=,= R {target}"
                    ));
                }
            }
        }
    }
    names.extend(aux.iter().cloned());

    let mut src = String::new();
    writeln!(src, "symbols 2").unwrap();
    writeln!(src, "states {}", names.join(" ")).unwrap();
    writeln!(src, "start {}", entry(pn.start)).unwrap();
    writeln!(src, "limit {}", entry(pn.limit)).unwrap();
    writeln!(src, "halt {}", pn.state_name(pn.halt)).unwrap();
    for row in &rows {
        writeln!(src, "{row}").unwrap();
    }
    let program: Program = src.parse().map_err(|e| TransformError::Generation(format!("{e}")))?;
    Ok(Encoded { program, n })
}

#[allow(clippy::too_many_arguments)]
fn emit_writeback(
    rows: &mut Vec<String>,
    aux: &mut BTreeSet<String>,
    bk: &str,
    writes: [u8; 3],
    mv: Move,
    next: usize,
    entry: &dyn Fn(usize) -> String,
    w: usize,
) {
    // Step back onto the block's top cell.
    let first = format!("{bk}.w0");
    aux.insert(first.clone());
    rows.push(format!("{bk} *,*,* -> =,=,= L {first}"));
    // Rewrite cells w-1 down to 0 with the bits of 1^k 0^(w-k).
    for s in 0..w {
        let cell = w - 1 - s;
        let bits: Vec<String> =
            (0..3).map(|t| u8::from((cell as u8) < writes[t]).to_string()).collect();
        let cur = format!("{bk}.w{s}");
        let last = s == w - 1;
        let (m, target) = if !last {
            let nn = format!("{bk}.w{}", s + 1);
            aux.insert(nn.clone());
            ("L".to_string(), nn)
        } else {
            match mv {
                Move::Stay => ("S".to_string(), entry(next)),
                Move::Right => {
                    let nn = format!("{bk}.r1");
                    aux.insert(nn.clone());
                    ("S".to_string(), nn)
                }
                Move::Left => {
                    let nn = format!("{bk}.l1");
                    aux.insert(nn.clone());
                    ("S".to_string(), nn)
                }
            }
        };
        rows.push(format!("{cur} *,*,* -> {},{},{} {m} {target}", bits[0], bits[1], bits[2]));
    }
    // Shift a whole block in the logical direction; leftward shifts clamp
    // at cell 0 exactly like the logical head does.
    let (dir, m) = match mv {
        Move::Stay => return,
        Move::Right => ("r", "R"),
        Move::Left => ("l", "L"),
    };
    for step in 1..=w {
        let cur = format!("{bk}.{dir}{step}");
        let target = if step == w {
            entry(next)
        } else {
            let nn = format!("{bk}.{dir}{}", step + 1);
            aux.insert(nn.clone());
            nn
        };
        rows.push(format!("{cur} *,*,* -> =,=,= {m} {target}"));
    }
}

/// Decode a block tape: logical cell i is the count of leading ones in
/// physical cells [i*(n-1), (i+1)*(n-1)).
/// 3-symbol counter: repeatedly increment the work cell mod 3, moving
/// right one cell after each full wrap. A handy co-simulation subject.
pub const COUNTER3: &str = "\
symbols 3
states c
start c
limit c
halt h
c *,0,* -> =,1,= S c
c *,1,* -> =,2,= S c
c *,2,* -> =,0,= R c
";

pub fn decode_blocks(t: &SymbolicTape, n: u8) -> SymbolicTape {
    let w = (n - 1) as usize;
    let value = |i: usize| -> u8 {
        let mut v = 0u8;
        for j in 0..w {
            if t.get(i * w + j) == 1 {
                v += 1;
            } else {
                break;
            }
        }
        v
    };
    let pl = t.prefix_len().div_ceil(w);
    let cl = num_integer::lcm(t.cycle_len(), w) / w;
    let prefix: Vec<u8> = (0..pl).map(value).collect();
    let cycle: Vec<u8> = (pl..pl + cl).map(value).collect();
    SymbolicTape::new(prefix, cycle).expect("cycle nonempty")
}

pub fn decode_block_triple(t: &TapeTriple, n: u8) -> TapeTriple {
    TapeTriple([
        decode_blocks(&t.0[0], n),
        decode_blocks(&t.0[1], n),
        decode_blocks(&t.0[2], n),
    ])
}

/// Map a tape through a symbol decode table; `None` when a junk symbol is
/// present.
pub fn decode_symbol_tape(t: &SymbolicTape, table: &[Option<u8>]) -> Option<SymbolicTape> {
    let map = |i: usize| -> Option<u8> { table.get(t.get(i) as usize).copied().flatten() };
    let prefix: Option<Vec<u8>> = (0..t.prefix_len()).map(map).collect();
    let cycle: Option<Vec<u8>> =
        (t.prefix_len()..t.prefix_len() + t.cycle_len()).map(map).collect();
    Some(SymbolicTape::new(prefix?, cycle?).expect("cycle nonempty"))
}

pub fn decode_symbol_triple(t: &TapeTriple, table: &[Option<u8>]) -> Option<TapeTriple> {
    Some(TapeTriple([
        decode_symbol_tape(&t.0[0], table)?,
        decode_symbol_tape(&t.0[1], table)?,
        decode_symbol_tape(&t.0[2], table)?,
    ]))
}

/// Emulation check against the three-part definition: limit snapshots
/// match, successor snapshots interleave with finite gaps, and the extra
/// snapshots in between are marked by a symbol outside the small alphabet.
#[derive(Clone, Debug)]
pub struct EmulationReport {
    pub horizon: Ordinal,
    pub limit_snapshot_matches: Vec<(Ordinal, bool)>,
    pub interleaving_ok: bool,
    pub marker_ok: bool,
    pub first_divergence: Option<String>,
}

impl EmulationReport {
    pub fn passed(&self) -> bool {
        self.first_divergence.is_none()
            && self.interleaving_ok
            && self.marker_ok
            && self.limit_snapshot_matches.iter().all(|(_, ok)| *ok)
    }
}

/// How many successor snapshots to compare per inter-limit stretch.
const EMBED_SAMPLES: usize = 120;

pub fn verify_emulation(
    small: &Program,
    op_small: &LimitOperator,
    big: &Program,
    op_big: &LimitOperator,
    horizon: &Ordinal,
    decode: &[Option<u8>],
) -> EmulationReport {
    let opts = RunOptions {
        horizon: Some(horizon.clone()),
        accelerate: false,
        certify_loops: false,
        trace_steps: 200_000,
        ..Default::default()
    };
    let rs = Runner::new(small.clone(), op_small.clone(), opts.clone()).run(TapeTriple::zeros());
    let rb = Runner::new(big.clone(), op_big.clone(), opts).run(TapeTriple::zeros());

    let mut report = EmulationReport {
        horizon: horizon.clone(),
        limit_snapshot_matches: Vec::new(),
        interleaving_ok: true,
        marker_ok: true,
        first_divergence: None,
    };
    let diverge = |r: &mut EmulationReport, msg: String| {
        if r.first_divergence.is_none() {
            r.first_divergence = Some(msg);
        }
    };
    for (out, who) in [(&rs.outcome, "small"), (&rb.outcome, "big")] {
        match out {
            RunOutcome::FuelExhausted(_) | RunOutcome::Halted(_) | RunOutcome::LoopCertified { .. } => {}
            other => diverge(&mut report, format!("{who} run did not complete: {other:?}")),
        }
    }

    let limits = |r: &crate::machine::engine::RunReport| -> Vec<(Ordinal, TapeTriple)> {
        r.trace
            .iter()
            .filter(|e| e.stage.is_limit())
            .map(|e| (e.stage.clone(), e.tapes.clone()))
            .collect()
    };
    let ls = limits(&rs);
    let lb = limits(&rb);
    if ls.len() != lb.len() {
        diverge(
            &mut report,
            format!("limit stage counts differ: small {} vs big {}", ls.len(), lb.len()),
        );
    }
    for ((stage, st), (stage_b, bt)) in ls.iter().zip(lb.iter()) {
        let ok = stage == stage_b
            && decode_symbol_triple(bt, decode).map_or(false, |d| &d == st);
        if !ok {
            diverge(&mut report, format!("limit snapshot mismatch at stage {stage}"));
        }
        report.limit_snapshot_matches.push((stage.clone(), ok));
    }

    // Interleaving and markers, per stretch from each stage boundary.
    let mut boundaries = vec![Ordinal::zero()];
    boundaries.extend(ls.iter().map(|(s, _)| s.clone()));
    for b in &boundaries {
        if b == horizon {
            continue;
        }
        let seq_s = sample_trace(&rs, b, EMBED_SAMPLES);
        let seq_b = sample_trace(&rb, b, EMBED_SAMPLES * decode.len().max(3) * 4);
        let decoded: Vec<(Option<TapeTriple>, bool)> = seq_b
            .iter()
            .map(|t| {
                let d = decode_symbol_triple(t, decode);
                let junk = d.is_none();
                (d, junk)
            })
            .collect();
        let mut bi = 0usize;
        let gap_cap = decode.len().max(3) * 4;
        let mut prev: Option<&TapeTriple> = None;
        'small: for s in &seq_s {
            let start = bi;
            while bi < decoded.len() {
                if decoded[bi].0.as_ref() == Some(s) {
                    // Everything skipped must carry a junk marker or repeat
                    // the previously matched snapshot.
                    for (d, junk) in &decoded[start..bi] {
                        if !junk && d.as_ref() != prev {
                            report.marker_ok = false;
                        }
                    }
                    if bi - start > gap_cap {
                        report.interleaving_ok = false;
                    }
                    prev = Some(s);
                    bi += 1;
                    continue 'small;
                }
                bi += 1;
            }
            // Ran out of big samples: only a failure if we had room left.
            if start + gap_cap < decoded.len() {
                report.interleaving_ok = false;
                diverge(&mut report, format!("snapshot after stage {b} never appears in big run"));
            }
            break;
        }
    }
    report
}

/// Step-level snapshots of the stage stretch `[from, from + w)`, taken from
/// the run trace so lasso-compressed history tails do not stand in for
/// concrete configurations.
fn sample_trace(
    r: &crate::machine::engine::RunReport,
    from: &Ordinal,
    count: usize,
) -> Vec<TapeTriple> {
    let next = from.add(&Ordinal::omega());
    r.trace
        .iter()
        .filter(|e| &e.stage >= from && e.stage < next)
        .map(|e| e.tapes.clone())
        .take(count)
        .collect()
}
