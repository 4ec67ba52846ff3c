//! Shared-clock experiment harness.
//!
//! A dovetail runs a batch of machines against the same limit operator and
//! joins their traces on the common stage clock. Because the machines do not
//! interact, the joined run is observationally identical to running each
//! machine on its own; the harness keeps per-machine results verbatim and
//! only merges the bookkeeping.
//!
//! On top of the merged log the harness estimates the observable landmark
//! ordinals of a corpus: suprema of decoded outputs and of the stages where
//! things happen. These are lower estimates at observation scale, computed
//! from what actually showed up below the chosen horizon.

use std::collections::{BTreeMap, BTreeSet};

use crate::codes::{decode_order_type, DecodeOutcome, Real};
use crate::machine::{Program, RunOptions, RunOutcome, RunReport, Runner, SymbolicTape, TapeTriple};
use crate::operator::LimitOperator;
use crate::ordinal::Ordinal;

/// First time a tape content showed up anywhere in the batch.
#[derive(Debug, Clone)]
pub struct Appearance {
    pub content: String,
    pub stage: Ordinal,
    pub machine: usize,
    pub tape: usize,
    /// True when the content only ever occurred on input tapes, so it was
    /// supplied rather than produced.
    pub input_only: bool,
}

/// Merged record of first appearances, per machine and across the batch.
#[derive(Debug, Clone, Default)]
pub struct FirstAppearanceLog {
    /// For each machine, the first stage at which each tape content occurred.
    pub per_machine: Vec<BTreeMap<String, Ordinal>>,
    /// Batch-wide first appearances, sorted by stage then machine.
    pub global: Vec<Appearance>,
}

/// Results of one dovetailed batch.
#[derive(Debug, Clone)]
pub struct DovetailReport {
    pub runs: Vec<RunReport>,
    pub log: FirstAppearanceLog,
}

/// Run every machine on its own input under the same operator and options,
/// then merge the traces on the shared stage clock.
pub fn dovetail_with_inputs(
    machines: &[(Program, TapeTriple)],
    op: &LimitOperator,
    opts: &RunOptions,
) -> DovetailReport {
    let runs: Vec<RunReport> = machines
        .iter()
        .map(|(p, input)| Runner::new(p.clone(), op.clone(), opts.clone()).run(input.clone()))
        .collect();
    let log = first_appearances(&runs, machines);
    DovetailReport { runs, log }
}

/// Dovetail on blank inputs.
pub fn dovetail(programs: &[Program], op: &LimitOperator, opts: &RunOptions) -> DovetailReport {
    let machines: Vec<(Program, TapeTriple)> = programs
        .iter()
        .map(|p| (p.clone(), TapeTriple::zeros()))
        .collect();
    dovetail_with_inputs(&machines, op, opts)
}

fn first_appearances(runs: &[RunReport], machines: &[(Program, TapeTriple)]) -> FirstAppearanceLog {
    let mut per_machine: Vec<BTreeMap<String, Ordinal>> = Vec::with_capacity(runs.len());
    // content -> (stage, machine, tape) of its earliest occurrence, plus the
    // set of tape roles it ever occupied.
    let mut earliest: BTreeMap<String, (Ordinal, usize, usize)> = BTreeMap::new();
    let mut roles: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();

    for (m, run) in runs.iter().enumerate() {
        let mut mine: BTreeMap<String, Ordinal> = BTreeMap::new();
        for entry in &run.trace {
            for t in 0..3 {
                let content = entry.tapes.0[t].to_string();
                mine.entry(content.clone()).or_insert_with(|| entry.stage.clone());
                roles.entry(content.clone()).or_default().insert(t);
                let key = (entry.stage.clone(), m, t);
                match earliest.get(&content) {
                    Some((s, mm, tt)) if (s, mm, tt) <= (&key.0, &key.1, &key.2) => {}
                    _ => {
                        earliest.insert(content, (key.0, key.1, key.2));
                    }
                }
            }
        }
        per_machine.push(mine);
    }

    // A content is input-only when every occurrence was on an input tape and
    // it was actually present in some supplied input.
    let supplied: BTreeSet<String> = machines
        .iter()
        .map(|(_, input)| input.0[0].to_string())
        .collect();

    let mut global: Vec<Appearance> = earliest
        .into_iter()
        .map(|(content, (stage, machine, tape))| {
            let input_only = roles[&content] == BTreeSet::from([0usize])
                && supplied.contains(&content);
            Appearance { content, stage, machine, tape, input_only }
        })
        .collect();
    global.sort_by(|a, b| {
        (&a.stage, a.machine, a.tape).cmp(&(&b.stage, b.machine, b.tape))
    });
    FirstAppearanceLog { per_machine, global }
}

/// Try to read a tape as the characteristic function of an order code and
/// decode its order type.
pub fn decode_tape(tape: &SymbolicTape, region: u64) -> Option<Ordinal> {
    let plen = tape.prefix_len();
    let clen = tape.cycle_len().max(1);
    let mut ones = BTreeSet::new();
    for i in 0..plen {
        match tape.get(i) {
            0 => {}
            1 => {
                ones.insert(i as u64);
            }
            _ => return None,
        }
    }
    let mut pattern = Vec::with_capacity(clen);
    for i in 0..clen {
        match tape.get(plen + i) {
            0 => pattern.push(false),
            1 => pattern.push(true),
            _ => return None,
        }
    }
    let real = Real::new(plen as u64, ones, pattern).ok()?;
    // The bits alone do not pin the region down, so all tapes in a batch are
    // read under one shared region convention.
    match decode_order_type(&real, region) {
        DecodeOutcome::Ordinal(a) => Some(a),
        _ => None,
    }
}

/// Landmark ordinals observed in one dovetailed batch. Every field is the
/// supremum of a finite observation set; `None` means the set was empty.
#[derive(Debug, Clone)]
pub struct ObservedConstants {
    pub horizon: Option<Ordinal>,
    /// Sup of decoded outputs of machines that halted.
    pub lambda: Option<Ordinal>,
    /// Sup of decoded outputs that stabilized below the horizon.
    pub zeta: Option<Ordinal>,
    /// Sup of decoded contents that appeared on any tape at any stage.
    pub sigma: Option<Ordinal>,
    /// Sup of halting stages.
    pub gamma: Option<Ordinal>,
    /// Sup of stages at which an output stabilized.
    pub eta: Option<Ordinal>,
    /// Sup of first-appearance stages.
    pub tee: Option<Ordinal>,
    /// Tape contents that did not decode to an ordinal.
    pub undecodable: usize,
}

fn sup(set: &BTreeSet<Ordinal>) -> Option<Ordinal> {
    set.iter().next_back().cloned()
}

/// Stage from which the output tape no longer changes across the trace,
/// if it is constant over a final stretch of at least two observations
/// (or the run halted, which pins the tape for good).
fn stabilization_stage(run: &RunReport) -> Option<Ordinal> {
    let last = run.trace.last()?;
    let mut stage = None;
    for entry in run.trace.iter().rev() {
        if entry.tapes.0[2] == last.tapes.0[2] {
            stage = Some(entry.stage.clone());
        } else {
            break;
        }
    }
    let halted = matches!(run.outcome, RunOutcome::Halted(_));
    if !halted && run.trace.len() < 2 {
        return None;
    }
    stage
}

/// Harvest the landmark estimates from a dovetail report.
///
/// The observation classes are nested on purpose: a halting output is also a
/// stabilized output, and a stabilized output also appeared; likewise a
/// halting stage counts as a stabilization stage and a stabilization stage
/// as an appearance stage. The nesting makes the orderings
/// lambda <= zeta <= sigma and gamma <= eta <= tee hold by construction,
/// which matches their intent as suprema of increasingly permissive events.
pub fn harvest_constants(report: &DovetailReport, region: u64) -> ObservedConstants {
    let mut w: BTreeSet<Ordinal> = BTreeSet::new(); // halting outputs
    let mut ew: BTreeSet<Ordinal> = BTreeSet::new(); // stabilized outputs
    let mut aw: BTreeSet<Ordinal> = BTreeSet::new(); // appeared anywhere
    let mut g: BTreeSet<Ordinal> = BTreeSet::new(); // halting stages
    let mut e: BTreeSet<Ordinal> = BTreeSet::new(); // stabilization stages
    let mut t: BTreeSet<Ordinal> = BTreeSet::new(); // first-appearance stages
    let mut undecodable = 0usize;
    let mut horizon: Option<Ordinal> = None;

    for run in &report.runs {
        let reached = match &run.outcome {
            RunOutcome::Halted(s) => s.clone(),
            RunOutcome::FuelExhausted(s) => s.clone(),
            RunOutcome::LoopCertified { seen_at, .. } => seen_at.clone(),
            RunOutcome::LimitNotInferable { stage, .. } => stage.clone(),
        };
        if horizon.as_ref().is_none_or(|h| h < &reached) {
            horizon = Some(reached);
        }

        let decoded_output = decode_tape(&run.tapes.0[2], region);
        if let RunOutcome::Halted(stage) = &run.outcome {
            g.insert(stage.clone());
            e.insert(stage.clone());
            t.insert(stage.clone());
            if let Some(x) = &decoded_output {
                w.insert(x.clone());
                ew.insert(x.clone());
                aw.insert(x.clone());
            }
        }
        if let Some(stage) = stabilization_stage(run) {
            e.insert(stage.clone());
            t.insert(stage);
            if let Some(x) = &decoded_output {
                ew.insert(x.clone());
                aw.insert(x.clone());
            }
        }
    }

    for app in &report.log.global {
        t.insert(app.stage.clone());
        match decode_tape(&parse_content(&app.content), region) {
            Some(x) => {
                aw.insert(x);
            }
            None => undecodable += 1,
        }
    }

    ObservedConstants {
        horizon,
        lambda: sup(&w),
        zeta: sup(&ew),
        sigma: sup(&aw),
        gamma: sup(&g),
        eta: sup(&e),
        tee: sup(&t),
        undecodable,
    }
}

fn parse_content(s: &str) -> SymbolicTape {
    s.parse().expect("log contents round-trip through the tape syntax")
}
