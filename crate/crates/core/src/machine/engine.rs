//! Transfinite runner.
//!
//! A run proceeds in blocks of concrete steps. Within a block the engine
//! watches for two certificates that the block never ends on its own:
//!
//! * an exact cycle: the full configuration (state, head, tapes) repeats, so
//!   the block's history is a finite prefix followed by the cycle forever;
//! * a translation lasso: the same state recurs at a head position shifted
//!   right by `d` with the tape from the unrevisited region onward equal up
//!   to that shift, so the machine sweeps rightward forever and every cell
//!   eventually freezes.
//!
//! Either certificate pins down the history through the next limit stage,
//! where the limit operator produces the tape contents and the machine
//! restarts in its limit state at cell 0. Matching snapshots at two limit
//! stages let the engine jump past whole families of limits at once, and a
//! matching snapshot over a segment the operator provably loops on upgrades
//! to a non-halting certificate.

use crate::machine::program::{Move, Program};
use crate::machine::tape::{SymbolicTape, TapeTriple};
use crate::operator::{
    apply_operator, escaping_decompose, is_looping_pattern, CellRule, EscapeShape, History,
    LimitOperator,
};
use crate::ordinal::Ordinal;
use crate::word::WordExpr;
use std::collections::HashMap;

/// Knobs for a transfinite run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Stop upon reaching this stage (a limit ordinal). `None` runs until
    /// halting, a loop certificate, or resource limits.
    pub horizon: Option<Ordinal>,
    /// Concrete steps allowed per block before giving up on limit inference.
    pub fuel: u64,
    /// Cap on the number of limit stages processed.
    pub max_limits: u64,
    /// Jump past nested limits when a limit snapshot recurs.
    pub accelerate: bool,
    /// Convert recurring limit snapshots into non-halting certificates when
    /// the operator provably loops on the repeated segment.
    pub certify_loops: bool,
    /// Record this many leading concrete steps in the trace (limit stages
    /// are always recorded).
    pub trace_steps: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            horizon: None,
            fuel: 200_000,
            max_limits: 2_000,
            accelerate: true,
            certify_loops: true,
            trace_steps: 0,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    /// The machine took its halting transition at this stage (stage counts
    /// the steps completed before it; a first-step halt gives stage 0).
    Halted(Ordinal),
    /// The run provably never halts: from stage `alpha` on, the machine
    /// repeats a segment of length `beta` that the operator loops on.
    LoopCertified { alpha: Ordinal, beta: Ordinal, seen_at: Ordinal },
    /// Resources ran out (step fuel, limit budget, or the stage horizon)
    /// with the machine still running at this stage.
    FuelExhausted(Ordinal),
    /// No cycle or lasso certificate materialized before the block's fuel
    /// ran out, or the operator could not be applied.
    LimitNotInferable { stage: Ordinal, diagnostic: String },
}

impl RunOutcome {
    pub fn stage(&self) -> &Ordinal {
        match self {
            RunOutcome::Halted(s) => s,
            RunOutcome::LoopCertified { seen_at, .. } => seen_at,
            RunOutcome::FuelExhausted(s) => s,
            RunOutcome::LimitNotInferable { stage, .. } => stage,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceEntry {
    pub stage: Ordinal,
    pub state: usize,
    pub head: u64,
    pub tapes: TapeTriple,
}

impl TraceEntry {
    pub fn render(&self, program: &Program) -> String {
        format!(
            "stage={} state={} tapes={}",
            self.stage,
            program.state_name(self.state),
            self.tapes
        )
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub state: usize,
    pub head: u64,
    pub tapes: TapeTriple,
    pub trace: Vec<TraceEntry>,
    /// Snapshot word of every stage strictly before the final one.
    pub history: History,
    pub steps: u64,
    pub limits: u64,
}

pub struct Runner {
    program: Program,
    op: LimitOperator,
    opts: RunOptions,
}

#[derive(Clone)]
struct Config {
    state: usize,
    head: u64,
    tapes: TapeTriple,
}

/// Builds the run's snapshot word, interning tape triples as letters.
struct HistBuilder {
    atoms: Vec<WordExpr<u32>>,
    snaps: Vec<TapeTriple>,
    index: HashMap<TapeTriple, u32>,
}

impl HistBuilder {
    fn new() -> Self {
        HistBuilder { atoms: Vec::new(), snaps: Vec::new(), index: HashMap::new() }
    }

    fn intern(&mut self, t: &TapeTriple) -> u32 {
        if let Some(&id) = self.index.get(t) {
            return id;
        }
        let id = self.snaps.len() as u32;
        self.snaps.push(t.clone());
        self.index.insert(t.clone(), id);
        id
    }

    fn push_ids(&mut self, ids: &[u32]) {
        for atom in rle(ids) {
            self.atoms.push(atom);
        }
    }

    fn push_cycle(&mut self, ids: &[u32], e: Ordinal) {
        let body = WordExpr::concat(rle(ids));
        self.atoms.push(WordExpr::power(body, e));
    }

    fn push_expr(&mut self, expr: WordExpr<u32>) {
        self.atoms.push(expr);
    }

    fn history(&self) -> History {
        let expr = WordExpr::concat(self.atoms.clone());
        History::new(expr, self.snaps.clone()).expect("letters come from the table")
    }
}

/// Run-length encode a concrete id sequence into word atoms.
fn rle(ids: &[u32]) -> Vec<WordExpr<u32>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < ids.len() {
        let mut j = i + 1;
        while j < ids.len() && ids[j] == ids[i] {
            j += 1;
        }
        let letter = WordExpr::letter(ids[i]);
        if j - i == 1 {
            out.push(letter);
        } else {
            out.push(WordExpr::power(letter, Ordinal::from_nat((j - i) as u64)));
        }
        i = j;
    }
    out
}

enum BlockEnd {
    Halt { step: u64 },
    Exact { t1: u64 },
    Lasso { minh: u64, d: u64 },
    OutOfFuel,
}

struct LassoRec {
    state: usize,
    head: u64,
    tapes: TapeTriple,
    /// Minimum head position since this record was taken.
    minh: u64,
}

const MAX_LASSO_RECORDS: usize = 256;

impl Runner {
    pub fn new(program: Program, op: LimitOperator, opts: RunOptions) -> Self {
        Runner { program, op, opts }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn operator(&self) -> &LimitOperator {
        &self.op
    }

    pub fn run(&self, input: TapeTriple) -> RunReport {
        let omega = Ordinal::omega();
        let p = &self.program;
        let mut hb = HistBuilder::new();
        let mut config = Config { state: p.start, head: 0, tapes: input };
        let mut base = Ordinal::zero();
        let mut steps: u64 = 0;
        let mut limits: u64 = 0;
        let mut trace = vec![TraceEntry {
            stage: Ordinal::zero(),
            state: config.state,
            head: config.head,
            tapes: config.tapes.clone(),
        }];
        // (stage, snapshot id, escape ruling) for every limit stage seen.
        let mut limit_trace: Vec<(Ordinal, u32, Option<EscapeShape>)> = Vec::new();

        let outcome = 'run: loop {
            if self.opts.horizon.as_ref() == Some(&base) {
                break RunOutcome::FuelExhausted(base.clone());
            }
            if config.state == p.halt {
                break RunOutcome::Halted(base.clone());
            }

            // Concrete block.
            let mut block: Vec<u32> = Vec::new();
            let mut seen: HashMap<(usize, u64, u32), u64> = HashMap::new();
            let mut lassos: Vec<LassoRec> = Vec::new();
            let mut max_head: Option<u64> = None;
            let end = 'block: loop {
                let t = block.len() as u64;
                let snap_id = hb.intern(&config.tapes);
                block.push(snap_id);
                if steps < self.opts.trace_steps && t > 0 {
                    trace.push(TraceEntry {
                        stage: base.add(&Ordinal::from_nat(t)),
                        state: config.state,
                        head: config.head,
                        tapes: config.tapes.clone(),
                    });
                }

                // Exact cycle: whole configuration seen before in this block.
                if let Some(&t1) = seen.get(&(config.state, config.head, snap_id)) {
                    block.pop();
                    break 'block BlockEnd::Exact { t1 };
                }
                seen.insert((config.state, config.head, snap_id), t);

                // Translation lasso: check at strictly-new-max head events.
                for rec in lassos.iter_mut() {
                    rec.minh = rec.minh.min(config.head);
                }
                if max_head.map_or(true, |m| config.head > m) {
                    max_head = Some(config.head);
                    let mut hit = None;
                    for rec in &lassos {
                        if rec.state != config.state || config.head <= rec.head {
                            continue;
                        }
                        let d = config.head - rec.head;
                        let cut_now = (rec.minh + d) as usize;
                        let cut_then = rec.minh as usize;
                        let shifted = (0..3).all(|j| {
                            config.tapes.0[j].suffix(cut_now) == rec.tapes.0[j].suffix(cut_then)
                        });
                        if shifted {
                            hit = Some((rec.minh, d));
                            break;
                        }
                    }
                    if let Some((minh, d)) = hit {
                        block.pop();
                        break 'block BlockEnd::Lasso { minh, d };
                    }
                    if lassos.len() < MAX_LASSO_RECORDS {
                        lassos.push(LassoRec {
                            state: config.state,
                            head: config.head,
                            tapes: config.tapes.clone(),
                            minh: config.head,
                        });
                    }
                }

                // One concrete step.
                let reads = [
                    config.tapes.0[0].get(config.head as usize),
                    config.tapes.0[1].get(config.head as usize),
                    config.tapes.0[2].get(config.head as usize),
                ];
                let tr = p.lookup(config.state, reads);
                for j in 0..3 {
                    if tr.write[j] != reads[j] {
                        config.tapes.0[j].set(config.head as usize, tr.write[j]);
                    }
                }
                config.head = match tr.mv {
                    Move::Left => config.head.saturating_sub(1),
                    Move::Right => config.head + 1,
                    Move::Stay => config.head,
                };
                config.state = tr.next;
                steps += 1;
                if config.state == p.halt {
                    break 'block BlockEnd::Halt { step: t };
                }
                if t + 1 >= self.opts.fuel {
                    break 'block BlockEnd::OutOfFuel;
                }
            };

            // Close out the block's history contribution.
            match end {
                BlockEnd::Halt { step } => {
                    hb.push_ids(&block);
                    let stage = base.add(&Ordinal::from_nat(step));
                    trace.push(TraceEntry {
                        stage: stage.clone(),
                        state: config.state,
                        head: config.head,
                        tapes: config.tapes.clone(),
                    });
                    break 'run RunOutcome::Halted(stage);
                }
                BlockEnd::OutOfFuel => {
                    hb.push_ids(&block);
                    break 'run RunOutcome::LimitNotInferable {
                        stage: base.add(&Ordinal::from_nat(block.len() as u64)),
                        diagnostic: format!(
                            "no cycle or lasso within {} steps",
                            self.opts.fuel
                        ),
                    };
                }
                BlockEnd::Exact { t1 } => {
                    hb.push_ids(&block[..t1 as usize]);
                    hb.push_cycle(&block[t1 as usize..], omega.clone());
                }
                BlockEnd::Lasso { minh, d } => {
                    // Every cell freezes; the frozen tape below the sweep
                    // repeats the last full sweep window.
                    hb.push_ids(&block);
                    let stable = stable_tape(&config.tapes, minh, d);
                    let id = hb.intern(&stable);
                    hb.push_cycle(&[id], omega.clone());
                }
            }
            base = base.add(&omega);
            limits += 1;

            // Process the limit stage, then chase accelerated jumps.
            loop {
                let history = hb.history();
                let tapes = match apply_operator(&self.op, &history) {
                    Ok(t) => t,
                    Err(e) => {
                        break 'run RunOutcome::LimitNotInferable {
                            stage: base.clone(),
                            diagnostic: e.to_string(),
                        }
                    }
                };
                let ruling = if self.op == LimitOperator::Escaping {
                    escaping_decompose(&history).ok()
                } else {
                    None
                };
                config = Config { state: p.limit, head: 0, tapes };
                trace.push(TraceEntry {
                    stage: base.clone(),
                    state: config.state,
                    head: config.head,
                    tapes: config.tapes.clone(),
                });
                let snap_id = hb.intern(&config.tapes);

                if self.opts.certify_loops {
                    if let Some(out) =
                        self.try_certify(&history, &limit_trace, &base, snap_id, ruling)
                    {
                        break 'run out;
                    }
                }
                if self.opts.horizon.as_ref() == Some(&base) {
                    break 'run RunOutcome::FuelExhausted(base.clone());
                }
                if limits >= self.opts.max_limits {
                    break 'run RunOutcome::FuelExhausted(base.clone());
                }

                let jump =
                    if self.opts.accelerate { self.pick_jump(&limit_trace, &base, snap_id) } else { None };
                limit_trace.push((base.clone(), snap_id, ruling));
                match jump {
                    None => break,
                    Some((alpha, target)) => {
                        // Behavior from here replays the stretch since
                        // `alpha`; fast-forward through its closure.
                        let seg = history
                            .suffix_at(&alpha)
                            .expect("alpha precedes the current stage");
                        hb.push_expr(WordExpr::power(seg.expr().clone(), omega.clone()));
                        base = target;
                        limits += 1;
                    }
                }
            }
        };

        RunReport {
            outcome,
            state: config.state,
            head: config.head,
            tapes: config.tapes,
            trace,
            history: hb.history(),
            steps,
            limits,
        }
    }

    /// Earliest prior limit stage with the same snapshot whose induced jump
    /// stays within the horizon and is sound for this operator.
    fn pick_jump(
        &self,
        limit_trace: &[(Ordinal, u32, Option<EscapeShape>)],
        base: &Ordinal,
        snap_id: u32,
    ) -> Option<(Ordinal, Ordinal)> {
        // Snapshot recurrence only transports cell-by-cell rules; the
        // escaping operator's ruling depends on global history shape.
        let rule = match &self.op {
            LimitOperator::CellByCell(r) => r,
            LimitOperator::Escaping => return None,
        };
        let omega = Ordinal::omega();
        for (alpha, id, _) in limit_trace {
            if *id != snap_id {
                continue;
            }
            let beta = base.left_sub(alpha).expect("trace stages precede base");
            let target = alpha.add(&beta.mul(&omega));
            if let Some(h) = &self.opts.horizon {
                if &target > h {
                    continue;
                }
            }
            if let CellRule::Tick { tau, .. } = rule {
                // The replayed stretch must cross no switch point: if a
                // multiple of tau lies strictly between alpha and the
                // target, results there would not mirror the original
                // stretch and the jump is unsound.
                let (qa, _) = alpha.divmod(tau).expect("tau > 0");
                let first_after_alpha = tau.mul(&qa.succ());
                if first_after_alpha < target {
                    continue;
                }
            }
            return Some((alpha.clone(), target));
        }
        None
    }

    /// A recurring limit snapshot over a segment the operator loops on means
    /// the machine never halts.
    fn try_certify(
        &self,
        history: &History,
        limit_trace: &[(Ordinal, u32, Option<EscapeShape>)],
        base: &Ordinal,
        snap_id: u32,
        ruling: Option<EscapeShape>,
    ) -> Option<RunOutcome> {
        let caps = self.op.capabilities();
        for (mu, id, past_ruling) in limit_trace {
            if *id != snap_id {
                continue;
            }
            let seg = history.suffix_at(mu).ok()?;
            let closes = if caps.looping_stable {
                is_looping_pattern(&self.op, &seg).unwrap_or(false)
            } else if self.op == LimitOperator::Escaping {
                // Both stages must already be ruled repeating, and the
                // segment must close under the looping-side priority.
                let repeating = |r: &Option<EscapeShape>| {
                    matches!(r, Some(EscapeShape::Repeating | EscapeShape::LimitOfRepeating))
                };
                repeating(past_ruling)
                    && repeating(&ruling)
                    && is_looping_pattern(
                        &LimitOperator::CellByCell(CellRule::SupN(vec![2, 1, 0])),
                        &seg,
                    )
                    .unwrap_or(false)
            } else {
                // Length-sensitive rules never earn this certificate.
                false
            };
            if closes {
                let beta = base.left_sub(mu).expect("trace stages precede base");
                return Some(RunOutcome::LoopCertified {
                    alpha: mu.clone(),
                    beta,
                    seen_at: base.clone(),
                });
            }
        }
        None
    }
}

/// Limit tape of a rightward sweep: cells below the unrevisited line keep
/// their current values; beyond it, the last sweep window repeats forever.
fn stable_tape(tapes: &TapeTriple, minh: u64, d: u64) -> TapeTriple {
    let cut = (minh + d) as usize;
    let mk = |t: &SymbolicTape| {
        let prefix: Vec<u8> = (0..cut).map(|i| t.get(i)).collect();
        let cycle: Vec<u8> = (minh as usize..cut).map(|i| t.get(i)).collect();
        SymbolicTape::new(prefix, cycle).expect("d > 0")
    };
    TapeTriple([mk(&tapes.0[0]), mk(&tapes.0[1]), mk(&tapes.0[2])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn runner(src: &str, op: &str, opts: RunOptions) -> Runner {
        Runner::new(src.parse().unwrap(), op.parse().unwrap(), opts)
    }

    /// Walk right `i - 1` steps, then toggle the work cell forever.
    fn blink(i: u32) -> String {
        let mut s = String::from("symbols 2\nstates ");
        for k in 0..i - 1 {
            s += &format!("w{k} ");
        }
        s += "t\nstart w0\nlimit t\nhalt h\n";
        for k in 0..i - 1 {
            let next = if k + 2 == i { "t".into() } else { format!("w{}", k + 1) };
            s += &format!("w{k} *,*,* -> =,=,= R {next}\n");
        }
        s += "t *,0,* -> =,1,= S t\nt *,1,* -> =,0,= S t\n";
        s
    }

    #[test]
    fn blink_reaches_omega_with_exact_cycle() {
        let opts = RunOptions { horizon: Some(o("w")), ..Default::default() };
        let r = runner(&blink(4), "sup", opts);
        let rep = r.run(TapeTriple::zeros());
        assert_eq!(rep.outcome, RunOutcome::FuelExhausted(o("w")));
        // At the limit the blinking cell reads 1 under sup, 0 under inf.
        assert_eq!(rep.tapes.0[1].get(3), 1);
        let opts = RunOptions { horizon: Some(o("w")), ..Default::default() };
        let r = runner(&blink(4), "inf", opts);
        let rep = r.run(TapeTriple::zeros());
        assert_eq!(rep.tapes.0[1].get(3), 0);
        // The toggled cell's history is 0^4 (10)^w.
        let cell = 3 * 3 + 1;
        let h = rep.history.restrict(cell);
        assert_eq!(h.normalize(), "0^4 (10)^w".parse::<WordExpr<u8>>().unwrap().normalize());
    }

    #[test]
    fn blink_forever_certifies_loop() {
        let r = runner(&blink(3), "sup", RunOptions::default());
        let rep = r.run(TapeTriple::zeros());
        match rep.outcome {
            RunOutcome::LoopCertified { alpha, beta, .. } => {
                // After the first limit the head is back at cell 0, so the
                // recurring snapshot only shows up from w*2 on.
                assert_eq!(alpha, o("w*2"));
                assert_eq!(beta, o("w"));
            }
            other => panic!("expected loop certificate, got {other:?}"),
        }
    }

    /// Sweep right forever writing 1 on the work tape.
    const SWEEP: &str = "\
symbols 2
states s
start s
limit s
halt h
s *,*,* -> =,1,= R s
";

    #[test]
    fn sweeper_lassos_to_all_ones() {
        let opts = RunOptions { horizon: Some(o("w")), ..Default::default() };
        let r = runner(SWEEP, "sup", opts);
        let rep = r.run(TapeTriple::zeros());
        assert_eq!(rep.outcome, RunOutcome::FuelExhausted(o("w")));
        assert_eq!(rep.tapes.0[1].to_string(), "|1");
        assert_eq!(rep.tapes.0[0].to_string(), "|0");
        assert!(rep.steps < 20, "lasso should fire early, took {} steps", rep.steps);
    }

    /// After each limit, acknowledge at cell 0, then blink forever. The
    /// configuration at w recurs at w*2, so acceleration climbs w, w*2,
    /// w^2, w^3, ... until certification or the horizon.
    const REBLINK: &str = "\
symbols 2
states s t
start s
limit s
halt h
s *,*,* -> =,=,= S t
t *,0,* -> =,1,= S t
t *,1,* -> =,0,= S t
";

    #[test]
    fn acceleration_jumps_past_nested_limits() {
        let opts = RunOptions {
            horizon: Some(o("w^3")),
            certify_loops: false,
            ..Default::default()
        };
        let r = runner(REBLINK, "sup", opts);
        let rep = r.run(TapeTriple::zeros());
        assert_eq!(rep.outcome, RunOutcome::FuelExhausted(o("w^3")));
        let stages: Vec<String> =
            rep.trace.iter().map(|e| e.stage.to_string()).collect();
        assert!(stages.contains(&"w^2".to_string()), "stages: {stages:?}");
        assert!(stages.contains(&"w^3".to_string()), "stages: {stages:?}");
        // But it certifies immediately when allowed to.
        let opts = RunOptions { ..Default::default() };
        let r = runner(REBLINK, "sup", opts);
        let rep = r.run(TapeTriple::zeros());
        assert!(matches!(rep.outcome, RunOutcome::LoopCertified { .. }));
    }

    const HALT_AT_LIMIT: &str = "\
symbols 2
states s d
start s
limit d
halt h
s *,*,* -> =,1,= R s
d *,*,* -> =,=,= S h
";

    #[test]
    fn halts_right_after_first_limit() {
        let r = runner(HALT_AT_LIMIT, "sup", RunOptions::default());
        let rep = r.run(TapeTriple::zeros());
        assert_eq!(rep.outcome, RunOutcome::Halted(o("w")));
        assert_eq!(rep.tapes.0[1].to_string(), "|1");
    }

    const IMMEDIATE: &str = "\
symbols 2
states s
start s
limit s
halt h
s *,*,* -> =,=,= S h
";

    #[test]
    fn immediate_halt_is_stage_zero() {
        let r = runner(IMMEDIATE, "sup", RunOptions::default());
        let rep = r.run(TapeTriple::zeros());
        assert_eq!(rep.outcome, RunOutcome::Halted(Ordinal::zero()));
    }
}
