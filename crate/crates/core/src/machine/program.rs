//! Program text format and the expanded transition table.
//!
//! A program is a plain-text table for a three-tape machine with a single
//! head that reads one symbol triple per step:
//!
//! ```text
//! # comments run to end of line
//! symbols 2
//! states q0 q1
//! start q0
//! limit q0
//! halt halt
//! q0 0,0,0 -> 0,1,0 R q1
//! q1 *,*,* -> =,=,= S halt
//! ```
//!
//! `symbols n` fixes the alphabet `0..n`. `*` in a read position matches any
//! symbol; explicit rows win over wildcard rows. `=` in a write position
//! writes back whatever was read. At load time wildcards expand to a total
//! table over all n^3 triples; a missing triple is a load error.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("missing directive: {0}")]
    Missing(&'static str),
    #[error("state {state}: no transition for reads {reads:?}")]
    Incomplete { state: String, reads: [u8; 3] },
    #[error("unknown state {0:?}")]
    UnknownState(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
            Move::Stay => 0,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Left => "L",
            Move::Right => "R",
            Move::Stay => "S",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub write: [u8; 3],
    pub mv: Move,
    pub next: usize,
}

/// A loaded program: total transition table over `states x symbols^3`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    pub symbols: u8,
    pub state_names: Vec<String>,
    pub start: usize,
    pub limit: usize,
    pub halt: usize,
    /// `table[state][triple_index]`; the halt state has no rows.
    table: Vec<Vec<Transition>>,
}

fn triple_index(n: u8, r: [u8; 3]) -> usize {
    let n = n as usize;
    (r[0] as usize * n + r[1] as usize) * n + r[2] as usize
}

impl Program {
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn lookup(&self, state: usize, reads: [u8; 3]) -> &Transition {
        &self.table[state][triple_index(self.symbols, reads)]
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.state_names[state]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }
}

/// Emits the fully expanded table in the source syntax; parsing it back
/// yields the same program.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "symbols {}", self.symbols)?;
        let names: Vec<&str> = self
            .state_names
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.halt)
            .map(|(_, s)| s.as_str())
            .collect();
        writeln!(f, "states {}", names.join(" "))?;
        writeln!(f, "start {}", self.state_names[self.start])?;
        writeln!(f, "limit {}", self.state_names[self.limit])?;
        writeln!(f, "halt {}", self.state_names[self.halt])?;
        let n = self.symbols;
        for (q, rows) in self.table.iter().enumerate() {
            if q == self.halt {
                continue;
            }
            for r0 in 0..n {
                for r1 in 0..n {
                    for r2 in 0..n {
                        let t = &rows[triple_index(n, [r0, r1, r2])];
                        writeln!(
                            f,
                            "{} {},{},{} -> {},{},{} {} {}",
                            self.state_names[q],
                            r0,
                            r1,
                            r2,
                            t.write[0],
                            t.write[1],
                            t.write[2],
                            t.mv,
                            self.state_names[t.next]
                        )?;
                    }
                }
            }
        }
        Ok(())
    }
}

struct Row {
    line: usize,
    state: String,
    reads: [Option<u8>; 3],
    writes: [Option<u8>; 3],
    mv: Move,
    next: String,
}

impl FromStr for Program {
    type Err = ProgramError;

    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let mut symbols: Option<u8> = None;
        let mut names: Option<Vec<String>> = None;
        let mut start = None;
        let mut limit = None;
        let mut halt = None;
        let mut rows: Vec<Row> = Vec::new();

        for (i, raw) in src.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ProgramError::Line(lineno, msg);
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            match head {
                "symbols" => {
                    let n: u8 = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .filter(|&n| (2..=16).contains(&n))
                        .ok_or_else(|| err("symbols needs a count in 2..=16".into()))?;
                    symbols = Some(n);
                }
                "states" => {
                    names = Some(words.map(|w| w.to_string()).collect());
                }
                "start" | "limit" | "halt" => {
                    let name = words
                        .next()
                        .ok_or_else(|| err(format!("{head} needs a state name")))?
                        .to_string();
                    match head {
                        "start" => start = Some(name),
                        "limit" => limit = Some(name),
                        _ => halt = Some(name),
                    }
                }
                state => {
                    // state a,b,c -> a',b',c' M next
                    let reads = words.next().ok_or_else(|| err("missing read triple".into()))?;
                    let arrow = words.next();
                    if arrow != Some("->") {
                        return Err(err("expected '->' after read triple".into()));
                    }
                    let writes = words.next().ok_or_else(|| err("missing write triple".into()))?;
                    let mv = match words.next() {
                        Some("L") => Move::Left,
                        Some("R") => Move::Right,
                        Some("S") => Move::Stay,
                        other => return Err(err(format!("bad move {other:?}"))),
                    };
                    let next = words
                        .next()
                        .ok_or_else(|| err("missing next state".into()))?
                        .to_string();
                    if words.next().is_some() {
                        return Err(err("trailing tokens".into()));
                    }
                    let parse_triple = |t: &str, allow_eq: bool| -> Result<[Option<u8>; 3], ProgramError> {
                        let parts: Vec<&str> = t.split(',').collect();
                        if parts.len() != 3 {
                            return Err(err(format!("{t:?} is not a triple")));
                        }
                        let mut out = [None; 3];
                        for (k, p) in parts.iter().enumerate() {
                            out[k] = match *p {
                                "*" if !allow_eq => None,
                                "=" if allow_eq => None,
                                p => Some(
                                    p.parse::<u8>()
                                        .map_err(|_| err(format!("bad symbol {p:?}")))?,
                                ),
                            };
                        }
                        Ok(out)
                    };
                    rows.push(Row {
                        line: lineno,
                        state: state.to_string(),
                        reads: parse_triple(reads, false)?,
                        writes: parse_triple(writes, true)?,
                        mv,
                        next,
                    });
                }
            }
        }

        let symbols = symbols.ok_or(ProgramError::Missing("symbols"))?;
        let mut state_names = names.ok_or(ProgramError::Missing("states"))?;
        let start_name = start.ok_or(ProgramError::Missing("start"))?;
        let limit_name = limit.ok_or(ProgramError::Missing("limit"))?;
        let halt_name = halt.ok_or(ProgramError::Missing("halt"))?;
        if !state_names.contains(&halt_name) {
            state_names.push(halt_name.clone());
        }
        let index: HashMap<&str, usize> =
            state_names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let resolve = |n: &str| {
            index.get(n).copied().ok_or_else(|| ProgramError::UnknownState(n.to_string()))
        };
        let start = resolve(&start_name)?;
        let limit = resolve(&limit_name)?;
        let halt = resolve(&halt_name)?;

        // Expand rows: explicit triples first, then wildcards fill the gaps
        // in source order.
        let n3 = (symbols as usize).pow(3);
        let mut table: Vec<Vec<Option<Transition>>> =
            vec![vec![None; n3]; state_names.len()];
        let mut pass = |wild: bool| -> Result<(), ProgramError> {
            for row in &rows {
                let is_wild = row.reads.iter().any(|r| r.is_none());
                if is_wild != wild {
                    continue;
                }
                let state = resolve(&row.state)
                    .map_err(|e| ProgramError::Line(row.line, e.to_string()))?;
                if state == halt {
                    return Err(ProgramError::Line(row.line, "halt state has no rows".into()));
                }
                let next = resolve(&row.next)
                    .map_err(|e| ProgramError::Line(row.line, e.to_string()))?;
                for a in 0..symbols {
                    for b in 0..symbols {
                        for c in 0..symbols {
                            let reads = [a, b, c];
                            if row.reads.iter().zip(&reads).any(|(p, r)| p.is_some_and(|v| v != *r)) {
                                continue;
                            }
                            if reads.iter().chain(row.writes.iter().flatten()).any(|&s| s >= symbols) {
                                if row.writes.iter().flatten().any(|&s| s >= symbols) {
                                    return Err(ProgramError::Line(
                                        row.line,
                                        format!("symbol out of range (alphabet 0..{symbols})"),
                                    ));
                                }
                                continue;
                            }
                            let slot = &mut table[state][triple_index(symbols, reads)];
                            if slot.is_none() {
                                let mut write = reads;
                                for k in 0..3 {
                                    if let Some(v) = row.writes[k] {
                                        write[k] = v;
                                    }
                                }
                                *slot = Some(Transition { write, mv: row.mv, next });
                            } else if !wild {
                                return Err(ProgramError::Line(
                                    row.line,
                                    format!("duplicate row for reads {reads:?}"),
                                ));
                            }
                        }
                    }
                }
            }
            Ok(())
        };
        pass(false)?;
        pass(true)?;

        let mut out = Vec::with_capacity(state_names.len());
        for (s, rows) in table.into_iter().enumerate() {
            if s == halt {
                out.push(Vec::new());
                continue;
            }
            let mut full = Vec::with_capacity(n3);
            for (j, t) in rows.into_iter().enumerate() {
                match t {
                    Some(t) => full.push(t),
                    None => {
                        let n = symbols as usize;
                        let reads = [(j / (n * n)) as u8, (j / n % n) as u8, (j % n) as u8];
                        return Err(ProgramError::Incomplete {
                            state: state_names[s].clone(),
                            reads,
                        });
                    }
                }
            }
            out.push(full);
        }

        Ok(Program { symbols, state_names, start, limit, halt, table: out })
    }
}
