//! Eventually periodic tapes.
//!
//! A [`SymbolicTape`] describes a full one-way-infinite tape as a finite
//! prefix followed by a repeating pattern, so `110101...` is `1|10`. The
//! representation is kept canonical (primitive pattern, minimal prefix), so
//! structural equality is equality of the described tapes. Text form is
//! `<prefix>|<pattern>` with one digit per cell.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicTape {
    prefix: Vec<u8>,
    cycle: Vec<u8>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TapeError {
    #[error("tape pattern must be nonempty")]
    EmptyCycle,
    #[error("tape parse error: {0}")]
    Parse(String),
}

impl SymbolicTape {
    /// The all-zero tape.
    pub fn zeros() -> Self {
        SymbolicTape { prefix: Vec::new(), cycle: vec![0] }
    }

    pub fn new(prefix: Vec<u8>, cycle: Vec<u8>) -> Result<Self, TapeError> {
        if cycle.is_empty() {
            return Err(TapeError::EmptyCycle);
        }
        let mut t = SymbolicTape { prefix, cycle };
        t.canonicalize();
        Ok(t)
    }

    pub fn get(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn set(&mut self, i: usize, v: u8) {
        self.materialize(i + 1);
        self.prefix[i] = v;
        self.canonicalize();
    }

    /// Extend the explicit prefix to cover at least `n` cells; the cycle
    /// rotates along so the described tape is unchanged.
    fn materialize(&mut self, n: usize) {
        while self.prefix.len() < n {
            self.prefix.push(self.cycle[0]);
            self.cycle.rotate_left(1);
        }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// The tape with the first `k` cells dropped.
    pub fn suffix(&self, k: usize) -> SymbolicTape {
        if k <= self.prefix.len() {
            SymbolicTape::new(self.prefix[k..].to_vec(), self.cycle.clone()).unwrap()
        } else {
            let shift = (k - self.prefix.len()) % self.cycle.len();
            let mut c = self.cycle.clone();
            c.rotate_left(shift);
            SymbolicTape::new(Vec::new(), c).unwrap()
        }
    }

    /// All-zero except for finitely many cells?
    pub fn is_eventually_zero(&self) -> bool {
        self.cycle == [0]
    }

    fn canonicalize(&mut self) {
        // Primitive cycle root.
        let n = self.cycle.len();
        for d in 1..n {
            if n % d == 0 && self.cycle.chunks(d).all(|c| c == &self.cycle[..d]) {
                self.cycle.truncate(d);
                break;
            }
        }
        // Minimal prefix: a prefix ending like the cycle ends is one turn of
        // the cycle started earlier.
        while let Some(&last) = self.prefix.last() {
            if last == *self.cycle.last().unwrap() {
                self.prefix.pop();
                self.cycle.rotate_right(1);
            } else {
                break;
            }
        }
    }
}

impl fmt::Display for SymbolicTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.prefix {
            write!(f, "{}", v)?;
        }
        write!(f, "|")?;
        for v in &self.cycle {
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolicTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for SymbolicTape {
    type Err = TapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, c) = s
            .split_once('|')
            .ok_or_else(|| TapeError::Parse("expected <prefix>|<pattern>".into()))?;
        let digits = |t: &str| -> Result<Vec<u8>, TapeError> {
            t.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| TapeError::Parse(format!("bad digit {ch:?}")))
                })
                .collect()
        };
        let c = if c.is_empty() { vec![0] } else { digits(c)? };
        SymbolicTape::new(digits(p)?, c)
    }
}

/// The contents of all three tapes (input, work, output) at one stage.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TapeTriple(pub [SymbolicTape; 3]);

impl TapeTriple {
    pub fn zeros() -> Self {
        TapeTriple([SymbolicTape::zeros(), SymbolicTape::zeros(), SymbolicTape::zeros()])
    }

    /// Cell addressing used by limit rules: flat index `3*i + t` interleaves
    /// the three tapes so one index space covers the whole configuration.
    pub fn get_flat(&self, j: usize) -> u8 {
        self.0[j % 3].get(j / 3)
    }

    pub fn set_flat(&mut self, j: usize, v: u8) {
        self.0[j % 3].set(j / 3, v);
    }
}

impl fmt::Display for TapeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Debug for TapeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
