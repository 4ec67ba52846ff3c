//! Reals as codes for countable order types.
//!
//! A [`Real`] is an infinite bit sequence that is eventually periodic, so it
//! can be written down exactly as `bits:<prefix>|<pattern>`. Reading bit
//! `pair(n, m)` as "n is related to m" makes a real a code for a binary
//! relation on the naturals, and a relation that happens to be a well-order
//! codes an ordinal.
//!
//! The concrete scheme used here works below `w^3`. A natural `n` stands
//! for the ordinal `val(n) = w^2*d2 + w*d1 + d0` where `n = pair(d2,
//! pair(d1, d0))`, and the code for `alpha` sets bit `pair(n, m)` exactly
//! when `val(n) <= val(m) < alpha`, for `n, m` below a declared region
//! bound. Decoding recovers `alpha` as the least representable ordinal
//! whose index does not participate in the relation; reals whose bits
//! cannot be read this way are rejected with a concrete witness.

use crate::ordinal::Ordinal;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CodesError {
    #[error("real parse error: {0}")]
    Parse(String),
    #[error("ordinal {0} is not below w^3")]
    TooLarge(Ordinal),
    #[error("region bound {0} too large to materialize")]
    RegionTooLarge(u64),
    #[error("region bound must be at least {0} to cover the ordinal")]
    RegionTooSmall(u64),
}

/// An eventually periodic infinite bit sequence, stored as a sparse set of
/// ones in the prefix plus the repeating pattern.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Real {
    prefix_len: u64,
    ones: BTreeSet<u64>,
    pattern: Vec<bool>,
}

impl Real {
    pub fn zero() -> Self {
        Real { prefix_len: 0, ones: BTreeSet::new(), pattern: vec![false] }
    }

    pub fn new(prefix_len: u64, ones: BTreeSet<u64>, pattern: Vec<bool>) -> Result<Self, CodesError> {
        if pattern.is_empty() {
            return Err(CodesError::Parse("pattern must be nonempty".into()));
        }
        if ones.iter().any(|&k| k >= prefix_len) {
            return Err(CodesError::Parse("one past the prefix".into()));
        }
        Ok(Real { prefix_len, ones, pattern })
    }

    /// Finite-support real: ones at the given positions, zeros elsewhere.
    pub fn from_ones(ones: BTreeSet<u64>) -> Self {
        let prefix_len = ones.iter().next_back().map_or(0, |&k| k + 1);
        Real { prefix_len, ones, pattern: vec![false] }
    }

    pub fn bit(&self, k: u64) -> bool {
        if k < self.prefix_len {
            self.ones.contains(&k)
        } else {
            self.pattern[((k - self.prefix_len) % self.pattern.len() as u64) as usize]
        }
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix_len
    }

    pub fn ones(&self) -> &BTreeSet<u64> {
        &self.ones
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bits:")?;
        for k in 0..self.prefix_len {
            write!(f, "{}", u8::from(self.bit(k)))?;
        }
        write!(f, "|")?;
        for &b in &self.pattern {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

impl FromStr for Real {
    type Err = CodesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .strip_prefix("bits:")
            .ok_or_else(|| CodesError::Parse("expected bits:<prefix>|<pattern>".into()))?;
        let (p, c) = body
            .split_once('|')
            .ok_or_else(|| CodesError::Parse("expected bits:<prefix>|<pattern>".into()))?;
        let parse_bits = |t: &str| -> Result<Vec<bool>, CodesError> {
            t.chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(CodesError::Parse(format!("bad bit {ch:?}"))),
                })
                .collect()
        };
        let prefix = parse_bits(p)?;
        let pattern = if c.is_empty() { vec![false] } else { parse_bits(c)? };
        let ones = prefix
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i as u64))
            .collect();
        Real::new(prefix.len() as u64, ones, pattern)
    }
}

/// Cantor pairing `pair(i, j) = (i+j)(i+j+1)/2 + i`.
pub fn pair(i: u64, j: u64) -> u64 {
    let s = i + j;
    s * (s + 1) / 2 + i
}

pub fn unpair(k: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= k.
    let mut s = ((((8 * k + 1) as f64).sqrt() as u64).saturating_sub(1)) / 2;
    while (s + 1) * (s + 2) / 2 <= k {
        s += 1;
    }
    while s * (s + 1) / 2 > k {
        s -= 1;
    }
    let i = k - s * (s + 1) / 2;
    (i, s - i)
}

/// The ordinal a natural stands for: `n = pair(d2, pair(d1, d0))` gives
/// `w^2*d2 + w*d1 + d0`.
pub fn val(n: u64) -> Ordinal {
    let (d2, r) = unpair(n);
    let (d1, d0) = unpair(r);
    Ordinal::w_pow_mul(Ordinal::from_nat(2u8), d2)
        .add(&Ordinal::omega().mul_nat(d1))
        .add(&Ordinal::from_nat(d0))
}

/// Inverse of [`val`] for ordinals below `w^3`.
pub fn idx(a: &Ordinal) -> Result<u64, CodesError> {
    let mut digits = [0u64; 3];
    for (e, c) in a.terms() {
        let k = e.to_u64().filter(|&k| k < 3).ok_or_else(|| CodesError::TooLarge(a.clone()))?;
        let c: Ordinal = Ordinal::from_terms(vec![(Ordinal::zero(), c.clone())]);
        digits[k as usize] = c.to_u64().ok_or_else(|| CodesError::TooLarge(a.clone()))?;
    }
    Ok(pair(digits[2], pair(digits[1], digits[0])))
}

const REGION_CAP: u64 = 1 << 16;

/// A real coding an ordinal, along with the region of naturals its
/// relation bits are meant to cover.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrderCode {
    pub real: Real,
    pub region: u64,
}

/// Code an ordinal below `w^3` as a relation real.
pub fn encode_ordinal(a: &Ordinal) -> Result<OrderCode, CodesError> {
    encode_ordinal_at(a, idx(a)? + 1)
}

/// Code an ordinal with relation bits covering a chosen region. The region
/// must reach the ordinal's own index; a shared region lets several codes be
/// read back under one convention.
pub fn encode_ordinal_at(a: &Ordinal, region: u64) -> Result<OrderCode, CodesError> {
    let least = idx(a)? + 1;
    if region < least {
        return Err(CodesError::RegionTooSmall(least));
    }
    if region > REGION_CAP {
        return Err(CodesError::RegionTooLarge(region));
    }
    // Participants: indices standing for ordinals below `a`.
    let vals: Vec<Ordinal> = (0..region).map(val).collect();
    let participants: Vec<u64> = (0..region).filter(|&n| &vals[n as usize] < a).collect();
    let mut ones = BTreeSet::new();
    for &n in &participants {
        for &m in &participants {
            if vals[n as usize] <= vals[m as usize] {
                ones.insert(pair(n, m));
            }
        }
    }
    Ok(OrderCode { real: Real::from_ones(ones), region })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DecodeOutcome {
    /// The relation is the standard code of this ordinal.
    Ordinal(Ordinal),
    /// The relation is not a well-order in standard form; the witness lists
    /// offending indices (a cycle, an order violation, or a gap below a
    /// participant).
    NotWellOrder { witness: Vec<u64> },
    /// Every index in the region participates, so the coded order type lies
    /// beyond what the region can pin down.
    Indeterminate,
}

/// Read a relation real back as an ordinal.
/// An index `n` participates when its diagonal bit `pair(n, n)` is set.
pub fn decode_order_type(real: &Real, region: u64) -> DecodeOutcome {
    let rel = |n: u64, m: u64| real.bit(pair(n, m));
    let participants: Vec<u64> = (0..region).filter(|&n| rel(n, n)).collect();
    let is_part = |n: u64| rel(n, n);
    let vals: Vec<Ordinal> = (0..region).map(val).collect();
    let val = |n: u64| &vals[n as usize];

    // Edges must stay among participants and agree with the ordinal each
    // index stands for; a symmetric pair of edges is a cycle.
    for n in 0..region {
        for m in 0..region {
            if n == m || !rel(n, m) {
                continue;
            }
            if rel(m, n) {
                return DecodeOutcome::NotWellOrder { witness: vec![n, m] };
            }
            if !is_part(n) || !is_part(m) {
                return DecodeOutcome::NotWellOrder { witness: vec![n, m] };
            }
        }
    }
    for &n in &participants {
        for &m in &participants {
            if rel(n, m) != (val(n) <= val(m)) {
                return DecodeOutcome::NotWellOrder { witness: vec![n, m] };
            }
        }
    }
    // Downward closure: extracting minima must walk the representable
    // ordinals without gaps, so any smaller representable value below a
    // participant must itself participate.
    let mut by_val: Vec<u64> = (0..region).collect();
    by_val.sort_by(|a, b| val(*a).cmp(val(*b)));
    let mut seen_gap: Option<u64> = None;
    for &n in &by_val {
        if is_part(n) {
            if let Some(g) = seen_gap {
                return DecodeOutcome::NotWellOrder { witness: vec![g, n] };
            }
        } else if seen_gap.is_none() {
            seen_gap = Some(n);
        }
    }
    match seen_gap {
        Some(n) => DecodeOutcome::Ordinal(val(n).clone()),
        None => DecodeOutcome::Indeterminate,
    }
}
