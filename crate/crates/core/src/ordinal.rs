//! Ordinals below epsilon_0 in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + w^e2*c2 + ... + w^ek*ck` with the
//! exponents themselves ordinals, strictly decreasing, and the coefficients
//! positive naturals. Arithmetic (addition, multiplication, division with
//! remainder, left subtraction) is exact. The text form follows the grammar
//! `0 | w^<ord>*<nat> (+ term)*`, e.g. `w^2*3+w*1+5`; `w` abbreviates `w^1*1`
//! and a bare natural is the finite term.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// An ordinal below epsilon_0, as a strictly decreasing list of
/// `(exponent, coefficient)` terms. The empty list is 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<(Ordinal, BigUint)>,
}

/// Zero / successor / limit trichotomy, see [`Ordinal::classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdinalClass {
    Zero,
    Successor,
    Limit,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("ordinal parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("division by zero ordinal")]
    DivisionByZero,
    #[error("left subtraction undefined: minuend smaller than subtrahend")]
    Underflow,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::from_nat(1u32)
    }

    pub fn omega() -> Self {
        Ordinal::w_pow(Ordinal::one())
    }

    pub fn from_nat<T: Into<BigUint>>(n: T) -> Self {
        let n: BigUint = n.into();
        if n.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![(Ordinal::zero(), n)] }
        }
    }

    /// `w^e`.
    pub fn w_pow(e: Ordinal) -> Self {
        Ordinal { terms: vec![(e, BigUint::one())] }
    }

    /// `w^e * c`; zero if `c` is zero.
    pub fn w_pow_mul<T: Into<BigUint>>(e: Ordinal, c: T) -> Self {
        let c: BigUint = c.into();
        if c.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![(e, c)] }
        }
    }

    /// Build from explicit CNF terms; exponents must be strictly decreasing
    /// and coefficients nonzero. Used by parsers and tests.
    pub fn from_terms(terms: Vec<(Ordinal, BigUint)>) -> Self {
        debug_assert!(terms.windows(2).all(|p| p[0].0 > p[1].0));
        debug_assert!(terms.iter().all(|t| !t.1.is_zero()));
        Ordinal { terms }
    }

    pub fn terms(&self) -> &[(Ordinal, BigUint)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn classify(&self) -> OrdinalClass {
        match self.terms.last() {
            None => OrdinalClass::Zero,
            Some((e, _)) if e.is_zero() => OrdinalClass::Successor,
            Some(_) => OrdinalClass::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.classify() == OrdinalClass::Limit
    }

    pub fn is_successor(&self) -> bool {
        self.classify() == OrdinalClass::Successor
    }

    /// True for ordinals of the form `w^e` (single term, coefficient 1),
    /// i.e. closed under addition of strictly smaller ordinals.
    pub fn is_additively_closed(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.is_one()
    }

    /// True for `1` and `w^(w^e)`: additively closed with the exponent
    /// zero or itself additively closed.
    pub fn is_multiplicatively_closed(&self) -> bool {
        self.is_additively_closed()
            && (self.terms[0].0.is_zero() || self.terms[0].0.is_additively_closed())
    }

    /// The finite value, if this ordinal is a natural number.
    pub fn to_u64(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        match self.terms.as_slice() {
            [(e, c)] if e.is_zero() => u64::try_from(c).ok(),
            _ => None,
        }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Ordinal addition.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        if rhs.is_zero() {
            return self.clone();
        }
        let lead = &rhs.terms[0].0;
        let mut out: Vec<(Ordinal, BigUint)> = Vec::new();
        for (e, c) in &self.terms {
            match e.cmp(lead) {
                Ordering::Greater => out.push((e.clone(), c.clone())),
                _ => break,
            }
        }
        // Merge a coefficient at the seam if the exponents coincide.
        let mut rest = rhs.terms.clone();
        if let Some((e, c)) = self.terms.iter().find(|(e, _)| e == lead) {
            debug_assert!(e == lead);
            rest[0].1 = &rest[0].1 + c;
        }
        out.extend(rest);
        Ordinal { terms: out }
    }

    /// Ordinal multiplication.
    pub fn mul(&self, rhs: &Ordinal) -> Ordinal {
        if self.is_zero() || rhs.is_zero() {
            return Ordinal::zero();
        }
        let mut acc = Ordinal::zero();
        for (be, bc) in &rhs.terms {
            let part = if be.is_zero() {
                // Right-multiplication by a finite m: scale the leading
                // coefficient, keep the tail.
                let mut t = self.terms.clone();
                t[0].1 = &t[0].1 * bc;
                Ordinal { terms: t }
            } else {
                Ordinal::w_pow_mul(self.terms[0].0.add(be), bc.clone())
            };
            acc = acc.add(&part);
        }
        acc
    }

    /// Left subtraction: the unique `r` with `lhs + r == self`, defined when
    /// `lhs <= self`.
    pub fn left_sub(&self, lhs: &Ordinal) -> Result<Ordinal, OrdinalError> {
        match lhs.cmp(self) {
            Ordering::Greater => Err(OrdinalError::Underflow),
            Ordering::Equal => Ok(Ordinal::zero()),
            Ordering::Less => {
                if lhs.is_zero() {
                    return Ok(self.clone());
                }
                let (ae, ac) = &self.terms[0];
                let (be, bc) = &lhs.terms[0];
                match be.cmp(ae) {
                    Ordering::Less => Ok(self.clone()),
                    Ordering::Greater => unreachable!("lhs < self with larger lead exponent"),
                    Ordering::Equal => {
                        if bc < ac {
                            let mut t = vec![(ae.clone(), ac - bc)];
                            t.extend(self.terms[1..].iter().cloned());
                            Ok(Ordinal { terms: t })
                        } else {
                            debug_assert!(bc == ac, "lhs < self forces bc <= ac at equal lead");
                            let a_rest = Ordinal { terms: self.terms[1..].to_vec() };
                            let b_rest = Ordinal { terms: lhs.terms[1..].to_vec() };
                            a_rest.left_sub(&b_rest)
                        }
                    }
                }
            }
        }
    }

    /// Division with remainder: the unique `(q, r)` with
    /// `rhs * q + r == self` and `r < rhs`.
    pub fn divmod(&self, rhs: &Ordinal) -> Result<(Ordinal, Ordinal), OrdinalError> {
        if rhs.is_zero() {
            return Err(OrdinalError::DivisionByZero);
        }
        if self < rhs {
            return Ok((Ordinal::zero(), self.clone()));
        }
        let (ae, ac) = &self.terms[0];
        let (be, bc) = &rhs.terms[0];
        match be.cmp(ae) {
            Ordering::Greater => unreachable!("self >= rhs with smaller lead exponent"),
            Ordering::Less => {
                // rhs * (w^(ae-be) * ac) == w^ae * ac exactly; peel the lead.
                let delta = ae.left_sub(be).expect("exponent left-sub");
                let head = Ordinal::w_pow_mul(delta, ac.clone());
                let tail = Ordinal { terms: self.terms[1..].to_vec() };
                let (q, r) = tail.divmod(rhs)?;
                Ok((head.add(&q), r))
            }
            Ordering::Equal => {
                let mut k: BigUint = ac / bc;
                debug_assert!(!k.is_zero());
                let a_rest = Ordinal { terms: self.terms[1..].to_vec() };
                let b_rest = Ordinal { terms: rhs.terms[1..].to_vec() };
                if (&k * bc) == *ac {
                    if b_rest <= a_rest {
                        let r = a_rest.left_sub(&b_rest).expect("checked");
                        return Ok((Ordinal::from_nat(k), r));
                    }
                    k -= 1u32;
                    if k.is_zero() {
                        // Exact lead but larger tail and no smaller multiple:
                        // then self < rhs, excluded above.
                        unreachable!("self >= rhs yet no positive quotient");
                    }
                }
                // Inexact lead: remainder keeps exponent ae with the leftover
                // coefficient, followed by self's tail.
                let leftover = ac - &(&k * bc);
                debug_assert!(!leftover.is_zero());
                let mut t = vec![(ae.clone(), leftover)];
                t.extend(self.terms[1..].iter().cloned());
                Ok((Ordinal::from_nat(k), Ordinal { terms: t }))
            }
        }
    }

    /// `self * n` for a natural `n`, a common special case.
    pub fn mul_nat<T: Into<BigUint>>(&self, n: T) -> Ordinal {
        self.mul(&Ordinal::from_nat(n))
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0) {
                Ordering::Equal => {}
                o => return o,
            }
            match a.1.cmp(&b.1) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::from_nat(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{}", c)?;
                continue;
            }
            write!(f, "w")?;
            if !(e.terms.len() == 1 && e.terms[0].0.is_zero() && e.terms[0].1.is_one()) {
                if e.bare_exponent_ok() {
                    write!(f, "^{}", e)?;
                } else {
                    write!(f, "^({})", e)?;
                }
            }
            if !c.is_one() {
                write!(f, "*{}", c)?;
            }
        }
        Ok(())
    }
}

impl Ordinal {
    /// Whether this ordinal, used as an exponent, renders unambiguously
    /// without parentheses: a natural, or a coefficient-1 tower `w^...`.
    fn bare_exponent_ok(&self) -> bool {
        match self.terms.as_slice() {
            [] => true,
            [(e, c)] if e.is_zero() && !c.is_zero() => true,
            [(e, c)] if c.is_one() => e.bare_exponent_ok(),
            _ => false,
        }
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, OrdinalError> {
        Err(OrdinalError::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigUint, OrdinalError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a natural number");
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(BigUint::from_str(s).unwrap())
    }

    fn expr(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.eat(b'w') {
            let e = if self.eat(b'^') { self.exponent()? } else { Ordinal::one() };
            let c = if self.eat(b'*') { self.nat()? } else { BigUint::one() };
            if c.is_zero() {
                return self.err("zero coefficient");
            }
            Ok(Ordinal::w_pow_mul(e, c))
        } else {
            Ok(Ordinal::from_nat(self.nat()?))
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(b'w') => {
                self.pos += 1;
                if self.eat(b'^') {
                    Ok(Ordinal::w_pow(self.exponent()?))
                } else {
                    Ok(Ordinal::omega())
                }
            }
            Some(b'0'..=b'9') => Ok(Ordinal::from_nat(self.nat()?)),
            _ => self.err("expected exponent"),
        }
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { bytes: s.as_bytes(), pos: 0 };
        let o = p.expr()?;
        if p.pos != p.bytes.len() {
            return p.err("trailing input");
        }
        Ok(o)
    }
}
