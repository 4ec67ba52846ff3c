//! Shared test fixtures: an independent digit-vector oracle for ordinal
//! arithmetic below w^8, and deterministic corpus builders.

use ittm::Ordinal;

/// Ordinals below w^8 as digit vectors `d[i]` = coefficient of `w^i`,
/// compared lexicographically from the top digit. Arithmetic is the
/// hard-coded case analysis for finite exponents, written independently of
/// the CNF implementation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Digits(pub [u64; 8]);

impl Digits {
    pub fn zero() -> Self {
        Digits([0; 8])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 8]
    }

    fn lead(&self) -> Option<usize> {
        (0..8).rev().find(|&i| self.0[i] != 0)
    }

    pub fn cmp_lex(&self, other: &Digits) -> std::cmp::Ordering {
        for i in (0..8).rev() {
            match self.0[i].cmp(&other.0[i]) {
                std::cmp::Ordering::Equal => {}
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }

    /// Order sum: everything in `self` below the leading block of `rhs` is
    /// absorbed; the leading digits add; lower digits come from `rhs`.
    pub fn add(&self, rhs: &Digits) -> Digits {
        let Some(j) = rhs.lead() else { return *self };
        let mut out = [0u64; 8];
        for i in (j + 1)..8 {
            out[i] = self.0[i];
        }
        out[j] = self.0[j] + rhs.0[j];
        for i in 0..j {
            out[i] = rhs.0[i];
        }
        Digits(out)
    }

    /// Order product, term by term over `rhs` from the top digit down.
    pub fn mul(&self, rhs: &Digits) -> Digits {
        if self.is_zero() || rhs.is_zero() {
            return Digits::zero();
        }
        let lead = self.lead().unwrap();
        let mut acc = Digits::zero();
        for j in (0..8).rev() {
            if rhs.0[j] == 0 {
                continue;
            }
            let part = if j == 0 {
                // Right factor finite: scale the leading digit only.
                let mut p = *self;
                p.0[lead] *= rhs.0[0];
                p
            } else {
                // self * w^j * c = w^(lead+j) * c.
                let mut p = Digits::zero();
                assert!(lead + j < 8, "oracle overflow past w^8");
                p.0[lead + j] = rhs.0[j];
                p
            };
            acc = acc.add(&part);
        }
        acc
    }

    pub fn to_ordinal(&self) -> Ordinal {
        let mut terms = Vec::new();
        for i in (0..8).rev() {
            if self.0[i] != 0 {
                terms.push((Ordinal::from_nat(i as u64), self.0[i].into()));
            }
        }
        Ordinal::from_terms(terms)
    }

    pub fn from_ordinal(o: &Ordinal) -> Option<Digits> {
        let mut d = [0u64; 8];
        for (e, c) in o.terms() {
            let i = e.to_u64()? as usize;
            if i >= 8 {
                return None;
            }
            d[i] = u64::try_from(c).ok()?;
        }
        Some(Digits(d))
    }
}

/// Deterministic 200-ordinal corpus below w^3: exhaustive small digit
/// combinations plus a seeded spread of larger coefficients.
pub fn ordinal_corpus() -> Vec<Ordinal> {
    let mut out = Vec::new();
    for a in 0..4u64 {
        for b in 0..4u64 {
            for c in 0..4u64 {
                out.push(Digits([c, b, a, 0, 0, 0, 0, 0]).to_ordinal());
            }
        }
    }
    // xorshift-style spread for bigger coefficients, fully deterministic.
    let mut s: u64 = 0x9e3779b97f4a7c15;
    while out.len() < 200 {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let a = s % 7;
        let b = (s >> 8) % 50;
        let c = (s >> 16) % 1000;
        out.push(Digits([c, b, a, 0, 0, 0, 0, 0]).to_ordinal());
    }
    out.truncate(200);
    out
}
