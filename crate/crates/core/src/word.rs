//! Words indexed by ordinals.
//!
//! A [`WordExpr`] denotes a function from an ordinal (its length) to letters,
//! built from single letters, concatenation, and ordinal powers. Positions
//! are resolved exactly through ordinal division, so `((01)^w)[w*2+1]` is a
//! computation, not an approximation.
//!
//! Two words are contraction-equivalent when collapsing every maximal block
//! of equal letters to a single letter yields the same word; [`WordExpr::contract`]
//! computes that normal form structurally and [`eq_ctr`] compares by it.
//! The normal form is canonical on the corpus fragment this crate generates
//! (stutter-free power bases, boundary-rotated omega powers); outside that
//! fragment it is still sound (denotation-preserving) but two equal words may
//! normalize differently.
//!
//! Letters default to `u8` symbols; the machine engine reuses the same
//! expressions with tape-snapshot ids as letters.

use crate::ordinal::{Ordinal, OrdinalError};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// Letters a word can carry: cheap to clone and totally ordered so letter
/// sets and canonical forms are deterministic.
pub trait Letter: Clone + Eq + Ord + std::hash::Hash + fmt::Debug {}
impl<T: Clone + Eq + Ord + std::hash::Hash + fmt::Debug> Letter for T {}

/// Expand `base^k` into letters only while `|base|*k` stays below this; above
/// it the power is kept opaque and some normal-form merges are skipped.
const EXPAND_CAP: u64 = 4096;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum WordExpr<L = u8> {
    Letter(L),
    Concat(Vec<WordExpr<L>>),
    Power(Box<WordExpr<L>>, Ordinal),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WordError {
    #[error("position {pos} out of range for word of length {len}")]
    OutOfRange { pos: Ordinal, len: Ordinal },
    #[error("word has no limit length, cofinal letters undefined")]
    NotLimit,
    #[error("word parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

impl<L: Letter> WordExpr<L> {
    pub fn empty() -> Self {
        WordExpr::Concat(Vec::new())
    }

    pub fn letter(l: L) -> Self {
        WordExpr::Letter(l)
    }

    pub fn concat(parts: Vec<WordExpr<L>>) -> Self {
        WordExpr::Concat(parts)
    }

    pub fn power(base: WordExpr<L>, exp: Ordinal) -> Self {
        WordExpr::Power(Box::new(base), exp)
    }

    /// Word from a finite letter sequence.
    pub fn from_letters(ls: &[L]) -> Self {
        let mut atoms = Vec::new();
        push_letters(&mut atoms, ls);
        wrap(atoms)
    }

    pub fn length(&self) -> Ordinal {
        match self {
            WordExpr::Letter(_) => Ordinal::one(),
            WordExpr::Concat(ps) => {
                let mut acc = Ordinal::zero();
                for p in ps {
                    acc = acc.add(&p.length());
                }
                acc
            }
            WordExpr::Power(u, e) => u.length().mul(e),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.length().is_zero()
    }

    /// The letter at position `pos`, resolved through ordinal divmod.
    pub fn index(&self, pos: &Ordinal) -> Result<L, WordError> {
        let len = self.length();
        if *pos >= len {
            return Err(WordError::OutOfRange { pos: pos.clone(), len });
        }
        match self {
            WordExpr::Letter(l) => Ok(l.clone()),
            WordExpr::Concat(ps) => {
                let mut rest = pos.clone();
                for p in ps {
                    let plen = p.length();
                    if rest < plen {
                        return p.index(&rest);
                    }
                    rest = rest.left_sub(&plen)?;
                }
                unreachable!("pos checked against total length")
            }
            WordExpr::Power(u, _) => {
                let (_, r) = pos.divmod(&u.length())?;
                u.index(&r)
            }
        }
    }

    /// The suffix starting at position `pos`: the word `s` with
    /// `self = self[..pos] . s`. `pos == length` gives the empty word.
    pub fn suffix_at(&self, pos: &Ordinal) -> Result<WordExpr<L>, WordError> {
        let len = self.length();
        if *pos > len {
            return Err(WordError::OutOfRange { pos: pos.clone(), len });
        }
        if pos.is_zero() {
            return Ok(self.clone());
        }
        if *pos == len {
            return Ok(WordExpr::empty());
        }
        match self {
            WordExpr::Letter(_) => unreachable!("0 < pos < 1 impossible"),
            WordExpr::Concat(ps) => {
                let mut rest = pos.clone();
                let mut out = Vec::new();
                let mut it = ps.iter();
                for p in it.by_ref() {
                    let plen = p.length();
                    if rest < plen {
                        out.push(p.suffix_at(&rest)?);
                        break;
                    }
                    rest = rest.left_sub(&plen)?;
                }
                out.extend(it.cloned());
                Ok(WordExpr::Concat(out))
            }
            WordExpr::Power(u, e) => {
                let ulen = u.length();
                let (q, r) = pos.divmod(&ulen)?;
                // Copies remaining once q whole copies are dropped.
                let rem = e.left_sub(&q)?;
                if rem.is_zero() {
                    debug_assert!(r.is_zero());
                    return Ok(WordExpr::empty());
                }
                if r.is_zero() {
                    return Ok(WordExpr::power((**u).clone(), rem));
                }
                // Inside a copy: its tail, then the copies after it.
                let after = rem.left_sub(&Ordinal::one())?;
                let mut out = vec![u.suffix_at(&r)?];
                if !after.is_zero() {
                    out.push(WordExpr::power((**u).clone(), after));
                }
                Ok(WordExpr::Concat(out))
            }
        }
    }

    /// All letters occurring in the word (assumes every mentioned subterm is
    /// reachable, which holds after normalization drops zero powers).
    pub fn letters(&self) -> BTreeSet<L> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<L>) {
        match self {
            WordExpr::Letter(l) => {
                out.insert(l.clone());
            }
            WordExpr::Concat(ps) => {
                for p in ps {
                    p.collect_letters(out);
                }
            }
            WordExpr::Power(u, e) => {
                if !e.is_zero() {
                    u.collect_letters(out);
                }
            }
        }
    }

    /// Letters occurring cofinally (unboundedly often) in a word of limit
    /// length. For a word `u . v` this is decided by the unbounded tail.
    pub fn cofinal_letters(&self) -> Result<BTreeSet<L>, WordError> {
        let n = self.normalize();
        if !n.length().is_limit() {
            return Err(WordError::NotLimit);
        }
        n.cofinal_inner()
    }

    fn cofinal_inner(&self) -> Result<BTreeSet<L>, WordError> {
        match self {
            WordExpr::Letter(_) => Err(WordError::NotLimit),
            WordExpr::Concat(ps) => match ps.last() {
                Some(last) => last.cofinal_inner(),
                None => Err(WordError::NotLimit),
            },
            WordExpr::Power(u, e) => {
                if e.is_limit() {
                    // Whole copies of u recur unboundedly: every letter of u
                    // is cofinal.
                    Ok(u.letters())
                } else {
                    // Successor exponent: the final copy carries the tail.
                    u.cofinal_inner()
                }
            }
        }
    }

    pub fn first_letter(&self) -> Option<L> {
        match self {
            WordExpr::Letter(l) => Some(l.clone()),
            WordExpr::Concat(ps) => ps.iter().find_map(|p| p.first_letter()),
            WordExpr::Power(u, e) => {
                if e.is_zero() {
                    None
                } else {
                    u.first_letter()
                }
            }
        }
    }

    /// The final letter, when the word has successor length.
    pub fn last_letter(&self) -> Option<L> {
        if !self.length().is_successor() {
            return None;
        }
        match self {
            WordExpr::Letter(l) => Some(l.clone()),
            WordExpr::Concat(ps) => ps.iter().rev().find_map(|p| {
                if p.is_empty() {
                    None
                } else {
                    p.last_letter()
                }
            }),
            WordExpr::Power(u, _) => u.last_letter(),
        }
    }

    /// Structure-preserving letter translation.
    pub fn map_letters<M: Letter>(&self, f: &mut impl FnMut(&L) -> M) -> WordExpr<M> {
        match self {
            WordExpr::Letter(l) => WordExpr::Letter(f(l)),
            WordExpr::Concat(ps) => WordExpr::Concat(ps.iter().map(|p| p.map_letters(f)).collect()),
            WordExpr::Power(u, e) => WordExpr::Power(Box::new(u.map_letters(f)), e.clone()),
        }
    }

    /// The finite letter sequence, when the word is finite and small enough
    /// to materialize.
    pub fn finite_letters(&self) -> Option<Vec<L>> {
        let len = self.length().to_u64()?;
        if len > EXPAND_CAP {
            return None;
        }
        let mut out = Vec::with_capacity(len as usize);
        self.write_finite(&mut out)?;
        Some(out)
    }

    fn write_finite(&self, out: &mut Vec<L>) -> Option<()> {
        match self {
            WordExpr::Letter(l) => {
                out.push(l.clone());
                Some(())
            }
            WordExpr::Concat(ps) => {
                for p in ps {
                    p.write_finite(out)?;
                }
                Some(())
            }
            WordExpr::Power(u, e) => {
                let k = e.to_u64()?;
                for _ in 0..k {
                    u.write_finite(out)?;
                }
                Some(())
            }
        }
    }

    /// Denotation-preserving normal form: flattened concatenations, merged
    /// adjacent powers, primitive power bases, and minimal-prefix boundary
    /// rotation into `w`-powers (`a.(ba)^w` and `(ab)^w` normalize alike).
    pub fn normalize(&self) -> WordExpr<L> {
        let mut atoms = Vec::new();
        push_normalized(&mut atoms, self);
        let atoms = coalesce(atoms);
        wrap(atoms)
    }

    /// Contraction: collapse every maximal block of equal letters to one
    /// letter, e.g. `ctr(aaabcccc) = abc` and `ctr(b^w) = b`.
    pub fn contract(&self) -> WordExpr<L> {
        let n = self.normalize();
        let mut atoms = Vec::new();
        push_contracted(&mut atoms, &n);
        // Re-normalize so rotation seams the contraction opens up (like
        // a.(ba)^w from (aba)^w) land on the canonical representative.
        wrap(coalesce(atoms)).normalize()
    }

    /// Whether the word has no two consecutive equal letters (no blocks of
    /// length above one, across all limit boundaries).
    pub fn is_stutter_free(&self) -> bool {
        self.normalize() == self.contract()
    }

    /// The word minus its first letter (empty input stays empty).
    pub fn drop_first(&self) -> WordExpr<L> {
        match self {
            WordExpr::Letter(_) => WordExpr::empty(),
            WordExpr::Concat(ps) => {
                let mut out = Vec::new();
                let mut it = ps.iter();
                for p in it.by_ref() {
                    if p.is_empty() {
                        continue;
                    }
                    out.push(p.drop_first());
                    break;
                }
                out.extend(it.cloned());
                WordExpr::Concat(out)
            }
            WordExpr::Power(u, e) => {
                if e.is_zero() || u.is_empty() {
                    return WordExpr::empty();
                }
                // u^e = u . u^e' with 1 + e' = e, so dropping one letter
                // leaves drop_first(u) . u^e'.
                let rest = e.left_sub(&Ordinal::one()).expect("e >= 1");
                let mut out = vec![u.drop_first()];
                if !rest.is_zero() {
                    out.push(WordExpr::power((**u).clone(), rest));
                }
                WordExpr::Concat(out)
            }
        }
    }
}

/// Contraction equivalence: equality of contraction normal forms.
pub fn eq_ctr<L: Letter>(a: &WordExpr<L>, b: &WordExpr<L>) -> bool {
    a.contract() == b.contract()
}

fn wrap<L: Letter>(mut atoms: Vec<WordExpr<L>>) -> WordExpr<L> {
    if atoms.len() == 1 {
        atoms.pop().unwrap()
    } else {
        WordExpr::Concat(atoms)
    }
}

/// Push a finite letter sequence as run-length atoms.
fn push_letters<L: Letter>(atoms: &mut Vec<WordExpr<L>>, ls: &[L]) {
    for l in ls {
        push_atom(atoms, WordExpr::Letter(l.clone()));
    }
}

/// Append one already-normalized atom, merging with the top of the list:
/// equal letters grow runs, equal bases add exponents.
fn push_atom<L: Letter>(atoms: &mut Vec<WordExpr<L>>, atom: WordExpr<L>) {
    if atom.is_empty() {
        return;
    }
    if let Some(top) = atoms.last_mut() {
        let merged = match (&*top, &atom) {
            (WordExpr::Letter(x), WordExpr::Letter(y)) if x == y => {
                Some(WordExpr::power(WordExpr::Letter(x.clone()), Ordinal::from_nat(2u32)))
            }
            (WordExpr::Letter(x), WordExpr::Power(u, e)) if **u == WordExpr::Letter(x.clone()) => {
                Some(WordExpr::power((**u).clone(), Ordinal::one().add(e)))
            }
            (WordExpr::Power(u, e), WordExpr::Letter(y)) if **u == WordExpr::Letter(y.clone()) => {
                Some(WordExpr::power((**u).clone(), e.add(&Ordinal::one())))
            }
            (WordExpr::Power(u, e1), WordExpr::Power(v, e2)) if u == v => {
                Some(WordExpr::power((**u).clone(), e1.add(e2)))
            }
            _ => None,
        };
        if let Some(m) = merged {
            *top = m;
            return;
        }
    }
    atoms.push(atom);
}

fn push_normalized<L: Letter>(atoms: &mut Vec<WordExpr<L>>, w: &WordExpr<L>) {
    match w {
        WordExpr::Letter(l) => push_atom(atoms, WordExpr::Letter(l.clone())),
        WordExpr::Concat(ps) => {
            for p in ps {
                push_normalized(atoms, p);
            }
        }
        WordExpr::Power(u, e) => {
            if e.is_zero() {
                return;
            }
            if e.to_u64() == Some(1) {
                push_normalized(atoms, u);
                return;
            }
            let nu = u.normalize();
            match nu {
                WordExpr::Power(v, inner) => {
                    // (v^b)^e = v^(b*e).
                    push_power(atoms, *v, inner.mul(e));
                }
                other => {
                    if other.is_empty() {
                        return;
                    }
                    push_power(atoms, other, e.clone());
                }
            }
        }
    }
}

/// Push `base^exp` for a normalized, nonempty, non-power `base`, applying
/// primitive-root reduction, finite expansion, and boundary absorption.
fn push_power<L: Letter>(atoms: &mut Vec<WordExpr<L>>, base: WordExpr<L>, exp: Ordinal) {
    if exp.is_zero() {
        return;
    }
    if exp.to_u64() == Some(1) {
        for a in flatten_atoms(&base) {
            push_atom(atoms, a);
        }
        return;
    }
    match base.finite_letters() {
        Some(bs) if !bs.is_empty() => {
            let (root, mult) = primitive_root(&bs);
            let exp = Ordinal::from_nat(mult as u64).mul(&exp);
            if root.len() == 1 {
                push_atom(atoms, WordExpr::power(WordExpr::Letter(root[0].clone()), exp));
                return;
            }
            if let Some(k) = exp.to_u64() {
                if (root.len() as u64).saturating_mul(k) <= EXPAND_CAP {
                    for _ in 0..k {
                        push_letters(atoms, &root);
                    }
                    return;
                }
                push_atom(atoms, WordExpr::power(WordExpr::from_letters(&root), exp));
                return;
            }
            // Infinite exponent: split off the leading w-block and absorb a
            // finite boundary into it by rotation, so f.(u)^w gets the
            // minimal-prefix representative (a.(ba)^w -> (ab)^w).
            let rest = exp.left_sub(&Ordinal::omega()).expect("exp >= w");
            let mut rot = root.clone();
            while let Some(x) = peek_last_letter(atoms) {
                if rot.last() == Some(&x) {
                    let last = rot.pop().unwrap();
                    rot.insert(0, last);
                    pop_last_letter(atoms);
                } else {
                    break;
                }
            }
            push_atom(atoms, WordExpr::power(WordExpr::from_letters(&rot), Ordinal::omega()));
            if !rest.is_zero() {
                push_atom(atoms, WordExpr::power(WordExpr::from_letters(&root), rest));
            }
        }
        _ => {
            if base.is_empty() {
                return;
            }
            push_atom(atoms, WordExpr::power(base, exp));
        }
    }
}

/// The last letter of the trailing finite material, if any.
fn peek_last_letter<L: Letter>(atoms: &[WordExpr<L>]) -> Option<L> {
    match atoms.last()? {
        WordExpr::Letter(l) => Some(l.clone()),
        WordExpr::Power(u, e) => {
            if e.to_u64().is_some() {
                if let WordExpr::Letter(l) = &**u {
                    return Some(l.clone());
                }
            }
            None
        }
        WordExpr::Concat(_) => None,
    }
}

fn pop_last_letter<L: Letter>(atoms: &mut Vec<WordExpr<L>>) {
    match atoms.last_mut().expect("peeked") {
        WordExpr::Letter(_) => {
            atoms.pop();
        }
        WordExpr::Power(u, e) => {
            let k = e.to_u64().expect("finite run");
            debug_assert!(matches!(&**u, WordExpr::Letter(_)));
            if k <= 1 {
                atoms.pop();
            } else if k == 2 {
                let l = (**u).clone();
                *atoms.last_mut().unwrap() = l;
            } else {
                *e = Ordinal::from_nat(k - 1);
            }
        }
        WordExpr::Concat(_) => unreachable!("peek rejected concat"),
    }
}

/// The primitive root of a finite word: the shortest `z` with `bs = z^m`.
fn primitive_root<L: Letter>(bs: &[L]) -> (Vec<L>, usize) {
    let n = bs.len();
    for d in 1..=n {
        if n % d == 0 && bs.chunks(d).all(|c| c == &bs[..d]) {
            return (bs[..d].to_vec(), n / d);
        }
    }
    unreachable!("d = n always divides")
}

/// Left-to-right fixpoint pass merging atoms that only become adjacent after
/// earlier rewrites: whole copies of a power's base following the power fold
/// into its exponent ((ab)^w . a . b == (ab)^(w+1)).
fn coalesce<L: Letter>(atoms: Vec<WordExpr<L>>) -> Vec<WordExpr<L>> {
    let mut cur = atoms;
    loop {
        let next = coalesce_once(&cur);
        if next == cur {
            return next;
        }
        cur = next;
    }
}

fn coalesce_once<L: Letter>(cur: &[WordExpr<L>]) -> Vec<WordExpr<L>> {
    let mut out: Vec<WordExpr<L>> = Vec::with_capacity(cur.len());
    let mut i = 0;
    while i < cur.len() {
        push_atom(&mut out, cur[i].clone());
        i += 1;
        // Fold whole copies of a trailing power's base out of the finite
        // material that follows it.
        let (base, exp) = match out.last() {
            Some(WordExpr::Power(u, e)) => match u.finite_letters() {
                Some(bs) if bs.len() >= 2 => (bs, e.clone()),
                _ => continue,
            },
            _ => continue,
        };
        let mut letters: Vec<L> = Vec::new();
        let mut j = i;
        while j < cur.len() && letters.len() <= EXPAND_CAP as usize {
            match cur[j].finite_letters() {
                Some(ls) if !ls.is_empty() => {
                    letters.extend(ls);
                    j += 1;
                }
                _ => break,
            }
        }
        let mut copies = 0u64;
        let mut off = 0usize;
        while letters.len() - off >= base.len() && letters[off..off + base.len()] == base[..] {
            copies += 1;
            off += base.len();
        }
        if copies == 0 {
            continue;
        }
        let u = WordExpr::from_letters(&base);
        *out.last_mut().unwrap() = WordExpr::power(u, exp.add(&Ordinal::from_nat(copies)));
        push_letters(&mut out, &letters[off..]);
        i = j;
    }
    out
}

/// Contract one normalized atom and push it with seam merging: when the
/// running result ends with the letter the next block starts with, the two
/// blocks are one block and the duplicate letter is dropped.
fn push_contracted<L: Letter>(atoms: &mut Vec<WordExpr<L>>, w: &WordExpr<L>) {
    match w {
        WordExpr::Letter(l) => push_seam(atoms, WordExpr::Letter(l.clone())),
        WordExpr::Concat(ps) => {
            for p in ps {
                push_contracted(atoms, p);
            }
        }
        WordExpr::Power(u, e) => {
            if e.is_zero() {
                return;
            }
            let cu = u.contract();
            if cu.is_empty() {
                return;
            }
            if let WordExpr::Letter(l) = &cu {
                // A power of a one-letter block is one block.
                push_seam(atoms, WordExpr::Letter(l.clone()));
                return;
            }
            let first = cu.first_letter().expect("nonempty");
            if cu.last_letter() == Some(first.clone()) {
                // Boundary rotation: with cu = a.t (t ending in a, not
                // starting with a), ctr((a.t)^e) = a.t^e; the copy seams
                // a|a fold into the rotated base.
                let t = cu.drop_first().normalize();
                push_seam(atoms, WordExpr::Letter(first));
                if e.to_u64() == Some(1) {
                    for a in flatten_atoms(&t) {
                        push_seam(atoms, a);
                    }
                } else {
                    push_seam(atoms, WordExpr::power(t, e.clone()));
                }
            } else if e.to_u64() == Some(1) {
                for a in flatten_atoms(&cu) {
                    push_seam(atoms, a);
                }
            } else {
                push_seam(atoms, WordExpr::power(cu, e.clone()));
            }
        }
    }
}

fn flatten_atoms<L: Letter>(w: &WordExpr<L>) -> Vec<WordExpr<L>> {
    match w {
        WordExpr::Concat(ps) => ps.clone(),
        other => vec![other.clone()],
    }
}

fn push_seam<L: Letter>(atoms: &mut Vec<WordExpr<L>>, atom: WordExpr<L>) {
    if atom.is_empty() {
        return;
    }
    let mut atom = atom;
    if let Some(top) = atoms.last() {
        if let Some(last) = top.last_letter() {
            if atom.first_letter() == Some(last) {
                atom = atom.drop_first().normalize();
                if atom.is_empty() {
                    return;
                }
            }
        }
    }
    // Contracted atoms are stutter-free, so one drop settles the seam.
    for a in flatten_atoms(&atom) {
        push_atom(atoms, a);
    }
}

/// Deterministic sample of positions below `len` for position-sampling
/// checks: small naturals plus CNF-guided combinations of `w`-powers.
pub fn sample_positions(len: &Ordinal, budget: usize) -> Vec<Ordinal> {
    let mut out: Vec<Ordinal> = Vec::new();
    let mut seen: BTreeSet<Ordinal> = BTreeSet::new();
    let push = |o: Ordinal, out: &mut Vec<Ordinal>, seen: &mut BTreeSet<Ordinal>| {
        if &o < len && seen.insert(o.clone()) {
            out.push(o);
        }
    };
    for k in 0..6u64 {
        push(Ordinal::from_nat(k), &mut out, &mut seen);
    }
    let mut units: Vec<Ordinal> = vec![];
    for (e, _) in len.terms() {
        if !e.is_zero() {
            units.push(Ordinal::w_pow(e.clone()));
            for (e2, _) in e.terms() {
                if !e2.is_zero() {
                    units.push(Ordinal::w_pow(e2.clone()));
                }
            }
        }
    }
    units.sort();
    units.dedup();
    units.reverse();
    // Bounded DFS over multipliers 0..=2 of each unit, plus small offsets.
    let mut stack = vec![(0usize, Ordinal::zero())];
    while let Some((i, acc)) = stack.pop() {
        if out.len() >= budget {
            break;
        }
        if i == units.len() {
            for off in 0..3u64 {
                push(acc.add(&Ordinal::from_nat(off)), &mut out, &mut seen);
            }
            continue;
        }
        for m in 0..=2u64 {
            let next = acc.add(&units[i].mul_nat(m));
            if &next < len {
                stack.push((i + 1, next));
            }
        }
    }
    out
}

impl fmt::Display for WordExpr<u8> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Letter(l) => write!(f, "{}", l),
            WordExpr::Concat(ps) => {
                for p in ps {
                    write!(f, "{}", p)?;
                }
                Ok(())
            }
            WordExpr::Power(u, e) => {
                match &**u {
                    WordExpr::Letter(l) => write!(f, "{}", l)?,
                    other => write!(f, "({})", other)?,
                }
                write!(f, "^")?;
                let s = e.to_string();
                if e.to_u64().is_some() || s.chars().all(|c| c == 'w' || c == '^') {
                    write!(f, "{}", s)
                } else {
                    write!(f, "({})", s)
                }
            }
        }
    }
}

impl<L: Letter> fmt::Debug for WordExpr<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Letter(l) => write!(f, "{:?}", l),
            WordExpr::Concat(ps) => {
                for p in ps {
                    write!(f, "{:?}", p)?;
                }
                Ok(())
            }
            WordExpr::Power(u, e) => write!(f, "({:?})^{}", u, e),
        }
    }
}

struct WParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> WParser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, WordError> {
        Err(WordError::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn word(&mut self, top: bool) -> Result<WordExpr<u8>, WordError> {
        let mut parts = Vec::new();
        loop {
            while self.peek() == Some(b' ') {
                self.pos += 1;
            }
            match self.peek() {
                Some(b'0'..=b'9') => {
                    let l = self.bytes[self.pos] - b'0';
                    self.pos += 1;
                    parts.push(self.maybe_power(WordExpr::Letter(l))?);
                }
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.word(false)?;
                    if self.peek() != Some(b')') {
                        return self.err("expected ')'");
                    }
                    self.pos += 1;
                    parts.push(self.maybe_power(inner)?);
                }
                Some(b')') if !top => break,
                None => break,
                _ => return self.err("unexpected character in word"),
            }
        }
        Ok(wrap(parts))
    }

    fn maybe_power(&mut self, base: WordExpr<u8>) -> Result<WordExpr<u8>, WordError> {
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        // Exponent: a natural, a w-tower (`w`, `w^w`, ...), or a
        // parenthesized ordinal expression; a digit run after the caret is
        // always exponent, so `0^31` is a run of thirty-one zeros.
        let e = if self.peek() == Some(b'(') {
            let mut depth = 0usize;
            let s = self.pos;
            loop {
                match self.peek() {
                    Some(b'(') => depth += 1,
                    Some(b')') => {
                        depth -= 1;
                        if depth == 0 {
                            self.pos += 1;
                            break;
                        }
                    }
                    None => return self.err("unterminated exponent"),
                    _ => {}
                }
                self.pos += 1;
            }
            let inner = std::str::from_utf8(&self.bytes[s + 1..self.pos - 1]).unwrap();
            inner.parse::<Ordinal>().map_err(WordError::Ordinal)?
        } else {
            let mut spelled = String::new();
            self.bare_exponent(&mut spelled)?;
            spelled.parse::<Ordinal>().map_err(WordError::Ordinal)?
        };
        Ok(WordExpr::power(base, e))
    }

    fn bare_exponent(&mut self, out: &mut String) -> Result<(), WordError> {
        match self.peek() {
            Some(b'0'..=b'9') => {
                while let Some(d @ b'0'..=b'9') = self.peek() {
                    out.push(d as char);
                    self.pos += 1;
                }
                Ok(())
            }
            Some(b'w') => {
                out.push('w');
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    out.push('^');
                    self.pos += 1;
                    self.bare_exponent(out)?;
                }
                Ok(())
            }
            _ => self.err("expected exponent"),
        }
    }
}

impl FromStr for WordExpr<u8> {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = WParser { bytes: s.as_bytes(), pos: 0 };
        let w = p.word(true)?;
        if p.pos != p.bytes.len() {
            return p.err("trailing input");
        }
        Ok(w)
    }
}
