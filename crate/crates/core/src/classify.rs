//! Empirical property checks for limit rules.
//!
//! A rule under test is probed against a seeded corpus of limit-length words.
//! Each probe either passes or produces a concrete witness that can be
//! replayed by hand: the witness strings contain the exact inputs and the
//! observed outputs.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::machine::TapeTriple;
use crate::operator::{
    apply_operator, escaping_decompose, CellRule, History, LimitOperator, OperatorError,
};
use crate::ordinal::Ordinal;
use crate::word::{sample_positions, WordExpr};

/// Parameters for the seeded word corpus.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusParams {
    /// Alphabet size; letters are 0..n.
    pub n: u8,
    /// Maximum nesting depth of the generated expressions.
    pub depth: u32,
    pub seed: u64,
    pub count: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams { n: 2, depth: 3, seed: 1, count: 2000 }
    }
}

/// The exponent pool used for limit powers in generated words.
pub fn limit_exponents() -> Vec<Ordinal> {
    let w = Ordinal::omega();
    vec![w.clone(), w.mul_nat(2u64), w.mul(&w), w.mul(&w).mul(&w)]
}

fn gen_finite(rng: &mut ChaCha8Rng, n: u8, depth: u32) -> WordExpr<u8> {
    if depth == 0 || rng.gen_ratio(2, 5) {
        return WordExpr::letter(rng.gen_range(0..n));
    }
    if rng.gen_bool(0.5) {
        let parts = (0..rng.gen_range(2..=3))
            .map(|_| gen_finite(rng, n, depth - 1))
            .collect();
        WordExpr::concat(parts)
    } else {
        let e = Ordinal::from_nat(rng.gen_range(2u64..=4));
        WordExpr::power(gen_finite(rng, n, depth - 1), e)
    }
}

/// Deterministic corpus of limit-length words over the alphabet 0..n.
/// Every word ends in a power with a limit exponent, so its length is a
/// limit ordinal below w^4.
pub fn generate_corpus(params: &CorpusParams) -> Vec<WordExpr<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let exps = limit_exponents();
    let mut out = Vec::with_capacity(params.count);
    while out.len() < params.count {
        let body = gen_finite(&mut rng, params.n, params.depth.saturating_sub(1));
        let exp = exps[rng.gen_range(0..exps.len())].clone();
        let tail = WordExpr::power(body, exp);
        let w = if rng.gen_bool(0.5) {
            WordExpr::concat(vec![gen_finite(&mut rng, params.n, params.depth - 1), tail])
        } else {
            tail
        };
        if w.is_empty() {
            continue;
        }
        out.push(w);
    }
    out
}

/// Outcome of one property check.
#[derive(Debug, Clone, Serialize)]
pub enum CheckResult {
    Pass,
    Fail { witness: String },
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        matches!(self, CheckResult::Pass)
    }

    fn fail(witness: String) -> Self {
        CheckResult::Fail { witness }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckResult::Pass => write!(f, "PASS"),
            CheckResult::Fail { witness } => write!(f, "FAIL ({witness})"),
        }
    }
}

/// Verdict of the sup/inf dichotomy probe for two-symbol rules.
#[derive(Debug, Clone, Serialize)]
pub enum Dichotomy {
    Sup,
    Inf,
    Neither { witness: String },
    NotApplicable { reason: String },
}

impl fmt::Display for Dichotomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dichotomy::Sup => write!(f, "SUP"),
            Dichotomy::Inf => write!(f, "INF"),
            Dichotomy::Neither { witness } => write!(f, "NEITHER ({witness})"),
            Dichotomy::NotApplicable { reason } => write!(f, "N/A ({reason})"),
        }
    }
}

/// A per-cell limit rule under empirical test. Besides the built-in rules
/// this includes deliberately broken rules used to exercise the checks.
#[derive(Debug, Clone)]
pub enum RuleUnderTest {
    Cell { rule: CellRule, n: u8 },
    /// Ignores the history entirely and always answers 0.
    Const0,
    /// Answers with the first letter of the history.
    FirstLetter,
    /// Answers 0 on histories of length at least w^2, sup below that.
    LengthGate,
}

impl RuleUnderTest {
    pub fn name(&self) -> String {
        match self {
            RuleUnderTest::Cell { rule, .. } => {
                LimitOperator::CellByCell(rule.clone()).to_string()
            }
            RuleUnderTest::Const0 => "const0".into(),
            RuleUnderTest::FirstLetter => "first-letter".into(),
            RuleUnderTest::LengthGate => "length-gate".into(),
        }
    }

    pub fn alphabet(&self) -> u8 {
        match self {
            RuleUnderTest::Cell { rule, n } => rule.alphabet().unwrap_or(*n),
            _ => 2,
        }
    }

    pub fn apply(&self, w: &WordExpr<u8>) -> Result<u8, OperatorError> {
        match self {
            RuleUnderTest::Cell { rule, .. } => rule.apply(w),
            RuleUnderTest::Const0 => Ok(0),
            RuleUnderTest::FirstLetter => w
                .first_letter()
                .ok_or_else(|| OperatorError::Invalid("empty history".into())),
            RuleUnderTest::LengthGate => {
                let w2 = Ordinal::omega().mul(&Ordinal::omega());
                if w.length() >= w2 {
                    Ok(0)
                } else {
                    CellRule::Sup.apply(w)
                }
            }
        }
    }
}

/// Report of the five property checks plus the dichotomy verdict.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub stable: CheckResult,
    pub asymptotic: CheckResult,
    pub contraction_proof: CheckResult,
    pub looping_stable: CheckResult,
    pub cell_by_cell: CheckResult,
    pub dichotomy: Dichotomy,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.stable.passed()
            && self.asymptotic.passed()
            && self.contraction_proof.passed()
            && self.looping_stable.passed()
            && self.cell_by_cell.passed()
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule: {}", self.name)?;
        writeln!(f, "  stable:            {}", self.stable)?;
        writeln!(f, "  asymptotic:        {}", self.asymptotic)?;
        writeln!(f, "  contraction-proof: {}", self.contraction_proof)?;
        writeln!(f, "  looping-stable:    {}", self.looping_stable)?;
        writeln!(f, "  cell-by-cell:      {}", self.cell_by_cell)?;
        write!(f, "  dichotomy:         {}", self.dichotomy)
    }
}

fn err_witness(input: &str, e: &OperatorError) -> CheckResult {
    CheckResult::fail(format!("rule failed on {input}: {e}"))
}

/// Constant histories must come back unchanged: rule(x^a) = x for every
/// letter x and limit exponent a.
pub fn check_stable(rule: &RuleUnderTest) -> CheckResult {
    for x in 0..rule.alphabet() {
        for a in limit_exponents() {
            let w = WordExpr::power(WordExpr::letter(x), a.clone());
            match rule.apply(&w) {
                Ok(v) if v == x => {}
                Ok(v) => {
                    return CheckResult::fail(format!("rule({x}^({a})) = {v}, expected {x}"));
                }
                Err(e) => return err_witness(&format!("{x}^({a})"), &e),
            }
        }
    }
    CheckResult::Pass
}

/// The answer may only depend on final segments: dropping an initial part
/// that leaves the length unchanged must not change the result.
pub fn check_asymptotic(rule: &RuleUnderTest, corpus: &[WordExpr<u8>]) -> CheckResult {
    for w in corpus {
        let len = w.length();
        let full = match rule.apply(w) {
            Ok(v) => v,
            Err(e) => return err_witness(&w.to_string(), &e),
        };
        for p in sample_positions(&len, 6) {
            if p.is_zero() {
                continue;
            }
            let suf = match w.suffix_at(&p) {
                Ok(s) => s,
                Err(_) => continue,
            };
            // Only positions that keep the length intact are fair game;
            // shorter tails are different histories for length-aware rules.
            if suf.length() != len {
                continue;
            }
            match rule.apply(&suf) {
                Ok(v) if v == full => {}
                Ok(v) => {
                    return CheckResult::fail(format!(
                        "rule({w}) = {full} but rule of its tail from {p} is {v}"
                    ));
                }
                Err(e) => return err_witness(&format!("tail of {w} from {p}"), &e),
            }
        }
    }
    CheckResult::Pass
}

/// Words with the same contraction must get the same answer.
pub fn check_contraction_proof(rule: &RuleUnderTest, corpus: &[WordExpr<u8>]) -> CheckResult {
    for w in corpus {
        let c = w.contract();
        // Contraction can collapse to a finite word; a finite word is not a
        // history, so there is nothing to compare.
        if !c.length().is_limit() {
            continue;
        }
        let a = match rule.apply(w) {
            Ok(v) => v,
            Err(e) => return err_witness(&w.to_string(), &e),
        };
        match rule.apply(&c) {
            Ok(b) if b == a => {}
            Ok(b) => {
                return CheckResult::fail(format!(
                    "rule({w}) = {a} but rule(ctr = {c}) = {b}"
                ));
            }
            Err(e) => return err_witness(&format!("ctr({w}) = {c}"), &e),
        }
    }
    CheckResult::Pass
}

/// Repeating a segment w-many times or a-many times (a a limit) must agree.
pub fn check_looping_stable(rule: &RuleUnderTest, corpus: &[WordExpr<u8>]) -> CheckResult {
    let exps = limit_exponents();
    for (i, w) in corpus.iter().enumerate() {
        // Alternate between the corpus word itself and a short finite
        // segment cut from its front, so both finite and infinite repeated
        // segments get probed.
        let seg = if i % 2 == 0 {
            w.clone()
        } else {
            let mut ls = Vec::new();
            for k in 0..3u64 {
                match w.index(&Ordinal::from_nat(k)) {
                    Ok(l) => ls.push(l),
                    Err(_) => break,
                }
            }
            if ls.is_empty() {
                continue;
            }
            WordExpr::from_letters(&ls)
        };
        let rep_w = WordExpr::power(seg.clone(), Ordinal::omega());
        let base = match rule.apply(&rep_w) {
            Ok(v) => v,
            Err(e) => return err_witness(&rep_w.to_string(), &e),
        };
        for a in &exps[1..] {
            let rep_a = WordExpr::power(seg.clone(), a.clone());
            match rule.apply(&rep_a) {
                Ok(v) if v == base => {}
                Ok(v) => {
                    return CheckResult::fail(format!(
                        "rule(({seg})^w) = {base} but rule(({seg})^({a})) = {v}"
                    ));
                }
                Err(e) => return err_witness(&rep_a.to_string(), &e),
            }
        }
    }
    CheckResult::Pass
}

/// For per-cell rules this holds by construction; spot-check a handful of
/// paired histories anyway so the check is an actual experiment.
fn check_cell_by_cell_rule(rule: &RuleUnderTest, corpus: &[WordExpr<u8>]) -> CheckResult {
    for w in corpus.iter().take(50) {
        let a = match rule.apply(w) {
            Ok(v) => v,
            Err(e) => return err_witness(&w.to_string(), &e),
        };
        let b = match rule.apply(&w.normalize()) {
            Ok(v) => v,
            Err(e) => return err_witness(&w.normalize().to_string(), &e),
        };
        if a != b {
            return CheckResult::fail(format!(
                "rule({w}) = {a} but the normalized form gives {b}"
            ));
        }
    }
    CheckResult::Pass
}

/// Two-history experiment for global operators: the histories below agree
/// cell by cell on cell 0 yet the escaping operator answers differently,
/// because its ruling looks at the shape of the whole history.
pub fn escaping_cell_witness() -> (History, History) {
    let mut s1 = TapeTriple::zeros();
    s1.set_flat(0, 1);
    let mut s2 = TapeTriple::zeros();
    s2.set_flat(0, 2);
    // Same cell-0 trace, but an extra mark on cell 1 breaks the repeating
    // shape of the second history.
    let mut s2b = s2.clone();
    s2b.set_flat(3, 1);
    let a = History::from_snapshots(&[s1.clone(), s2]).power(Ordinal::omega());
    let b = History::from_snapshots(&[s1, s2b]).power(Ordinal::omega());
    (a, b)
}

fn check_cell_by_cell_escaping() -> CheckResult {
    let (a, b) = escaping_cell_witness();
    debug_assert_eq!(a.restrict(0), b.restrict(0));
    let op = LimitOperator::Escaping;
    let ra = apply_operator(&op, &a);
    let rb = apply_operator(&op, &b);
    match (ra, rb) {
        (Ok(ta), Ok(tb)) => {
            let (va, vb) = (ta.get_flat(0), tb.get_flat(0));
            if va == vb {
                CheckResult::Pass
            } else {
                let sa = escaping_decompose(&a).map(|s| format!("{s:?}")).unwrap_or_default();
                let sb = escaping_decompose(&b).map(|s| format!("{s:?}")).unwrap_or_default();
                CheckResult::fail(format!(
                    "cell 0 reads ({})^w in both histories, yet the ruling is {sa} -> {va} \
                     for the plain blink and {sb} -> {vb} once cell 1 carries an extra mark",
                    "12"
                ))
            }
        }
        (Err(e), _) | (_, Err(e)) => err_witness("escaping witness pair", &e),
    }
}

/// Two-symbol verdict: partition the corpus into eventually-constant words
/// (the rule must return that constant) and words with both letters cofinal
/// (the rule must return one common value, 1 for SUP, 0 for INF).
pub fn dichotomy_check(rule: &RuleUnderTest, corpus: &[WordExpr<u8>]) -> Dichotomy {
    if rule.alphabet() != 2 {
        return Dichotomy::NotApplicable {
            reason: format!("alphabet has {} symbols", rule.alphabet()),
        };
    }
    let mut common: Option<(u8, String)> = None;
    for w in corpus {
        let cof = match w.cofinal_letters() {
            Ok(c) => c,
            Err(_) => continue,
        };
        let v = match rule.apply(w) {
            Ok(v) => v,
            Err(e) => {
                return Dichotomy::Neither { witness: format!("rule failed on {w}: {e}") };
            }
        };
        if cof.len() == 1 {
            let c = *cof.iter().next().unwrap();
            if v != c {
                return Dichotomy::Neither {
                    witness: format!("{w} is eventually {c} but the rule answers {v}"),
                };
            }
        } else {
            match &common {
                None => common = Some((v, w.to_string())),
                Some((u, first)) if *u != v => {
                    return Dichotomy::Neither {
                        witness: format!(
                            "both letters are cofinal in {first} (answer {u}) and in {w} \
                             (answer {v})"
                        ),
                    };
                }
                Some(_) => {}
            }
        }
    }
    match common {
        Some((1, _)) => Dichotomy::Sup,
        Some((0, _)) => Dichotomy::Inf,
        Some((v, w)) => Dichotomy::Neither {
            witness: format!("cofinal words map to the non-boolean value {v}, e.g. {w}"),
        },
        None => Dichotomy::NotApplicable { reason: "no word with both letters cofinal".into() },
    }
}

/// Run all five checks plus the dichotomy probe on a per-cell rule.
pub fn classify_rule(rule: &RuleUnderTest, params: &CorpusParams) -> PropertyReport {
    let mut params = params.clone();
    params.n = rule.alphabet();
    let corpus = generate_corpus(&params);
    PropertyReport {
        name: rule.name(),
        stable: check_stable(rule),
        asymptotic: check_asymptotic(rule, &corpus),
        contraction_proof: check_contraction_proof(rule, &corpus),
        looping_stable: check_looping_stable(rule, &corpus),
        cell_by_cell: check_cell_by_cell_rule(rule, &corpus),
        dichotomy: dichotomy_check(rule, &corpus),
    }
}

/// Classify a full limit operator. Per-cell operators go through the word
/// corpus; the escaping operator is probed at the history level.
pub fn classify_operator(op: &LimitOperator, params: &CorpusParams) -> PropertyReport {
    match op {
        LimitOperator::CellByCell(rule) => {
            let r = RuleUnderTest::Cell { rule: rule.clone(), n: params.n };
            classify_rule(&r, params)
        }
        LimitOperator::Escaping => classify_escaping(params),
    }
}

fn history_from_word(w: &WordExpr<u8>, snaps: &[TapeTriple]) -> History {
    let expr = w.map_letters(&mut |l| *l as u32);
    History::new(expr, snaps.to_vec()).expect("letters stay within the snapshot table")
}

fn classify_escaping(params: &CorpusParams) -> PropertyReport {
    let op = LimitOperator::Escaping;
    // Three snapshots that differ on cell 0 give a faithful image of the
    // word corpus at the history level.
    let snaps: Vec<TapeTriple> = (0u8..3)
        .map(|v| {
            let mut t = TapeTriple::zeros();
            t.set_flat(0, v);
            t
        })
        .collect();
    let mut p = params.clone();
    p.n = 3;
    p.count = params.count.min(300);
    let corpus = generate_corpus(&p);

    let stable = (|| {
        for (x, s) in snaps.iter().enumerate() {
            for a in limit_exponents() {
                let h = History::from_snapshots(std::slice::from_ref(s)).power(a.clone());
                match apply_operator(&op, &h) {
                    Ok(t) if &t == s => {}
                    Ok(t) => {
                        return CheckResult::fail(format!(
                            "constant history of snapshot {x} repeated {a} times maps to a \
                             different tape ({t:?})"
                        ));
                    }
                    Err(e) => return err_witness(&format!("snapshot {x}^({a})"), &e),
                }
            }
        }
        CheckResult::Pass
    })();

    let asymptotic = (|| {
        for w in corpus.iter().take(120) {
            let h = history_from_word(w, &snaps);
            let len = h.length();
            let full = match apply_operator(&op, &h) {
                Ok(t) => t,
                Err(e) => return err_witness(&w.to_string(), &e),
            };
            for p in sample_positions(&len, 4) {
                if p.is_zero() {
                    continue;
                }
                let Ok(suf) = h.suffix_at(&p) else { continue };
                if suf.length() != len {
                    continue;
                }
                match apply_operator(&op, &suf) {
                    Ok(t) if t == full => {}
                    Ok(_) => {
                        return CheckResult::fail(format!(
                            "history {w} and its tail from {p} disagree"
                        ));
                    }
                    Err(e) => return err_witness(&format!("tail of {w} from {p}"), &e),
                }
            }
        }
        CheckResult::Pass
    })();

    let looping_stable = (|| {
        for w in corpus.iter().take(120) {
            let h = history_from_word(w, &snaps);
            let rep_w = h.power(Ordinal::omega());
            let base = match apply_operator(&op, &rep_w) {
                Ok(t) => t,
                Err(e) => return err_witness(&format!("({w})^w"), &e),
            };
            for a in &limit_exponents()[1..] {
                let rep_a = h.power(a.clone());
                match apply_operator(&op, &rep_a) {
                    Ok(t) if t == base => {}
                    Ok(_) => {
                        return CheckResult::fail(format!(
                            "({w})^w and ({w})^({a}) disagree"
                        ));
                    }
                    Err(e) => return err_witness(&format!("({w})^({a})"), &e),
                }
            }
        }
        CheckResult::Pass
    })();

    let contraction_proof = (|| {
        for w in corpus.iter().take(120) {
            let c = w.contract();
            if !c.length().is_limit() {
                continue;
            }
            let ha = history_from_word(w, &snaps);
            let hb = history_from_word(&c, &snaps);
            let a = match apply_operator(&op, &ha) {
                Ok(t) => t,
                Err(e) => return err_witness(&w.to_string(), &e),
            };
            match apply_operator(&op, &hb) {
                Ok(b) if b == a => {}
                Ok(_) => {
                    return CheckResult::fail(format!(
                        "history {w} and its contraction {c} disagree"
                    ));
                }
                Err(e) => return err_witness(&format!("ctr({w}) = {c}"), &e),
            }
        }
        CheckResult::Pass
    })();

    PropertyReport {
        name: op.to_string(),
        stable,
        asymptotic,
        contraction_proof,
        looping_stable,
        cell_by_cell: check_cell_by_cell_escaping(),
        dichotomy: Dichotomy::NotApplicable { reason: "not a per-cell rule".into() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn params() -> CorpusParams {
        CorpusParams { count: 400, ..CorpusParams::default() }
    }

    #[test]
    fn corpus_is_deterministic_and_limit_length() {
        let p = CorpusParams { count: 100, ..CorpusParams::default() };
        let a = generate_corpus(&p);
        let b = generate_corpus(&p);
        assert_eq!(a, b);
        for w in &a {
            assert!(w.length().is_limit(), "{w} has non-limit length");
        }
        let other = generate_corpus(&CorpusParams { seed: 2, ..p });
        assert_ne!(a, other);
    }

    #[test]
    fn sup_and_inf_classify_cleanly() {
        let p = params();
        let sup = classify_operator(&LimitOperator::sup(), &p);
        assert!(sup.all_passed(), "{sup}");
        assert!(matches!(sup.dichotomy, Dichotomy::Sup));
        let inf = classify_operator(&LimitOperator::inf(), &p);
        assert!(inf.all_passed(), "{inf}");
        assert!(matches!(inf.dichotomy, Dichotomy::Inf));
    }

    #[test]
    fn broken_rules_fail_their_check() {
        let p = params();
        let r = classify_rule(&RuleUnderTest::Const0, &p);
        assert!(!r.stable.passed(), "{r}");
        let r = classify_rule(&RuleUnderTest::FirstLetter, &p);
        assert!(!r.asymptotic.passed(), "{r}");
        let r = classify_rule(&RuleUnderTest::LengthGate, &p);
        assert!(!r.looping_stable.passed(), "{r}");
    }

    #[test]
    fn tick_fails_looping_stability_with_the_blink_witness() {
        let rule = RuleUnderTest::Cell {
            rule: CellRule::tick(o("w^3"), vec![2, 1, 0], vec![1, 0, 2]).unwrap(),
            n: 3,
        };
        // Direct witness: (12)^w repeated w^2 times has length w^3, which
        // trips the tick order, while (12)^w repeated w times does not.
        let seg: WordExpr<u8> = "(12)^w".parse().unwrap();
        assert_eq!(rule.apply(&WordExpr::power(seg.clone(), o("w"))).unwrap(), 1);
        assert_eq!(rule.apply(&WordExpr::power(seg, o("w^2"))).unwrap(), 2);
        let r = classify_rule(&rule, &params());
        assert!(!r.looping_stable.passed(), "{r}");
        assert!(r.stable.passed(), "{r}");
        assert!(r.asymptotic.passed(), "{r}");
    }

    #[test]
    fn escaping_fails_cell_by_cell_with_a_replayable_pair() {
        let r = classify_operator(&LimitOperator::Escaping, &CorpusParams::default());
        assert!(r.stable.passed(), "{r}");
        match &r.cell_by_cell {
            CheckResult::Fail { witness } => assert!(witness.contains("(12)^w")),
            CheckResult::Pass => panic!("expected a cell-by-cell failure"),
        }
        let (a, b) = escaping_cell_witness();
        assert_eq!(a.restrict(0), b.restrict(0));
        let ta = apply_operator(&LimitOperator::Escaping, &a).unwrap();
        let tb = apply_operator(&LimitOperator::Escaping, &b).unwrap();
        assert_eq!(ta.get_flat(0), 2);
        assert_eq!(tb.get_flat(0), 1);
    }

    #[test]
    fn supn_reports_its_permutation_dichotomy() {
        let rule = RuleUnderTest::Cell {
            rule: CellRule::supn(vec![1, 0]).unwrap(),
            n: 2,
        };
        let r = classify_rule(&rule, &params());
        assert!(r.all_passed(), "{r}");
        assert!(matches!(r.dichotomy, Dichotomy::Sup), "{r}");
    }
}
