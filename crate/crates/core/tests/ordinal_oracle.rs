//! Cross-checks the CNF ordinal arithmetic against the independent
//! digit-vector oracle on a 200-ordinal corpus below w^3.

mod common;

use common::{ordinal_corpus, Digits};
use ittm::Ordinal;

#[test]
fn corpus_is_distinctive() {
    let corpus = ordinal_corpus();
    assert_eq!(corpus.len(), 200);
    assert!(corpus.iter().any(|o| o.is_limit()));
    assert!(corpus.iter().any(|o| o.is_successor()));
    assert!(corpus.iter().any(|o| o.is_zero()));
    let w2 = Ordinal::w_pow(Ordinal::from_nat(2u64));
    assert!(corpus.iter().any(|o| o >= &w2));
}

#[test]
fn add_matches_oracle_on_all_pairs() {
    let corpus = ordinal_corpus();
    for a in &corpus {
        for b in &corpus {
            let da = Digits::from_ordinal(a).unwrap();
            let db = Digits::from_ordinal(b).unwrap();
            assert_eq!(a.add(b), da.add(&db).to_ordinal(), "{a} + {b}");
        }
    }
}

#[test]
fn mul_matches_oracle_on_all_pairs() {
    let corpus = ordinal_corpus();
    for a in &corpus {
        for b in &corpus {
            let da = Digits::from_ordinal(a).unwrap();
            let db = Digits::from_ordinal(b).unwrap();
            assert_eq!(a.mul(b), da.mul(&db).to_ordinal(), "{a} * {b}");
        }
    }
}

#[test]
fn cmp_matches_oracle_on_all_pairs() {
    let corpus = ordinal_corpus();
    for a in &corpus {
        for b in &corpus {
            let da = Digits::from_ordinal(a).unwrap();
            let db = Digits::from_ordinal(b).unwrap();
            assert_eq!(a.cmp(b), da.cmp_lex(&db), "{a} vs {b}");
        }
    }
}

#[test]
fn divmod_reconstructs_on_all_pairs() {
    let corpus = ordinal_corpus();
    for a in &corpus {
        for b in &corpus {
            if b.is_zero() {
                assert!(a.divmod(b).is_err());
                continue;
            }
            let (q, r) = a.divmod(b).unwrap();
            assert!(&r < b, "{a} divmod {b}: remainder {r}");
            // Verify through the oracle's arithmetic, not the implementation
            // under test.
            let recon = Digits::from_ordinal(b)
                .unwrap()
                .mul(&Digits::from_ordinal(&q).unwrap())
                .add(&Digits::from_ordinal(&r).unwrap());
            assert_eq!(recon.to_ordinal(), *a, "{a} = {b}*{q}+{r}");
        }
    }
}
