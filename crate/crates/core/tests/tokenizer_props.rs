mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctxbias::tokenizer::{best_parse, nbest_parses, sample_parse, tokenize_sentence, Mode, Vocabulary};

use common::all_segmentations;

fn vocab(extra: &[(String, i32)]) -> Vocabulary {
    let mut pieces: Vec<(String, f64)> = vec![
        ("_".into(), -4.0),
        ("a".into(), -1.0),
        ("b".into(), -1.5),
        ("c".into(), -2.0),
    ];
    for (p, lp) in extra {
        if !pieces.iter().any(|(q, _)| q == p) {
            pieces.push((p.clone(), -(*lp as f64) / 4.0));
        }
    }
    Vocabulary::new(pieces).unwrap()
}

fn extra_pieces() -> impl Strategy<Value = Vec<(String, i32)>> {
    proptest::collection::vec(("_?[abc]{1,3}", 1i32..40), 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn best_parse_concatenates_to_input(extra in extra_pieces(), word in "[abc]{1,8}") {
        let v = vocab(&extra);
        let text = format!("_{word}");
        let best = best_parse(&text, &v).unwrap();
        prop_assert_eq!(v.detokenize(&best.pieces), word);
        let total: f64 = best.pieces.iter().map(|&p| v.logprob(p)).sum();
        prop_assert_eq!(total, best.logprob);
    }

    #[test]
    fn best_parse_is_the_maximum(extra in extra_pieces(), word in "[abc]{1,7}") {
        let v = vocab(&extra);
        let best = best_parse(&word, &v).unwrap();
        let max = all_segmentations(&word, &v).into_iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(best.logprob, max);
    }

    #[test]
    fn nbest_is_sorted_distinct_and_complete(extra in extra_pieces(), word in "[abc]{1,6}", l in 1usize..12) {
        let v = vocab(&extra);
        let nbest = nbest_parses(&word, &v, l).unwrap();
        let all = all_segmentations(&word, &v);
        prop_assert_eq!(nbest.len(), l.min(all.len()));
        prop_assert!(nbest.windows(2).all(|w| w[0].logprob >= w[1].logprob));
        let distinct: BTreeSet<_> = nbest.iter().map(|s| s.pieces.clone()).collect();
        prop_assert_eq!(distinct.len(), nbest.len());
        let mut scores: Vec<f64> = all.iter().map(|s| s.1).collect();
        scores.sort_by(|a, b| b.total_cmp(a));
        for (s, expected) in nbest.iter().zip(&scores) {
            prop_assert_eq!(s.logprob, *expected);
        }
    }

    #[test]
    fn samples_come_from_the_nbest(extra in extra_pieces(), word in "[abc]{1,6}", seed in any::<u64>()) {
        let v = vocab(&extra);
        let nbest: BTreeSet<_> = nbest_parses(&word, &v, 4).unwrap().into_iter().map(|s| s.pieces).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            prop_assert!(nbest.contains(&sample_parse(&word, &v, 4, 0.5, &mut rng).unwrap().pieces));
        }
    }

    #[test]
    fn sampling_is_reproducible(sentence in "[abc]{1,4}( [abc]{1,4}){0,3}", seed in any::<u64>()) {
        let v = vocab(&[("ab".into(), 6), ("_a".into(), 4), ("bc".into(), 5)]);
        let mode = Mode::Sampled { l: 5, alpha: 0.3 };
        let a = tokenize_sentence(&sentence, &v, mode, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = tokenize_sentence(&sentence, &v, mode, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(v.detokenize(&a), sentence);
    }
}
