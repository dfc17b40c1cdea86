mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxbias::plm::{plm_embed, plm_embed_state, trie_query, trie_query_ge2, BiasVector, ContactTrie, PlmProjection, SuffixState};
use ctxbias::tokenizer::PieceId;

use common::{oracle_trie_ge2, oracle_trie_query, random_sequences};

fn history(rng: &mut ChaCha8Rng, v: usize, seqs: &[Vec<PieceId>]) -> Vec<PieceId> {
    let mut h: Vec<PieceId> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..v as PieceId)).collect();
    h.extend(&seqs[rng.gen_range(0..seqs.len())][..]);
    h.truncate(rng.gen_range(0..=h.len()));
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn queries_match_oracle(seed in any::<u64>(), v in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.gen_range(1..20);
        let seqs = random_sequences(&mut rng, count, v, 5);
        let trie = ContactTrie::from_sequences(&seqs, v).unwrap();
        for _ in 0..10 {
            let h = history(&mut rng, v, &seqs);
            prop_assert_eq!(trie_query(&trie, &h).ones(), oracle_trie_query(&seqs, &h, v));
            prop_assert_eq!(trie_query_ge2(&trie, &h).ones(), oracle_trie_ge2(&seqs, &h, v));
        }
    }

    #[test]
    fn suffix_state_matches_batch_queries(seed in any::<u64>(), v in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.gen_range(1..10);
        let seqs = random_sequences(&mut rng, count, v, 4);
        let trie = ContactTrie::from_sequences(&seqs, v).unwrap();
        let h = history(&mut rng, v, &seqs);
        let mut state = SuffixState::new();
        prop_assert_eq!(state.query_ge2(&trie).ones(), Vec::<PieceId>::new());
        for i in 0..h.len() {
            state.push(&trie, h[i]);
            prop_assert_eq!(state.query_last(&trie).ones(), trie_query(&trie, &h[i..=i]).ones());
            prop_assert_eq!(state.query_ge2(&trie).ones(), trie_query_ge2(&trie, &h[..=i]).ones());
        }
    }

    #[test]
    fn adding_a_sequence_only_adds_bits(seed in any::<u64>(), v in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.gen_range(1..10);
        let mut seqs = random_sequences(&mut rng, count, v, 4);
        let small = ContactTrie::from_sequences(&seqs, v).unwrap();
        let h = history(&mut rng, v, &seqs);
        seqs.extend(random_sequences(&mut rng, 1, v, 4));
        let big = ContactTrie::from_sequences(&seqs, v).unwrap();
        for (a, b) in [(trie_query(&small, &h), trie_query(&big, &h)), (trie_query_ge2(&small, &h), trie_query_ge2(&big, &h))] {
            for i in a.ones() {
                prop_assert!(b.get(i as usize));
            }
        }
    }

    #[test]
    fn every_sequence_is_contained(seed in any::<u64>(), v in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.gen_range(1..10);
        let seqs = random_sequences(&mut rng, count, v, 5);
        let trie = ContactTrie::from_sequences(&seqs, v).unwrap();
        for s in &seqs {
            prop_assert!(trie.contains(s));
            let first = trie_query(&trie, &[]);
            prop_assert!(first.get(s[0] as usize));
        }
    }

    #[test]
    fn embedding_is_linear_in_weights(seed in any::<u64>(), d in 1usize..5, v in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seqs = random_sequences(&mut rng, 4, v, 3);
        let trie = ContactTrie::from_sequences(&seqs, v).unwrap();
        // dyadic weights keep the sums exact
        let mut w = || (0..d * 3 * v).map(|_| rng.gen_range(-8i32..8) as f64 / 4.0).collect::<Vec<_>>();
        let (wa, wb) = (w(), w());
        let sum: Vec<f64> = wa.iter().zip(&wb).map(|(a, b)| a + b).collect();
        let (pa, pb, ps) = (
            PlmProjection::new(d, v, wa).unwrap(),
            PlmProjection::new(d, v, wb).unwrap(),
            PlmProjection::new(d, v, sum).unwrap(),
        );
        let h = history(&mut ChaCha8Rng::seed_from_u64(seed ^ 1), v, &seqs);
        let (ea, eb, es) = (plm_embed(&trie, &h, &pa).unwrap(), plm_embed(&trie, &h, &pb).unwrap(), plm_embed(&trie, &h, &ps).unwrap());
        for i in 0..d {
            prop_assert_eq!(ea[i] + eb[i], es[i]);
        }
        let mut state = SuffixState::new();
        for &x in &h {
            state.push(&trie, x);
        }
        prop_assert_eq!(plm_embed_state(&trie, &state, &pa).unwrap(), ea);
        prop_assert!(plm_embed(&trie, &h, &PlmProjection::zeros(d, v)).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn or_assign_is_union(a in proptest::collection::vec(any::<bool>(), 1..40), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<bool> = (0..a.len()).map(|_| rng.gen()).collect();
        let to_vec = |bits: &[bool]| {
            let mut v = BiasVector::zeros(bits.len());
            for (i, &x) in bits.iter().enumerate() {
                if x {
                    v.set(i);
                }
            }
            v
        };
        let mut u = to_vec(&a);
        u.or_assign(&to_vec(&b));
        for i in 0..a.len() {
            prop_assert_eq!(u.get(i), a[i] || b[i]);
        }
    }
}
