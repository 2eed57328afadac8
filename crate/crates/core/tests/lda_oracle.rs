mod common;

use common::{brute_lda_update, seeded, tiny_corpus};
use proptest::prelude::*;
use tagtopic_core::lda::{lda_sweep, lda_update};
use tagtopic_core::{MessageState, TrainConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn update_matches_brute_force(seed in any::<u64>(), topics in 1usize..=4, sweeps in 0usize..3,
                                  alpha in 0.01f64..2.0, beta in 0.001f64..0.5) {
        let mut rng = seeded(seed);
        let corpus = tiny_corpus(&mut rng, 5, 8);
        let config = TrainConfig { alpha, beta, ..TrainConfig::new(topics) };
        let mut state = MessageState::init(&corpus, topics, seed).unwrap();
        for _ in 0..sweeps {
            lda_sweep(&corpus, &mut state, &config);
        }
        for e in corpus.entries() {
            let got = lda_update(&corpus, &state, &config, e.word, e.doc).unwrap();
            let want = brute_lda_update(&corpus, &state, alpha, beta, e.word, e.doc);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn missing_entry_is_an_error() {
    let corpus = tagtopic_core::Corpus::new(2, 2, [(0, 0, 1), (1, 1, 2)]).unwrap();
    let state = MessageState::init(&corpus, 2, 0).unwrap();
    assert!(lda_update(&corpus, &state, &TrainConfig::new(2), 1, 0).is_err());
}
