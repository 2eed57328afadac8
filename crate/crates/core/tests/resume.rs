mod common;

use common::{seeded, tiny_corpus, tiny_tags};
use tagtopic_core::corpus::generate_synthetic;
use tagtopic_core::lda::{train_lda, LdaTrainer};
use tagtopic_core::ttm::{train_ttm, TtmTrainer};
use tagtopic_core::{SyntheticConfig, TrainConfig, TtmConfig, TtmState};

fn fixture() -> (tagtopic_core::Corpus, tagtopic_core::TagGraph) {
    let cfg = SyntheticConfig { tags_per_doc: 2, tokens_per_doc: 20, ..SyntheticConfig::new(3, 40, 30, 4) };
    let (c, t, _) = generate_synthetic(&cfg).unwrap();
    (c, t)
}

#[test]
fn lda_resume_is_bit_identical() {
    let (corpus, _) = fixture();
    let config = TrainConfig { max_iters: 20, tol: 0.0, seed: 3, ..TrainConfig::new(3) };
    let full = train_lda(&corpus, &config).unwrap();

    let mut first = LdaTrainer::new(&corpus, config.clone()).unwrap();
    for _ in 0..7 {
        first.step().unwrap();
    }
    let saved = first.state().clone();
    let resumed =
        LdaTrainer::resume(&corpus, config, saved, first.iteration(), first.converged()).unwrap().run().unwrap();
    assert_eq!(resumed.state, full.state);
    assert_eq!(resumed.params, full.params);
}

#[test]
fn ttm_resume_is_bit_identical_across_warmup_boundary() {
    let (corpus, tags) = fixture();
    let config = TrainConfig { max_iters: 20, tol: 0.0, seed: 5, ..TrainConfig::new(3) };
    let ttm_config = TtmConfig { warmup: 4, ..TtmConfig::higher_order() };
    let full = train_ttm(&corpus, &tags, &config, &ttm_config).unwrap();
    for stop in [2, 4, 5, 11] {
        let mut first = TtmTrainer::new(&corpus, &tags, config.clone(), ttm_config.clone()).unwrap();
        for _ in 0..stop {
            first.step().unwrap();
        }
        let parts = first.ttm_state().to_parts();
        let ttm = TtmState::from_parts(&corpus, &tags, 3, parts).unwrap();
        let resumed = TtmTrainer::resume(
            &corpus,
            &tags,
            config.clone(),
            ttm_config.clone(),
            first.messages().clone(),
            ttm,
            first.iteration(),
            first.converged(),
        )
        .unwrap()
        .run()
        .unwrap();
        assert_eq!(resumed.state, full.state, "stop {stop}");
        assert_eq!(resumed.ttm, full.ttm, "stop {stop}");
        assert_eq!(resumed.params, full.params, "stop {stop}");
    }
}

#[test]
fn zero_weights_reduce_to_lda_on_random_fixtures() {
    for seed in 0..10 {
        let mut rng = seeded(seed);
        let corpus = tiny_corpus(&mut rng, 10, 15);
        let tags = tiny_tags(&mut rng, corpus.num_docs(), 5, 3);
        let config = TrainConfig { max_iters: 25, seed, ..TrainConfig::new(3) };
        let lda = train_lda(&corpus, &config).unwrap();
        let ttm = train_ttm(&corpus, &tags, &config, &TtmConfig { warmup: 0, ..TtmConfig::new(0.0, 0.0) }).unwrap();
        assert_eq!(lda.params.theta, ttm.params.theta, "seed {seed}");
        assert_eq!(lda.params.phi, ttm.params.phi, "seed {seed}");
    }
}

#[test]
fn training_is_deterministic() {
    let (corpus, tags) = fixture();
    let config = TrainConfig { max_iters: 15, seed: 9, ..TrainConfig::new(3) };
    let a = train_ttm(&corpus, &tags, &config, &TtmConfig::pairwise()).unwrap();
    let b = train_ttm(&corpus, &tags, &config, &TtmConfig::pairwise()).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.ttm, b.ttm);
}
