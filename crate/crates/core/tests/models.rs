use hbx_core::io::{model_from_json, model_to_json};
use hbx_core::{
    cross_validate, fit_bagging, fit_onln_gfmm, fit_random_hyperboxes, load_model, merge_models, save_model,
    AggloConfig, BaseLearner, ClassLabel, Dataset, IntervalSample, LearnerConfig, Model, OnlineFitConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(seed: u64, n: usize, rows: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..rows {
        let class = (i % 3) as u32 + 1;
        let centre = 0.2 + 0.3 * (class - 1) as f64;
        x.push((0..n).map(|_| (centre + rng.gen_range(-0.15..0.15)).clamp(0.0, 1.0)).collect());
        y.push(class);
    }
    Dataset::from_points(&x, &y).unwrap()
}

fn probes(seed: u64, n: usize, count: usize) -> Vec<IntervalSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| IntervalSample::point((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap()).collect()
}

#[test]
fn ensembles_are_reproducible_across_thread_counts() {
    let data = blobs(3, 4, 90);
    let base = BaseLearner::OnlnGfmm(OnlineFitConfig::gfmm(0.2));
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let bag = fit_bagging(&data, &base, 8, 0.7, 11).unwrap();
            let rh = fit_random_hyperboxes(&data, &base, 8, 0.7, 11).unwrap();
            (model_to_json(&Model::Ensemble(bag)).unwrap(), model_to_json(&Model::Ensemble(rh)).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn ensemble_round_trip_predicts_identically() {
    let data = blobs(5, 3, 60);
    let base = BaseLearner::IolGfmm(OnlineFitConfig::gfmm(0.25));
    let model = Model::Ensemble(fit_random_hyperboxes(&data, &base, 6, 0.8, 2).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rh.json");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(model_to_json(&loaded).unwrap(), std::fs::read_to_string(&path).unwrap());
    for x in probes(9, 3, 300) {
        assert_eq!(model.predict(&x).unwrap(), loaded.predict(&x).unwrap());
    }
}

#[test]
fn round_trip_preserves_missing_dims_and_predictions() {
    let mut data = blobs(7, 3, 45);
    for (i, x) in data.samples.iter_mut().enumerate() {
        if i % 4 == 0 {
            let mut v: Vec<Option<f64>> = x.lower().iter().map(|&v| Some(v)).collect();
            v[1] = None;
            *x = IntervalSample::from_options(&v).unwrap();
        }
    }
    let model = Model::Single(fit_onln_gfmm(&data, &OnlineFitConfig::gfmm(0.15)).unwrap());
    let text = model_to_json(&model).unwrap();
    let loaded = model_from_json(&text).unwrap();
    assert_eq!(model_to_json(&loaded).unwrap(), text);
    for x in probes(1, 3, 500) {
        assert_eq!(model.predict(&x).unwrap(), loaded.predict(&x).unwrap());
    }
}

#[test]
fn merged_bagging_members_form_a_valid_model() {
    let data = blobs(13, 2, 60);
    let base = BaseLearner::OnlnGfmm(OnlineFitConfig::gfmm(0.1));
    let bag = fit_bagging(&data, &base, 5, 0.6, 4).unwrap();
    let merged = merge_models(&bag.members, &AggloConfig::new(0.3)).unwrap();
    merged.validate().unwrap();
    let pooled: usize = bag.members.iter().map(|m| m.boxes.len()).sum();
    assert!(merged.boxes.len() <= pooled);
    let correct = data.iter().filter(|(x, y)| merged.predict(x).unwrap().label == *y).count();
    assert!(correct as f64 / data.len() as f64 > 0.9);
}

#[test]
fn cross_validation_is_reproducible() {
    let data = blobs(21, 2, 75);
    let cfg = LearnerConfig::Bagging {
        base: BaseLearner::OnlnGfmm(OnlineFitConfig::gfmm(0.2)),
        n_members: 4,
        sample_rate: 0.8,
        seed: 3,
    };
    let a = cross_validate(&data, &cfg, 5, 8).unwrap();
    let b = cross_validate(&data, &cfg, 5, 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.fold_scores.len(), 5);
    assert!(a.mean > 0.8);
}

#[test]
fn unlabeled_only_model_still_predicts() {
    let data = Dataset::new(
        vec![IntervalSample::point(vec![0.2]).unwrap(), IntervalSample::point(vec![0.8]).unwrap()],
        vec![ClassLabel::Unlabeled, ClassLabel::Unlabeled],
    )
    .unwrap();
    let m = fit_onln_gfmm(&data, &OnlineFitConfig::gfmm(0.1)).unwrap();
    let p = m.predict(&IntervalSample::point(vec![0.25]).unwrap()).unwrap();
    assert_eq!(p.label, ClassLabel::Unlabeled);
    assert!(m.classes.is_empty());
}
