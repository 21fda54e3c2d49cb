//! Seeded hold-out and k-fold splitting.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HyperboxError, Result};
use crate::hyperbox::{ClassLabel, Dataset};

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// Train and test row indices, both in shuffled order.
///
/// The test part holds `ceil(test_fraction * n)` rows. In stratified mode
/// every class contributes `round(test_fraction * n_class)` rows instead.
pub fn train_test_split_indices(
    labels: &[ClassLabel],
    test_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(HyperboxError::param("test_fraction", format!("{test_fraction} is outside (0, 1)")));
    }
    let n = labels.len();
    if n < 2 {
        return Err(HyperboxError::InvalidInput("need at least two samples to split".into()));
    }
    let order = shuffled(n, seed);
    let in_test: Vec<bool> = if stratified {
        let mut per_class: BTreeMap<ClassLabel, usize> = BTreeMap::new();
        for &l in labels {
            *per_class.entry(l).or_default() += 1;
        }
        if let Some((label, count)) = per_class.iter().find(|(_, &c)| c < 2) {
            return Err(HyperboxError::InvalidInput(format!(
                "class {label} has {count} sample(s), too few to stratify"
            )));
        }
        let quota: BTreeMap<ClassLabel, usize> = per_class
            .iter()
            .map(|(&l, &c)| (l, ((test_fraction * c as f64).round() as usize).clamp(1, c - 1)))
            .collect();
        let mut taken: BTreeMap<ClassLabel, usize> = BTreeMap::new();
        let mut flags = vec![false; n];
        for &i in &order {
            let t = taken.entry(labels[i]).or_default();
            if *t < quota[&labels[i]] {
                *t += 1;
                flags[i] = true;
            }
        }
        flags
    } else {
        let n_test = ((test_fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n - 1);
        let mut flags = vec![false; n];
        for &i in &order[..n_test] {
            flags[i] = true;
        }
        flags
    };
    let (test, train): (Vec<usize>, Vec<usize>) = order.iter().partition(|&&i| in_test[i]);
    Ok((train, test))
}

pub fn train_test_split(data: &Dataset, test_fraction: f64, seed: u64, stratified: bool) -> Result<(Dataset, Dataset)> {
    let (train, test) = train_test_split_indices(&data.labels, test_fraction, seed, stratified)?;
    Ok((data.subset(&train), data.subset(&test)))
}

/// Shuffles `0..n` and cuts it into `k` contiguous folds whose sizes differ
/// by at most one.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(HyperboxError::param("k", "need at least 2 folds"));
    }
    if k > n {
        return Err(HyperboxError::param("k", format!("{k} folds for {n} samples")));
    }
    let order = shuffled(n, seed);
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}
