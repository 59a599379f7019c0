use std::collections::BTreeMap;

use super::TrainError;
use crate::graph::LabeledGraph;
use crate::numerics::Rng;

/// Per-class split of `labels`' positions: `floor(count · fraction)` of each
/// class go to train, the rest to test. Both sides come back shuffled.
pub fn stratified_split_indices(
    labels: &[&str],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), TrainError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(TrainError::Config(format!("split fraction must lie in (0, 1), got {fraction}")));
    }
    let mut classes: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    let mut rng = Rng::with_stream(seed, 0x5b17);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (label, mut members) in classes {
        if members.len() < 2 {
            return Err(TrainError::ClassTooSmall {
                label: label.to_string(),
                count: members.len(),
            });
        }
        rng.shuffle(&mut members);
        let cut = (members.len() as f64 * fraction).floor() as usize;
        train.extend_from_slice(&members[..cut]);
        test.extend_from_slice(&members[cut..]);
    }
    rng.shuffle(&mut train);
    rng.shuffle(&mut test);
    Ok((train, test))
}

pub fn stratified_split(
    samples: &[LabeledGraph],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledGraph>, Vec<LabeledGraph>), TrainError> {
    let labels = samples
        .iter()
        .map(|s| s.label.as_deref().ok_or_else(|| TrainError::Unlabeled(s.id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let (train, test) = stratified_split_indices(&labels, fraction, seed)?;
    let pick = |ix: Vec<usize>| ix.into_iter().map(|i| samples[i].clone()).collect();
    Ok((pick(train), pick(test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::DEFAULT_COUNTS;
    use std::collections::HashSet;

    fn labels(counts: &[(&'static str, usize)]) -> Vec<&'static str> {
        counts.iter().flat_map(|&(l, n)| std::iter::repeat(l).take(n)).collect()
    }

    #[test]
    fn exact_division() {
        let ls = labels(&[("a", 10), ("b", 10), ("c", 10)]);
        let (train, test) = stratified_split_indices(&ls, 0.8, 1).unwrap();
        for l in ["a", "b", "c"] {
            assert_eq!(train.iter().filter(|&&i| ls[i] == l).count(), 8);
            assert_eq!(test.iter().filter(|&&i| ls[i] == l).count(), 2);
        }
        let all: HashSet<usize> = train.iter().chain(&test).copied().collect();
        assert_eq!(all.len(), 30);
    }

    #[test]
    fn deterministic_per_seed() {
        let ls = labels(&[("a", 40), ("b", 25)]);
        assert_eq!(
            stratified_split_indices(&ls, 0.8, 3).unwrap(),
            stratified_split_indices(&ls, 0.8, 3).unwrap()
        );
        assert_ne!(
            stratified_split_indices(&ls, 0.8, 3).unwrap(),
            stratified_split_indices(&ls, 0.8, 4).unwrap()
        );
    }

    #[test]
    fn default_counts_split() {
        let ls = labels(&DEFAULT_COUNTS);
        let (train, test) = stratified_split_indices(&ls, 0.8, 0).unwrap();
        // Per-class floors of 0.8·count, summed by hand.
        let floors = [1816, 1277, 1610, 1691, 1385, 1923];
        for ((label, _), want) in DEFAULT_COUNTS.iter().zip(floors) {
            assert_eq!(train.iter().filter(|&&i| ls[i] == *label).count(), want, "{label}");
        }
        assert_eq!(train.len(), 9702);
        assert_eq!(test.len(), 2429);
    }

    #[test]
    fn rejects_tiny_classes_and_bad_fractions() {
        let ls = labels(&[("a", 5), ("b", 1)]);
        assert!(matches!(
            stratified_split_indices(&ls, 0.8, 0),
            Err(TrainError::ClassTooSmall { count: 1, .. })
        ));
        let ls = labels(&[("a", 5)]);
        assert!(stratified_split_indices(&ls, 1.0, 0).is_err());
        assert!(stratified_split_indices(&ls, 0.0, 0).is_err());
    }
}
