//! Seeded synthetic product corpus with planted per-category vocabularies.
//!
//! Every token slot of a record (name, description, part names, tags,
//! comments) is filled from the record's category vocabulary with
//! probability `vocab_strength`, otherwise from a vocabulary shared by all
//! categories. The vocabularies are pairwise disjoint single words, so the
//! planted fraction of any record can be recovered by tokenizing it.

use super::{Corpus, FormationError, ProductRecord};
use crate::numerics::Rng;

/// The six product categories with their default record counts.
pub const DEFAULT_COUNTS: [(&str, usize); 6] = [
    ("Car", 2271),
    ("Engine", 1597),
    ("Robotic Arm", 2013),
    ("Airplane", 2114),
    ("Gear", 1732),
    ("Wheel", 2404),
];

pub const CATEGORIES: [&str; 6] = ["Car", "Engine", "Robotic Arm", "Airplane", "Gear", "Wheel"];

const CAR: [&str; 16] = [
    "sedan", "coupe", "chassis", "bumper", "hood", "headlight", "windshield", "hatchback",
    "convertible", "dashboard", "tailgate", "grille", "sportscar", "roadster", "taillight",
    "minivan",
];
const ENGINE: [&str; 16] = [
    "piston", "crankshaft", "camshaft", "cylinder", "turbocharger", "intake", "exhaust", "valve",
    "combustion", "flywheel", "gasket", "sparkplug", "carburetor", "manifold", "horsepower",
    "displacement",
];
const ROBOTIC_ARM: [&str; 16] = [
    "gripper", "actuator", "servomotor", "manipulator", "effector", "kinematic", "wrist", "elbow",
    "payload", "cobot", "articulated", "pendant", "robot", "robotic", "axis", "automation",
];
const AIRPLANE: [&str; 16] = [
    "fuselage", "wing", "aileron", "cockpit", "propeller", "jetliner", "airliner", "rudder",
    "stabilizer", "flaps", "turbofan", "glider", "aircraft", "airfoil", "nacelle", "winglet",
];
const GEAR: [&str; 16] = [
    "spur", "helical", "bevel", "worm", "sprocket", "pinion", "involute", "teeth", "gearbox",
    "ratio", "planetary", "rack", "mesh", "backlash", "herringbone", "cog",
];
const WHEEL: [&str; 16] = [
    "rim", "tire", "tyre", "spoke", "hubcap", "tread", "alloy", "lugnut", "valvestem", "bead",
    "sidewall", "offroad", "wheelset", "caster", "rolling", "radial",
];

/// Shared, category-neutral vocabulary.
pub const CONFUSABLE: [&str; 32] = [
    "model", "design", "assembly", "part", "render", "cad", "metal", "steel", "aluminum",
    "prototype", "simple", "detailed", "version", "custom", "project", "print", "printable",
    "mechanical", "concept", "final", "new", "small", "large", "high", "quality", "free",
    "download", "test", "student", "homework", "parametric", "solid",
];

/// Planted vocabulary for one of [`CATEGORIES`].
pub fn planted_vocabulary(category: &str) -> Option<&'static [&'static str]> {
    Some(match category {
        "Car" => &CAR,
        "Engine" => &ENGINE,
        "Robotic Arm" => &ROBOTIC_ARM,
        "Airplane" => &AIRPLANE,
        "Gear" => &GEAR,
        "Wheel" => &WHEEL,
        _ => return None,
    })
}

pub fn default_counts() -> Vec<(String, usize)> {
    DEFAULT_COUNTS.iter().map(|(c, n)| (c.to_string(), *n)).collect()
}

/// Generates `counts[i].1` records for each category `counts[i].0`, in the
/// given order. Deterministic in `(seed, counts, vocab_strength)`.
pub fn synth_corpus(
    seed: u64,
    counts: &[(String, usize)],
    vocab_strength: f64,
) -> Result<Corpus, FormationError> {
    if !(vocab_strength > 0.0 && vocab_strength <= 1.0) {
        return Err(FormationError::Synth(format!(
            "vocab_strength must lie in (0, 1], got {vocab_strength}"
        )));
    }
    let mut rng = Rng::new(seed);
    let mut records = Vec::with_capacity(counts.iter().map(|c| c.1).sum());
    for (category, count) in counts {
        let planted = planted_vocabulary(category).ok_or_else(|| {
            FormationError::Synth(format!(
                "unknown category `{category}`; expected one of {CATEGORIES:?}"
            ))
        })?;
        if *count == 0 {
            return Err(FormationError::Synth(format!("count for `{category}` must be positive")));
        }
        let slug = category.to_lowercase().replace(' ', "-");
        for i in 0..*count {
            records.push(synth_record(
                &mut rng,
                format!("{slug}-{:05}", i + 1),
                category,
                planted,
                vocab_strength,
            ));
        }
    }
    let labels = counts.iter().map(|c| c.0.clone()).collect();
    Corpus::new(labels, records)
}

fn synth_record(
    rng: &mut Rng,
    id: String,
    category: &str,
    planted: &'static [&'static str],
    strength: f64,
) -> ProductRecord {
    let word = |rng: &mut Rng| -> &'static str {
        let pool: &[&'static str] = if rng.bernoulli(strength) {
            planted
        } else {
            &CONFUSABLE
        };
        pool[rng.below(pool.len())]
    };
    let phrase = |rng: &mut Rng, lo, hi| {
        let n = rng.range_inclusive(lo, hi);
        (0..n).map(|_| word(rng)).collect::<Vec<_>>().join(" ")
    };

    let name = phrase(rng, 2, 3);
    let description = phrase(rng, 6, 12) + ".";
    let parts = (0..rng.range_inclusive(2, 6))
        .map(|_| phrase(rng, 1, 2))
        .collect();
    let tags = (0..rng.range_inclusive(2, 5))
        .map(|_| word(rng).to_string())
        .collect();
    let comments = (0..rng.range_inclusive(0, 2))
        .map(|_| phrase(rng, 3, 6))
        .collect();
    let author = format!("user{:03}", rng.below(500));
    let likes = rng.below(501) as u64;
    let timestamp = format!(
        "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        rng.range_inclusive(2014, 2020),
        rng.range_inclusive(1, 12),
        rng.range_inclusive(1, 28),
        rng.below(24),
        rng.below(60),
        rng.below(60)
    );
    ProductRecord {
        id,
        category: Some(category.to_string()),
        name,
        author,
        description,
        parts,
        tags,
        likes,
        timestamp,
        comments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::{hash_embed, save_corpus, tokenize};
    use crate::numerics::dot;
    use std::collections::HashSet;

    fn counts(pairs: &[(&str, usize)]) -> Vec<(String, usize)> {
        pairs.iter().map(|(c, n)| (c.to_string(), *n)).collect()
    }

    fn all_text(r: &ProductRecord) -> String {
        let mut parts = vec![r.name.clone(), r.description.clone()];
        parts.extend(r.parts.iter().cloned());
        parts.extend(r.tags.iter().cloned());
        parts.extend(r.comments.iter().cloned());
        parts.join(" ")
    }

    #[test]
    fn vocabularies_are_disjoint() {
        let mut seen = HashSet::new();
        for c in CATEGORIES {
            for w in planted_vocabulary(c).unwrap() {
                assert!(seen.insert(*w), "{w} repeated");
                assert_eq!(tokenize(w), [*w]);
            }
        }
        for w in CONFUSABLE {
            assert!(seen.insert(w), "{w} repeated");
        }
    }

    #[test]
    fn default_counts_are_exact() {
        let c = synth_corpus(42, &default_counts(), 0.9).unwrap();
        assert_eq!(c.len(), 12_131);
        for (cat, n) in DEFAULT_COUNTS {
            assert_eq!(c.count_by_label(cat), n, "{cat}");
        }
    }

    #[test]
    fn deterministic_bytes() {
        let cs = counts(&[("Gear", 30), ("Wheel", 20)]);
        let bytes = |seed| {
            let mut buf = Vec::new();
            save_corpus(&synth_corpus(seed, &cs, 0.7).unwrap(), &mut buf).unwrap();
            buf
        };
        assert_eq!(bytes(3), bytes(3));
        assert_ne!(bytes(3), bytes(4));
    }

    #[test]
    fn planted_frequency_tracks_strength() {
        for strength in [0.3, 0.7, 0.9] {
            let c = synth_corpus(11, &counts(&[("Car", 600), ("Engine", 600)]), strength).unwrap();
            for cat in ["Car", "Engine"] {
                let vocab: HashSet<&str> = planted_vocabulary(cat).unwrap().iter().copied().collect();
                let (mut hit, mut total) = (0usize, 0usize);
                for r in c.records().iter().filter(|r| r.category.as_deref() == Some(cat)) {
                    for t in tokenize(&all_text(r)) {
                        total += 1;
                        hit += vocab.contains(t.as_str()) as usize;
                    }
                }
                let freq = hit as f64 / total as f64;
                assert!((freq - strength).abs() < 0.05, "{cat} {strength}: {freq}");
            }
        }
    }

    #[test]
    fn full_strength_is_separable_by_nearest_centroid() {
        let dim = 64;
        let c = synth_corpus(5, &counts(&[("Gear", 200), ("Airplane", 200)]), 1.0).unwrap();
        let embed = |r: &ProductRecord| hash_embed(&all_text(r), dim);
        let mut centroids = vec![vec![0.0; dim]; 2];
        let class = |r: &ProductRecord| usize::from(r.category.as_deref() == Some("Gear"));
        for r in c.records().iter().step_by(2) {
            for (a, b) in centroids[class(r)].iter_mut().zip(embed(r)) {
                *a += b;
            }
        }
        let correct = c
            .records()
            .iter()
            .skip(1)
            .step_by(2)
            .filter(|r| {
                let e = embed(r);
                let pred = usize::from(dot(&e, &centroids[1]) > dot(&e, &centroids[0]));
                pred == class(r)
            })
            .count();
        assert_eq!(correct, 200);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(synth_corpus(1, &counts(&[("Boat", 3)]), 0.5).is_err());
        assert!(synth_corpus(1, &counts(&[("Car", 0)]), 0.5).is_err());
        assert!(synth_corpus(1, &counts(&[("Car", 3)]), 0.0).is_err());
        assert!(synth_corpus(1, &counts(&[("Car", 3)]), 1.5).is_err());
    }
}
