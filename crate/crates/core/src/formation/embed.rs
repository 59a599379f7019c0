/// Maps text to a fixed-width real vector.
pub trait TextEmbedder {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Vec<f64>;
}

/// Signed feature hashing over lowercase alphanumeric tokens (FNV-1a 64).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbedder {
    dim: usize,
}

impl HashEmbedder {
    /// Panics if `dim < 2`.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2, "embedding dimension must be at least 2");
        Self { dim }
    }
}

impl TextEmbedder for HashEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Vec<f64> {
        hash_embed(text, self.dim)
    }
}

/// Lowercases and splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

/// Bag-of-tokens embedding. Token `t` adds `±1` at `fnv1a64(t) mod dim`,
/// with the sign taken from the hash's top bit. The sum is L2-normalized
/// unless it is the zero vector.
///
/// Panics if `dim < 2`.
pub fn hash_embed(text: &str, dim: usize) -> Vec<f64> {
    assert!(dim >= 2, "embedding dimension must be at least 2");
    let mut v = vec![0.0; dim];
    for token in tokenize(text) {
        let h = fnv1a64(token.as_bytes());
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        v[(h % dim as u64) as usize] += sign;
    }
    let norm = crate::numerics::l2_norm(&v);
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cosine, l2_norm};
    use proptest::prelude::*;

    #[test]
    fn fnv_reference_values() {
        // Published FNV-1a 64 test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn empty_text_is_zero() {
        assert_eq!(hash_embed("", 8), vec![0.0; 8]);
        assert_eq!(hash_embed(" -- !! ", 8), vec![0.0; 8]);
    }

    #[test]
    fn case_folding() {
        let a = hash_embed("gear Gear GEAR", 16);
        let b = hash_embed("gear", 16);
        assert!((cosine(&a, &b) - 1.0).abs() < 1e-12);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
    }

    #[test]
    fn tokenizer_splits_punctuation() {
        assert_eq!(tokenize("Spur-Gear, 20T_v2"), ["spur", "gear", "20t", "v2"]);
    }

    proptest! {
        #[test]
        fn unit_norm_or_zero(words in proptest::collection::vec("[a-zA-Z0-9]{1,8}", 0..12), dim in 2usize..64) {
            let text = words.join(" ");
            let n = l2_norm(&hash_embed(&text, dim));
            prop_assert!(n == 0.0 || (n - 1.0).abs() < 1e-12);
        }

        #[test]
        fn token_order_is_irrelevant(mut words in proptest::collection::vec("[a-z]{1,6}", 1..10), seed in any::<u64>()) {
            let a = hash_embed(&words.join(" "), 32);
            let mut rng = crate::numerics::Rng::new(seed);
            rng.shuffle(&mut words);
            let b = hash_embed(&words.join(" "), 32);
            prop_assert_eq!(a, b);
        }
    }
}
