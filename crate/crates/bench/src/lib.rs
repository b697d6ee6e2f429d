//! Benchmark fixtures: the sample monoids and word families.

use divmon_core::{parse_presentation, DivisibilityMonoid};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const SAMPLES: [(&str, &str); 3] = [
    ("shift", "generators: x y z\nrel: x y = y z"),
    ("two", "generators: x y z\nrel: x x = y z\nrel: y x = z z"),
    ("cyclic", "generators: x y z\nrel: x x = y z\nrel: y y = z x\nrel: z z = x y"),
];

pub fn monoid(text: &str) -> DivisibilityMonoid {
    DivisibilityMonoid::new(parse_presentation(text).expect("sample parses")).expect("sample is valid")
}

/// `n` copies of the first generator.
pub fn power_word(n: usize) -> Vec<usize> {
    vec![0; n]
}

/// Uniform random word, reproducible from `seed`.
pub fn random_word(rank: usize, n: usize, seed: u64) -> Vec<usize> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..rank)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for (_, text) in SAMPLES {
            assert_eq!(monoid(text).presentation().rank(), 3);
        }
        assert_eq!(random_word(3, 50, 7), random_word(3, 50, 7));
        assert!(random_word(3, 50, 7).iter().all(|&x| x < 3));
    }
}
