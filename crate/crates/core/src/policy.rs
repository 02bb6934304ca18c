//! Per-round colorings.
//!
//! Both policies color all ten digits with an exact 5/5 split. `Bisect`
//! additionally splits the current candidate set as evenly as possible,
//! which is the fastest schedule when button colors are known.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Coloring, Digit, DigitSet, DIGIT_COUNT};
use crate::error::{Error, Result};

const HALF: usize = DIGIT_COUNT / 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    #[default]
    RandomBalanced,
    Bisect,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::RandomBalanced => "random_balanced",
            PolicyKind::Bisect => "bisect",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<PolicyKind> {
        match s {
            "random_balanced" | "random-balanced" | "random" => Ok(PolicyKind::RandomBalanced),
            "bisect" => Ok(PolicyKind::Bisect),
            other => Err(Error::InvalidArgument(format!(
                "unknown policy {other:?} (expected random_balanced or bisect)"
            ))),
        }
    }
}

/// Five digits yellow, five grey, uniform over all 252 splits.
pub fn random_balanced_coloring<R: Rng + ?Sized>(rng: &mut R) -> Coloring {
    let yellow: DigitSet = index::sample(rng, DIGIT_COUNT, HALF)
        .into_iter()
        .map(|i| Digit::new(i as u8).expect("index below 10"))
        .collect();
    Coloring::from_yellow(yellow).expect("5/5 split has both colors")
}

/// Splits `candidates` floor/ceil between the colors, then pads with
/// non-candidates so the whole grid stays 5/5.
pub fn bisect_coloring<R: Rng + ?Sized>(candidates: DigitSet, rng: &mut R) -> Result<Coloring> {
    let n = candidates.len();
    if n < 2 {
        return Err(Error::NothingToSplit(n));
    }
    let yellow_candidates = if n % 2 == 1 && rng.random::<bool>() {
        n / 2 + 1
    } else {
        n / 2
    };

    let mut inside: Vec<Digit> = candidates.iter().collect();
    let mut outside: Vec<Digit> = Digit::all().filter(|&d| !candidates.contains(d)).collect();
    inside.shuffle(rng);
    outside.shuffle(rng);

    // yellow_candidates <= 5 and n - yellow_candidates <= 5, so the padding fits.
    let yellow: DigitSet = inside[..yellow_candidates]
        .iter()
        .chain(&outside[..HALF - yellow_candidates])
        .copied()
        .collect();
    Coloring::from_yellow(yellow)
}

pub fn next_coloring<R: Rng + ?Sized>(
    policy: PolicyKind,
    candidates: DigitSet,
    rng: &mut R,
) -> Result<Coloring> {
    match policy {
        PolicyKind::RandomBalanced => Ok(random_balanced_coloring(rng)),
        PolicyKind::Bisect => bisect_coloring(candidates, rng),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use statrs::distribution::{ChiSquared, ContinuousCDF};

    use super::*;
    use crate::engine::{classic_intersect, Color};
    use crate::rng::RngSeed;

    fn balanced(coloring: &Coloring) -> bool {
        coloring.yellow_count() == HALF && coloring.digits_with(Color::Grey).len() == HALF
    }

    fn set(ds: &[u8]) -> DigitSet {
        ds.iter().map(|&v| Digit::new(v).unwrap()).collect()
    }

    #[test]
    fn random_balanced_is_half_and_half() {
        let mut rng = RngSeed(1).stream(&[]);
        for _ in 0..1000 {
            assert!(balanced(&random_balanced_coloring(&mut rng)));
        }
    }

    #[test]
    fn random_balanced_is_reproducible() {
        let draw = |seed| {
            let mut rng = RngSeed(seed).stream(&[]);
            (0..20)
                .map(|_| random_balanced_coloring(&mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn random_balanced_is_uniform_over_splits() {
        const DRAWS: usize = 100_000;
        let mut rng = RngSeed(2024).stream(&[]);
        let mut counts: HashMap<u16, usize> = HashMap::new();
        for _ in 0..DRAWS {
            let c = random_balanced_coloring(&mut rng);
            *counts
                .entry(c.digits_with(Color::Yellow).bits())
                .or_default() += 1;
        }
        assert_eq!(counts.len(), 252);
        let expected = DRAWS as f64 / 252.0;
        let stat: f64 = counts
            .values()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new(251.0).unwrap().cdf(stat);
        assert!(p > 0.001, "chi-square {stat:.1}, p = {p:.5}");
    }

    #[test]
    fn bisect_splits_candidates() {
        let mut rng = RngSeed(3).stream(&[]);
        let c = bisect_coloring(DigitSet::all(), &mut rng).unwrap();
        assert!(balanced(&c));

        for _ in 0..200 {
            let c = bisect_coloring(set(&[2, 3, 4]), &mut rng).unwrap();
            let y = c
                .digits_with(Color::Yellow)
                .intersection(set(&[2, 3, 4]))
                .len();
            assert!(y == 1 || y == 2);
            assert!(balanced(&c));
        }
    }

    #[test]
    fn bisect_needs_two_candidates() {
        let mut rng = RngSeed(3).stream(&[]);
        assert_eq!(
            bisect_coloring(set(&[7]), &mut rng),
            Err(Error::NothingToSplit(1))
        );
        assert_eq!(
            bisect_coloring(DigitSet::empty(), &mut rng),
            Err(Error::NothingToSplit(0))
        );
        assert_eq!(
            next_coloring(PolicyKind::Bisect, set(&[7]), &mut rng),
            Err(Error::NothingToSplit(1))
        );
    }

    #[test]
    fn bisect_halves_candidates_each_round() {
        let mut rng = RngSeed(9).stream(&[]);
        for bits in 1u16..1024 {
            let cands = DigitSet::from_bits(bits);
            if cands.len() < 2 {
                continue;
            }
            let c = bisect_coloring(cands, &mut rng).unwrap();
            for color in Color::ALL {
                let left = classic_intersect(cands, &c, color).len();
                assert!(left <= cands.len().div_ceil(2));
                assert!(left >= 1);
            }
        }
    }

    #[test]
    fn dispatch() {
        let mut rng = RngSeed(5).stream(&[]);
        assert!(balanced(
            &next_coloring(PolicyKind::RandomBalanced, set(&[1]), &mut rng).unwrap()
        ));
        assert!(balanced(
            &next_coloring(PolicyKind::Bisect, DigitSet::all(), &mut rng).unwrap()
        ));
    }

    #[test]
    fn policy_names() {
        assert_eq!("bisect".parse::<PolicyKind>(), Ok(PolicyKind::Bisect));
        assert_eq!(
            "random_balanced".parse::<PolicyKind>(),
            Ok(PolicyKind::RandomBalanced)
        );
        assert!("optimal".parse::<PolicyKind>().is_err());
    }
}
