//! Where measurement outcomes come from during a replay or a simulation.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OutcomeError {
    #[error("forced outcome string exhausted after {0} bits")]
    Exhausted(usize),
    #[error("invalid outcome mode {0:?} (expected zero, random or forced:<bits>)")]
    BadMode(String),
}

/// Supplies one bit per measurement, in measurement order.
#[derive(Clone)]
pub enum OutcomeSource {
    /// Every outcome is 0.
    Zero,
    /// Outcomes read from a fixed bit string; running out is an error.
    Forced { bits: Vec<u8>, next: usize },
    /// Fair coins from a seeded ChaCha generator.
    Random(Box<ChaCha8Rng>),
}

impl OutcomeSource {
    pub fn forced(bits: Vec<u8>) -> Self {
        Self::Forced { bits, next: 0 }
    }

    pub fn seeded(seed: u64) -> Self {
        Self::Random(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn next_bit(&mut self) -> Result<u8, OutcomeError> {
        match self {
            Self::Zero => Ok(0),
            Self::Forced { bits, next } => {
                let b = *bits.get(*next).ok_or(OutcomeError::Exhausted(bits.len()))?;
                *next += 1;
                Ok(b & 1)
            }
            Self::Random(rng) => Ok(u8::from(rng.gen::<bool>())),
        }
    }
}

impl fmt::Debug for OutcomeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Forced { bits, next } => write!(f, "Forced({bits:?} @ {next})"),
            Self::Random(_) => write!(f, "Random"),
        }
    }
}

/// Outcome mode as written on the command line; `random` needs a seed to
/// become a source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutcomeMode {
    Zero,
    Random,
    Forced(Vec<u8>),
}

impl OutcomeMode {
    pub fn source(&self, seed: u64) -> OutcomeSource {
        match self {
            Self::Zero => OutcomeSource::Zero,
            Self::Random => OutcomeSource::seeded(seed),
            Self::Forced(bits) => OutcomeSource::forced(bits.clone()),
        }
    }
}

impl FromStr for OutcomeMode {
    type Err = OutcomeError;

    fn from_str(s: &str) -> Result<Self, OutcomeError> {
        match s {
            "zero" => Ok(Self::Zero),
            "random" => Ok(Self::Random),
            _ => {
                let bits = s.strip_prefix("forced:").ok_or_else(|| OutcomeError::BadMode(s.into()))?;
                bits.chars()
                    .map(|ch| match ch {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(OutcomeError::BadMode(s.into())),
                    })
                    .collect::<Result<_, _>>()
                    .map(Self::Forced)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_bits_run_out() {
        let mut src = OutcomeSource::forced(vec![1, 0]);
        assert_eq!(src.next_bit(), Ok(1));
        assert_eq!(src.next_bit(), Ok(0));
        assert_eq!(src.next_bit(), Err(OutcomeError::Exhausted(2)));
    }

    #[test]
    fn seeded_sources_repeat() {
        let a: Vec<u8> = {
            let mut s = OutcomeSource::seeded(7);
            (0..64).map(|_| s.next_bit().unwrap()).collect()
        };
        let mut s = OutcomeSource::seeded(7);
        assert!(a.iter().all(|&b| s.next_bit().unwrap() == b));
        assert!(a.contains(&0) && a.contains(&1));
    }

    #[test]
    fn parses_modes() {
        assert_eq!("zero".parse(), Ok(OutcomeMode::Zero));
        assert_eq!("forced:101".parse(), Ok(OutcomeMode::Forced(vec![1, 0, 1])));
        assert!("forced:12".parse::<OutcomeMode>().is_err());
        assert!("sometimes".parse::<OutcomeMode>().is_err());
    }
}
