//! How a construction step picks among its admissible candidates.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of leading admissible candidates a seeded policy draws from.
pub const SEEDED_POOL: usize = 8;

/// A bit string written in hexadecimal; bit `i` is bit `i % 4` of the
/// `i / 4`-th hex digit counted from the right. Bits past the end are 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StreamBits(String);

impl StreamBits {
    pub fn bit(&self, i: usize) -> bool {
        let digits = self.0.as_bytes();
        let pos = i / 4;
        if pos >= digits.len() {
            return false;
        }
        let d = (digits[digits.len() - 1 - pos] as char).to_digit(16).unwrap_or(0);
        (d >> (i % 4)) & 1 == 1
    }

    pub fn as_hex(&self) -> &str {
        &self.0
    }

    /// Bits of `value`, least significant first.
    pub fn from_value(value: u64) -> Self {
        StreamBits(format!("{value:x}"))
    }
}

impl FromStr for StreamBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || !s.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::Format(format!("invalid hex bit string {s:?}")));
        }
        Ok(StreamBits(s.to_ascii_lowercase()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ChoicePolicy {
    /// Smallest `|a|`, positive before negative.
    MinAbs,
    /// Step `k` takes the first (bit `k-1` = 0) or second (bit = 1) candidate.
    Stream(StreamBits),
    /// A ChaCha-driven rank among the first [`SEEDED_POOL`] candidates.
    Seeded(u64),
}

impl fmt::Display for ChoicePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChoicePolicy::MinAbs => write!(f, "min-abs"),
            ChoicePolicy::Stream(bits) => write!(f, "stream:{}", bits.as_hex()),
            ChoicePolicy::Seeded(seed) => write!(f, "seed:{seed}"),
        }
    }
}

impl FromStr for ChoicePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "min-abs" {
            return Ok(ChoicePolicy::MinAbs);
        }
        if let Some(hex) = s.strip_prefix("stream:") {
            return Ok(ChoicePolicy::Stream(hex.parse()?));
        }
        if let Some(seed) = s.strip_prefix("seed:") {
            let seed = seed
                .parse()
                .map_err(|_| Error::Format(format!("invalid seed {seed:?}")))?;
            return Ok(ChoicePolicy::Seeded(seed));
        }
        Err(Error::Format(format!(
            "unknown policy {s:?} (expected min-abs, stream:HEX or seed:N)"
        )))
    }
}

/// On-disk form of a policy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDescriptor {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl From<&ChoicePolicy> for PolicyDescriptor {
    fn from(p: &ChoicePolicy) -> Self {
        match p {
            ChoicePolicy::MinAbs => PolicyDescriptor { name: "min-abs".into(), bits: None, seed: None },
            ChoicePolicy::Stream(b) => PolicyDescriptor {
                name: "stream".into(),
                bits: Some(b.as_hex().to_string()),
                seed: None,
            },
            ChoicePolicy::Seeded(s) => PolicyDescriptor { name: "seed".into(), bits: None, seed: Some(*s) },
        }
    }
}

impl TryFrom<&PolicyDescriptor> for ChoicePolicy {
    type Error = Error;

    fn try_from(d: &PolicyDescriptor) -> Result<Self> {
        match (d.name.as_str(), &d.bits, d.seed) {
            ("min-abs", None, None) => Ok(ChoicePolicy::MinAbs),
            ("stream", Some(bits), None) => Ok(ChoicePolicy::Stream(bits.parse()?)),
            ("seed", None, Some(seed)) => Ok(ChoicePolicy::Seeded(seed)),
            _ => Err(Error::Format(format!("malformed policy descriptor {d:?}"))),
        }
    }
}

/// Per-run chooser; owns the RNG for seeded policies.
#[derive(Clone, Debug)]
pub(crate) struct Chooser {
    policy: ChoicePolicy,
    rng: Option<ChaCha8Rng>,
}

/// What a step must search for before it can commit.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Plan {
    /// Stop after this many distinct admissible candidates.
    pub wanted: usize,
    rank: usize,
}

impl Plan {
    /// Rank actually taken once `found >= 2` candidates are known.
    pub fn rank(&self, found: usize) -> usize {
        if self.rank < found {
            self.rank
        } else {
            self.rank % found
        }
    }
}

impl Chooser {
    pub fn new(policy: ChoicePolicy) -> Self {
        let rng = match policy {
            ChoicePolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Chooser { policy, rng }
    }

    pub fn policy(&self) -> &ChoicePolicy {
        &self.policy
    }

    /// Plan for step `k` (1-based). Must be called exactly once per step.
    pub fn plan(&mut self, k: usize) -> Plan {
        match &self.policy {
            ChoicePolicy::MinAbs => Plan { wanted: 2, rank: 0 },
            ChoicePolicy::Stream(bits) => Plan { wanted: 2, rank: usize::from(bits.bit(k - 1)) },
            ChoicePolicy::Seeded(_) => {
                let rng = self.rng.as_mut().expect("seeded chooser has an rng");
                Plan { wanted: SEEDED_POOL, rank: rng.random_range(0..SEEDED_POOL) }
            }
        }
    }
}

/// Candidate values of `a` in search order: `0, 1, -1, 2, -2, ...`, up to `|a| <= window`.
pub fn candidate_order(window: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=window.max(0)).flat_map(|m| [m, -m]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["min-abs", "stream:a5", "seed:42"] {
            let p: ChoicePolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
            let d = PolicyDescriptor::from(&p);
            assert_eq!(ChoicePolicy::try_from(&d).unwrap(), p);
        }
        assert!("stream:xyz".parse::<ChoicePolicy>().is_err());
        assert!("seed:-1".parse::<ChoicePolicy>().is_err());
        assert!("greedy".parse::<ChoicePolicy>().is_err());
    }

    #[test]
    fn stream_bits_read_from_the_right() {
        let b: StreamBits = "a5".parse().unwrap();
        // 0xa5 = 1010_0101
        let bits: Vec<bool> = (0..10).map(|i| b.bit(i)).collect();
        assert_eq!(
            bits,
            vec![true, false, true, false, false, true, false, true, false, false]
        );
        assert_eq!(StreamBits::from_value(6).as_hex(), "6");
    }

    #[test]
    fn candidate_order_is_by_absolute_value() {
        let v: Vec<i64> = candidate_order(2).collect();
        assert_eq!(v, vec![0, 1, -1, 2, -2]);
        assert_eq!(candidate_order(-3).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn seeded_plans_are_reproducible() {
        let mut a = Chooser::new(ChoicePolicy::Seeded(7));
        let mut b = Chooser::new(ChoicePolicy::Seeded(7));
        for k in 1..50 {
            let (pa, pb) = (a.plan(k), b.plan(k));
            assert_eq!(pa.rank(8), pb.rank(8));
            assert!(pa.rank(3) < 3);
        }
    }
}
