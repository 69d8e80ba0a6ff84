//! Prescribed target functions `f: Z -> N0 ∪ {∞}` with a finite zero set.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sumset::IntegerSet;

/// A value of the target function: a nonnegative integer or infinity.
///
/// `Infinite` compares greater than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    pub fn is_zero(self) -> bool {
        self == Multiplicity::Finite(0)
    }

    /// `count < self`.
    pub fn exceeds(self, count: u64) -> bool {
        match self {
            Multiplicity::Finite(v) => count < v,
            Multiplicity::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Multiplicity::Finite(v) => Some(v),
            Multiplicity::Infinite => None,
        }
    }
}

impl From<u64> for Multiplicity {
    fn from(v: u64) -> Self {
        Multiplicity::Finite(v)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(v) => write!(f, "{v}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(v) => s.serialize_u64(*v),
            Multiplicity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct MultiplicityVisitor;

        impl Visitor<'_> for MultiplicityVisitor {
            type Value = Multiplicity;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Multiplicity, E> {
                Ok(Multiplicity::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Multiplicity, E> {
                u64::try_from(v)
                    .map(Multiplicity::Finite)
                    .map_err(|_| E::custom(format!("negative value {v}")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Multiplicity, E> {
                if v == "inf" {
                    Ok(Multiplicity::Infinite)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        d.deserialize_any(MultiplicityVisitor)
    }
}

/// `f` given as a constant default plus finitely many overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetFunction {
    default: Multiplicity,
    overrides: BTreeMap<i64, Multiplicity>,
    zero_set: IntegerSet,
}

impl TargetFunction {
    /// Validates the description. A zero default would make `f⁻¹(0)` infinite.
    pub fn new(default: Multiplicity, overrides: BTreeMap<i64, Multiplicity>) -> Result<Self> {
        if default.is_zero() {
            return Err(Error::InvalidTarget(
                "default value 0 gives an infinite zero set".into(),
            ));
        }
        let zero_set = overrides
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(&n, _)| n)
            .collect();
        Ok(TargetFunction { default, overrides, zero_set })
    }

    /// `f ≡ value`.
    pub fn constant(value: Multiplicity) -> Result<Self> {
        TargetFunction::new(value, BTreeMap::new())
    }

    pub fn evaluate(&self, n: i64) -> Multiplicity {
        self.overrides.get(&n).copied().unwrap_or(self.default)
    }

    pub fn default_value(&self) -> Multiplicity {
        self.default
    }

    pub fn overrides(&self) -> &BTreeMap<i64, Multiplicity> {
        &self.overrides
    }

    pub fn zero_set(&self) -> &IntegerSet {
        &self.zero_set
    }

    /// `Δ = |f⁻¹(0)|`.
    pub fn delta(&self) -> usize {
        self.zero_set.len()
    }

    /// `c = 8 + [(Δ+1)/2]`.
    pub fn window_constant(&self) -> i64 {
        8 + (self.delta() as i64 + 1) / 2
    }

    /// `Σ f(n)` when finite. A valid target always has a nonzero default,
    /// so this is `None` for every validated function.
    pub fn total_mass(&self) -> Option<u64> {
        if !self.default.is_zero() {
            return None;
        }
        self.overrides.values().try_fold(0u64, |acc, v| Some(acc + v.finite()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Multiplicity::{Finite, Infinite};

    fn target(default: Multiplicity, ov: &[(i64, Multiplicity)]) -> Result<TargetFunction> {
        TargetFunction::new(default, ov.iter().copied().collect())
    }

    #[test]
    fn validate_examples() {
        let f = target(Finite(1), &[]).unwrap();
        assert_eq!((f.delta(), f.window_constant()), (0, 8));
        let f = target(Finite(1), &[(0, Finite(0))]).unwrap();
        assert_eq!((f.delta(), f.window_constant()), (1, 9));
        assert!(matches!(target(Finite(0), &[]), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn evaluate_examples() {
        let f = target(Finite(1), &[(0, Finite(0))]).unwrap();
        assert_eq!(f.evaluate(0), Finite(0));
        assert_eq!(f.evaluate(7), Finite(1));
        let g = target(Infinite, &[(2, Finite(3))]).unwrap();
        assert_eq!(g.evaluate(5), Infinite);
        assert_eq!(g.evaluate(2), Finite(3));
    }

    #[test]
    fn zero_set_examples() {
        let f = target(Finite(1), &[(-1, Finite(0)), (4, Finite(0)), (9, Finite(2))]).unwrap();
        assert_eq!(f.zero_set().as_slice(), &[-1, 4]);
        assert_eq!(f.delta(), 2);
        let f = target(Finite(1), &[]).unwrap();
        assert!(f.zero_set().is_empty());
    }

    #[test]
    fn infinity_is_above_everything() {
        assert!(Finite(u64::MAX) < Infinite);
        assert!(Infinite.exceeds(u64::MAX));
        assert!(!Finite(2).exceeds(2));
        assert!(Finite(2).exceeds(1));
    }

    #[test]
    fn multiplicity_serde() {
        assert_eq!(serde_json::to_string(&Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Multiplicity>("3").unwrap(), Finite(3));
        assert_eq!(serde_json::from_str::<Multiplicity>("\"inf\"").unwrap(), Infinite);
        let err = serde_json::from_str::<Multiplicity>("-2").unwrap_err();
        assert!(err.to_string().contains("negative"));
        assert!(serde_json::from_str::<Multiplicity>("\"many\"").is_err());
    }

    #[test]
    fn valid_targets_have_infinite_mass() {
        assert_eq!(target(Finite(1), &[(0, Finite(0))]).unwrap().total_mass(), None);
    }
}
