use std::fmt;
use std::str::FromStr;

use crate::corpus::PropertyKind;
use crate::error::{Error, Result};

/// Non-empty subset of {W, L, M}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PropertySet {
    bits: u8,
}

impl PropertySet {
    pub const W: PropertySet = PropertySet { bits: 0b001 };
    pub const L: PropertySet = PropertySet { bits: 0b010 };
    pub const M: PropertySet = PropertySet { bits: 0b100 };
    pub const ALL: PropertySet = PropertySet { bits: 0b111 };

    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits == 0 || bits > 0b111 {
            return Err(Error::Config(format!("invalid property bits {bits:#b}")));
        }
        Ok(PropertySet { bits })
    }

    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn contains(self, kind: PropertyKind) -> bool {
        self.bits & Self::bit(kind) != 0
    }

    pub fn union(self, other: PropertySet) -> PropertySet {
        PropertySet {
            bits: self.bits | other.bits,
        }
    }

    /// Contained kinds in W, L, M order.
    pub fn kinds(self) -> impl Iterator<Item = PropertyKind> {
        [PropertyKind::Surface, PropertyKind::Lemma, PropertyKind::Tag]
            .into_iter()
            .filter(move |&k| self.contains(k))
    }

    fn bit(kind: PropertyKind) -> u8 {
        match kind {
            PropertyKind::Surface => 0b001,
            PropertyKind::Lemma => 0b010,
            PropertyKind::Tag => 0b100,
        }
    }
}

impl fmt::Display for PropertySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for kind in self.kinds() {
            f.write_str(match kind {
                PropertyKind::Surface => "W",
                PropertyKind::Lemma => "L",
                PropertyKind::Tag => "M",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PropertySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u8;
        for c in s.chars() {
            let bit = match c {
                'W' => 0b001,
                'L' => 0b010,
                'M' => 0b100,
                _ => return Err(invalid_props(s)),
            };
            if bits & bit != 0 {
                return Err(invalid_props(s));
            }
            bits |= bit;
        }
        PropertySet::from_bits(bits).map_err(|_| invalid_props(s))
    }
}

fn invalid_props(s: &str) -> Error {
    Error::Config(format!(
        "invalid property set {s:?}; expected one of {}",
        PropertyConfig::VALID.join(", ")
    ))
}

pub const DEFAULT_MINN: usize = 3;
pub const DEFAULT_MAXN: usize = 6;
pub const DEFAULT_BUCKETS: usize = 2_000_000;

/// What a focus-word vector is composed of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyConfig {
    Properties(PropertySet),
    NGrams { minn: usize, maxn: usize, buckets: usize },
}

impl PropertyConfig {
    pub const VALID: [&'static str; 8] = ["W", "L", "M", "WL", "WM", "LM", "WLM", "ngrams"];

    pub fn ngrams(minn: usize, maxn: usize, buckets: usize) -> Result<Self> {
        let config = PropertyConfig::NGrams { minn, maxn, buckets };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PropertyConfig::Properties(_) => Ok(()),
            PropertyConfig::NGrams { minn, maxn, buckets } => {
                if minn == 0 || minn > maxn {
                    Err(Error::Config(format!("invalid n-gram range {minn}..={maxn}")))
                } else if buckets == 0 {
                    Err(Error::Config("buckets must be at least 1".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for PropertyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyConfig::Properties(set) => write!(f, "{set}"),
            PropertyConfig::NGrams { .. } => f.write_str("ngrams"),
        }
    }
}

impl FromStr for PropertyConfig {
    type Err = Error;

    /// Parses `W`, `L`, `WM`, ... (letters in any order) or `ngrams` (with
    /// default n-gram settings).
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("ngrams") {
            Ok(PropertyConfig::NGrams {
                minn: DEFAULT_MINN,
                maxn: DEFAULT_MAXN,
                buckets: DEFAULT_BUCKETS,
            })
        } else {
            s.parse().map(PropertyConfig::Properties)
        }
    }
}

/// How property vectors are combined into a word vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Composition {
    #[default]
    Sum,
    Mean,
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Composition::Sum),
            "mean" => Ok(Composition::Mean),
            _ => Err(Error::Config(format!("composition must be sum or mean, got {s:?}"))),
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Composition::Sum => "sum",
            Composition::Mean => "mean",
        })
    }
}
