use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A real number or one of the two infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

pub use ExtendedReal::{MinusInfinity, PlusInfinity};

impl ExtendedReal {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            PlusInfinity
        } else if v == f64::NEG_INFINITY {
            MinusInfinity
        } else {
            ExtendedReal::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            PlusInfinity => f64::INFINITY,
            MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn neg(self) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(-v),
            PlusInfinity => MinusInfinity,
            MinusInfinity => PlusInfinity,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        Self::from_f64(v)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            PlusInfinity => f.write_str("inf"),
            MinusInfinity => f.write_str("-inf"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" | "∞" => Ok(PlusInfinity),
            "-inf" | "-infinity" | "-∞" => Ok(MinusInfinity),
            other => other
                .parse::<f64>()
                .map(ExtendedReal::from_f64)
                .map_err(|_| Error::Parse(format!("not a real or infinity: `{s}`"))),
        }
    }
}

// Infinities are written as the strings "inf" / "-inf" so the JSON stays valid.
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => serializer.serialize_f64(*v),
            PlusInfinity => serializer.serialize_str("inf"),
            MinusInfinity => serializer.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(ExtendedReal::from_f64(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_with_infinities() {
        let a = ExtendedReal::Finite(3.0);
        assert!(MinusInfinity < a);
        assert!(a < PlusInfinity);
        assert!(MinusInfinity < PlusInfinity);
        assert_eq!(PlusInfinity, PlusInfinity);
    }

    #[test]
    fn parse_and_serialize() {
        assert_eq!("inf".parse::<ExtendedReal>().unwrap(), PlusInfinity);
        assert_eq!("-inf".parse::<ExtendedReal>().unwrap(), MinusInfinity);
        assert_eq!("2.5".parse::<ExtendedReal>().unwrap(), ExtendedReal::Finite(2.5));
        let s = serde_json::to_string(&vec![PlusInfinity, ExtendedReal::Finite(1.0)]).unwrap();
        assert_eq!(s, r#"["inf",1.0]"#);
        let back: Vec<ExtendedReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![PlusInfinity, ExtendedReal::Finite(1.0)]);
    }
}
