//! Extended reals `[-∞, +∞]` with tagged infinities.

use std::cmp::Ordering;
use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A value in `[-∞, +∞]`.
///
/// Infinities are distinguished variants, never large floats, so membership
/// in a finiteness set never depends on a tolerance. A `Finite` payload is
/// always a finite, non-NaN `f64`.
#[derive(Clone, Copy, Debug)]
pub enum XReal {
    NegInf,
    Finite(f64),
    PosInf,
}

/// How `+∞ + (-∞)` resolves.
///
/// Admissibility of a potential pair sums `φ(x) + ψ(y)` with `MinusWins`;
/// c-transforms sum `c(x, y) - ψ(y)` with `PlusWins`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    PlusWins,
    MinusWins,
}

impl XReal {
    pub const ZERO: XReal = XReal::Finite(0.0);

    /// Maps IEEE infinities onto the tagged variants.
    ///
    /// Panics on NaN.
    pub fn from_f64(v: f64) -> Self {
        assert!(!v.is_nan(), "XReal cannot hold NaN");
        if v == f64::INFINITY {
            XReal::PosInf
        } else if v == f64::NEG_INFINITY {
            XReal::NegInf
        } else {
            XReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, XReal::Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, XReal::PosInf)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            XReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// IEEE view, `±∞` as `f64` infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            XReal::NegInf => f64::NEG_INFINITY,
            XReal::Finite(v) => v,
            XReal::PosInf => f64::INFINITY,
        }
    }

    /// Total addition; opposite infinities resolve per `convention`.
    pub fn add(self, other: XReal, convention: Convention) -> XReal {
        use XReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => XReal::from_f64(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => match convention {
                Convention::PlusWins => PosInf,
                Convention::MinusWins => NegInf,
            },
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }

    pub fn min(self, other: XReal) -> XReal {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: XReal) -> XReal {
        if other > self {
            other
        } else {
            self
        }
    }

    fn rank(self) -> u8 {
        match self {
            XReal::NegInf => 0,
            XReal::Finite(_) => 1,
            XReal::PosInf => 2,
        }
    }
}

/// Convenience wrapper for `xreal_add`-style call sites.
pub fn xreal_add(a: XReal, b: XReal, convention: Convention) -> XReal {
    a.add(b, convention)
}

impl From<f64> for XReal {
    fn from(v: f64) -> Self {
        XReal::from_f64(v)
    }
}

impl PartialEq for XReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for XReal {}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            // -0.0 == 0.0 here, unlike total_cmp
            (XReal::Finite(a), XReal::Finite(b)) => a.partial_cmp(b).expect("finite non-NaN"),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XReal::NegInf => write!(f, "-inf"),
            XReal::Finite(v) => write!(f, "{v}"),
            XReal::PosInf => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for XReal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "Infinity" | "+Infinity" => Ok(XReal::PosInf),
            "-inf" | "-Infinity" => Ok(XReal::NegInf),
            t => {
                let v: f64 = t.parse().map_err(|_| format!("not a number: {t:?}"))?;
                if v.is_nan() {
                    return Err("NaN is not an extended real".into());
                }
                Ok(XReal::from_f64(v))
            }
        }
    }
}

// Finite values serialize as JSON numbers, infinities as "inf" / "-inf".
impl Serialize for XReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            XReal::Finite(v) => serializer.serialize_f64(*v),
            XReal::PosInf => serializer.serialize_str("inf"),
            XReal::NegInf => serializer.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for XReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(XReal::from_f64(v)),
            Repr::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

impl std::ops::Neg for XReal {
    type Output = XReal;

    fn neg(self) -> XReal {
        match self {
            XReal::NegInf => XReal::PosInf,
            XReal::Finite(v) => XReal::Finite(-v),
            XReal::PosInf => XReal::NegInf,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn opposite_infinities_follow_convention() {
        assert_eq!(XReal::PosInf.add(XReal::NegInf, Convention::MinusWins), XReal::NegInf);
        assert_eq!(XReal::PosInf.add(XReal::NegInf, Convention::PlusWins), XReal::PosInf);
        assert_eq!(XReal::NegInf.add(XReal::PosInf, Convention::PlusWins), XReal::PosInf);
    }

    #[test]
    fn finite_sum() {
        for conv in [Convention::PlusWins, Convention::MinusWins] {
            assert_eq!(XReal::Finite(2.0).add(XReal::Finite(3.0), conv), XReal::Finite(5.0));
        }
    }

    #[test]
    fn ordering_extremes() {
        let mut v = vec![XReal::PosInf, XReal::Finite(1e308), XReal::NegInf, XReal::Finite(-1e308)];
        v.sort();
        assert_eq!(v, vec![XReal::NegInf, XReal::Finite(-1e308), XReal::Finite(1e308), XReal::PosInf]);
        assert_eq!(XReal::Finite(f64::MAX).cmp(&XReal::PosInf), Ordering::Less);
    }

    #[test]
    fn json_round_trip() {
        let v = vec![XReal::PosInf, XReal::Finite(-1.5), XReal::NegInf];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["inf",-1.5,"-inf"]"#);
        let back: Vec<XReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    fn xreal_with_small_ints() -> impl Strategy<Value = XReal> {
        (-1000i32..1000).prop_map(|k| XReal::Finite(f64::from(k) * 0.25))
    }

    proptest! {
        // dyadic values keep float addition exact, so associativity is exact
        #[test]
        fn add_associative_with_one_infinity(
            a in xreal_with_small_ints(),
            b in xreal_with_small_ints(),
            c in xreal_with_small_ints(),
            which in 0usize..4,
            inf_sign in any::<bool>(),
            plus in any::<bool>(),
        ) {
            let conv = if plus { Convention::PlusWins } else { Convention::MinusWins };
            let inf = if inf_sign { XReal::PosInf } else { XReal::NegInf };
            let mut t = [a, b, c];
            if which < 3 {
                t[which] = inf;
            }
            let left = t[0].add(t[1], conv).add(t[2], conv);
            let right = t[0].add(t[1].add(t[2], conv), conv);
            prop_assert_eq!(left, right);
        }
    }
}
