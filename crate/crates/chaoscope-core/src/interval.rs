//! Integer index intervals with open ends.
//!
//! Weight zones and direct-sum blocks are intervals of the global index
//! line; ends may be infinite. JSON form: `{"from": int|"-inf", "to": int|"+inf"}`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Lower end of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lo {
    NegInf,
    At(i64),
}

/// Upper end of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Hi {
    At(i64),
    PosInf,
}

/// A nonempty interval of integers, possibly unbounded on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: Lo,
    pub hi: Hi,
}

impl Interval {
    pub fn new(lo: Lo, hi: Hi) -> Result<Self> {
        if let (Lo::At(a), Hi::At(b)) = (lo, hi) {
            if a > b {
                return Err(Error::invalid(format!("empty interval [{a}, {b}]")));
            }
        }
        Ok(Interval { lo, hi })
    }

    pub fn finite(a: i64, b: i64) -> Result<Self> {
        Self::new(Lo::At(a), Hi::At(b))
    }

    pub fn from_to_inf(a: i64) -> Self {
        Interval { lo: Lo::At(a), hi: Hi::PosInf }
    }

    pub fn neg_inf_to(b: i64) -> Self {
        Interval { lo: Lo::NegInf, hi: Hi::At(b) }
    }

    pub fn all() -> Self {
        Interval { lo: Lo::NegInf, hi: Hi::PosInf }
    }

    pub fn nat() -> Self {
        Self::from_to_inf(0)
    }

    pub fn contains(&self, i: i64) -> bool {
        let lo_ok = match self.lo {
            Lo::NegInf => true,
            Lo::At(a) => i >= a,
        };
        let hi_ok = match self.hi {
            Hi::PosInf => true,
            Hi::At(b) => i <= b,
        };
        lo_ok && hi_ok
    }

    pub fn is_bounded(&self) -> bool {
        matches!((self.lo, self.hi), (Lo::At(_), Hi::At(_)))
    }

    /// Element count, `None` when infinite.
    pub fn len(&self) -> Option<u64> {
        match (self.lo, self.hi) {
            (Lo::At(a), Hi::At(b)) => Some((b - a) as u64 + 1),
            _ => None,
        }
    }

    /// Translate both ends by `d`.
    pub fn translate(&self, d: i64) -> Self {
        Interval {
            lo: match self.lo {
                Lo::NegInf => Lo::NegInf,
                Lo::At(a) => Lo::At(a + d),
            },
            hi: match self.hi {
                Hi::PosInf => Hi::PosInf,
                Hi::At(b) => Hi::At(b + d),
            },
        }
    }

    /// Intersect with another interval; `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = match (self.lo, other.lo) {
            (Lo::NegInf, x) | (x, Lo::NegInf) => x,
            (Lo::At(a), Lo::At(b)) => Lo::At(a.max(b)),
        };
        let hi = match (self.hi, other.hi) {
            (Hi::PosInf, x) | (x, Hi::PosInf) => x,
            (Hi::At(a), Hi::At(b)) => Hi::At(a.min(b)),
        };
        if let (Lo::At(a), Hi::At(b)) = (lo, hi) {
            if a > b {
                return None;
            }
        }
        Some(Interval { lo, hi })
    }

    /// Verify that `parts` are pairwise disjoint, gap-free and cover `self`.
    pub fn covered_by(&self, parts: &[Interval]) -> Result<()> {
        if parts.is_empty() {
            return Err(Error::invalid("no intervals given"));
        }
        let mut sorted: Vec<Interval> = parts.to_vec();
        sorted.sort_by_key(|iv| iv.lo);
        if sorted[0].lo != self.lo {
            return Err(Error::invalid(format!(
                "intervals start at {:?}, expected {:?}",
                sorted[0].lo, self.lo
            )));
        }
        for w in sorted.windows(2) {
            match (w[0].hi, w[1].lo) {
                (Hi::At(b), Lo::At(a)) if a == b + 1 => {}
                (Hi::At(b), Lo::At(a)) if a <= b => {
                    return Err(Error::invalid(format!("intervals overlap at {a}")));
                }
                (Hi::At(b), Lo::At(a)) => {
                    return Err(Error::invalid(format!("gap between {b} and {a}")));
                }
                (Hi::PosInf, _) => {
                    return Err(Error::invalid("interval after an unbounded one"));
                }
                (_, Lo::NegInf) => {
                    return Err(Error::invalid("two intervals unbounded below"));
                }
            }
        }
        if sorted.last().unwrap().hi != self.hi {
            return Err(Error::invalid(format!(
                "intervals end at {:?}, expected {:?}",
                sorted.last().unwrap().hi, self.hi
            )));
        }
        Ok(())
    }

    /// Iterate the part of the interval that falls inside `[lo, hi]`.
    pub fn iter_clamped(&self, lo: i64, hi: i64) -> impl Iterator<Item = i64> {
        let a = match self.lo {
            Lo::NegInf => lo,
            Lo::At(x) => x.max(lo),
        };
        let b = match self.hi {
            Hi::PosInf => hi,
            Hi::At(x) => x.min(hi),
        };
        a..=b
    }
}

// JSON: {"from": int|"-inf", "to": int|"+inf"}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum EndRepr {
    Int(i64),
    Tag(String),
}

impl Interval {
    pub(crate) fn to_end_reprs(self) -> (EndRepr, EndRepr) {
        let from = match self.lo {
            Lo::NegInf => EndRepr::Tag("-inf".into()),
            Lo::At(a) => EndRepr::Int(a),
        };
        let to = match self.hi {
            Hi::PosInf => EndRepr::Tag("+inf".into()),
            Hi::At(b) => EndRepr::Int(b),
        };
        (from, to)
    }

    pub(crate) fn from_end_reprs(from: EndRepr, to: EndRepr) -> Result<Self> {
        let lo = match from {
            EndRepr::Int(a) => Lo::At(a),
            EndRepr::Tag(t) if t == "-inf" => Lo::NegInf,
            EndRepr::Tag(t) => return Err(Error::invalid(format!("bad lower end {t:?}"))),
        };
        let hi = match to {
            EndRepr::Int(b) => Hi::At(b),
            EndRepr::Tag(t) if t == "+inf" => Hi::PosInf,
            EndRepr::Tag(t) => return Err(Error::invalid(format!("bad upper end {t:?}"))),
        };
        Interval::new(lo, hi)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalRepr {
    from: EndRepr,
    to: EndRepr,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (from, to) = self.to_end_reprs();
        IntervalRepr { from, to }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = IntervalRepr::deserialize(d)?;
        Interval::from_end_reprs(repr.from, repr.to).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_detects_gap_and_overlap() {
        let all = Interval::all();
        let ok = [Interval::neg_inf_to(-1), Interval::from_to_inf(0)];
        assert!(all.covered_by(&ok).is_ok());

        let gap = [Interval::neg_inf_to(-2), Interval::from_to_inf(0)];
        assert!(all.covered_by(&gap).is_err());

        let overlap = [Interval::neg_inf_to(0), Interval::from_to_inf(0)];
        assert!(all.covered_by(&overlap).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let iv = Interval::neg_inf_to(-2);
        let s = serde_json::to_string(&iv).unwrap();
        assert_eq!(s, r#"{"from":"-inf","to":-2}"#);
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, iv);
    }

    #[test]
    fn empty_rejected() {
        assert!(Interval::finite(3, 2).is_err());
    }
}
