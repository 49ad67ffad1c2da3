//! Weight rules for shifts and entry rules for diagonals.
//!
//! A weight rule assigns a nonnegative real weight to every index of its
//! domain through an ordered list of interval zones. Zone formulas are either
//! constants or rational functions of the index with a declared limit; the
//! declared limits at the infinite ends are what make spectra exactly
//! computable for this class. Zero weights may enter only through the finite
//! exception map — they are resolved later by block splitting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{EndRepr, Hi, Interval, Lo};
use crate::numeric::{is_finite_c, C64};

/// How far a validated rational formula may drift from its declared limit
/// at `|i| = LIMIT_CHECK_INDEX`.
const LIMIT_CHECK_TOL: f64 = 0.01;
const LIMIT_CHECK_INDEX: i64 = 1_000_000;

/// Real polynomial in the index, low-degree, coefficients low-to-high.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Coefficients of `p(x + d)`.
    pub fn compose_shift(&self, d: f64) -> Poly {
        self.compose_affine(1.0, d)
    }

    /// Coefficients of `p(s·x + d)` for `s = ±1`.
    pub fn compose_affine(&self, s: f64, d: f64) -> Poly {
        let n = self.0.len();
        let mut out = vec![0.0; n];
        for (k, &a) in self.0.iter().enumerate() {
            // a * (s x + d)^k = a * Σ_j C(k,j) (s x)^j d^(k-j)
            let mut binom = 1.0f64; // C(k, k)
            let mut dpow = 1.0f64;
            let mut spow_rev = vec![0.0; k + 1];
            let mut sp = 1.0;
            for j in 0..=k {
                spow_rev[j] = sp;
                sp *= s;
            }
            for j in (0..=k).rev() {
                out[j] += a * binom * dpow * spow_rev[j];
                if j > 0 {
                    binom = binom * j as f64 / (k - j + 1) as f64;
                    dpow *= d;
                }
            }
        }
        Poly(out)
    }
}

/// A zone formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Formula {
    /// Constant weight.
    Const(f64),
    /// `num(i) / den(i)` with a declared limit at the zone's infinite end.
    Rational { num: Poly, den: Poly, limit: f64 },
}

impl Formula {
    pub fn eval(&self, i: i64) -> f64 {
        match self {
            Formula::Const(w) => *w,
            Formula::Rational { num, den, .. } => num.eval(i as f64) / den.eval(i as f64),
        }
    }

    /// Substitute `i -> i - d`, so the translated formula at `j` equals the
    /// original at `j - d`.
    fn translate(&self, d: i64) -> Formula {
        match self {
            Formula::Const(w) => Formula::Const(*w),
            Formula::Rational { num, den, limit } => Formula::Rational {
                num: num.compose_shift(-(d as f64)),
                den: den.compose_shift(-(d as f64)),
                limit: *limit,
            },
        }
    }

    /// Substitute `i -> b - i`, so the reflected formula at `j` equals the
    /// original at `b - j`.
    fn reflect(&self, b: i64) -> Formula {
        match self {
            Formula::Const(w) => Formula::Const(*w),
            Formula::Rational { num, den, limit } => Formula::Rational {
                num: num.compose_affine(-1.0, b as f64),
                den: den.compose_affine(-1.0, b as f64),
                limit: *limit,
            },
        }
    }
}

/// One zone of a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    pub interval: Interval,
    pub formula: Formula,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZoneRepr {
    from: EndRepr,
    to: EndRepr,
    formula: Formula,
}

impl Serialize for Zone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (from, to) = self.interval.to_end_reprs();
        ZoneRepr { from, to, formula: self.formula.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Zone {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = ZoneRepr::deserialize(d)?;
        let interval = Interval::from_end_reprs(repr.from, repr.to).map_err(D::Error::custom)?;
        Ok(Zone { interval, formula: repr.formula })
    }
}

/// A full weight rule over a domain interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRule {
    pub zones: Vec<Zone>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exceptions: BTreeMap<i64, f64>,
}

impl WeightRule {
    pub fn constant(w: f64) -> WeightRule {
        Self::constant_on(w, Interval::all())
    }

    /// A single constant zone covering `domain`.
    pub fn constant_on(w: f64, domain: Interval) -> WeightRule {
        WeightRule {
            zones: vec![Zone { interval: domain, formula: Formula::Const(w) }],
            exceptions: BTreeMap::new(),
        }
    }

    /// The weight at index `i`; exceptions take precedence over zones.
    pub fn weight(&self, i: i64) -> f64 {
        if let Some(&w) = self.exceptions.get(&i) {
            return w;
        }
        for z in &self.zones {
            if z.interval.contains(i) {
                return z.formula.eval(i);
            }
        }
        // Unreachable after validation: zones cover the domain.
        0.0
    }

    /// Declared limits `(at -inf, at +inf)`; a side is `None` when the
    /// domain does not extend there.
    pub fn declared_limits(&self) -> (Option<f64>, Option<f64>) {
        let mut lo = None;
        let mut hi = None;
        for z in &self.zones {
            let lim = match &z.formula {
                Formula::Const(w) => *w,
                Formula::Rational { limit, .. } => *limit,
            };
            if z.interval.lo == Lo::NegInf {
                lo = Some(lim);
            }
            if z.interval.hi == Hi::PosInf {
                hi = Some(lim);
            }
        }
        (lo, hi)
    }

    /// Sorted zero-weight indices (exceptions with value exactly 0).
    pub fn zero_indices(&self) -> Vec<i64> {
        self.exceptions
            .iter()
            .filter(|(_, &w)| w == 0.0)
            .map(|(&i, _)| i)
            .collect()
    }

    /// An upper bound for the weights: declared limits plus the validated
    /// tail-deviation budget, a scan of the near indices, and exceptions.
    pub fn sup_bound(&self, domain: &Interval) -> f64 {
        let mut bound: f64 = 0.0;
        for z in &self.zones {
            match &z.formula {
                Formula::Const(w) => bound = bound.max(*w),
                Formula::Rational { limit, .. } => {
                    bound = bound.max(limit.abs() + LIMIT_CHECK_TOL);
                    if let Some(iv) = z.interval.intersect(domain) {
                        for i in iv.iter_clamped(-2000, 2000) {
                            bound = bound.max(z.formula.eval(i));
                        }
                    }
                }
            }
        }
        for &w in self.exceptions.values() {
            bound = bound.max(w);
        }
        bound
    }

    /// Validate against the domain of the operator that owns the rule.
    pub fn validate(&self, domain: &Interval) -> Result<()> {
        if self.zones.is_empty() {
            return Err(Error::invalid("weight rule has no zones"));
        }
        let ivs: Vec<Interval> = self.zones.iter().map(|z| z.interval).collect();
        domain.covered_by(&ivs)?;
        for z in &self.zones {
            self.validate_zone(z)?;
        }
        for (&i, &w) in &self.exceptions {
            if !domain.contains(i) {
                return Err(Error::invalid(format!("exception index {i} outside domain")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!("exception weight at {i} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    fn validate_zone(&self, z: &Zone) -> Result<()> {
        match &z.formula {
            Formula::Const(w) => {
                if !w.is_finite() || *w < 0.0 {
                    return Err(Error::invalid("constant weight must be finite and >= 0"));
                }
                if *w == 0.0 {
                    return Err(Error::invalid(
                        "zero weights are only allowed as exceptions, not zone constants",
                    ));
                }
                Ok(())
            }
            Formula::Rational { num, den, limit } => {
                if num.0.is_empty() || den.0.is_empty() {
                    return Err(Error::invalid("rational formula needs coefficients"));
                }
                if num.degree() > 3 || den.degree() > 3 {
                    return Err(Error::invalid("rational formula degree capped at 3"));
                }
                if !limit.is_finite() || *limit <= 0.0 {
                    return Err(Error::invalid("declared limit must be finite and > 0"));
                }
                // Sample the zone: near indices plus geometric far points.
                let mut samples: Vec<i64> = z.interval.iter_clamped(-1000, 1000).collect();
                for p in [1_000i64, 10_000, 100_000, LIMIT_CHECK_INDEX] {
                    for s in [p, -p] {
                        if z.interval.contains(s) {
                            samples.push(s);
                        }
                    }
                }
                if let Lo::At(a) = z.interval.lo {
                    samples.push(a);
                }
                if let Hi::At(b) = z.interval.hi {
                    samples.push(b);
                }
                for &i in &samples {
                    let d = den.eval(i as f64);
                    if d == 0.0 {
                        return Err(Error::invalid(format!("denominator vanishes at {i}")));
                    }
                    let v = num.eval(i as f64) / d;
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::invalid(format!("weight formula negative or non-finite at {i}")));
                    }
                }
                // Guard against wrongly declared limits.
                if z.interval.hi == Hi::PosInf {
                    let v = z.formula.eval(LIMIT_CHECK_INDEX);
                    if (v - limit).abs() >= LIMIT_CHECK_TOL {
                        return Err(Error::invalid(format!(
                            "formula value {v} at {LIMIT_CHECK_INDEX} disagrees with declared limit {limit}"
                        )));
                    }
                }
                if z.interval.lo == Lo::NegInf {
                    let v = z.formula.eval(-LIMIT_CHECK_INDEX);
                    if (v - limit).abs() >= LIMIT_CHECK_TOL {
                        return Err(Error::invalid(format!(
                            "formula value {v} at -{LIMIT_CHECK_INDEX} disagrees with declared limit {limit}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Re-align the rule so the new rule at `j` equals the old at `j - d`,
    /// then clip to `domain` (extending the outermost zones to its ends).
    pub fn translate_into(&self, d: i64, domain: &Interval) -> WeightRule {
        let mut zones: Vec<Zone> = self
            .zones
            .iter()
            .filter_map(|z| {
                let moved = z.interval.translate(d);
                moved.intersect(domain).map(|interval| Zone {
                    interval,
                    formula: z.formula.translate(d),
                })
            })
            .collect();
        zones.sort_by_key(|z| z.interval.lo);
        if let Some(first) = zones.first_mut() {
            if domain.lo < first.interval.lo {
                first.interval.lo = domain.lo;
            }
        }
        if let Some(last) = zones.last_mut() {
            if last.interval.hi < domain.hi {
                last.interval.hi = domain.hi;
            }
        }
        let exceptions = self
            .exceptions
            .iter()
            .map(|(&i, &w)| (i + d, w))
            .filter(|(i, _)| domain.contains(*i))
            .collect();
        WeightRule { zones, exceptions }
    }

    /// Re-align so the new rule at `j` equals the old at `b - j`, then clip
    /// to `domain`. Used when a ℕ-domain rule is embedded descending onto
    /// a left-infinite range.
    pub fn reflect_about(&self, b: i64, domain: &Interval) -> WeightRule {
        let mut zones: Vec<Zone> = self
            .zones
            .iter()
            .filter_map(|z| {
                let flipped = Interval {
                    lo: match z.interval.hi {
                        Hi::PosInf => Lo::NegInf,
                        Hi::At(x) => Lo::At(b - x),
                    },
                    hi: match z.interval.lo {
                        Lo::NegInf => Hi::PosInf,
                        Lo::At(x) => Hi::At(b - x),
                    },
                };
                flipped.intersect(domain).map(|interval| Zone {
                    interval,
                    formula: z.formula.reflect(b),
                })
            })
            .collect();
        zones.sort_by_key(|z| z.interval.lo);
        if let Some(first) = zones.first_mut() {
            if domain.lo < first.interval.lo {
                first.interval.lo = domain.lo;
            }
        }
        if let Some(last) = zones.last_mut() {
            if last.interval.hi < domain.hi {
                last.interval.hi = domain.hi;
            }
        }
        let exceptions = self
            .exceptions
            .iter()
            .map(|(&i, &w)| (b - i, w))
            .filter(|(i, _)| domain.contains(*i))
            .collect();
        WeightRule { zones, exceptions }
    }
}

/// Diagonal entry rule: piecewise-constant complex entries over ℕ with a
/// finite exception map. The single unbounded zone's value is the rule's
/// limit point; finite zones and exceptions contribute isolated eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalRule {
    pub zones: Vec<(Interval, C64)>,
    pub exceptions: BTreeMap<i64, C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagZoneRepr {
    from: EndRepr,
    to: EndRepr,
    #[serde(with = "crate::numeric::complex_pair")]
    value: C64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagonalRepr {
    zones: Vec<DiagZoneRepr>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    exceptions: BTreeMap<i64, (f64, f64)>,
}

impl Serialize for DiagonalRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let zones = self
            .zones
            .iter()
            .map(|(iv, v)| {
                let (from, to) = iv.to_end_reprs();
                DiagZoneRepr { from, to, value: *v }
            })
            .collect();
        let exceptions = self.exceptions.iter().map(|(&i, z)| (i, (z.re, z.im))).collect();
        DiagonalRepr { zones, exceptions }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiagonalRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = DiagonalRepr::deserialize(d)?;
        let mut zones = Vec::new();
        for z in repr.zones {
            let iv = Interval::from_end_reprs(z.from, z.to).map_err(D::Error::custom)?;
            zones.push((iv, z.value));
        }
        let exceptions = repr
            .exceptions
            .into_iter()
            .map(|(i, (re, im))| (i, C64::new(re, im)))
            .collect();
        Ok(DiagonalRule { zones, exceptions })
    }
}

impl DiagonalRule {
    pub fn constant(v: C64) -> DiagonalRule {
        DiagonalRule {
            zones: vec![(Interval::nat(), v)],
            exceptions: BTreeMap::new(),
        }
    }

    pub fn entry(&self, i: i64) -> C64 {
        if let Some(&v) = self.exceptions.get(&i) {
            return v;
        }
        for (iv, v) in &self.zones {
            if iv.contains(i) {
                return *v;
            }
        }
        C64::new(0.0, 0.0)
    }

    /// The value attained on the unbounded zone (the accumulation point).
    pub fn limit_value(&self) -> C64 {
        for (iv, v) in &self.zones {
            if iv.hi == Hi::PosInf {
                return *v;
            }
        }
        C64::new(0.0, 0.0)
    }

    /// Values attained only finitely often, with exact multiplicities,
    /// excluding the limit value.
    pub fn isolated_values(&self) -> Vec<(C64, u64)> {
        let limit = self.limit_value();
        let mut acc: Vec<(C64, u64)> = Vec::new();
        let mut bump = |v: C64, k: u64| {
            if v == limit || k == 0 {
                return;
            }
            if let Some(slot) = acc.iter_mut().find(|(w, _)| *w == v) {
                slot.1 += k;
            } else {
                acc.push((v, k));
            }
        };
        for (iv, v) in &self.zones {
            if let Some(len) = iv.len() {
                let excs = self.exceptions.keys().filter(|&&i| iv.contains(i)).count() as u64;
                bump(*v, len - excs);
            } else {
                // Exceptions punch holes in the infinite zone; the zone value
                // keeps infinite multiplicity regardless.
            }
        }
        for (_, &v) in &self.exceptions {
            bump(v, 1);
        }
        acc.sort_by(|a, b| {
            a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im))
        });
        acc
    }

    pub fn sup_bound(&self) -> f64 {
        let zones = self.zones.iter().map(|(_, v)| v.norm());
        let excs = self.exceptions.values().map(|v| v.norm());
        zones.chain(excs).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.zones.is_empty() {
            return Err(Error::invalid("diagonal rule has no zones"));
        }
        let ivs: Vec<Interval> = self.zones.iter().map(|(iv, _)| *iv).collect();
        Interval::nat().covered_by(&ivs)?;
        for (_, v) in &self.zones {
            if !is_finite_c(*v) {
                return Err(Error::invalid("diagonal value must be finite"));
            }
        }
        for (&i, v) in &self.exceptions {
            if i < 0 {
                return Err(Error::invalid(format!("diagonal exception index {i} negative")));
            }
            if !is_finite_c(*v) {
                return Err(Error::invalid("diagonal exception must be finite"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c64;

    fn half_then_two() -> WeightRule {
        // w = 1/2 for i <= -2, w = 2 for i > -2
        WeightRule {
            zones: vec![
                Zone { interval: Interval::neg_inf_to(-2), formula: Formula::Const(0.5) },
                Zone { interval: Interval::from_to_inf(-1), formula: Formula::Const(2.0) },
            ],
            exceptions: BTreeMap::new(),
        }
    }

    #[test]
    fn lookup_and_limits() {
        let w = half_then_two();
        assert!(w.validate(&Interval::all()).is_ok());
        assert_eq!(w.weight(-2), 0.5);
        assert_eq!(w.weight(-1), 2.0);
        assert_eq!(w.declared_limits(), (Some(0.5), Some(2.0)));
    }

    #[test]
    fn rational_limit_validation() {
        // |i|/(|i|+1) for i <= -1, written as -i / (1 - i).
        let zone = Zone {
            interval: Interval::neg_inf_to(-1),
            formula: Formula::Rational {
                num: Poly(vec![0.0, -1.0]),
                den: Poly(vec![1.0, -1.0]),
                limit: 1.0,
            },
        };
        let rule = WeightRule {
            zones: vec![
                zone.clone(),
                Zone { interval: Interval::from_to_inf(0), formula: Formula::Const(2.0) },
            ],
            exceptions: BTreeMap::new(),
        };
        assert!(rule.validate(&Interval::all()).is_ok());
        assert_eq!(rule.weight(-1), 0.5);
        assert_eq!(rule.weight(-3), 0.75);

        // Wrong declared limit must be rejected.
        let mut bad = rule.clone();
        bad.zones[0].formula = Formula::Rational {
            num: Poly(vec![0.0, -1.0]),
            den: Poly(vec![1.0, -1.0]),
            limit: 1.5,
        };
        assert!(bad.validate(&Interval::all()).is_err());
    }

    #[test]
    fn zero_zone_rejected_zero_exception_ok() {
        let bad = WeightRule {
            zones: vec![Zone { interval: Interval::all(), formula: Formula::Const(0.0) }],
            exceptions: BTreeMap::new(),
        };
        assert!(bad.validate(&Interval::all()).is_err());

        let mut ok = WeightRule::constant(2.0);
        ok.exceptions.insert(0, 0.0);
        assert!(ok.validate(&Interval::all()).is_ok());
        assert_eq!(ok.zero_indices(), vec![0]);
    }

    #[test]
    fn overlapping_zones_rejected() {
        let bad = WeightRule {
            zones: vec![
                Zone { interval: Interval::neg_inf_to(0), formula: Formula::Const(1.0) },
                Zone { interval: Interval::from_to_inf(0), formula: Formula::Const(2.0) },
            ],
            exceptions: BTreeMap::new(),
        };
        assert!(bad.validate(&Interval::all()).is_err());
    }

    #[test]
    fn translate_roundtrip_on_nat() {
        let rule = WeightRule {
            zones: vec![
                Zone { interval: Interval::finite(0, 4).unwrap(), formula: Formula::Const(2.0) },
                Zone { interval: Interval::from_to_inf(5), formula: Formula::Const(3.0) },
            ],
            exceptions: [(2i64, 7.0f64)].into_iter().collect(),
        };
        let nat = Interval::nat();
        let fwd = rule.translate_into(1, &nat);
        assert_eq!(fwd.weight(3), 7.0);
        assert_eq!(fwd.weight(0), 2.0); // extended down
        let back = fwd.translate_into(-1, &nat);
        assert_eq!(back, rule);
    }

    #[test]
    fn poly_shift_exact_on_integers() {
        let p = Poly(vec![0.0, -1.0]); // -x
        let q = p.compose_shift(-1.0); // -(x - 1) = 1 - x
        assert_eq!(q.0, vec![1.0, -1.0]);
    }

    #[test]
    fn diagonal_isolated_values() {
        let rule = DiagonalRule {
            zones: vec![
                (Interval::finite(0, 9).unwrap(), c64(0.5, 0.0)),
                (Interval::from_to_inf(10), c64(2.0, 0.0)),
            ],
            exceptions: [(3i64, c64(2.0, 0.0))].into_iter().collect(),
        };
        assert!(rule.validate().is_ok());
        assert_eq!(rule.limit_value(), c64(2.0, 0.0));
        // 9 copies of 0.5 remain (one index overridden to the limit value).
        assert_eq!(rule.isolated_values(), vec![(c64(0.5, 0.0), 9)]);
    }
}
