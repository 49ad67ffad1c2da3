//! Finitely supported complex coefficient sequences over the integer basis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{c64, is_finite_c, scaled_l2, C64};

/// A vector with finite support, indexed by `i64`.
///
/// Canonical form: no stored entry is exactly zero. The zero-pruning
/// threshold is exact `0.0`, never an epsilon — orbit statistics must not
/// silently discard small coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: BTreeMap<i64, C64>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector `e_i`.
    pub fn basis(i: i64) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(i, c64(1.0, 0.0));
        SparseVector { entries }
    }

    pub fn from_entries<I: IntoIterator<Item = (i64, C64)>>(it: I) -> Result<Self> {
        let mut v = SparseVector::zero();
        for (i, z) in it {
            if !is_finite_c(z) {
                return Err(Error::invalid(format!("non-finite entry at index {i}")));
            }
            v.add_to(i, z);
        }
        Ok(v)
    }

    /// Add `z` into slot `i`, pruning exact zeros.
    pub fn add_to(&mut self, i: i64, z: C64) {
        let cur = self.entries.get(&i).copied().unwrap_or_else(|| c64(0.0, 0.0));
        let next = cur + z;
        if next == c64(0.0, 0.0) {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, next);
        }
    }

    pub fn set(&mut self, i: i64, z: C64) {
        if z == c64(0.0, 0.0) {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, z);
        }
    }

    pub fn get(&self, i: i64) -> C64 {
        self.entries.get(&i).copied().unwrap_or_else(|| c64(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.entries.iter().map(|(&i, &z)| (i, z))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_bounds(&self) -> Option<(i64, i64)> {
        let lo = self.entries.keys().next()?;
        let hi = self.entries.keys().next_back()?;
        Some((*lo, *hi))
    }

    /// Euclidean norm, overflow-safe.
    pub fn norm(&self) -> f64 {
        scaled_l2(self.entries.values().map(|z| z.norm()))
    }

    /// `⟨self, other⟩` with the conjugation on `self`.
    pub fn inner(&self, other: &SparseVector) -> C64 {
        let mut acc = c64(0.0, 0.0);
        for (i, z) in self.iter() {
            acc += z.conj() * other.get(i);
        }
        acc
    }

    pub fn scale(&self, c: C64) -> SparseVector {
        if c == c64(0.0, 0.0) {
            return SparseVector::zero();
        }
        let mut out = SparseVector::zero();
        for (i, z) in self.iter() {
            out.set(i, c * z);
        }
        out
    }

    pub fn add(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (i, z) in other.iter() {
            out.add_to(i, z);
        }
        out
    }

    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (i, z) in other.iter() {
            out.add_to(i, -z);
        }
        out
    }

    /// Any stored component exceeding `limit` in magnitude?
    pub fn any_component_above(&self, limit: f64) -> bool {
        self.entries.values().any(|z| z.re.abs() > limit || z.im.abs() > limit)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let v: SparseVector = serde_json::from_str(text)?;
        Ok(v)
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("vector serialization cannot fail")
    }
}

// JSON form: {"entries": {"i": [re, im], ...}}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorRepr {
    entries: BTreeMap<i64, (f64, f64)>,
}

impl Serialize for SparseVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .entries
            .iter()
            .map(|(&i, &z)| (i, (z.re, z.im)))
            .collect();
        VectorRepr { entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = VectorRepr::deserialize(d)?;
        let mut v = SparseVector::zero();
        for (i, (re, im)) in repr.entries {
            let z = c64(re, im);
            if !is_finite_c(z) {
                return Err(D::Error::custom(format!("non-finite entry at index {i}")));
            }
            v.add_to(i, z);
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_entries_pruned() {
        let mut v = SparseVector::basis(3);
        v.add_to(3, c64(-1.0, 0.0));
        assert!(v.is_zero());
        assert_eq!(v.support_len(), 0);
    }

    #[test]
    fn norm_of_basis_pair() {
        let v = SparseVector::basis(0).add(&SparseVector::basis(7));
        assert!((v.norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn json_keys_are_strings_sorted_numerically() {
        let mut v = SparseVector::zero();
        v.set(-3, c64(1.0, 0.0));
        v.set(2, c64(0.0, -0.5));
        let s = v.to_canonical_json();
        assert_eq!(s, r#"{"entries":{"-3":[1.0,0.0],"2":[0.0,-0.5]}}"#);
        let back = SparseVector::parse_json(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn inner_product_conjugates_left() {
        let x = SparseVector::basis(0).scale(c64(0.0, 1.0));
        let y = SparseVector::basis(0);
        assert_eq!(x.inner(&y), c64(0.0, -1.0));
    }
}
