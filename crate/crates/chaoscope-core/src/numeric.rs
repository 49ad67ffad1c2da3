//! Complex scalars, finite-value checks and serde helpers.
//!
//! Complex numbers travel through JSON as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type C64 = Complex64;

/// Shorthand constructor.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// True when both components are finite.
pub fn is_finite_c(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Serde adapter: `Complex64` as a two-element array.
pub mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        (z.re, z.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// Serde adapter: `Option<Complex64>` as an optional pair.
pub mod complex_pair_opt {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(|z| (z.re, z.im)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Ok(<Option<(f64, f64)>>::deserialize(d)?.map(|(re, im)| C64::new(re, im)))
    }
}

/// Overflow-safe Euclidean norm of a sequence of magnitudes.
///
/// Scales by the running maximum so that squaring cannot overflow
/// before the true norm does.
pub fn scaled_l2<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut max = 0.0f64;
    let mut sum = 0.0f64;
    for v in values {
        let a = v.abs();
        if a == 0.0 {
            continue;
        }
        if a > max {
            let ratio = max / a;
            sum = sum * ratio * ratio + 1.0;
            max = a;
        } else {
            let ratio = a / max;
            sum += ratio * ratio;
        }
    }
    max * sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_l2_matches_naive() {
        let vals = [3.0, 4.0];
        assert!((scaled_l2(vals) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_l2_survives_huge_entries() {
        let vals = [1e200, 1e200];
        let n = scaled_l2(vals);
        assert!(n.is_finite());
        assert!((n - 1e200 * 2f64.sqrt()).abs() / n < 1e-15);
    }

    #[test]
    fn complex_roundtrip() {
        #[derive(Serialize, Deserialize)]
        struct W(#[serde(with = "complex_pair")] C64);
        let w = W(c64(1.5, -2.0));
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let back: W = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, w.0);
    }
}
