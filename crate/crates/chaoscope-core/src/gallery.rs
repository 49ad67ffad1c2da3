//! Named example operators with their expected spectral data, the compact
//! perturbation of the identity, and the 5B → 5B² connectedness path.
//!
//! Expected values are stored as data so that a failing comparison
//! pinpoints the disagreeing quantity; the gallery is the regression
//! anchor for the spectral and classification engines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, Truth};
use crate::error::{Error, Result};
use crate::geometry::{Arrangement, Circle};
use crate::interval::Interval;
use crate::numeric::c64;
use crate::operator::{CMatrix, Direction, OperatorSpec, SumBlock};
use crate::orbit::pair_profile;
use crate::spectral::{spectral_picture, Dim, Region, SigmaZeroPoint, SpectralPicture};
use crate::truncation::truncated_operator_norm;
use crate::vector::SparseVector;
use crate::weights::{DiagonalRule, Formula, Poly, WeightRule, Zone};

/// A catalogued operator with its expected spectral picture and verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GalleryEntry {
    pub name: String,
    pub provenance: String,
    pub spec: OperatorSpec,
    pub expected_picture: SpectralPicture,
    /// Partial expected verdict: predicate name -> truth value.
    pub expected_verdict: BTreeMap<String, bool>,
}

pub const GALLERY_NAMES: [&str; 8] = [
    "ex-2.10-annulus",
    "ex-2.15-dc-boundary",
    "ex-3.6-unimodal-boundary",
    "backward-shift-2B",
    "fiveB",
    "fiveB-squared",
    "half-backward",
    "diagonal-mixed",
];

pub fn gallery_names() -> &'static [&'static str] {
    &GALLERY_NAMES
}

fn backward_unilateral(weight: f64) -> OperatorSpec {
    OperatorSpec::UnilateralShift {
        direction: Direction::Backward,
        weights: WeightRule::constant_on(weight, Interval::nat()),
    }
}

fn annulus_spec() -> OperatorSpec {
    OperatorSpec::BilateralShift {
        direction: Direction::Forward,
        weights: WeightRule {
            zones: vec![
                Zone { interval: Interval::neg_inf_to(-2), formula: Formula::Const(0.5) },
                Zone { interval: Interval::from_to_inf(-1), formula: Formula::Const(2.0) },
            ],
            exceptions: BTreeMap::new(),
        },
    }
}

fn dc_boundary_spec() -> OperatorSpec {
    let mut weights = WeightRule::constant(2.0);
    weights.exceptions.insert(0, 0.0);
    OperatorSpec::BilateralShift { direction: Direction::Backward, weights }
}

fn unimodal_boundary_spec() -> OperatorSpec {
    OperatorSpec::BilateralShift {
        direction: Direction::Backward,
        weights: WeightRule {
            zones: vec![
                Zone {
                    interval: Interval::neg_inf_to(-1),
                    formula: Formula::Rational {
                        num: Poly(vec![0.0, -1.0]),
                        den: Poly(vec![1.0, -1.0]),
                        limit: 1.0,
                    },
                },
                Zone { interval: Interval::finite(0, 0).unwrap(), formula: Formula::Const(1.0) },
                Zone { interval: Interval::from_to_inf(1), formula: Formula::Const(2.0) },
            ],
            exceptions: BTreeMap::new(),
        },
    }
}

fn five_b_squared_spec() -> OperatorSpec {
    // 5B² is unitarily equivalent to 5B ⊕ 5B: two backward half-line
    // blocks interleave the even and odd coordinates.
    OperatorSpec::DirectSum {
        blocks: vec![
            SumBlock { range: Interval::neg_inf_to(-1), op: Box::new(backward_unilateral(5.0)) },
            SumBlock { range: Interval::nat(), op: Box::new(backward_unilateral(5.0)) },
        ],
    }
}

fn diagonal_mixed_spec() -> OperatorSpec {
    OperatorSpec::Diagonal {
        entries: DiagonalRule {
            zones: vec![
                (Interval::finite(0, 9).unwrap(), c64(0.5, 0.0)),
                (Interval::from_to_inf(10), c64(2.0, 0.0)),
            ],
            exceptions: BTreeMap::new(),
        },
    }
}

struct RegionData {
    index: i64,
    ker: u64,
    coker: u64,
    in_spectrum: bool,
}

/// Assemble an expected picture through the same arrangement geometry the
/// engine uses, with hand-written per-cell data keyed by outer radius.
fn expected_picture(
    curves: &[Circle],
    exterior: RegionData,
    by_outer_radius: &[(f64, RegionData)],
    sigma_zero: Vec<SigmaZeroPoint>,
    norm_bound: f64,
) -> SpectralPicture {
    let arr = Arrangement::build(curves).expect("expected curves are laminar");
    let mut regions = Vec::new();
    for cell in &arr.cells {
        let data = match cell.outer {
            None => &exterior,
            Some(i) => {
                let r = arr.circles[i].radius;
                &by_outer_radius
                    .iter()
                    .find(|(radius, _)| (radius - r).abs() < 1e-12)
                    .unwrap_or_else(|| panic!("no expected data for radius {r}"))
                    .1
            }
        };
        regions.push(Region {
            outer: cell.outer.map(|i| arr.circles[i]),
            inner: cell.inner.iter().map(|&i| arr.circles[i]).collect(),
            representative: cell.representative,
            in_spectrum: data.in_spectrum,
            semi_fredholm: true,
            index: data.index,
            dim_ker: Dim::Exact(data.ker),
            dim_coker: Dim::Exact(data.coker),
            min_index: Dim::Exact(data.ker.min(data.coker)),
        });
    }
    SpectralPicture {
        essential_curves: arr.circles.clone(),
        regions,
        sigma_zero,
        sigma_zero_exact: true,
        norm_bound,
    }
}

fn verdict(entries: &[(&str, bool)]) -> BTreeMap<String, bool> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Build a catalogued entry by name.
pub fn gallery(name: &str) -> Result<GalleryEntry> {
    let resolvent = RegionData { index: 0, ker: 0, coker: 0, in_spectrum: false };
    match name {
        "ex-2.10-annulus" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "worked example 2.10: expanding bilateral shift with annulus spectrum".into(),
            spec: annulus_spec(),
            expected_picture: expected_picture(
                &[Circle::at_origin(0.5), Circle::at_origin(2.0)],
                resolvent,
                &[
                    (0.5, RegionData { index: 0, ker: 0, coker: 0, in_spectrum: false }),
                    (2.0, RegionData { index: -1, ker: 0, coker: 1, in_spectrum: true }),
                ],
                vec![],
                2.0,
            ),
            expected_verdict: verdict(&[
                ("E1", false),
                ("E2", false),
                ("F", false),
                ("G0", false),
                ("G1", false),
                ("G2", false),
                ("HC", false),
            ]),
        }),
        "ex-2.15-dc-boundary" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "worked example 2.15: weight-2 backward shift with one dead link".into(),
            spec: dc_boundary_spec(),
            expected_picture: expected_picture(
                &[Circle::at_origin(2.0)],
                resolvent,
                &[(2.0, RegionData { index: 0, ker: 1, coker: 1, in_spectrum: true })],
                vec![],
                2.0,
            ),
            expected_verdict: verdict(&[
                ("E1", false),
                ("E2", true),
                ("F", false),
                ("G0", false),
                ("G1", true),
                ("G2", false),
                ("HC", false),
            ]),
        }),
        "ex-3.6-unimodal-boundary" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "worked example 3.6: unimodal shift whose essential spectrum covers ∂𝔻".into(),
            spec: unimodal_boundary_spec(),
            expected_picture: expected_picture(
                &[Circle::at_origin(1.0), Circle::at_origin(2.0)],
                resolvent,
                &[
                    (1.0, RegionData { index: 0, ker: 0, coker: 0, in_spectrum: false }),
                    (2.0, RegionData { index: 1, ker: 1, coker: 0, in_spectrum: true }),
                ],
                vec![],
                2.0,
            ),
            expected_verdict: verdict(&[
                ("E1", true),
                ("E2", false),
                ("F", false),
                ("G0", true),
                ("G1", false),
                ("G2", true),
                ("HC", true),
            ]),
        }),
        "backward-shift-2B" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "auxiliary operator: twice the backward unilateral shift".into(),
            spec: backward_unilateral(2.0),
            expected_picture: expected_picture(
                &[Circle::at_origin(2.0)],
                resolvent,
                &[(2.0, RegionData { index: 1, ker: 1, coker: 0, in_spectrum: true })],
                vec![],
                2.0,
            ),
            expected_verdict: verdict(&[
                ("E1", false),
                ("E2", true),
                ("F", true),
                ("G0", true),
                ("G1", false),
                ("G2", false),
                ("HC", true),
            ]),
        }),
        "fiveB" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "connectedness endpoint: five times the backward shift".into(),
            spec: backward_unilateral(5.0),
            expected_picture: expected_picture(
                &[Circle::at_origin(5.0)],
                resolvent,
                &[(5.0, RegionData { index: 1, ker: 1, coker: 0, in_spectrum: true })],
                vec![],
                5.0,
            ),
            expected_verdict: verdict(&[
                ("E1", false),
                ("E2", true),
                ("F", true),
                ("G0", true),
                ("G1", false),
                ("G2", false),
                ("HC", true),
            ]),
        }),
        "fiveB-squared" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "connectedness endpoint: square of five times the backward shift".into(),
            spec: five_b_squared_spec(),
            expected_picture: expected_picture(
                &[Circle::at_origin(5.0)],
                resolvent,
                &[(5.0, RegionData { index: 2, ker: 2, coker: 0, in_spectrum: true })],
                vec![],
                5.0,
            ),
            expected_verdict: verdict(&[
                ("E1", false),
                ("E2", true),
                ("F", true),
                ("G0", true),
                ("G1", false),
                ("G2", false),
                ("HC", true),
            ]),
        }),
        "half-backward" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "control case: contractive backward shift".into(),
            spec: backward_unilateral(0.5),
            expected_picture: expected_picture(
                &[Circle::at_origin(0.5)],
                resolvent,
                &[(0.5, RegionData { index: 1, ker: 1, coker: 0, in_spectrum: true })],
                vec![],
                0.5,
            ),
            expected_verdict: verdict(&[
                ("E1", false),
                ("E2", false),
                ("F", false),
                ("G0", false),
                ("G1", false),
                ("G2", false),
                ("HC", false),
            ]),
        }),
        "diagonal-mixed" => Ok(GalleryEntry {
            name: name.into(),
            provenance: "control case: two-level diagonal with one accumulation point".into(),
            spec: diagonal_mixed_spec(),
            expected_picture: expected_picture(
                &[Circle::point(c64(2.0, 0.0))],
                resolvent,
                &[],
                vec![SigmaZeroPoint { point: c64(0.5, 0.0), multiplicity: 10 }],
                2.0,
            ),
            expected_verdict: verdict(&[
                ("E1", false),
                ("E2", false),
                ("F", false),
                ("G0", false),
                ("G1", false),
                ("G2", false),
                ("HC", false),
            ]),
        }),
        other => Err(Error::UnknownName(other.into())),
    }
}

impl GalleryEntry {
    /// Compare the engine output against the stored expectations; returns
    /// the list of disagreements (empty = all good).
    pub fn verify(&self) -> Result<Vec<String>> {
        let mut mismatches = Vec::new();
        let computed = spectral_picture(&self.spec)?;
        if !computed.approx_eq(&self.expected_picture, 1e-12) {
            mismatches.push(format!(
                "{}: spectral picture disagrees with the stored expectation",
                self.name
            ));
        }
        let v = classify(&computed)?;
        let actual: BTreeMap<&str, Truth> = [
            ("E1", v.e1.value),
            ("E2", v.e2.value),
            ("F", v.f.value),
            ("G0", v.g0.value),
            ("G1", v.g1.value),
            ("G2", v.g2.value),
            ("HC", v.hc_closure.value),
        ]
        .into_iter()
        .collect();
        for (key, expect) in &self.expected_verdict {
            match actual.get(key.as_str()) {
                Some(t) => {
                    if t.definite() != Some(*expect) {
                        mismatches.push(format!(
                            "{}: predicate {key} expected {expect}, computed {t:?}",
                            self.name
                        ));
                    }
                }
                None => mismatches.push(format!("{}: unknown predicate {key}", self.name)),
            }
        }
        Ok(mismatches)
    }
}

/// Report on one perturbation block's distributional statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockScramble {
    pub dim: usize,
    pub horizon: usize,
    pub tau_low: f64,
    pub tau_high: f64,
    /// min over n of `F^n(τ_low)`
    pub min_f_low: f64,
    /// max over n of `F^n(τ_high)`
    pub max_f_high: f64,
    pub separation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityPerturbation {
    pub epsilon: f64,
    pub block_dims: Vec<usize>,
    pub spec: OperatorSpec,
    /// ‖K‖ from the symbolic weight supremum (exactly ε/2).
    pub norm_of_k_symbolic: f64,
    /// ‖K‖ from the truncation oracle's largest singular value.
    pub norm_of_k_numeric: f64,
    pub scramble: Vec<BlockScramble>,
}

/// Build `I + K_ε` with `K_ε` block-diagonal nilpotent backward shifts of
/// the given dimensions and constant weight `ε/2`, and measure the
/// within-block distributional oscillation.
pub fn identity_perturbation(epsilon: f64, block_dims: &[usize]) -> Result<IdentityPerturbation> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::out_of_range("ε must lie in (0, 1)"));
    }
    if block_dims.is_empty() || block_dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::out_of_range("block dimensions must be increasing"));
    }
    if block_dims[0] < 2 {
        return Err(Error::out_of_range("blocks need dimension at least 2"));
    }
    let weight = epsilon / 2.0;

    let nilpotent = |d: usize| -> OperatorSpec {
        let mut entries = vec![vec![c64(0.0, 0.0); d]; d];
        for j in 1..d {
            entries[j - 1][j] = c64(weight, 0.0);
        }
        OperatorSpec::FiniteMatrix { entries: CMatrix(entries) }
    };

    let mut blocks = Vec::new();
    let mut offset = 0i64;
    for &d in block_dims {
        let range = Interval::finite(offset, offset + d as i64 - 1).unwrap();
        blocks.push(SumBlock { range, op: Box::new(nilpotent(d)) });
        offset += d as i64;
    }
    blocks.push(SumBlock {
        range: Interval::from_to_inf(offset),
        op: Box::new(OperatorSpec::Diagonal { entries: DiagonalRule::constant(c64(0.0, 0.0)) }),
    });
    let k_spec = OperatorSpec::DirectSum { blocks };
    k_spec.validate()?;
    let spec = OperatorSpec::ScalarShift { lambda: c64(1.0, 0.0), inner: Box::new(k_spec.clone()) };

    let window = (offset as usize + 8).min(crate::truncation::size_cap());
    let norm_numeric = truncated_operator_norm(&k_spec, window)?;

    let tau_low = epsilon / 4.0;
    let tau_high = 2.0;
    let mut scramble = Vec::new();
    let mut base = 0i64;
    for &d in block_dims {
        let top = base + d as i64 - 1;
        let horizon = 4 * d;
        let x = SparseVector::zero();
        let y = SparseVector::basis(top);
        let grid = [tau_low, tau_high];
        let profile = pair_profile(&spec, &x, &y, horizon, &grid)?;
        let mut min_f_low = f64::INFINITY;
        let mut max_f_high = f64::NEG_INFINITY;
        for row in &profile.rows {
            min_f_low = min_f_low.min(row.value(0));
            max_f_high = max_f_high.max(row.value(1));
        }
        scramble.push(BlockScramble {
            dim: d,
            horizon,
            tau_low,
            tau_high,
            min_f_low,
            max_f_high,
            separation: max_f_high - min_f_low,
        });
        base += d as i64;
    }

    Ok(IdentityPerturbation {
        epsilon,
        block_dims: block_dims.to_vec(),
        spec,
        norm_of_k_symbolic: weight,
        norm_of_k_numeric: norm_numeric,
        scramble,
    })
}

/// One point of the connectedness path between 5B and 5B².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathPoint {
    pub t: f64,
    pub picture: SpectralPicture,
    /// Boundaries of the positive-index disks at this parameter.
    pub positive_index_regions: Vec<Circle>,
}

/// Spectral picture along the path: the 5B picture for `t ≤ 0`, the 5B²
/// picture for `t ≥ 1`, and in between two externally tangent disks
/// `{|z + 5(1-t)| < 5t}` (index 2) and `{|z - 5t| < 5(1-t)}` (index 1) —
/// finite-rank path segments leave the endpoint pictures unchanged.
pub fn path_picture(t: f64) -> Result<PathPoint> {
    if !(-1.0..=2.0).contains(&t) || t.is_nan() {
        return Err(Error::out_of_range(format!("t = {t} outside [-1, 2]")));
    }
    if t <= 0.0 {
        let picture = spectral_picture(&backward_unilateral(5.0))?;
        return Ok(PathPoint { t, picture, positive_index_regions: vec![Circle::at_origin(5.0)] });
    }
    if t >= 1.0 {
        let picture = spectral_picture(&five_b_squared_spec())?;
        return Ok(PathPoint { t, picture, positive_index_regions: vec![Circle::at_origin(5.0)] });
    }
    let r1 = 5.0 * t;
    let r2 = 5.0 * (1.0 - t);
    let c1 = Circle::new(c64(-r2, 0.0), r1); // index 2 disk
    let c2 = Circle::new(c64(r1, 0.0), r2); // index 1 disk
    let arr = Arrangement::build(&[c1, c2])?;
    let mut regions = Vec::new();
    for cell in &arr.cells {
        let data = match cell.outer {
            None => RegionData { index: 0, ker: 0, coker: 0, in_spectrum: false },
            Some(i) => {
                let c = arr.circles[i];
                if (c.center - c1.center).norm() < 1e-12 && (c.radius - c1.radius).abs() < 1e-12 {
                    RegionData { index: 2, ker: 2, coker: 0, in_spectrum: true }
                } else {
                    RegionData { index: 1, ker: 1, coker: 0, in_spectrum: true }
                }
            }
        };
        regions.push(Region {
            outer: cell.outer.map(|i| arr.circles[i]),
            inner: cell.inner.iter().map(|&i| arr.circles[i]).collect(),
            representative: cell.representative,
            in_spectrum: data.in_spectrum,
            semi_fredholm: true,
            index: data.index,
            dim_ker: Dim::Exact(data.ker),
            dim_coker: Dim::Exact(data.coker),
            min_index: Dim::Exact(data.ker.min(data.coker)),
        });
    }
    let picture = SpectralPicture {
        essential_curves: arr.circles.clone(),
        regions,
        sigma_zero: vec![],
        sigma_zero_exact: true,
        norm_bound: 5.0,
    };
    Ok(PathPoint { t, picture, positive_index_regions: vec![c1, c2] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::union_hausdorff;

    #[test]
    fn all_entries_verify() {
        for name in gallery_names() {
            let entry = gallery(name).unwrap();
            let mismatches = entry.verify().unwrap();
            assert!(mismatches.is_empty(), "{name}: {mismatches:?}");
        }
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(gallery("nope"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn perturbation_norm_and_scramble() {
        let p = identity_perturbation(0.5, &[4, 16, 64]).unwrap();
        assert_eq!(p.norm_of_k_symbolic, 0.25);
        assert!((p.norm_of_k_numeric - 0.25).abs() <= 1e-10);
        for b in &p.scramble {
            assert!(b.separation >= 0.5, "block {} separation {}", b.dim, b.separation);
            assert_eq!(b.min_f_low, 0.0);
            assert_eq!(b.max_f_high, 1.0);
        }
        assert!(matches!(identity_perturbation(0.0, &[4, 8]), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn perturbation_picture_is_a_point_at_one() {
        let p = identity_perturbation(0.5, &[2, 4]).unwrap();
        let pic = spectral_picture(&p.spec).unwrap();
        assert_eq!(pic.essential_curves, vec![Circle::point(c64(1.0, 0.0))]);
        let v = classify(&pic).unwrap();
        assert_eq!(v.e1.value, Truth::True);
    }

    #[test]
    fn path_has_positive_index_on_unit_circle_everywhere() {
        for k in 0..=30 {
            let t = -1.0 + 3.0 * k as f64 / 30.0;
            let point = path_picture(t).unwrap();
            let v = classify(&point.picture).unwrap();
            assert_eq!(v.f.value, Truth::True, "F must hold at t = {t}");
        }
        assert!(path_picture(2.5).is_err());
    }

    #[test]
    fn path_endpoints_equal_gallery_pictures() {
        let start = path_picture(-1.0).unwrap();
        let five_b = spectral_picture(&gallery("fiveB").unwrap().spec).unwrap();
        assert_eq!(start.picture, five_b);
        let end = path_picture(2.0).unwrap();
        let five_b2 = spectral_picture(&gallery("fiveB-squared").unwrap().spec).unwrap();
        assert_eq!(end.picture, five_b2);
    }

    #[test]
    fn path_curves_move_continuously() {
        let mut prev = path_picture(-1.0).unwrap();
        let steps = 120;
        for k in 1..=steps {
            let t = -1.0 + 3.0 * k as f64 / steps as f64;
            let cur = path_picture(t).unwrap();
            let d = union_hausdorff(
                &prev.picture.essential_curves,
                &cur.picture.essential_curves,
                256,
            );
            let dt = 3.0 / steps as f64;
            assert!(d <= 10.0 * dt + 1e-9, "jump {d} at t = {t}");
            prev = cur;
        }
    }

    #[test]
    fn tangency_points_on_the_path_stay_decisive() {
        // At t = 0.4 and 0.6 the unit circle is tangent to the path disks;
        // F keeps a definite witness while E1 honestly reports
        // indeterminate.
        for t in [0.4, 0.6] {
            let point = path_picture(t).unwrap();
            let v = classify(&point.picture).unwrap();
            assert_eq!(v.f.value, Truth::True);
            assert!(v.tangency_flag);
        }
    }
}
