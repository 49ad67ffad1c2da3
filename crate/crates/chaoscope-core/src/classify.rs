//! Spectral membership predicates for the chaotic-operator classes.
//!
//! Every predicate quantifies over the unit circle, so classification
//! starts from an exact arc decomposition of `∂𝔻` against the picture's
//! essential curves — never from sampling, which could miss thin arcs.
//! Bit-exact incidences (a curve equal to `∂𝔻`, a point of essential
//! spectrum on it, an exact tangency) are definite; within-tolerance
//! near-degeneracies make exactly the affected predicates indeterminate.
//!
//! Predicate dictionary, with `ρ⁰/ρ⁻/ρ⁺` the zero/negative/positive index
//! parts of the semi-Fredholm domain:
//!
//! * `E1`: `∂𝔻` meets an essential curve.
//! * `E2`: `∂𝔻` avoids the curves and every touched region has kernel.
//! * `F`:  some point of `∂𝔻` has positive index.
//! * `G0`: `∂𝔻 ⊄ ρ⁰ ∪ ρ⁻`.
//! * `G1`: `∂𝔻 ⊆ ρ⁰ ∪ ρ⁻` with kernel everywhere on it.
//! * `G2`: `∂𝔻` meets the curves but never a positive-index region.
//! * `HC_closure`: `σ_w ∪ ∂𝔻` connected, no isolated eigenvalues, all
//!   indices ≥ 0.
//!
//! `E1 ∨ E2` is closure membership, `F` interior membership, `G0` the
//! closure of the interior and `G1 ∨ G2` the closure of the boundary part.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{circle_relation, Circle, CircleRel};
use crate::numeric::{c64, complex_pair, C64};
use crate::spectral::{
    weyl_spectrum, Dim, Region, SigmaZeroPoint, SpectralPicture,
};

/// Kleene three-valued logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        use Truth::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Indeterminate,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        use Truth::*;
        match (self, other) {
            (True, _) | (_, True) => True,
            (False, False) => False,
            _ => Indeterminate,
        }
    }

    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Indeterminate => Truth::Indeterminate,
        }
    }

    pub fn definite(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Indeterminate => None,
        }
    }
}

/// Where a predicate's truth is anchored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Point {
        #[serde(with = "complex_pair")]
        at: C64,
    },
    Curve {
        circle: Circle,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateVerdict {
    pub value: Truth,
    pub witness: Option<Witness>,
}

impl PredicateVerdict {
    fn bare(value: Truth) -> Self {
        PredicateVerdict { value, witness: None }
    }
}

/// Truth values and witnesses for all predicates, plus the derived set
/// memberships.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub e1: PredicateVerdict,
    pub e2: PredicateVerdict,
    pub f: PredicateVerdict,
    pub g0: PredicateVerdict,
    pub g1: PredicateVerdict,
    pub g2: PredicateVerdict,
    pub hc_closure: PredicateVerdict,
    pub in_closure_dc: Truth,
    pub in_interior_dc: Truth,
    pub in_closure_dc_minus_interior: Truth,
    pub in_closure_interior: Truth,
    pub tangency_flag: bool,
}

/// One definite open arc of `∂𝔻` and the region holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcInRegion {
    pub start_angle: f64,
    pub end_angle: f64,
    pub region: usize,
}

/// Exact incidence of `∂𝔻` with a picture's curves and regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCircleRelation {
    /// Definitely meets an essential curve.
    pub meets_essential: bool,
    /// A within-tolerance incidence that could not be decided.
    pub maybe_meets: bool,
    /// `∂𝔻` coincides with an essential curve (exactly).
    pub coincides_with_curve: bool,
    /// Near-coincidence that poisons the whole arc decomposition.
    pub ambiguous_coincide: bool,
    pub tangency_flag: bool,
    pub arcs: Vec<ArcInRegion>,
    /// Definite touch points (crossings, exact tangencies, σ_lre points).
    #[serde(with = "point_list")]
    pub touch_points: Vec<C64>,
    /// Regions possibly grazed through ambiguous tangencies.
    pub maybe_regions: Vec<usize>,
}

mod point_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = v.iter().map(|z| (z.re, z.im)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(d)?;
        Ok(pairs.into_iter().map(|(re, im)| c64(re, im)).collect())
    }
}

/// Decompose `∂𝔻` against the picture's curves into definite arcs,
/// definite touch points, and ambiguity markers.
pub fn unit_circle_relation(picture: &SpectralPicture) -> Result<UnitCircleRelation> {
    let arr = picture.arrangement()?;
    let unit = Circle::unit();

    let mut meets = false;
    let mut maybe = false;
    let mut coincides = false;
    let mut ambiguous_coincide = false;
    let mut tangency = false;
    let mut cut_angles: Vec<f64> = Vec::new();
    let mut touch_points: Vec<C64> = Vec::new();
    let mut maybe_regions: Vec<usize> = Vec::new();

    for curve in &arr.circles {
        match circle_relation(&unit, curve) {
            CircleRel::Equal { exact: true } => {
                meets = true;
                coincides = true;
            }
            CircleRel::Equal { exact: false } => {
                maybe = true;
                ambiguous_coincide = true;
                tangency = true;
            }
            CircleRel::Crossing => {
                meets = true;
                for theta in crate::geometry::crossing_angles_on(&unit, curve) {
                    cut_angles.push(theta);
                    touch_points.push(c64(theta.cos(), theta.sin()));
                }
            }
            CircleRel::ExternallyTangent { exact } | CircleRel::InternallyTangent { exact } => {
                tangency = true;
                let theta = tangent_angle(&unit, curve);
                if exact {
                    meets = true;
                    cut_angles.push(theta);
                    touch_points.push(c64(theta.cos(), theta.sin()));
                } else {
                    maybe = true;
                    // The doubtful sliver lies just across the curve from
                    // where ∂𝔻 runs; record the far-side region.
                    if let Some(region) = far_side_region(&arr, curve, theta) {
                        if !maybe_regions.contains(&region) {
                            maybe_regions.push(region);
                        }
                    }
                }
            }
            CircleRel::DisjointOutside | CircleRel::Nested { .. } => {}
        }
    }

    let mut arcs = Vec::new();
    if !coincides && !ambiguous_coincide {
        cut_angles.sort_by(f64::total_cmp);
        cut_angles.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        if cut_angles.is_empty() {
            // ∂𝔻 lies in a single cell; probe a few fixed angles in case
            // one sits near an ambiguous incidence.
            let probes = [0.3777f64, 1.1331, 2.0777, 2.9113, 4.0333, 5.2113];
            let mut found = None;
            for &theta in &probes {
                if let Ok(cell) = arr.locate(c64(theta.cos(), theta.sin())) {
                    found = Some((theta, cell));
                    break;
                }
            }
            if let Some((theta, cell)) = found {
                arcs.push(ArcInRegion {
                    start_angle: theta,
                    end_angle: theta + std::f64::consts::TAU,
                    region: cell,
                });
            } else {
                ambiguous_coincide = true;
                maybe = true;
            }
        } else {
            let n = cut_angles.len();
            for k in 0..n {
                let a = cut_angles[k];
                let b = if k + 1 < n {
                    cut_angles[k + 1]
                } else {
                    cut_angles[0] + std::f64::consts::TAU
                };
                if b - a < 1e-13 {
                    continue;
                }
                let mid = 0.5 * (a + b);
                let p = c64(mid.cos(), mid.sin());
                match arr.locate(p) {
                    Ok(cell) => arcs.push(ArcInRegion { start_angle: a, end_angle: b, region: cell }),
                    Err(_) => {
                        // Arc midpoint within tolerance of a curve: treat the
                        // whole arc as uncertain.
                        maybe = true;
                        tangency = true;
                    }
                }
            }
        }
    }

    Ok(UnitCircleRelation {
        meets_essential: meets,
        maybe_meets: maybe,
        coincides_with_curve: coincides,
        ambiguous_coincide,
        tangency_flag: tangency,
        arcs,
        touch_points,
        maybe_regions,
    })
}

/// Angle on the unit circle of the (near-)tangency with `curve`.
fn tangent_angle(unit: &Circle, curve: &Circle) -> f64 {
    let c = curve.center - unit.center;
    if c.norm_sqr() == 0.0 {
        return 0.0;
    }
    // External tangency and internal with the curve inside: toward the
    // curve. Internal with ∂𝔻 inside the curve: away from it.
    let inside_curve = unit.center != curve.center
        && (unit.center - curve.center).norm() + unit.radius <= curve.radius + 1e-9;
    if inside_curve {
        (-c).arg()
    } else {
        c.arg()
    }
}

/// The region just across `curve` from where `∂𝔻` runs near the tangency.
fn far_side_region(
    arr: &crate::geometry::Arrangement,
    curve: &Circle,
    theta: f64,
) -> Option<usize> {
    let p = c64(theta.cos(), theta.sin());
    if curve.is_point() {
        // A nearly-touched point of essential spectrum has no far side.
        return None;
    }
    let dir = (p - curve.center) / (p - curve.center).norm();
    // Judge which side ∂𝔻 runs on from a nearby arc point, not the
    // tangent point itself (whose signed distance is ~0).
    let q = c64((theta + 0.1).cos(), (theta + 0.1).sin());
    let near_sign = curve.boundary_distance(q);
    for scale in [1e-5, 1e-4, 1e-3] {
        let delta = scale * curve.radius.max(1e-3);
        let probe = if near_sign >= 0.0 {
            curve.center + dir * (curve.radius - delta)
        } else {
            curve.center + dir * (curve.radius + delta)
        };
        if let Ok(cell) = arr.locate(probe) {
            return Some(cell);
        }
    }
    None
}

fn ker_at_least_one(r: &Region) -> Truth {
    match r.dim_ker {
        Dim::Exact(k) => Truth::from_bool(k >= 1),
        Dim::Unknown => Truth::Indeterminate,
    }
}

/// Universal quantification over the touched regions: definite regions
/// contribute their value; possibly-grazed regions can only confirm or
/// leave the matter open.
fn for_all_touched(
    picture: &SpectralPicture,
    rel: &UnitCircleRelation,
    pred: impl Fn(&Region) -> Truth,
) -> Truth {
    let mut acc = Truth::True;
    for arc in &rel.arcs {
        acc = acc.and(pred(&picture.regions[arc.region]));
    }
    for &region in &rel.maybe_regions {
        let v = pred(&picture.regions[region]);
        let weakened = if v == Truth::True { Truth::True } else { Truth::Indeterminate };
        acc = acc.and(weakened);
    }
    acc
}

/// Decide all membership predicates of a picture.
pub fn classify(picture: &SpectralPicture) -> Result<ClassificationVerdict> {
    let rel = unit_circle_relation(picture)?;

    if rel.ambiguous_coincide {
        let ind = PredicateVerdict::bare(Truth::Indeterminate);
        let hc = hc_predicate(picture);
        return Ok(ClassificationVerdict {
            e1: ind.clone(),
            e2: ind.clone(),
            f: ind.clone(),
            g0: ind.clone(),
            g1: ind.clone(),
            g2: ind.clone(),
            hc_closure: hc,
            in_closure_dc: Truth::Indeterminate,
            in_interior_dc: Truth::Indeterminate,
            in_closure_dc_minus_interior: Truth::Indeterminate,
            in_closure_interior: Truth::Indeterminate,
            tangency_flag: rel.tangency_flag,
        });
    }

    // E1: ∂𝔻 meets σ_lre.
    let e1_value = if rel.meets_essential {
        Truth::True
    } else if rel.maybe_meets {
        Truth::Indeterminate
    } else {
        Truth::False
    };
    let e1_witness = if rel.coincides_with_curve {
        picture
            .essential_curves
            .iter()
            .find(|c| matches!(circle_relation(&Circle::unit(), c), CircleRel::Equal { .. }))
            .map(|c| Witness::Curve { circle: *c })
    } else {
        rel.touch_points.first().map(|&p| Witness::Point { at: p })
    };
    let e1 = PredicateVerdict { value: e1_value, witness: e1_witness };

    let avoids_curves = e1.value.not();

    // E2: ∂𝔻 ⊆ ρ_sF and kernel everywhere on it.
    let e2_value = avoids_curves.and(for_all_touched(picture, &rel, ker_at_least_one));
    let e2_witness = if e2_value == Truth::True {
        first_arc_witness(picture, &rel, |r| ker_at_least_one(r) == Truth::True)
    } else {
        None
    };
    let e2 = PredicateVerdict { value: e2_value, witness: e2_witness };

    // F: some point of ∂𝔻 has positive index.
    let mut f_value = Truth::False;
    let mut f_witness = None;
    for arc in &rel.arcs {
        if picture.regions[arc.region].index > 0 {
            f_value = Truth::True;
            let mid = 0.5 * (arc.start_angle + arc.end_angle);
            f_witness = Some(Witness::Point { at: c64(mid.cos(), mid.sin()) });
            break;
        }
    }
    if f_value == Truth::False
        && rel
            .maybe_regions
            .iter()
            .any(|&rid| picture.regions[rid].index > 0)
    {
        f_value = Truth::Indeterminate;
    }
    let f = PredicateVerdict { value: f_value, witness: f_witness };

    // Containment in ρ⁰ ∪ ρ⁻.
    let contained =
        avoids_curves.and(for_all_touched(picture, &rel, |r| Truth::from_bool(r.index <= 0)));

    // G0 = ¬(∂𝔻 ⊆ ρ⁰ ∪ ρ⁻).
    let g0_value = contained.not();
    let g0_witness = rel
        .touch_points
        .first()
        .map(|&p| Witness::Point { at: p })
        .or_else(|| f.witness.clone());
    let g0 = PredicateVerdict {
        value: g0_value,
        witness: if g0_value == Truth::True { g0_witness } else { None },
    };

    // G1 = containment plus kernel everywhere.
    let g1_value = contained.and(for_all_touched(picture, &rel, ker_at_least_one));
    let g1_witness = if g1_value == Truth::True {
        first_arc_witness(picture, &rel, |r| ker_at_least_one(r) == Truth::True)
    } else {
        None
    };
    let g1 = PredicateVerdict { value: g1_value, witness: g1_witness };

    // G2 = meets the curves, never with positive index on ∂𝔻.
    let g2_value = e1.value.and(f.value.not());
    let g2 = PredicateVerdict {
        value: g2_value,
        witness: if g2_value == Truth::True { e1.witness.clone() } else { None },
    };

    let hc_closure = hc_predicate(picture);

    let in_closure_dc = e1.value.or(e2.value);
    let in_interior_dc = f.value;
    let in_closure_dc_minus_interior = g1.value.or(g2.value);
    let in_closure_interior = g0.value;

    Ok(ClassificationVerdict {
        e1,
        e2,
        f,
        g0,
        g1,
        g2,
        hc_closure,
        in_closure_dc,
        in_interior_dc,
        in_closure_dc_minus_interior,
        in_closure_interior,
        tangency_flag: rel.tangency_flag,
    })
}

fn first_arc_witness(
    picture: &SpectralPicture,
    rel: &UnitCircleRelation,
    good: impl Fn(&Region) -> bool,
) -> Option<Witness> {
    rel.arcs
        .iter()
        .find(|arc| good(&picture.regions[arc.region]))
        .map(|arc| {
            let mid = 0.5 * (arc.start_angle + arc.end_angle);
            Witness::Point { at: c64(mid.cos(), mid.sin()) }
        })
}

/// `σ_w ∪ ∂𝔻` connected, `σ_0 = ∅`, all indices nonnegative.
fn hc_predicate(picture: &SpectralPicture) -> PredicateVerdict {
    let connected = Truth::from_bool(weyl_spectrum(picture).connected_with_unit_circle());
    let sigma_zero_empty = if picture.sigma_zero_exact {
        Truth::from_bool(picture.sigma_zero.is_empty())
    } else {
        Truth::Indeterminate
    };
    let nonneg = Truth::from_bool(picture.regions.iter().all(|r| r.index >= 0));
    PredicateVerdict::bare(connected.and(sigma_zero_empty).and(nonneg))
}

/// A violation of one of the inter-class relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationViolation {
    pub picture: usize,
    pub rule: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub checked: usize,
    pub skipped_indeterminate: usize,
    pub violations: Vec<RelationViolation>,
}

/// Check the set relations the classification theorems force:
/// `F ⇒ E1∨E2`, `F ⇒ G0`, `G1 ⇒ E2`, `G2 ⇒ E1`,
/// `(E1∨E2) ⇔ (G0∨G1∨G2)` and `HC ⇒ G0`.
pub fn relation_suite(pictures: &[SpectralPicture]) -> Result<RelationReport> {
    let mut violations = Vec::new();
    let mut skipped = 0usize;
    for (pi, picture) in pictures.iter().enumerate() {
        let v = classify(picture)?;
        let defs = [
            v.e1.value,
            v.e2.value,
            v.f.value,
            v.g0.value,
            v.g1.value,
            v.g2.value,
            v.hc_closure.value,
        ];
        if defs.iter().any(|t| *t == Truth::Indeterminate) {
            skipped += 1;
            continue;
        }
        let b = |t: Truth| t == Truth::True;
        let (e1, e2, f, g0, g1, g2, hc) = (
            b(v.e1.value),
            b(v.e2.value),
            b(v.f.value),
            b(v.g0.value),
            b(v.g1.value),
            b(v.g2.value),
            b(v.hc_closure.value),
        );
        let mut fail = |rule: &str, detail: String| {
            violations.push(RelationViolation { picture: pi, rule: rule.into(), detail });
        };
        if f && !(e1 || e2) {
            fail("F⇒E1∨E2", format!("F true, E1={e1}, E2={e2}"));
        }
        if f && !g0 {
            fail("F⇒G0", "F true but G0 false".into());
        }
        if g1 && !e2 {
            fail("G1⇒E2", "G1 true but E2 false".into());
        }
        if g2 && !e1 {
            fail("G2⇒E1", "G2 true but E1 false".into());
        }
        if (e1 || e2) != (g0 || g1 || g2) {
            fail(
                "(E1∨E2)⇔(G0∨G1∨G2)",
                format!("lhs={}, rhs={}", e1 || e2, g0 || g1 || g2),
            );
        }
        if hc && !g0 {
            fail("HC⇒G0", "HC closure without G0".into());
        }
    }
    Ok(RelationReport {
        checked: pictures.len(),
        skipped_indeterminate: skipped,
        violations,
    })
}

/// Generate a consistent random picture: laminar random circles with
/// margins against degeneracy, indices subject to Fredholm arithmetic, a
/// resolvent unbounded region, and optional isolated eigenvalues in
/// resolvent cells. Deterministic per seed.
pub fn random_picture(seed: u64, budget: usize) -> Result<SpectralPicture> {
    let budget = budget.min(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = budget.max(1);
    let mut circles: Vec<Circle> = Vec::new();
    let margin_ok = |c: &Circle, existing: &[Circle]| -> bool {
        let clearance = |a: &Circle, b: &Circle| -> f64 {
            let d = (a.center - b.center).norm();
            let s = (d - (a.radius + b.radius)).abs();
            let m = (d - (a.radius - b.radius).abs()).abs();
            s.min(m)
        };
        if clearance(c, &Circle::unit()) < 0.05 {
            return false;
        }
        existing.iter().all(|e| {
            if clearance(c, e) < 0.05 {
                return false;
            }
            matches!(
                circle_relation(c, e),
                CircleRel::Nested { .. } | CircleRel::DisjointOutside
            )
        })
    };
    let mut attempts = 0;
    while circles.len() < target && attempts < 400 {
        attempts += 1;
        let center = c64(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let radius = if rng.random_range(0.0..1.0) < 0.15 {
            0.0
        } else {
            10f64.powf(rng.random_range(-0.8..0.55))
        };
        let cand = Circle::new(center, radius);
        if margin_ok(&cand, &circles) {
            circles.push(cand);
        }
    }
    if circles.is_empty() {
        circles.push(Circle::at_origin(2.0));
    }

    let arr = crate::geometry::Arrangement::build(&circles)?;
    let mut regions = Vec::with_capacity(arr.cells.len());
    for cell in &arr.cells {
        let unbounded = cell.outer.is_none();
        let (index, ker, coker) = if unbounded {
            (0i64, 0u64, 0u64)
        } else {
            let index = rng.random_range(-2i64..=2);
            let extra = rng.random_range(0u64..=1);
            let (ker, coker) = if index >= 0 {
                (index as u64 + extra, extra)
            } else {
                (extra, extra + (-index) as u64)
            };
            (index, ker, coker)
        };
        let in_spectrum = if unbounded {
            false
        } else {
            index != 0 || ker > 0 || coker > 0 || rng.random_range(0.0..1.0) < 0.25
        };
        regions.push(Region {
            outer: cell.outer.map(|i| arr.circles[i]),
            inner: cell.inner.iter().map(|&i| arr.circles[i]).collect(),
            representative: cell.representative,
            in_spectrum,
            semi_fredholm: true,
            index,
            dim_ker: Dim::Exact(ker),
            dim_coker: Dim::Exact(coker),
            min_index: Dim::Exact(ker.min(coker)),
        });
    }

    // Sprinkle isolated eigenvalues into resolvent cells.
    let mut sigma_zero = Vec::new();
    for (ci, cell) in arr.cells.iter().enumerate() {
        if regions[ci].in_spectrum || rng.random_range(0.0..1.0) > 0.3 {
            continue;
        }
        let rep = cell.representative;
        for _ in 0..10 {
            let jitter = c64(rng.random_range(-0.02..0.02), rng.random_range(-0.02..0.02));
            let p = rep + jitter;
            let off_curves = arr
                .circles
                .iter()
                .all(|c| c.boundary_distance(p).abs() > 1e-6);
            if off_curves && arr.locate(p).ok() == Some(ci) {
                sigma_zero.push(SigmaZeroPoint {
                    point: p,
                    multiplicity: rng.random_range(1..=3),
                });
                break;
            }
        }
    }

    let norm_bound = circles
        .iter()
        .map(|c| c.center.norm() + c.radius)
        .chain(sigma_zero.iter().map(|s| s.point.norm()))
        .fold(1.0f64, f64::max)
        + 0.5;

    Ok(SpectralPicture {
        essential_curves: arr.circles.clone(),
        regions,
        sigma_zero,
        sigma_zero_exact: true,
        norm_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{backward_shift, identity_on_nat};
    use crate::spectral::spectral_picture;

    #[test]
    fn five_b_is_interior() {
        let p = spectral_picture(&backward_shift(5.0)).unwrap();
        let v = classify(&p).unwrap();
        assert_eq!(v.e1.value, Truth::False);
        assert_eq!(v.e2.value, Truth::True);
        assert_eq!(v.f.value, Truth::True);
        assert_eq!(v.g0.value, Truth::True);
        assert_eq!(v.g1.value, Truth::False);
        assert_eq!(v.g2.value, Truth::False);
        assert_eq!(v.hc_closure.value, Truth::True);
        assert_eq!(v.in_closure_dc, Truth::True);
        // the F witness must sit on ∂𝔻 in a positive-index region
        match v.f.witness {
            Some(Witness::Point { at }) => {
                assert!((at.norm() - 1.0).abs() < 1e-12);
                assert!(p.locate(at).unwrap().index > 0);
            }
            other => panic!("expected a point witness, got {other:?}"),
        }
    }

    #[test]
    fn half_backward_all_false() {
        let p = spectral_picture(&backward_shift(0.5)).unwrap();
        let v = classify(&p).unwrap();
        for t in [v.e1.value, v.e2.value, v.f.value, v.g0.value, v.g1.value, v.g2.value] {
            assert_eq!(t, Truth::False);
        }
        assert_eq!(v.hc_closure.value, Truth::False); // σ_w ∪ ∂𝔻 disconnected
    }

    #[test]
    fn identity_touches_at_one_point() {
        let p = spectral_picture(&identity_on_nat()).unwrap();
        let v = classify(&p).unwrap();
        assert_eq!(v.e1.value, Truth::True);
        assert_eq!(v.e2.value, Truth::False);
        assert_eq!(v.f.value, Truth::False);
        assert_eq!(v.g0.value, Truth::True);
        assert_eq!(v.g1.value, Truth::False);
        assert_eq!(v.g2.value, Truth::True);
        assert_eq!(v.hc_closure.value, Truth::True);
    }

    #[test]
    fn unit_relation_for_crossing_circle() {
        // path-picture circle at t = 1/2 crosses ∂𝔻 twice
        let mut p = random_picture(0, 0).unwrap();
        p.essential_curves = vec![Circle::new(c64(2.5, 0.0), 2.5)];
        let arr = crate::geometry::Arrangement::build(&p.essential_curves).unwrap();
        p.regions = arr
            .cells
            .iter()
            .map(|cell| Region {
                outer: cell.outer.map(|i| arr.circles[i]),
                inner: cell.inner.iter().map(|&i| arr.circles[i]).collect(),
                representative: cell.representative,
                in_spectrum: cell.outer.is_some(),
                semi_fredholm: true,
                index: if cell.outer.is_some() { 1 } else { 0 },
                dim_ker: Dim::Exact(if cell.outer.is_some() { 1 } else { 0 }),
                dim_coker: Dim::Exact(0),
                min_index: Dim::Exact(0),
            })
            .collect();
        p.sigma_zero.clear();
        let rel = unit_circle_relation(&p).unwrap();
        assert!(rel.meets_essential);
        assert_eq!(rel.touch_points.len(), 2);
        assert_eq!(rel.arcs.len(), 2);
    }

    #[test]
    fn random_pictures_are_valid_and_relations_hold() {
        let mut pictures = Vec::new();
        for seed in 0..60 {
            let p = random_picture(seed, (seed % 9) as usize).unwrap();
            p.validate().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            pictures.push(p);
        }
        let report = relation_suite(&pictures).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn rotation_covariance_of_predicates() {
        let p = spectral_picture(&backward_shift(5.0)).unwrap();
        let v0 = classify(&p).unwrap();
        for theta in [0.3, 1.2, 2.9, 4.4] {
            let v = classify(&p.rotate(theta)).unwrap();
            assert_eq!(v.e1.value, v0.e1.value);
            assert_eq!(v.f.value, v0.f.value);
            assert_eq!(v.g0.value, v0.g0.value);
            assert_eq!(v.g2.value, v0.g2.value);
        }
    }

    #[test]
    fn adding_positive_region_on_unit_circle_turns_f_true() {
        // half-backward picture: all-false; overlay a positive-index disk
        // covering part of ∂𝔻.
        let p = spectral_picture(&backward_shift(0.5)).unwrap();
        assert_eq!(classify(&p).unwrap().f.value, Truth::False);
        let mut curves = p.essential_curves.clone();
        curves.push(Circle::new(c64(1.2, 0.0), 0.4));
        let arr = crate::geometry::Arrangement::build(&curves).unwrap();
        let regions = arr
            .cells
            .iter()
            .map(|cell| {
                let is_new_disk = cell
                    .outer
                    .map(|i| (arr.circles[i].center - c64(1.2, 0.0)).norm() < 1e-9)
                    .unwrap_or(false);
                let is_old_disk =
                    cell.outer.map(|i| arr.circles[i].radius == 0.5).unwrap_or(false);
                Region {
                    outer: cell.outer.map(|i| arr.circles[i]),
                    inner: cell.inner.iter().map(|&i| arr.circles[i]).collect(),
                    representative: cell.representative,
                    in_spectrum: is_new_disk || is_old_disk,
                    semi_fredholm: true,
                    index: i64::from(is_new_disk || is_old_disk),
                    dim_ker: Dim::Exact(u64::from(is_new_disk || is_old_disk)),
                    dim_coker: Dim::Exact(0),
                    min_index: Dim::Exact(0),
                }
            })
            .collect();
        let augmented = SpectralPicture {
            essential_curves: arr.circles.clone(),
            regions,
            sigma_zero: vec![],
            sigma_zero_exact: true,
            norm_bound: p.norm_bound.max(1.7),
        };
        assert_eq!(classify(&augmented).unwrap().f.value, Truth::True);
    }
}
