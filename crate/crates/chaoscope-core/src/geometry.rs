//! Exact circle geometry: pairwise relations, laminar arrangements and
//! unit-circle incidence.
//!
//! All comparisons run on squared distances. A configuration within
//! tolerance of a degenerate one (tangency, coincidence) but not bit-exact
//! is reported as *ambiguous*: the class carries exact dyadic data, so
//! bit-exact degeneracies are trusted as real while near-degeneracies are
//! flagged rather than tie-broken.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{c64, complex_pair, C64};

/// Squared-quantity comparison tolerance (relative, floored at 1).
pub const SQ_TOL: f64 = 1e-12;

/// A circle in ℂ; radius 0 encodes a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    #[serde(with = "complex_pair")]
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Circle {
        Circle { center, radius }
    }

    pub fn at_origin(radius: f64) -> Circle {
        Circle { center: c64(0.0, 0.0), radius }
    }

    pub fn unit() -> Circle {
        Circle::at_origin(1.0)
    }

    pub fn point(p: C64) -> Circle {
        Circle { center: p, radius: 0.0 }
    }

    pub fn is_point(&self) -> bool {
        self.radius == 0.0
    }

    /// Signed distance of `p` from the circle line (negative inside).
    pub fn boundary_distance(&self, p: C64) -> f64 {
        (p - self.center).norm() - self.radius
    }

    pub fn strictly_contains(&self, p: C64) -> bool {
        (p - self.center).norm_sqr() < self.radius * self.radius
    }

    /// Canonical ordering key.
    pub fn sort_key(&self) -> (f64, f64, f64) {
        (self.center.re, self.center.im, self.radius)
    }
}

fn tol_for(scale: f64) -> f64 {
    SQ_TOL * scale.max(1.0)
}

/// Pairwise relation of two circles. `exact` distinguishes bit-exact
/// degeneracies from within-tolerance ambiguity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleRel {
    /// Same curve.
    Equal { exact: bool },
    /// Closed disks disjoint.
    DisjointOutside,
    /// Touching at one point from outside.
    ExternallyTangent { exact: bool },
    /// Touching at one point, one inside the other.
    InternallyTangent { exact: bool },
    /// One strictly inside the other; `first_inside` tells which.
    Nested { first_inside: bool },
    /// Transversal crossing at two points.
    Crossing,
}

impl CircleRel {
    pub fn is_tangent(&self) -> bool {
        matches!(
            self,
            CircleRel::ExternallyTangent { .. } | CircleRel::InternallyTangent { .. }
        )
    }

    pub fn is_ambiguous(&self) -> bool {
        matches!(
            self,
            CircleRel::Equal { exact: false }
                | CircleRel::ExternallyTangent { exact: false }
                | CircleRel::InternallyTangent { exact: false }
        )
    }
}

/// Classify the relation of two circles by squared distances.
pub fn circle_relation(a: &Circle, b: &Circle) -> CircleRel {
    let d2 = (a.center - b.center).norm_sqr();
    let rsum = a.radius + b.radius;
    let rdiff = a.radius - b.radius;
    let s2 = rsum * rsum;
    let m2 = rdiff * rdiff;
    let tol = tol_for(d2.max(s2));

    if d2 <= tol && (a.radius - b.radius).abs().powi(2) <= tol {
        let exact = d2 == 0.0 && a.radius == b.radius;
        return CircleRel::Equal { exact };
    }
    if (d2 - s2).abs() <= tol {
        // Radius-0 against a circle lands here when the point sits on the
        // curve: s2 == m2 and touching is the right reading.
        return CircleRel::ExternallyTangent { exact: d2 == s2 };
    }
    if d2 > s2 {
        return CircleRel::DisjointOutside;
    }
    if (d2 - m2).abs() <= tol {
        return CircleRel::InternallyTangent { exact: d2 == m2 };
    }
    if d2 < m2 {
        return CircleRel::Nested { first_inside: a.radius < b.radius };
    }
    CircleRel::Crossing
}

/// Angles (on `other`, measured from its center) where `c` crosses it.
/// Only meaningful for `Crossing`.
pub fn crossing_angles_on(other: &Circle, c: &Circle) -> Vec<f64> {
    let delta = c.center - other.center;
    let d2 = delta.norm_sqr();
    if d2 == 0.0 {
        return vec![];
    }
    let d = d2.sqrt();
    let r0 = other.radius;
    let r1 = c.radius;
    // Distance from other.center to the chord along the center line.
    let a = (d2 + r0 * r0 - r1 * r1) / (2.0 * d);
    let h2 = r0 * r0 - a * a;
    if h2 <= 0.0 {
        return vec![];
    }
    let h = h2.sqrt();
    let base = delta / d;
    let perp = c64(-base.im, base.re);
    let p1 = other.center + base * a + perp * h;
    let p2 = other.center + base * a - perp * h;
    let mut angles = vec![
        (p1 - other.center).arg(),
        (p2 - other.center).arg(),
    ];
    angles.sort_by(f64::total_cmp);
    angles
}

/// Identifier of a cell in a laminar arrangement.
pub type CellId = usize;

/// One connected component of `ℂ` minus the curves.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Index of the bounding outer circle; `None` for the unbounded cell.
    pub outer: Option<usize>,
    /// Circles bounding the cell from inside (children of `outer`).
    pub inner: Vec<usize>,
    /// A deterministic interior sample point.
    pub representative: C64,
}

/// A laminar family of circles with its cell decomposition.
#[derive(Debug, Clone)]
pub struct Arrangement {
    pub circles: Vec<Circle>,
    pub parent: Vec<Option<usize>>,
    pub cells: Vec<Cell>,
}

impl Arrangement {
    /// Build from raw circles. Near-identical circles merge; transversally
    /// crossing circles are rejected (the supported operator class only
    /// produces concentric, nested, disjoint or tangent essential curves).
    pub fn build(raw: &[Circle]) -> Result<Arrangement> {
        Self::build_avoiding(raw, &[])
    }

    /// Like [`Arrangement::build`], but cell representatives additionally
    /// keep clear of the given isolated points.
    pub fn build_avoiding(raw: &[Circle], avoid: &[C64]) -> Result<Arrangement> {
        let mut circles: Vec<Circle> = Vec::new();
        for c in raw {
            if !c.center.re.is_finite() || !c.center.im.is_finite() || !c.radius.is_finite() {
                return Err(Error::invalid("non-finite circle"));
            }
            if c.radius < 0.0 {
                return Err(Error::invalid("negative radius"));
            }
            let dup = circles
                .iter()
                .any(|e| matches!(circle_relation(e, c), CircleRel::Equal { .. }));
            if !dup {
                circles.push(*c);
            }
        }
        circles.sort_by(|a, b| {
            a.sort_key().0.total_cmp(&b.sort_key().0)
                .then(a.sort_key().1.total_cmp(&b.sort_key().1))
                .then(a.sort_key().2.total_cmp(&b.sort_key().2))
        });

        for i in 0..circles.len() {
            for j in (i + 1)..circles.len() {
                if circle_relation(&circles[i], &circles[j]) == CircleRel::Crossing {
                    return Err(Error::unsupported(format!(
                        "essential curves cross transversally: {:?} and {:?}",
                        circles[i], circles[j]
                    )));
                }
            }
        }

        // Parent = smallest circle properly containing this one.
        let mut parent: Vec<Option<usize>> = vec![None; circles.len()];
        for i in 0..circles.len() {
            let mut best: Option<usize> = None;
            for j in 0..circles.len() {
                if i == j {
                    continue;
                }
                let inside = match circle_relation(&circles[i], &circles[j]) {
                    CircleRel::Nested { first_inside } => first_inside,
                    CircleRel::InternallyTangent { .. } => circles[i].radius < circles[j].radius,
                    _ => false,
                };
                if inside {
                    best = match best {
                        None => Some(j),
                        Some(k) if circles[j].radius < circles[k].radius => Some(j),
                        keep => keep,
                    };
                }
            }
            parent[i] = best;
        }

        let children = |i: usize| -> Vec<usize> {
            (0..circles.len()).filter(|&k| parent[k] == Some(i)).collect()
        };

        let mut cells = Vec::new();
        // Unbounded cell first: outside all roots and all avoided points.
        let roots: Vec<usize> = (0..circles.len()).filter(|&i| parent[i].is_none()).collect();
        let far = circles
            .iter()
            .map(|c| c.center.norm() + c.radius)
            .chain(avoid.iter().map(|p| p.norm()))
            .fold(0.0, f64::max);
        cells.push(Cell {
            outer: None,
            inner: roots.clone(),
            representative: c64(far + 1.0, 0.0),
        });
        for i in 0..circles.len() {
            if circles[i].is_point() {
                continue; // a point bounds no cell of its own
            }
            let inner = children(i);
            let rep = cell_representative(&circles, i, &inner, avoid)?;
            cells.push(Cell { outer: Some(i), inner, representative: rep });
        }
        Ok(Arrangement { circles, parent, cells })
    }

    /// The cell containing `p`; fails when `p` sits on (or within tolerance
    /// of) a curve.
    pub fn locate(&self, p: C64) -> Result<CellId> {
        let mut innermost: Option<usize> = None;
        for (i, c) in self.circles.iter().enumerate() {
            let d2 = (p - c.center).norm_sqr();
            let r2 = c.radius * c.radius;
            if (d2 - r2).abs() <= tol_for(d2.max(r2)) {
                return Err(Error::BoundaryPoint(format!("{p} lies on an essential curve")));
            }
            if d2 < r2 {
                innermost = match innermost {
                    None => Some(i),
                    Some(k) if c.radius < self.circles[k].radius => Some(i),
                    keep => keep,
                };
            }
        }
        match innermost {
            None => Ok(0),
            Some(i) => self
                .cells
                .iter()
                .position(|cell| cell.outer == Some(i))
                .ok_or_else(|| Error::invalid("arrangement cell missing")),
        }
    }
}

/// Deterministic interior point of the cell bounded by `circles[outer]`
/// minus its children.
fn cell_representative(
    circles: &[Circle],
    outer: usize,
    inner: &[usize],
    avoid: &[C64],
) -> Result<C64> {
    let oc = circles[outer];
    let margin = 1e-7 * oc.radius.max(1.0);
    let ok = |p: C64| -> bool {
        if (p - oc.center).norm() >= oc.radius - margin {
            return false;
        }
        if avoid.iter().any(|&q| (p - q).norm() <= margin) {
            return false;
        }
        inner.iter().all(|&k| {
            let c = circles[k];
            (p - c.center).norm() >= c.radius + margin
        })
    };
    if ok(oc.center) {
        return Ok(oc.center);
    }
    // Scan rays and radii deterministically, radii in binary-subdivision
    // order so well-centred candidates come first (a representative hugging
    // a boundary circle would slow every truncation-based cross-check).
    let mut radius_order: Vec<u32> = Vec::with_capacity(255);
    let mut step = 128u32;
    while step >= 1 {
        let mut n = step;
        while n < 256 {
            if !radius_order.contains(&n) {
                radius_order.push(n);
            }
            n += step;
        }
        step /= 2;
    }
    for dir in 0..64 {
        let theta = dir as f64 * std::f64::consts::TAU / 64.0;
        let u = c64(theta.cos(), theta.sin());
        for &num in &radius_order {
            let rho = oc.radius * num as f64 / 256.0;
            let p = oc.center + u * rho;
            if ok(p) {
                return Ok(p);
            }
        }
    }
    Err(Error::unsupported(
        "could not place a representative point inside a spectral cell",
    ))
}

/// Sampled Hausdorff distance between two unions of circles.
pub fn union_hausdorff(a: &[Circle], b: &[Circle], samples: usize) -> f64 {
    let one_way = |from: &[Circle], to: &[Circle]| -> f64 {
        let mut worst = 0.0f64;
        for c in from {
            for k in 0..samples.max(1) {
                let theta = k as f64 * std::f64::consts::TAU / samples.max(1) as f64;
                let p = c.center + c64(theta.cos(), theta.sin()) * c.radius;
                let d = to
                    .iter()
                    .map(|t| t.boundary_distance(p).abs())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_cover_the_configurations() {
        let unit = Circle::unit();
        assert_eq!(
            circle_relation(&unit, &Circle::at_origin(2.0)),
            CircleRel::Nested { first_inside: true }
        );
        assert_eq!(
            circle_relation(&Circle::new(c64(5.0, 0.0), 1.0), &unit),
            CircleRel::DisjointOutside
        );
        assert_eq!(
            circle_relation(&Circle::new(c64(3.0, 0.0), 2.0), &unit),
            CircleRel::ExternallyTangent { exact: true }
        );
        assert_eq!(
            circle_relation(&Circle::new(c64(2.0, 0.0), 3.0), &unit),
            CircleRel::InternallyTangent { exact: true }
        );
        assert_eq!(
            circle_relation(&Circle::new(c64(2.5, 0.0), 2.5), &unit),
            CircleRel::Crossing
        );
        assert_eq!(circle_relation(&unit, &unit), CircleRel::Equal { exact: true });
    }

    #[test]
    fn near_tangency_is_ambiguous() {
        let c = Circle::new(c64(3.0 + 1e-14, 0.0), 2.0);
        match circle_relation(&c, &Circle::unit()) {
            CircleRel::ExternallyTangent { exact } => assert!(!exact),
            other => panic!("expected ambiguous tangency, got {other:?}"),
        }
    }

    #[test]
    fn point_on_circle_reads_as_touching() {
        let p = Circle::point(c64(1.0, 0.0));
        assert_eq!(
            circle_relation(&p, &Circle::unit()),
            CircleRel::ExternallyTangent { exact: true }
        );
    }

    #[test]
    fn crossing_points_lie_on_both_circles() {
        let a = Circle::new(c64(2.5, 0.0), 2.5);
        let u = Circle::unit();
        let angles = crossing_angles_on(&u, &a);
        assert_eq!(angles.len(), 2);
        for t in angles {
            let p = c64(t.cos(), t.sin());
            assert!(a.boundary_distance(p).abs() < 1e-9);
            assert!(u.boundary_distance(p).abs() < 1e-12);
        }
    }

    #[test]
    fn concentric_arrangement_cells() {
        let arr = Arrangement::build(&[Circle::at_origin(2.0), Circle::at_origin(0.5)]).unwrap();
        assert_eq!(arr.cells.len(), 3); // exterior, annulus, inner disk
        let annulus = arr.locate(c64(1.0, 0.0)).unwrap();
        let disk = arr.locate(c64(0.1, 0.0)).unwrap();
        let outside = arr.locate(c64(3.0, 0.0)).unwrap();
        assert_ne!(annulus, disk);
        assert_eq!(outside, 0);
        assert!(arr.locate(c64(2.0, 0.0)).is_err()); // on a curve
    }

    #[test]
    fn tangent_disks_make_three_cells() {
        // The two path disks at t = 1/2: externally tangent at the origin.
        let arr = Arrangement::build(&[
            Circle::new(c64(-2.5, 0.0), 2.5),
            Circle::new(c64(2.5, 0.0), 2.5),
        ])
        .unwrap();
        assert_eq!(arr.cells.len(), 3);
        assert_ne!(
            arr.locate(c64(-2.5, 0.0)).unwrap(),
            arr.locate(c64(2.5, 0.0)).unwrap()
        );
    }

    #[test]
    fn crossing_circles_rejected() {
        let r = Arrangement::build(&[
            Circle::unit(),
            Circle::new(c64(1.0, 0.0), 1.0),
        ]);
        assert!(r.is_err());
    }
}
