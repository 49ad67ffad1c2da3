//! The symbolic operator class and its exact action on sparse vectors.
//!
//! Supported shapes: weighted bilateral/unilateral shifts with
//! eventually-convergent weight rules, finite matrices, piecewise-constant
//! diagonals, complex scalings, scalar shifts `λI + T`, direct sums over
//! disjoint index ranges, and finite-rank perturbations. Every value is
//! immutable after construction and every operation is a pure function.
//!
//! Direct-sum blocks carry explicit index ranges in one global index line.
//! A block over `[a, +inf)` hosts its ℕ-domain summand ascending
//! (`j -> a + j`); a block over `(-inf, b]` hosts it descending
//! (`j -> b - j`), which is the order-canonical embedding for a
//! left-infinite range.


use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Hi, Interval, Lo};
use crate::numeric::{c64, complex_pair, is_finite_c, C64};
use crate::vector::SparseVector;
use crate::weights::{DiagonalRule, WeightRule};

/// Total rank accepted across nested finite-rank perturbations.
pub const RANK_BUDGET: usize = 16;

/// Shift direction in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `e_i -> w(i) e_{i+1}`
    Forward,
    /// `e_i -> w(i) e_{i-1}` (and `e_0 -> 0` on ℕ)
    Backward,
}

/// Dense complex matrix entries, JSON as nested `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix(pub Vec<Vec<C64>>);

impl CMatrix {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn frobenius(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter().map(|z| z.norm_sqr()))
            .sum::<f64>()
            .sqrt()
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let n = self.dim();
        let mut out = vec![vec![c64(0.0, 0.0); n]; n];
        for (i, row) in self.0.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                out[j][i] = z.conj();
            }
        }
        CMatrix(out)
    }
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<(f64, f64)>> = self
            .0
            .iter()
            .map(|row| row.iter().map(|z| (z.re, z.im)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <Vec<Vec<(f64, f64)>>>::deserialize(d)?;
        Ok(CMatrix(
            rows.into_iter()
                .map(|row| row.into_iter().map(|(re, im)| c64(re, im)).collect())
                .collect(),
        ))
    }
}

/// One block of a direct sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumBlock {
    pub range: Interval,
    pub op: Box<OperatorSpec>,
}

/// One rank-one term `c · u ⟨v, ·⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankOneTerm {
    pub u: SparseVector,
    pub v: SparseVector,
    #[serde(with = "complex_pair")]
    pub c: C64,
}

/// Symbolic description of a supported operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    BilateralShift {
        direction: Direction,
        weights: WeightRule,
    },
    UnilateralShift {
        direction: Direction,
        weights: WeightRule,
    },
    FiniteMatrix {
        entries: CMatrix,
    },
    Diagonal {
        entries: DiagonalRule,
    },
    Scale {
        #[serde(with = "complex_pair")]
        factor: C64,
        inner: Box<OperatorSpec>,
    },
    ScalarShift {
        #[serde(with = "complex_pair")]
        lambda: C64,
        inner: Box<OperatorSpec>,
    },
    DirectSum {
        blocks: Vec<SumBlock>,
    },
    FiniteRankPerturbation {
        inner: Box<OperatorSpec>,
        terms: Vec<RankOneTerm>,
    },
}

impl<'de> Deserialize<'de> for OperatorSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let mut value = serde_json::Value::deserialize(d)?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| D::Error::custom("operator spec must be a JSON object"))?;
        let kind = match obj.remove("kind") {
            Some(serde_json::Value::String(s)) => s,
            Some(_) => return Err(D::Error::custom("\"kind\" must be a string")),
            None => return Err(D::Error::custom("missing \"kind\" discriminator")),
        };
        let rest = serde_json::Value::Object(std::mem::take(obj));
        let fail = |e: serde_json::Error| D::Error::custom(format!("{kind}: {e}"));
        match kind.as_str() {
            "bilateral_shift" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    direction: Direction,
                    weights: WeightRule,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::BilateralShift { direction: r.direction, weights: r.weights })
            }
            "unilateral_shift" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    direction: Direction,
                    weights: WeightRule,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::UnilateralShift { direction: r.direction, weights: r.weights })
            }
            "finite_matrix" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    entries: CMatrix,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::FiniteMatrix { entries: r.entries })
            }
            "diagonal" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    entries: DiagonalRule,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::Diagonal { entries: r.entries })
            }
            "scale" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    #[serde(with = "complex_pair")]
                    factor: C64,
                    inner: Box<OperatorSpec>,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::Scale { factor: r.factor, inner: r.inner })
            }
            "scalar_shift" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    #[serde(with = "complex_pair")]
                    lambda: C64,
                    inner: Box<OperatorSpec>,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::ScalarShift { lambda: r.lambda, inner: r.inner })
            }
            "direct_sum" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    blocks: Vec<SumBlock>,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::DirectSum { blocks: r.blocks })
            }
            "finite_rank_perturbation" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct R {
                    inner: Box<OperatorSpec>,
                    terms: Vec<RankOneTerm>,
                }
                let r: R = serde_json::from_value(rest).map_err(fail)?;
                Ok(OperatorSpec::FiniteRankPerturbation { inner: r.inner, terms: r.terms })
            }
            other => Err(D::Error::custom(format!("unknown operator kind {other:?}"))),
        }
    }
}

impl OperatorSpec {
    /// Parse, canonicalize and validate a spec document.
    pub fn parse_json(text: &str) -> Result<OperatorSpec> {
        let mut spec: OperatorSpec = serde_json::from_str(text)?;
        spec.canonicalize();
        spec.validate()?;
        Ok(spec)
    }

    /// Deterministic JSON rendering of the canonical form.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("operator serialization cannot fail")
    }

    /// Sort zones and blocks so equal specs render identically.
    pub fn canonicalize(&mut self) {
        match self {
            OperatorSpec::BilateralShift { weights, .. }
            | OperatorSpec::UnilateralShift { weights, .. } => {
                weights.zones.sort_by_key(|z| z.interval.lo);
            }
            OperatorSpec::Diagonal { entries } => {
                entries.zones.sort_by_key(|(iv, _)| iv.lo);
            }
            OperatorSpec::Scale { inner, .. } | OperatorSpec::ScalarShift { inner, .. } => {
                inner.canonicalize();
            }
            OperatorSpec::DirectSum { blocks } => {
                blocks.sort_by_key(|b| b.range.lo);
                for b in blocks {
                    b.op.canonicalize();
                }
            }
            OperatorSpec::FiniteRankPerturbation { inner, .. } => inner.canonicalize(),
            OperatorSpec::FiniteMatrix { .. } => {}
        }
    }

    /// The global index interval the operator acts on.
    pub fn domain(&self) -> Interval {
        match self {
            OperatorSpec::BilateralShift { .. } => Interval::all(),
            OperatorSpec::UnilateralShift { .. } | OperatorSpec::Diagonal { .. } => Interval::nat(),
            OperatorSpec::FiniteMatrix { entries } => {
                Interval::finite(0, entries.dim().max(1) as i64 - 1).expect("nonempty matrix")
            }
            OperatorSpec::Scale { inner, .. } | OperatorSpec::ScalarShift { inner, .. } => {
                inner.domain()
            }
            OperatorSpec::DirectSum { blocks } => {
                let lo = blocks.iter().map(|b| b.range.lo).min().unwrap_or(Lo::At(0));
                let hi = blocks.iter().map(|b| b.range.hi).max().unwrap_or(Hi::At(0));
                Interval { lo, hi }
            }
            OperatorSpec::FiniteRankPerturbation { inner, .. } => inner.domain(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::BilateralShift { weights, .. } => weights.validate(&Interval::all()),
            OperatorSpec::UnilateralShift { weights, .. } => weights.validate(&Interval::nat()),
            OperatorSpec::FiniteMatrix { entries } => {
                let n = entries.dim();
                if n == 0 {
                    return Err(Error::invalid("matrix must be at least 1x1"));
                }
                for row in &entries.0 {
                    if row.len() != n {
                        return Err(Error::invalid("matrix must be square"));
                    }
                    for z in row {
                        if !is_finite_c(*z) {
                            return Err(Error::invalid("matrix entries must be finite"));
                        }
                    }
                }
                Ok(())
            }
            OperatorSpec::Diagonal { entries } => entries.validate(),
            OperatorSpec::Scale { factor, inner } => {
                if !is_finite_c(*factor) {
                    return Err(Error::invalid("scale factor must be finite"));
                }
                inner.validate()
            }
            OperatorSpec::ScalarShift { lambda, inner } => {
                if !is_finite_c(*lambda) {
                    return Err(Error::invalid("scalar shift must be finite"));
                }
                inner.validate()
            }
            OperatorSpec::DirectSum { blocks } => self.validate_direct_sum(blocks),
            OperatorSpec::FiniteRankPerturbation { inner, terms } => {
                inner.validate()?;
                if self.perturbation_rank() > RANK_BUDGET {
                    return Err(Error::unsupported(format!(
                        "perturbation rank beyond budget {RANK_BUDGET}"
                    )));
                }
                let dom = inner.domain();
                for t in terms {
                    if t.u.is_zero() || t.v.is_zero() || t.c == c64(0.0, 0.0) {
                        return Err(Error::invalid("perturbation terms must be nonzero"));
                    }
                    for (i, _) in t.u.iter().chain(t.v.iter()) {
                        if !dom.contains(i) {
                            return Err(Error::invalid(format!(
                                "perturbation vector index {i} outside the operator domain"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn validate_direct_sum(&self, blocks: &[SumBlock]) -> Result<()> {
        if blocks.is_empty() {
            return Err(Error::invalid("direct sum needs at least one block"));
        }
        let hull = self.domain();
        let ranges: Vec<Interval> = blocks.iter().map(|b| b.range).collect();
        hull.covered_by(&ranges)?;
        for b in blocks {
            b.op.validate()?;
            match &*b.op {
                OperatorSpec::DirectSum { .. } => {
                    return Err(Error::unsupported("nested direct sums"));
                }
                OperatorSpec::BilateralShift { .. } => {
                    return Err(Error::unsupported(
                        "bilateral summands inside a direct sum; use half-line blocks",
                    ));
                }
                _ => {}
            }
            let inner_dom = b.op.domain();
            match (b.range.is_bounded(), inner_dom.is_bounded()) {
                (true, true) => {
                    if b.range.len() != inner_dom.len() {
                        return Err(Error::invalid(format!(
                            "block range {:?}..{:?} does not match summand dimension",
                            b.range.lo, b.range.hi
                        )));
                    }
                }
                (false, false) => {
                    if inner_dom != Interval::nat() {
                        return Err(Error::invalid("unbounded blocks must host ℕ-domain summands"));
                    }
                }
                _ => {
                    return Err(Error::invalid(
                        "block range and summand domain must both be finite or both infinite",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Total rank of the (possibly nested) finite-rank part.
    pub fn perturbation_rank(&self) -> usize {
        match self {
            OperatorSpec::FiniteRankPerturbation { inner, terms } => {
                terms.len() + inner.perturbation_rank()
            }
            OperatorSpec::Scale { inner, .. } | OperatorSpec::ScalarShift { inner, .. } => {
                inner.perturbation_rank()
            }
            OperatorSpec::DirectSum { blocks } => {
                blocks.iter().map(|b| b.op.perturbation_rank()).sum()
            }
            _ => 0,
        }
    }

    /// Exact image of a finitely supported vector.
    pub fn apply(&self, v: &SparseVector) -> Result<SparseVector> {
        let mut out = SparseVector::zero();
        match self {
            OperatorSpec::BilateralShift { direction, weights } => {
                for (i, z) in v.iter() {
                    let w = weights.weight(i);
                    match direction {
                        Direction::Forward => out.add_to(i + 1, z * w),
                        Direction::Backward => out.add_to(i - 1, z * w),
                    }
                }
            }
            OperatorSpec::UnilateralShift { direction, weights } => {
                for (i, z) in v.iter() {
                    if i < 0 {
                        return Err(Error::domain(format!("index {i} outside ℕ")));
                    }
                    match direction {
                        Direction::Forward => out.add_to(i + 1, z * weights.weight(i)),
                        Direction::Backward => {
                            if i > 0 {
                                out.add_to(i - 1, z * weights.weight(i));
                            }
                        }
                    }
                }
            }
            OperatorSpec::FiniteMatrix { entries } => {
                let n = entries.dim() as i64;
                for (j, z) in v.iter() {
                    if j < 0 || j >= n {
                        return Err(Error::domain(format!("index {j} outside matrix block")));
                    }
                    for i in 0..n {
                        let m = entries.0[i as usize][j as usize];
                        if m != c64(0.0, 0.0) {
                            out.add_to(i, m * z);
                        }
                    }
                }
            }
            OperatorSpec::Diagonal { entries } => {
                for (i, z) in v.iter() {
                    if i < 0 {
                        return Err(Error::domain(format!("index {i} outside ℕ")));
                    }
                    out.add_to(i, entries.entry(i) * z);
                }
            }
            OperatorSpec::Scale { factor, inner } => {
                out = inner.apply(v)?.scale(*factor);
            }
            OperatorSpec::ScalarShift { lambda, inner } => {
                out = inner.apply(v)?.add(&v.scale(*lambda));
            }
            OperatorSpec::DirectSum { blocks } => {
                for b in blocks {
                    let mut local = SparseVector::zero();
                    for (i, z) in v.iter() {
                        if b.range.contains(i) {
                            local.set(global_to_local(&b.range, i), z);
                        }
                    }
                    if local.is_zero() {
                        continue;
                    }
                    let image = b.op.apply(&local)?;
                    for (j, z) in image.iter() {
                        out.add_to(local_to_global(&b.range, j), z);
                    }
                }
                // Entries outside every block are a domain violation.
                for (i, _) in v.iter() {
                    if !blocks.iter().any(|b| b.range.contains(i)) {
                        return Err(Error::domain(format!("index {i} outside all blocks")));
                    }
                }
            }
            OperatorSpec::FiniteRankPerturbation { inner, terms } => {
                out = inner.apply(v)?;
                for t in terms {
                    let coeff = t.c * t.v.inner(v);
                    if coeff != c64(0.0, 0.0) {
                        out = out.add(&t.u.scale(coeff));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `op^k v` by iterated application.
    pub fn apply_power(&self, v: &SparseVector, k: u32) -> Result<SparseVector> {
        let mut cur = v.clone();
        for _ in 0..k {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// The Hilbert-space adjoint, as another spec of the same class.
    pub fn adjoint(&self) -> OperatorSpec {
        match self {
            OperatorSpec::BilateralShift { direction, weights } => match direction {
                Direction::Forward => OperatorSpec::BilateralShift {
                    direction: Direction::Backward,
                    weights: weights.translate_into(1, &Interval::all()),
                },
                Direction::Backward => OperatorSpec::BilateralShift {
                    direction: Direction::Forward,
                    weights: weights.translate_into(-1, &Interval::all()),
                },
            },
            OperatorSpec::UnilateralShift { direction, weights } => match direction {
                Direction::Forward => OperatorSpec::UnilateralShift {
                    direction: Direction::Backward,
                    weights: weights.translate_into(1, &Interval::nat()),
                },
                Direction::Backward => OperatorSpec::UnilateralShift {
                    direction: Direction::Forward,
                    weights: weights.translate_into(-1, &Interval::nat()),
                },
            },
            OperatorSpec::FiniteMatrix { entries } => OperatorSpec::FiniteMatrix {
                entries: entries.conj_transpose(),
            },
            OperatorSpec::Diagonal { entries } => {
                let zones = entries.zones.iter().map(|(iv, v)| (*iv, v.conj())).collect();
                let exceptions = entries.exceptions.iter().map(|(&i, v)| (i, v.conj())).collect();
                OperatorSpec::Diagonal { entries: DiagonalRule { zones, exceptions } }
            }
            OperatorSpec::Scale { factor, inner } => OperatorSpec::Scale {
                factor: factor.conj(),
                inner: Box::new(inner.adjoint()),
            },
            OperatorSpec::ScalarShift { lambda, inner } => OperatorSpec::ScalarShift {
                lambda: lambda.conj(),
                inner: Box::new(inner.adjoint()),
            },
            OperatorSpec::DirectSum { blocks } => OperatorSpec::DirectSum {
                blocks: blocks
                    .iter()
                    .map(|b| SumBlock { range: b.range, op: Box::new(b.op.adjoint()) })
                    .collect(),
            },
            OperatorSpec::FiniteRankPerturbation { inner, terms } => {
                OperatorSpec::FiniteRankPerturbation {
                    inner: Box::new(inner.adjoint()),
                    terms: terms
                        .iter()
                        .map(|t| RankOneTerm { u: t.v.clone(), v: t.u.clone(), c: t.c.conj() })
                        .collect(),
                }
            }
        }
    }

    /// Computable upper bound for the operator norm.
    pub fn norm_bound(&self) -> f64 {
        match self {
            OperatorSpec::BilateralShift { weights, .. } => weights.sup_bound(&Interval::all()),
            OperatorSpec::UnilateralShift { weights, .. } => weights.sup_bound(&Interval::nat()),
            OperatorSpec::FiniteMatrix { entries } => entries.frobenius(),
            OperatorSpec::Diagonal { entries } => entries.sup_bound(),
            OperatorSpec::Scale { factor, inner } => factor.norm() * inner.norm_bound(),
            OperatorSpec::ScalarShift { lambda, inner } => lambda.norm() + inner.norm_bound(),
            OperatorSpec::DirectSum { blocks } => blocks
                .iter()
                .map(|b| b.op.norm_bound())
                .fold(0.0, f64::max),
            OperatorSpec::FiniteRankPerturbation { inner, terms } => {
                inner.norm_bound()
                    + terms
                        .iter()
                        .map(|t| t.c.norm() * t.u.norm() * t.v.norm())
                        .sum::<f64>()
            }
        }
    }
}

/// Map a global index into a block's local coordinates.
pub fn global_to_local(range: &Interval, i: i64) -> i64 {
    match (range.lo, range.hi) {
        (Lo::At(a), _) => i - a,
        (Lo::NegInf, Hi::At(b)) => b - i,
        (Lo::NegInf, Hi::PosInf) => i,
    }
}

/// Inverse of [`global_to_local`].
pub fn local_to_global(range: &Interval, j: i64) -> i64 {
    match (range.lo, range.hi) {
        (Lo::At(a), _) => a + j,
        (Lo::NegInf, Hi::At(b)) => b - j,
        (Lo::NegInf, Hi::PosInf) => j,
    }
}

/// Convenience: a weighted backward unilateral shift with constant weight.
pub fn backward_shift(weight: f64) -> OperatorSpec {
    OperatorSpec::UnilateralShift {
        direction: Direction::Backward,
        weights: WeightRule::constant_on(weight, Interval::nat()),
    }
}

/// Convenience: the identity on ℓ²(ℕ), written as `1·I + 0`.
pub fn identity_on_nat() -> OperatorSpec {
    OperatorSpec::ScalarShift {
        lambda: c64(1.0, 0.0),
        inner: Box::new(OperatorSpec::Diagonal {
            entries: DiagonalRule::constant(c64(0.0, 0.0)),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn annulus_op() -> OperatorSpec {
        // forward bilateral, w = 1/2 for i <= -2, w = 2 for i > -2
        OperatorSpec::BilateralShift {
            direction: Direction::Forward,
            weights: WeightRule {
                zones: vec![
                    crate::weights::Zone {
                        interval: Interval::neg_inf_to(-2),
                        formula: crate::weights::Formula::Const(0.5),
                    },
                    crate::weights::Zone {
                        interval: Interval::from_to_inf(-1),
                        formula: crate::weights::Formula::Const(2.0),
                    },
                ],
                exceptions: BTreeMap::new(),
            },
        }
    }

    fn kernel_shift() -> OperatorSpec {
        // backward bilateral, weight 2 everywhere except e_0 -> 0
        let mut weights = WeightRule::constant(2.0);
        weights.exceptions.insert(0, 0.0);
        OperatorSpec::BilateralShift { direction: Direction::Backward, weights }
    }

    #[test]
    fn annulus_action_on_basis() {
        let op = annulus_op();
        let img = op.apply(&SparseVector::basis(-2)).unwrap();
        assert_eq!(img, SparseVector::basis(-1).scale(c64(0.5, 0.0)));
        let img = op.apply(&SparseVector::basis(-1)).unwrap();
        assert_eq!(img, SparseVector::basis(0).scale(c64(2.0, 0.0)));
    }

    #[test]
    fn kernel_vector_annihilated() {
        let op = kernel_shift();
        let img = op.apply(&SparseVector::basis(0)).unwrap();
        assert!(img.is_zero());
        let img = op.apply(&SparseVector::basis(-1)).unwrap();
        assert_eq!(img, SparseVector::basis(-2).scale(c64(2.0, 0.0)));
    }

    #[test]
    fn identity_acts_trivially() {
        let id = identity_on_nat();
        let v = SparseVector::from_entries([(0, c64(1.0, 2.0)), (5, c64(-3.0, 0.0))]).unwrap();
        assert_eq!(id.apply(&v).unwrap(), v);
        assert_eq!(id.apply_power(&v, 7).unwrap(), v);
    }

    #[test]
    fn adjoint_inner_product_identity() {
        let ops = [annulus_op(), kernel_shift(), backward_shift(2.0)];
        for op in &ops {
            let adj = op.adjoint();
            let dom = op.domain();
            for i in -5..=5i64 {
                for j in -5..=5i64 {
                    if !dom.contains(i) || !dom.contains(j) {
                        continue;
                    }
                    let x = SparseVector::basis(i);
                    let y = SparseVector::basis(j);
                    // ⟨Tx, y⟩ = ⟨x, T*y⟩ with the conjugation on the left slot
                    let lhs = op.apply(&x).unwrap().inner(&y);
                    let rhs = x.inner(&adj.apply(&y).unwrap());
                    assert!(
                        (lhs - rhs).norm() < 1e-12,
                        "adjoint identity failed at ({i},{j}): {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn adjoint_of_scaled_backward_is_scaled_forward() {
        let op = OperatorSpec::Scale {
            factor: c64(2.0, 0.0),
            inner: Box::new(backward_shift(1.0)),
        };
        let adj = op.adjoint();
        // 2·forward: e_0 -> 2 e_1
        let img = adj.apply(&SparseVector::basis(0)).unwrap();
        assert_eq!(img, SparseVector::basis(1).scale(c64(2.0, 0.0)));
    }

    #[test]
    fn direct_sum_descending_block() {
        // Block over (-inf, -1] hosting a backward unilateral shift with
        // weight 5: globally e_{-1} -> 0 and e_i -> 5 e_{i+1} for i <= -2.
        let sum = OperatorSpec::DirectSum {
            blocks: vec![
                SumBlock {
                    range: Interval::neg_inf_to(-1),
                    op: Box::new(backward_shift(5.0)),
                },
                SumBlock {
                    range: Interval::nat(),
                    op: Box::new(backward_shift(5.0)),
                },
            ],
        };
        sum.validate().unwrap();
        assert!(sum.apply(&SparseVector::basis(-1)).unwrap().is_zero());
        let img = sum.apply(&SparseVector::basis(-2)).unwrap();
        assert_eq!(img, SparseVector::basis(-1).scale(c64(5.0, 0.0)));
        let img = sum.apply(&SparseVector::basis(3)).unwrap();
        assert_eq!(img, SparseVector::basis(2).scale(c64(5.0, 0.0)));
    }

    #[test]
    fn parse_rejects_unknown_fields_and_overlaps() {
        let bad = r#"{"kind":"unilateral_shift","direction":"backward","weights":{"zones":[{"from":0,"to":"+inf","formula":{"const":2.0}}]},"extra":1}"#;
        assert!(OperatorSpec::parse_json(bad).is_err());

        let overlap = r#"{"kind":"bilateral_shift","direction":"forward","weights":{"zones":[
            {"from":"-inf","to":0,"formula":{"const":1.0}},
            {"from":0,"to":"+inf","formula":{"const":2.0}}]}}"#;
        assert!(OperatorSpec::parse_json(overlap).is_err());
    }

    #[test]
    fn canonical_json_roundtrip_is_byte_identical() {
        let op = annulus_op();
        let text = op.to_canonical_json();
        let reparsed = OperatorSpec::parse_json(&text).unwrap();
        assert_eq!(reparsed.to_canonical_json(), text);
    }

    #[test]
    fn linearity_on_random_vectors() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let op = annulus_op();
        for _ in 0..50 {
            let mut x = SparseVector::zero();
            let mut y = SparseVector::zero();
            for _ in 0..8 {
                let i = rng.random_range(-20..20);
                x.add_to(i, c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
                let j = rng.random_range(-20..20);
                y.add_to(j, c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            }
            let a = c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let b = c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let lhs = op.apply(&x.scale(a).add(&y.scale(b))).unwrap();
            let rhs = op.apply(&x).unwrap().scale(a).add(&op.apply(&y).unwrap().scale(b));
            let diff = lhs.sub(&rhs).norm();
            assert!(diff <= 1e-12, "linearity violated by {diff}");
        }
    }

    #[test]
    fn norm_bound_dominates_action() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let ops = [annulus_op(), kernel_shift(), backward_shift(0.5)];
        for op in &ops {
            let bound = op.norm_bound();
            let dom = op.domain();
            for _ in 0..30 {
                let mut x = SparseVector::zero();
                for _ in 0..6 {
                    let i = rng.random_range(-15..15);
                    if dom.contains(i) {
                        x.add_to(i, c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
                    }
                }
                let img = op.apply(&x).unwrap();
                assert!(img.norm() <= bound * x.norm() + 1e-12);
            }
        }
    }
}
