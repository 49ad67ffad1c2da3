//! Block normal form: zero-weight-free shift blocks plus diagonal and
//! finite blocks, each carrying its own affine part.
//!
//! `T = ⊕_k (offset_k·I + factor_k·core_k) + Σ rank-one terms`, where the
//! block ranges partition the operator domain. Splitting a shift at its
//! zero weights recovers exact block theory: every surviving shift edge has
//! a strictly positive weight, and a source whose target falls outside its
//! block is annihilated.

use crate::error::{Error, Result};
use crate::interval::{Hi, Interval, Lo};
use crate::numeric::{c64, C64};
use crate::operator::{global_to_local, CMatrix, Direction, OperatorSpec, RankOneTerm};
use crate::vector::SparseVector;
use crate::weights::{DiagonalRule, WeightRule};

/// The structural part of a block, without its affine wrapper.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockCore {
    /// Weighted shift in global coordinates: `e_i -> w(i) e_{i+step}`
    /// whenever `i + step` stays in the block range, else `e_i -> 0`.
    Shift { step: i64, weights: WeightRule },
    /// Diagonal in local (ℕ) coordinates, embedded through the range map.
    Diagonal { rule: DiagonalRule },
    /// Dense matrix in local coordinates `0..n`.
    Matrix { entries: CMatrix },
}

/// One summand of the normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalBlock {
    pub range: Interval,
    pub offset: C64,
    pub factor: C64,
    pub core: BlockCore,
}

impl NormalBlock {
    /// Weight-limit moduli `(at the -inf end, at the +inf end)` of a shift
    /// core, in core (pre-affine) scale.
    pub fn shift_limits(&self) -> (Option<f64>, Option<f64>) {
        match &self.core {
            BlockCore::Shift { weights, .. } => {
                let (lo, hi) = weights.declared_limits();
                let lo = if self.range.lo == Lo::NegInf { lo } else { None };
                let hi = if self.range.hi == Hi::PosInf { hi } else { None };
                (lo.map(f64::abs), hi.map(f64::abs))
            }
            _ => (None, None),
        }
    }

    /// Exact core image of a basis vector given by its global index.
    fn core_column(&self, i: i64) -> Vec<(i64, C64)> {
        match &self.core {
            BlockCore::Shift { step, weights } => {
                let t = i + step;
                if self.range.contains(t) {
                    vec![(t, c64(weights.weight(i), 0.0))]
                } else {
                    vec![]
                }
            }
            BlockCore::Diagonal { rule } => {
                let j = global_to_local(&self.range, i);
                let v = rule.entry(j);
                if v == c64(0.0, 0.0) {
                    vec![]
                } else {
                    vec![(i, v)]
                }
            }
            BlockCore::Matrix { entries } => {
                let j = global_to_local(&self.range, i) as usize;
                let base = match self.range.lo {
                    Lo::At(a) => a,
                    _ => unreachable!("matrix blocks have finite ranges"),
                };
                entries
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| row[j] != c64(0.0, 0.0))
                    .map(|(r, row)| (base + r as i64, row[j]))
                    .collect()
            }
        }
    }

    /// Full block image of a global basis vector: `offset·e_i + factor·core e_i`.
    pub fn column(&self, i: i64) -> Vec<(i64, C64)> {
        let mut out: Vec<(i64, C64)> = Vec::new();
        if self.offset != c64(0.0, 0.0) {
            out.push((i, self.offset));
        }
        if self.factor != c64(0.0, 0.0) {
            for (t, v) in self.core_column(i) {
                if let Some(slot) = out.iter_mut().find(|(j, _)| *j == t) {
                    slot.1 += self.factor * v;
                } else {
                    out.push((t, self.factor * v));
                }
            }
        }
        out.retain(|(_, v)| *v != c64(0.0, 0.0));
        out
    }
}

/// The assembled normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub blocks: Vec<NormalBlock>,
    pub perturbation: Vec<RankOneTerm>,
    norm_bound: f64,
}

impl NormalForm {
    pub fn domain(&self) -> Interval {
        let lo = self.blocks.iter().map(|b| b.range.lo).min().unwrap_or(Lo::At(0));
        let hi = self.blocks.iter().map(|b| b.range.hi).max().unwrap_or(Hi::At(0));
        Interval { lo, hi }
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn block_at(&self, i: i64) -> Option<&NormalBlock> {
        self.blocks.iter().find(|b| b.range.contains(i))
    }

    /// Image of the global basis vector `e_i`, including perturbation terms.
    pub fn column(&self, i: i64) -> Result<Vec<(i64, C64)>> {
        let block = self
            .block_at(i)
            .ok_or_else(|| Error::domain(format!("index {i} outside all blocks")))?;
        let mut out = block.column(i);
        for t in &self.perturbation {
            let coeff = t.c * t.v.get(i).conj();
            if coeff == c64(0.0, 0.0) {
                continue;
            }
            for (j, u) in t.u.iter() {
                if let Some(slot) = out.iter_mut().find(|(k, _)| *k == j) {
                    slot.1 += coeff * u;
                } else {
                    out.push((j, coeff * u));
                }
            }
        }
        out.retain(|(_, v)| *v != c64(0.0, 0.0));
        out.sort_by_key(|(j, _)| *j);
        Ok(out)
    }

    /// Apply the normal form exactly; must agree with the originating spec.
    pub fn apply(&self, v: &SparseVector) -> Result<SparseVector> {
        let mut out = SparseVector::zero();
        for (i, z) in v.iter() {
            let block = self
                .block_at(i)
                .ok_or_else(|| Error::domain(format!("index {i} outside all blocks")))?;
            for (j, m) in block.column(i) {
                out.add_to(j, m * z);
            }
        }
        for t in &self.perturbation {
            let coeff = t.c * t.v.inner(v);
            if coeff != c64(0.0, 0.0) {
                out = out.add(&t.u.scale(coeff));
            }
        }
        Ok(out)
    }

    /// The scalar the operator multiplies `e_i` by, when the operator is
    /// diagonal-like at every index (no shifts, no matrices, no
    /// perturbation); `None` otherwise.
    pub fn pointwise_entry(&self, i: i64) -> Option<C64> {
        if !self.perturbation.is_empty() {
            return None;
        }
        let block = self.block_at(i)?;
        match &block.core {
            BlockCore::Diagonal { rule } => {
                Some(block.offset + block.factor * rule.entry(global_to_local(&block.range, i)))
            }
            _ => None,
        }
    }
}

/// Compute the normal form of a validated spec.
pub fn normalize(spec: &OperatorSpec) -> Result<NormalForm> {
    spec.validate()?;
    let mut blocks = Vec::new();
    let mut perturbation = Vec::new();
    collect(spec, c64(0.0, 0.0), c64(1.0, 0.0), None, &mut blocks, &mut perturbation)?;
    blocks.sort_by_key(|b| b.range.lo);
    Ok(NormalForm { blocks, perturbation, norm_bound: spec.norm_bound() })
}

fn collect(
    spec: &OperatorSpec,
    offset: C64,
    factor: C64,
    place: Option<Interval>,
    blocks: &mut Vec<NormalBlock>,
    terms: &mut Vec<RankOneTerm>,
) -> Result<()> {
    match spec {
        OperatorSpec::BilateralShift { direction, weights } => {
            let step = match direction {
                Direction::Forward => 1,
                Direction::Backward => -1,
            };
            push_shift_blocks(Interval::all(), step, weights.clone(), offset, factor, blocks);
            Ok(())
        }
        OperatorSpec::UnilateralShift { direction, weights } => {
            let range = place.unwrap_or_else(Interval::nat);
            let local_step = match direction {
                Direction::Forward => 1,
                Direction::Backward => -1,
            };
            let (step, global_weights) = match (range.lo, range.hi) {
                (Lo::At(a), _) => (local_step, weights.translate_into(a, &range)),
                (Lo::NegInf, Hi::At(b)) => (-local_step, weights.reflect_about(b, &range)),
                (Lo::NegInf, Hi::PosInf) => (local_step, weights.clone()),
            };
            push_shift_blocks(range, step, global_weights, offset, factor, blocks);
            Ok(())
        }
        OperatorSpec::Diagonal { entries } => {
            let range = place.unwrap_or_else(Interval::nat);
            blocks.push(NormalBlock {
                range,
                offset,
                factor,
                core: BlockCore::Diagonal { rule: entries.clone() },
            });
            Ok(())
        }
        OperatorSpec::FiniteMatrix { entries } => {
            let range = place.unwrap_or(spec.domain());
            blocks.push(NormalBlock {
                range,
                offset,
                factor,
                core: BlockCore::Matrix { entries: entries.clone() },
            });
            Ok(())
        }
        OperatorSpec::Scale { factor: c, inner } => {
            collect(inner, offset, factor * c, place, blocks, terms)
        }
        OperatorSpec::ScalarShift { lambda, inner } => {
            collect(inner, offset + factor * lambda, factor, place, blocks, terms)
        }
        OperatorSpec::DirectSum { blocks: sum_blocks } => {
            if place.is_some() {
                return Err(Error::unsupported("nested direct sums"));
            }
            for b in sum_blocks {
                collect(&b.op, offset, factor, Some(b.range), blocks, terms)?;
            }
            Ok(())
        }
        OperatorSpec::FiniteRankPerturbation { inner, terms: ts } => {
            collect(inner, offset, factor, place, blocks, terms)?;
            for t in ts {
                let embed = |v: &SparseVector| -> SparseVector {
                    match place {
                        None => v.clone(),
                        Some(range) => {
                            let mut out = SparseVector::zero();
                            for (j, z) in v.iter() {
                                out.set(crate::operator::local_to_global(&range, j), z);
                            }
                            out
                        }
                    }
                };
                terms.push(RankOneTerm {
                    u: embed(&t.u),
                    v: embed(&t.v),
                    c: factor * t.c,
                });
            }
            Ok(())
        }
    }
}

/// Split a global shift at its zero weights and emit the resulting blocks.
fn push_shift_blocks(
    range: Interval,
    step: i64,
    weights: WeightRule,
    offset: C64,
    factor: C64,
    blocks: &mut Vec<NormalBlock>,
) {
    // A zero weight at source z kills the edge z -> z+step; cutting the
    // range just past z (toward the target) makes the edge fall outside
    // both halves. Zeros whose target already exits the range are no-ops.
    let mut cuts: Vec<i64> = weights
        .zero_indices()
        .into_iter()
        .filter(|&z| range.contains(z) && range.contains(z + step))
        .map(|z| if step > 0 { z } else { z - 1 })
        .collect();
    cuts.sort_unstable();
    cuts.dedup();

    let mut lo = range.lo;
    for &b in &cuts {
        let piece = Interval { lo, hi: Hi::At(b) };
        blocks.push(NormalBlock {
            range: piece,
            offset,
            factor,
            core: BlockCore::Shift { step, weights: weights.clone() },
        });
        lo = Lo::At(b + 1);
    }
    blocks.push(NormalBlock {
        range: Interval { lo, hi: range.hi },
        offset,
        factor,
        core: BlockCore::Shift { step, weights },
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::backward_shift;
    use crate::operator::SumBlock;

    fn kernel_shift() -> OperatorSpec {
        let mut weights = WeightRule::constant(2.0);
        weights.exceptions.insert(0, 0.0);
        OperatorSpec::BilateralShift { direction: Direction::Backward, weights }
    }

    #[test]
    fn kernel_shift_splits_into_two_half_lines() {
        let nf = normalize(&kernel_shift()).unwrap();
        assert_eq!(nf.blocks.len(), 2);
        assert_eq!(nf.blocks[0].range, Interval::neg_inf_to(-1));
        assert_eq!(nf.blocks[1].range, Interval::nat());
        // Action agreement on a window around the split.
        let spec = kernel_shift();
        for i in -3..=3 {
            let v = SparseVector::basis(i);
            assert_eq!(nf.apply(&v).unwrap(), spec.apply(&v).unwrap(), "disagree at e_{i}");
        }
    }

    #[test]
    fn no_zero_weights_single_block() {
        let spec = OperatorSpec::BilateralShift {
            direction: Direction::Forward,
            weights: WeightRule::constant(2.0),
        };
        let nf = normalize(&spec).unwrap();
        assert_eq!(nf.blocks.len(), 1);
        assert_eq!(nf.blocks[0].range, Interval::all());
    }

    #[test]
    fn direct_sum_of_matrices_keeps_blocks() {
        let m = |d: f64| OperatorSpec::FiniteMatrix {
            entries: CMatrix(vec![vec![c64(d, 0.0), c64(0.0, 0.0)], vec![c64(0.0, 0.0), c64(d, 0.0)]]),
        };
        let sum = OperatorSpec::DirectSum {
            blocks: vec![
                SumBlock { range: Interval::finite(0, 1).unwrap(), op: Box::new(m(1.0)) },
                SumBlock { range: Interval::finite(2, 3).unwrap(), op: Box::new(m(2.0)) },
            ],
        };
        let nf = normalize(&sum).unwrap();
        assert_eq!(nf.blocks.len(), 2);
        for i in 0..=3 {
            let v = SparseVector::basis(i);
            assert_eq!(nf.apply(&v).unwrap(), sum.apply(&v).unwrap());
        }
    }

    #[test]
    fn action_agreement_wide_window() {
        // Affine-wrapped descending block plus ascending block.
        let sum = OperatorSpec::DirectSum {
            blocks: vec![
                SumBlock { range: Interval::neg_inf_to(-1), op: Box::new(backward_shift(5.0)) },
                SumBlock { range: Interval::nat(), op: Box::new(backward_shift(5.0)) },
            ],
        };
        let spec = OperatorSpec::ScalarShift {
            lambda: c64(0.5, 0.25),
            inner: Box::new(OperatorSpec::Scale { factor: c64(0.0, 1.0), inner: Box::new(sum) }),
        };
        let nf = normalize(&spec).unwrap();
        for i in -50..=50 {
            let v = SparseVector::basis(i);
            assert_eq!(nf.apply(&v).unwrap(), spec.apply(&v).unwrap(), "disagree at e_{i}");
        }
    }

    #[test]
    fn pointwise_entries_for_diagonal() {
        let spec = OperatorSpec::ScalarShift {
            lambda: c64(1.0, 0.0),
            inner: Box::new(OperatorSpec::Diagonal {
                entries: DiagonalRule::constant(c64(0.0, 0.0)),
            }),
        };
        let nf = normalize(&spec).unwrap();
        assert_eq!(nf.pointwise_entry(7), Some(c64(1.0, 0.0)));
    }
}
