//! Truncation-based numerical oracle for kernel dimensions and norms.
//!
//! The oracle builds the rectangular central truncation of `λ - T`: domain
//! restricted to a window of basis vectors, codomain taking every index the
//! window maps into. Unlike a square cutoff this keeps
//! `σ_min = min ‖(λ-T)x‖ / ‖x‖` honest — a square truncation cannot tell a
//! kernel from a cokernel because `σ(M) = σ(M^H)`.
//!
//! Singular values are counted through Sylvester inertia of the banded
//! Hermitian augmentation `H = [[0, M], [M^H, 0]]`, whose spectrum is
//! `±σ_i` plus structural zeros. Working on `H` instead of the Gram matrix
//! `M^H M` avoids squaring the condition number: kernel thresholds around
//! `1e-8·‖T‖` stay far above the roundoff floor. Spectral pollution is
//! caught by requiring agreement across the two largest window sizes, not
//! hidden.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Hi, Lo};
use crate::normal_form::{normalize, NormalForm};
use crate::numeric::{c64, complex_pair, C64};
use crate::operator::OperatorSpec;

/// Default cap on truncation sizes; override with `CHAOSCOPE_MAX_TRUNCATION`.
pub const DEFAULT_SIZE_CAP: usize = 2000;

/// Relative threshold under which a singular value counts as kernel.
pub const KERNEL_THRESHOLD_FACTOR: f64 = 1e-8;

pub fn size_cap() -> usize {
    std::env::var("CHAOSCOPE_MAX_TRUNCATION")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// Per-size estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub size: usize,
    /// A few smallest singular values of the rectangular truncation.
    pub smallest_singular_values: Vec<f64>,
    pub kernel_dim: u64,
    pub adjoint_kernel_dim: u64,
}

/// Full oracle report for one `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    #[serde(with = "complex_pair")]
    pub lambda: C64,
    pub threshold: f64,
    pub reports: Vec<SizeReport>,
    /// Kernel estimates (operator and adjoint) agree across the two
    /// largest sizes.
    pub stabilized: bool,
}

/// Estimate kernel dimensions of `λ - op` and its adjoint across central
/// truncations of the given increasing sizes.
pub fn truncation_oracle(op: &OperatorSpec, lambda: C64, sizes: &[usize]) -> Result<OracleReport> {
    if sizes.is_empty() {
        return Err(Error::out_of_range("no truncation sizes given"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::out_of_range("truncation sizes must be strictly increasing"));
    }
    let cap = size_cap();
    if let Some(&max) = sizes.last() {
        if max > cap {
            return Err(Error::TruncationCap { requested: max, cap });
        }
    }
    let nf = normalize(op)?;
    let adj = op.adjoint();
    let nf_adj = normalize(&adj)?;
    let norm_bound = nf.norm_bound();
    let threshold = KERNEL_THRESHOLD_FACTOR * norm_bound;

    let mut reports = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let aug = Augmented::assemble(&nf, lambda, n)?;
        let kernel_dim = aug.count_sigma_below(threshold);
        let smallest = aug.smallest_singular_values(4);
        let aug_adj = Augmented::assemble(&nf_adj, lambda.conj(), n)?;
        let adjoint_kernel_dim = aug_adj.count_sigma_below(threshold);
        reports.push(SizeReport {
            size: n,
            smallest_singular_values: smallest,
            kernel_dim,
            adjoint_kernel_dim,
        });
    }
    let stabilized = reports.len() >= 2 && {
        let a = &reports[reports.len() - 2];
        let b = &reports[reports.len() - 1];
        a.kernel_dim == b.kernel_dim && a.adjoint_kernel_dim == b.adjoint_kernel_dim
    };
    Ok(OracleReport { lambda, threshold, reports, stabilized })
}

/// Largest singular value of the truncated operator itself (no `λ` shift);
/// the numerical side of two-way norm checks.
pub fn truncated_operator_norm(op: &OperatorSpec, size: usize) -> Result<f64> {
    let cap = size_cap();
    if size > cap {
        return Err(Error::TruncationCap { requested: size, cap });
    }
    let nf = normalize(op)?;
    // Columns of -T alone; the sign is irrelevant for singular values.
    let aug = Augmented::assemble(&nf, c64(0.0, 0.0), size)?;
    Ok(aug.sigma_max())
}

/// Banded Hermitian augmentation `[[0, M], [M^H, 0]]` of the rectangular
/// truncation `M` of `λ - T`.
struct Augmented {
    /// total dimension (rows + cols)
    dim: usize,
    /// number of domain (column) nodes
    n_cols: usize,
    /// number of codomain (row) nodes
    n_rows: usize,
    bw: usize,
    /// Lower band storage: `band[d][k] = H[k+d][k]`, `d = 0..=bw`.
    band: Vec<Vec<C64>>,
    /// Gershgorin bound on |eigenvalues|.
    eig_bound: f64,
}

impl Augmented {
    fn assemble(nf: &NormalForm, lambda: C64, n: usize) -> Result<Augmented> {
        let window = central_window(nf, n);
        let w0 = window.0;
        let n_cols = (window.1 - window.0 + 1) as usize;
        let mut cols: Vec<Vec<(i64, C64)>> = Vec::with_capacity(n_cols);
        let mut row_set: std::collections::BTreeSet<i64> = std::collections::BTreeSet::new();
        for j in w0..=window.1 {
            let mut col = nf.column(j)?;
            for (_, v) in col.iter_mut() {
                *v = -*v;
            }
            if let Some(slot) = col.iter_mut().find(|(r, _)| *r == j) {
                slot.1 += lambda;
            } else {
                col.push((j, lambda));
            }
            col.retain(|(_, v)| *v != c64(0.0, 0.0));
            col.sort_by_key(|(r, _)| *r);
            for (r, _) in &col {
                row_set.insert(*r);
            }
            cols.push(col);
        }
        // Node order: all indices ascending, a column node immediately
        // before the row node of the same index. This keeps the shift
        // class banded.
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        struct NodeKey(i64, u8); // 0 = col, 1 = row
        let mut keys: Vec<NodeKey> = Vec::with_capacity(n_cols + row_set.len());
        for j in w0..=window.1 {
            keys.push(NodeKey(j, 0));
        }
        for &r in &row_set {
            keys.push(NodeKey(r, 1));
        }
        keys.sort();
        let pos_of = |key: NodeKey| -> usize {
            keys.binary_search(&key).expect("node present")
        };

        let dim = keys.len();
        // Entries of H: for each matrix entry M[r, c] place it at
        // (row-node, col-node) and its conjugate mirror.
        let mut entries: Vec<(usize, usize, C64)> = Vec::new();
        let mut bw = 0usize;
        for (ci, col) in cols.iter().enumerate() {
            let c_pos = pos_of(NodeKey(w0 + ci as i64, 0));
            for &(r, v) in col {
                let r_pos = pos_of(NodeKey(r, 1));
                let (p, q, val) = if r_pos >= c_pos {
                    (r_pos, c_pos, v)
                } else {
                    (c_pos, r_pos, v.conj())
                };
                bw = bw.max(p - q);
                entries.push((p, q, val));
            }
        }
        let bw = bw.min(dim.saturating_sub(1));
        let mut band = vec![vec![c64(0.0, 0.0); dim]; bw + 1];
        for (p, q, v) in entries {
            band[p - q][q] += v;
        }
        let mut eig_bound = 0.0f64;
        for k in 0..dim {
            let mut row = band[0][k].norm();
            for d in 1..=bw {
                if k + d < dim {
                    row += band[d][k].norm();
                }
                if k >= d {
                    row += band[d][k - d].norm();
                }
            }
            eig_bound = eig_bound.max(row);
        }
        Ok(Augmented {
            dim,
            n_cols,
            n_rows: row_set.len(),
            bw,
            band,
            eig_bound: eig_bound.max(1e-300),
        })
    }

    /// Number of eigenvalues of `H` strictly below `tau`, by counting
    /// negative pivots of the shifted LDLᴴ factorization.
    fn count_eigs_below(&self, tau: f64) -> usize {
        let mut shift = tau;
        for attempt in 0..8 {
            match self.ldl_count(shift) {
                Some(c) => return c,
                None => {
                    let nudge = self.eig_bound * 1e-14 * (1u64 << attempt) as f64 + 1e-290;
                    shift = tau + nudge;
                }
            }
        }
        self.ldl_count(tau + self.eig_bound * 1e-9).unwrap_or(0)
    }

    fn ldl_count(&self, tau: f64) -> Option<usize> {
        let n = self.dim;
        let bw = self.bw;
        // Retry with a nudged shift only on essentially exact pivot hits.
        let tiny = self.eig_bound * 1e-30;
        let mut l = vec![vec![c64(0.0, 0.0); n]; bw + 1];
        let mut dpiv = vec![0.0f64; n];
        let mut neg = 0usize;
        for k in 0..n {
            let mut dk = self.band[0][k].re - tau;
            let j0 = k.saturating_sub(bw);
            for j in j0..k {
                let lkj = l[k - j][j];
                dk -= lkj.norm_sqr() * dpiv[j];
            }
            if dk.abs() <= tiny {
                return None;
            }
            if dk < 0.0 {
                neg += 1;
            }
            dpiv[k] = dk;
            for d in 1..=bw {
                let i = k + d;
                if i >= n {
                    break;
                }
                let mut a = self.band[d][k];
                let j0 = i.saturating_sub(bw);
                for j in j0..k {
                    if i - j > bw {
                        continue;
                    }
                    let lij = l[i - j][j];
                    let lkj = l[k - j][j];
                    a -= lij * lkj.conj() * dpiv[j];
                }
                l[d][k] = a / dk;
            }
        }
        Some(neg)
    }

    /// Number of domain-side singular values strictly below `thr`,
    /// including the structural zeros when the domain window is wider
    /// than the row support.
    fn count_sigma_below(&self, thr: f64) -> u64 {
        let k = self.n_cols.min(self.n_rows);
        let below = self.count_eigs_below(thr);
        let above = self.count_eigs_below(-thr);
        let zeros = self.dim - 2 * k;
        let proper = (below.saturating_sub(above).saturating_sub(zeros)) / 2;
        (proper + self.n_cols - k) as u64
    }

    /// The `count` smallest domain-side singular values, by bisection.
    fn smallest_singular_values(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.n_cols);
        let mut out = Vec::with_capacity(count);
        for rank in 1..=count as u64 {
            let mut lo = 0.0f64;
            let mut hi = self.eig_bound * (1.0 + 1e-12) + 1e-250;
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if self.count_sigma_below(mid) >= rank {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(hi);
        }
        out
    }

    fn sigma_max(&self) -> f64 {
        // #σ > τ equals the number of eigenvalues of H below -τ.
        let mut lo = 0.0f64;
        let mut hi = self.eig_bound * (1.0 + 1e-12) + 1e-250;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.count_eigs_below(-mid) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// The window of `n` consecutive indices centred on the operator's domain.
fn central_window(nf: &NormalForm, n: usize) -> (i64, i64) {
    let dom = nf.domain();
    let n = n.max(1) as i64;
    match (dom.lo, dom.hi) {
        (Lo::NegInf, Hi::PosInf) => (-(n / 2), n - n / 2 - 1),
        (Lo::At(a), Hi::PosInf) => (a, a + n - 1),
        (Lo::NegInf, Hi::At(b)) => (b - n + 1, b),
        (Lo::At(a), Hi::At(b)) => (a, b.min(a + n - 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::operator::backward_shift;
    use crate::operator::{identity_on_nat, Direction};
    use crate::weights::{Formula, Poly, WeightRule, Zone};
    use std::collections::BTreeMap;

    #[test]
    fn two_b_kernel_stabilizes_at_one() {
        let op = backward_shift(2.0);
        let r = truncation_oracle(&op, c64(1.0, 0.0), &[200, 400, 800]).unwrap();
        assert!(r.stabilized);
        for sr in &r.reports {
            assert_eq!(sr.kernel_dim, 1, "size {}", sr.size);
            assert_eq!(sr.adjoint_kernel_dim, 0);
            assert!(sr.smallest_singular_values[0] < r.threshold);
            assert!(sr.smallest_singular_values[1] > 0.01);
        }
    }

    #[test]
    fn identity_truncation_sigma_min() {
        let op = identity_on_nat();
        let r = truncation_oracle(&op, c64(0.5, 0.0), &[100, 200]).unwrap();
        for sr in &r.reports {
            assert_eq!(sr.kernel_dim, 0);
            assert!((sr.smallest_singular_values[0] - 0.5).abs() < 1e-9);
        }
        assert!(r.stabilized);
    }

    #[test]
    fn annulus_operator_kernel_vs_adjoint_kernel() {
        let op = OperatorSpec::BilateralShift {
            direction: Direction::Forward,
            weights: WeightRule {
                zones: vec![
                    Zone { interval: Interval::neg_inf_to(-2), formula: Formula::Const(0.5) },
                    Zone { interval: Interval::from_to_inf(-1), formula: Formula::Const(2.0) },
                ],
                exceptions: BTreeMap::new(),
            },
        };
        let r = truncation_oracle(&op, c64(1.0, 0.0), &[200, 400]).unwrap();
        assert!(r.stabilized);
        for sr in &r.reports {
            assert_eq!(sr.kernel_dim, 0, "size {}", sr.size);
            assert_eq!(sr.adjoint_kernel_dim, 1, "size {}", sr.size);
        }
    }

    #[test]
    fn rational_weights_do_not_lose_tiny_singular_values() {
        // Kernel of λ - T for the boundary-unimodal shift: its kernel ray
        // decays slowly enough that Gram-squared arithmetic would drown it.
        let op = OperatorSpec::BilateralShift {
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
        };
        let r = truncation_oracle(&op, c64(1.75, 0.0), &[400, 800]).unwrap();
        assert!(r.stabilized);
        let last = r.reports.last().unwrap();
        assert_eq!(last.kernel_dim, 1);
        assert_eq!(last.adjoint_kernel_dim, 0);
    }

    #[test]
    fn size_cap_enforced() {
        let op = backward_shift(1.0);
        let r = truncation_oracle(&op, c64(0.3, 0.0), &[100, 1_000_000]);
        assert!(matches!(r, Err(Error::TruncationCap { .. })));
    }

    #[test]
    fn truncated_norm_of_scaled_shift() {
        let op = backward_shift(2.0);
        let n = truncated_operator_norm(&op, 300).unwrap();
        assert!((n - 2.0).abs() < 1e-9, "got {n}");
    }
}
