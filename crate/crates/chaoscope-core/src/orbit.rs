//! Orbit norms and the chaos statistics built on them.
//!
//! Everything here is horizon-limited evidence, never a limit claim:
//! liminf/limsup proxies are window estimates over `n ∈ [N/2, N]`, and the
//! distributional functions `F^n(τ)` are exact rationals `k/n` obtained by
//! counting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_form::normalize;
use crate::operator::OperatorSpec;
use crate::vector::SparseVector;

/// Norms above this value truncate a trace instead of producing infinities.
pub const OVERFLOW_LIMIT: f64 = 1e300;

/// Largest accepted horizon.
pub const MAX_HORIZON: usize = 1_000_000;

/// Default proximity / separation thresholds for Li-Yorke scoring.
pub const DELTA_LOW: f64 = 1e-6;
pub const DELTA_HIGH: f64 = 1e-1;

/// The logarithmic τ-grid used by default: 33 points from 1e-6 to 1e2.
pub fn default_tau_grid() -> Vec<f64> {
    (0..33)
        .map(|k| 10f64.powf(-6.0 + 8.0 * k as f64 / 32.0))
        .collect()
}

/// Orbit norm sequence `‖T^n x‖`, `n = 0..=horizon` (shorter on overflow).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub norms: Vec<f64>,
    pub horizon: usize,
    pub overflow: bool,
}

impl OrbitTrace {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,norm\n");
        for (n, v) in self.norms.iter().enumerate() {
            out.push_str(&format!("{n},{v}\n"));
        }
        out
    }
}

/// Exact iterated application with norm reporting.
pub fn orbit(op: &OperatorSpec, x: &SparseVector, horizon: usize) -> Result<OrbitTrace> {
    if horizon > MAX_HORIZON {
        return Err(Error::out_of_range(format!("horizon {horizon} > {MAX_HORIZON}")));
    }
    let mut norms = Vec::with_capacity(horizon + 1);
    let mut cur = x.clone();
    let mut overflow = false;
    norms.push(cur.norm());
    for _ in 0..horizon {
        cur = op.apply(&cur)?;
        let n = cur.norm();
        if !n.is_finite() || n > OVERFLOW_LIMIT {
            overflow = true;
            break;
        }
        norms.push(n);
    }
    Ok(OrbitTrace { norms, horizon, overflow })
}

/// One stored row of a distributional profile: exact counts
/// `#{0 ≤ i < n : d_i < τ}` per grid τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: usize,
    pub counts: Vec<u64>,
}

impl ProfileRow {
    pub fn value(&self, tau_index: usize) -> f64 {
        self.counts[tau_index] as f64 / self.n as f64
    }
}

/// Distributional statistics of one orbit-distance sequence.
///
/// Rows are decimated for large horizons (all `n` up to 4096, then evenly
/// spaced); the envelopes are computed over every `n` in the upper window
/// regardless of decimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionalProfile {
    pub tau_grid: Vec<f64>,
    pub rows: Vec<ProfileRow>,
    /// min over n in `[N/2, N]` of `F^n(τ)`, per grid point.
    pub lower_envelope: Vec<f64>,
    /// max over n in `[N/2, N]` of `F^n(τ)`, per grid point.
    pub upper_envelope: Vec<f64>,
    pub horizon: usize,
    pub overflow: bool,
}

impl DistributionalProfile {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,tau,F\n");
        for row in &self.rows {
            for (ti, tau) in self.tau_grid.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", row.n, tau, row.value(ti)));
            }
        }
        out
    }
}

/// Distance sequence of a pair under iteration: `d_i = ‖T^i(x - y)‖`.
fn distance_sequence(
    op: &OperatorSpec,
    x: &SparseVector,
    y: &SparseVector,
    horizon: usize,
) -> Result<OrbitTrace> {
    let diff = x.sub(y);
    if diff.is_zero() {
        return Err(Error::out_of_range("x and y must differ"));
    }
    orbit(op, &diff, horizon)
}

/// The distributional functions `F^n_xy` over a τ-grid.
pub fn pair_profile(
    op: &OperatorSpec,
    x: &SparseVector,
    y: &SparseVector,
    horizon: usize,
    tau_grid: &[f64],
) -> Result<DistributionalProfile> {
    if tau_grid.is_empty() || tau_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::out_of_range("τ-grid must be strictly increasing"));
    }
    if tau_grid[0] <= 0.0 {
        return Err(Error::out_of_range("τ must be positive"));
    }
    if horizon == 0 {
        return Err(Error::out_of_range("horizon must be positive"));
    }
    let trace = distance_sequence(op, x, y, horizon)?;
    // d_0..d_{N-1} drive F^n for n ≤ N.
    let d = &trace.norms;
    let n_max = d.len().min(horizon);
    let stride = (horizon / 4096).max(1);
    let window_lo = horizon.div_ceil(2).max(1);

    let mut counts = vec![0u64; tau_grid.len()];
    let mut rows = Vec::new();
    let mut lower = vec![f64::INFINITY; tau_grid.len()];
    let mut upper = vec![f64::NEG_INFINITY; tau_grid.len()];
    let mut any_window = false;
    for n in 1..=n_max {
        let di = d[n - 1];
        for (ti, &tau) in tau_grid.iter().enumerate() {
            if di < tau {
                counts[ti] += 1;
            }
        }
        if n <= 4096 || n % stride == 0 || n == n_max {
            rows.push(ProfileRow { n, counts: counts.clone() });
        }
        if n >= window_lo {
            any_window = true;
            for ti in 0..tau_grid.len() {
                let f = counts[ti] as f64 / n as f64;
                lower[ti] = lower[ti].min(f);
                upper[ti] = upper[ti].max(f);
            }
        }
    }
    if !any_window {
        lower.fill(0.0);
        upper.fill(0.0);
    }
    Ok(DistributionalProfile {
        tau_grid: tau_grid.to_vec(),
        rows,
        lower_envelope: lower,
        upper_envelope: upper,
        horizon: n_max,
        overflow: trace.overflow,
    })
}

/// Horizon verdict for a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairVerdict {
    /// proximal below δ_low and separated above δ_high within the window
    #[serde(rename = "chaotic-pair-at-horizon")]
    ChaoticPairAtHorizon,
    /// the distance itself dies out
    #[serde(rename = "asymptotic")]
    Asymptotic,
    /// comes close but never far
    #[serde(rename = "proximal-only")]
    ProximalOnly,
    /// never comes close
    #[serde(rename = "separated")]
    Separated,
}

/// Window estimates of liminf/limsup of the pair distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiYorkeScore {
    pub inf_estimate: f64,
    pub sup_estimate: f64,
    pub verdict: PairVerdict,
    pub delta_low: f64,
    pub delta_high: f64,
    pub window: (usize, usize),
    pub overflow: bool,
}

pub fn li_yorke_score(
    op: &OperatorSpec,
    x: &SparseVector,
    y: &SparseVector,
    horizon: usize,
    delta_low: f64,
    delta_high: f64,
) -> Result<LiYorkeScore> {
    if horizon == 0 {
        return Err(Error::out_of_range("horizon must be positive"));
    }
    let trace = distance_sequence(op, x, y, horizon)?;
    let d = &trace.norms;
    let hi = d.len() - 1;
    let lo = (horizon / 2).min(hi);
    let window = &d[lo..=hi];
    let inf = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let sup = if trace.overflow {
        f64::MAX
    } else {
        window.iter().cloned().fold(0.0f64, f64::max)
    };
    let verdict = if inf < delta_low && sup > delta_high {
        PairVerdict::ChaoticPairAtHorizon
    } else if sup < delta_low {
        PairVerdict::Asymptotic
    } else if inf < delta_low {
        PairVerdict::ProximalOnly
    } else {
        PairVerdict::Separated
    };
    Ok(LiYorkeScore {
        inf_estimate: inf,
        sup_estimate: sup,
        verdict,
        delta_low,
        delta_high,
        window: (lo, hi),
        overflow: trace.overflow,
    })
}

/// A norm-unimodality certificate: γ-geometric growth up to step `m`,
/// then horizon-limited decay evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnimodalCertificate {
    pub gamma: f64,
    pub m: usize,
    pub witness_index: i64,
    pub witness: SparseVector,
    /// `‖T^i x‖` for `i = 1..=m`.
    pub growth_norms: Vec<f64>,
    /// `‖T^n x‖` for `n = m+1..=horizon`.
    pub decay_tail: Vec<f64>,
    pub horizon: usize,
}

/// Search candidate basis vectors for a norm-unimodality witness.
///
/// Growth is checked exactly: `‖T^i x‖ ≥ γ^i ‖x‖` for `1 ≤ i ≤ m`. The
/// tail check is a finite-horizon proxy for decay: non-increasing over its
/// second half and ending below `max(1e-6·‖x‖, 1e-3·peak)`. Absence of a
/// certificate at this horizon proves nothing, so failure is a value.
pub fn unimodal_certify(
    op: &OperatorSpec,
    gamma: f64,
    m: usize,
    horizon: usize,
    candidates: std::ops::RangeInclusive<i64>,
) -> Result<Option<UnimodalCertificate>> {
    if gamma <= 1.0 {
        return Err(Error::out_of_range("γ must exceed 1"));
    }
    if m == 0 {
        return Err(Error::out_of_range("m must be positive"));
    }
    if horizon < 4 * m {
        return Err(Error::out_of_range("horizon must be at least 4m"));
    }
    let dom = op.domain();
    'candidates: for k in candidates {
        if !dom.contains(k) {
            continue;
        }
        let x = SparseVector::basis(k);
        let trace = orbit(op, &x, horizon)?;
        if trace.overflow || trace.norms.len() <= horizon {
            continue;
        }
        let base = trace.norms[0];
        for i in 1..=m {
            if trace.norms[i] < gamma.powi(i as i32) * base {
                continue 'candidates;
            }
        }
        let tail: Vec<f64> = trace.norms[m + 1..].to_vec();
        if tail.is_empty() {
            continue;
        }
        let half = tail.len() / 2;
        for w in tail[half..].windows(2) {
            if w[1] > w[0] * (1.0 + 1e-12) {
                continue 'candidates;
            }
        }
        let peak = trace.norms[1..=m].iter().cloned().fold(0.0f64, f64::max);
        let threshold = (1e-6 * base).max(1e-3 * peak);
        if *tail.last().unwrap() >= threshold {
            continue;
        }
        return Ok(Some(UnimodalCertificate {
            gamma,
            m,
            witness_index: k,
            witness: x,
            growth_norms: trace.norms[1..=m].to_vec(),
            decay_tail: tail,
            horizon,
        }));
    }
    Ok(None)
}

/// Per-sample orbit dichotomy data (the liminf ⇒ limit property).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomySample {
    pub liminf_proxy: f64,
    pub tail_norm: f64,
    pub consistent: bool,
    /// Diagonal operators only: whenever the orbit nearly vanishes, the
    /// sample's mass on `|η| ≥ 1` entries must be negligible.
    pub kernel_mass_ok: Option<bool>,
    pub escaped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub horizon: usize,
    pub delta: f64,
    pub samples: Vec<DichotomySample>,
    pub violations: usize,
}

/// Check `liminf ‖T^n x‖ = 0 ⇒ lim ‖T^n x‖ = 0` at a finite horizon:
/// consistent when the window minimum stays above δ or the final norm is
/// controlled by it.
pub fn dichotomy_check(
    op: &OperatorSpec,
    samples: &[SparseVector],
    horizon: usize,
    delta: f64,
) -> Result<DichotomyReport> {
    if horizon == 0 {
        return Err(Error::out_of_range("horizon must be positive"));
    }
    let nf = normalize(op)?;
    let mut out = Vec::with_capacity(samples.len());
    let mut violations = 0usize;
    for x in samples {
        let trace = orbit(op, x, horizon)?;
        let d = &trace.norms;
        let hi = d.len() - 1;
        let lo = (horizon / 2).min(hi);
        let liminf_proxy = d[lo..=hi].iter().cloned().fold(f64::INFINITY, f64::min);
        let tail_norm = d[hi];
        let escaped = trace.overflow;
        let consistent = escaped || liminf_proxy >= delta || tail_norm <= 10.0 * liminf_proxy + delta;

        let norm_x = x.norm();
        let kernel_mass_ok = nf.pointwise_entry(0).map(|_| {
            if liminf_proxy < 1e-8 * norm_x {
                let mass: f64 = crate::numeric::scaled_l2(x.iter().filter_map(|(i, z)| {
                    nf.pointwise_entry(i).and_then(|eta| {
                        if eta.norm() >= 1.0 {
                            Some(z.norm())
                        } else {
                            None
                        }
                    })
                }));
                mass < 1e-6 * norm_x
            } else {
                true
            }
        });

        if !consistent || kernel_mass_ok == Some(false) {
            violations += 1;
        }
        out.push(DichotomySample { liminf_proxy, tail_norm, consistent, kernel_mass_ok, escaped });
    }
    Ok(DichotomyReport { horizon, delta, samples: out, violations })
}
