//! Exact spectral pictures: essential curves, region indices and defect
//! dimensions for the supported operator class.
//!
//! For a zero-weight-free shift block the eigenvector equation
//! `λx = Tx` is a first-order difference recurrence; square-summability
//! of its solution ray depends only on `|λ|` against the declared weight
//! limits, which makes kernel and cokernel dimensions exactly decidable
//! off the essential curves. Finite-rank perturbations keep curves and
//! indices and turn defect dimensions into first-class `unknown`s.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{circle_relation, Arrangement, Circle, CircleRel};
use crate::interval::{Hi, Interval, Lo};
use crate::normal_form::{normalize, BlockCore, NormalBlock, NormalForm};
use crate::numeric::{c64, complex_pair, C64};
use crate::operator::{CMatrix, OperatorSpec};
use crate::weights::WeightRule;

/// An exact dimension or a declared unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Exact(u64),
    Unknown,
}

impl Dim {
    pub fn exact(&self) -> Option<u64> {
        match self {
            Dim::Exact(k) => Some(*k),
            Dim::Unknown => None,
        }
    }

    pub fn is_positive(&self) -> Option<bool> {
        self.exact().map(|k| k > 0)
    }
}

impl Serialize for Dim {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dim::Exact(k) => s.serialize_u64(*k),
            Dim::Unknown => s.serialize_str("unknown"),
        }
    }
}

impl<'de> Deserialize<'de> for Dim {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(k) => Ok(Dim::Exact(k)),
            Repr::Tag(t) if t == "unknown" => Ok(Dim::Unknown),
            Repr::Tag(t) => Err(D::Error::custom(format!("bad dimension {t:?}"))),
        }
    }
}

/// One connected component of `ℂ` minus the essential curves.
///
/// `dim_ker`/`dim_coker` are the generic values on the region. For
/// finite-rank perturbations they are `unknown` (except on the unbounded
/// region, which stays resolvent), and `in_spectrum` then only asserts the
/// part implied by a nonzero index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    /// Bounding outer circle; `None` for the unbounded region.
    pub outer: Option<Circle>,
    /// Curves bounding the region from inside (including point punctures).
    pub inner: Vec<Circle>,
    #[serde(rename = "rep", with = "complex_pair")]
    pub representative: C64,
    pub in_spectrum: bool,
    pub semi_fredholm: bool,
    pub index: i64,
    pub dim_ker: Dim,
    pub dim_coker: Dim,
    pub min_index: Dim,
}

/// Isolated point of `σ \ σ_e` with its algebraic multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaZeroPoint {
    #[serde(with = "complex_pair")]
    pub point: C64,
    pub multiplicity: u64,
}

/// The combinatorial spectral data of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralPicture {
    /// σ_lre: circles (radius 0 encodes a point of essential spectrum).
    #[serde(rename = "curves")]
    pub essential_curves: Vec<Circle>,
    /// Cells of the curve arrangement; index 0 is the unbounded one.
    pub regions: Vec<Region>,
    pub sigma_zero: Vec<SigmaZeroPoint>,
    /// False when isolated eigenvalues cannot be determined symbolically
    /// (finite-rank perturbations); σ_zero is then empty and downstream
    /// predicates that need it report indeterminate.
    pub sigma_zero_exact: bool,
    pub norm_bound: f64,
}

impl SpectralPicture {
    /// Rebuild the cell arrangement of the curves. Regions are stored in
    /// the arrangement's cell order, so `cells[k]` matches `regions[k]`.
    pub fn arrangement(&self) -> Result<Arrangement> {
        let avoid: Vec<C64> = self.sigma_zero.iter().map(|s| s.point).collect();
        Arrangement::build_avoiding(&self.essential_curves, &avoid)
    }

    /// The region containing `λ`; errors on essential-curve points.
    pub fn locate(&self, lambda: C64) -> Result<&Region> {
        self.locate_index(lambda).map(|i| &self.regions[i])
    }

    /// Index of the region containing `λ`.
    pub fn locate_index(&self, lambda: C64) -> Result<usize> {
        let arr = self.arrangement()?;
        let cell = arr.locate(lambda)?;
        if cell >= self.regions.len() {
            return Err(Error::invalid("region/cell mismatch"));
        }
        Ok(cell)
    }

    /// Rotate the whole picture by `e^{iθ}` (used by covariance tests).
    pub fn rotate(&self, theta: f64) -> SpectralPicture {
        let phase = c64(theta.cos(), theta.sin());
        SpectralPicture {
            essential_curves: self
                .essential_curves
                .iter()
                .map(|c| Circle::new(c.center * phase, c.radius))
                .collect(),
            regions: self
                .regions
                .iter()
                .map(|r| Region {
                    outer: r.outer.map(|c| Circle::new(c.center * phase, c.radius)),
                    inner: r
                        .inner
                        .iter()
                        .map(|c| Circle::new(c.center * phase, c.radius))
                        .collect(),
                    representative: r.representative * phase,
                    ..r.clone()
                })
                .collect(),
            sigma_zero: self
                .sigma_zero
                .iter()
                .map(|s| SigmaZeroPoint { point: s.point * phase, multiplicity: s.multiplicity })
                .collect(),
            sigma_zero_exact: self.sigma_zero_exact,
            norm_bound: self.norm_bound,
        }
    }

    /// Structural equality with exact integers and `tol` on curve data.
    pub fn approx_eq(&self, other: &SpectralPicture, tol: f64) -> bool {
        if self.essential_curves.len() != other.essential_curves.len()
            || self.regions.len() != other.regions.len()
            || self.sigma_zero.len() != other.sigma_zero.len()
            || self.sigma_zero_exact != other.sigma_zero_exact
        {
            return false;
        }
        let circle_eq = |a: &Circle, b: &Circle| {
            (a.center - b.center).norm() <= tol && (a.radius - b.radius).abs() <= tol
        };
        for (a, b) in self.essential_curves.iter().zip(&other.essential_curves) {
            if !circle_eq(a, b) {
                return false;
            }
        }
        for (a, b) in self.regions.iter().zip(&other.regions) {
            let outer_eq = match (&a.outer, &b.outer) {
                (None, None) => true,
                (Some(x), Some(y)) => circle_eq(x, y),
                _ => false,
            };
            if !outer_eq
                || a.index != b.index
                || a.dim_ker != b.dim_ker
                || a.dim_coker != b.dim_coker
                || a.in_spectrum != b.in_spectrum
            {
                return false;
            }
        }
        for (a, b) in self.sigma_zero.iter().zip(&other.sigma_zero) {
            if (a.point - b.point).norm() > tol || a.multiplicity != b.multiplicity {
                return false;
            }
        }
        true
    }

    /// Check the picture's structural invariants.
    pub fn validate(&self) -> Result<()> {
        let unbounded: Vec<&Region> = self.regions.iter().filter(|r| r.outer.is_none()).collect();
        if unbounded.len() != 1 {
            return Err(Error::invalid("exactly one unbounded region required"));
        }
        if unbounded[0].in_spectrum || unbounded[0].index != 0 {
            return Err(Error::invalid("unbounded region must be resolvent with index 0"));
        }
        for r in &self.regions {
            if let (Dim::Exact(k), Dim::Exact(c)) = (r.dim_ker, r.dim_coker) {
                if r.semi_fredholm && r.index != k as i64 - c as i64 {
                    return Err(Error::invalid("index must equal dim_ker - dim_coker"));
                }
                if r.min_index != Dim::Exact(k.min(c)) {
                    return Err(Error::invalid("min_index must equal min(dim_ker, dim_coker)"));
                }
            }
            if r.index != 0 && !r.in_spectrum {
                return Err(Error::invalid("nonzero index forces in_spectrum"));
            }
        }
        for s in &self.sigma_zero {
            for c in &self.essential_curves {
                if c.boundary_distance(s.point).abs() <= 1e-9 {
                    return Err(Error::invalid("sigma_zero point on an essential curve"));
                }
            }
        }
        // Regions must tile the plane minus the curves: sample a grid.
        let arr = self.arrangement()?;
        if arr.cells.len() != self.regions.len() {
            return Err(Error::invalid("regions do not match the curve arrangement"));
        }
        let scale = self
            .essential_curves
            .iter()
            .map(|c| c.center.norm() + c.radius)
            .fold(1.0, f64::max);
        for gx in -6..=6 {
            for gy in -6..=6 {
                let p = c64(gx as f64 * scale / 5.0, gy as f64 * scale / 5.0);
                match arr.locate(p) {
                    Ok(cell) => {
                        if cell >= self.regions.len() {
                            return Err(Error::invalid("grid point outside all regions"));
                        }
                    }
                    Err(_) => {} // on a curve: fine
                }
            }
        }
        Ok(())
    }

    /// CSV polylines of the curve boundaries: `curve,point,re,im`.
    pub fn boundary_csv(&self, samples_per_curve: usize) -> String {
        let mut out = String::from("curve,point,re,im\n");
        for (ci, c) in self.essential_curves.iter().enumerate() {
            let n = samples_per_curve.max(1);
            for k in 0..n {
                let theta = k as f64 * std::f64::consts::TAU / n as f64;
                let p = c.center + c64(theta.cos(), theta.sin()) * c.radius;
                out.push_str(&format!("{ci},{k},{},{}\n", p.re, p.im));
            }
        }
        out
    }
}

/// Declared weight-limit radii `(|limit at -inf|, |limit at +inf|)`.
pub fn limit_radii(rule: &WeightRule) -> (Option<f64>, Option<f64>) {
    let (lo, hi) = rule.declared_limits();
    (lo.map(f64::abs), hi.map(f64::abs))
}

/// Exact kernel dimension of `λ - op`, or `unknown` when a finite-rank
/// perturbation defeats the recurrence analysis.
pub fn formal_kernel_dim(op: &OperatorSpec, lambda: C64) -> Result<Dim> {
    let nf = normalize(op)?;
    formal_kernel_dim_nf(&nf, lambda)
}

pub(crate) fn formal_kernel_dim_nf(nf: &NormalForm, lambda: C64) -> Result<Dim> {
    let curves = essential_curves_of(nf);
    for c in &curves {
        if on_curve(c, lambda) {
            return Err(Error::BoundaryPoint(format!(
                "{lambda} lies on an essential curve"
            )));
        }
    }
    if !nf.perturbation.is_empty() {
        return Ok(Dim::Unknown);
    }
    let mut total = 0u64;
    for b in &nf.blocks {
        let (ker, _) = block_defect_dims(b, lambda)?;
        total += ker;
    }
    Ok(Dim::Exact(total))
}

fn on_curve(c: &Circle, lambda: C64) -> bool {
    let d2 = (lambda - c.center).norm_sqr();
    let r2 = c.radius * c.radius;
    (d2 - r2).abs() <= crate::geometry::SQ_TOL * d2.max(r2).max(1.0)
}

/// Kernel and cokernel dimension of `λ - block` at a point off the curves.
fn block_defect_dims(block: &NormalBlock, lambda: C64) -> Result<(u64, u64)> {
    // λ - (o + f·C) = f·(ν - C) with ν = (λ - o)/f.
    if block.factor == c64(0.0, 0.0) {
        // Scalar block o·I: λ ≠ o off the curves unless the range is finite.
        if lambda == block.offset {
            let len = block.range.len().unwrap_or(0);
            return Ok((len, len));
        }
        return Ok((0, 0));
    }
    let nu = (lambda - block.offset) / block.factor;
    let m = nu.norm();
    match &block.core {
        BlockCore::Shift { step, weights } => {
            let (r_lo, r_hi) = shift_block_limits(block.range, weights);
            let dims = match (block.range.lo, block.range.hi, *step) {
                (Lo::NegInf, Hi::PosInf, 1) => {
                    // bilateral forward: kernel ray decays iff r_hi < |ν| < r_lo
                    let r_lo = r_lo.unwrap();
                    let r_hi = r_hi.unwrap();
                    (btoi(r_hi < m && m < r_lo), btoi(r_lo < m && m < r_hi))
                }
                (Lo::NegInf, Hi::PosInf, -1) => {
                    let r_lo = r_lo.unwrap();
                    let r_hi = r_hi.unwrap();
                    (btoi(r_lo < m && m < r_hi), btoi(r_hi < m && m < r_lo))
                }
                (Lo::At(_), Hi::PosInf, -1) => (btoi(m < r_hi.unwrap()), 0),
                (Lo::At(_), Hi::PosInf, 1) => (0, btoi(m < r_hi.unwrap())),
                (Lo::NegInf, Hi::At(_), 1) => (btoi(m < r_lo.unwrap()), 0),
                (Lo::NegInf, Hi::At(_), -1) => (0, btoi(m < r_lo.unwrap())),
                (Lo::At(_), Hi::At(_), _) => {
                    // finite zero-weight-free shift: one nilpotent Jordan chain
                    let k = btoi(nu == c64(0.0, 0.0));
                    (k, k)
                }
                _ => return Err(Error::invalid("bad shift step")),
            };
            Ok(dims)
        }
        BlockCore::Diagonal { rule } => {
            // #{k : η_k = ν}: exceptions first, then non-overridden zone slots.
            let mut count =
                rule.exceptions.values().filter(|&&w| w == nu).count() as u64;
            for (iv, v) in &rule.zones {
                if *v != nu {
                    continue;
                }
                match iv.len() {
                    Some(len) => {
                        let overridden =
                            rule.exceptions.keys().filter(|&&i| iv.contains(i)).count() as u64;
                        count += len - overridden;
                    }
                    None => {
                        return Err(Error::BoundaryPoint(
                            "λ matches an infinite-multiplicity diagonal value".into(),
                        ))
                    }
                }
            }
            Ok((count, count))
        }
        BlockCore::Matrix { entries } => {
            let k = matrix_kernel_dim(entries, nu);
            Ok((k, k))
        }
    }
}

fn btoi(b: bool) -> u64 {
    u64::from(b)
}

/// Weight limits of a shift block, restricted to its actually infinite ends.
fn shift_block_limits(range: Interval, weights: &WeightRule) -> (Option<f64>, Option<f64>) {
    let (lo, hi) = weights.declared_limits();
    (
        if range.lo == Lo::NegInf { lo.map(f64::abs) } else { None },
        if range.hi == Hi::PosInf { hi.map(f64::abs) } else { None },
    )
}

/// Geometric kernel dimension of `ν - M` for a dense block.
fn matrix_kernel_dim(entries: &CMatrix, nu: C64) -> u64 {
    let n = entries.dim();
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = -entries.0[i][j];
        }
        m[(i, i)] += nu;
    }
    let scale = m.norm().max(1.0);
    let svd = m.svd(false, false);
    svd.singular_values.iter().filter(|&&s| s <= 1e-10 * scale).count() as u64
}

/// Essential curves of a normal form (dedup happens in the arrangement).
pub(crate) fn essential_curves_of(nf: &NormalForm) -> Vec<Circle> {
    let mut curves = Vec::new();
    for b in &nf.blocks {
        if b.factor == c64(0.0, 0.0) {
            if b.range.len().is_none() {
                curves.push(Circle::point(b.offset));
            }
            continue;
        }
        match &b.core {
            BlockCore::Shift { step: _, weights } => {
                let (r_lo, r_hi) = shift_block_limits(b.range, weights);
                for r in [r_lo, r_hi].into_iter().flatten() {
                    curves.push(Circle::new(b.offset, b.factor.norm() * r));
                }
            }
            BlockCore::Diagonal { rule } => {
                curves.push(Circle::point(b.offset + b.factor * rule.limit_value()));
            }
            BlockCore::Matrix { .. } => {}
        }
    }
    curves
}

/// Isolated eigenvalue candidates `(value, algebraic multiplicity)` of the
/// unperturbed block structure.
fn eigen_candidates(nf: &NormalForm) -> Result<Vec<(C64, u64)>> {
    let mut out: Vec<(C64, u64)> = Vec::new();
    let mut push = |v: C64, k: u64| {
        if k == 0 {
            return;
        }
        if let Some(slot) = out.iter_mut().find(|(w, _)| *w == v) {
            slot.1 += k;
        } else {
            out.push((v, k));
        }
    };
    for b in &nf.blocks {
        if b.factor == c64(0.0, 0.0) {
            if let Some(len) = b.range.len() {
                push(b.offset, len);
            }
            continue;
        }
        match &b.core {
            BlockCore::Shift { .. } => {
                if let Some(len) = b.range.len() {
                    // finite nilpotent chain: σ = {0}, algebraic multiplicity = len
                    push(b.offset, len);
                }
            }
            BlockCore::Diagonal { rule } => {
                for (v, k) in rule.isolated_values() {
                    push(b.offset + b.factor * v, k);
                }
            }
            BlockCore::Matrix { entries } => {
                for (v, k) in matrix_eigenvalues(entries)? {
                    push(b.offset + b.factor * v, k);
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(out)
}

/// Eigenvalues with algebraic multiplicities of a dense complex block.
///
/// Triangular matrices read off their diagonal exactly (this covers the
/// nilpotent perturbation blocks, whose numerical spectra would be wildly
/// ill-conditioned). General matrices go through a real 2n×2n embedding;
/// each candidate's algebraic multiplicity is confirmed by the rank defect
/// of `(λ - M)^n`.
pub(crate) fn matrix_eigenvalues(entries: &CMatrix) -> Result<Vec<(C64, u64)>> {
    let n = entries.dim();
    let lower_tri = entries.0.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, z)| j <= i || *z == c64(0.0, 0.0))
    });
    let upper_tri = entries.0.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, z)| j >= i || *z == c64(0.0, 0.0))
    });
    if lower_tri || upper_tri {
        let mut out: Vec<(C64, u64)> = Vec::new();
        for i in 0..n {
            let v = entries.0[i][i];
            if let Some(slot) = out.iter_mut().find(|(w, _)| *w == v) {
                slot.1 += 1;
            } else {
                out.push((v, 1));
            }
        }
        return Ok(out);
    }

    // Real embedding [[Re, -Im], [Im, Re]]; its spectrum is
    // eig(M) ∪ conj(eig(M)).
    let mut e = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = entries.0[i][j];
            e[(i, j)] = z.re;
            e[(i, j + n)] = -z.im;
            e[(i + n, j)] = z.im;
            e[(i + n, j + n)] = z.re;
        }
    }
    let scale = e.norm().max(1.0);
    let raw = e.complex_eigenvalues();
    // Cluster candidates, then confirm against M itself.
    let mut candidates: Vec<C64> = Vec::new();
    'outer: for v in raw.iter() {
        let v = c64(v.re, v.im);
        for c in &candidates {
            if (v - *c).norm() <= 1e-8 * scale {
                continue 'outer;
            }
        }
        candidates.push(v);
    }
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = entries.0[i][j];
        }
    }
    let mut out: Vec<(C64, u64)> = Vec::new();
    let mut total = 0u64;
    for v in candidates {
        let mut shifted = -m.clone();
        for i in 0..n {
            shifted[(i, i)] += Complex::new(v.re, v.im);
        }
        // (λ - M)^n: rank defect = algebraic multiplicity.
        let mut power = DMatrix::<Complex<f64>>::identity(n, n);
        for _ in 0..n {
            power = &power * &shifted;
            // rescale to keep magnitudes tame
            let nrm = power.norm();
            if nrm > 0.0 {
                power /= Complex::new(nrm, 0.0);
            }
        }
        let svd = power.svd(false, false);
        let psc = svd.singular_values.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
        let mult = svd
            .singular_values
            .iter()
            .filter(|&&s| s <= 1e-8 * psc)
            .count() as u64;
        if mult > 0 {
            out.push((v, mult));
            total += mult;
        }
    }
    if total != n as u64 {
        return Err(Error::unsupported(format!(
            "matrix spectrum could not be resolved: multiplicities sum to {total}, dimension {n}"
        )));
    }
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(out)
}

/// Compute the full spectral picture of a validated operator spec.
pub fn spectral_picture(op: &OperatorSpec) -> Result<SpectralPicture> {
    let nf = normalize(op)?;
    let perturbed = !nf.perturbation.is_empty();
    let curves_raw = essential_curves_of(&nf);
    let eigens = if perturbed { Vec::new() } else { eigen_candidates(&nf)? };
    let norm_bound = nf.norm_bound();

    let avoid: Vec<C64> = eigens.iter().map(|(v, _)| *v).collect();
    let arr = Arrangement::build_avoiding(&curves_raw, &avoid)?;
    let curves = arr.circles.clone();

    let mut regions = Vec::with_capacity(arr.cells.len());
    for cell in &arr.cells {
        let rep = cell.representative;
        let mut ker = 0u64;
        let mut coker = 0u64;
        for b in &nf.blocks {
            let (k, c) = block_defect_dims(b, rep)?;
            ker += k;
            coker += c;
        }
        let index = ker as i64 - coker as i64;
        let unbounded = cell.outer.is_none();
        let (dim_ker, dim_coker, min_index, in_spectrum) = if perturbed && !unbounded {
            (Dim::Unknown, Dim::Unknown, Dim::Unknown, index != 0)
        } else {
            (
                Dim::Exact(ker),
                Dim::Exact(coker),
                Dim::Exact(ker.min(coker)),
                index != 0 || ker > 0 || coker > 0,
            )
        };
        regions.push(Region {
            outer: cell.outer.map(|i| arr.circles[i]),
            inner: cell.inner.iter().map(|&i| arr.circles[i]).collect(),
            representative: rep,
            in_spectrum,
            semi_fredholm: true,
            index,
            dim_ker,
            dim_coker,
            min_index,
        });
    }

    if let Some(r0) = regions.first() {
        debug_assert!(r0.outer.is_none());
        if r0.index != 0 || r0.in_spectrum {
            return Err(Error::invalid("unbounded region failed to be resolvent"));
        }
    }

    // Place isolated eigenvalues: absorbed on curves, recorded in resolvent
    // regions, rejected when they would puncture a semi-Fredholm spectral
    // region (that would create a singular point the class excludes).
    let mut sigma_zero = Vec::new();
    for (v, mult) in eigens {
        if curves.iter().any(|c| on_curve(c, v)) {
            continue;
        }
        let cell = arr.locate(v)?;
        let region = &regions[cell];
        if region.in_spectrum {
            return Err(Error::unsupported(format!(
                "isolated eigenvalue {v} falls inside a spectral region (semi-Fredholm singular point)"
            )));
        }
        sigma_zero.push(SigmaZeroPoint { point: v, multiplicity: mult });
    }

    Ok(SpectralPicture {
        essential_curves: curves,
        regions,
        sigma_zero,
        sigma_zero_exact: !perturbed,
        norm_bound,
    })
}

/// A piece of the Weyl spectrum: a curve or a closed spectral region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeylPiece {
    Curve { circle: Circle },
    RegionClosure { outer: Option<Circle>, inner: Vec<Circle> },
}

/// σ_w(T) = σ(T) minus the Fredholm points of index 0: all essential
/// curves together with the closures of nonzero-index regions. Invariant
/// under finite-rank perturbation, hence exact even when defect dimensions
/// are unknown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylSpectrum {
    pub pieces: Vec<WeylPiece>,
}

pub fn weyl_spectrum(picture: &SpectralPicture) -> WeylSpectrum {
    let mut pieces: Vec<WeylPiece> = picture
        .essential_curves
        .iter()
        .map(|c| WeylPiece::Curve { circle: *c })
        .collect();
    for r in &picture.regions {
        if r.index != 0 {
            pieces.push(WeylPiece::RegionClosure { outer: r.outer, inner: r.inner.clone() });
        }
    }
    WeylSpectrum { pieces }
}

impl WeylSpectrum {
    /// Is `σ_w ∪ ∂𝔻` connected? Decided combinatorially on the adjacency
    /// graph of pieces plus the unit circle.
    pub fn connected_with_unit_circle(&self) -> bool {
        if self.pieces.is_empty() {
            return true; // σ_w empty: the union is just ∂𝔻
        }
        let n = self.pieces.len() + 1; // last node = ∂𝔻
        let unit = Circle::unit();
        let mut adj = vec![vec![false; n]; n];
        let touch_circle = |a: &Circle, b: &Circle| -> bool {
            !matches!(
                circle_relation(a, b),
                CircleRel::DisjointOutside | CircleRel::Nested { .. }
            )
        };
        let circle_meets_piece = |c: &Circle, p: &WeylPiece| -> bool {
            match p {
                WeylPiece::Curve { circle } => touch_circle(c, circle),
                WeylPiece::RegionClosure { outer, inner } => {
                    // c meets the closed region iff it is not wholly outside
                    // the outer circle and not strictly inside a hole.
                    let outside = match outer {
                        Some(o) => matches!(
                            circle_relation(c, o),
                            CircleRel::DisjointOutside
                        ) || matches!(
                            circle_relation(o, c),
                            CircleRel::Nested { first_inside: true }
                        ),
                        None => false,
                    };
                    if outside {
                        return false;
                    }
                    let swallowed = inner.iter().any(|h| {
                        matches!(circle_relation(c, h), CircleRel::Nested { first_inside: true })
                    });
                    !swallowed
                }
            }
        };
        let pieces_meet = |a: &WeylPiece, b: &WeylPiece| -> bool {
            match (a, b) {
                (WeylPiece::Curve { circle }, other) | (other, WeylPiece::Curve { circle }) => {
                    circle_meets_piece(circle, other)
                }
                (
                    WeylPiece::RegionClosure { outer: oa, inner: ia },
                    WeylPiece::RegionClosure { outer: ob, inner: ib },
                ) => {
                    // Closed cells of one arrangement meet iff they share a
                    // bounding circle or touch at a tangency.
                    let bounds_a: Vec<Circle> =
                        oa.iter().copied().chain(ia.iter().copied()).collect();
                    let bounds_b: Vec<Circle> =
                        ob.iter().copied().chain(ib.iter().copied()).collect();
                    bounds_a.iter().any(|ca| {
                        bounds_b.iter().any(|cb| {
                            matches!(circle_relation(ca, cb), CircleRel::Equal { .. })
                                || circle_relation(ca, cb).is_tangent()
                        })
                    })
                }
            }
        };
        for i in 0..self.pieces.len() {
            for j in (i + 1)..self.pieces.len() {
                if pieces_meet(&self.pieces[i], &self.pieces[j]) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
            if circle_meets_piece(&unit, &self.pieces[i]) {
                adj[i][n - 1] = true;
                adj[n - 1][i] = true;
            }
        }
        // BFS from ∂𝔻.
        let mut seen = vec![false; n];
        let mut queue = vec![n - 1];
        seen[n - 1] = true;
        while let Some(v) = queue.pop() {
            for (w, &edge) in adj[v].iter().enumerate() {
                if edge && !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}
