//! Cross-engine invariants: properties that tie two or more engines
//! together, checked on the gallery and on hand-built composites.

use chaoscope_core::classify::{classify, Truth, Witness};
use chaoscope_core::gallery::{gallery, gallery_names};
use chaoscope_core::numeric::{c64, C64};
use chaoscope_core::operator::{OperatorSpec, RankOneTerm, SumBlock};
use chaoscope_core::orbit::{orbit, unimodal_certify};
use chaoscope_core::rand::Rng;
use chaoscope_core::rand::SeedableRng;
use chaoscope_core::rand_chacha::ChaCha8Rng;
use chaoscope_core::spectral::{spectral_picture, SpectralPicture};
use chaoscope_core::vector::SparseVector;
use chaoscope_core::Interval;

fn random_vector(rng: &mut ChaCha8Rng, dom: &Interval, width: i64) -> SparseVector {
    let mut v = SparseVector::zero();
    for _ in 0..6 {
        let i = rng.random_range(-width..=width);
        if dom.contains(i) {
            v.add_to(i, c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        }
    }
    v
}

#[test]
fn adjoint_identity_across_the_whole_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let sum = OperatorSpec::DirectSum {
        blocks: vec![
            SumBlock {
                range: Interval::neg_inf_to(-1),
                op: Box::new(chaoscope_core::operator::backward_shift(1.5)),
            },
            SumBlock {
                range: Interval::nat(),
                op: Box::new(chaoscope_core::operator::backward_shift(2.0)),
            },
        ],
    };
    let perturbed = OperatorSpec::FiniteRankPerturbation {
        inner: Box::new(sum.clone()),
        terms: vec![RankOneTerm {
            u: SparseVector::basis(-3).scale(c64(0.4, 0.7)),
            v: SparseVector::basis(2).add(&SparseVector::basis(-1)),
            c: c64(0.3, -0.2),
        }],
    };
    let scaled = OperatorSpec::Scale {
        factor: c64(0.0, 2.0),
        inner: Box::new(gallery("ex-3.6-unimodal-boundary").unwrap().spec),
    };
    for op in [sum, perturbed, scaled] {
        let adj = op.adjoint();
        let dom = op.domain();
        for _ in 0..40 {
            let x = random_vector(&mut rng, &dom, 8);
            let y = random_vector(&mut rng, &dom, 8);
            let lhs = op.apply(&x).unwrap().inner(&y);
            let rhs = x.inner(&adj.apply(&y).unwrap());
            assert!((lhs - rhs).norm() <= 1e-12, "⟨Tx,y⟩ ≠ ⟨x,T*y⟩: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn pair_distance_two_routes_agree() {
    // d_i = ‖T^i x - T^i y‖ must match ‖T^i (x - y)‖ to 1e-10 relative.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for name in ["ex-2.10-annulus", "ex-3.6-unimodal-boundary", "backward-shift-2B"] {
        let op = gallery(name).unwrap().spec;
        let dom = op.domain();
        let x = random_vector(&mut rng, &dom, 10);
        let y = random_vector(&mut rng, &dom, 10);
        let mut tx = x.clone();
        let mut ty = y.clone();
        let mut diff = x.sub(&y);
        for i in 0..60 {
            let direct = tx.sub(&ty).norm();
            let linear = diff.norm();
            let scale = direct.max(linear).max(1e-300);
            assert!(
                (direct - linear).abs() <= 1e-10 * scale,
                "{name} step {i}: {direct} vs {linear}"
            );
            tx = op.apply(&tx).unwrap();
            ty = op.apply(&ty).unwrap();
            diff = op.apply(&diff).unwrap();
        }
    }
}

#[test]
fn contractions_have_strictly_decreasing_traces() {
    let op = gallery("half-backward").unwrap().spec;
    assert!(op.norm_bound() < 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let x = random_vector(&mut rng, &op.domain(), 12);
        if x.is_zero() {
            continue;
        }
        let trace = orbit(&op, &x, 40).unwrap();
        for w in trace.norms.windows(2) {
            if w[0] == 0.0 {
                assert_eq!(w[1], 0.0);
            } else {
                assert!(w[1] < w[0], "trace must strictly decrease: {} -> {}", w[0], w[1]);
            }
        }
    }
}

#[test]
fn unimodal_certificates_reverify_independently() {
    // Success implies the γ-growth inequality holds under independent
    // re-application of the operator to the witness.
    let op = gallery("backward-shift-2B").unwrap().spec;
    let cert = unimodal_certify(&op, 2.0, 25, 120, 0..=40).unwrap().expect("certificate");
    let base = cert.witness.norm();
    for i in 1..=cert.m {
        let img = op.apply_power(&cert.witness, i as u32).unwrap();
        assert!(img.norm() >= cert.gamma.powi(i as i32) * base);
        assert_eq!(img.norm(), cert.growth_norms[i - 1]);
    }
}

#[test]
fn finite_rank_perturbation_keeps_curves_and_indices_at_sampled_points() {
    let base = gallery("ex-2.10-annulus").unwrap().spec;
    let pert = OperatorSpec::FiniteRankPerturbation {
        inner: Box::new(base.clone()),
        terms: vec![
            RankOneTerm {
                u: SparseVector::basis(0),
                v: SparseVector::basis(-2),
                c: c64(0.9, 0.0),
            },
            RankOneTerm {
                u: SparseVector::basis(3).scale(c64(0.0, 1.0)),
                v: SparseVector::basis(1),
                c: c64(0.0, -0.5),
            },
        ],
    };
    let p0 = spectral_picture(&base).unwrap();
    let p1 = spectral_picture(&pert).unwrap();
    assert_eq!(p0.essential_curves, p1.essential_curves);
    // 20 sample points per region: indices agree.
    for region in &p1.regions {
        let rep = region.representative;
        let gap = p1
            .essential_curves
            .iter()
            .map(|c| c.boundary_distance(rep).abs())
            .fold(f64::INFINITY, f64::min);
        let delta = gap / 2.0;
        for k in 0..20 {
            let theta = k as f64 * std::f64::consts::TAU / 20.0;
            let p = rep + c64(theta.cos(), theta.sin()) * (delta * 0.8);
            let (Ok(a), Ok(b)) = (p0.locate(p), p1.locate(p)) else {
                continue;
            };
            assert_eq!(a.index, b.index, "index changed at {p}");
        }
    }
}

#[test]
fn direct_sum_indices_add_at_shared_sample_points() {
    let a = chaoscope_core::operator::backward_shift(0.5);
    let b = chaoscope_core::operator::backward_shift(2.0);
    let sum = OperatorSpec::DirectSum {
        blocks: vec![
            SumBlock { range: Interval::neg_inf_to(-1), op: Box::new(a.clone()) },
            SumBlock { range: Interval::nat(), op: Box::new(b.clone()) },
        ],
    };
    let pa = spectral_picture(&a).unwrap();
    let pb = spectral_picture(&b).unwrap();
    let ps = spectral_picture(&sum).unwrap();
    for sample in [c64(0.2, 0.1), c64(0.0, -1.2), c64(1.7, 0.9), c64(3.0, 0.0), c64(-0.3, 0.3)] {
        let (Ok(ra), Ok(rb), Ok(rs)) = (pa.locate(sample), pb.locate(sample), ps.locate(sample))
        else {
            continue;
        };
        assert_eq!(rs.index, ra.index + rb.index, "at {sample}");
    }
}

#[test]
fn rotation_covariance_across_the_gallery() {
    for name in gallery_names() {
        let picture = spectral_picture(&gallery(name).unwrap().spec).unwrap();
        let v0 = classify(&picture).unwrap();
        for theta in [0.7, 2.1, 3.9] {
            let v = classify(&picture.rotate(theta)).unwrap();
            assert_eq!(v.e1.value, v0.e1.value, "{name} E1 at θ={theta}");
            assert_eq!(v.e2.value, v0.e2.value, "{name} E2 at θ={theta}");
            assert_eq!(v.f.value, v0.f.value, "{name} F at θ={theta}");
            assert_eq!(v.g0.value, v0.g0.value, "{name} G0 at θ={theta}");
            assert_eq!(v.g1.value, v0.g1.value, "{name} G1 at θ={theta}");
            assert_eq!(v.g2.value, v0.g2.value, "{name} G2 at θ={theta}");
        }
    }
}

#[test]
fn witnesses_reverify_on_gallery_verdicts() {
    for name in gallery_names() {
        let picture = spectral_picture(&gallery(name).unwrap().spec).unwrap();
        let v = classify(&picture).unwrap();
        if v.f.value == Truth::True {
            match v.f.witness {
                Some(Witness::Point { at }) => {
                    assert!((at.norm() - 1.0).abs() <= 1e-12, "{name}: F witness off ∂𝔻");
                    assert!(picture.locate(at).unwrap().index > 0, "{name}: F witness index");
                }
                other => panic!("{name}: F true without a point witness: {other:?}"),
            }
        }
        if v.e1.value == Truth::True {
            match &v.e1.witness {
                Some(Witness::Point { at }) => {
                    let on_curve = picture
                        .essential_curves
                        .iter()
                        .any(|c| c.boundary_distance(*at).abs() <= 1e-9);
                    assert!(on_curve && (at.norm() - 1.0).abs() <= 1e-9, "{name}: E1 witness");
                }
                Some(Witness::Curve { circle }) => {
                    assert!(
                        (circle.radius - 1.0).abs() <= 1e-12 && circle.center.norm() <= 1e-12,
                        "{name}: E1 curve witness must be ∂𝔻 itself"
                    );
                }
                None => panic!("{name}: E1 true without witness"),
            }
        }
    }
}

#[test]
fn pictures_and_verdicts_round_trip_through_json() {
    for name in gallery_names() {
        let picture = spectral_picture(&gallery(name).unwrap().spec).unwrap();
        let text = serde_json::to_string(&picture).unwrap();
        let back: SpectralPicture = serde_json::from_str(&text).unwrap();
        assert_eq!(back, picture, "{name}: picture JSON round trip");

        let verdict = classify(&picture).unwrap();
        let vtext = serde_json::to_string(&verdict).unwrap();
        let vback: chaoscope_core::ClassificationVerdict = serde_json::from_str(&vtext).unwrap();
        assert_eq!(vback, verdict, "{name}: verdict JSON round trip");
    }
}

#[test]
fn csv_emitters_have_expected_shapes() {
    let picture = spectral_picture(&gallery("ex-2.10-annulus").unwrap().spec).unwrap();
    let csv = picture.boundary_csv(64);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "curve,point,re,im");
    assert_eq!(lines.len(), 1 + 2 * 64);

    let op = gallery("backward-shift-2B").unwrap().spec;
    let trace = orbit(&op, &SparseVector::basis(3), 10).unwrap();
    let csv = trace.csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,norm");
    assert_eq!(lines.len(), 12);
}

#[test]
fn resolvent_regions_outside_norm_bound_are_trivial() {
    for name in gallery_names() {
        let picture = spectral_picture(&gallery(name).unwrap().spec).unwrap();
        for r in &picture.regions {
            if r.representative.norm() > picture.norm_bound {
                assert_eq!(r.index, 0, "{name}");
                assert!(!r.in_spectrum, "{name}");
                assert_eq!(r.dim_ker.exact(), Some(0), "{name}");
                assert_eq!(r.dim_coker.exact(), Some(0), "{name}");
            }
        }
        picture.validate().unwrap();
    }
}
