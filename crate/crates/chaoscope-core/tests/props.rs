//! Property tests: seeded generators over vectors, weight rules and
//! distance sequences.

use proptest::prelude::*;

use chaoscope_core::geometry::{circle_relation, Circle, CircleRel};
use chaoscope_core::numeric::c64;
use chaoscope_core::operator::{Direction, OperatorSpec};
use chaoscope_core::orbit::pair_profile;
use chaoscope_core::vector::SparseVector;
use chaoscope_core::weights::{Formula, Poly, WeightRule, Zone};
use chaoscope_core::Interval;

fn arb_vector() -> impl Strategy<Value = SparseVector> {
    proptest::collection::vec(((-30i64..30), (-2.0f64..2.0), (-2.0f64..2.0)), 0..8).prop_map(
        |entries| {
            let mut v = SparseVector::zero();
            for (i, re, im) in entries {
                v.add_to(i, c64(re, im));
            }
            v
        },
    )
}

fn arb_shift() -> impl Strategy<Value = OperatorSpec> {
    (
        prop_oneof![Just(Direction::Forward), Just(Direction::Backward)],
        0.1f64..3.0,
        0.1f64..3.0,
        -10i64..10,
    )
        .prop_map(|(direction, w_lo, w_hi, split)| OperatorSpec::BilateralShift {
            direction,
            weights: WeightRule {
                zones: vec![
                    Zone { interval: Interval::neg_inf_to(split), formula: Formula::Const(w_lo) },
                    Zone {
                        interval: Interval::from_to_inf(split + 1),
                        formula: Formula::Const(w_hi),
                    },
                ],
                exceptions: Default::default(),
            },
        })
}

proptest! {
    #[test]
    fn vector_algebra_is_consistent(x in arb_vector(), y in arb_vector()) {
        // triangle inequality and exact cancellation
        prop_assert!(x.add(&y).norm() <= x.norm() + y.norm() + 1e-12);
        prop_assert!(x.sub(&x).is_zero());
        // inner product against norm
        let n2 = x.inner(&x).re;
        prop_assert!((n2 - x.norm() * x.norm()).abs() <= 1e-10 * n2.max(1.0));
    }

    #[test]
    fn apply_is_linear(op in arb_shift(), x in arb_vector(), y in arb_vector(),
                       a_re in -2.0f64..2.0, b_im in -2.0f64..2.0) {
        let a = c64(a_re, 0.5);
        let b = c64(0.25, b_im);
        let lhs = op.apply(&x.scale(a).add(&y.scale(b))).unwrap();
        let rhs = op.apply(&x).unwrap().scale(a).add(&op.apply(&y).unwrap().scale(b));
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn norm_bound_dominates(op in arb_shift(), x in arb_vector()) {
        let bound = op.norm_bound();
        let img = op.apply(&x).unwrap();
        prop_assert!(img.norm() <= bound * x.norm() + 1e-12);
    }

    #[test]
    fn distributional_rows_are_exact_monotone_rationals(
        op in arb_shift(),
        x in arb_vector(),
        y in arb_vector(),
        horizon in 4usize..80,
    ) {
        prop_assume!(!x.sub(&y).is_zero());
        let grid = [0.01, 0.1, 1.0, 10.0];
        let profile = pair_profile(&op, &x, &y, horizon, &grid);
        prop_assume!(profile.is_ok());
        let profile = profile.unwrap();
        for row in &profile.rows {
            // counts are monotone in τ and each F value is k/n exactly
            for w in row.counts.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for (ti, &count) in row.counts.iter().enumerate() {
                prop_assert!(count <= row.n as u64);
                let f = row.value(ti);
                prop_assert_eq!(f, count as f64 / row.n as f64);
            }
        }
        for (lo, hi) in profile.lower_envelope.iter().zip(&profile.upper_envelope) {
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn circle_relation_is_symmetric_enough(
        ax in -3.0f64..3.0, ay in -3.0f64..3.0, ar in 0.0f64..3.0,
        bx in -3.0f64..3.0, by in -3.0f64..3.0, br in 0.0f64..3.0,
    ) {
        let a = Circle::new(c64(ax, ay), ar);
        let b = Circle::new(c64(bx, by), br);
        let ab = circle_relation(&a, &b);
        let ba = circle_relation(&b, &a);
        let flipped = match ab {
            CircleRel::Nested { first_inside } => CircleRel::Nested { first_inside: !first_inside },
            other => other,
        };
        prop_assert_eq!(ba, flipped);
    }

    #[test]
    fn poly_affine_composition_matches_direct_eval(
        coeffs in proptest::collection::vec(-3.0f64..3.0, 1..4),
        d in -4i64..4,
        x in -20i64..20,
    ) {
        let p = Poly(coeffs);
        let q = p.compose_shift(d as f64);
        let direct = p.eval((x + d) as f64);
        let composed = q.eval(x as f64);
        prop_assert!((direct - composed).abs() <= 1e-9 * direct.abs().max(1.0));

        let r = p.compose_affine(-1.0, d as f64);
        let direct = p.eval((d - x) as f64);
        let composed = r.eval(x as f64);
        prop_assert!((direct - composed).abs() <= 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn canonical_json_round_trips(op in arb_shift()) {
        let text = op.to_canonical_json();
        let back = OperatorSpec::parse_json(&text).unwrap();
        prop_assert_eq!(back.to_canonical_json(), text);
    }
}
