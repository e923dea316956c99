mod common;

use common::random_design;
use ortho3r::classify::{analytic_group, AnalyticLabel};
use ortho3r::ikquartic::{ik, iks_count, RESIDUAL_TOL};
use ortho3r::model::{family_case, fk, reduced_singularity};
use ortho3r::workspace::{cavities, GridSpec, IksField};
use ortho3r::{DesignParams, FamilyCase, JointConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn design() -> impl Strategy<Value = DesignParams> {
    (0usize..10, any::<u64>()).prop_map(|(k, seed)| {
        random_design(&mut ChaCha8Rng::seed_from_u64(seed), FamilyCase::ALL[k])
    })
}

fn joints() -> impl Strategy<Value = JointConfig> {
    (-PI..PI, -PI..PI, -PI..PI).prop_map(|(a, b, c)| JointConfig::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn generic_points_have_an_even_number_of_solutions(p in design(), q in joints()) {
        let s = reduced_singularity(&p, q.theta2, q.theta3).abs();
        prop_assume!(s > 1e-3 * p.reach_bound().powi(3));
        let (x, sec) = fk(&p, &q);
        let sols = ik(&p, &x, RESIDUAL_TOL).unwrap();
        prop_assume!(!sols.degenerate);
        let n = iks_count(&p, &sec);
        prop_assert!(n == 2 || n == 4, "{} at {:?}", n, sec);
        prop_assert_eq!(n as usize, sols.len());
    }

    #[test]
    fn analytic_label_is_scale_free(p in design(), k in 0.05..20.0f64) {
        let a = analytic_group(&p).unwrap();
        let b = analytic_group(&p.scaled(k)).unwrap();
        if let (AnalyticLabel::Group(x), AnalyticLabel::Group(y)) = (a.label, b.label) {
            prop_assert_eq!(x, y);
            prop_assert_eq!(x.family(), family_case(&p).unwrap());
        }
    }

    #[test]
    fn voids_never_touch_the_border(cells in prop::collection::vec(0u8..3, 64 * 128)) {
        let g = GridSpec::new(1.0, 64).unwrap();
        let mut field = IksField::all_zero(g);
        for (k, c) in cells.into_iter().enumerate() {
            let (row, col) = (k / 64, k % 64);
            let inner = row > 0 && row < g.rows() - 1 && col < g.cols() - 1;
            field.counts[k] = if inner { 2 * c } else { 0 };
        }
        let c = cavities(&field);
        let zeros = field.counts.iter().filter(|&&v| v == 0).count();
        prop_assert!(c.voids.iter().map(|v| v.cells).sum::<usize>() < zeros);
        for v in &c.voids {
            let (row, col) = g.locate(&v.representative).unwrap();
            prop_assert!(row > 0 && row < g.rows() - 1 && col > 0 && col < g.cols() - 1);
        }
        prop_assert!((0.0..=1.0).contains(&c.hole_ratio));
    }
}
