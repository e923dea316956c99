mod common;

use common::design;
use ortho3r::classify::{
    analytic_group, numeric_verdict, AnalyticLabel, ClassifyError, GroupLabel, VerdictWarning,
    REFERENCE_DESIGNS,
};
use ortho3r::workspace::GridSpec;
use ortho3r::{DesignParams, FamilyCase, ModelError};

fn verdict(p: &DesignParams, n: usize) -> ortho3r::classify::Verdict {
    numeric_verdict(p, GridSpec::for_design(p, n).unwrap()).unwrap()
}

#[test]
fn case_i_examples_at_r3_half() {
    let i2 = verdict(&design([1.0, 3.0, 0.7, 0.0, 0.5]), 512);
    assert_eq!(i2.numeric, GroupLabel::I2);
    assert_eq!((i2.metrics.node_count, i2.metrics.void_count), (2, 1));
    assert!(i2.agree);

    let i3 = verdict(&design([1.0, 0.5, 0.7, 0.0, 0.5]), 512);
    assert_eq!(i3.numeric, GroupLabel::I3);
    assert_eq!((i3.metrics.node_count, i3.metrics.void_count), (0, 1));
    assert!(i3
        .warnings
        .iter()
        .any(|w| matches!(w, VerdictWarning::ProvisionalRule(_))));
}

#[test]
fn group_h_is_one_four_solution_region() {
    let h = verdict(&design([0.0, 0.0, 1.0, 3.0, 1.0]), 512);
    assert_eq!(h.numeric, GroupLabel::H);
    assert_eq!((h.metrics.node_count, h.metrics.void_count), (0, 0));
    assert!(h.metrics.quaternary_ratio >= 0.99);
}

#[test]
fn labels_are_scale_invariant() {
    for r in REFERENCE_DESIGNS.iter().filter(|r| {
        matches!(
            r.label,
            GroupLabel::A3 | GroupLabel::D1 | GroupLabel::I2 | GroupLabel::J
        )
    }) {
        for k in [0.5, 2.0, 10.0] {
            assert_eq!(
                verdict(&r.params.scaled(k), 256).numeric,
                r.label,
                "{} x{k}",
                r.label
            );
        }
    }
}

#[test]
fn out_of_family_is_reported() {
    let p = design([1.0, 2.0, 1.0, 1.0, 0.0]);
    assert!(matches!(
        analytic_group(&p),
        Err(ModelError::OutOfFamily(_))
    ));
    let g = GridSpec::for_design(&p, 64).unwrap();
    assert!(matches!(
        numeric_verdict(&p, g),
        Err(ClassifyError::Model(ModelError::OutOfFamily(_)))
    ));
}

#[test]
fn void_below_the_d5_zone_matches_no_group() {
    // d4 < d3 < d2: the point (d2, 0) of the section is unreachable
    let p = design([1.0, 0.6, 0.3, 0.0, 0.0]);
    assert_eq!(
        analytic_group(&p).unwrap().label,
        AnalyticLabel::Group(GroupLabel::D5)
    );
    match numeric_verdict(&p, GridSpec::for_design(&p, 256).unwrap()) {
        Err(ClassifyError::NoSignatureMatch { case, metrics }) => {
            assert_eq!(case, FamilyCase::D);
            assert_eq!((metrics.node_count, metrics.void_count), (0, 1));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(
        ortho3r::ikquartic::iks_count(&p, &ortho3r::SectionPoint::new(1.0, 0.0)),
        0
    );
}

#[test]
fn agreement_and_transition_flags() {
    let p = design([0.0, 2.0, 2.3, 1.0, 0.0]);
    let v = verdict(&p, 512);
    assert_eq!(v.analytic, AnalyticLabel::Group(GroupLabel::A3));
    assert_eq!(v.numeric, GroupLabel::A3);
    assert!(v.agree && v.warnings.is_empty());
    let on = verdict(&design([0.0, 2.0, 2.0, 1.0, 0.0]), 256);
    assert_eq!(on.analytic, AnalyticLabel::Indeterminate);
    assert!(!on.agree);
    assert!(on.warnings.contains(&VerdictWarning::OnTransition));
}
