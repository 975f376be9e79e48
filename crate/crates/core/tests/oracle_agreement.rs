mod common;

use asnp_core::dwork::{run_pipeline, PipelineOptions};
use asnp_core::oracle::{oracle_np, ORACLE_MAX_ELEMENTS};
use asnp_core::polygon::hodge_polygon;
use asnp_core::scan::candidates;
use asnp_core::{FieldCtx, NewtonPolygon, PolyFq};
use num_rational::Rational64;

use common::*;

fn pipeline_polygon(field: &FieldCtx, f: &PolyFq) -> NewtonPolygon {
    let report = run_pipeline(field, f, &field.one(), &PipelineOptions::default()).unwrap();
    assert!(report.polygon.certified, "{} uncertified", f.display(field));
    report.polygon
}

#[test]
fn all_small_ternary_polynomials() {
    let field = FieldCtx::with_default(3, 1).unwrap();
    for f in candidates(&field, &[1, 2, 4, 5], &[0, 1, 2], false) {
        let oracle = oracle_np(&field, &f, ORACLE_MAX_ELEMENTS).unwrap();
        assert_eq!(
            pipeline_polygon(&field, &f),
            oracle.polygon,
            "{}",
            f.display(&field)
        );
    }
}

#[test]
fn random_polynomials_over_f9_and_f7() {
    let mut rng = rng(17);
    for (p, a, degrees) in [(3, 2, vec![2, 4, 5]), (7, 1, vec![2, 3, 4, 5, 6])] {
        let field = FieldCtx::with_default(p, a).unwrap();
        for _ in 0..12 {
            let f = random_poly(&field, &mut rng, &degrees, false);
            let oracle = oracle_np(&field, &f, ORACLE_MAX_ELEMENTS).unwrap();
            assert_eq!(
                pipeline_polygon(&field, &f),
                oracle.polygon,
                "{}",
                f.display(&field)
            );
        }
    }
}

#[test]
fn quadratic_gauss_sum() {
    let field = FieldCtx::with_default(5, 1).unwrap();
    let f = PolyFq::from_ints(&field, &[0, 0, 1]);
    let half = NewtonPolygon::from_slopes(&[(Rational64::new(1, 2), 1)], true);
    assert_eq!(
        oracle_np(&field, &f, ORACLE_MAX_ELEMENTS).unwrap().polygon,
        half
    );
    for lambda in field.nonzero_elements() {
        let report = run_pipeline(&field, &f, &lambda, &PipelineOptions::default()).unwrap();
        assert_eq!(report.polygon, half);
    }
}

#[test]
fn linear_polynomial_has_empty_polygon() {
    let field = FieldCtx::with_default(3, 1).unwrap();
    let f = PolyFq::from_ints(&field, &[0, 1]);
    let oracle = oracle_np(&field, &f, ORACLE_MAX_ELEMENTS).unwrap();
    assert_eq!(oracle.polygon.length(), 0);
    assert_eq!(oracle.full.slopes, vec![(Rational64::from_integer(0), 1)]);
    let report = run_pipeline(&field, &f, &field.one(), &PipelineOptions::default()).unwrap();
    assert!(report.polygon.certified);
    assert_eq!(report.polygon.length(), 0);
}

#[test]
fn base_change_to_f25_doubles_the_polygon() {
    let f5 = FieldCtx::with_default(5, 1).unwrap();
    let f25 = f25();
    for coeffs in [
        vec![0, 0, 1],
        vec![0, 1, 0, 1],
        vec![0, 0, 1, 0, 1],
        vec![0, 2, 0, 0, 1, 0, 1],
    ] {
        let small = pipeline_polygon(&f5, &PolyFq::from_ints(&f5, &coeffs));
        let big = pipeline_polygon(&f25, &PolyFq::from_ints(&f25, &coeffs));
        let doubled: Vec<(Rational64, u32)> = small
            .slopes
            .iter()
            .map(|&(s, m)| (s * Rational64::from_integer(2), m))
            .collect();
        assert_eq!(
            big,
            NewtonPolygon::from_slopes(&doubled, true),
            "{coeffs:?}"
        );
    }
}

#[test]
fn oracle_polygons_lie_above_hodge() {
    let field = FieldCtx::with_default(5, 1).unwrap();
    for f in candidates(&field, &[2, 3, 4], &[0, 1, 3], true) {
        let oracle = oracle_np(&field, &f, ORACLE_MAX_ELEMENTS).unwrap();
        assert!(
            oracle.polygon.lies_above(&hodge_polygon(f.degree(), 1)),
            "{}",
            f.display(&field)
        );
    }
}
