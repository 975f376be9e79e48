mod common;

use asnp_core::dwork::{np_pipeline, run_pipeline, traces_for, truncation_dim, PipelineOptions};
use asnp_core::finite_field::solve_lambda_power;
use asnp_core::padic::{PadicCtx, PiRing};
use asnp_core::polygon::polygon_eq;
use asnp_core::scan::{scan_lambda, search_family, ScanOptions, Verdict};
use asnp_core::{FieldCtx, NewtonPolygon, PolyFq, Valuation};
use num_rational::Rational64;

use common::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn untwisted_polygon() -> NewtonPolygon {
    NewtonPolygon::from_slopes(
        &[
            (r(1, 2), 1),
            (r(3, 4), 2),
            (r(1, 1), 1),
            (r(5, 4), 2),
            (r(3, 2), 1),
        ],
        true,
    )
}

fn twisted_polygon() -> NewtonPolygon {
    NewtonPolygon::from_slopes(&[(r(1, 2), 1), (r(1, 1), 5), (r(3, 2), 1)], true)
}

fn quotient(field: &FieldCtx, n: u32) -> PiRing {
    PiRing::quotient(PadicCtx::new(field.clone(), n).unwrap())
}

#[test]
fn squared_and_cubed_traces_match_published_values() {
    let field = f25();
    let ring = quotient(&field, 3);
    let f = octic(&field);
    let traces = traces_for(
        &field,
        &f,
        &field.one(),
        &ring,
        truncation_dim(5, 2, 8, 3),
        3,
    )
    .unwrap();
    assert_eq!(
        ring.int_components(&traces[1]).unwrap(),
        vec![95, 105, 0, 60]
    );
    assert_eq!(
        ring.int_components(&traces[2]).unwrap(),
        vec![100, 25, 70, 45]
    );
}

#[test]
fn traces_agree_with_character_sum_enumeration() {
    let field = f25();
    let ring = quotient(&field, 3);
    let f = octic(&field);
    let dim = truncation_dim(5, 2, 8, 3);
    let mut lambdas = vec![field.one()];
    lambdas.extend(solve_lambda_power(&field, &field.from_int(-1)));
    for lambda in &lambdas {
        let traces = traces_for(&field, &f, lambda, &ring, dim, 3).unwrap();
        for (k, t) in traces.iter().enumerate() {
            assert_eq!(
                t,
                &trace_by_enumeration(&field, &f, lambda, &ring, k + 1),
                "lambda {lambda:?} k {}",
                k + 1
            );
        }
    }
    let first = traces_for(&field, &f, &field.one(), &ring, dim, 1).unwrap();
    assert_eq!(
        ring.int_components(&first[0]).unwrap(),
        vec![20, 90, 71, 41]
    );
}

#[test]
fn twisted_traces_have_no_odd_components() {
    let field = f25();
    let ring = quotient(&field, 3);
    let f = octic(&field);
    let roots = solve_lambda_power(&field, &field.from_int(-1));
    assert_eq!(roots.len(), 4);
    for lambda in &roots {
        for t in traces_for(&field, &f, lambda, &ring, truncation_dim(5, 2, 8, 3), 3).unwrap() {
            let c = ring.int_components(&t).unwrap();
            assert_eq!((c[1], c[3]), (0, 0), "lambda {lambda:?}");
        }
    }
}

#[test]
fn counterexample_polygons() {
    let f = [0, 0, 1, 0, 0, 0, 1, 0, 1];
    let (c1, p1) = np_pipeline(5, 2, Some(vec![2, 4, 1]), &f, &[1], Some(3), Some(3)).unwrap();
    assert_eq!(p1, untwisted_polygon());
    assert_eq!(
        &c1.valuations[..3],
        &[
            Valuation::exact(1, 2),
            Valuation::exact(5, 4),
            Valuation::exact(2, 1)
        ]
    );
    let (c2, p2) = np_pipeline(5, 2, Some(vec![2, 4, 1]), &f, &[2, 1], Some(3), Some(3)).unwrap();
    assert_eq!(p2, twisted_polygon());
    assert_eq!(c2.valuations[0], Valuation::exact(1, 2));
    assert!(c2.valuations[1].value() >= r(2, 1));
    assert!(c2.valuations[2].value() >= r(3, 1));
    let diff = polygon_eq(&p1, &p2).unwrap();
    assert!(!diff.equal);
    assert_eq!(p1.breakpoints(), vec![1, 3, 4, 6]);
    assert_eq!(p2.breakpoints(), vec![1, 6]);
}

#[test]
fn escalation_certifies_without_explicit_precision() {
    let field = f25();
    let f = octic(&field);
    let report = run_pipeline(&field, &f, &field.one(), &PipelineOptions::default()).unwrap();
    assert!(report.polygon.certified);
    assert_eq!(report.polygon, untwisted_polygon());
}

#[test]
fn prime_field_scalars_do_not_move_the_polygon() {
    let field = f25();
    let f = octic(&field);
    let opts = PipelineOptions {
        precision: Some(3),
        num_traces: Some(3),
        dim: None,
    };
    let base = run_pipeline(&field, &f, &field.one(), &opts).unwrap();
    let doubled = run_pipeline(
        &field,
        &f.scale(&field, &field.from_int(2)),
        &field.one(),
        &opts,
    )
    .unwrap();
    assert!(polygon_eq(&base.polygon, &doubled.polygon).unwrap().equal);
    assert_eq!(base.valuations(), doubled.valuations());
}

#[test]
fn scan_flags_the_octic() {
    let field = f25();
    let report = scan_lambda(&field, &octic(&field), &ScanOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Varies);
    assert_eq!(report.classes.len(), 6);
    let minus_one = field.from_int(-1);
    let twisted = report
        .classes
        .iter()
        .find(|c| c.class == minus_one)
        .unwrap();
    let trivial = report
        .classes
        .iter()
        .find(|c| c.class == field.one())
        .unwrap();
    assert_eq!(twisted.polygon, twisted_polygon());
    assert_eq!(trivial.polygon, untwisted_polygon());
}

#[test]
fn search_up_to_degree_eight_finds_the_octic() {
    let field = f25();
    let report = search_family(
        &field,
        &[1, 2, 3, 4, 6, 7, 8],
        &[0, 1],
        true,
        &ScanOptions::default(),
    );
    assert_eq!(report.scanned, 1 + 2 + 4 + 8 + 32 + 64 + 128);
    assert!(report.failures.is_empty());
    let found: Vec<&str> = report.witnesses.iter().map(|w| w.f.as_str()).collect();
    assert!(found.contains(&"x^8+x^6+x^2"), "witnesses: {found:?}");
}

#[test]
fn prime_field_search_finds_nothing() {
    let field = FieldCtx::with_default(5, 1).unwrap();
    let report = search_family(
        &field,
        &[2, 3, 4, 6],
        &[0, 1, 2],
        true,
        &ScanOptions::default(),
    );
    assert!(report.witnesses.is_empty());
    assert_eq!(report.inconclusive, 0);
}

#[test]
fn degree_eleven_witness() {
    let field = f25();
    let f = PolyFq::from_ints(&field, &[0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1]);
    let report = scan_lambda(&field, &f, &ScanOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Varies);
    assert_eq!(report.witnesses.len(), 2);
}
