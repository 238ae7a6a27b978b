mod common;

use std::sync::Arc;

use polylab_core::construct::subfield_embedding;
use polylab_core::io::*;
use polylab_core::{Error, IncidenceGeometry};
use proptest::prelude::*;

const GEOMETRIES: &[&str] = &[
    "triangle.ig",
    "hexagon.ig",
    "pg22.ig",
    "pg23.ig",
    "w2.ig",
    "q43.ig",
    "t2_conic4.ig",
    "h2.ig",
    "grid22.ig",
    "grid33.ig",
    "grid34.ig",
    "dual_grid33.ig",
    "thin_hexagon21.ig",
    "digon33.ig",
];

const MORPHISMS: &[(&str, &str, &str)] = &[
    ("pg22_triangle.igmap", "pg22.ig", "triangle.ig"),
    ("w2_grid22.igmap", "w2.ig", "grid22.ig"),
    ("grid33_grid22.igmap", "grid33.ig", "grid22.ig"),
];

fn read(name: &str) -> Vec<u8> {
    std::fs::read(common::fixture(name)).unwrap()
}

#[test]
fn geometry_fixtures_round_trip_byte_for_byte() {
    for name in GEOMETRIES {
        let bytes = read(name);
        let g = parse_geometry(&bytes).unwrap();
        assert_eq!(write_geometry(&g), bytes, "{name}");
    }
}

#[test]
fn morphism_fixtures_round_trip_byte_for_byte() {
    for (name, src, tgt) in MORPHISMS {
        let bytes = read(name);
        let file = parse_morphism(&bytes).unwrap();
        let phi = file.into_morphism(Arc::new(common::load(src)), Arc::new(common::load(tgt))).unwrap();
        assert!(polylab_core::morphism::verify_morphism(&phi).is_ok());
        assert_eq!(write_morphism(&phi), bytes, "{name}");
    }
}

#[test]
fn comments_and_order_are_normalized() {
    let g = parse_geometry(&read("triangle_commented.ig")).unwrap();
    let canonical = read("triangle.ig");
    assert_eq!(write_geometry(&g), canonical);
    assert_eq!(geometry_hash(&g), geometry_hash(&parse_geometry(&canonical).unwrap()));
}

#[test]
fn digests_are_checked() {
    let file = parse_morphism(&read("pg22_triangle.igmap")).unwrap();
    let wrong = Arc::new(common::load("hexagon.ig"));
    let err = file.into_morphism(Arc::new(common::load("pg22.ig")), wrong).unwrap_err();
    assert!(matches!(err, Error::ContractViolation(_)));
    let h = geometry_hash(&common::load("triangle.ig"));
    assert!(h.starts_with("sha256:") && h.len() == 7 + 64);
}

#[test]
fn embedding_round_trips() {
    let e = subfield_embedding(2, 2).unwrap();
    let bytes = write_morphism(&e);
    let src = parse_geometry(&write_geometry(e.source())).unwrap();
    let tgt = parse_geometry(&write_geometry(e.target())).unwrap();
    let back = parse_morphism(&bytes).unwrap().into_morphism(Arc::new(src), Arc::new(tgt)).unwrap();
    assert_eq!(back, e);
    assert_eq!(write_morphism(&back), bytes);
}

fn parse_error_at(text: &str) -> (usize, usize) {
    match parse_geometry(text.as_bytes()) {
        Err(Error::Parse { line, column, .. }) => (line, column),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn parse_errors_carry_positions() {
    assert_eq!(parse_error_at("ig 2\n"), (1, 4));
    assert_eq!(parse_error_at("ig 1\npoints x\n"), (2, 8));
    assert_eq!(parse_error_at("ig 1\npoints 3\nlines 1\n0 3\n"), (4, 3));
    assert_eq!(parse_error_at("ig 1\npoints 3\nlines 2\n0 1\n"), (4, 1));
    assert_eq!(parse_error_at("ig 1\npoints 2\nlines 1\n0 1\n0 1\n").0, 5);
    assert!(matches!(parse_geometry(b"\xff"), Err(Error::Parse { .. })));
    assert!(matches!(parse_morphism(b"igmap 1\nsource a\n"), Err(Error::Parse { .. })));
    let dup = "igmap 1\nsource a\ntarget b\npointmap\n0 0\n0 1\nlinemap\n";
    assert!(matches!(parse_morphism(dup.as_bytes()), Err(Error::Parse { line: 6, .. })));
}

#[test]
fn empty_records_are_blank_lines() {
    let text = "ig 1\npoints 2\nlines 2\n\n0 1\n";
    let g = parse_geometry(text.as_bytes()).unwrap();
    assert_eq!(g.num_lines(), 2);
    assert!(g.points_on(0).is_empty());
    assert_eq!(write_geometry(&g), text.as_bytes());
}

fn arb_geometry() -> impl Strategy<Value = IncidenceGeometry> {
    (1usize..9).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 0..=n), 0..8).prop_filter_map(
            "rejected by the constructor",
            move |rows| IncidenceGeometry::from_lines(n, rows.into_iter().map(|r| r.into_iter().collect()).collect()).ok(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_geometries_round_trip(g in arb_geometry()) {
        let bytes = write_geometry(&g);
        let back = parse_geometry(&bytes).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(write_geometry(&back), bytes);
    }

    #[test]
    fn out_of_range_points_are_rejected(n in 1usize..20, extra in 0usize..5) {
        let text = format!("ig 1\npoints {n}\nlines 1\n0 {}\n", n + extra);
        let is_position_error = matches!(parse_geometry(text.as_bytes()), Err(Error::Parse { line: 4, column: 3, .. }));
        prop_assert!(is_position_error);
    }
}
