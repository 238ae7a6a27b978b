mod common;

use polylab_core::construct::*;
use polylab_core::validate::{classify_polygon, girth};
use polylab_core::IncidenceGeometry;
use proptest::prelude::*;

fn check(g: &IncidenceGeometry, m: u32, order: (usize, usize)) {
    let c = classify_polygon(g).unwrap();
    assert_eq!((c.gonality, c.order), (m, Some(order)), "{c}");
    let (gi, diam) = common::girth_and_diameter(g);
    assert_eq!(gi, Some(2 * m as usize));
    assert_eq!(diam, Some(m as usize));
}

#[test]
fn classical_polygons_match_the_oracle() {
    check(&projective_plane(2).unwrap(), 3, (2, 2));
    check(&projective_plane(3).unwrap(), 3, (3, 3));
    check(&projective_plane(4).unwrap(), 3, (4, 4));
    check(&q4(2).unwrap(), 4, (2, 2));
    check(&q4(3).unwrap(), 4, (3, 3));
    check(&symplectic_quadrangle(3).unwrap(), 4, (3, 3));
    check(&split_cayley_hexagon(2).unwrap(), 6, (2, 2));
    let (plane, conic) = segre_oval(1, 2).unwrap();
    check(&t2_of_oval(&plane, &conic).unwrap(), 4, (4, 4));
}

#[test]
fn thin_polygons_match_the_oracle() {
    for m in 3..9 {
        check(&ordinary_polygon(m).unwrap(), m as u32, (1, 1));
    }
    check(&grid(3, 3).unwrap(), 4, (2, 1));
    check(&dual_grid(4, 4).unwrap(), 4, (1, 3));
    check(&double(&projective_plane(2).unwrap()).unwrap(), 6, (1, 2));
    check(&thin_hexagon_from_plane(&projective_plane(3).unwrap()).unwrap(), 6, (3, 1));
    check(&double(&q4(2).unwrap()).unwrap(), 8, (1, 2));
    let d = digon(3, 4).unwrap();
    assert_eq!(classify_polygon(&d).unwrap().gonality, 2);
}

#[test]
fn plane_sizes() {
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        let p = projective_plane(q).unwrap();
        let n = (q * q + q + 1) as usize;
        assert_eq!((p.num_points(), p.num_lines()), (n, n));
    }
    assert!(projective_plane(6).is_err());
    assert!(projective_plane(10).is_err());
}

#[test]
fn hyperoval_from_conic_and_nucleus() {
    let (plane, conic) = segre_oval(1, 2).unwrap();
    let g = &plane.geometry;
    assert!(is_oval(g, &conic));
    let n = nucleus(g, &conic).unwrap();
    let mut hyper = conic.clone();
    hyper.push(n);
    assert!(is_hyperoval(g, &hyper));
    // odd q: the conic has no nucleus
    let p5 = projective_plane_model(5).unwrap();
    let conic5: Vec<usize> = (0..p5.geometry.num_points())
        .filter(|&i| {
            let x = p5.points[i].coords();
            let f = &p5.field;
            f.sub(f.mul(x[1], x[1]), f.mul(x[0], x[2])) == 0
        })
        .collect();
    assert_eq!(conic5.len(), 6);
    assert!(is_oval(&p5.geometry, &conic5));
    assert!(nucleus(&p5.geometry, &conic5).is_none());
}

#[test]
fn undouble_inverts_double() {
    for g in [projective_plane(2).unwrap(), q4(2).unwrap(), ordinary_polygon(3).unwrap(), digon(3, 3).unwrap()] {
        let u = undouble(&double(&g).unwrap()).unwrap();
        assert_eq!(u.geometry, g);
    }
    let p = projective_plane(3).unwrap();
    let (back, flags) = plane_from_thin_hexagon(&thin_hexagon_from_plane(&p).unwrap()).unwrap();
    assert_eq!(flags.len(), 52);
    assert!(polylab_core::search::find_isomorphism(&std::sync::Arc::new(back), &std::sync::Arc::new(p))
        .unwrap()
        .is_some());
}

#[test]
fn subquadrangle_embedding() {
    let e = subfield_embedding(2, 2).unwrap();
    assert!(e.is_injective());
    let image_points: Vec<usize> = e.point_map().to_vec();
    let image_lines: Vec<usize> = e.line_map().to_vec();
    let (sub, _) = e.target().induced_subgeometry(&image_points, &image_lines).unwrap();
    let c = classify_polygon(&sub).unwrap();
    assert_eq!((c.gonality, c.order), (4, Some((2, 2))));
}

fn small_geometry(i: usize) -> IncidenceGeometry {
    match i % 8 {
        0 => projective_plane(2).unwrap(),
        1 => projective_plane(3).unwrap(),
        2 => symplectic_quadrangle(2).unwrap(),
        3 => grid(3, 4).unwrap(),
        4 => ordinary_polygon(5).unwrap(),
        5 => double(&projective_plane(2).unwrap()).unwrap(),
        6 => dual_grid(2, 5).unwrap(),
        _ => q4(3).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn duality_is_an_involution_and_swaps_orders(i in 0usize..8) {
        let g = small_geometry(i);
        let d = g.dual();
        prop_assert_eq!(&d.dual(), &g);
        let (a, b) = (classify_polygon(&g).unwrap(), classify_polygon(&d).unwrap());
        prop_assert_eq!(a.gonality, b.gonality);
        prop_assert_eq!(a.is_thick, b.is_thick);
        prop_assert_eq!(a.order.map(|(s, t)| (t, s)), b.order);
        prop_assert_eq!(girth(&g), girth(&d));
    }

    #[test]
    fn grids_are_weak_quadrangles(r in 2usize..6, c in 2usize..6) {
        let g = grid(r, c).unwrap();
        let class = classify_polygon(&g).unwrap();
        prop_assert_eq!(class.gonality, 4);
        prop_assert_eq!(class.order.is_some(), r == c);
        let (gi, diam) = common::girth_and_diameter(&g);
        prop_assert_eq!((gi, diam), (Some(8), Some(4)));
    }

    #[test]
    fn ordinary_polygons(m in 3usize..16) {
        let g = ordinary_polygon(m).unwrap();
        prop_assert_eq!(classify_polygon(&g).unwrap().gonality as usize, m);
        prop_assert_eq!(common::girth_and_diameter(&g), (Some(2 * m), Some(m)));
    }
}
