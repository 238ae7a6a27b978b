use crate::error::{domain, Error, Result};
use crate::incidence::{Element, Flag, IncidenceGeometry};
use crate::validate::classify_polygon;

/// The ordinary m-gon: point `i` and point `i+1 mod m` span line `i`.
pub fn ordinary_polygon(m: usize) -> Result<IncidenceGeometry> {
    if m < 2 {
        return domain(format!("an ordinary polygon needs m >= 2, got {m}"));
    }
    if m == 2 {
        return digon(2, 2);
    }
    let lines = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
    let g = IncidenceGeometry::from_lines(m, lines)?;
    let labels = |prefix: &str| (0..m).map(|i| format!("{prefix}{i}")).collect();
    Ok(g.with_labels(labels("x"), labels("X")))
}

/// Every one of the `a` points lies on every one of the `b` lines.
pub fn digon(a: usize, b: usize) -> Result<IncidenceGeometry> {
    if a < 2 || b < 2 {
        return domain(format!("a digon needs at least two points and two lines, got ({a},{b})"));
    }
    IncidenceGeometry::from_lines(a, vec![(0..a).collect(); b])
}

/// Cells of an r-by-c array; rows are lines `0..r`, columns `r..r+c`.
pub fn grid(r: usize, c: usize) -> Result<IncidenceGeometry> {
    if r < 2 || c < 2 {
        return domain(format!("a grid needs r, c >= 2, got ({r},{c})"));
    }
    let mut lines: Vec<Vec<usize>> = (0..r).map(|i| (0..c).map(|j| i * c + j).collect()).collect();
    lines.extend((0..c).map(|j| (0..r).map(|i| i * c + j).collect()));
    IncidenceGeometry::from_lines(r * c, lines)
}

pub fn dual_grid(r: usize, c: usize) -> Result<IncidenceGeometry> {
    Ok(grid(r, c)?.dual())
}

/// The double: points are the points then the lines of `g`, and every
/// flag of `g` (in point-major order) becomes a line of size two.
pub fn double(g: &IncidenceGeometry) -> Result<IncidenceGeometry> {
    let class = classify_polygon(g)?;
    match class.order {
        Some((s, t)) if s == t => {}
        other => return domain(format!("doubling needs order (s,s), got {other:?}")),
    }
    let np = g.num_points();
    let lines = g.flags().map(|f| vec![f.point, np + f.line]).collect();
    IncidenceGeometry::from_lines(np + g.num_lines(), lines)
}

/// Result of undoubling a thin polygon of order (1,s).
#[derive(Clone, Debug)]
pub struct Undoubled {
    pub geometry: IncidenceGeometry,
    /// For every point of the doubled geometry, the element it became.
    pub classes: Vec<Element>,
}

/// Splits the points of a thin 2n-gon of order (1,s) into the two
/// collinearity classes and rebuilds the n-gon.
///
/// The class of point 0 becomes the point set; members keep their relative
/// index order, so `undouble(double(G))` reproduces `G` exactly.
pub fn undouble(g: &IncidenceGeometry) -> Result<Undoubled> {
    let class = classify_polygon(g)?;
    if class.gonality % 2 != 0 {
        return domain(format!("undoubling needs even gonality, got {}", class.gonality));
    }
    match class.order {
        Some((1, _)) => {}
        other => return domain(format!("undoubling needs order (1,s), got {other:?}")),
    }
    let dist = g.bfs(0);
    let mut classes = Vec::with_capacity(g.num_points());
    let (mut n_pts, mut n_lines) = (0, 0);
    for (v, &d) in dist.iter().take(g.num_points()).enumerate() {
        if (d / 2) % 2 == 0 {
            classes.push(Element::Point(n_pts));
            n_pts += 1;
        } else {
            classes.push(Element::Line(n_lines));
            n_lines += 1;
        }
        debug_assert!(d % 2 == 0, "point {v} at odd distance");
    }
    let mut rows = vec![Vec::new(); n_lines];
    for l in 0..g.num_lines() {
        let pts = g.points_on(l);
        let (a, b) = (classes[pts[0] as usize], classes[pts[1] as usize]);
        match (a, b) {
            (Element::Point(p), Element::Line(k)) | (Element::Line(k), Element::Point(p)) => {
                rows[k].push(p)
            }
            _ => return Err(Error::Internal(format!("line {l} joins two points of one class"))),
        }
    }
    let geometry = IncidenceGeometry::from_lines(n_pts, rows)?;
    Ok(Undoubled { geometry, classes })
}

/// The thin hexagon of order (s,1) attached to a plane of order s: the dual
/// of its double. Its points are the flags of the plane.
pub fn thin_hexagon_from_plane(plane: &IncidenceGeometry) -> Result<IncidenceGeometry> {
    let class = classify_polygon(plane)?;
    if class.gonality != 3 {
        return domain(format!("expected a projective plane, got {class}"));
    }
    Ok(double(plane)?.dual())
}

/// Recovers the plane from a thin hexagon of order (s,1).
///
/// Lines at even line-graph distance from line 0 become points, the others
/// become lines, and incidence is concurrency. The returned flags give, for
/// each point of the hexagon, the (point, line) of the plane it stands for.
pub fn plane_from_thin_hexagon(g: &IncidenceGeometry) -> Result<(IncidenceGeometry, Vec<Flag>)> {
    let class = classify_polygon(g)?;
    match (class.gonality, class.order) {
        (6, Some((_, 1))) => {}
        _ => return domain(format!("expected a thin hexagon of order (s,1), got {class}")),
    }
    let dist = g.bfs(g.vertex(Element::Line(0)));
    let np = g.num_points();
    let mut role = Vec::with_capacity(g.num_lines());
    let (mut n_pts, mut n_lines) = (0, 0);
    for l in 0..g.num_lines() {
        if (dist[np + l] / 2).is_multiple_of(2) {
            role.push(Element::Point(n_pts));
            n_pts += 1;
        } else {
            role.push(Element::Line(n_lines));
            n_lines += 1;
        }
    }
    let mut rows = vec![Vec::new(); n_lines];
    let mut flags = Vec::with_capacity(np);
    for x in 0..np {
        let pencil = g.lines_through(x);
        match (role[pencil[0] as usize], role[pencil[1] as usize]) {
            (Element::Point(p), Element::Line(k)) | (Element::Line(k), Element::Point(p)) => {
                rows[k].push(p);
                flags.push(Flag { point: p, line: k });
            }
            _ => return Err(Error::Internal(format!("point {x} joins two lines of one class"))),
        }
    }
    Ok((IncidenceGeometry::from_lines(n_pts, rows)?, flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::order_of;

    #[test]
    fn small_constructors() {
        let t = ordinary_polygon(3).unwrap();
        assert_eq!((t.num_points(), t.num_lines()), (3, 3));
        assert!(ordinary_polygon(1).is_err());
        assert_eq!(digon(2, 2).unwrap().num_flags(), 4);
        assert_eq!(order_of(&digon(3, 3).unwrap()), Some((2, 2)));
        assert_eq!(digon(2, 3).unwrap().dual(), digon(3, 2).unwrap());
        assert!(digon(1, 3).is_err());
        assert!(grid(1, 3).is_err());
        let dg = dual_grid(3, 3).unwrap();
        assert_eq!((dg.num_points(), dg.num_lines()), (6, 9));
    }

    #[test]
    fn grid_orders() {
        assert_eq!(order_of(&grid(2, 2).unwrap()), Some((1, 1)));
        assert_eq!(order_of(&grid(3, 3).unwrap()), Some((2, 1)));
        assert_eq!(order_of(&grid(3, 4).unwrap()), None);
        let row = grid(3, 3).unwrap();
        assert_eq!(row.incident_points(0).unwrap().len(), 3);
    }

    #[test]
    fn double_of_triangle_is_hexagon() {
        let h = double(&ordinary_polygon(3).unwrap()).unwrap();
        let c = classify_polygon(&h).unwrap();
        assert_eq!((c.gonality, c.order), (6, Some((1, 1))));
        let back = undouble(&h).unwrap();
        assert_eq!(back.geometry, ordinary_polygon(3).unwrap());
    }

    #[test]
    fn double_of_digon_is_dual_grid() {
        let d = double(&digon(3, 3).unwrap()).unwrap();
        let c = classify_polygon(&d).unwrap();
        assert_eq!((c.gonality, c.order), (4, Some((1, 2))));
        assert!(double(&grid(3, 4).unwrap()).is_err());
    }

    #[test]
    fn undouble_rejects_wrong_order() {
        assert!(matches!(undouble(&grid(3, 3).unwrap()), Err(Error::Domain(_))));
        assert!(undouble(&ordinary_polygon(3).unwrap()).is_err());
        let quad = undouble(&ordinary_polygon(4).unwrap()).unwrap();
        assert_eq!(order_of(&quad.geometry), Some((1, 1)));
    }

    #[test]
    fn hexagon_plane_correspondence_on_triangle() {
        let t = ordinary_polygon(3).unwrap();
        let h = thin_hexagon_from_plane(&t).unwrap();
        let c = classify_polygon(&h).unwrap();
        assert_eq!((c.gonality, c.order), (6, Some((1, 1))));
        let (back, flags) = plane_from_thin_hexagon(&h).unwrap();
        assert_eq!(back, t);
        assert_eq!(flags.len(), 6);
        assert!(flags.iter().all(|f| back.is_incident(f.point, f.line)));
    }
}
