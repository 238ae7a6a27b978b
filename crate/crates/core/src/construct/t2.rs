use super::gate;
use super::projective::{dot, is_oval, ProjectiveModel};
use crate::error::{domain, Result};
use crate::field::Fe;
use crate::incidence::IncidenceGeometry;

/// The Tits quadrangle T2(O) of an oval `O` in PG(2,q), with the plane
/// read as the hyperplane `x3 = 0` of PG(3,q).
///
/// Point order: the q^3 affine points `(x0,x1,x2,1)` by base-q code, then
/// for each tangent line of O (in oval order) the q planes through it other
/// than `x3 = 0`, then the symbol (inf). Line order: the affine lines
/// through oval points (by smallest affine point), then one line per point
/// of O.
pub fn t2_of_oval(plane: &ProjectiveModel, oval: &[usize]) -> Result<IncidenceGeometry> {
    let g = &plane.geometry;
    if !is_oval(g, oval) {
        return domain("t2_of_oval needs an oval of the given plane");
    }
    let f = &plane.field;
    let q = f.order() as usize;
    let mut oval = oval.to_vec();
    oval.sort_unstable();
    let oval_coords: Vec<&[Fe]> = oval.iter().map(|&p| plane.points[p].coords()).collect();

    // the unique tangent at each oval point, as a normal vector of the plane
    let mut member = vec![false; g.num_points()];
    for &p in &oval {
        member[p] = true;
    }
    let line_normals = super::projective::normalized_vectors(f, 3);
    let tangents: Vec<&[Fe]> = oval
        .iter()
        .map(|&o| {
            let t = g
                .lines_through(o)
                .iter()
                .find(|&&l| g.points_on(l as usize).iter().filter(|&&p| member[p as usize]).count() == 1)
                .expect("every oval point has a tangent");
            let normal = line_normals[*t as usize].as_slice();
            debug_assert_eq!(dot(f, normal, plane.points[o].coords()), 0);
            normal
        })
        .collect();

    let affine = q * q * q;
    let code = |x: &[Fe]| (x[0] as usize * q + x[1] as usize) * q + x[2] as usize;
    let decode = |c: usize| [(c / (q * q)) as Fe, ((c / q) % q) as Fe, (c % q) as Fe];
    let plane_point = |tangent: usize, c: Fe| affine + tangent * q + c as usize;
    let infinity = affine + oval.len() * q;

    let mut rows = Vec::with_capacity(q * q * (q + 1) + q + 1);
    for x in 0..affine {
        let xv = decode(x);
        for (i, o) in oval_coords.iter().enumerate() {
            let pts: Vec<usize> = f
                .elements()
                .map(|lambda| {
                    let v: Vec<Fe> = (0..3).map(|j| f.add(xv[j], f.mul(lambda, o[j]))).collect();
                    code(&v)
                })
                .collect();
            if pts.iter().any(|&p| p < x) {
                continue;
            }
            // the plane spanned by this line and the tangent at o
            let c = f.neg(dot(f, tangents[i], &xv));
            let mut row = pts;
            row.push(plane_point(i, c));
            rows.push(row);
        }
    }
    for i in 0..oval.len() {
        let mut row: Vec<usize> = f.elements().map(|c| plane_point(i, c)).collect();
        row.push(infinity);
        rows.push(row);
    }
    let geometry = IncidenceGeometry::from_lines(infinity + 1, rows)?;
    gate("T2(O)", geometry, 4, (q, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{q4, segre_oval};

    #[test]
    fn conic_gives_q4_parameters() {
        for h in [1, 2] {
            let (plane, oval) = segre_oval(1, h).unwrap();
            let t = t2_of_oval(&plane, &oval).unwrap();
            let q = q4(1 << h).unwrap();
            assert_eq!((t.num_points(), t.num_lines()), (q.num_points(), q.num_lines()));
        }
    }

    #[test]
    fn rejects_non_ovals() {
        let (plane, oval) = segre_oval(1, 2).unwrap();
        assert!(t2_of_oval(&plane, &oval[..3]).is_err());
    }
}
