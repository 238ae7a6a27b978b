//! The classical quadrangles Q(4,q) and W(q).

use std::sync::Arc;

use super::gate;
use super::projective::{pair_lines, points_where, ProjectiveModel};
use crate::error::{domain, Result};
use crate::field::{Fe, FiniteField};
use crate::incidence::IncidenceGeometry;
use crate::morphism::GeometryMorphism;

const Q4_MAX: u32 = 32;

/// `x0^2 + x1 x2 + x3 x4`
fn q4_form(f: &FiniteField, x: &[Fe]) -> Fe {
    let a = f.mul(x[0], x[0]);
    let b = f.mul(x[1], x[2]);
    let c = f.mul(x[3], x[4]);
    f.add(f.add(a, b), c)
}

/// Polar form of `q4_form`.
fn q4_polar(f: &FiniteField, x: &[Fe], y: &[Fe]) -> Fe {
    let a = f.mul(f.add(1, 1), f.mul(x[0], y[0]));
    let b = f.add(f.mul(x[1], y[2]), f.mul(x[2], y[1]));
    let c = f.add(f.mul(x[3], y[4]), f.mul(x[4], y[3]));
    f.add(f.add(a, b), c)
}

/// Q(4,q) with the coordinates of its points.
pub fn q4_model(q: u32) -> Result<ProjectiveModel> {
    if q > Q4_MAX {
        return domain(format!("Q(4,q) is limited to q <= {Q4_MAX}, got {q}"));
    }
    let field = FiniteField::new(q)?;
    let points = points_where(&field, 5, |x| q4_form(&field, x) == 0);
    let f = field.clone();
    let mut model = pair_lines(field, points, move |a, b| q4_polar(&f, a, b) == 0)?;
    model.geometry = gate("Q(4,q)", model.geometry, 4, (q as usize, q as usize))?;
    Ok(model)
}

/// The parabolic quadrangle Q(4,q) on `x0^2 + x1 x2 + x3 x4 = 0`.
pub fn q4(q: u32) -> Result<IncidenceGeometry> {
    Ok(q4_model(q)?.geometry)
}

/// The symplectic quadrangle W(q): all points of PG(3,q) and the lines
/// totally isotropic for `x0 y1 - x1 y0 + x2 y3 - x3 y2`.
pub fn symplectic_quadrangle(q: u32) -> Result<IncidenceGeometry> {
    if q > Q4_MAX {
        return domain(format!("W(q) is limited to q <= {Q4_MAX}, got {q}"));
    }
    let field = FiniteField::new(q)?;
    let points = points_where(&field, 4, |_| true);
    let f = field.clone();
    let model = pair_lines(field, points, move |x, y| {
        let a = f.sub(f.mul(x[0], y[1]), f.mul(x[1], y[0]));
        let b = f.sub(f.mul(x[2], y[3]), f.mul(x[3], y[2]));
        f.add(a, b) == 0
    })?;
    gate("W(q)", model.geometry, 4, (q as usize, q as usize))
}

/// The embedding Q(4,q) into Q(4,q^k) induced by the subfield inclusion.
pub fn subfield_embedding(q: u32, k: u32) -> Result<GeometryMorphism> {
    if k == 0 {
        return domain("extension degree must be at least 1");
    }
    let big_q = (q as u64).checked_pow(k).filter(|&b| b <= Q4_MAX as u64);
    let Some(big_q) = big_q else {
        return domain(format!("q^k = {q}^{k} is beyond the Q(4,q) limit {Q4_MAX}"));
    };
    let small = q4_model(q)?;
    if k == 1 {
        return Ok(GeometryMorphism::identity(Arc::new(small.geometry)));
    }
    let big = q4_model(big_q as u32)?;
    let embed = small.field.embedding_into(&big.field)?;
    let point_map = small
        .points
        .iter()
        .map(|p| {
            let image: Vec<Fe> = p.coords().iter().map(|&c| embed[c as usize]).collect();
            big.point_index(&image).ok_or_else(|| {
                crate::error::Error::Internal("embedded point is not on the big quadric".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let line_map = (0..small.geometry.num_lines())
        .map(|l| {
            let row = small.geometry.points_on(l);
            let (a, b) = (point_map[row[0] as usize], point_map[row[1] as usize]);
            big.geometry.join(a, b).ok_or_else(|| {
                crate::error::Error::Internal("embedded points are not collinear".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GeometryMorphism::new(
        Arc::new(small.geometry),
        Arc::new(big.geometry),
        point_map,
        line_map,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{is_epimorphism, verify_morphism};
    use crate::validate::classify_polygon;

    #[test]
    fn q4_sizes() {
        let g = q4(2).unwrap();
        assert_eq!((g.num_points(), g.num_lines()), (15, 15));
        let g = q4(3).unwrap();
        assert_eq!((g.num_points(), g.num_lines()), (40, 40));
        let c = classify_polygon(&q4(4).unwrap()).unwrap();
        assert!(c.is_thick);
        assert_eq!(c.order, Some((4, 4)));
    }

    #[test]
    fn w2_is_a_gq_of_order_2() {
        let w = symplectic_quadrangle(2).unwrap();
        assert_eq!((w.num_points(), w.num_lines()), (15, 15));
        assert_eq!(symplectic_quadrangle(3).unwrap().num_points(), 40);
    }

    #[test]
    fn embedding_q4_2_into_q4_4() {
        let phi = subfield_embedding(2, 2).unwrap();
        assert_eq!(verify_morphism(&phi), Ok(()));
        assert!(phi.is_injective());
        assert!(!is_epimorphism(&phi));
        assert_eq!(phi.target().num_points(), 85);
        let mut lines = phi.line_map().to_vec();
        lines.sort_unstable();
        let (sub, _) = phi.target().induced_subgeometry(phi.point_map(), &lines).unwrap();
        let c = classify_polygon(&sub).unwrap();
        assert_eq!((c.gonality, c.order), (4, Some((2, 2))));
    }

    #[test]
    fn trivial_embedding_and_bad_degrees() {
        let id = subfield_embedding(2, 1).unwrap();
        assert_eq!(id, GeometryMorphism::identity(id.source().clone()));
        assert!(subfield_embedding(2, 6).is_err());
        assert!(subfield_embedding(3, 4).is_err());
    }
}
