//! Coordinatized projective spaces over small finite fields.

use std::collections::HashMap;

use crate::error::{domain, Result};
use crate::field::{Fe, FiniteField};
use crate::incidence::IncidenceGeometry;

/// Homogeneous coordinates normalized so the first nonzero entry is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint(Vec<Fe>);

impl ProjectivePoint {
    /// Normalizes `coords`; `None` for the zero vector.
    pub fn new(field: &FiniteField, coords: &[Fe]) -> Option<Self> {
        let lead = coords.iter().position(|&c| c != 0)?;
        let inv = field.inv(coords[lead])?;
        Some(ProjectivePoint(coords.iter().map(|&c| field.mul(c, inv)).collect()))
    }

    pub fn coords(&self) -> &[Fe] {
        &self.0
    }
}

/// A geometry whose points carry projective coordinates.
#[derive(Clone, Debug)]
pub struct ProjectiveModel {
    pub field: FiniteField,
    pub geometry: IncidenceGeometry,
    pub points: Vec<ProjectivePoint>,
    index: HashMap<ProjectivePoint, usize>,
}

impl ProjectiveModel {
    pub(crate) fn new(field: FiniteField, geometry: IncidenceGeometry, points: Vec<ProjectivePoint>) -> Self {
        let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        ProjectiveModel { field, geometry, points, index }
    }

    /// Index of the point with the given (not necessarily normalized) coordinates.
    pub fn point_index(&self, coords: &[Fe]) -> Option<usize> {
        let p = ProjectivePoint::new(&self.field, coords)?;
        self.index.get(&p).copied()
    }
}

/// All normalized vectors of length `n`, in lexicographic order.
pub(crate) fn normalized_vectors(field: &FiniteField, n: usize) -> Vec<Vec<Fe>> {
    let q = field.order();
    let mut out = Vec::new();
    for lead in (0..n).rev() {
        let free = n - 1 - lead;
        let count = (q as u64).pow(free as u32);
        for code in 0..count {
            let mut v = vec![0; n];
            v[lead] = 1;
            let mut c = code;
            for slot in (lead + 1..n).rev() {
                v[slot] = (c % q as u64) as Fe;
                c /= q as u64;
            }
            out.push(v);
        }
    }
    out
}

pub(crate) fn dot(field: &FiniteField, a: &[Fe], b: &[Fe]) -> Fe {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// `a + lambda * b`, coordinate-wise.
pub(crate) fn axpy(field: &FiniteField, a: &[Fe], lambda: Fe, b: &[Fe]) -> Vec<Fe> {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, field.mul(lambda, y))).collect()
}

/// The points of the projective line spanned by two independent vectors.
pub(crate) fn line_points(field: &FiniteField, a: &[Fe], b: &[Fe]) -> Vec<ProjectivePoint> {
    std::iter::once(ProjectivePoint::new(field, b).expect("nonzero"))
        .chain(field.elements().map(|l| {
            ProjectivePoint::new(field, &axpy(field, a, l, b)).expect("independent span")
        }))
        .collect()
}

/// Geometry of the lines spanned by pairs of `points` accepted by `joinable`.
///
/// Each line is recorded once, from the pair formed by its two smallest
/// points, and must lie entirely inside `points`.
pub(crate) fn pair_lines<F>(
    field: FiniteField,
    points: Vec<ProjectivePoint>,
    joinable: F,
) -> Result<ProjectiveModel>
where
    F: Fn(&[Fe], &[Fe]) -> bool + Sync,
{
    let index: HashMap<&ProjectivePoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let per_point = crate::par::map_range(points.len(), |a| {
        let pa = points[a].coords();
        let mut rows = Vec::new();
        for (b, point_b) in points.iter().enumerate().skip(a + 1) {
            let pb = point_b.coords();
            if !joinable(pa, pb) {
                continue;
            }
            let mut row = Vec::with_capacity(field.order() as usize + 1);
            for p in line_points(&field, pa, pb) {
                match index.get(&p) {
                    Some(&i) => row.push(i),
                    None => return Err(crate::error::Error::Construction(format!(
                        "line through points {a} and {b} leaves the point set"
                    ))),
                }
            }
            row.sort_unstable();
            if row[0] == a && row[1] == b {
                rows.push(row);
            }
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    let geometry = IncidenceGeometry::from_lines(points.len(), rows)?;
    Ok(ProjectiveModel::new(field, geometry, points))
}

/// Projective points of PG(n-1,q) satisfying `keep`, in lexicographic order.
pub(crate) fn points_where<F>(field: &FiniteField, n: usize, keep: F) -> Vec<ProjectivePoint>
where
    F: Fn(&[Fe]) -> bool,
{
    normalized_vectors(field, n).into_iter().filter(|v| keep(v)).map(ProjectivePoint).collect()
}

/// The classical plane PG(2,q), with coordinates.
///
/// Points and lines are both indexed by their normalized coordinate vectors
/// in lexicographic order; point `x` lies on line `n` iff `n . x = 0`.
pub fn projective_plane_model(q: u32) -> Result<ProjectiveModel> {
    if q > 512 {
        return domain(format!("projective planes are limited to q <= 512, got {q}"));
    }
    let field = FiniteField::new(q)?;
    let vectors = normalized_vectors(&field, 3);
    let points: Vec<ProjectivePoint> = vectors.iter().map(|v| ProjectivePoint(v.clone())).collect();
    let index: HashMap<&[Fe], usize> = vectors.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let rows = crate::par::map_slice(&vectors, |normal| {
        let lead = normal.iter().position(|&c| c != 0).unwrap();
        let basis: Vec<Vec<Fe>> = (0..3)
            .filter(|&j| j != lead)
            .map(|j| {
                let mut v = vec![0; 3];
                v[j] = 1;
                v[lead] = field.neg(normal[j]);
                v
            })
            .collect();
        let mut row: Vec<usize> = line_points(&field, &basis[0], &basis[1])
            .iter()
            .map(|p| index[p.coords()])
            .collect();
        row.sort_unstable();
        row
    });
    let geometry = IncidenceGeometry::from_lines(points.len(), rows)?;
    Ok(ProjectiveModel::new(field, geometry, points))
}

pub fn projective_plane(q: u32) -> Result<IncidenceGeometry> {
    Ok(projective_plane_model(q)?.geometry)
}

/// The Segre set `{(1 : t : t^(2^i))} + {(0 : 0 : 1)}` in PG(2, 2^h).
pub fn segre_oval(i: u32, h: u32) -> Result<(ProjectiveModel, Vec<usize>)> {
    if i == 0 || h == 0 || h > 9 || i > 62 {
        return domain(format!("segre set needs 1 <= i, 1 <= h <= 9, got ({i},{h})"));
    }
    let plane = projective_plane_model(1 << h)?;
    let f = &plane.field;
    let exponent = 1u64 << i;
    let mut set: Vec<usize> = f
        .elements()
        .map(|t| plane.point_index(&[1, t, f.pow(t, exponent)]).unwrap())
        .collect();
    set.push(plane.point_index(&[0, 0, 1]).unwrap());
    set.sort_unstable();
    Ok((plane, set))
}

fn line_hits(plane: &IncidenceGeometry, set: &[usize]) -> Vec<usize> {
    let mut member = vec![false; plane.num_points()];
    for &p in set {
        member[p] = true;
    }
    (0..plane.num_lines())
        .map(|l| plane.points_on(l).iter().filter(|&&p| member[p as usize]).count())
        .collect()
}

fn plane_order(plane: &IncidenceGeometry) -> usize {
    plane.line_degree(0) - 1
}

/// `q + 1` points, no three collinear.
pub fn is_oval(plane: &IncidenceGeometry, set: &[usize]) -> bool {
    arc_of_size(plane, set, plane_order(plane) + 1)
}

/// `q + 2` points, no three collinear.
pub fn is_hyperoval(plane: &IncidenceGeometry, set: &[usize]) -> bool {
    arc_of_size(plane, set, plane_order(plane) + 2)
}

fn arc_of_size(plane: &IncidenceGeometry, set: &[usize], size: usize) -> bool {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len() == size
        && s.iter().all(|&p| p < plane.num_points())
        && line_hits(plane, &s).into_iter().all(|h| h <= 2)
}

/// The unique point on every tangent line of `set`, if there is one.
pub fn nucleus(plane: &IncidenceGeometry, set: &[usize]) -> Option<usize> {
    let hits = line_hits(plane, set);
    let mut count = vec![0usize; plane.num_points()];
    let mut tangents = 0;
    for (l, &h) in hits.iter().enumerate() {
        if h == 1 {
            tangents += 1;
            for &p in plane.points_on(l) {
                count[p as usize] += 1;
            }
        }
    }
    let mut common = (0..plane.num_points()).filter(|&p| tangents > 0 && count[p] == tangents);
    let first = common.next()?;
    common.next().is_none().then_some(first)
}
