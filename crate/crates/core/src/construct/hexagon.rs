use super::gate;
use super::projective::{pair_lines, points_where};
use crate::error::{domain, Result};
use crate::field::{Fe, FiniteField};
use crate::incidence::IncidenceGeometry;

const HEXAGON_MAX: u32 = 5;

fn form(f: &FiniteField, x: &[Fe]) -> Fe {
    let s = [(0, 4), (1, 5), (2, 6)]
        .iter()
        .fold(0, |acc, &(i, j)| f.add(acc, f.mul(x[i], x[j])));
    f.sub(s, f.mul(x[3], x[3]))
}

fn polar(f: &FiniteField, x: &[Fe], y: &[Fe]) -> Fe {
    let s = [(0, 4), (1, 5), (2, 6)].iter().fold(0, |acc, &(i, j)| {
        f.add(acc, f.add(f.mul(x[i], y[j]), f.mul(x[j], y[i])))
    });
    f.sub(s, f.mul(f.add(1, 1), f.mul(x[3], y[3])))
}

/// Pairs `(i,j),(k,l)` with `p_ij = p_kl` on every line of the hexagon.
const GRASSMANN: [((usize, usize), (usize, usize)); 6] = [
    ((1, 2), (3, 4)),
    ((5, 4), (3, 2)),
    ((2, 0), (3, 5)),
    ((6, 5), (3, 0)),
    ((0, 1), (3, 6)),
    ((4, 6), (3, 1)),
];

fn plucker(f: &FiniteField, a: &[Fe], b: &[Fe], (i, j): (usize, usize)) -> Fe {
    f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]))
}

/// The split Cayley hexagon H(q) on the quadric
/// `X0 X4 + X1 X5 + X2 X6 = X3^2`: all quadric points, and the quadric lines
/// whose Grassmann coordinates satisfy the six linear conditions above.
pub fn split_cayley_hexagon(q: u32) -> Result<IncidenceGeometry> {
    if q > HEXAGON_MAX {
        return domain(format!("H(q) is limited to q <= {HEXAGON_MAX}, got {q}"));
    }
    let field = FiniteField::new(q)?;
    let points = points_where(&field, 7, |x| form(&field, x) == 0);
    let f = field.clone();
    let model = pair_lines(field, points, move |a, b| {
        polar(&f, a, b) == 0
            && GRASSMANN
                .iter()
                .all(|&(u, v)| plucker(&f, a, b, u) == plucker(&f, a, b, v))
    })?;
    gate("H(q)", model.geometry, 6, (q as usize, q as usize))
}
