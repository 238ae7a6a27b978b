//! Recognition of weak generalized polygons.
//!
//! A geometry is a weak generalized m-gon exactly when its incidence graph
//! is connected, every vertex has degree at least two, the girth is 2m and
//! the diameter is m. Those four quantities come out of one BFS per vertex.

use std::fmt;

use crate::error::{Error, NotPolygonWitness, Result};
use crate::incidence::{Element, IncidenceGeometry, UNREACHABLE};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolygonClass {
    pub gonality: u32,
    /// `(s, t)`: lines carry s+1 points, points carry t+1 lines.
    pub order: Option<(usize, usize)>,
    pub is_firm: bool,
    pub is_thick: bool,
    pub is_thin: bool,
    pub is_weak_generalized_polygon: bool,
}

impl fmt::Display for PolygonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_thick { "thick" } else { "thin" };
        match self.order {
            Some((s, t)) => write!(f, "{kind} generalized {}-gon of order ({s},{t})", self.gonality),
            None => write!(f, "{kind} weak generalized {}-gon without order", self.gonality),
        }
    }
}

/// Line and point degrees `(s+1, t+1)` when the geometry is biregular.
pub fn order_of(g: &IncidenceGeometry) -> Option<(usize, usize)> {
    if g.num_points() == 0 || g.num_lines() == 0 {
        return None;
    }
    let line_deg = g.line_degree(0);
    let point_deg = g.point_degree(0);
    if line_deg < 2 || point_deg < 2 {
        return None;
    }
    let uniform_lines = (0..g.num_lines()).all(|l| g.line_degree(l) == line_deg);
    let uniform_points = (0..g.num_points()).all(|p| g.point_degree(p) == point_deg);
    (uniform_lines && uniform_points).then_some((line_deg - 1, point_deg - 1))
}

struct RootScan {
    eccentricity: u32,
    farthest: usize,
    unreachable: Option<usize>,
    /// Shortest cycle through the root: (length, closing vertex).
    cycle: Option<(u32, usize)>,
}

fn scan_root(g: &IncidenceGeometry, root: usize) -> RootScan {
    let dist = g.bfs(root);
    let mut scan = RootScan { eccentricity: 0, farthest: root, unreachable: None, cycle: None };
    for (v, &d) in dist.iter().enumerate() {
        if d == UNREACHABLE {
            scan.unreachable.get_or_insert(v);
            continue;
        }
        if d > scan.eccentricity {
            scan.eccentricity = d;
            scan.farthest = v;
        }
        if d > 0 {
            let parents = g.vertex_neighbours(v).filter(|&w| dist[w] + 1 == d).count();
            if parents >= 2 && scan.cycle.is_none_or(|(len, _)| 2 * d < len) {
                scan.cycle = Some((2 * d, v));
            }
        }
    }
    scan
}

/// Length of a shortest cycle of the incidence graph, `None` if acyclic.
pub fn girth(g: &IncidenceGeometry) -> Option<u32> {
    let roots: Vec<usize> = (0..g.num_elements()).collect();
    par::map_slice(&roots, |&r| scan_root(g, r).cycle.map(|c| c.0))
        .into_iter()
        .flatten()
        .min()
}

/// Decides whether `g` is a weak generalized polygon and describes it.
pub fn classify_polygon(g: &IncidenceGeometry) -> Result<PolygonClass> {
    classify_from_roots(g, None)
}

/// Like [`classify_polygon`], but only scans BFS trees from an evenly
/// spaced sample of `roots` vertices (plus vertex 0). Girth and diameter
/// are then lower/upper estimates; used for very large constructions whose
/// parameters are already known.
pub(crate) fn classify_polygon_sampled(g: &IncidenceGeometry, roots: usize) -> Result<PolygonClass> {
    let n = g.num_elements();
    let step = (n / roots.max(1)).max(1);
    classify_from_roots(g, Some((0..n).step_by(step).collect()))
}

fn classify_from_roots(g: &IncidenceGeometry, roots: Option<Vec<usize>>) -> Result<PolygonClass> {
    if g.is_empty() {
        return Err(Error::EmptyGeometry);
    }
    let not_polygon = |w| Err(Error::NotPolygon(w));
    for v in 0..g.num_elements() {
        let degree = g.vertex_neighbours(v).count();
        if degree < 2 {
            return not_polygon(NotPolygonWitness::NotFirm { element: g.element(v), degree });
        }
    }
    let roots = roots.unwrap_or_else(|| (0..g.num_elements()).collect());
    let scans = par::map_slice(&roots, |&root| scan_root(g, root));
    if let Some(v) = scans[0].unreachable {
        return not_polygon(NotPolygonWitness::Disconnected(g.element(0), g.element(v)));
    }
    let Some(girth) = scans.iter().filter_map(|s| s.cycle.map(|c| c.0)).min() else {
        return not_polygon(NotPolygonWitness::Acyclic);
    };
    let gonality = girth / 2;
    let (root, far) = scans
        .iter()
        .enumerate()
        .max_by_key(|(i, s)| (s.eccentricity, std::cmp::Reverse(*i)))
        .map(|(i, s)| (roots[i], s))
        .unwrap();
    if far.eccentricity > gonality {
        return not_polygon(NotPolygonWitness::TooFar {
            a: g.element(root),
            b: g.element(far.farthest),
            distance: far.eccentricity,
            gonality,
        });
    }
    let is_thick = (0..g.num_elements()).all(|v| g.vertex_neighbours(v).count() >= 3);
    Ok(PolygonClass {
        gonality,
        order: order_of(g),
        is_firm: true,
        is_thick,
        is_thin: !is_thick,
        is_weak_generalized_polygon: true,
    })
}

/// An ordinary sub-m-gon through point 0, as alternating points and lines.
pub fn gonality_witness(g: &IncidenceGeometry, m: u32) -> Result<Vec<Element>> {
    let class = classify_polygon(g).map_err(|e| Error::ContractViolation(e.to_string()))?;
    if class.gonality != m {
        return Err(Error::ContractViolation(format!(
            "geometry has gonality {}, not {m}",
            class.gonality
        )));
    }
    let dist = g.bfs(0);
    let closing = (0..g.num_elements())
        .find(|&v| {
            dist[v] == m && g.vertex_neighbours(v).filter(|&w| dist[w] + 1 == m).count() >= 2
        })
        .ok_or_else(|| Error::Internal("no ordinary m-gon through point 0".into()))?;
    let parents: Vec<usize> = g
        .vertex_neighbours(closing)
        .filter(|&w| dist[w] + 1 == m)
        .take(2)
        .collect();
    let descend = |mut v: usize| {
        let mut path = vec![v];
        while dist[v] > 0 {
            v = g.vertex_neighbours(v).find(|&w| dist[w] + 1 == dist[v]).unwrap();
            path.push(v);
        }
        path
    };
    let mut first = descend(parents[0]);
    first.reverse();
    let second = descend(parents[1]);
    let cycle: Vec<usize> = first
        .into_iter()
        .chain(std::iter::once(closing))
        .chain(second.into_iter().take(m as usize - 1))
        .collect();
    Ok(cycle.into_iter().map(|v| g.element(v)).collect())
}
