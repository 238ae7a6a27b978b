//! Geometric hyperplanes of thick generalized quadrangles.
//!
//! A point set `H` is a hyperplane when every line meets it in exactly one
//! point or lies inside it. The empty and the full point set are not
//! counted. Every hyperplane is an ovoid (kind A), a perp `x⊥` (kind B) or
//! a subquadrangle of order (s, t/s) (kind C).

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::incidence::IncidenceGeometry;
use crate::par;
use crate::validate::classify_polygon;

/// Enumeration refuses larger quadrangles.
pub const MAX_ENUMERATION_POINTS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HyperplaneKind {
    A,
    B,
    C,
    NotHyperplane,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneVerdict {
    pub kind: HyperplaneKind,
    /// Kind B.
    pub center: Option<usize>,
    /// Kind C.
    pub suborder: Option<(usize, usize)>,
    /// A line meeting the set in neither one point nor all of its points;
    /// `None` for the rejected empty and full sets.
    pub witness: Option<usize>,
}

impl HyperplaneVerdict {
    fn kind(kind: HyperplaneKind) -> Self {
        HyperplaneVerdict { kind, center: None, suborder: None, witness: None }
    }
}

impl fmt::Display for HyperplaneVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            HyperplaneKind::A => write!(f, "A (ovoid)"),
            HyperplaneKind::B => write!(f, "B (perp of point {})", self.center.unwrap_or(usize::MAX)),
            HyperplaneKind::C => {
                let (s, t) = self.suborder.unwrap_or_default();
                write!(f, "C (subquadrangle of order ({s},{t}))")
            }
            HyperplaneKind::NotHyperplane => match self.witness {
                Some(l) => write!(f, "not a hyperplane (line {l})"),
                None => write!(f, "not a hyperplane (empty or full)"),
            },
        }
    }
}

/// Order (s,t) of a thick generalized quadrangle, or a contract error.
fn gq_order(g: &IncidenceGeometry) -> Result<(usize, usize)> {
    let class = classify_polygon(g).map_err(|e| Error::ContractViolation(e.to_string()))?;
    match (class.gonality, class.order, class.is_thick) {
        (4, Some(order), true) => Ok(order),
        _ => Err(Error::ContractViolation(format!("expected a thick generalized quadrangle, got {class}"))),
    }
}

fn membership(g: &IncidenceGeometry, h: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; g.num_points()];
    for &p in h {
        g.check_point(p)?;
        inside[p] = true;
    }
    Ok(inside)
}

fn violation(g: &IncidenceGeometry, inside: &[bool]) -> Option<Option<usize>> {
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == g.num_points() {
        return Some(None);
    }
    (0..g.num_lines())
        .find(|&l| {
            let pts = g.points_on(l);
            let k = pts.iter().filter(|&&p| inside[p as usize]).count();
            k != 1 && k != pts.len()
        })
        .map(Some)
}

/// `Ok(None)` when `h` is a hyperplane; otherwise `Ok(Some(w))` with a
/// violating line `w`, or `w = None` for the empty and the full set.
pub fn hyperplane_witness(g: &IncidenceGeometry, h: &[usize]) -> Result<Option<Option<usize>>> {
    gq_order(g)?;
    Ok(violation(g, &membership(g, h)?))
}

pub fn is_geometric_hyperplane(g: &IncidenceGeometry, h: &[usize]) -> Result<bool> {
    Ok(hyperplane_witness(g, h)?.is_none())
}

pub fn classify_hyperplane(g: &IncidenceGeometry, h: &[usize]) -> Result<HyperplaneVerdict> {
    let (s, t) = gq_order(g)?;
    let inside = membership(g, h)?;
    if let Some(witness) = violation(g, &inside) {
        return Ok(HyperplaneVerdict { witness, ..HyperplaneVerdict::kind(HyperplaneKind::NotHyperplane) });
    }
    classify_members(g, &inside, (s, t))
}

fn classify_members(g: &IncidenceGeometry, inside: &[bool], (s, t): (usize, usize)) -> Result<HyperplaneVerdict> {
    let points: Vec<usize> = (0..g.num_points()).filter(|&p| inside[p]).collect();
    let lines: Vec<usize> = (0..g.num_lines())
        .filter(|&l| g.points_on(l).iter().all(|&p| inside[p as usize]))
        .collect();
    if lines.is_empty() {
        return Ok(HyperplaneVerdict::kind(HyperplaneKind::A));
    }
    let perp_size = 1 + (t + 1) * s;
    if points.len() == perp_size {
        let center = points.iter().copied().find(|&x| {
            g.lines_through(x).iter().all(|&l| g.points_on(l as usize).iter().all(|&p| inside[p as usize]))
        });
        if let Some(x) = center {
            return Ok(HyperplaneVerdict { center: Some(x), ..HyperplaneVerdict::kind(HyperplaneKind::B) });
        }
    }
    let (sub, _) = g.induced_subgeometry(&points, &lines)?;
    let class = classify_polygon(&sub);
    match class {
        Ok(c) if c.gonality == 4 && t % s == 0 && c.order == Some((s, t / s)) => Ok(HyperplaneVerdict {
            suborder: c.order,
            ..HyperplaneVerdict::kind(HyperplaneKind::C)
        }),
        other => Err(Error::Internal(format!(
            "hyperplane with {} points and {} lines fits none of the three kinds: {}",
            points.len(),
            lines.len(),
            match other {
                Ok(c) => c.to_string(),
                Err(e) => e.to_string(),
            }
        ))),
    }
}

/// Partial assignment: 0 undecided, 1 in, 2 out.
struct Search<'a> {
    g: &'a IncidenceGeometry,
    nodes: AtomicU64,
    budget: u64,
    abort: AtomicBool,
}

impl Search<'_> {
    /// Unit propagation over the line rule; `false` on contradiction.
    fn propagate(&self, state: &mut [u8]) -> bool {
        let g = self.g;
        loop {
            let mut changed = false;
            for l in 0..g.num_lines() {
                let pts = g.points_on(l);
                let (mut i, mut o, mut undecided) = (0, 0, 0);
                for &p in pts {
                    match state[p as usize] {
                        1 => i += 1,
                        2 => o += 1,
                        _ => undecided += 1,
                    }
                }
                let force = if i >= 2 {
                    if o > 0 {
                        return false;
                    }
                    Some(1)
                } else if i == 1 && o > 0 {
                    Some(2)
                } else if i == 0 && undecided == 0 {
                    return false;
                } else if i == 0 && o > 0 && undecided == 1 {
                    Some(1)
                } else {
                    None
                };
                if let (Some(v), true) = (force, undecided > 0) {
                    for &p in pts {
                        if state[p as usize] == 0 {
                            state[p as usize] = v;
                        }
                    }
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn dfs(&self, mut state: Vec<u8>, out: &mut Vec<Vec<usize>>) {
        if self.abort.load(Ordering::Relaxed) {
            return;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.abort.store(true, Ordering::Relaxed);
            return;
        }
        if !self.propagate(&mut state) {
            return;
        }
        match state.iter().position(|&x| x == 0) {
            None => {
                let h: Vec<usize> = (0..state.len()).filter(|&p| state[p] == 1).collect();
                if h.len() < state.len() {
                    out.push(h);
                }
            }
            Some(p) => {
                for v in [1, 2] {
                    let mut child = state.clone();
                    child[p] = v;
                    self.dfs(child, out);
                }
            }
        }
    }
}

/// Every hyperplane of a small thick GQ with its verdict, sorted by point
/// set. The search splits on how line 0 meets the hyperplane.
pub fn enumerate_hyperplanes(g: &IncidenceGeometry) -> Result<Vec<(Vec<usize>, HyperplaneVerdict)>> {
    enumerate_hyperplanes_with_budget(g, crate::search::node_budget_from_env())
}

pub fn enumerate_hyperplanes_with_budget(
    g: &IncidenceGeometry,
    budget: u64,
) -> Result<Vec<(Vec<usize>, HyperplaneVerdict)>> {
    let order = gq_order(g)?;
    if g.num_points() > MAX_ENUMERATION_POINTS {
        return Err(Error::Truncated {
            found: 0,
            nodes: 0,
            reason: format!("hyperplane enumeration is limited to {MAX_ENUMERATION_POINTS} points"),
        });
    }
    let search = Search { g, nodes: AtomicU64::new(0), budget, abort: AtomicBool::new(false) };
    let line0: Vec<usize> = g.points_on(0).iter().map(|&p| p as usize).collect();
    // root branches: line 0 inside H, or meeting H in exactly one point
    let roots: Vec<Option<usize>> = std::iter::once(None).chain(line0.iter().map(|&p| Some(p))).collect();
    let parts = par::map_slice(&roots, |root| {
        let mut state = vec![0u8; g.num_points()];
        for &p in &line0 {
            state[p] = match root {
                None => 1,
                Some(x) if *x == p => 1,
                Some(_) => 2,
            };
        }
        let mut out = Vec::new();
        search.dfs(state, &mut out);
        out
    });
    let mut sets: Vec<Vec<usize>> = parts.into_iter().flatten().collect();
    if search.abort.load(Ordering::Relaxed) {
        return Err(Error::Truncated {
            found: sets.len(),
            nodes: search.nodes.load(Ordering::Relaxed),
            reason: "node budget exhausted".into(),
        });
    }
    sets.sort_unstable();
    sets.dedup();
    let verdicts = par::map_slice(&sets, |h| {
        let mut inside = vec![false; g.num_points()];
        h.iter().for_each(|&p| inside[p] = true);
        classify_members(g, &inside, order)
    });
    sets.into_iter().zip(verdicts).map(|(h, v)| Ok((h, v?))).collect()
}

/// The argument that a morphism onto a GQ of order (s',t') cannot map a
/// hyperplane onto a thin subquadrangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryTrace {
    pub order: (usize, usize),
    /// True when the hypotheses hold and lead to a contradiction.
    pub contradiction: bool,
    pub steps: Vec<String>,
}

impl fmt::Display for CorollaryTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{}. {s}", i + 1)?;
        }
        Ok(())
    }
}

pub fn thin_type_c_corollary_check((s, t): (usize, usize)) -> CorollaryTrace {
    let mut steps = vec![format!("target quadrangle of order ({s},{t}); suppose the image hyperplane is of kind C and thin")];
    if s < 2 || t < 2 {
        steps.push(format!("order ({s},{t}) is not thick: outside the hypotheses, no conclusion"));
        return CorollaryTrace { order: (s, t), contradiction: false, steps };
    }
    if t % s != 0 {
        steps.push(format!("kind C needs order ({s},t/s) but {s} does not divide {t}: no kind C hyperplane exists"));
        return CorollaryTrace { order: (s, t), contradiction: true, steps };
    }
    steps.push(format!("kind C has order ({s},{}); since s = {s} > 1, thin forces t/s = 1", t / s));
    if s != t {
        steps.push(format!("t/s = {} != 1: the hyperplane is thick, contradiction", t / s));
        return CorollaryTrace { order: (s, t), contradiction: true, steps };
    }
    steps.push(format!("so s' = t' = {s} and the hyperplane is a grid of order ({s},1)"));
    steps.push("the restricted map is an epimorphism from a thick quadrangle onto this thin quadrangle".into());
    steps.push(format!("the quadrangle classification forces s' = 1, but s' = {s}: contradiction"));
    steps.push("hence the morphism is surjective whenever the image hyperplane is not of kind B".into());
    CorollaryTrace { order: (s, t), contradiction: true, steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::symplectic_quadrangle;

    fn perp(g: &IncidenceGeometry, x: usize) -> Vec<usize> {
        let mut h = g.neighbours(x);
        h.push(x);
        h.sort_unstable();
        h
    }

    #[test]
    fn perp_is_kind_b() {
        let w = symplectic_quadrangle(2).unwrap();
        let h = perp(&w, 3);
        assert_eq!(h.len(), 7);
        assert!(is_geometric_hyperplane(&w, &h).unwrap());
        let v = classify_hyperplane(&w, &h).unwrap();
        assert_eq!((v.kind, v.center), (HyperplaneKind::B, Some(3)));
    }

    #[test]
    fn degenerate_sets() {
        let w = symplectic_quadrangle(2).unwrap();
        let all: Vec<usize> = (0..15).collect();
        assert!(!is_geometric_hyperplane(&w, &all).unwrap());
        assert!(!is_geometric_hyperplane(&w, &[]).unwrap());
        let v = classify_hyperplane(&w, &[0]).unwrap();
        assert_eq!(v.kind, HyperplaneKind::NotHyperplane);
        assert!(v.witness.is_some());
        assert!(is_geometric_hyperplane(&w, &[99]).is_err());
    }

    #[test]
    fn w2_census() {
        let w = symplectic_quadrangle(2).unwrap();
        let all = enumerate_hyperplanes(&w).unwrap();
        let count = |k| all.iter().filter(|(_, v)| v.kind == k).count();
        assert_eq!(count(HyperplaneKind::B), 15);
        assert!(all.iter().all(|(h, v)| v.kind != HyperplaneKind::A || h.len() == 5));
        assert!(all.iter().all(|(_, v)| v.kind != HyperplaneKind::C || v.suborder == Some((2, 1))));
        assert_eq!(all.len(), count(HyperplaneKind::A) + count(HyperplaneKind::B) + count(HyperplaneKind::C));
        assert_eq!((count(HyperplaneKind::A), count(HyperplaneKind::C)), (6, 10));
    }

    #[test]
    fn corollary_traces() {
        assert!(thin_type_c_corollary_check((2, 2)).contradiction);
        assert!(thin_type_c_corollary_check((3, 3)).contradiction);
        assert!(!thin_type_c_corollary_check((1, 1)).contradiction);
    }
}
