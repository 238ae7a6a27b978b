//! Incidence-preserving maps between geometries.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::incidence::{Element, Flag, IncidenceGeometry};

/// A point map and a line map between two geometries.
///
/// Construction only checks that the maps are total and in range; use
/// [`verify_morphism`] for incidence preservation. Equality, hashing and
/// ordering look at the two maps only, so compare morphisms that share
/// source and target.
#[derive(Clone)]
pub struct GeometryMorphism {
    source: Arc<IncidenceGeometry>,
    target: Arc<IncidenceGeometry>,
    point_map: Vec<usize>,
    line_map: Vec<usize>,
}

impl fmt::Debug for GeometryMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeometryMorphism")
            .field("point_map", &self.point_map)
            .field("line_map", &self.line_map)
            .finish()
    }
}

impl PartialEq for GeometryMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.point_map == other.point_map && self.line_map == other.line_map
    }
}

impl Eq for GeometryMorphism {}

impl Hash for GeometryMorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.point_map.hash(state);
        self.line_map.hash(state);
    }
}

impl PartialOrd for GeometryMorphism {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GeometryMorphism {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.point_map, &self.line_map).cmp(&(&other.point_map, &other.line_map))
    }
}

impl GeometryMorphism {
    pub fn new(
        source: Arc<IncidenceGeometry>,
        target: Arc<IncidenceGeometry>,
        point_map: Vec<usize>,
        line_map: Vec<usize>,
    ) -> Result<Self> {
        if point_map.len() != source.num_points() || line_map.len() != source.num_lines() {
            return Err(Error::ContractViolation(format!(
                "maps cover {} points and {} lines, source has {} and {}",
                point_map.len(),
                line_map.len(),
                source.num_points(),
                source.num_lines()
            )));
        }
        if let Some(p) = point_map.iter().position(|&x| x >= target.num_points()) {
            return Err(Error::Index(format!("point {p} maps to missing point {}", point_map[p])));
        }
        if let Some(l) = line_map.iter().position(|&x| x >= target.num_lines()) {
            return Err(Error::Index(format!("line {l} maps to missing line {}", line_map[l])));
        }
        Ok(GeometryMorphism { source, target, point_map, line_map })
    }

    pub fn identity(g: Arc<IncidenceGeometry>) -> Self {
        let point_map = (0..g.num_points()).collect();
        let line_map = (0..g.num_lines()).collect();
        GeometryMorphism { source: g.clone(), target: g, point_map, line_map }
    }

    pub fn source(&self) -> &Arc<IncidenceGeometry> {
        &self.source
    }

    pub fn target(&self) -> &Arc<IncidenceGeometry> {
        &self.target
    }

    pub fn point_map(&self) -> &[usize] {
        &self.point_map
    }

    pub fn line_map(&self) -> &[usize] {
        &self.line_map
    }

    pub fn image(&self, e: Element) -> Element {
        match e {
            Element::Point(p) => Element::Point(self.point_map[p]),
            Element::Line(l) => Element::Line(self.line_map[l]),
        }
    }

    /// Same maps, reattached to other (equal) geometries.
    pub fn with_geometries(
        &self,
        source: Arc<IncidenceGeometry>,
        target: Arc<IncidenceGeometry>,
    ) -> Result<Self> {
        Self::new(source, target, self.point_map.clone(), self.line_map.clone())
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &GeometryMorphism) -> Result<Self> {
        if self.target.num_points() != other.source.num_points()
            || self.target.num_lines() != other.source.num_lines()
        {
            return Err(Error::ContractViolation("composed maps do not match up".into()));
        }
        let point_map = self.point_map.iter().map(|&p| other.point_map[p]).collect();
        let line_map = self.line_map.iter().map(|&l| other.line_map[l]).collect();
        Self::new(self.source.clone(), other.target.clone(), point_map, line_map)
    }

    /// The same map read between the duals.
    pub fn dualized(&self) -> Self {
        GeometryMorphism {
            source: Arc::new(self.source.dual()),
            target: Arc::new(self.target.dual()),
            point_map: self.line_map.clone(),
            line_map: self.point_map.clone(),
        }
    }

    /// Like [`dualized`](Self::dualized) but with caller-supplied duals.
    pub fn dualized_onto(
        &self,
        dual_source: Arc<IncidenceGeometry>,
        dual_target: Arc<IncidenceGeometry>,
    ) -> Result<Self> {
        Self::new(dual_source, dual_target, self.line_map.clone(), self.point_map.clone())
    }

    pub fn is_injective(&self) -> bool {
        injective(&self.point_map, self.target.num_points())
            && injective(&self.line_map, self.target.num_lines())
    }

    pub fn is_bijective(&self) -> bool {
        self.source.num_points() == self.target.num_points()
            && self.source.num_lines() == self.target.num_lines()
            && self.is_injective()
    }

    /// Inverse of a bijective map; it is a morphism iff `self` is an
    /// isomorphism.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_bijective() {
            return Err(Error::ContractViolation("only bijections can be inverted".into()));
        }
        let mut point_map = vec![0; self.point_map.len()];
        for (p, &x) in self.point_map.iter().enumerate() {
            point_map[x] = p;
        }
        let mut line_map = vec![0; self.line_map.len()];
        for (l, &x) in self.line_map.iter().enumerate() {
            line_map[x] = l;
        }
        Self::new(self.target.clone(), self.source.clone(), point_map, line_map)
    }
}

fn injective(map: &[usize], range: usize) -> bool {
    let mut seen = vec![false; range];
    map.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
}

fn surjective(map: &[usize], range: usize) -> bool {
    let mut seen = vec![false; range];
    for &x in map {
        seen[x] = true;
    }
    seen.into_iter().all(|b| b)
}

/// `Err(flag)` names the first source flag (point-major) whose image is
/// not a flag of the target.
pub fn verify_morphism(phi: &GeometryMorphism) -> std::result::Result<(), Flag> {
    match phi
        .source
        .flags()
        .find(|f| !phi.target.is_incident(phi.point_map[f.point], phi.line_map[f.line]))
    {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

/// Surjective on points and on lines; flags need not be covered.
pub fn is_epimorphism(phi: &GeometryMorphism) -> bool {
    surjective(&phi.point_map, phi.target.num_points())
        && surjective(&phi.line_map, phi.target.num_lines())
}

/// Preimages of every target point and line, each sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fibers {
    pub points: Vec<Vec<usize>>,
    pub lines: Vec<Vec<usize>>,
}

impl Fibers {
    pub fn of(&self, e: Element) -> &[usize] {
        match e {
            Element::Point(p) => &self.points[p],
            Element::Line(l) => &self.lines[l],
        }
    }
}

pub fn fibers(phi: &GeometryMorphism) -> Fibers {
    let mut points = vec![Vec::new(); phi.target.num_points()];
    for (p, &x) in phi.point_map.iter().enumerate() {
        points[x].push(p);
    }
    let mut lines = vec![Vec::new(); phi.target.num_lines()];
    for (l, &x) in phi.line_map.iter().enumerate() {
        lines[x].push(l);
    }
    Fibers { points, lines }
}

/// Checks that every source line maps its points onto all points of its
/// image line, and dually for pencils.
///
/// Returns the first element where this fails, or `None`. Inputs that are
/// not epimorphisms are rejected.
pub fn line_saturation(phi: &GeometryMorphism) -> Result<Option<Element>> {
    if verify_morphism(phi).is_err() || !is_epimorphism(phi) {
        return Err(Error::ContractViolation("line saturation needs an epimorphism".into()));
    }
    let (s, t) = (&phi.source, &phi.target);
    for l in 0..s.num_lines() {
        let mut image: Vec<usize> = s.points_on(l).iter().map(|&p| phi.point_map[p as usize]).collect();
        image.sort_unstable();
        image.dedup();
        if !image.iter().copied().eq(t.points_on(phi.line_map[l]).iter().map(|&x| x as usize)) {
            return Ok(Some(Element::Line(l)));
        }
    }
    for p in 0..s.num_points() {
        let mut image: Vec<usize> = s.lines_through(p).iter().map(|&l| phi.line_map[l as usize]).collect();
        image.sort_unstable();
        image.dedup();
        if !image.iter().copied().eq(t.lines_through(phi.point_map[p]).iter().map(|&x| x as usize)) {
            return Ok(Some(Element::Point(p)));
        }
    }
    Ok(None)
}
