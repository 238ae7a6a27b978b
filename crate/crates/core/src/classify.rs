//! Canonical epimorphisms onto ordinary polygons and their classification.
//!
//! An epimorphism from a thick generalized m-gon (m = 3, 4, 6) onto the
//! ordinary m-gon falls in one of two classes. In case A some line `L` is
//! the whole fiber of its image line, its points are split in two blocks,
//! and every other fiber is determined by collinearity with the blocks.
//! Case B is the dual: a point is a whole fiber and its pencil is split.
//!
//! Target points are named by roles `a, b, c, ...` (role `i` is point `i`
//! of the standard ordinary polygon, role line `i` joins roles `i` and
//! `i+1`). A descriptor fixes the theorem, the case, the base element, the
//! two blocks and a labeling, which is where the standard roles land in the
//! actual target.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::construct::{double, ordinary_polygon, thin_hexagon_from_plane, undouble};
use crate::error::{Error, Result};
use crate::incidence::{Element, IncidenceGeometry};
use crate::morphism::{is_epimorphism, line_saturation, verify_morphism, GeometryMorphism};
use crate::par;
use crate::report::Report;
use crate::search::{enumerate_epimorphisms, find_isomorphism, SearchOptions};
use crate::validate::{classify_polygon, order_of};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// Projective planes onto the triangle.
    GT,
    /// Generalized quadrangles onto the ordinary quadrangle.
    JATGQ,
    /// Generalized hexagons onto the ordinary hexagon.
    JATGH,
}

impl Theorem {
    pub fn gonality(self) -> usize {
        match self {
            Theorem::GT => 3,
            Theorem::JATGQ => 4,
            Theorem::JATGH => 6,
        }
    }

    pub fn for_gonality(m: usize) -> Result<Self> {
        match m {
            3 => Ok(Theorem::GT),
            4 => Ok(Theorem::JATGQ),
            6 => Ok(Theorem::JATGH),
            _ => Err(Error::Domain(format!("no classification theorem for gonality {m}"))),
        }
    }

    /// Roles of the two blocks on the base line, in block order.
    fn block_roles(self) -> (usize, usize) {
        match self {
            Theorem::GT | Theorem::JATGQ => (0, 1),
            Theorem::JATGH => (2, 1),
        }
    }

    /// Role line of the base line.
    fn base_role_line(self) -> usize {
        let (r1, r2) = self.block_roles();
        r1.min(r2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Theorem::GT => "GT",
            Theorem::JATGQ => "JATGQ",
            Theorem::JATGH => "JATGH",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    /// A line is a whole fiber; its points are split.
    A,
    /// A point is a whole fiber; its pencil is split.
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalEpiDescriptor {
    pub theorem: Theorem,
    pub case: Case,
    /// A line (case A) or a point (case B) of the source.
    pub base: usize,
    /// The two blocks: points on the base line (case A) or lines through
    /// the base point (case B). For GT and JATGQ these are (A, B); for
    /// JATGH (C, B).
    pub blocks: (Vec<usize>, Vec<usize>),
    /// `labeling[i]` is the target point playing role `i`.
    pub labeling: Vec<usize>,
}

impl fmt::Display for CanonicalEpiDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.case {
            Case::A => Element::Line(self.base),
            Case::B => Element::Point(self.base),
        };
        write!(
            f,
            "{} case {:?} base {base} blocks {:?}|{:?} labeling {:?}",
            self.theorem, self.case, self.blocks.0, self.blocks.1, self.labeling
        )
    }
}

/// Outcome of [`classify_epimorphism`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Canonical(CanonicalEpiDescriptor),
    Unclassified(String),
}

/// All ways to walk the target's only cycle: `2m` role-to-point maps.
pub fn target_labelings(target: &IncidenceGeometry, m: usize) -> Result<Vec<Vec<usize>>> {
    let ok = target.num_points() == m
        && target.num_lines() == m
        && order_of(target) == Some((1, 1))
        && classify_polygon(target).is_ok_and(|c| c.gonality as usize == m);
    if !ok {
        return Err(Error::ContractViolation(format!("target is not an ordinary {m}-gon")));
    }
    let mut out = Vec::with_capacity(2 * m);
    for start in 0..m {
        for &first in &target.neighbours(start) {
            let mut walk = vec![start, first];
            while walk.len() < m {
                let (prev, cur) = (walk[walk.len() - 2], walk[walk.len() - 1]);
                let next = target.neighbours(cur).into_iter().find(|&x| x != prev).unwrap();
                walk.push(next);
            }
            out.push(walk);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn role_line(target: &IncidenceGeometry, labeling: &[usize], j: usize) -> usize {
    let m = labeling.len();
    target.join(labeling[j], labeling[(j + 1) % m]).expect("consecutive roles are collinear")
}

/// Source and target checked once, for building and classifying many maps.
pub struct Classifier {
    source: Arc<IncidenceGeometry>,
    dual_source: IncidenceGeometry,
    target: Arc<IncidenceGeometry>,
    theorem: Theorem,
    labelings: Vec<Vec<usize>>,
}

const NONE: usize = usize::MAX;

fn collinear_with(g: &IncidenceGeometry, set: &[usize]) -> BTreeSet<usize> {
    set.iter().flat_map(|&p| g.neighbours(p)).collect()
}

/// Roles of the case A epimorphism on `g`, against the standard polygon.
///
/// Also returns, for JATGH, the two alternative readings of the `ef`
/// fiber (via F and via E), used to cross-check the statement.
/// Point roles, line roles, and the optional pair of `ef` readings.
type Roles = (Vec<usize>, Vec<usize>, Option<(Vec<usize>, Vec<usize>)>);

fn case_a_roles(
    g: &IncidenceGeometry,
    theorem: Theorem,
    base: usize,
    x1: &[usize],
    x2: &[usize],
) -> Result<Roles> {
    let np = g.num_points();
    let mut point = vec![NONE; np];
    let mut line = vec![NONE; g.num_lines()];
    let put = |roles: &mut Vec<usize>, set: &mut dyn Iterator<Item = usize>, r: usize, what: &str| -> Result<()> {
        for x in set {
            if roles[x] != NONE && roles[x] != r {
                return Err(Error::Internal(format!("{what} {x} falls in two fibers")));
            }
            roles[x] = r;
        }
        Ok(())
    };
    let on_base: BTreeSet<usize> = g.points_on(base).iter().map(|&p| p as usize).collect();
    let off_base = |s: BTreeSet<usize>| -> Vec<usize> { s.into_iter().filter(|p| !on_base.contains(p)).collect() };
    let through = |set: &[usize]| -> BTreeSet<usize> {
        set.iter().flat_map(|&p| g.lines_through(p).iter().map(|&l| l as usize)).collect()
    };
    let (r1, r2) = theorem.block_roles();
    put(&mut point, &mut x1.iter().copied(), r1, "point")?;
    put(&mut point, &mut x2.iter().copied(), r2, "point")?;
    line[base] = theorem.base_role_line();
    let mut alternatives = None;
    match theorem {
        Theorem::GT => {
            point.iter_mut().filter(|r| **r == NONE).for_each(|r| *r = 2);
            for l in (0..g.num_lines()).filter(|&l| l != base) {
                let y = g.meet(l, base).ok_or_else(|| Error::ContractViolation("lines must meet in a plane".into()))?;
                line[l] = if point[y] == 1 { 1 } else { 2 };
            }
        }
        Theorem::JATGQ => {
            let c = off_base(collinear_with(g, x2));
            let d = off_base(collinear_with(g, x1));
            put(&mut point, &mut c.iter().copied(), 2, "point")?;
            put(&mut point, &mut d.iter().copied(), 3, "point")?;
            put(&mut line, &mut through(x2).into_iter().filter(|&l| l != base), 1, "line")?;
            put(&mut line, &mut through(x1).into_iter().filter(|&l| l != base), 3, "line")?;
            let (cs, ds): (BTreeSet<usize>, BTreeSet<usize>) = (c.into_iter().collect(), d.into_iter().collect());
            let cd = (0..g.num_lines()).filter(|&l| {
                let pts = g.points_on(l);
                pts.iter().any(|&p| cs.contains(&(p as usize))) && pts.iter().any(|&p| ds.contains(&(p as usize)))
            });
            put(&mut line, &mut cd.collect::<Vec<_>>().into_iter(), 2, "line")?;
        }
        Theorem::JATGH => {
            // x1 = C, x2 = B
            let d = off_base(collinear_with(g, x1));
            let a = off_base(collinear_with(g, x2));
            let cd_pts: BTreeSet<usize> = x1.iter().chain(&d).copied().collect();
            let ab_pts: BTreeSet<usize> = x2.iter().chain(&a).copied().collect();
            let e: Vec<usize> = collinear_with(g, &d).into_iter().filter(|p| !cd_pts.contains(p)).collect();
            let f: Vec<usize> = collinear_with(g, &a).into_iter().filter(|p| !ab_pts.contains(p)).collect();
            put(&mut point, &mut d.iter().copied(), 3, "point")?;
            put(&mut point, &mut a.iter().copied(), 0, "point")?;
            put(&mut point, &mut e.iter().copied(), 4, "point")?;
            put(&mut point, &mut f.iter().copied(), 5, "point")?;
            let cd: BTreeSet<usize> = through(x1).into_iter().filter(|&l| l != base).collect();
            let ab: BTreeSet<usize> = through(x2).into_iter().filter(|&l| l != base).collect();
            let de: BTreeSet<usize> = through(&d).into_iter().filter(|l| !cd.contains(l)).collect();
            let fa: BTreeSet<usize> = through(&a).into_iter().filter(|l| !ab.contains(l)).collect();
            put(&mut line, &mut cd.iter().copied(), 2, "line")?;
            put(&mut line, &mut ab.iter().copied(), 0, "line")?;
            put(&mut line, &mut de.iter().copied(), 3, "line")?;
            put(&mut line, &mut fa.iter().copied(), 5, "line")?;
            let via_f = through(&f).into_iter().filter(|l| !fa.contains(l)).collect();
            let via_e = through(&e).into_iter().filter(|l| !de.contains(l)).collect();
            for l in line.iter_mut().filter(|r| **r == NONE) {
                *l = 4;
            }
            alternatives = Some((via_f, via_e));
        }
    }
    if let Some(p) = point.iter().position(|&r| r == NONE) {
        return Err(Error::Internal(format!("point {p} falls in no fiber")));
    }
    if let Some(l) = line.iter().position(|&r| r == NONE) {
        return Err(Error::Internal(format!("line {l} falls in no fiber")));
    }
    Ok((point, line, alternatives))
}

impl Classifier {
    /// Checks that `source` is a thick generalized m-gon with m in {3,4,6}
    /// and `target` an ordinary m-gon.
    pub fn new(source: Arc<IncidenceGeometry>, target: Arc<IncidenceGeometry>) -> Result<Self> {
        let class = classify_polygon(&source).map_err(|e| Error::ContractViolation(format!("source: {e}")))?;
        if !class.is_thick {
            return Err(Error::ContractViolation(format!("source must be thick, got {class}")));
        }
        let theorem = Theorem::for_gonality(class.gonality as usize)
            .map_err(|e| Error::ContractViolation(e.to_string()))?;
        let labelings = target_labelings(&target, theorem.gonality())?;
        let dual_source = source.dual();
        Ok(Classifier { source, dual_source, target, theorem, labelings })
    }

    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    pub fn source(&self) -> &Arc<IncidenceGeometry> {
        &self.source
    }

    pub fn target(&self) -> &Arc<IncidenceGeometry> {
        &self.target
    }

    pub fn labelings(&self) -> &[Vec<usize>] {
        &self.labelings
    }

    fn validate(&self, d: &CanonicalEpiDescriptor) -> Result<()> {
        let bad = |msg: String| Err(Error::Descriptor(msg));
        if d.theorem != self.theorem {
            return bad(format!("descriptor is for {}, source needs {}", d.theorem, self.theorem));
        }
        let s = &self.source;
        let members: Vec<usize> = match d.case {
            Case::A if d.base < s.num_lines() => s.points_on(d.base).iter().map(|&x| x as usize).collect(),
            Case::B if d.base < s.num_points() => s.lines_through(d.base).iter().map(|&x| x as usize).collect(),
            _ => return bad(format!("base {} out of range", d.base)),
        };
        let (x1, x2) = &d.blocks;
        if x1.is_empty() || x2.is_empty() {
            return bad("both blocks must be nonempty".into());
        }
        let mut all: Vec<usize> = x1.iter().chain(x2).copied().collect();
        all.sort_unstable();
        if all != members {
            return bad("blocks must partition the elements on the base".into());
        }
        if !self.labelings.contains(&d.labeling) {
            return bad(format!("{:?} does not walk the target cycle", d.labeling));
        }
        Ok(())
    }

    /// Roles against the standard ordinary polygon, before labeling.
    fn standard_roles(&self, d: &CanonicalEpiDescriptor) -> Result<Roles> {
        let m = self.theorem.gonality();
        match d.case {
            Case::A => case_a_roles(&self.source, self.theorem, d.base, &d.blocks.0, &d.blocks.1),
            Case::B => {
                // dual(source) -> standard, read backwards, then the fixed
                // isomorphism dual(standard) -> standard
                let (pr, lr, _) = case_a_roles(&self.dual_source, self.theorem, d.base, &d.blocks.0, &d.blocks.1)?;
                let points = lr;
                let lines = pr.into_iter().map(|r| (r + m - 1) % m).collect();
                Ok((points, lines, None))
            }
        }
    }

    /// The canonical epimorphism of a descriptor, checked to be an
    /// epimorphism.
    pub fn build(&self, d: &CanonicalEpiDescriptor) -> Result<GeometryMorphism> {
        self.validate(d)?;
        let (points, lines, _) = self.standard_roles(d)?;
        let m = self.theorem.gonality();
        let role_lines: Vec<usize> = (0..m).map(|j| role_line(&self.target, &d.labeling, j)).collect();
        let phi = GeometryMorphism::new(
            self.source.clone(),
            self.target.clone(),
            points.into_iter().map(|r| d.labeling[r]).collect(),
            lines.into_iter().map(|r| role_lines[r]).collect(),
        )?;
        if let Err(f) = verify_morphism(&phi) {
            return Err(Error::Internal(format!("canonical map breaks flag ({}, {})", f.point, f.line)));
        }
        if !is_epimorphism(&phi) {
            return Err(Error::Internal(format!("canonical map for {d} is not surjective")));
        }
        Ok(phi)
    }

    /// For JATGH descriptors in case A: the `ef` fiber as built (all lines
    /// left over) and the two readings of the statement, via F and via E.
    pub fn ef_readings(&self, d: &CanonicalEpiDescriptor) -> Result<Option<[Vec<usize>; 3]>> {
        if self.theorem != Theorem::JATGH || d.case != Case::A {
            return Ok(None);
        }
        self.validate(d)?;
        let (_, lines, alt) = self.standard_roles(d)?;
        let built = (0..lines.len()).filter(|&l| lines[l] == 4).collect();
        let (via_f, via_e) = alt.expect("hexagon case A has readings");
        Ok(Some([built, via_f, via_e]))
    }

    /// Every descriptor: both cases, every base, every ordered split, every
    /// labeling.
    pub fn descriptors(&self) -> Vec<CanonicalEpiDescriptor> {
        let s = &self.source;
        let mut out = Vec::new();
        for (case, count) in [(Case::A, s.num_lines()), (Case::B, s.num_points())] {
            for base in 0..count {
                let members: Vec<usize> = match case {
                    Case::A => s.points_on(base).iter().map(|&x| x as usize).collect(),
                    Case::B => s.lines_through(base).iter().map(|&x| x as usize).collect(),
                };
                let k = members.len();
                for mask in 1..(1u64 << k) - 1 {
                    let x1: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect();
                    let x2: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| members[i]).collect();
                    for lab in &self.labelings {
                        out.push(CanonicalEpiDescriptor {
                            theorem: self.theorem,
                            case,
                            base,
                            blocks: (x1.clone(), x2.clone()),
                            labeling: lab.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// The canonical generator: every canonical epimorphism, deduplicated
    /// and sorted.
    pub fn canonical_set(&self) -> Result<Vec<GeometryMorphism>> {
        let ds = self.descriptors();
        let maps = par::map_slice(&ds, |d| self.build(d));
        let mut out = maps.into_iter().collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Recovers a descriptor reproducing `phi`, preferring case A.
    pub fn classify(&self, phi: &GeometryMorphism) -> Result<Classification> {
        self.classify_in(phi, &[Case::A, Case::B])
    }

    /// Like [`classify`](Self::classify), but only tries descriptors of
    /// one case. Small sources have maps that belong to both cases.
    pub fn classify_as(&self, phi: &GeometryMorphism, case: Case) -> Result<Classification> {
        self.classify_in(phi, &[case])
    }

    fn classify_in(&self, phi: &GeometryMorphism, cases: &[Case]) -> Result<Classification> {
        if phi.source().as_ref() != self.source.as_ref() || phi.target().as_ref() != self.target.as_ref() {
            return Err(Error::ContractViolation("map does not match the classifier's geometries".into()));
        }
        if verify_morphism(phi).is_err() || !is_epimorphism(phi) {
            return Err(Error::ContractViolation("only epimorphisms can be classified".into()));
        }
        let m = self.theorem.gonality();
        let (r1, r2) = self.theorem.block_roles();
        let base_line = self.theorem.base_role_line();
        let mut line_fiber = vec![Vec::new(); self.target.num_lines()];
        for (l, &x) in phi.line_map().iter().enumerate() {
            line_fiber[x].push(l);
        }
        let mut point_fiber = vec![Vec::new(); self.target.num_points()];
        for (p, &x) in phi.point_map().iter().enumerate() {
            point_fiber[x].push(p);
        }
        let mut tried = 0;
        for &case in cases {
            let singletons: Vec<usize> = match case {
                Case::A => line_fiber.iter().filter(|f| f.len() == 1).map(|f| f[0]).collect(),
                Case::B => point_fiber.iter().filter(|f| f.len() == 1).map(|f| f[0]).collect(),
            };
            for &base in &singletons {
                for lab in &self.labelings {
                    let role_lines: Vec<usize> = (0..m).map(|j| role_line(&self.target, lab, j)).collect();
                    let (members, image, want1, want2): (Vec<usize>, &dyn Fn(usize) -> usize, usize, usize) = match case {
                        Case::A => {
                            if role_lines[base_line] != phi.line_map()[base] {
                                continue;
                            }
                            let members = self.source.points_on(base).iter().map(|&x| x as usize).collect();
                            (members, &|p| phi.point_map()[p], lab[r1], lab[r2])
                        }
                        Case::B => {
                            if lab[base_line] != phi.point_map()[base] {
                                continue;
                            }
                            let members = self.source.lines_through(base).iter().map(|&x| x as usize).collect();
                            (members, &|l| phi.line_map()[l], role_lines[(r1 + m - 1) % m], role_lines[(r2 + m - 1) % m])
                        }
                    };
                    let x1: Vec<usize> = members.iter().copied().filter(|&x| image(x) == want1).collect();
                    let x2: Vec<usize> = members.iter().copied().filter(|&x| image(x) == want2).collect();
                    if x1.is_empty() || x2.is_empty() || x1.len() + x2.len() != members.len() {
                        continue;
                    }
                    let d = CanonicalEpiDescriptor {
                        theorem: self.theorem,
                        case,
                        base,
                        blocks: (x1, x2),
                        labeling: lab.clone(),
                    };
                    tried += 1;
                    if self.build(&d)? == *phi {
                        return Ok(Classification::Canonical(d));
                    }
                }
            }
        }
        let lines = line_fiber.iter().filter(|f| f.len() == 1).count();
        let points = point_fiber.iter().filter(|f| f.len() == 1).count();
        Ok(Classification::Unclassified(format!(
            "{lines} singleton line fiber(s), {points} singleton point fiber(s), {tried} candidate descriptor(s), none reproduces the map"
        )))
    }
}

fn check_theorem(source: &IncidenceGeometry, theorem: Theorem) -> Result<()> {
    let class = classify_polygon(source).map_err(|e| Error::ContractViolation(e.to_string()))?;
    if class.gonality as usize != theorem.gonality() {
        return Err(Error::ContractViolation(format!("{theorem} needs gonality {}, got {class}", theorem.gonality())));
    }
    Ok(())
}

fn build_for(
    theorem: Theorem,
    source: &Arc<IncidenceGeometry>,
    target: &Arc<IncidenceGeometry>,
    d: &CanonicalEpiDescriptor,
) -> Result<GeometryMorphism> {
    check_theorem(source, theorem)?;
    Classifier::new(source.clone(), target.clone())?.build(d)
}

/// Canonical epimorphism of a thick projective plane onto a triangle.
pub fn canonical_plane_epimorphism(
    plane: &Arc<IncidenceGeometry>,
    target: &Arc<IncidenceGeometry>,
    d: &CanonicalEpiDescriptor,
) -> Result<GeometryMorphism> {
    build_for(Theorem::GT, plane, target, d)
}

/// Canonical epimorphism of a thick generalized quadrangle onto an
/// ordinary quadrangle.
pub fn canonical_gq_epimorphism(
    gq: &Arc<IncidenceGeometry>,
    target: &Arc<IncidenceGeometry>,
    d: &CanonicalEpiDescriptor,
) -> Result<GeometryMorphism> {
    build_for(Theorem::JATGQ, gq, target, d)
}

/// Canonical epimorphism of a thick generalized hexagon onto an ordinary
/// hexagon.
pub fn canonical_hexagon_epimorphism(
    hexagon: &Arc<IncidenceGeometry>,
    target: &Arc<IncidenceGeometry>,
    d: &CanonicalEpiDescriptor,
) -> Result<GeometryMorphism> {
    build_for(Theorem::JATGH, hexagon, target, d)
}

/// Classifies one epimorphism; see [`Classifier`] to classify many.
pub fn classify_epimorphism(phi: &GeometryMorphism) -> Result<Classification> {
    Classifier::new(phi.source().clone(), phi.target().clone())?.classify(phi)
}

/// The thin target of order (1,1) used for gonality `m`: the triangle,
/// grid(2,2) for quadrangles, the ordinary hexagon.
pub fn standard_target(m: usize) -> Result<IncidenceGeometry> {
    match m {
        4 => crate::construct::grid(2, 2),
        3 | 6 => ordinary_polygon(m),
        _ => Err(Error::Domain(format!("no classification theorem for gonality {m}"))),
    }
}

/// Lifts `gamma` to the doubles.
///
/// Without `duality`, `gamma: G -> G'` becomes `double(G) -> double(G')`.
/// With `duality`, `gamma: G -> D` is read as a map onto the dual of
/// `G' = dual(D)`, and the result is `double(G) -> double(G')`, sending
/// points of `G` to line-elements of the double and lines to points.
pub fn double_epimorphism(gamma: &GeometryMorphism, duality: bool) -> Result<GeometryMorphism> {
    let src = gamma.source();
    let prime = if duality { gamma.target().dual() } else { gamma.target().as_ref().clone() };
    let ds = Arc::new(double(src)?);
    let dt = Arc::new(double(&prime)?);
    let (np, pp) = (src.num_points(), prime.num_points());
    let mut point_map = vec![0; ds.num_points()];
    for (slot, &x) in point_map.iter_mut().zip(gamma.point_map()) {
        *slot = if duality { pp + x } else { x };
    }
    for l in 0..src.num_lines() {
        point_map[np + l] = if duality { gamma.line_map()[l] } else { pp + gamma.line_map()[l] };
    }
    let line_map = src
        .flags()
        .map(|f| {
            let (a, b) = (point_map[f.point], point_map[np + f.line]);
            dt.join(a, b).ok_or_else(|| {
                Error::ContractViolation(format!(
                    "flag ({}, {}) maps to a non-flag, so gamma is not a morphism",
                    f.point, f.line
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = GeometryMorphism::new(ds, dt, point_map, line_map)?;
    if verify_morphism(&phi).is_err() || !is_epimorphism(&phi) {
        return Err(Error::ContractViolation(
            "doubled map is not an epimorphism (gamma must be surjective on flags)".into(),
        ));
    }
    Ok(phi)
}

/// Reads an epimorphism between thin 2n-gons of order (1,s) and (1,s')
/// back as an epimorphism of the undoubled n-gons. Sources of order (s,1)
/// are dualized first. The flag reports whether the two element classes
/// are swapped, in which case the result maps onto the dual of the
/// undoubled target.
pub fn undouble_epimorphism(gamma: &GeometryMorphism) -> Result<(GeometryMorphism, bool)> {
    let order = order_of(gamma.source()).ok_or_else(|| Error::Domain("source has no order".into()))?;
    if order.0 != 1 {
        if order.1 == 1 {
            return undouble_epimorphism(&gamma.dualized());
        }
        return Err(Error::Domain(format!("source order {order:?} is not thin")));
    }
    if verify_morphism(gamma).is_err() || !is_epimorphism(gamma) {
        return Err(Error::ContractViolation("undoubling needs an epimorphism".into()));
    }
    let us = undouble(gamma.source())?;
    let ut = undouble(gamma.target())?;
    let np = us.geometry.num_points();
    let mut point_img: Vec<Option<Element>> = vec![None; np];
    let mut line_img: Vec<Option<Element>> = vec![None; us.geometry.num_lines()];
    for (x, class) in us.classes.iter().enumerate() {
        let image = ut.classes[gamma.point_map()[x]];
        match *class {
            Element::Point(i) => point_img[i] = Some(image),
            Element::Line(i) => line_img[i] = Some(image),
        }
    }
    let point_img: Vec<Element> = point_img.into_iter().map(|e| e.unwrap()).collect();
    let line_img: Vec<Element> = line_img.into_iter().map(|e| e.unwrap()).collect();
    let swapped = !point_img[0].is_point();
    let consistent = point_img.iter().all(|e| e.is_point() != swapped)
        && line_img.iter().all(|e| e.is_point() == swapped);
    if !consistent {
        return Err(Error::Internal("gamma mixes the two element classes".into()));
    }
    let target = if swapped { ut.geometry.dual() } else { ut.geometry };
    let phi = GeometryMorphism::new(
        Arc::new(us.geometry),
        Arc::new(target),
        point_img.iter().map(|e| e.index()).collect(),
        line_img.iter().map(|e| e.index()).collect(),
    )?;
    if verify_morphism(&phi).is_err() || !is_epimorphism(&phi) {
        return Err(Error::Internal("undoubled map is not an epimorphism".into()));
    }
    Ok((phi, swapped))
}

/// The epimorphism between digons given by a point surjection and a line
/// surjection (every map between digons preserves incidence).
pub fn digon_epimorphism(
    source: &Arc<IncidenceGeometry>,
    target: &Arc<IncidenceGeometry>,
    points: Vec<usize>,
    lines: Vec<usize>,
) -> Result<GeometryMorphism> {
    let is_digon = |g: &IncidenceGeometry| g.num_flags() == g.num_points() * g.num_lines() && g.num_points() >= 2 && g.num_lines() >= 2;
    if !is_digon(source) || !is_digon(target) {
        return Err(Error::Domain("digon_epimorphism needs two digons".into()));
    }
    let phi = GeometryMorphism::new(source.clone(), target.clone(), points, lines)
        .map_err(|e| Error::Domain(e.to_string()))?;
    if !is_epimorphism(&phi) {
        return Err(Error::Domain("point and line maps must both be surjective".into()));
    }
    Ok(phi)
}

/// Every surjection `0..n -> 0..k`, in lexicographic order.
pub fn surjections(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (k as u64).checked_pow(n as u32).unwrap_or(0);
    for code in 0..total {
        let mut c = code;
        let mut map = vec![0; n];
        for slot in (0..n).rev() {
            map[slot] = (c % k as u64) as usize;
            c /= k as u64;
        }
        let mut seen = vec![false; k];
        map.iter().for_each(|&x| seen[x] = true);
        if seen.iter().all(|&b| b) {
            out.push(map);
        }
    }
    out
}

/// Checks that every canonical map passes the generator soundness gates.
pub(crate) fn soundness(maps: &[GeometryMorphism]) -> Option<String> {
    let bad = par::map_slice(maps, |phi| match line_saturation(phi) {
        Ok(None) => None,
        Ok(Some(e)) => Some(format!("line saturation fails at {e}")),
        Err(e) => Some(e.to_string()),
    });
    bad.into_iter().flatten().next()
}

fn sorted_set(maps: &[GeometryMorphism]) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    maps.iter().map(|m| (m.point_map().to_vec(), m.line_map().to_vec())).collect()
}

/// Records a search outcome; a truncated search is a failed check.
fn searched(
    report: &mut Report,
    name: &str,
    source: &Arc<IncidenceGeometry>,
    target: &Arc<IncidenceGeometry>,
    opts: &SearchOptions,
) -> Option<Vec<GeometryMorphism>> {
    match enumerate_epimorphisms(source, target, opts) {
        Ok(out) => {
            report.check(name, true, format!("{} epimorphism(s), {} node(s)", out.count, out.nodes));
            Some(out.maps)
        }
        Err(e) => {
            report.check(name, false, format!("incomplete: {e}"));
            None
        }
    }
}

/// Exhaustive check of the classification theorem for `source`:
/// search onto the ordinary polygon, classify every map, compare with the
/// canonical generator both ways, and check that thin targets of order
/// (s',1) with s' in {2,3} (and their duals) receive no epimorphism.
pub fn verify_classification_theorem(source: &Arc<IncidenceGeometry>, opts: &SearchOptions) -> Result<Report> {
    let class = classify_polygon(source).map_err(|e| Error::ContractViolation(e.to_string()))?;
    let m = class.gonality as usize;
    let theorem = Theorem::for_gonality(m).map_err(|e| Error::ContractViolation(e.to_string()))?;
    let target = Arc::new(standard_target(m)?);
    let classifier = Classifier::new(source.clone(), target.clone())?;
    let opts = SearchOptions { count_only: false, up_to_target_automorphism: false, limit: None, ..opts.clone() };
    let mut report = Report::new();
    let t = theorem.name();

    let generated = classifier.canonical_set()?;
    report.check(&format!("{t}.generator"), !generated.is_empty(), format!("{} canonical epimorphism(s)", generated.len()));
    let unsound = soundness(&generated);
    report.check(
        &format!("{t}.generator_sound"),
        unsound.is_none(),
        unsound.unwrap_or_else(|| "every canonical map is a saturated epimorphism".into()),
    );

    if let Some(found) = searched(&mut report, &format!("{t}.search"), source, &target, &opts) {
        let verdicts = par::map_slice(&found, |phi| classifier.classify(phi));
        let mut unclassified = 0;
        let mut first = None;
        for v in verdicts {
            match v? {
                Classification::Canonical(_) => {}
                Classification::Unclassified(why) => {
                    unclassified += 1;
                    first.get_or_insert(why);
                }
            }
        }
        let detail = match first {
            None => format!("all {} classify", found.len()),
            Some(why) => format!("{unclassified} unclassified, first: {why}"),
        };
        report.check(&format!("{t}.all_classify"), unclassified == 0, detail);
        let (a, b) = (sorted_set(&found), sorted_set(&generated));
        let missing = a.difference(&b).count();
        let extra = b.difference(&a).count();
        report.check(
            &format!("{t}.search_in_generator"),
            missing == 0,
            format!("{missing} searched map(s) outside the generator"),
        );
        report.check(
            &format!("{t}.generator_in_search"),
            extra == 0,
            format!("{extra} generated map(s) missed by the search"),
        );
        report.check(
            &format!("{t}.counts_agree"),
            found.len() == generated.len(),
            format!("search {} generator {}", found.len(), generated.len()),
        );
    }

    if theorem == Theorem::JATGH {
        report.extend(ef_cross_check(&classifier)?);
    }

    for (name, thin) in thin_targets(m)? {
        let thin = Arc::new(thin);
        if let Some(found) = searched(&mut report, &format!("{t}.search_onto_{name}"), source, &thin, &opts) {
            report.check(&format!("{t}.none_onto_{name}"), found.is_empty(), format!("{} map(s)", found.len()));
        }
    }
    Ok(report)
}

/// Thin targets of order (s',1), s' > 1, and their duals.
fn thin_targets(m: usize) -> Result<Vec<(String, IncidenceGeometry)>> {
    let mut out = Vec::new();
    match m {
        4 => {
            for s in [2, 3] {
                out.push((format!("grid{0}x{0}", s + 1), crate::construct::grid(s + 1, s + 1)?));
                out.push((format!("dual_grid{0}x{0}", s + 1), crate::construct::dual_grid(s + 1, s + 1)?));
            }
        }
        6 => {
            let h = thin_hexagon_from_plane(&crate::construct::projective_plane(2)?)?;
            out.push(("thin_hexagon_2_1".into(), h.clone()));
            out.push(("thin_hexagon_1_2".into(), h.dual()));
        }
        // a projective plane of order (s',1) with s' > 1 does not exist
        _ => {}
    }
    Ok(out)
}

/// Compares the `ef` fiber built from the leftover lines with its two
/// readings in the hexagon statement, on every base line and split.
fn ef_cross_check(c: &Classifier) -> Result<Report> {
    let lab = &c.labelings()[0];
    let ds: Vec<CanonicalEpiDescriptor> =
        c.descriptors().into_iter().filter(|d| d.case == Case::A && &d.labeling == lab).collect();
    let readings = par::map_slice(&ds, |d| c.ef_readings(d));
    let (mut via_f, mut via_e) = (0, 0);
    for r in readings {
        let [built, f, e] = r?.expect("hexagon case A");
        via_f += usize::from(built != f);
        via_e += usize::from(built != e);
    }
    let mut report = Report::new();
    report.check(
        "JATGH.ef_via_f",
        via_f == 0,
        format!("{via_f} of {} descriptor(s) disagree", ds.len()),
    );
    report.check(
        "JATGH.ef_via_e",
        via_e == 0,
        format!("{via_e} of {} descriptor(s) disagree", ds.len()),
    );
    Ok(report)
}

/// The thin m-gon of order (s,1): a grid for m = 4, the flag hexagon of a
/// plane of order s for m = 6 (the triangle when s = 1).
pub fn thin_polygon(m: usize, s: usize) -> Result<IncidenceGeometry> {
    match m {
        4 => crate::construct::grid(s + 1, s + 1),
        6 => thin_hexagon_from_plane(&plane_of_order(s)?),
        _ => Err(Error::Domain(format!("thin polygons are provided for m in {{4,6}}, got {m}"))),
    }
}

fn plane_of_order(s: usize) -> Result<IncidenceGeometry> {
    if s == 1 {
        ordinary_polygon(3)
    } else {
        crate::construct::projective_plane(s as u32)
    }
}

/// Checks the thin polygon theorem between thin m-gons of orders (s,1)
/// and (s',1): every epimorphism is the double of an epimorphism of the
/// underlying digons (m = 4) or planes (m = 6), possibly composed with a
/// duality, and for m = 6 it is an isomorphism unless s' = 1.
pub fn thin_polygon_theorem_check(m: usize, s: usize, s_prime: usize, opts: &SearchOptions) -> Result<Report> {
    if s == 0 || s_prime == 0 {
        return Err(Error::Domain("orders must be positive".into()));
    }
    let source = Arc::new(thin_polygon(m, s)?);
    let target = Arc::new(thin_polygon(m, s_prime)?);
    let opts = SearchOptions { count_only: false, up_to_target_automorphism: false, limit: None, ..opts.clone() };
    let mut report = Report::new();
    let tag = format!("thin{m}");
    let Some(found) = searched(&mut report, &format!("{tag}.search"), &source, &target, &opts) else {
        return Ok(report);
    };
    let doubled = match m {
        4 => doubled_digon_set(&source, &target, s, s_prime)?,
        _ => {
            let (set, underlying) = doubled_plane_set(s, s_prime, &opts, &mut report)?;
            if s_prime == 1 && s >= 2 {
                let plane = Arc::new(plane_of_order(s)?);
                let tri = Arc::new(ordinary_polygon(3)?);
                let canon = Classifier::new(plane, tri)?.canonical_set()?;
                let same = sorted_set(&canon) == sorted_set(&underlying);
                report.check(
                    &format!("{tag}.underlying_are_gt_classes"),
                    same,
                    format!("{} underlying onto the triangle, {} canonical", underlying.len(), canon.len()),
                );
            }
            set
        }
    };
    let (a, b) = (sorted_set(&found), sorted_set(&doubled));
    report.check(
        &format!("{tag}.search_equals_doubled"),
        a == b,
        format!("search {} doubled {} common {}", a.len(), b.len(), a.intersection(&b).count()),
    );
    if m == 6 && (s_prime > 1 || s == 1) {
        let isos = found.iter().filter(|g| g.is_bijective()).count();
        report.check(
            &format!("{tag}.isomorphisms_only"),
            isos == found.len(),
            format!("{isos} of {} bijective", found.len()),
        );
    }
    Ok(report)
}

/// Doubles of digon epimorphisms, with and without the swap, carried to
/// the grids through fixed isomorphisms.
fn doubled_digon_set(
    source: &Arc<IncidenceGeometry>,
    target: &Arc<IncidenceGeometry>,
    s: usize,
    s_prime: usize,
) -> Result<Vec<GeometryMorphism>> {
    let ds = Arc::new(crate::construct::digon(s + 1, s + 1)?);
    let dt = Arc::new(crate::construct::digon(s_prime + 1, s_prime + 1)?);
    let model_s = Arc::new(double(&ds)?.dual());
    let model_t = Arc::new(double(&dt)?.dual());
    let iso = |a: &Arc<IncidenceGeometry>, b: &Arc<IncidenceGeometry>| {
        find_isomorphism(a, b)?.ok_or_else(|| Error::Internal("grid is not the dual of a doubled digon".into()))
    };
    let into_model = iso(source, &model_s)?;
    let out_of_model = iso(&model_t, target)?;
    let surj = surjections(s + 1, s_prime + 1);
    let mut out = Vec::new();
    for sp in &surj {
        for sl in &surj {
            let delta = digon_epimorphism(&ds, &dt, sp.clone(), sl.clone())?;
            for duality in [false, true] {
                let lifted = double_epimorphism(&delta, duality)?.dualized();
                let lifted = lifted.with_geometries(model_s.clone(), model_t.clone())?;
                out.push(into_model.then(&lifted)?.then(&out_of_model)?);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Doubles of the plane epimorphisms onto `P_s'` and onto its dual.
/// Also returns the underlying maps onto `P_s'` for comparison with the
/// canonical classes.
fn doubled_plane_set(
    s: usize,
    s_prime: usize,
    opts: &SearchOptions,
    report: &mut Report,
) -> Result<(Vec<GeometryMorphism>, Vec<GeometryMorphism>)> {
    let ps = Arc::new(plane_of_order(s)?);
    let pt = Arc::new(plane_of_order(s_prime)?);
    let pt_dual = Arc::new(pt.dual());
    let straight = searched(report, "thin6.underlying", &ps, &pt, opts)
        .ok_or_else(|| Error::Truncated { found: 0, nodes: 0, reason: "underlying search".into() })?;
    let swapped = searched(report, "thin6.underlying_dual", &ps, &pt_dual, opts)
        .ok_or_else(|| Error::Truncated { found: 0, nodes: 0, reason: "underlying search".into() })?;
    let mut out = Vec::new();
    for (maps, duality) in [(&straight, false), (&swapped, true)] {
        for gamma in maps {
            out.push(double_epimorphism(gamma, duality)?.dualized());
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok((out, straight))
}
