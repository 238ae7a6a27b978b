//! Finite point-line geometries.
//!
//! A geometry stores its flags twice, as per-point pencils and per-line
//! point rows, in compressed sparse form. Both views are sorted and describe
//! the same flag set. Elements are dense indices; labels are decorative.
//!
//! Distances are measured in the bipartite incidence graph, where points
//! occupy vertices `0..P` and lines occupy vertices `P..P+L`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest geometry (points + lines) for which BFS rows are cached.
pub const DISTANCE_CACHE_LIMIT: usize = 10_000;

/// Marker for "unreachable" in raw BFS output.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Point(usize),
    Line(usize),
}

impl Element {
    pub fn is_point(self) -> bool {
        matches!(self, Element::Point(_))
    }

    pub fn index(self) -> usize {
        match self {
            Element::Point(i) | Element::Line(i) => i,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Point(i) => write!(f, "p{i}"),
            Element::Line(i) => write!(f, "L{i}"),
        }
    }
}

/// An incident point-line pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    pub point: usize,
    pub line: usize,
}

#[derive(Clone, Debug, Default)]
struct Csr {
    offsets: Vec<usize>,
    data: Vec<u32>,
}

impl Csr {
    fn row(&self, i: usize) -> &[u32] {
        &self.data[self.offsets[i]..self.offsets[i + 1]]
    }

    fn rows(&self) -> usize {
        self.offsets.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct IncidenceGeometry {
    pencils: Csr,
    rows: Csr,
    point_labels: Option<Vec<String>>,
    line_labels: Option<Vec<String>>,
    bfs_cache: Vec<OnceLock<Box<[u16]>>>,
}

impl PartialEq for IncidenceGeometry {
    fn eq(&self, other: &Self) -> bool {
        self.num_points() == other.num_points()
            && self.rows.offsets == other.rows.offsets
            && self.rows.data == other.rows.data
    }
}

impl Eq for IncidenceGeometry {}

impl IncidenceGeometry {
    /// Builds a geometry from the point rows of its lines.
    ///
    /// Rows may be given in any order; they are stored sorted. A repeated
    /// point within a row or an out-of-range index is rejected.
    pub fn from_lines(num_points: usize, lines: Vec<Vec<usize>>) -> Result<Self> {
        let mut data = Vec::with_capacity(lines.iter().map(Vec::len).sum());
        let mut offsets = Vec::with_capacity(lines.len() + 1);
        offsets.push(0);
        let mut degree = vec![0usize; num_points];
        for (l, mut row) in lines.into_iter().enumerate() {
            row.sort_unstable();
            for (k, &p) in row.iter().enumerate() {
                if p >= num_points {
                    return Err(Error::Index(format!(
                        "line {l} contains point {p}, but there are only {num_points} points"
                    )));
                }
                if k > 0 && row[k - 1] == p {
                    return Err(Error::Index(format!("line {l} repeats point {p}")));
                }
                degree[p] += 1;
                data.push(p as u32);
            }
            offsets.push(data.len());
        }
        let rows = Csr { offsets, data };

        let mut p_offsets = Vec::with_capacity(num_points + 1);
        p_offsets.push(0);
        for d in &degree {
            p_offsets.push(p_offsets.last().unwrap() + d);
        }
        let mut fill = p_offsets.clone();
        let mut p_data = vec![0u32; rows.data.len()];
        for l in 0..rows.rows() {
            for &p in rows.row(l) {
                let slot = &mut fill[p as usize];
                p_data[*slot] = l as u32;
                *slot += 1;
            }
        }
        let pencils = Csr { offsets: p_offsets, data: p_data };
        Ok(Self::assemble(pencils, rows))
    }

    /// Builds a geometry from an explicit flag list.
    pub fn from_flags(num_points: usize, num_lines: usize, flags: &[Flag]) -> Result<Self> {
        let mut lines = vec![Vec::new(); num_lines];
        for f in flags {
            if f.line >= num_lines {
                return Err(Error::Index(format!(
                    "flag ({}, {}) names line {} of {num_lines}",
                    f.point, f.line, f.line
                )));
            }
            lines[f.line].push(f.point);
        }
        Self::from_lines(num_points, lines)
    }

    fn assemble(pencils: Csr, rows: Csr) -> Self {
        let elements = pencils.rows() + rows.rows();
        let bfs_cache = if elements <= DISTANCE_CACHE_LIMIT {
            (0..elements).map(|_| OnceLock::new()).collect()
        } else {
            Vec::new()
        };
        IncidenceGeometry {
            pencils,
            rows,
            point_labels: None,
            line_labels: None,
            bfs_cache,
        }
    }

    pub fn with_labels(mut self, points: Vec<String>, lines: Vec<String>) -> Self {
        assert_eq!(points.len(), self.num_points());
        assert_eq!(lines.len(), self.num_lines());
        self.point_labels = Some(points);
        self.line_labels = Some(lines);
        self
    }

    pub fn point_label(&self, p: usize) -> Option<&str> {
        self.point_labels.as_ref().map(|l| l[p].as_str())
    }

    pub fn line_label(&self, l: usize) -> Option<&str> {
        self.line_labels.as_ref().map(|v| v[l].as_str())
    }

    pub fn num_points(&self) -> usize {
        self.pencils.rows()
    }

    pub fn num_lines(&self) -> usize {
        self.rows.rows()
    }

    pub fn num_elements(&self) -> usize {
        self.num_points() + self.num_lines()
    }

    pub fn num_flags(&self) -> usize {
        self.rows.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num_elements() == 0
    }

    /// Points on line `l`, sorted. Panics on a bad index.
    pub fn points_on(&self, l: usize) -> &[u32] {
        self.rows.row(l)
    }

    /// Lines through point `p`, sorted. Panics on a bad index.
    pub fn lines_through(&self, p: usize) -> &[u32] {
        self.pencils.row(p)
    }

    pub fn incident_points(&self, l: usize) -> Result<&[u32]> {
        self.check_line(l)?;
        Ok(self.points_on(l))
    }

    pub fn pencil(&self, p: usize) -> Result<&[u32]> {
        self.check_point(p)?;
        Ok(self.lines_through(p))
    }

    pub fn point_degree(&self, p: usize) -> usize {
        self.lines_through(p).len()
    }

    pub fn line_degree(&self, l: usize) -> usize {
        self.points_on(l).len()
    }

    pub fn is_incident(&self, p: usize, l: usize) -> bool {
        self.points_on(l).binary_search(&(p as u32)).is_ok()
    }

    /// All flags, ordered by point then line.
    pub fn flags(&self) -> impl Iterator<Item = Flag> + '_ {
        (0..self.num_points()).flat_map(move |p| {
            self.lines_through(p).iter().map(move |&l| Flag { point: p, line: l as usize })
        })
    }

    /// The common line of two distinct points, if any.
    pub fn join(&self, p: usize, q: usize) -> Option<usize> {
        common(self.lines_through(p), self.lines_through(q))
    }

    /// The common point of two distinct lines, if any.
    pub fn meet(&self, l: usize, m: usize) -> Option<usize> {
        common(self.points_on(l), self.points_on(m))
    }

    pub fn collinear(&self, p: usize, q: usize) -> bool {
        p == q || self.join(p, q).is_some()
    }

    /// Points collinear with `p`, excluding `p`.
    pub fn neighbours(&self, p: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .lines_through(p)
            .iter()
            .flat_map(|&l| self.points_on(l as usize).iter().map(|&q| q as usize))
            .filter(|&q| q != p)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn check_point(&self, p: usize) -> Result<()> {
        if p < self.num_points() {
            Ok(())
        } else {
            Err(Error::Index(format!("point {p} of {}", self.num_points())))
        }
    }

    pub fn check_line(&self, l: usize) -> Result<()> {
        if l < self.num_lines() {
            Ok(())
        } else {
            Err(Error::Index(format!("line {l} of {}", self.num_lines())))
        }
    }

    pub fn check_element(&self, e: Element) -> Result<()> {
        match e {
            Element::Point(p) => self.check_point(p),
            Element::Line(l) => self.check_line(l),
        }
    }

    /// Vertex id of an element in the incidence graph.
    pub fn vertex(&self, e: Element) -> usize {
        match e {
            Element::Point(p) => p,
            Element::Line(l) => self.num_points() + l,
        }
    }

    pub fn element(&self, v: usize) -> Element {
        let np = self.num_points();
        if v < np {
            Element::Point(v)
        } else {
            Element::Line(v - np)
        }
    }

    /// Incidence-graph neighbours of vertex `v`, as vertex ids.
    pub fn vertex_neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let np = self.num_points();
        let (row, shift) = if v < np {
            (self.lines_through(v), np)
        } else {
            (self.points_on(v - np), 0)
        };
        row.iter().map(move |&x| x as usize + shift)
    }

    /// Breadth-first distances from vertex `root`; `UNREACHABLE` marks
    /// vertices in other components.
    pub fn bfs(&self, root: usize) -> Vec<u32> {
        let n = self.num_elements();
        let mut dist = vec![UNREACHABLE; n];
        let mut queue = VecDeque::with_capacity(n);
        dist[root] = 0;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            let d = dist[v] + 1;
            for w in self.vertex_neighbours(v) {
                if dist[w] == UNREACHABLE {
                    dist[w] = d;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn cached_row(&self, root: usize) -> Option<&[u16]> {
        let slot = self.bfs_cache.get(root)?;
        Some(slot.get_or_init(|| {
            self.bfs(root)
                .into_iter()
                .map(|d| if d == UNREACHABLE { u16::MAX } else { d as u16 })
                .collect()
        }))
    }

    /// Incidence-graph distance; `None` when the elements are disconnected.
    pub fn distance(&self, a: Element, b: Element) -> Result<Option<u32>> {
        self.check_element(a)?;
        self.check_element(b)?;
        let (va, vb) = (self.vertex(a), self.vertex(b));
        if let Some(row) = self.cached_row(va) {
            let d = row[vb];
            return Ok((d != u16::MAX).then_some(d as u32));
        }
        let d = self.bfs(va)[vb];
        Ok((d != UNREACHABLE).then_some(d))
    }

    /// Distance between two lines in the concurrency graph of lines.
    pub fn line_graph_distance(&self, l: usize, m: usize) -> Result<Option<u32>> {
        Ok(self
            .distance(Element::Line(l), Element::Line(m))?
            .map(|d| d / 2))
    }

    /// Swaps points and lines. `dual(dual(G)) == G` element-wise.
    pub fn dual(&self) -> IncidenceGeometry {
        let mut g = Self::assemble(self.rows.clone(), self.pencils.clone());
        g.point_labels = self.line_labels.clone();
        g.line_labels = self.point_labels.clone();
        g
    }

    /// Restricts the geometry to the given points and lines.
    ///
    /// Members are kept in increasing index order; the returned map gives,
    /// for each new index, the original one.
    pub fn induced_subgeometry(
        &self,
        points: &[usize],
        lines: &[usize],
    ) -> Result<(IncidenceGeometry, SubgeometryMap)> {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        let mut lns = lines.to_vec();
        lns.sort_unstable();
        lns.dedup();
        for &p in &pts {
            self.check_point(p)?;
        }
        for &l in &lns {
            self.check_line(l)?;
        }
        let mut new_index = vec![usize::MAX; self.num_points()];
        for (i, &p) in pts.iter().enumerate() {
            new_index[p] = i;
        }
        let rows = lns
            .iter()
            .map(|&l| {
                self.points_on(l)
                    .iter()
                    .map(|&p| new_index[p as usize])
                    .filter(|&i| i != usize::MAX)
                    .collect()
            })
            .collect();
        let g = IncidenceGeometry::from_lines(pts.len(), rows)?;
        Ok((g, SubgeometryMap { points: pts, lines: lns }))
    }

    /// Point rows of every line, as owned vectors.
    pub fn line_rows(&self) -> Vec<Vec<usize>> {
        (0..self.num_lines())
            .map(|l| self.points_on(l).iter().map(|&p| p as usize).collect())
            .collect()
    }
}

/// Original indices of the members of an induced subgeometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgeometryMap {
    pub points: Vec<usize>,
    pub lines: Vec<usize>,
}

fn common(a: &[u32], b: &[u32]) -> Option<usize> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i] as usize),
        }
    }
    None
}
