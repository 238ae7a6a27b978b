//! Exhaustive enumeration of epimorphisms.
//!
//! Every source element carries a bitmask domain of candidate images
//! (targets are limited to 128 points and 128 lines). A node runs three
//! propagators to a fixpoint:
//!
//! * arc consistency along source flags: the image of a line must pass
//!   through some candidate image of each of its points, and dually;
//! * distance balls: a morphism never increases incidence-graph distance,
//!   so once `a` is fixed to `t`, an element at distance `d` from `a` must
//!   map into the radius-`d` ball around `t`;
//! * coverage: every target element needs a preimage; an element with no
//!   candidate preimage fails the node, one with a single candidate forces it.
//!
//! Branching is binary (`e := t` or `t` removed from `e`), which keeps the
//! solution sets of siblings disjoint. Target elements without a fixed
//! preimage are served first, picking the one with fewest candidates; after
//! that the smallest open domain is split.
//!
//! With `symmetry` on, the image of point 0 is restricted to one
//! representative per orbit of the target's automorphism group and the
//! full answer is recovered by composing with one automorphism per orbit
//! member. Results are sorted, so output is independent of worker count.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::incidence::{IncidenceGeometry, UNREACHABLE};
use crate::morphism::GeometryMorphism;
use crate::par;

/// Default node budget when `POLYLAB_LIMIT` is unset.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Largest target side (points or lines) the bitmask domains can hold.
pub const MAX_TARGET_SIDE: usize = 128;

/// Sources above this many elements skip the distance-ball propagator.
const BALL_LIMIT: usize = 4096;

/// Node budget from `POLYLAB_LIMIT`, or the default.
pub fn node_budget_from_env() -> u64 {
    std::env::var("POLYLAB_LIMIT")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Fail with `Truncated` once more than this many maps exist.
    pub limit: Option<usize>,
    /// Only count; `SearchOutcome::maps` stays empty.
    pub count_only: bool,
    /// Keep one representative per orbit of target automorphisms.
    pub up_to_target_automorphism: bool,
    pub node_budget: u64,
    /// Worker cap; `None` uses the current pool.
    pub jobs: Option<usize>,
    /// Fix the image of point 0 up to target automorphisms.
    pub symmetry: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            limit: None,
            count_only: false,
            up_to_target_automorphism: false,
            node_budget: node_budget_from_env(),
            jobs: None,
            symmetry: true,
        }
    }
}

impl SearchOptions {
    pub fn raw() -> Self {
        SearchOptions { symmetry: false, ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Canonically sorted by `(point_map, line_map)`.
    pub maps: Vec<GeometryMorphism>,
    pub count: usize,
    /// Search nodes visited, summed over all workers.
    pub nodes: u64,
}

type Mask = u128;
type RawMap = (Vec<usize>, Vec<usize>);

fn bit(i: usize) -> Mask {
    1 << i
}

fn full(n: usize) -> Mask {
    if n >= 128 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

struct Problem<'a> {
    src: &'a IncidenceGeometry,
    np: usize,
    n: usize,
    tp: usize,
    /// Target adjacency: for a point, the mask of its lines; for a line,
    /// the mask of its points. Indexed by target vertex.
    t_adj: Vec<Mask>,
    /// `balls[t][r]`: same-side masks within distance `r` of target vertex
    /// `t`, as (points, lines). The last entry covers all larger radii.
    balls: Vec<Vec<(Mask, Mask)>>,
    /// Source distance rows; empty when the source is too large.
    sdist: Vec<Vec<u32>>,
}

#[derive(Clone)]
struct State {
    doms: Vec<Mask>,
    fixed: Vec<bool>,
}

struct Analysis {
    count: Vec<u32>,
    first: Vec<usize>,
    witnessed: Vec<bool>,
}

enum Choice {
    Solution,
    Branch(usize, usize),
}

struct Shared {
    nodes: AtomicU64,
    found: AtomicUsize,
    abort: AtomicBool,
    budget: u64,
    limit: Option<usize>,
    count_only: bool,
}

impl<'a> Problem<'a> {
    fn new(src: &'a IncidenceGeometry, tgt: &IncidenceGeometry) -> Self {
        let (tp, tl) = (tgt.num_points(), tgt.num_lines());
        let t_adj = (0..tp + tl)
            .map(|v| tgt.vertex_neighbours(v).fold(0, |m, w| m | bit(if w < tp { w } else { w - tp })))
            .collect();
        let balls = par::map_range(tp + tl, |t| {
            let dist = tgt.bfs(t);
            let radius = dist.iter().copied().filter(|&d| d != UNREACHABLE).max().unwrap_or(0) as usize;
            let mut layers = vec![(0, 0); radius + 1];
            for (w, &d) in dist.iter().enumerate() {
                if d != UNREACHABLE {
                    let layer = &mut layers[d as usize];
                    if w < tp {
                        layer.0 |= bit(w);
                    } else {
                        layer.1 |= bit(w - tp);
                    }
                }
            }
            for r in 1..layers.len() {
                layers[r].0 |= layers[r - 1].0;
                layers[r].1 |= layers[r - 1].1;
            }
            layers
        });
        let n = src.num_elements();
        let sdist = if n <= BALL_LIMIT { par::map_range(n, |v| src.bfs(v)) } else { Vec::new() };
        Problem { src, np: src.num_points(), n, tp, t_adj, balls, sdist }
    }

    fn target_vertex(&self, v: usize, t: usize) -> usize {
        if v < self.np {
            t
        } else {
            self.tp + t
        }
    }

    fn ball(&self, tv: usize, r: u32, point_side: bool) -> Mask {
        let layers = &self.balls[tv];
        let (p, l) = layers[(r as usize).min(layers.len() - 1)];
        if point_side {
            p
        } else {
            l
        }
    }

    /// Runs all propagators from the vertices in `queue`. `None` on wipe-out.
    fn fixpoint(&self, st: &mut State, mut queue: Vec<usize>) -> Option<Analysis> {
        let mut queued = vec![false; self.n];
        for &v in &queue {
            queued[v] = true;
        }
        loop {
            while let Some(v) = queue.pop() {
                queued[v] = false;
                let d = st.doms[v];
                if d == 0 {
                    return None;
                }
                let mut tighten = |w: usize, mask: Mask, st: &mut State, queue: &mut Vec<usize>| {
                    let nd = st.doms[w] & mask;
                    if nd != st.doms[w] {
                        st.doms[w] = nd;
                        if !queued[w] {
                            queued[w] = true;
                            queue.push(w);
                        }
                    }
                    nd != 0
                };
                if d.count_ones() == 1 && !st.fixed[v] && !self.sdist.is_empty() {
                    st.fixed[v] = true;
                    let tv = self.target_vertex(v, d.trailing_zeros() as usize);
                    let row = &self.sdist[v];
                    for (w, &dw) in row.iter().enumerate().take(self.n) {
                        if w != v && dw != UNREACHABLE {
                            let mask = self.ball(tv, dw, w < self.np);
                            if !tighten(w, mask, st, &mut queue) {
                                return None;
                            }
                        }
                    }
                }
                let base = if v < self.np { 0 } else { self.tp };
                let support = bits(d).fold(0, |m, t| m | self.t_adj[base + t]);
                for w in self.src.vertex_neighbours(v) {
                    if !tighten(w, support, st, &mut queue) {
                        return None;
                    }
                }
            }
            let analysis = self.coverage(st, &mut queue)?;
            if queue.is_empty() {
                return Some(analysis);
            }
            for &v in &queue {
                queued[v] = true;
            }
        }
    }

    fn coverage(&self, st: &mut State, forced: &mut Vec<usize>) -> Option<Analysis> {
        let tv = self.t_adj.len();
        let mut count = vec![0u32; tv];
        let mut first = vec![usize::MAX; tv];
        let mut last = vec![usize::MAX; tv];
        let mut witnessed = vec![false; tv];
        for v in 0..self.n {
            let d = st.doms[v];
            let base = if v < self.np { 0 } else { self.tp };
            let single = d.count_ones() == 1;
            for t in bits(d) {
                let t = base + t;
                count[t] += 1;
                if first[t] == usize::MAX {
                    first[t] = v;
                }
                last[t] = v;
                witnessed[t] |= single;
            }
        }
        for t in 0..tv {
            match count[t] {
                0 => return None,
                1 if !witnessed[t] => {
                    let v = last[t];
                    let local = if t < self.tp { t } else { t - self.tp };
                    st.doms[v] = bit(local);
                    forced.push(v);
                }
                _ => {}
            }
        }
        Some(Analysis { count, first, witnessed })
    }

    fn choose(&self, st: &State, an: &Analysis) -> Choice {
        let open = (0..an.count.len())
            .filter(|&t| !an.witnessed[t])
            .min_by_key(|&t| (an.count[t], t));
        if let Some(t) = open {
            let v = an.first[t];
            let local = if t < self.tp { t } else { t - self.tp };
            return Choice::Branch(v, local);
        }
        match (0..self.n)
            .filter(|&v| st.doms[v].count_ones() > 1)
            .min_by_key(|&v| (st.doms[v].count_ones(), v))
        {
            Some(v) => Choice::Branch(v, st.doms[v].trailing_zeros() as usize),
            None => Choice::Solution,
        }
    }

    fn extract(&self, st: &State) -> RawMap {
        let img = |v: usize| st.doms[v].trailing_zeros() as usize;
        ((0..self.np).map(img).collect(), (self.np..self.n).map(img).collect())
    }

    fn tick(&self, shared: &Shared) -> Result<()> {
        let nodes = shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if shared.abort.load(Ordering::Relaxed) {
            return Err(truncated(shared, "aborted"));
        }
        if nodes > shared.budget {
            shared.abort.store(true, Ordering::Relaxed);
            return Err(truncated(shared, "node budget exhausted"));
        }
        Ok(())
    }

    fn record(&self, st: &State, shared: &Shared, out: &mut Vec<RawMap>) -> Result<()> {
        let found = shared.found.fetch_add(1, Ordering::Relaxed) + 1;
        if shared.count_only {
            // keep the image of point 0, which the symmetry expansion needs
            out.push((self.extract(st).0.into_iter().take(1).collect(), Vec::new()));
        } else {
            out.push(self.extract(st));
        }
        if shared.limit.is_some_and(|l| found > l) {
            shared.abort.store(true, Ordering::Relaxed);
            return Err(truncated(shared, "result limit exceeded"));
        }
        Ok(())
    }

    fn dfs(&self, mut st: State, mut queue: Vec<usize>, shared: &Shared, out: &mut Vec<RawMap>) -> Result<()> {
        loop {
            self.tick(shared)?;
            let Some(an) = self.fixpoint(&mut st, queue) else {
                return Ok(());
            };
            match self.choose(&st, &an) {
                Choice::Solution => return self.record(&st, shared, out),
                Choice::Branch(v, t) => {
                    let mut child = st.clone();
                    child.doms[v] = bit(t);
                    self.dfs(child, vec![v], shared, out)?;
                    st.doms[v] &= !bit(t);
                    queue = vec![v];
                }
            }
        }
    }

    /// Expands the top of the tree breadth-first into independent subproblems.
    fn split(
        &self,
        root: State,
        want: usize,
        shared: &Shared,
        out: &mut Vec<RawMap>,
    ) -> Result<Vec<(State, Vec<usize>)>> {
        let all: Vec<usize> = (0..self.n).collect();
        let mut frontier = vec![(root, all)];
        for _ in 0..24 {
            if frontier.len() >= want || frontier.is_empty() {
                break;
            }
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for (mut st, queue) in frontier {
                self.tick(shared)?;
                let Some(an) = self.fixpoint(&mut st, queue) else { continue };
                match self.choose(&st, &an) {
                    Choice::Solution => self.record(&st, shared, out)?,
                    Choice::Branch(v, t) => {
                        let mut child = st.clone();
                        child.doms[v] = bit(t);
                        next.push((child, vec![v]));
                        st.doms[v] &= !bit(t);
                        next.push((st, vec![v]));
                    }
                }
            }
            frontier = next;
        }
        Ok(frontier)
    }

    fn run(&self, root: State, shared: &Shared) -> Result<Vec<RawMap>> {
        let mut out = Vec::new();
        let want = 16 * par::current_jobs();
        let frontier = self.split(root, want, shared, &mut out)?;
        let parts = par::map_slice(&frontier, |(st, queue)| {
            let mut local = Vec::new();
            self.dfs(st.clone(), queue.clone(), shared, &mut local).map(|_| local)
        });
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }
}

fn truncated(shared: &Shared, reason: &str) -> Error {
    Error::Truncated {
        found: shared.found.load(Ordering::Relaxed),
        nodes: shared.nodes.load(Ordering::Relaxed),
        reason: reason.into(),
    }
}

/// Target automorphism data for the root reduction.
struct Symmetry {
    /// Orbit representative (minimum) of every target point.
    rep: Vec<usize>,
    /// For every target point `t`, an automorphism taking `rep[t]` to `t`.
    carrier: Vec<RawMap>,
}

impl Symmetry {
    fn new(auts: &[GeometryMorphism], tp: usize) -> Self {
        let mut rep: Vec<usize> = (0..tp).collect();
        for a in auts {
            for t in 0..tp {
                rep[a.point_map()[t]] = rep[a.point_map()[t]].min(t);
            }
        }
        // orbits are closed under the group, so one pass of mins suffices
        let carrier = (0..tp)
            .map(|t| {
                let a = auts.iter().find(|a| a.point_map()[rep[t]] == t).expect("group acts on orbit");
                (a.point_map().to_vec(), a.line_map().to_vec())
            })
            .collect();
        Symmetry { rep, carrier }
    }
}

fn apply((pm, lm): &RawMap, (sp, sl): &RawMap) -> RawMap {
    (pm.iter().map(|&x| sp[x]).collect(), lm.iter().map(|&x| sl[x]).collect())
}

/// All epimorphisms from `src` onto `tgt`.
pub fn enumerate_epimorphisms(
    src: &Arc<IncidenceGeometry>,
    tgt: &Arc<IncidenceGeometry>,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    par::with_jobs(opts.jobs, || enumerate_inner(src, tgt, opts))
}

fn enumerate_inner(
    src: &Arc<IncidenceGeometry>,
    tgt: &Arc<IncidenceGeometry>,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let (tp, tl) = (tgt.num_points(), tgt.num_lines());
    if tp > MAX_TARGET_SIDE || tl > MAX_TARGET_SIDE {
        return Err(Error::Domain(format!(
            "search targets are limited to {MAX_TARGET_SIDE} points and lines, got ({tp},{tl})"
        )));
    }
    let need_auts = opts.up_to_target_automorphism || (opts.symmetry && src.num_points() > 0);
    let auts = if need_auts { Some(enumerate_automorphisms(tgt)?) } else { None };
    let symmetry = match (&auts, opts.symmetry && src.num_points() > 0) {
        (Some(a), true) => Some(Symmetry::new(a, tp)),
        _ => None,
    };

    let problem = Problem::new(src, tgt);
    let np = src.num_points();
    let mut doms: Vec<Mask> = (0..problem.n).map(|v| if v < np { full(tp) } else { full(tl) }).collect();
    if let Some(sym) = &symmetry {
        doms[0] = (0..tp).filter(|&t| sym.rep[t] == t).fold(0, |m, t| m | bit(t));
    }
    let shared = Shared {
        nodes: AtomicU64::new(0),
        found: AtomicUsize::new(0),
        abort: AtomicBool::new(false),
        budget: opts.node_budget,
        limit: opts.limit,
        count_only: opts.count_only && !opts.up_to_target_automorphism,
    };
    let root = State { doms, fixed: vec![false; problem.n] };
    let mut found = problem.run(root, &shared)?;
    let nodes = shared.nodes.load(Ordering::Relaxed);

    // undo the root reduction
    let count;
    if let Some(sym) = &symmetry {
        let orbit_size = |r: usize| sym.rep.iter().filter(|&&x| x == r).count();
        count = found.iter().map(|m| orbit_size(m.0[0])).sum();
        if !shared.count_only {
            let mut expanded = Vec::with_capacity(count);
            for t in 0..tp {
                for m in found.iter().filter(|m| m.0[0] == sym.rep[t]) {
                    expanded.push(apply(m, &sym.carrier[t]));
                }
            }
            found = expanded;
        }
    } else {
        count = found.len();
    }
    if opts.limit.is_some_and(|l| count > l) {
        return Err(Error::Truncated { found: count, nodes, reason: "result limit exceeded".into() });
    }

    if let (true, Some(auts)) = (opts.up_to_target_automorphism, &auts) {
        let raw: Vec<RawMap> = auts.iter().map(|a| (a.point_map().to_vec(), a.line_map().to_vec())).collect();
        found.retain(|m| raw.iter().all(|a| apply(m, a) >= *m));
    }
    let count = if opts.up_to_target_automorphism { found.len() } else { count };
    if opts.count_only {
        return Ok(SearchOutcome { maps: Vec::new(), count, nodes });
    }
    found.sort_unstable();
    let maps = found
        .into_iter()
        .map(|(pm, lm)| GeometryMorphism::new(src.clone(), tgt.clone(), pm, lm))
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchOutcome { count: maps.len(), maps, nodes })
}

/// All automorphisms (self-epimorphisms of a finite geometry are
/// bijective only for thick ones; this returns all self-epimorphisms and
/// keeps the bijective ones).
pub fn enumerate_automorphisms(g: &Arc<IncidenceGeometry>) -> Result<Vec<GeometryMorphism>> {
    let opts = SearchOptions { symmetry: false, ..SearchOptions::default() };
    let mut maps = enumerate_epimorphisms(g, g, &opts)?.maps;
    maps.retain(|m| m.is_bijective());
    Ok(maps)
}

/// All self-epimorphisms, bijective or not.
pub fn enumerate_self_epimorphisms(g: &Arc<IncidenceGeometry>, opts: &SearchOptions) -> Result<SearchOutcome> {
    enumerate_epimorphisms(g, g, opts)
}

/// An isomorphism `a -> b`, if there is one.
pub fn find_isomorphism(
    a: &Arc<IncidenceGeometry>,
    b: &Arc<IncidenceGeometry>,
) -> Result<Option<GeometryMorphism>> {
    if a.num_points() != b.num_points() || a.num_lines() != b.num_lines() || a.num_flags() != b.num_flags() {
        return Ok(None);
    }
    if b.num_points() > MAX_TARGET_SIDE || b.num_lines() > MAX_TARGET_SIDE {
        return Err(Error::Domain("isomorphism search target too large".into()));
    }
    let problem = Problem::new(a, b);
    let np = a.num_points();
    let doms = (0..problem.n)
        .map(|v| if v < np { full(b.num_points()) } else { full(b.num_lines()) })
        .collect();
    let shared = Shared {
        nodes: AtomicU64::new(0),
        found: AtomicUsize::new(0),
        abort: AtomicBool::new(false),
        budget: node_budget_from_env(),
        limit: Some(0),
        count_only: false,
    };
    let mut out = Vec::new();
    match problem.dfs(State { doms, fixed: vec![false; problem.n] }, (0..problem.n).collect(), &shared, &mut out) {
        Ok(()) => Ok(None),
        Err(Error::Truncated { reason, .. }) if reason == "result limit exceeded" => {
            let (pm, lm) = out.pop().map(Ok).unwrap_or_else(|| {
                Err(Error::Internal("isomorphism recorded without a map".into()))
            })?;
            Ok(Some(GeometryMorphism::new(a.clone(), b.clone(), pm, lm)?))
        }
        Err(e) => Err(e),
    }
}
