//! Stagewise free completion over a thin quadrangle.
//!
//! Start from a grid `T` of order (s',1), s' >= 2, plus one isolated point
//! `w`, and the map that is the identity on `T` and sends `w` to point 0.
//! A pair (u, U) is deficient when u is off U and no line through u meets
//! U. Each step closes the oldest deficient pair by adding a point v on U
//! and a line V through u and v, and extends the map. No step ever creates
//! a digon or triangle, and the map stays an epimorphism onto `T`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::incidence::{Element, IncidenceGeometry, UNREACHABLE};
use crate::morphism::{is_epimorphism, verify_morphism, GeometryMorphism};
use crate::report::Report;
use crate::validate::{classify_polygon, girth};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JournalEntry {
    /// 1-based step number.
    pub step: usize,
    pub pair: (usize, usize),
    pub new_point: usize,
    pub new_line: usize,
    pub point_image: usize,
    pub line_image: usize,
}

impl fmt::Display for JournalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {}: pair ({},{}) -> new ({},{}), eps(v)={}, eps(V)={}",
            self.step, self.pair.0, self.pair.1, self.new_point, self.new_line, self.point_image, self.line_image
        )
    }
}

/// One stage `A_n` with its map onto the target grid.
///
/// The raw rows are the source of truth; `geometry()` and `morphism()`
/// assemble checked objects from them.
#[derive(Clone, Debug)]
pub struct FreeStage {
    pub target: Arc<IncidenceGeometry>,
    pub num_points: usize,
    /// Point rows of the lines of `A_n`.
    pub rows: Vec<Vec<usize>>,
    pub point_image: Vec<usize>,
    pub line_image: Vec<usize>,
    /// Deficient pairs (point, line), oldest first.
    pub queue: VecDeque<(usize, usize)>,
    /// `n`, starting at 1 for the seed.
    pub stage: usize,
    pub journal: Vec<JournalEntry>,
    pub seed_points: usize,
    pub seed_lines: usize,
}

/// Distance 1 is incidence, 3 means some line through the point meets
/// the line; anything else is deficient.
fn deficient(d: u32) -> bool {
    d == UNREACHABLE || d > 3
}

impl FreeStage {
    pub fn geometry(&self) -> Result<IncidenceGeometry> {
        IncidenceGeometry::from_lines(self.num_points, self.rows.clone())
    }

    pub fn morphism(&self) -> Result<GeometryMorphism> {
        GeometryMorphism::new(
            Arc::new(self.geometry()?),
            self.target.clone(),
            self.point_image.clone(),
            self.line_image.clone(),
        )
    }

    /// The journal, one step per line.
    pub fn journal_text(&self) -> String {
        self.journal.iter().map(|e| format!("{e}\n")).collect()
    }

    /// Rebuilds a stage by replaying `journal` from the seed over
    /// `target`, checking every replayed step against its line.
    pub fn restore(target: Arc<IncidenceGeometry>, journal: &str) -> Result<FreeStage> {
        let mut state = seed_from_target(target)?;
        for (i, line) in journal.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            state = free_step(state)?;
            let produced = state.journal.last().expect("a step was taken").to_string();
            if produced != line {
                return Err(Error::Parse {
                    line: i + 1,
                    column: 1,
                    reason: format!("journal says `{line}` but replay gives `{produced}`"),
                });
            }
        }
        Ok(state)
    }

    fn all_deficient(&self, g: &IncidenceGeometry) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..g.num_points() {
            let dist = g.bfs(g.vertex(Element::Point(p)));
            out.extend((0..g.num_lines()).filter(|&l| deficient(dist[g.num_points() + l])).map(|l| (p, l)));
        }
        out
    }
}

/// `A_1`: the grid `target` plus an isolated point mapped to point 0.
pub fn seed_from_target(target: Arc<IncidenceGeometry>) -> Result<FreeStage> {
    let class = classify_polygon(&target).map_err(|e| Error::Domain(format!("target: {e}")))?;
    match (class.gonality, class.order) {
        (4, Some((s, 1))) if s >= 2 => {}
        _ => return Err(Error::Domain(format!("the seed needs a grid of order (s',1) with s' >= 2, got {class}"))),
    }
    let np = target.num_points();
    let rows = target.line_rows();
    let mut point_image: Vec<usize> = (0..np).collect();
    point_image.push(0);
    let line_image = (0..target.num_lines()).collect();
    let mut state = FreeStage {
        num_points: np + 1,
        seed_points: np + 1,
        seed_lines: rows.len(),
        rows,
        point_image,
        line_image,
        queue: VecDeque::new(),
        stage: 1,
        journal: Vec::new(),
        target,
    };
    let g = state.geometry()?;
    state.queue = state.all_deficient(&g).into();
    Ok(state)
}

/// Closes the oldest deficient pair.
pub fn free_step(mut state: FreeStage) -> Result<FreeStage> {
    let (u, big_u) = state.queue.pop_front().ok_or(Error::Exhausted)?;
    let t = state.target.clone();
    let (eu, e_big_u) = (state.point_image[u], state.line_image[big_u]);
    let (ev, e_big_v) = if t.is_incident(eu, e_big_u) {
        (eu, e_big_u)
    } else {
        let line = t
            .lines_through(eu)
            .iter()
            .map(|&l| l as usize)
            .find(|&l| t.meet(l, e_big_u).is_some())
            .ok_or_else(|| Error::Internal("target is not a quadrangle".into()))?;
        (t.meet(line, e_big_u).unwrap(), line)
    };
    let v = state.num_points;
    let big_v = state.rows.len();
    state.num_points += 1;
    state.rows[big_u].push(v);
    state.rows.push(vec![u, v]);
    state.point_image.push(ev);
    state.line_image.push(e_big_v);
    state.stage += 1;
    state.journal.push(JournalEntry {
        step: state.stage - 1,
        pair: (u, big_u),
        new_point: v,
        new_line: big_v,
        point_image: ev,
        line_image: e_big_v,
    });

    let g = state.geometry()?;
    let np = g.num_points();
    let mut fresh = BTreeSet::new();
    let from_v = g.bfs(g.vertex(Element::Point(v)));
    fresh.extend((0..g.num_lines()).filter(|&l| deficient(from_v[np + l])).map(|l| (v, l)));
    let from_big_v = g.bfs(g.vertex(Element::Line(big_v)));
    fresh.extend((0..np).filter(|&p| deficient(from_big_v[p])).map(|p| (p, big_v)));
    state.queue.extend(fresh);
    Ok(state)
}

/// `n` steps of [`free_step`].
pub fn run_free(mut state: FreeStage, n: usize) -> Result<FreeStage> {
    for _ in 0..n {
        state = free_step(state)?;
    }
    Ok(state)
}

/// Re-derives every stage invariant from scratch.
pub fn check_free_invariants(state: &FreeStage) -> Report {
    let mut r = Report::new();
    let g = match state.geometry() {
        Ok(g) => {
            r.check("free.geometry", true, format!("{} points, {} lines", g.num_points(), g.num_lines()));
            g
        }
        Err(e) => {
            r.check("free.geometry", false, e.to_string());
            return r;
        }
    };
    match state.morphism() {
        Ok(phi) => {
            let valid = verify_morphism(&phi);
            r.check(
                "free.morphism",
                valid.is_ok(),
                match valid {
                    Ok(()) => "every flag maps to a flag".to_string(),
                    Err(f) => format!("flag ({}, {}) is not preserved", f.point, f.line),
                },
            );
            r.check("free.epimorphism", is_epimorphism(&phi), "onto the target grid");
        }
        Err(e) => {
            r.check("free.morphism", false, e.to_string());
        }
    }
    let gi = girth(&g);
    r.check(
        "free.girth",
        gi.is_none_or(|x| x >= 8),
        match gi {
            Some(x) => format!("girth {x}"),
            None => "acyclic".into(),
        },
    );
    let steps = state.stage.saturating_sub(1);
    let grown_p = g.num_points().checked_sub(state.seed_points);
    let grown_l = g.num_lines().checked_sub(state.seed_lines);
    let ledger_ok = grown_p == Some(steps)
        && grown_l == Some(steps)
        && state.journal.len() == steps
        && state.journal.iter().enumerate().all(|(i, e)| {
            e.step == i + 1 && e.new_point == state.seed_points + i && e.new_line == state.seed_lines + i
        });
    r.check(
        "free.growth",
        ledger_ok,
        format!("stage {} grew {:?} points, {:?} lines, {} journal entries", state.stage, grown_p, grown_l, state.journal.len()),
    );
    let listed: BTreeSet<(usize, usize)> = state.queue.iter().copied().collect();
    let actual: BTreeSet<(usize, usize)> = state.all_deficient(&g).into_iter().collect();
    let bogus = listed.difference(&actual).count();
    let missing = actual.difference(&listed).count();
    let dups = state.queue.len() - listed.len();
    r.check(
        "free.queue",
        bogus == 0 && missing == 0 && dups == 0,
        format!("{} queued, {bogus} not deficient, {missing} deficient but unlisted, {dups} duplicate(s)", state.queue.len()),
    );
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{grid, ordinary_polygon};

    fn seed() -> FreeStage {
        seed_from_target(Arc::new(grid(3, 3).unwrap())).unwrap()
    }

    #[test]
    fn seed_shape() {
        let s = seed();
        assert_eq!((s.num_points, s.rows.len()), (10, 6));
        assert_eq!(s.queue.len(), 6);
        assert!(is_epimorphism(&s.morphism().unwrap()));
        assert!(check_free_invariants(&s).all_pass());
    }

    #[test]
    fn seed_needs_thick_lines() {
        assert!(seed_from_target(Arc::new(grid(2, 2).unwrap())).is_err());
        assert!(seed_from_target(Arc::new(ordinary_polygon(3).unwrap())).is_err());
    }

    #[test]
    fn first_step() {
        let s = free_step(seed()).unwrap();
        assert_eq!(s.journal[0].to_string(), "step 1: pair (9,0) -> new (10,6), eps(v)=0, eps(V)=0");
        assert!(check_free_invariants(&s).all_pass());
    }

    #[test]
    fn corrupted_state_is_reported() {
        let mut s = run_free(seed(), 5).unwrap();
        let p = s.rows[0][0];
        s.rows[0].push(p);
        let r = check_free_invariants(&s);
        assert!(!r.all_pass());

        let mut s = run_free(seed(), 5).unwrap();
        s.rows.push(s.rows[0][..2].to_vec());
        s.line_image.push(s.line_image[0]);
        let r = check_free_invariants(&s);
        assert!(!r.get("free.girth").unwrap().pass);
        assert!(!r.get("free.growth").unwrap().pass);
    }
}
