//! Brute-force oracles, written without the library's search, validator
//! or hyperplane code. Only geometry accessors are shared.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use itertools::Itertools;
use polylab_core::IncidenceGeometry;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn load(name: &str) -> IncidenceGeometry {
    polylab_core::io::parse_geometry(&std::fs::read(fixture(name)).unwrap()).unwrap()
}

fn rows(g: &IncidenceGeometry) -> Vec<Vec<usize>> {
    (0..g.num_lines()).map(|l| g.points_on(l).iter().map(|&p| p as usize).collect()).collect()
}

/// Every epimorphism as (point map, line map), sorted: try every point
/// map, give each line every target line containing its image, keep the
/// surjective ones.
pub fn brute_force_epimorphisms(src: &IncidenceGeometry, tgt: &IncidenceGeometry) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (n, k) = (src.num_points(), tgt.num_points());
    assert!((k as f64).powi(n as i32) <= 5e6, "oracle too slow for this size");
    let src_rows = rows(src);
    let tgt_rows = rows(tgt);
    let mut out = Vec::new();
    for pm in (0..n).map(|_| 0..k).multi_cartesian_product() {
        if pm.iter().copied().unique().count() != k {
            continue;
        }
        let choices: Vec<Vec<usize>> = src_rows
            .iter()
            .map(|row| {
                (0..tgt_rows.len())
                    .filter(|&t| row.iter().all(|&p| tgt_rows[t].contains(&pm[p])))
                    .collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        for lm in choices.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
            if lm.iter().copied().unique().count() == tgt_rows.len() {
                out.push((pm.clone(), lm));
            }
        }
    }
    out.sort();
    out
}

/// Point permutations sending lines to lines.
pub fn brute_force_collineations(g: &IncidenceGeometry) -> usize {
    let mut lines: Vec<Vec<usize>> = rows(g);
    lines.iter_mut().for_each(|r| r.sort_unstable());
    lines.sort();
    (0..g.num_points())
        .permutations(g.num_points())
        .filter(|perm| {
            let mut image: Vec<Vec<usize>> = lines
                .iter()
                .map(|r| r.iter().map(|&p| perm[p]).sorted().collect())
                .collect();
            image.sort();
            image == lines
        })
        .count()
}

/// Proper nonempty point sets meeting every line in 1 or all points,
/// sorted.
pub fn brute_force_hyperplanes(g: &IncidenceGeometry) -> Vec<Vec<usize>> {
    let n = g.num_points();
    assert!(n <= 20);
    let r = rows(g);
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let ok = r.iter().all(|row| {
            let k = row.iter().filter(|&&p| mask >> p & 1 == 1).count();
            k == 1 || k == row.len()
        });
        if ok {
            out.push((0..n).filter(|&p| mask >> p & 1 == 1).collect());
        }
    }
    out.sort();
    out
}

/// Number of surjections from an n-set onto a k-set.
pub fn surjection_count(n: u32, k: u32) -> i64 {
    (0..=k)
        .map(|i| {
            let binom = (0..i).fold(1i64, |acc, j| acc * (k - j) as i64 / (j + 1) as i64);
            let sign = if i % 2 == 0 { 1 } else { -1 };
            sign * binom * ((k - i) as i64).pow(n)
        })
        .sum()
}

/// Incidence graph as adjacency lists: points first, then lines.
fn graph(g: &IncidenceGeometry) -> Vec<Vec<usize>> {
    let np = g.num_points();
    let mut adj = vec![Vec::new(); np + g.num_lines()];
    for (l, row) in rows(g).into_iter().enumerate() {
        for p in row {
            adj[p].push(np + l);
            adj[np + l].push(p);
        }
    }
    adj
}

fn bfs(adj: &[Vec<usize>], root: usize, skip: Option<(usize, usize)>) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[root] = Some(0);
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if skip == Some((v, w)) || skip == Some((w, v)) {
                continue;
            }
            if dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

/// (girth, diameter) of the incidence graph by deleting each edge in turn.
/// `None` girth for forests, `None` diameter when disconnected.
pub fn girth_and_diameter(g: &IncidenceGeometry) -> (Option<usize>, Option<usize>) {
    let adj = graph(g);
    let mut girth = None::<usize>;
    for v in 0..adj.len() {
        for &w in adj[v].iter().filter(|&&w| w > v) {
            if let Some(d) = bfs(&adj, v, Some((v, w)))[w] {
                girth = Some(girth.map_or(d + 1, |x| x.min(d + 1)));
            }
        }
    }
    let mut diameter = Some(0);
    for v in 0..adj.len() {
        let d = bfs(&adj, v, None);
        match d.iter().copied().collect::<Option<Vec<_>>>() {
            Some(ds) => diameter = diameter.map(|x: usize| x.max(*ds.iter().max().unwrap())),
            None => diameter = None,
        }
    }
    (girth, diameter)
}
