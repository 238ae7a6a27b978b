//! Text formats for geometries and morphisms.
//!
//! Geometry file:
//!
//! ```text
//! ig 1
//! points 3
//! lines 3
//! 0 1
//! 1 2
//! 0 2
//! ```
//!
//! Record `i` lists the points of line `i`. `#` starts a comment. A record
//! with no points is written as an empty line; lines that hold only a
//! comment are skipped.
//!
//! Morphism file:
//!
//! ```text
//! igmap 1
//! source sha256:<hex>
//! target sha256:<hex>
//! pointmap
//! 0 2
//! ...
//! linemap
//! 0 1
//! ...
//! ```
//!
//! `source` and `target` name a geometry either by the SHA-256 digest of
//! its canonical file or by a path.

use std::fmt::Write as _;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::incidence::IncidenceGeometry;
use crate::morphism::GeometryMorphism;

fn parse_err<T>(line: usize, column: usize, reason: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, column, reason: reason.into() })
}

/// Source lines with comments cut off, numbered from 1. Lines that held
/// only a comment are dropped; blank lines are kept.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n').enumerate().filter_map(|(i, raw)| {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        match raw.find('#') {
            Some(cut) if raw[..cut].trim().is_empty() => None,
            Some(cut) => Some((i + 1, &raw[..cut])),
            None => Some((i + 1, raw)),
        }
    })
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let len = rest[start..].find(char::is_whitespace).unwrap_or(rest.len() - start);
        let tok = &rest[start..start + len];
        let col = offset + start + 1;
        offset += start + len;
        rest = &rest[start + len..];
        Some((col, tok))
    })
}

fn number(line: usize, col: usize, tok: &str) -> Result<usize> {
    tok.parse().or_else(|_| parse_err(line, col, format!("expected a number, found `{tok}`")))
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    at: usize,
    last: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<_> = content_lines(text).collect();
        let last = lines.last().map_or(1, |l| l.0);
        Cursor { lines, at: 0, last }
    }

    fn next_raw(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.at).copied();
        self.at += 1;
        l
    }

    /// Next line that is not blank.
    fn next_nonblank(&mut self, what: &str) -> Result<(usize, &'a str)> {
        while let Some((n, l)) = self.next_raw() {
            if !l.trim().is_empty() {
                return Ok((n, l));
            }
        }
        parse_err(self.last, 1, format!("unexpected end of input, expected {what}"))
    }

    /// A line of the form `<keyword> <args...>`.
    fn keyword(&mut self, key: &str, args: usize) -> Result<(usize, Vec<(usize, &'a str)>)> {
        let (n, l) = self.next_nonblank(&format!("`{key}`"))?;
        let toks: Vec<_> = tokens(l).collect();
        if toks[0].1 != key {
            return parse_err(n, toks[0].0, format!("expected `{key}`, found `{}`", toks[0].1));
        }
        if toks.len() != args + 1 {
            let col = toks.get(args + 1).map_or(l.len() + 1, |t| t.0);
            return parse_err(n, col, format!("`{key}` takes {args} argument(s)"));
        }
        Ok((n, toks[1..].to_vec()))
    }

    fn finish(&mut self) -> Result<()> {
        while let Some((n, l)) = self.next_raw() {
            if let Some((col, tok)) = tokens(l).next() {
                return parse_err(n, col, format!("unexpected trailing content `{tok}`"));
            }
        }
        Ok(())
    }
}

fn version(cursor: &mut Cursor, magic: &str) -> Result<()> {
    let (n, args) = cursor.keyword(magic, 1)?;
    if args[0].1 != "1" {
        return parse_err(n, args[0].0, format!("unsupported version `{}`", args[0].1));
    }
    Ok(())
}

pub fn parse_geometry(bytes: &[u8]) -> Result<IncidenceGeometry> {
    let text = std::str::from_utf8(bytes).or_else(|e| parse_err(1, 1, format!("not UTF-8: {e}")))?;
    let mut cursor = Cursor::new(text);
    version(&mut cursor, "ig")?;
    let (n, args) = cursor.keyword("points", 1)?;
    let num_points = number(n, args[0].0, args[0].1)?;
    let (n, args) = cursor.keyword("lines", 1)?;
    let num_lines = number(n, args[0].0, args[0].1)?;
    let mut rows = Vec::with_capacity(num_lines);
    for i in 0..num_lines {
        let (n, l) = cursor
            .next_raw()
            .map_or_else(|| parse_err(cursor.last, 1, format!("missing record for line {i}")), Ok)?;
        let mut row = Vec::new();
        for (col, tok) in tokens(l) {
            let p = number(n, col, tok)?;
            if p >= num_points {
                return parse_err(n, col, format!("point {p} out of range (points {num_points})"));
            }
            if row.contains(&p) {
                return parse_err(n, col, format!("duplicate flag ({p}, {i})"));
            }
            row.push(p);
        }
        rows.push(row);
    }
    cursor.finish()?;
    IncidenceGeometry::from_lines(num_points, rows).or_else(|e| parse_err(1, 1, e.to_string()))
}

/// Canonical bytes: sorted records, single spaces, `\n` endings.
pub fn write_geometry(g: &IncidenceGeometry) -> Vec<u8> {
    let mut s = format!("ig 1\npoints {}\nlines {}\n", g.num_points(), g.num_lines());
    for l in 0..g.num_lines() {
        let mut first = true;
        for &p in g.points_on(l) {
            if !first {
                s.push(' ');
            }
            first = false;
            write!(s, "{p}").unwrap();
        }
        s.push('\n');
    }
    s.into_bytes()
}

/// `sha256:<hex>` of the canonical geometry file.
pub fn geometry_hash(g: &IncidenceGeometry) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(write_geometry(g))))
}

/// A parsed morphism file, before it is attached to geometries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismFile {
    pub source: String,
    pub target: String,
    pub point_map: Vec<usize>,
    pub line_map: Vec<usize>,
}

impl MorphismFile {
    /// Attaches the maps to `source` and `target`, checking digests when
    /// the file names its geometries by hash.
    pub fn into_morphism(
        self,
        source: Arc<IncidenceGeometry>,
        target: Arc<IncidenceGeometry>,
    ) -> Result<GeometryMorphism> {
        for (name, reference, g) in [("source", &self.source, &source), ("target", &self.target, &target)] {
            if reference.starts_with("sha256:") && *reference != geometry_hash(g) {
                return Err(Error::ContractViolation(format!("{name} digest {reference} does not match the given geometry")));
            }
        }
        GeometryMorphism::new(source, target, self.point_map, self.line_map)
    }
}

fn parse_map(cursor: &mut Cursor, key: &str, stop: Option<&str>) -> Result<Vec<usize>> {
    cursor.keyword(key, 0)?;
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    loop {
        let save = cursor.at;
        let Some((n, l)) = cursor.next_raw() else { break };
        let toks: Vec<_> = tokens(l).collect();
        if toks.is_empty() {
            continue;
        }
        if Some(toks[0].1) == stop {
            cursor.at = save;
            break;
        }
        if toks.len() != 2 {
            return parse_err(n, toks[0].0, format!("expected `i j` in {key}"));
        }
        pairs.push((n, number(n, toks[0].0, toks[0].1)?, number(n, toks[1].0, toks[1].1)?));
    }
    let mut map = vec![None; pairs.len()];
    for &(n, i, j) in &pairs {
        match map.get_mut(i) {
            None => return parse_err(n, 1, format!("{key} entry {i} out of range ({} entries)", pairs.len())),
            Some(Some(_)) => return parse_err(n, 1, format!("{key} entry {i} given twice")),
            Some(slot) => *slot = Some(j),
        }
    }
    Ok(map.into_iter().map(|x| x.expect("every slot filled")).collect())
}

pub fn parse_morphism(bytes: &[u8]) -> Result<MorphismFile> {
    let text = std::str::from_utf8(bytes).or_else(|e| parse_err(1, 1, format!("not UTF-8: {e}")))?;
    let mut cursor = Cursor::new(text);
    version(&mut cursor, "igmap")?;
    let (_, src) = cursor.keyword("source", 1)?;
    let (_, tgt) = cursor.keyword("target", 1)?;
    let point_map = parse_map(&mut cursor, "pointmap", Some("linemap"))?;
    let line_map = parse_map(&mut cursor, "linemap", None)?;
    cursor.finish()?;
    Ok(MorphismFile { source: src[0].1.to_string(), target: tgt[0].1.to_string(), point_map, line_map })
}

pub fn write_morphism(phi: &GeometryMorphism) -> Vec<u8> {
    let mut s = format!(
        "igmap 1\nsource {}\ntarget {}\npointmap\n",
        geometry_hash(phi.source()),
        geometry_hash(phi.target())
    );
    for (i, j) in phi.point_map().iter().enumerate() {
        writeln!(s, "{i} {j}").unwrap();
    }
    s.push_str("linemap\n");
    for (i, j) in phi.line_map().iter().enumerate() {
        writeln!(s, "{i} {j}").unwrap();
    }
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{ordinary_polygon, projective_plane};

    #[test]
    fn triangle_bytes() {
        let t = ordinary_polygon(3).unwrap();
        assert_eq!(write_geometry(&t), b"ig 1\npoints 3\nlines 3\n0 1\n1 2\n0 2\n");
    }

    #[test]
    fn comments_and_unsorted_records() {
        let g = parse_geometry(b"# a triangle\nig 1\npoints 3 # three\nlines 3\n1 0\n2 1\n# skip me\n0 2\n\n").unwrap();
        assert_eq!(g, ordinary_polygon(3).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_geometry(b"ig 1\npoints 3\nlines 3\n0 1\n1 3\n0 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, column: 3, .. }), "{e}");
        let e = parse_geometry(b"ig 1\npoints 3\nlines 1\n0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, column: 3, .. }), "{e}");
        let e = parse_geometry(b"ig 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, column: 4, .. }), "{e}");
        let e = parse_geometry(b"ig 1\npoints 3\nlines 1\n0 1\n7\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }), "{e}");
        assert!(parse_geometry(b"ig 1\npoints 3\nlines 2\n0 1\n").is_err());
    }

    #[test]
    fn morphism_round_trip() {
        let p = Arc::new(projective_plane(2).unwrap());
        let id = GeometryMorphism::identity(p.clone());
        let bytes = write_morphism(&id);
        let file = parse_morphism(&bytes).unwrap();
        assert_eq!(file.source, geometry_hash(&p));
        let back = file.into_morphism(p.clone(), p.clone()).unwrap();
        assert_eq!(back, id);
        assert_eq!(write_morphism(&back), bytes);
        let other = Arc::new(ordinary_polygon(7).unwrap());
        assert!(parse_morphism(&bytes).unwrap().into_morphism(other, p).is_err());
    }
}
