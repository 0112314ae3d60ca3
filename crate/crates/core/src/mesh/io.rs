//! Plain-text mesh format.
//!
//! ```text
//! nv nt
//! x y boundary_flag      (nv lines)
//! v0 v1 v2               (nt lines, 0-based)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mesh.num_vertices(), mesh.num_triangles());
    for (v, p) in mesh.vertices().iter().enumerate() {
        // `{}` on f64 prints the shortest string that parses back exactly
        let _ = writeln!(out, "{} {} {}", p[0], p[1], mesh.is_boundary_vertex(v) as u8);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let counts = parse_fields::<usize>(header, 2)?;
    let (nv, nt) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    let mut flags = Vec::with_capacity(nv);
    for i in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing vertex line {i}")))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("vertex line {i}: expected 3 fields")));
        }
        let x = parse_one::<f64>(fields[0])?;
        let y = parse_one::<f64>(fields[1])?;
        let flag = parse_one::<u8>(fields[2])?;
        vertices.push([x, y]);
        flags.push(flag != 0);
    }
    let mut triangles = Vec::with_capacity(nt);
    for i in 0..nt {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing triangle line {i}")))?;
        let v = parse_fields::<usize>(line, 3)?;
        triangles.push([v[0], v[1], v[2]]);
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing content after triangles".into()));
    }
    Mesh::new(vertices, triangles, Some(flags), None)
}

pub fn load_mesh(path: &Path) -> Result<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_mesh(&text)
}

fn parse_fields<T: std::str::FromStr>(line: &str, n: usize) -> Result<Vec<T>> {
    let out: Vec<T> = line
        .split_whitespace()
        .map(parse_one)
        .collect::<Result<_>>()?;
    if out.len() != n {
        return Err(Error::Parse(format!("expected {n} fields in '{line}'")));
    }
    Ok(out)
}

fn parse_one<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse '{s}'")))
}
