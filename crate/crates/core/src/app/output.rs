//! CSV tables and legacy ASCII VTK files.

use std::fmt::Write as _;
use std::path::Path;

use super::study::{ErrorSeries, SweepRow};
use crate::error::{Error, Result};
use crate::fem::{FESpace, Field, Role};
use crate::mesh::Point;

pub const CSV_HEADER: &str = "N,h,dt,E_H1_u,order,E_L2_p,order,E_L2inf_u,order,status";

/// C-style `%.6e` (two-digit exponent at least); `nan` for non-finite values.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn format_csv(series: &ErrorSeries) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &series.rows {
        let status = r.status.replace([',', '\n'], ";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            format_sci(r.h),
            format_sci(r.dt),
            format_sci(r.errors[0]),
            format_sci(r.orders[0]),
            format_sci(r.errors[1]),
            format_sci(r.orders[1]),
            format_sci(r.errors[2]),
            format_sci(r.orders[2]),
            status
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<ErrorSeries> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Parse("missing or unexpected CSV header".into()));
    }
    let num = |s: &str| -> Result<f64> {
        if s == "nan" {
            Ok(f64::NAN)
        } else {
            s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
        }
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.trim().splitn(10, ',').collect();
        if f.len() != 10 {
            return Err(Error::Parse(format!("row {} has {} fields, expected 10", i + 1, f.len())));
        }
        rows.push(SweepRow {
            n: f[0].parse().map_err(|_| Error::Parse(format!("bad N '{}'", f[0])))?,
            h: num(f[1])?,
            dt: num(f[2])?,
            errors: [num(f[3])?, num(f[5])?, num(f[7])?],
            orders: [num(f[4])?, num(f[6])?, num(f[8])?],
            status: f[9].to_string(),
        });
    }
    Ok(ErrorSeries { rows })
}

pub fn write_csv(series: &ErrorSeries, path: &Path) -> Result<()> {
    std::fs::write(path, format_csv(series)).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<ErrorSeries> {
    parse_csv(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Velocity at the vertices followed by the edge midpoints.
pub fn sample_velocity(space: &FESpace, u: &Field) -> Vec<(Point, [f64; 2])> {
    let mesh = space.mesh();
    let nv = mesh.num_vertices();
    let mut out = vec![([0.0; 2], [0.0; 2]); nv + mesh.num_edges()];
    let mut seen = vec![false; out.len()];
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangle(t);
        let edges = mesh.triangle_edges(t);
        for k in 0..3 {
            let mut lam = [0.0; 3];
            lam[k] = 1.0;
            if !seen[tri[k]] {
                seen[tri[k]] = true;
                out[tri[k]] = (mesh.vertex(tri[k]), space.eval_velocity(&u.coeffs, t, lam));
            }
            let e = nv + edges[k];
            if !seen[e] {
                let mut lam = [0.5; 3];
                lam[k] = 0.0;
                seen[e] = true;
                out[e] = (mesh.edge_midpoint(edges[k]), space.eval_velocity(&u.coeffs, t, lam));
            }
        }
    }
    out
}

/// Writes a legacy ASCII unstructured grid.
///
/// With a velocity the grid is the uniform refinement (vertices and edge
/// midpoints, four cells per element) and the pressure is sampled on it;
/// a pressure alone is written on the mesh itself.
pub fn export_vtk(space: &FESpace, velocity: Option<&Field>, pressure: Option<&Field>, path: &Path) -> Result<()> {
    std::fs::write(path, format_vtk(space, velocity, pressure)?).map_err(|e| Error::io(path, e))
}

pub fn format_vtk(space: &FESpace, velocity: Option<&Field>, pressure: Option<&Field>) -> Result<String> {
    for f in velocity.iter().chain(pressure.iter()) {
        space.check_field(f)?;
    }
    if velocity.is_some_and(|f| f.role != Role::Velocity) || pressure.is_some_and(|f| f.role != Role::Pressure) {
        return Err(Error::invalid("field roles do not match the export slots"));
    }
    let mesh = space.mesh();
    let nv = mesh.num_vertices();
    let (points, cells): (Vec<Point>, Vec<[usize; 3]>) = match velocity {
        Some(_) => {
            let mut pts = mesh.vertices().to_vec();
            pts.extend((0..mesh.num_edges()).map(|e| mesh.edge_midpoint(e)));
            let mut cells = Vec::with_capacity(4 * mesh.num_triangles());
            for t in 0..mesh.num_triangles() {
                let [a, b, c] = mesh.triangle(t);
                let [e0, e1, e2] = mesh.triangle_edges(t).map(|e| nv + e);
                cells.extend([[a, e2, e1], [e2, b, e0], [e1, e0, c], [e0, e1, e2]]);
            }
            (pts, cells)
        }
        None => (mesh.vertices().to_vec(), mesh.triangles().to_vec()),
    };

    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\ncharfem\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in &points {
        let _ = writeln!(s, "{} {} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {} {}", cells.len(), 4 * cells.len());
    for c in &cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for _ in &cells {
        s.push_str("5\n");
    }
    if velocity.is_none() && pressure.is_none() {
        return Ok(s);
    }
    let _ = writeln!(s, "POINT_DATA {}", points.len());
    if let Some(u) = velocity {
        s.push_str("VECTORS velocity double\n");
        for (_, v) in sample_velocity(space, u) {
            let _ = writeln!(s, "{} {} 0", v[0], v[1]);
        }
    }
    if let Some(p) = pressure {
        s.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
        for v in 0..nv {
            let _ = writeln!(s, "{}", p.coeffs[v]);
        }
        if velocity.is_some() {
            for e in mesh.edges() {
                let _ = writeln!(s, "{}", 0.5 * (p.coeffs[e[0]] + p.coeffs[e[1]]));
            }
        }
    }
    Ok(s)
}

/// `x,y,u1,u2` at vertices and edge midpoints inside the box `[lo, hi]`.
pub fn export_subdomain_csv(space: &FESpace, u: &Field, window: [[f64; 2]; 2], path: &Path) -> Result<()> {
    space.check_field(u)?;
    let [lo, hi] = window;
    let mut s = String::from("x,y,u1,u2\n");
    for (x, v) in sample_velocity(space, u) {
        if x[0] >= lo[0] && x[0] <= hi[0] && x[1] >= lo[1] && x[1] <= hi[1] {
            let _ = writeln!(s, "{},{},{},{}", format_sci(x[0]), format_sci(x[1]), format_sci(v[0]), format_sci(v[1]));
        }
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
