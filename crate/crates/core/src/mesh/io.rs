//! Plain-text mesh exchange and quality reports.
//!
//! Mesh files hold a header line `d n_vertices n_cells`, then one line of
//! `d` coordinates per vertex, then one line of `d + 1` one-based vertex
//! indices per cell. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write;

use super::{Mesh, MeshError, MeshQuality};

pub const QUALITY_CSV_HEADER: &str = "level,h_max,h_min,gamma";

pub fn read_ascii(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(MeshError::Parse { line: 1, message: "missing header".into() })?;
    let head: Vec<usize> = parse_fields(hline, header)?;
    if head.len() != 3 {
        return Err(MeshError::Parse { line: hline, message: "header must be `d n_vertices n_cells`".into() });
    }
    let (dim, nv, nc) = (head[0], head[1], head[2]);
    if dim != 2 && dim != 3 {
        return Err(MeshError::Parse { line: hline, message: format!("unsupported dimension {dim}") });
    }
    let mut coords = Vec::with_capacity(dim * nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or(MeshError::Parse { line: hline, message: "too few vertex lines".into() })?;
        let x: Vec<f64> = parse_fields(ln, l)?;
        if x.len() != dim {
            return Err(MeshError::Parse { line: ln, message: format!("expected {dim} coordinates") });
        }
        coords.extend(x);
    }
    let mut cells = Vec::with_capacity((dim + 1) * nc);
    for _ in 0..nc {
        let (ln, l) = lines.next().ok_or(MeshError::Parse { line: hline, message: "too few cell lines".into() })?;
        let c: Vec<usize> = parse_fields(ln, l)?;
        if c.len() != dim + 1 {
            return Err(MeshError::Parse { line: ln, message: format!("expected {} vertex indices", dim + 1) });
        }
        for v in c {
            if v == 0 || v > nv {
                return Err(MeshError::Parse { line: ln, message: format!("vertex index {v} out of range 1..={nv}") });
            }
            cells.push(v - 1);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(MeshError::Parse { line: ln, message: "unexpected trailing content".into() });
    }
    Mesh::new(dim, coords, cells, None)
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>, MeshError> {
    text.split_whitespace()
        .map(|tok| tok.parse::<T>().map_err(|_| MeshError::Parse { line, message: format!("cannot parse `{tok}`") }))
        .collect()
}

pub fn write_ascii(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", mesh.dim(), mesh.n_vertices(), mesh.n_cells());
    for v in 0..mesh.n_vertices() {
        let x: Vec<String> = mesh.vertex(v).iter().map(|c| format!("{c:?}")).collect();
        let _ = writeln!(out, "{}", x.join(" "));
    }
    for c in mesh.cells() {
        let ids: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
        let _ = writeln!(out, "{}", ids.join(" "));
    }
    out
}

pub fn quality_csv(rows: &[(usize, MeshQuality)]) -> String {
    let mut out = String::from(QUALITY_CSV_HEADER);
    out.push('\n');
    for (level, q) in rows {
        let _ = writeln!(out, "{},{:.12e},{:.12e},{:.12e}", level, q.h_max, q.h_min, q.gamma);
    }
    out
}
