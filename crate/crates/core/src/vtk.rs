//! Legacy ASCII VTK output of all subdomains in one unstructured grid.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::state::State;
use crate::topology::MixedDimDomain;

const VTK_VERTEX: u8 = 1;
const VTK_LINE: u8 = 3;
const VTK_TRIANGLE: u8 = 5;
const VTK_POLYGON: u8 = 7;
const VTK_QUAD: u8 = 9;

fn cell_type(dim: usize, nverts: usize) -> u8 {
    match (dim, nverts) {
        (0, _) => VTK_VERTEX,
        (1, _) => VTK_LINE,
        (_, 3) => VTK_TRIANGLE,
        (_, 4) => VTK_QUAD,
        _ => VTK_POLYGON,
    }
}

/// Renders the cells of every subdomain with cell data `p`, `S0`,
/// `subdomain` and `dim`.
pub fn render(domain: &MixedDimDomain, state: &State, title: &str) -> Result<String> {
    state.check_shape(domain)?;
    let mut points = Vec::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut types = Vec::new();
    let mut p = Vec::new();
    let mut s0 = Vec::new();
    let mut sub_id = Vec::new();
    let mut dims = Vec::new();
    for (i, sub) in domain.subdomains.iter().enumerate() {
        for (c, cell) in sub.grid.cells.iter().enumerate() {
            let verts = if cell.vertices.is_empty() {
                vec![cell.center]
            } else {
                cell.vertices.clone()
            };
            let start = points.len();
            types.push(cell_type(sub.dim, verts.len()));
            cells.push((start..start + verts.len()).collect());
            points.extend(verts);
            p.push(state.p[i][c]);
            s0.push(state.s0[i][c]);
            sub_id.push(i);
            dims.push(sub.dim);
        }
    }

    let mut out = String::new();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(out, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", points.len());
    for v in &points {
        let _ = writeln!(out, "{:e} {:e} {:e}", v[0], v[1], v[2]);
    }
    let size: usize = cells.iter().map(|c| c.len() + 1).sum();
    let _ = writeln!(out, "CELLS {} {size}", cells.len());
    for c in &cells {
        let ids: Vec<String> = c.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(out, "{} {}", c.len(), ids.join(" "));
    }
    let _ = writeln!(out, "CELL_TYPES {}", types.len());
    for t in &types {
        let _ = writeln!(out, "{t}");
    }
    let _ = writeln!(out, "CELL_DATA {}", cells.len());
    scalars(&mut out, "p", "double", p.iter().map(|v| format!("{v:e}")));
    scalars(&mut out, "S0", "double", s0.iter().map(|v| format!("{v:e}")));
    scalars(&mut out, "subdomain", "int", sub_id.iter().map(|v| v.to_string()));
    scalars(&mut out, "dim", "int", dims.iter().map(|v| v.to_string()));
    Ok(out)
}

fn scalars(out: &mut String, name: &str, ty: &str, values: impl Iterator<Item = String>) {
    let _ = writeln!(out, "SCALARS {name} {ty} 1\nLOOKUP_TABLE default");
    for v in values {
        let _ = writeln!(out, "{v}");
    }
}

pub fn write(path: &Path, domain: &MixedDimDomain, state: &State, title: &str) -> Result<()> {
    let text = render(domain, state, title)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// What [`check`] found in a legacy file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VtkSummary {
    pub points: usize,
    pub cells: usize,
    /// Cell count per VTK type id.
    pub cell_types: Vec<(u8, usize)>,
    pub arrays: Vec<String>,
}

/// Structural check of a legacy ASCII unstructured grid: header, counts,
/// connectivity bounds, known cell types with matching vertex counts and
/// cell data arrays of the right length.
pub fn check(text: &str, source_name: &str) -> Result<VtkSummary> {
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    if lines.len() < 4 || !lines[0].starts_with("# vtk DataFile Version") {
        return Err(err(1, "missing VTK header".into()));
    }
    if lines[2].trim() != "ASCII" || lines[3].trim() != "DATASET UNSTRUCTURED_GRID" {
        return Err(err(3, "expected an ASCII unstructured grid".into()));
    }
    let mut k = 4;
    let section = |k: &mut usize, key: &str| -> Result<Vec<String>> {
        let line = lines.get(*k).ok_or_else(|| err(*k + 1, format!("missing {key}")))?;
        let words: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if words.first().map(String::as_str) != Some(key) {
            return Err(err(*k + 1, format!("expected {key}, found '{line}'")));
        }
        *k += 1;
        Ok(words)
    };
    let count = |w: &[String], at: usize, k: usize| -> Result<usize> {
        w.get(at)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(k, "bad count".into()))
    };

    let w = section(&mut k, "POINTS")?;
    let npoints = count(&w, 1, k)?;
    for _ in 0..npoints {
        let line = lines.get(k).ok_or_else(|| err(k + 1, "too few points".into()))?;
        let ok = line.split_whitespace().filter(|s| s.parse::<f64>().is_ok()).count() == 3;
        if !ok {
            return Err(err(k + 1, "point needs three coordinates".into()));
        }
        k += 1;
    }

    let w = section(&mut k, "CELLS")?;
    let ncells = count(&w, 1, k)?;
    let size = count(&w, 2, k)?;
    let mut nverts = Vec::with_capacity(ncells);
    let mut total = 0;
    for _ in 0..ncells {
        let line = lines.get(k).ok_or_else(|| err(k + 1, "too few cells".into()))?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| err(k + 1, "bad connectivity".into())))
            .collect::<Result<_>>()?;
        if ids.is_empty() || ids[0] + 1 != ids.len() {
            return Err(err(k + 1, "vertex count does not match the list".into()));
        }
        if ids[1..].iter().any(|&v| v >= npoints) {
            return Err(err(k + 1, "point index out of range".into()));
        }
        total += ids.len();
        nverts.push(ids[0]);
        k += 1;
    }
    if total != size {
        return Err(err(k, format!("CELLS size {size} but {total} entries")));
    }

    let w = section(&mut k, "CELL_TYPES")?;
    if count(&w, 1, k)? != ncells {
        return Err(err(k, "CELL_TYPES count differs from CELLS".into()));
    }
    let mut by_type: Vec<(u8, usize)> = Vec::new();
    for &nv in nverts.iter() {
        let t: u8 = lines
            .get(k)
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| err(k + 1, "bad cell type".into()))?;
        let fits = match t {
            VTK_VERTEX => nv == 1,
            VTK_LINE => nv == 2,
            VTK_TRIANGLE => nv == 3,
            VTK_QUAD => nv == 4,
            VTK_POLYGON => nv >= 3,
            _ => false,
        };
        if !fits {
            return Err(err(k + 1, format!("cell type {t} with {nv} vertices")));
        }
        match by_type.iter_mut().find(|(ty, _)| *ty == t) {
            Some(e) => e.1 += 1,
            None => by_type.push((t, 1)),
        }
        k += 1;
    }
    by_type.sort();

    let w = section(&mut k, "CELL_DATA")?;
    if count(&w, 1, k)? != ncells {
        return Err(err(k, "CELL_DATA count differs from CELLS".into()));
    }
    let mut arrays = Vec::new();
    while k < lines.len() {
        if lines[k].trim().is_empty() {
            k += 1;
            continue;
        }
        let w = section(&mut k, "SCALARS")?;
        let name = w.get(1).cloned().ok_or_else(|| err(k, "unnamed array".into()))?;
        section(&mut k, "LOOKUP_TABLE")?;
        for _ in 0..ncells {
            let ok = lines.get(k).is_some_and(|l| l.trim().parse::<f64>().is_ok());
            if !ok {
                return Err(err(k + 1, format!("array {name} is shorter than the cell count")));
            }
            k += 1;
        }
        arrays.push(name);
    }
    Ok(VtkSummary {
        points: npoints,
        cells: ncells,
        cell_types: by_type,
        arrays,
    })
}
