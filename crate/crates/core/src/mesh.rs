//! Planar meshes and the construction of a mixed-dimensional domain from a
//! mesh and a set of straight fractures.
//!
//! Fractures must follow mesh edges. Every edge lying on a fracture is split
//! into two boundary faces, one per side; each fracture becomes a 1D
//! subdomain with a mortar on either side, and every point where fractures
//! meet becomes a 0D subdomain with one mortar per adjoining fracture face.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, Face, SubdomainGrid, Vec3};
use crate::topology::{MixedDimDomain, MortarCells, MortarInterface};

const GEOM_TOL: f64 = 1e-9;

/// Vertical axis of the ambient plane (`y`).
const VERTICAL: usize = 1;

/// Polygonal mesh of a planar domain.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMesh {
    pub vertices: Vec<[f64; 2]>,
    /// Vertex indices of each cell in counter-clockwise order.
    pub cells: Vec<Vec<usize>>,
}

impl PolyMesh {
    /// `nx * ny` axis-aligned rectangles.
    pub fn quad(nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        let vertices = grid_vertices(nx, ny, lx, ly);
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        PolyMesh { vertices, cells }
    }

    /// Each rectangle of an `nx * ny` grid split along its lower-left to
    /// upper-right diagonal.
    pub fn triangulated(nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        let vertices = grid_vertices(nx, ny, lx, ly);
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                cells.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        PolyMesh { vertices, cells }
    }

    /// Reads the plain-text mesh format:
    ///
    /// ```text
    /// # comment
    /// vertices <n>
    /// <x> <y>          (n lines)
    /// cells <m>
    /// <k> <v1> .. <vk> (m lines, vertex indices from 0)
    /// ```
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let header = |lines: &mut dyn Iterator<Item = (usize, &str)>, name: &str| -> Result<usize> {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| err(0, format!("missing `{name}` section")))?;
            let mut it = l.split_whitespace();
            if it.next() != Some(name) {
                return Err(err(ln, format!("expected `{name} <count>`")));
            }
            it.next()
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| err(ln, format!("expected `{name} <count>`")))
        };

        let nv = header(&mut lines, "vertices")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| err(0, "fewer vertices than declared".into()))?;
            let xy: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| err(ln, format!("bad coordinate `{t}`: {e}"))))
                .collect::<Result<_>>()?;
            if xy.len() != 2 {
                return Err(err(ln, format!("expected 2 coordinates, found {}", xy.len())));
            }
            vertices.push([xy[0], xy[1]]);
        }
        let nc = header(&mut lines, "cells")?;
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| err(0, "fewer cells than declared".into()))?;
            let ids: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| err(ln, format!("bad index `{t}`: {e}"))))
                .collect::<Result<_>>()?;
            let Some((&k, verts)) = ids.split_first() else {
                return Err(err(ln, "empty cell line".into()));
            };
            if k < 3 || verts.len() != k {
                return Err(err(ln, format!("cell declares {k} vertices but lists {}", verts.len())));
            }
            if let Some(v) = verts.iter().find(|&&v| v >= nv) {
                return Err(err(ln, format!("vertex index {v} out of range")));
            }
            cells.push(verts.to_vec());
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln, "unexpected trailing content".into()));
        }
        Ok(PolyMesh { vertices, cells })
    }

    /// Bounding box `(min, max)`.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

fn grid_vertices(nx: usize, ny: usize, lx: f64, ly: f64) -> Vec<[f64; 2]> {
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            v.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]);
        }
    }
    v
}

fn p3(v: [f64; 2]) -> Vec3 {
    Vec3::new(v[0], v[1], 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractureSpec {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub permeability: f64,
    pub normal_permeability: f64,
    pub aperture: f64,
    pub porosity: f64,
    /// Uniform fracture cells instead of following the mesh edges.
    #[serde(default)]
    pub cells: Option<usize>,
    /// Uniform mortar cells instead of matching the fracture cells.
    #[serde(default)]
    pub mortar_cells: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionSpec {
    pub aperture: f64,
    pub porosity: f64,
}

impl Default for IntersectionSpec {
    fn default() -> Self {
        IntersectionSpec {
            aperture: 0.01,
            porosity: 0.25,
        }
    }
}

/// A straight fracture in its intrinsic coordinate `s in [0, length]`.
struct Line {
    origin: [f64; 2],
    tangent: [f64; 2],
    length: f64,
}

impl Line {
    fn new(spec: &FractureSpec) -> Result<Self> {
        let d = [spec.end[0] - spec.start[0], spec.end[1] - spec.start[1]];
        let length = d[0].hypot(d[1]);
        if !(length > GEOM_TOL) {
            return Err(Error::Geometry(format!("degenerate fracture {spec:?}")));
        }
        Ok(Line {
            origin: spec.start,
            tangent: [d[0] / length, d[1] / length],
            length,
        })
    }

    fn at(&self, s: f64) -> [f64; 2] {
        [self.origin[0] + s * self.tangent[0], self.origin[1] + s * self.tangent[1]]
    }

    /// Intrinsic coordinate of `v` if it lies on the segment.
    fn locate(&self, v: [f64; 2]) -> Option<f64> {
        let d = [v[0] - self.origin[0], v[1] - self.origin[1]];
        let s = d[0] * self.tangent[0] + d[1] * self.tangent[1];
        let off = d[0] * self.tangent[1] - d[1] * self.tangent[0];
        (off.abs() <= GEOM_TOL && s >= -GEOM_TOL && s <= self.length + GEOM_TOL)
            .then(|| s.clamp(0.0, self.length))
    }

    /// Left-hand unit normal.
    fn normal(&self) -> [f64; 2] {
        [-self.tangent[1], self.tangent[0]]
    }
}

/// A point where two or more fractures meet.
struct Junction {
    at: [f64; 2],
    /// `(fracture, s)` for every fracture through the point.
    members: Vec<(usize, f64)>,
}

fn find_junctions(lines: &[Line]) -> Result<Vec<Junction>> {
    let mut out: Vec<Junction> = Vec::new();
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            let (la, lb) = (&lines[a], &lines[b]);
            let cross = la.tangent[0] * lb.tangent[1] - la.tangent[1] * lb.tangent[0];
            if cross.abs() < 1e-12 {
                let overlap = lb.locate(la.at(0.0)).is_some()
                    || lb.locate(la.at(la.length)).is_some()
                    || la.locate(lb.at(0.0)).is_some();
                let collinear = {
                    let d = [lb.origin[0] - la.origin[0], lb.origin[1] - la.origin[1]];
                    (d[0] * la.tangent[1] - d[1] * la.tangent[0]).abs() <= GEOM_TOL
                };
                if overlap && collinear {
                    return Err(Error::Geometry(format!("fractures {a} and {b} overlap")));
                }
                continue;
            }
            let d = [lb.origin[0] - la.origin[0], lb.origin[1] - la.origin[1]];
            let s = (d[0] * lb.tangent[1] - d[1] * lb.tangent[0]) / cross;
            let p = la.at(s);
            let (Some(sa), Some(sb)) = (la.locate(p), lb.locate(p)) else {
                continue;
            };
            let p = la.at(sa);
            match out
                .iter_mut()
                .find(|j| (j.at[0] - p[0]).hypot(j.at[1] - p[1]) <= 1e3 * GEOM_TOL)
            {
                Some(j) => {
                    for (f, s) in [(a, sa), (b, sb)] {
                        if !j.members.iter().any(|(g, _)| *g == f) {
                            j.members.push((f, s));
                        }
                    }
                }
                None => out.push(Junction {
                    at: p,
                    members: vec![(a, sa), (b, sb)],
                }),
            }
        }
    }
    Ok(out)
}

/// Polygon centroid and (signed) area.
fn polygon(verts: &[[f64; 2]]) -> ([f64; 2], f64) {
    let mut a = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for k in 0..verts.len() {
        let p = verts[k];
        let q = verts[(k + 1) % verts.len()];
        let w = p[0] * q[1] - q[0] * p[1];
        a += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    a *= 0.5;
    ([cx / (6.0 * a), cy / (6.0 * a)], a)
}

/// Boundary face created by splitting a fracture edge.
struct SplitFace {
    fracture: usize,
    face: usize,
    /// +1 when the owning cell lies on the left of the fracture tangent.
    side: i8,
}

fn matrix_grid(
    mesh: &PolyMesh,
    lines: &[Line],
    permeability: f64,
    porosity: f64,
) -> Result<(SubdomainGrid, Vec<SplitFace>)> {
    let mut cells = Vec::with_capacity(mesh.cells.len());
    let mut oriented: Vec<Vec<usize>> = Vec::with_capacity(mesh.cells.len());
    for (k, c) in mesh.cells.iter().enumerate() {
        let verts: Vec<[f64; 2]> = c.iter().map(|&v| mesh.vertices[v]).collect();
        let (center, area) = polygon(&verts);
        if area.abs() <= GEOM_TOL * GEOM_TOL {
            return Err(Error::Geometry(format!("mesh cell {k} has zero area")));
        }
        let mut ids = c.clone();
        if area < 0.0 {
            ids.reverse();
        }
        cells.push(Cell {
            center: p3(center),
            measure: area.abs(),
            vertices: ids.iter().map(|&v| p3(mesh.vertices[v])).collect(),
        });
        oriented.push(ids);
    }

    // Edge -> (cell, a, b) with a -> b counter-clockwise in that cell.
    let mut edges: HashMap<(usize, usize), Vec<(usize, usize, usize)>> = HashMap::new();
    let mut order = Vec::new();
    for (k, ids) in oriented.iter().enumerate() {
        for e in 0..ids.len() {
            let (a, b) = (ids[e], ids[(e + 1) % ids.len()]);
            let key = (a.min(b), a.max(b));
            let entry = edges.entry(key).or_default();
            if entry.is_empty() {
                order.push(key);
            }
            entry.push((k, a, b));
        }
    }

    let mut faces = Vec::new();
    let mut split = Vec::new();
    let make_face = |cell: usize, a: usize, b: usize, right: Option<usize>| {
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let d = [pb[0] - pa[0], pb[1] - pa[1]];
        let len = d[0].hypot(d[1]);
        Face {
            centroid: p3([(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0]),
            area: len,
            normal: Vec3::new(d[1] / len, -d[0] / len, 0.0),
            left: cell,
            right,
            vertices: vec![p3(pa), p3(pb)],
        }
    };
    for key in order {
        let owners = &edges[&key];
        if owners.len() > 2 {
            return Err(Error::Topology(format!("edge {key:?} shared by more than two cells")));
        }
        let (pa, pb) = (mesh.vertices[key.0], mesh.vertices[key.1]);
        let on: Vec<usize> = lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.locate(pa).is_some() && l.locate(pb).is_some())
            .map(|(f, _)| f)
            .collect();
        if on.len() > 1 {
            return Err(Error::Geometry(format!("edge {key:?} lies on several fractures")));
        }
        match (owners.as_slice(), on.first()) {
            ([(m, a, b), (n, _, _)], None) => faces.push(make_face(*m, *a, *b, Some(*n))),
            (list, fracture) => {
                for &(c, a, b) in list {
                    let face = faces.len();
                    faces.push(make_face(c, a, b, None));
                    if let Some(&f) = fracture {
                        let ctr = cells[c].center;
                        let nrm = lines[f].normal();
                        let o = lines[f].origin;
                        let side = if (ctr[0] - o[0]) * nrm[0] + (ctr[1] - o[1]) * nrm[1] > 0.0 { 1 } else { -1 };
                        split.push(SplitFace {
                            fracture: f,
                            face,
                            side,
                        });
                    }
                }
            }
        }
    }
    let grid = SubdomainGrid::new(2, cells, faces, VERTICAL, permeability, porosity);
    Ok((grid, split))
}

/// 1D grid of one fracture. Returns the grid and, per node coordinate of
/// every junction on it, the faces sitting at that node.
fn fracture_grid(
    spec: &FractureSpec,
    line: &Line,
    mesh_nodes: &[f64],
    junction_s: &[f64],
) -> Result<(SubdomainGrid, Vec<Vec<usize>>)> {
    let mut nodes: Vec<f64> = match spec.cells {
        Some(n) if n > 0 => (0..=n).map(|k| line.length * k as f64 / n as f64).collect(),
        Some(_) => return Err(Error::Parameter("fracture needs at least one cell".into())),
        None => mesh_nodes.to_vec(),
    };
    nodes.extend_from_slice(junction_s);
    nodes.push(0.0);
    nodes.push(line.length);
    nodes.sort_by(|a, b| a.total_cmp(b));
    nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e3 * GEOM_TOL);
    let last = nodes.len() - 1;
    nodes[0] = 0.0;
    nodes[last] = line.length;

    let pt = |s: f64| p3(line.at(s));
    let cells: Vec<Cell> = nodes
        .windows(2)
        .map(|w| Cell {
            center: pt(0.5 * (w[0] + w[1])),
            measure: w[1] - w[0],
            vertices: vec![pt(w[0]), pt(w[1])],
        })
        .collect();
    let t = Vec3::new(line.tangent[0], line.tangent[1], 0.0);
    let is_junction = |s: f64| junction_s.iter().any(|&j| (j - s).abs() <= 1e3 * GEOM_TOL);
    let mut faces = Vec::new();
    let mut at_node = vec![Vec::new(); nodes.len()];
    let point_face = |s: f64, left: usize, right: Option<usize>, normal: Vec3| Face {
        centroid: pt(s),
        area: 1.0,
        normal,
        left,
        right,
        vertices: vec![pt(s)],
    };
    for (k, &s) in nodes.iter().enumerate() {
        if k == 0 {
            at_node[k].push(faces.len());
            faces.push(point_face(s, 0, None, -t));
        } else if k == last {
            at_node[k].push(faces.len());
            faces.push(point_face(s, k - 1, None, t));
        } else if is_junction(s) {
            at_node[k].push(faces.len());
            faces.push(point_face(s, k - 1, None, t));
            at_node[k].push(faces.len());
            faces.push(point_face(s, k, None, -t));
        } else {
            faces.push(point_face(s, k - 1, Some(k), t));
        }
    }
    let junction_faces = junction_s
        .iter()
        .map(|&j| {
            let k = nodes
                .iter()
                .position(|&s| (s - j).abs() <= 1e3 * GEOM_TOL)
                .unwrap_or(0);
            at_node[k].clone()
        })
        .collect();
    let grid = SubdomainGrid::new(1, cells, faces, VERTICAL, spec.permeability, spec.porosity);
    Ok((grid, junction_faces))
}

/// Builds the matrix, fracture and intersection subdomains and all mortars.
pub fn build_domain(
    mesh: &PolyMesh,
    permeability: f64,
    porosity: f64,
    fractures: &[FractureSpec],
    junction: &IntersectionSpec,
) -> Result<MixedDimDomain> {
    for f in fractures {
        if !(f.aperture > 0.0) || !(f.normal_permeability > 0.0) || !(f.permeability > 0.0) {
            return Err(Error::Parameter(format!("fracture parameters must be positive: {f:?}")));
        }
    }
    let lines = fractures.iter().map(Line::new).collect::<Result<Vec<_>>>()?;
    let junctions = find_junctions(&lines)?;
    let (matrix, split) = matrix_grid(mesh, &lines, permeability, porosity)?;

    let mut domain = MixedDimDomain::new(2);
    domain.vertical_axis = VERTICAL;
    let matrix_id = domain.add_subdomain(1.0, matrix);

    let mut frac_ids = Vec::with_capacity(fractures.len());
    let mut junction_faces: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); junctions.len()];
    for (f, (spec, line)) in fractures.iter().zip(&lines).enumerate() {
        let mesh_nodes: Vec<f64> = mesh.vertices.iter().filter_map(|&v| line.locate(v)).collect();
        let on_f: Vec<(usize, f64)> = junctions
            .iter()
            .enumerate()
            .filter_map(|(j, jn)| jn.members.iter().find(|(g, _)| *g == f).map(|(_, s)| (j, *s)))
            .collect();
        let s_list: Vec<f64> = on_f.iter().map(|(_, s)| *s).collect();
        let (grid, faces_at) = fracture_grid(spec, line, &mesh_nodes, &s_list)?;
        for ((j, _), fs) in on_f.iter().zip(faces_at) {
            junction_faces[*j].insert(f, fs);
        }
        let id = domain.add_subdomain(spec.aperture, grid);
        frac_ids.push(id);

        for side in [1i8, -1] {
            let high_faces: Vec<usize> = split
                .iter()
                .filter(|s| s.fracture == f && s.side == side)
                .map(|s| s.face)
                .collect();
            if high_faces.is_empty() {
                continue;
            }
            let intervals = match spec.mortar_cells {
                Some(0) => return Err(Error::Parameter("mortar needs at least one cell".into())),
                Some(n) => (0..n)
                    .map(|k| (line.length * k as f64 / n as f64, line.length * (k + 1) as f64 / n as f64))
                    .collect(),
                None => domain.subdomains[id]
                    .grid
                    .cells
                    .iter()
                    .map(|c| {
                        let a = line.locate([c.vertices[0][0], c.vertices[0][1]]).unwrap_or(0.0);
                        let b = line.locate([c.vertices[1][0], c.vertices[1][1]]).unwrap_or(0.0);
                        (a, b)
                    })
                    .collect(),
            };
            let cells = MortarCells::Segments {
                origin: p3(line.origin),
                tangent: Vec3::new(line.tangent[0], line.tangent[1], 0.0),
                intervals,
            };
            let mortar = MortarInterface::new(0, matrix_id, id, spec.normal_permeability, cells, high_faces);
            domain.add_mortar(mortar)?;
        }
    }

    for (j, jn) in junctions.iter().enumerate() {
        let grid = SubdomainGrid::point(p3(jn.at), VERTICAL, junction.porosity);
        let point = domain.add_subdomain(junction.aperture, grid);
        let kperp = 1.0
            / jn
                .members
                .iter()
                .map(|(f, _)| 1.0 / fractures[*f].normal_permeability)
                .sum::<f64>();
        let mut members = jn.members.clone();
        members.sort_by_key(|(f, _)| *f);
        for (f, _) in members {
            for &face in &junction_faces[j][&f] {
                let cells = MortarCells::Points(vec![p3(jn.at)]);
                let mortar = MortarInterface::new(0, frac_ids[f], point, kperp, cells, vec![face]);
                domain.add_mortar(mortar)?;
            }
        }
    }
    Ok(domain)
}
