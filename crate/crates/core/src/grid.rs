//! Cell-centred finite-volume grids for a single subdomain.
//!
//! All geometry lives in ambient coordinates (three components, unused ones
//! zero), so a fracture grid embedded in a 2D domain keeps the true elevation
//! of its cells. Each face is oriented from its `left` cell towards its
//! `right` cell; boundary faces have no right cell and an outward normal.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Vec3 = Vector3<f64>;

#[derive(Clone, Debug)]
pub struct Cell {
    pub center: Vec3,
    pub measure: f64,
    /// Polygon vertices (2D), segment end points (1D) or the point itself (0D).
    pub vertices: Vec<Vec3>,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub centroid: Vec3,
    pub area: f64,
    pub normal: Vec3,
    pub left: usize,
    pub right: Option<usize>,
    pub vertices: Vec<Vec3>,
}

impl Face {
    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct SubdomainGrid {
    pub dim: usize,
    pub cells: Vec<Cell>,
    pub faces: Vec<Face>,
    pub elevation: Vec<f64>,
    pub permeability: Vec<f64>,
    pub porosity: Vec<f64>,
}

impl SubdomainGrid {
    /// Assembles a grid from cells and faces. Elevation is read from the
    /// `vertical_axis` component of each cell centre.
    pub fn new(
        dim: usize,
        cells: Vec<Cell>,
        faces: Vec<Face>,
        vertical_axis: usize,
        permeability: f64,
        porosity: f64,
    ) -> Self {
        let n = cells.len();
        let elevation = cells.iter().map(|c| c.center[vertical_axis]).collect();
        SubdomainGrid {
            dim,
            cells,
            faces,
            elevation,
            permeability: vec![permeability; n],
            porosity: vec![porosity; n],
        }
    }

    /// A zero-dimensional grid: one cell of unit measure.
    pub fn point(at: Vec3, vertical_axis: usize, porosity: f64) -> Self {
        let cell = Cell {
            center: at,
            measure: 1.0,
            vertices: vec![at],
        };
        SubdomainGrid::new(0, vec![cell], Vec::new(), vertical_axis, 1.0, porosity)
    }

    /// Axis-aligned structured grid in 1, 2 or 3 dimensions with `counts[k]`
    /// cells of size `lengths[k] / counts[k]` along axis `k`, cells numbered
    /// with axis 0 fastest.
    pub fn cartesian(counts: &[usize], lengths: &[f64], vertical_axis: usize) -> Result<Self> {
        let dim = counts.len();
        if dim == 0 || dim > 3 || lengths.len() != dim {
            return Err(Error::Geometry(format!(
                "cartesian grid needs 1..=3 matching counts/lengths, got {counts:?} / {lengths:?}"
            )));
        }
        if counts.iter().any(|&c| c == 0) || lengths.iter().any(|&l| l <= 0.0) {
            return Err(Error::Geometry("cartesian grid needs positive counts and lengths".into()));
        }
        let mut n = [1usize; 3];
        let mut h = [1.0f64; 3];
        for k in 0..dim {
            n[k] = counts[k];
            h[k] = lengths[k] / counts[k] as f64;
        }
        let index = |i: usize, j: usize, k: usize| i + n[0] * (j + n[1] * k);
        let measure: f64 = h[..dim].iter().product();

        let mut cells = Vec::with_capacity(n[0] * n[1] * n[2]);
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let lo = [i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]];
                    let mut center = Vec3::zeros();
                    for a in 0..dim {
                        center[a] = lo[a] + 0.5 * h[a];
                    }
                    cells.push(Cell {
                        center,
                        measure,
                        vertices: box_vertices(dim, lo, h),
                    });
                }
            }
        }

        let face_area = |axis: usize| -> f64 {
            (0..dim).filter(|&a| a != axis).map(|a| h[a]).product()
        };
        let mut faces = Vec::new();
        for axis in 0..dim {
            let mut normal = Vec3::zeros();
            normal[axis] = 1.0;
            for k in 0..n[2] {
                for j in 0..n[1] {
                    for i in 0..n[0] {
                        let ijk = [i, j, k];
                        let cell = index(i, j, k);
                        let c = &cells[cell];
                        let mut centroid = c.center;
                        centroid[axis] += 0.5 * h[axis];
                        let verts = face_vertices(dim, axis, &c.center, h);
                        if ijk[axis] + 1 < n[axis] {
                            let mut nb = ijk;
                            nb[axis] += 1;
                            faces.push(Face {
                                centroid,
                                area: face_area(axis),
                                normal,
                                left: cell,
                                right: Some(index(nb[0], nb[1], nb[2])),
                                vertices: verts,
                            });
                        } else {
                            faces.push(Face {
                                centroid,
                                area: face_area(axis),
                                normal,
                                left: cell,
                                right: None,
                                vertices: verts,
                            });
                        }
                        if ijk[axis] == 0 {
                            let mut low = c.center;
                            low[axis] -= 0.5 * h[axis];
                            let mut verts = face_vertices(dim, axis, &c.center, h);
                            for v in verts.iter_mut() {
                                v[axis] -= h[axis];
                            }
                            faces.push(Face {
                                centroid: low,
                                area: face_area(axis),
                                normal: -normal,
                                left: cell,
                                right: None,
                                vertices: verts,
                            });
                        }
                    }
                }
            }
        }
        Ok(SubdomainGrid::new(dim, cells, faces, vertical_axis, 1.0, 1.0))
    }

    pub fn with_permeability(mut self, k: f64) -> Self {
        self.permeability = vec![k; self.cells.len()];
        self
    }

    pub fn with_porosity(mut self, phi: f64) -> Self {
        self.porosity = vec![phi; self.cells.len()];
        self
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Two-point transmissibilities, one per face; boundary faces carry zero
    /// (no-flow unless a mortar supplies the flux).
    pub fn tpfa_transmissibilities(&self) -> Result<Vec<f64>> {
        if let Some((c, k)) = self
            .permeability
            .iter()
            .enumerate()
            .find(|(_, &k)| !(k > 0.0 && k.is_finite()))
        {
            return Err(Error::Parameter(format!(
                "permeability of cell {c} must be positive, got {k}"
            )));
        }
        self.faces
            .iter()
            .enumerate()
            .map(|(f, face)| {
                let Some(right) = face.right else {
                    return Ok(0.0);
                };
                let half = |cell: usize| -> Result<f64> {
                    let d = (face.centroid - self.cells[cell].center).dot(&face.normal).abs();
                    if d <= 0.0 {
                        return Err(Error::Geometry(format!(
                            "face {f}: zero centre-to-face distance from cell {cell}"
                        )));
                    }
                    Ok(d / self.permeability[cell])
                };
                Ok(face.area / (half(face.left)? + half(right)?))
            })
            .collect()
    }

    /// Signed elevation jump `z_left - z_right` per face (zero on the boundary).
    pub fn elevation_jumps(&self) -> Vec<f64> {
        self.faces
            .iter()
            .map(|f| match f.right {
                Some(r) => self.elevation[f.left] - self.elevation[r],
                None => 0.0,
            })
            .collect()
    }

    pub fn divergence(&self) -> DiscreteDivergence {
        let mut rows = vec![Vec::new(); self.cells.len()];
        for (f, face) in self.faces.iter().enumerate() {
            rows[face.left].push((f, 1.0));
            if let Some(r) = face.right {
                rows[r].push((f, -1.0));
            }
        }
        DiscreteDivergence {
            rows,
            inv_measure: self.cells.iter().map(|c| 1.0 / c.measure).collect(),
        }
    }

    /// Structural problems with the grid (empty when valid).
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            if !(c.measure > 0.0) {
                problems.push(format!("cell {i} has non-positive measure {}", c.measure));
            }
        }
        for (f, face) in self.faces.iter().enumerate() {
            if !(face.area > 0.0) {
                problems.push(format!("face {f} has non-positive area {}", face.area));
            }
            if (face.normal.norm() - 1.0).abs() > 1e-12 {
                problems.push(format!("face {f} normal is not unit length"));
            }
            if face.left >= self.cells.len() {
                problems.push(format!("face {f} references missing cell {}", face.left));
            }
            if let Some(r) = face.right {
                if r == face.left {
                    problems.push(format!("interior face {f} has identical neighbours"));
                }
                if r >= self.cells.len() {
                    problems.push(format!("face {f} references missing cell {r}"));
                }
            }
        }
        for (i, &phi) in self.porosity.iter().enumerate() {
            if !(phi > 0.0 && phi <= 1.0) {
                problems.push(format!("cell {i} porosity {phi} outside (0, 1]"));
            }
        }
        problems
    }
}

fn box_vertices(dim: usize, lo: [f64; 3], h: [f64; 3]) -> Vec<Vec3> {
    let corner = |a: f64, b: f64, c: f64| Vec3::new(a, b, c);
    match dim {
        1 => vec![corner(lo[0], 0.0, 0.0), corner(lo[0] + h[0], 0.0, 0.0)],
        2 => vec![
            corner(lo[0], lo[1], 0.0),
            corner(lo[0] + h[0], lo[1], 0.0),
            corner(lo[0] + h[0], lo[1] + h[1], 0.0),
            corner(lo[0], lo[1] + h[1], 0.0),
        ],
        _ => {
            let (x0, y0, z0) = (lo[0], lo[1], lo[2]);
            let (x1, y1, z1) = (x0 + h[0], y0 + h[1], z0 + h[2]);
            vec![
                corner(x0, y0, z0),
                corner(x1, y0, z0),
                corner(x1, y1, z0),
                corner(x0, y1, z0),
                corner(x0, y0, z1),
                corner(x1, y0, z1),
                corner(x1, y1, z1),
                corner(x0, y1, z1),
            ]
        }
    }
}

/// Vertices of the face on the high side of `axis` for a box cell.
fn face_vertices(dim: usize, axis: usize, center: &Vec3, h: [f64; 3]) -> Vec<Vec3> {
    let mut base = *center;
    base[axis] += 0.5 * h[axis];
    let others: Vec<usize> = (0..dim).filter(|&a| a != axis).collect();
    match others.len() {
        0 => vec![base],
        1 => {
            let a = others[0];
            let mut p = base;
            let mut q = base;
            p[a] -= 0.5 * h[a];
            q[a] += 0.5 * h[a];
            vec![p, q]
        }
        _ => {
            let (a, b) = (others[0], others[1]);
            [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                .iter()
                .map(|&(sa, sb)| {
                    let mut p = base;
                    p[a] += 0.5 * sa * h[a];
                    p[b] += 0.5 * sb * h[b];
                    p
                })
                .collect()
        }
    }
}

/// Signed cell/face incidence scaled by the inverse cell measure: applied to
/// a face flux vector it returns the net outflow density of each cell.
#[derive(Clone, Debug)]
pub struct DiscreteDivergence {
    rows: Vec<Vec<(usize, f64)>>,
    inv_measure: Vec<f64>,
}

impl DiscreteDivergence {
    pub fn row(&self, cell: usize) -> &[(usize, f64)] {
        &self.rows[cell]
    }

    pub fn entry(&self, cell: usize, face: usize) -> f64 {
        self.rows[cell]
            .iter()
            .find(|(f, _)| *f == face)
            .map(|(_, s)| s * self.inv_measure[cell])
            .unwrap_or(0.0)
    }

    pub fn apply<T: Scalar>(&self, face_flux: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .zip(&self.inv_measure)
            .map(|(row, &inv)| {
                row.iter()
                    .fold(T::zero(), |acc, &(f, s)| acc + face_flux[f].scale(s))
                    .scale(inv)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cells(k_left: f64, k_right: f64) -> SubdomainGrid {
        let mut g = SubdomainGrid::cartesian(&[2], &[2.0], 0).unwrap();
        g.permeability = vec![k_left, k_right];
        g
    }

    fn interior_trans(g: &SubdomainGrid) -> f64 {
        let t = g.tpfa_transmissibilities().unwrap();
        let f = g.faces.iter().position(|f| f.is_interior()).unwrap();
        t[f]
    }

    #[test]
    fn unit_cells_give_unit_transmissibility() {
        assert!((interior_trans(&two_cells(1.0, 1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_transmissibility() {
        // 1 / (0.5 / 1 + 0.5 / 3)
        assert!((interior_trans(&two_cells(1.0, 3.0)) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn zero_permeability_is_rejected() {
        let g = two_cells(0.0, 1.0);
        assert!(matches!(g.tpfa_transmissibilities(), Err(Error::Parameter(_))));
    }

    #[test]
    fn coincident_centre_and_face_is_rejected() {
        let mut g = two_cells(1.0, 1.0);
        let f = g.faces.iter().position(|f| f.is_interior()).unwrap();
        g.faces[f].centroid = g.cells[0].center;
        assert!(matches!(g.tpfa_transmissibilities(), Err(Error::Geometry(_))));
    }

    #[test]
    fn single_face_flux_gives_opposite_rows() {
        let g = two_cells(1.0, 1.0);
        let f = g.faces.iter().position(|f| f.is_interior()).unwrap();
        let mut q = vec![0.0; g.num_faces()];
        q[f] = 2.5;
        let div = g.divergence().apply(&q);
        assert_eq!(div, vec![2.5, -2.5]);
    }

    #[test]
    fn uniform_flux_through_chain_telescopes() {
        let g = SubdomainGrid::cartesian(&[6], &[3.0], 0).unwrap();
        let q: Vec<f64> = g
            .faces
            .iter()
            .map(|f| if f.is_interior() { 1.0 } else { 0.0 })
            .collect();
        let div = g.divergence().apply(&q);
        assert!(div[1..5].iter().all(|d| d.abs() < 1e-15));
        assert!(div[0] > 0.0 && div[5] < 0.0);
    }

    #[test]
    fn cartesian_grids_are_well_formed() {
        for counts in [&[4usize][..], &[3, 2][..], &[2, 3, 2][..]] {
            let lengths: Vec<f64> = counts.iter().map(|&c| c as f64 * 0.5).collect();
            let g = SubdomainGrid::cartesian(counts, &lengths, counts.len() - 1).unwrap();
            assert!(g.check().is_empty(), "{:?}", g.check());
            let total: f64 = g.cells.iter().map(|c| c.measure).sum();
            let expected: f64 = lengths.iter().product();
            assert!((total - expected).abs() < 1e-12);
            let interior = g.faces.iter().filter(|f| f.is_interior()).count();
            let expected_interior: usize = (0..counts.len())
                .map(|a| {
                    counts
                        .iter()
                        .enumerate()
                        .map(|(b, &c)| if a == b { c - 1 } else { c })
                        .product::<usize>()
                })
                .sum();
            assert_eq!(interior, expected_interior);
        }
    }

    #[test]
    fn point_grid_has_single_unit_cell() {
        let g = SubdomainGrid::point(Vec3::new(0.3, 0.4, 0.0), 1, 0.25);
        assert_eq!(g.num_cells(), 1);
        assert_eq!(g.num_faces(), 0);
        assert_eq!(g.cells[0].measure, 1.0);
        assert_eq!(g.elevation[0], 0.4);
    }
}
