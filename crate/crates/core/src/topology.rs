//! Mixed-dimensional decomposition: subdomains of decreasing dimension,
//! mortar interfaces between codimension-one neighbours, and the discrete
//! projection maps that move data between a mortar and its two sides.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{SubdomainGrid, Vec3};
use crate::scalar::Scalar;

/// Relative tolerance below which an overlap counts as empty.
pub const OVERLAP_TOL: f64 = 1e-10;

/// Distance below which a vertex is considered to lie on a mortar.
const ON_MORTAR_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Subdomain {
    pub id: usize,
    pub dim: usize,
    /// Aperture (fracture thickness) used to build the codimension extension.
    pub aperture: f64,
    /// `aperture^(ambient_dim - dim)`.
    pub codim_extension: f64,
    pub grid: SubdomainGrid,
    /// Mortars towards higher-dimensional neighbours.
    pub higher_mortars: Vec<usize>,
    /// Mortars towards lower-dimensional neighbours.
    pub lower_mortars: Vec<usize>,
}

impl Subdomain {
    pub fn new(id: usize, ambient_dim: usize, aperture: f64, grid: SubdomainGrid) -> Self {
        let dim = grid.dim;
        Subdomain {
            id,
            dim,
            aperture,
            codim_extension: aperture.powi((ambient_dim - dim) as i32),
            grid,
            higher_mortars: Vec::new(),
            lower_mortars: Vec::new(),
        }
    }
}

/// Row-compressed sparse linear map from a subdomain entity space
/// (faces or cells) to mortar cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMap {
    rows: Vec<Vec<(usize, f64)>>,
    ncols: usize,
}

impl SparseMap {
    pub fn new(rows: Vec<Vec<(usize, f64)>>, ncols: usize) -> Self {
        SparseMap { rows, ncols }
    }

    pub fn identity(n: usize) -> Self {
        SparseMap {
            rows: (0..n).map(|i| vec![(i, 1.0)]).collect(),
            ncols: n,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut Vec<(usize, f64)> {
        &mut self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.rows[r]
            .iter()
            .filter(|(col, _)| *col == c)
            .map(|(_, v)| v)
            .sum()
    }

    /// Weighted combination of `value(col)` for row `r`.
    pub fn project_row<T: Scalar>(&self, r: usize, value: impl Fn(usize) -> T) -> T {
        self.rows[r]
            .iter()
            .fold(T::zero(), |acc, &(c, w)| acc + value(c).scale(w))
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows.len())
            .map(|r| self.project_row(r, |c| x[c]))
            .collect()
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, w) in row {
                out[c] += w * y[r];
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|(_, w)| w).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        self.apply_transpose(&vec![1.0; self.rows.len()])
    }

    pub fn is_identity(&self) -> bool {
        self.rows.len() == self.ncols
            && self
                .rows
                .iter()
                .enumerate()
                .all(|(r, row)| row.len() == 1 && row[0].0 == r && (row[0].1 - 1.0).abs() < 1e-14)
    }
}

/// Mortar cells in the interface's intrinsic coordinates.
#[derive(Clone, Debug)]
pub enum MortarCells {
    /// Intervals `[s0, s1]` along the line `origin + s * tangent`.
    Segments {
        origin: Vec3,
        tangent: Vec3,
        intervals: Vec<(f64, f64)>,
    },
    /// Point cells of unit measure.
    Points(Vec<Vec3>),
}

impl MortarCells {
    pub fn len(&self) -> usize {
        match self {
            MortarCells::Segments { intervals, .. } => intervals.len(),
            MortarCells::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn measures(&self) -> Vec<f64> {
        match self {
            MortarCells::Segments { intervals, .. } => {
                intervals.iter().map(|(a, b)| b - a).collect()
            }
            MortarCells::Points(p) => vec![1.0; p.len()],
        }
    }

    pub fn centers(&self) -> Vec<Vec3> {
        match self {
            MortarCells::Segments {
                origin,
                tangent,
                intervals,
            } => intervals
                .iter()
                .map(|(a, b)| origin + tangent * (0.5 * (a + b)))
                .collect(),
            MortarCells::Points(p) => p.clone(),
        }
    }

    /// Measure of the intersection between mortar cell `p` and an entity
    /// given by its vertices (a segment or a point).
    fn overlap(&self, p: usize, vertices: &[Vec3]) -> f64 {
        match self {
            MortarCells::Segments {
                origin,
                tangent,
                intervals,
            } => {
                let (lo, hi) = intervals[p];
                let mut smin = f64::INFINITY;
                let mut smax = f64::NEG_INFINITY;
                for v in vertices {
                    let d = v - origin;
                    let s = d.dot(tangent);
                    if (d - tangent * s).norm() > ON_MORTAR_TOL {
                        return 0.0;
                    }
                    smin = smin.min(s);
                    smax = smax.max(s);
                }
                (hi.min(smax) - lo.max(smin)).max(0.0)
            }
            MortarCells::Points(points) => {
                let hit = vertices.len() == 1
                    && (vertices[0] - points[p]).norm() <= ON_MORTAR_TOL;
                if hit {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Discrete maps between a mortar and its sides. Rows are mortar cells.
///
/// `*_avg` maps carry `overlap / |mortar cell|` (rows sum to one) and are
/// used for intensive quantities going onto the mortar; their transposes
/// distribute extensive mortar quantities back to the subdomains. `*_sum`
/// maps carry `overlap / |face or cell|` (columns sum to one) and move
/// extensive subdomain quantities onto the mortar.
#[derive(Clone, Debug, Default)]
pub struct Projections {
    /// Columns are faces of the higher-dimensional grid.
    pub high_avg: SparseMap,
    pub high_sum: SparseMap,
    /// Columns are cells of the lower-dimensional grid.
    pub low_avg: SparseMap,
    pub low_sum: SparseMap,
}

#[derive(Clone, Debug)]
pub struct MortarInterface {
    pub id: usize,
    pub dim: usize,
    /// `aperture_low^(b - 1)` with `b` the mortar codimension.
    pub codim_factor: f64,
    pub higher: usize,
    pub lower: usize,
    pub normal_permeability: f64,
    pub cells: MortarCells,
    pub measures: Vec<f64>,
    /// Boundary faces of the higher grid that face this mortar.
    pub high_faces: Vec<usize>,
    /// Vertical component of the higher side's outward normal, per mortar cell.
    pub vertical_cosine: Vec<f64>,
    pub projections: Option<Projections>,
}

impl MortarInterface {
    pub fn new(
        id: usize,
        higher: usize,
        lower: usize,
        normal_permeability: f64,
        cells: MortarCells,
        high_faces: Vec<usize>,
    ) -> Self {
        let dim = match &cells {
            MortarCells::Segments { .. } => 1,
            MortarCells::Points(_) => 0,
        };
        let measures = cells.measures();
        let n = cells.len();
        MortarInterface {
            id,
            dim,
            codim_factor: 1.0,
            higher,
            lower,
            normal_permeability,
            cells,
            measures,
            high_faces,
            vertical_cosine: vec![0.0; n],
            projections: None,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.measures.len()
    }

    pub fn projections(&self) -> Result<&Projections> {
        self.projections
            .as_ref()
            .ok_or_else(|| Error::Topology(format!("mortar {} has no projections", self.id)))
    }
}

/// Populates the four projection maps of `mortar` and the per-cell vertical
/// cosine of the higher side's outward normal.
pub fn build_projections(
    mut mortar: MortarInterface,
    high_grid: &SubdomainGrid,
    low_grid: &SubdomainGrid,
    vertical_axis: usize,
) -> Result<MortarInterface> {
    let np = mortar.num_cells();
    let mut high_avg = vec![Vec::new(); np];
    let mut high_sum = vec![Vec::new(); np];
    let mut low_avg = vec![Vec::new(); np];
    let mut low_sum = vec![Vec::new(); np];
    let mut cosine = vec![0.0; np];

    for p in 0..np {
        let mp = mortar.measures[p];
        if !(mp > 0.0) {
            return Err(Error::Topology(format!(
                "mortar {} cell {p} has non-positive measure",
                mortar.id
            )));
        }
        let tol = OVERLAP_TOL * mp;

        let mut covered = 0.0;
        for &f in &mortar.high_faces {
            let face = high_grid.faces.get(f).ok_or_else(|| {
                Error::Topology(format!("mortar {} references missing face {f}", mortar.id))
            })?;
            if face.is_interior() {
                return Err(Error::Topology(format!(
                    "mortar {} is attached to interior face {f}",
                    mortar.id
                )));
            }
            let l = mortar.cells.overlap(p, &face.vertices);
            if l > tol {
                high_avg[p].push((f, l / mp));
                high_sum[p].push((f, l / face.area));
                cosine[p] += l / mp * face.normal[vertical_axis];
                covered += l;
            }
        }
        check_cover(mortar.id, p, "higher", covered, mp)?;

        let mut covered = 0.0;
        for (k, cell) in low_grid.cells.iter().enumerate() {
            let l = mortar.cells.overlap(p, &cell.vertices);
            if l > tol {
                low_avg[p].push((k, l / mp));
                low_sum[p].push((k, l / cell.measure));
                covered += l;
            }
        }
        check_cover(mortar.id, p, "lower", covered, mp)?;
    }

    mortar.vertical_cosine = cosine;
    mortar.projections = Some(Projections {
        high_avg: SparseMap::new(high_avg, high_grid.num_faces()),
        high_sum: SparseMap::new(high_sum, high_grid.num_faces()),
        low_avg: SparseMap::new(low_avg, low_grid.num_cells()),
        low_sum: SparseMap::new(low_sum, low_grid.num_cells()),
    });
    Ok(mortar)
}

fn check_cover(id: usize, p: usize, side: &str, covered: f64, measure: f64) -> Result<()> {
    if covered <= OVERLAP_TOL * measure {
        return Err(Error::Topology(format!(
            "mortar {id} cell {p} has zero covered measure on the {side} side"
        )));
    }
    if (covered - measure).abs() > 1e-9 * measure {
        return Err(Error::Topology(format!(
            "mortar {id} cell {p} is only partially covered on the {side} side ({covered} of {measure})"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    CodimensionGap,
    DimensionOrder,
    BothSides,
    MissingEntity,
    PartitionOfUnity,
    MissingProjections,
    CodimExtension,
    Grid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub entity: String,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.entity, self.kind, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct MixedDimDomain {
    pub ambient_dim: usize,
    pub vertical_axis: usize,
    pub subdomains: Vec<Subdomain>,
    pub mortars: Vec<MortarInterface>,
}

impl MixedDimDomain {
    pub fn new(ambient_dim: usize) -> Self {
        MixedDimDomain {
            ambient_dim,
            vertical_axis: ambient_dim.saturating_sub(1),
            subdomains: Vec::new(),
            mortars: Vec::new(),
        }
    }

    pub fn add_subdomain(&mut self, aperture: f64, grid: SubdomainGrid) -> usize {
        let id = self.subdomains.len();
        self.subdomains
            .push(Subdomain::new(id, self.ambient_dim, aperture, grid));
        id
    }

    /// Builds the projections for a mortar, derives its codimension factor
    /// and registers it with both neighbours.
    pub fn add_mortar(&mut self, mut mortar: MortarInterface) -> Result<usize> {
        let id = self.mortars.len();
        mortar.id = id;
        let (hi, lo) = (mortar.higher, mortar.lower);
        if hi >= self.subdomains.len() || lo >= self.subdomains.len() {
            return Err(Error::Topology(format!(
                "mortar {id} references unknown subdomain ({hi}, {lo})"
            )));
        }
        let b = self.ambient_dim as i32 - mortar.dim as i32;
        mortar.codim_factor = self.subdomains[lo].aperture.powi(b - 1);
        let mortar = build_projections(
            mortar,
            &self.subdomains[hi].grid,
            &self.subdomains[lo].grid,
            self.vertical_axis,
        )?;
        self.subdomains[hi].lower_mortars.push(id);
        self.subdomains[lo].higher_mortars.push(id);
        self.mortars.push(mortar);
        Ok(id)
    }

    pub fn num_cells(&self) -> usize {
        self.subdomains.iter().map(|s| s.grid.num_cells()).sum()
    }

    pub fn num_mortar_cells(&self) -> usize {
        self.mortars.iter().map(|m| m.num_cells()).sum()
    }

    /// Collects every invariant violation; never fails.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |entity: String, kind: ViolationKind, detail: String| {
            out.push(Violation {
                entity,
                kind,
                detail,
            })
        };

        for s in &self.subdomains {
            let name = format!("subdomain {}", s.id);
            if s.dim > self.ambient_dim || s.dim != s.grid.dim {
                push(
                    name.clone(),
                    ViolationKind::DimensionOrder,
                    format!("dimension {} inconsistent with ambient {}", s.dim, self.ambient_dim),
                );
            }
            let expected = s.aperture.powi(self.ambient_dim as i32 - s.dim as i32);
            if !(s.aperture > 0.0) || (s.codim_extension - expected).abs() > 1e-12 * expected {
                push(
                    name.clone(),
                    ViolationKind::CodimExtension,
                    format!("extension {} != aperture^codim {}", s.codim_extension, expected),
                );
            }
            for problem in s.grid.check() {
                push(name.clone(), ViolationKind::Grid, problem);
            }
            for m in &s.higher_mortars {
                if s.lower_mortars.contains(m) {
                    push(
                        name.clone(),
                        ViolationKind::BothSides,
                        format!("mortar {m} listed on both sides"),
                    );
                }
            }
        }

        for m in &self.mortars {
            let name = format!("mortar {}", m.id);
            let (Some(hi), Some(lo)) = (self.subdomains.get(m.higher), self.subdomains.get(m.lower))
            else {
                push(
                    name,
                    ViolationKind::MissingEntity,
                    format!("unknown subdomain ({}, {})", m.higher, m.lower),
                );
                continue;
            };
            if m.higher == m.lower {
                push(name.clone(), ViolationKind::BothSides, "same subdomain on both sides".into());
            }
            if hi.dim > lo.dim + 1 {
                push(
                    name.clone(),
                    ViolationKind::CodimensionGap,
                    format!("couples dimensions {} and {}", hi.dim, lo.dim),
                );
            } else if hi.dim != lo.dim + 1 || m.dim != lo.dim {
                push(
                    name.clone(),
                    ViolationKind::DimensionOrder,
                    format!("dims higher {} lower {} mortar {}", hi.dim, lo.dim, m.dim),
                );
            }
            match &m.projections {
                None => push(name.clone(), ViolationKind::MissingProjections, String::new()),
                Some(p) => {
                    for (label, map) in [("higher avg", &p.high_avg), ("lower avg", &p.low_avg)] {
                        for (r, s) in map.row_sums().iter().enumerate() {
                            if (s - 1.0).abs() > 1e-12 {
                                push(
                                    name.clone(),
                                    ViolationKind::PartitionOfUnity,
                                    format!("{label} row {r} sums to {s}"),
                                );
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Cell, Face};

    /// A 1D lower grid along y = 0 built from node abscissae.
    fn line_grid(nodes: &[f64]) -> SubdomainGrid {
        let cells = nodes
            .windows(2)
            .map(|w| Cell {
                center: Vec3::new(0.5 * (w[0] + w[1]), 0.0, 0.0),
                measure: w[1] - w[0],
                vertices: vec![Vec3::new(w[0], 0.0, 0.0), Vec3::new(w[1], 0.0, 0.0)],
            })
            .collect();
        SubdomainGrid::new(1, cells, Vec::new(), 1, 1.0, 1.0)
    }

    /// A 2D "higher" grid that only exposes boundary faces on y = 0.
    fn face_grid(nodes: &[f64]) -> SubdomainGrid {
        let mut cells = Vec::new();
        let mut faces = Vec::new();
        for (i, w) in nodes.windows(2).enumerate() {
            let h = w[1] - w[0];
            cells.push(Cell {
                center: Vec3::new(0.5 * (w[0] + w[1]), 0.5 * h, 0.0),
                measure: h * h,
                vertices: Vec::new(),
            });
            faces.push(Face {
                centroid: Vec3::new(0.5 * (w[0] + w[1]), 0.0, 0.0),
                area: h,
                normal: Vec3::new(0.0, -1.0, 0.0),
                left: i,
                right: None,
                vertices: vec![Vec3::new(w[0], 0.0, 0.0), Vec3::new(w[1], 0.0, 0.0)],
            });
        }
        SubdomainGrid::new(2, cells, faces, 1, 1.0, 1.0)
    }

    fn mortar(intervals: &[f64], nfaces: usize) -> MortarInterface {
        MortarInterface::new(
            0,
            0,
            1,
            1.0,
            MortarCells::Segments {
                origin: Vec3::zeros(),
                tangent: Vec3::new(1.0, 0.0, 0.0),
                intervals: intervals.windows(2).map(|w| (w[0], w[1])).collect(),
            },
            (0..nfaces).collect(),
        )
    }

    /// Direct segment intersection, independent of the mortar code path.
    fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
        (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
    }

    #[test]
    fn conforming_interface_gives_identity_maps() {
        let nodes = [0.0, 0.25, 0.5, 1.0];
        let m = build_projections(mortar(&nodes, 3), &face_grid(&nodes), &line_grid(&nodes), 1)
            .unwrap();
        let p = m.projections.unwrap();
        assert!(p.high_avg.is_identity());
        assert!(p.high_sum.is_identity());
        assert!(p.low_avg.is_identity());
        assert!(p.low_sum.is_identity());
        assert!(m.vertical_cosine.iter().all(|&c| c == -1.0));
    }

    #[test]
    fn one_mortar_cell_over_two_half_faces() {
        let faces = [0.0, 0.5, 1.0];
        let m = build_projections(mortar(&[0.0, 1.0], 2), &face_grid(&faces), &line_grid(&faces), 1)
            .unwrap();
        let p = m.projections.unwrap();
        let expected = [
            overlap((0.0, 1.0), (0.0, 0.5)) / 1.0,
            overlap((0.0, 1.0), (0.5, 1.0)) / 1.0,
        ];
        assert_eq!(expected, [0.5, 0.5]);
        assert!((p.high_avg.get(0, 0) - expected[0]).abs() < 1e-15);
        assert!((p.high_avg.get(0, 1) - expected[1]).abs() < 1e-15);
    }

    #[test]
    fn two_mortar_cells_against_one_face() {
        let m = build_projections(
            mortar(&[0.0, 0.4, 1.0], 1),
            &face_grid(&[0.0, 1.0]),
            &line_grid(&[0.0, 1.0]),
            1,
        )
        .unwrap();
        let p = m.projections.unwrap();
        let column: Vec<f64> = (0..2).map(|r| p.high_sum.get(r, 0)).collect();
        let oracle = [
            overlap((0.0, 0.4), (0.0, 1.0)) / 1.0,
            overlap((0.4, 1.0), (0.0, 1.0)) / 1.0,
        ];
        assert!((column[0] - oracle[0]).abs() < 1e-15 && (column[1] - oracle[1]).abs() < 1e-15);
        assert!((p.high_sum.col_sums()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uncovered_mortar_cell_is_a_topology_error() {
        let err = build_projections(
            mortar(&[2.0, 3.0], 1),
            &face_grid(&[0.0, 1.0]),
            &line_grid(&[0.0, 1.0]),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Topology(_)));
    }

    #[test]
    fn partially_covered_mortar_cell_is_rejected() {
        let err = build_projections(
            mortar(&[0.0, 1.5], 1),
            &face_grid(&[0.0, 1.0]),
            &line_grid(&[0.0, 1.5]),
            1,
        )
        .unwrap_err();
        assert!(err.to_string().contains("partially"));
    }

    #[test]
    fn avg_then_sum_transpose_conserves_integral() {
        let faces = [0.0, 0.3, 0.45, 0.8, 1.0];
        let mortar_nodes = [0.0, 0.2, 0.55, 0.7, 1.0];
        let high = face_grid(&faces);
        let m = build_projections(mortar(&mortar_nodes, 4), &high, &line_grid(&faces), 1).unwrap();
        let p = m.projections.unwrap();
        let field = [2.0, -1.0, 0.5, 3.0];
        let on_mortar = p.high_avg.apply(&field);
        let back = p.high_sum.apply_transpose(&on_mortar);
        let integral = |x: &[f64]| -> f64 {
            x.iter().zip(&high.faces).map(|(v, f)| v * f.area).sum()
        };
        let mortar_integral: f64 = on_mortar.iter().zip(&m.measures).map(|(v, l)| v * l).sum();
        assert!((integral(&field) - mortar_integral).abs() < 1e-12);
        assert!((integral(&back) - mortar_integral).abs() < 1e-12);
    }

    fn simple_domain() -> MixedDimDomain {
        let mut d = MixedDimDomain::new(2);
        d.add_subdomain(1.0, face_grid(&[0.0, 0.5, 1.0]));
        d.add_subdomain(0.01, line_grid(&[0.0, 1.0]));
        d.add_mortar(mortar(&[0.0, 1.0], 2)).unwrap();
        d
    }

    #[test]
    fn single_subdomain_validates() {
        let mut d = MixedDimDomain::new(2);
        d.add_subdomain(1.0, SubdomainGrid::cartesian(&[2, 2], &[1.0, 1.0], 1).unwrap());
        assert!(d.validate().is_empty());
    }

    #[test]
    fn fracture_domain_validates_and_registers_adjacency() {
        let d = simple_domain();
        assert!(d.validate().is_empty(), "{:?}", d.validate());
        assert_eq!(d.subdomains[0].lower_mortars, vec![0]);
        assert_eq!(d.subdomains[1].higher_mortars, vec![0]);
        assert_eq!(d.mortars[0].codim_factor, 1.0);
    }

    #[test]
    fn codimension_gap_is_reported() {
        let mut d = MixedDimDomain::new(2);
        d.add_subdomain(1.0, face_grid(&[0.0, 1.0]));
        d.add_subdomain(0.01, SubdomainGrid::point(Vec3::new(0.5, 0.0, 0.0), 1, 0.25));
        let mut m = mortar(&[0.0, 1.0], 1);
        m.higher = 0;
        m.lower = 1;
        m.dim = 0;
        m.projections = Some(Projections::default());
        d.mortars.push(m);
        let v = d.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].kind, ViolationKind::CodimensionGap);
    }

    #[test]
    fn broken_partition_of_unity_is_reported() {
        let mut d = simple_domain();
        let p = d.mortars[0].projections.as_mut().unwrap();
        p.high_avg.row_mut(0)[0].1 = 0.4;
        let v = d.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::PartitionOfUnity);
    }
}
