//! Case descriptions in TOML and the bundled case library.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::Model;
use crate::error::{Error, Result};
use crate::fluid::{FluidPair, Phase};
use crate::flux::Scheme;
use crate::mesh::{build_domain, FractureSpec, IntersectionSpec, PolyMesh};
use crate::newton::NewtonParams;
use crate::simulate::TimeControl;
use crate::state::State;
use crate::topology::MixedDimDomain;

const BUILTINS: &[(&str, &str)] = &[
    ("case1a", include_str!("../cases/case1a.toml")),
    ("case1b", include_str!("../cases/case1b.toml")),
    ("case1c", include_str!("../cases/case1c.toml")),
    ("case1c-hc", include_str!("../cases/case1c-hc.toml")),
    ("case2-standin", include_str!("../cases/case2-standin.toml")),
    ("smooth", include_str!("../cases/smooth.toml")),
];

/// Names of the bundled cases.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub name: String,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    pub mesh: MeshConfig,
    pub matrix: MatrixConfig,
    pub fluid: FluidConfig,
    #[serde(default)]
    pub fractures: Vec<FractureSpec>,
    #[serde(default)]
    pub intersections: IntersectionSpec,
    pub initial: InitialConfig,
    pub time: TimeConfig,
}

fn default_gravity() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Quad,
    Triangles,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub kind: MeshKind,
    #[serde(default)]
    pub nx: usize,
    #[serde(default)]
    pub ny: usize,
    #[serde(default = "one")]
    pub lx: f64,
    #[serde(default = "one")]
    pub ly: f64,
    /// Mesh file for `kind = "file"`, relative to the case file.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub permeability: f64,
    pub porosity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub density: f64,
    pub viscosity: f64,
    #[serde(default)]
    pub compressibility: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidConfig {
    pub heavy: PhaseConfig,
    pub light: PhaseConfig,
    #[serde(default)]
    pub ref_pressure: f64,
}

impl FluidConfig {
    pub fn pair(&self) -> FluidPair {
        let phase = |c: &PhaseConfig| {
            Phase::new(c.density, c.viscosity).with_compressibility(c.compressibility, self.ref_pressure)
        };
        FluidPair::new(phase(&self.heavy), phase(&self.light))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Cells centred above this elevation start full of the heavy phase.
    pub interface_elevation: f64,
    #[serde(default)]
    pub top_pressure: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    pub dt_max: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub scheme: Scheme,
}

fn default_tol() -> f64 {
    1e-6
}

fn default_max_iter() -> usize {
    15
}

impl CaseConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let cfg: CaseConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                source_name: source_name.to_string(),
                line,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let t = &self.time;
        if !(t.t_end > 0.0) || !(t.dt_max > 0.0) || !(t.tol > 0.0) || t.max_iter == 0 {
            return Err(Error::Parameter(format!("invalid time settings: {t:?}")));
        }
        let m = &self.matrix;
        if !(m.permeability > 0.0) || !(m.porosity > 0.0 && m.porosity <= 1.0) {
            return Err(Error::Parameter(format!("invalid matrix properties: {m:?}")));
        }
        if !self.gravity.is_finite() {
            return Err(Error::Parameter("gravity must be finite".into()));
        }
        if self.mesh.kind != MeshKind::File && (self.mesh.nx == 0 || self.mesh.ny == 0) {
            return Err(Error::Parameter("structured meshes need nx, ny > 0".into()));
        }
        self.fluid.pair().validate()
    }

    pub fn time_control(&self) -> TimeControl {
        let mut c = TimeControl::new(self.time.t_end, self.time.dt_max);
        c.newton = NewtonParams {
            tol: self.time.tol,
            max_iter: self.time.max_iter,
        };
        c
    }

    /// Dimensionless buoyancy number `phi (drho)^2 g L K / mu^2` of the
    /// matrix, with `L` the vertical extent and `mu` the heavy viscosity.
    pub fn buoyancy_number(&self, height: f64) -> f64 {
        let drho = self.fluid.heavy.density - self.fluid.light.density;
        let mu = self.fluid.heavy.viscosity;
        self.matrix.porosity * drho * drho * self.gravity.abs() * height * self.matrix.permeability / (mu * mu)
    }
}

/// A loaded case: its configuration, geometry and initial state.
#[derive(Clone, Debug)]
pub struct Case {
    pub config: CaseConfig,
    pub mesh: PolyMesh,
    pub domain: MixedDimDomain,
    pub initial: State,
}

impl Case {
    /// Loads a bundled case by name, or else a TOML file at that path.
    pub fn load(name_or_path: &str) -> Result<Case> {
        if let Some(src) = builtin_source(name_or_path) {
            return Case::from_str(src, name_or_path, None);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(Error::Parameter(format!(
                "'{name_or_path}' is neither a bundled case ({}) nor a file",
                builtin_names().join(", ")
            )));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Case::from_str(&text, &path.display().to_string(), path.parent())
    }

    pub fn from_str(text: &str, source_name: &str, base_dir: Option<&Path>) -> Result<Case> {
        let config = CaseConfig::parse(text, source_name)?;
        Case::from_config(config, base_dir)
    }

    pub fn from_config(config: CaseConfig, base_dir: Option<&Path>) -> Result<Case> {
        let m = &config.mesh;
        let mesh = match m.kind {
            MeshKind::Quad => PolyMesh::quad(m.nx, m.ny, m.lx, m.ly),
            MeshKind::Triangles => PolyMesh::triangulated(m.nx, m.ny, m.lx, m.ly),
            MeshKind::File => {
                let rel = m
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::Parameter("mesh kind 'file' needs a path".into()))?;
                let path = base_dir.map(|d| d.join(rel)).unwrap_or_else(|| rel.clone());
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                PolyMesh::parse(&text, &path.display().to_string())?
            }
        };
        let domain = build_domain(
            &mesh,
            config.matrix.permeability,
            config.matrix.porosity,
            &config.fractures,
            &config.intersections,
        )?;
        let (_, hi) = mesh.bounds();
        let initial = initial_state(&domain, &config, hi[1]);
        Ok(Case {
            config,
            mesh,
            domain,
            initial,
        })
    }

    pub fn model(&self, scheme: Scheme) -> Result<Model> {
        Model::new(
            self.domain.clone(),
            self.config.fluid.pair(),
            self.config.gravity,
            scheme,
        )
    }

    pub fn height(&self) -> f64 {
        let (lo, hi) = self.mesh.bounds();
        hi[1] - lo[1]
    }

    pub fn buoyancy_number(&self) -> f64 {
        self.config.buoyancy_number(self.height())
    }
}

/// Buoyancy number of a loaded case, see [`CaseConfig::buoyancy_number`].
pub fn compute_ea(case: &Case) -> f64 {
    case.buoyancy_number()
}

/// Heavy phase above the interface elevation, light below, pressure in
/// hydrostatic balance with the reference densities and zero mortar fluxes.
pub fn initial_state(domain: &MixedDimDomain, config: &CaseConfig, top: f64) -> State {
    let y_i = config.initial.interface_elevation;
    let g = config.gravity;
    let rho_h = config.fluid.heavy.density;
    let rho_l = config.fluid.light.density;
    let p_top = config.initial.top_pressure;
    let pressure = |z: f64| {
        let z = z.min(top);
        if z >= y_i {
            p_top + rho_h * g * (top - z)
        } else {
            p_top + rho_h * g * (top - y_i.min(top)) + rho_l * g * (y_i.min(top) - z)
        }
    };
    let mut state = State::zeros(domain);
    for (i, sub) in domain.subdomains.iter().enumerate() {
        for (c, &z) in sub.grid.elevation.iter().enumerate() {
            state.p[i][c] = pressure(z);
            state.s0[i][c] = if z > y_i { 1.0 } else { 0.0 };
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        for name in builtin_names() {
            let case = Case::load(name).unwrap();
            assert_eq!(case.config.name, name);
            assert!(case.domain.validate().is_empty(), "{name}");
            case.initial.check_shape(&case.domain).unwrap();
        }
    }

    #[test]
    fn buoyancy_numbers() {
        let a = Case::load("case1a").unwrap().buoyancy_number();
        assert!((a - 0.0625).abs() < 1e-12);
        let b = Case::load("case2-standin").unwrap().buoyancy_number();
        assert!((b - 6.25).abs() < 1e-9);
        let mut cfg = Case::load("case1a").unwrap().config;
        cfg.gravity = 0.0;
        assert_eq!(cfg.buoyancy_number(1.0), 0.0);
    }

    #[test]
    fn parse_error_has_line() {
        let src = builtin_source("case1a").unwrap().replace("nx = 20", "nx = \"twenty\"");
        match CaseConfig::parse(&src, "bad.toml") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_case_is_reported() {
        assert!(matches!(Case::load("no-such-case"), Err(Error::Parameter(_))));
    }

    #[test]
    fn initial_state_is_layered() {
        let case = Case::load("case1a").unwrap();
        let grid = &case.domain.subdomains[0].grid;
        for (c, &z) in grid.elevation.iter().enumerate() {
            let s = case.initial.s0[0][c];
            assert_eq!(s, if z > 0.5 { 1.0 } else { 0.0 });
            let expect = if z >= 0.5 { 1.0 - z } else { 0.5 + 0.5 * (0.5 - z) };
            assert!((case.initial.p[0][c] - expect).abs() < 1e-12);
        }
    }
}
