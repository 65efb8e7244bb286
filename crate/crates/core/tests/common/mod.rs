#![allow(dead_code)]

use mdflow_core::assembly::Model;
use mdflow_core::case::Case;
use mdflow_core::state::{BlockOrder, DofMap, State};
use rand::Rng;

/// 4x4 matrix cut by a horizontal fracture with non-matching fracture and
/// mortar cells.
pub const TOY: &str = r#"
name = "toy"

[mesh]
kind = "quad"
nx = 4
ny = 4

[matrix]
permeability = 1.0
porosity = 0.25

[fluid]
ref_pressure = 0.0
heavy = { density = 1.0, viscosity = 1.0, compressibility = 1e-2 }
light = { density = 0.5, viscosity = 2.0, compressibility = 1e-2 }

[[fractures]]
start = [0.0, 0.5]
end = [1.0, 0.5]
permeability = 5.0
normal_permeability = 0.1
aperture = 0.01
porosity = 0.25
cells = 3
mortar_cells = 5

[initial]
interface_elevation = 0.5
top_pressure = 0.0

[time]
t_end = 0.1
dt_max = 0.1
"#;

pub fn toy() -> Case {
    Case::from_str(TOY, "toy", None).unwrap()
}

/// Saturations in `[0.05, 0.95]`, pressures and mortar fluxes of order one.
pub fn random_state(case: &Case, rng: &mut impl Rng) -> State {
    let mut s = State::zeros(&case.domain);
    for v in s.p.iter_mut().flatten() {
        *v = rng.gen_range(-1.0..1.0);
    }
    for v in s.s0.iter_mut().flatten() {
        *v = rng.gen_range(0.05..0.95);
    }
    for z in s.zeta.iter_mut() {
        for v in z.iter_mut().flatten() {
            *v = rng.gen_range(-0.5..0.5);
        }
    }
    s
}

/// Largest relative deviation between the automatic-differentiation Jacobian
/// and central differences, and the number of columns skipped because an
/// upwind decision changed inside the stencil.
pub fn jacobian_deviation(model: &Model, x: &[f64], prev: &State, dt: f64) -> (f64, usize) {
    let dofs = DofMap::new(&model.domain, BlockOrder::Natural);
    let n = dofs.len();
    let (_, triplets, upwinds) = model.linearize(&dofs, x, prev, dt).unwrap();
    let mut jac = vec![0.0; n * n];
    for (r, c, v) in triplets {
        jac[r * n + c] += v;
    }
    let scale = jac.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for col in 0..n {
        let h = 1e-6 * x[col].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[col] += h;
        xm[col] -= h;
        let ep = model.evaluate::<f64>(&dofs, &xp, prev, dt).unwrap();
        let em = model.evaluate::<f64>(&dofs, &xm, prev, dt).unwrap();
        if ep.upwinds != upwinds || em.upwinds != upwinds {
            skipped += 1;
            continue;
        }
        for row in 0..n {
            let fd = (ep.residual[row] - em.residual[row]) / (2.0 * h);
            let ad = jac[row * n + col];
            worst = worst.max((fd - ad).abs() / scale.max(ad.abs()));
        }
    }
    (worst, skipped)
}

/// Area-weighted mean matrix saturation in horizontal bands of height
/// `1 / bands` over the cells whose centre lies within `half_width` of `x0`.
pub fn vertical_profile(case: &Case, state: &State, x0: f64, half_width: f64, bands: usize) -> Vec<f64> {
    let grid = &case.domain.subdomains[0].grid;
    let (lo, hi) = case.mesh.bounds();
    let mut acc = vec![(0.0, 0.0); bands];
    for (c, cell) in grid.cells.iter().enumerate() {
        if (cell.center[0] - x0).abs() < half_width {
            let y = (cell.center[1] - lo[1]) / (hi[1] - lo[1]);
            let j = ((y * bands as f64) as usize).min(bands - 1);
            acc[j].0 += state.s0[0][c] * cell.measure;
            acc[j].1 += cell.measure;
        }
    }
    acc.iter().map(|(s, w)| if *w > 0.0 { s / w } else { f64::NAN }).collect()
}

/// Mean matrix saturation below and above `y`.
pub fn halves(case: &Case, state: &State, y: f64) -> (f64, f64) {
    let grid = &case.domain.subdomains[0].grid;
    let (mut lo, mut hi) = ((0.0, 0.0), (0.0, 0.0));
    for (c, cell) in grid.cells.iter().enumerate() {
        let acc = if cell.center[1] < y { &mut lo } else { &mut hi };
        acc.0 += state.s0[0][c] * cell.measure;
        acc.1 += cell.measure;
    }
    (lo.0 / lo.1, hi.0 / hi.1)
}
