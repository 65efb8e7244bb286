mod common;

use mdflow_core::case::Case;
use mdflow_core::driver::{run_case, RunOptions};
use mdflow_core::fluid::{FluidPair, Phase};
use mdflow_core::flux::hu::BlendParams;
use mdflow_core::flux::{CellState, FaceGeometry, Scheme};
use mdflow_core::mesh::PolyMesh;
use mdflow_core::newton::{newton_solve, NewtonParams};
use mdflow_core::report::{read_csv, write_csv};
use mdflow_core::simulate::{RunStatus, StepRecord};
use mdflow_core::state::{BlockOrder, DofMap, State};
use mdflow_core::vtk;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn step(case: &Case, scheme: Scheme, start: &State, dt: f64, order: BlockOrder) -> State {
    let model = case.model(scheme).unwrap();
    let dofs = DofMap::new(&case.domain, order);
    let params = NewtonParams { tol: 1e-12, max_iter: 30 };
    let out = newton_solve(&model, &dofs, start, start, dt, &params);
    assert!(out.converged, "{:?}", out.failure);
    out.state
}

fn scheme_strategy() -> impl Strategy<Value = Scheme> {
    prop_oneof![Just(Scheme::Ppu), Just(Scheme::Hu)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_step_conserves_both_phases(seed in any::<u64>(), scheme in scheme_strategy(), dt in 0.01f64..0.2) {
        let case = common::toy();
        let mut start = common::random_state(&case, &mut StdRng::seed_from_u64(seed));
        for z in start.zeta.iter_mut() {
            z[0].fill(0.0);
            z[1].fill(0.0);
        }
        let model = case.model(scheme).unwrap();
        let before = model.masses(&start);
        let after = model.masses(&step(&case, scheme, &start, dt, BlockOrder::Natural));
        for l in 0..2 {
            prop_assert!((after[l] - before[l]).abs() <= 1e-11 * before[l], "phase {l}: {} -> {}", before[l], after[l]);
        }
    }

    #[test]
    fn unknown_ordering_does_not_change_the_step(seed in any::<u64>(), scheme in scheme_strategy()) {
        let case = common::toy();
        let start = common::random_state(&case, &mut StdRng::seed_from_u64(seed));
        let a = step(&case, scheme, &start, 0.05, BlockOrder::Natural);
        let b = step(&case, scheme, &start, 0.05, BlockOrder::Reversed);
        for (x, y) in a.p.iter().flatten().zip(b.p.iter().flatten()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in a.s0.iter().flatten().zip(b.s0.iter().flatten()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn face_fluxes_are_antisymmetric(
        scheme in scheme_strategy(),
        pm in -2.0f64..2.0, pn in -2.0f64..2.0,
        sm in 0.0f64..=1.0, sn in 0.0f64..=1.0,
        t in 0.01f64..10.0, dz in -1.0f64..1.0,
    ) {
        let fluid = FluidPair::new(
            Phase::new(1.0, 1.0).with_compressibility(1e-2, 0.0),
            Phase::new(0.4, 3.0).with_compressibility(1e-2, 0.0),
        );
        let m = CellState::<f64>::new(&fluid, pm, sm);
        let n = CellState::<f64>::new(&fluid, pn, sn);
        let blend = BlendParams::default();
        let fwd = scheme.face_flux(&blend, &FaceGeometry { transmissibility: t, dz, gravity: 1.0 }, &m, &n);
        let back = scheme.face_flux(&blend, &FaceGeometry { transmissibility: t, dz: -dz, gravity: 1.0 }, &n, &m);
        let tol = 1e-12 * (1.0 + fwd.total.abs() + fwd.phase0.abs());
        prop_assert!((fwd.total + back.total).abs() <= tol);
        prop_assert!((fwd.phase0 + back.phase0).abs() <= tol);
    }

    #[test]
    fn csv_round_trip(rows in proptest::collection::vec((0.0f64..1e3, 1e-12f64..1.0, 0u64..100, any::<f64>()), 0..20)) {
        let steps: Vec<StepRecord> = rows
            .iter()
            .enumerate()
            .map(|(k, &(t, dt, it, m))| StepRecord {
                t,
                dt,
                newton_iters: it,
                cum_newton_iters: it * k as u64,
                cuts: k as u64 % 3,
                cum_cuts: k as u64,
                flips_2d: it,
                flips_1d: 0,
                flips_mortar: 1,
                cum_flips_2d: it,
                cum_flips_1d: 0,
                cum_flips_mortar: k as u64,
                cum_wasted_flips_2d: 2,
                cum_wasted_flips_1d: 0,
                cum_wasted_flips_mortar: 0,
                mass_phase0: if m.is_finite() { m } else { 0.0 },
                mass_phase1: t * 0.1,
                clip_events: 0,
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        write_csv(&path, &steps).unwrap();
        prop_assert_eq!(read_csv(&path).unwrap(), steps);
    }
}

fn column() -> (Case, State) {
    let start = common::TOY.find("[[fractures]]").unwrap();
    let end = common::TOY.find("[initial]").unwrap();
    let text = format!("{}{}", &common::TOY[..start], &common::TOY[end..]);
    let case = Case::from_str(&text, "column", None).unwrap();
    let (heavy, light) = (case.config.fluid.heavy.density, case.config.fluid.light.density);
    let interface = 0.25;
    let mut state = case.initial.clone();
    for (i, sub) in case.domain.subdomains.iter().enumerate() {
        for (c, cell) in sub.grid.cells.iter().enumerate() {
            let y = cell.center[1];
            state.s0[i][c] = if y < interface { 1.0 } else { 0.0 };
            state.p[i][c] = light * (1.0 - y.max(interface)) + heavy * (interface - y).max(0.0);
        }
    }
    (case, state)
}

/// Under PPU a sharp stable interface in hydrostatic balance stays put.
#[test]
fn stable_column_is_steady_under_ppu() {
    let (case, start) = column();
    let mut state = start.clone();
    for _ in 0..5 {
        state = step(&case, Scheme::Ppu, &state, 0.1, BlockOrder::Natural);
    }
    for (a, b) in state.s0.iter().flatten().zip(start.s0.iter().flatten()) {
        assert!((a - b).abs() < 1e-8, "saturation moved from {b} to {a}");
    }
}

/// The blended total flux of HU diffuses a sharp stable interface over a
/// few cells, but the column settles with heavy below light.
#[test]
fn stable_column_stays_stratified_under_hu() {
    let (case, start) = column();
    let model = case.model(Scheme::Hu).unwrap();
    let mass = model.masses(&start);
    let mut state = start.clone();
    let mut change = f64::MAX;
    for _ in 0..200 {
        let next = step(&case, Scheme::Hu, &state, 0.1, BlockOrder::Natural);
        change = next.s0[0].iter().zip(&state.s0[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        state = next;
    }
    assert!(change < 1e-4, "still moving by {change}");
    let after = model.masses(&state);
    assert!((after[0] - mass[0]).abs() < 1e-10 * mass[0]);
    let grid = &case.domain.subdomains[0].grid;
    for (c, cell) in grid.cells.iter().enumerate() {
        for (d, other) in grid.cells.iter().enumerate() {
            if other.center[1] > cell.center[1] + 1e-9 {
                assert!(state.s0[0][d] <= state.s0[0][c] + 1e-12, "heavier above at {:?}", other.center);
            }
        }
    }
}

fn mesh_text(mesh: &PolyMesh, vertex_perm: &[usize], cell_order: &[usize]) -> String {
    let mut inverse = vec![0; vertex_perm.len()];
    for (new, &old) in vertex_perm.iter().enumerate() {
        inverse[old] = new;
    }
    let mut s = format!("vertices {}\n", mesh.vertices.len());
    for &old in vertex_perm {
        let v = mesh.vertices[old];
        s += &format!("{:?} {:?}\n", v[0], v[1]);
    }
    s += &format!("cells {}\n", mesh.cells.len());
    for &c in cell_order {
        let cell = &mesh.cells[c];
        let ids: Vec<String> = cell.iter().map(|v| inverse[*v].to_string()).collect();
        s += &format!("{} {}\n", cell.len(), ids.join(" "));
    }
    s
}

/// Renumbering the mesh permutes the solution and nothing else.
#[test]
fn cell_numbering_does_not_change_the_solution() {
    let mesh = PolyMesh::quad(6, 6, 1.0, 1.0);
    let nv = mesh.vertices.len();
    let nc = mesh.cells.len();
    let vertex_perm: Vec<usize> = (0..nv).map(|k| (k * 5 + 3) % nv).collect();
    let cell_order: Vec<usize> = (0..nc).rev().collect();
    let dir = tempfile::tempdir().unwrap();
    let identity: Vec<usize> = (0..nv).collect();
    std::fs::write(dir.path().join("a.mesh"), mesh_text(&mesh, &identity, &(0..nc).collect::<Vec<_>>())).unwrap();
    std::fs::write(dir.path().join("b.mesh"), mesh_text(&mesh, &vertex_perm, &cell_order)).unwrap();
    assert_eq!(nv, vertex_perm.iter().collect::<std::collections::BTreeSet<_>>().len());

    let load = |file: &str| {
        let text = common::TOY
            .replace("kind = \"quad\"\nnx = 4\nny = 4", &format!("kind = \"file\"\npath = \"{file}\""))
            .replace("cells = 3\nmortar_cells = 5\n", "");
        Case::from_str(&text, file, Some(dir.path())).unwrap()
    };
    let (a, b) = (load("a.mesh"), load("b.mesh"));
    for scheme in [Scheme::Ppu, Scheme::Hu] {
        let options = RunOptions { t_end: Some(0.3), ..Default::default() };
        let ra = run_case(&a, scheme, &options).unwrap();
        let rb = run_case(&b, scheme, &options).unwrap();
        assert_eq!(ra.report.cum_newton_iters, rb.report.cum_newton_iters);
        for (ia, sa) in a.domain.subdomains.iter().enumerate() {
            let sb = &b.domain.subdomains[ia];
            assert_eq!(sa.grid.num_cells(), sb.grid.num_cells());
            for (ca, cell) in sa.grid.cells.iter().enumerate() {
                let cb = sb
                    .grid
                    .cells
                    .iter()
                    .position(|o| (o.center - cell.center).norm() < 1e-12)
                    .expect("matching cell");
                assert!((ra.state.p[ia][ca] - rb.state.p[ia][cb]).abs() < 1e-9);
                assert!((ra.state.s0[ia][ca] - rb.state.s0[ia][cb]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn every_bundled_case_writes_valid_vtk() {
    for name in mdflow_core::case::builtin_names() {
        let case = Case::load(name).unwrap();
        let text = vtk::render(&case.domain, &case.initial, name).unwrap();
        let summary = vtk::check(&text, name).unwrap();
        assert_eq!(summary.cells, case.domain.num_cells(), "{name}");
    }
}

#[test]
fn short_run_writes_all_outputs() {
    let case = Case::load("case1a").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let options = RunOptions { t_end: Some(0.8), snapshots: 2, ..Default::default() };
    let (out, files) = mdflow_core::driver::run_to_dir(&case, Scheme::Hu, &options, dir.path()).unwrap();
    assert_eq!(out.report.status, RunStatus::Completed);
    assert_eq!(out.report.steps.len(), 2);
    assert_eq!(read_csv(&dir.path().join("report.csv")).unwrap(), out.report.steps);
    let summary = mdflow_core::report::Summary::read(&dir.path().join("summary.json")).unwrap();
    assert_eq!(summary.steps, 2);
    assert_eq!(summary.status, RunStatus::Completed);
    let vtks = files.iter().filter(|p| p.extension().is_some_and(|e| e == "vtk")).count();
    assert_eq!(vtks, 3);
}
