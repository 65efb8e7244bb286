//! Primary unknowns and their position in the global Newton vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::MixedDimDomain;

/// Saturation overshoot left in place by [`State::clip_saturation`]. Removing
/// it would change the phase masses of a converged step.
pub const SATURATION_SLACK: f64 = 1e-6;

/// Pressure and heavy-phase saturation per subdomain cell, and both phase
/// mortar fluxes per mortar cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub p: Vec<Vec<f64>>,
    pub s0: Vec<Vec<f64>>,
    pub zeta: Vec<[Vec<f64>; 2]>,
}

impl State {
    pub fn zeros(domain: &MixedDimDomain) -> Self {
        State {
            p: domain
                .subdomains
                .iter()
                .map(|s| vec![0.0; s.grid.num_cells()])
                .collect(),
            s0: domain
                .subdomains
                .iter()
                .map(|s| vec![0.0; s.grid.num_cells()])
                .collect(),
            zeta: domain
                .mortars
                .iter()
                .map(|m| [vec![0.0; m.num_cells()], vec![0.0; m.num_cells()]])
                .collect(),
        }
    }

    pub fn check_shape(&self, domain: &MixedDimDomain) -> Result<()> {
        let ok = self.p.len() == domain.subdomains.len()
            && self.s0.len() == domain.subdomains.len()
            && self.zeta.len() == domain.mortars.len()
            && domain.subdomains.iter().enumerate().all(|(i, s)| {
                self.p[i].len() == s.grid.num_cells() && self.s0[i].len() == s.grid.num_cells()
            })
            && domain
                .mortars
                .iter()
                .enumerate()
                .all(|(j, m)| self.zeta[j].iter().all(|z| z.len() == m.num_cells()));
        if ok {
            Ok(())
        } else {
            Err(Error::Contract("state does not match the domain layout".into()))
        }
    }

    /// Clips every saturation outside `[-SATURATION_SLACK, 1 + SATURATION_SLACK]`
    /// back to `[0, 1]` and returns how many were moved.
    pub fn clip_saturation(&mut self) -> usize {
        let mut n = 0;
        for s in self.s0.iter_mut().flatten() {
            if (-SATURATION_SLACK..=1.0 + SATURATION_SLACK).contains(s) {
                continue;
            }
            let c = s.clamp(0.0, 1.0);
            if c != *s {
                *s = c;
                n += 1;
            }
        }
        n
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockOrder {
    /// Subdomains in order (pressure then saturation), then mortars.
    #[default]
    Natural,
    /// Mortars last-to-first, then subdomains last-to-first with the
    /// saturation block before the pressure block.
    Reversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Block {
    Pressure(usize),
    Saturation(usize),
    Zeta(usize, usize),
}

/// Offsets of every unknown block. The same numbering is used for the
/// equations: the pressure equation of a cell sits on the row of its
/// pressure, the phase-0 balance on the row of its saturation and each
/// mortar law on the row of its flux.
#[derive(Clone, Debug)]
pub struct DofMap {
    p_offset: Vec<usize>,
    s_offset: Vec<usize>,
    zeta_offset: Vec<[usize; 2]>,
    len: usize,
}

impl DofMap {
    pub fn new(domain: &MixedDimDomain, order: BlockOrder) -> Self {
        let mut blocks = Vec::new();
        for i in 0..domain.subdomains.len() {
            blocks.push(Block::Pressure(i));
            blocks.push(Block::Saturation(i));
        }
        for j in 0..domain.mortars.len() {
            blocks.push(Block::Zeta(j, 0));
            blocks.push(Block::Zeta(j, 1));
        }
        if order == BlockOrder::Reversed {
            blocks.reverse();
        }
        let mut p_offset = vec![0; domain.subdomains.len()];
        let mut s_offset = vec![0; domain.subdomains.len()];
        let mut zeta_offset = vec![[0; 2]; domain.mortars.len()];
        let mut next = 0;
        for b in blocks {
            match b {
                Block::Pressure(i) => {
                    p_offset[i] = next;
                    next += domain.subdomains[i].grid.num_cells();
                }
                Block::Saturation(i) => {
                    s_offset[i] = next;
                    next += domain.subdomains[i].grid.num_cells();
                }
                Block::Zeta(j, l) => {
                    zeta_offset[j][l] = next;
                    next += domain.mortars[j].num_cells();
                }
            }
        }
        DofMap {
            p_offset,
            s_offset,
            zeta_offset,
            len: next,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn p(&self, sub: usize, cell: usize) -> usize {
        self.p_offset[sub] + cell
    }

    pub fn s(&self, sub: usize, cell: usize) -> usize {
        self.s_offset[sub] + cell
    }

    pub fn zeta(&self, mortar: usize, phase: usize, cell: usize) -> usize {
        self.zeta_offset[mortar][phase] + cell
    }

    pub fn gather(&self, state: &State) -> Vec<f64> {
        let mut x = vec![0.0; self.len];
        for (i, (p, s)) in state.p.iter().zip(&state.s0).enumerate() {
            for c in 0..p.len() {
                x[self.p(i, c)] = p[c];
                x[self.s(i, c)] = s[c];
            }
        }
        for (j, z) in state.zeta.iter().enumerate() {
            for l in 0..2 {
                for (c, v) in z[l].iter().enumerate() {
                    x[self.zeta(j, l, c)] = *v;
                }
            }
        }
        x
    }

    pub fn scatter(&self, x: &[f64], state: &mut State) {
        for i in 0..state.p.len() {
            for c in 0..state.p[i].len() {
                state.p[i][c] = x[self.p(i, c)];
                state.s0[i][c] = x[self.s(i, c)];
            }
        }
        for j in 0..state.zeta.len() {
            for l in 0..2 {
                for c in 0..state.zeta[j][l].len() {
                    state.zeta[j][l][c] = x[self.zeta(j, l, c)];
                }
            }
        }
    }
}
