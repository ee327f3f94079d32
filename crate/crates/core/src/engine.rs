//! Leapfrog integrator for Maxwell's curl equations on the staggered lattice.
//!
//! H update:  H^{n+1/2} = H^{n-1/2} - dt (curl E^n)            (mu0 = 1)
//! D update:  D^{n+1}   = D^n + dt (curl H^{n+1/2} - J^{n+1/2})
//! E update:  E^{n+1}   = (D^{n+1} - P_D^{n+1} - P_L^{n+1}) / eps_inf
//!
//! The lattice is PEC-backed: tangential E on the outermost node planes is
//! never updated, which closes the domain; absorbing layers sit in front of
//! that backing. Updates are pure per-cell gathers, so slab parallelism
//! is bitwise independent of the worker count.

use crate::error::{Error, Result};
use crate::field::{FieldState, VectorField};
use crate::grid::{Axis, Dimensionality, YeeGrid};
use crate::media::MediumMap;
use num_complex::Complex64;
use rayon::prelude::*;

/// Grids below this cell count are stepped serially; above it, slab-parallel.
const PARALLEL_THRESHOLD: usize = 16 * 1024;

/// A point current-density sample applied in the D update, time-centered at
/// the half step between the amplitude levels that produced it.
#[derive(Debug, Clone, Copy)]
pub struct CurrentSample {
    pub comp: Axis,
    pub idx: [usize; 3],
    pub value: Complex64,
}

fn for_each_slab(
    data: &mut [Complex64],
    slab: usize,
    parallel: bool,
    f: impl Fn(usize, &mut [Complex64]) + Sync + Send,
) {
    if parallel {
        data.par_chunks_mut(slab).enumerate().for_each(|(i, chunk)| f(i, chunk));
    } else {
        data.chunks_mut(slab).enumerate().for_each(|(i, chunk)| f(i, chunk));
    }
}

fn advance_h_1d(h: &mut VectorField, e: &VectorField, grid: &YeeGrid) {
    let c = grid.dt / grid.dx;
    let ez = &e.comp(Axis::Z).data;
    let hy = &mut h.comp_mut(Axis::Y).data;
    for i in 0..grid.nx - 1 {
        hy[i] += c * (ez[i + 1] - ez[i]);
    }
}

fn advance_h_3d(h: &mut VectorField, e: &VectorField, grid: &YeeGrid) {
    let (nx, ny, nz) = (grid.nx, grid.ny, grid.nz);
    let slab = ny * nz;
    let c = grid.dt / grid.dx;
    let parallel = grid.cell_count() >= PARALLEL_THRESHOLD;
    let ex = &e.comp(Axis::X).data;
    let ey = &e.comp(Axis::Y).data;
    let ez = &e.comp(Axis::Z).data;
    let at = |i: usize, j: usize, k: usize| (i * ny + j) * nz + k;

    // Hx += -c [ (Ez[i,j+1,k] - Ez) - (Ey[i,j,k+1] - Ey) ]
    for_each_slab(&mut h.comp_mut(Axis::X).data, slab, parallel, |i, hx| {
        for j in 0..ny - 1 {
            for k in 0..nz - 1 {
                let curl = (ez[at(i, j + 1, k)] - ez[at(i, j, k)])
                    - (ey[at(i, j, k + 1)] - ey[at(i, j, k)]);
                hx[j * nz + k] -= c * curl;
            }
        }
    });
    // Hy += -c [ (Ex[i,j,k+1] - Ex) - (Ez[i+1,j,k] - Ez) ]
    for_each_slab(&mut h.comp_mut(Axis::Y).data, slab, parallel, |i, hy| {
        if i >= nx - 1 {
            return;
        }
        for j in 0..ny {
            for k in 0..nz - 1 {
                let curl = (ex[at(i, j, k + 1)] - ex[at(i, j, k)])
                    - (ez[at(i + 1, j, k)] - ez[at(i, j, k)]);
                hy[j * nz + k] -= c * curl;
            }
        }
    });
    // Hz += -c [ (Ey[i+1,j,k] - Ey) - (Ex[i,j+1,k] - Ex) ]
    for_each_slab(&mut h.comp_mut(Axis::Z).data, slab, parallel, |i, hz| {
        if i >= nx - 1 {
            return;
        }
        for j in 0..ny - 1 {
            for k in 0..nz {
                let curl = (ey[at(i + 1, j, k)] - ey[at(i, j, k)])
                    - (ex[at(i, j + 1, k)] - ex[at(i, j, k)]);
                hz[j * nz + k] -= c * curl;
            }
        }
    });
}

/// Faraday half of the leapfrog: advance H from n-1/2 to n+1/2 using E^n.
pub fn advance_h(state: &mut FieldState, grid: &YeeGrid) {
    match grid.dimensionality {
        Dimensionality::One => advance_h_1d(&mut state.h, &state.e, grid),
        Dimensionality::Three => advance_h_3d(&mut state.h, &state.e, grid),
    }
}

fn advance_d_1d(d: &mut VectorField, h: &VectorField, grid: &YeeGrid) {
    let c = grid.dt / grid.dx;
    let hy = &h.comp(Axis::Y).data;
    let dz = &mut d.comp_mut(Axis::Z).data;
    for i in 1..grid.nx - 1 {
        dz[i] += c * (hy[i] - hy[i - 1]);
    }
}

fn advance_d_3d(d: &mut VectorField, h: &VectorField, grid: &YeeGrid) {
    let (ny, nz) = (grid.ny, grid.nz);
    let slab = ny * nz;
    let c = grid.dt / grid.dx;
    let parallel = grid.cell_count() >= PARALLEL_THRESHOLD;
    let hx = &h.comp(Axis::X).data;
    let hy = &h.comp(Axis::Y).data;
    let hz = &h.comp(Axis::Z).data;
    let at = |i: usize, j: usize, k: usize| (i * ny + j) * nz + k;

    // Dx += c [ (Hz - Hz[j-1]) - (Hy - Hy[k-1]) ]
    for_each_slab(&mut d.comp_mut(Axis::X).data, slab, parallel, |i, dx| {
        for j in 1..ny - 1 {
            for k in 1..nz - 1 {
                let curl = (hz[at(i, j, k)] - hz[at(i, j - 1, k)])
                    - (hy[at(i, j, k)] - hy[at(i, j, k - 1)]);
                dx[j * nz + k] += c * curl;
            }
        }
    });
    // Dy += c [ (Hx - Hx[k-1]) - (Hz - Hz[i-1]) ]
    for_each_slab(&mut d.comp_mut(Axis::Y).data, slab, parallel, |i, dy| {
        if i == 0 {
            return;
        }
        for j in 0..ny - 1 {
            for k in 1..nz - 1 {
                let curl = (hx[at(i, j, k)] - hx[at(i, j, k - 1)])
                    - (hz[at(i, j, k)] - hz[at(i - 1, j, k)]);
                dy[j * nz + k] += c * curl;
            }
        }
    });
    // Dz += c [ (Hy - Hy[i-1]) - (Hx - Hx[j-1]) ]
    for_each_slab(&mut d.comp_mut(Axis::Z).data, slab, parallel, |i, dz| {
        if i == 0 {
            return;
        }
        for j in 1..ny - 1 {
            for k in 0..nz - 1 {
                let curl = (hy[at(i, j, k)] - hy[at(i - 1, j, k)])
                    - (hx[at(i, j, k)] - hx[at(i, j - 1, k)]);
                dz[j * nz + k] += c * curl;
            }
        }
    });
}

/// Ampere half: advance D from n to n+1 using H^{n+1/2} and the registered
/// point currents. Current samples outside the grid are rejected.
pub fn advance_d(state: &mut FieldState, grid: &YeeGrid, currents: &[CurrentSample]) -> Result<()> {
    for cs in currents {
        if !grid.contains(cs.idx[0], cs.idx[1], cs.idx[2]) {
            return Err(Error::InvalidArgument(format!(
                "current sample at {:?} lies outside the {}x{}x{} grid",
                cs.idx, grid.nx, grid.ny, grid.nz
            )));
        }
        if grid.dimensionality == Dimensionality::One && cs.comp != Axis::Z {
            return Err(Error::InvalidArgument(
                "1D mode carries only z-directed currents".into(),
            ));
        }
    }
    match grid.dimensionality {
        Dimensionality::One => advance_d_1d(&mut state.d, &state.h, grid),
        Dimensionality::Three => advance_d_3d(&mut state.d, &state.h, grid),
    }
    for cs in currents {
        let f = state.d.comp_mut(cs.comp);
        let idx = f.idx(cs.idx[0], cs.idx[1], cs.idx[2]);
        f.data[idx] -= grid.dt * cs.value;
    }
    Ok(())
}

/// Polarization recursions plus constitutive recovery, fused per cell:
/// P^{n+1} from (P^n, P^{n-1}, E^n), then E^{n+1} = (D - P_D - P_L)/eps_inf.
pub fn advance_constitutive(state: &mut FieldState, grid: &YeeGrid, media: &MediumMap) {
    if media.is_uniform_vacuum() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let src = &state.d.comp(axis).data;
            let dst = &mut state.e.comp_mut(axis).data;
            dst.copy_from_slice(src);
        }
        return;
    }
    let slab = grid.ny * grid.nz;
    let parallel = grid.cell_count() >= PARALLEL_THRESHOLD;
    let coeffs = &media.coefficients;
    let cell_index = &media.cell_index;
    for a in 0..3 {
        let (e, rest) = {
            let FieldState { e, d, p_drude, p_drude_prev, p_lorentz, p_lorentz_prev, .. } = state;
            (
                &mut e.0[a].data,
                (
                    &d.0[a].data,
                    &mut p_drude.0[a].data,
                    &mut p_drude_prev.0[a].data,
                    &mut p_lorentz.0[a].data,
                    &mut p_lorentz_prev.0[a].data,
                ),
            )
        };
        let (dd, pdd, pdp, pld, plp) = rest;
        let work = |i: usize,
                    ec: &mut [Complex64],
                    pdc: &mut [Complex64],
                    pdpc: &mut [Complex64],
                    plc: &mut [Complex64],
                    plpc: &mut [Complex64]| {
            let base = i * slab;
            for off in 0..ec.len() {
                let c = &coeffs[cell_index[base + off] as usize];
                let e_old = ec[off];
                let new_pd = c.c1_d * pdc[off] + c.c2_d * pdpc[off] + c.c3_d * e_old;
                let new_pl = c.c1_l * plc[off] + c.c2_l * plpc[off] + c.c3_l * e_old;
                pdpc[off] = pdc[off];
                pdc[off] = new_pd;
                plpc[off] = plc[off];
                plc[off] = new_pl;
                ec[off] = (dd[base + off] - new_pd - new_pl) * c.inv_eps_inf;
            }
        };
        if parallel {
            e.par_chunks_mut(slab)
                .zip(pdd.par_chunks_mut(slab))
                .zip(pdp.par_chunks_mut(slab))
                .zip(pld.par_chunks_mut(slab))
                .zip(plp.par_chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((((ec, pdc), pdpc), plc), plpc))| {
                    work(i, ec, pdc, pdpc, plc, plpc)
                });
        } else {
            e.chunks_mut(slab)
                .zip(pdd.chunks_mut(slab))
                .zip(pdp.chunks_mut(slab))
                .zip(pld.chunks_mut(slab))
                .zip(plp.chunks_mut(slab))
                .enumerate()
                .for_each(|(i, ((((ec, pdc), pdpc), plc), plpc))| {
                    work(i, ec, pdc, pdpc, plc, plpc)
                });
        }
    }
}

/// Staggered-in-time discrete EM energy. Exactly conserved by the vacuum
/// leapfrog on a PEC-closed lattice:
///   U^n = 1/2 sum [ eps |E^n|^2 + Re( conj(H^{n-1/2}) H^{n+1/2} ) ] dV
pub fn staggered_energy(
    e: &VectorField,
    h_before: &VectorField,
    h_after: &VectorField,
    media: &MediumMap,
    grid: &YeeGrid,
) -> f64 {
    let dv = grid.cell_volume();
    let mut acc = 0.0;
    for a in 0..3 {
        let ed = &e.0[a].data;
        let hb = &h_before.0[a].data;
        let ha = &h_after.0[a].data;
        for idx in 0..ed.len() {
            let eps = media.medium_at(idx).eps_inf;
            acc += eps * ed[idx].norm_sqr() + (hb[idx].conj() * ha[idx]).re;
        }
    }
    0.5 * acc * dv
}

/// Unstaggered field energy (monitoring only; wobbles at O(dt)).
pub fn plain_energy(state: &FieldState, media: &MediumMap, grid: &YeeGrid) -> f64 {
    let dv = grid.cell_volume();
    let mut acc = 0.0;
    for a in 0..3 {
        let ed = &state.e.0[a].data;
        let hd = &state.h.0[a].data;
        for idx in 0..ed.len() {
            let eps = media.medium_at(idx).eps_inf;
            acc += eps * ed[idx].norm_sqr() + hd[idx].norm_sqr();
        }
    }
    0.5 * acc * dv
}

/// Oscillator energy stored in the polarization fields of dispersive cells:
/// kinetic (1/(2 wp^2)) |dP/dt|^2 plus potential (w0^2/(2 wp^2)) |P|^2,
/// with dP/dt taken as the backward difference of the stored history.
pub fn oscillator_energy(state: &FieldState, media: &MediumMap, grid: &YeeGrid) -> f64 {
    if media.is_uniform_vacuum() {
        return 0.0;
    }
    let dv = grid.cell_volume();
    let dt = grid.dt;
    let mut acc = 0.0;
    for a in 0..3 {
        let pd = &state.p_drude.0[a].data;
        let pdp = &state.p_drude_prev.0[a].data;
        let pl = &state.p_lorentz.0[a].data;
        let plp = &state.p_lorentz_prev.0[a].data;
        for idx in 0..pd.len() {
            let m = media.medium_at(idx);
            if m.omega_p_drude > 0.0 {
                let v = (pd[idx] - pdp[idx]) / dt;
                acc += v.norm_sqr() / (2.0 * m.omega_p_drude.powi(2));
            }
            if m.omega_p_lorentz > 0.0 {
                let v = (pl[idx] - plp[idx]) / dt;
                acc += v.norm_sqr() / (2.0 * m.omega_p_lorentz.powi(2));
                acc += m.omega_0_lorentz.powi(2) * pl[idx].norm_sqr()
                    / (2.0 * m.omega_p_lorentz.powi(2));
            }
        }
    }
    acc * dv
}
