//! Total-field/scattered-field coupling between the auxiliary grid (emitter
//! self-field) and the main grid (environment response).
//!
//! The box Omega classifies every Yee sample by its staggered position:
//! inside is the main grid's scattered-field region, outside is total field.
//! Wherever an update stencil straddles the classification boundary, the
//! read is corrected with the auxiliary field at the same index, which is
//! algebraically identical to impressing the surface-equivalence currents
//! J_s = n x H_aux and M_s = -n x E_aux on the faces of Omega. Because both
//! grids run the same update on the same lattice, the cancellation inside
//! Omega is exact to round-off in an empty scene.

use crate::boundaries::Side;
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::{Axis, Dimensionality, YeeGrid};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrentKind {
    /// J_s = n x H_aux, consumed by the main grid's D update.
    Electric,
    /// M_s = -n x E_aux, consumed by the main grid's H update.
    Magnetic,
}

/// One surface-current sample tied to the main-grid sample it drives.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceCurrentSample {
    pub kind: CurrentKind,
    /// Vector component of J_s or M_s.
    pub comp: Axis,
    pub face_axis: Axis,
    pub face_side: Side,
    pub target_comp: Axis,
    pub target_idx: [usize; 3],
    pub value: Complex64,
}

/// Extracted currents for one update phase, stamped with the grid step.
#[derive(Debug, Clone)]
pub struct SurfaceCurrents {
    pub step: u64,
    pub kind: CurrentKind,
    pub samples: Vec<SurfaceCurrentSample>,
}

#[derive(Debug, Clone, Copy)]
struct Correction {
    target_comp: Axis,
    target_idx: [usize; 3],
    source_comp: Axis,
    /// Main-grid index of the straddling read; aux offset applied at use.
    source_idx: [usize; 3],
    /// Multiplies (dt/dx) * aux_value when added to the target.
    coef: f64,
    face_axis: Axis,
    face_side: Side,
    current_comp: Axis,
    /// value = current_sign * aux_value gives the physical J_s / M_s sample.
    current_sign: f64,
}

/// Axis-aligned TFSF box, present in both grids, with precomputed
/// stencil-straddle corrections for each update phase.
#[derive(Debug, Clone)]
pub struct TfsfSurface {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
    /// aux_index = main_index + offset.
    pub offset: [isize; 3],
    h_phase: Vec<Correction>,
    d_phase: Vec<Correction>,
    dims: Dimensionality,
}

fn levi_civita(a: Axis, b: Axis, c: Axis) -> f64 {
    use Axis::*;
    match (a, b, c) {
        (X, Y, Z) | (Y, Z, X) | (Z, X, Y) => 1.0,
        (X, Z, Y) | (Z, Y, X) | (Y, X, Z) => -1.0,
        _ => 0.0,
    }
}

fn third_axis(a: Axis, b: Axis) -> Axis {
    for c in [Axis::X, Axis::Y, Axis::Z] {
        if c != a && c != b {
            return c;
        }
    }
    unreachable!()
}

/// Yee position of a sample in index units: E components are staggered half
/// a cell along their own axis, H components along the two others.
fn sample_position(kind: CurrentKind, comp: Axis, idx: [usize; 3]) -> [f64; 3] {
    let mut p = [idx[0] as f64, idx[1] as f64, idx[2] as f64];
    match kind {
        CurrentKind::Electric => p[comp.index()] += 0.5,
        CurrentKind::Magnetic => {
            for a in [Axis::X, Axis::Y, Axis::Z] {
                if a != comp {
                    p[a.index()] += 0.5;
                }
            }
        }
    }
    p
}

impl TfsfSurface {
    pub fn new(
        main: &YeeGrid,
        aux: &YeeGrid,
        lo: [usize; 3],
        hi: [usize; 3],
        offset: [isize; 3],
    ) -> Result<Self> {
        if main.dimensionality != aux.dimensionality || main.dx != aux.dx || main.dt != aux.dt {
            return Err(Error::InvalidArgument(
                "TFSF grids must share dx, dt and dimensionality".into(),
            ));
        }
        let n_main = [main.nx, main.ny, main.nz];
        let axes: &[usize] = match main.dimensionality {
            Dimensionality::One => &[0],
            Dimensionality::Three => &[0, 1, 2],
        };
        for &a in axes {
            if lo[a] < 1 || hi[a] + 2 > n_main[a] || lo[a] > hi[a] {
                return Err(Error::InvalidArgument(format!(
                    "TFSF box [{lo:?}, {hi:?}] does not fit inside the main grid with a one-cell margin"
                )));
            }
        }
        if main.dimensionality == Dimensionality::One
            && (lo[1] != 0 || lo[2] != 0 || hi[1] != 0 || hi[2] != 0)
        {
            return Err(Error::InvalidArgument("1D TFSF boxes are [lo_x, hi_x] only".into()));
        }
        let n_aux = [aux.nx, aux.ny, aux.nz];
        for &a in axes {
            let mapped_lo = lo[a] as isize - 1 + offset[a];
            let mapped_hi = hi[a] as isize + 1 + offset[a];
            if mapped_lo < 0 || mapped_hi as usize >= n_aux[a] {
                return Err(Error::InvalidArgument(
                    "TFSF box (with its one-cell shell) maps outside the auxiliary grid".into(),
                ));
            }
        }
        let mut surface = Self {
            lo,
            hi,
            offset,
            h_phase: Vec::new(),
            d_phase: Vec::new(),
            dims: main.dimensionality,
        };
        surface.build(main);
        Ok(surface)
    }

    /// A sample is in the scattered-field region when its staggered position
    /// lies inside the closed box (1D classifies along x only).
    fn is_sf(&self, kind: CurrentKind, comp: Axis, idx: [usize; 3]) -> bool {
        let p = sample_position(kind, comp, idx);
        let axes: &[usize] = match self.dims {
            Dimensionality::One => &[0],
            Dimensionality::Three => &[0, 1, 2],
        };
        axes.iter().all(|&a| p[a] >= self.lo[a] as f64 && p[a] <= self.hi[a] as f64)
    }

    pub fn contains_e_sample(&self, comp: Axis, idx: [usize; 3]) -> bool {
        self.is_sf(CurrentKind::Electric, comp, idx)
    }

    fn build(&mut self, grid: &YeeGrid) {
        // Stencil read tables: coefficients in units of dt/dx, matching the
        // engine's curl updates exactly.
        type Read = (Axis, [isize; 3], f64);
        let shift = |a: Axis, s: isize| -> [isize; 3] {
            let mut v = [0isize; 3];
            v[a.index()] = s;
            v
        };
        let one_d = grid.dimensionality == Dimensionality::One;
        let h_reads = |comp: Axis| -> Vec<Read> {
            if one_d {
                if comp == Axis::Y {
                    return vec![(Axis::Z, shift(Axis::X, 1), 1.0), (Axis::Z, [0; 3], -1.0)];
                }
                return vec![];
            }
            let (u, v) = comp.cyclic();
            vec![
                (v, shift(u, 1), -1.0),
                (v, [0; 3], 1.0),
                (u, shift(v, 1), 1.0),
                (u, [0; 3], -1.0),
            ]
        };
        let d_reads = |comp: Axis| -> Vec<Read> {
            if one_d {
                if comp == Axis::Z {
                    return vec![(Axis::Y, [0; 3], 1.0), (Axis::Y, shift(Axis::X, -1), -1.0)];
                }
                return vec![];
            }
            let (u, v) = comp.cyclic();
            vec![
                (v, [0; 3], 1.0),
                (v, shift(u, -1), -1.0),
                (u, [0; 3], -1.0),
                (u, shift(v, -1), 1.0),
            ]
        };

        let n = [grid.nx, grid.ny, grid.nz];
        let scan_lo = [
            self.lo[0].saturating_sub(1),
            self.lo[1].saturating_sub(1),
            self.lo[2].saturating_sub(1),
        ];
        let scan_hi = [
            (self.hi[0] + 1).min(n[0] - 1),
            (self.hi[1] + 1).min(n[1] - 1),
            (self.hi[2] + 1).min(n[2] - 1),
        ];
        for comp in [Axis::X, Axis::Y, Axis::Z] {
            for i in scan_lo[0]..=scan_hi[0] {
                for j in scan_lo[1]..=scan_hi[1] {
                    for k in scan_lo[2]..=scan_hi[2] {
                        let idx = [i, j, k];
                        for (src, sh, sign) in h_reads(comp) {
                            self.push_if_straddling(CurrentKind::Magnetic, comp, idx, src, sh, sign, n);
                        }
                        for (src, sh, sign) in d_reads(comp) {
                            self.push_if_straddling(CurrentKind::Electric, comp, idx, src, sh, sign, n);
                        }
                    }
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push_if_straddling(
        &mut self,
        phase: CurrentKind,
        target_comp: Axis,
        target_idx: [usize; 3],
        source_comp: Axis,
        sh: [isize; 3],
        stencil_sign: f64,
        n: [usize; 3],
    ) {
        let (target_kind, source_kind) = match phase {
            CurrentKind::Magnetic => (CurrentKind::Magnetic, CurrentKind::Electric),
            CurrentKind::Electric => (CurrentKind::Electric, CurrentKind::Magnetic),
        };
        let mut src = [0usize; 3];
        for a in 0..3 {
            let v = target_idx[a] as isize + sh[a];
            if v < 0 || v as usize >= n[a] {
                return;
            }
            src[a] = v as usize;
        }
        let t_sf = self.is_sf(target_kind, target_comp, target_idx);
        let s_sf = self.is_sf(source_kind, source_comp, src);
        if t_sf == s_sf {
            return;
        }
        // TF targets add the incident field to the scattered read; SF
        // targets subtract it from the total read.
        let coef = if t_sf { -stencil_sign } else { stencil_sign };
        // Face geometry: a curl read pair always sits half a cell apart
        // along exactly one axis; that is the face normal direction, and
        // the outward normal points from the SF sample to the TF sample.
        let tp = sample_position(target_kind, target_comp, target_idx);
        let sp = sample_position(source_kind, source_comp, src);
        let read_axis = {
            let mut best = Axis::X;
            let mut best_d = 0.0f64;
            for a in [Axis::X, Axis::Y, Axis::Z] {
                let d = (tp[a.index()] - sp[a.index()]).abs();
                if d > best_d {
                    best_d = d;
                    best = a;
                }
            }
            debug_assert!((best_d - 0.5).abs() < 1e-9, "curl pair separation {best_d}");
            best
        };
        let (sf_pos, tf_pos) = if t_sf { (tp, sp) } else { (sp, tp) };
        let n_sign = if tf_pos[read_axis.index()] >= sf_pos[read_axis.index()] { 1.0 } else { -1.0 };
        let face_side = if n_sign < 0.0 { Side::Lo } else { Side::Hi };
        let current_comp = third_axis(read_axis, source_comp);
        let eps = levi_civita(read_axis, source_comp, current_comp);
        let current_sign = match phase {
            // M_s = -n x E_aux
            CurrentKind::Magnetic => -n_sign * eps,
            // J_s = n x H_aux
            CurrentKind::Electric => n_sign * eps,
        };
        // The geometric current and the stencil correction must agree:
        // target += coef (dt/dx) aux  ==  target -= (dt/dx) current.
        debug_assert!(
            (current_sign - -coef).abs() < 1e-12,
            "surface-current sign bookkeeping diverged from the stencil: {current_sign} vs coef {coef}"
        );
        let corr = Correction {
            target_comp,
            target_idx,
            source_comp,
            source_idx: src,
            coef,
            face_axis: read_axis,
            face_side,
            current_comp,
            current_sign,
        };
        match phase {
            CurrentKind::Magnetic => self.h_phase.push(corr),
            CurrentKind::Electric => self.d_phase.push(corr),
        }
    }

    fn aux_flat(&self, aux_ny: usize, aux_nz: usize, idx: [usize; 3]) -> usize {
        let i = (idx[0] as isize + self.offset[0]) as usize;
        let j = (idx[1] as isize + self.offset[1]) as usize;
        let k = (idx[2] as isize + self.offset[2]) as usize;
        (i * aux_ny + j) * aux_nz + k
    }

    /// Sample the auxiliary fields into surface-current values for one phase:
    /// magnetic currents from aux E^n, electric currents from aux H^{n+1/2}.
    pub fn equivalent_currents(
        &self,
        aux_state: &FieldState,
        aux_grid: &YeeGrid,
        kind: CurrentKind,
    ) -> SurfaceCurrents {
        let list = match kind {
            CurrentKind::Magnetic => &self.h_phase,
            CurrentKind::Electric => &self.d_phase,
        };
        let source_vf = match kind {
            CurrentKind::Magnetic => &aux_state.e,
            CurrentKind::Electric => &aux_state.h,
        };
        let samples = list
            .iter()
            .map(|c| {
                let flat = self.aux_flat(aux_grid.ny, aux_grid.nz, c.source_idx);
                let value = c.current_sign * source_vf.0[c.source_comp.index()].data[flat];
                SurfaceCurrentSample {
                    kind,
                    comp: c.current_comp,
                    face_axis: c.face_axis,
                    face_side: c.face_side,
                    target_comp: c.target_comp,
                    target_idx: c.target_idx,
                    value,
                }
            })
            .collect();
        SurfaceCurrents { step: aux_state.step, kind, samples }
    }

    /// Impress extracted currents on the main grid: magnetic right after the
    /// main H update, electric right after the main D update. Both grids
    /// must sit at the same step.
    pub fn inject(
        &self,
        main_state: &mut FieldState,
        main_grid: &YeeGrid,
        currents: &SurfaceCurrents,
    ) -> Result<()> {
        if main_state.step != currents.step {
            return Err(Error::ContractViolation(format!(
                "TFSF step mismatch: main grid at {}, currents extracted at {}",
                main_state.step, currents.step
            )));
        }
        let scale = main_grid.dt / main_grid.dx;
        for s in &currents.samples {
            let target = match s.kind {
                CurrentKind::Magnetic => &mut main_state.h,
                CurrentKind::Electric => &mut main_state.d,
            };
            let f = &mut target.0[s.target_comp.index()];
            let flat = f.idx(s.target_idx[0], s.target_idx[1], s.target_idx[2]);
            f.data[flat] -= scale * s.value;
        }
        Ok(())
    }

    /// Fused extract-and-inject for the stepping loop; identical arithmetic
    /// to `inject(equivalent_currents(..))` without the allocation.
    pub fn apply(
        &self,
        main_state: &mut FieldState,
        main_grid: &YeeGrid,
        aux_state: &FieldState,
        aux_grid: &YeeGrid,
        kind: CurrentKind,
    ) {
        let list = match kind {
            CurrentKind::Magnetic => &self.h_phase,
            CurrentKind::Electric => &self.d_phase,
        };
        let scale = main_grid.dt / main_grid.dx;
        for c in list {
            let flat_src = self.aux_flat(aux_grid.ny, aux_grid.nz, c.source_idx);
            let value = match kind {
                CurrentKind::Magnetic => aux_state.e.0[c.source_comp.index()].data[flat_src],
                CurrentKind::Electric => aux_state.h.0[c.source_comp.index()].data[flat_src],
            };
            let target = match kind {
                CurrentKind::Magnetic => &mut main_state.h,
                CurrentKind::Electric => &mut main_state.d,
            };
            let f = &mut target.0[c.target_comp.index()];
            let flat = f.idx(c.target_idx[0], c.target_idx[1], c.target_idx[2]);
            f.data[flat] += scale * c.coef * value;
        }
    }
}
