//! Domain terminations: convolutional PML absorbing layers and PEC walls.
//!
//! The lattice itself is PEC-backed (tangential E on the outermost node
//! planes is never updated). A CPML face sits in front of that backing and
//! absorbs outgoing waves via recursive-convolution memory variables:
//!
//!   psi^{n+1} = b(depth) psi^n + a(depth) (d field / d axis)
//!   b = exp(-(sigma/kappa + alpha) dt),  a = sigma (b - 1) / (kappa (sigma + kappa alpha))
//!
//! with polynomially graded sigma(depth) = sigma_max rho^m and alpha graded
//! linearly to zero at the outer wall.

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::{Axis, Dimensionality, YeeGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lo,
    Hi,
}

/// CPML profile parameters for one face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpmlSpec {
    /// Layer thickness in cells; 0 disables absorption (test harness only).
    pub thickness: usize,
    /// Polynomial grading order m.
    pub order: f64,
    /// Multiple of the standard optimum sigma_max = 0.8 (m+1) / dx.
    pub sigma_scale: f64,
    pub kappa_max: f64,
    pub alpha_max: f64,
}

impl Default for CpmlSpec {
    fn default() -> Self {
        Self { thickness: 10, order: 3.0, sigma_scale: 1.0, kappa_max: 1.0, alpha_max: 0.0 }
    }
}

impl CpmlSpec {
    pub fn validate(&self) -> Result<()> {
        if self.thickness != 0 && self.thickness < 4 {
            return Err(Error::InvalidArgument(format!(
                "CPML thickness must be 0 or >= 4 cells, got {}",
                self.thickness
            )));
        }
        if !(2.0..=4.0).contains(&self.order) {
            return Err(Error::InvalidArgument(format!(
                "CPML grading order must be in [2, 4], got {}",
                self.order
            )));
        }
        if self.sigma_scale < 0.0 {
            return Err(Error::InvalidArgument("sigma_scale must be >= 0".into()));
        }
        if self.kappa_max < 1.0 {
            return Err(Error::InvalidArgument("kappa_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// What terminates one face of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FaceBoundary {
    Pec,
    Pml(CpmlSpec),
}

/// All six faces in order [x_lo, x_hi, y_lo, y_hi, z_lo, z_hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySet {
    pub faces: [FaceBoundary; 6],
}

impl BoundarySet {
    pub fn all_pml(spec: CpmlSpec) -> Self {
        Self { faces: [FaceBoundary::Pml(spec); 6] }
    }

    pub fn all_pec() -> Self {
        Self { faces: [FaceBoundary::Pec; 6] }
    }

    pub fn face(&self, axis: Axis, side: Side) -> FaceBoundary {
        self.faces[axis.index() * 2 + side as usize]
    }

    pub fn pec_faces(&self) -> Vec<(Axis, Side)> {
        let mut out = Vec::new();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for side in [Side::Lo, Side::Hi] {
                if self.face(axis, side) == FaceBoundary::Pec {
                    out.push((axis, side));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TargetKind {
    H,
    D,
}

/// One recursive-convolution correction family: a target component whose
/// update differentiates `source` along `axis` inside the layer.
#[derive(Debug, Clone)]
struct CpmlTerm {
    kind: TargetKind,
    target: Axis,
    source: Axis,
    axis: Axis,
    /// Sign of dt * psi added to the target.
    sign: f64,
    /// Iteration box, lo inclusive / hi exclusive, in grid indices.
    lo: [usize; 3],
    hi: [usize; 3],
    /// Per-depth recursion coefficients, indexed along the axis from lo.
    b: Vec<f64>,
    a: Vec<f64>,
    psi: Vec<Complex64>,
}

impl CpmlTerm {
    fn box_len(&self) -> [usize; 3] {
        [self.hi[0] - self.lo[0], self.hi[1] - self.lo[1], self.hi[2] - self.lo[2]]
    }
}

/// Assembled CPML state: coefficient tables plus psi memory per face.
#[derive(Debug, Clone)]
pub struct Cpml {
    terms: Vec<CpmlTerm>,
    dx: f64,
}

fn profile(spec: &CpmlSpec, dx: f64, dt: f64, rho: f64) -> (f64, f64) {
    let sigma_opt = 0.8 * (spec.order + 1.0) / dx;
    let sigma = spec.sigma_scale * sigma_opt * rho.powf(spec.order);
    let kappa = 1.0 + (spec.kappa_max - 1.0) * rho.powf(spec.order);
    let alpha = spec.alpha_max * (1.0 - rho);
    let b = (-(sigma / kappa + alpha) * dt.abs()).exp();
    let denom = sigma + kappa * alpha;
    let a = if denom > 0.0 { sigma * (b - 1.0) / (kappa * denom) } else { 0.0 };
    (b, a)
}

/// Build CPML state for every PML face in the set. Errors if a layer would
/// cover half its axis or more.
pub fn make_cpml(boundaries: &BoundarySet, grid: &YeeGrid) -> Result<Cpml> {
    let mut terms = Vec::new();
    let n = [grid.nx, grid.ny, grid.nz];
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        if grid.dimensionality == Dimensionality::One && axis != Axis::X {
            continue;
        }
        for side in [Side::Lo, Side::Hi] {
            let FaceBoundary::Pml(spec) = boundaries.face(axis, side) else { continue };
            spec.validate()?;
            if spec.thickness == 0 {
                continue;
            }
            let na = n[axis.index()];
            if 2 * spec.thickness >= na {
                return Err(Error::InvalidArgument(format!(
                    "CPML thickness {} covers half the {}-cell axis",
                    spec.thickness, na
                )));
            }
            terms.extend(face_terms(&spec, grid, axis, side));
        }
    }
    Ok(Cpml { terms, dx: grid.dx })
}

/// An empty CPML (all faces bare PEC backing).
pub fn no_cpml(grid: &YeeGrid) -> Cpml {
    Cpml { terms: Vec::new(), dx: grid.dx }
}

fn face_terms(spec: &CpmlSpec, grid: &YeeGrid, axis: Axis, side: Side) -> Vec<CpmlTerm> {
    let n = [grid.nx, grid.ny, grid.nz];
    let (u, v) = axis.cyclic();
    let t = spec.thickness;
    let na = n[axis.index()];
    // Depth ranges along the face axis: E corrections on integer nodes
    // (wall node excluded, interface node has sigma = 0 and is skipped),
    // H corrections half a cell in.
    let (e_lo, e_hi) = match side {
        Side::Lo => (1usize, t),
        Side::Hi => (na - t, na - 1),
    };
    let (h_lo, h_hi) = match side {
        Side::Lo => (0usize, t),
        Side::Hi => (na - 1 - t, na - 1),
    };
    let rho_e = |i: usize| -> f64 {
        match side {
            Side::Lo => (t - i) as f64 / t as f64,
            Side::Hi => (i - (na - 1 - t)) as f64 / t as f64,
        }
    };
    let rho_h = |i: usize| -> f64 {
        match side {
            Side::Lo => (t as f64 - i as f64 - 0.5) / t as f64,
            Side::Hi => (i as f64 + 0.5 - (na - 1 - t) as f64) / t as f64,
        }
    };
    let coeff_table = |lo: usize, hi: usize, rho: &dyn Fn(usize) -> f64| {
        let mut b = Vec::with_capacity(hi - lo);
        let mut a = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (bi, ai) = profile(spec, grid.dx, grid.dt, rho(i));
            b.push(bi);
            a.push(ai);
        }
        (b, a)
    };
    let (b_e, a_e) = coeff_table(e_lo, e_hi, &rho_e);
    let (b_h, a_h) = coeff_table(h_lo, h_hi, &rho_h);

    let one_d = grid.dimensionality == Dimensionality::One;
    let mut out = Vec::new();
    // For cyclic (axis, u, v) the four affected updates and their signs:
    //   H_u reads d/d_axis E_v with +, H_v reads d/d_axis E_u with -,
    //   D_u reads d/d_axis H_v with -, D_v reads d/d_axis H_u with +.
    let families: [(TargetKind, Axis, Axis, f64); 4] = [
        (TargetKind::H, u, v, 1.0),
        (TargetKind::H, v, u, -1.0),
        (TargetKind::D, u, v, -1.0),
        (TargetKind::D, v, u, 1.0),
    ];
    for (kind, target, source, sign) in families {
        if one_d
            && !((kind == TargetKind::H && target == Axis::Y)
                || (kind == TargetKind::D && target == Axis::Z))
        {
            continue;
        }
        let mut lo = [0usize; 3];
        let mut hi = [1usize; 3];
        let (alo, ahi) = match kind {
            TargetKind::H => (h_lo, h_hi),
            TargetKind::D => (e_lo, e_hi),
        };
        lo[axis.index()] = alo;
        hi[axis.index()] = ahi;
        if !one_d {
            for ax in [u, v] {
                let nn = n[ax.index()];
                let (l, h) = match kind {
                    // Matches the engine's H update ranges: full along the
                    // target's own direction, n-1 along its staggered axes.
                    TargetKind::H => {
                        if ax == target {
                            (0, nn)
                        } else {
                            (0, nn - 1)
                        }
                    }
                    // Matches the engine's D ranges: tangential E stays off
                    // the wall planes; the half-offset direction drops the
                    // dead trailing sample.
                    TargetKind::D => {
                        if ax == target {
                            (0, nn - 1)
                        } else {
                            (1, nn - 1)
                        }
                    }
                };
                lo[ax.index()] = l;
                hi[ax.index()] = h;
            }
        }
        let len = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
        let (b, a) = match kind {
            TargetKind::H => (b_h.clone(), a_h.clone()),
            TargetKind::D => (b_e.clone(), a_e.clone()),
        };
        out.push(CpmlTerm {
            kind,
            target,
            source,
            axis,
            sign,
            lo,
            hi,
            b,
            a,
            psi: vec![Complex64::new(0.0, 0.0); len],
        });
    }
    out
}

impl Cpml {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn reset(&mut self) {
        for term in &mut self.terms {
            term.psi.iter_mut().for_each(|p| *p = Complex64::new(0.0, 0.0));
        }
    }

    /// H-phase corrections; call right after `advance_h`, while E still
    /// holds the level the H update consumed.
    pub fn apply_h(&mut self, state: &mut FieldState, grid: &YeeGrid) {
        self.apply(state, grid, TargetKind::H);
    }

    /// D-phase corrections; call right after `advance_d`, before the
    /// constitutive recovery.
    pub fn apply_d(&mut self, state: &mut FieldState, grid: &YeeGrid) {
        self.apply(state, grid, TargetKind::D);
    }

    fn apply(&mut self, state: &mut FieldState, grid: &YeeGrid, kind: TargetKind) {
        let dt = grid.dt;
        let inv_dx = 1.0 / self.dx;
        for term in self.terms.iter_mut().filter(|t| t.kind == kind) {
            let (src, dst) = match kind {
                TargetKind::H => (&state.e, &mut state.h),
                TargetKind::D => (&state.h, &mut state.d),
            };
            let source = &src.0[term.source.index()];
            let target = &mut dst.0[term.target.index()];
            let stride = match term.axis {
                Axis::X => grid.ny * grid.nz,
                Axis::Y => grid.nz,
                Axis::Z => 1,
            };
            let [bl0, bl1, bl2] = term.box_len();
            let lo = term.lo;
            let axis_idx = term.axis.index();
            for li in 0..bl0 {
                for lj in 0..bl1 {
                    for lk in 0..bl2 {
                        let (i, j, k) = (lo[0] + li, lo[1] + lj, lo[2] + lk);
                        let flat = (i * grid.ny + j) * grid.nz + k;
                        let depth = [li, lj, lk][axis_idx];
                        // Forward difference of E for H targets, backward
                        // difference of H for D targets.
                        let diff = match kind {
                            TargetKind::H => {
                                (source.data[flat + stride] - source.data[flat]) * inv_dx
                            }
                            TargetKind::D => {
                                (source.data[flat] - source.data[flat - stride]) * inv_dx
                            }
                        };
                        let pidx = (li * bl1 + lj) * bl2 + lk;
                        let psi = term.b[depth] * term.psi[pidx] + term.a[depth] * diff;
                        term.psi[pidx] = psi;
                        target.data[flat] += term.sign * dt * psi;
                    }
                }
            }
        }
    }
}

/// Force tangential E to zero on the listed faces. The bare lattice already
/// behaves as PEC there; this also pins any externally written values.
pub fn apply_pec(state: &mut FieldState, grid: &YeeGrid, faces: &[(Axis, Side)]) {
    let n = [grid.nx, grid.ny, grid.nz];
    for &(axis, side) in faces {
        if grid.dimensionality == Dimensionality::One && axis != Axis::X {
            continue;
        }
        let plane = match side {
            Side::Lo => 0,
            Side::Hi => n[axis.index()] - 1,
        };
        for comp in [Axis::X, Axis::Y, Axis::Z] {
            if comp == axis {
                continue; // normal E is free at a PEC wall
            }
            let f = &mut state.e.0[comp.index()];
            let (a1, a2) = axis.cyclic();
            let mut idx = [0usize; 3];
            idx[axis.index()] = plane;
            for p in 0..n[a1.index()] {
                for q in 0..n[a2.index()] {
                    idx[a1.index()] = p;
                    idx[a2.index()] = q;
                    f.set(idx[0], idx[1], idx[2], Complex64::new(0.0, 0.0));
                }
            }
        }
    }
}
