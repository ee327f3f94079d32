//! Yee-lattice geometry: dimensions, spacing, time step, staggered positions.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cartesian axis, doubling as the component index of a vector field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

pub const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

impl Axis {
    pub fn index(self) -> usize {
        self as usize
    }

    /// The other two axes in right-handed cyclic order (self, u, v).
    pub fn cyclic(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimensionality {
    One,
    Three,
}

/// Courant-limited time step: `safety * dx / sqrt(D)` with c = 1.
///
/// `safety` must lie in (0, 1]; the caller picks how far below the stability
/// bound to run (accuracy of the emitter leapfrog usually wants well under 1).
pub fn cfl_dt(grid_spacing: f64, dimensionality: Dimensionality, safety: f64) -> Result<f64> {
    if !(grid_spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid spacing must be positive, got {grid_spacing}"
        )));
    }
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "CFL safety factor must be in (0, 1], got {safety}"
        )));
    }
    let d = match dimensionality {
        Dimensionality::One => 1.0_f64,
        Dimensionality::Three => 3.0_f64,
    };
    Ok(safety * grid_spacing / d.sqrt())
}

/// Uniform staggered lattice with a fixed time step.
///
/// Units are natural (hbar = c = eps0 = mu0 = 1) with lengths in meters, so
/// dt carries meters as well and frequencies are rad/m.
#[derive(Debug, Clone, PartialEq)]
pub struct YeeGrid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dt: f64,
    pub dimensionality: Dimensionality,
}

impl YeeGrid {
    pub fn new_1d(nx: usize, dx: f64, dt: f64) -> Result<Self> {
        Self::new(nx, 1, 1, dx, dt, Dimensionality::One)
    }

    pub fn new_3d(nx: usize, ny: usize, nz: usize, dx: f64, dt: f64) -> Result<Self> {
        Self::new(nx, ny, nz, dx, dt, Dimensionality::Three)
    }

    pub fn new(
        nx: usize,
        ny: usize,
        nz: usize,
        dx: f64,
        dt: f64,
        dimensionality: Dimensionality,
    ) -> Result<Self> {
        if nx < 1 || ny < 1 || nz < 1 {
            return Err(Error::InvalidArgument("all grid dims must be >= 1".into()));
        }
        if dimensionality == Dimensionality::One && (ny != 1 || nz != 1) {
            return Err(Error::InvalidArgument(
                "1D grids must have ny = nz = 1".into(),
            ));
        }
        if !(dx > 0.0) {
            return Err(Error::InvalidArgument(format!("dx must be positive, got {dx}")));
        }
        if !(dt.abs() > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be nonzero, got {dt}")));
        }
        // Courant bound, strict. Negative dt is allowed for reversibility
        // checks; the bound applies to the magnitude.
        let d = match dimensionality {
            Dimensionality::One => 1.0_f64,
            Dimensionality::Three => 3.0_f64,
        };
        let limit = dx / d.sqrt();
        if dt.abs() > limit * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} violates the Courant bound {limit} for this grid"
            )));
        }
        Ok(Self { nx, ny, nz, dx, dt, dimensionality })
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    /// Cell volume used to convert point currents to current densities.
    /// In 1D mode the transverse extent is one cell by convention.
    pub fn cell_volume(&self) -> f64 {
        match self.dimensionality {
            Dimensionality::One => self.dx,
            Dimensionality::Three => self.dx * self.dx * self.dx,
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.ny + j) * self.nz + k
    }

    pub fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        i < self.nx && j < self.ny && k < self.nz
    }

    /// Yee position (in length units) of the electric-field sample of
    /// component `comp` at integer index (i, j, k).
    pub fn e_position(&self, comp: Axis, i: usize, j: usize, k: usize) -> [f64; 3] {
        let mut p = [i as f64, j as f64, k as f64];
        p[comp.index()] += 0.5;
        [p[0] * self.dx, p[1] * self.dx, p[2] * self.dx]
    }

    /// Nearest E-component sample index to a continuous position.
    pub fn snap_to_e_sample(&self, comp: Axis, pos: [f64; 3]) -> Result<[usize; 3]> {
        let mut out = [0usize; 3];
        for (a, o) in out.iter_mut().enumerate() {
            let mut frac = pos[a] / self.dx;
            if a == comp.index() {
                frac -= 0.5;
            }
            let n = [self.nx, self.ny, self.nz][a];
            let snapped = frac.round();
            if snapped < 0.0 || snapped >= n as f64 {
                return Err(Error::InvalidArgument(format!(
                    "position {pos:?} snaps outside the grid on axis {a}"
                )));
            }
            *o = snapped as usize;
        }
        Ok(out)
    }

    /// Flip the sign of dt (time reversal); used by reversibility checks.
    pub fn reversed(&self) -> Self {
        let mut g = self.clone();
        g.dt = -g.dt;
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cfl_dt_1d_unit() {
        assert_eq!(cfl_dt(1.0, Dimensionality::One, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn cfl_dt_3d_unit() {
        let dt = cfl_dt(1.0, Dimensionality::Three, 1.0).unwrap();
        assert!((dt - 0.5773502691896258).abs() < 1e-15);
    }

    #[test]
    fn cfl_dt_paper_cell() {
        // 6.67 nm cell, 3D, safety 0.99: direct evaluation of the formula.
        let dt = cfl_dt(6.67e-9, Dimensionality::Three, 0.99).unwrap();
        assert!((dt - 3.812417032539856e-9).abs() < 1e-22);
    }

    #[test]
    fn cfl_dt_rejects_bad_args() {
        assert!(cfl_dt(0.0, Dimensionality::One, 0.5).is_err());
        assert!(cfl_dt(-1.0, Dimensionality::Three, 0.5).is_err());
        assert!(cfl_dt(1.0, Dimensionality::One, 0.0).is_err());
        assert!(cfl_dt(1.0, Dimensionality::One, 1.5).is_err());
    }

    #[test]
    fn grid_rejects_super_courant_dt() {
        assert!(YeeGrid::new_3d(4, 4, 4, 1.0, 0.6).is_err());
        assert!(YeeGrid::new_3d(4, 4, 4, 1.0, 0.5).is_ok());
        assert!(YeeGrid::new_1d(4, 1.0, 1.0).is_ok());
    }

    #[test]
    fn one_d_requires_unit_transverse() {
        assert!(YeeGrid::new(8, 2, 1, 1.0, 0.5, Dimensionality::One).is_err());
    }

    #[test]
    fn snap_prefers_nearest_staggered_sample() {
        let g = YeeGrid::new_3d(10, 10, 10, 1.0, 0.5).unwrap();
        // Ez samples sit at (i, j, k + 1/2).
        let idx = g.snap_to_e_sample(Axis::Z, [3.2, 4.4, 4.9]).unwrap();
        assert_eq!(idx, [3, 4, 4]);
        let idx = g.snap_to_e_sample(Axis::Z, [3.2, 4.4, 5.6]).unwrap();
        assert_eq!(idx, [3, 4, 5]);
    }
}
