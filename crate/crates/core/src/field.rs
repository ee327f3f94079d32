//! Complex-valued field storage on the staggered lattice.

use crate::grid::{Axis, YeeGrid};
use num_complex::Complex64;

/// Flat structure-of-arrays scalar field over the grid, one per component.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub data: Vec<Complex64>,
    ny: usize,
    nz: usize,
}

impl ScalarField {
    pub fn zeros(grid: &YeeGrid) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); grid.cell_count()],
            ny: grid.ny,
            nz: grid.nz,
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.ny + j) * self.nz + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        let idx = self.idx(i, j, k);
        self.data[idx] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
    }
}

/// Vector field: one scalar field per Cartesian component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField(pub [ScalarField; 3]);

impl VectorField {
    pub fn zeros(grid: &YeeGrid) -> Self {
        Self([
            ScalarField::zeros(grid),
            ScalarField::zeros(grid),
            ScalarField::zeros(grid),
        ])
    }

    #[inline]
    pub fn comp(&self, axis: Axis) -> &ScalarField {
        &self.0[axis.index()]
    }

    #[inline]
    pub fn comp_mut(&mut self, axis: Axis) -> &mut ScalarField {
        &mut self.0[axis.index()]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }
}

/// Full electromagnetic state of one grid: E, H, D plus the two polarization
/// histories needed by the dispersive update. `step` counts completed
/// iterations; E and D sit at integer step n, H at n - 1/2.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub e: VectorField,
    pub h: VectorField,
    pub d: VectorField,
    pub p_drude: VectorField,
    pub p_drude_prev: VectorField,
    pub p_lorentz: VectorField,
    pub p_lorentz_prev: VectorField,
    pub step: u64,
}

impl FieldState {
    pub fn new(grid: &YeeGrid) -> Self {
        Self {
            e: VectorField::zeros(grid),
            h: VectorField::zeros(grid),
            d: VectorField::zeros(grid),
            p_drude: VectorField::zeros(grid),
            p_drude_prev: VectorField::zeros(grid),
            p_lorentz: VectorField::zeros(grid),
            p_lorentz_prev: VectorField::zeros(grid),
            step: 0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.e.max_abs().max(self.h.max_abs()).max(self.d.max_abs())
    }

    /// Scale every field linearly (the state is linear in its sources).
    pub fn scale(&mut self, factor: Complex64) {
        for vf in [
            &mut self.e,
            &mut self.h,
            &mut self.d,
            &mut self.p_drude,
            &mut self.p_drude_prev,
            &mut self.p_lorentz,
            &mut self.p_lorentz_prev,
        ] {
            for f in vf.0.iter_mut() {
                for v in f.data.iter_mut() {
                    *v *= factor;
                }
            }
        }
    }

    /// self += factor * other (componentwise over every stored array).
    pub fn add_scaled(&mut self, other: &FieldState, factor: Complex64) {
        let pairs: [(&mut VectorField, &VectorField); 7] = [
            (&mut self.e, &other.e),
            (&mut self.h, &other.h),
            (&mut self.d, &other.d),
            (&mut self.p_drude, &other.p_drude),
            (&mut self.p_drude_prev, &other.p_drude_prev),
            (&mut self.p_lorentz, &other.p_lorentz),
            (&mut self.p_lorentz_prev, &other.p_lorentz_prev),
        ];
        for (dst, src) in pairs {
            for (fd, fs) in dst.0.iter_mut().zip(src.0.iter()) {
                for (a, b) in fd.data.iter_mut().zip(fs.data.iter()) {
                    *a += factor * b;
                }
            }
        }
    }
}
