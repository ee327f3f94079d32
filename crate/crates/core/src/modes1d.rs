//! 1D verification of the modal reconstruction of Im g: plane-wave
//! scattering channels (radiation loss) plus embedded point-source channels
//! in the lossy regions (absorption loss) rebuild the imaginary part of the
//! layered Green's function.
//!
//! Discrete form at each omega, with k = omega (c = 1):
//!
//!   Im g(x_a, x_a) ~= (1/4k) sum_channels |E_tot(x_a)|^2
//!                   + k^2 sum_n dx Im chi(x_n) |g(x_a, x_n)|^2
//!
//! The channel weight 1/(4k) is fixed once by exact vacuum reconstruction
//! and frozen. Channel fields come from transfer matrices; the absorption
//! sum reuses one frequency-domain solve with the source at x_a (field
//! recorded across the lossy cells stands in for every embedded source by
//! reciprocity), so its quadrature is discretely consistent with the direct
//! Im g from the same solver.

use crate::error::{Error, Result};
use crate::spectral::{greens_im_1d, solve_point_source};
use crate::tmm::{EndCondition, Stack1D};
use num_complex::Complex64;
use rayon::prelude::*;

/// Layered 1D scene with the evaluation point and frequency band.
#[derive(Debug, Clone)]
pub struct Slab1D {
    pub stack: Stack1D,
    pub x_a: f64,
    pub band: (f64, f64),
}

impl Slab1D {
    pub fn validate(&self) -> Result<()> {
        self.stack.validate()?;
        for l in &self.stack.layers {
            if self.x_a >= l.start && self.x_a < l.end {
                return Err(Error::InvalidArgument(
                    "the evaluation point must sit in vacuum".into(),
                ));
            }
        }
        if !(self.band.0 > 0.0 && self.band.1 > self.band.0) {
            return Err(Error::InvalidArgument("band must satisfy 0 < lo < hi".into()));
        }
        Ok(())
    }
}

/// One radiative channel: the total field at x_a for a unit wave incident
/// from an open end.
#[derive(Debug, Clone, Copy)]
pub struct BaMode {
    pub from_left: bool,
    pub field_at_xa: Complex64,
}

/// One absorption channel: quadrature point, its volume weight, and the
/// amplitude i k^2 sqrt(Im chi / pi) g(x_a, x_n).
#[derive(Debug, Clone, Copy)]
pub struct MaMode {
    pub x_n: f64,
    pub weight_dv: f64,
    pub amplitude: Complex64,
}

/// Modes of one kind at a single frequency.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub omega: f64,
    pub ba: Vec<BaMode>,
    pub ma: Vec<MaMode>,
}

/// Radiative channels by transfer matrices: one per open end (two in an
/// open scene, none inside a PEC-closed one).
pub fn ba_modes(slab: &Slab1D, omega: f64) -> Result<ModeSet> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument("ba_modes requires omega > 0".into()));
    }
    slab.validate()?;
    let mut ba = Vec::new();
    if slab.stack.left == EndCondition::Open {
        ba.push(BaMode {
            from_left: true,
            field_at_xa: slab.stack.total_field_at(slab.x_a, omega, true)?,
        });
    }
    if slab.stack.right == EndCondition::Open {
        ba.push(BaMode {
            from_left: false,
            field_at_xa: slab.stack.total_field_at(slab.x_a, omega, false)?,
        });
    }
    Ok(ModeSet { omega, ba, ma: Vec::new() })
}

/// Absorption channels from one point-source solve at x_a. Quadrature
/// points are the solver cells carrying loss (boundary cells enter with
/// their overlap-averaged Im eps, so the lossy layers are tiled exactly).
pub fn ma_modes(slab: &Slab1D, omega: f64, points_per_wavelength: usize) -> Result<ModeSet> {
    slab.validate()?;
    let any_lossy = slab.stack.layers.iter().any(|l| l.medium.is_lossy());
    if !any_lossy {
        return Ok(ModeSet { omega, ba: Vec::new(), ma: Vec::new() });
    }
    let sol = solve_point_source(&slab.stack, slab.x_a, omega, points_per_wavelength)?;
    let k2 = omega * omega;
    let mut ma = Vec::new();
    for (j, eps) in sol.eps.iter().enumerate() {
        if eps.im > 0.0 {
            let chi_i = eps.im; // Im chi = Im eps
            let amplitude =
                Complex64::i() * k2 * (chi_i / std::f64::consts::PI).sqrt() * sol.g[j];
            ma.push(MaMode { x_n: sol.position(j), weight_dv: sol.dx, amplitude });
        }
    }
    Ok(ModeSet { omega, ba: Vec::new(), ma })
}

/// Combine both mode families into the reconstructed Im g(x_a, x_a):
/// divide the weighted sum of squared magnitudes by omega^2 / pi.
pub fn reconstruct_im_g(ba: &ModeSet, ma: &ModeSet, omega: f64) -> Result<f64> {
    if (ba.omega - omega).abs() > 1e-9 * omega || (ma.omega - omega).abs() > 1e-9 * omega {
        return Err(Error::ContractViolation(format!(
            "mode sets at {} and {} combined at omega {}",
            ba.omega, ma.omega, omega
        )));
    }
    let k = omega;
    let norm = omega * omega / std::f64::consts::PI; // hbar omega^2 mu0
    let mut sum = 0.0;
    for m in &ba.ba {
        let term = (norm / (4.0 * k)) * m.field_at_xa.norm_sqr();
        debug_assert!(term >= 0.0);
        sum += term;
    }
    for m in &ma.ma {
        let term = m.weight_dv * m.amplitude.norm_sqr();
        debug_assert!(term >= 0.0);
        sum += term;
    }
    Ok(sum / norm)
}

/// One row of the completeness comparison.
#[derive(Debug, Clone, Copy)]
pub struct CompletenessRow {
    pub omega: f64,
    pub direct: f64,
    pub ba_only: f64,
    pub ba_ma: f64,
    pub rel_error: f64,
}

/// Reconstruction vs direct solve across a frequency grid; frequencies run
/// in parallel, output ordered by omega.
pub fn completeness_scan(
    slab: &Slab1D,
    omegas: &[f64],
    points_per_wavelength: usize,
) -> Result<Vec<CompletenessRow>> {
    omegas
        .par_iter()
        .map(|&omega| {
            let ba = ba_modes(slab, omega)?;
            let ma = ma_modes(slab, omega, points_per_wavelength)?;
            let empty = ModeSet { omega, ba: Vec::new(), ma: Vec::new() };
            let ba_only = reconstruct_im_g(&ba, &empty, omega)?;
            let ba_ma = reconstruct_im_g(&ba, &ma, omega)?;
            let direct = greens_im_1d(&slab.stack, slab.x_a, omega, points_per_wavelength)?;
            Ok(CompletenessRow {
                omega,
                direct,
                ba_only,
                ba_ma,
                rel_error: (ba_ma - direct).abs() / direct.abs().max(f64::MIN_POSITIVE),
            })
        })
        .collect()
}
