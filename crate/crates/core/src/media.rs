//! Lorentz-Drude dispersive media: analytic permittivity and the ADE
//! polarization recursions that close Ampere's law.

use crate::error::{Error, Result};
use crate::grid::YeeGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One Drude pole plus one Lorentz pole pair, e^{-i omega t} convention.
/// All frequencies and rates are rad/m in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzDrudeParams {
    pub eps_inf: f64,
    pub omega_p_drude: f64,
    pub gamma_drude: f64,
    pub omega_p_lorentz: f64,
    pub omega_0_lorentz: f64,
    pub gamma_lorentz: f64,
}

impl LorentzDrudeParams {
    pub const VACUUM: Self = Self {
        eps_inf: 1.0,
        omega_p_drude: 0.0,
        gamma_drude: 0.0,
        omega_p_lorentz: 0.0,
        omega_0_lorentz: 0.0,
        gamma_lorentz: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        if self.eps_inf < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "eps_inf must be >= 1, got {}",
                self.eps_inf
            )));
        }
        for (name, v) in [
            ("omega_p_drude", self.omega_p_drude),
            ("gamma_drude", self.gamma_drude),
            ("omega_p_lorentz", self.omega_p_lorentz),
            ("omega_0_lorentz", self.omega_0_lorentz),
            ("gamma_lorentz", self.gamma_lorentz),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_vacuum(&self) -> bool {
        self.eps_inf == 1.0 && self.omega_p_drude == 0.0 && self.omega_p_lorentz == 0.0
    }

    pub fn is_lossy(&self) -> bool {
        (self.gamma_drude > 0.0 && self.omega_p_drude > 0.0)
            || (self.gamma_lorentz > 0.0 && self.omega_p_lorentz > 0.0)
    }
}

/// Relative permittivity
/// eps(w) = eps_inf - wpD^2/(w^2 + i gD w) + wpL^2/(w0L^2 - w^2 - i gL w).
pub fn permittivity(params: &LorentzDrudeParams, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "permittivity requires omega > 0, got {omega}"
        )));
    }
    let w = Complex64::new(omega, 0.0);
    let i = Complex64::i();
    let mut eps = Complex64::new(params.eps_inf, 0.0);
    if params.omega_p_drude != 0.0 {
        eps -= params.omega_p_drude.powi(2) / (w * w + i * params.gamma_drude * w);
    }
    if params.omega_p_lorentz != 0.0 {
        eps += params.omega_p_lorentz.powi(2)
            / (Complex64::new(params.omega_0_lorentz.powi(2), 0.0) - w * w
                - i * params.gamma_lorentz * w);
    }
    Ok(eps)
}

/// Susceptibility chi(w) = eps(w) - 1 (includes the eps_inf - 1 background).
pub fn susceptibility(params: &LorentzDrudeParams, omega: f64) -> Result<Complex64> {
    Ok(permittivity(params, omega)? - 1.0)
}

/// Precomputed ADE recursion coefficients for one medium at a fixed dt.
///
/// P_L^{n+1} = (c1_l P_L^n + c2_l P_L^{n-1} + c3_l E^n)
/// P_D^{n+1} = (c1_d P_D^n + c2_d P_D^{n-1} + c3_d E^n)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdeCoefficients {
    pub c1_l: f64,
    pub c2_l: f64,
    pub c3_l: f64,
    pub c1_d: f64,
    pub c2_d: f64,
    pub c3_d: f64,
    pub inv_eps_inf: f64,
}

impl AdeCoefficients {
    pub fn new(params: &LorentzDrudeParams, dt: f64) -> Self {
        // eps0 = 1 in natural units; kept in the comments for SI readability.
        let denom_l = 1.0 + params.gamma_lorentz * dt / 2.0;
        let denom_d = 1.0 + params.gamma_drude * dt / 2.0;
        Self {
            c1_l: (2.0 - params.omega_0_lorentz.powi(2) * dt * dt) / denom_l,
            c2_l: -(1.0 - params.gamma_lorentz * dt / 2.0) / denom_l,
            c3_l: params.omega_p_lorentz.powi(2) * dt * dt / denom_l,
            c1_d: 2.0 / denom_d,
            c2_d: -(1.0 - params.gamma_drude * dt / 2.0) / denom_d,
            c3_d: params.omega_p_drude.powi(2) * dt * dt / denom_d,
            inv_eps_inf: 1.0 / params.eps_inf,
        }
    }
}

/// One Lorentz-pole step:
/// P^{n+1} = [(2 - w0^2 dt^2) P^n - (1 - gL dt/2) P^{n-1} + eps0 wpL^2 dt^2 E^n]
///           / (1 + gL dt/2)
pub fn advance_p_lorentz(
    p_n: Complex64,
    p_prev: Complex64,
    e_n: Complex64,
    params: &LorentzDrudeParams,
    dt: f64,
) -> Complex64 {
    let c = AdeCoefficients::new(params, dt);
    c.c1_l * p_n + c.c2_l * p_prev + c.c3_l * e_n
}

/// One Drude-pole step:
/// P^{n+1} = [2 P^n - (1 - gD dt/2) P^{n-1} + eps0 wpD^2 dt^2 E^n] / (1 + gD dt/2)
pub fn advance_p_drude(
    p_n: Complex64,
    p_prev: Complex64,
    e_n: Complex64,
    params: &LorentzDrudeParams,
    dt: f64,
) -> Complex64 {
    let c = AdeCoefficients::new(params, dt);
    c.c1_d * p_n + c.c2_d * p_prev + c.c3_d * e_n
}

/// Constitutive recovery E = (D - P_D - P_L) / (eps0 eps_inf).
pub fn e_from_d(
    d: Complex64,
    p_drude: Complex64,
    p_lorentz: Complex64,
    eps_inf: f64,
) -> Result<Complex64> {
    if !(eps_inf > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps_inf must be positive, got {eps_inf}"
        )));
    }
    Ok((d - p_drude - p_lorentz) / eps_inf)
}

/// Per-cell medium assignment over a grid. Index 0 is always vacuum.
#[derive(Debug, Clone)]
pub struct MediumMap {
    pub media: Vec<LorentzDrudeParams>,
    pub cell_index: Vec<u16>,
    pub coefficients: Vec<AdeCoefficients>,
    uniform_vacuum: bool,
}

impl MediumMap {
    pub fn vacuum(grid: &YeeGrid) -> Self {
        Self {
            media: vec![LorentzDrudeParams::VACUUM],
            cell_index: vec![0; grid.cell_count()],
            coefficients: vec![AdeCoefficients::new(&LorentzDrudeParams::VACUUM, grid.dt)],
            uniform_vacuum: true,
        }
    }

    /// Build from a material table and a per-cell assignment function
    /// evaluated at cell centers.
    pub fn build(
        grid: &YeeGrid,
        media: Vec<LorentzDrudeParams>,
        mut assign: impl FnMut([f64; 3]) -> u16,
    ) -> Result<Self> {
        for m in &media {
            m.validate()?;
        }
        let mut cell_index = vec![0u16; grid.cell_count()];
        let mut any = false;
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                for k in 0..grid.nz {
                    let center = [
                        (i as f64 + 0.5) * grid.dx,
                        (j as f64 + 0.5) * grid.dx,
                        (k as f64 + 0.5) * grid.dx,
                    ];
                    let m = assign(center);
                    if m as usize >= media.len() {
                        return Err(Error::InvalidArgument(format!(
                            "material index {m} out of range ({} media)",
                            media.len()
                        )));
                    }
                    if m != 0 {
                        any = true;
                    }
                    cell_index[grid.idx(i, j, k)] = m;
                }
            }
        }
        let coefficients = media.iter().map(|m| AdeCoefficients::new(m, grid.dt)).collect();
        Ok(Self { media, cell_index, coefficients, uniform_vacuum: !any })
    }

    pub fn is_uniform_vacuum(&self) -> bool {
        self.uniform_vacuum
    }

    #[inline]
    pub fn medium_at(&self, flat_idx: usize) -> &LorentzDrudeParams {
        &self.media[self.cell_index[flat_idx] as usize]
    }

    /// Rebuild the dt-dependent coefficient table (after a dt change).
    pub fn refresh_coefficients(&mut self, dt: f64) {
        self.coefficients = self.media.iter().map(|m| AdeCoefficients::new(m, dt)).collect();
    }
}
