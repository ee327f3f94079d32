//! Transfer matrices for 1D multilayer stacks at normal incidence.
//!
//! Provides the closed-form side of every 1D cross-check: stack reflection
//! and transmission, total fields under plane-wave incidence, and the exact
//! layered-medium Green's function built from one-sided solutions
//! g(x, x') = -u_L(x_<) u_R(x_>) / W, with W the Wronskian of the solutions
//! satisfying the left and right end conditions. Kept deliberately separate
//! from the finite-difference frequency-domain solver so the two routes stay
//! independent.

use crate::error::{Error, Result};
use crate::media::{permittivity, LorentzDrudeParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EndCondition {
    Open,
    Pec { position: f64 },
}

/// One homogeneous layer [start, end) of a dispersive medium.
#[derive(Debug, Clone)]
pub struct Layer1D {
    pub start: f64,
    pub end: f64,
    pub medium: LorentzDrudeParams,
}

/// Layered 1D scene: non-overlapping ordered layers embedded in vacuum,
/// terminated by radiation conditions or PEC walls.
#[derive(Debug, Clone)]
pub struct Stack1D {
    pub layers: Vec<Layer1D>,
    pub left: EndCondition,
    pub right: EndCondition,
}

#[derive(Debug, Clone, Copy)]
struct Region {
    x0: f64,
    x1: f64,
    k: Complex64,
}

/// Wave coefficients referenced at a region's start:
/// u(x) = a e^{ik(x-x0)} + b e^{-ik(x-x0)}.
#[derive(Debug, Clone, Copy)]
struct Coef {
    a: Complex64,
    b: Complex64,
}

impl Coef {
    fn eval(&self, k: Complex64, dx: f64) -> (Complex64, Complex64) {
        let ph = (Complex64::i() * k * dx).exp();
        let u = self.a * ph + self.b / ph;
        let du = Complex64::i() * k * (self.a * ph - self.b / ph);
        (u, du)
    }
}

impl Stack1D {
    pub fn open(layers: Vec<Layer1D>) -> Self {
        Self { layers, left: EndCondition::Open, right: EndCondition::Open }
    }

    pub fn validate(&self) -> Result<()> {
        let mut prev_end = f64::NEG_INFINITY;
        for l in &self.layers {
            if l.end <= l.start {
                return Err(Error::InvalidArgument("layer end must exceed start".into()));
            }
            if l.start < prev_end {
                return Err(Error::InvalidArgument("layers must be ordered and disjoint".into()));
            }
            prev_end = l.end;
            l.medium.validate()?;
        }
        if let EndCondition::Pec { position } = self.left {
            if self.layers.first().map(|l| l.start <= position).unwrap_or(false) {
                return Err(Error::InvalidArgument("left PEC wall must sit in vacuum".into()));
            }
        }
        if let EndCondition::Pec { position } = self.right {
            if self.layers.last().map(|l| l.end >= position).unwrap_or(false) {
                return Err(Error::InvalidArgument("right PEC wall must sit in vacuum".into()));
            }
        }
        Ok(())
    }

    /// Piecewise-constant wavenumber regions covering the scene at omega.
    /// The first and last regions are the (possibly wall-bounded) vacuum
    /// ends; their x0/x1 carry the reference points.
    fn regions(&self, omega: f64) -> Result<Vec<Region>> {
        self.validate()?;
        let k0 = Complex64::new(omega, 0.0);
        let first_edge = match (self.layers.first(), self.left) {
            (_, EndCondition::Pec { position }) => position,
            (Some(l), _) => l.start,
            (None, EndCondition::Open) => 0.0,
        };
        let last_edge = match (self.layers.last(), self.right) {
            (_, EndCondition::Pec { position }) => position,
            (Some(l), _) => l.end,
            (None, EndCondition::Open) => 0.0,
        };
        let mut regions = vec![Region { x0: first_edge, x1: first_edge, k: k0 }];
        let mut cursor = first_edge;
        for l in &self.layers {
            if l.start > cursor {
                regions.push(Region { x0: cursor, x1: l.start, k: k0 });
            }
            let eps = permittivity(&l.medium, omega)?;
            let n = eps.sqrt();
            let n = if n.im < 0.0 { -n } else { n };
            regions.push(Region { x0: l.start, x1: l.end, k: k0 * n });
            cursor = l.end;
        }
        if last_edge > cursor {
            regions.push(Region { x0: cursor, x1: last_edge, k: k0 });
        }
        regions.push(Region { x0: last_edge, x1: last_edge, k: k0 });
        // Merge the degenerate first/last markers into usable end regions.
        regions[0].x1 = regions[1].x0;
        regions[0].x0 = f64::NEG_INFINITY;
        let n = regions.len();
        regions[n - 1].x0 = regions[n - 2].x1;
        regions[n - 1].x1 = f64::INFINITY;
        Ok(regions)
    }

    /// Solution satisfying the left end condition, propagated rightward;
    /// one Coef per region.
    fn solution_from_left(&self, regions: &[Region]) -> Vec<Coef> {
        let mut coefs = Vec::with_capacity(regions.len());
        let first = match self.left {
            EndCondition::Open => Coef { a: Complex64::new(0.0, 0.0), b: Complex64::new(1.0, 0.0) },
            EndCondition::Pec { .. } => {
                Coef { a: Complex64::new(1.0, 0.0), b: Complex64::new(-1.0, 0.0) }
            }
        };
        coefs.push(first);
        for j in 0..regions.len() - 1 {
            let r = &regions[j];
            let width = if r.x0.is_finite() { r.x1 - r.x0 } else { 0.0 };
            let (u, du) = coefs[j].eval(r.k, width);
            let k_next = regions[j + 1].k;
            let a = (u + du / (Complex64::i() * k_next)) / 2.0;
            let b = (u - du / (Complex64::i() * k_next)) / 2.0;
            coefs.push(Coef { a, b });
        }
        coefs
    }

    /// Solution satisfying the right end condition, propagated leftward.
    fn solution_from_right(&self, regions: &[Region]) -> Vec<Coef> {
        let n = regions.len();
        let mut coefs = vec![Coef { a: Complex64::new(0.0, 0.0), b: Complex64::new(0.0, 0.0) }; n];
        coefs[n - 1] = match self.right {
            EndCondition::Open => Coef { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) },
            EndCondition::Pec { .. } => {
                Coef { a: Complex64::new(1.0, 0.0), b: Complex64::new(-1.0, 0.0) }
            }
        };
        for j in (0..n - 1).rev() {
            let r = &regions[j];
            let next = &coefs[j + 1];
            // Match u, u' at x1 of region j (= x0 of region j+1).
            let (u, du) = next.eval(regions[j + 1].k, 0.0);
            let width = if r.x0.is_finite() { r.x1 - r.x0 } else { 0.0 };
            let ph = (Complex64::i() * r.k * width).exp();
            let a = (u + du / (Complex64::i() * r.k)) / 2.0 / ph;
            let b = (u - du / (Complex64::i() * r.k)) / 2.0 * ph;
            coefs[j] = Coef { a, b };
        }
        coefs
    }

    fn locate(&self, regions: &[Region], x: f64) -> usize {
        for (j, r) in regions.iter().enumerate() {
            if x < r.x1 || j == regions.len() - 1 {
                return j;
            }
        }
        regions.len() - 1
    }

    fn eval_at(&self, regions: &[Region], coefs: &[Coef], x: f64) -> (Complex64, Complex64) {
        let j = self.locate(regions, x);
        let r = &regions[j];
        let x_ref = if r.x0.is_finite() { r.x0 } else { r.x1 };
        coefs[j].eval(r.k, x - x_ref)
    }

    /// Exact layered-medium Green's function of
    /// (d^2/dx^2 + omega^2 eps(x)) g = -delta(x - x'), so vacuum gives
    /// g = i e^{i k |x - x'|} / (2k) and Im g(x, x) = 1/(2k).
    pub fn greens(&self, x: f64, x_src: f64, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) {
            return Err(Error::InvalidArgument("greens requires omega > 0".into()));
        }
        let regions = self.regions(omega)?;
        let ul = self.solution_from_left(&regions);
        let ur = self.solution_from_right(&regions);
        let (lo, hi) = if x <= x_src { (x, x_src) } else { (x_src, x) };
        let (ul_lo, _) = self.eval_at(&regions, &ul, lo);
        let (ur_hi, _) = self.eval_at(&regions, &ur, hi);
        // Wronskian is x-independent; evaluate both solutions at x_src.
        let (ul_s, dul_s) = self.eval_at(&regions, &ul, x_src);
        let (ur_s, dur_s) = self.eval_at(&regions, &ur, x_src);
        let w = ul_s * dur_s - dul_s * ur_s;
        Ok(-ul_lo * ur_hi / w)
    }

    /// Relative local density factor F = Im g(x_a, x_a) / (1 / (2 omega)),
    /// the 1D Purcell factor of the scene.
    pub fn ldos_relative(&self, x_a: f64, omega: f64) -> Result<f64> {
        let g = self.greens(x_a, x_a, omega)?;
        Ok(g.im * 2.0 * omega)
    }

    /// Total field at x for a unit plane wave entering from one open end.
    /// `from_left` selects the incidence channel; the far end may be a PEC
    /// wall (total internal reflection channel).
    pub fn total_field_at(&self, x: f64, omega: f64, from_left: bool) -> Result<Complex64> {
        let entry = if from_left { self.left } else { self.right };
        if entry != EndCondition::Open {
            return Err(Error::InvalidArgument(
                "the incidence side must be an open end".into(),
            ));
        }
        let regions = self.regions(omega)?;
        if from_left {
            // u_R carries (1, 0) at the right end: transmitted-only, so it
            // is the left-incidence scattering solution up to a constant.
            let ur = self.solution_from_right(&regions);
            // Normalize so the incoming amplitude in the leftmost region is 1.
            let incoming = ur[0].a;
            let (u, _) = self.eval_at(&regions, &ur, x);
            Ok(u / incoming)
        } else {
            let ul = self.solution_from_left(&regions);
            let incoming = ul[ul.len() - 1].b;
            let (u, _) = self.eval_at(&regions, &ul, x);
            Ok(u / incoming)
        }
    }

    /// Stack reflection coefficient seen from an open end, phase-referenced
    /// at the outermost layer edge on that side.
    pub fn reflection(&self, omega: f64, from_left: bool) -> Result<Complex64> {
        let regions = self.regions(omega)?;
        if from_left {
            let ur = self.solution_from_right(&regions);
            Ok(ur[0].b / ur[0].a)
        } else {
            let ul = self.solution_from_left(&regions);
            let last = ul[ul.len() - 1];
            Ok(last.a / last.b)
        }
    }

    /// Stack amplitude transmission from one open end to the other.
    pub fn transmission(&self, omega: f64, from_left: bool) -> Result<Complex64> {
        let regions = self.regions(omega)?;
        if from_left {
            let ur = self.solution_from_right(&regions);
            Ok(Complex64::new(1.0, 0.0) / ur[0].a)
        } else {
            let ul = self.solution_from_left(&regions);
            Ok(Complex64::new(1.0, 0.0) / ul[ul.len() - 1].b)
        }
    }
}
