//! Uniform one-dimensional grids and complex wavefunctions sampled on them.
//!
//! Every integral over the real line is evaluated on a finite window with
//! composite Simpson quadrature. Window truncation is made auditable through
//! [`Wavefunction::boundary_mass`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

/// Outer fraction of the window (per side) inspected by the window guard.
pub const EDGE_FRACTION: f64 = 0.05;

/// Largest boundary mass a constructed pointer may carry.
pub const WINDOW_GUARD: f64 = 1e-8;

/// Largest norm fraction a strict translation may drop off the window.
pub const STRICT_SHIFT_LOSS: f64 = 1e-6;

/// Relative tolerance on `d / h` for a shift to count as a whole node count.
const SHIFT_COMMENSURATE_TOL: f64 = 1e-12;

/// Uniform grid on `[x_min, x_max]` with an odd number of nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min ({x_min}) must be below x_max ({x_max})"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("n = {n} is below 3")));
        }
        if n % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "n = {n} is even; Simpson quadrature needs an odd node count"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid on `[-half_width, half_width]`; the middle node sits at `x = 0`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * (i as f64 / (self.n - 1) as f64)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Index of the node at `x = 0`, if the grid has one.
    pub fn origin_index(&self) -> Option<usize> {
        let h = self.step();
        let i = (-self.x_min / h).round();
        if i < 0.0 || i > (self.n - 1) as f64 {
            return None;
        }
        let i = i as usize;
        (self.node(i).abs() <= 1e-9 * h).then_some(i)
    }

    /// True when the window is mirror-symmetric about the origin.
    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * (self.x_max - self.x_min)
    }

    /// Converts a displacement to a whole node count, rejecting shifts that
    /// would need interpolation.
    pub fn shift_in_nodes(&self, d: f64) -> Result<isize> {
        let h = self.step();
        let ratio = d / h;
        let k = ratio.round();
        if !ratio.is_finite() || (ratio - k).abs() > SHIFT_COMMENSURATE_TOL * k.abs().max(1.0) {
            return Err(Error::IncommensurateShift { shift: d, step: h });
        }
        Ok(k as isize)
    }

    pub fn weights(&self) -> Vec<f64> {
        quad::simpson_weights(self.n, self.step())
    }

    pub fn integrate_real(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        quad::simpson(values, self.step())
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.n);
        quad::simpson(values, self.step())
    }
}

/// Complex amplitudes, one per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    amps: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(grid: Grid, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: amps.len(),
            });
        }
        Ok(Self { grid, amps })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amps = grid.nodes().map(f).collect();
        Self { grid, amps }
    }

    pub fn from_real(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `|ψ(x)|²` at every node.
    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `∫|ψ|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.integrate_real(&self.density())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            amps: self.amps.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(n2.sqrt().recip(), 0.0)))
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `∫ a*(x) b(x) dx`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let products: Vec<Complex64> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(self.grid.integrate(&products))
    }

    /// `∫ |a(x)| |b(x)| dx`.
    pub fn abs_overlap(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let products: Vec<f64> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.norm() * b.norm())
            .collect();
        Ok(self.grid.integrate_real(&products))
    }

    /// Returns `ψ(x - d)`: the profile moved by `+d` along the grid.
    ///
    /// `d` must be a whole number of grid steps. Amplitudes pushed past the
    /// window edge are dropped; in [`ShiftMode::Strict`] the call fails when
    /// that loses more than [`STRICT_SHIFT_LOSS`] of the norm.
    pub fn translate(&self, d: f64, mode: ShiftMode) -> Result<Self> {
        let k = self.grid.shift_in_nodes(d)?;
        let n = self.amps.len() as isize;
        let zero = Complex64::new(0.0, 0.0);
        let amps: Vec<Complex64> = (0..n)
            .map(|i| {
                let src = i - k;
                if (0..n).contains(&src) {
                    self.amps[src as usize]
                } else {
                    zero
                }
            })
            .collect();
        let out = Self {
            grid: self.grid,
            amps,
        };
        if mode == ShiftMode::Strict && k != 0 {
            let before = self.norm_sqr();
            if before > 0.0 {
                let lost = 1.0 - out.norm_sqr() / before;
                if lost >= STRICT_SHIFT_LOSS {
                    return Err(Error::NormLoss {
                        lost,
                        limit: STRICT_SHIFT_LOSS,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by `e^{ikx}` pointwise.
    pub fn apply_linear_phase(&self, k: f64) -> Self {
        if k == 0.0 {
            return self.clone();
        }
        let amps = self
            .grid
            .nodes()
            .zip(&self.amps)
            .map(|(x, &a)| a * Complex64::from_polar(1.0, k * x))
            .collect();
        Self {
            grid: self.grid,
            amps,
        }
    }

    /// Fraction of `∫|ψ|²` lying in the outer `edge_fraction` of the window
    /// on each side, summed over both sides.
    pub fn boundary_mass(&self, edge_fraction: f64) -> Result<f64> {
        if !(edge_fraction > 0.0 && edge_fraction < 0.5) {
            return Err(Error::EdgeFraction(edge_fraction));
        }
        let total = self.norm_sqr();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let intervals = (edge_fraction * (self.amps.len() - 1) as f64 + 1e-9).floor() as usize;
        if intervals == 0 {
            return Ok(0.0);
        }
        let rho = self.density();
        let h = self.grid.step();
        let left = quad::simpson(&rho[..=intervals], h);
        let right = quad::simpson(&rho[rho.len() - 1 - intervals..], h);
        Ok((left + right) / total)
    }

    /// Boundary mass at the default guard fraction.
    pub fn truncation(&self) -> Result<f64> {
        self.boundary_mass(EDGE_FRACTION)
    }

    /// Fails with [`Error::WindowTooSmall`] when the tails reach the window edge.
    pub fn check_window(&self) -> Result<f64> {
        let mass = self.truncation()?;
        if mass > WINDOW_GUARD {
            return Err(Error::WindowTooSmall {
                mass,
                limit: WINDOW_GUARD,
            });
        }
        Ok(mass)
    }

    /// Mean and variance of the position density `|ψ|² / ∫|ψ|²`.
    pub fn position_moments(&self) -> Result<(f64, f64)> {
        let total = self.norm_sqr();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let rho = self.density();
        let xs: Vec<f64> = self.grid.nodes().collect();
        let first: Vec<f64> = rho.iter().zip(&xs).map(|(r, x)| r * x).collect();
        let mean = self.grid.integrate_real(&first) / total;
        let second: Vec<f64> = rho
            .iter()
            .zip(&xs)
            .map(|(r, x)| r * (x - mean) * (x - mean))
            .collect();
        Ok((mean, self.grid.integrate_real(&second) / total))
    }
}

/// How [`Wavefunction::translate`] treats amplitude pushed off the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    Strict,
    Lenient,
}
