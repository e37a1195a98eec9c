//! Pointer-state families: Gaussian, squeezed, and the faithful family.
//!
//! Units throughout: ħ = m = 1.
//!
//! The Gaussian and squeezed post-interaction states share one shape,
//!
//! ```text
//! ψ±(x) = (2π s²)^(-1/4) exp[-(x ∓ gt/2)² / (4 σ₀ s) ± i g x]
//! ```
//!
//! with a complex width `s` that encodes free spreading (and, for the
//! squeezed pointer, the initial position-momentum correlation `C`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, ShiftMode, Wavefunction};

/// Number of spatial widths a window must cover beyond the pointer center.
pub const WINDOW_WIDTHS: f64 = 8.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be non-negative and finite, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

/// The two apparatus branches after the interaction: `ψ₊` correlates with
/// `|↑⟩ₓ` (upper channel), `ψ₋` with `|↓⟩ₓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerPair {
    pub plus: Wavefunction,
    pub minus: Wavefunction,
}

impl PointerPair {
    pub fn grid(&self) -> &Grid {
        self.plus.grid()
    }

    /// Larger boundary mass of the two branches.
    pub fn truncation(&self) -> Result<f64> {
        Ok(self.plus.truncation()?.max(self.minus.truncation()?))
    }

    pub fn check_window(&self) -> Result<f64> {
        Ok(self.plus.check_window()?.max(self.minus.check_window()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub sigma0: f64,
    pub g: f64,
    pub t: f64,
}

impl GaussianParams {
    pub fn new(sigma0: f64, g: f64, t: f64) -> Result<Self> {
        check_positive("sigma0", sigma0)?;
        check_finite("g", g)?;
        check_nonnegative("t", t)?;
        Ok(Self { sigma0, g, t })
    }

    /// `s_t = σ₀(1 + i t / (2σ₀²))`.
    pub fn complex_width(&self) -> Complex64 {
        self.sigma0 * Complex64::new(1.0, self.t / (2.0 * self.sigma0 * self.sigma0))
    }

    /// Variance of `|ψ±|²`: `σ₀²(1 + t²/(4σ₀⁴))`.
    pub fn spread_sq(&self) -> f64 {
        let s2 = self.sigma0 * self.sigma0;
        s2 * (1.0 + self.t * self.t / (4.0 * s2 * s2))
    }

    /// The literal spread with `t⁴`. Disagrees with quadrature of the
    /// post-interaction states for `t ≠ 1`; kept for the regression column.
    pub fn spread_sq_paper_literal(&self) -> f64 {
        let s2 = self.sigma0 * self.sigma0;
        s2 * (1.0 + self.t.powi(4) / (4.0 * s2 * s2))
    }

    /// Momentum kick `k_x = g`.
    pub fn kick(&self) -> f64 {
        self.g
    }

    /// Branch centers sit at `±gt/2`.
    pub fn center_offset(&self) -> f64 {
        self.g * self.t / 2.0
    }

    pub fn required_half_width(&self) -> f64 {
        self.center_offset().abs() + WINDOW_WIDTHS * self.spread_sq().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedParams {
    pub sigma0: f64,
    pub g: f64,
    pub t: f64,
    pub c: f64,
}

impl SqueezedParams {
    pub fn new(sigma0: f64, g: f64, t: f64, c: f64) -> Result<Self> {
        check_positive("sigma0", sigma0)?;
        check_finite("g", g)?;
        check_nonnegative("t", t)?;
        check_finite("C", c)?;
        Ok(Self { sigma0, g, t, c })
    }

    /// `σ₀(1 + iC)`.
    pub fn initial_complex_width(&self) -> Complex64 {
        self.sigma0 * Complex64::new(1.0, self.c)
    }

    /// `s'_t = σ₀(1 + iC) + i t / (2σ₀)`: free spreading of
    /// `exp[-x² / (4σ₀²(1 + iC))]` for a time `t`.
    pub fn complex_width(&self) -> Complex64 {
        self.initial_complex_width() + I * (self.t / (2.0 * self.sigma0))
    }

    /// `C + t/(2σ₀²)`, the correlation after spreading.
    pub fn evolved_correlation(&self) -> f64 {
        self.c + self.t / (2.0 * self.sigma0 * self.sigma0)
    }

    /// Variance of the initial `|ψ₀|²`: `σ₀²(1 + C²)`.
    pub fn initial_spread_sq(&self) -> f64 {
        self.sigma0 * self.sigma0 * (1.0 + self.c * self.c)
    }

    /// Variance of `|ψ±|²`: `σ₀²(1 + (C + t/(2σ₀²))²)`.
    pub fn spread_sq(&self) -> f64 {
        let cc = self.evolved_correlation();
        self.sigma0 * self.sigma0 * (1.0 + cc * cc)
    }

    pub fn center_offset(&self) -> f64 {
        self.g * self.t / 2.0
    }

    pub fn required_half_width(&self) -> f64 {
        let widest = self.spread_sq().max(self.initial_spread_sq()).sqrt();
        self.center_offset().abs() + WINDOW_WIDTHS * widest
    }
}

/// Samples `(2π s²)^(-1/4) exp[-(x - center)² / (4σ₀ s) + i k x]`.
fn chirped_gaussian(grid: Grid, sigma0: f64, s: Complex64, center: f64, k: f64) -> Wavefunction {
    let prefactor = (2.0 * PI * s * s).powf(-0.25);
    let inv = (4.0 * sigma0 * s).inv();
    Wavefunction::from_fn(grid, |x| {
        let d = x - center;
        prefactor * (-(d * d) * inv + I * (k * x)).exp()
    })
}

/// Initial Gaussian pointer `(2πσ₀²)^(-1/4) exp(-x²/(4σ₀²))`.
pub fn gaussian_initial(p: &GaussianParams, grid: Grid) -> Result<Wavefunction> {
    let psi = chirped_gaussian(grid, p.sigma0, Complex64::new(p.sigma0, 0.0), 0.0, 0.0);
    psi.check_window()?;
    Ok(psi)
}

/// Post-interaction Gaussian branches without the window guard.
pub fn gaussian_post_sampled(p: &GaussianParams, grid: Grid) -> PointerPair {
    let s = p.complex_width();
    let c = p.center_offset();
    PointerPair {
        plus: chirped_gaussian(grid, p.sigma0, s, c, p.kick()),
        minus: chirped_gaussian(grid, p.sigma0, s, -c, -p.kick()),
    }
}

pub fn gaussian_post(p: &GaussianParams, grid: Grid) -> Result<PointerPair> {
    let pair = gaussian_post_sampled(p, grid);
    pair.check_window()?;
    Ok(pair)
}

/// Initial squeezed pointer `∝ exp[-x² / (4σ₀²(1 + iC))]`, renormalized on
/// the grid.
pub fn squeezed_initial(p: &SqueezedParams, grid: Grid) -> Result<Wavefunction> {
    let psi = chirped_gaussian(grid, p.sigma0, p.initial_complex_width(), 0.0, 0.0).normalize()?;
    psi.check_window()?;
    Ok(psi)
}

/// Post-interaction squeezed branches, renormalized, without the window guard.
///
/// The modulus of each branch is smooth, but at strong correlation the phase
/// chirp can oscillate faster than the grid resolves. All measures here use
/// `|ψ±|` and the product `ψ₊*ψ₋`, in which the chirps cancel, so they stay
/// accurate regardless.
pub fn squeezed_post_sampled(p: &SqueezedParams, grid: Grid) -> Result<PointerPair> {
    let s = p.complex_width();
    let c = p.center_offset();
    Ok(PointerPair {
        plus: chirped_gaussian(grid, p.sigma0, s, c, p.g).normalize()?,
        minus: chirped_gaussian(grid, p.sigma0, s, -c, -p.g).normalize()?,
    })
}

pub fn squeezed_post(p: &SqueezedParams, grid: Grid) -> Result<PointerPair> {
    let pair = squeezed_post_sampled(p, grid)?;
    pair.check_window()?;
    Ok(pair)
}

/// Parameters of the faithful family: `γ₁` (with `γ₂ = γ₁*`), the phase `θ`,
/// the shift `s`, and the sequence index `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaithfulParams {
    pub gamma1: Complex64,
    pub theta: f64,
    pub s: f64,
    pub m: i64,
}

impl FaithfulParams {
    pub fn new(gamma1: Complex64, theta: f64, s: f64, m: i64) -> Result<Self> {
        check_finite("gamma1.re", gamma1.re)?;
        check_finite("gamma1.im", gamma1.im)?;
        check_finite("theta", theta)?;
        check_positive("s", s)?;
        Ok(Self { gamma1, theta, s, m })
    }

    /// Parameters whose tilt `Re cosh⁻¹(-1/(γ₁+γ₂))` equals `tilt`, using a
    /// real `γ₁ = -1/(2 cosh tilt)`.
    pub fn from_tilt(tilt: f64, theta: f64, s: f64, m: i64) -> Result<Self> {
        check_nonnegative("tilt", tilt)?;
        Self::new(Complex64::new(-0.5 / tilt.cosh(), 0.0), theta, s, m)
    }

    pub fn gamma2(&self) -> Complex64 {
        self.gamma1.conj()
    }

    /// `-1/(γ₁ + γ₂)`, real since `γ₂ = γ₁*`.
    pub fn cosh_argument(&self) -> Result<f64> {
        if self.gamma1.re == 0.0 {
            return Err(Error::Singular("Re(gamma1) = 0 makes -1/(gamma1 + gamma2) undefined"));
        }
        Ok(-1.0 / (2.0 * self.gamma1.re))
    }

    /// `Re cosh⁻¹(-1/(γ₁+γ₂))` on the principal branch.
    pub fn tilt(&self) -> Result<f64> {
        Ok(Complex64::new(self.cosh_argument()?, 0.0).acosh().re)
    }
}

/// `u = ½ cosh⁻¹(-1/(γ₁+γ₂))` on the principal branch (`Re u ≥ 0`).
pub fn faithful_u(p: &FaithfulParams) -> Result<Complex64> {
    Ok(0.5 * Complex64::new(p.cosh_argument()?, 0.0).acosh())
}

/// `ψ₀ = exp[-m·Re cosh⁻¹(-1/(γ₁+γ₂)) + 2imθ]·ψ_m`, renormalized.
///
/// The prefactor does not depend on position, so the output is the seed up
/// to a global complex constant.
pub fn faithful_from_seed(seed: &Wavefunction, p: &FaithfulParams) -> Result<Wavefunction> {
    let tilt = p.tilt()?;
    if p.m == 0 {
        return Ok(seed.clone());
    }
    let m = p.m as f64;
    let factor = Complex64::new(-m * tilt, 2.0 * m * p.theta).exp();
    seed.scale(factor).normalize()
}

/// Post-interaction faithful branches
/// `ψ±(r) = ψ₀(r)·exp[(r ± s)u' - 2i(r ± s)θ]`, `u' = Re cosh⁻¹(-1/(γ₁+γ₂))`,
/// each renormalized.
///
/// The exponential tilt is applied relative to its largest value on the
/// window so that large `u'·r` cannot overflow before normalization.
pub fn faithful_post_states(psi0: &Wavefunction, p: &FaithfulParams) -> Result<PointerPair> {
    let pair = faithful_post_states_sampled(psi0, p)?;
    pair.check_window()?;
    Ok(pair)
}

/// [`faithful_post_states`] without the window check.
pub fn faithful_post_states_sampled(psi0: &Wavefunction, p: &FaithfulParams) -> Result<PointerPair> {
    let tilt = p.tilt()?;
    let grid = *psi0.grid();
    let branch = |sign: f64| -> Result<Wavefunction> {
        let shifted: Vec<f64> = grid.nodes().map(|r| r + sign * p.s).collect();
        let max_exponent = shifted
            .iter()
            .map(|&q| q * tilt)
            .fold(f64::NEG_INFINITY, f64::max);
        let amps = psi0
            .amplitudes()
            .iter()
            .zip(&shifted)
            .map(|(&a, &q)| a * Complex64::new(q * tilt - max_exponent, -2.0 * q * p.theta).exp())
            .collect();
        Wavefunction::new(grid, amps)?
            .normalize()
            .map_err(|_| Error::TiltOverflow { tilt })
    };
    Ok(PointerPair {
        plus: branch(1.0)?,
        minus: branch(-1.0)?,
    })
}

/// `normalize(envelope · e^{iκx})` for a real nonnegative envelope.
pub fn linear_phase_pointer(envelope: &Wavefunction, kappa: f64) -> Result<Wavefunction> {
    let peak = envelope
        .amplitudes()
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    for (i, a) in envelope.amplitudes().iter().enumerate() {
        if a.re < 0.0 || a.im.abs() > 1e-14 * peak.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidEnvelope(i));
        }
    }
    envelope.apply_linear_phase(kappa).normalize()
}

/// Translation coupling: `ψ₊ = ψ(x - s)` (moved up), `ψ₋ = ψ(x + s)`.
pub fn translation_pair(psi: &Wavefunction, s: f64) -> Result<PointerPair> {
    translation_pair_with(psi, s, ShiftMode::Strict)
}

pub fn translation_pair_with(psi: &Wavefunction, s: f64, mode: ShiftMode) -> Result<PointerPair> {
    Ok(PointerPair {
        plus: psi.translate(s, mode)?,
        minus: psi.translate(-s, mode)?,
    })
}

/// Solves `ψ_m = -γ₁e^{2iθ}ψ_{m+1} - γ₂e^{-2iθ}ψ_{m-1}` for `ψ_{m+1}`.
pub fn faithful_sequence_step(
    psi_m: &Wavefunction,
    psi_m_minus_1: &Wavefunction,
    p: &FaithfulParams,
) -> Result<Wavefunction> {
    if p.gamma1 == Complex64::new(0.0, 0.0) {
        return Err(Error::Singular("gamma1 = 0 leaves psi_(m+1) undetermined"));
    }
    if psi_m.grid() != psi_m_minus_1.grid() {
        return Err(Error::GridMismatch);
    }
    let up = p.gamma1 * Complex64::from_polar(1.0, 2.0 * p.theta);
    let down = p.gamma2() * Complex64::from_polar(1.0, -2.0 * p.theta);
    let amps = psi_m
        .amplitudes()
        .iter()
        .zip(psi_m_minus_1.amplitudes())
        .map(|(&cur, &prev)| -(cur + down * prev) / up)
        .collect();
    Wavefunction::new(*psi_m.grid(), amps)
}

/// Normalized Gaussian envelope (real, nonnegative) of standard deviation
/// `width` in `|ψ|²`.
pub fn gaussian_envelope(grid: Grid, width: f64, center: f64) -> Result<Wavefunction> {
    check_positive("width", width)?;
    Wavefunction::from_real(grid, |x| (-(x - center) * (x - center) / (4.0 * width * width)).exp())
        .normalize()
}

/// Normalized triangular envelope of half-width `half_width`.
pub fn triangular_envelope(grid: Grid, half_width: f64, center: f64) -> Result<Wavefunction> {
    check_positive("half_width", half_width)?;
    Wavefunction::from_real(grid, |x| (1.0 - (x - center).abs() / half_width).max(0.0)).normalize()
}
