//! Formal (`|I|`) and operational (`M`) idealness, the error measure `E`,
//! closed forms for the Gaussian and squeezed pointers, the constrained
//! objective, the stationarity residual, and the faithfulness certificate.
//!
//! For any pair, `|I| = |∫ψ₊*ψ₋| ≤ ∫|ψ₊||ψ₋| = M`, with equality exactly
//! when the pointwise phase of `ψ₊*ψ₋` is constant where both overlap.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ShiftMode, Wavefunction};
use crate::pointer::{FaithfulParams, GaussianParams, PointerPair, SqueezedParams};
use crate::quad;

/// Phase spread (radians) below which a pair is certified faithful.
pub const FAITHFUL_PHASE_TOL: f64 = 1e-6;

/// Default pointwise `|ψ₊||ψ₋|` threshold, relative to its peak.
pub const DEFAULT_MASS_FLOOR: f64 = 1e-6;

/// Tolerance for the two forms of `E` to agree on a mirror-symmetric pair.
const ERROR_MEASURE_SYMMETRY_TOL: f64 = 1e-6;

/// `I = ∫ψ₊*ψ₋ dx`. Its modulus is the formal idealness and its argument the
/// phase `θ` in `I = R e^{iθ}`.
pub fn formal_overlap(psi_plus: &Wavefunction, psi_minus: &Wavefunction) -> Result<Complex64> {
    psi_plus.inner_product(psi_minus)
}

/// `M = ∫|ψ₊||ψ₋| dx`.
pub fn operational_overlap(psi_plus: &Wavefunction, psi_minus: &Wavefunction) -> Result<f64> {
    psi_plus.abs_overlap(psi_minus)
}

/// Both half-line forms of the error measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMeasure {
    /// `∫₀^∞ |ψ₋|²`, clamped to `[0, ½]`.
    pub value: f64,
    /// `∫₀^∞ |ψ₋|²` before clamping.
    pub from_minus: f64,
    /// `∫_{-∞}^0 |ψ₊|²`.
    pub from_plus: f64,
    /// Whether the pair is a mirror image (`|ψ₊(x)| = |ψ₋(-x)|`), in which
    /// case both forms were required to agree.
    pub symmetric: bool,
}

impl ErrorMeasure {
    pub fn forms_agree(&self) -> bool {
        (self.from_minus - self.from_plus).abs() <= ERROR_MEASURE_SYMMETRY_TOL
    }
}

/// `E = ∫₀^∞|ψ₋|² dx = ∫_{-∞}^0|ψ₊|² dx` with `ψ₊` the upper-channel state.
pub fn error_measure(psi_plus: &Wavefunction, psi_minus: &Wavefunction) -> Result<ErrorMeasure> {
    let grid = *psi_plus.grid();
    if grid != *psi_minus.grid() {
        return Err(Error::GridMismatch);
    }
    let origin = grid.origin_index().ok_or(Error::NoOriginNode)?;
    let h = grid.step();
    let rho_plus = psi_plus.density();
    let rho_minus = psi_minus.density();
    let from_minus = quad::simpson(&rho_minus[origin..], h);
    let from_plus = quad::simpson(&rho_plus[..=origin], h);

    let symmetric = grid.is_symmetric() && {
        let peak = rho_plus.iter().chain(&rho_minus).fold(0.0, |a: f64, &b| a.max(b));
        let n = rho_plus.len();
        (0..n).all(|i| (rho_plus[i] - rho_minus[n - 1 - i]).abs() <= 1e-8 * peak)
    };
    if symmetric && (from_minus - from_plus).abs() > ERROR_MEASURE_SYMMETRY_TOL {
        return Err(Error::ErrorMeasureMismatch {
            from_minus,
            from_plus,
        });
    }
    Ok(ErrorMeasure {
        value: from_minus.clamp(0.0, 0.5),
        from_minus,
        from_plus,
        symmetric,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianClosedForms {
    pub abs_i: f64,
    /// With the spread `σ₀²(1 + t²/(4σ₀⁴))`.
    pub m: f64,
    /// With the literal `σ₀²(1 + t⁴/(4σ₀⁴))`.
    pub m_paper_literal: f64,
}

pub fn gaussian_closed_forms(p: &GaussianParams) -> GaussianClosedForms {
    let (g, t, s0) = (p.g, p.t, p.sigma0);
    let sep = g * g * t * t / 8.0;
    GaussianClosedForms {
        abs_i: (-sep / (s0 * s0) - 2.0 * g * g * s0 * s0).exp(),
        m: (-sep / p.spread_sq()).exp(),
        m_paper_literal: (-sep / p.spread_sq_paper_literal()).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedClosedForms {
    /// `exp[-g²t²/(8σ₀²) - 2g²σ₀²(1 + C²) - g²Ct]`.
    pub abs_i: f64,
    pub m: f64,
    /// Literal form: the cross term reads `2g²σ₀²·Ct/σ₀² = 2g²Ct`.
    pub abs_i_paper_literal: f64,
}

pub fn squeezed_closed_forms(p: &SqueezedParams) -> SqueezedClosedForms {
    let (g, t, s0, c) = (p.g, p.t, p.sigma0, p.c);
    let g2 = g * g;
    let s02 = s0 * s0;
    let drift = g2 * t * t / (8.0 * s02);
    let cc = p.evolved_correlation();
    SqueezedClosedForms {
        abs_i: (-drift - 2.0 * g2 * s02 * (1.0 + c * c) - g2 * c * t).exp(),
        m: (-g2 * t * t / (8.0 * s02 * (1.0 + cc * cc))).exp(),
        abs_i_paper_literal: (-drift - 2.0 * g2 * s02 * (1.0 + c * c + c * t / s02)).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub is_faithful: bool,
    /// Largest circular deviation of `arg(ψ₊*ψ₋)` from the weighted mean phase.
    pub phase_dev: f64,
    /// Overlap-weighted circular mean phase; equals `arg I`.
    pub mean_phase: f64,
    /// Nodes above the threshold.
    pub support: usize,
}

/// Tests the equality condition `M = |I|`: a constant phase of `ψ₊*ψ₋` on the
/// nodes where `|ψ₊||ψ₋|` exceeds `mass_floor` times its peak.
pub fn faithfulness_certificate(
    psi_plus: &Wavefunction,
    psi_minus: &Wavefunction,
    mass_floor: f64,
) -> Result<Certificate> {
    if !(mass_floor > 0.0 && mass_floor < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mass_floor must lie in (0, 1), got {mass_floor}"
        )));
    }
    let grid = psi_plus.grid();
    if grid != psi_minus.grid() {
        return Err(Error::GridMismatch);
    }
    let products: Vec<Complex64> = psi_plus
        .amplitudes()
        .iter()
        .zip(psi_minus.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .collect();
    let peak = products.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::EmptySupport);
    }
    let threshold = mass_floor * peak;
    let weights = grid.weights();
    let mut resultant = Complex64::new(0.0, 0.0);
    let mut support = 0;
    for (z, w) in products.iter().zip(&weights) {
        if z.norm() > threshold {
            resultant += z * w;
            support += 1;
        }
    }
    if support == 0 || resultant.norm() == 0.0 {
        return Err(Error::EmptySupport);
    }
    let mean = resultant / resultant.norm();
    let phase_dev = products
        .iter()
        .filter(|z| z.norm() > threshold)
        .map(|z| (z * mean.conj()).arg().abs())
        .fold(0.0, f64::max);

    let m = operational_overlap(psi_plus, psi_minus)?;
    let abs_i = formal_overlap(psi_plus, psi_minus)?.norm();
    Ok(Certificate {
        is_faithful: phase_dev < FAITHFUL_PHASE_TOL && m - abs_i < FAITHFUL_PHASE_TOL,
        phase_dev,
        mean_phase: mean.arg(),
        support,
    })
}

/// Value of the constrained objective and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lagrangian {
    /// `|I|² - M² + λ(∫|ψ|² - 1)`.
    pub value: f64,
    /// `I = ∫ψ*(r+s)ψ(r-s) dr`.
    pub overlap: Complex64,
    /// `M = ∫|ψ(r+s)||ψ(r-s)| dr`.
    pub operational: f64,
    pub norm_sqr: f64,
}

/// `L = |I|² - M² + λ(∫|ψ|² - 1)` with the branches formed by translating
/// `ψ` by `∓s`. Amplitude pushed off the window is dropped.
pub fn lagrangian_objective(psi: &Wavefunction, p: &FaithfulParams, lambda: f64) -> Result<Lagrangian> {
    let ahead = psi.translate(-p.s, ShiftMode::Lenient)?; // ψ(r + s)
    let behind = psi.translate(p.s, ShiftMode::Lenient)?; // ψ(r - s)
    let overlap = ahead.inner_product(&behind)?;
    let operational = ahead.abs_overlap(&behind)?;
    let norm_sqr = psi.norm_sqr();
    Ok(Lagrangian {
        value: overlap.norm_sqr() - operational * operational + lambda * (norm_sqr - 1.0),
        overlap,
        operational,
        norm_sqr,
    })
}

/// L² norm over the interior window of
/// `ψ₀(r) + γ₁e^{2iθ}ψ₀(r+2s) + γ₂e^{-2iθ}ψ₀(r-2s)`.
pub fn stationarity_residual(psi0: &Wavefunction, p: &FaithfulParams) -> Result<f64> {
    let grid = psi0.grid();
    let k = grid.shift_in_nodes(2.0 * p.s)?.unsigned_abs();
    let n = grid.len();
    if n < 2 * k + 3 {
        return Err(Error::ShiftExceedsWindow { nodes: k });
    }
    let up = p.gamma1 * Complex64::from_polar(1.0, 2.0 * p.theta);
    let down = p.gamma2() * Complex64::from_polar(1.0, -2.0 * p.theta);
    let a = psi0.amplitudes();
    let residual: Vec<f64> = (k..n - k)
        .map(|i| (a[i] + up * a[i + k] + down * a[i - k]).norm_sqr())
        .collect();
    Ok(quad::simpson(&residual, grid.step()).max(0.0).sqrt())
}

/// All scalar diagnostics for one pointer pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealityReport {
    pub m: f64,
    pub abs_i: f64,
    /// `arg I`.
    pub theta: f64,
    /// `None` when the grid has no node at `x = 0`.
    pub e: Option<ErrorMeasure>,
    pub gap: f64,
    pub phase_dev: f64,
    pub is_faithful: bool,
    pub truncation: f64,
}

impl IdealityReport {
    pub fn compute(pair: &PointerPair) -> Result<Self> {
        Self::compute_with_floor(pair, DEFAULT_MASS_FLOOR)
    }

    pub fn compute_with_floor(pair: &PointerPair, mass_floor: f64) -> Result<Self> {
        let overlap = formal_overlap(&pair.plus, &pair.minus)?;
        let m = operational_overlap(&pair.plus, &pair.minus)?;
        let e = match error_measure(&pair.plus, &pair.minus) {
            Ok(e) => Some(e),
            Err(Error::NoOriginNode) => None,
            Err(err) => return Err(err),
        };
        let (phase_dev, is_faithful) = match faithfulness_certificate(&pair.plus, &pair.minus, mass_floor) {
            Ok(c) => (c.phase_dev, c.is_faithful),
            // Disjoint branches: M = |I| = 0 holds trivially.
            Err(Error::EmptySupport) => (0.0, true),
            Err(err) => return Err(err),
        };
        Ok(Self {
            m,
            abs_i: overlap.norm(),
            theta: overlap.arg(),
            e,
            gap: m - overlap.norm(),
            phase_dev,
            is_faithful,
            truncation: pair.truncation()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::pointer::{
        faithful_post_states, gaussian_envelope, gaussian_post, linear_phase_pointer, translation_pair,
        triangular_envelope,
    };

    fn grid() -> Grid {
        Grid::symmetric(12.0, 4801).unwrap()
    }

    fn gaussian_pair(sigma0: f64, g: f64, t: f64) -> PointerPair {
        gaussian_post(&GaussianParams::new(sigma0, g, t).unwrap(), grid()).unwrap()
    }

    #[test]
    fn overlaps_of_identical_states() {
        let psi = gaussian_envelope(grid(), 1.0, 0.0).unwrap().apply_linear_phase(0.8);
        assert!((formal_overlap(&psi, &psi).unwrap() - 1.0).norm() < 1e-10);
        assert!((operational_overlap(&psi, &psi).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_pair_overlaps() {
        let pair = gaussian_pair(1.0, 1.0, 1.0);
        let abs_i = formal_overlap(&pair.plus, &pair.minus).unwrap().norm();
        assert!((abs_i - (-17.0f64 / 8.0).exp()).abs() < 1e-4);
        let m = operational_overlap(&pair.plus, &pair.minus).unwrap();
        assert!((m - (-0.1f64).exp()).abs() < 1e-4);
        assert!((m - 0.90484).abs() < 1e-4 && (abs_i - 0.11943).abs() < 1e-4);
    }

    #[test]
    fn disjoint_supports_have_zero_overlaps() {
        let g = grid();
        let a = triangular_envelope(g, 1.0, -3.0).unwrap();
        let b = triangular_envelope(g, 1.0, 3.0).unwrap();
        assert_eq!(formal_overlap(&a, &b).unwrap().norm(), 0.0);
        assert_eq!(operational_overlap(&a, &b).unwrap(), 0.0);
        assert!(matches!(
            faithfulness_certificate(&a, &b, DEFAULT_MASS_FLOOR),
            Err(Error::EmptySupport)
        ));
    }

    #[test]
    fn error_measure_examples() {
        let e = error_measure(&gaussian_pair(1.0, 1.0, 0.0).plus, &gaussian_pair(1.0, 1.0, 0.0).minus).unwrap();
        assert!((e.value - 0.5).abs() < 1e-6 && e.symmetric);

        let pair = gaussian_pair(1.0, 1.0, 1.0);
        let e = error_measure(&pair.plus, &pair.minus).unwrap();
        assert!(e.symmetric && e.forms_agree());
        assert!((e.value - 0.3274).abs() < 1e-4);

        let far = GaussianParams::new(1.0, 10.0, 10.0).unwrap();
        let wide = Grid::symmetric(far.required_half_width(), 4801).unwrap();
        let pair = gaussian_post(&far, wide).unwrap();
        assert!(error_measure(&pair.plus, &pair.minus).unwrap().value < 1e-10);
    }

    #[test]
    fn error_measure_needs_origin_node() {
        let g = Grid::new(-11.0, 12.0, 4801).unwrap();
        let p = GaussianParams::new(1.0, 1.0, 1.0).unwrap();
        let pair = crate::pointer::gaussian_post_sampled(&p, g);
        assert!(g.origin_index().is_none());
        assert_eq!(error_measure(&pair.plus, &pair.minus), Err(Error::NoOriginNode));
    }

    #[test]
    fn error_measure_reports_both_forms_for_asymmetric_pairs() {
        let g = grid();
        let plus = gaussian_envelope(g, 1.0, 1.0).unwrap();
        let minus = gaussian_envelope(g, 0.5, -2.0).unwrap();
        let e = error_measure(&plus, &minus).unwrap();
        assert!(!e.symmetric);
        assert!(!e.forms_agree());
        assert_eq!(e.value, e.from_minus);
    }

    #[test]
    fn gaussian_closed_form_examples() {
        let f = gaussian_closed_forms(&GaussianParams::new(1.0, 0.0, 1.3).unwrap());
        assert_eq!((f.abs_i, f.m), (1.0, 1.0));
        let f = gaussian_closed_forms(&GaussianParams::new(1.0, 1.0, 1.0).unwrap());
        assert!((f.abs_i - (-2.125f64).exp()).abs() < 1e-15);
        assert!((f.m - (-0.1f64).exp()).abs() < 1e-15);
        assert_eq!(f.m, f.m_paper_literal);
        let f = gaussian_closed_forms(&GaussianParams::new(1.0, 1.0, 2.0).unwrap());
        assert!((f.m - (-0.25f64).exp()).abs() < 1e-15);
        assert!((f.m_paper_literal - (-0.1f64).exp()).abs() < 1e-15);
        let pair = gaussian_pair(1.0, 1.0, 2.0);
        let m = operational_overlap(&pair.plus, &pair.minus).unwrap();
        assert!((m - f.m).abs() < 1e-8);
        assert!((m - f.m_paper_literal).abs() > 0.1);
    }

    #[test]
    fn squeezed_closed_form_examples() {
        let sq = squeezed_closed_forms(&SqueezedParams::new(0.8, 1.2, 0.9, 0.0).unwrap());
        let ga = gaussian_closed_forms(&GaussianParams::new(0.8, 1.2, 0.9).unwrap());
        assert!((sq.abs_i - ga.abs_i).abs() < 1e-15 && (sq.m - ga.m).abs() < 1e-15);
        assert_eq!(sq.abs_i, sq.abs_i_paper_literal);

        let f = squeezed_closed_forms(&SqueezedParams::new(1e-4, 10.0, 1e-4, -100.0).unwrap());
        assert!((f.abs_i_paper_literal - (-10.520_002f64).exp()).abs() < 1e-12);
        assert!((f.abs_i_paper_literal - 2.7e-5).abs() < 1e-6);
        assert!((f.m - 0.999_999_5).abs() < 1e-7);
        assert!((f.abs_i - (-11.520_002f64).exp()).abs() < 1e-12);

        let f = squeezed_closed_forms(&SqueezedParams::new(1.0, 0.0, 2.0, 3.0).unwrap());
        assert_eq!((f.abs_i, f.m), (1.0, 1.0));
    }

    #[test]
    fn certificate_on_real_states() {
        let g = grid();
        let a = gaussian_envelope(g, 1.0, -0.4).unwrap();
        let b = triangular_envelope(g, 2.0, 0.5).unwrap();
        let c = faithfulness_certificate(&a, &b, DEFAULT_MASS_FLOOR).unwrap();
        assert_eq!(c.phase_dev, 0.0);
        assert!(c.is_faithful);
    }

    #[test]
    fn certificate_rejects_kicked_gaussians() {
        let pair = gaussian_pair(1.0, 1.0, 1.0);
        let c = faithfulness_certificate(&pair.plus, &pair.minus, DEFAULT_MASS_FLOOR).unwrap();
        assert!(c.phase_dev > 1.0);
        assert!(!c.is_faithful);
    }

    #[test]
    fn certificate_on_faithful_post_states() {
        let g = grid();
        let psi0 = gaussian_envelope(g, 1.0, 0.0).unwrap();
        let p = FaithfulParams::from_tilt(0.1, 0.3, 1.0, 0).unwrap();
        let pair = faithful_post_states(&psi0, &p).unwrap();
        let c = faithfulness_certificate(&pair.plus, &pair.minus, DEFAULT_MASS_FLOOR).unwrap();
        assert!(c.phase_dev < 1e-8 && c.is_faithful);
        let i = formal_overlap(&pair.plus, &pair.minus).unwrap();
        let m = operational_overlap(&pair.plus, &pair.minus).unwrap();
        assert!((m - i.norm()).abs() < 1e-8);
        let want = Complex64::from_polar(1.0, 4.0 * p.s * p.theta);
        assert!((i / i.norm() - want).norm() < 1e-8);
    }

    #[test]
    fn linear_phase_pointers_are_faithful_under_translation() {
        let g = grid();
        let pair = translation_pair(&linear_phase_pointer(&gaussian_envelope(g, 1.0, 0.0).unwrap(), 0.0).unwrap(), 0.5)
            .unwrap();
        let r = IdealityReport::compute(&pair).unwrap();
        assert!(r.gap.abs() < 1e-9);

        let tri = linear_phase_pointer(&triangular_envelope(g, 1.5, 0.0).unwrap(), 2.0).unwrap();
        let pair = translation_pair(&tri, 0.5).unwrap();
        let r = IdealityReport::compute(&pair).unwrap();
        assert!(r.gap.abs() < 1e-8 && r.is_faithful);

        let r = IdealityReport::compute(&gaussian_pair(1.0, 1.0, 1.0)).unwrap();
        assert!(r.gap > 1e-3 && !r.is_faithful);
    }

    #[test]
    fn lagrangian_examples() {
        let g = grid();
        let env = gaussian_envelope(g, 1.0, 0.0).unwrap();
        let p = FaithfulParams::from_tilt(0.0, 0.0, 0.5, 0).unwrap();
        assert!(lagrangian_objective(&env, &p, 3.0).unwrap().value.abs() < 1e-8);

        // Free-spread (chirped) Gaussian shifted by ±gt/2 at σ₀ = g = t = 1.
        let spread = gaussian_post(&GaussianParams::new(1.0, 0.0, 1.0).unwrap(), g).unwrap().plus;
        let l = lagrangian_objective(&spread, &p, 0.0).unwrap();
        assert!(l.value < -1e-4, "{}", l.value);
        assert!((l.value - (l.overlap.norm_sqr() - l.operational.powi(2))).abs() < 1e-15);

        let doubled = env.scale(Complex64::new(2.0f64.sqrt(), 0.0));
        let l = lagrangian_objective(&doubled, &p, 1.0).unwrap();
        assert!((l.norm_sqr - 2.0).abs() < 1e-10);
        assert!((l.value - 1.0).abs() < 1e-8);

        let odd = FaithfulParams::from_tilt(0.0, 0.0, 0.5001, 0).unwrap();
        assert!(matches!(
            lagrangian_objective(&env, &odd, 0.0),
            Err(Error::IncommensurateShift { .. })
        ));
    }

    #[test]
    fn stationarity_residual_examples() {
        let g = grid();
        // Geometric relation ψ₀(r + 2s) = e^{2u - 2iθ} ψ₀(r).
        for gamma in [-1.0 / (2.0 * 0.4f64.cosh()), -1.0] {
            let p = FaithfulParams::new(Complex64::new(gamma, 0.0), 0.3, 1.0, 0).unwrap();
            let u = crate::pointer::faithful_u(&p).unwrap();
            let rate = (u - Complex64::new(0.0, p.theta)) / p.s;
            let psi0 = Wavefunction::from_fn(g, |r| (rate * r).exp()).normalize().unwrap();
            assert!(stationarity_residual(&psi0, &p).unwrap() < 1e-6);
        }
        // Fixed-point family: γ₁ = γ₂ = -½, θ = 0, period 2s.
        let p = FaithfulParams::new(Complex64::new(-0.5, 0.0), 0.0, 0.75, 0).unwrap();
        let psi0 = Wavefunction::from_fn(g, |r| {
            Complex64::new((std::f64::consts::PI * r / 0.75).cos(), (2.0 * std::f64::consts::PI * r / 1.5).sin())
        })
        .normalize()
        .unwrap();
        assert!(stationarity_residual(&psi0, &p).unwrap() < 1e-6);

        let p = FaithfulParams::new(Complex64::new(0.3, 0.2), 0.4, 1.0, 0).unwrap();
        let env = gaussian_envelope(g, 1.0, 0.0).unwrap();
        assert!(stationarity_residual(&env, &p).unwrap() > 0.1);
        let p = FaithfulParams::new(Complex64::new(0.3, 0.2), 0.4, 7.0, 0).unwrap();
        assert!(matches!(stationarity_residual(&env, &p), Err(Error::ShiftExceedsWindow { .. })));
    }
}
