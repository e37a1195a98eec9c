//! The measured qubit: initial state, the entangled system-apparatus state,
//! nonideal channel probabilities, the effective unsharp POVM, and a
//! Monte-Carlo sampler of channel outcomes.
//!
//! The σₓ eigenbasis `{|↑⟩ₓ, |↓⟩ₓ}` is used as the matrix basis, so the
//! projectors `P±ₓ` are diagonal.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Grid, Wavefunction};

pub type Operator = Matrix2<Complex64>;

const QUBIT_NORM_TOL: f64 = 1e-10;
const BRANCH_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !((n - 1.0).abs() <= QUBIT_NORM_TOL) {
            return Err(Error::QubitNorm(n));
        }
        Ok(Self { alpha, beta })
    }

    /// Real amplitudes with `|α|² = p_up`.
    pub fn from_up_probability(p_up: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_up) {
            return Err(Error::InvalidParameter(format!(
                "|alpha|^2 must lie in [0, 1], got {p_up}"
            )));
        }
        Self::new(Complex64::new(p_up.sqrt(), 0.0), Complex64::new((1.0 - p_up).sqrt(), 0.0))
    }

    pub fn prob_up(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn prob_down(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// `|χ⟩⟨χ|`.
    pub fn density_matrix(&self) -> Operator {
        let (a, b) = (self.alpha, self.beta);
        Matrix2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj())
    }
}

/// `α ψ₊ ⊗ |↑⟩ₓ + β ψ₋ ⊗ |↓⟩ₓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    qubit: QubitState,
    psi_plus: Wavefunction,
    psi_minus: Wavefunction,
}

pub fn make_composite(chi: QubitState, psi_plus: Wavefunction, psi_minus: Wavefunction) -> Result<CompositeState> {
    if psi_plus.grid() != psi_minus.grid() {
        return Err(Error::GridMismatch);
    }
    for branch in [&psi_plus, &psi_minus] {
        let n = branch.norm_sqr();
        if !((n - 1.0).abs() <= BRANCH_NORM_TOL) {
            return Err(Error::BranchNorm(n));
        }
    }
    let state = CompositeState {
        qubit: chi,
        psi_plus,
        psi_minus,
    };
    let total = state.grid().integrate_real(&state.marginal_density());
    if !((total - 1.0).abs() <= BRANCH_NORM_TOL) {
        return Err(Error::BranchNorm(total));
    }
    Ok(state)
}

impl CompositeState {
    pub fn qubit(&self) -> &QubitState {
        &self.qubit
    }

    pub fn psi_plus(&self) -> &Wavefunction {
        &self.psi_plus
    }

    pub fn psi_minus(&self) -> &Wavefunction {
        &self.psi_minus
    }

    pub fn grid(&self) -> &Grid {
        self.psi_plus.grid()
    }

    /// Position density with the spin traced out:
    /// `|α|²|ψ₊|² + |β|²|ψ₋|²`.
    pub fn marginal_density(&self) -> Vec<f64> {
        let (pu, pd) = (self.qubit.prob_up(), self.qubit.prob_down());
        self.psi_plus
            .amplitudes()
            .iter()
            .zip(self.psi_minus.amplitudes())
            .map(|(a, b)| pu * a.norm_sqr() + pd * b.norm_sqr())
            .collect()
    }
}

/// Joint probabilities of (upper channel, `|↑⟩ₓ`) and (lower channel, `|↓⟩ₓ`).
/// They do not sum to one unless `E = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelProbabilities {
    pub upper_plus: f64,
    pub lower_minus: f64,
}

fn check_error_measure(e: f64) -> Result<()> {
    if (0.0..=0.5).contains(&e) {
        Ok(())
    } else {
        Err(Error::ErrorMeasureRange(e))
    }
}

/// `p^u₊ₓ = (1 - E)|α|²`, `p^d₋ₓ = (1 - E)|β|²`.
pub fn channel_probabilities(chi: &QubitState, e: f64) -> Result<ChannelProbabilities> {
    check_error_measure(e)?;
    Ok(ChannelProbabilities {
        upper_plus: (1.0 - e) * chi.prob_up(),
        lower_minus: (1.0 - e) * chi.prob_down(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmPair {
    pub pi_plus: Operator,
    pub pi_minus: Operator,
}

pub fn projector_up() -> Operator {
    Matrix2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    )
}

pub fn projector_down() -> Operator {
    Operator::identity() - projector_up()
}

/// `Π± = E·𝕀 + (1 - 2E)P±ₓ`, so that
/// `Tr[ρΠ₊] = (1 - E)|α|² + E|β|²`.
pub fn povm_elements(e: f64) -> Result<PovmPair> {
    check_error_measure(e)?;
    let id = Operator::identity() * Complex64::new(e, 0.0);
    let sharp = Complex64::new(1.0 - 2.0 * e, 0.0);
    Ok(PovmPair {
        pi_plus: id + projector_up() * sharp,
        pi_minus: id + projector_down() * sharp,
    })
}

impl PovmPair {
    /// Smallest eigenvalue over both elements (Hermitian parts).
    pub fn min_eigenvalue(&self) -> f64 {
        [self.pi_plus, self.pi_minus]
            .iter()
            .map(|op| {
                let herm = (op + op.adjoint()) * Complex64::new(0.5, 0.0);
                herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest elementwise deviation of `Π₊ + Π₋` from the identity.
    pub fn completeness_error(&self) -> f64 {
        (self.pi_plus + self.pi_minus - Operator::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_valid(&self) -> bool {
        self.min_eigenvalue() >= -1e-12 && self.completeness_error() <= 1e-10
    }
}

/// `p± = Tr[|χ⟩⟨χ| Π±]`.
pub fn povm_probabilities(chi: &QubitState, povm: &PovmPair) -> (f64, f64) {
    let rho = chi.density_matrix();
    ((rho * povm.pi_plus).trace().re, (rho * povm.pi_minus).trace().re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub n_upper: u64,
    pub n_lower: u64,
    pub n_total: u64,
    pub seed: u64,
}

impl OutcomeCounts {
    pub fn upper_fraction(&self) -> f64 {
        self.n_upper as f64 / self.n_total as f64
    }
}

/// Draws `n` detector positions from the marginal density by inverse CDF
/// over the grid nodes and sorts them into channels: `x > 0` upper,
/// `x < 0` lower. A draw landing on the `x = 0` node goes to either channel
/// with probability ½.
pub fn sample_outcomes(composite: &CompositeState, n: u64, seed: u64) -> Result<OutcomeCounts> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let grid = composite.grid();
    let mut cumulative: Vec<f64> = composite
        .marginal_density()
        .iter()
        .zip(grid.weights())
        .map(|(rho, w)| rho * w)
        .collect();
    let mut running = 0.0;
    for c in cumulative.iter_mut() {
        running += *c;
        *c = running;
    }
    if !(running.is_finite() && running > 0.0) {
        return Err(Error::DegenerateMarginal);
    }
    let origin = grid.origin_index();
    let xs: Vec<f64> = grid.nodes().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_upper = 0;
    for _ in 0..n {
        let u = rng.random::<f64>() * running;
        let idx = cumulative.partition_point(|&c| c <= u).min(xs.len() - 1);
        let upper = if Some(idx) == origin {
            rng.random_bool(0.5)
        } else {
            xs[idx] > 0.0
        };
        if upper {
            n_upper += 1;
        }
    }
    Ok(OutcomeCounts {
        n_upper,
        n_lower: n - n_upper,
        n_total: n,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointer::{gaussian_envelope, gaussian_post, triangular_envelope, GaussianParams};

    fn grid() -> Grid {
        Grid::symmetric(12.0, 4801).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn qubit_normalization() {
        assert!(QubitState::new(c(1.0), c(0.0)).is_ok());
        assert!(matches!(QubitState::new(c(1.0), c(1.0)), Err(Error::QubitNorm(_))));
        let q = QubitState::from_up_probability(0.7).unwrap();
        assert!((q.prob_up() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn composite_marginals() {
        let g = grid();
        let pair = gaussian_post(&GaussianParams::new(1.0, 1.0, 1.0).unwrap(), g).unwrap();
        let single = make_composite(QubitState::new(c(1.0), c(0.0)).unwrap(), pair.plus.clone(), pair.minus.clone())
            .unwrap();
        assert_eq!(single.marginal_density(), pair.plus.density());

        let half = QubitState::from_up_probability(0.5).unwrap();
        let same = make_composite(half, pair.plus.clone(), pair.plus.clone()).unwrap();
        for (a, b) in same.marginal_density().iter().zip(pair.plus.density()) {
            assert!((a - b).abs() < 1e-15);
        }

        let mixed = make_composite(half, pair.plus.clone(), pair.minus.clone()).unwrap();
        let rho = mixed.marginal_density();
        let first: Vec<f64> = rho.iter().zip(g.nodes()).map(|(r, x)| r * x).collect();
        assert!(g.integrate_real(&first).abs() < 1e-6);
        assert!((g.integrate_real(&rho) - 1.0).abs() < 1e-8);

        let unnormalized = pair.plus.scale(c(2.0));
        assert!(matches!(
            make_composite(half, unnormalized, pair.minus),
            Err(Error::BranchNorm(_))
        ));
    }

    #[test]
    fn channel_probability_examples() {
        let up = QubitState::new(c(1.0), c(0.0)).unwrap();
        let p = channel_probabilities(&up, 0.0).unwrap();
        assert_eq!((p.upper_plus, p.lower_minus), (1.0, 0.0));
        let half = QubitState::from_up_probability(0.5).unwrap();
        let p = channel_probabilities(&half, 0.2).unwrap();
        assert!((p.upper_plus - 0.4).abs() < 1e-15 && (p.lower_minus - 0.4).abs() < 1e-15);
        let q = QubitState::from_up_probability(0.7).unwrap();
        let p = channel_probabilities(&q, 0.3274).unwrap();
        assert!((p.upper_plus - 0.4708).abs() < 1e-4);
        assert!(matches!(channel_probabilities(&q, 0.6), Err(Error::ErrorMeasureRange(_))));
        assert!(matches!(channel_probabilities(&q, -0.1), Err(Error::ErrorMeasureRange(_))));
    }

    #[test]
    fn povm_limits() {
        let sharp = povm_elements(0.0).unwrap();
        assert_eq!(sharp.pi_plus, projector_up());
        assert_eq!(sharp.pi_minus, projector_down());
        let blind = povm_elements(0.5).unwrap();
        let half = Operator::identity() * c(0.5);
        assert_eq!(blind.pi_plus, half);
        assert_eq!(blind.pi_minus, half);
        assert!(povm_elements(0.51).is_err());
    }

    #[test]
    fn povm_probability_examples() {
        let up = QubitState::new(c(1.0), c(0.0)).unwrap();
        let (p, m) = povm_probabilities(&up, &povm_elements(0.0).unwrap());
        assert_eq!((p, m), (1.0, 0.0));
        let q = QubitState::new(Complex64::new(0.6, 0.3), Complex64::new(0.2, -(1.0f64 - 0.49).sqrt())).unwrap();
        let (p, m) = povm_probabilities(&q, &povm_elements(0.5).unwrap());
        assert!((p - 0.5).abs() < 1e-12 && (m - 0.5).abs() < 1e-12);
        let q = QubitState::from_up_probability(0.7).unwrap();
        let (p, m) = povm_probabilities(&q, &povm_elements(0.2).unwrap());
        assert!((p - 0.62).abs() < 1e-12 && (m - 0.38).abs() < 1e-12);
    }

    #[test]
    fn literal_povm_form_does_not_reproduce_the_stated_probabilities() {
        // (𝕀 - (1 - 2E)P₊)/2 at E = 0 gives |β|²/2 for the + channel.
        let q = QubitState::from_up_probability(0.7).unwrap();
        let literal = (Operator::identity() - projector_up()) * c(0.5);
        let p = (q.density_matrix() * literal).trace().re;
        assert!((p - 0.15).abs() < 1e-12);
        let (p, _) = povm_probabilities(&q, &povm_elements(0.0).unwrap());
        assert!((p - 0.7).abs() < 1e-12);
    }

    #[test]
    fn sampling_examples() {
        let g = grid();
        let up = QubitState::new(c(1.0), c(0.0)).unwrap();
        let right = triangular_envelope(g, 1.0, 3.0).unwrap();
        let left = triangular_envelope(g, 1.0, -3.0).unwrap();
        let comp = make_composite(up, right, left).unwrap();
        let counts = sample_outcomes(&comp, 10_000, 1).unwrap();
        assert_eq!(counts.n_upper, 10_000);

        let centered = gaussian_envelope(g, 1.0, 0.0).unwrap();
        let half = QubitState::from_up_probability(0.5).unwrap();
        let comp = make_composite(half, centered.clone(), centered).unwrap();
        let counts = sample_outcomes(&comp, 100_000, 7).unwrap();
        assert_eq!(counts.n_upper + counts.n_lower, counts.n_total);
        assert!((counts.upper_fraction() - 0.5).abs() < 5e-3);
        assert_eq!(counts, sample_outcomes(&comp, 100_000, 7).unwrap());
        assert!(sample_outcomes(&comp, 0, 7).is_err());
    }
}
