//! Sweep execution: grid selection, per-point evaluation and the worker pool.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, ShiftMode};
use crate::ideality::{gaussian_closed_forms, squeezed_closed_forms, IdealityReport};
use crate::measurement::{
    channel_probabilities, make_composite, povm_elements, povm_probabilities, sample_outcomes, QubitState,
};
use crate::pointer::{
    faithful_post_states, faithful_post_states_sampled, gaussian_envelope, gaussian_post, gaussian_post_sampled,
    linear_phase_pointer, squeezed_post, squeezed_post_sampled, translation_pair_with, triangular_envelope,
    FaithfulParams, GaussianParams, PointerPair, SqueezedParams, WINDOW_WIDTHS,
};

use super::config::{Envelope, Family, Param, SweepSpec, DEFAULT_HALF_WIDTH};

/// Relative deviation between quadrature and closed form that raises the
/// `closedform_mismatch` flag.
pub const CLOSED_FORM_REL_TOL: f64 = 1e-4;
/// Absolute floor added to the mismatch tolerance so that vanishing closed
/// forms are not flagged over quadrature noise.
pub const CLOSED_FORM_ABS_FLOOR: f64 = 1e-12;
/// Grid step is at most this fraction of the narrowest relevant width.
pub const STEPS_PER_WIDTH: f64 = 40.0;
/// Largest grid the autosizer will produce.
pub const MAX_AUTOSIZE_NODES: usize = 4_000_001;
/// Compact supports must end inside this fraction of the window half-width.
const COMPACT_FILL: f64 = 0.85;

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub index: usize,
    pub family: Family,
    values: Vec<(Param, f64)>,
}

impl Point {
    pub fn new(index: usize, family: Family, values: Vec<(Param, f64)>) -> Self {
        Self { index, family, values }
    }

    pub fn get(&self, param: Param) -> Option<f64> {
        self.values.iter().find(|(p, _)| *p == param).map(|(_, v)| *v)
    }

    fn req(&self, param: Param) -> f64 {
        self.get(param)
            .unwrap_or_else(|| panic!("{} point lacks `{}`", self.family, param.key()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities {
    pub upper_plus: f64,
    pub lower_minus: f64,
    pub povm_plus: f64,
    pub povm_minus: f64,
    /// Monte-Carlo fraction of upper-channel detections, when sampled.
    pub mc_upper_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub point: Point,
    pub grid: Option<Grid>,
    pub report: Option<IdealityReport>,
    pub m_closed: Option<f64>,
    pub abs_i_closed: Option<f64>,
    pub m_closed_paper_literal: Option<f64>,
    pub abs_i_closed_paper_literal: Option<f64>,
    pub probabilities: Option<Probabilities>,
    pub flags: Vec<String>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(point: Point) -> Self {
        Self {
            point,
            grid: None,
            report: None,
            m_closed: None,
            abs_i_closed: None,
            m_closed_paper_literal: None,
            abs_i_closed_paper_literal: None,
            probabilities: None,
            flags: Vec::new(),
            error: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    fn fail(&mut self, err: &Error) {
        self.report = None;
        self.probabilities = None;
        self.flags.push(format!("error:{}", err.code()));
        self.error = Some(err.to_string());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Fail points whose window loses more than the guard allows, instead of
    /// flagging them.
    pub strict_window: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            strict_window: false,
        }
    }
}

/// All sweep points in canonical order: parameters in family order, the last
/// one varying fastest.
pub fn points(spec: &SweepSpec) -> Vec<Point> {
    let axes: Vec<(Param, Vec<f64>)> = spec.ranges().map(|(p, r)| (p, r.values())).collect();
    let total = spec.point_count();
    (0..total)
        .map(|index| {
            let mut rem = index;
            let mut values = vec![(Param::Sigma0, 0.0); axes.len()];
            for (slot, (param, vals)) in values.iter_mut().zip(&axes).rev() {
                *slot = (*param, vals[rem % vals.len()]);
                rem /= vals.len();
            }
            Point::new(index, spec.family, values)
        })
        .collect()
}

/// Evaluates every point of the sweep. Failures are recorded per point and
/// never abort the sweep; records come back in sweep order regardless of the
/// worker count.
pub fn run_sweep(spec: &SweepSpec, opts: RunOptions) -> Result<Vec<RunRecord>> {
    let pts = points(spec);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| pts.into_par_iter().map(|p| evaluate_point(spec, p, opts)).collect()))
}

pub fn evaluate_point(spec: &SweepSpec, point: Point, opts: RunOptions) -> RunRecord {
    let mut rec = RunRecord::new(point);
    if let Err(err) = try_evaluate(spec, opts, &mut rec) {
        rec.fail(&err);
    }
    rec
}

fn try_evaluate(spec: &SweepSpec, opts: RunOptions, rec: &mut RunRecord) -> Result<()> {
    let point = rec.point.clone();
    let grid = resolve_grid(spec, &point)?;
    rec.grid = Some(grid);
    set_closed_forms(spec, &point, rec)?;
    let pair = build_pair(spec, &point, grid, opts.strict_window)?;
    if !opts.strict_window && pair.check_window().is_err() {
        rec.flags.push("window_guard".into());
    }
    let seed = spec.seed.wrapping_add(point.index as u64);
    analyze_pair(&pair, spec.mass_floor, &spec.qubit, spec.samples, seed, rec)
}

/// Fills the report, probabilities and diagnostic flags of `rec` from `pair`.
pub fn analyze_pair(
    pair: &PointerPair,
    mass_floor: f64,
    qubit: &QubitState,
    samples: u64,
    seed: u64,
    rec: &mut RunRecord,
) -> Result<()> {
    let report = IdealityReport::compute_with_floor(pair, mass_floor)?;
    rec.report = Some(report);

    let mismatch = |num: f64, closed: Option<f64>| {
        closed.is_some_and(|c| (num - c).abs() > CLOSED_FORM_REL_TOL * c.abs() + CLOSED_FORM_ABS_FLOOR)
    };
    if mismatch(report.m, rec.m_closed) || mismatch(report.abs_i, rec.abs_i_closed) {
        rec.flags.push("closedform_mismatch".into());
    }
    if report.abs_i < 1e-3 && report.m > 0.5 {
        rec.flags.push("formally_ideal_operationally_nonideal".into());
    }
    if report.is_faithful {
        rec.flags.push("faithful".into());
    }
    match report.e {
        None => rec.flags.push("no_origin_node".into()),
        Some(e) => {
            if !e.forms_agree() {
                rec.flags.push("e_forms_differ".into());
            }
            let channels = channel_probabilities(qubit, e.value)?;
            let (povm_plus, povm_minus) = povm_probabilities(qubit, &povm_elements(e.value)?);
            let mc_upper_fraction = if samples > 0 {
                let composite = make_composite(*qubit, pair.plus.clone(), pair.minus.clone())?;
                Some(sample_outcomes(&composite, samples, seed)?.upper_fraction())
            } else {
                None
            };
            rec.probabilities = Some(Probabilities {
                upper_plus: channels.upper_plus,
                lower_minus: channels.lower_minus,
                povm_plus,
                povm_minus,
                mc_upper_fraction,
            });
        }
    }
    Ok(())
}

fn build_pair(spec: &SweepSpec, point: &Point, grid: Grid, strict: bool) -> Result<PointerPair> {
    let sigma0 = point.req(Param::Sigma0);
    match point.family {
        Family::Gaussian => {
            let p = GaussianParams::new(sigma0, point.req(Param::G), point.req(Param::T))?;
            if strict {
                gaussian_post(&p, grid)
            } else {
                Ok(gaussian_post_sampled(&p, grid))
            }
        }
        Family::Squeezed => {
            let p = SqueezedParams::new(sigma0, point.req(Param::G), point.req(Param::T), point.req(Param::C))?;
            if strict {
                squeezed_post(&p, grid)
            } else {
                squeezed_post_sampled(&p, grid)
            }
        }
        Family::Faithful => {
            let p = FaithfulParams::from_tilt(point.req(Param::Tilt), point.req(Param::Theta), point.req(Param::S), 0)?;
            let psi0 = envelope(spec.envelope, grid, sigma0)?;
            if strict {
                faithful_post_states(&psi0, &p)
            } else {
                faithful_post_states_sampled(&psi0, &p)
            }
        }
        Family::LinearPhase => {
            let psi = linear_phase_pointer(&envelope(spec.envelope, grid, sigma0)?, point.req(Param::Kappa))?;
            let mode = if strict { ShiftMode::Strict } else { ShiftMode::Lenient };
            let pair = translation_pair_with(&psi, point.req(Param::S), mode)?;
            if strict {
                pair.check_window()?;
            }
            Ok(pair)
        }
        Family::External => Err(Error::InvalidParameter("external pairs are not generated".into())),
    }
}

fn envelope(kind: Envelope, grid: Grid, width: f64) -> Result<crate::grid::Wavefunction> {
    match kind {
        Envelope::Gaussian => gaussian_envelope(grid, width, 0.0),
        Envelope::Triangular => triangular_envelope(grid, width, 0.0),
    }
}

fn set_closed_forms(spec: &SweepSpec, point: &Point, rec: &mut RunRecord) -> Result<()> {
    let sigma0 = point.req(Param::Sigma0);
    let (m, abs_i, m_lit, abs_i_lit) = match point.family {
        Family::Gaussian => {
            let p = GaussianParams::new(sigma0, point.req(Param::G), point.req(Param::T))?;
            let c = gaussian_closed_forms(&p);
            (Some(c.m), Some(c.abs_i), Some(c.m_paper_literal), Some(c.abs_i))
        }
        Family::Squeezed => {
            let p = SqueezedParams::new(sigma0, point.req(Param::G), point.req(Param::T), point.req(Param::C))?;
            let c = squeezed_closed_forms(&p);
            (Some(c.m), Some(c.abs_i), Some(c.m), Some(c.abs_i_paper_literal))
        }
        Family::Faithful => (Some(1.0), Some(1.0), None, None),
        Family::LinearPhase => match spec.envelope {
            Envelope::Gaussian => {
                let s = point.req(Param::S);
                let v = (-s * s / (2.0 * sigma0 * sigma0)).exp();
                (Some(v), Some(v), None, None)
            }
            Envelope::Triangular => (None, None, None, None),
        },
        Family::External => (None, None, None, None),
    };
    rec.m_closed = m;
    rec.abs_i_closed = abs_i;
    rec.m_closed_paper_literal = m_lit;
    rec.abs_i_closed_paper_literal = abs_i_lit;
    Ok(())
}

/// What a point needs from its grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRequirement {
    pub half_width: f64,
    pub max_step: f64,
    /// Shift that must be a whole number of steps.
    pub shift: Option<f64>,
}

/// Frequency of the linear phase left in `ψ₊*ψ₋` for two chirped Gaussians
/// centred at `±c` with kicks `±g` and complex width `s`.
fn product_frequency(sigma0: f64, s: Complex64, c: f64, g: f64) -> f64 {
    let a = (4.0 * sigma0 * s).inv();
    (2.0 * g + 4.0 * c * a.im).abs()
}

fn max_step(width: f64, frequency: f64) -> f64 {
    (width / STEPS_PER_WIDTH).min(PI / (frequency + 12.0 / width))
}

pub fn requirement(spec: &SweepSpec, point: &Point) -> Result<GridRequirement> {
    let sigma0 = point.req(Param::Sigma0);
    Ok(match point.family {
        Family::Gaussian => {
            let p = GaussianParams::new(sigma0, point.req(Param::G), point.req(Param::T))?;
            let k = product_frequency(sigma0, p.complex_width(), p.center_offset(), p.g);
            GridRequirement {
                half_width: p.required_half_width(),
                max_step: max_step(sigma0, k),
                shift: None,
            }
        }
        Family::Squeezed => {
            let p = SqueezedParams::new(sigma0, point.req(Param::G), point.req(Param::T), point.req(Param::C))?;
            let k = product_frequency(sigma0, p.complex_width(), p.center_offset(), p.g);
            GridRequirement {
                half_width: p.required_half_width(),
                max_step: max_step(p.spread_sq().sqrt(), k),
                shift: None,
            }
        }
        Family::Faithful => {
            let tilt = point.req(Param::Tilt);
            let half_width = match spec.envelope {
                Envelope::Gaussian => 2.0 * tilt * sigma0 * sigma0 + WINDOW_WIDTHS * sigma0,
                Envelope::Triangular => sigma0 / COMPACT_FILL,
            };
            GridRequirement {
                half_width,
                max_step: max_step(sigma0, 0.0),
                shift: None,
            }
        }
        Family::LinearPhase => {
            let s = point.req(Param::S);
            let half_width = match spec.envelope {
                Envelope::Gaussian => s + WINDOW_WIDTHS * sigma0,
                Envelope::Triangular => (s + sigma0) / COMPACT_FILL,
            };
            GridRequirement {
                half_width,
                max_step: max_step(sigma0, 0.0),
                shift: Some(s),
            }
        }
        Family::External => return Err(Error::InvalidParameter("external pairs carry their own grid".into())),
    })
}

/// The grid used for `point`: explicit bounds when configured, otherwise the
/// default window when it is wide, fine and (for shifts) commensurate enough,
/// otherwise a symmetric grid sized from the parameters.
pub fn resolve_grid(spec: &SweepSpec, point: &Point) -> Result<Grid> {
    let n = spec.grid.n;
    if let Some((lo, hi)) = spec.grid.bounds {
        return Grid::new(lo, hi, n);
    }
    let req = requirement(spec, point)?;
    let default = Grid::symmetric(DEFAULT_HALF_WIDTH, n)?;
    let commensurate = |g: &Grid| req.shift.is_none_or(|s| g.shift_in_nodes(s).is_ok());
    if DEFAULT_HALF_WIDTH >= req.half_width && default.step() <= req.max_step && commensurate(&default) {
        return Ok(default);
    }

    let min_half_intervals = (n - 1) / 2;
    let h_target = req.max_step.min(req.half_width / min_half_intervals as f64);
    let (h, q) = match req.shift {
        Some(s) => {
            let h = s / (s / h_target).ceil();
            (h, (req.half_width / h).ceil() as usize)
        }
        None => {
            let q = (req.half_width / h_target).ceil() as usize;
            (req.half_width / q as f64, q)
        }
    };
    let q = q + q % 2;
    let nodes = 2 * q + 1;
    if nodes > MAX_AUTOSIZE_NODES {
        return Err(Error::InvalidGrid(format!(
            "autosized grid would need {nodes} nodes (cap {MAX_AUTOSIZE_NODES})"
        )));
    }
    Grid::symmetric(q as f64 * h, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::config::{parse_config, ParamRange};

    #[test]
    fn canonical_point_order() {
        let mut spec = SweepSpec::new(Family::Gaussian);
        spec.set_range(Param::G, ParamRange::new(0.0, 1.0, 2)).unwrap();
        spec.set_range(Param::T, ParamRange::new(1.0, 3.0, 3)).unwrap();
        let pts = points(&spec);
        let gt: Vec<(f64, f64)> = pts.iter().map(|p| (p.req(Param::G), p.req(Param::T))).collect();
        assert_eq!(
            gt,
            vec![(0.0, 1.0), (0.0, 2.0), (0.0, 3.0), (1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]
        );
        assert!(pts.iter().enumerate().all(|(i, p)| p.index == i));
    }

    #[test]
    fn default_grid_for_unit_gaussian() {
        let spec = parse_config("family = \"gaussian\"\n").unwrap();
        let grid = resolve_grid(&spec, &points(&spec)[0]).unwrap();
        assert_eq!(grid, Grid::symmetric(12.0, 4801).unwrap());
    }

    #[test]
    fn autosized_grid_covers_wide_states() {
        let mut spec = SweepSpec::new(Family::Gaussian);
        spec.set(Param::Sigma0, 0.5).unwrap();
        spec.set(Param::G, 2.0).unwrap();
        spec.set(Param::T, 2.0).unwrap();
        let p = points(&spec).remove(0);
        let req = requirement(&spec, &p).unwrap();
        let grid = resolve_grid(&spec, &p).unwrap();
        assert!(grid.x_max() >= req.half_width && grid.step() <= req.max_step * (1.0 + 1e-12));
        assert!(grid.origin_index().is_some());
        assert_eq!((grid.len() - 1) % 4, 0);
    }

    #[test]
    fn autosized_grid_is_commensurate_with_shift() {
        let mut spec = SweepSpec::new(Family::LinearPhase);
        spec.set(Param::S, 0.37).unwrap();
        spec.set(Param::Sigma0, 2.0).unwrap();
        let p = points(&spec).remove(0);
        let grid = resolve_grid(&spec, &p).unwrap();
        assert!(grid.shift_in_nodes(0.37).is_ok());
        let rec = evaluate_point(&spec, p, RunOptions { workers: 1, strict_window: true });
        assert!(!rec.failed(), "{:?}", rec.error);
        let r = rec.report.unwrap();
        assert!((r.m - rec.m_closed.unwrap()).abs() < 1e-8);
        assert!(rec.has_flag("faithful"));
    }

    #[test]
    fn unit_gaussian_point_matches_closed_forms() {
        let spec = parse_config("family = \"gaussian\"\n").unwrap();
        let recs = run_sweep(&spec, RunOptions::default()).unwrap();
        let r = recs[0].report.unwrap();
        assert!((r.m - 0.904_837).abs() < 1e-4);
        assert!((r.abs_i - 0.119_433).abs() < 1e-4);
        assert!(!recs[0].has_flag("closedform_mismatch"), "{:?}", recs[0].flags);
        let pr = recs[0].probabilities.unwrap();
        assert!((pr.povm_plus + pr.povm_minus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_violation_is_flagged_or_fatal() {
        let text = "family = \"gaussian\"\nsigma0 = 1\ng = 1\nt = 1\ngrid.x_min = -4\ngrid.x_max = 4\ngrid.n = 801\n";
        let spec = parse_config(text).unwrap();
        let lenient = run_sweep(&spec, RunOptions::default()).unwrap();
        assert!(lenient[0].has_flag("window_guard") && !lenient[0].failed());
        let strict = run_sweep(&spec, RunOptions { workers: 1, strict_window: true }).unwrap();
        assert!(strict[0].failed() && strict[0].has_flag("error:window_too_small"));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut spec = SweepSpec::new(Family::Squeezed);
        spec.set_range(Param::C, ParamRange::new(-1.0, 1.0, 5)).unwrap();
        spec.set_range(Param::G, ParamRange::new(0.5, 1.5, 3)).unwrap();
        let one = run_sweep(&spec, RunOptions { workers: 1, strict_window: false }).unwrap();
        let four = run_sweep(&spec, RunOptions { workers: 4, strict_window: false }).unwrap();
        assert_eq!(one, four);
    }
}
