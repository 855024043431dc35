//! Off-grid refinement of element positions on top of OMP.
//!
//! Each refinement step linearizes the array factor in the relative position
//! perturbations `η`, `d_i → d_i(1 + η_i)`, solves for real `η` in the least
//! squares sense, applies it under step control and re-fits the subarray
//! coefficients on the frozen support.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    chi_metric, layout_from_weights, measure_sll, MetricsReport, SubarrayLayout, XiDenominator,
    XiReference, DEFAULT_MERGE_TOL, DEFAULT_METRIC_STEP_DEG, DEFAULT_SLL_STEP_DEG,
};
use crate::model::{
    evaluate_pattern, uniform_geometry, AngleGrid, ArrayGeometry, DesiredPattern, ExcitationVector,
    SteeringMatrix,
};
use crate::numerics::{lstsq_complex, lstsq_real_constrained, norm2, sub_vec, ComplexMatrix};
use crate::omp::{omp_mode1_with_dictionary, OmpConfig, OmpPursuit, OmpTrace, SparseSolution};
use crate::patterns::{PatternSource, REFERENCE_SPACING};

/// Columns of `G` smaller than this (relative to the largest) carry no
/// position information and are left out of the fit.
const INACTIVE_COLUMN_TOL: f64 = 1e-14;
const MAX_HALVINGS: usize = 30;
/// A re-fit counts as non-increasing within this relative slack.
const ACCEPT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    #[default]
    Off,
    /// Perturb mirror-image elements together (`η_i = η_{N−1−i}`).
    Mirror,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementConfig {
    /// Maximum refinement iterations per sparsity level.
    pub q: usize,
    /// Per-element bound on `|η_i|`; `None` leaves `η` undamped.
    pub eta_max: Option<f64>,
    /// Minimum spacing between neighbouring elements, in wavelengths.
    pub d_min: f64,
    pub symmetry: Symmetry,
    /// Reject steps whose re-fit residual on the solver grid grows.
    pub require_improvement: bool,
    /// Mode 2: start each sparsity level from the previous refined geometry.
    pub carry_geometry: bool,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            q: 10,
            eta_max: Some(0.05),
            d_min: 0.25,
            symmetry: Symmetry::Off,
            require_improvement: true,
            carry_geometry: false,
        }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(m) = self.eta_max {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::invalid(format!("eta_max must be positive, got {m}")));
            }
        }
        if !(self.d_min >= 0.0) || !self.d_min.is_finite() {
            return Err(Error::invalid(format!(
                "d_min must be >= 0, got {}",
                self.d_min
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OgompConfig {
    pub omp: OmpConfig,
    pub refine: RefinementConfig,
}

/// Linearized system `y ≈ G η`.
#[derive(Debug, Clone)]
pub struct PerturbationSystem {
    pub g: ComplexMatrix,
    pub y: Vec<Complex64>,
    /// Elements whose column carries position information.
    pub active: Vec<bool>,
}

/// `G[m, i] = w_i d_i (j2π sin θ_m) exp(j2π d_i sin θ_m)` and `y = F̄ − Φw`.
pub fn build_perturbation_system(
    phi: &SteeringMatrix,
    geom: &ArrayGeometry,
    w: &ExcitationVector,
    fbar: &DesiredPattern,
) -> Result<PerturbationSystem> {
    let n = geom.len();
    if phi.cols() != n || w.len() != n {
        return Err(Error::invalid(
            "steering, geometry and excitation sizes differ",
        ));
    }
    if phi.grid() != fbar.grid() {
        return Err(Error::invalid(
            "desired pattern grid differs from steering grid",
        ));
    }
    let d = geom.positions();
    let scale: Vec<Complex64> = w.weights().iter().zip(d).map(|(wi, di)| wi * *di).collect();
    let largest = scale.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let active = scale
        .iter()
        .map(|s| largest > 0.0 && s.norm() > INACTIVE_COLUMN_TOL * largest)
        .collect();
    let jk: Vec<Complex64> = phi
        .grid()
        .thetas()
        .iter()
        .map(|t| Complex64::new(0.0, 2.0 * PI * t.sin()))
        .collect();
    let m = phi.matrix();
    let g = ComplexMatrix::from_fn(phi.rows(), n, |r, i| scale[i] * jk[r] * m.get(r, i));
    let y = sub_vec(fbar.values(), &phi.apply(w)?);
    Ok(PerturbationSystem { g, y, active })
}

/// Solves `min ‖y − Gη‖` over real `η`; inactive elements get `η = 0`.
pub fn solve_perturbation(sys: &PerturbationSystem, symmetry: Symmetry) -> Result<Vec<f64>> {
    let n = sys.active.len();
    // Groups of elements sharing one unknown.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    match symmetry {
        Symmetry::Off => groups.extend((0..n).filter(|&i| sys.active[i]).map(|i| vec![i])),
        Symmetry::Mirror => {
            for i in 0..n.div_ceil(2) {
                let j = n - 1 - i;
                let g: Vec<usize> = if i == j { vec![i] } else { vec![i, j] };
                let g: Vec<usize> = g.into_iter().filter(|&k| sys.active[k]).collect();
                if !g.is_empty() {
                    groups.push(g);
                }
            }
        }
    }
    let mut eta = vec![0.0; n];
    if groups.is_empty() {
        return Ok(eta);
    }
    let rows = sys.g.rows();
    let reduced = ComplexMatrix::from_fn(rows, groups.len(), |r, c| {
        groups[c].iter().map(|&k| sys.g.get(r, k)).sum()
    });
    let sol = lstsq_real_constrained(&reduced, &sys.y)?;
    for (group, v) in groups.iter().zip(sol) {
        for &k in group {
            eta[k] = v;
        }
    }
    Ok(eta)
}

/// Outcome of one position update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationStep {
    /// Least-squares `η` before bounding.
    pub eta: Vec<f64>,
    /// `η` actually applied: bounded and scaled.
    pub applied: Vec<f64>,
    /// Step scale `2^-k`, the first that keeps the geometry feasible.
    pub damping: f64,
    /// Whether any `|η_i|` hit `eta_max`.
    pub clamped: bool,
    /// `‖y‖₂`.
    pub linear_residual_before: f64,
    /// `‖y − Gη‖₂` for the unbounded `η`.
    pub linear_residual_after: f64,
}

fn displaced(d: &[f64], eta: &[f64], s: f64) -> Vec<f64> {
    d.iter().zip(eta).map(|(di, e)| di + s * e * di).collect()
}

fn feasible(p: &[f64], d_min: f64) -> bool {
    p.iter().all(|v| v.is_finite()) && p.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] >= d_min)
}

/// One linearize / solve / update cycle on the positions.
pub fn refine_positions_once(
    phi: &SteeringMatrix,
    geom: &ArrayGeometry,
    w: &ExcitationVector,
    fbar: &DesiredPattern,
    config: &RefinementConfig,
) -> Result<(ArrayGeometry, PerturbationStep)> {
    config.validate()?;
    let sys = build_perturbation_system(phi, geom, w, fbar)?;
    let eta = solve_perturbation(&sys, config.symmetry)?;
    let gx = sys.g.mul_vec(
        &eta.iter()
            .map(|&e| Complex64::new(e, 0.0))
            .collect::<Vec<_>>(),
    );
    let linear_residual_before = norm2(&sys.y);
    let linear_residual_after = norm2(&sub_vec(&sys.y, &gx));

    let mut clamped = false;
    let bounded: Vec<f64> = match config.eta_max {
        Some(m) => eta
            .iter()
            .map(|&e| {
                if e.abs() > m {
                    clamped = true;
                    m.copysign(e)
                } else {
                    e
                }
            })
            .collect(),
        None => eta.clone(),
    };

    let d = geom.positions();
    let mut damping = 1.0;
    let mut halvings = 0;
    while !feasible(&displaced(d, &bounded, damping), config.d_min) {
        if halvings == MAX_HALVINGS {
            damping = 0.0;
            break;
        }
        damping *= 0.5;
        halvings += 1;
    }
    if damping == 0.0 {
        return Err(Error::Refinement(
            "no feasible step along the perturbation direction".into(),
        ));
    }
    let applied: Vec<f64> = bounded.iter().map(|e| e * damping).collect();
    let next = ArrayGeometry::new(displaced(d, &bounded, damping))?;
    Ok((
        next,
        PerturbationStep {
            eta,
            applied,
            damping,
            clamped,
            linear_residual_before,
            linear_residual_after,
        },
    ))
}

/// Least-squares subarray coefficients for a fixed support on new positions.
pub fn resolve_excitations(
    phi: &SteeringMatrix,
    support: &[usize],
    fbar: &DesiredPattern,
) -> Result<SparseSolution> {
    if phi.grid() != fbar.grid() {
        return Err(Error::invalid(
            "desired pattern grid differs from steering grid",
        ));
    }
    let a = phi.dictionary().select_columns(support);
    let coeffs = lstsq_complex(&a, fbar.values())?;
    let residual = norm2(&sub_vec(fbar.values(), &a.mul_vec(&coeffs)));
    Ok(SparseSolution::new(support.to_vec(), coeffs, residual))
}

/// Grids, desired field and measurement settings shared by every solver run.
#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    n: usize,
    spacing: f64,
    desired: DesiredPattern,
    reference: XiReference,
    sll_step_deg: f64,
    merge_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemOptions {
    /// Solver grid size; `None` gives `4N + 1`.
    pub solver_grid_m: Option<usize>,
    pub metric_step_deg: f64,
    pub sll_step_deg: f64,
    pub xi_denominator: XiDenominator,
    /// Spacing of the initial uniform geometry.
    pub spacing: f64,
    pub merge_tol: f64,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        Self {
            solver_grid_m: None,
            metric_step_deg: DEFAULT_METRIC_STEP_DEG,
            sll_step_deg: DEFAULT_SLL_STEP_DEG,
            xi_denominator: XiDenominator::Desired,
            spacing: REFERENCE_SPACING,
            merge_tol: DEFAULT_MERGE_TOL,
        }
    }
}

impl SynthesisProblem {
    pub fn new(source: &PatternSource, n: usize, options: ProblemOptions) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need N >= 2 elements, got {n}")));
        }
        let m = options.solver_grid_m.unwrap_or(4 * n + 1);
        if m < n {
            return Err(Error::invalid(format!(
                "solver grid M={m} smaller than N={n}"
            )));
        }
        if !(options.sll_step_deg > 0.0) {
            return Err(Error::invalid("SLL scan step must be positive"));
        }
        let solver_grid =
            AngleGrid::uniform(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, m)?;
        let metric_grid = crate::metrics::metric_grid(options.metric_step_deg)?;
        let desired = source.sample(&solver_grid)?;
        let on_metric = source.sample(&metric_grid)?;
        let reference = XiReference::new(
            metric_grid,
            on_metric.values().to_vec(),
            options.xi_denominator,
        )?;
        // Fail early on a reference with no energy over [0, π/2].
        reference.xi_of_pattern(reference.desired())?;
        uniform_geometry(n, options.spacing)?;
        Ok(Self {
            n,
            spacing: options.spacing,
            desired,
            reference,
            sll_step_deg: options.sll_step_deg,
            merge_tol: options.merge_tol,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn desired(&self) -> &DesiredPattern {
        &self.desired
    }

    pub fn reference(&self) -> &XiReference {
        &self.reference
    }

    pub fn initial_geometry(&self) -> ArrayGeometry {
        uniform_geometry(self.n, self.spacing).expect("validated in constructor")
    }

    pub fn steering(&self, geom: &ArrayGeometry) -> SteeringMatrix {
        SteeringMatrix::new(geom, self.desired.grid())
    }
}

/// How many subarrays to use, or what the fit must reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SynthesisMode {
    /// Mode 1: exactly `K` OMP iterations.
    Sparsity(usize),
    /// Mode 2: smallest `K` with `ξ ≤ target`.
    XiTarget(f64),
    /// Mode 2: smallest `K` with solver-grid residual `≤ ε`.
    Residual(f64),
}

impl SynthesisMode {
    fn met(&self, xi: f64, residual: f64) -> bool {
        match *self {
            SynthesisMode::Sparsity(_) => false,
            SynthesisMode::XiTarget(t) => xi <= t,
            SynthesisMode::Residual(e) => residual <= e,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match *self {
            SynthesisMode::Sparsity(k) if k == 0 || k > n => {
                Err(Error::invalid(format!("sparsity K={k} must be in 1..={n}")))
            }
            SynthesisMode::XiTarget(t) | SynthesisMode::Residual(t)
                if !(t > 0.0) || !t.is_finite() =>
            {
                Err(Error::invalid(format!(
                    "mode-2 threshold must be positive, got {t}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Refinement iteration; 0 is the OMP starting point.
    pub q: usize,
    pub xi: f64,
    pub residual_norm: f64,
    pub eta_inf: f64,
    pub eta_l2: f64,
    pub damping: f64,
    pub clamped: bool,
    pub accepted: bool,
}

/// Per sparsity level of a mode-2 run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub k: usize,
    pub xi_omp: f64,
    pub xi_refined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub geometry: ArrayGeometry,
    pub excitations: ExcitationVector,
    pub solution: SparseSolution,
    pub layout: SubarrayLayout,
    pub metrics: MetricsReport,
    pub trace: Vec<IterationRecord>,
    pub omp_trace: OmpTrace,
    pub levels: Vec<LevelRecord>,
    pub warning: Option<String>,
    /// Achieved field on the metric grid.
    #[serde(skip)]
    pub achieved: Vec<Complex64>,
}

fn finalize(
    problem: &SynthesisProblem,
    geometry: ArrayGeometry,
    solution: SparseSolution,
    omp_trace: OmpTrace,
    trace: Vec<IterationRecord>,
    warning: Option<String>,
) -> Result<SynthesisResult> {
    let n = problem.n;
    let excitations = solution.excitations(n)?;
    let achieved = evaluate_pattern(&geometry, &excitations, problem.reference.grid())?;
    let xi = problem.reference.xi_of_pattern(&achieved)?;
    let sll = measure_sll(&geometry, &excitations, problem.sll_step_deg)?;
    let metrics = MetricsReport {
        xi,
        chi: chi_metric(solution.support.len(), n)?,
        sll_db: sll.sll_db,
        mainlobe_peak_deg: sll.mainlobe_peak_deg,
    };
    let layout = layout_from_weights(&excitations, problem.merge_tol);
    Ok(SynthesisResult {
        geometry,
        excitations,
        solution,
        layout,
        metrics,
        trace,
        omp_trace,
        levels: Vec::new(),
        warning,
        achieved,
    })
}

fn xi_on(problem: &SynthesisProblem, geom: &ArrayGeometry, sol: &SparseSolution) -> Result<f64> {
    let w = sol.excitations(problem.n)?;
    problem.reference.evaluator(geom).xi(&w)
}

/// OMP-SS alone on the initial uniform geometry.
pub fn omp_synthesis(
    problem: &SynthesisProblem,
    mode: SynthesisMode,
    config: OmpConfig,
) -> Result<SynthesisResult> {
    mode.validate(problem.n)?;
    let geom = problem.initial_geometry();
    let dictionary = problem.steering(&geom).dictionary();
    let target = problem.desired.values();
    if let SynthesisMode::Sparsity(k) = mode {
        let (sol, trace) = omp_mode1_with_dictionary(&dictionary, target, k, config)?;
        return finalize(problem, geom, sol, trace, Vec::new(), None);
    }
    let evaluator = problem.reference.evaluator(&geom);
    let mut pursuit = OmpPursuit::new(&dictionary, target, config)?;
    let mut levels = Vec::new();
    let mut best: Option<(f64, SparseSolution)> = None;
    while pursuit.iterations() < problem.n {
        pursuit.step()?;
        let sol = pursuit.solution();
        let xi = evaluator.xi(&sol.excitations(problem.n)?)?;
        levels.push(LevelRecord {
            k: sol.support.len(),
            xi_omp: xi,
            xi_refined: xi,
        });
        if mode.met(xi, sol.residual_norm) {
            let mut r = finalize(
                problem,
                geom,
                sol,
                pursuit.trace().clone(),
                Vec::new(),
                None,
            )?;
            r.levels = levels;
            return Ok(r);
        }
        if best.as_ref().map_or(true, |(b, _)| xi < *b) {
            best = Some((xi, sol));
        }
    }
    let (_, sol) = best.expect("at least one iteration");
    let mut r = finalize(
        problem,
        geom,
        sol,
        pursuit.trace().clone(),
        Vec::new(),
        None,
    )?;
    r.levels = levels;
    Err(Error::InfeasibleSynthesis(Box::new(r)))
}

struct Refined {
    geometry: ArrayGeometry,
    solution: SparseSolution,
    xi: f64,
    trace: Vec<IterationRecord>,
    warning: Option<String>,
}

/// Refines positions for a fixed support until `Q` steps, a rejected step,
/// or `stop(ξ, residual)`.
fn refine_support(
    problem: &SynthesisProblem,
    geometry: ArrayGeometry,
    solution: SparseSolution,
    config: &RefinementConfig,
    stop: impl Fn(f64, f64) -> bool,
) -> Result<Refined> {
    let fbar = &problem.desired;
    let mut geom = geometry;
    let mut sol = solution;
    let mut xi = xi_on(problem, &geom, &sol)?;
    let mut trace = vec![IterationRecord {
        q: 0,
        xi,
        residual_norm: sol.residual_norm,
        eta_inf: 0.0,
        eta_l2: 0.0,
        damping: 0.0,
        clamped: false,
        accepted: true,
    }];
    let mut best = (xi, geom.clone(), sol.clone());
    let mut warning = None;
    let mut phi = problem.steering(&geom);

    for q in 1..=config.q {
        if stop(xi, sol.residual_norm) {
            break;
        }
        let w = sol.excitations(problem.n)?;
        let attempt =
            refine_positions_once(&phi, &geom, &w, fbar, config).and_then(|(next, step)| {
                let next_phi = problem.steering(&next);
                let next_sol = resolve_excitations(&next_phi, &sol.support, fbar)?;
                Ok((next, next_phi, next_sol, step))
            });
        let (next, next_phi, next_sol, step) = match attempt {
            Ok(v) => v,
            Err(e) => {
                warning = Some(format!("refinement stopped at iteration {q}: {e}"));
                let (bxi, bgeom, bsol) = best;
                return Ok(Refined {
                    geometry: bgeom,
                    solution: bsol,
                    xi: bxi,
                    trace,
                    warning,
                });
            }
        };
        let eta_inf = step.applied.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        let eta_l2 = step.applied.iter().map(|e| e * e).sum::<f64>().sqrt();
        let accepted = !config.require_improvement
            || next_sol.residual_norm <= sol.residual_norm * (1.0 + ACCEPT_SLACK);
        let next_xi = if accepted {
            xi_on(problem, &next, &next_sol)?
        } else {
            xi
        };
        trace.push(IterationRecord {
            q,
            xi: next_xi,
            residual_norm: next_sol.residual_norm,
            eta_inf,
            eta_l2,
            damping: step.damping,
            clamped: step.clamped,
            accepted,
        });
        if !accepted {
            break;
        }
        geom = next;
        phi = next_phi;
        sol = next_sol;
        xi = next_xi;
        if xi < best.0 {
            best = (xi, geom.clone(), sol.clone());
        }
    }
    Ok(Refined {
        geometry: geom,
        solution: sol,
        xi,
        trace,
        warning,
    })
}

fn check_refinement(problem: &SynthesisProblem, config: &RefinementConfig) -> Result<()> {
    config.validate()?;
    if config.d_min > problem.spacing {
        return Err(Error::invalid(format!(
            "d_min {} exceeds the initial spacing {}",
            config.d_min, problem.spacing
        )));
    }
    Ok(())
}

/// Mode 1: `K` OMP iterations, then up to `Q` refinement steps.
pub fn ogomp_mode1(
    problem: &SynthesisProblem,
    k: usize,
    config: &OgompConfig,
) -> Result<SynthesisResult> {
    SynthesisMode::Sparsity(k).validate(problem.n)?;
    check_refinement(problem, &config.refine)?;
    let geom = problem.initial_geometry();
    let dictionary = problem.steering(&geom).dictionary();
    let (sol, omp_trace) =
        omp_mode1_with_dictionary(&dictionary, problem.desired.values(), k, config.omp)?;
    if config.refine.q == 0 {
        return finalize(problem, geom, sol, omp_trace, Vec::new(), None);
    }
    let r = refine_support(problem, geom, sol, &config.refine, |_, _| false)?;
    finalize(
        problem, r.geometry, r.solution, omp_trace, r.trace, r.warning,
    )
}

/// Mode 2: the first sparsity `h = 1, 2, …` whose refined solution meets
/// the threshold.
pub fn ogomp_mode2(
    problem: &SynthesisProblem,
    mode: SynthesisMode,
    config: &OgompConfig,
) -> Result<SynthesisResult> {
    if let SynthesisMode::Sparsity(k) = mode {
        return ogomp_mode1(problem, k, config);
    }
    mode.validate(problem.n)?;
    check_refinement(problem, &config.refine)?;
    let n = problem.n;
    let fresh = problem.initial_geometry();
    let dictionary = problem.steering(&fresh).dictionary();
    let target = problem.desired.values();
    let mut pursuit = OmpPursuit::new(&dictionary, target, config.omp)?;
    let mut carried = fresh.clone();
    let mut levels = Vec::new();
    let mut best: Option<SynthesisResult> = None;
    let stop = |xi: f64, res: f64| mode.met(xi, res);

    for h in 1..=n {
        let (start_geom, sol, omp_trace) = if config.refine.carry_geometry && h > 1 {
            let dict = problem.steering(&carried).dictionary();
            let (sol, tr) = omp_mode1_with_dictionary(&dict, target, h, config.omp)?;
            (carried.clone(), sol, tr)
        } else {
            pursuit.step()?;
            (fresh.clone(), pursuit.solution(), pursuit.trace().clone())
        };
        let xi_omp = xi_on(problem, &start_geom, &sol)?;
        let r = refine_support(problem, start_geom, sol, &config.refine, stop)?;
        levels.push(LevelRecord {
            k: r.solution.support.len(),
            xi_omp,
            xi_refined: r.xi,
        });
        let met = mode.met(r.xi, r.solution.residual_norm);
        carried = r.geometry.clone();
        if met || best.as_ref().map_or(true, |b| r.xi < b.metrics.xi) {
            let mut res = finalize(
                problem, r.geometry, r.solution, omp_trace, r.trace, r.warning,
            )?;
            if met {
                res.levels = levels;
                return Ok(res);
            }
            res.levels = levels.clone();
            best = Some(res);
        }
    }
    let mut b = best.expect("at least one level");
    b.levels = levels;
    Err(Error::InfeasibleSynthesis(Box::new(b)))
}

/// Dispatches on the mode.
pub fn ogomp_synthesis(
    problem: &SynthesisProblem,
    mode: SynthesisMode,
    config: &OgompConfig,
) -> Result<SynthesisResult> {
    match mode {
        SynthesisMode::Sparsity(k) => ogomp_mode1(problem, k, config),
        _ => ogomp_mode2(problem, mode, config),
    }
}
