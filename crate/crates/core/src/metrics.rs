//! Pattern-matching error, subarray rate, sidelobe level and layout extraction.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    evaluate_pattern, AngleGrid, ArrayGeometry, ExcitationVector, SparseBasis, SteeringMatrix,
};
use crate::numerics::trapezoid;
use crate::omp::SparseSolution;

/// Default ξ integration step.
pub const DEFAULT_METRIC_STEP_DEG: f64 = 0.05;
/// Default SLL scan step.
pub const DEFAULT_SLL_STEP_DEG: f64 = 0.01;
/// Default relative tolerance for merging equal neighbouring weights.
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub xi: f64,
    pub chi: f64,
    /// `-inf` when the pattern has no sidelobe.
    #[serde(with = "crate::serde_db")]
    pub sll_db: f64,
    pub mainlobe_peak_deg: f64,
}

/// Which pattern normalizes the ξ integral.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiDenominator {
    /// `∫|F̄|²`, the well-posed target-relative form.
    #[default]
    Desired,
    /// `∫|F|²`, the literal form; diverges as `F → 0`.
    Achieved,
}

/// The dense `[0°, 90°]` grid ξ is integrated on.
pub fn metric_grid(step_deg: f64) -> Result<AngleGrid> {
    AngleGrid::uniform_step_degrees(0.0, 90.0, step_deg)
}

/// `ξ = ∫₀^{π/2}|F̄−F|² / ∫₀^{π/2}|F̄|²` by the trapezoidal rule on `grid`.
///
/// Samples outside `[0, π/2]` are ignored.
pub fn xi_metric(
    grid: &AngleGrid,
    desired: &[Complex64],
    achieved: &[Complex64],
    denominator: XiDenominator,
) -> Result<f64> {
    if desired.len() != grid.len() || achieved.len() != grid.len() {
        return Err(Error::invalid("xi: pattern lengths must match the grid"));
    }
    let idx: Vec<usize> = grid
        .thetas()
        .iter()
        .enumerate()
        .filter(|(_, &t)| (0.0..=FRAC_PI_2).contains(&t))
        .map(|(i, _)| i)
        .collect();
    let x: Vec<f64> = idx.iter().map(|&i| grid.thetas()[i]).collect();
    let err: Vec<f64> = idx
        .iter()
        .map(|&i| (desired[i] - achieved[i]).norm_sqr())
        .collect();
    let reference = match denominator {
        XiDenominator::Desired => desired,
        XiDenominator::Achieved => achieved,
    };
    let energy: Vec<f64> = idx.iter().map(|&i| reference[i].norm_sqr()).collect();
    let den = trapezoid(&x, &energy)?;
    if !(den > 0.0) {
        return Err(Error::invalid(
            "xi: reference pattern has zero energy on [0, π/2]",
        ));
    }
    Ok(trapezoid(&x, &err)? / den)
}

/// Desired field on the metric grid together with the ξ normalization.
#[derive(Debug, Clone)]
pub struct XiReference {
    grid: AngleGrid,
    desired: Vec<Complex64>,
    denominator: XiDenominator,
}

impl XiReference {
    pub fn new(
        grid: AngleGrid,
        desired: Vec<Complex64>,
        denominator: XiDenominator,
    ) -> Result<Self> {
        if desired.len() != grid.len() {
            return Err(Error::invalid("xi reference length must match its grid"));
        }
        Ok(Self {
            grid,
            desired,
            denominator,
        })
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn desired(&self) -> &[Complex64] {
        &self.desired
    }

    pub fn denominator(&self) -> XiDenominator {
        self.denominator
    }

    pub fn xi_of_pattern(&self, achieved: &[Complex64]) -> Result<f64> {
        xi_metric(&self.grid, &self.desired, achieved, self.denominator)
    }

    /// Precomputes the metric-grid steering matrix for a fixed geometry.
    pub fn evaluator(&self, geom: &ArrayGeometry) -> XiEvaluator {
        XiEvaluator {
            reference: self.clone(),
            steering: SteeringMatrix::new(geom, &self.grid),
        }
    }
}

/// ξ for excitations on one fixed geometry.
#[derive(Debug, Clone)]
pub struct XiEvaluator {
    reference: XiReference,
    steering: SteeringMatrix,
}

impl XiEvaluator {
    pub fn pattern(&self, w: &ExcitationVector) -> Result<Vec<Complex64>> {
        self.steering.apply(w)
    }

    pub fn xi(&self, w: &ExcitationVector) -> Result<f64> {
        self.reference.xi_of_pattern(&self.pattern(w)?)
    }
}

/// `χ = K / N`.
pub fn chi_metric(k: usize, n: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "chi needs 1 <= K <= N, got K={k}, N={n}"
        )));
    }
    Ok(k as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SllMeasurement {
    pub sll_db: f64,
    pub mainlobe_peak_deg: f64,
}

/// Peak sidelobe level from a dense scan of `[−90°, 90°]`.
///
/// The main lobe is the region around the global maximum bounded by the first
/// local minimum on either side. A lobe touching the scan edge simply ends
/// there, which is what mirroring the scan past ±90° would give.
pub fn measure_sll(
    geom: &ArrayGeometry,
    w: &ExcitationVector,
    scan_step_deg: f64,
) -> Result<SllMeasurement> {
    if w.weights().iter().all(|v| v.norm() == 0.0) {
        return Err(Error::invalid("SLL of an all-zero excitation"));
    }
    let grid = AngleGrid::uniform_step_degrees(-90.0, 90.0, scan_step_deg)?;
    let mag: Vec<f64> = evaluate_pattern(geom, w, &grid)?
        .iter()
        .map(|v| v.norm())
        .collect();
    Ok(sll_from_scan(grid.degrees(), &mag))
}

/// SLL from precomputed magnitudes over ordered angles.
pub fn sll_from_scan(degrees: &[f64], mag: &[f64]) -> SllMeasurement {
    let (peak, &peak_val) = mag
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    let mut lo = peak;
    while lo > 0 && mag[lo - 1] <= mag[lo] {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < mag.len() && mag[hi + 1] <= mag[hi] {
        hi += 1;
    }
    let side = mag[..lo]
        .iter()
        .chain(&mag[hi + 1..])
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let sll_db = if side == f64::NEG_INFINITY || peak_val <= 0.0 {
        f64::NEG_INFINITY
    } else {
        20.0 * (side / peak_val).log10()
    };
    SllMeasurement {
        sll_db,
        mainlobe_peak_deg: degrees[peak],
    }
}

/// Levels in dB (relative to the main peak) of the local sidelobe maxima
/// on the positive half of a `[0°, 90°]` scan, nearest the main lobe first.
pub fn sidelobe_peaks_db(
    geom: &ArrayGeometry,
    w: &ExcitationVector,
    scan_step_deg: f64,
) -> Result<Vec<(f64, f64)>> {
    let grid = AngleGrid::uniform_step_degrees(0.0, 90.0, scan_step_deg)?;
    let mag: Vec<f64> = evaluate_pattern(geom, w, &grid)?
        .iter()
        .map(|v| v.norm())
        .collect();
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 1..mag.len().saturating_sub(1) {
        if mag[i] >= mag[i - 1] && mag[i] > mag[i + 1] && mag[i] < peak {
            out.push((grid.degrees()[i], 20.0 * (mag[i] / peak).log10()));
        }
    }
    Ok(out)
}

/// One contiguous group of elements sharing a weight (0-based, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubarrayRun {
    pub first: usize,
    pub last: usize,
    pub weight: Complex64,
}

impl SubarrayRun {
    pub fn size(&self) -> usize {
        self.last - self.first + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubarrayLayout {
    pub runs: Vec<SubarrayRun>,
}

impl SubarrayLayout {
    pub fn count(&self) -> usize {
        self.runs.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.runs.iter().map(SubarrayRun::size).collect()
    }
}

/// Groups maximal runs of equal consecutive weights.
pub fn layout_from_weights(w: &ExcitationVector, merge_tol: f64) -> SubarrayLayout {
    let weights = w.weights();
    let scale = weights.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = merge_tol * scale;
    let mut runs: Vec<SubarrayRun> = Vec::new();
    for (i, &v) in weights.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if (v - weights[r.last]).norm() <= tol => r.last = i,
            _ => runs.push(SubarrayRun {
                first: i,
                last: i,
                weight: v,
            }),
        }
    }
    SubarrayLayout { runs }
}

/// Expands `Ψx` for the solution and groups it into subarrays.
pub fn extract_layout(
    solution: &SparseSolution,
    n: usize,
    merge_tol: f64,
) -> Result<SubarrayLayout> {
    let w = SparseBasis::new(n).expand_support(&solution.support, &solution.coeffs)?;
    Ok(layout_from_weights(&w, merge_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::uniform_geometry;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid_and_pattern() -> (AngleGrid, Vec<Complex64>) {
        let grid = metric_grid(0.5).unwrap();
        let g = uniform_geometry(8, 0.5).unwrap();
        let w = ExcitationVector::from_real(&[0.3, 0.6, 0.9, 1.0, 1.0, 0.9, 0.6, 0.3]);
        let f = evaluate_pattern(&g, &w, &grid).unwrap();
        (grid, f)
    }

    #[test]
    fn xi_identities() {
        let (grid, f) = grid_and_pattern();
        assert_eq!(
            xi_metric(&grid, &f, &f, XiDenominator::Desired).unwrap(),
            0.0
        );
        let zero = vec![c(0.0, 0.0); f.len()];
        assert!((xi_metric(&grid, &f, &zero, XiDenominator::Desired).unwrap() - 1.0).abs() < 1e-15);
        let scaled: Vec<_> = f.iter().map(|v| v * 1.1).collect();
        let xi = xi_metric(&grid, &f, &scaled, XiDenominator::Desired).unwrap();
        assert!((xi - 0.01).abs() < 1e-10 * 0.01);
        assert!(xi_metric(&grid, &f, &zero, XiDenominator::Achieved).is_err());
        assert!(xi_metric(&grid, &zero, &f, XiDenominator::Desired).is_err());
    }

    #[test]
    fn xi_quadratic_in_error() {
        let (grid, f) = grid_and_pattern();
        let e: Vec<_> = (0..f.len())
            .map(|i| c((i as f64 * 0.37).sin(), 0.2))
            .collect();
        let a1: Vec<_> = f.iter().zip(&e).map(|(a, b)| a + b).collect();
        let a2: Vec<_> = f.iter().zip(&e).map(|(a, b)| a + 2.0 * b).collect();
        let x1 = xi_metric(&grid, &f, &a1, XiDenominator::Desired).unwrap();
        let x2 = xi_metric(&grid, &f, &a2, XiDenominator::Desired).unwrap();
        assert!((x2 - 4.0 * x1).abs() <= 1e-10 * x2);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_metric(5, 20).unwrap(), 0.25);
        assert_eq!(chi_metric(7, 7).unwrap(), 1.0);
        assert_eq!(chi_metric(9, 100).unwrap(), 0.09);
        assert!(chi_metric(0, 3).is_err());
        assert!(chi_metric(4, 3).is_err());
    }

    #[test]
    fn sll_single_element_has_no_sidelobe() {
        let g = ArrayGeometry::new(vec![0.0]).unwrap();
        let m = measure_sll(&g, &ExcitationVector::from_real(&[1.0]), 0.1).unwrap();
        assert_eq!(m.sll_db, f64::NEG_INFINITY);
    }

    #[test]
    fn sll_uniform_16() {
        let g = uniform_geometry(16, 0.5).unwrap();
        let m = measure_sll(&g, &ExcitationVector::from_real(&[1.0; 16]), 0.01).unwrap();
        assert!((m.sll_db + 13.1).abs() <= 0.3, "{}", m.sll_db);
        assert_eq!(m.mainlobe_peak_deg, 0.0);
    }

    #[test]
    fn sll_invariant_to_complex_scale() {
        let g = uniform_geometry(10, 0.5).unwrap();
        let w = ExcitationVector::from_real(&[0.5, 0.7, 0.8, 1.0, 1.0, 1.0, 1.0, 0.8, 0.7, 0.5]);
        let s = c(-0.3, 2.2);
        let ws = ExcitationVector::new(w.weights().iter().map(|v| v * s).collect());
        let a = measure_sll(&g, &w, 0.05).unwrap();
        let b = measure_sll(&g, &ws, 0.05).unwrap();
        assert!((a.sll_db - b.sll_db).abs() < 1e-9);
    }

    #[test]
    fn layout_single_breakpoint() {
        let sol = SparseSolution::new(vec![0], vec![c(0.8, 0.0)], 0.0);
        let l = extract_layout(&sol, 12, DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(l.count(), 1);
        assert_eq!((l.runs[0].first, l.runs[0].last), (0, 11));
    }

    #[test]
    fn layout_from_breakpoints() {
        // 1-based breakpoints {1, 6, 14, 19, 20}
        let sol = SparseSolution::new(
            vec![0, 5, 13, 18, 19],
            vec![
                c(1.0, 0.0),
                c(0.5, 0.0),
                c(-0.7, 0.0),
                c(0.2, 0.0),
                c(0.4, 0.0),
            ],
            0.0,
        );
        let l = extract_layout(&sol, 20, DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(l.sizes(), vec![5, 8, 5, 1, 1]);
    }

    #[test]
    fn layout_of_published_clustered_array() {
        // Normalized weights of the N = 20, K = 5 clustered array.
        let w = [1.0, 0.5804, 0.8583, 0.5804, 1.0];
        let sol = SparseSolution::new(
            vec![0, 1, 6, 14, 19],
            vec![
                c(w[0], 0.0),
                c(w[1] - w[0], 0.0),
                c(w[2] - w[1], 0.0),
                c(w[3] - w[2], 0.0),
                c(w[4] - w[3], 0.0),
            ],
            0.0,
        );
        let l = extract_layout(&sol, 20, DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(l.count(), 5);
        assert_eq!(l.sizes(), vec![1, 5, 8, 5, 1]);
        for (run, expect) in l.runs.iter().zip(w) {
            assert!((run.weight.re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn layout_merges_zero_coefficient() {
        let sol = SparseSolution::new(
            vec![0, 3, 5],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
            0.0,
        );
        let l = extract_layout(&sol, 8, DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(l.sizes(), vec![5, 3]);
    }
}
