//! Geometry, angle grids, the steering matrix and the cumulative sparse basis.
//!
//! Positions are in wavelengths throughout, so the phase of element `n` at
//! angle `θ` is `2π·d_n·sin θ`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

const ANGLE_SLACK: f64 = 1e-12;

/// Strictly increasing observation angles within `[−π/2, π/2]`.
///
/// The degree values are kept alongside the radians so grids read from or
/// written to files keep their exact textual abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    thetas: Vec<f64>,
    degrees: Vec<f64>,
}

impl AngleGrid {
    pub fn from_radians(thetas: Vec<f64>) -> Result<Self> {
        let thetas = clamp_and_check(thetas, FRAC_PI_2)?;
        let degrees = thetas.iter().map(|t| t.to_degrees()).collect();
        Ok(Self { thetas, degrees })
    }

    pub fn from_degrees(degrees: Vec<f64>) -> Result<Self> {
        let degrees = clamp_and_check(degrees, 90.0)?;
        let thetas = degrees
            .iter()
            .map(|d| d.to_radians().clamp(-FRAC_PI_2, FRAC_PI_2))
            .collect();
        Ok(Self { thetas, degrees })
    }

    /// `m` equally spaced angles spanning `[lo, hi]` radians, endpoints included.
    pub fn uniform(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("angle grid needs at least 2 points"));
        }
        let span = hi - lo;
        let last = (m - 1) as f64;
        Self::from_radians((0..m).map(|k| lo + span * k as f64 / last).collect())
    }

    /// Grid over `[lo_deg, hi_deg]` with the given step; the step must divide the span.
    pub fn uniform_step_degrees(lo_deg: f64, hi_deg: f64, step_deg: f64) -> Result<Self> {
        if step_deg <= 0.0 || hi_deg <= lo_deg {
            return Err(Error::invalid("degree grid needs step > 0 and hi > lo"));
        }
        let span = hi_deg - lo_deg;
        let steps = (span / step_deg).round();
        if (steps * step_deg - span).abs() > 1e-9 * span {
            return Err(Error::invalid(format!(
                "step {step_deg}° does not divide span {span}°"
            )));
        }
        let steps = steps as usize;
        Self::from_degrees(
            (0..=steps)
                .map(|k| lo_deg + span * k as f64 / steps as f64)
                .collect(),
        )
    }

    /// Default solver grid: `4N + 1` uniform points over `[−π/2, π/2]`.
    pub fn solver_default(n_elements: usize) -> Result<Self> {
        Self::uniform(-FRAC_PI_2, FRAC_PI_2, 4 * n_elements + 1)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

fn clamp_and_check(mut v: Vec<f64>, bound: f64) -> Result<Vec<f64>> {
    if v.len() < 2 {
        return Err(Error::invalid("angle grid needs at least 2 points"));
    }
    for t in &mut v {
        if !t.is_finite() || t.abs() > bound * (1.0 + ANGLE_SLACK) {
            return Err(Error::invalid(format!("angle {t} outside ±{bound}")));
        }
        *t = t.clamp(-bound, bound);
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("angle grid must be strictly increasing"));
    }
    Ok(v)
}

/// Element positions in wavelengths, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ArrayGeometry {
    positions: Vec<f64>,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("geometry has no elements"));
        }
        if positions.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("non-finite element position"));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "element positions must be strictly increasing",
            ));
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn min_spacing(&self) -> f64 {
        self.positions
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// True when sorted with every gap at least `d_min`.
    pub fn satisfies_spacing(&self, d_min: f64) -> bool {
        self.positions
            .windows(2)
            .all(|w| w[1] - w[0] >= d_min && w[1] > w[0])
    }
}

impl TryFrom<Vec<f64>> for ArrayGeometry {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ArrayGeometry> for Vec<f64> {
    fn from(g: ArrayGeometry) -> Self {
        g.positions
    }
}

/// `N` elements centred on the origin: `d_n = (n − (N+1)/2)·spacing`.
pub fn uniform_geometry(n: usize, spacing: f64) -> Result<ArrayGeometry> {
    if n < 2 {
        return Err(Error::invalid(format!("need N >= 2 elements, got {n}")));
    }
    if !(spacing > 0.0) {
        return Err(Error::invalid(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let centre = (n as f64 + 1.0) / 2.0;
    ArrayGeometry::new((1..=n).map(|k| (k as f64 - centre) * spacing).collect())
}

/// Unit phasor `exp(j·2π·d·sin θ)`.
#[inline]
pub fn element_phasor(position: f64, sin_theta: f64) -> Complex64 {
    Complex64::cis(2.0 * PI * position * sin_theta)
}

/// `Φ[m, n] = exp(j·2π·d_n·sin θ_m)`.
#[derive(Debug, Clone)]
pub struct SteeringMatrix {
    matrix: ComplexMatrix,
    grid: AngleGrid,
}

impl SteeringMatrix {
    pub fn new(geom: &ArrayGeometry, grid: &AngleGrid) -> Self {
        let sines: Vec<f64> = grid.thetas().iter().map(|t| t.sin()).collect();
        let d = geom.positions();
        Self {
            matrix: ComplexMatrix::from_fn(sines.len(), d.len(), |m, n| {
                element_phasor(d[n], sines[m])
            }),
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn apply(&self, w: &ExcitationVector) -> Result<Vec<Complex64>> {
        if w.len() != self.cols() {
            return Err(Error::invalid(format!(
                "excitation length {} does not match {} elements",
                w.len(),
                self.cols()
            )));
        }
        Ok(self.matrix.mul_vec(w.weights()))
    }

    /// The dictionary `A = ΦΨ`; column `j` is the sum of steering columns `j..N`.
    pub fn dictionary(&self) -> ComplexMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut a = self.matrix.clone();
        for j in (0..n.saturating_sub(1)).rev() {
            for i in 0..m {
                let v = a.get(i, j) + a.get(i, j + 1);
                a.set(i, j, v);
            }
        }
        a
    }
}

pub fn steering_matrix(geom: &ArrayGeometry, grid: &AngleGrid) -> SteeringMatrix {
    SteeringMatrix::new(geom, grid)
}

/// Lower-triangular all-ones `N×N` basis, applied implicitly as a prefix sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseBasis {
    n: usize,
}

impl SparseBasis {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `Ψx`, i.e. the running sum of `x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<ExcitationVector> {
        if x.len() != self.n {
            return Err(Error::invalid(format!(
                "basis of size {} applied to vector of length {}",
                self.n,
                x.len()
            )));
        }
        Ok(basis_expand(x))
    }

    /// `Ψ` restricted to `support`, applied to `coeffs`.
    pub fn expand_support(
        &self,
        support: &[usize],
        coeffs: &[Complex64],
    ) -> Result<ExcitationVector> {
        if support.len() != coeffs.len() {
            return Err(Error::invalid("support and coefficients differ in length"));
        }
        let mut x = vec![Complex64::new(0.0, 0.0); self.n];
        for (&s, &c) in support.iter().zip(coeffs) {
            if s >= self.n {
                return Err(Error::invalid(format!("support index {s} out of range")));
            }
            x[s] += c;
        }
        Ok(basis_expand(&x))
    }

    /// `Ψ⁻¹w`: first element, then successive differences.
    pub fn difference(&self, w: &ExcitationVector) -> Vec<Complex64> {
        difference(w.weights())
    }
}

/// Running sum `w_n = Σ_{k≤n} x_k`.
pub fn basis_expand(x: &[Complex64]) -> ExcitationVector {
    let mut acc = Complex64::new(0.0, 0.0);
    ExcitationVector::new(
        x.iter()
            .map(|&v| {
                acc += v;
                acc
            })
            .collect(),
    )
}

/// `[w_1, w_2 − w_1, …, w_N − w_{N−1}]`.
pub fn difference(w: &[Complex64]) -> Vec<Complex64> {
    let mut prev = Complex64::new(0.0, 0.0);
    w.iter()
        .map(|&v| {
            let d = v - prev;
            prev = v;
            d
        })
        .collect()
}

/// Complex excitation per element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationVector {
    weights: Vec<Complex64>,
}

impl ExcitationVector {
    pub fn new(weights: Vec<Complex64>) -> Self {
        Self { weights }
    }

    pub fn from_real(weights: &[f64]) -> Self {
        Self::new(weights.iter().map(|&w| Complex64::new(w, 0.0)).collect())
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Magnitudes scaled so the largest is 1 (all zeros stay zero).
    pub fn normalized_magnitudes(&self) -> Vec<f64> {
        let max = self.weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
        self.weights
            .iter()
            .map(|w| if max > 0.0 { w.norm() / max } else { 0.0 })
            .collect()
    }
}

/// Target field samples on an angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredPattern {
    grid: AngleGrid,
    values: Vec<Complex64>,
}

impl DesiredPattern {
    pub fn new(grid: AngleGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} pattern samples for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().all(|v| v.norm() == 0.0) {
            return Err(Error::invalid("desired pattern is identically zero"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("desired pattern has non-finite samples"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Array factor `F(θ_m) = Σ_n w_n·exp(j·2π·d_n·sin θ_m)` by direct summation.
pub fn evaluate_pattern(
    geom: &ArrayGeometry,
    w: &ExcitationVector,
    grid: &AngleGrid,
) -> Result<Vec<Complex64>> {
    if geom.len() != w.len() {
        return Err(Error::invalid(format!(
            "{} excitations for {} elements",
            w.len(),
            geom.len()
        )));
    }
    Ok(grid
        .thetas()
        .iter()
        .map(|t| {
            let s = t.sin();
            geom.positions()
                .iter()
                .zip(w.weights())
                .map(|(&d, &wn)| wn * element_phasor(d, s))
                .sum()
        })
        .collect())
}
