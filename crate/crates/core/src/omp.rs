//! Orthogonal matching pursuit over the subarray dictionary `A = ΦΨ`.
//!
//! Column `j` of `A` is the field of a subarray spanning elements `j..N`, so a
//! support `Λ` with coefficients `x̂` describes a piecewise-constant
//! excitation with breakpoints at `Λ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::XiEvaluator;
use crate::model::{DesiredPattern, ExcitationVector, SparseBasis, SteeringMatrix};
use crate::numerics::{lstsq_complex, norm2, sub_vec, ComplexMatrix};

/// Relative band within which two correlations count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmpConfig {
    /// Divide correlations by the column norms of `A` before the argmax.
    pub normalize_columns: bool,
    /// Let the argmax range over indices already in the support.
    pub allow_reselection: bool,
}

/// Support (0-based, ascending) and coefficients of a sparse difference vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSolution {
    pub support: Vec<usize>,
    pub coeffs: Vec<Complex64>,
    pub residual_norm: f64,
}

impl SparseSolution {
    /// Sorts the pairs by index.
    pub fn new(support: Vec<usize>, coeffs: Vec<Complex64>, residual_norm: f64) -> Self {
        let mut pairs: Vec<(usize, Complex64)> = support.into_iter().zip(coeffs).collect();
        pairs.sort_by_key(|p| p.0);
        let (support, coeffs) = pairs.into_iter().unzip();
        Self {
            support,
            coeffs,
            residual_norm,
        }
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn excitations(&self, n: usize) -> Result<ExcitationVector> {
        SparseBasis::new(n).expand_support(&self.support, &self.coeffs)
    }

    /// `‖F̄ − A_Λ x̂‖₂` recomputed from scratch.
    pub fn recompute_residual(&self, dictionary: &ComplexMatrix, target: &[Complex64]) -> f64 {
        let fit = dictionary
            .select_columns(&self.support)
            .mul_vec(&self.coeffs);
        norm2(&sub_vec(target, &fit))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmpStep {
    /// 0-based element index chosen at this iteration.
    pub index: usize,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OmpTrace {
    pub steps: Vec<OmpStep>,
}

/// Incremental OMP state; each [`OmpPursuit::step`] adds one atom.
#[derive(Debug, Clone)]
pub struct OmpPursuit<'a> {
    dictionary: &'a ComplexMatrix,
    target: &'a [Complex64],
    config: OmpConfig,
    col_norms: Vec<f64>,
    /// Selection order.
    support: Vec<usize>,
    coeffs: Vec<Complex64>,
    residual: Vec<Complex64>,
    residual_norm: f64,
    trace: OmpTrace,
}

impl<'a> OmpPursuit<'a> {
    pub fn new(
        dictionary: &'a ComplexMatrix,
        target: &'a [Complex64],
        config: OmpConfig,
    ) -> Result<Self> {
        if target.len() != dictionary.rows() {
            return Err(Error::invalid(format!(
                "target has {} samples, dictionary has {} rows",
                target.len(),
                dictionary.rows()
            )));
        }
        let col_norms = (0..dictionary.cols())
            .map(|j| dictionary.column_norm(j))
            .collect();
        Ok(Self {
            dictionary,
            target,
            config,
            col_norms,
            support: Vec::new(),
            coeffs: Vec::new(),
            residual: target.to_vec(),
            residual_norm: norm2(target),
            trace: OmpTrace::default(),
        })
    }

    pub fn iterations(&self) -> usize {
        self.trace.steps.len()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    pub fn residual(&self) -> &[Complex64] {
        &self.residual
    }

    pub fn trace(&self) -> &OmpTrace {
        &self.trace
    }

    /// Index maximizing `|(ΦΨ)ᴴ r|`, lowest index among ties.
    fn select(&self) -> Option<usize> {
        let z = self.dictionary.adjoint_mul_vec(&self.residual);
        let mut best: Option<(usize, f64)> = None;
        for (j, zj) in z.iter().enumerate() {
            if !self.config.allow_reselection && self.support.contains(&j) {
                continue;
            }
            let mut score = zj.norm();
            if self.config.normalize_columns {
                if self.col_norms[j] == 0.0 {
                    continue;
                }
                score /= self.col_norms[j];
            }
            match best {
                Some((_, b)) if score <= b * (1.0 + TIE_TOLERANCE) => {}
                _ => best = Some((j, score)),
            }
        }
        best.map(|(j, _)| j)
    }

    /// One match / support update / least-squares update cycle.
    pub fn step(&mut self) -> Result<()> {
        let idx = self
            .select()
            .ok_or_else(|| Error::invalid("no candidate atom left"))?;
        if !self.support.contains(&idx) {
            self.support.push(idx);
        }
        let sub = self.dictionary.select_columns(&self.support);
        self.coeffs = lstsq_complex(&sub, self.target)?;
        self.residual = sub_vec(self.target, &sub.mul_vec(&self.coeffs));
        self.residual_norm = norm2(&self.residual);
        self.trace.steps.push(OmpStep {
            index: idx,
            residual_norm: self.residual_norm,
        });
        Ok(())
    }

    pub fn solution(&self) -> SparseSolution {
        SparseSolution::new(
            self.support.clone(),
            self.coeffs.clone(),
            self.residual_norm,
        )
    }

    pub fn into_parts(self) -> (SparseSolution, OmpTrace) {
        let sol = self.solution();
        (sol, self.trace)
    }
}

fn check_inputs(phi: &SteeringMatrix, psi: SparseBasis, fbar: &DesiredPattern) -> Result<()> {
    if psi.size() != phi.cols() {
        return Err(Error::invalid("basis size does not match element count"));
    }
    if phi.grid() != fbar.grid() {
        return Err(Error::invalid(
            "desired pattern grid differs from steering grid",
        ));
    }
    Ok(())
}

/// Mode 1: exactly `k` iterations.
pub fn omp_mode1(
    phi: &SteeringMatrix,
    psi: SparseBasis,
    fbar: &DesiredPattern,
    k: usize,
    config: OmpConfig,
) -> Result<(SparseSolution, OmpTrace)> {
    check_inputs(phi, psi, fbar)?;
    let dictionary = phi.dictionary();
    omp_mode1_with_dictionary(&dictionary, fbar.values(), k, config)
}

pub fn omp_mode1_with_dictionary(
    dictionary: &ComplexMatrix,
    target: &[Complex64],
    k: usize,
    config: OmpConfig,
) -> Result<(SparseSolution, OmpTrace)> {
    let n = dictionary.cols();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("sparsity K={k} must be in 1..={n}")));
    }
    let mut pursuit = OmpPursuit::new(dictionary, target, config)?;
    for _ in 0..k {
        pursuit.step()?;
    }
    Ok(pursuit.into_parts())
}

/// Mode-2 stopping rule.
#[derive(Debug, Clone, Copy)]
pub enum Mode2Threshold<'e> {
    /// `‖F̄ − A x‖₂ ≤ ε` on the solver grid.
    Residual(f64),
    /// `ξ ≤ target` on the metric grid.
    Xi {
        target: f64,
        evaluator: &'e XiEvaluator,
    },
}

impl Mode2Threshold<'_> {
    fn value(&self) -> f64 {
        match *self {
            Mode2Threshold::Residual(eps) => eps,
            Mode2Threshold::Xi { target, .. } => target,
        }
    }
}

/// Mode 2: the fewest iterations meeting `threshold`.
pub fn omp_mode2(
    phi: &SteeringMatrix,
    psi: SparseBasis,
    fbar: &DesiredPattern,
    threshold: Mode2Threshold<'_>,
    config: OmpConfig,
) -> Result<(SparseSolution, OmpTrace)> {
    check_inputs(phi, psi, fbar)?;
    let dictionary = phi.dictionary();
    omp_mode2_with_dictionary(&dictionary, fbar.values(), threshold, config)
}

pub fn omp_mode2_with_dictionary(
    dictionary: &ComplexMatrix,
    target: &[Complex64],
    threshold: Mode2Threshold<'_>,
    config: OmpConfig,
) -> Result<(SparseSolution, OmpTrace)> {
    if !(threshold.value() > 0.0) {
        return Err(Error::invalid("mode-2 threshold must be positive"));
    }
    let n = dictionary.cols();
    let mut pursuit = OmpPursuit::new(dictionary, target, config)?;
    let mut best = f64::INFINITY;
    while pursuit.iterations() < n {
        pursuit.step()?;
        let achieved = match threshold {
            Mode2Threshold::Residual(_) => pursuit.residual_norm(),
            Mode2Threshold::Xi { evaluator, .. } => {
                let sol = pursuit.solution();
                evaluator.xi(&sol.excitations(n)?)?
            }
        };
        best = best.min(achieved);
        if achieved <= threshold.value() {
            return Ok(pursuit.into_parts());
        }
    }
    Err(Error::Infeasible { best })
}
