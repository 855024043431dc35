//! The serialized result document. Element indices are 1-based here.

use serde::{Deserialize, Serialize};
use subsynth::{
    ArrayGeometry, Complex64, ExcitationVector, IterationRecord, LevelRecord, MetricsReport,
    SparseSolution, SynthesisResult,
};

use crate::config::RunConfig;

pub const FORMAT: &str = "subsynth-result/1";
pub const RESULT_FILE: &str = "result.json";
pub const PATTERN_FILE: &str = "achieved_pattern.csv";
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub format: String,
    pub config: RunConfig,
    pub infeasible: bool,
    pub warning: Option<String>,
    pub n: usize,
    /// Element positions in wavelengths.
    pub positions: Vec<f64>,
    pub excitations: Vec<ExcitationEntry>,
    /// Subarray breakpoints (first element of each subarray).
    pub support: Vec<usize>,
    /// Difference coefficients aligned with `support`.
    pub coefficients: Vec<[f64; 2]>,
    pub layout: Vec<RunEntry>,
    pub metrics: MetricsReport,
    pub trace: Vec<IterationRecord>,
    pub levels: Vec<LevelRecord>,
    pub omp_trace: Vec<OmpEntry>,
    pub achieved_pattern: PatternRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationEntry {
    pub element: usize,
    pub re: f64,
    pub im: f64,
    /// `|w|` divided by the largest `|w|`.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub first: usize,
    pub last: usize,
    pub size: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmpEntry {
    pub element: usize,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternRef {
    pub file: String,
    pub samples: usize,
}

impl ResultDocument {
    pub fn from_result(config: &RunConfig, r: &SynthesisResult, infeasible: bool) -> Self {
        let mags = r.excitations.normalized_magnitudes();
        Self {
            format: FORMAT.to_string(),
            config: config.clone(),
            infeasible,
            warning: r.warning.clone(),
            n: r.geometry.len(),
            positions: r.geometry.positions().to_vec(),
            excitations: r
                .excitations
                .weights()
                .iter()
                .zip(mags)
                .enumerate()
                .map(|(i, (w, m))| ExcitationEntry {
                    element: i + 1,
                    re: w.re,
                    im: w.im,
                    magnitude: m,
                })
                .collect(),
            support: r.solution.support.iter().map(|s| s + 1).collect(),
            coefficients: r.solution.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            layout: r
                .layout
                .runs
                .iter()
                .map(|run| RunEntry {
                    first: run.first + 1,
                    last: run.last + 1,
                    size: run.size(),
                    re: run.weight.re,
                    im: run.weight.im,
                })
                .collect(),
            metrics: r.metrics,
            trace: r.trace.clone(),
            levels: r.levels.clone(),
            omp_trace: r
                .omp_trace
                .steps
                .iter()
                .map(|s| OmpEntry {
                    element: s.index + 1,
                    residual_norm: s.residual_norm,
                })
                .collect(),
            achieved_pattern: PatternRef {
                file: PATTERN_FILE.to_string(),
                samples: r.achieved.len(),
            },
        }
    }

    pub fn geometry(&self) -> subsynth::Result<ArrayGeometry> {
        ArrayGeometry::new(self.positions.clone())
    }

    pub fn excitation_vector(&self) -> ExcitationVector {
        ExcitationVector::new(
            self.excitations
                .iter()
                .map(|e| Complex64::new(e.re, e.im))
                .collect(),
        )
    }

    /// The stored sparse solution with 0-based indices; `None` if an index is 0.
    pub fn solution(&self) -> Option<SparseSolution> {
        let support = self
            .support
            .iter()
            .map(|&s| s.checked_sub(1))
            .collect::<Option<Vec<usize>>>()?;
        let coeffs = self
            .coefficients
            .iter()
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Some(SparseSolution::new(support, coeffs, f64::NAN))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
