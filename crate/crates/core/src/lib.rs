//! Synthesis of clustered (subarrayed) non-uniform linear arrays.
//!
//! A desired far-field pattern is matched by an array whose elements are
//! grouped into a few contiguous subarrays with one weight each. Subarray
//! breakpoints are found by orthogonal matching pursuit on a cumulative-sum
//! basis; the off-grid variant additionally moves the elements.
//!
//! ```
//! use subsynth::{ogomp_mode1, OgompConfig, PatternSource, PatternSpec, ProblemOptions, SynthesisProblem};
//!
//! let spec = PatternSpec::Chebyshev { n: 20, sll_db: 20.0 };
//! let source = PatternSource::from_spec(&spec).unwrap();
//! let problem = SynthesisProblem::new(&source, 20, ProblemOptions::default()).unwrap();
//! let result = ogomp_mode1(&problem, 5, &OgompConfig::default()).unwrap();
//! assert_eq!(result.layout.count(), 5);
//! ```

pub mod error;
pub mod metrics;
pub mod model;
pub mod numerics;
pub mod ogomp;
pub mod omp;
pub mod patterns;

pub use error::{Error, Result};
pub use metrics::{
    chi_metric, extract_layout, layout_from_weights, measure_sll, metric_grid, sidelobe_peaks_db,
    xi_metric, MetricsReport, SllMeasurement, SubarrayLayout, SubarrayRun, XiDenominator,
    XiEvaluator, XiReference,
};
pub use model::{
    basis_expand, evaluate_pattern, steering_matrix, uniform_geometry, AngleGrid, ArrayGeometry,
    DesiredPattern, ExcitationVector, SparseBasis, SteeringMatrix,
};
pub use num_complex::Complex64;
pub use ogomp::{
    build_perturbation_system, ogomp_mode1, ogomp_mode2, ogomp_synthesis, omp_synthesis,
    refine_positions_once, resolve_excitations, IterationRecord, LevelRecord, OgompConfig,
    PerturbationStep, ProblemOptions, RefinementConfig, Symmetry, SynthesisMode, SynthesisProblem,
    SynthesisResult,
};
pub use omp::{
    omp_mode1, omp_mode1_with_dictionary, omp_mode2, omp_mode2_with_dictionary, Mode2Threshold,
    OmpConfig, OmpPursuit, OmpTrace, SparseSolution,
};
pub use patterns::{
    chebyshev_excitations, make_desired, taylor_excitations, PatternSamples, PatternSource,
    PatternSpec,
};

/// `f64` fields where `-inf` (no sidelobe) is written as `null`.
pub mod serde_db {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}
