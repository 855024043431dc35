//! Fixtures shared by the benchmarks.

use subsynth::numerics::ComplexMatrix;
use subsynth::{
    omp_synthesis, ArrayGeometry, Complex64, ExcitationVector, OmpConfig, PatternSource,
    PatternSpec, ProblemOptions, SynthesisMode, SynthesisProblem,
};

pub fn chebyshev_problem(n: usize, sll_db: f64) -> SynthesisProblem {
    let source =
        PatternSource::from_spec(&PatternSpec::Chebyshev { n, sll_db }).expect("valid spec");
    SynthesisProblem::new(&source, n, ProblemOptions::default()).expect("valid problem")
}

pub fn taylor_problem(n: usize, sll_db: f64, nbar: usize) -> SynthesisProblem {
    let source =
        PatternSource::from_spec(&PatternSpec::Taylor { n, sll_db, nbar }).expect("valid spec");
    SynthesisProblem::new(&source, n, ProblemOptions::default()).expect("valid problem")
}

/// Dictionary and target of `problem` on its initial geometry.
pub fn dictionary(problem: &SynthesisProblem) -> (ComplexMatrix, Vec<Complex64>) {
    let phi = problem.steering(&problem.initial_geometry());
    (phi.dictionary(), problem.desired().values().to_vec())
}

/// The OMP solution with `k` subarrays, the usual starting point of a refinement step.
pub fn omp_start(problem: &SynthesisProblem, k: usize) -> (ArrayGeometry, ExcitationVector) {
    let r =
        omp_synthesis(problem, SynthesisMode::Sparsity(k), OmpConfig::default()).expect("omp runs");
    (r.geometry, r.excitations)
}
