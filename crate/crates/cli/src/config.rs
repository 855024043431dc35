//! Run configuration: what to synthesize and with which solver settings.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use subsynth::{
    OgompConfig, OmpConfig, PatternSource, PatternSpec, ProblemOptions, RefinementConfig, Symmetry,
    SynthesisMode, SynthesisProblem, XiDenominator,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Omp,
    Ogomp,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Omp => "omp",
            Solver::Ogomp => "ogomp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub pattern: PatternSpec,
    /// Elements in the synthesized array.
    pub n: usize,
    pub solver: Solver,
    pub mode: u8,
    pub k: Option<usize>,
    pub xi_target: Option<f64>,
    /// Raw residual threshold; replaces `xi_target` in mode 2.
    pub epsilon: Option<f64>,
    pub q: usize,
    pub eta_max: f64,
    pub d_min: f64,
    pub symmetry: Symmetry,
    pub solver_grid_m: Option<usize>,
    pub metric_step_deg: f64,
    pub sll_step_deg: f64,
    pub normalize_columns: bool,
    pub carry_geometry: bool,
    /// Achieved-pattern ξ denominator, OMP re-selection and undamped η.
    pub paper_literal: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.pattern.validate()?;
        if let PatternSpec::Chebyshev { n, .. } | PatternSpec::Taylor { n, .. } = self.pattern {
            if n != self.n {
                return Err(CliError::config(format!(
                    "array size {} differs from the pattern size {n}",
                    self.n
                )));
            }
        }
        match self.mode {
            1 => {
                if self.k.is_none() {
                    return Err(CliError::config("mode 1 needs --k"));
                }
            }
            2 => match (self.xi_target, self.epsilon) {
                (Some(_), None) | (None, Some(_)) => {}
                (None, None) => {
                    return Err(CliError::config("mode 2 needs --xi-target or --epsilon"))
                }
                (Some(_), Some(_)) => {
                    return Err(CliError::config(
                        "--xi-target and --epsilon are mutually exclusive",
                    ))
                }
            },
            m => return Err(CliError::config(format!("mode must be 1 or 2, got {m}"))),
        }
        Ok(())
    }

    pub fn synthesis_mode(&self) -> Result<SynthesisMode, CliError> {
        self.validate()?;
        Ok(match (self.mode, self.k, self.xi_target, self.epsilon) {
            (1, Some(k), _, _) => SynthesisMode::Sparsity(k),
            (_, _, Some(t), _) => SynthesisMode::XiTarget(t),
            (_, _, _, Some(e)) => SynthesisMode::Residual(e),
            _ => unreachable!("validated above"),
        })
    }

    pub fn problem_options(&self) -> ProblemOptions {
        ProblemOptions {
            solver_grid_m: self.solver_grid_m,
            metric_step_deg: self.metric_step_deg,
            sll_step_deg: self.sll_step_deg,
            xi_denominator: if self.paper_literal {
                XiDenominator::Achieved
            } else {
                XiDenominator::Desired
            },
            ..ProblemOptions::default()
        }
    }

    pub fn omp_config(&self) -> OmpConfig {
        OmpConfig {
            normalize_columns: self.normalize_columns,
            allow_reselection: self.paper_literal,
        }
    }

    pub fn ogomp_config(&self) -> OgompConfig {
        let refine = if self.paper_literal {
            RefinementConfig {
                q: self.q,
                eta_max: None,
                d_min: 0.0,
                symmetry: self.symmetry,
                require_improvement: false,
                carry_geometry: self.carry_geometry,
            }
        } else {
            RefinementConfig {
                q: self.q,
                eta_max: Some(self.eta_max),
                d_min: self.d_min,
                symmetry: self.symmetry,
                require_improvement: true,
                carry_geometry: self.carry_geometry,
            }
        };
        OgompConfig {
            omp: self.omp_config(),
            refine,
        }
    }

    pub fn problem(&self) -> Result<SynthesisProblem, CliError> {
        let source = PatternSource::from_spec(&self.pattern)?;
        Ok(SynthesisProblem::new(
            &source,
            self.n,
            self.problem_options(),
        )?)
    }
}

/// Pattern flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct PatternArgs {
    /// Desired-pattern family.
    #[arg(long, value_enum)]
    pub family: Family,
    /// Number of elements.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sidelobe suppression in dB (positive).
    #[arg(long)]
    pub sll_db: Option<f64>,
    /// Taylor n̄.
    #[arg(long, default_value_t = 5)]
    pub nbar: usize,
    /// Desired-pattern CSV for `--family file`.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Chebyshev,
    Taylor,
    File,
}

impl PatternArgs {
    pub fn spec(&self) -> Result<(PatternSpec, Option<usize>), CliError> {
        let need_sll = || {
            self.sll_db
                .ok_or_else(|| CliError::config("--sll-db is required for this family"))
        };
        let need_n = || self.n.ok_or_else(|| CliError::config("--n is required"));
        Ok(match self.family {
            Family::Chebyshev => (
                PatternSpec::Chebyshev {
                    n: need_n()?,
                    sll_db: need_sll()?,
                },
                self.n,
            ),
            Family::Taylor => (
                PatternSpec::Taylor {
                    n: need_n()?,
                    sll_db: need_sll()?,
                    nbar: self.nbar,
                },
                self.n,
            ),
            Family::File => (
                PatternSpec::File {
                    path: self
                        .file
                        .clone()
                        .ok_or_else(|| CliError::config("--file is required for --family file"))?,
                },
                self.n,
            ),
        })
    }
}

/// Solver flags for `synth` and `sweep`.
#[derive(Debug, Clone, clap::Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Solver::Ogomp)]
    pub solver: Solver,
    /// 1: fixed subarray count; 2: fewest subarrays meeting a threshold.
    #[arg(long, default_value_t = 1)]
    pub mode: u8,
    /// Subarray count (mode 1).
    #[arg(long)]
    pub k: Option<usize>,
    /// Target pattern-matching error ξ (mode 2).
    #[arg(long)]
    pub xi_target: Option<f64>,
    /// Raw residual threshold on the solver grid (mode 2).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Position refinement iterations.
    #[arg(long, default_value_t = 10)]
    pub q: usize,
    /// Bound on each relative position step.
    #[arg(long, default_value_t = 0.05)]
    pub eta_max: f64,
    /// Minimum element spacing in wavelengths.
    #[arg(long, default_value_t = 0.25)]
    pub d_min: f64,
    #[arg(long, value_enum, default_value_t = SymmetryArg::Off)]
    pub symmetry: SymmetryArg,
    /// Solver grid size (default 4N+1).
    #[arg(long)]
    pub solver_grid_m: Option<usize>,
    /// ξ integration step in degrees.
    #[arg(long, default_value_t = subsynth::metrics::DEFAULT_METRIC_STEP_DEG)]
    pub metric_step_deg: f64,
    /// SLL scan step in degrees.
    #[arg(long, default_value_t = subsynth::metrics::DEFAULT_SLL_STEP_DEG)]
    pub sll_step_deg: f64,
    /// Normalize dictionary columns in the OMP correlation step.
    #[arg(long)]
    pub normalize_columns: bool,
    /// Mode 2: keep refined positions from one subarray count to the next.
    #[arg(long)]
    pub carry_geometry: bool,
    /// Achieved-pattern ξ denominator, OMP re-selection, undamped position steps.
    #[arg(long)]
    pub paper_literal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SymmetryArg {
    Off,
    Mirror,
}

/// Assembles a config without validating it; sweeps override fields first.
pub fn build_config(pattern: &PatternArgs, solver: &SolverArgs) -> Result<RunConfig, CliError> {
    let (spec, n) = pattern.spec()?;
    let n = n.ok_or_else(|| CliError::config("--n is required"))?;
    Ok(RunConfig {
        pattern: spec,
        n,
        solver: solver.solver,
        mode: solver.mode,
        k: solver.k,
        xi_target: solver.xi_target,
        epsilon: solver.epsilon,
        q: solver.q,
        eta_max: solver.eta_max,
        d_min: solver.d_min,
        symmetry: match solver.symmetry {
            SymmetryArg::Off => Symmetry::Off,
            SymmetryArg::Mirror => Symmetry::Mirror,
        },
        solver_grid_m: solver.solver_grid_m,
        metric_step_deg: solver.metric_step_deg,
        sll_step_deg: solver.sll_step_deg,
        normalize_columns: solver.normalize_columns,
        carry_geometry: solver.carry_geometry,
        paper_literal: solver.paper_literal,
    })
}
