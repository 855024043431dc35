//! Acceptance criteria. One PASS/FAIL line each; exits nonzero if any line fails.

#[path = "../../core/tests/support/property_checks.rs"]
mod property_checks;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use subsynth::metrics::{DEFAULT_MERGE_TOL, DEFAULT_SLL_STEP_DEG};
use subsynth::{
    chebyshev_excitations, measure_sll, ogomp_mode1, ogomp_synthesis, omp_synthesis,
    sidelobe_peaks_db, taylor_excitations, uniform_geometry, OgompConfig, OmpConfig, PatternSource,
    PatternSpec, ProblemOptions, RefinementConfig, SynthesisMode, SynthesisProblem,
    SynthesisResult,
};

type Check = Result<String, String>;

struct Report {
    failures: usize,
}

impl Report {
    fn run(&mut self, label: &str, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {label}: {detail} [{ms} ms]"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL {label}: {detail} [{ms} ms]");
            }
        }
    }
}

fn problem(spec: PatternSpec) -> SynthesisProblem {
    let n = match spec {
        PatternSpec::Chebyshev { n, .. } | PatternSpec::Taylor { n, .. } => n,
        PatternSpec::File { .. } => unreachable!(),
    };
    SynthesisProblem::new(
        &PatternSource::from_spec(&spec).unwrap(),
        n,
        ProblemOptions::default(),
    )
    .unwrap()
}

fn cheb(n: usize, sll_db: f64) -> SynthesisProblem {
    problem(PatternSpec::Chebyshev { n, sll_db })
}

fn taylor128() -> SynthesisProblem {
    problem(PatternSpec::Taylor {
        n: 128,
        sll_db: 50.0,
        nbar: 5,
    })
}

fn ogomp(q: usize) -> OgompConfig {
    OgompConfig {
        omp: OmpConfig::default(),
        refine: RefinementConfig {
            q,
            ..RefinementConfig::default()
        },
    }
}

/// Runs `f`, failing if it takes longer than `limit`.
fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<(T, Duration), String> {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{what} took {took:?}, limit {limit:?}"));
    }
    Ok((out, took))
}

fn gate(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn generator_fidelity() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    for (n, sll) in [(20, 20.0), (100, 30.0)] {
        let (measured, _) = timed(Duration::from_secs(1), "chebyshev", || {
            let w = chebyshev_excitations(n, sll).unwrap();
            measure_sll(&uniform_geometry(n, 0.5).unwrap(), &w, DEFAULT_SLL_STEP_DEG).unwrap()
        })?;
        let good = (measured.sll_db + sll).abs() <= 0.1;
        ok &= good;
        notes.push(format!("cheb N={n} sll {:.3} dB", measured.sll_db));
    }
    let (peaks, _) = timed(Duration::from_secs(1), "taylor", || {
        let w = taylor_excitations(128, 50.0, 5).unwrap();
        sidelobe_peaks_db(
            &uniform_geometry(128, 0.5).unwrap(),
            &w,
            DEFAULT_SLL_STEP_DEG,
        )
        .unwrap()
    })?;
    // The first nbar - 1 sidelobes are the near-in, equal-level ones.
    let near: Vec<f64> = peaks.iter().take(4).map(|p| p.1).collect();
    let worst = near.iter().map(|db| (db + 50.0).abs()).fold(0.0, f64::max);
    ok &= near.len() == 4 && worst <= 1.0;
    let listed: Vec<String> = near.iter().map(|db| format!("{db:.2}")).collect();
    notes.push(format!(
        "taylor near-in [{}] dB, worst deviation {worst:.2} dB (tol 1)",
        listed.join(", ")
    ));
    gate(ok, notes.join("; "))
}

fn same_solution(a: &SynthesisResult, b: &SynthesisResult) -> bool {
    a.solution.support == b.solution.support
        && a.solution.coeffs.len() == b.solution.coeffs.len()
        && a.solution
            .coeffs
            .iter()
            .zip(&b.solution.coeffs)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
        && a.metrics.xi.to_bits() == b.metrics.xi.to_bits()
}

fn q0_equivalence() -> Check {
    let cases: Vec<(&str, SynthesisProblem, Vec<SynthesisMode>)> = vec![
        ("cheb20", cheb(20, 20.0), {
            let mut m: Vec<SynthesisMode> = (1..=20).map(SynthesisMode::Sparsity).collect();
            m.extend([1e-2, 1e-3, 1e-4].map(SynthesisMode::XiTarget));
            m
        }),
        (
            "cheb100",
            cheb(100, 30.0),
            vec![
                SynthesisMode::Sparsity(5),
                SynthesisMode::Sparsity(9),
                SynthesisMode::Sparsity(29),
                SynthesisMode::XiTarget(1e-2),
            ],
        ),
        (
            "taylor128",
            taylor128(),
            vec![
                SynthesisMode::Sparsity(10),
                SynthesisMode::Sparsity(15),
                SynthesisMode::Sparsity(19),
            ],
        ),
    ];
    let mut compared = 0;
    for (name, p, modes) in &cases {
        for &mode in modes {
            let omp = omp_synthesis(p, mode, OmpConfig::default())
                .map_err(|e| format!("{name} {mode:?}: {e}"))?;
            let og =
                ogomp_synthesis(p, mode, &ogomp(0)).map_err(|e| format!("{name} {mode:?}: {e}"))?;
            if !same_solution(&omp, &og) {
                return Err(format!("{name} {mode:?}: OGOMP Q=0 differs from OMP"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} configurations bit-identical in support, coefficients and xi"
    ))
}

fn mode2_cheb20() -> Check {
    let p = cheb(20, 20.0);
    let limit = Duration::from_secs(10);
    let mut ok = true;
    let mut notes = Vec::new();
    let rows = [
        (1e-2, 0.35, 0.05, -18.65),
        (1e-3, 0.65, 0.15, -19.64),
        (1e-4, 0.85, 0.25, -19.76),
    ];
    for (target, chi_omp, chi_og, sll_og) in rows {
        let (omp, _) = timed(limit, "omp row", || {
            omp_synthesis(&p, SynthesisMode::XiTarget(target), OmpConfig::default())
        })?;
        let (og, _) = timed(limit, "ogomp row", || {
            ogomp_synthesis(&p, SynthesisMode::XiTarget(target), &ogomp(10))
        })?;
        let omp = omp.map_err(|e| format!("omp {target:e}: {e}"))?;
        let og = og.map_err(|e| format!("ogomp {target:e}: {e}"))?;
        let good = (omp.metrics.chi - chi_omp).abs() <= 0.10 + 1e-12
            && (og.metrics.chi - chi_og).abs() <= 0.10 + 1e-12
            && (og.metrics.sll_db - sll_og).abs() <= 1.5;
        ok &= good;
        notes.push(format!(
            "xi<={target:e}: omp chi {:.2}, ogomp chi {:.2} sll {:.2} dB",
            omp.metrics.chi, og.metrics.chi, og.metrics.sll_db
        ));
    }
    gate(ok, notes.join("; "))
}

fn mode2_cheb100() -> Check {
    let p = cheb(100, 30.0);
    let (r, took) = timed(Duration::from_secs(60), "cheb100", || {
        ogomp_synthesis(&p, SynthesisMode::XiTarget(1e-3), &ogomp(10))
    })?;
    let r = r.map_err(|e| e.to_string())?;
    gate(
        r.metrics.chi <= 0.15 && r.metrics.sll_db <= -28.0,
        format!(
            "chi {:.2} (<= 0.15), sll {:.2} dB (<= -28), {took:?}",
            r.metrics.chi, r.metrics.sll_db
        ),
    )
}

fn k5_layout() -> Check {
    let p = cheb(20, 20.0);
    let (r, _) = timed(Duration::from_secs(5), "K=5 layout", || {
        ogomp_mode1(&p, 5, &ogomp(10))
    })?;
    let r = r.map_err(|e| e.to_string())?;
    let layout =
        subsynth::extract_layout(&r.solution, 20, DEFAULT_MERGE_TOL).map_err(|e| e.to_string())?;
    gate(
        r.metrics.xi <= 1e-4 && layout.count() == 5,
        format!(
            "xi {:.3e} (<= 1e-4), {} runs, sizes {:?}",
            r.metrics.xi,
            layout.count(),
            layout.sizes()
        ),
    )
}

fn convergence_shape() -> Check {
    let cases = [
        ("cheb20 K=5", cheb(20, 20.0), 5),
        ("cheb100 K=29", cheb(100, 30.0), 29),
        ("taylor128 K=19", taylor128(), 19),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, p, k) in &cases {
        let xi = |q| {
            ogomp_mode1(p, *k, &ogomp(q))
                .map(|r| r.metrics.xi)
                .map_err(|e| format!("{name}: {e}"))
        };
        let (q0, q4, q10) = (xi(0)?, xi(4)?, xi(10)?);
        ok &= q4 <= 0.5 * q0 && q10 <= 1.05 * q4;
        notes.push(format!("{name}: Q0 {q0:.2e} Q4 {q4:.2e} Q10 {q10:.2e}"));
    }
    gate(ok, notes.join("; "))
}

fn property_suite() -> Check {
    let (out, took) = timed(
        Duration::from_secs(120),
        "property suite",
        || -> Result<String, String> {
            property_checks::omp_invariants(200, 11)?;
            let worst = property_checks::g_finite_difference(50, 12)?;
            if worst > 1e-5 {
                return Err(format!("G finite-difference error {worst:.2e}"));
            }
            property_checks::ls_optimality(200, 13)?;
            property_checks::xi_identities(14)?;
            let bf = property_checks::brute_force_oracle(150, 15)?;
            let recovered = property_checks::exact_recovery(300, 16)?;
            if recovered < 50 {
                return Err(format!(
                    "only {recovered} exact-recovery instances qualified"
                ));
            }
            Ok(format!(
            "omp invariants 200, G check worst {worst:.1e}, LS 200, xi identities, brute force {} ({} optimal), exact recovery {recovered}",
            bf.instances, bf.optimal_hits
        ))
        },
    )?;
    out.map(|s| format!("{s}, {took:?}"))
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_subsynth"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)));
    }
    Ok(o.stdout)
}

fn without_runtime(table: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(table)
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            if f.len() == 6 {
                f.remove(4);
            }
            f.join(",")
        })
        .collect()
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dirs = [dir.path().join("a"), dir.path().join("b")];
    for d in &dirs {
        cli(&[
            "synth",
            "--family",
            "chebyshev",
            "--n",
            "20",
            "--sll-db",
            "20",
            "--mode",
            "2",
            "--xi-target",
            "1e-3",
            "--out",
            d.to_str().unwrap(),
        ])?;
    }
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).map_err(|e| e.to_string());
    for f in ["result.json", "achieved_pattern.csv"] {
        if read(&dirs[0], f)? != read(&dirs[1], f)? {
            return Err(format!("{f} differs between runs"));
        }
    }
    let sweep = |threads: &str| {
        let out = dir.path().join(format!("s{threads}"));
        cli(&[
            "sweep",
            "--family",
            "chebyshev",
            "--n",
            "20",
            "--sll-db",
            "20",
            "--axis",
            "K",
            "--values",
            "1,2,3,4,5,6,7,8",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ])
    };
    let (one, four) = (sweep("1")?, sweep("4")?);
    gate(
        without_runtime(&one) == without_runtime(&four),
        "synth byte-identical; 8-row sweep identical with 1 and 4 threads (runtime column excluded)".into(),
    )
}

fn taylor_mode2_example() -> Check {
    let p = taylor128();
    let r = ogomp_synthesis(&p, SynthesisMode::XiTarget(2.76e-3), &ogomp(10))
        .map_err(|e| e.to_string())?;
    let chi_ok = (r.metrics.chi - 0.101).abs() <= 0.5 / 128.0;
    gate(
        chi_ok && r.metrics.sll_db <= -35.0,
        format!(
            "K {} chi {:.3} (want 0.101), sll {:.2} dB (want <= -35)",
            r.solution.support.len(),
            r.metrics.chi,
            r.metrics.sll_db
        ),
    )
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    report.run("[1] generator fidelity", generator_fidelity);
    report.run("[2] Q=0 equivalence", q0_equivalence);
    report.run("[3] chebyshev N=20 mode-2 targets", mode2_cheb20);
    report.run("[4] chebyshev N=100 mode-2", mode2_cheb100);
    report.run("[5] chebyshev N=20 K=5 layout", k5_layout);
    report.run("[6] convergence shape", convergence_shape);
    report.run("[7] property suite", property_suite);
    report.run("[8] determinism", determinism);
    report.run(
        "[example] taylor N=128 mode-2 xi<=2.76e-3",
        taylor_mode2_example,
    );
    if report.failures == 0 {
        println!("acceptance: all passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} failed", report.failures);
        ExitCode::FAILURE
    }
}
