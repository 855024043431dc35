// Deterministic randomized checks shared by the core property tests and the
// acceptance harness. Each returns a short summary or a description of the
// first violation.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsynth::numerics::{lstsq_complex, lstsq_real_constrained, norm2, sub_vec, ComplexMatrix};
use subsynth::{
    build_perturbation_system, metric_grid, xi_metric, AngleGrid, ArrayGeometry, Complex64,
    DesiredPattern, ExcitationVector, OmpConfig, OmpPursuit, SteeringMatrix, XiDenominator,
};

fn phasor(d: f64, sin_theta: f64) -> Complex64 {
    Complex64::cis(std::f64::consts::TAU * d * sin_theta)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_vec(r: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| random_complex(r)).collect()
}

/// Sorted positions with gaps drawn from `[0.3, 0.8]` wavelengths, centred.
pub fn random_geometry(r: &mut ChaCha8Rng, n: usize) -> ArrayGeometry {
    let mut p = vec![0.0];
    for _ in 1..n {
        let last = *p.last().unwrap();
        p.push(last + r.gen_range(0.3..0.8));
    }
    let mid = (p[0] + p[n - 1]) / 2.0;
    ArrayGeometry::new(p.into_iter().map(|v| v - mid).collect()).unwrap()
}

fn adjoint_norm(a: &ComplexMatrix, r: &[Complex64]) -> f64 {
    norm2(&a.adjoint_mul_vec(r))
}

/// OMP residual monotonicity, support growth by one, orthogonality of the
/// residual to the selected atoms, and the stored residual norm.
pub fn omp_invariants(instances: usize, seed: u64) -> Result<String, String> {
    let mut r = rng(seed);
    let mut steps = 0;
    for inst in 0..instances {
        let n = r.gen_range(2..=32);
        let geom = random_geometry(&mut r, n);
        let grid = AngleGrid::solver_default(n).unwrap();
        let phi = SteeringMatrix::new(&geom, &grid);
        let w = ExcitationVector::new(random_vec(&mut r, n));
        let mut f = phi.apply(&w).unwrap();
        for v in f.iter_mut() {
            *v += random_complex(&mut r) * 0.05;
        }
        let a = phi.dictionary();
        let k = r.gen_range(1..=n.min(12));
        let mut pursuit = OmpPursuit::new(&a, &f, OmpConfig::default()).unwrap();
        let fnorm = norm2(&f);
        let mut prev = fnorm;
        for t in 1..=k {
            pursuit
                .step()
                .map_err(|e| format!("instance {inst}: step {t}: {e}"))?;
            let sol = pursuit.solution();
            if sol.support.len() != t {
                return Err(format!(
                    "instance {inst}: support size {} after {t} steps",
                    sol.support.len()
                ));
            }
            if sol.support.windows(2).any(|s| s[0] == s[1]) {
                return Err(format!("instance {inst}: repeated index"));
            }
            let res = sol.residual_norm;
            if res > prev * (1.0 + 1e-12) {
                return Err(format!("instance {inst}: residual rose {prev} -> {res}"));
            }
            prev = res;
            let recomputed = sol.recompute_residual(&a, &f);
            if (recomputed - res).abs() > 1e-10 * res.max(1e-300) + 1e-14 * fnorm {
                return Err(format!(
                    "instance {inst}: stored residual {res} vs recomputed {recomputed}"
                ));
            }
            let sub = a.select_columns(&sol.support);
            let orth = adjoint_norm(&sub, pursuit.residual());
            if orth > 1e-9 * a.norm_fro() * fnorm {
                return Err(format!(
                    "instance {inst}: residual not orthogonal ({orth:e})"
                ));
            }
            steps += 1;
        }
    }
    Ok(format!("{instances} instances, {steps} iterations"))
}

/// Central differences of the field in the relative position perturbation
/// against the columns of `G`.
pub fn g_finite_difference(geometries: usize, seed: u64) -> Result<f64, String> {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for inst in 0..geometries {
        let n = r.gen_range(2..=24);
        let geom = random_geometry(&mut r, n);
        let grid = AngleGrid::solver_default(n).unwrap();
        let phi = SteeringMatrix::new(&geom, &grid);
        let w = ExcitationVector::new(random_vec(&mut r, n));
        let fbar = DesiredPattern::new(grid.clone(), random_vec(&mut r, grid.len())).unwrap();
        let sys = build_perturbation_system(&phi, &geom, &w, &fbar).map_err(|e| e.to_string())?;
        for i in 0..n {
            let d = geom.positions()[i];
            if d == 0.0 {
                continue;
            }
            let h = 1e-6 * d.abs();
            let fd: Vec<Complex64> = grid
                .thetas()
                .iter()
                .map(|t| {
                    let s = t.sin();
                    w.weights()[i] * (phasor(d + h, s) - phasor(d - h, s)) * (d / (2.0 * h))
                })
                .collect();
            let col = sys.g.column(i);
            let err = norm2(&sub_vec(col, &fd)) / norm2(col);
            worst = worst.max(err);
            if err > 1e-5 {
                return Err(format!(
                    "geometry {inst}, column {i}: relative error {err:e}"
                ));
            }
        }
    }
    Ok(worst)
}

/// Residual orthogonality of complex and real-constrained least squares.
pub fn ls_optimality(instances: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for inst in 0..instances {
        let m = r.gen_range(3..=40);
        let p = r.gen_range(1..=m.min(10));
        let a = ComplexMatrix::from_fn(m, p, |_, _| random_complex(&mut r));
        let b = random_vec(&mut r, m);
        let bound = 1e-10 * a.norm_fro() * norm2(&b);
        let f = lstsq_complex(&a, &b).map_err(|e| format!("instance {inst}: {e}"))?;
        let res = sub_vec(&b, &a.mul_vec(&f));
        if adjoint_norm(&a, &res) > bound {
            return Err(format!(
                "instance {inst}: complex LS residual not orthogonal"
            ));
        }
        if norm2(&res) > norm2(&b) {
            return Err(format!("instance {inst}: LS worse than zero"));
        }
        let eta = lstsq_real_constrained(&a, &b).map_err(|e| format!("instance {inst}: {e}"))?;
        let ec: Vec<Complex64> = eta.iter().map(|&e| Complex64::new(e, 0.0)).collect();
        let res = sub_vec(&b, &a.mul_vec(&ec));
        let g: Vec<f64> = a.adjoint_mul_vec(&res).iter().map(|v| v.re).collect();
        if g.iter().map(|v| v * v).sum::<f64>().sqrt() > bound {
            return Err(format!(
                "instance {inst}: real-constrained LS gradient nonzero"
            ));
        }
    }
    Ok(())
}

/// ξ(F̄, F̄) = 0, ξ(F̄, 0) = 1 and ξ(F̄, 1.1 F̄) = 0.01.
pub fn xi_identities(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let grid = metric_grid(0.05).unwrap();
    for _ in 0..10 {
        let n = r.gen_range(2..=16);
        let geom = random_geometry(&mut r, n);
        let w = ExcitationVector::new(random_vec(&mut r, n));
        let f = SteeringMatrix::new(&geom, &grid).apply(&w).unwrap();
        let d = XiDenominator::Desired;
        let same = xi_metric(&grid, &f, &f, d).unwrap();
        let zero = xi_metric(&grid, &f, &vec![Complex64::new(0.0, 0.0); f.len()], d).unwrap();
        let scaled: Vec<Complex64> = f.iter().map(|v| v * 1.1).collect();
        let delta = xi_metric(&grid, &f, &scaled, d).unwrap();
        if same != 0.0 || (zero - 1.0).abs() > 1e-12 || (delta - 0.01).abs() > 1e-10 * 0.01 {
            return Err(format!("xi identities: {same}, {zero}, {delta}"));
        }
    }
    Ok(())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub struct BruteForceSummary {
    pub instances: usize,
    pub optimal_hits: usize,
    pub worst_ratio: f64,
}

/// OMP residual against the best residual over all `C(N, K)` supports.
pub fn brute_force_oracle(instances: usize, seed: u64) -> Result<BruteForceSummary, String> {
    let mut r = rng(seed);
    let mut summary = BruteForceSummary {
        instances,
        optimal_hits: 0,
        worst_ratio: 1.0,
    };
    for inst in 0..instances {
        let n = r.gen_range(3..=12);
        let k = r.gen_range(1..=3);
        let geom = random_geometry(&mut r, n);
        let grid = AngleGrid::solver_default(n).unwrap();
        let phi = SteeringMatrix::new(&geom, &grid);
        let a = phi.dictionary();
        let f = random_vec(&mut r, grid.len());
        let best = combinations(n, k)
            .iter()
            .map(|s| {
                let sub = a.select_columns(s);
                let x = lstsq_complex(&sub, &f).unwrap();
                norm2(&sub_vec(&f, &sub.mul_vec(&x)))
            })
            .fold(f64::INFINITY, f64::min);
        let mut pursuit = OmpPursuit::new(&a, &f, OmpConfig::default()).unwrap();
        for _ in 0..k {
            pursuit.step().map_err(|e| e.to_string())?;
        }
        let omp = pursuit.residual_norm();
        if omp < best * (1.0 - 1e-10) {
            return Err(format!(
                "instance {inst}: OMP {omp} beat the exhaustive optimum {best}"
            ));
        }
        let ratio = omp / best;
        if ratio <= 1.0 + 1e-10 {
            summary.optimal_hits += 1;
        }
        summary.worst_ratio = summary.worst_ratio.max(ratio);
    }
    Ok(summary)
}

/// Exact recovery of `K`-sparse targets whose support satisfies the exact
/// recovery condition `max_{j∉Λ} ‖A_Λ⁺ a_j‖₁ < 1`. Returns how many of the
/// drawn instances met the condition.
pub fn exact_recovery(instances: usize, seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    let mut checked = 0;
    for inst in 0..instances {
        let n = r.gen_range(3..=12);
        let k = r.gen_range(1..=3.min(n));
        let geom = random_geometry(&mut r, n);
        let grid = AngleGrid::solver_default(n).unwrap();
        let a = SteeringMatrix::new(&geom, &grid).dictionary();
        let mut support: Vec<usize> = Vec::new();
        while support.len() < k {
            let j = r.gen_range(0..n);
            if !support.contains(&j) {
                support.push(j);
            }
        }
        support.sort_unstable();
        let sub = a.select_columns(&support);
        let erc = (0..n)
            .filter(|j| !support.contains(j))
            .map(|j| {
                lstsq_complex(&sub, a.column(j))
                    .unwrap()
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let coeffs: Vec<Complex64> = (0..k)
            .map(|_| {
                Complex64::from_polar(
                    r.gen_range(0.5..2.0),
                    r.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        if erc >= 1.0 - 1e-6 {
            continue;
        }
        checked += 1;
        let f = sub.mul_vec(&coeffs);
        let mut pursuit = OmpPursuit::new(&a, &f, OmpConfig::default()).unwrap();
        for _ in 0..k {
            pursuit.step().map_err(|e| e.to_string())?;
        }
        let sol = pursuit.solution();
        if sol.support != support {
            return Err(format!(
                "instance {inst}: recovered {:?}, expected {support:?}",
                sol.support
            ));
        }
        if sol.residual_norm > 1e-9 * norm2(&f) {
            return Err(format!(
                "instance {inst}: residual {} on an exact target",
                sol.residual_norm
            ));
        }
    }
    Ok(checked)
}
