//! Trial-map constructions behind the normalized eigenvalue bounds.
//!
//! The coordinate functions of the equator map `u₀(x) = x/|x|` are the
//! trial functions for the first-eigenvalue bound once the domain is
//! recentered so that `∫ x/|x| dμ = 0`; the second-eigenvalue bound runs
//! the same coordinates through a fold across a hyperplane, with the pair
//! `(c, p)` chosen so the folded coordinates are orthogonal both to
//! constants and to the first eigenfunction. Existence of those parameters
//! is a degree-theory fact; this module finds them numerically with damped
//! multi-start Newton and verifies the resulting integral inequalities by
//! stratified Monte Carlo.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{equator_energy, sphere_area, Atom, Dimension, PointMeasure};

const ATOM_GUARD: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Half-space `H_{p,t} = {y : ⟨y, p⟩ < t|p|}` with its boundary hyperplane
/// at distance `t` from the origin along `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceParams {
    pub p: Vec<f64>,
    pub t: f64,
}

impl HalfSpaceParams {
    pub fn new(p: Vec<f64>, t: f64) -> Result<Self> {
        if norm(&p) == 0.0 {
            return Err(Error::InvalidParameter(
                "half-space direction must be nonzero".into(),
            ));
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "half-space offset must be >= 0, got {t}"
            )));
        }
        Ok(HalfSpaceParams { p, t })
    }

    fn unit(&self) -> Vec<f64> {
        let n = norm(&self.p);
        self.p.iter().map(|x| x / n).collect()
    }
}

/// The equator map `u₀(x) = x/|x|`.
pub fn equator_map(x: &[f64]) -> Result<Vec<f64>> {
    let n = norm(x);
    if n == 0.0 {
        return Err(Error::SingularPoint(
            "equator map is undefined at the origin".into(),
        ));
    }
    Ok(x.iter().map(|v| v / n).collect())
}

/// Energy density `Σ_i |∇(x_i/|x|)|²` of the equator map by central finite
/// differences with step `h`; the identity value is `(d-1)/|x|²`.
pub fn equator_energy_density_fd(x: &[f64], h: f64) -> Result<f64> {
    let d = x.len();
    let mut total = 0.0;
    let mut xp = x.to_vec();
    for j in 0..d {
        let orig = xp[j];
        xp[j] = orig + h;
        let up = equator_map(&xp)?;
        xp[j] = orig - h;
        let um = equator_map(&xp)?;
        xp[j] = orig;
        for i in 0..d {
            let g = (up[i] - um[i]) / (2.0 * h);
            total += g * g;
        }
    }
    Ok(total)
}

/// Reflection `R_{p,t}(y) = y + 2(t - ⟨y, p̂⟩) p̂` across `∂H_{p,t}`.
pub fn reflection(params: &HalfSpaceParams, y: &[f64]) -> Vec<f64> {
    let u = params.unit();
    let shift = 2.0 * (params.t - dot(y, &u));
    y.iter().zip(&u).map(|(v, e)| v + shift * e).collect()
}

/// Fold map: identity on `H_{p,t}`, reflection on the complement. The image
/// lies in the closure of `H` and the map is idempotent.
pub fn fold(params: &HalfSpaceParams, y: &[f64]) -> Vec<f64> {
    let u = params.unit();
    if dot(y, &u) < params.t {
        y.to_vec()
    } else {
        reflection(params, y)
    }
}

/// Mass-averaged unit vector field `Φ(c) = ⨍ (c-x)/|c-x| dμ(x)`.
///
/// Vanishing of Φ recenters μ so the equator-map coordinates are orthogonal
/// to constants. Evaluation within `1e-12` of an atom is an error.
pub fn centering_map(mu: &PointMeasure, c: &[f64]) -> Result<Vec<f64>> {
    if c.len() != mu.dim() {
        return Err(Error::InvalidParameter("dimension mismatch".into()));
    }
    let mut acc = vec![0.0; mu.dim()];
    for atom in mu.atoms() {
        let diff = sub(c, &atom.position);
        let dist = norm(&diff);
        if dist <= ATOM_GUARD {
            return Err(Error::SingularEvaluation(format!(
                "evaluation point within {ATOM_GUARD} of an atom"
            )));
        }
        for (a, v) in acc.iter_mut().zip(&diff) {
            *a += atom.mass * v / dist;
        }
    }
    let mass = mu.total_mass();
    Ok(acc.into_iter().map(|v| v / mass).collect())
}

/// Atom data for the fold variant: measure, bounding radius, optional first
/// eigenfunction sampled on the atoms (μ-orthogonal to constants).
#[derive(Clone, Debug)]
pub struct CenteringProblem {
    pub mu: PointMeasure,
    pub radius: f64,
    pub phi1: Option<Vec<f64>>,
}

impl CenteringProblem {
    pub fn new(mu: PointMeasure, radius: f64, phi1: Option<Vec<f64>>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("bounding radius must be positive".into()));
        }
        mu.check_bounded_by(radius)?;
        if let Some(ref phi) = phi1 {
            if phi.len() != mu.atoms().len() {
                return Err(Error::InvalidParameter(format!(
                    "phi1 has {} samples for {} atoms",
                    phi.len(),
                    mu.atoms().len()
                )));
            }
            let mass = mu.total_mass();
            let mean: f64 = mu
                .atoms()
                .iter()
                .zip(phi)
                .map(|(a, v)| a.mass * v)
                .sum();
            let scale = phi.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
            if mean.abs() > 1e-8 * mass * scale {
                return Err(Error::InvalidParameter(format!(
                    "phi1 is not mu-orthogonal to constants: mean {mean} vs mass {mass}"
                )));
            }
        }
        Ok(CenteringProblem { mu, radius, phi1 })
    }
}

/// Subtracts the μ-mean so a raw sample vector becomes admissible as φ₁.
pub fn orthogonalize_phi1(mu: &PointMeasure, raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != mu.atoms().len() {
        return Err(Error::InvalidParameter("phi1 sample count mismatch".into()));
    }
    let mass = mu.total_mass();
    let mean: f64 = mu.atoms().iter().zip(raw).map(|(a, v)| a.mass * v).sum::<f64>() / mass;
    Ok(raw.iter().map(|v| v - mean).collect())
}

/// The fold-composed centering field `Φ(c, p) ∈ ℝ^{2d}`: first block the
/// mass mean of `(c - F(x))/|c - F(x)|`, second block its φ₁-weighted mean,
/// with `F = F_{p, R-|p|}` (identity when `p = 0`, since the fold plane
/// then sits at distance R and the whole measure lies inside).
pub fn centering_fold_map(problem: &CenteringProblem, c: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    let d = problem.mu.dim();
    if c.len() != d || p.len() != d {
        return Err(Error::InvalidParameter("dimension mismatch".into()));
    }
    let p_norm = norm(p);
    if p_norm > problem.radius * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "fold direction |p| = {p_norm} outside bounding ball of radius {}",
            problem.radius
        )));
    }
    let fold_params = if p_norm < 1e-14 {
        None
    } else {
        // |p| may exceed R by roundoff when p sits on the boundary sphere
        Some(HalfSpaceParams::new(
            p.to_vec(),
            (problem.radius - p_norm).max(0.0),
        )?)
    };
    let mass = problem.mu.total_mass();
    let mut first = vec![0.0; d];
    let mut second = vec![0.0; d];
    for (i, atom) in problem.mu.atoms().iter().enumerate() {
        let folded = match &fold_params {
            Some(params) => fold(params, &atom.position),
            None => atom.position.clone(),
        };
        let diff = sub(c, &folded);
        let dist = norm(&diff);
        if dist <= ATOM_GUARD {
            return Err(Error::SingularEvaluation(
                "evaluation point collides with a folded atom".into(),
            ));
        }
        let w1 = atom.mass / dist;
        let w2 = problem.phi1.as_ref().map_or(0.0, |phi| phi[i]) * w1;
        for j in 0..d {
            first[j] += w1 * diff[j];
            second[j] += w2 * diff[j];
        }
    }
    let mut out = Vec::with_capacity(2 * d);
    out.extend(first.into_iter().map(|v| v / mass));
    out.extend(second.into_iter().map(|v| v / mass));
    Ok(out)
}

/// Solution of a centering solve: the root, its residual norm, and the
/// start index that won (deterministic tie-break).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CenteringSolution {
    pub c: Vec<f64>,
    pub residual: f64,
    pub start_index: usize,
}

/// Damped (Armijo-backtracking) Newton with forward-difference Jacobian and
/// a Levenberg fallback when the Jacobian is singular. Returns the best
/// point reached and its residual norm.
fn damped_newton(
    f: &(dyn Fn(&[f64]) -> Result<Vec<f64>> + Sync),
    x0: &[f64],
    fd_step: f64,
    target: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut best = (x.clone(), f64::INFINITY);
    for _ in 0..max_iter {
        let r = match f(&x) {
            Ok(r) => r,
            Err(_) => break,
        };
        let rn = norm(&r);
        if rn < best.1 {
            best = (x.clone(), rn);
        }
        if rn <= target {
            return best;
        }
        // forward-difference Jacobian, column by column
        let m = r.len();
        let mut jac = nalgebra::DMatrix::zeros(m, n);
        let mut ok = true;
        for j in 0..n {
            let mut xp = x.clone();
            xp[j] += fd_step;
            match f(&xp) {
                Ok(rp) => {
                    for i in 0..m {
                        jac[(i, j)] = (rp[i] - r[i]) / fd_step;
                    }
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        let rhs = nalgebra::DVector::from_iterator(m, r.iter().map(|v| -v));
        let step = match jac.clone().lu().solve(&rhs) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => {
                // Levenberg fallback for singular/rectangular-deficient J
                let jt = jac.transpose();
                let mut jtj = &jt * &jac;
                let lambda = 1e-8 * (jtj.trace() / n as f64).max(1e-300);
                for i in 0..n {
                    jtj[(i, i)] += lambda;
                }
                match jtj.lu().solve(&(&jt * &rhs)) {
                    Some(s) if s.iter().all(|v| v.is_finite()) => s,
                    _ => break,
                }
            }
        };
        // Armijo backtracking on the residual norm squared
        let mut alpha = 1.0;
        let mut advanced = false;
        while alpha > 1e-12 {
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| xi + alpha * si)
                .collect();
            if let Ok(rt) = f(&trial) {
                let rtn = norm(&rt);
                if rtn * rtn <= rn * rn * (1.0 - 1e-4 * alpha) {
                    x = trial;
                    advanced = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    if let Ok(r) = f(&x) {
        let rn = norm(&r);
        if rn < best.1 {
            best = (x, rn);
        }
    }
    best
}

fn run_multistart(
    f: &(dyn Fn(&[f64]) -> Result<Vec<f64>> + Sync),
    starts: &[Vec<f64>],
    fd_step: f64,
    target: f64,
) -> (Vec<f64>, f64, usize) {
    use rayon::prelude::*;
    let results: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|s| damped_newton(f, s, fd_step, target, 80))
        .collect();
    let mut best_idx = 0;
    for (i, r) in results.iter().enumerate() {
        if r.1 < results[best_idx].1 {
            best_idx = i;
        }
    }
    let (x, residual) = results[best_idx].clone();
    (x, residual, best_idx)
}

/// Finds `c` with `Φ(c) = 0` (residual ≤ 1e-8) by damped Newton from the
/// deterministic 2d+1 start grid `{0, ±R/2·e_i}`.
pub fn solve_centering(mu: &PointMeasure, radius: f64) -> Result<CenteringSolution> {
    mu.check_bounded_by(radius)?;
    let d = mu.dim();
    let mut starts = vec![vec![0.0; d]];
    for i in 0..d {
        for sign in [0.5, -0.5] {
            let mut s = vec![0.0; d];
            s[i] = sign * radius;
            starts.push(s);
        }
    }
    let f = |c: &[f64]| centering_map(mu, c);
    let target = 1e-8;
    let (c, residual, start_index) = run_multistart(&f, &starts, 1e-6 * radius, target);
    if residual > target {
        return Err(Error::NoConvergence(format!(
            "centering solve stalled at residual {residual} (target {target})"
        )));
    }
    Ok(CenteringSolution {
        c,
        residual,
        start_index,
    })
}

/// Solution of the fold-centering solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldSolution {
    pub c: Vec<f64>,
    pub p: Vec<f64>,
    pub residual: f64,
    pub start_index: usize,
}

/// Solves the first block of `Φ(·, p)` for `c` at a fixed fold direction.
/// That block is the centering map of the folded measure — the gradient of
/// the convex function `c ↦ ⨍|c - F(x)| dμ` — so damped Newton from a warm
/// start converges dependably.
fn inner_center_for_fold(
    problem: &CenteringProblem,
    p: &[f64],
    warm: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let d = problem.mu.dim();
    let f = |c: &[f64]| -> Result<Vec<f64>> {
        let phi = centering_fold_map(problem, c, p)?;
        Ok(phi[..d].to_vec())
    };
    let (c, residual) = damped_newton(&f, warm, 1e-7 * problem.radius, 1e-10, 60);
    if residual > 1e-8 {
        return Err(Error::NoConvergence(format!(
            "inner centering at fixed fold stalled at {residual}"
        )));
    }
    Ok((c, residual))
}

/// Finds `(c, p)` with `Φ(c, p) = 0` (2d-dimensional residual ≤ 1e-6).
///
/// The solve is nested: for each candidate fold direction the first block
/// is eliminated through [`inner_center_for_fold`] (its root `c(p)` is
/// unique by convexity), and the remaining d equations — the φ₁-weighted
/// block along `p ↦ Φ''(c(p), p)` — are driven to zero by a damped
/// Gauss-Newton outer iteration with finite-difference Jacobian, from a
/// deterministic multi-start grid of directions and magnitudes.
pub fn solve_centering_fold(problem: &CenteringProblem) -> Result<FoldSolution> {
    let d = problem.mu.dim();
    let r = problem.radius;
    let full_residual = |c: &[f64], p: &[f64]| -> Result<f64> {
        Ok(norm(&centering_fold_map(problem, c, p)?))
    };

    // without φ₁ the second block vanishes identically: plain centering at
    // the identity fold already solves the system
    if problem.phi1.is_none() || problem.phi1.as_ref().is_some_and(|v| v.iter().all(|x| *x == 0.0))
    {
        let p = vec![0.0; d];
        let (c, _) = inner_center_for_fold(problem, &p, &vec![0.0; d])?;
        let residual = full_residual(&c, &p)?;
        return Ok(FoldSolution {
            c,
            p,
            residual,
            start_index: 0,
        });
    }

    // deterministic start directions: coordinate axes plus a seeded batch of
    // random directions to cover roots away from the axes
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = sign;
            directions.push(e);
        }
    }
    {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..6 {
            directions.push(random_unit_vector(&mut rng, d));
        }
    }
    let magnitudes = [0.3, 0.55, 0.8, 0.95];
    let starts: Vec<Vec<f64>> = directions
        .iter()
        .flat_map(|dir| {
            magnitudes
                .iter()
                .map(|m| dir.iter().map(|e| e * m * r).collect::<Vec<f64>>())
                .collect::<Vec<_>>()
        })
        .collect();

    let clamp = |p: &[f64]| -> Vec<f64> {
        let pn = norm(p);
        if pn > r {
            p.iter().map(|v| v * (r / pn)).collect()
        } else {
            p.to_vec()
        }
    };
    let target = 1e-6;
    let fd_step = 1e-6 * r;

    use rayon::prelude::*;
    let outcomes: Vec<(Vec<f64>, Vec<f64>, f64)> = starts
        .par_iter()
        .map(|start| {
            let mut p = clamp(start);
            let mut c = vec![0.0; d];
            let mut best: (Vec<f64>, Vec<f64>, f64) = (c.clone(), p.clone(), f64::INFINITY);
            let mut lm = 1e-10;
            for _ in 0..60 {
                let Ok((cc, _)) = inner_center_for_fold(problem, &p, &c) else {
                    break;
                };
                c = cc;
                let Ok(phi) = centering_fold_map(problem, &c, &p) else {
                    break;
                };
                let g = phi[d..].to_vec();
                let gn = norm(&g);
                let total = norm(&phi);
                if total < best.2 {
                    best = (c.clone(), p.clone(), total);
                }
                if total <= target {
                    return best;
                }
                // finite-difference Jacobian of the second block in p, with
                // the inner solve re-run (warm) per perturbed column
                let mut jac = nalgebra::DMatrix::zeros(d, d);
                let mut ok = true;
                for j in 0..d {
                    let mut pj = p.clone();
                    pj[j] += fd_step;
                    let pj = clamp(&pj);
                    match inner_center_for_fold(problem, &pj, &c)
                        .and_then(|(cj, _)| centering_fold_map(problem, &cj, &pj))
                    {
                        Ok(phij) => {
                            for i in 0..d {
                                jac[(i, j)] = (phij[d + i] - g[i]) / fd_step;
                            }
                        }
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    break;
                }
                // Gauss-Newton step with adaptive Levenberg damping
                let jt = jac.transpose();
                let rhs = &jt * nalgebra::DVector::from_iterator(d, g.iter().map(|v| -v));
                let jtj = &jt * &jac;
                let mut advanced = false;
                for _ in 0..10 {
                    let mut damped = jtj.clone();
                    let floor = (jtj.trace() / d as f64).max(1e-300);
                    for i in 0..d {
                        damped[(i, i)] += lm * floor;
                    }
                    let Some(step) = damped.lu().solve(&rhs) else {
                        lm = (lm * 10.0).min(1e6);
                        continue;
                    };
                    let trial = clamp(
                        &p.iter()
                            .zip(step.iter())
                            .map(|(a, b)| a + b)
                            .collect::<Vec<f64>>(),
                    );
                    let improved = inner_center_for_fold(problem, &trial, &c)
                        .and_then(|(ct, _)| centering_fold_map(problem, &ct, &trial))
                        .map(|phit| norm(&phit[d..]) < gn);
                    if improved.unwrap_or(false) {
                        p = trial;
                        lm = (lm / 3.0).max(1e-14);
                        advanced = true;
                        break;
                    }
                    lm = (lm * 10.0).min(1e6);
                }
                if !advanced {
                    break;
                }
            }
            best
        })
        .collect();

    let mut best_idx = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.2 < outcomes[best_idx].2 {
            best_idx = i;
        }
    }
    let (c, p, residual) = outcomes[best_idx].clone();
    if residual > target {
        return Err(Error::NoConvergence(format!(
            "fold-centering solve stalled at residual {residual} (target {target})"
        )));
    }
    Ok(FoldSolution {
        c,
        p,
        residual,
        start_index: best_idx,
    })
}

/// Report of the coordinate trial-function inequality
/// `λ̄ ≤ Σ_i ∫_Ω |∇(x_i/|x|)|² = ∫_Ω (d-1)/|x|²` for a centered measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientReport {
    pub lambda_bar: f64,
    /// Quadrature estimate of `∫_Ω (d-1)/|x|²` from the volume samples.
    pub energy: f64,
    pub margin: f64,
    pub centering_residual: f64,
    pub holds: bool,
}

/// Evaluates both sides of the coordinate-trial-function bound: `mu` must
/// already be centered (`|Φ(0)| ≤ 1e-6`), `omega` is a volume-weighted
/// sample cloud of the domain, and `lambda_bar` the normalized eigenvalue
/// under test. Report-only: `holds` allows 1% quadrature slack.
pub fn coordinate_quotient_bound(
    mu: &PointMeasure,
    omega: &PointMeasure,
    d: Dimension,
    lambda_bar: f64,
) -> Result<QuotientReport> {
    d.require_at_least(3, "coordinate_quotient_bound")?;
    let residual = norm(&centering_map(mu, &vec![0.0; mu.dim()])?);
    if residual > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "measure is not centered: |Phi(0)| = {residual} > 1e-6"
        )));
    }
    let df = d.as_f64();
    let mut energy = 0.0;
    for atom in omega.atoms() {
        let r2 = dot(&atom.position, &atom.position);
        if r2 == 0.0 {
            return Err(Error::SingularEvaluation(
                "volume sample exactly at the origin".into(),
            ));
        }
        energy += atom.mass * (df - 1.0) / r2;
    }
    let margin = energy - lambda_bar;
    Ok(QuotientReport {
        lambda_bar,
        energy,
        margin,
        centering_residual: residual,
        holds: margin > -0.01 * energy,
    })
}

/// Two-ball comparison report: quadrature estimates of
/// `∫_{Ω∩H} (d-1)/|x|² + ∫_{R(Ω\H)} (d-1)/|x|²` against `2∫_𝔹 (d-1)/|x|²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoBallReport {
    pub lhs: f64,
    pub rhs: f64,
    /// Monte-Carlo standard error of the left side.
    pub lhs_std_error: f64,
    pub samples: usize,
}

/// Evaluates the folded-energy comparison on a volume-weighted sample cloud
/// of a domain with `|Ω| = 2|𝔹^d|`. Samples in `H` contribute in place;
/// samples outside contribute at their reflected position. The right side
/// is the analytic `2·(d-1)/(d-2)·ω_{d-1}`.
pub fn two_ball_comparison(
    omega: &PointMeasure,
    params: &HalfSpaceParams,
    d: Dimension,
) -> Result<TwoBallReport> {
    d.require_at_least(3, "two_ball_comparison")?;
    let df = d.as_f64();
    let u = params.unit();
    let n = omega.atoms().len();
    let mut lhs = 0.0;
    let mut sq = 0.0;
    for atom in omega.atoms() {
        let pos = if dot(&atom.position, &u) < params.t {
            atom.position.clone()
        } else {
            reflection(params, &atom.position)
        };
        let r2 = dot(&pos, &pos);
        if r2 == 0.0 {
            return Err(Error::SingularEvaluation(
                "sample lands exactly on the weight singularity".into(),
            ));
        }
        let contrib = atom.mass * (df - 1.0) / r2;
        if !contrib.is_finite() {
            return Err(Error::NumericBreakdown(
                "non-finite contribution in the two-ball comparison".into(),
            ));
        }
        lhs += contrib;
        sq += contrib * contrib;
    }
    let mean = lhs / n as f64;
    let var = (sq / n as f64 - mean * mean).max(0.0);
    let lhs_std_error = (var * n as f64).sqrt();
    let rhs = 2.0 * equator_energy(d)?;
    Ok(TwoBallReport {
        lhs,
        rhs,
        lhs_std_error,
        samples: n,
    })
}

/// Volume-weighted sample cloud of the ball `B_radius(center)` with radial
/// importance density ∝ s^{d-3} (matched to the `1/|x|²` integrand around
/// the center, where the equator-map energy is singular) and stratified
/// radii. Unbiased for any integrand: `Σ w_i g(x_i) ≈ ∫_B g dx`.
pub fn ball_cloud(
    d: Dimension,
    center: &[f64],
    radius: f64,
    n: usize,
    seed: u64,
) -> Result<PointMeasure> {
    d.require_at_least(3, "ball_cloud")?;
    let dd = d.get() as usize;
    if center.len() != dd {
        return Err(Error::InvalidParameter("center dimension mismatch".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let df = d.as_f64();
    let omega = sphere_area(d);
    let mut atoms = Vec::with_capacity(n);
    for i in 0..n {
        // stratified inverse-CDF radius for q(s) ∝ s^{d-3} on (0, radius]
        let u: f64 = (i as f64 + rng.gen::<f64>()) / n as f64;
        let s = radius * u.powf(1.0 / (df - 2.0));
        let dir = random_unit_vector(&mut rng, dd);
        let position: Vec<f64> = center.iter().zip(&dir).map(|(c, e)| c + s * e).collect();
        // 1/(n·pdf) with pdf(x) = (d-2) s^{-2} / (ω_{d-1} radius^{d-2})
        let mass = omega * s * s * radius.powf(df - 2.0) / ((df - 2.0) * n as f64);
        atoms.push(Atom { position, mass });
    }
    PointMeasure::new(dd, atoms)
}

/// Equal-mass atoms on the sphere `∂B_radius(center)`, in antipodal pairs
/// so the exact center is a root of the centering map by symmetry.
pub fn sphere_cloud(
    dim: usize,
    center: &[f64],
    radius: f64,
    pairs: usize,
    seed: u64,
) -> Result<PointMeasure> {
    if center.len() != dim {
        return Err(Error::InvalidParameter("center dimension mismatch".into()));
    }
    if pairs == 0 {
        return Err(Error::InvalidParameter("need at least one pair".into()));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mass = 1.0 / (2 * pairs) as f64;
    let mut atoms = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let dir = random_unit_vector(&mut rng, dim);
        for sign in [1.0, -1.0] {
            let position: Vec<f64> = center
                .iter()
                .zip(&dir)
                .map(|(c, e)| c + sign * radius * e)
                .collect();
            atoms.push(Atom { position, mass });
        }
    }
    PointMeasure::new(dim, atoms)
}

/// Uniform atoms in the ball of the given radius (equal masses summing to
/// the ball volume is not needed; unit total), for generic random measures.
pub fn uniform_ball_measure(
    d: Dimension,
    radius: f64,
    n: usize,
    seed: u64,
) -> Result<PointMeasure> {
    let dd = d.get() as usize;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut atoms = Vec::with_capacity(n);
    for _ in 0..n {
        let dir = random_unit_vector(&mut rng, dd);
        let s = radius * rng.gen::<f64>().powf(1.0 / dd as f64);
        atoms.push(Atom {
            position: dir.into_iter().map(|e| s * e).collect(),
            mass: 1.0 / n as f64,
        });
    }
    PointMeasure::new(dd, atoms)
}

/// A uniformly random direction on the unit sphere of the given dimension.
pub fn random_unit_vector(rng: &mut impl rand::Rng, dim: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
            })
            .collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
