//! Weighted Steklov spectrum of the unit disk.
//!
//! For a boundary density `ρ(θ) dθ` on `∂𝔻²` the eigenvalues are computed
//! spectrally: harmonic extensions of the real trigonometric basis
//! `{1, cos nθ, sin nθ}` have exact Dirichlet energy `π·n` (diagonal, no
//! interior mesh), and the boundary Gram matrix in `L²(ρ dθ)` is filled
//! from the Fourier coefficients of ρ by convolution identities. The
//! generalized eigenvalues of that pair are Rayleigh–Ritz upper bounds for
//! `σ_k(𝔻², ρ)`, nonincreasing in the truncation order, and exact for trig
//! polynomial densities.
//!
//! Densities arrive as Fourier data ([`FourierDensity`]): sampled and
//! FFT-transformed (4× oversampled against the kept order), pulled back
//! through a disk automorphism ([`density_from_mobius`]), or built as bump
//! mixtures ([`concentrating_density`]) that drive the `σ̄_k → 2πk`
//! concentration regime.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::generalized_dense_lowest;
use crate::error::{Error, Result};

/// Boundary density on `∂𝔻²` held as Fourier coefficients
/// `ρ(θ) = Σ_{|m| ≤ M} ρ̂_m e^{imθ}` with the reality constraint
/// `ρ̂_{-m} = conj(ρ̂_m)`; only `m ≥ 0` is stored.
#[derive(Clone, Debug)]
pub struct FourierDensity {
    /// `ρ̂_m` for `m = 0..=M`; `coeffs[0]` is real and positive.
    coeffs: Vec<Complex64>,
    /// FFT grid size used at ingestion (0 when built directly from modes).
    sample_count: usize,
}

/// JSON interchange schema: `{"M": int, "modes": [[m, re, im], ...]}`,
/// nonnegative `m` only.
#[derive(Serialize, Deserialize)]
struct DensityJson {
    #[serde(rename = "M")]
    m: u32,
    modes: Vec<(u32, f64, f64)>,
}

impl FourierDensity {
    /// Ingests uniform samples of a 2π-periodic density: FFT, keep modes up
    /// to `m_max`, and validate positivity of the kept truncation on the
    /// sample grid. Requires 4× oversampling: `samples.len() ≥ 4·m_max`.
    pub fn from_samples(samples: &[f64], m_max: usize) -> Result<Self> {
        let k = samples.len();
        if k < 4 * m_max.max(1) {
            return Err(Error::InvalidParameter(format!(
                "need at least 4·m_max = {} samples, got {k}",
                4 * m_max.max(1)
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidDensity("non-finite density sample".into()));
        }
        let mut buf: Vec<Complex64> = samples
            .iter()
            .map(|&s| Complex64::new(s, 0.0))
            .collect();
        let mut planner = rustfft::FftPlanner::new();
        planner.plan_fft_forward(k).process(&mut buf);
        let coeffs: Vec<Complex64> = (0..=m_max).map(|m| buf[m] / k as f64).collect();
        let density = FourierDensity {
            coeffs,
            sample_count: k,
        };
        density.validate(k)?;
        Ok(density)
    }

    /// Builds a density directly from nonnegative-mode coefficients
    /// (`m → ρ̂_m`); missing modes are zero. Positivity of the reconstruction
    /// is validated on a 4× grid.
    pub fn from_modes(m_max: usize, modes: &[(usize, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m_max + 1];
        for &(m, c) in modes {
            if m > m_max {
                return Err(Error::InvalidParameter(format!(
                    "mode {m} exceeds truncation order {m_max}"
                )));
            }
            coeffs[m] = c;
        }
        if coeffs[0].im.abs() > 1e-12 * coeffs[0].re.abs().max(1e-300) {
            return Err(Error::InvalidDensity(
                "mean mode must be real (density is real)".into(),
            ));
        }
        coeffs[0] = Complex64::new(coeffs[0].re, 0.0);
        let density = FourierDensity {
            coeffs,
            sample_count: 0,
        };
        density.validate(4 * (m_max + 1).next_power_of_two())?;
        Ok(density)
    }

    fn validate(&self, grid: usize) -> Result<()> {
        if !(self.coeffs[0].re > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "total mass 2π·ρ̂₀ must be positive, got ρ̂₀ = {}",
                self.coeffs[0].re
            )));
        }
        let values = self.eval_grid(grid);
        let max = values.iter().copied().fold(0.0_f64, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-9 * max {
            return Err(Error::InvalidDensity(format!(
                "density dips to {min} (max {max}); negative beyond roundoff floor"
            )));
        }
        Ok(())
    }

    /// Truncation order M.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// `ρ̂_m` for any integer m (conjugate symmetry, zero beyond M).
    pub fn coeff(&self, m: i64) -> Complex64 {
        let idx = m.unsigned_abs() as usize;
        if idx >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        if m >= 0 {
            self.coeffs[idx]
        } else {
            self.coeffs[idx].conj()
        }
    }

    /// Total mass `∫ρ dθ = 2π ρ̂₀`.
    pub fn mass(&self) -> f64 {
        2.0 * PI * self.coeffs[0].re
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.coeffs[0].re;
        for (m, c) in self.coeffs.iter().enumerate().skip(1) {
            let phase = Complex64::from_polar(1.0, m as f64 * theta);
            v += 2.0 * (c * phase).re;
        }
        v
    }

    /// Values on a uniform grid of `k` points via zero-padded inverse FFT.
    pub fn eval_grid(&self, k: usize) -> Vec<f64> {
        let k = k.max(2 * self.coeffs.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        buf[0] = self.coeffs[0];
        for (m, c) in self.coeffs.iter().enumerate().skip(1) {
            buf[m] = *c;
            buf[k - m] = c.conj();
        }
        let mut planner = rustfft::FftPlanner::new();
        planner.plan_fft_inverse(k).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    pub fn min_on_grid(&self, k: usize) -> f64 {
        self.eval_grid(k)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// The rotated density `ρ(θ - α)`.
    pub fn rotated(&self, alpha: f64) -> FourierDensity {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * Complex64::from_polar(1.0, -(m as f64) * alpha))
            .collect();
        FourierDensity {
            coeffs,
            sample_count: self.sample_count,
        }
    }

    /// The scaled density `c·ρ`, `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<FourierDensity> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density scale must be positive, got {c}"
            )));
        }
        Ok(FourierDensity {
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
            sample_count: self.sample_count,
        })
    }

    pub fn to_json(&self) -> String {
        let modes = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(m, c)| (m as u32, c.re, c.im))
            .collect();
        let doc = DensityJson {
            m: self.truncation() as u32,
            modes,
        };
        serde_json::to_string_pretty(&doc).expect("density serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DensityJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("density JSON: {e}")))?;
        let modes: Vec<(usize, Complex64)> = doc
            .modes
            .iter()
            .map(|&(m, re, im)| (m as usize, Complex64::new(re, im)))
            .collect();
        FourierDensity::from_modes(doc.m as usize, &modes)
    }
}

/// Weighted Steklov spectrum of the disk: ordered eigenvalues, density mass
/// and the trig truncation order that produced them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SteklovSpectrum {
    /// `σ₀ = 0 ≤ σ₁ ≤ …`, Rayleigh–Ritz upper bounds.
    pub entries: Vec<f64>,
    /// `∫ρ dθ`.
    pub mass: f64,
    /// Number of trigonometric mode pairs used.
    pub truncation: usize,
}

impl SteklovSpectrum {
    /// Scale-invariant entries `σ̄_k = σ_k · mass`.
    pub fn normalized(&self) -> Vec<f64> {
        self.entries.iter().map(|s| s * self.mass).collect()
    }
}

/// Normalized entries `σ̄_k = σ_k · mass` of a spectrum.
pub fn normalized_spectrum(spec: &SteklovSpectrum) -> Vec<f64> {
    spec.normalized()
}

/// Dirichlet energies of harmonic extensions of the real trig basis
/// `{1, cos θ, sin θ, …, cos Nθ, sin Nθ}`: `diag(0, π·1, π·1, …, π·N, π·N)`.
pub fn dtn_energy_matrix(n_modes: usize) -> Result<Vec<f64>> {
    if n_modes == 0 {
        return Err(Error::InvalidParameter("need at least one mode".into()));
    }
    let mut d = Vec::with_capacity(2 * n_modes + 1);
    d.push(0.0);
    for n in 1..=n_modes {
        d.push(PI * n as f64);
        d.push(PI * n as f64);
    }
    Ok(d)
}

/// Gram matrix of the real trig basis in `L²(ρ dθ)`, filled from the
/// density coefficients by the convolution identities
/// `∫ρ cos jθ = 2π·Re ρ̂_j`, `∫ρ sin jθ = -2π·Im ρ̂_j` (j > 0). Coefficients
/// beyond the density's truncation act as zero (explicit padding).
pub fn boundary_mass_matrix(rho: &FourierDensity, n_modes: usize) -> Result<DMatrix<f64>> {
    if n_modes == 0 {
        return Err(Error::InvalidParameter("need at least one mode".into()));
    }
    let cos_int = |j: i64| 2.0 * PI * rho.coeff(j).re;
    let sin_int = |j: i64| {
        if j == 0 {
            0.0
        } else {
            -2.0 * PI * rho.coeff(j.abs()).im * j.signum() as f64
        }
    };
    // basis indices: 0 ↦ 1, 2n-1 ↦ cos nθ, 2n ↦ sin nθ
    let size = 2 * n_modes + 1;
    let mut b = DMatrix::zeros(size, size);
    b[(0, 0)] = cos_int(0);
    for n in 1..=n_modes as i64 {
        let (cn, sn) = ((2 * n - 1) as usize, (2 * n) as usize);
        b[(0, cn)] = cos_int(n);
        b[(cn, 0)] = b[(0, cn)];
        b[(0, sn)] = sin_int(n);
        b[(sn, 0)] = b[(0, sn)];
        for k in 1..=n {
            let (ck, sk) = ((2 * k - 1) as usize, (2 * k) as usize);
            let cc = 0.5 * (cos_int(n - k) + cos_int(n + k));
            let ss = 0.5 * (cos_int(n - k) - cos_int(n + k));
            // ∫ cos nθ sin kθ ρ = ½(S(n+k) - S(n-k))
            let cs = 0.5 * (sin_int(n + k) - sin_int(n - k));
            // ∫ sin nθ cos kθ ρ = ½(S(n+k) + S(n-k))
            let sc = 0.5 * (sin_int(n + k) + sin_int(n - k));
            b[(cn, ck)] = cc;
            b[(ck, cn)] = cc;
            b[(sn, sk)] = ss;
            b[(sk, sn)] = ss;
            b[(cn, sk)] = cs;
            b[(sk, cn)] = cs;
            if k < n {
                b[(sn, ck)] = sc;
                b[(ck, sn)] = sc;
            }
        }
    }
    Ok(b)
}

/// Lowest `k_max + 1` weighted Steklov eigenvalues of the disk at
/// truncation order `n_modes` (requires `n_modes ≥ k_max + 2`).
pub fn steklov_eigenvalues(
    rho: &FourierDensity,
    k_max: usize,
    n_modes: usize,
) -> Result<SteklovSpectrum> {
    if n_modes < k_max + 2 {
        return Err(Error::InvalidParameter(format!(
            "need n_modes >= k_max + 2 = {}, got {n_modes}",
            k_max + 2
        )));
    }
    let d = dtn_energy_matrix(n_modes)?;
    let b = boundary_mass_matrix(rho, n_modes)?;
    let mut entries = generalized_dense_lowest(&d, &b, k_max + 1)?;
    let scale = entries.last().copied().unwrap_or(1.0).abs().max(1.0);
    if entries[0].abs() > 1e-9 * scale {
        return Err(Error::NumericBreakdown(format!(
            "constant mode eigenvalue {} not within 1e-9 of zero",
            entries[0]
        )));
    }
    entries[0] = 0.0;
    if entries.iter().any(|&s| s < 0.0) {
        return Err(Error::NumericBreakdown(
            "negative Steklov eigenvalue".into(),
        ));
    }
    Ok(SteklovSpectrum {
        entries,
        mass: rho.mass(),
        truncation: n_modes,
    })
}

/// Boundary derivative density `ρ(θ) = |f'(e^{iθ})|` of the disk
/// automorphism `f(z) = (z-a)/(1-āz)`, sampled and FFT-ingested with
/// truncation order `m_max`. Every such density has mass exactly 2π and
/// realizes Weinstock equality `σ̄₁ = 2π`.
pub fn density_from_mobius(a: Complex64, m_max: usize) -> Result<FourierDensity> {
    if a.norm() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Moebius parameter must satisfy |a| < 1, got |a| = {}",
            a.norm()
        )));
    }
    let k = (4 * m_max.max(1)).next_power_of_two();
    let one_minus = 1.0 - a.norm_sqr();
    let samples: Vec<f64> = (0..k)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / k as f64;
            let z = Complex64::from_polar(1.0, theta);
            // |f'(z)| = (1-|a|²)/|1-āz|² on |z| = 1
            one_minus / (1.0 - a.conj() * z).norm_sqr()
        })
        .collect();
    FourierDensity::from_samples(&samples, m_max)
}

/// A smooth bump mixture: periodized Cauchy (Poisson-kernel) bumps of
/// half-width ε at the given angles with the given relative masses,
/// normalized to total mass 2π. Returns the density and a flag warning of
/// overlapping bumps (circular center distance < 4ε) — allowed, but it
/// degrades the concentration regime.
///
/// The kernel is the wrapped Cauchy density
/// `W_ε(φ) = (1/2π)(1-a²)/|1-a e^{iφ}|²` with `a = e^{-ε}` — the harmonic
/// extension of a boundary atom, with Fourier coefficients `e^{-ε|m|}/2π`.
/// Its quadratic tails are what let `σ̄_k` climb to `2πk` as ε → 0: equal
/// equally-spaced Cauchy bumps are exactly the boundary derivative of a
/// degenerating degree-k Blaschke product, whose components stay honest
/// eigenfunctions at every ε. Exponential-tail bumps (Gaussians) stall
/// around `0.76·2πk` and then collapse, because boundary points have zero
/// capacity: once the density is exponentially small between bumps, nearly
/// free log-cutoff trial functions drive the eigenvalues to zero instead.
pub fn concentrating_density(
    centers: &[f64],
    masses: &[f64],
    epsilon: f64,
    m_max: usize,
) -> Result<(FourierDensity, bool)> {
    if centers.is_empty() || centers.len() != masses.len() {
        return Err(Error::InvalidParameter(
            "need equally many centers and masses, at least one".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "bump width must lie in (0, 0.5], got {epsilon}"
        )));
    }
    if masses.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidParameter(
            "bump masses must be positive".into(),
        ));
    }
    let circ_dist = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    };
    let mut overlap = false;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let dist = circ_dist(centers[i], centers[j]);
            if dist == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "bump centers {i} and {j} coincide"
                )));
            }
            if dist < 4.0 * epsilon {
                overlap = true;
            }
        }
    }
    // enough samples to resolve the bumps and to oversample the kept modes
    let k = (4 * m_max.max(1))
        .max((64.0 / epsilon).ceil() as usize)
        .next_power_of_two();
    let total: f64 = masses.iter().sum();
    let a = (-epsilon).exp();
    let kernel_scale = (1.0 - a * a) / (2.0 * PI);
    let samples: Vec<f64> = (0..k)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / k as f64;
            let mut v = 0.0;
            for (&c, &w) in centers.iter().zip(masses) {
                let phi = theta - c;
                // |1 - a e^{iφ}|² = 1 - 2a cos φ + a²
                v += w * kernel_scale / (1.0 - 2.0 * a * phi.cos() + a * a);
            }
            2.0 * PI * v / total
        })
        .collect();
    let density = FourierDensity::from_samples(&samples, m_max)?;
    Ok((density, overlap))
}

/// A strictly positive smooth random density `exp(t(θ))` with `t` a random
/// trig polynomial of order `max_mode`, for randomized Weinstock sweeps.
/// Deterministic given the RNG state.
pub fn random_smooth_density(
    rng: &mut impl rand::Rng,
    max_mode: usize,
    amplitude: f64,
    m_max: usize,
) -> Result<FourierDensity> {
    let mut normal = box_muller_stream(rng);
    let coefs: Vec<(f64, f64)> = (0..max_mode).map(|_| (normal(), normal())).collect();
    drop(normal);
    let k = (4 * m_max.max(1)).next_power_of_two();
    let samples: Vec<f64> = (0..k)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / k as f64;
            let mut t = 0.0;
            for (m, (a, b)) in coefs.iter().enumerate() {
                let mm = (m + 1) as f64;
                t += amplitude / mm * (a * (mm * theta).cos() + b * (mm * theta).sin());
            }
            t.exp()
        })
        .collect();
    FourierDensity::from_samples(&samples, m_max)
}

// Box-Muller standard normals from a uniform RNG; keeps the dependency
// surface flat instead of pulling rand_distr for one distribution.
fn box_muller_stream<R: rand::Rng>(rng: &mut R) -> impl FnMut() -> f64 + '_ {
    move || {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_density(m_max: usize) -> FourierDensity {
        FourierDensity::from_modes(m_max, &[(0, Complex64::new(1.0, 0.0))]).unwrap()
    }

    /// Periodic trapezoid quadrature (spectrally exact for smooth periodic
    /// integrands): the independent route to the Gram entries.
    fn periodic_quadrature(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        (0..n)
            .map(|j| f(2.0 * PI * j as f64 / n as f64))
            .sum::<f64>()
            * 2.0
            * PI
            / n as f64
    }

    #[test]
    fn dtn_diagonal_values() {
        let d = dtn_energy_matrix(3).unwrap();
        assert_eq!(d.len(), 7);
        assert_eq!(d[0], 0.0);
        assert!((d[1] - PI).abs() < 1e-15);
        assert!((d[2] - PI).abs() < 1e-15);
        assert!((d[5] - 3.0 * PI).abs() < 1e-15);
        assert!((d[6] - 3.0 * PI).abs() < 1e-15);
    }

    /// Independent check of the harmonic-extension energies: finite
    /// differences of `Re((x+iy)^n)` over a polar quadrature grid.
    #[test]
    fn dtn_energy_matches_finite_difference_quadrature() {
        for n in [1u32, 3] {
            let u = |x: f64, y: f64| Complex64::new(x, y).powu(n).re;
            let h = 1e-5;
            let grad_sq = |x: f64, y: f64| {
                let ux = (u(x + h, y) - u(x - h, y)) / (2.0 * h);
                let uy = (u(x, y + h) - u(x, y - h)) / (2.0 * h);
                ux * ux + uy * uy
            };
            // midpoint radial × trapezoid angular product rule
            let (nr, nt) = (400, 256);
            let mut energy = 0.0;
            for i in 0..nr {
                let r = (i as f64 + 0.5) / nr as f64;
                for j in 0..nt {
                    let t = 2.0 * PI * j as f64 / nt as f64;
                    energy += grad_sq(r * t.cos(), r * t.sin()) * r;
                }
            }
            energy *= (1.0 / nr as f64) * (2.0 * PI / nt as f64);
            let expected = PI * n as f64;
            assert!(
                (energy - expected).abs() / expected < 1e-4,
                "n = {n}: {energy} vs {expected}"
            );
        }
    }

    #[test]
    fn mass_matrix_for_unit_density_is_diagonal() {
        let rho = unit_density(8);
        let b = boundary_mass_matrix(&rho, 4).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expected = match (i, j) {
                    (0, 0) => 2.0 * PI,
                    _ if i == j => PI,
                    _ => 0.0,
                };
                assert!((b[(i, j)] - expected).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn mass_matrix_entry_against_quadrature_one_plus_cos() {
        // ρ = 1 + cos θ: entry (1, cos θ) = ∫ cos θ (1 + cos θ) dθ = π
        let rho = FourierDensity::from_modes(
            4,
            &[(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(0.5, 0.0))],
        )
        .unwrap();
        let b = boundary_mass_matrix(&rho, 2).unwrap();
        assert!((b[(0, 1)] - PI).abs() < 1e-12);
        let quad = periodic_quadrature(|t| t.cos() * (1.0 + t.cos()), 1 << 12);
        assert!((b[(0, 1)] - quad).abs() < 1e-10);
    }

    #[test]
    fn mass_matrix_against_quadrature_generic_density() {
        // every Gram entry vs direct quadrature on a fixed low-order density
        // with both cos and sin content
        let rho = FourierDensity::from_modes(
            8,
            &[
                (0, Complex64::new(1.3, 0.0)),
                (1, Complex64::new(0.21, -0.14)),
                (2, Complex64::new(-0.09, 0.05)),
                (3, Complex64::new(0.04, 0.11)),
            ],
        )
        .unwrap();
        let n_modes = 4;
        let b = boundary_mass_matrix(&rho, n_modes).unwrap();
        let basis = |i: usize, t: f64| -> f64 {
            if i == 0 {
                1.0
            } else {
                let n = i.div_ceil(2) as f64;
                if i % 2 == 1 {
                    (n * t).cos()
                } else {
                    (n * t).sin()
                }
            }
        };
        for i in 0..2 * n_modes + 1 {
            for j in 0..2 * n_modes + 1 {
                let quad =
                    periodic_quadrature(|t| basis(i, t) * basis(j, t) * rho.eval(t), 1 << 12);
                assert!(
                    (b[(i, j)] - quad).abs() < 1e-10,
                    "entry ({i},{j}): {} vs {quad}",
                    b[(i, j)]
                );
            }
        }
    }

    #[test]
    fn mass_matrix_is_linear_in_density() {
        let rho = FourierDensity::from_modes(
            4,
            &[(0, Complex64::new(1.0, 0.0)), (2, Complex64::new(0.2, 0.1))],
        )
        .unwrap();
        let b1 = boundary_mass_matrix(&rho, 3).unwrap();
        let b2 = boundary_mass_matrix(&rho.scaled(2.0).unwrap(), 3).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert!((b2[(i, j)] - 2.0 * b1[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_disk_spectrum_is_exact() {
        let rho = unit_density(130);
        let spec = steklov_eigenvalues(&rho, 4, 64).unwrap();
        let expected = [0.0, 1.0, 1.0, 2.0, 2.0];
        for (a, b) in spec.entries.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert!((spec.mass - 2.0 * PI).abs() < 1e-12);
        let bar = spec.normalized();
        assert!((bar[1] - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn needs_enough_modes() {
        let rho = unit_density(16);
        assert!(steklov_eigenvalues(&rho, 4, 5).is_err());
    }

    #[test]
    fn mobius_density_matches_poisson_kernel() {
        // exact boundary-derivative coefficients are ā^m
        let a = Complex64::new(0.35, -0.2);
        let rho = density_from_mobius(a, 64).unwrap();
        for m in 0..=20i64 {
            let exact = a.conj().powu(m as u32);
            let got = rho.coeff(m);
            assert!((got - exact).norm() < 1e-12, "m={m}: {got} vs {exact}");
        }
        // mass 2π: automorphisms preserve boundary length
        assert!((rho.mass() - 2.0 * PI).abs() < 1e-8);
        // extremal value (1-|a|)/(1+|a|)
        let min = rho.min_on_grid(1 << 12);
        let expected_min = (1.0 - a.norm()) / (1.0 + a.norm());
        assert!((min - expected_min).abs() < 1e-6, "{min} vs {expected_min}");
    }

    #[test]
    fn mobius_identity_is_unit_density() {
        let rho = density_from_mobius(Complex64::new(0.0, 0.0), 32).unwrap();
        for m in 1..=32 {
            assert!(rho.coeff(m).norm() < 1e-12);
        }
        assert!((rho.coeff(0).re - 1.0).abs() < 1e-12);
        assert!(density_from_mobius(Complex64::new(1.0, 0.0), 8).is_err());
    }

    #[test]
    fn mobius_weinstock_equality() {
        // conformal pullback of the disk: σ̄₁ stays 2π
        let rho = density_from_mobius(Complex64::new(0.5, 0.0), 512).unwrap();
        let spec = steklov_eigenvalues(&rho, 2, 256).unwrap();
        let bar1 = spec.normalized()[1];
        assert!(
            (bar1 - 2.0 * PI).abs() < 1e-6,
            "normalized first eigenvalue {bar1} vs {}",
            2.0 * PI
        );
    }

    #[test]
    fn rotation_invariance() {
        let rho = FourierDensity::from_modes(
            16,
            &[
                (0, Complex64::new(1.0, 0.0)),
                (1, Complex64::new(0.2, 0.1)),
                (3, Complex64::new(-0.1, 0.04)),
            ],
        )
        .unwrap();
        let base = steklov_eigenvalues(&rho, 3, 24).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..5 {
            let alpha: f64 = rng.gen_range(0.0..2.0 * PI);
            let spun = steklov_eigenvalues(&rho.rotated(alpha), 3, 24).unwrap();
            for (a, b) in base.entries.iter().zip(&spun.entries) {
                assert!((a - b).abs() < 1e-10, "alpha={alpha}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scale_covariance() {
        let rho = FourierDensity::from_modes(
            8,
            &[(0, Complex64::new(1.0, 0.0)), (2, Complex64::new(0.15, 0.0))],
        )
        .unwrap();
        let c = 3.7;
        let base = steklov_eigenvalues(&rho, 3, 16).unwrap();
        let scaled = steklov_eigenvalues(&rho.scaled(c).unwrap(), 3, 16).unwrap();
        for (a, b) in base.entries.iter().zip(&scaled.entries) {
            assert!((b - a / c).abs() < 1e-12 * a.max(1.0), "{a} vs {b}");
        }
        for (a, b) in base.normalized().iter().zip(scaled.normalized()) {
            assert!((a - b).abs() < 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn truncation_monotonicity() {
        // nested trig spaces make σ_k nonincreasing in N; the slack covers
        // eigensolver roundoff on the ill-conditioned concentrated mass
        let (rho, _) = concentrating_density(&[0.3, PI + 0.3], &[1.0, 1.0], 0.3, 512).unwrap();
        let mut prev = f64::INFINITY;
        for n in [32usize, 64, 128, 256] {
            let s = steklov_eigenvalues(&rho, 2, n).unwrap();
            assert!(
                s.entries[2] <= prev * (1.0 + 1e-9),
                "second eigenvalue not monotone at N={n}: {} after {prev}",
                s.entries[2]
            );
            prev = s.entries[2];
        }
    }

    #[test]
    fn bump_density_mass_and_overlap() {
        let (rho, warn) = concentrating_density(&[0.0, PI], &[1.0, 1.0], 0.1, 64).unwrap();
        assert!(!warn);
        assert!((rho.mass() - 2.0 * PI).abs() < 1e-8);
        let (_, warn) = concentrating_density(&[0.0, 0.3], &[1.0, 1.0], 0.1, 64).unwrap();
        assert!(warn, "centers 0.3 apart with eps=0.1 should warn");
        assert!(concentrating_density(&[0.0, 0.0], &[1.0, 1.0], 0.1, 64).is_err());
        assert!(concentrating_density(&[0.0], &[1.0], 0.7, 64).is_err());
    }

    #[test]
    fn single_bump_cannot_exceed_weinstock() {
        // a single normalized Cauchy bump is itself a Moebius pullback
        // density (rotation of ρ_a with a = e^{-ε}), so this sits at the
        // Weinstock equality case rather than strictly below it
        let (rho, _) = concentrating_density(&[1.0], &[2.0], 0.1, 256).unwrap();
        let spec = steklov_eigenvalues(&rho, 1, 128).unwrap();
        let bar1 = spec.normalized()[1];
        assert!(bar1 <= 2.0 * PI + 1e-8, "Weinstock violated: {bar1}");
        assert!((bar1 - 2.0 * PI).abs() < 1e-7, "equality case: {bar1}");
    }

    #[test]
    fn antipodal_bumps_approach_4pi_from_below() {
        let mut prev = 0.0;
        for eps in [0.4, 0.2, 0.1] {
            let (rho, _) = concentrating_density(&[0.0, PI], &[1.0, 1.0], eps, 512).unwrap();
            let spec = steklov_eigenvalues(&rho, 2, 128).unwrap();
            let bar2 = spec.normalized()[2];
            assert!(bar2 < 4.0 * PI, "eps={eps}: {bar2}");
            assert!(bar2 > prev, "eps={eps}: not increasing ({bar2} after {prev})");
            prev = bar2;
        }
        assert!(prev > 0.95 * 4.0 * PI, "eps=0.1 should approach 4π: {prev}");
    }

    #[test]
    fn density_json_round_trip() {
        let rho = FourierDensity::from_modes(
            6,
            &[(0, Complex64::new(1.1, 0.0)), (2, Complex64::new(0.3, -0.2))],
        )
        .unwrap();
        let text = rho.to_json();
        let back = FourierDensity::from_json(&text).unwrap();
        assert_eq!(back.truncation(), 6);
        for m in 0..=6 {
            assert!((back.coeff(m) - rho.coeff(m)).norm() < 1e-15);
        }
        // schema check: a density that dips negative is rejected
        let bad = r#"{"M": 2, "modes": [[0, 1.0, 0.0], [1, 5.0, 0.0]]}"#;
        assert_eq!(
            FourierDensity::from_json(bad).unwrap_err().code(),
            "invalid-density"
        );
    }

    #[test]
    fn negative_and_zero_mass_densities_rejected() {
        assert!(FourierDensity::from_modes(4, &[(0, Complex64::new(0.0, 0.0))]).is_err());
        assert!(FourierDensity::from_modes(4, &[(0, Complex64::new(-1.0, 0.0))]).is_err());
        let samples = vec![-1.0; 64];
        assert!(FourierDensity::from_samples(&samples, 8).is_err());
    }

    #[test]
    fn random_smooth_densities_are_positive() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let rho = random_smooth_density(&mut rng, 8, 0.6, 64).unwrap();
            assert!(rho.min_on_grid(1 << 10) > 0.0);
        }
    }
}
