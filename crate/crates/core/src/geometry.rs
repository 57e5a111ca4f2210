//! Ambient-dimension constants, radial weights, and discrete measures.
//!
//! Everything downstream is normalized to the unit ball, so lengths are
//! dimensionless and the only geometric inputs are the dimension `d`, a
//! radial density `f(r)` defining `dμ = f(|x|) dx`, and finite atom lists
//! standing in for general Radon measures.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Ambient dimension `d ≥ 2` of the Euclidean space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
        }
        Ok(Dimension(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// Rejects dimensions below `min` for operations that need it (most of
    /// the radial machinery is d >= 3 only).
    pub fn require_at_least(self, min: u32, what: &str) -> Result<()> {
        if self.0 < min {
            return Err(Error::InvalidDimension(format!(
                "{what} requires d >= {min}, got d = {}",
                self.0
            )));
        }
        Ok(())
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Gamma function by the Lanczos approximation (g = 7, 9 terms).
///
/// Good to ~1e-14 relative on the half-integer arguments used here; the
/// unit tests pin it against the exact integer/half-integer closed forms.
pub fn gamma(z: f64) -> f64 {
    const G: f64 = 7.0;
    #[allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if z < 0.5 {
        // reflection formula
        return std::f64::consts::PI / ((std::f64::consts::PI * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * x
}

/// Surface measure `ω_{d-1} = |S^{d-1}| = 2 π^{d/2} / Γ(d/2)` of the unit sphere.
pub fn sphere_area(d: Dimension) -> f64 {
    let df = d.as_f64();
    2.0 * std::f64::consts::PI.powf(df / 2.0) / gamma(df / 2.0)
}

/// Volume `|𝔹^d| = ω_{d-1} / d` of the unit ball.
pub fn ball_volume(d: Dimension) -> f64 {
    sphere_area(d) / d.as_f64()
}

/// Dirichlet energy of the equator map `u₀(x) = x/|x|` on the unit ball:
/// `∫_{𝔹^d} |du₀|² = (d-1)/(d-2) ω_{d-1}`.
///
/// Diverges for d = 2 (the radial integrand is 1/r).
pub fn equator_energy(d: Dimension) -> Result<f64> {
    if d.get() <= 2 {
        return Err(Error::DivergentEnergy(format!(
            "equator map energy diverges for d = {} (needs d >= 3)",
            d.get()
        )));
    }
    let df = d.as_f64();
    Ok((df - 1.0) / (df - 2.0) * sphere_area(d))
}

/// Same energy by quadrature of the radial integral
/// `ω_{d-1} ∫₀¹ (d-1) r^{d-3} dr`, as an independent check on the closed form.
pub fn equator_energy_quadrature(d: Dimension) -> Result<f64> {
    if d.get() <= 2 {
        return Err(Error::DivergentEnergy(format!(
            "equator map energy diverges for d = {} (needs d >= 3)",
            d.get()
        )));
    }
    let df = d.as_f64();
    let radial = quadrature::adaptive(|r| (df - 1.0) * r.powf(df - 3.0), 0.0, 1.0, 1e-13)?;
    Ok(sphere_area(d) * radial)
}

/// Which family a radial density belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// `f(r) = 1/r²`, the critical weight whose first eigenvalue the ball
    /// maximizes (singularity order 2).
    InvSquare,
    /// `f ≡ 1`, plain Lebesgue measure.
    Constant,
    /// User-supplied evaluator with a declared singularity order.
    Custom,
}

/// A radial density `f(r)` on `(0, 1]` defining the measure `f(|x|) dx`.
#[derive(Clone)]
pub struct RadialWeight {
    kind: WeightKind,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `s` with `f(r) ~ r^{-s}` as `r → 0`; the mass is finite iff `s < d`.
    singularity_order: f64,
}

impl std::fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialWeight")
            .field("kind", &self.kind)
            .field("singularity_order", &self.singularity_order)
            .finish()
    }
}

impl RadialWeight {
    pub fn inv_square() -> Self {
        RadialWeight {
            kind: WeightKind::InvSquare,
            eval: Arc::new(|r| 1.0 / (r * r)),
            singularity_order: 2.0,
        }
    }

    pub fn constant() -> Self {
        RadialWeight {
            kind: WeightKind::Constant,
            eval: Arc::new(|_| 1.0),
            singularity_order: 0.0,
        }
    }

    /// A custom nonnegative density. `singularity_order` is the exponent `s`
    /// with `f(r) ~ r^{-s}` near 0 (0 for bounded densities).
    pub fn custom(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        singularity_order: f64,
    ) -> Self {
        RadialWeight {
            kind: WeightKind::Custom,
            eval: Arc::new(eval),
            singularity_order,
        }
    }

    /// The density `c·f`; scaling the measure by `c` scales eigenvalues by `1/c`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        RadialWeight {
            kind: WeightKind::Custom,
            eval: Arc::new(move |r| c * inner(r)),
            singularity_order: self.singularity_order,
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn singularity_order(&self) -> f64 {
        self.singularity_order
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    /// Total mass `μ(𝔹^d) = ω_{d-1} ∫₀¹ f(r) r^{d-1} dr`.
    ///
    /// Closed form for the built-in weights, adaptive quadrature otherwise.
    pub fn ball_mass(&self, d: Dimension) -> Result<f64> {
        let df = d.as_f64();
        if self.singularity_order >= df {
            return Err(Error::InvalidParameter(format!(
                "weight with singularity order {} has infinite mass in dimension {}",
                self.singularity_order, df
            )));
        }
        let radial = match self.kind {
            WeightKind::InvSquare => 1.0 / (df - 2.0),
            WeightKind::Constant => 1.0 / df,
            WeightKind::Custom => {
                let f = self.eval.clone();
                quadrature::adaptive(move |r| f(r) * r.powf(df - 1.0), 0.0, 1.0, 1e-12)?
            }
        };
        Ok(sphere_area(d) * radial)
    }
}

/// One weighted atom of a discrete measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: Vec<f64>,
    pub mass: f64,
}

/// A finite atomic measure in `ℝ^d`: the working surrogate for the Radon
/// measures the centering maps integrate against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl PointMeasure {
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("measure dimension must be >= 1".into()));
        }
        let mut total = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            if a.position.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "atom {i} has {} coordinates, expected {dim}",
                    a.position.len()
                )));
            }
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "atom {i} has non-positive mass {}",
                    a.mass
                )));
            }
            total += a.mass;
        }
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("measure has zero total mass".into()));
        }
        Ok(PointMeasure { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Largest atom distance from the origin.
    pub fn max_radius(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.position.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Checks that all atoms lie in the closed ball of radius `r`.
    pub fn check_bounded_by(&self, r: f64) -> Result<()> {
        let max = self.max_radius();
        if max > r * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "atom at radius {max} outside stated bounding ball of radius {r}"
            )));
        }
        Ok(())
    }

    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::InvalidParameter("translation dimension mismatch".into()));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                position: a.position.iter().zip(v).map(|(x, t)| x + t).collect(),
                mass: a.mass,
            })
            .collect();
        PointMeasure::new(self.dim, atoms)
    }

    /// Reads the CSV interchange format: header `x1,...,xd,mass`, one atom
    /// per row, `.` decimal separator.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty measure file".into()))??;
        let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        if cols.len() < 2 || cols.last() != Some(&"mass") {
            return Err(Error::Parse(format!(
                "expected header x1,...,xd,mass, got `{header}`"
            )));
        }
        let dim = cols.len() - 1;
        for (i, c) in cols[..dim].iter().enumerate() {
            let expected = format!("x{}", i + 1);
            if *c != expected {
                return Err(Error::Parse(format!(
                    "expected column `{expected}`, got `{c}`"
                )));
            }
        }
        let mut atoms = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != dim + 1 {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    dim + 1
                )));
            }
            let mut position = Vec::with_capacity(dim);
            for f in &fields[..dim] {
                position.push(
                    f.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?,
                );
            }
            let mass = fields[dim]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?;
            atoms.push(Atom { position, mass });
        }
        PointMeasure::new(dim, atoms)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = String::new();
        for i in 1..=self.dim {
            let _ = write!(header, "x{i},");
        }
        header.push_str("mass");
        writeln!(w, "{header}")?;
        for a in &self.atoms {
            let mut row = String::new();
            for x in &a.position {
                let _ = write!(row, "{},", format_sci(*x));
            }
            let _ = write!(row, "{}", format_sci(a.mass));
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

/// C-style `%.12e` formatting (12 digits after the point, two-digit signed
/// exponent). Rust's `{:e}` leaves the exponent unpadded, which would make
/// output files diff-unstable across platforms that disagree on `1e0` vs
/// `1e+00`.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.12e}", x);
    // `{:.12e}` gives e.g. "6.000000000000e0" or "-1.2e-3"
    let (mantissa, exp) = s.split_once('e').expect("exponent in {:e} output");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(rest) => ('-', rest),
        None => ('+', exp),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}
