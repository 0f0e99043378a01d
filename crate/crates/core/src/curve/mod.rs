//! Numeric one-cut spectral curve: endpoints, moments, regularized Bergmann
//! kernel and propagators by contour quadrature.

mod eval;
mod quad;
mod solve;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use eval::{eval_expression, generator_environment, generator_value, report_csv};
pub use quad::{bergmann_reg, moment, prop_ext, prop_int};
pub use solve::{endpoint_residuals, solve_endpoints};

use crate::algebra::{AlgebraError, Generator, PointLabel};

/// `V(x) = Σ t_n x^n` with `t[n-1] = t_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub t: Vec<f64>,
}

impl Potential {
    pub fn new(t: Vec<f64>) -> Self {
        Potential { t }
    }

    /// `V'(x)` coefficients, lowest power first.
    pub fn derivative_coeffs(&self) -> Vec<f64> {
        self.t.iter().enumerate().map(|(k, &t)| (k + 1) as f64 * t).collect()
    }

    pub fn v_prime(&self, x: Complex64) -> Complex64 {
        horner(&self.derivative_coeffs(), x)
    }
}

pub(crate) fn horner(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Solved one-cut curve `y = M(x) √((x-a₁)(x-a₂))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveData {
    pub a1: f64,
    pub a2: f64,
    /// `M(x)` coefficients, lowest power first.
    pub m_poly: Vec<f64>,
    pub potential: Potential,
}

impl CurveData {
    pub fn endpoint(&self, i: u32) -> Result<f64, CurveError> {
        match i {
            1 => Ok(self.a1),
            2 => Ok(self.a2),
            _ => Err(CurveError::CutIndex(i)),
        }
    }

    pub fn m(&self, x: Complex64) -> Complex64 {
        horner(&self.m_poly, x)
    }

    /// Physical-sheet `√σ`, behaving like `x` at infinity with its cut on `[a₁, a₂]`.
    pub fn sqrt_sigma(&self, x: Complex64) -> Complex64 {
        (x - self.a1).sqrt() * (x - self.a2).sqrt()
    }

    pub fn y(&self, x: Complex64) -> Complex64 {
        self.m(x) * self.sqrt_sigma(x)
    }

    /// `√σ(z) / (z - a_i)^{1/2}` near `a_i`, analytic on a disc around it.
    ///
    /// The local root `(z - a_i)^{1/2}` has its cut pointing into the segment,
    /// which makes it the principal root at `a₂` and `i √(a₁ - z)` at `a₁`.
    pub(crate) fn local_cofactor(&self, i: u32, z: Complex64) -> Complex64 {
        if i == 1 {
            Complex64::i() * (self.a2 - z).sqrt()
        } else {
            (z - self.a1).sqrt()
        }
    }

    pub fn is_on_cut(&self, p: Complex64) -> bool {
        let width = self.a2 - self.a1;
        p.im.abs() <= 1e-14 * width && p.re >= self.a1 && p.re <= self.a2
    }
}

/// Contour circle radius and trapezoidal node count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radius: f64,
    pub points: usize,
}

/// Doubling stops here unless the starting count is already larger.
pub const MAX_POINTS: usize = 4096;

impl QuadratureSpec {
    /// Radius a quarter of the cut length, 256 nodes.
    pub fn for_curve(curve: &CurveData) -> Self {
        QuadratureSpec { radius: 0.25 * (curve.a2 - curve.a1), points: 256 }
    }

    pub fn validate(&self, curve: &CurveData) -> Result<(), CurveError> {
        let half = 0.5 * (curve.a2 - curve.a1);
        if !(self.radius > 0.0 && self.radius < half) {
            return Err(CurveError::Quadrature(format!("radius {} must lie in (0, {half})", self.radius)));
        }
        if !self.points.is_power_of_two() || self.points < 8 {
            return Err(CurveError::Quadrature(format!("points {} must be a power of two, at least 8", self.points)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub radius: Option<f64>,
    pub points: Option<usize>,
}

/// `{"t": [...], "s": 1, "quadrature": {"radius": r, "points": n}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub t: Vec<f64>,
    #[serde(default = "one_cut")]
    pub s: u32,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

fn one_cut() -> u32 {
    1
}

impl CurveConfig {
    pub fn from_json(text: &str) -> Result<Self, CurveError> {
        let c: CurveConfig = serde_json::from_str(text).map_err(|e| CurveError::Config(e.to_string()))?;
        if c.s != 1 {
            return Err(CurveError::Config(format!("only s = 1 is supported numerically, got {}", c.s)));
        }
        Ok(c)
    }

    /// Solves the curve and resolves the quadrature against it.
    pub fn build(&self) -> Result<(CurveData, QuadratureSpec), CurveError> {
        let curve = solve_endpoints(&Potential::new(self.t.clone()))?;
        let mut q = QuadratureSpec::for_curve(&curve);
        if let Some(r) = self.quadrature.radius {
            q.radius = r;
        }
        if let Some(n) = self.quadrature.points {
            q.points = n;
        }
        q.validate(&curve)?;
        Ok((curve, q))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("no one-cut solution: {0}")]
    NoOneCutSolution(String),
    #[error("quadrature did not converge for {what}: last change {change:e}")]
    Convergence { what: String, change: f64 },
    #[error("point {0} lies on the cut")]
    OnCut(Complex64),
    #[error("kernel arguments coincide at {0}; the regularized kernel keeps a double pole there")]
    Coincident(Complex64),
    #[error("cut index {0} does not exist on a one-cut curve")]
    CutIndex(u32),
    #[error("generator {0} carries no cut index")]
    Unindexed(Generator),
    #[error("no numeric value bound for point {0}")]
    UnboundPoint(PointLabel),
    #[error("invalid quadrature: {0}")]
    Quadrature(String),
    #[error("invalid curve configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
