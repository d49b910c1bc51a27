//! Cutoff, majorant and tilted test functions built from the bump ψ.
//!
//! Fourier conventions: on the line f̂(ξ) = ∫f(x)e^{−2πixξ}dx; on the circle
//! f̂(n) = ∫₀^{2π} f(x)e^{−inx}dx. For a function on ℝ/2πℤ obtained by
//! periodizing a line function F, the circle coefficient is F̂(n/2π); all
//! conversions go through [`circle_frequency`].

use super::bump::{psi, psi_cdf, psi_d4_l1, psi_hat, psi_jet, psi_tilted_mass};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

/// Which member of the test-function family a descriptor denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// ψ itself.
    Psi,
    /// ψ_η(x) = ψ(x/η)/η.
    PsiEta,
    /// χ_{[−y,y]} ⋆ ψ_η.
    GYEta,
    /// ψ_η ⋆ (χ_{[−y,y]}·sgn).
    HYEta,
    /// ψ((x−y)/2η) + ψ((x+y)/2η), the even majorant of the window around ±y.
    FMajorantLen,
    /// 2π-periodization of ψ((x−θ₀)/2η′) + ψ((x+θ₀)/2η′).
    FMajorantHol,
    /// χ_{[−η,t]} ⋆ ψ^λ_η + χ_{[−t,η]} ⋆ ψ^{−λ}_η with ψ^λ_η(x) = ψ_η(x)e^{λx}.
    GLambda,
    /// χ_{[−η,t]} ⋆ ψ^λ_η − χ_{[−t,η]} ⋆ ψ^{−λ}_η.
    HLambda,
    /// Periodic convolution χ_I ⋆ ψ_{η′} on ℝ/2πℤ.
    FIEtaprime,
    /// χ_{[−y,y]} on the line.
    IndicatorLen,
    /// χ_I on the circle.
    IndicatorHol,
}

impl CutoffKind {
    pub const ALL: [CutoffKind; 11] = [
        CutoffKind::Psi,
        CutoffKind::PsiEta,
        CutoffKind::GYEta,
        CutoffKind::HYEta,
        CutoffKind::FMajorantLen,
        CutoffKind::FMajorantHol,
        CutoffKind::GLambda,
        CutoffKind::HLambda,
        CutoffKind::FIEtaprime,
        CutoffKind::IndicatorLen,
        CutoffKind::IndicatorHol,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CutoffKind::Psi => "psi",
            CutoffKind::PsiEta => "psi_eta",
            CutoffKind::GYEta => "g_y_eta",
            CutoffKind::HYEta => "h_y_eta",
            CutoffKind::FMajorantLen => "f_majorant_len",
            CutoffKind::FMajorantHol => "f_majorant_hol",
            CutoffKind::GLambda => "g_lambda",
            CutoffKind::HLambda => "h_lambda",
            CutoffKind::FIEtaprime => "f_i_etaprime",
            CutoffKind::IndicatorLen => "indicator_len",
            CutoffKind::IndicatorHol => "indicator_hol",
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            CutoffKind::HYEta | CutoffKind::HLambda => Parity::Odd,
            CutoffKind::FIEtaprime | CutoffKind::FMajorantHol | CutoffKind::IndicatorHol => {
                Parity::Periodic
            }
            _ => Parity::Even,
        }
    }
}

impl fmt::Display for CutoffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutoffKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CutoffKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidDescriptor(format!("unknown kind `{s}`")))
    }
}

/// Symmetry type of a test function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    /// A function on ℝ/2πℤ.
    Periodic,
}

/// A member of the test-function family, with the parameters its kind needs.
///
/// `scale` multiplies the function (and every transform) by a constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffDescriptor {
    pub kind: CutoffKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etaprime: Option<f64>,
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

fn require(v: Option<f64>, name: &str, kind: CutoffKind) -> Result<f64> {
    let v = v.ok_or_else(|| Error::InvalidDescriptor(format!("{kind} requires `{name}`")))?;
    if !v.is_finite() {
        return Err(Error::InvalidDescriptor(format!("`{name}` must be finite")));
    }
    Ok(v)
}

fn positive(v: f64, name: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidDescriptor(format!("`{name}` must be positive, got {v}")))
    }
}

/// Parameters after validation.
#[derive(Clone, Copy, Debug)]
enum Params {
    Psi,
    PsiEta { eta: f64 },
    GYEta { y: f64, eta: f64 },
    HYEta { y: f64, eta: f64 },
    FMajorantLen { y: f64, eta: f64 },
    FMajorantHol { theta0: f64, etaprime: f64 },
    GLambda { t: f64, eta: f64, lambda: f64 },
    HLambda { t: f64, eta: f64, lambda: f64 },
    FIEtaprime { lo: f64, hi: f64, etaprime: f64 },
    IndicatorLen { y: f64 },
    IndicatorHol { lo: f64, hi: f64 },
}

impl CutoffDescriptor {
    fn bare(kind: CutoffKind) -> Self {
        Self {
            kind,
            y: None,
            eta: None,
            t: None,
            lambda: None,
            theta0: None,
            interval: None,
            etaprime: None,
            scale: 1.0,
        }
    }

    fn validated(self) -> Result<Self> {
        self.params()?;
        Ok(self)
    }

    pub fn psi() -> Self {
        Self::bare(CutoffKind::Psi)
    }

    pub fn psi_eta(eta: f64) -> Result<Self> {
        Self { eta: Some(eta), ..Self::bare(CutoffKind::PsiEta) }.validated()
    }

    pub fn g_y_eta(y: f64, eta: f64) -> Result<Self> {
        Self { y: Some(y), eta: Some(eta), ..Self::bare(CutoffKind::GYEta) }.validated()
    }

    pub fn h_y_eta(y: f64, eta: f64) -> Result<Self> {
        Self { y: Some(y), eta: Some(eta), ..Self::bare(CutoffKind::HYEta) }.validated()
    }

    /// The majorant ψ((x−y)/2η) + ψ((x+y)/2η); `eta` is η, not 2η.
    pub fn f_majorant_len(y: f64, eta: f64) -> Result<Self> {
        Self { y: Some(y), eta: Some(eta), ..Self::bare(CutoffKind::FMajorantLen) }.validated()
    }

    /// The periodized majorant around ±θ₀; `etaprime` is η′, not 2η′.
    pub fn f_majorant_hol(theta0: f64, etaprime: f64) -> Result<Self> {
        Self {
            theta0: Some(theta0),
            etaprime: Some(etaprime),
            ..Self::bare(CutoffKind::FMajorantHol)
        }
        .validated()
    }

    pub fn g_lambda(t: f64, eta: f64, lambda: f64) -> Result<Self> {
        Self {
            t: Some(t),
            eta: Some(eta),
            lambda: Some(lambda),
            ..Self::bare(CutoffKind::GLambda)
        }
        .validated()
    }

    pub fn h_lambda(t: f64, eta: f64, lambda: f64) -> Result<Self> {
        Self {
            t: Some(t),
            eta: Some(eta),
            lambda: Some(lambda),
            ..Self::bare(CutoffKind::HLambda)
        }
        .validated()
    }

    /// χ_I ⋆ ψ_{η′} on the circle for I = [lo, hi] (mod 2π), 0 < hi − lo ≤ 2π.
    pub fn f_i_etaprime(lo: f64, hi: f64, etaprime: f64) -> Result<Self> {
        Self {
            interval: Some((lo, hi)),
            etaprime: Some(etaprime),
            ..Self::bare(CutoffKind::FIEtaprime)
        }
        .validated()
    }

    pub fn indicator_len(y: f64) -> Result<Self> {
        Self { y: Some(y), ..Self::bare(CutoffKind::IndicatorLen) }.validated()
    }

    pub fn indicator_hol(lo: f64, hi: f64) -> Result<Self> {
        Self { interval: Some((lo, hi)), ..Self::bare(CutoffKind::IndicatorHol) }.validated()
    }

    /// The same function multiplied by `scale`.
    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale *= scale;
        self
    }

    pub fn parity(&self) -> Parity {
        self.kind.parity()
    }

    /// Checks that every parameter the kind needs is present and in range.
    pub fn validate(&self) -> Result<()> {
        self.params().map(|_| ())
    }

    fn params(&self) -> Result<Params> {
        let k = self.kind;
        if !self.scale.is_finite() {
            return Err(Error::InvalidDescriptor("`scale` must be finite".into()));
        }
        let eta = || require(self.eta, "eta", k).and_then(|v| positive(v, "eta"));
        let y = || require(self.y, "y", k).and_then(|v| positive(v, "y"));
        let etaprime = || {
            let v = require(self.etaprime, "etaprime", k)?;
            if v > 0.0 && v <= TAU {
                Ok(v)
            } else {
                Err(Error::InvalidDescriptor(format!("`etaprime` must lie in (0, 2π], got {v}")))
            }
        };
        let lambda = || {
            let v = require(self.lambda, "lambda", k)?;
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(Error::InvalidDescriptor(format!("`lambda` must lie in [0, 1], got {v}")))
            }
        };
        let interval = || {
            let (lo, hi) = self
                .interval
                .ok_or_else(|| Error::InvalidDescriptor(format!("{k} requires `interval`")))?;
            let len = hi - lo;
            if lo.is_finite() && hi.is_finite() && len > 0.0 && len <= TAU {
                Ok((lo, hi))
            } else {
                Err(Error::InvalidDescriptor(format!(
                    "interval must satisfy 0 < hi − lo ≤ 2π, got [{lo}, {hi}]"
                )))
            }
        };
        Ok(match k {
            CutoffKind::Psi => Params::Psi,
            CutoffKind::PsiEta => Params::PsiEta { eta: eta()? },
            CutoffKind::GYEta => Params::GYEta { y: y()?, eta: eta()? },
            CutoffKind::HYEta => Params::HYEta { y: y()?, eta: eta()? },
            CutoffKind::FMajorantLen => Params::FMajorantLen { y: y()?, eta: eta()? },
            CutoffKind::FMajorantHol => Params::FMajorantHol {
                theta0: require(self.theta0, "theta0", k)?,
                etaprime: etaprime()?,
            },
            CutoffKind::GLambda | CutoffKind::HLambda => {
                let t = require(self.t, "t", k).and_then(|v| positive(v, "t"))?;
                let (eta, lambda) = (eta()?, lambda()?);
                if k == CutoffKind::GLambda {
                    Params::GLambda { t, eta, lambda }
                } else {
                    Params::HLambda { t, eta, lambda }
                }
            }
            CutoffKind::FIEtaprime => {
                let (lo, hi) = interval()?;
                Params::FIEtaprime { lo, hi, etaprime: etaprime()? }
            }
            CutoffKind::IndicatorLen => Params::IndicatorLen { y: y()? },
            CutoffKind::IndicatorHol => {
                let (lo, hi) = interval()?;
                Params::IndicatorHol { lo, hi }
            }
        })
    }

    /// Smallest R with the function vanishing outside [−R, R]; `None` for
    /// periodic kinds.
    pub fn support_radius(&self) -> Result<Option<f64>> {
        Ok(match self.params()? {
            Params::Psi => Some(1.0),
            Params::PsiEta { eta } => Some(eta),
            Params::GYEta { y, eta } | Params::HYEta { y, eta } => Some(y + eta),
            Params::FMajorantLen { y, eta } => Some(y + 2.0 * eta),
            Params::GLambda { t, eta, .. } | Params::HLambda { t, eta, .. } => Some(t + eta),
            Params::IndicatorLen { y } => Some(y),
            Params::FMajorantHol { .. } | Params::FIEtaprime { .. } | Params::IndicatorHol { .. } => None,
        })
    }

    /// Pointwise value.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.scale * eval_params(self.params()?, x))
    }

    /// Line Fourier transform f̂(ξ) = ∫f(x)e^{−2πixξ}dx at a complex ξ.
    pub fn fourier(&self, xi: Complex64) -> Result<Complex64> {
        let v = match self.params()? {
            Params::Psi => psi_hat(xi),
            Params::PsiEta { eta } => psi_hat(xi * eta),
            Params::GYEta { y, eta } => interval_hat(-y, y, xi) * psi_hat(xi * eta),
            Params::HYEta { y, eta } => {
                (interval_hat(0.0, y, xi) - interval_hat(-y, 0.0, xi)) * psi_hat(xi * eta)
            }
            Params::FMajorantLen { y, eta } => {
                (xi * (TAU * y)).cos() * psi_hat(xi * (2.0 * eta)) * (4.0 * eta)
            }
            Params::GLambda { t, eta, lambda } | Params::HLambda { t, eta, lambda } => {
                let shift = Complex64::new(0.0, eta * lambda / TAU);
                let plus = interval_hat(-eta, t, xi) * psi_hat(xi * eta + shift);
                let minus = interval_hat(-t, eta, xi) * psi_hat(xi * eta - shift);
                if self.kind == CutoffKind::GLambda {
                    plus + minus
                } else {
                    plus - minus
                }
            }
            Params::IndicatorLen { y } => interval_hat(-y, y, xi),
            Params::FMajorantHol { .. } | Params::FIEtaprime { .. } | Params::IndicatorHol { .. } => {
                return Err(Error::UnsupportedKind(self.kind.name()))
            }
        };
        Ok(v * self.scale)
    }

    /// ∫f(u)e^{uν}du = f̂(iν/2π), for complex ν.
    pub fn exponential_moment(&self, nu: Complex64) -> Result<Complex64> {
        self.fourier(nu * Complex64::new(0.0, 1.0 / TAU))
    }

    /// Circle Fourier coefficient f̂(n) = ∫₀^{2π} f(x)e^{−inx}dx for periodic kinds.
    pub fn periodic_coeff(&self, n: i64) -> Result<Complex64> {
        let xi = circle_frequency(n);
        let v = match self.params()? {
            Params::FIEtaprime { lo, hi, etaprime } => {
                if n == 0 {
                    Complex64::new(hi - lo, 0.0)
                } else if is_full_circle(lo, hi) {
                    Complex64::new(0.0, 0.0)
                } else {
                    interval_hat(lo, hi, xi) * psi_hat(xi * etaprime)
                }
            }
            Params::FMajorantHol { theta0, etaprime } => {
                psi_hat(xi * (2.0 * etaprime)) * (4.0 * etaprime * (n as f64 * theta0).cos())
            }
            Params::IndicatorHol { lo, hi } => {
                if n == 0 {
                    Complex64::new(hi - lo, 0.0)
                } else if is_full_circle(lo, hi) {
                    Complex64::new(0.0, 0.0)
                } else {
                    interval_hat(lo, hi, xi)
                }
            }
            _ => return Err(Error::UnsupportedKind(self.kind.name())),
        };
        Ok(v * self.scale)
    }

    /// ‖f̂‖₁ and ‖f̂‖₁ + ‖(f″)^‖₁ for a periodic kind, summing |n| ≤ `cutoff`
    /// (default ⌈50/η′⌉) and adding a tail bound from the decay
    /// |ψ̂(ξ)| ≤ ‖ψ⁽⁴⁾‖₁/(2π|ξ|)⁴.
    pub fn f_norms(&self, cutoff: Option<u64>) -> Result<FourierNorms> {
        let params = self.params()?;
        let (etaprime, full) = match params {
            Params::FIEtaprime { lo, hi, etaprime } => (etaprime, is_full_circle(lo, hi)),
            Params::FMajorantHol { etaprime, .. } => (etaprime, false),
            _ => return Err(Error::UnsupportedKind(self.kind.name())),
        };
        let cutoff = cutoff.unwrap_or_else(|| (50.0 / etaprime).ceil() as u64).max(1);
        let mut norm1 = crate::summation::Neumaier::new();
        let mut second = crate::summation::Neumaier::new();
        norm1.add(self.periodic_coeff(0)?.norm());
        if !full {
            for n in 1..=cutoff as i64 {
                let a = self.periodic_coeff(n)?.norm() + self.periodic_coeff(-n)?.norm();
                norm1.add(a);
                second.add((n * n) as f64 * a);
            }
        }
        let m4 = psi_d4_l1() * self.scale.abs();
        let nf = cutoff as f64;
        let (tail1, tail2) = if full {
            (0.0, 0.0)
        } else {
            match params {
                Params::FIEtaprime { .. } => (
                    m4 / (etaprime.powi(4) * nf.powi(4)),
                    2.0 * m4 / (etaprime.powi(4) * nf * nf),
                ),
                _ => (
                    m4 / (6.0 * etaprime.powi(3) * nf.powi(3)),
                    m4 / (2.0 * etaprime.powi(3) * nf),
                ),
            }
        };
        let n1 = norm1.total() + tail1;
        Ok(FourierNorms {
            norm1: n1,
            norm21: n1 + second.total() + tail2,
            cutoff,
            tail1,
            tail2,
        })
    }

    /// f″(x) for line kinds, from closed forms in ψ′ and ψ″.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        let v = match self.params()? {
            Params::Psi => psi_jet(x)[2],
            Params::PsiEta { eta } => psi_jet(x / eta)[2] / eta.powi(3),
            Params::GYEta { y, eta } => (d1((x + y) / eta) - d1((x - y) / eta)) / (eta * eta),
            Params::HYEta { y, eta } => {
                (2.0 * d1(x / eta) - d1((x - y) / eta) - d1((x + y) / eta)) / (eta * eta)
            }
            Params::FMajorantLen { y, eta } => {
                let s = 2.0 * eta;
                (psi_jet((x - y) / s)[2] + psi_jet((x + y) / s)[2]) / (s * s)
            }
            Params::GLambda { t, eta, lambda } => {
                tilted_branch_d2(x, t, eta, lambda) + tilted_branch_d2(-x, t, eta, lambda)
            }
            Params::HLambda { t, eta, lambda } => {
                tilted_branch_d2(x, t, eta, lambda) - tilted_branch_d2(-x, t, eta, lambda)
            }
            Params::IndicatorLen { .. } => 0.0,
            Params::FMajorantHol { .. } | Params::FIEtaprime { .. } | Params::IndicatorHol { .. } => {
                return Err(Error::UnsupportedKind(self.kind.name()))
            }
        };
        Ok(v * self.scale)
    }
}

/// Truncated Fourier norms of a periodic test function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierNorms {
    pub norm1: f64,
    pub norm21: f64,
    pub cutoff: u64,
    pub tail1: f64,
    pub tail2: f64,
}

fn d1(x: f64) -> f64 {
    psi_jet(x)[1]
}

/// The line frequency ξ whose transform gives the circle coefficient at `n`
/// for a 2π-periodized function: f̂_circle(n) = F̂(n/2π).
pub fn circle_frequency(n: i64) -> Complex64 {
    Complex64::new(n as f64 / TAU, 0.0)
}

fn is_full_circle(lo: f64, hi: f64) -> bool {
    (hi - lo - TAU).abs() <= 1e-12
}

/// ∫_a^b e^{−2πixξ}dx = (b − a)e^{−πi(a+b)ξ}·sin(w)/w with w = π(b − a)ξ.
pub fn interval_hat(a: f64, b: f64, xi: Complex64) -> Complex64 {
    let w = xi * (PI * (b - a));
    let phase = (xi * Complex64::new(0.0, -PI * (a + b))).exp();
    phase * sinc(w) * (b - a)
}

fn sinc(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let w2 = w * w;
        Complex64::new(1.0, 0.0) - w2 / 6.0 + w2 * w2 / 120.0 - w2 * w2 * w2 / 5040.0
    } else {
        w.sin() / w
    }
}

fn tilted_branch(x: f64, t: f64, eta: f64, lambda: f64) -> f64 {
    psi_tilted_mass(lambda * eta, (x - t) / eta, (x + eta) / eta)
}

fn tilted_branch_d2(x: f64, t: f64, eta: f64, lambda: f64) -> f64 {
    let mu = lambda * eta;
    let edge = |u: f64| {
        let j = psi_jet(u);
        (j[1] + mu * j[0]) * (mu * u).exp()
    };
    (edge((x + eta) / eta) - edge((x - t) / eta)) / (eta * eta)
}

fn eval_params(p: Params, x: f64) -> f64 {
    match p {
        Params::Psi => psi(x),
        Params::PsiEta { eta } => psi(x / eta) / eta,
        Params::GYEta { y, eta } => psi_cdf((x + y) / eta) - psi_cdf((x - y) / eta),
        Params::HYEta { y, eta } => {
            2.0 * psi_cdf(x / eta) - psi_cdf((x - y) / eta) - psi_cdf((x + y) / eta)
        }
        Params::FMajorantLen { y, eta } => psi((x - y) / (2.0 * eta)) + psi((x + y) / (2.0 * eta)),
        Params::GLambda { t, eta, lambda } => {
            tilted_branch(x, t, eta, lambda) + tilted_branch(-x, t, eta, lambda)
        }
        Params::HLambda { t, eta, lambda } => {
            tilted_branch(x, t, eta, lambda) - tilted_branch(-x, t, eta, lambda)
        }
        Params::IndicatorLen { y } => {
            if x.abs() <= y {
                1.0
            } else {
                0.0
            }
        }
        Params::FMajorantHol { theta0, etaprime } => {
            let s = 2.0 * etaprime;
            periodic_images(x, theta0, s).map(|u| psi(u / s)).sum::<f64>()
                + periodic_images(x, -theta0, s).map(|u| psi(u / s)).sum::<f64>()
        }
        Params::FIEtaprime { lo, hi, etaprime } => {
            if is_full_circle(lo, hi) {
                return 1.0;
            }
            // Σ_n [Φ((x + 2nπ − lo)/η′) − Φ((x + 2nπ − hi)/η′)]
            let first = ((lo - etaprime - x) / TAU).floor() as i64 - 1;
            let last = ((hi + etaprime - x) / TAU).ceil() as i64 + 1;
            (first..=last)
                .map(|n| {
                    let z = x + n as f64 * TAU;
                    psi_cdf((z - lo) / etaprime) - psi_cdf((z - hi) / etaprime)
                })
                .sum()
        }
        Params::IndicatorHol { lo, hi } => {
            if is_full_circle(lo, hi) || in_closed_arc(x, lo, hi) {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Values x + 2nπ − center with |x + 2nπ − center| < radius.
fn periodic_images(x: f64, center: f64, radius: f64) -> impl Iterator<Item = f64> {
    let base = x - center;
    let first = ((-radius - base) / TAU).floor() as i64;
    let last = ((radius - base) / TAU).ceil() as i64;
    (first..=last)
        .map(move |n| base + n as f64 * TAU)
        .filter(move |u| u.abs() < radius)
}

/// Whether θ lies in the closed arc from `lo` to `hi` (counter-clockwise),
/// with 1e−12 slack at the endpoints.
pub fn in_closed_arc(theta: f64, lo: f64, hi: f64) -> bool {
    let width = hi - lo;
    if width >= TAU - 1e-12 {
        return true;
    }
    let offset = (theta - lo).rem_euclid(TAU);
    offset <= width + 1e-12 || offset >= TAU - 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_complex, integrate_real};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        assert!(CutoffDescriptor::g_y_eta(4.0, 0.0).is_err());
        assert!(CutoffDescriptor::g_lambda(1.0, 0.5, 1.5).is_err());
        assert!(CutoffDescriptor::f_i_etaprime(0.0, 7.0, 0.1).is_err());
        assert!(CutoffDescriptor::f_i_etaprime(0.0, 1.0, 7.0).is_err());
        let mut d = CutoffDescriptor::g_y_eta(4.0, 0.5).unwrap();
        d.eta = None;
        assert!(matches!(d.eval(0.0), Err(Error::InvalidDescriptor(_))));
        assert_eq!("g_lambda".parse::<CutoffKind>().unwrap(), CutoffKind::GLambda);
    }

    #[test]
    fn g_and_h_examples() {
        let g = CutoffDescriptor::g_y_eta(4.0, 0.5).unwrap();
        assert_eq!(g.eval(0.0).unwrap(), 1.0);
        assert!((g.eval(4.0).unwrap() - 0.5).abs() < 1e-15);
        let h = CutoffDescriptor::h_y_eta(4.0, 0.5).unwrap();
        assert_eq!(h.eval(0.0).unwrap(), 0.0);
        assert_eq!(g.fourier(c(0.0, 0.0)).unwrap(), c(8.0, 0.0));
        assert_eq!(h.fourier(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn g_fourier_frozen_value() {
        // Frozen from an independent 30-digit evaluation of the convolution
        // integral ∫ g(x) e^{−2πi·0.3x} dx.
        let g = CutoffDescriptor::g_y_eta(4.0, 0.5).unwrap();
        let v = g.fourier(c(0.3, 0.0)).unwrap();
        assert!((v.re - 0.939_974_940_705_656).abs() < 1e-12, "{v}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn h_fourier_sign() {
        // ĥ(−t/2π) = +4i ψ̂(−ηt/2π) sin²(ty/2)/t
        let (y, eta, t) = (2.0, 0.3, 1.7);
        let h = CutoffDescriptor::h_y_eta(y, eta).unwrap();
        let v = h.fourier(c(-t / TAU, 0.0)).unwrap();
        let expect = c(0.0, 4.0) * psi_hat(c(-eta * t / TAU, 0.0)) * ((t * y / 2.0).sin().powi(2) / t);
        assert!((v - expect).norm() < 1e-13);
        let direct = integrate_complex(
            |x| c(0.0, t * x).exp() * h.eval(x).unwrap(),
            -y - eta,
            y + eta,
        );
        assert!((v - direct).norm() < 1e-9);
    }

    #[test]
    fn interval_hat_small_and_large() {
        let v = interval_hat(-1.0, 2.0, c(1e-9, 0.0));
        assert!((v - c(3.0, 0.0)).norm() < 1e-8);
        let xi = c(0.37, 0.2);
        let direct = integrate_complex(|x| (c(0.0, -TAU * x) * xi).exp(), -1.0, 2.0);
        assert!((interval_hat(-1.0, 2.0, xi) - direct).norm() < 1e-13);
    }

    #[test]
    fn periodic_coeff_examples() {
        let f = CutoffDescriptor::f_i_etaprime(0.0, PI, 0.2).unwrap();
        assert_eq!(f.periodic_coeff(0).unwrap(), c(PI, 0.0));
        let full = CutoffDescriptor::f_i_etaprime(0.0, TAU, 0.7).unwrap();
        assert_eq!(full.periodic_coeff(3).unwrap(), c(0.0, 0.0));
        // Frozen from direct quadrature of f over one period.
        let v = f.periodic_coeff(1).unwrap();
        assert!((v - c(0.0, -1.993_682_514_693_23)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn periodic_coeff_matches_quadrature() {
        for d in [
            CutoffDescriptor::f_i_etaprime(-1.0, 2.5, 0.4).unwrap(),
            CutoffDescriptor::f_majorant_hol(1.1, 0.3).unwrap(),
            CutoffDescriptor::f_majorant_hol(0.2, 2.0).unwrap(),
        ] {
            for n in [-3i64, 0, 1, 5] {
                let direct = integrate_complex(
                    |x| c(0.0, -(n as f64) * x).exp() * d.eval(x).unwrap(),
                    0.0,
                    TAU,
                );
                let v = d.periodic_coeff(n).unwrap();
                assert!((v - direct).norm() < 1e-9, "{:?} {n}: {v} vs {direct}", d.kind);
            }
        }
    }

    #[test]
    fn full_circle_norms() {
        let f = CutoffDescriptor::f_i_etaprime(0.0, TAU, 0.5).unwrap();
        let n = f.f_norms(None).unwrap();
        assert!((n.norm1 - TAU).abs() < 1e-15 && (n.norm21 - TAU).abs() < 1e-15);
        assert_eq!(f.eval(1.234).unwrap(), 1.0);
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let ds = [
            CutoffDescriptor::psi(),
            CutoffDescriptor::psi_eta(0.7).unwrap(),
            CutoffDescriptor::g_y_eta(1.0, 0.8).unwrap(),
            CutoffDescriptor::h_y_eta(1.0, 0.8).unwrap(),
            CutoffDescriptor::f_majorant_len(0.5, 0.4).unwrap(),
            CutoffDescriptor::g_lambda(0.6, 0.5, 0.7).unwrap(),
            CutoffDescriptor::h_lambda(0.6, 0.5, 0.7).unwrap(),
        ];
        for d in &ds {
            for &x in &[0.0, 0.31, -0.45] {
                let h = 1e-3;
                let f = |u: f64| d.eval(u).unwrap();
                let fd = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
                    / (12.0 * h * h);
                let v = d.second_derivative(x).unwrap();
                assert!((v - fd).abs() < 1e-4 * (1.0 + v.abs()), "{:?} at {x}: {v} vs {fd}", d.kind);
            }
        }
    }

    #[test]
    fn tilted_value_at_zero() {
        // g^λ(0) = 2ψ̂(iλη/2π) when t ≥ η, and (g^λ)″(0) = 0.
        let g = CutoffDescriptor::g_lambda(2.0, 0.5, 0.8).unwrap();
        let expect = 2.0 * psi_hat(c(0.0, 0.8 * 0.5 / TAU)).re;
        assert!((g.eval(0.0).unwrap() - expect).abs() < 1e-13);
        assert_eq!(g.second_derivative(0.0).unwrap(), 0.0);
        let direct = integrate_real(|x| g.eval(x).unwrap(), -2.5, 2.5);
        let hat0 = g.fourier(c(0.0, 0.0)).unwrap();
        assert!((hat0.re - 2.5 * expect).abs() < 1e-12);
        assert!((hat0.re - direct).abs() < 1e-9);
    }

    #[test]
    fn closed_arc_membership() {
        assert!(in_closed_arc(0.1, -0.2, 0.3));
        assert!(in_closed_arc(PI, 3.0, 3.5));
        assert!(in_closed_arc(-PI + 0.1, 3.0, 3.5));
        assert!(!in_closed_arc(0.0, 3.0, 3.5));
        assert!(in_closed_arc(PI / 4.0, PI / 4.0, 3.0 * PI / 4.0));
    }
}
