//! Problem parameters `(n, gamma, lambda, kappa)` and the constants derived
//! from them.
//!
//! Every derived constant is a closed-form expression in the four inputs and
//! is evaluated once, in double precision, by [`derive`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gas description: spatial dimension and adiabatic index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub n: u32,
    pub gamma: f64,
}

/// Similarity exponents of the ansatz `x = t / r^lambda`, `rho = r^kappa R(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityParams {
    pub lambda: f64,
    pub kappa: f64,
}

/// The full parameter quadruple. Serializes to the flat JSON schema
/// `{"n": int, "gamma": float, "lambda": float, "kappa": float}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    pub gas: GasParams,
    pub sim: SimilarityParams,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    n: u32,
    gamma: f64,
    lambda: f64,
    kappa: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.n, raw.gamma, raw.lambda, raw.kappa)
    }
}

impl From<Params> for RawParams {
    fn from(p: Params) -> Self {
        RawParams {
            n: p.gas.n,
            gamma: p.gas.gamma,
            lambda: p.sim.lambda,
            kappa: p.sim.kappa,
        }
    }
}

impl Params {
    /// Validates the structural requirements only: `n` in {2, 3}, `gamma > 1`,
    /// finite exponents and `kappa + n != 0`. `lambda > 1` is left to
    /// condition (A) so that boundary cases can still be reported on.
    pub fn new(n: u32, gamma: f64, lambda: f64, kappa: f64) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::InvalidParameter(format!("n must be 2 or 3, got {n}")));
        }
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {gamma}")));
        }
        if !lambda.is_finite() || !kappa.is_finite() {
            return Err(Error::InvalidParameter("lambda and kappa must be finite".into()));
        }
        if kappa + n as f64 == 0.0 {
            return Err(Error::InvalidParameter("kappa + n must be nonzero".into()));
        }
        Ok(Params {
            gas: GasParams { n, gamma },
            sim: SimilarityParams { lambda, kappa },
        })
    }

    /// Builds parameters from decimal or rational strings such as `"5/3"`.
    pub fn from_strs(n: u32, gamma: &str, lambda: &str, kappa: &str) -> Result<Self> {
        Params::new(n, parse_number(gamma)?, parse_number(lambda)?, parse_number(kappa)?)
    }

    pub fn n(&self) -> f64 {
        self.gas.n as f64
    }

    pub fn gamma(&self) -> f64 {
        self.gas.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.sim.lambda
    }

    pub fn kappa(&self) -> f64 {
        self.sim.kappa
    }

    /// Same gas and `lambda`, different `kappa`.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Params::new(self.gas.n, self.gas.gamma, self.sim.lambda, kappa)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} gamma={} lambda={} kappa={}",
            self.gas.n, self.gas.gamma, self.sim.lambda, self.sim.kappa
        )
    }
}

/// Parses a decimal literal or a ratio `p/q` of two decimal literals.
///
/// Each literal is converted exactly once, so `"5/3"` yields the correctly
/// rounded quotient of the two exactly representable integers.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let lit = |t: &str| -> Result<f64> {
        let v: f64 = t.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(s.to_string()))
        }
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = lit(den)?;
            if d == 0.0 {
                return Err(Error::Parse(s.to_string()));
            }
            Ok(lit(num)? / d)
        }
        None => lit(s),
    }
}

/// The six parameter sets for which all ten admissibility conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    Case6,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Case1,
        Preset::Case2,
        Preset::Case3,
        Preset::Case4,
        Preset::Case5,
        Preset::Case6,
    ];

    /// `(n, gamma, lambda, kappa)` as printed.
    pub fn literals(self) -> (u32, &'static str, &'static str, &'static str) {
        match self {
            Preset::Case1 => (3, "5/3", "1.25", "-0.01"),
            Preset::Case2 => (3, "7/5", "1.16", "-0.01"),
            Preset::Case3 => (3, "3", "1.6", "0.9"),
            Preset::Case4 => (2, "5/3", "1.09", "-0.01"),
            Preset::Case5 => (2, "7/5", "1.06", "-0.01"),
            Preset::Case6 => (2, "3", "1.28", "-0.01"),
        }
    }

    pub fn params(self) -> Params {
        let (n, g, l, k) = self.literals();
        Params::from_strs(n, g, l, k).expect("preset literals are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
            Preset::Case3 => "case3",
            Preset::Case4 => "case4",
            Preset::Case5 => "case5",
            Preset::Case6 => "case6",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Constants derived from `(n, gamma, lambda, kappa)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `lambda - 1`
    pub mu: f64,
    /// `((lambda - 1) + kappa (gamma - 1) / 2) / gamma`
    pub alpha: f64,
    /// Exponent of `R |1 + V|` in the adiabatic integral.
    pub q: f64,
    /// Slope of the admissible trajectory at P2 in the `(W, Z)` plane.
    pub sigma: f64,
    /// The isentropic density exponent.
    pub kappa_bar: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Vertical asymptote of the G-nullcline.
    pub v_star: f64,
    pub w_star: f64,
    /// `n - 1`
    pub m: f64,
    /// Positive factor in the closed form of the Wronskian at P6.
    pub big_k: f64,
    /// Exponent of a vertical approach `Z ~ W^a` to P2.
    pub a_vert: f64,
    /// Pressure exponent along a vertical approach (identically zero).
    pub b_vert: f64,
}

/// Evaluates every derived constant by its closed form.
pub fn derive(p: &Params) -> Result<DerivedConstants> {
    let (n, g, l, k) = (p.n(), p.gamma(), p.lambda(), p.kappa());
    if k + n == 0.0 {
        return Err(Error::InvalidParameter("kappa + n must be nonzero".into()));
    }
    let mu = l - 1.0;
    let m = n - 1.0;
    let alpha = (mu + 0.5 * k * (g - 1.0)) / g;
    let q = (k * (g - 1.0) + 2.0 * mu) / (k + n);
    let sigma = g * mu / (k + n);
    let kappa_bar = -2.0 * mu / (g - 1.0);
    let k1 = 1.0 + m * (g - 1.0) / 2.0;
    let k2 = (m * (g - 1.0) + (g - 3.0) * mu) / 2.0;
    let k3 = (g - 1.0) * mu / 2.0;
    let v_star = (k - 2.0 * mu) / (n * g);
    let w_star = 1.0 + v_star;
    let big_k = m * (n * (g - 1.0) + 2.0);
    let a_vert = (2.0 * mu + k * (g - 1.0)) / (2.0 * mu - k - n * g);
    let b_vert = (a_vert * g + (1.0 - a_vert) * q) / (g - 1.0 - q);
    Ok(DerivedConstants {
        mu,
        alpha,
        q,
        sigma,
        kappa_bar,
        k1,
        k2,
        k3,
        v_star,
        w_star,
        m,
        big_k,
        a_vert,
        b_vert,
    })
}

impl DerivedConstants {
    /// Magnitude scale of the terms combined in `b_vert`, for ulp-relative
    /// comparisons against zero.
    pub fn b_vert_scale(&self, gamma: f64) -> f64 {
        (self.a_vert.abs() * gamma + (1.0 - self.a_vert).abs() * self.q.abs())
            / (gamma - 1.0 - self.q).abs()
    }

    /// `phi(W) = 2 k1 W^3 + (3 alpha k1 - k2) W^2 - 2 alpha k2 W + alpha k3`;
    /// `f'(W) > 0` iff `phi(W) > 0`.
    pub fn phi(&self, w: f64) -> f64 {
        let (a, k1, k2, k3) = (self.alpha, self.k1, self.k2, self.k3);
        ((2.0 * k1 * w + (3.0 * a * k1 - k2)) * w - 2.0 * a * k2) * w + a * k3
    }

    /// `psi(W) = 2 W^3 + (mu - 1 - 3 W*) W^2 - 2 (mu - 1) W* W + mu W*`;
    /// `g'(W) > 0` iff `psi(W) > 0`.
    pub fn psi(&self, w: f64) -> f64 {
        let (mu, ws) = (self.mu, self.w_star);
        ((2.0 * w + (mu - 1.0 - 3.0 * ws)) * w - 2.0 * (mu - 1.0) * ws) * w + mu * ws
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case1() -> (Params, DerivedConstants) {
        let p = Preset::Case1.params();
        (p, derive(&p).unwrap())
    }

    #[test]
    fn case1_closed_forms() {
        let (_, d) = case1();
        assert!((d.mu - 0.25).abs() < 1e-15);
        assert!((d.alpha - 0.148).abs() < 1e-15);
        assert!((d.sigma - 0.139_353_400_222_965_44).abs() < 1e-14);
        assert!((d.q - 0.164_994_425_863_991_07).abs() < 1e-14);
        assert!((d.kappa_bar + 0.75).abs() < 1e-15);
        assert!((d.v_star + 0.102).abs() < 1e-15);
        assert!((d.w_star - 0.898).abs() < 1e-15);
        assert!((d.k1 - 5.0 / 3.0).abs() < 1e-15);
        assert!((d.k2 - 0.5).abs() < 1e-15);
        assert!((d.k3 - 1.0 / 12.0).abs() < 1e-15);
        assert!((d.big_k - 8.0).abs() < 1e-15);
    }

    #[test]
    fn k_sum_identity() {
        let (p, d) = case1();
        assert!((d.k1 - d.k2 + d.k3 - p.lambda()).abs() < 8.0 * f64::EPSILON * 2.0);
    }

    #[test]
    fn phi_minimum_matches_closed_form() {
        let (_, d) = case1();
        let w_plus = d.k2 / (3.0 * d.k1);
        let closed = -d.k2.powi(3) / (27.0 * d.k1 * d.k1) - d.alpha * d.k2 * d.k2 / (3.0 * d.k1)
            + d.alpha * d.k3;
        assert!((d.phi(w_plus) - closed).abs() < 1e-15);
    }

    #[test]
    fn psi_at_w_star_matches_factored_form() {
        let (_, d) = case1();
        let ws = d.w_star;
        let factored = ws * (-ws * ws + (1.0 - d.mu) * ws + d.mu);
        assert!((d.psi(ws) - factored).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Params::new(4, 1.4, 1.2, 0.0).is_err());
        assert!(Params::new(3, 1.0, 1.2, 0.0).is_err());
        assert!(Params::new(3, 1.4, 1.2, -3.0).is_err());
        assert!(Params::new(3, 1.4, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_number("5/3").unwrap(), 5.0 / 3.0);
        assert_eq!(parse_number(" -0.01 ").unwrap(), -0.01);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }

    #[test]
    fn presets_round_trip_by_name() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("case7".parse::<Preset>().is_err());
    }

    #[test]
    fn json_schema_is_flat() {
        let p = Preset::Case4.params();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"n":2,"gamma":1.6666666666666667,"lambda":1.09,"kappa":-0.01}"#
        );
        let back: Params = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Params>(r#"{"n":5,"gamma":1.4,"lambda":1.1,"kappa":0}"#)
            .is_err());
    }
}
