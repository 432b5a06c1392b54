//! Parsing of the `--g` / `--g-family` argument into decision functions.
//!
//! Grammar: `uniform` | `constant:P` | `power[:K]` | `linear[:D]` |
//! `hybrid[:K[:P]]`. Omitted parameters are filled in from the node count
//! (or, in experiment sweeps, from the estimated in-range density): the
//! power exponent defaults to n-1, the linear divisor to n, the hybrid
//! tail probability to 1/n.

use longhop::analytics::{MultiPassForm, OnePassForm};
use longhop::model::DecisionFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GSpec {
    Uniform,
    Constant(f64),
    Power(Option<f64>),
    Linear(Option<f64>),
    Hybrid {
        exponent: Option<f64>,
        tail: Option<f64>,
    },
}

impl GSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let parse_f64 = |v: &str| -> Result<f64, String> {
            v.parse::<f64>()
                .map_err(|_| format!("invalid number {v:?} in --g {s:?}"))
        };
        let spec = match (head, args.as_slice()) {
            ("uniform", []) => GSpec::Uniform,
            ("constant", [p]) => GSpec::Constant(parse_f64(p)?),
            ("power", []) => GSpec::Power(None),
            ("power", [k]) => GSpec::Power(Some(parse_f64(k)?)),
            ("linear", []) => GSpec::Linear(None),
            ("linear", [d]) => GSpec::Linear(Some(parse_f64(d)?)),
            ("hybrid", []) => GSpec::Hybrid {
                exponent: None,
                tail: None,
            },
            ("hybrid", [k]) => GSpec::Hybrid {
                exponent: Some(parse_f64(k)?),
                tail: None,
            },
            ("hybrid", [k, p]) => GSpec::Hybrid {
                exponent: Some(parse_f64(k)?),
                tail: Some(parse_f64(p)?),
            },
            _ => {
                return Err(format!(
                    "unknown decision function {s:?}; expected \
                     uniform | constant:P | power[:K] | linear[:D] | hybrid[:K[:P]]"
                ))
            }
        };
        Ok(spec)
    }

    /// Instantiate at node count `n`.
    pub fn resolve(&self, n: f64) -> Result<DecisionFunction, String> {
        self.build(n, false)
    }

    /// Instantiate at an estimated (possibly fractional, possibly < 1)
    /// density: derived exponents are clamped at 0 and derived
    /// probabilities at 1 so sparse cells stay well-defined.
    pub fn resolve_clamped(&self, density: f64) -> Result<DecisionFunction, String> {
        self.build(density, true)
    }

    fn build(&self, n: f64, clamp: bool) -> Result<DecisionFunction, String> {
        if !(n.is_finite() && n > 0.0) {
            return Err(format!("node count {n} must be positive"));
        }
        let exponent_default = if clamp { (n - 1.0).max(0.0) } else { n - 1.0 };
        let inverse_n = if clamp { (1.0 / n).min(1.0) } else { 1.0 / n };
        let err = |e: longhop::model::ModelError| e.to_string();
        match *self {
            GSpec::Uniform => DecisionFunction::constant(inverse_n).map_err(err),
            GSpec::Constant(p) => DecisionFunction::constant(p).map_err(err),
            GSpec::Power(k) => {
                DecisionFunction::power_law(k.unwrap_or(exponent_default)).map_err(err)
            }
            GSpec::Linear(d) => DecisionFunction::linear_scaled(d.unwrap_or(n)).map_err(err),
            GSpec::Hybrid { exponent, tail } => {
                let first = DecisionFunction::power_law(exponent.unwrap_or(exponent_default))
                    .map_err(err)?;
                let later = DecisionFunction::constant(tail.unwrap_or(inverse_n)).map_err(err)?;
                Ok(DecisionFunction::hybrid(first, later))
            }
        }
    }

    /// The one-pass closed form this spec instantiates at n, if any.
    pub fn one_pass_closed_form(&self, n: usize) -> Option<OnePassForm> {
        let nf = n as f64;
        match *self {
            GSpec::Uniform => Some(OnePassForm::UniformG),
            GSpec::Constant(p) if (p - 1.0 / nf).abs() < 1e-12 => Some(OnePassForm::UniformG),
            GSpec::Power(None) => Some(OnePassForm::PowerG),
            GSpec::Power(Some(k)) if (k - (nf - 1.0)).abs() < 1e-12 => Some(OnePassForm::PowerG),
            _ => None,
        }
    }

    /// The multi-pass closed form this spec instantiates at n, if any.
    /// Any constant tail probability in (0, 1) leaves the hybrid closed
    /// form unchanged (the stationary tail is uniform regardless).
    pub fn multi_pass_closed_form(&self, n: usize) -> Option<MultiPassForm> {
        let nf = n as f64;
        match *self {
            GSpec::Constant(p) if p > 0.0 && (p < 1.0 || n == 1) => Some(MultiPassForm::ConstantG),
            GSpec::Uniform => Some(MultiPassForm::ConstantG),
            GSpec::Hybrid { exponent, tail } => {
                let exponent_matches = match exponent {
                    None => true,
                    Some(k) => (k - (nf - 1.0)).abs() < 1e-12,
                };
                let tail_valid = match tail {
                    None => true,
                    Some(p) => p > 0.0 && (p < 1.0 || n == 1),
                };
                (exponent_matches && tail_valid).then_some(MultiPassForm::HybridG)
            }
            _ => None,
        }
    }
}
