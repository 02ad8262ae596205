//! Named mean families, their textual notation and constant dispatch.
//!
//! Notation:
//!
//! * `power:p=<real>`
//! * `gini:p=<real>,q=<real>`
//! * `qa:g=<log|exp|pow:<real>>`
//! * `devmean:f=<log|pow:<real>|gini:<real>,<real>>`, where `pow:p` is
//!   `(u^p - 1)/p` and `gini:p,q` is `(u^p - u^q)/(p - q)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hardy::{
    gini_constant, power_constant, qa_constant, solve_characteristic, ConstantMethod, HardyConstantResult,
    HardyError, LimitProbe, ROOT_XTOL,
};
use crate::homogenize::{h_generator, normalize_kernel, HomogenizeError};
use crate::means::{GeneratorFunction, MeanSpec, QuasideviationKernel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("cannot parse mean family '{spec}': {reason}")]
    Parse { spec: String, reason: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Homogenize(#[from] HomogenizeError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QaGenerator {
    Log,
    Exp,
    Pow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DevGenerator {
    Log,
    Pow(f64),
    Gini(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanFamily {
    Power(f64),
    Gini(f64, f64),
    QuasiArithmetic(QaGenerator),
    DevMean(DevGenerator),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Closed form for power and Gini means, root solving for deviation
    /// means, the `chi_f` limit for quasiarithmetic means.
    #[default]
    Auto,
    Closed,
    Root,
}

impl FromStr for MethodChoice {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "closed" => Ok(MethodChoice::Closed),
            "root" => Ok(MethodChoice::Root),
            _ => Err(FamilyError::Parse { spec: s.into(), reason: "expected auto, closed or root".into() }),
        }
    }
}

fn parse_real(spec: &str, text: &str) -> Result<f64, FamilyError> {
    let v: f64 = text.trim().parse().map_err(|_| FamilyError::Parse {
        spec: spec.into(),
        reason: format!("'{text}' is not a number"),
    })?;
    if v.is_nan() {
        return Err(FamilyError::Parse { spec: spec.into(), reason: "NaN parameter".into() });
    }
    Ok(v)
}

fn parse_pair(spec: &str, text: &str) -> Result<(f64, f64), FamilyError> {
    match text.split_once(',') {
        Some((a, b)) => Ok((parse_real(spec, a)?, parse_real(spec, b)?)),
        None => Err(FamilyError::Parse { spec: spec.into(), reason: format!("expected two numbers in '{text}'") }),
    }
}

/// Strips `key=` from `text`.
fn keyed<'a>(spec: &str, text: &'a str, key: &str) -> Result<&'a str, FamilyError> {
    text.strip_prefix(key).and_then(|t| t.strip_prefix('=')).ok_or_else(|| FamilyError::Parse {
        spec: spec.into(),
        reason: format!("expected '{key}=' in '{text}'"),
    })
}

impl FromStr for MeanFamily {
    type Err = FamilyError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let s = spec.trim();
        let (head, rest) = s.split_once(':').ok_or_else(|| FamilyError::Parse {
            spec: spec.into(),
            reason: "expected '<family>:<parameters>'".into(),
        })?;
        match head {
            "power" => Ok(MeanFamily::Power(parse_real(spec, keyed(spec, rest, "p")?)?)),
            "gini" => {
                let (p, q) = rest.split_once(',').ok_or_else(|| FamilyError::Parse {
                    spec: spec.into(),
                    reason: "expected 'p=<real>,q=<real>'".into(),
                })?;
                Ok(MeanFamily::Gini(
                    parse_real(spec, keyed(spec, p, "p")?)?,
                    parse_real(spec, keyed(spec, q, "q")?)?,
                ))
            }
            "qa" => {
                let g = keyed(spec, rest, "g")?;
                let gen = match g {
                    "log" => QaGenerator::Log,
                    "exp" => QaGenerator::Exp,
                    _ => match g.strip_prefix("pow:") {
                        Some(p) => QaGenerator::Pow(parse_real(spec, p)?),
                        None => {
                            return Err(FamilyError::Parse {
                                spec: spec.into(),
                                reason: format!("unknown generator '{g}' (log, exp, pow:<p>)"),
                            })
                        }
                    },
                };
                Ok(MeanFamily::QuasiArithmetic(gen))
            }
            "devmean" => {
                let f = keyed(spec, rest, "f")?;
                let gen = if f == "log" {
                    DevGenerator::Log
                } else if let Some(p) = f.strip_prefix("pow:") {
                    DevGenerator::Pow(parse_real(spec, p)?)
                } else if let Some(pq) = f.strip_prefix("gini:") {
                    let (p, q) = parse_pair(spec, pq)?;
                    DevGenerator::Gini(p, q)
                } else {
                    return Err(FamilyError::Parse {
                        spec: spec.into(),
                        reason: format!("unknown f '{f}' (log, pow:<p>, gini:<p>,<q>)"),
                    });
                };
                Ok(MeanFamily::DevMean(gen))
            }
            _ => Err(FamilyError::Parse {
                spec: spec.into(),
                reason: format!("unknown family '{head}' (power, gini, qa, devmean)"),
            }),
        }
    }
}

impl fmt::Display for MeanFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanFamily::Power(p) => write!(f, "power:p={p}"),
            MeanFamily::Gini(p, q) => write!(f, "gini:p={p},q={q}"),
            MeanFamily::QuasiArithmetic(QaGenerator::Log) => write!(f, "qa:g=log"),
            MeanFamily::QuasiArithmetic(QaGenerator::Exp) => write!(f, "qa:g=exp"),
            MeanFamily::QuasiArithmetic(QaGenerator::Pow(p)) => write!(f, "qa:g=pow:{p}"),
            MeanFamily::DevMean(DevGenerator::Log) => write!(f, "devmean:f=log"),
            MeanFamily::DevMean(DevGenerator::Pow(p)) => write!(f, "devmean:f=pow:{p}"),
            MeanFamily::DevMean(DevGenerator::Gini(p, q)) => write!(f, "devmean:f=gini:{p},{q}"),
        }
    }
}

impl QaGenerator {
    pub fn generator(self) -> GeneratorFunction {
        match self {
            QaGenerator::Log => GeneratorFunction::log(),
            QaGenerator::Exp => GeneratorFunction::exp(),
            QaGenerator::Pow(p) => GeneratorFunction::power(p),
        }
    }

    /// Limit of `chi_g` at `0+`, known in closed form for the named generators.
    fn chi_limit(self) -> f64 {
        match self {
            QaGenerator::Log => 0.0,
            QaGenerator::Exp => 1.0,
            QaGenerator::Pow(p) => p,
        }
    }
}

impl DevGenerator {
    pub fn generator(self) -> GeneratorFunction {
        match self {
            DevGenerator::Log => GeneratorFunction::log(),
            DevGenerator::Pow(p) => GeneratorFunction::power_deviation(p),
            DevGenerator::Gini(p, q) => GeneratorFunction::gini(p, q),
        }
    }
}

/// Whether the constant is finite, decided analytically for the named families.
enum Finiteness {
    Finite,
    Infinite,
}

fn gini_finiteness(p: f64, q: f64) -> Result<Finiteness, FamilyError> {
    let (hi, lo) = (p.max(q), p.min(q));
    if lo > 0.0 || hi < 0.0 {
        if hi >= 1.0 && lo >= 0.0 {
            return Ok(Finiteness::Infinite);
        }
        return Err(FamilyError::Unsupported(format!(
            "Gini constant needs min(p,q) <= 0 <= max(p,q), got ({p}, {q})"
        )));
    }
    Ok(if hi >= 1.0 { Finiteness::Infinite } else { Finiteness::Finite })
}

fn power_finiteness(p: f64) -> Finiteness {
    if p >= 1.0 {
        Finiteness::Infinite
    } else {
        Finiteness::Finite
    }
}

fn root_method(eta: f64) -> ConstantMethod {
    if eta == 0.0 {
        ConstantMethod::RootSolvedIntegral
    } else {
        ConstantMethod::RootSolvedSeries
    }
}

/// Tolerance of the `h_E` ladder inside the quasiarithmetic root route.
pub const H_LADDER_TOL: f64 = 1e-13;

impl MeanFamily {
    pub fn mean_spec(&self) -> MeanSpec {
        match *self {
            MeanFamily::Power(p) => MeanSpec::Power(p),
            MeanFamily::Gini(p, q) => MeanSpec::Gini(p, q),
            MeanFamily::QuasiArithmetic(g) => MeanSpec::QuasiArithmetic(g.generator()),
            MeanFamily::DevMean(f) => MeanSpec::HomogeneousDeviation(f.generator()),
        }
    }

    /// Whether the closed-form route is the natural one under
    /// [`MethodChoice::Auto`].
    fn auto_is_closed(&self) -> bool {
        !matches!(self, MeanFamily::DevMean(_))
    }

    fn finiteness(&self) -> Result<Finiteness, FamilyError> {
        Ok(match *self {
            MeanFamily::Power(p) => power_finiteness(p),
            MeanFamily::Gini(p, q) => gini_finiteness(p, q)?,
            MeanFamily::QuasiArithmetic(g) => power_finiteness(g.chi_limit()),
            MeanFamily::DevMean(DevGenerator::Log) => Finiteness::Finite,
            MeanFamily::DevMean(DevGenerator::Pow(p)) => power_finiteness(p),
            MeanFamily::DevMean(DevGenerator::Gini(p, q)) => gini_finiteness(p, q)?,
        })
    }

    fn closed(&self, eta: f64) -> Result<HardyConstantResult, FamilyError> {
        if let Finiteness::Infinite = self.finiteness()? {
            return Ok(HardyConstantResult::infinite(ConstantMethod::ClosedForm, eta));
        }
        let value = match *self {
            MeanFamily::Power(p) | MeanFamily::DevMean(DevGenerator::Pow(p)) => power_constant(p, eta)?,
            MeanFamily::DevMean(DevGenerator::Log) => power_constant(0.0, eta)?,
            MeanFamily::Gini(p, q) | MeanFamily::DevMean(DevGenerator::Gini(p, q)) => gini_constant(p, q, eta)?,
            MeanFamily::QuasiArithmetic(g) => {
                return Ok(qa_constant(&g.generator(), eta, &LimitProbe::default())?);
            }
        };
        Ok(HardyConstantResult::closed(value, eta))
    }

    /// The concave generator whose characteristic equation gives the
    /// constant.
    fn characteristic_generator(&self) -> Result<GeneratorFunction, FamilyError> {
        Ok(match *self {
            MeanFamily::Power(p) => GeneratorFunction::power_deviation(p),
            MeanFamily::Gini(p, q) => GeneratorFunction::gini(p, q),
            MeanFamily::DevMean(f) => f.generator(),
            MeanFamily::QuasiArithmetic(g) => {
                // h_E of the normalized kernel g(x) - g(y)
                let kernel = normalize_kernel(&QuasideviationKernel::quasi_arithmetic(&g.generator()))?;
                h_generator(&kernel, H_LADDER_TOL).recip_integrable(g.chi_limit() < 1.0)
            }
        })
    }

    fn root(&self, eta: f64) -> Result<HardyConstantResult, FamilyError> {
        if let Finiteness::Infinite = self.finiteness()? {
            return Ok(HardyConstantResult::infinite(root_method(eta), eta));
        }
        let f = self.characteristic_generator()?;
        Ok(solve_characteristic(&f, eta, ROOT_XTOL)?)
    }

    /// The sharp Hardy constant of this family for weights with limit ratio
    /// `eta`.
    pub fn constant(&self, eta: f64, method: MethodChoice) -> Result<HardyConstantResult, FamilyError> {
        match method {
            MethodChoice::Closed => self.closed(eta),
            MethodChoice::Root => self.root(eta),
            MethodChoice::Auto if self.auto_is_closed() => self.closed(eta),
            MethodChoice::Auto => self.root(eta),
        }
    }
}

/// Free-function form of [`MeanFamily::constant`].
pub fn family_constant(
    family: &MeanFamily,
    eta: f64,
    method: MethodChoice,
) -> Result<HardyConstantResult, FamilyError> {
    family.constant(eta, method)
}
