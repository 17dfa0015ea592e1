//! Outcome laws with closed-form CDF and quantile functions, and the maps
//! that turn a control law into a treatment law.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum Law {
    Normal { mean: f64, sd: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    Uniform { low: f64, high: f64 },
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// `erfc_inv` alone is good to about 1e-11, so polish with one Newton step.
fn std_normal_quantile(p: f64) -> f64 {
    let z = -SQRT_2 * erfc_inv(2.0 * p);
    if !z.is_finite() {
        return z;
    }
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 0.0 {
        z - (std_normal_cdf(z) - p) / pdf
    } else {
        z
    }
}

impl Law {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Law::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            Law::LogNormal { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
            Law::Exponential { rate } => rate.is_finite() && rate > 0.0,
            Law::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("invalid parameters for {self}")))
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Law::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
            Law::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_cdf((x.ln() - mu) / sigma)
                }
            }
            Law::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Law::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
        }
    }

    /// Quantile function on (0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            Law::Normal { mean, sd } => mean + sd * std_normal_quantile(p),
            Law::LogNormal { mu, sigma } => (mu + sigma * std_normal_quantile(p)).exp(),
            Law::Exponential { rate } => -(-p).ln_1p() / rate,
            Law::Uniform { low, high } => low + p * (high - low),
        }
    }

    /// Closure of the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Law::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Law::LogNormal { .. } | Law::Exponential { .. } => (0.0, f64::INFINITY),
            Law::Uniform { low, high } => (low, high),
        }
    }

    /// Heavy right tail (used to label scenarios).
    pub fn is_heavy_tailed(&self) -> bool {
        matches!(self, Law::LogNormal { .. } | Law::Exponential { .. })
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::Normal { mean, sd } => write!(f, "normal({mean}, {sd})"),
            Law::LogNormal { mu, sigma } => write!(f, "lognormal({mu}, {sigma})"),
            Law::Exponential { rate } => write!(f, "exponential({rate})"),
            Law::Uniform { low, high } => write!(f, "uniform({low}, {high})"),
        }
    }
}

/// Splits `name(args)` into the lowercased name and the raw argument text.
fn split_call(s: &str) -> Result<(String, &str)> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| Error::config(format!("expected `name(...)`, got `{s}`")))?;
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::config(format!("missing `)` in `{s}`")))?;
    Ok((s[..open].trim().to_ascii_lowercase(), inner))
}

fn numbers(args: &str, want: usize, what: &str) -> Result<Vec<f64>> {
    let v = args
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::config(format!("bad number `{}` in {what}", a.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.len() != want {
        return Err(Error::config(format!(
            "{what} takes {want} argument(s), got {}",
            v.len()
        )));
    }
    Ok(v)
}

/// Parses `normal(mean, sd)`, `lognormal(mu, sigma)`, `exponential(rate)`
/// or `uniform(low, high)`.
impl FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        let law = match name.as_str() {
            "normal" => {
                let a = numbers(args, 2, "normal")?;
                Law::Normal { mean: a[0], sd: a[1] }
            }
            "lognormal" => {
                let a = numbers(args, 2, "lognormal")?;
                Law::LogNormal { mu: a[0], sigma: a[1] }
            }
            "exponential" => Law::Exponential {
                rate: numbers(args, 1, "exponential")?[0],
            },
            "uniform" => {
                let a = numbers(args, 2, "uniform")?;
                Law::Uniform { low: a[0], high: a[1] }
            }
            other => return Err(Error::config(format!("unknown law `{other}`"))),
        };
        law.validate()?;
        Ok(law)
    }
}

/// How the treatment law relates to the control law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "lowercase")]
pub enum TreatmentMap {
    /// `y = x + c`
    Shift { c: f64 },
    /// `y = a x`, `a > 0`
    Scale { a: f64 },
    /// `y = slope x + intercept`, `slope > 0`
    Affine { slope: f64, intercept: f64 },
    /// `y = coef x^exponent` on a nonnegative support, both positive
    Power { coef: f64, exponent: f64 },
    /// Treatment drawn from its own law.
    Independent { law: Law },
}

impl TreatmentMap {
    /// The monotone map `m`, if this is one.
    pub fn monotone(&self) -> Option<impl Fn(f64) -> f64 + Copy> {
        let m = *self;
        let f = move |x: f64| match m {
            TreatmentMap::Shift { c } => x + c,
            TreatmentMap::Scale { a } => a * x,
            TreatmentMap::Affine { slope, intercept } => slope * x + intercept,
            TreatmentMap::Power { coef, exponent } => coef * x.powf(exponent),
            TreatmentMap::Independent { .. } => unreachable!(),
        };
        (!matches!(m, TreatmentMap::Independent { .. })).then_some(f)
    }

    /// Checks the map is nondecreasing on `control`'s support.
    pub fn validate_for(&self, control: &Law) -> Result<()> {
        let ok = match *self {
            TreatmentMap::Shift { c } => c.is_finite(),
            TreatmentMap::Scale { a } => a.is_finite() && a > 0.0,
            TreatmentMap::Affine { slope, intercept } => {
                slope.is_finite() && slope > 0.0 && intercept.is_finite()
            }
            TreatmentMap::Power { coef, exponent } => {
                if control.support().0 < 0.0 {
                    return Err(Error::Unsupported(format!(
                        "{self} needs a nonnegative control support, {control} has none"
                    )));
                }
                coef.is_finite() && coef > 0.0 && exponent.is_finite() && exponent > 0.0
            }
            TreatmentMap::Independent { law } => return law.validate(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("invalid treatment map {self}")))
        }
    }

    /// Treatment quantile function `G^-1`.
    pub fn treatment_quantile(&self, control: &Law, p: f64) -> f64 {
        match self {
            TreatmentMap::Independent { law } => law.quantile(p),
            _ => (self.monotone().expect("monotone"))(control.quantile(p)),
        }
    }
}

impl fmt::Display for TreatmentMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreatmentMap::Shift { c } => write!(f, "shift({c})"),
            TreatmentMap::Scale { a } => write!(f, "scale({a})"),
            TreatmentMap::Affine { slope, intercept } => write!(f, "affine({slope}, {intercept})"),
            TreatmentMap::Power { coef, exponent } => write!(f, "power({coef}, {exponent})"),
            TreatmentMap::Independent { law } => write!(f, "independent({law})"),
        }
    }
}

/// Parses `shift(c)`, `scale(a)`, `affine(slope, intercept)`,
/// `power(coef, exponent)` or `independent(<law>)`.
impl FromStr for TreatmentMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        Ok(match name.as_str() {
            "shift" => TreatmentMap::Shift {
                c: numbers(args, 1, "shift")?[0],
            },
            "scale" => TreatmentMap::Scale {
                a: numbers(args, 1, "scale")?[0],
            },
            "affine" => {
                let a = numbers(args, 2, "affine")?;
                TreatmentMap::Affine {
                    slope: a[0],
                    intercept: a[1],
                }
            }
            "power" => {
                let a = numbers(args, 2, "power")?;
                TreatmentMap::Power {
                    coef: a[0],
                    exponent: a[1],
                }
            }
            "independent" => TreatmentMap::Independent { law: args.parse()? },
            other => return Err(Error::config(format!("unknown treatment map `{other}`"))),
        })
    }
}
