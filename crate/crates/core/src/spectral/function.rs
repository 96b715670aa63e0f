use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strictly increasing C¹ map of `[0, ∞)` drawn from a closed catalog, so
/// experiment configs stay serializable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `t ↦ a·t + c`, `a > 0`.
    Affine { a: f64, c: f64 },
    /// `t ↦ t^p`, `p > 0`.
    Power { p: f64 },
    /// `t ↦ (e^{s·t} − 1)/s`, `s > 0`.
    ExpShift { s: f64 },
    /// `t ↦ ln(1 + s·t)/s`, `s > 0`; the inverse of `exp_shift`.
    LogShift { s: f64 },
    /// `steps` applied left to right.
    Compose { steps: Vec<FunctionSpec> },
}

impl FunctionSpec {
    pub fn affine(a: f64, c: f64) -> Self {
        FunctionSpec::Affine { a, c }
    }

    pub fn power(p: f64) -> Self {
        FunctionSpec::Power { p }
    }

    pub fn exp_shift(s: f64) -> Self {
        FunctionSpec::ExpShift { s }
    }

    pub fn log_shift(s: f64) -> Self {
        FunctionSpec::LogShift { s }
    }

    /// `self` followed by `next`.
    pub fn then(self, next: FunctionSpec) -> Self {
        let mut steps = match self {
            FunctionSpec::Compose { steps } => steps,
            other => vec![other],
        };
        match next {
            FunctionSpec::Compose { steps: more } => steps.extend(more),
            other => steps.push(other),
        }
        FunctionSpec::Compose { steps }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            FunctionSpec::Affine { a, c } => {
                positive("affine slope", *a)?;
                if !c.is_finite() {
                    return Err(Error::invalid("affine offset must be finite"));
                }
                Ok(())
            }
            FunctionSpec::Power { p } => positive("power exponent", *p),
            FunctionSpec::ExpShift { s } => positive("exp_shift rate", *s),
            FunctionSpec::LogShift { s } => positive("log_shift rate", *s),
            FunctionSpec::Compose { steps } => steps.iter().try_for_each(|s| s.validate()),
        }
    }

    /// True when `f(0) = 0`.
    pub fn fixes_origin(&self) -> bool {
        match self {
            FunctionSpec::Affine { c, .. } => *c == 0.0,
            FunctionSpec::Compose { steps } => steps.iter().all(|s| s.fixes_origin()),
            _ => true,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Affine { a, c } => a * t + c,
            FunctionSpec::Power { p } => {
                if t <= 0.0 {
                    0.0
                } else {
                    t.powf(*p)
                }
            }
            FunctionSpec::ExpShift { s } => (s * t).exp_m1() / s,
            FunctionSpec::LogShift { s } => (s * t).ln_1p() / s,
            FunctionSpec::Compose { steps } => steps.iter().fold(t, |x, f| f.eval(x)),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Affine { a, .. } => *a,
            FunctionSpec::Power { p } => {
                if t > 0.0 {
                    p * t.powf(p - 1.0)
                } else if *p > 1.0 {
                    0.0
                } else if *p == 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            FunctionSpec::ExpShift { s } => (s * t).exp(),
            FunctionSpec::LogShift { s } => 1.0 / (1.0 + s * t),
            FunctionSpec::Compose { steps } => {
                let mut x = t;
                let mut d = 1.0;
                for f in steps {
                    d *= f.derivative(x);
                    x = f.eval(x);
                }
                d
            }
        }
    }

    /// The catalog inverse.
    pub fn inverse(&self) -> FunctionSpec {
        match self {
            FunctionSpec::Affine { a, c } => FunctionSpec::Affine { a: 1.0 / a, c: -c / a },
            FunctionSpec::Power { p } => FunctionSpec::Power { p: 1.0 / p },
            FunctionSpec::ExpShift { s } => FunctionSpec::LogShift { s: *s },
            FunctionSpec::LogShift { s } => FunctionSpec::ExpShift { s: *s },
            FunctionSpec::Compose { steps } => FunctionSpec::Compose {
                steps: steps.iter().rev().map(|f| f.inverse()).collect(),
            },
        }
    }
}
