use serde::{Deserialize, Serialize};

use super::table::MomentTable;
use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::word::Letter;

/// Second-order data of `X = ½(γz + γ̄z*)` and `Y = (1/2i)(γz − γ̄z*)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSplit {
    pub gamma: C64,
    /// `γ²τ(z²)`.
    pub rotated_square: C64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub tau_x2: f64,
    pub tau_y2: f64,
    pub tau_xy: f64,
}

impl GammaSplit {
    pub fn var_x(&self) -> f64 {
        self.tau_x2 - self.mean_x * self.mean_x
    }

    pub fn var_y(&self) -> f64 {
        self.tau_y2 - self.mean_y * self.mean_y
    }

    pub fn cov_xy(&self) -> f64 {
        self.tau_xy - self.mean_x * self.mean_y
    }
}

/// A unit `γ` with `γ²τ(z²)` purely imaginary (`γ = 1` when `τ(z²) = 0`).
pub fn auto_gamma(tau_z2: C64) -> C64 {
    if tau_z2.norm() == 0.0 {
        return C64::new(1.0, 0.0);
    }
    C64::from_polar(1.0, std::f64::consts::FRAC_PI_4 - 0.5 * tau_z2.arg())
}

/// Splits `z` into the self-adjoint pair `(X_γ, Y_γ)`; `gamma = None` picks
/// [`auto_gamma`].
pub fn gamma_split(m: &MomentTable, gamma: Option<C64>) -> Result<GammaSplit> {
    if m.n_symbols() != 1 || m.order() < 2 {
        return Err(Error::invalid("the split needs a one-symbol table of order ≥ 2"));
    }
    let (z, zs) = (Letter::plain(0), Letter::star(0));
    let tau_z = m.at(&[z]);
    let tau_z2 = m.at(&[z, z]);
    let tau_zzs = m.at(&[z, zs]).re;
    let gamma = match gamma {
        Some(g) => {
            if (g.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("γ must have modulus 1, got |γ| = {}", g.norm())));
            }
            g
        }
        None => auto_gamma(tau_z2),
    };
    let r = gamma * gamma * tau_z2;
    let gz = gamma * tau_z;
    Ok(GammaSplit {
        gamma,
        rotated_square: r,
        mean_x: gz.re,
        mean_y: gz.im,
        tau_x2: 0.25 * (2.0 * tau_zzs + 2.0 * r.re),
        tau_y2: 0.25 * (2.0 * tau_zzs - 2.0 * r.re),
        tau_xy: 0.5 * r.im,
    })
}
