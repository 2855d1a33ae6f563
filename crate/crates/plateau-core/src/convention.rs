//! The single orientation convention every module reads.
//!
//! Darboux frame: {T, nu, n} with n = T x nu the outward co-normal, boundary
//! positively oriented with respect to nu, and
//!
//! ```text
//!   kappa_g = T' . n,   kappa_n = T' . nu,   tau_g = -nu' . n,
//!   integral_Sigma K dA = oint kappa_g ds + 2 pi chi(Sigma).
//! ```
//!
//! Some authors flip the sign of the geodesic curvature; under this
//! convention a positively traversed planar disk boundary of radius R has
//! kappa_g = -1/R, which is what [`KG_SIGN_DISK`] records. Planar curve
//! reconstruction and turning numbers derive their signs from it.

use serde::{Deserialize, Serialize};

/// Sign of kappa_g on a positively oriented planar disk boundary of radius 1.
///
/// Planar kinematics read the tangent angle as phi' = KG_SIGN_DISK * kappa_g
/// and the turning number as KG_SIGN_DISK * (1/2pi) * oint kappa_g ds, so the
/// whole crate flips together if this constant ever changes.
pub const KG_SIGN_DISK: f64 = -1.0;

/// Contact-angle sheet for boundary curves of a critical surface.
///
/// A nonzero saddle-splay modulus forces the angle theta between the Frenet
/// normal N and the surface normal nu to be constant at +pi/2 or -pi/2. On
/// sheet theta = +pi/2 the Darboux data reads kappa_g = +kappa, on
/// theta = -pi/2 it reads kappa_g = -kappa; tau_g = -tau on both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    /// sin(theta) for the sheet: the factor in kappa_g = sign * kappa.
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    /// The constant contact angle theta carried by the sheet.
    pub fn theta(self) -> f64 {
        self.sign() * std::f64::consts::FRAC_PI_2
    }

    /// Factor b in nu = b * B. From nu + i n = e^{i theta} (N + i B):
    /// theta = +pi/2 gives nu = -B, theta = -pi/2 gives nu = +B.
    pub fn nu_from_binormal(self) -> f64 {
        -self.sign()
    }

    /// Factor in n = factor * N along the sheet.
    pub fn conormal_from_normal(self) -> f64 {
        self.sign()
    }
}

impl std::fmt::Display for Sheet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sheet::Plus => write!(f, "plus"),
            Sheet::Minus => write!(f, "minus"),
        }
    }
}

impl std::str::FromStr for Sheet {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "plus" | "+" => Ok(Sheet::Plus),
            "minus" | "-" => Ok(Sheet::Minus),
            other => Err(crate::Error::Parse(format!("unknown sheet '{other}'"))),
        }
    }
}
