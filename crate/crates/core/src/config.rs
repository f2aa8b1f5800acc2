//! Model configuration: a small TOML document describing the central spin
//! and its bath.
//!
//! ```toml
//! [system]
//! omega = 1.0          # central-spin frequency
//! theta0 = 1.5707963   # initial Bloch angle, radians
//!
//! [bath]                # homogeneous form
//! n = 10
//! omega = 1.0
//! lambda = 0.05
//! ```
//!
//! A heterogeneous bath replaces the three homogeneous keys with explicit
//! per-spin rows, each `[omega, lambda, amp0_re, amp0_im, amp1_re, amp1_im]`:
//!
//! ```toml
//! [bath]
//! spins = [[1.0, 0.05, 0.7071067811865476, 0.0, 0.7071067811865476, 0.0]]
//! ```
//!
//! Missing sections fall back to the defaults above (Ω = 1, θ₀ = π/2,
//! ten σˣ-initialized spins at ω = 1, λ = 0.05).

use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Bath, BathSpin, CentralSpin};

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    system: RawSystem,
    #[serde(default)]
    bath: RawBath,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(default = "default_central_omega")]
    omega: f64,
    #[serde(default = "default_theta0")]
    theta0: f64,
}

fn default_central_omega() -> f64 {
    1.0
}

fn default_theta0() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl Default for RawSystem {
    fn default() -> Self {
        RawSystem {
            omega: default_central_omega(),
            theta0: default_theta0(),
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawBath {
    n: Option<usize>,
    omega: Option<f64>,
    lambda: Option<f64>,
    spins: Option<Vec<[f64; 6]>>,
}

/// A validated model: the central spin plus its bath.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub central: CentralSpin,
    pub bath: Bath,
}

/// Built-in model used when no configuration file is given.
pub fn default_config() -> ModelConfig {
    ModelConfig {
        central: CentralSpin::new(default_central_omega(), default_theta0())
            .expect("built-in central spin is valid"),
        bath: Bath::homogeneous(10, 1.0, 0.05).expect("built-in bath is valid"),
    }
}

/// Parse a configuration document.
pub fn parse_config(text: &str) -> Result<ModelConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let central = CentralSpin::new(raw.system.omega, raw.system.theta0)?;

    let homogeneous_keys =
        raw.bath.n.is_some() || raw.bath.omega.is_some() || raw.bath.lambda.is_some();
    let bath = match (&raw.bath.spins, homogeneous_keys) {
        (Some(_), true) => {
            return Err(Error::Config(
                "bath: give either the homogeneous keys (n, omega, lambda) \
                 or explicit spins, not both"
                    .into(),
            ));
        }
        (Some(rows), false) => {
            let spins = rows
                .iter()
                .map(|&[omega, lambda, a0re, a0im, a1re, a1im]| {
                    BathSpin::new(
                        omega,
                        lambda,
                        Complex64::new(a0re, a0im),
                        Complex64::new(a1re, a1im),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Bath::new(spins)?
        }
        (None, _) => Bath::homogeneous(
            raw.bath.n.unwrap_or(10),
            raw.bath.omega.unwrap_or(1.0),
            raw.bath.lambda.unwrap_or(0.05),
        )?,
    };
    Ok(ModelConfig { central, bath })
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<ModelConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
