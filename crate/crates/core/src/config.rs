//! Everything both parties must agree on, with the library defaults.

use crate::cipher::{DEFAULT_SHIFTS, ROUNDS};
use crate::keystream::KeystreamConfig;
use crate::lorenz::SecretKey;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub keys: [String; ROUNDS],
    pub shifts: [u16; ROUNDS],
    pub rotations: [[u8; 3]; ROUNDS],
    pub keystream: KeystreamConfig,
}

impl Config {
    /// Three keys with every other setting at its default.
    pub fn with_keys(k1: &str, k2: &str, k3: &str) -> Self {
        Self {
            keys: [k1.to_string(), k2.to_string(), k3.to_string()],
            shifts: DEFAULT_SHIFTS,
            rotations: [SecretKey::DEFAULT_ROTATIONS; ROUNDS],
            keystream: KeystreamConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.keystream.energy_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "energy fraction {f} outside (0, 1]"
            )));
        }
        self.keystream.params.validate()?;
        let ks = &self.keystream;
        if !(ks.dt > 0.0 && ks.dt.is_finite() && ks.t_end > ks.t_start) {
            return Err(Error::InvalidParams(format!(
                "bad integration window [{}, {}] step {}",
                ks.t_start, ks.t_end, ks.dt
            )));
        }
        self.secret_keys().map(|_| ())
    }

    pub fn secret_keys(&self) -> Result<[SecretKey; ROUNDS]> {
        let mut out = Vec::with_capacity(ROUNDS);
        for (k, r) in self.keys.iter().zip(self.rotations) {
            out.push(SecretKey::new(k, r)?);
        }
        Ok(out.try_into().expect("ROUNDS keys"))
    }
}
