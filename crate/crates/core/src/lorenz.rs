//! Lorenz system: key schedule, vector field, fixed-step RK4 integration,
//! equilibria and the chaotic-regime test.
//!
//! Everything here is built from `+ - * /` on `f64` in a fixed order (plus one
//! `round` in the key schedule), so trajectories are bit-identical on any
//! IEEE-754 platform. Decryption depends on that: the receiver regenerates
//! the keystream from the keys alone.

use crate::{Error, Result};

/// `rho` (Rayleigh number), `sigma` (Prandtl number), `beta` (geometry).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorenzParams {
    pub rho: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            rho: 28.0,
            sigma: 10.0,
            beta: 8.0 / 3.0,
        }
    }
}

impl LorenzParams {
    pub fn new(rho: f64, sigma: f64, beta: f64) -> Result<Self> {
        let p = Self { rho, sigma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rho", self.rho),
            ("sigma", self.sigma),
            ("beta", self.beta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct State3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn axpy(self, h: f64, d: State3) -> State3 {
        State3::new(self.x + h * d.x, self.y + h * d.y, self.z + h * d.z)
    }
}

pub const KEY_LEN: usize = 6;
const KEY_BITS: u32 = 8 * KEY_LEN as u32;
const KEY_MASK: u64 = (1 << KEY_BITS) - 1;

/// Six printable ASCII characters plus the three cyclic rotation counts used
/// to spread them into three initial conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SecretKey {
    chars: [u8; KEY_LEN],
    rotations: [u8; 3],
}

impl SecretKey {
    pub const DEFAULT_ROTATIONS: [u8; 3] = [5, 11, 17];

    pub fn new(chars: &str, rotations: [u8; 3]) -> Result<Self> {
        Self::from_bytes(chars.as_bytes(), rotations)
    }

    pub fn from_bytes(chars: &[u8], rotations: [u8; 3]) -> Result<Self> {
        let chars: [u8; KEY_LEN] = chars.try_into().map_err(|_| {
            Error::InvalidKey(format!(
                "expected exactly {KEY_LEN} characters, got {}",
                chars.len()
            ))
        })?;
        if let Some(bad) = chars.iter().find(|c| !(32..=126).contains(*c)) {
            return Err(Error::InvalidKey(format!(
                "character code {bad} is not printable ASCII"
            )));
        }
        if let Some(r) = rotations.iter().find(|&&r| u32::from(r) >= KEY_BITS) {
            return Err(Error::InvalidKey(format!(
                "rotation {r} outside 0..{}",
                KEY_BITS - 1
            )));
        }
        Ok(Self { chars, rotations })
    }

    pub fn chars(&self) -> &[u8; KEY_LEN] {
        &self.chars
    }

    pub fn rotations(&self) -> [u8; 3] {
        self.rotations
    }

    /// The six character codes as one 48-bit integer, first character most significant.
    pub fn packed(&self) -> u64 {
        self.chars
            .iter()
            .fold(0u64, |acc, &c| (acc << 8) | u64::from(c))
    }
}

/// Cyclic left rotation inside a 48-bit word. Rotating by 48 is the identity.
pub fn rotate_left_48(u: u64, r: u32) -> u64 {
    let r = r % KEY_BITS;
    let u = u & KEY_MASK;
    if r == 0 {
        return u;
    }
    ((u << r) | (u >> (KEY_BITS - r))) & KEY_MASK
}

fn round_to_14_places(v: f64) -> f64 {
    (v * 1e14).round() / 1e14
}

/// Maps the key to an initial condition inside (0.1, 0.9)^3.
///
/// Coordinate k is `0.1 + 0.8 * rotl48(u, r_k) / 2^48`, rounded to 14 decimals.
pub fn derive_initial_conditions(key: &SecretKey) -> State3 {
    let u = key.packed();
    let scale = (1u64 << KEY_BITS) as f64;
    let coord = |r: u8| {
        let rotated = rotate_left_48(u, u32::from(r)) as f64;
        round_to_14_places(0.1 + 0.8 * (rotated / scale))
    };
    let [a, b, c] = key.rotations;
    State3::new(coord(a), coord(b), coord(c))
}

pub fn lorenz_derivative(s: State3, p: &LorenzParams) -> State3 {
    State3::new(
        p.sigma * (s.y - s.x),
        s.x * (p.rho - s.z) - s.y,
        s.x * s.y - p.beta * s.z,
    )
}

/// One classical RK4 step.
pub fn rk4_step(s: State3, p: &LorenzParams, dt: f64) -> State3 {
    let half = 0.5 * dt;
    let k1 = lorenz_derivative(s, p);
    let k2 = lorenz_derivative(s.axpy(half, k1), p);
    let k3 = lorenz_derivative(s.axpy(half, k2), p);
    let k4 = lorenz_derivative(s.axpy(dt, k3), p);
    let sixth = dt / 6.0;
    State3::new(
        s.x + sixth * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.y + sixth * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        s.z + sixth * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
    )
}

/// Sampled solution; all four sequences have the same length.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn state(&self, i: usize) -> State3 {
        State3::new(self.x[i], self.y[i], self.z[i])
    }

    pub fn last(&self) -> Option<State3> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }
}

/// Number of samples `floor((t_end - t_start) / dt) + 1`.
///
/// The quotient is nudged by 1e-9 before flooring so that windows such as
/// 50 / 0.001 that are integral in decimal land on the intended count.
pub fn sample_count(t_start: f64, t_end: f64, dt: f64) -> usize {
    ((t_end - t_start) / dt + 1e-9).floor() as usize + 1
}

/// Fixed-step RK4 from `t_start`, sampled at `t_start + i * dt`.
pub fn integrate(
    p: &LorenzParams,
    s0: State3,
    t_start: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    p.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
        return Err(Error::InvalidParams(format!(
            "empty time window [{t_start}, {t_end}]"
        )));
    }
    if !s0.is_finite() {
        return Err(Error::Divergence {
            step: 0,
            t: t_start,
        });
    }

    let n = sample_count(t_start, t_end, dt);
    let mut traj = Trajectory {
        t: Vec::with_capacity(n),
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
    };
    let mut s = s0;
    for i in 0..n {
        if i > 0 {
            s = rk4_step(s, p, dt);
            if !s.is_finite() {
                return Err(Error::Divergence {
                    step: i,
                    t: t_start + i as f64 * dt,
                });
            }
        }
        traj.t.push(t_start + i as f64 * dt);
        traj.x.push(s.x);
        traj.y.push(s.y);
        traj.z.push(s.z);
    }
    Ok(traj)
}

/// The two non-trivial fixed points `(±√(β(ρ−1)), ±√(β(ρ−1)), ρ−1)`.
pub fn equilibria(p: &LorenzParams) -> Result<[State3; 2]> {
    if p.rho < 1.0 {
        return Err(Error::NoRealEquilibria { rho: p.rho });
    }
    let r = (p.beta * (p.rho - 1.0)).sqrt();
    let z = p.rho - 1.0;
    Ok([State3::new(r, r, z), State3::new(-r, -r, z)])
}

/// True when ρ > 1, σ > β + 1 and ρ > σ(σ + β + 3)/(σ − β − 1).
pub fn is_chaotic_regime(p: &LorenzParams) -> bool {
    let denom = p.sigma - p.beta - 1.0;
    if !(p.rho > 1.0 && denom > 0.0) {
        return false;
    }
    p.rho > p.sigma * (p.sigma + p.beta + 3.0) / denom
}
