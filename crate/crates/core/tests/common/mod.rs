// Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use lorenz_dct::cipher::{CipherKeys, ImageRgb};
use lorenz_dct::config::Config;
use lorenz_dct::io::load_ppm;
use lorenz_dct::lorenz::SecretKey;
use lorenz_dct::{Matrix, Plane};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub const TEST_IMAGES: [&str; 3] = ["astronaut", "chelsea", "rocket"];

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn test_image(name: &str) -> ImageRgb {
    load_ppm(data_path(&format!("{name}_256.ppm"))).expect("bundled test image")
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_plane(rng: &mut StdRng, rows: usize, cols: usize) -> Plane {
    Plane::from_fn(rows, cols, |_, _| rng.random())
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random::<f64>() * scale)
}

/// A random printable 6-character key.
pub fn random_key(rng: &mut StdRng) -> String {
    (0..6)
        .map(|_| rng.random_range(32u8..=126) as char)
        .collect()
}

/// Flips one random bit of a random character, retrying until the result is
/// still printable ASCII.
pub fn flip_one_bit(rng: &mut StdRng, key: &str) -> String {
    let mut bytes = key.as_bytes().to_vec();
    loop {
        let i = rng.random_range(0..bytes.len());
        let b = bytes[i] ^ (1 << rng.random_range(0..7));
        if (32..=126).contains(&b) {
            bytes[i] = b;
            return String::from_utf8(bytes).unwrap();
        }
    }
}

pub struct Keys {
    pub config: Config,
    pub secret: [SecretKey; 3],
}

impl Keys {
    pub fn new(k1: &str, k2: &str, k3: &str) -> Self {
        let config = Config::with_keys(k1, k2, k3);
        let secret = config.secret_keys().unwrap();
        Self { config, secret }
    }

    pub fn default_test() -> Self {
        Self::new("Key#01", "Lorenz", "Dct2!x")
    }

    pub fn cipher_keys(&self) -> CipherKeys<'_> {
        CipherKeys {
            keys: &self.secret,
            shifts: self.config.shifts,
            config: &self.config.keystream,
        }
    }
}

fn alpha(k: usize, n: usize) -> f64 {
    if k == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

/// Orthonormal DCT-II straight from the definition, O(L²).
pub fn dct1_direct(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(i, &v)| v * (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos())
                .sum();
            alpha(k, n) * s
        })
        .collect()
}

/// Orthonormal 2D DCT-II as a quadruple sum, O(N⁴).
pub fn dct2_direct(f: &Matrix) -> Matrix {
    let (m, n) = f.dims();
    Matrix::from_fn(m, n, |p, q| {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..n {
                s += f[(i, j)]
                    * (PI * (2 * i + 1) as f64 * p as f64 / (2 * m) as f64).cos()
                    * (PI * (2 * j + 1) as f64 * q as f64 / (2 * n) as f64).cos();
            }
        }
        alpha(p, m) * alpha(q, n) * s
    })
}

/// Circular 2D convolution from the definition, O(N⁴).
pub fn circular_conv2_direct(a: &Matrix, b: &Matrix) -> Matrix {
    let (r, c) = a.dims();
    Matrix::from_fn(r, c, |i, j| {
        let mut s = 0.0;
        for p in 0..r {
            for q in 0..c {
                s += a[(p, q)] * b[((i + r - p) % r, (j + c - q) % c)];
            }
        }
        s
    })
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
