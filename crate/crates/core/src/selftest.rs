//! Quick invariant checks runnable from the CLI on any machine.

use crate::analysis::{mae, psnr, uaci};
use crate::cipher::{
    decrypt_image, embed_coeffs, encrypt_image, extract_coeffs, log_forward, log_inverse,
    shuffle_decrypt, shuffle_encrypt, CipherKeys, ImageRgb,
};
use crate::config::Config;
use crate::dct::{dct2, energy_select, idct2};
use crate::grid::{Matrix, Plane};
use crate::io::{bundle_from_bytes, bundle_to_bytes};
use crate::keystream::{build_round_keystream, Component, KeystreamConfig};
use crate::lorenz::{equilibria, is_chaotic_regime, lorenz_derivative, LorenzParams, SecretKey};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

// xorshift64*, only for generating test data
struct Noise(u64);

impl Noise {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    fn byte(&mut self) -> u8 {
        (self.next() >> 56) as u8
    }

    fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn smooth_image(n: usize) -> Result<ImageRgb> {
    let p = |a: f64, b: f64| {
        Plane::from_fn(n, n, |r, c| {
            let (x, y) = (r as f64 / n as f64, c as f64 / n as f64);
            (128.0 + 90.0 * (a * x + b * y).sin() + 20.0 * (7.0 * x * y).cos()).round() as u8
        })
    };
    ImageRgb::new([p(3.0, 2.0), p(1.0, 4.0), p(5.0, 0.5)])
}

/// Runs every check; never panics.
pub fn run() -> Vec<Check> {
    let mut rng = Noise(0x9E37_79B9_7F4A_7C15);
    let mut out = Vec::new();

    let m = Matrix::from_fn(16, 16, |_, _| rng.unit() * 255.0);
    out.push(check("dct2 round trip", || {
        let err = idct2(&dct2(&m)).max_abs_diff(&m);
        Ok((err <= 1e-9, format!("max error {err:.3e}")))
    }));
    out.push(check("parseval", || {
        let (a, b) = (m.sum_of_squares(), dct2(&m).sum_of_squares());
        let rel = (a - b).abs() / a;
        Ok((rel <= 1e-9, format!("relative error {rel:.3e}")))
    }));

    let params = LorenzParams::default();
    out.push(check("lorenz equilibria", || {
        let eq = equilibria(&params)?;
        let worst = eq
            .iter()
            .map(|&s| {
                let d = lorenz_derivative(s, &params);
                d.x.abs().max(d.y.abs()).max(d.z.abs())
            })
            .fold(0.0, f64::max);
        Ok((worst <= 1e-12, format!("max |derivative| {worst:.3e}")))
    }));
    out.push(check("chaotic regime classifier", || {
        let low = LorenzParams { rho: 0.5, ..params };
        Ok((
            is_chaotic_regime(&params) && !is_chaotic_regime(&low),
            "defaults chaotic, rho=0.5 not".into(),
        ))
    }));

    let cfg = KeystreamConfig::default();
    let n = 8;
    out.push(check("shuffle inverse", || {
        let key = SecretKey::new("Lorenz", SecretKey::DEFAULT_ROTATIONS)?;
        let ks = build_round_keystream(&key, n, &cfg)?;
        let mut ok = true;
        for _ in 0..20 {
            let plane = Plane::from_fn(n, n, |_, _| rng.byte());
            for c in Component::ALL {
                let ksp = ks.plane_for(c);
                for shift in [0u16, 1, 3, 7, 13] {
                    let enc = shuffle_encrypt(&plane, ksp, shift)?;
                    ok &= shuffle_decrypt(&enc, ksp, shift)? == plane;
                }
            }
        }
        Ok((ok, "20 planes x 3 components x 5 shifts".into()))
    }));

    out.push(check("log embedding round trip", || {
        let key = SecretKey::new("chaos!", SecretKey::DEFAULT_ROTATIONS)?;
        let ks = build_round_keystream(&key, n, &cfg)?;
        let img = Matrix::from_fn(n, n, |r, c| ((r * 37 + c * 11) % 256) as f64);
        let sparse = energy_select(&dct2(&img), 0.999)?;
        let logm = log_forward(&sparse, n)?;
        let back = extract_coeffs(
            &embed_coeffs(&logm, ks.plane_for(Component::Red))?,
            ks.plane_for(Component::Red),
        )?;
        let empty_exact = logm
            .as_slice()
            .iter()
            .zip(back.as_slice())
            .all(|(&a, &b)| a != 0.0 || b == 0.0);
        let rec = log_inverse(&back);
        let mut worst = 0.0f64;
        let mut positions = rec.len() == sparse.len();
        for (a, b) in sparse
            .to_dense()
            .as_slice()
            .iter()
            .zip(rec.to_dense().as_slice())
        {
            positions &= (*a == 0.0) == (*b == 0.0);
            if *a != 0.0 {
                worst = worst.max(((a - b) / a).abs());
            }
        }
        Ok((
            empty_exact && positions && worst <= 1e-12,
            format!("max relative error {worst:.3e}"),
        ))
    }));

    out.push(check("uaci = mae/255*100", || {
        let a = Plane::from_fn(16, 16, |_, _| rng.byte());
        let b = Plane::from_fn(16, 16, |_, _| rng.byte());
        let d = (uaci(&a, &b)? - mae(&a, &b)? / 255.0 * 100.0).abs();
        Ok((d <= 1e-9, format!("difference {d:.3e}")))
    }));

    out.push(check("encrypt/decrypt 32x32", || {
        let conf = Config::with_keys("Alpha1", "Beta-2", "Gamma3");
        let keys = conf.secret_keys()?;
        let ck = CipherKeys {
            keys: &keys,
            shifts: conf.shifts,
            config: &conf.keystream,
        };
        let img = smooth_image(32)?;
        let bundle = encrypt_image(&img, &ck)?;
        let bytes = bundle_to_bytes(&bundle)?;
        let again = bundle_to_bytes(&encrypt_image(&img, &ck)?)?;
        let dec = decrypt_image(&bundle_from_bytes(&bytes)?, &ck)?;
        let mut worst = f64::INFINITY;
        for c in Component::ALL {
            worst = worst.min(psnr(img.plane(c), dec.plane(c))?);
        }
        Ok((
            worst >= 55.0 && bytes == again,
            format!("min PSNR {worst} dB, deterministic {}", bytes == again),
        ))
    }));

    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
