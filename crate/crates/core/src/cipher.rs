//! Encryption and decryption pipelines.
//!
//! Per colour component the image is split into
//!
//! * the **difference plane**: `component − round(IDCT2(retained coefficients))`
//!   mod 256, encrypted by three chained rounds of [`shuffle_encrypt`];
//! * the **carrier plane**: signed `log10` of every retained coefficient,
//!   row-rotated and added to the sum of the three rounds' keystream twins.
//!
//! Cells of the carrier that hold no coefficient come back as exactly `0.0`
//! after the keystream sum is subtracted (integer + 0 − integer), which is how
//! the receiver finds the coefficient positions.

use crate::dct::{dct2, energy_select, reconstruct_sparse, Coeff, SparseCoeffs};
use crate::grid::{rotate_left, rotate_right, Matrix, Plane};
use crate::keystream::{
    build_round_keystream, Component, KeystreamConfig, KeystreamPlane, Permutation, RoundKeystream,
};
use crate::lorenz::SecretKey;
use crate::{Error, Result};

pub const ROUNDS: usize = 3;

/// Default cyclic shift applied in each of the three rounds.
pub const DEFAULT_SHIFTS: [u16; ROUNDS] = [3, 7, 13];

/// Retained magnitudes inside `[1, 1 + UNIT_GUARD)` are raised to `1 + UNIT_GUARD`:
/// their log would otherwise vanish against a keystream twin of up to 765 and
/// read back as an empty cell.
pub const UNIT_GUARD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    planes: [Plane; 3],
}

impl ImageRgb {
    pub fn new(planes: [Plane; 3]) -> Result<Self> {
        let dims = planes[0].dims();
        for p in &planes[1..] {
            planes[0].check_same_dims(p)?;
        }
        Ok(Self {
            width: dims.1,
            height: dims.0,
            planes,
        })
    }

    /// Splits interleaved RGB bytes.
    pub fn from_interleaved(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::MalformedImage(format!(
                "expected {} bytes of RGB data, got {}",
                width * height * 3,
                rgb.len()
            )));
        }
        let plane = |k: usize| {
            Plane::from_vec(
                height,
                width,
                rgb.iter().skip(k).step_by(3).copied().collect(),
            )
        };
        Self::new([plane(0)?, plane(1)?, plane(2)?])
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let [r, g, b] = &self.planes;
        r.as_slice()
            .iter()
            .zip(g.as_slice())
            .zip(b.as_slice())
            .flat_map(|((&r, &g), &b)| [r, g, b])
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn plane(&self, c: Component) -> &Plane {
        &self.planes[c.index()]
    }

    pub fn planes(&self) -> &[Plane; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [Plane; 3] {
        self.planes
    }

    /// Side length, or an error for non-square images.
    pub fn square_size(&self) -> Result<usize> {
        if self.width != self.height {
            return Err(Error::NonSquare {
                width: self.width,
                height: self.height,
            });
        }
        Ok(self.width)
    }
}

/// Real-valued second payload: keystream twins plus log-embedded coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CarrierPlane(Matrix);

impl CarrierPlane {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(
                "carrier contains non-finite values".into(),
            ));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// Everything the receiver needs besides the keys.
#[derive(Clone, Debug, PartialEq)]
pub struct CipherBundle {
    pub size: usize,
    pub shifts: [u16; ROUNDS],
    /// Rotation counts of the key used in each round.
    pub rotations: [[u8; 3]; ROUNDS],
    pub difference: [Plane; 3],
    pub carriers: [CarrierPlane; 3],
}

fn to_byte(v: f64) -> u8 {
    // NaN (from a wrong key's overflowing coefficients) maps to 0.
    if v.is_nan() {
        0
    } else {
        v.round().clamp(0.0, 255.0) as u8
    }
}

pub fn quantize_reconstruction(recon: &Matrix) -> Plane {
    recon.map(|&v| to_byte(v))
}

/// Splits `component` into its rounded sparse reconstruction and the residual
/// `(component − recon_u8) mod 256`, so that `(recon_u8 + dic) mod 256` is the
/// component again.
pub fn make_difference(component: &Plane, sparse: &SparseCoeffs) -> Result<(Plane, Plane)> {
    if sparse.dims() != component.dims() {
        return Err(Error::DimensionMismatch {
            expected: component.dims(),
            got: sparse.dims(),
        });
    }
    let recon = quantize_reconstruction(&reconstruct_sparse(sparse));
    let dic = component.zip_with(&recon, |&c, &r| c.wrapping_sub(r))?;
    Ok((dic, recon))
}

/// `(recon + dic) mod 256`
pub fn recombine(recon: &Plane, dic: &Plane) -> Result<Plane> {
    recon.zip_with(dic, |&r, &d| r.wrapping_add(d))
}

fn check_keystream(plane: &Plane, ks: &KeystreamPlane) -> Result<()> {
    if plane.dims() != ks.bytes().dims() || !plane.is_square() {
        return Err(Error::DimensionMismatch {
            expected: ks.bytes().dims(),
            got: plane.dims(),
        });
    }
    Ok(())
}

/// XOR, gather by `perms`, rotate left, XOR with the rotated keystream, row by row.
fn forward_pass(m: &Plane, key: &Plane, perms: &[Permutation], shift: usize) -> Plane {
    let n = m.cols();
    let mut out = Plane::new(m.rows(), n);
    let mut mixed = vec![0u8; n];
    let mut rotated_key = vec![0u8; n];
    for (i, perm) in perms.iter().enumerate().take(m.rows()) {
        let k = key.row(i);
        for (x, (&d, &c)) in mixed.iter_mut().zip(m.row(i).iter().zip(k)) {
            *x = d ^ c;
        }
        let row = out.row_mut(i);
        perm.gather(&mixed, row);
        rotate_left(row, shift);
        rotated_key.copy_from_slice(k);
        rotate_left(&mut rotated_key, shift);
        for (x, &c) in row.iter_mut().zip(&rotated_key) {
            *x ^= c;
        }
    }
    out
}

fn inverse_pass(m: &Plane, key: &Plane, perms: &[Permutation], shift: usize) -> Plane {
    let n = m.cols();
    let mut out = Plane::new(m.rows(), n);
    let mut work = vec![0u8; n];
    let mut rotated_key = vec![0u8; n];
    for (i, perm) in perms.iter().enumerate().take(m.rows()) {
        let k = key.row(i);
        rotated_key.copy_from_slice(k);
        rotate_left(&mut rotated_key, shift);
        for (x, (&h, &c)) in work.iter_mut().zip(m.row(i).iter().zip(&rotated_key)) {
            *x = h ^ c;
        }
        rotate_right(&mut work, shift);
        let row = out.row_mut(i);
        perm.scatter(&work, row);
        for (x, &c) in row.iter_mut().zip(k) {
            *x ^= c;
        }
    }
    out
}

/// Horizontal pass with the row permutations, then the same on columns
/// (through the transpose) with the column permutations.
pub fn shuffle_encrypt(plane: &Plane, ks: &KeystreamPlane, n_shift: u16) -> Result<Plane> {
    check_keystream(plane, ks)?;
    let shift = usize::from(n_shift);
    let h = forward_pass(plane, ks.bytes(), ks.row_perm(), shift);
    let v = forward_pass(
        &h.transpose(),
        &ks.bytes().transpose(),
        ks.col_perm(),
        shift,
    );
    Ok(v.transpose())
}

/// Exact inverse of [`shuffle_encrypt`].
pub fn shuffle_decrypt(plane: &Plane, ks: &KeystreamPlane, n_shift: u16) -> Result<Plane> {
    check_keystream(plane, ks)?;
    let shift = usize::from(n_shift);
    let v = inverse_pass(
        &plane.transpose(),
        &ks.bytes().transpose(),
        ks.col_perm(),
        shift,
    );
    Ok(inverse_pass(
        &v.transpose(),
        ks.bytes(),
        ks.row_perm(),
        shift,
    ))
}

/// Signed log10 of every coefficient at its position, then row `i` rotated
/// left by `i mod N`.
pub fn log_forward(s: &SparseCoeffs, n: usize) -> Result<Matrix> {
    if s.dims() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: (n, n),
            got: s.dims(),
        });
    }
    let mut m = Matrix::new(n, n);
    for e in s.entries() {
        let mag = e.value.abs();
        if mag.is_nan() || mag < 1.0 {
            return Err(Error::EmbeddingDomain {
                row: e.row,
                col: e.col,
                value: e.value,
            });
        }
        m[(e.row, e.col)] = mag.log10().copysign(e.value);
    }
    for i in 0..n {
        rotate_left(m.row_mut(i), i);
    }
    Ok(m)
}

/// Undoes the row rotation; every non-zero cell `v` becomes the coefficient
/// `sign(v) · 10^|v|`.
pub fn log_inverse(m: &Matrix) -> SparseCoeffs {
    let (rows, cols) = m.dims();
    let mut m = m.clone();
    for i in 0..rows {
        rotate_right(m.row_mut(i), i);
    }
    let entries = m
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| Coeff {
            row: i / cols,
            col: i % cols,
            value: 10f64.powf(v.abs()).copysign(v),
        })
        .collect();
    // Values are >= 1 by construction (10^|v| with |v| > 0); positions are unique.
    SparseCoeffs::new(rows, cols, entries, 1.0).unwrap_or_else(|_| SparseCoeffs::empty(rows, cols))
}

/// `base + logm`, where `base` holds exact small integers.
pub fn embed_onto(base: &Matrix, logm: &Matrix) -> Result<CarrierPlane> {
    CarrierPlane::new(base.zip_with(logm, |&b, &l| b + l)?)
}

pub fn extract_from(carrier: &CarrierPlane, base: &Matrix) -> Result<Matrix> {
    carrier.matrix().zip_with(base, |&c, &b| c - b)
}

pub fn embed_coeffs(logm: &Matrix, ks: &KeystreamPlane) -> Result<CarrierPlane> {
    embed_onto(ks.real_twin(), logm)
}

pub fn extract_coeffs(carrier: &CarrierPlane, ks: &KeystreamPlane) -> Result<Matrix> {
    extract_from(carrier, ks.real_twin())
}

/// Entrywise sum of the real twins of `c`'s plane across all rounds. Exact:
/// the result is an integer no larger than 765.
pub fn keystream_sum(rounds: &[RoundKeystream], c: Component) -> Matrix {
    let first = rounds[0].plane_for(c).real_twin();
    let mut sum = Matrix::new(first.rows(), first.cols());
    for r in rounds {
        for (s, &t) in sum
            .as_mut_slice()
            .iter_mut()
            .zip(r.plane_for(c).real_twin().as_slice())
        {
            *s += t;
        }
    }
    sum
}

/// Raises retained magnitudes that sit in `[1, 1 + UNIT_GUARD)`.
pub fn guard_unit_coefficients(s: SparseCoeffs) -> SparseCoeffs {
    s.map_values(|v| {
        if v.abs() < 1.0 + UNIT_GUARD {
            (1.0 + UNIT_GUARD).copysign(v)
        } else {
            v
        }
    })
}

/// High-energy coefficients of one component, ready for embedding.
pub fn component_coefficients(component: &Plane, fraction: f64) -> Result<SparseCoeffs> {
    let spectrum = dct2(&component.to_matrix());
    Ok(guard_unit_coefficients(energy_select(&spectrum, fraction)?))
}

/// One key per round together with the pipeline configuration.
pub struct CipherKeys<'a> {
    pub keys: &'a [SecretKey; ROUNDS],
    pub shifts: [u16; ROUNDS],
    pub config: &'a KeystreamConfig,
}

fn round_keystreams(
    keys: &[SecretKey; ROUNDS],
    n: usize,
    cfg: &KeystreamConfig,
) -> Result<Vec<RoundKeystream>> {
    keys.iter()
        .map(|k| build_round_keystream(k, n, cfg))
        .collect()
}

pub fn encrypt_image(img: &ImageRgb, keys: &CipherKeys<'_>) -> Result<CipherBundle> {
    let n = img.square_size()?;
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "image must be at least 2x2, got {n}x{n}"
        )));
    }
    let rounds = round_keystreams(keys.keys, n, keys.config)?;

    let mut difference = Vec::with_capacity(3);
    let mut carriers = Vec::with_capacity(3);
    for c in Component::ALL {
        let component = img.plane(c);
        let sparse = component_coefficients(component, keys.config.energy_fraction)?;
        let (mut dic, _) = make_difference(component, &sparse)?;
        for (round, shift) in rounds.iter().zip(keys.shifts) {
            dic = shuffle_encrypt(&dic, round.plane_for(c), shift)?;
        }
        let logm = log_forward(&sparse, n)?;
        carriers.push(embed_onto(&keystream_sum(&rounds, c), &logm)?);
        difference.push(dic);
    }

    Ok(CipherBundle {
        size: n,
        shifts: keys.shifts,
        rotations: keys.keys.map(|k| k.rotations()),
        difference: difference.try_into().expect("three components"),
        carriers: carriers.try_into().expect("three components"),
    })
}

/// Regenerates the keystreams and inverts both payloads. A wrong key is not
/// detected; it simply yields noise.
pub fn decrypt_image(bundle: &CipherBundle, keys: &CipherKeys<'_>) -> Result<ImageRgb> {
    let n = bundle.size;
    let rounds = round_keystreams(keys.keys, n, keys.config)?;

    let mut planes = Vec::with_capacity(3);
    for c in Component::ALL {
        let mut dic = bundle.difference[c.index()].clone();
        for (round, shift) in rounds.iter().zip(keys.shifts).rev() {
            dic = shuffle_decrypt(&dic, round.plane_for(c), shift)?;
        }
        let logm = extract_from(&bundle.carriers[c.index()], &keystream_sum(&rounds, c))?;
        let recovered = log_inverse(&logm);
        let recon = quantize_reconstruction(&reconstruct_sparse(&recovered));
        planes.push(recombine(&recon, &dic)?);
    }
    ImageRgb::new(planes.try_into().expect("three components"))
}
