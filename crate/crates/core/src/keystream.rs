//! Lorenz trajectory → per-component keystream planes.
//!
//! Pipeline for one key: integrate, DCT each coordinate array and keep the
//! 99.9 %-energy coefficients, form the outer products XY, XZ, YZ, resize each
//! to N×N, convolve the resized products pairwise (circularly) and reduce the
//! result to bytes. Each byte plane also yields the row and column argsort
//! permutations used by the shuffle stage.

use crate::dct::{dct1, energy_select_1d, DEFAULT_ENERGY_FRACTION};
use crate::fft;
use crate::grid::{Matrix, Plane};
use crate::lorenz::{derive_initial_conditions, integrate, LorenzParams, SecretKey, Trajectory};
use crate::{Error, Result};

/// A bijection on `0..n`, stored as `perm[k] = source index of slot k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Stable ascending argsort: slot `k` receives the index of the k-th smallest value.
    pub fn argsort<T: Ord>(values: &[T]) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].cmp(&values[b]));
        Self(idx)
    }

    pub fn from_vec(v: Vec<usize>) -> Result<Self> {
        let p = Self(v);
        if !p.is_bijection() {
            return Err(Error::InvalidParams("not a permutation".into()));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        for &i in &self.0 {
            if i >= seen.len() || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &i) in self.0.iter().enumerate() {
            inv[i] = k;
        }
        Self(inv)
    }

    /// `out[k] = src[perm[k]]`
    pub fn gather<T: Copy>(&self, src: &[T], out: &mut [T]) {
        for (o, &i) in out.iter_mut().zip(&self.0) {
            *o = src[i];
        }
    }

    /// `out[perm[k]] = src[k]`, the inverse of [`Permutation::gather`].
    pub fn scatter<T: Copy>(&self, src: &[T], out: &mut [T]) {
        for (&v, &i) in src.iter().zip(&self.0) {
            out[i] = v;
        }
    }
}

pub fn row_permutations(bytes: &Plane) -> Vec<Permutation> {
    bytes.iter_rows().map(Permutation::argsort).collect()
}

pub fn column_permutations(bytes: &Plane) -> Vec<Permutation> {
    row_permutations(&bytes.transpose())
}

/// One N×N keystream plane with its exact real-valued twin and the argsort
/// permutations of its rows and columns.
#[derive(Clone, Debug, PartialEq)]
pub struct KeystreamPlane {
    bytes: Plane,
    real_twin: Matrix,
    row_perm: Vec<Permutation>,
    col_perm: Vec<Permutation>,
}

impl KeystreamPlane {
    pub fn from_bytes(bytes: Plane) -> Self {
        let real_twin = bytes.to_matrix();
        let row_perm = row_permutations(&bytes);
        let col_perm = column_permutations(&bytes);
        Self {
            bytes,
            real_twin,
            row_perm,
            col_perm,
        }
    }

    pub fn bytes(&self) -> &Plane {
        &self.bytes
    }

    pub fn real_twin(&self) -> &Matrix {
        &self.real_twin
    }

    pub fn row_perm(&self) -> &[Permutation] {
        &self.row_perm
    }

    pub fn col_perm(&self) -> &[Permutation] {
        &self.col_perm
    }

    pub fn size(&self) -> usize {
        self.bytes.rows()
    }
}

/// Colour component of an RGB image. Each maps to one keystream product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Red,
    Green,
    Blue,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Red, Component::Green, Component::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Red => "R",
            Component::Green => "G",
            Component::Blue => "B",
        }
    }

    /// Keystream product assigned to the component: R←XY, G←XZ, B←YZ.
    pub fn plane_label(self) -> &'static str {
        match self {
            Component::Red => "XY",
            Component::Green => "XZ",
            Component::Blue => "YZ",
        }
    }
}

/// The three planes derived from one key, ordered XY, XZ, YZ.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundKeystream {
    planes: [KeystreamPlane; 3],
}

impl RoundKeystream {
    pub fn new(planes: [KeystreamPlane; 3]) -> Result<Self> {
        let dims = planes[0].bytes.dims();
        if let Some(p) = planes.iter().find(|p| p.bytes.dims() != dims) {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: p.bytes.dims(),
            });
        }
        Ok(Self { planes })
    }

    pub fn plane_for(&self, c: Component) -> &KeystreamPlane {
        &self.planes[c.index()]
    }

    pub fn planes(&self) -> &[KeystreamPlane; 3] {
        &self.planes
    }
}

/// Integration window, Lorenz parameters and energy fraction used to turn a
/// key into keystream planes. Both ends of a link must agree on all of it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeystreamConfig {
    pub params: LorenzParams,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub energy_fraction: f64,
}

impl Default for KeystreamConfig {
    fn default() -> Self {
        Self {
            params: LorenzParams::default(),
            t_start: 0.0,
            t_end: 50.0,
            dt: 0.001,
            energy_fraction: DEFAULT_ENERGY_FRACTION,
        }
    }
}

/// DCT each coordinate array and keep the high-energy coefficients, in
/// ascending coefficient-index order.
pub fn truncated_vectors(traj: &Trajectory, fraction: f64) -> Result<[Vec<f64>; 3]> {
    if traj.is_empty() {
        return Err(Error::DegenerateKeystream("empty trajectory"));
    }
    let select = |xs: &[f64]| -> Result<Vec<f64>> {
        Ok(energy_select_1d(&dct1(xs), fraction)?.values_in_index_order())
    };
    Ok([select(&traj.x)?, select(&traj.y)?, select(&traj.z)?])
}

fn outer(a: &[f64], b: &[f64]) -> Matrix {
    Matrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
}

/// `[vx ⊗ vy, vx ⊗ vz, vy ⊗ vz]`
pub fn outer_products(vx: &[f64], vy: &[f64], vz: &[f64]) -> Result<[Matrix; 3]> {
    if vx.is_empty() || vy.is_empty() || vz.is_empty() {
        return Err(Error::DegenerateKeystream(
            "a truncated coordinate vector is empty",
        ));
    }
    Ok([outer(vx, vy), outer(vx, vz), outer(vy, vz)])
}

/// Corner-aligned source coordinates for `n` output samples over `len` inputs:
/// (lower index, upper index, fractional weight of the upper one).
fn bilinear_taps(len: usize, n: usize) -> Vec<(usize, usize, f64)> {
    (0..n)
        .map(|i| {
            if n == 1 || len == 1 {
                return (0, 0, 0.0);
            }
            let pos = (i * (len - 1)) as f64 / (n - 1) as f64;
            let lo = (pos.floor() as usize).min(len - 1);
            let hi = (lo + 1).min(len - 1);
            (lo, hi, pos - lo as f64)
        })
        .collect()
}

/// Bilinear resize to N×N with corners mapped onto corners.
pub fn resize_bilinear(m: &Matrix, n: usize) -> Matrix {
    assert!(
        m.rows() >= 1 && m.cols() >= 1,
        "cannot resize an empty matrix"
    );
    let rows = bilinear_taps(m.rows(), n);
    let cols = bilinear_taps(m.cols(), n);
    Matrix::from_fn(n, n, |i, j| {
        let (r0, r1, fr) = rows[i];
        let (c0, c1, fc) = cols[j];
        let top = m[(r0, c0)] * (1.0 - fc) + m[(r0, c1)] * fc;
        let bottom = m[(r1, c0)] * (1.0 - fc) + m[(r1, c1)] * fc;
        top * (1.0 - fr) + bottom * fr
    })
}

/// Circular 2D convolution of two equally sized matrices.
pub fn circular_conv2(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.check_same_dims(b)?;
    Ok(fft::circular_convolve2(a, b))
}

/// `floor(|c|) mod 256` entrywise.
pub fn quantize_mod256(c: &Matrix) -> Plane {
    c.map(|&v| (v.abs().floor() % 256.0) as u8)
}

pub fn circular_conv2_mod(a: &Matrix, b: &Matrix) -> Result<Plane> {
    Ok(quantize_mod256(&circular_conv2(a, b)?))
}

/// Byte planes for one key before permutations are attached, ordered XY, XZ, YZ.
pub fn keystream_bytes(key: &SecretKey, n: usize, cfg: &KeystreamConfig) -> Result<[Plane; 3]> {
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "keystream size must be >= 2, got {n}"
        )));
    }
    let s0 = derive_initial_conditions(key);
    let traj = integrate(&cfg.params, s0, cfg.t_start, cfg.t_end, cfg.dt)?;
    let [vx, vy, vz] = truncated_vectors(&traj, cfg.energy_fraction)?;
    let [xy, xz, yz] = outer_products(&vx, &vy, &vz)?.map(|m| resize_bilinear(&m, n));
    Ok([
        circular_conv2_mod(&xy, &xz)?,
        circular_conv2_mod(&xz, &yz)?,
        circular_conv2_mod(&yz, &xy)?,
    ])
}

pub fn build_round_keystream(
    key: &SecretKey,
    n: usize,
    cfg: &KeystreamConfig,
) -> Result<RoundKeystream> {
    let planes = keystream_bytes(key, n, cfg)?.map(KeystreamPlane::from_bytes);
    RoundKeystream::new(planes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorenz::State3;

    #[test]
    fn argsort_examples() {
        assert_eq!(Permutation::argsort(&[3u8, 1, 2]).as_slice(), &[1, 2, 0]);
        assert_eq!(Permutation::argsort(&[1u8, 2, 3]).as_slice(), &[0, 1, 2]);
        assert_eq!(Permutation::argsort(&[7u8; 5]).as_slice(), &[0, 1, 2, 3, 4]);
        assert_eq!(
            Permutation::argsort(&[2u8, 1, 2, 1]).as_slice(),
            &[1, 3, 0, 2]
        );
    }

    #[test]
    fn gather_scatter_are_inverse() {
        let p = Permutation::argsort(&[9u8, 4, 7, 1, 4]);
        let src = [10, 20, 30, 40, 50];
        let mut g = [0; 5];
        p.gather(&src, &mut g);
        let mut back = [0; 5];
        p.scatter(&g, &mut back);
        assert_eq!(back, src);
        assert_eq!(p.inverse().inverse(), p);
        assert!(Permutation::from_vec(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn column_permutations_sort_columns() {
        let plane = Plane::from_vec(3, 2, vec![5, 0, 1, 0, 3, 0]).unwrap();
        let cols = column_permutations(&plane);
        assert_eq!(cols[0].as_slice(), &[1, 2, 0]);
        assert_eq!(cols[1].as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn outer_product_examples() {
        let [xy, xz, yz] = outer_products(&[2.0], &[3.0], &[5.0, 7.0]).unwrap();
        assert_eq!(xy.as_slice(), &[6.0]);
        assert_eq!(xz.as_slice(), &[10.0, 14.0]);
        assert_eq!(yz.as_slice(), &[15.0, 21.0]);
        assert!(matches!(
            outer_products(&[], &[1.0], &[1.0]),
            Err(Error::DegenerateKeystream(_))
        ));
    }

    #[test]
    fn resize_examples() {
        let m = Matrix::from_vec(2, 2, vec![0.0, 2.0, 4.0, 6.0]).unwrap();
        let r = resize_bilinear(&m, 3);
        assert_eq!(r.as_slice(), &[0.0, 1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 5.0, 6.0]);
        assert_eq!(resize_bilinear(&m, 2), m);
        assert_eq!(resize_bilinear(&m, 1).as_slice(), &[0.0]);
        let c = resize_bilinear(&Matrix::filled(3, 7, 4.25), 11);
        assert!(c.as_slice().iter().all(|&v| v == 4.25));
        let single = resize_bilinear(&Matrix::filled(1, 1, -2.0), 4);
        assert!(single.as_slice().iter().all(|&v| v == -2.0));
    }

    #[test]
    fn resize_identity_on_non_square_source() {
        let m = Matrix::from_fn(5, 5, |r, c| (r * 7 + c * 3) as f64 * 0.37);
        assert_eq!(resize_bilinear(&m, 5), m);
    }

    #[test]
    fn quantization_examples() {
        let c = Matrix::from_vec(1, 5, vec![0.9, -255.5, 256.0, 1e12 + 3.7, -513.2]).unwrap();
        let q = quantize_mod256(&c);
        assert_eq!(
            q.as_slice(),
            &[0, 255, 0, ((1e12 as u64 + 3) % 256) as u8, 1]
        );
    }

    #[test]
    fn truncated_vectors_edge_cases() {
        let flat = Trajectory {
            t: vec![0.0, 1.0, 2.0, 3.0],
            x: vec![2.0; 4],
            y: vec![-3.0; 4],
            z: vec![5.0; 4],
        };
        let [a, b, c] = truncated_vectors(&flat, 0.999).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (1, 1, 1));
        assert!((a[0] - 4.0).abs() < 1e-12);

        let zero = integrate(&LorenzParams::default(), State3::default(), 0.0, 1.0, 0.1).unwrap();
        let [a, b, c] = truncated_vectors(&zero, 0.999).unwrap();
        assert!(a.is_empty() && b.is_empty() && c.is_empty());

        let empty = Trajectory {
            t: vec![],
            x: vec![],
            y: vec![],
            z: vec![],
        };
        assert!(truncated_vectors(&empty, 0.999).is_err());
    }

    #[test]
    fn keystream_rejects_tiny_sizes() {
        let key = SecretKey::new("abcdef", [5, 11, 17]).unwrap();
        assert!(build_round_keystream(&key, 1, &KeystreamConfig::default()).is_err());
    }

    #[test]
    fn component_assignment() {
        let labels: Vec<_> = Component::ALL.iter().map(|c| c.plane_label()).collect();
        assert_eq!(labels, ["XY", "XZ", "YZ"]);
    }
}
