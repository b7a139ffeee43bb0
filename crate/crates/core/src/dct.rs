//! Orthonormal DCT-II / DCT-III in one and two dimensions, and selection of
//! the coefficients that carry a given fraction of the signal energy.
//!
//! Scaling is orthonormal (`w_0 = √(1/L)`, `w_k = √(2/L)`), so Parseval holds
//! and `idct(dct(x)) = x`. The 1D transform is computed through one complex FFT
//! of the even/odd reordered input (Makhoul's construction), which keeps the
//! 50 001-sample Lorenz arrays cheap.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::Fft;

use crate::fft;
use crate::grid::Matrix;
use crate::{Error, Result};

/// Default energy fraction retained from every transform.
pub const DEFAULT_ENERGY_FRACTION: f64 = 0.999;

/// Reusable plan for length-`len` transforms.
pub struct DctPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // e^{-iπk/(2L)}
    twiddles: Vec<Complex64>,
}

impl DctPlan {
    pub fn new(len: usize) -> Self {
        let twiddles = (0..len)
            .map(|k| {
                let angle = -PI * k as f64 / (2.0 * len as f64);
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Self {
            len,
            forward: fft::plan(len, false),
            inverse: fft::plan(len, true),
            twiddles,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn weight(&self, k: usize) -> f64 {
        let l = self.len as f64;
        if k == 0 {
            (1.0 / l).sqrt()
        } else {
            (2.0 / l).sqrt()
        }
    }

    /// Orthonormal DCT-II of `input` into `out`.
    pub fn forward(&self, input: &[f64], out: &mut [f64]) {
        let n = self.len;
        assert!(input.len() == n && out.len() == n);
        if n == 0 {
            return;
        }
        let mut v = vec![Complex64::default(); n];
        for i in 0..n.div_ceil(2) {
            v[i] = Complex64::new(input[2 * i], 0.0);
        }
        for i in 0..n / 2 {
            v[n - 1 - i] = Complex64::new(input[2 * i + 1], 0.0);
        }
        self.forward.process(&mut v);
        for k in 0..n {
            out[k] = (v[k] * self.twiddles[k]).re * self.weight(k);
        }
    }

    /// Orthonormal DCT-III (inverse of [`DctPlan::forward`]).
    pub fn inverse(&self, input: &[f64], out: &mut [f64]) {
        let n = self.len;
        assert!(input.len() == n && out.len() == n);
        if n == 0 {
            return;
        }
        // Undo the orthonormal weights, then V[k] = W^{-k} (X[k] - i X[N-k]).
        let raw: Vec<f64> = (0..n).map(|k| input[k] / self.weight(k)).collect();
        let mut v: Vec<Complex64> = (0..n)
            .map(|k| {
                let mirror = if k == 0 { 0.0 } else { raw[n - k] };
                Complex64::new(raw[k], -mirror) * self.twiddles[k].conj()
            })
            .collect();
        self.inverse.process(&mut v);
        let scale = n as f64;
        for i in 0..n.div_ceil(2) {
            out[2 * i] = v[i].re / scale;
        }
        for i in 0..n / 2 {
            out[2 * i + 1] = v[n - 1 - i].re / scale;
        }
    }
}

pub fn dct1(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    DctPlan::new(x.len()).forward(x, &mut out);
    out
}

pub fn idct1(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    DctPlan::new(x.len()).inverse(x, &mut out);
    out
}

fn separable(f: &Matrix, inverse: bool) -> Matrix {
    let (rows, cols) = f.dims();
    let apply = |plan: &DctPlan, m: &Matrix| -> Matrix {
        let mut out = Matrix::new(m.rows(), m.cols());
        for r in 0..m.rows() {
            if inverse {
                plan.inverse(m.row(r), out.row_mut(r));
            } else {
                plan.forward(m.row(r), out.row_mut(r));
            }
        }
        out
    };
    let row_plan = DctPlan::new(cols);
    let along_rows = apply(&row_plan, f);
    let col_plan = if rows == cols {
        row_plan
    } else {
        DctPlan::new(rows)
    };
    apply(&col_plan, &along_rows.transpose()).transpose()
}

/// 2D orthonormal DCT-II: rows first, then columns.
pub fn dct2(f: &Matrix) -> Matrix {
    separable(f, false)
}

/// Inverse of [`dct2`].
pub fn idct2(coeffs: &Matrix) -> Matrix {
    separable(coeffs, true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coeff {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Retained high-energy coefficients of one transform.
///
/// Entries are unique, in bounds, sorted by descending `|value|` (row-major
/// position breaks ties) and never smaller than 1 in magnitude.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseCoeffs {
    rows: usize,
    cols: usize,
    entries: Vec<Coeff>,
    energy_fraction: f64,
}

fn by_magnitude(a: &Coeff, b: &Coeff) -> Ordering {
    b.value
        .abs()
        .total_cmp(&a.value.abs())
        .then((a.row, a.col).cmp(&(b.row, b.col)))
}

impl SparseCoeffs {
    /// Builds a coefficient set, validating positions and the magnitude floor.
    /// `energy_fraction` is the share of the source energy these entries carry.
    pub fn new(
        rows: usize,
        cols: usize,
        mut entries: Vec<Coeff>,
        energy_fraction: f64,
    ) -> Result<Self> {
        let mut seen = vec![false; rows * cols];
        for e in &entries {
            if e.row >= rows || e.col >= cols {
                return Err(Error::DimensionMismatch {
                    expected: (rows, cols),
                    got: (e.row, e.col),
                });
            }
            if e.value.is_nan() || e.value.abs() < 1.0 {
                return Err(Error::EmbeddingDomain {
                    row: e.row,
                    col: e.col,
                    value: e.value,
                });
            }
            let slot = &mut seen[e.row * cols + e.col];
            if *slot {
                return Err(Error::InvalidParams(format!(
                    "duplicate coefficient at ({}, {})",
                    e.row, e.col
                )));
            }
            *slot = true;
        }
        entries.sort_by(by_magnitude);
        Ok(Self {
            rows,
            cols,
            entries,
            energy_fraction,
        })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
            energy_fraction: 1.0,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Coeff] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn energy_fraction(&self) -> f64 {
        self.energy_fraction
    }

    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|e| e.value * e.value).sum()
    }

    /// Values ordered by ascending row-major position.
    pub fn values_in_index_order(&self) -> Vec<f64> {
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|e| (e.row, e.col));
        sorted.into_iter().map(|e| e.value).collect()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::new(self.rows, self.cols);
        for e in &self.entries {
            m[(e.row, e.col)] = e.value;
        }
        m
    }

    /// Applies `f` to every value, keeping positions.
    pub(crate) fn map_values(mut self, f: impl Fn(f64) -> f64) -> Self {
        for e in &mut self.entries {
            e.value = f(e.value);
        }
        self.entries.sort_by(by_magnitude);
        self
    }
}

/// Greedy selection by descending magnitude until the retained energy reaches
/// `fraction` of the total, followed by dropping every retained coefficient
/// with `|value| < 1`.
pub fn energy_select(coeffs: &Matrix, fraction: f64) -> Result<SparseCoeffs> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "energy fraction must be in (0, 1], got {fraction}"
        )));
    }
    let (rows, cols) = coeffs.dims();
    let mut order: Vec<Coeff> = coeffs
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &value)| Coeff {
            row: i / cols.max(1),
            col: i % cols.max(1),
            value,
        })
        .collect();
    order.sort_by(by_magnitude);

    // Summing in the same order as the scan makes `fraction == 1` reach the
    // total exactly.
    let total: f64 = order.iter().map(|c| c.value * c.value).sum();
    if total == 0.0 {
        return Ok(SparseCoeffs::empty(rows, cols));
    }
    let target = fraction * total;
    let mut cumulative = 0.0;
    let mut taken = 0;
    for c in &order {
        if cumulative >= target {
            break;
        }
        cumulative += c.value * c.value;
        taken += 1;
    }
    order.truncate(taken);
    order.retain(|c| c.value.abs() >= 1.0);
    let kept: f64 = order.iter().map(|c| c.value * c.value).sum();
    Ok(SparseCoeffs {
        rows,
        cols,
        entries: order,
        energy_fraction: kept / total,
    })
}

/// [`energy_select`] over a sequence, treated as a `1 x L` matrix.
pub fn energy_select_1d(coeffs: &[f64], fraction: f64) -> Result<SparseCoeffs> {
    let m = Matrix::from_vec(1, coeffs.len(), coeffs.to_vec())?;
    energy_select(&m, fraction)
}

/// Scatters the retained coefficients into a zero matrix and inverts the DCT2.
pub fn reconstruct_sparse(s: &SparseCoeffs) -> Matrix {
    idct2(&s.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dc_only_sequence() {
        let x = dct1(&[1.0, 1.0, 1.0, 1.0]);
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!(x[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn odd_and_tiny_lengths_round_trip() {
        for n in [1usize, 2, 3, 5, 7, 16, 31, 100] {
            let x: Vec<f64> = (0..n).map(|i| ((i * 37 + 11) % 17) as f64 - 8.0).collect();
            let back = idct1(&dct1(&x));
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() < 1e-9, "n = {n}");
            }
        }
    }

    #[test]
    fn constant_matrix_is_dc_only() {
        let c = 3.5;
        let n = 8;
        let f = dct2(&Matrix::filled(n, n, c));
        assert!((f[(0, 0)] - c * n as f64).abs() < 1e-10);
        let rest = f.as_slice()[1..]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(rest < 1e-10);
        assert_eq!(dct2(&Matrix::new(4, 4)), Matrix::new(4, 4));
    }

    #[test]
    fn dc_only_inverse_is_constant() {
        let mut f = Matrix::new(6, 6);
        f[(0, 0)] = 12.0;
        let x = idct2(&f);
        assert!(x.as_slice().iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn rectangular_round_trip() {
        let f = Matrix::from_fn(3, 5, |r, c| (r * 5 + c) as f64);
        assert!(idct2(&dct2(&f)).max_abs_diff(&f) < 1e-10);
    }

    #[test]
    fn selection_of_dc_only() {
        let mut f = Matrix::new(4, 4);
        f[(0, 0)] = 40.0;
        let s = energy_select(&f, 0.999).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.energy_fraction(), 1.0);
    }

    #[test]
    fn selection_of_zero_energy_is_empty() {
        let s = energy_select(&Matrix::new(3, 3), 0.999).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.energy_fraction(), 1.0);
        assert_eq!(reconstruct_sparse(&s), Matrix::new(3, 3));
    }

    #[test]
    fn selection_is_greedy_and_drops_sub_unit_values() {
        // energies 100, 36, 0.25, 0.01 -> total 136.26; 0.999 needs the first three,
        // then 0.5 falls below the magnitude floor.
        let m = Matrix::from_vec(1, 4, vec![0.5, -10.0, 0.1, 6.0]).unwrap();
        let s = energy_select(&m, 0.999).unwrap();
        let vals: Vec<f64> = s.entries().iter().map(|c| c.value).collect();
        assert_eq!(vals, vec![-10.0, 6.0]);
        assert!((s.energy_fraction() - 136.0 / 136.26).abs() < 1e-12);
        assert_eq!(s.values_in_index_order(), vec![-10.0, 6.0]);
    }

    #[test]
    fn ties_break_by_row_major_position() {
        let m = Matrix::from_vec(2, 2, vec![-5.0, 5.0, 5.0, -5.0]).unwrap();
        let s = energy_select(&m, 0.5).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!((s.entries()[0].row, s.entries()[0].col), (0, 0));
        assert_eq!((s.entries()[1].row, s.entries()[1].col), (0, 1));
    }

    #[test]
    fn fraction_is_validated() {
        let m = Matrix::filled(2, 2, 1.0);
        assert!(energy_select(&m, 0.0).is_err());
        assert!(energy_select(&m, 1.5).is_err());
        assert!(energy_select(&m, 1.0).is_ok());
    }

    #[test]
    fn full_selection_reconstructs() {
        // every coefficient has |c| >= 1.5, so the magnitude floor never fires
        let spectrum = Matrix::from_fn(8, 8, |r, c| {
            let v = 1.5 + ((r * 29 + c * 13) % 40) as f64;
            if (r + c) % 3 == 0 {
                -v
            } else {
                v
            }
        });
        let f = idct2(&spectrum);
        let s = energy_select(&dct2(&f), 1.0).unwrap();
        assert_eq!(s.len(), 64);
        assert!(reconstruct_sparse(&s).max_abs_diff(&f) < 1e-9);
    }

    #[test]
    fn sparse_constructor_validates() {
        let ok = SparseCoeffs::new(
            2,
            2,
            vec![Coeff {
                row: 1,
                col: 1,
                value: -3.0,
            }],
            1.0,
        );
        assert!(ok.is_ok());
        let small = SparseCoeffs::new(
            2,
            2,
            vec![Coeff {
                row: 0,
                col: 0,
                value: 0.5,
            }],
            1.0,
        );
        assert!(matches!(small, Err(Error::EmbeddingDomain { .. })));
        let oob = SparseCoeffs::new(
            2,
            2,
            vec![Coeff {
                row: 2,
                col: 0,
                value: 5.0,
            }],
            1.0,
        );
        assert!(oob.is_err());
        let dup = SparseCoeffs::new(
            2,
            2,
            vec![
                Coeff {
                    row: 0,
                    col: 0,
                    value: 5.0,
                },
                Coeff {
                    row: 0,
                    col: 0,
                    value: 6.0,
                },
            ],
            1.0,
        );
        assert!(dup.is_err());
    }
}
