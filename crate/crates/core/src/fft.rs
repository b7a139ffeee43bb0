// Thin wrappers over rustfft. Only the scalar planner is used: the SIMD
// planners pick code paths at runtime from CPU features, and keystream bytes
// must not depend on which machine runs the decryption.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlannerScalar};

use crate::grid::Matrix;

pub(crate) fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlannerScalar::new();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Unnormalised 2D transform of a row-major `rows x cols` buffer.
fn fft2(buf: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    plan(cols, inverse).process(buf);
    let mut t = transpose(buf, rows, cols);
    plan(rows, inverse).process(&mut t);
    buf.copy_from_slice(&transpose(&t, cols, rows));
}

fn transpose(buf: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); buf.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = buf[r * cols + c];
        }
    }
    out
}

/// Circular 2D convolution `c[i][j] = Σ a[p][q] b[(i-p) mod R][(j-q) mod C]`.
pub(crate) fn circular_convolve2(a: &Matrix, b: &Matrix) -> Matrix {
    let (rows, cols) = a.dims();
    let to_complex = |m: &Matrix| -> Vec<Complex64> {
        m.as_slice()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect()
    };
    let mut fa = to_complex(a);
    let mut fb = to_complex(b);
    fft2(&mut fa, rows, cols, false);
    fft2(&mut fb, rows, cols, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft2(&mut fa, rows, cols, true);
    let scale = (rows * cols) as f64;
    Matrix::from_vec(rows, cols, fa.iter().map(|z| z.re / scale).collect())
        .expect("length preserved")
}
