//! FFT helpers over d-dimensional complex arrays.
//!
//! Thin wrappers around rustfft applied axis by axis. Two uses in this crate:
//!
//! * windowed autocorrelations of weight tables (zero-padded, so the linear
//!   correlation is recovered without circular aliasing), and
//! * simultaneous evaluation of twisted sums over a root-of-unity lattice,
//!   where folding indices mod the grid size first makes the transform exact.

use ndarray::{ArrayD, Axis, Dimension, IxDyn};
use num_complex::Complex64;
use rustfft::FftPlanner;
pub use rustfft::FftDirection;

/// In-place transform along every axis. `FftDirection::Forward` applies
/// `sum_k x_k e^{-2 pi i k q / N}` per axis, `Inverse` the `+` sign; neither
/// normalizes.
pub fn fft_nd(data: &mut ArrayD<Complex64>, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    for axis in 0..data.ndim() {
        let len = data.shape()[axis];
        if len <= 1 {
            continue;
        }
        let fft = planner.plan_fft(len, direction);
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for mut lane in data.lanes_mut(Axis(axis)) {
            for (b, x) in buf.iter_mut().zip(lane.iter()) {
                *b = *x;
            }
            fft.process(&mut buf);
            for (x, b) in lane.iter_mut().zip(buf.iter()) {
                *x = *b;
            }
        }
    }
}

/// Windowed autocorrelation of a d-dimensional table:
///
/// ```text
/// c(m) = sum_k conj(a(k)) a(k+m),    both k and k+m inside the table,
/// ```
///
/// returned on the symmetric box `[-n, n]` (output shape `2 n_j + 1`, entry
/// `m` stored at offset `m + n`). Computed by zero-padding each axis to at
/// least `2 n_j + 1` and using the convolution theorem.
pub fn windowed_autocorrelation(table: &ArrayD<Complex64>) -> ArrayD<Complex64> {
    let shape: Vec<usize> = table.shape().to_vec();
    let padded_shape: Vec<usize> = shape
        .iter()
        .map(|&s| (2 * s - 1).max(1).next_power_of_two())
        .collect();
    let mut padded = ArrayD::zeros(IxDyn(&padded_shape));
    padded
        .slice_each_axis_mut(|ax| ndarray::Slice::from(0..shape[ax.axis.index()]))
        .assign(table);

    fft_nd(&mut padded, FftDirection::Forward);
    padded.mapv_inplace(|z| Complex64::new(z.norm_sqr(), 0.0));
    fft_nd(&mut padded, FftDirection::Inverse);
    let total: f64 = padded_shape.iter().map(|&s| s as f64).product();
    padded.mapv_inplace(|z| z / total);

    // inverse of |FFT|^2 puts c(m) at index m mod P
    let out_shape: Vec<usize> = shape.iter().map(|&s| 2 * s - 1).collect();
    let mut out = ArrayD::zeros(IxDyn(&out_shape));
    for (idx, v) in out.indexed_iter_mut() {
        let mut src = Vec::with_capacity(shape.len());
        for (axis, &i) in idx.slice().iter().enumerate() {
            let m = i as i64 - (shape[axis] as i64 - 1);
            let p = padded_shape[axis] as i64;
            src.push(m.rem_euclid(p) as usize);
        }
        *v = padded[IxDyn(&src)];
    }
    out
}

/// Twisted sums over the full root-of-unity lattice: given bins `f_b` on a
/// `G_1 x ... x G_d` grid, returns `S(q) = sum_b e^{+2 pi i <q/G, b>} f_b`
/// for every lattice point `q` (an unnormalized inverse DFT).
pub fn root_of_unity_sums(folded: &ArrayD<Complex64>) -> ArrayD<Complex64> {
    let mut data = folded.clone();
    fft_nd(&mut data, FftDirection::Inverse);
    data
}
