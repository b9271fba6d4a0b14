//! Multi-dimensional complex FFT over row-major arrays, axis by axis.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::Fft;

use crate::Scalar;

/// Applies `plans[a]` along every axis `a` of a row-major array of `shape`.
/// Unnormalized in both directions.
pub(crate) fn transform<T: Scalar>(data: &mut [Complex<T>], shape: &[usize], plans: &[Arc<dyn Fft<T>>]) {
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    let mut scratch = Vec::new();
    let mut lines = Vec::new();
    for axis in 0..shape.len() {
        let len = shape[axis];
        let inner: usize = shape[axis + 1..].iter().product();
        let plan = &plans[axis];
        let need = plan.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex::default());
        }
        if inner == 1 {
            plan.process_with_scratch(data, &mut scratch[..need]);
            continue;
        }
        let slab = len * inner;
        lines.resize(slab, Complex::default());
        for block in data.chunks_exact_mut(slab) {
            for l in 0..len {
                let row = &block[l * inner..(l + 1) * inner];
                for (i, &v) in row.iter().enumerate() {
                    lines[i * len + l] = v;
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch[..need]);
            for l in 0..len {
                let row = &mut block[l * inner..(l + 1) * inner];
                for (i, v) in row.iter_mut().enumerate() {
                    *v = lines[i * len + l];
                }
            }
        }
    }
}
