//! Dense tensor helpers shared by the rotor and top engines.

use std::sync::Arc;

use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex64;
use rustfft::Fft;

/// Applies a 1-D transform along `axis` to every lane, then scales.
pub(crate) fn transform_axis(
    data: &mut ArrayD<Complex64>,
    axis: usize,
    fft: &Arc<dyn Fft<f64>>,
    scale: f64,
) {
    let len = data.shape()[axis];
    let mut buffer = vec![Complex64::new(0.0, 0.0); len];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for mut lane in data.lanes_mut(Axis(axis)) {
        match lane.as_slice_mut() {
            Some(slice) => {
                fft.process_with_scratch(slice, &mut scratch);
                slice.iter_mut().for_each(|z| *z *= scale);
            }
            None => {
                for (b, z) in buffer.iter_mut().zip(lane.iter()) {
                    *b = *z;
                }
                fft.process_with_scratch(&mut buffer, &mut scratch);
                for (z, b) in lane.iter_mut().zip(&buffer) {
                    *z = *b * scale;
                }
            }
        }
    }
}

/// Multiplies `data` elementwise by the outer product of per-axis factors.
pub(crate) fn multiply_separable(data: &mut ArrayD<Complex64>, factors: &[Vec<Complex64>]) {
    for (axis, factor) in factors.iter().enumerate() {
        debug_assert_eq!(factor.len(), data.shape()[axis]);
        for (k, mut slab) in data.axis_iter_mut(Axis(axis)).enumerate() {
            let f = factor[k];
            if f != Complex64::new(1.0, 0.0) {
                slab.mapv_inplace(|z| z * f);
            }
        }
    }
}

/// Per-axis marginal probability distributions of `|data|²`.
pub(crate) fn marginals(data: &ArrayD<Complex64>) -> Vec<Vec<f64>> {
    let shape = data.shape().to_vec();
    let mut out: Vec<Vec<f64>> = shape.iter().map(|&m| vec![0.0; m]).collect();
    let mut index = vec![0usize; shape.len()];
    for z in data.iter() {
        let w = z.norm_sqr();
        for (axis, &i) in index.iter().enumerate() {
            out[axis][i] += w;
        }
        increment(&mut index, &shape);
    }
    out
}

/// Row-major multi-index increment.
pub(crate) fn increment(index: &mut [usize], shape: &[usize]) {
    for axis in (0..shape.len()).rev() {
        index[axis] += 1;
        if index[axis] < shape[axis] {
            return;
        }
        index[axis] = 0;
    }
}

/// Copies `src` into a zero tensor of `shape`, offset by `offset` along each axis.
pub(crate) fn embed(src: &ArrayD<Complex64>, shape: &[usize], offset: &[usize]) -> ArrayD<Complex64> {
    let mut out = ArrayD::zeros(IxDyn(shape));
    let mut view = out.view_mut();
    for (axis, (&o, &m)) in offset.iter().zip(src.shape()).enumerate() {
        view.slice_axis_inplace(Axis(axis), ndarray::Slice::from(o..o + m));
    }
    view.assign(src);
    out
}

pub(crate) fn norm_sqr(data: &ArrayD<Complex64>) -> f64 {
    data.iter().map(|z| z.norm_sqr()).sum()
}

/// `⟨a|b⟩`.
pub(crate) fn inner(a: &ArrayD<Complex64>, b: &ArrayD<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
