//! Bipartite purity and linear entropy of pure states.

use nalgebra::{DMatrix, DVector};
use ndarray::ArrayD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::IndexSet;

/// Rows or columns lighter than this are dropped before forming the Gram matrix.
const NEGLIGIBLE_WEIGHT: f64 = 1e-24;

/// A split of the rotors (or tops) into subsystems `A` and `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    a: IndexSet,
    b: IndexSet,
}

impl Bipartition {
    pub fn new(a: IndexSet, body_count: usize) -> Result<Self> {
        if a.is_empty() || a.len() >= body_count || a.iter().any(|&j| j >= body_count) {
            return Err(Error::InvalidIndexSet(format!(
                "subsystem A = {a:?} is not a nonempty proper subset of {body_count} bodies"
            )));
        }
        let b = (0..body_count).filter(|j| !a.contains(j)).collect();
        Ok(Self { a, b })
    }

    /// `A = {0}`, the rest in `B`.
    pub fn first(body_count: usize) -> Result<Self> {
        Self::new([0].into_iter().collect(), body_count)
    }

    pub fn a(&self) -> &IndexSet {
        &self.a
    }

    pub fn b(&self) -> &IndexSet {
        &self.b
    }

    pub fn body_count(&self) -> usize {
        self.a.len() + self.b.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub t: usize,
    pub purity: f64,
    pub s_lin: f64,
}

impl EntropyRecord {
    pub fn new(t: usize, purity: f64) -> Self {
        Self {
            t,
            purity,
            s_lin: 1.0 - purity,
        }
    }
}

/// Amplitudes reshaped into a `d_A × d_B` matrix (row-major), bodies of each
/// side kept in ascending order.
pub fn bipartite_matrix(amplitudes: &ArrayD<Complex64>, part: &Bipartition) -> Result<(usize, usize, Vec<Complex64>)> {
    if amplitudes.ndim() != part.body_count() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} bodies, bipartition {}",
            amplitudes.ndim(),
            part.body_count()
        )));
    }
    let order: Vec<usize> = part.a.iter().chain(part.b.iter()).copied().collect();
    let d_a: usize = part.a.iter().map(|&j| amplitudes.shape()[j]).product();
    let d_b: usize = part.b.iter().map(|&j| amplitudes.shape()[j]).product();
    let permuted = amplitudes.view().permuted_axes(order);
    let data: Vec<Complex64> = permuted.iter().copied().collect();
    Ok((d_a, d_b, data))
}

/// `Tr ρ_A²` as `‖ΨΨ†‖_F²` on the smaller side of the reshaped amplitude matrix.
pub fn schmidt_purity(amplitudes: &ArrayD<Complex64>, part: &Bipartition) -> Result<f64> {
    let (d_a, d_b, data) = bipartite_matrix(amplitudes, part)?;
    Ok(matrix_purity(d_a, d_b, &data))
}

pub(crate) fn matrix_purity(rows: usize, cols: usize, data: &[Complex64]) -> f64 {
    let mut row_w = vec![0.0; rows];
    let mut col_w = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            let w = data[r * cols + c].norm_sqr();
            row_w[r] += w;
            col_w[c] += w;
        }
    }
    let keep_r: Vec<usize> = (0..rows).filter(|&r| row_w[r] > NEGLIGIBLE_WEIGHT).collect();
    let keep_c: Vec<usize> = (0..cols).filter(|&c| col_w[c] > NEGLIGIBLE_WEIGHT).collect();
    let (short, long, transpose) = if keep_r.len() <= keep_c.len() {
        (&keep_r, &keep_c, false)
    } else {
        (&keep_c, &keep_r, true)
    };
    let at = |i: usize, k: usize| {
        if transpose {
            data[long[k] * cols + short[i]]
        } else {
            data[short[i] * cols + long[k]]
        }
    };
    let d = short.len();
    let n = long.len();
    // Z = [X | Y], W = [Y | −X]: G_re = Z Zᵀ, G_im = Z Wᵀ with the sign absorbed by squaring.
    let z = DMatrix::<f64>::from_fn(d, 2 * n, |i, k| if k < n { at(i, k).re } else { at(i, k - n).im });
    let w = DMatrix::<f64>::from_fn(d, 2 * n, |i, k| if k < n { at(i, k).im } else { -at(i, k - n).re });
    let g_re = &z * z.transpose();
    let g_im = &z * w.transpose();
    g_re.norm_squared() + g_im.norm_squared()
}

/// Schmidt coefficients (singular values) in descending order.
pub fn schmidt_coefficients(amplitudes: &ArrayD<Complex64>, part: &Bipartition) -> Result<Vec<f64>> {
    let (d_a, d_b, data) = bipartite_matrix(amplitudes, part)?;
    let m = DMatrix::<Complex64>::from_row_slice(d_a, d_b, &data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Purity of `Σ_ab φ_a χ_b e^{−iE_ab t} |a⟩|b⟩` through the separable contraction
/// `Σ_{a,a'} P_a P_a' |Σ_b Q_b e^{−i(E_ab − E_a'b)t}|²`.
pub fn product_basis_purity(phi: &[Complex64], chi: &[Complex64], energies: &DMatrix<f64>, t: f64) -> Result<f64> {
    let (p, q) = check_product_inputs(phi, chi, energies)?;
    let (da, db) = (p.len(), q.len());
    let u = DMatrix::<Complex64>::from_fn(da, db, |a, b| Complex64::from_polar(q[b].sqrt(), -energies[(a, b)] * t));
    let g = &u * u.adjoint();
    let pv = DVector::from_vec(p);
    let mut purity = 0.0;
    for a in 0..da {
        for a2 in 0..da {
            purity += pv[a] * pv[a2] * g[(a, a2)].norm_sqr();
        }
    }
    Ok(purity)
}

/// `⟨ε²⟩ = 4 Σ P_a Q_b F_ab²` with `F` the doubly centred quasienergy matrix.
pub fn product_basis_eps2(phi: &[Complex64], chi: &[Complex64], energies: &DMatrix<f64>) -> Result<f64> {
    let (p, q) = check_product_inputs(phi, chi, energies)?;
    let (da, db) = (p.len(), q.len());
    let row: Vec<f64> = (0..da).map(|a| (0..db).map(|b| q[b] * energies[(a, b)]).sum()).collect();
    let col: Vec<f64> = (0..db).map(|b| (0..da).map(|a| p[a] * energies[(a, b)]).sum()).collect();
    let total: f64 = (0..da).map(|a| p[a] * row[a]).sum();
    let mut acc = 0.0;
    for a in 0..da {
        for b in 0..db {
            let f = energies[(a, b)] - row[a] - col[b] + total;
            acc += p[a] * q[b] * f * f;
        }
    }
    Ok(4.0 * acc)
}

fn check_product_inputs(phi: &[Complex64], chi: &[Complex64], energies: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    if energies.nrows() != phi.len() || energies.ncols() != chi.len() {
        return Err(Error::DimensionMismatch(format!(
            "quasienergies {}×{} for coefficient lengths {} and {}",
            energies.nrows(),
            energies.ncols(),
            phi.len(),
            chi.len()
        )));
    }
    let p: Vec<f64> = phi.iter().map(|z| z.norm_sqr()).collect();
    let q: Vec<f64> = chi.iter().map(|z| z.norm_sqr()).collect();
    for (name, w) in [("φ", &p), ("χ", &q)] {
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("coefficients {name} have norm² {s}, expected 1")));
        }
    }
    Ok((p, q))
}
