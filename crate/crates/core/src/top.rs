//! Coupled kicked tops of integer spin `j`.
//!
//! One period is `U = U_f U_k`: the twist `U_k = exp(−iΣ β_n J_nz²/(2j))` acts
//! first, then `U_f = exp(−iH_f(J_x))` with `H_f` a polynomial in the
//! commuting `J_nx`. The twist carries the resonance, `β_n = 4πj r_n/s_n + δβ_n`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::Bipartition;
use crate::error::{Error, Result};
use crate::potential::{IndexSet, Parity, SymmetryClass};
use crate::resonance::ResonancePlan;
use crate::tensor;

/// Default cap on `d^N`.
pub const DEFAULT_MAX_TOP_DIMENSION: usize = 1 << 22;

/// Equator gate on the initial state: `|⟨J_z⟩| ≤ f·j` and `⟨J_z²⟩ ≤ f·j²`.
pub const EQUATOR_FRACTION: f64 = 0.05;

/// `c · j^(1−Σk) · Π_n J_nx^{k_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopTerm {
    coefficient: f64,
    powers: Vec<u32>,
}

impl TopTerm {
    pub fn new(coefficient: f64, powers: Vec<u32>) -> Result<Self> {
        if powers.iter().all(|&k| k == 0) {
            return Err(Error::InvalidPotential(
                "every H_f term needs at least one spin factor".into(),
            ));
        }
        if !coefficient.is_finite() {
            return Err(Error::InvalidPotential("non-finite H_f coefficient".into()));
        }
        Ok(Self { coefficient, powers })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    /// Parity under `J_nx → −J_nx` for `n ∈ shifted`.
    pub fn parity(&self, shifted: &IndexSet) -> Parity {
        let s: u32 = shifted.iter().filter_map(|&n| self.powers.get(n)).sum();
        if s % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn value(&self, spin: u32, x: &[f64]) -> f64 {
        let scale = (spin as f64).powi(1 - self.degree() as i32);
        self.coefficient
            * scale
            * self
                .powers
                .iter()
                .zip(x)
                .map(|(&k, &v)| v.powi(k as i32))
                .product::<f64>()
    }
}

/// Kicked-top system: spin, twists and the rotation polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopSpec {
    spin: u32,
    twists: ResonancePlan,
    terms: Vec<TopTerm>,
}

impl TopSpec {
    /// `spin` is the integer `j`; the plan's detuning is `δβ_n`.
    pub fn new(spin: u32, twists: ResonancePlan, terms: Vec<TopTerm>) -> Result<Self> {
        if spin == 0 {
            return Err(Error::InvalidArgument("spin j must be a positive integer".into()));
        }
        let n = twists.rotor_count();
        if let Some(t) = terms.iter().find(|t| t.powers.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "H_f term with {} powers for {n} tops",
                t.powers.len()
            )));
        }
        Ok(Self { spin, twists, terms })
    }

    /// Rejects half-integer spins given as `2j`.
    pub fn from_doubled_spin(doubled: u32, twists: ResonancePlan, terms: Vec<TopTerm>) -> Result<Self> {
        if doubled % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "half-integer spin {doubled}/2 is not supported"
            )));
        }
        Self::new(doubled / 2, twists, terms)
    }

    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn dimension(&self) -> usize {
        2 * self.spin as usize + 1
    }

    pub fn top_count(&self) -> usize {
        self.twists.rotor_count()
    }

    pub fn twists(&self) -> &ResonancePlan {
        &self.twists
    }

    pub fn terms(&self) -> &[TopTerm] {
        &self.terms
    }

    /// Tops at even twist order.
    pub fn shifted(&self) -> IndexSet {
        self.twists.even_set()
    }

    pub fn hamiltonian_value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(self.spin, x)).sum()
    }

    fn filtered(&self, keep: impl Fn(&TopTerm) -> bool) -> Vec<TopTerm> {
        self.terms.iter().filter(|t| keep(t)).cloned().collect()
    }

    /// `(H_{nf+}, H_{nf−})`: terms involving top `n`, split by parity.
    pub fn effective_parts(&self, n: usize) -> (Vec<TopTerm>, Vec<TopTerm>) {
        let s = self.shifted();
        (
            self.filtered(|t| t.powers[n] > 0 && t.parity(&s) == Parity::Even),
            self.filtered(|t| t.powers[n] > 0 && t.parity(&s) == Parity::Odd),
        )
    }

    pub fn effective_class(&self, n: usize) -> SymmetryClass {
        let (p, m) = self.effective_parts(n);
        class_of(&p, &m)
    }

    /// Coupling terms across `part`.
    pub fn interaction_terms(&self, part: &Bipartition) -> Vec<TopTerm> {
        self.filtered(|t| {
            let touches = |set: &IndexSet| set.iter().any(|&n| t.powers[n] > 0);
            touches(part.a()) && touches(part.b())
        })
    }

    pub fn interaction_class(&self, part: &Bipartition) -> SymmetryClass {
        let s = self.shifted();
        let terms = self.interaction_terms(part);
        let (p, m): (Vec<TopTerm>, Vec<TopTerm>) = terms.into_iter().partition(|t| t.parity(&s) == Parity::Even);
        class_of(&p, &m)
    }

    /// Twist phase `2π r m²/s + δβ m²/(2j)` of top `n` at `J_z = m`.
    fn twist_phase(&self, n: usize, m: i64) -> f64 {
        let r = self.twists.resonance(n);
        let s = r.order as i128;
        let residue = ((r.numerator as i128) * (m as i128) * (m as i128)).rem_euclid(s);
        TAU * residue as f64 / s as f64 + r.detuning * (m * m) as f64 / (2.0 * self.spin as f64)
    }
}

fn class_of(plus: &[TopTerm], minus: &[TopTerm]) -> SymmetryClass {
    match (plus.is_empty(), minus.is_empty()) {
        (true, true) => SymmetryClass::Zero,
        (false, true) => SymmetryClass::Symmetric,
        (true, false) => SymmetryClass::Antisymmetric,
        (false, false) => SymmetryClass::Asymmetric,
    }
}

/// `(J_x, J_z)` for spin `j` in the basis `m = −j, …, j`.
pub fn build_spin_ops(spin: u32) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = 2 * spin as usize + 1;
    let j = spin as f64;
    let jz = DMatrix::from_fn(d, d, |a, b| if a == b { a as f64 - j } else { 0.0 });
    let jx = DMatrix::from_fn(d, d, |a, b| {
        let (ma, mb) = (a as f64 - j, b as f64 - j);
        if a == b + 1 {
            0.5 * (j * (j + 1.0) - mb * (mb + 1.0)).sqrt()
        } else if b == a + 1 {
            0.5 * (j * (j + 1.0) - ma * (ma + 1.0)).sqrt()
        } else {
            0.0
        }
    });
    (jx, jz)
}

/// `J_y = (J₊ − J₋)/2i` as a complex matrix.
pub fn spin_y(spin: u32) -> DMatrix<Complex64> {
    let d = 2 * spin as usize + 1;
    let j = spin as f64;
    DMatrix::from_fn(d, d, |a, b| {
        let mb = b as f64 - j;
        let ma = a as f64 - j;
        if a == b + 1 {
            Complex64::new(0.0, -0.5 * (j * (j + 1.0) - mb * (mb + 1.0)).sqrt())
        } else if b == a + 1 {
            Complex64::new(0.0, 0.5 * (j * (j + 1.0) - ma * (ma + 1.0)).sqrt())
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Amplitudes over the product `J_z` basis; axis `n` indexes `m_n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopState {
    spin: u32,
    amplitudes: ArrayD<Complex64>,
}

impl TopState {
    pub fn from_amplitudes(spin: u32, amplitudes: ArrayD<Complex64>) -> Result<Self> {
        let d = 2 * spin as usize + 1;
        if amplitudes.shape().iter().any(|&s| s != d) {
            return Err(Error::DimensionMismatch(format!(
                "amplitude shape {:?} for spin {spin}",
                amplitudes.shape()
            )));
        }
        let norm = tensor::norm_sqr(&amplitudes).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument("state has zero or non-finite norm".into()));
        }
        Ok(Self {
            spin,
            amplitudes: amplitudes.mapv(|z| z / norm),
        })
    }

    /// `⊗_n |J_nz = m_n⟩`.
    pub fn jz_eigenstate(spin: u32, m: &[i64], max_dimension: usize) -> Result<Self> {
        let d = 2 * spin as usize + 1;
        let total = d
            .checked_pow(m.len() as u32)
            .filter(|&t| t <= max_dimension)
            .ok_or_else(|| Error::ResourceCap(format!("{d}^{} exceeds the cap {max_dimension}", m.len())))?;
        debug_assert!(total > 0);
        let mut index = Vec::with_capacity(m.len());
        for &mn in m {
            if mn.unsigned_abs() > spin as u64 {
                return Err(Error::OutOfWindow { momentum: m.to_vec() });
            }
            index.push((mn + spin as i64) as usize);
        }
        let mut amplitudes = ArrayD::zeros(IxDyn(&vec![d; m.len()]));
        amplitudes[IxDyn(&index)] = Complex64::new(1.0, 0.0);
        Ok(Self { spin, amplitudes })
    }

    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn top_count(&self) -> usize {
        self.amplitudes.ndim()
    }

    pub fn amplitudes(&self) -> &ArrayD<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        tensor::norm_sqr(&self.amplitudes)
    }
}

/// `⟨J_n⟩` and `⟨J_n²⟩` per top along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub mean: Vec<f64>,
    pub second: Vec<f64>,
}

/// Propagator with the `J_x` eigenbasis and `U_f` phases precomputed.
pub struct TopEngine {
    spec: TopSpec,
    /// Columns are `J_x` eigenvectors in ascending eigenvalue order.
    basis: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    rotation_phases: ArrayD<Complex64>,
    twist_factors: Vec<Vec<Complex64>>,
}

impl TopEngine {
    pub fn new(spec: TopSpec, max_dimension: usize) -> Result<Self> {
        let d = spec.dimension();
        let n = spec.top_count();
        let total = d
            .checked_pow(n as u32)
            .filter(|&t| t <= max_dimension)
            .ok_or_else(|| Error::ResourceCap(format!("{d}^{n} exceeds the cap {max_dimension}")))?;
        debug_assert!(total > 0);
        let (jx, _) = build_spin_ops(spec.spin());
        let eig = SymmetricEigen::new(jx);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let basis = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        // The spectrum is exactly −j..j; rounding removes eigensolver noise.
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].round()).collect();

        let shape = vec![d; n];
        let mut rotation_phases = ArrayD::<Complex64>::zeros(IxDyn(&shape));
        let mut index = vec![0usize; n];
        let mut x = vec![0.0; n];
        for z in rotation_phases.iter_mut() {
            for k in 0..n {
                x[k] = eigenvalues[index[k]];
            }
            *z = Complex64::from_polar(1.0, -spec.hamiltonian_value(&x));
            tensor::increment(&mut index, &shape);
        }
        let j = spec.spin() as i64;
        let twist_factors = (0..n)
            .map(|t| (-j..=j).map(|m| Complex64::from_polar(1.0, -spec.twist_phase(t, m))).collect())
            .collect();
        Ok(Self {
            spec,
            basis,
            eigenvalues,
            rotation_phases,
            twist_factors,
        })
    }

    pub fn spec(&self) -> &TopSpec {
        &self.spec
    }

    pub fn initial_state(&self, m: &[i64]) -> Result<TopState> {
        if m.len() != self.spec.top_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} quantum numbers for {} tops",
                m.len(),
                self.spec.top_count()
            )));
        }
        TopState::jz_eigenstate(self.spec.spin(), m, usize::MAX)
    }

    fn check_state(&self, state: &TopState) -> Result<()> {
        if state.spin != self.spec.spin() || state.top_count() != self.spec.top_count() {
            return Err(Error::DimensionMismatch(format!(
                "state of {} spin-{} tops for a system of {} spin-{} tops",
                state.top_count(),
                state.spin,
                self.spec.top_count(),
                self.spec.spin()
            )));
        }
        Ok(())
    }

    fn to_x_basis(&self, data: &mut ArrayD<Complex64>) {
        let vt = self.basis.transpose();
        for axis in 0..data.ndim() {
            multiply_axis(data, axis, &vt);
        }
    }

    fn from_x_basis(&self, data: &mut ArrayD<Complex64>) {
        for axis in 0..data.ndim() {
            multiply_axis(data, axis, &self.basis);
        }
    }

    /// Twist, then rotation.
    pub fn step(&self, state: &mut TopState) -> Result<()> {
        self.check_state(state)?;
        tensor::multiply_separable(&mut state.amplitudes, &self.twist_factors);
        self.to_x_basis(&mut state.amplitudes);
        ndarray::Zip::from(&mut state.amplitudes)
            .and(&self.rotation_phases)
            .for_each(|z, &p| *z *= p);
        self.from_x_basis(&mut state.amplitudes);
        Ok(())
    }

    pub fn evolve(&self, state: &mut TopState, t: usize) -> Result<()> {
        for _ in 0..t {
            self.step(state)?;
        }
        Ok(())
    }

    pub fn jz_moments(&self, state: &TopState) -> SpinMoments {
        moments_from(&tensor::marginals(&state.amplitudes), self.spec.spin())
    }

    pub fn jx_moments(&self, state: &TopState) -> SpinMoments {
        let mut x = state.amplitudes.clone();
        self.to_x_basis(&mut x);
        let marg = tensor::marginals(&x);
        let mean = marg
            .iter()
            .map(|p| p.iter().zip(&self.eigenvalues).map(|(w, e)| w * e).sum())
            .collect();
        let second = marg
            .iter()
            .map(|p| p.iter().zip(&self.eigenvalues).map(|(w, e)| w * e * e).sum())
            .collect();
        SpinMoments { mean, second }
    }

    /// `J_nz |ψ⟩`.
    pub fn apply_jz(&self, data: &ArrayD<Complex64>, n: usize) -> ArrayD<Complex64> {
        let j = self.spec.spin() as f64;
        let mut out = data.clone();
        for (k, mut slab) in out.axis_iter_mut(Axis(n)).enumerate() {
            let m = k as f64 - j;
            slab.mapv_inplace(|z| z * m);
        }
        out
    }

    /// `H |ψ⟩` for a polynomial `H` in the `J_x`.
    fn apply_polynomial(&self, terms: &[TopTerm], data: &ArrayD<Complex64>) -> ArrayD<Complex64> {
        let n = self.spec.top_count();
        let mut x_rep = data.clone();
        self.to_x_basis(&mut x_rep);
        let shape = x_rep.shape().to_vec();
        let mut index = vec![0usize; n];
        let mut x = vec![0.0; n];
        for z in x_rep.iter_mut() {
            for k in 0..n {
                x[k] = self.eigenvalues[index[k]];
            }
            let h: f64 = terms.iter().map(|t| t.value(self.spec.spin(), &x)).sum();
            *z *= h;
            tensor::increment(&mut index, &shape);
        }
        self.from_x_basis(&mut x_rep);
        x_rep
    }

    /// `−i[J_nz, H] |ψ⟩`.
    fn apply_displacement(&self, terms: &[TopTerm], n: usize, data: &ArrayD<Complex64>) -> ArrayD<Complex64> {
        let zh = self.apply_jz(&self.apply_polynomial(terms, data), n);
        let hz = self.apply_polynomial(terms, &self.apply_jz(data, n));
        (zh - hz).mapv(|z| z * Complex64::new(0.0, -1.0))
    }

    /// Linearised drift and spreading parameters of top `n` for `initial`.
    pub fn top_params(&self, n: usize, initial: &TopState) -> Result<TopParams> {
        self.check_state(initial)?;
        if n >= self.spec.top_count() {
            return Err(Error::InvalidIndexSet(format!("top index {n} out of range")));
        }
        let j = self.spec.spin() as f64;
        let m = self.jz_moments(initial);
        if m.mean[n].abs() > EQUATOR_FRACTION * j || m.second[n] > EQUATOR_FRACTION * j * j {
            return Err(Error::InvalidArgument(format!(
                "top {} starts off the equator: ⟨J_z⟩ = {}, ⟨J_z²⟩ = {} (limits {} and {})",
                n + 1,
                m.mean[n],
                m.second[n],
                EQUATOR_FRACTION * j,
                EQUATOR_FRACTION * j * j
            )));
        }
        let (plus, minus) = self.spec.effective_parts(n);
        let psi = initial.amplitudes();
        let dp = self.apply_displacement(&plus, n, psi);
        let dm = self.apply_displacement(&minus, n, psi);
        Ok(TopParams {
            alpha_plus: tensor::inner(psi, &dp).re,
            alpha_minus: tensor::inner(psi, &dm).re,
            lambda_plus: tensor::norm_sqr(&dp),
            lambda_minus: tensor::norm_sqr(&dm),
            kappa: tensor::inner(&dp, &dm).re,
            class: class_of(&plus, &minus),
        })
    }
}

/// Linearised top parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub kappa: f64,
    pub class: SymmetryClass,
}

impl TopParams {
    /// `(D(t), σ²(t))`: `tα₊`, `t²λ₊` at even `t`; `tα₊ − α₋`, `t²λ₊ − 2tκ + λ₋` at odd `t`.
    pub fn predict(&self, t: usize) -> (f64, f64) {
        let tf = t as f64;
        if t % 2 == 0 {
            (tf * self.alpha_plus, tf * tf * self.lambda_plus)
        } else {
            (
                tf * self.alpha_plus - self.alpha_minus,
                tf * tf * self.lambda_plus - 2.0 * tf * self.kappa + self.lambda_minus,
            )
        }
    }
}

/// `t_s = j/√λ₊`, when the linear spread reaches the poles.
pub fn saturation_time(spin: u32, lambda_plus: f64) -> Result<f64> {
    if !(lambda_plus > 0.0) {
        return Err(Error::InvalidArgument(
            "saturation time needs a positive growth coefficient".into(),
        ));
    }
    Ok(spin as f64 / lambda_plus.sqrt())
}

fn moments_from(marginals: &[Vec<f64>], spin: u32) -> SpinMoments {
    let j = spin as f64;
    let mean = marginals
        .iter()
        .map(|p| p.iter().enumerate().map(|(k, w)| w * (k as f64 - j)).sum())
        .collect();
    let second = marginals
        .iter()
        .map(|p| p.iter().enumerate().map(|(k, w)| w * (k as f64 - j).powi(2)).sum())
        .collect();
    SpinMoments { mean, second }
}

/// Applies a real `d × d` matrix along `axis`.
fn multiply_axis(data: &mut ArrayD<Complex64>, axis: usize, matrix: &DMatrix<f64>) {
    let d = matrix.nrows();
    let mut buffer = vec![Complex64::new(0.0, 0.0); d];
    for mut lane in data.lanes_mut(Axis(axis)) {
        for (r, b) in buffer.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, z) in lane.iter().enumerate() {
                acc += *z * matrix[(r, c)];
            }
            *b = acc;
        }
        for (z, b) in lane.iter_mut().zip(&buffer) {
            *z = *b;
        }
    }
}
