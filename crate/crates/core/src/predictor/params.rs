//! Wavepacket drift and spreading parameters and the moment laws they imply.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial::{AngleDensity, InitialState};
use crate::potential::{FourierTerm, IndexSet, PotentialSpec, SymmetryClass};

/// Largest tensor grid used for non-uniform state averages.
const MAX_QUADRATURE_NODES: usize = 1 << 24;

/// Initial-state averages of the symmetric and antisymmetric kick gradients of one rotor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub kappa: f64,
    pub class: SymmetryClass,
}

impl WavepacketParams {
    /// `(D(t), σ²(t))`: `tα₊`, `t²λ₊` at even `t`; `tα₊ + α₋`, `t²λ₊ + 2tκ + λ₋` at odd `t`.
    pub fn predict(&self, t: usize) -> (f64, f64) {
        let tf = t as f64;
        if t % 2 == 0 {
            (tf * self.alpha_plus, tf * tf * self.lambda_plus)
        } else {
            (
                tf * self.alpha_plus + self.alpha_minus,
                tf * tf * self.lambda_plus + 2.0 * tf * self.kappa + self.lambda_minus,
            )
        }
    }
}

/// Free-function form of [`WavepacketParams::predict`].
pub fn predict_moments(params: &WavepacketParams, t: usize) -> (f64, f64) {
    params.predict(t)
}

/// Parameters of rotor `j` for the potential `v` under the π-shift of `shifted`.
///
/// Momentum eigenstates have uniform angular densities and are averaged
/// exactly by cosine orthogonality; other product states use a trapezoid
/// tensor grid fine enough to integrate the trigonometric integrand exactly.
pub fn wavepacket_params(
    v: &PotentialSpec,
    j: usize,
    shifted: &IndexSet,
    initial: &InitialState,
) -> Result<WavepacketParams> {
    if initial.rotor_count() != v.rotor_count() {
        return Err(Error::DimensionMismatch(format!(
            "initial state on {} rotors, potential on {}",
            initial.rotor_count(),
            v.rotor_count()
        )));
    }
    initial.validate()?;
    let effective = v.effective_potential(j)?;
    let (plus, minus) = effective.decompose(shifted)?;
    let class = SymmetryClass::from_parts(&plus, &minus);
    if initial.is_uniform_in_angle() {
        return Ok(WavepacketParams {
            alpha_plus: 0.0,
            alpha_minus: 0.0,
            lambda_plus: gradient_overlap(&plus, &plus, j),
            lambda_minus: gradient_overlap(&minus, &minus, j),
            kappa: gradient_overlap(&plus, &minus, j),
            class,
        });
    }
    quadrature_params(&plus, &minus, j, &initial.angle_densities(), class)
}

/// `⟨∂_jX ∂_jY⟩` under uniform angles: terms pair only when their mode vectors
/// coincide or are opposite.
fn gradient_overlap(x: &PotentialSpec, y: &PotentialSpec, j: usize) -> f64 {
    let mut acc = 0.0;
    for a in x.terms() {
        for b in y.terms() {
            acc += a.coefficient() * b.coefficient() * (a.modes()[j] * b.modes()[j]) as f64 * sine_pairing(a, b);
        }
    }
    acc
}

/// `⟨sin(m·θ + φ) sin(m'·θ + φ')⟩` under uniform angles.
pub(crate) fn sine_pairing(a: &FourierTerm, b: &FourierTerm) -> f64 {
    let same = a.modes() == b.modes();
    let opposite = a.modes().iter().zip(b.modes()).all(|(x, y)| *x == -*y);
    let mut v = 0.0;
    if same {
        v += 0.5 * (a.phase() - b.phase()).cos();
    }
    if opposite {
        v -= 0.5 * (a.phase() + b.phase()).cos();
    }
    v
}

/// `⟨cos(m·θ + φ) cos(m'·θ + φ')⟩` under uniform angles.
pub(crate) fn cosine_pairing(a: &FourierTerm, b: &FourierTerm) -> f64 {
    let same = a.modes() == b.modes();
    let opposite = a.modes().iter().zip(b.modes()).all(|(x, y)| *x == -*y);
    let mut v = 0.0;
    if same {
        v += 0.5 * (a.phase() - b.phase()).cos();
    }
    if opposite {
        v += 0.5 * (a.phase() + b.phase()).cos();
    }
    v
}

fn quadrature_params(
    plus: &PotentialSpec,
    minus: &PotentialSpec,
    j: usize,
    densities: &[AngleDensity],
    class: SymmetryClass,
) -> Result<WavepacketParams> {
    let n = densities.len();
    let involved: Vec<usize> = (0..n)
        .filter(|&k| plus.max_mode(k) > 0 || minus.max_mode(k) > 0)
        .collect();
    let nodes: Vec<usize> = (0..n)
        .map(|k| {
            if involved.contains(&k) {
                let m = plus.max_mode(k).max(minus.max_mode(k)) as usize;
                densities[k].degree() + 2 * m + 1
            } else {
                1
            }
        })
        .collect();
    let total = nodes.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k));
    match total {
        Some(t) if t <= MAX_QUADRATURE_NODES => {}
        _ => {
            return Err(Error::ResourceCap(format!(
                "quadrature grid {nodes:?} exceeds {MAX_QUADRATURE_NODES} nodes"
            )))
        }
    }
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            if nodes[k] == 1 {
                vec![1.0]
            } else {
                let h = TAU / nodes[k] as f64;
                (0..nodes[k]).map(|i| densities[k].eval(h * i as f64) * h).collect()
            }
        })
        .collect();

    let (mut a_p, mut a_m, mut l_p, mut l_m, mut kap) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut index = vec![0usize; n];
    let mut theta = vec![0.0; n];
    loop {
        let mut w = 1.0;
        for k in 0..n {
            theta[k] = TAU * index[k] as f64 / nodes[k] as f64;
            w *= weights[k][index[k]];
        }
        let gp = plus.eval_gradient(j, &theta);
        let gm = minus.eval_gradient(j, &theta);
        a_p -= w * gp;
        a_m -= w * gm;
        l_p += w * gp * gp;
        l_m += w * gm * gm;
        kap += w * gp * gm;
        if !advance(&mut index, &nodes) {
            break;
        }
    }
    Ok(WavepacketParams {
        alpha_plus: a_p,
        alpha_minus: a_m,
        lambda_plus: l_p,
        lambda_minus: l_m,
        kappa: kap,
        class,
    })
}

fn advance(index: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..shape.len()).rev() {
        index[k] += 1;
        if index[k] < shape[k] {
            return true;
        }
        index[k] = 0;
    }
    false
}
