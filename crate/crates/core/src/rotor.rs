//! Truncated momentum lattices, rotor states and wavepacket moments.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor;

/// Default bound on the total lattice dimension `Π M_j`.
pub const DEFAULT_MAX_DIMENSION: usize = 1 << 24;

/// Outermost momentum layers on each side counted as tail.
pub const TAIL_LAYERS: usize = 2;

/// Consecutive-integer momentum window per rotor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotorLattice {
    l_min: Vec<i64>,
    dims: Vec<usize>,
}

impl RotorLattice {
    /// Builds a lattice from inclusive windows `[l_min, l_max]`.
    pub fn new(windows: &[(i64, i64)], max_dimension: usize) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::InvalidArgument("lattice needs at least one rotor".into()));
        }
        let mut dims = Vec::with_capacity(windows.len());
        for (j, &(lo, hi)) in windows.iter().enumerate() {
            if hi < lo || (hi - lo + 1) < 4 {
                return Err(Error::InvalidArgument(format!(
                    "rotor {j}: window [{lo}, {hi}] has fewer than 4 sites"
                )));
            }
            dims.push((hi - lo + 1) as usize);
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .unwrap_or(usize::MAX);
        if total > max_dimension {
            return Err(Error::ResourceCap(format!(
                "lattice {dims:?} has {total} sites, cap is {max_dimension}"
            )));
        }
        Ok(Self {
            l_min: windows.iter().map(|w| w.0).collect(),
            dims,
        })
    }

    /// Windows `[c_j − pad_j, c_j + pad_j]`.
    pub fn centered(centers: &[i64], padding: &[u64], max_dimension: usize) -> Result<Self> {
        if centers.len() != padding.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} centers for {} paddings",
                centers.len(),
                padding.len()
            )));
        }
        let windows: Vec<(i64, i64)> = centers
            .iter()
            .zip(padding)
            .map(|(&c, &p)| (c - p as i64, c + p as i64))
            .collect();
        Self::new(&windows, max_dimension)
    }

    pub fn rotor_count(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn l_min(&self, j: usize) -> i64 {
        self.l_min[j]
    }

    pub fn l_max(&self, j: usize) -> i64 {
        self.l_min[j] + self.dims[j] as i64 - 1
    }

    pub fn total_dimension(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn momentum(&self, j: usize, index: usize) -> i64 {
        self.l_min[j] + index as i64
    }

    /// Momentum values of rotor `j` in window order.
    pub fn momenta(&self, j: usize) -> impl Iterator<Item = i64> + '_ {
        (0..self.dims[j]).map(move |i| self.momentum(j, i))
    }

    pub fn index_of(&self, l: &[i64]) -> Option<Vec<usize>> {
        if l.len() != self.dims.len() {
            return None;
        }
        l.iter()
            .enumerate()
            .map(|(j, &lj)| {
                let i = lj - self.l_min[j];
                (0..self.dims[j] as i64).contains(&i).then_some(i as usize)
            })
            .collect()
    }

    /// Smallest lattice containing both windows.
    pub fn union(&self, other: &RotorLattice, max_dimension: usize) -> Result<Self> {
        let windows: Vec<(i64, i64)> = (0..self.rotor_count())
            .map(|j| {
                (
                    self.l_min(j).min(other.l_min(j)),
                    self.l_max(j).max(other.l_max(j)),
                )
            })
            .collect();
        Self::new(&windows, max_dimension)
    }

    /// Pads rotor `j` by `pad[j]` sites on both sides.
    pub fn padded(&self, pad: &[usize], max_dimension: usize) -> Result<Self> {
        let windows: Vec<(i64, i64)> = (0..self.rotor_count())
            .map(|j| (self.l_min(j) - pad[j] as i64, self.l_max(j) + pad[j] as i64))
            .collect();
        Self::new(&windows, max_dimension)
    }

    fn contains_lattice(&self, inner: &RotorLattice) -> bool {
        (0..self.rotor_count())
            .all(|j| self.l_min(j) <= inner.l_min(j) && self.l_max(j) >= inner.l_max(j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Momentum,
    Angle,
}

/// Amplitudes over a momentum lattice; row-major in rotor order.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorState {
    lattice: RotorLattice,
    amplitudes: ArrayD<Complex64>,
    representation: Representation,
}

impl RotorState {
    /// Wraps raw momentum amplitudes, normalising them.
    pub fn from_amplitudes(lattice: RotorLattice, amplitudes: ArrayD<Complex64>) -> Result<Self> {
        if amplitudes.shape() != lattice.dims() {
            return Err(Error::DimensionMismatch(format!(
                "amplitudes {:?} on lattice {:?}",
                amplitudes.shape(),
                lattice.dims()
            )));
        }
        let norm = tensor::norm_sqr(&amplitudes).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument("state has zero or non-finite norm".into()));
        }
        let amplitudes = amplitudes.mapv(|z| z / norm);
        Ok(Self {
            lattice,
            amplitudes,
            representation: Representation::Momentum,
        })
    }

    /// `|l⟩`.
    pub fn momentum_eigenstate(lattice: &RotorLattice, l: &[i64]) -> Result<Self> {
        let index = lattice
            .index_of(l)
            .ok_or_else(|| Error::OutOfWindow { momentum: l.to_vec() })?;
        let mut amplitudes = ArrayD::zeros(IxDyn(lattice.dims()));
        amplitudes[IxDyn(&index)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            lattice: lattice.clone(),
            amplitudes,
            representation: Representation::Momentum,
        })
    }

    /// Product of per-rotor momentum profiles `a_j(l)` given on the lattice window.
    pub fn product(lattice: &RotorLattice, factors: &[Vec<Complex64>]) -> Result<Self> {
        if factors.len() != lattice.rotor_count()
            || factors.iter().zip(lattice.dims()).any(|(f, &m)| f.len() != m)
        {
            return Err(Error::DimensionMismatch(
                "factor lengths must match the lattice windows".into(),
            ));
        }
        let mut amplitudes = ArrayD::from_elem(IxDyn(lattice.dims()), Complex64::new(1.0, 0.0));
        tensor::multiply_separable(&mut amplitudes, factors);
        Self::from_amplitudes(lattice.clone(), amplitudes)
    }

    /// Product of wrapped Gaussians `a(l) ∝ exp(−(l−p₀)²/(4w²)) e^{−ilθ₀}`.
    pub fn coherent_product(lattice: &RotorLattice, centers: &[(f64, f64)], width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidArgument(format!("width {width} must be positive")));
        }
        if centers.len() != lattice.rotor_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} centers for {} rotors",
                centers.len(),
                lattice.rotor_count()
            )));
        }
        for (j, &(_, p0)) in centers.iter().enumerate() {
            let reach = 6.0 * width;
            if p0 - reach < lattice.l_min(j) as f64 || p0 + reach > lattice.l_max(j) as f64 {
                return Err(Error::OutOfWindow {
                    momentum: centers.iter().map(|c| c.1.round() as i64).collect(),
                });
            }
        }
        let factors: Vec<Vec<Complex64>> = centers
            .iter()
            .enumerate()
            .map(|(j, &(theta0, p0))| {
                lattice
                    .momenta(j)
                    .map(|l| coherent_amplitude(l, theta0, p0, width))
                    .collect()
            })
            .collect();
        Self::product(lattice, &factors)
    }

    pub fn lattice(&self) -> &RotorLattice {
        &self.lattice
    }

    pub fn amplitudes(&self) -> &ArrayD<Complex64> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.amplitudes
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub(crate) fn set_representation(&mut self, r: Representation) {
        self.representation = r;
    }

    pub fn norm_sqr(&self) -> f64 {
        tensor::norm_sqr(&self.amplitudes)
    }

    pub fn amplitude(&self, l: &[i64]) -> Complex64 {
        self.lattice
            .index_of(l)
            .map(|ix| self.amplitudes[IxDyn(&ix)])
            .unwrap_or_default()
    }

    /// Copies the state into a lattice containing the current window.
    pub fn embedded(&self, target: &RotorLattice) -> Result<Self> {
        self.require_momentum()?;
        if !target.contains_lattice(&self.lattice) {
            return Err(Error::DimensionMismatch(
                "target lattice does not contain the state window".into(),
            ));
        }
        let offset: Vec<usize> = (0..self.lattice.rotor_count())
            .map(|j| (self.lattice.l_min(j) - target.l_min(j)) as usize)
            .collect();
        Ok(Self {
            lattice: target.clone(),
            amplitudes: tensor::embed(&self.amplitudes, target.dims(), &offset),
            representation: Representation::Momentum,
        })
    }

    /// Largest tail mass over rotors, with the rotor attaining it.
    pub fn tail_mass(&self) -> (usize, f64) {
        let marginals = tensor::marginals(&self.amplitudes);
        marginals
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let m = p.len();
                let layers = TAIL_LAYERS.min(m / 2);
                let tail: f64 = p[..layers].iter().sum::<f64>() + p[m - layers..].iter().sum::<f64>();
                (j, tail)
            })
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }

    /// `p_j |ψ⟩` (not normalised).
    pub fn momentum_applied(&self, j: usize) -> Result<ArrayD<Complex64>> {
        self.require_momentum()?;
        let mut out = self.amplitudes.clone();
        let factor: Vec<Vec<Complex64>> = (0..self.lattice.rotor_count())
            .map(|k| {
                self.lattice
                    .momenta(k)
                    .map(|l| Complex64::new(if k == j { l as f64 } else { 1.0 }, 0.0))
                    .collect()
            })
            .collect();
        tensor::multiply_separable(&mut out, &factor);
        Ok(out)
    }

    pub(crate) fn require_momentum(&self) -> Result<()> {
        match self.representation {
            Representation::Momentum => Ok(()),
            Representation::Angle => Err(Error::InvalidArgument(
                "operation requires the momentum representation".into(),
            )),
        }
    }
}

pub(crate) fn coherent_amplitude(l: i64, theta0: f64, p0: f64, width: f64) -> Complex64 {
    let x = l as f64 - p0;
    Complex64::from_polar((-x * x / (4.0 * width * width)).exp(), -(l as f64) * theta0)
}

/// First and second momentum moments per rotor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub second: Vec<f64>,
}

/// Moments and displacement statistics at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub t: usize,
    pub mean: Vec<f64>,
    pub second: Vec<f64>,
    pub displacement: Vec<f64>,
    pub squared_displacement: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Weighted sums over the lattice marginals.
pub fn measure_moments(state: &RotorState) -> Result<Moments> {
    state.require_momentum()?;
    let marginals = tensor::marginals(state.amplitudes());
    let lattice = state.lattice();
    let mut mean = Vec::with_capacity(marginals.len());
    let mut second = Vec::with_capacity(marginals.len());
    for (j, p) in marginals.iter().enumerate() {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (l, &w) in lattice.momenta(j).zip(p) {
            let l = l as f64;
            m1 += w * l;
            m2 += w * l * l;
        }
        mean.push(m1);
        second.push(m2);
    }
    Ok(Moments { mean, second })
}

/// Fills `D_j`, `σ_j²` and `Var_j` relative to the first entry of `series`.
///
/// `correlations[k][j]` is `Re⟨ψ₀|p_j(t) p_j(0)|ψ₀⟩` at the k-th entry; when
/// absent it is taken as `⟨p_j(t)⟩⟨p_j(0)⟩`, which is exact for momentum
/// eigenstates.
pub fn displacement_stats(
    series: &[(usize, Moments)],
    correlations: Option<&[Vec<f64>]>,
) -> Vec<MomentRecord> {
    let Some((_, reference)) = series.first() else {
        return Vec::new();
    };
    series
        .iter()
        .enumerate()
        .map(|(k, (t, m))| {
            let n = m.mean.len();
            let mut displacement = Vec::with_capacity(n);
            let mut squared = Vec::with_capacity(n);
            let mut variance = Vec::with_capacity(n);
            for j in 0..n {
                let corr = correlations
                    .map(|c| c[k][j])
                    .unwrap_or(m.mean[j] * reference.mean[j]);
                let d = m.mean[j] - reference.mean[j];
                let s2 = m.second[j] - 2.0 * corr + reference.second[j];
                displacement.push(d);
                squared.push(s2);
                variance.push(s2 - d * d);
            }
            MomentRecord {
                t: *t,
                mean: m.mean.clone(),
                second: m.second.clone(),
                displacement,
                squared_displacement: squared,
                variance,
            }
        })
        .collect()
}
