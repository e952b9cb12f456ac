//! Transfer-matrix scattering for arbitrary stacks of constant-potential layers.
//!
//! Layers are composed left to right, incidence from the left. Inside the
//! stack the matrices act on the state vector (ψ, ψ′/m), which is continuous
//! across every interface, so interface matching is implicit and a layer
//! sitting exactly at its band edge (k = 0) needs no special case. Only the
//! leads use the plane-wave basis.
//!
//! Evanescent layers contribute entries of order e^{κw}. Each layer matrix is
//! stored with that factor pulled out into a running logarithm, so deep
//! tunnelling produces small but finite transmission instead of overflow.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::EnergyGrid;
use crate::scattering::{ScatteringResult, SweepTable};
use crate::structure::{Layer, LayeredStructure};
use crate::units::wavenumber;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        TransferMatrix {
            m11: one,
            m12: zero,
            m21: zero,
            m22: one,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    fn max_norm(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn scale(&self, s: f64) -> Self {
        TransferMatrix {
            m11: self.m11 * s,
            m12: self.m12 * s,
            m21: self.m21 * s,
            m22: self.m22 * s,
        }
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, o: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

/// A matrix stored as `e^{log_scale} · matrix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMatrix {
    pub matrix: TransferMatrix,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn identity() -> Self {
        ScaledMatrix {
            matrix: TransferMatrix::identity(),
            log_scale: 0.0,
        }
    }

    /// `self` followed by `next` (i.e. `next · self`), renormalized.
    pub fn then(&self, next: &ScaledMatrix) -> ScaledMatrix {
        let product = next.matrix * self.matrix;
        let norm = product.max_norm();
        let mut out = ScaledMatrix {
            matrix: product,
            log_scale: self.log_scale + next.log_scale,
        };
        if norm > 0.0 && norm.is_finite() {
            out.matrix = product.scale(1.0 / norm);
            out.log_scale += norm.ln();
        }
        out
    }

    /// The unscaled matrix; overflows for very opaque stacks.
    pub fn unscaled(&self) -> TransferMatrix {
        self.matrix.scale(self.log_scale.exp())
    }
}

/// A region of constant potential, described by its wavenumber and mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    pub k: Complex64,
    pub mass_ratio: f64,
}

impl Medium {
    pub fn new(energy: f64, potential: f64, mass_ratio: f64) -> Self {
        Medium {
            k: wavenumber(energy, potential, mass_ratio),
            mass_ratio,
        }
    }

    /// i·k/m: ψ′/m carried by a unit e^{ikx} wave.
    fn q(&self) -> Complex64 {
        I * self.k / self.mass_ratio
    }

    /// Plane-wave amplitudes (A, B) → state (ψ, ψ′/m).
    fn to_state(self) -> TransferMatrix {
        let q = self.q();
        TransferMatrix {
            m11: Complex64::new(1.0, 0.0),
            m12: Complex64::new(1.0, 0.0),
            m21: q,
            m22: -q,
        }
    }

    /// State (ψ, ψ′/m) → plane-wave amplitudes (A, B).
    fn amplitudes_from_state(self) -> Result<TransferMatrix> {
        let q = self.q();
        if q.norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "plane-wave basis is degenerate at the band edge".into(),
            ));
        }
        let half = Complex64::new(0.5, 0.0);
        Ok(TransferMatrix {
            m11: half,
            m12: half / q,
            m21: half,
            m22: -half / q,
        })
    }
}

/// Propagation of (ψ, ψ′/m) across a layer, with e^{κw} factored out.
fn layer_state_matrix(energy: f64, layer: &Layer) -> ScaledMatrix {
    let k = wavenumber(energy, layer.height, layer.mass_ratio);
    let mu = layer.mass_ratio;
    let z = k * layer.width;
    let kappa_w = z.im.max(0.0);
    // e^{iz}·e^{−κw} and e^{−iz}·e^{−κw}, both bounded by 1
    let ep = (I * z.re).exp() * (-2.0 * kappa_w).exp();
    let em = (-I * z.re).exp();
    let cos = (ep + em) * 0.5;
    // sin(z)/k · e^{−κw}
    let sin_over_k = if z.norm() < 1e-6 {
        layer.width * (1.0 - z * z / 6.0) * (-kappa_w).exp()
    } else {
        (ep - em) / (2.0 * I) / k
    };
    ScaledMatrix {
        matrix: TransferMatrix {
            m11: cos,
            m12: mu * sin_over_k,
            m21: -(k * k / mu) * sin_over_k,
            m22: cos,
        },
        log_scale: kappa_w,
    }
}

/// Plane-wave transfer matrix of `layer` embedded between two media.
///
/// Maps amplitudes (A, B) of A·e^{ik_L x′} + B·e^{−ik_L x′} in the left
/// medium, referenced at the layer's left edge, to the amplitudes in the
/// right medium referenced at the layer's right edge. The layer may sit at
/// its band edge; the two media may not.
pub fn layer_matrix(energy: f64, layer: &Layer, left: Medium, right: Medium) -> Result<ScaledMatrix> {
    layer.validate()?;
    let inner = layer_state_matrix(energy, layer);
    let to = ScaledMatrix {
        matrix: left.to_state(),
        log_scale: 0.0,
    };
    let from = ScaledMatrix {
        matrix: right.amplitudes_from_state()?,
        log_scale: 0.0,
    };
    Ok(to.then(&inner).then(&from))
}

/// Plane-wave transfer matrix of a whole stack, lead to lead.
///
/// Its determinant is (k_in/m_in)/(k_out/m_out), i.e. 1 for the identical
/// leads of a [`LayeredStructure`].
pub fn structure_matrix(structure: &LayeredStructure, energy: f64) -> Result<ScaledMatrix> {
    structure.validate()?;
    if !(energy > structure.lead_potential) {
        return Err(Error::NoPropagatingMode {
            energy,
            lead: structure.lead_potential,
        });
    }
    let lead = Medium::new(energy, structure.lead_potential, structure.lead_mass_ratio);
    let mut total = ScaledMatrix {
        matrix: lead.to_state(),
        log_scale: 0.0,
    };
    for layer in &structure.layers {
        total = total.then(&layer_state_matrix(energy, layer));
    }
    Ok(total.then(&ScaledMatrix {
        matrix: lead.amplitudes_from_state()?,
        log_scale: 0.0,
    }))
}

/// Transmission and reflection of `structure` for a wave incident from the left.
pub fn scatter(structure: &LayeredStructure, energy: f64) -> Result<ScatteringResult> {
    let m = structure_matrix(structure, energy)?;
    let m22 = m.matrix.m22;
    if m22.norm() < 1e-300 || !m22.is_finite() {
        return Err(Error::NumericalOverflow { energy });
    }
    let k0 = wavenumber(energy, structure.lead_potential, structure.lead_mass_ratio);
    let width = structure.total_width();
    // right-lead amplitude is det/m22 with det = 1 for identical leads
    let t = (-m.log_scale).exp() / m22 * (-I * k0 * width).exp();
    let r = -m.matrix.m21 / m22;
    Ok(ScatteringResult::from_amplitudes(energy, t, r))
}

/// One transfer-matrix evaluation per grid energy; failures stay in their row.
pub fn sweep_tmm(structure: &LayeredStructure, grid: &EnergyGrid) -> SweepTable {
    SweepTable::from_fn(grid.points(), |e| scatter(structure, e))
}
