//! Closed-form scattering by one, two and three rectangular barriers.
//!
//! All forms are evaluated with complex wavenumbers, so the same code path
//! covers tunnelling (E < V) and above-barrier transport. Every barrier
//! amplitude is written with sin(kw)/k, which stays finite at the band edge.
//!
//! The double-barrier form composes the single-barrier amplitudes through
//! the Fabry–Pérot sum
//!
//! ```text
//! t = t₁ t₂ e^{ik₁L} / (1 − r₁ r₂ e^{2ik₁L})
//! ```
//!
//! and the double-well triple-barrier form (equal lateral barriers) reads
//!
//! ```text
//! t = t₁² t₂ / (2 r₁ r₂ cos(k₁(L₂ − L₁)) e^{ik₁(L₁+L₂)} − 1 + (t₂/t₁′) r₁² e^{2ik₁(L₁+L₂)})
//! ```
//!
//! where t₁′ is t₂ with the sign of its i·sin term flipped. Grouped this way
//! it agrees with the transfer-matrix engine to rounding. Two remarks on the
//! barrier amplitudes of the second barrier: the propagation factor is
//! e^{−ik₁b} (lead wavenumber, as for the first barrier), and the reflection
//! numerator uses sin(k₃b). Both printed forms returned by the composition
//! carry a constant phase relative to the left-edge reference (e^{ik₁L} and
//! −1 respectively); it is removed before the amplitude is reported.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::EnergyGrid;
use crate::scattering::{ScatteringResult, SweepTable};
use crate::structure::{LayeredStructure, GAAS_MASS_RATIO};
use crate::units::wavenumber;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// sin(k·w)/k, with its series near k·w = 0.
fn sin_over_k(k: Complex64, w: f64) -> Complex64 {
    let kw = k * w;
    if kw.norm() < 1e-6 {
        w * (1.0 - kw * kw / 6.0)
    } else {
        (kw).sin() / k
    }
}

/// Amplitudes of one symmetric barrier (inner wavenumber `k`, width `w`)
/// in a lead of wavenumber `k1`.
#[derive(Debug, Clone, Copy)]
struct Barrier {
    t: Complex64,
    r: Complex64,
    /// Same as `t` with the sign of the i·sin term flipped.
    t_flip: Complex64,
}

fn barrier(k1: Complex64, k: Complex64, w: f64) -> Barrier {
    let s = sin_over_k(k, w);
    let c = (k * w).cos();
    let phase = (-I * k1 * w).exp();
    let sum = k1 * k1 + k * k;
    let diff = k1 * k1 - k * k;
    Barrier {
        t: 2.0 * k1 * phase / (2.0 * k1 * c - I * sum * s),
        r: diff * s / (sum * s + 2.0 * I * k1 * c),
        t_flip: 2.0 * k1 * phase / (2.0 * k1 * c + I * sum * s),
    }
}

fn check_energy(energy: f64) -> Result<()> {
    if energy > 0.0 && energy.is_finite() {
        Ok(())
    } else {
        Err(Error::NoPropagatingMode {
            energy,
            lead: 0.0,
        })
    }
}

fn check_width(name: &'static str, w: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { w >= 0.0 } else { w > 0.0 };
    if ok && w.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value: w })
    }
}

/// Barrier of height `v0` and width `a` between zero-potential leads.
pub fn single_barrier(energy: f64, v0: f64, a: f64, mass_ratio: f64) -> Result<ScatteringResult> {
    check_energy(energy)?;
    check_width("barrier width", a, false)?;
    let k1 = wavenumber(energy, 0.0, mass_ratio);
    let k2 = wavenumber(energy, v0, mass_ratio);
    let b = barrier(k1, k2, a);
    Ok(ScatteringResult::from_amplitudes(energy, b.t, b.r))
}

/// Transmissivity of a single barrier in its real closed form
/// T = 4E(E − V₀) / (4E(E − V₀) + V₀² sin²(k₂a)), continued below the barrier.
pub fn single_barrier_transmissivity(energy: f64, v0: f64, a: f64, mass_ratio: f64) -> f64 {
    let k2 = wavenumber(energy, v0, mass_ratio);
    // sin²(k₂a) = (k₂² S²) with S = sin(k₂a)/k₂, real on both branches
    let s = sin_over_k(k2, a);
    let sin2 = (k2 * k2 * s * s).re;
    let num = 4.0 * energy * (energy - v0);
    if v0 == 0.0 {
        return 1.0;
    }
    if num == 0.0 {
        // band edge: limit of the same expression
        let k1sq = mass_ratio * energy / crate::units::HBAR2_OVER_2ME;
        return 1.0 / (1.0 + k1sq * a * a / 4.0);
    }
    num / (num + v0 * v0 * sin2)
}

/// Transmission and reflection phases below a barrier (E < V₀) from the
/// tanh forms, with k₂′ = √(2m(V₀ − E))/ħ:
/// θ_T = −k₁a − atan[−(k₁² − k₂′²)/(2k₁k₂′)·tanh(k₂′a)],
/// θ_R = π/2 + atan[(k₁² − k₂′²)/(2k₁k₂′)·tanh(k₂′a)].
///
/// θ_T equals arg t; θ_R equals arg r + π (mod 2π) for the reflection
/// amplitude reported by [`single_barrier`].
pub fn single_barrier_phases_tunnelling(
    energy: f64,
    v0: f64,
    a: f64,
    mass_ratio: f64,
) -> Option<(f64, f64)> {
    if !(energy > 0.0 && energy < v0) {
        return None;
    }
    let k1 = wavenumber(energy, 0.0, mass_ratio).re;
    let kp = wavenumber(energy, v0, mass_ratio).im;
    let x = (k1 * k1 - kp * kp) / (2.0 * k1 * kp) * (kp * a).tanh();
    let theta_t = -k1 * a - (-x).atan();
    let theta_r = std::f64::consts::FRAC_PI_2 + x.atan();
    Some((theta_t, theta_r))
}

/// Barrier (`v1`, `a`) | well `l` | barrier (`v2`, `b`).
///
/// `b = 0` removes the second barrier.
pub fn sqw_db(
    energy: f64,
    v1: f64,
    a: f64,
    l: f64,
    v2: f64,
    b: f64,
    mass_ratio: f64,
) -> Result<ScatteringResult> {
    check_energy(energy)?;
    check_width("first barrier width", a, false)?;
    check_width("well width", l, true)?;
    check_width("second barrier width", b, true)?;
    let k1 = wavenumber(energy, 0.0, mass_ratio);
    let b1 = barrier(k1, wavenumber(energy, v1, mass_ratio), a);
    let b2 = barrier(k1, wavenumber(energy, v2, mass_ratio), b);

    let round_trip = b1.r * b2.r * (2.0 * I * k1 * l).exp();
    let printed = b1.t * b2.t * (I * k1 * l).exp() / (1.0 - round_trip);
    let t = printed * (-I * k1 * l).exp();

    // second barrier seen from the left, referenced at x = 0
    let r2_left = b2.r * (2.0 * I * k1 * (a + l)).exp();
    let r = b1.r + b1.t * b1.t * r2_left / (1.0 - round_trip);
    Ok(ScatteringResult::from_amplitudes(energy, t, r))
}

/// Transmissivity of two identical barriers (`v1`, `a`) around a well `l`:
/// T = [1 + 4(R₁/T₁²) sin²(k₁L + θ₁ᴿ)]⁻¹.
pub fn identical_double_barrier_transmissivity(
    energy: f64,
    v1: f64,
    a: f64,
    l: f64,
    mass_ratio: f64,
) -> Result<f64> {
    let single = single_barrier(energy, v1, a, mass_ratio)?;
    let k1 = wavenumber(energy, 0.0, mass_ratio).re;
    let s = (k1 * l + single.theta_r).sin();
    Ok(1.0 / (1.0 + 4.0 * single.reflection / single.transmission.powi(2) * s * s))
}

/// Double-well triple barrier with equal lateral barriers:
/// (`v1`, `a`) | `l1` | (`v2`, `b`) | `l2` | (`v1`, `a`).
#[allow(clippy::too_many_arguments)]
pub fn dqwtb(
    energy: f64,
    v1: f64,
    a: f64,
    l1: f64,
    v2: f64,
    b: f64,
    l2: f64,
    mass_ratio: f64,
) -> Result<ScatteringResult> {
    dqwtb_impl(energy, v1, a, l1, v2, b, l2, mass_ratio, false)
}

/// `dqwtb` with the sign of the cos term in the denominator flipped; only
/// used to show the validation suite catches a transcription error.
#[allow(clippy::too_many_arguments)]
pub(crate) fn dqwtb_impl(
    energy: f64,
    v1: f64,
    a: f64,
    l1: f64,
    v2: f64,
    b: f64,
    l2: f64,
    mass_ratio: f64,
    flip_cos_sign: bool,
) -> Result<ScatteringResult> {
    check_energy(energy)?;
    check_width("lateral barrier width", a, false)?;
    check_width("central barrier width", b, true)?;
    check_width("first well width", l1, true)?;
    check_width("second well width", l2, true)?;
    let k1 = wavenumber(energy, 0.0, mass_ratio);
    let lat = barrier(k1, wavenumber(energy, v1, mass_ratio), a);
    let mid = barrier(k1, wavenumber(energy, v2, mass_ratio), b);

    let sign = if flip_cos_sign { -2.0 } else { 2.0 };
    let denom = sign * lat.r * mid.r * (k1 * (l2 - l1)).cos() * (I * k1 * (l1 + l2)).exp() - 1.0
        + (mid.t / mid.t_flip) * lat.r * lat.r * (2.0 * I * k1 * (l1 + l2)).exp();
    let t = -(lat.t * lat.t * mid.t / denom);

    let (_, r) = compose(k1, &lat, &mid, a, l1, b, l2);
    Ok(ScatteringResult::from_amplitudes(energy, t, r))
}

/// (t, r) of lateral | l1 | central | l2 | lateral by pairwise composition
/// of the barrier amplitudes, referenced at x = 0.
fn compose(
    k1: Complex64,
    lat: &Barrier,
    mid: &Barrier,
    a: f64,
    l1: f64,
    b: f64,
    l2: f64,
) -> (Complex64, Complex64) {
    let at = |x: f64| (2.0 * I * k1 * x).exp();
    let x2 = a + l1;
    let x3 = x2 + b + l2;
    // barrier at [x0, x0 + w]: left reflection r·e^{2ik x0}, right reflection r·e^{−2ik(x0+w)}
    let r1_right = lat.r * at(-a);
    let r2_left = mid.r * at(x2);
    let r2_right = mid.r * at(-(x2 + b));
    let r3_left = lat.r * at(x3);

    let d12 = 1.0 - r1_right * r2_left;
    let t12 = lat.t * mid.t / d12;
    let r12_left = lat.r + lat.t * lat.t * r2_left / d12;
    let r12_right = r2_right + mid.t * mid.t * r1_right / d12;
    let d = 1.0 - r12_right * r3_left;
    (t12 * lat.t / d, r12_left + t12 * t12 * r3_left / d)
}

/// A structure for which a closed form exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    SingleBarrier {
        v0: f64,
        a: f64,
        #[serde(default = "gaas")]
        mass_ratio: f64,
    },
    DoubleBarrier {
        v1: f64,
        a: f64,
        well: f64,
        v2: f64,
        b: f64,
        #[serde(default = "gaas")]
        mass_ratio: f64,
    },
    TripleBarrier {
        v1: f64,
        a: f64,
        well1: f64,
        v2: f64,
        b: f64,
        well2: f64,
        #[serde(default = "gaas")]
        mass_ratio: f64,
    },
}

fn gaas() -> f64 {
    GAAS_MASS_RATIO
}

impl ClosedForm {
    pub fn evaluate(&self, energy: f64) -> Result<ScatteringResult> {
        match *self {
            ClosedForm::SingleBarrier { v0, a, mass_ratio } => {
                single_barrier(energy, v0, a, mass_ratio)
            }
            ClosedForm::DoubleBarrier {
                v1,
                a,
                well,
                v2,
                b,
                mass_ratio,
            } => sqw_db(energy, v1, a, well, v2, b, mass_ratio),
            ClosedForm::TripleBarrier {
                v1,
                a,
                well1,
                v2,
                b,
                well2,
                mass_ratio,
            } => dqwtb(energy, v1, a, well1, v2, b, well2, mass_ratio),
        }
    }

    /// The same geometry as a layer stack, for the transfer-matrix engine.
    pub fn to_structure(&self) -> Result<LayeredStructure> {
        match *self {
            ClosedForm::SingleBarrier { v0, a, mass_ratio } => {
                LayeredStructure::single_barrier(v0, a, mass_ratio)
            }
            ClosedForm::DoubleBarrier {
                v1,
                a,
                well,
                v2,
                b,
                mass_ratio,
            } => LayeredStructure::double_barrier(v1, a, well, v2, b, mass_ratio),
            ClosedForm::TripleBarrier {
                v1,
                a,
                well1,
                v2,
                b,
                well2,
                mass_ratio,
            } => LayeredStructure::triple_barrier(v1, a, well1, v2, b, well2, mass_ratio),
        }
    }

    /// Recognizes a layer stack that one of the closed forms covers.
    pub fn from_structure(s: &LayeredStructure) -> Result<Self> {
        s.validate()?;
        let mass_ratio = s.lead_mass_ratio;
        let no_form = || {
            Error::InvalidParameter(
                "structure has no closed form; use the transfer-matrix engine".into(),
            )
        };
        if s.lead_potential != 0.0 || s.layers.iter().any(|l| l.mass_ratio != mass_ratio) {
            return Err(no_form());
        }
        let is_well = |i: usize| s.layers[i].height == 0.0;
        let l = &s.layers;
        match l.len() {
            1 => Ok(ClosedForm::SingleBarrier {
                v0: l[0].height,
                a: l[0].width,
                mass_ratio,
            }),
            2 if is_well(1) => Ok(ClosedForm::DoubleBarrier {
                v1: l[0].height,
                a: l[0].width,
                well: l[1].width,
                v2: 0.0,
                b: 0.0,
                mass_ratio,
            }),
            3 if is_well(1) => Ok(ClosedForm::DoubleBarrier {
                v1: l[0].height,
                a: l[0].width,
                well: l[1].width,
                v2: l[2].height,
                b: l[2].width,
                mass_ratio,
            }),
            5 if is_well(1) && is_well(3) => {
                if l[0].height != l[4].height || l[0].width != l[4].width {
                    return Err(Error::UnequalLateralBarriers);
                }
                Ok(ClosedForm::TripleBarrier {
                    v1: l[0].height,
                    a: l[0].width,
                    well1: l[1].width,
                    v2: l[2].height,
                    b: l[2].width,
                    well2: l[3].width,
                    mass_ratio,
                })
            }
            _ => Err(no_form()),
        }
    }
}

/// One closed-form evaluation per grid energy; failures stay in their row.
pub fn sweep(form: &ClosedForm, grid: &EnergyGrid) -> SweepTable {
    SweepTable::from_fn(grid.points(), |e| form.evaluate(e))
}
