//! Physical constants and the lead/layer wavenumber.

use num_complex::Complex64;

/// ħ²/(2mₑ) in eV·nm², from CODATA 2018 ħ, mₑ and e.
///
/// Every kinetic prefactor in the crate is `HBAR2_OVER_2ME / mass_ratio`.
pub const HBAR2_OVER_2ME: f64 = 0.038_099_821_2;

/// ħ²/(2m) in eV·nm² for a particle of mass `mass_ratio`·mₑ.
#[inline]
pub fn kinetic_prefactor(mass_ratio: f64) -> f64 {
    HBAR2_OVER_2ME / mass_ratio
}

/// Wavenumber (nm⁻¹) of a plane wave of energy `energy` in a region of
/// potential `potential`.
///
/// The branch has non-negative real and imaginary parts: real above the
/// band edge, purely imaginary (evanescent) below it, exactly zero at it.
pub fn wavenumber(energy: f64, potential: f64, mass_ratio: f64) -> Complex64 {
    let k2 = mass_ratio * (energy - potential) / HBAR2_OVER_2ME;
    if k2 >= 0.0 {
        Complex64::new(k2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-k2).sqrt())
    }
}

/// n-th level of an empty infinite well of width `width`: n²π²ħ²/(2mL²).
pub fn infinite_well_level(n: usize, width: f64, mass_ratio: f64) -> f64 {
    let n = n as f64;
    kinetic_prefactor(mass_ratio) * (n * std::f64::consts::PI / width).powi(2)
}
