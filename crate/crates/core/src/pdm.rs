//! Bound states with a position-dependent effective mass.
//!
//! The kinetic operator is the von Roos family
//! T = ¼(m^α p m^β p m^γ + m^γ p m^β p m^α) with α + β + γ = −1, which turns
//! the Schrödinger equation into
//!
//! ```text
//! ψ″ − (m′/m)ψ′ + [½(t·m″/m − s·m′²/m²) + (2m/ħ²)(E − V)]ψ = 0
//! ```
//!
//! with t = α + γ and s = α(γ+2) − γ(α+2). Writing ψ = √m·φ removes the
//! first-derivative term and leaves φ″ = −(2m/ħ²)(E − V_eff)φ, where
//!
//! ```text
//! V_eff = V − (ħ²/2m)[(1+t)/2·m″/m − (3+2s)/4·m′²/m²]
//! ```
//!
//! The φ equation is discretized with the Numerov stencils.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, Pencil};
use crate::error::{Error, Result};
use crate::grid::PotentialGrid;
use crate::numerov::{self, EigenPair};
use crate::units::HBAR2_OVER_2ME;

/// Ordering parameters of the von Roos kinetic operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VonRoosParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Replaces α(γ+2) − γ(α+2) as the m′² coefficient when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_override: Option<f64>,
}

impl Default for VonRoosParams {
    /// BenDaniel–Duke: α = γ = 0, β = −1.
    fn default() -> Self {
        VonRoosParams {
            alpha: 0.0,
            beta: -1.0,
            gamma: 0.0,
            s_override: None,
        }
    }
}

impl VonRoosParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = VonRoosParams {
            alpha,
            beta,
            gamma,
            s_override: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_s_override(mut self, s: f64) -> Self {
        self.s_override = Some(s);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let sum = self.alpha + self.beta + self.gamma;
        if !((sum + 1.0).abs() <= 1e-12) {
            return Err(Error::OrderingConstraint(sum));
        }
        if let Some(s) = self.s_override {
            if !s.is_finite() {
                return Err(Error::InvalidParameter("s override must be finite".into()));
            }
        }
        Ok(())
    }

    /// t = α + γ
    pub fn t_param(&self) -> f64 {
        self.alpha + self.gamma
    }

    /// s = α(γ+2) − γ(α+2), unless overridden.
    pub fn s_param(&self) -> f64 {
        self.s_override
            .unwrap_or(self.alpha * (self.gamma + 2.0) - self.gamma * (self.alpha + 2.0))
    }
}

/// Mass as a function of position, in units of mₑ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassProfile {
    Constant {
        mass_ratio: f64,
    },
    /// left + (right − left)·(1 + tanh((x − center)/width))/2
    SmoothStep {
        left: f64,
        right: f64,
        center: f64,
        width: f64,
    },
    /// base + amplitude·exp(−(x − center)²/(2·width²))
    GaussianBump {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Piecewise-linear through the nodes, constant beyond them. Derivatives
    /// come from centered differences at the nodes, interpolated linearly.
    Tabulated { x: Vec<f64>, m: Vec<f64> },
}

impl MassProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("mass profile: {what}")));
        match self {
            MassProfile::Constant { mass_ratio } => {
                if !(*mass_ratio > 0.0 && mass_ratio.is_finite()) {
                    return bad("mass must be positive");
                }
            }
            MassProfile::SmoothStep {
                left,
                right,
                center,
                width,
            } => {
                if !(*left > 0.0 && *right > 0.0 && left.is_finite() && right.is_finite()) {
                    return bad("step masses must be positive");
                }
                if !(*width > 0.0 && width.is_finite() && center.is_finite()) {
                    return bad("step width must be positive");
                }
            }
            MassProfile::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                if !(*base > 0.0 && base.is_finite() && amplitude.is_finite() && center.is_finite()) {
                    return bad("bump base must be positive");
                }
                if !(base + amplitude.min(0.0) > 0.0) {
                    return bad("bump dips to a non-positive mass");
                }
                if !(*width > 0.0 && width.is_finite()) {
                    return bad("bump width must be positive");
                }
            }
            MassProfile::Tabulated { x, m } => {
                if x.len() != m.len() || x.len() < 3 {
                    return bad("table needs at least 3 (x, m) pairs of equal length");
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().any(|v| !v.is_finite()) {
                    return bad("table positions must increase strictly");
                }
                if m.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                    return bad("table masses must be positive");
                }
            }
        }
        Ok(())
    }

    /// (m, m′, m″) at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        match self {
            MassProfile::Constant { mass_ratio } => (*mass_ratio, 0.0, 0.0),
            MassProfile::SmoothStep {
                left,
                right,
                center,
                width,
            } => {
                let s = ((x - center) / width).tanh();
                let half = 0.5 * (right - left);
                let sech2 = 1.0 - s * s;
                (
                    left + half * (1.0 + s),
                    half * sech2 / width,
                    -2.0 * half * s * sech2 / (width * width),
                )
            }
            MassProfile::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                let u = x - center;
                let w2 = width * width;
                let g = amplitude * (-0.5 * u * u / w2).exp();
                (base + g, -g * u / w2, g * (u * u / w2 - 1.0) / w2)
            }
            MassProfile::Tabulated { x: xs, m } => tabulated(xs, m, x),
        }
    }
}

fn tabulated(xs: &[f64], m: &[f64], x: f64) -> (f64, f64, f64) {
    let n = xs.len();
    let d1 = |i: usize| -> f64 {
        if i == 0 || i == n - 1 {
            return 0.0;
        }
        (m[i + 1] - m[i - 1]) / (xs[i + 1] - xs[i - 1])
    };
    let d2 = |i: usize| -> f64 {
        if i == 0 || i == n - 1 {
            return 0.0;
        }
        let (hl, hr) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        2.0 * ((m[i + 1] - m[i]) / hr - (m[i] - m[i - 1]) / hl) / (hl + hr)
    };
    if x <= xs[0] {
        return (m[0], 0.0, 0.0);
    }
    if x >= xs[n - 1] {
        return (m[n - 1], 0.0, 0.0);
    }
    let j = xs.partition_point(|&v| v <= x) - 1;
    let f = (x - xs[j]) / (xs[j + 1] - xs[j]);
    let lerp = |a: f64, b: f64| a + f * (b - a);
    (lerp(m[j], m[j + 1]), lerp(d1(j), d1(j + 1)), lerp(d2(j), d2(j + 1)))
}

/// V_eff for one sample.
pub fn effective_potential_value(v: f64, m: f64, dm: f64, d2m: f64, params: &VonRoosParams) -> f64 {
    let t = params.t_param();
    let s = params.s_param();
    let bracket = 0.5 * (1.0 + t) * d2m / m - 0.25 * (3.0 + 2.0 * s) * dm * dm / (m * m);
    v - HBAR2_OVER_2ME / m * bracket
}

/// V_eff at sample `index` of the grid.
pub fn effective_potential(grid: &PotentialGrid, params: &VonRoosParams, index: usize) -> Result<f64> {
    let m = grid.m[index];
    if !(m > 0.0) {
        return Err(Error::NonPositiveMass { index, value: m });
    }
    Ok(effective_potential_value(grid.v[index], m, grid.dm[index], grid.d2m[index], params))
}

/// V_eff on every sample.
pub fn effective_potential_samples(grid: &PotentialGrid, params: &VonRoosParams) -> Result<Vec<f64>> {
    grid.validate()?;
    params.validate()?;
    (0..grid.len())
        .map(|i| effective_potential(grid, params, i))
        .collect()
}

/// Lowest `n_modes` states; the returned ψ = √m·φ is renormalized.
pub fn solve_pdm(grid: &PotentialGrid, params: &VonRoosParams, n_modes: usize) -> Result<Vec<EigenPair>> {
    let v_eff = effective_potential_samples(grid, params)?;
    if let Some(i) = grid
        .m
        .windows(2)
        .position(|w| w[0].max(w[1]) > 10.0 * w[0].min(w[1]))
    {
        warn!(
            "mass changes more than 10x between x = {:.6} and {:.6} nm; profile is under-resolved",
            grid.x(i),
            grid.x(i + 1)
        );
    }
    let w: Vec<f64> = v_eff.iter().zip(&grid.m).map(|(v, m)| v * m).collect();
    let n = w.len();
    let mirror = (0..n / 2).all(|i| {
        let j = n - 1 - i;
        (w[i] - w[j]).abs() <= 1e-12 * (1.0 + w[i].abs()) && (grid.m[i] - grid.m[j]).abs() <= 1e-12 * grid.m[i]
    });
    let pencil = Pencil {
        h: HBAR2_OVER_2ME,
        dx: grid.dx,
        w: &w,
        mu: &grid.m,
    };
    let modes = eigen::lowest_modes(&pencil, n_modes, mirror)?;
    let root_m: Vec<f64> = grid.m.iter().map(|m| m.sqrt()).collect();
    Ok(numerov::finish(modes, Some(&root_m), grid.dx))
}

/// Max-norm residual of the untransformed equation, in eV:
/// (ħ²/2m)[ψ″ − (m′/m)ψ′ + ½(t·m″/m − s·m′²/m²)ψ] + (E − V)ψ,
/// with fourth-order centered differences and ψ = 0 at the walls.
/// Samples next to the walls are skipped (the stencil needs two neighbours).
pub fn residual_check(pair: &EigenPair, grid: &PotentialGrid, params: &VonRoosParams) -> f64 {
    let n = pair.psi.len();
    let psi = |k: isize| -> f64 {
        if k < 0 || k >= n as isize {
            0.0
        } else {
            pair.psi[k as usize]
        }
    };
    let t = params.t_param();
    let s = params.s_param();
    let h = grid.dx;
    let mut worst = 0.0_f64;
    for i in 1..n.saturating_sub(1) {
        let k = i as isize;
        let (p2, p1, p0, m1, m2) = (psi(k + 2), psi(k + 1), psi(k), psi(k - 1), psi(k - 2));
        let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
        let d2 = (-p2 + 16.0 * p1 - 30.0 * p0 + 16.0 * m1 - m2) / (12.0 * h * h);
        let (m, dm, d2m) = (grid.m[i], grid.dm[i], grid.d2m[i]);
        let bracket = d2 - dm / m * d1 + 0.5 * (t * d2m / m - s * dm * dm / (m * m)) * p0;
        let r = HBAR2_OVER_2ME / m * bracket + (pair.energy - grid.v[i]) * p0;
        worst = worst.max(r.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, MassSpec, PotentialSpec};
    use crate::numerov::{assemble, solve};

    fn profile_grid(profile: MassProfile, dx: f64) -> PotentialGrid {
        build_grid(
            20.0,
            dx,
            &PotentialSpec::SuperGaussian {
                heights: [1.0, 1.0, 1.0],
                exponent: 2,
            },
            &MassSpec::Profile { profile },
        )
        .unwrap()
    }

    fn bump() -> MassProfile {
        MassProfile::GaussianBump {
            base: 0.067,
            amplitude: 0.05,
            center: 10.0,
            width: 1.5,
        }
    }

    #[test]
    fn ordering_parameters() {
        let bdd = VonRoosParams::default();
        assert_eq!(bdd.t_param(), 0.0);
        assert_eq!(bdd.s_param(), 0.0);
        let p = VonRoosParams::new(-0.5, 0.0, -0.5).unwrap();
        assert_eq!(p.s_param(), 0.0);
        let q = VonRoosParams::new(-1.0, 0.5, -0.5).unwrap();
        assert_eq!(q.s_param(), -1.0);
        assert_eq!(q.with_s_override(0.25).s_param(), 0.25);
        assert!(matches!(VonRoosParams::new(0.0, 0.0, 0.0), Err(Error::OrderingConstraint(_))));
    }

    #[test]
    fn profile_derivatives_match_differences() {
        let profiles = [
            bump(),
            MassProfile::SmoothStep {
                left: 0.067,
                right: 0.092,
                center: 8.0,
                width: 1.0,
            },
        ];
        let h = 1e-4;
        for p in &profiles {
            p.validate().unwrap();
            for x in [3.0, 7.9, 8.3, 10.0, 11.7] {
                let (m, dm, d2m) = p.eval(x);
                let (mp, _, _) = p.eval(x + h);
                let (mm, _, _) = p.eval(x - h);
                assert!((dm - (mp - mm) / (2.0 * h)).abs() < 1e-8);
                assert!((d2m - (mp - 2.0 * m + mm) / (h * h)).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn tabulated_profile() {
        let p = MassProfile::Tabulated {
            x: vec![0.0, 1.0, 2.0, 3.0],
            m: vec![0.1, 0.2, 0.4, 0.4],
        };
        p.validate().unwrap();
        assert_eq!(p.eval(-1.0), (0.1, 0.0, 0.0));
        let (m, dm, _) = p.eval(1.5);
        assert!((m - 0.3).abs() < 1e-15);
        assert!((dm - 0.5 * (0.15 + 0.1)).abs() < 1e-15);
        assert!(MassProfile::Tabulated { x: vec![0.0, 0.0, 1.0], m: vec![1.0; 3] }
            .validate()
            .is_err());
        assert!(MassProfile::GaussianBump { base: 0.05, amplitude: -0.06, center: 0.0, width: 1.0 }
            .validate()
            .is_err());
    }

    #[test]
    fn constant_mass_reduces_to_numerov() {
        let grid = build_grid(
            21.0,
            0.01,
            &PotentialSpec::Flat { height: 0.0 },
            &MassSpec::Profile {
                profile: MassProfile::Constant { mass_ratio: 0.067 },
            },
        )
        .unwrap();
        let veff = effective_potential_samples(&grid, &VonRoosParams::default()).unwrap();
        assert!(veff.iter().zip(&grid.v).all(|(a, b)| a == b));
        let a = solve_pdm(&grid, &VonRoosParams::default(), 8).unwrap();
        let b = solve(&assemble(&grid).unwrap(), 8).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!(((p.energy - q.energy) / q.energy).abs() < 1e-9);
        }
    }

    #[test]
    fn effective_potential_matches_difference_oracle() {
        // V_eff − V = −(ħ²/2m)·(√m)″/√m + (ħ²/2m)·m′·(√m)′/(m·√m) − (ħ²/2m)·½(t m″/m − s m′²/m²)
        // for the default ordering, reconstructed from samples of √m.
        let p = bump();
        let params = VonRoosParams::default();
        let h = 1e-3;
        for x in [8.0, 9.5, 10.0, 11.2] {
            let (m, dm, d2m) = p.eval(x);
            let q = |y: f64| p.eval(y).0.sqrt();
            let q1 = (q(x + h) - q(x - h)) / (2.0 * h);
            let q2 = (q(x + h) - 2.0 * q(x) + q(x - h)) / (h * h);
            let c = HBAR2_OVER_2ME / m;
            let expect = -c * (q2 / q(x) - dm / m * q1 / q(x));
            let got = effective_potential_value(0.0, m, dm, d2m, &params);
            assert!((got - expect).abs() < 1e-8, "{got} vs {expect}");
        }
    }

    #[test]
    fn residual_oracle_and_normalization() {
        let grid = profile_grid(bump(), 0.005);
        let params = VonRoosParams::default();
        let pairs = solve_pdm(&grid, &params, 4).unwrap();
        for p in &pairs {
            let norm: f64 = p.psi.iter().map(|v| v * v).sum::<f64>() * grid.dx;
            assert!((norm - 1.0).abs() < 1e-9);
            let r = residual_check(p, &grid, &params);
            assert!(r <= 1e-5 * p.energy.abs().max(1.0), "mode {}: {r}", p.index);
        }
        let mut noisy = pairs[0].clone();
        for (i, v) in noisy.psi.iter_mut().enumerate() {
            *v += 0.01 * (((i * 7919) % 1000) as f64 / 1000.0 - 0.5);
        }
        assert!(residual_check(&noisy, &grid, &params) > 1e-5);
    }
}
