//! Matrix Numerov bound states of an infinite well with constant mass.
//!
//! The Schrödinger equation ψ″ = −(2m/ħ²)(E − V)ψ is discretized with the
//! fourth-order stencil Aψ = B·diag(f)ψ, where
//!
//! ```text
//! A = (I₋₁ − 2I₀ + I₁)/Δx²,   B = (I₋₁ + 10I₀ + I₁)/12
//! ```
//!
//! and solved as the generalized problem (−(ħ²/2m)A + B·V)ψ = E·Bψ.
//! Dirichlet truncation of the stencils is the infinite well.

use serde::Serialize;

use crate::eigen::{self, Pencil};
use crate::error::{Error, Result};
use crate::grid::PotentialGrid;
use crate::units::HBAR2_OVER_2ME;

/// Tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    /// (I₋₁ − 2I₀ + I₁)/Δx²
    pub fn second_difference(n: usize, dx: f64) -> Self {
        let c = 1.0 / (dx * dx);
        Tridiagonal {
            sub: vec![c; n.saturating_sub(1)],
            diag: vec![-2.0 * c; n],
            sup: vec![c; n.saturating_sub(1)],
        }
    }

    /// (I₋₁ + 10I₀ + I₁)/12
    pub fn numerov_weights(n: usize) -> Self {
        Tridiagonal {
            sub: vec![1.0 / 12.0; n.saturating_sub(1)],
            diag: vec![10.0 / 12.0; n],
            sup: vec![1.0 / 12.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves self·x = rhs.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let tiny = f64::EPSILON * self.diag.iter().map(|v| v.abs()).fold(0.0, f64::max);
        eigen::solve_tridiagonal(
            self.sub.clone(),
            self.diag.clone(),
            self.sup.clone(),
            rhs.to_vec(),
            tiny.max(f64::MIN_POSITIVE),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.sup[i];
                m[i + 1][i] = self.sub[i];
            }
        }
        m
    }
}

/// Assembled constant-mass Numerov problem.
#[derive(Debug, Clone)]
pub struct NumerovSystem {
    pub a: Tridiagonal,
    pub b: Tridiagonal,
    /// Diagonal of V (eV).
    pub v_diag: Vec<f64>,
    pub mass_ratio: f64,
    pub dx: f64,
    mirror_symmetric: bool,
}

/// One bound state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    /// 1-based, ascending in energy.
    pub index: usize,
    /// eV
    pub energy: f64,
    /// Samples on the grid, Σψᵢ²Δx = 1.
    pub psi: Vec<f64>,
}

impl EigenPair {
    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p * p).collect()
    }
}

/// Builds A, B and V for a constant-mass grid.
pub fn assemble(grid: &PotentialGrid) -> Result<NumerovSystem> {
    grid.validate()?;
    let mass_ratio = match grid.uniform_mass() {
        Some(m) => m,
        None => {
            let index = grid.m.iter().position(|&m| m != grid.m[0]).unwrap_or(0);
            return Err(Error::NonUniformMass { index });
        }
    };
    let n = grid.len();
    Ok(NumerovSystem {
        a: Tridiagonal::second_difference(n, grid.dx),
        b: Tridiagonal::numerov_weights(n),
        v_diag: grid.v.clone(),
        mass_ratio,
        dx: grid.dx,
        mirror_symmetric: grid.is_mirror_symmetric(1e-12),
    })
}

impl NumerovSystem {
    pub fn len(&self) -> usize {
        self.v_diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_diag.is_empty()
    }

    /// ‖(−(ħ²/2m)B⁻¹A + V)ψ − Eψ‖ in the discrete L² norm.
    pub fn residual(&self, pair: &EigenPair) -> f64 {
        let c = HBAR2_OVER_2ME / self.mass_ratio;
        let kinetic = self.b.solve(&self.a.mul_vec(&pair.psi));
        let sum: f64 = (0..self.len())
            .map(|i| {
                let r = -c * kinetic[i] + (self.v_diag[i] - pair.energy) * pair.psi[i];
                r * r
            })
            .sum();
        (sum * self.dx).sqrt()
    }
}

/// Lowest `n_modes` eigenpairs, ascending.
pub fn solve(system: &NumerovSystem, n_modes: usize) -> Result<Vec<EigenPair>> {
    let mu = vec![system.mass_ratio; system.len()];
    let w: Vec<f64> = system.v_diag.iter().map(|v| v * system.mass_ratio).collect();
    let pencil = Pencil {
        h: HBAR2_OVER_2ME,
        dx: system.dx,
        w: &w,
        mu: &mu,
    };
    let modes = eigen::lowest_modes(&pencil, n_modes, system.mirror_symmetric)?;
    Ok(finish(modes, None, system.dx))
}

/// Converts solver modes into normalized, sign-fixed pairs; `scale`
/// multiplies each sample (√m for the position-dependent mass case).
pub(crate) fn finish(modes: Vec<eigen::Mode>, scale: Option<&[f64]>, dx: f64) -> Vec<EigenPair> {
    modes
        .into_iter()
        .enumerate()
        .map(|(i, mode)| {
            let mut psi = mode.phi;
            if let Some(s) = scale {
                psi.iter_mut().zip(s).for_each(|(p, s)| *p *= s);
            }
            let norm = (psi.iter().map(|p| p * p).sum::<f64>() * dx).sqrt();
            psi.iter_mut().for_each(|p| *p /= norm);
            fix_sign(&mut psi);
            EigenPair {
                index: i + 1,
                energy: mode.energy,
                psi,
            }
        })
        .collect()
}

/// Makes the first significant sample positive. Tails below 1e-6 of the
/// peak are ignored, since their sign is roundoff.
fn fix_sign(psi: &mut [f64]) {
    let peak = psi.iter().map(|p| p.abs()).fold(0.0, f64::max);
    if let Some(first) = psi.iter().find(|p| p.abs() > 1e-6 * peak) {
        if *first < 0.0 {
            psi.iter_mut().for_each(|p| *p = -*p);
        }
    }
}

/// Σᵢ Vᵢ exp[−3(x − 5i)^α] with barriers centered at 5, 10 and 15 nm.
pub fn supergaussian_potential(heights: [f64; 3], exponent: u32, x: f64) -> Result<f64> {
    if exponent < 2 || !exponent.is_multiple_of(2) {
        return Err(Error::InvalidExponent(exponent));
    }
    Ok(heights
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let u = x - 5.0 * (i + 1) as f64;
            v * (-3.0 * u.powi(exponent as i32)).exp()
        })
        .sum())
}

/// Probability carried by one region of the well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionProbability {
    pub lo: f64,
    pub hi: f64,
    pub probability: f64,
}

/// Probability per region delimited by `grid.boundaries`.
pub fn confinement_report(pair: &EigenPair, grid: &PotentialGrid) -> Vec<RegionProbability> {
    region_probabilities(&pair.psi, grid, &grid.boundaries)
}

/// Σ|ψᵢ|²Δx over the samples of each region. A sample lying on a region
/// edge is shared equally between its two neighbours.
pub fn region_probabilities(psi: &[f64], grid: &PotentialGrid, boundaries: &[f64]) -> Vec<RegionProbability> {
    let snap = 1e-6 * grid.dx;
    let mut out: Vec<RegionProbability> = boundaries
        .windows(2)
        .map(|w| RegionProbability {
            lo: w[0],
            hi: w[1],
            probability: 0.0,
        })
        .collect();
    if out.is_empty() {
        return out;
    }
    let last = out.len() - 1;
    for (i, p) in psi.iter().enumerate() {
        let x = grid.x(i);
        let weight = p * p * grid.dx;
        if let Some(j) = boundaries[1..last + 1]
            .iter()
            .position(|&b| (x - b).abs() <= snap)
        {
            out[j].probability += 0.5 * weight;
            out[j + 1].probability += 0.5 * weight;
            continue;
        }
        let j = boundaries[1..=last]
            .iter()
            .take_while(|&&b| b < x)
            .count()
            .min(last);
        out[j].probability += weight;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, MassSpec, PotentialSpec};
    use crate::structure::LayeredStructure;
    use crate::units::infinite_well_level;
    use nalgebra::{DMatrix, DVector};

    fn flat(width: f64, dx: f64) -> PotentialGrid {
        build_grid(width, dx, &PotentialSpec::Flat { height: 0.0 }, &MassSpec::uniform(0.067)).unwrap()
    }

    fn dqwtb(v1: f64, v2: f64, dx: f64) -> PotentialGrid {
        let s = LayeredStructure::triple_barrier(v1, 3.0, 3.0, v2, 3.0, 3.0, 0.067).unwrap();
        build_grid(21.0, dx, &PotentialSpec::Layered { structure: s, offset: None }, &MassSpec::uniform(0.067))
            .unwrap()
    }

    /// Dense oracle: eigenvalues of the nonsymmetric H = −c·B⁻¹A + V.
    fn dense_energies(grid: &PotentialGrid) -> Vec<f64> {
        let n = grid.len();
        let c = HBAR2_OVER_2ME / grid.m[0];
        let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => -2.0 / (grid.dx * grid.dx),
            1 => 1.0 / (grid.dx * grid.dx),
            _ => 0.0,
        });
        let b = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 10.0 / 12.0,
            1 => 1.0 / 12.0,
            _ => 0.0,
        });
        let b_inv_a = b.lu().solve(&a).unwrap();
        let h = -c * b_inv_a + DMatrix::from_diagonal(&DVector::from_vec(grid.v.clone()));
        let eig = h.complex_eigenvalues();
        assert!(eig.iter().all(|z| z.im.abs() < 1e-9 * z.re.abs().max(1.0)));
        let mut e: Vec<f64> = eig.iter().map(|z| z.re).collect();
        e.sort_by(|x, y| x.partial_cmp(y).unwrap());
        e
    }

    #[test]
    fn three_point_stencils() {
        let a = Tridiagonal::second_difference(3, 0.5).to_dense();
        assert_eq!(a, vec![vec![-8.0, 4.0, 0.0], vec![4.0, -8.0, 4.0], vec![0.0, 4.0, -8.0]]);
        let b = Tridiagonal::numerov_weights(3).to_dense();
        let (t, d) = (1.0 / 12.0, 10.0 / 12.0);
        assert_eq!(b, vec![vec![d, t, 0.0], vec![t, d, t], vec![0.0, t, d]]);
    }

    #[test]
    fn assemble_rejects_varying_mass() {
        let mut g = flat(5.0, 0.1);
        g.m[7] = 0.08;
        assert!(matches!(assemble(&g), Err(Error::NonUniformMass { index: 7 })));
    }

    #[test]
    fn plateaus_of_rectangular_structure() {
        let g = dqwtb(1.0, 1.0, 0.05);
        let sys = assemble(&g).unwrap();
        let ones = sys.v_diag.iter().filter(|&&v| v == 1.0).count();
        // three 3 nm plateaus with interior samples only
        assert_eq!(ones, 3 * 59);
    }

    #[test]
    fn empty_well_levels() {
        let g = flat(21.0, 0.005);
        let pairs = solve(&assemble(&g).unwrap(), 10).unwrap();
        for p in &pairs {
            let exact = infinite_well_level(p.index, 21.0, 0.067);
            assert!(((p.energy - exact) / exact).abs() < 1e-6, "{} {}", p.energy, exact);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        for g in [dqwtb(1.0, 1.0, 0.15), dqwtb(5.0, 2.0, 0.15), flat(7.0, 0.1)] {
            let exact = dense_energies(&g);
            let pairs = solve(&assemble(&g).unwrap(), 20).unwrap();
            for p in &pairs {
                let e = exact[p.index - 1];
                assert!((p.energy - e).abs() < 1e-9 * e.abs().max(1.0), "{} vs {}", p.energy, e);
            }
        }
    }

    #[test]
    fn residual_orthonormality_and_parity() {
        let g = dqwtb(5.0, 5.0, 0.01);
        let sys = assemble(&g).unwrap();
        let pairs = solve(&sys, 20).unwrap();
        for (i, p) in pairs.iter().enumerate() {
            assert!(sys.residual(p) <= 1e-8 * p.energy.abs().max(1.0), "mode {} E {} res {:e}", p.index, p.energy, sys.residual(p));
            for q in &pairs[i..] {
                let dot: f64 = p.psi.iter().zip(&q.psi).map(|(a, b)| a * b).sum::<f64>() * g.dx;
                let expect = if p.index == q.index { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-8, "<{},{}> = {dot}", p.index, q.index);
            }
            let n = p.psi.len();
            let even = (0..n).all(|k| (p.psi[k] - p.psi[n - 1 - k]).abs() < 1e-6);
            let odd = (0..n).all(|k| (p.psi[k] + p.psi[n - 1 - k]).abs() < 1e-6);
            let defect = (0..n).map(|k| (p.psi[k] - p.psi[n - 1 - k]).abs().min((p.psi[k] + p.psi[n - 1 - k]).abs())).fold(0.0, f64::max);
            assert!(even ^ odd, "mode {} lacks parity: E = {} defect {defect:e}", p.index, p.energy);
        }
    }

    #[test]
    fn supergaussian_values() {
        assert_eq!(supergaussian_potential([1.0, 2.0, 3.0], 2, 5.0).unwrap(), 1.0 + 2.0 * (-75.0f64).exp() + 3.0 * (-300.0f64).exp());
        assert!(supergaussian_potential([5.0; 3], 38, 0.0).unwrap() < 1e-300);
        assert!(matches!(supergaussian_potential([5.0; 3], 3, 0.0), Err(Error::InvalidExponent(3))));
        assert!(supergaussian_potential([5.0; 3], 0, 0.0).is_err());
    }

    #[test]
    fn halves_of_empty_well() {
        let mut g = flat(21.0, 0.01);
        let pairs = solve(&assemble(&g).unwrap(), 2).unwrap();
        g.boundaries = vec![0.0, 10.5, 21.0];
        let r = confinement_report(&pairs[0], &g);
        assert!((r[0].probability - 0.5).abs() < 1e-9);
        assert!((r[1].probability - 0.5).abs() < 1e-9);
        let total: f64 = confinement_report(&pairs[1], &dqwtb(1.0, 1.0, 0.01))
            .iter()
            .map(|r| r.probability)
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
