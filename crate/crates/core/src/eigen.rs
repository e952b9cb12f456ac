//! Lowest eigenpairs of the Numerov pencil
//!
//! ```text
//! −h·A φ + B·diag(w) φ = E · B·diag(μ) φ
//! ```
//!
//! with A = (S − 2I)/Δx², B = (S + 10I)/12 and S the symmetric shift
//! (Dirichlet truncation). The pencil is not symmetric, but A and B commute,
//! so substituting φ = B u gives the symmetric-definite pentadiagonal pencil
//! (−h·AB + B·diag(w)·B, B·diag(μ)·B) with the same spectrum. Its LDLᵀ
//! inertia counts eigenvalues below a shift; bisection on that count locates
//! each eigenvalue, and inverse iteration on the tridiagonal form recovers φ.
//! Eigenvectors are orthogonal in the diag(μ) inner product.

use crate::error::{Error, Result};

/// Pencil data: `h` = ħ²/(2mₑ), `w[i]` = μᵢ·Vᵢ, `mu[i]` = μᵢ.
pub(crate) struct Pencil<'a> {
    pub h: f64,
    pub dx: f64,
    pub w: &'a [f64],
    pub mu: &'a [f64],
}

#[derive(Debug, Clone)]
pub(crate) struct Mode {
    pub energy: f64,
    /// Normalized so Σ μᵢ φᵢ² Δx = 1.
    pub phi: Vec<f64>,
}

/// Symmetric pentadiagonal matrix: main, first and second superdiagonals.
struct Penta {
    d0: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

/// B·diag(d)·B in band form (without the 1/144).
fn bdb(d: &[f64]) -> Penta {
    let n = d.len();
    let mut d0 = vec![0.0; n];
    let mut d1 = vec![0.0; n - 1];
    let mut d2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n {
        let mut s = 100.0 * d[i];
        if i > 0 {
            s += d[i - 1];
        }
        if i + 1 < n {
            s += d[i + 1];
        }
        d0[i] = s / 144.0;
    }
    for i in 0..n - 1 {
        d1[i] = 10.0 * (d[i] + d[i + 1]) / 144.0;
    }
    for i in 0..n.saturating_sub(2) {
        d2[i] = d[i + 1] / 144.0;
    }
    Penta { d0, d1, d2 }
}

impl<'a> Pencil<'a> {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    /// K = −h·AB + B·diag(w)·B and M = B·diag(μ)·B.
    fn symmetric_forms(&self) -> (Penta, Penta) {
        let n = self.len();
        let c = self.h / (12.0 * self.dx * self.dx);
        let mut k = bdb(self.w);
        for i in 0..n {
            let s2 = if i == 0 || i + 1 == n { 1.0 } else { 2.0 };
            k.d0[i] -= c * (s2 - 20.0);
        }
        for v in k.d1.iter_mut() {
            *v -= c * 8.0;
        }
        for v in k.d2.iter_mut() {
            *v -= c;
        }
        (k, bdb(self.mu))
    }

    /// Tridiagonal −h·A + B·diag(w − σμ) as (sub, diag, super).
    fn shifted_tridiagonal(&self, sigma: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.len();
        let c = self.h / (self.dx * self.dx);
        let d: Vec<f64> = (0..n).map(|i| self.w[i] - sigma * self.mu[i]).collect();
        let sub = (0..n - 1).map(|i| -c + d[i] / 12.0).collect();
        let diag = (0..n).map(|i| 2.0 * c + 10.0 * d[i] / 12.0).collect();
        let sup = (0..n - 1).map(|i| -c + d[i + 1] / 12.0).collect();
        (sub, diag, sup)
    }

    /// B·diag(μ)·x
    fn apply_mass(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let y: Vec<f64> = x.iter().zip(self.mu).map(|(a, b)| a * b).collect();
        (0..n)
            .map(|i| {
                let mut s = 10.0 * y[i];
                if i > 0 {
                    s += y[i - 1];
                }
                if i + 1 < n {
                    s += y[i + 1];
                }
                s / 12.0
            })
            .collect()
    }

    fn mass_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(self.mu)
            .map(|((x, y), m)| x * y * m)
            .sum::<f64>()
            * self.dx
    }
}

struct Counter {
    k: Penta,
    m: Penta,
    scale: f64,
}

impl Counter {
    fn new(p: &Pencil) -> Self {
        let (k, m) = p.symmetric_forms();
        let scale = k.d0.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        Counter { k, m, scale }
    }

    /// Number of eigenvalues strictly below `e`.
    fn count_below(&self, e: f64) -> usize {
        let n = self.k.d0.len();
        let tiny = f64::EPSILON * self.scale;
        let (mut dm1, mut dm2) = (0.0_f64, 0.0_f64); // pivots j-1, j-2
        let (mut l1_prev, mut l2_prev, mut l2_prev2) = (0.0_f64, 0.0_f64, 0.0_f64);
        // l1_prev = L[j][j-1], l2_prev = L[j][j-2]; l2_prev2 = L[j+1][j-1]
        let mut negatives = 0;
        for j in 0..n {
            let a = |band: &Penta, off: usize| -> f64 {
                match off {
                    0 => band.d0[j],
                    1 => band.d1[j],
                    _ => band.d2[j],
                }
            };
            let mut dj = a(&self.k, 0) - e * a(&self.m, 0)
                - l1_prev * l1_prev * dm1
                - l2_prev * l2_prev * dm2;
            if dj.abs() < tiny {
                dj = -tiny;
            }
            if dj < 0.0 {
                negatives += 1;
            }
            // next column of L
            let l1_next = if j + 1 < n {
                (a(&self.k, 1) - e * a(&self.m, 1) - l2_prev2 * l1_prev * dm1) / dj
            } else {
                0.0
            };
            let l2_next = if j + 2 < n {
                (a(&self.k, 2) - e * a(&self.m, 2)) / dj
            } else {
                0.0
            };
            // shift: for row j+1, L[j+1][j] = l1_next, L[j+1][j-1] = l2_prev2
            l2_prev = l2_prev2;
            l1_prev = l1_next;
            l2_prev2 = l2_next;
            dm2 = dm1;
            dm1 = dj;
        }
        negatives
    }
}

/// Solves a tridiagonal system with partial pivoting (LAPACK gtsv scheme).
/// Zero pivots are replaced by `tiny`, which is what inverse iteration wants.
pub(crate) fn solve_tridiagonal(
    mut dl: Vec<f64>,
    mut d: Vec<f64>,
    mut du: Vec<f64>,
    mut b: Vec<f64>,
    tiny: f64,
) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![b[0] / if d[0] == 0.0 { tiny } else { d[0] }];
    }
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
    b
}

/// Deterministic start vector with no particular symmetry.
fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect()
}

const MAX_ITERATIONS: usize = 12;

/// Lowest `n_modes` eigenpairs, ascending.
///
/// When `mirror_symmetric` is set, members of a degenerate cluster
/// (spread < 1e-9·max(1, |E|)) are replaced by their even and odd
/// combinations, even ones first.
pub(crate) fn lowest_modes(p: &Pencil, n_modes: usize, mirror_symmetric: bool) -> Result<Vec<Mode>> {
    let n = p.len();
    if n_modes > n {
        return Err(Error::TooManyModes {
            requested: n_modes,
            available: n,
        });
    }
    if n_modes == 0 {
        return Ok(Vec::new());
    }
    let counter = Counter::new(p);
    let energies = bisect_all(&counter, p, n_modes)?;

    let mut modes: Vec<Mode> = Vec::with_capacity(n_modes);
    for (idx, &e) in energies.iter().enumerate() {
        let phi = inverse_iteration(p, e, idx, &modes)?;
        modes.push(Mode { energy: e, phi });
    }
    if mirror_symmetric {
        symmetrize_clusters(p, &mut modes);
    }
    Ok(modes)
}

fn bisect_all(counter: &Counter, p: &Pencil, n_modes: usize) -> Result<Vec<f64>> {
    // Rayleigh-quotient bound: no eigenvalue lies below min(w/μ)
    let lower = p
        .w
        .iter()
        .zip(p.mu)
        .map(|(w, m)| w / m)
        .fold(f64::INFINITY, f64::min);
    let mut lo0 = lower - 1e-9 * lower.abs().max(1.0);
    let mut hi0 = lower.abs().max(1.0) + lower;
    let mut width = hi0 - lo0;
    while counter.count_below(hi0) < n_modes {
        width *= 2.0;
        hi0 = lo0 + width;
        if !hi0.is_finite() {
            return Err(Error::EigenNonConvergence { mode: n_modes });
        }
    }
    if counter.count_below(lo0) > 0 {
        lo0 -= width;
    }

    let mut out = Vec::with_capacity(n_modes);
    for k in 0..n_modes {
        // lo: count ≤ k, hi: count ≥ k + 1
        let mut lo = match out.last() {
            Some(&prev) if counter.count_below(prev) <= k => prev,
            _ => lo0,
        };
        let mut hi = hi0;
        let mut iterations = 0;
        while hi - lo > 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if counter.count_below(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
            if iterations > 2200 {
                return Err(Error::EigenNonConvergence { mode: k + 1 });
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

fn inverse_iteration(p: &Pencil, sigma: f64, index: usize, previous: &[Mode]) -> Result<Vec<f64>> {
    let n = p.len();
    let gap = 1e-3 * sigma.abs().max(1.0);
    let neighbours: Vec<&Mode> = previous
        .iter()
        .filter(|m| (m.energy - sigma).abs() < gap)
        .collect();
    let (sub, diag, sup) = p.shifted_tridiagonal(sigma);
    let scale = diag.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let tiny = f64::EPSILON * scale;

    let mut x = start_vector(n, index as u64 + 1);
    normalize(p, &mut x);
    let mut converged = false;
    let mut last_change = f64::INFINITY;
    for it in 0..MAX_ITERATIONS {
        let rhs = p.apply_mass(&x);
        let mut y = solve_tridiagonal(sub.clone(), diag.clone(), sup.clone(), rhs, tiny);
        for m in &neighbours {
            let c = p.mass_dot(&y, &m.phi);
            for (a, b) in y.iter_mut().zip(&m.phi) {
                *a -= c * b;
            }
        }
        let growth = normalize(p, &mut y);
        if !growth.is_finite() || growth == 0.0 {
            return Err(Error::EigenNonConvergence { mode: index + 1 });
        }
        // align sign before measuring the change
        if p.mass_dot(&y, &x) < 0.0 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
        let change = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let peak = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        x = y;
        // stop at the roundoff floor: tiny change, or no further progress
        if it >= 1 && (change <= 1e-12 * peak || change > 0.5 * last_change) {
            converged = true;
            break;
        }
        last_change = change;
    }
    // an iterate still wobbling inside a numerically degenerate cluster is
    // acceptable as long as it solves the pencil
    let r = pencil_residual(p, sigma, &x);
    if !(r <= 1e-6 * sigma.abs().max(1.0)) || (!converged && !(r <= 1e-8 * sigma.abs().max(1.0))) {
        return Err(Error::EigenNonConvergence { mode: index + 1 });
    }
    Ok(x)
}

/// ‖(−hA + B·diag(w − σμ))φ‖∞ / ‖B·diag(μ)φ‖∞
pub(crate) fn pencil_residual(p: &Pencil, sigma: f64, phi: &[f64]) -> f64 {
    let (sub, diag, sup) = p.shifted_tridiagonal(sigma);
    let n = phi.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mut s = diag[i] * phi[i];
        if i > 0 {
            s += sub[i - 1] * phi[i - 1];
        }
        if i + 1 < n {
            s += sup[i] * phi[i + 1];
        }
        worst = worst.max(s.abs());
    }
    let norm = p
        .apply_mass(phi)
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    worst / norm
}

/// Scales to unit μ-weighted norm; returns the norm before scaling.
fn normalize(p: &Pencil, x: &mut [f64]) -> f64 {
    let norm = p.mass_dot(x, x).sqrt();
    if norm > 0.0 && norm.is_finite() {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// φᵀ(−h·B⁻¹A + diag(w))φ / φᵀdiag(μ)φ, the Rayleigh quotient of the
/// symmetric pencil equivalent to the Numerov one.
pub(crate) fn rayleigh_quotient(p: &Pencil, phi: &[f64]) -> f64 {
    let n = phi.len();
    let c = 1.0 / (p.dx * p.dx);
    let a_phi: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { phi[i - 1] } else { 0.0 };
            let right = if i + 1 < n { phi[i + 1] } else { 0.0 };
            c * (left - 2.0 * phi[i] + right)
        })
        .collect();
    let z = solve_tridiagonal(
        vec![1.0 / 12.0; n - 1],
        vec![10.0 / 12.0; n],
        vec![1.0 / 12.0; n - 1],
        a_phi,
        f64::MIN_POSITIVE,
    );
    let num: f64 = (0..n).map(|i| phi[i] * (-p.h * z[i] + p.w[i] * phi[i])).sum();
    let den: f64 = (0..n).map(|i| p.mu[i] * phi[i] * phi[i]).sum();
    num / den
}

/// On a mirror-symmetric grid every eigenvector has definite parity. Modes
/// closer than 1e-6·max(1, |E|) are split into even and odd combinations and
/// reassigned to the bisection energies by Rayleigh quotient; quotients
/// within 1e-9·max(1, |E|) count as tied and put the even mode first.
fn symmetrize_clusters(p: &Pencil, modes: &mut [Mode]) {
    let n = modes.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && (modes[end].energy - modes[end - 1].energy).abs()
                < 1e-6 * modes[end].energy.abs().max(1.0)
        {
            end += 1;
        }
        split_by_parity(p, &mut modes[start..end]);
        start = end;
    }
}

fn split_by_parity(p: &Pencil, cluster: &mut [Mode]) {
    // parity parts of unit vectors, largest first
    let mut parts: Vec<(f64, bool, Vec<f64>)> = Vec::with_capacity(2 * cluster.len());
    for m in cluster.iter() {
        let v = &m.phi;
        let len = v.len();
        for even in [true, false] {
            let sign = if even { 1.0 } else { -1.0 };
            let part: Vec<f64> = (0..len).map(|i| 0.5 * (v[i] + sign * v[len - 1 - i])).collect();
            parts.push((p.mass_dot(&part, &part).sqrt(), even, part));
        }
    }
    parts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut accepted: Vec<(bool, Vec<f64>)> = Vec::with_capacity(cluster.len());
    for (_, even, mut v) in parts {
        if accepted.len() == cluster.len() {
            break;
        }
        for (_, b) in accepted.iter().filter(|(e, _)| *e == even) {
            let c = p.mass_dot(&v, b);
            v.iter_mut().zip(b).for_each(|(a, x)| *a -= c * x);
        }
        let norm = p.mass_dot(&v, &v).sqrt();
        if norm > 0.1 {
            v.iter_mut().for_each(|x| *x /= norm);
            accepted.push((even, v));
        }
    }
    // a parity subspace of dimension > 1 would need a Ritz step; leave such
    // clusters untouched
    let evens = accepted.iter().filter(|(e, _)| *e).count();
    if accepted.len() != cluster.len() || evens > 1 || accepted.len() - evens > 1 {
        return;
    }
    let mut ranked: Vec<(f64, bool, Vec<f64>)> = accepted
        .into_iter()
        .map(|(even, v)| (rayleigh_quotient(p, &v), even, v))
        .collect();
    let scale = cluster[0].energy.abs().max(1.0);
    ranked.sort_by(|a, b| {
        if (a.0 - b.0).abs() < 1e-9 * scale {
            b.1.cmp(&a.1)
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    for (slot, (_, _, v)) in cluster.iter_mut().zip(ranked) {
        slot.phi = v;
    }
}
