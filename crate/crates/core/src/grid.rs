//! Uniform meshes: energy axes for sweeps and position grids for bound states.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::numerov::supergaussian_potential;
use crate::pdm::MassProfile;
use crate::structure::LayeredStructure;

/// Inclusive uniform energy axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
}

impl EnergyGrid {
    pub fn new(e_min: f64, e_max: f64, n_points: usize) -> Result<Self> {
        let g = EnergyGrid {
            e_min,
            e_max,
            n_points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_min < self.e_max) || !self.e_min.is_finite() || !self.e_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "energy grid needs e_min < e_max, got [{}, {}]",
                self.e_min, self.e_max
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidParameter(
                "energy grid needs at least 2 points".into(),
            ));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.e_max - self.e_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.e_max
        } else {
            self.e_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }
}

/// What fills the infinite well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// Flat bottom at the given height.
    Flat {
        #[serde(default)]
        height: f64,
    },
    /// A layer stack whose left edge sits at `offset` nm from the left wall
    /// (centered when absent). Outside the stack the lead potential applies.
    Layered {
        structure: LayeredStructure,
        #[serde(default)]
        offset: Option<f64>,
    },
    /// Σᵢ Vᵢ exp[−3(x − 5i)^α], barriers centered at 5, 10 and 15 nm.
    SuperGaussian { heights: [f64; 3], exponent: u32 },
}

/// Where the mass samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassSpec {
    Uniform { mass_ratio: f64 },
    /// Per-layer masses of a `Layered` potential (lead mass outside the stack).
    Layers,
    Profile { profile: MassProfile },
}

impl MassSpec {
    pub fn uniform(mass_ratio: f64) -> Self {
        MassSpec::Uniform { mass_ratio }
    }
}

/// Sampled potential and mass inside an infinite well.
///
/// Sample `i` sits at `x0 + i·dx`; the walls (ψ = 0) are at `x0 − dx` and
/// `x0 + N·dx`, so the well spans `[x0 − dx, x0 + N·dx]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub x0: f64,
    pub dx: f64,
    /// eV
    pub v: Vec<f64>,
    /// m/mₑ
    pub m: Vec<f64>,
    /// dm/dx (nm⁻¹, in units of mₑ)
    pub dm: Vec<f64>,
    /// d²m/dx²
    pub d2m: Vec<f64>,
    /// Region edges for probability bookkeeping, walls included, ascending.
    pub boundaries: Vec<f64>,
}

impl PotentialGrid {
    /// Grid from raw samples; mass derivatives default to zero.
    pub fn from_samples(x0: f64, dx: f64, v: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        let n = v.len();
        let width = (n + 1) as f64 * dx;
        let g = PotentialGrid {
            x0,
            dx,
            v,
            m,
            dm: vec![0.0; n],
            d2m: vec![0.0; n],
            boundaries: vec![x0 - dx, x0 - dx + width],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("dx", self.dx)?;
        let n = self.v.len();
        if n < 3 {
            return Err(Error::GridTooSmall(n));
        }
        if self.m.len() != n || self.dm.len() != n || self.d2m.len() != n {
            return Err(Error::InvalidParameter(
                "potential and mass samples differ in length".into(),
            ));
        }
        if let Some((index, &value)) = self
            .m
            .iter()
            .enumerate()
            .find(|(_, &m)| !(m > 0.0 && m.is_finite()))
        {
            return Err(Error::NonPositiveMass { index, value });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Distance between the two walls.
    pub fn well_width(&self) -> f64 {
        (self.len() + 1) as f64 * self.dx
    }

    pub fn left_wall(&self) -> f64 {
        self.x0 - self.dx
    }

    /// `Some(m)` when every mass sample equals the first one.
    pub fn uniform_mass(&self) -> Option<f64> {
        let m0 = self.m[0];
        self.m.iter().all(|&m| m == m0).then_some(m0)
    }

    /// True when potential and mass are mirror-symmetric about the well center.
    pub fn is_mirror_symmetric(&self, tol: f64) -> bool {
        let n = self.len();
        (0..n / 2).all(|i| {
            let j = n - 1 - i;
            (self.v[i] - self.v[j]).abs() <= tol * (1.0 + self.v[i].abs())
                && (self.m[i] - self.m[j]).abs() <= tol * self.m[i]
        })
    }
}

/// Samples a well of width `domain_width` with step `dx`.
///
/// The mesh has `round(domain_width/dx) − 1` interior points, so the actual
/// wall separation is `(N + 1)·dx`. A sample lying exactly on a layer
/// interface (within 1e-6·dx) takes the mean of the two sides; every other
/// sample takes the value of the layer containing it.
pub fn build_grid(
    domain_width: f64,
    dx: f64,
    potential: &PotentialSpec,
    mass: &MassSpec,
) -> Result<PotentialGrid> {
    ensure_positive("dx", dx)?;
    ensure_positive("domain width", domain_width)?;
    let cells = (domain_width / dx).round();
    if cells < 4.0 {
        return Err(Error::GridTooSmall(cells.max(1.0) as usize - 1));
    }
    let n = cells as usize - 1;
    let width = cells * dx;
    let xs: Vec<f64> = (1..=n).map(|i| i as f64 * dx).collect();
    let snap = 1e-6 * dx;

    let (v, boundaries, layered) = match potential {
        PotentialSpec::Flat { height } => (vec![*height; n], vec![0.0, width], None),
        PotentialSpec::Layered { structure, offset } => {
            structure.validate()?;
            let offset = offset.unwrap_or((width - structure.total_width()) / 2.0);
            let edges: Vec<f64> = structure.interfaces().iter().map(|e| e + offset).collect();
            if edges[0] < -snap || edges[edges.len() - 1] > width + snap {
                return Err(Error::InvalidParameter(format!(
                    "structure [{:.4}, {:.4}] nm does not fit in a {width:.4} nm well",
                    edges[0],
                    edges[edges.len() - 1]
                )));
            }
            let heights: Vec<f64> = structure.layers.iter().map(|l| l.height).collect();
            let v = xs
                .iter()
                .map(|&x| sample_layers(x, &edges, &heights, structure.lead_potential, snap))
                .collect();
            let mut boundaries = vec![0.0];
            boundaries.extend(edges.iter().copied().filter(|&e| e > snap && e < width - snap));
            boundaries.push(width);
            (v, boundaries, Some((structure, edges)))
        }
        PotentialSpec::SuperGaussian { heights, exponent } => {
            let v = xs
                .iter()
                .map(|&x| supergaussian_potential(*heights, *exponent, x))
                .collect::<Result<Vec<_>>>()?;
            let mut boundaries = vec![0.0];
            for c in [5.0, 10.0, 15.0] {
                for e in [c - 1.0, c + 1.0] {
                    if e > 0.0 && e < width {
                        boundaries.push(e);
                    }
                }
            }
            boundaries.push(width);
            (v, boundaries, None)
        }
    };

    let (m, dm, d2m) = match mass {
        MassSpec::Uniform { mass_ratio } => {
            ensure_positive("mass ratio", *mass_ratio)?;
            (vec![*mass_ratio; n], vec![0.0; n], vec![0.0; n])
        }
        MassSpec::Layers => {
            let (structure, edges) = layered.ok_or_else(|| {
                Error::InvalidParameter("layer masses need a layered potential".into())
            })?;
            let masses: Vec<f64> = structure.layers.iter().map(|l| l.mass_ratio).collect();
            let m: Vec<f64> = xs
                .iter()
                .map(|&x| sample_layers(x, &edges, &masses, structure.lead_mass_ratio, snap))
                .collect();
            let (dm, d2m) = centered_derivatives(&m, dx);
            (m, dm, d2m)
        }
        MassSpec::Profile { profile } => {
            profile.validate()?;
            let mut m = Vec::with_capacity(n);
            let mut dm = Vec::with_capacity(n);
            let mut d2m = Vec::with_capacity(n);
            for &x in &xs {
                let (a, b, c) = profile.eval(x);
                m.push(a);
                dm.push(b);
                d2m.push(c);
            }
            (m, dm, d2m)
        }
    };

    let grid = PotentialGrid {
        x0: dx,
        dx,
        v,
        m,
        dm,
        d2m,
        boundaries,
    };
    grid.validate()?;
    Ok(grid)
}

fn sample_layers(x: f64, edges: &[f64], values: &[f64], outside: f64, snap: f64) -> f64 {
    // value just left / right of each edge
    let value_at = |region: isize| -> f64 {
        if region < 0 || region as usize >= values.len() {
            outside
        } else {
            values[region as usize]
        }
    };
    for (j, &e) in edges.iter().enumerate() {
        if (x - e).abs() <= snap {
            return 0.5 * (value_at(j as isize - 1) + value_at(j as isize));
        }
    }
    let region = edges.iter().take_while(|&&e| e < x).count() as isize - 1;
    value_at(region)
}

/// Second-order centered first and second derivatives (one-sided at the ends).
fn centered_derivatives(f: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        d1[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        d2[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    }
    d1[0] = (f[1] - f[0]) / h;
    d1[n - 1] = (f[n - 1] - f[n - 2]) / h;
    d2[0] = d2[1];
    d2[n - 1] = d2[n - 2];
    (d1, d2)
}
