//! Piecewise-constant scattering geometry.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// One constant-potential slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// nm
    pub width: f64,
    /// eV
    pub height: f64,
    #[serde(default = "default_mass_ratio")]
    pub mass_ratio: f64,
}

/// GaAs conduction-band mass, the only mass the reference structures use.
pub const GAAS_MASS_RATIO: f64 = 0.067;

fn default_mass_ratio() -> f64 {
    GAAS_MASS_RATIO
}

impl Layer {
    pub fn new(width: f64, height: f64, mass_ratio: f64) -> Result<Self> {
        let layer = Layer {
            width,
            height,
            mass_ratio,
        };
        layer.validate()?;
        Ok(layer)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("layer width", self.width)?;
        ensure_positive("layer mass ratio", self.mass_ratio)?;
        if !self.height.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "layer height must be finite, got {}",
                self.height
            )));
        }
        Ok(())
    }
}

/// Ordered stack of layers between two identical semi-infinite leads.
///
/// Incidence is from the left; the structure's left edge sits at x = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredStructure {
    pub layers: Vec<Layer>,
    #[serde(default)]
    pub lead_potential: f64,
    #[serde(default = "default_mass_ratio")]
    pub lead_mass_ratio: f64,
}

impl LayeredStructure {
    pub fn new(layers: Vec<Layer>, lead_potential: f64, lead_mass_ratio: f64) -> Result<Self> {
        let s = LayeredStructure {
            layers,
            lead_potential,
            lead_mass_ratio,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidParameter(
                "structure needs at least one layer".into(),
            ));
        }
        for layer in &self.layers {
            layer.validate()?;
        }
        ensure_positive("lead mass ratio", self.lead_mass_ratio)?;
        if !self.lead_potential.is_finite() {
            return Err(Error::InvalidParameter("lead potential must be finite".into()));
        }
        Ok(())
    }

    /// Barrier of height `v0` and width `a` in zero-potential leads.
    pub fn single_barrier(v0: f64, a: f64, mass_ratio: f64) -> Result<Self> {
        Self::new(vec![Layer::new(a, v0, mass_ratio)?], 0.0, mass_ratio)
    }

    /// Barrier (v1, a) | well L | barrier (v2, b).
    pub fn double_barrier(
        v1: f64,
        a: f64,
        well: f64,
        v2: f64,
        b: f64,
        mass_ratio: f64,
    ) -> Result<Self> {
        let mut layers = vec![Layer::new(a, v1, mass_ratio)?];
        if well > 0.0 {
            layers.push(Layer::new(well, 0.0, mass_ratio)?);
        }
        if b > 0.0 {
            layers.push(Layer::new(b, v2, mass_ratio)?);
        }
        Self::new(layers, 0.0, mass_ratio)
    }

    /// Lateral barrier (v1, a) | well L1 | central barrier (v2, b) | well L2 | lateral barrier (v1, a).
    #[allow(clippy::too_many_arguments)]
    pub fn triple_barrier(
        v1: f64,
        a: f64,
        well1: f64,
        v2: f64,
        b: f64,
        well2: f64,
        mass_ratio: f64,
    ) -> Result<Self> {
        let candidates = [
            (a, v1),
            (well1, 0.0),
            (b, v2),
            (well2, 0.0),
            (a, v1),
        ];
        let mut layers = Vec::with_capacity(5);
        for (w, h) in candidates {
            if w > 0.0 {
                layers.push(Layer::new(w, h, mass_ratio)?);
            }
        }
        Self::new(layers, 0.0, mass_ratio)
    }

    pub fn total_width(&self) -> f64 {
        self.layers.iter().map(|l| l.width).sum()
    }

    /// Interface positions from the left edge, both outer edges included.
    pub fn interfaces(&self) -> Vec<f64> {
        let mut x = 0.0;
        let mut out = Vec::with_capacity(self.layers.len() + 1);
        out.push(0.0);
        for l in &self.layers {
            x += l.width;
            out.push(x);
        }
        out
    }

    /// Same stack seen from the right.
    pub fn reversed(&self) -> Self {
        let mut layers = self.layers.clone();
        layers.reverse();
        LayeredStructure {
            layers,
            ..self.clone()
        }
    }

    /// Copy with every layer cut into `pieces` equal slabs.
    pub fn subdivided(&self, pieces: usize) -> Self {
        let pieces = pieces.max(1);
        let layers = self
            .layers
            .iter()
            .flat_map(|l| {
                std::iter::repeat_n(
                    Layer {
                        width: l.width / pieces as f64,
                        ..*l
                    },
                    pieces,
                )
            })
            .collect();
        LayeredStructure {
            layers,
            ..self.clone()
        }
    }

    pub fn max_height(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.height)
            .fold(self.lead_potential, f64::max)
    }
}
