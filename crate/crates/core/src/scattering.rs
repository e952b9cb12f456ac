//! Scattering results shared by the closed forms and the transfer-matrix engine.

use num_complex::Complex64;

use crate::error::Error;

/// Amplitudes and fluxes at one energy.
///
/// `t` is the amplitude of the transmitted e^{ikx} wave and `r` of the
/// reflected e^{−ikx} wave, both referenced to the structure's left edge
/// (x = 0) for an incident e^{ikx}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub energy: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    /// arg t
    pub theta_t: f64,
    /// arg r
    pub theta_r: f64,
}

impl ScatteringResult {
    pub fn from_amplitudes(energy: f64, t: Complex64, r: Complex64) -> Self {
        ScatteringResult {
            energy,
            t,
            r,
            transmission: t.norm_sqr(),
            reflection: r.norm_sqr(),
            theta_t: t.arg(),
            theta_r: r.arg(),
        }
    }

    /// |T + R − 1|
    pub fn flux_defect(&self) -> f64 {
        (self.transmission + self.reflection - 1.0).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub energy: f64,
    pub outcome: Result<ScatteringResult, Error>,
}

impl SweepRow {
    pub fn transmission(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.transmission)
    }
}

/// One row per energy, ascending. Failed points keep their row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn from_fn<F>(energies: impl IntoIterator<Item = f64>, mut eval: F) -> Self
    where
        F: FnMut(f64) -> Result<ScatteringResult, Error>,
    {
        let rows = energies
            .into_iter()
            .map(|energy| SweepRow {
                energy,
                outcome: eval(energy),
            })
            .collect();
        SweepTable { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// Transmissivity per row, NaN for failed rows.
    pub fn transmissions(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.transmission().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Largest |ΔT| over rows where both tables succeeded.
    pub fn max_abs_diff(&self, other: &SweepTable) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .filter_map(|(a, b)| Some((a.transmission()? - b.transmission()?).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest |T + R − 1| over successful rows.
    pub fn max_flux_defect(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .map(ScatteringResult::flux_defect)
            .fold(0.0, f64::max)
    }
}

/// A resonance located on a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub energy: f64,
    pub transmission: f64,
}

/// Strict local maxima of T with sampled height ≥ `min_height`, each refined
/// by the parabola through the sample and its two neighbours.
pub fn find_peaks(table: &SweepTable, min_height: f64) -> Vec<Peak> {
    let e = table.energies();
    let t = table.transmissions();
    let mut peaks = Vec::new();
    for i in 1..t.len().saturating_sub(1) {
        let (y0, y1, y2) = (t[i - 1], t[i], t[i + 1]);
        if !(y0.is_finite() && y1.is_finite() && y2.is_finite()) {
            continue;
        }
        if y1 > y0 && y1 > y2 && y1 >= min_height {
            let (energy, transmission) = parabola_vertex((e[i - 1], y0), (e[i], y1), (e[i + 1], y2));
            peaks.push(Peak {
                energy,
                transmission,
            });
        }
    }
    peaks
}

/// Vertex of the parabola through three points, computed relative to the middle one.
fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let (h0, h2) = (p0.0 - p1.0, p2.0 - p1.0);
    let (d0, d2) = ((p0.1 - p1.1) / h0, (p2.1 - p1.1) / h2);
    // p(x) = y1 + b·x + a·x² through (h0, y0), (h2, y2)
    let a = (d2 - d0) / (h2 - h0);
    let b = d0 - a * h0;
    if a >= 0.0 {
        return p1;
    }
    let x = -b / (2.0 * a);
    (p1.0 + x, p1.1 - b * b / (4.0 * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(points: &[(f64, f64)]) -> SweepTable {
        SweepTable {
            rows: points
                .iter()
                .map(|&(e, t)| SweepRow {
                    energy: e,
                    outcome: Ok(ScatteringResult::from_amplitudes(
                        e,
                        Complex64::new(t.sqrt(), 0.0),
                        Complex64::new((1.0 - t).sqrt(), 0.0),
                    )),
                })
                .collect(),
        }
    }

    #[test]
    fn monotone_table_has_no_peaks() {
        let pts: Vec<_> = (0..20).map(|i| (i as f64 * 0.1, i as f64 / 20.0)).collect();
        assert!(find_peaks(&table(&pts), 0.0).is_empty());
    }

    #[test]
    fn recovers_parabola_vertex() {
        // T(E) = 0.9 - 40 (E - 0.3137)^2, sampled every 0.01
        let vertex = 0.3137;
        let pts: Vec<_> = (0..60)
            .map(|i| {
                let e = i as f64 * 0.01;
                (e, (0.9 - 40.0 * (e - vertex).powi(2)).max(0.0))
            })
            .collect();
        let peaks = find_peaks(&table(&pts), 0.5);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].energy - vertex).abs() < 1e-4, "{:?}", peaks);
        assert!((peaks[0].transmission - 0.9).abs() < 1e-12);
    }

    #[test]
    fn min_height_filters() {
        let pts = [(0.0, 0.1), (0.1, 0.3), (0.2, 0.1), (0.3, 0.8), (0.4, 0.2)];
        let peaks = find_peaks(&table(&pts), 0.5);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].energy > 0.2 && peaks[0].energy < 0.4);
    }

    #[test]
    fn failed_rows_break_maxima() {
        let mut t = table(&[(0.0, 0.1), (0.1, 0.9), (0.2, 0.1)]);
        t.rows[0].outcome = Err(Error::NumericalOverflow { energy: 0.0 });
        assert!(find_peaks(&t, 0.0).is_empty());
        assert_eq!(t.failures(), 1);
        assert!(t.transmissions()[0].is_nan());
    }
}
