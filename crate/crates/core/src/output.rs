//! CSV emission with fixed formatting: 10 significant digits in scientific
//! notation, '.' decimal separator, '\n' line endings.

use std::path::Path;

use crate::grid::PotentialGrid;
use crate::numerov::{region_probabilities, EigenPair};
use crate::scattering::SweepTable;

/// Formats a float with 10 significant digits; non-finite values become `NaN`.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        "NaN".into()
    }
}

/// A table of pre-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Csv {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, values: impl IntoIterator<Item = f64>) {
        self.rows.push(values.into_iter().map(number).collect());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }
}

pub const TRANSMISSION_HEADER: [&str; 9] = [
    "E_eV",
    "T",
    "R",
    "theta_T_rad",
    "theta_R_rad",
    "re_t",
    "im_t",
    "re_r",
    "im_r",
];

/// One row per energy; failed rows are all NaN except the energy.
pub fn transmission_csv(table: &SweepTable) -> Csv {
    let mut csv = Csv::new(TRANSMISSION_HEADER);
    for row in &table.rows {
        match &row.outcome {
            Ok(s) => csv.push_numbers([
                s.energy,
                s.transmission,
                s.reflection,
                s.theta_t,
                s.theta_r,
                s.t.re,
                s.t.im,
                s.r.re,
                s.r.im,
            ]),
            Err(_) => {
                let mut cells = vec![row.energy];
                cells.extend([f64::NAN; 8]);
                csv.push_numbers(cells);
            }
        }
    }
    csv
}

/// Closed form and transfer matrix side by side, with the pointwise |ΔT|.
pub fn paired_transmission_csv(analytic: &SweepTable, tmm: &SweepTable) -> Csv {
    let mut csv = Csv::new(["E_eV", "T_analytic", "T_tmm", "R_analytic", "R_tmm", "abs_dT"]);
    for (a, b) in analytic.rows.iter().zip(&tmm.rows) {
        let part = |r: &crate::scattering::SweepRow| match &r.outcome {
            Ok(s) => (s.transmission, s.reflection),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let (ta, ra) = part(a);
        let (tb, rb) = part(b);
        csv.push_numbers([a.energy, ta, tb, ra, rb, (ta - tb).abs()]);
    }
    csv
}

fn region_label(lo: f64, hi: f64) -> String {
    format!("P[{lo}:{hi}]")
}

/// `n, E_eV` and the probability carried by each region of the grid.
pub fn eigenvalue_csv(pairs: &[EigenPair], grid: &PotentialGrid) -> Csv {
    let b = &grid.boundaries;
    let mut header = vec!["n".to_string(), "E_eV".to_string()];
    header.extend(b.windows(2).map(|w| region_label(w[0], w[1])));
    let mut csv = Csv::new(header);
    for p in pairs {
        let mut row = vec![p.index.to_string(), number(p.energy)];
        row.extend(
            region_probabilities(&p.psi, grid, b)
                .iter()
                .map(|r| number(r.probability)),
        );
        csv.rows.push(row);
    }
    csv
}

/// `x_nm` then |ψₙ|² for each selected mode, walls included.
pub fn eigenfunction_csv(pairs: &[EigenPair], grid: &PotentialGrid, modes: &[usize]) -> Csv {
    let selected: Vec<&EigenPair> = modes
        .iter()
        .filter_map(|&n| pairs.iter().find(|p| p.index == n))
        .collect();
    let mut header = vec!["x_nm".to_string()];
    header.extend(selected.iter().map(|p| format!("psi2_{}", p.index)));
    let mut csv = Csv::new(header);
    let zeros = || std::iter::repeat_n(0.0, selected.len());
    csv.push_numbers(std::iter::once(grid.left_wall()).chain(zeros()));
    for i in 0..grid.len() {
        csv.push_numbers(std::iter::once(grid.x(i)).chain(selected.iter().map(|p| p.psi[i] * p.psi[i])));
    }
    csv.push_numbers(std::iter::once(grid.left_wall() + grid.well_width()).chain(zeros()));
    csv
}

/// Energies of several wells against the mode number, plus the empty-well
/// law n²π²ħ²/(2mL²) for the first well's width and mass.
pub fn energy_summary_csv(labels: &[String], energies: &[Vec<f64>], parabola: &[f64]) -> Csv {
    let mut header = vec!["n".to_string()];
    header.extend(labels.iter().map(|l| format!("E_{l}_eV")));
    header.push("E_empty_well_eV".into());
    let mut csv = Csv::new(header);
    let rows = energies.iter().map(Vec::len).max().unwrap_or(0);
    for n in 0..rows {
        let mut row = vec![(n + 1).to_string()];
        for e in energies {
            row.push(number(e.get(n).copied().unwrap_or(f64::NAN)));
        }
        row.push(number(parabola.get(n).copied().unwrap_or(f64::NAN)));
        csv.rows.push(row);
    }
    csv
}
