//! The C entry points driven from Rust, against independent closed forms.

use std::ffi::{CStr, CString};
use std::ptr;

use qwell1d_ffi::*;

const C: f64 = 0.0380998212;
const M: f64 = 0.067;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qwell1d_last_error()) }.to_str().unwrap().to_string()
}

/// Textbook transmissivity of a rectangular barrier below its top.
fn barrier_t(energy: f64, v0: f64, a: f64) -> f64 {
    let kappa = ((v0 - energy) * M / C).sqrt();
    1.0 / (1.0 + v0 * v0 * (kappa * a).sinh().powi(2) / (4.0 * energy * (v0 - energy)))
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(qwell1d_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn wavenumber_branches() {
    let (mut re, mut im) = (f64::NAN, f64::NAN);
    let status = unsafe { qwell1d_wavenumber(0.1, 0.0, M, &mut re, &mut im) };
    assert_eq!(status, Qwell1dStatus::Ok);
    assert!((re - (0.1 * M / C).sqrt()).abs() < 1e-12 && im == 0.0);
    let status = unsafe { qwell1d_wavenumber(0.1, 0.3, M, &mut re, &mut im) };
    assert_eq!(status, Qwell1dStatus::Ok);
    assert!(re.abs() < 1e-15 && (im - (0.2 * M / C).sqrt()).abs() < 1e-12);

    let status = unsafe { qwell1d_wavenumber(0.1, 0.0, -1.0, &mut re, &mut im) };
    assert_eq!(status, Qwell1dStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    let status = unsafe { qwell1d_wavenumber(0.1, 0.0, M, ptr::null_mut(), &mut im) };
    assert_eq!(status, Qwell1dStatus::NullPointer);
    assert_eq!(last_error(), "re is null");
}

#[test]
fn single_barrier_matches_the_textbook_formula() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(qwell1d_structure_new(0.0, M, &mut s), Qwell1dStatus::Ok);
        assert_eq!(qwell1d_structure_push_layer(s, 3.0, 0.3, M), Qwell1dStatus::Ok);
        for energy in [0.02, 0.1, 0.25] {
            let mut out = Qwell1dScattering::default();
            assert_eq!(qwell1d_scatter(s, energy, &mut out), Qwell1dStatus::Ok);
            assert_eq!(out.energy, energy);
            assert!((out.transmission - barrier_t(energy, 0.3, 3.0)).abs() < 1e-12);
            assert!((out.transmission + out.reflection - 1.0).abs() < 1e-12);
            let t2 = out.t_re * out.t_re + out.t_im * out.t_im;
            assert!((t2 - out.transmission).abs() < 1e-12);
            assert_eq!(last_error(), "");
        }
        assert_eq!(qwell1d_structure_push_layer(s, -1.0, 0.3, M), Qwell1dStatus::InvalidArgument);
        assert!(last_error().contains("width"), "{}", last_error());
        qwell1d_structure_free(s);
        qwell1d_structure_free(ptr::null_mut());
    }
}

#[test]
fn energy_below_the_lead_is_numerical() {
    let mut s = ptr::null_mut();
    unsafe {
        qwell1d_structure_new(0.5, M, &mut s);
        qwell1d_structure_push_layer(s, 2.0, 1.0, M);
        let mut out = Qwell1dScattering::default();
        assert_eq!(qwell1d_scatter(s, 0.2, &mut out), Qwell1dStatus::Numerical);
        assert!(last_error().starts_with("no propagating lead mode"));
        qwell1d_structure_free(s);
    }
}

#[test]
fn sweep_rows_and_failed_rows() {
    let job = CString::new(
        r#"{"label": "s", "layers": {"layers": [{"width": 2.0, "height": 1.0}], "lead_potential": 0.5},
            "energy": {"e_min": 0.3, "e_max": 0.7, "n_points": 5}}"#,
    )
    .unwrap();
    let mut sweep = ptr::null_mut();
    unsafe {
        assert_eq!(qwell1d_sweep_run(job.as_ptr(), &mut sweep), Qwell1dStatus::Ok);
        assert_eq!(qwell1d_sweep_len(sweep), 5);
        let mut row = Qwell1dScattering::default();
        assert_eq!(qwell1d_sweep_row(sweep, 0, &mut row), Qwell1dStatus::Numerical);
        assert!((row.energy - 0.3).abs() < 1e-15 && row.transmission.is_nan());
        assert_eq!(qwell1d_sweep_row(sweep, 4, &mut row), Qwell1dStatus::Ok);
        assert!((row.energy - 0.7).abs() < 1e-15 && row.transmission > 0.0 && row.transmission < 1.0);
        assert_eq!(qwell1d_sweep_row(sweep, 5, &mut row), Qwell1dStatus::OutOfRange);
        qwell1d_sweep_free(sweep);
    }
}

#[test]
fn closed_form_sweep_equals_the_structure_sweep() {
    let form = r#""closed_form": {"kind": "triple_barrier", "v1": 0.4655, "a": 2.5, "well1": 2.5,
        "v2": 0.3258, "b": 1.5, "well2": 2.5}, "energy": {"e_min": 0.01, "e_max": 1.0, "n_points": 50}"#;
    let run = |engine: &str| {
        let job = CString::new(format!(r#"{{"label": "x", {form}, "engine": "{engine}"}}"#)).unwrap();
        let mut sweep = ptr::null_mut();
        unsafe {
            assert_eq!(qwell1d_sweep_run(job.as_ptr(), &mut sweep), Qwell1dStatus::Ok);
            let t: Vec<f64> = (0..qwell1d_sweep_len(sweep))
                .map(|i| {
                    let mut row = Qwell1dScattering::default();
                    assert_eq!(qwell1d_sweep_row(sweep, i, &mut row), Qwell1dStatus::Ok);
                    row.transmission
                })
                .collect();
            qwell1d_sweep_free(sweep);
            t
        }
    };
    let (analytic, tmm) = (run("analytic"), run("tmm"));
    assert_eq!(analytic.len(), 50);
    for (a, b) in analytic.iter().zip(&tmm) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn malformed_json_is_a_config_error() {
    let mut sweep = ptr::null_mut();
    let mut bound = ptr::null_mut();
    let bad = CString::new("{ nope").unwrap();
    unsafe {
        assert_eq!(qwell1d_sweep_run(bad.as_ptr(), &mut sweep), Qwell1dStatus::Config);
        assert_eq!(qwell1d_bound_solve(bad.as_ptr(), &mut bound), Qwell1dStatus::Config);
        assert_eq!(qwell1d_bound_solve(ptr::null(), &mut bound), Qwell1dStatus::NullPointer);
    }
    assert!(sweep.is_null() && bound.is_null());
}

#[test]
fn empty_well_levels_and_wavefunctions() {
    let job = CString::new(r#"{"label": "w", "width": 21.0, "dx": 0.01, "potential": {"kind": "flat"}, "n_modes": 3}"#)
        .unwrap();
    let mut bound = ptr::null_mut();
    unsafe {
        assert_eq!(qwell1d_bound_solve(job.as_ptr(), &mut bound), Qwell1dStatus::Ok);
        assert_eq!(qwell1d_bound_modes(bound), 3);
        let len = qwell1d_bound_grid_len(bound);
        assert_eq!(len, 2099);
        let width = (len + 1) as f64 * 0.01;
        for n in 1..=3 {
            let mut e = 0.0;
            assert_eq!(qwell1d_bound_energy(bound, n, &mut e), Qwell1dStatus::Ok);
            let exact = C / M * (n as f64 * std::f64::consts::PI / width).powi(2);
            assert!((e / exact - 1.0).abs() < 1e-8, "E{n} = {e}, exact {exact}");
        }
        let mut e = 0.0;
        assert_eq!(qwell1d_bound_energy(bound, 0, &mut e), Qwell1dStatus::OutOfRange);
        assert_eq!(qwell1d_bound_energy(bound, 4, &mut e), Qwell1dStatus::OutOfRange);

        let mut x = vec![0.0; len];
        let mut psi = vec![0.0; len];
        assert_eq!(qwell1d_bound_positions(bound, x.as_mut_ptr(), len), Qwell1dStatus::Ok);
        assert_eq!(qwell1d_bound_wavefunction(bound, 2, psi.as_mut_ptr(), len), Qwell1dStatus::Ok);
        let norm: f64 = psi.iter().map(|p| p * p).sum::<f64>() * 0.01;
        assert!((norm - 1.0).abs() < 1e-10);
        // ψ₂ ∝ sin(2πx/L) up to sign
        let overlap: f64 = x
            .iter()
            .zip(&psi)
            .map(|(x, p)| p * (2.0 / width).sqrt() * (2.0 * std::f64::consts::PI * x / width).sin())
            .sum::<f64>()
            * 0.01;
        assert!((overlap.abs() - 1.0).abs() < 1e-6, "{overlap}");

        assert_eq!(
            qwell1d_bound_wavefunction(bound, 1, psi.as_mut_ptr(), len - 1),
            Qwell1dStatus::BufferTooSmall
        );
        qwell1d_bound_free(bound);
    }
}

#[test]
fn run_config_writes_files_and_reports_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let sweep = CString::new(
        r#"{"name": "free", "mode": "transmission", "sweeps": [{"label": "flat",
            "layers": {"layers": [{"width": 2.0, "height": 0.0}]},
            "energy": {"e_min": 0.1, "e_max": 0.3, "n_points": 3}}]}"#,
    )
    .unwrap();
    unsafe {
        assert_eq!(qwell1d_run_config(sweep.as_ptr(), out.as_ptr()), Qwell1dStatus::Ok);
    }
    let csv = std::fs::read_to_string(dir.path().join("free_flat.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let faulty = CString::new(
        r#"{"mode": "validate", "checks": {"sweep_points": 200, "inject_fault": "triple_barrier_cos_sign"}}"#,
    )
    .unwrap();
    unsafe {
        assert_eq!(qwell1d_run_config(faulty.as_ptr(), out.as_ptr()), Qwell1dStatus::ValidationFailed);
    }
    let wrong = CString::new(r#"{"mode": "plot"}"#).unwrap();
    unsafe {
        assert_eq!(qwell1d_run_config(wrong.as_ptr(), out.as_ptr()), Qwell1dStatus::Config);
    }
}
