//! C ABI over the qwell1d solvers.
//!
//! Every entry point returns a [`Qwell1dStatus`]; on anything but
//! `QWELL1D_OK` a message is available from [`qwell1d_last_error`] on the
//! same thread. Handles are opaque, owned by the caller and released with
//! the matching `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use qwell1d::config::{BoundJob, RunConfig, TransmissionJob};
use qwell1d::{EigenPair, Error, Layer, LayeredStructure, PotentialGrid, ScatteringResult, SweepTable};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qwell1dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    OutOfRange = 5,
    BufferTooSmall = 6,
    ValidationFailed = 7,
    Panic = 8,
    Io = 9,
}

/// Amplitudes and fluxes at one energy; `t` and `r` are referenced to the
/// structure's left edge.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Qwell1dScattering {
    pub energy: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub theta_t: f64,
    pub theta_r: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub r_re: f64,
    pub r_im: f64,
}

impl From<&ScatteringResult> for Qwell1dScattering {
    fn from(s: &ScatteringResult) -> Self {
        Qwell1dScattering {
            energy: s.energy,
            transmission: s.transmission,
            reflection: s.reflection,
            theta_t: s.theta_t,
            theta_r: s.theta_r,
            t_re: s.t.re,
            t_im: s.t.im,
            r_re: s.r.re,
            r_im: s.r.im,
        }
    }
}

/// A layer stack under construction.
pub struct Qwell1dStructure {
    lead_potential: f64,
    lead_mass_ratio: f64,
    layers: Vec<Layer>,
}

impl Qwell1dStructure {
    fn build(&self) -> qwell1d::Result<LayeredStructure> {
        LayeredStructure::new(self.layers.clone(), self.lead_potential, self.lead_mass_ratio)
    }
}

/// The rows of an energy sweep.
pub struct Qwell1dSweep {
    table: SweepTable,
}

/// Bound states of one well.
pub struct Qwell1dBound {
    grid: PotentialGrid,
    pairs: Vec<EigenPair>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn fail(status: Qwell1dStatus, message: &str) -> Qwell1dStatus {
    set_error(message);
    status
}

fn from_error(e: &Error) -> Qwell1dStatus {
    let status = match e {
        Error::Config(_) => Qwell1dStatus::Config,
        Error::Io(_) => Qwell1dStatus::Io,
        e if e.is_numerical() => Qwell1dStatus::Numerical,
        Error::NoPropagatingMode { .. } => Qwell1dStatus::Numerical,
        _ => Qwell1dStatus::InvalidArgument,
    };
    fail(status, &e.to_string())
}

/// Runs `body`, clearing the last error first and turning panics into a status.
fn guard(body: impl FnOnce() -> Qwell1dStatus) -> Qwell1dStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(Qwell1dStatus::Panic, &format!("internal panic: {what}"))
        }
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Qwell1dStatus> {
    if p.is_null() {
        return Err(fail(Qwell1dStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(Qwell1dStatus::InvalidArgument, "string argument is not UTF-8"))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(Qwell1dStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qwell1d_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn qwell1d_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Complex wavenumber (nm⁻¹) on the branch with Re ≥ 0 and Im ≥ 0.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_wavenumber(
    energy: f64,
    potential: f64,
    mass_ratio: f64,
    re: *mut f64,
    im: *mut f64,
) -> Qwell1dStatus {
    guard(|| {
        non_null!(re, im);
        if !(mass_ratio > 0.0 && mass_ratio.is_finite()) {
            return fail(Qwell1dStatus::InvalidArgument, "mass ratio must be positive");
        }
        let k = qwell1d::wavenumber(energy, potential, mass_ratio);
        *re = k.re;
        *im = k.im;
        Qwell1dStatus::Ok
    })
}

/// Starts an empty stack between leads at `lead_potential` (eV).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_structure_new(
    lead_potential: f64,
    lead_mass_ratio: f64,
    out: *mut *mut Qwell1dStructure,
) -> Qwell1dStatus {
    guard(|| {
        non_null!(out);
        if !lead_potential.is_finite() || !(lead_mass_ratio > 0.0 && lead_mass_ratio.is_finite()) {
            return fail(Qwell1dStatus::InvalidArgument, "lead potential must be finite and mass positive");
        }
        *out = Box::into_raw(Box::new(Qwell1dStructure {
            lead_potential,
            lead_mass_ratio,
            layers: Vec::new(),
        }));
        Qwell1dStatus::Ok
    })
}

/// Appends a layer on the right.
///
/// # Safety
/// `structure` must come from [`qwell1d_structure_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_structure_push_layer(
    structure: *mut Qwell1dStructure,
    width: f64,
    height: f64,
    mass_ratio: f64,
) -> Qwell1dStatus {
    guard(|| {
        non_null!(structure);
        match Layer::new(width, height, mass_ratio) {
            Ok(layer) => {
                (&mut *structure).layers.push(layer);
                Qwell1dStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `structure` must be null or come from [`qwell1d_structure_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_structure_free(structure: *mut Qwell1dStructure) {
    if !structure.is_null() {
        drop(Box::from_raw(structure));
    }
}

/// Transfer-matrix scattering of the stack at one energy.
///
/// # Safety
/// `structure` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_scatter(
    structure: *const Qwell1dStructure,
    energy: f64,
    out: *mut Qwell1dScattering,
) -> Qwell1dStatus {
    guard(|| {
        non_null!(structure, out);
        let result = (&*structure).build().and_then(|s| qwell1d::tmm::scatter(&s, energy));
        match result {
            Ok(s) => {
                *out = Qwell1dScattering::from(&s);
                Qwell1dStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Runs one sweep described by a JSON transmission job (the objects listed
/// under `sweeps` in a run configuration). Engine `both` yields the
/// closed-form rows.
///
/// # Safety
/// `job_json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_sweep_run(job_json: *const c_char, out: *mut *mut Qwell1dSweep) -> Qwell1dStatus {
    guard(|| {
        non_null!(out);
        let json = match text(job_json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let job: TransmissionJob = match serde_json::from_str(json) {
            Ok(j) => j,
            Err(e) => return fail(Qwell1dStatus::Config, &e.to_string()),
        };
        let table = match run_sweep(&job) {
            Ok(t) => t,
            Err(e) => return from_error(&e),
        };
        *out = Box::into_raw(Box::new(Qwell1dSweep { table }));
        Qwell1dStatus::Ok
    })
}

fn run_sweep(job: &TransmissionJob) -> qwell1d::Result<SweepTable> {
    use qwell1d::config::Engine;
    job.energy.validate()?;
    Ok(match job.engine() {
        Engine::Tmm => qwell1d::tmm::sweep_tmm(&job.structure()?, &job.energy),
        Engine::Analytic | Engine::Both => qwell1d::analytic::sweep(&job.closed_form()?, &job.energy),
    })
}

/// Number of rows.
///
/// # Safety
/// `sweep` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_sweep_len(sweep: *const Qwell1dSweep) -> usize {
    if sweep.is_null() {
        return 0;
    }
    (&*sweep).table.len()
}

/// Row `index` (0-based). A row whose evaluation failed returns
/// `QWELL1D_NUMERICAL` with its energy filled in and every other field NaN.
///
/// # Safety
/// `sweep` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_sweep_row(
    sweep: *const Qwell1dSweep,
    index: usize,
    out: *mut Qwell1dScattering,
) -> Qwell1dStatus {
    guard(|| {
        non_null!(sweep, out);
        let Some(row) = (&*sweep).table.rows.get(index) else {
            return fail(Qwell1dStatus::OutOfRange, &format!("row {index} out of range"));
        };
        match &row.outcome {
            Ok(s) => {
                *out = Qwell1dScattering::from(s);
                Qwell1dStatus::Ok
            }
            Err(e) => {
                *out = Qwell1dScattering {
                    energy: row.energy,
                    transmission: f64::NAN,
                    reflection: f64::NAN,
                    theta_t: f64::NAN,
                    theta_r: f64::NAN,
                    t_re: f64::NAN,
                    t_im: f64::NAN,
                    r_re: f64::NAN,
                    r_im: f64::NAN,
                };
                from_error(e)
            }
        }
    })
}

/// # Safety
/// `sweep` must be null or a handle from [`qwell1d_sweep_run`], freed once.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_sweep_free(sweep: *mut Qwell1dSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Solves one well described by a JSON bound job (the objects listed under
/// `wells` in a run configuration).
///
/// # Safety
/// `job_json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_bound_solve(job_json: *const c_char, out: *mut *mut Qwell1dBound) -> Qwell1dStatus {
    guard(|| {
        non_null!(out);
        let json = match text(job_json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let job: BoundJob = match serde_json::from_str(json) {
            Ok(j) => j,
            Err(e) => return fail(Qwell1dStatus::Config, &e.to_string()),
        };
        if job.n_modes == 0 {
            return fail(Qwell1dStatus::InvalidArgument, "n_modes must be at least 1");
        }
        match job.solve() {
            Ok((grid, pairs)) => {
                *out = Box::into_raw(Box::new(Qwell1dBound { grid, pairs }));
                Qwell1dStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Number of solved modes.
///
/// # Safety
/// `bound` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_bound_modes(bound: *const Qwell1dBound) -> usize {
    if bound.is_null() {
        return 0;
    }
    (&*bound).pairs.len()
}

/// Number of interior grid samples.
///
/// # Safety
/// `bound` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_bound_grid_len(bound: *const Qwell1dBound) -> usize {
    if bound.is_null() {
        return 0;
    }
    (&*bound).grid.len()
}

/// Energy (eV) of mode `n`, counted from 1.
///
/// # Safety
/// `bound` must be a live handle and `energy` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_bound_energy(bound: *const Qwell1dBound, n: usize, energy: *mut f64) -> Qwell1dStatus {
    guard(|| {
        non_null!(bound, energy);
        match mode(&*bound, n) {
            Ok(p) => {
                *energy = p.energy;
                Qwell1dStatus::Ok
            }
            Err(status) => status,
        }
    })
}

fn mode(bound: &Qwell1dBound, n: usize) -> Result<&EigenPair, Qwell1dStatus> {
    n.checked_sub(1).and_then(|k| bound.pairs.get(k)).ok_or_else(|| {
        fail(
            Qwell1dStatus::OutOfRange,
            &format!("mode {n} outside 1..={}", bound.pairs.len()),
        )
    })
}

fn copy_out(values: impl ExactSizeIterator<Item = f64>, buf: *mut f64, len: usize) -> Qwell1dStatus {
    if len < values.len() {
        return fail(
            Qwell1dStatus::BufferTooSmall,
            &format!("buffer holds {len} values, {} needed", values.len()),
        );
    }
    for (i, v) in values.enumerate() {
        // SAFETY: i < values.len() <= len, the caller's buffer size
        unsafe { *buf.add(i) = v };
    }
    Qwell1dStatus::Ok
}

/// Sample positions (nm from the left wall) into `buf[0..grid_len]`.
///
/// # Safety
/// `bound` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_bound_positions(bound: *const Qwell1dBound, buf: *mut f64, len: usize) -> Qwell1dStatus {
    guard(|| {
        non_null!(bound, buf);
        let grid = &(&*bound).grid;
        copy_out((0..grid.len()).map(|i| grid.x(i)), buf, len)
    })
}

/// Wavefunction of mode `n` (normalized so Σψ²Δx = 1) into `buf[0..grid_len]`.
///
/// # Safety
/// `bound` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_bound_wavefunction(
    bound: *const Qwell1dBound,
    n: usize,
    buf: *mut f64,
    len: usize,
) -> Qwell1dStatus {
    guard(|| {
        non_null!(bound, buf);
        match mode(&*bound, n) {
            Ok(p) => copy_out(p.psi.iter().copied(), buf, len),
            Err(status) => status,
        }
    })
}

/// # Safety
/// `bound` must be null or a handle from [`qwell1d_bound_solve`], freed once.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_bound_free(bound: *mut Qwell1dBound) {
    if !bound.is_null() {
        drop(Box::from_raw(bound));
    }
}

/// Runs a complete JSON run configuration, writing its CSV files into
/// `out_dir` exactly as the command-line tool does. A validation run whose
/// checks fail returns `QWELL1D_VALIDATION_FAILED`.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn qwell1d_run_config(config_json: *const c_char, out_dir: *const c_char) -> Qwell1dStatus {
    guard(|| {
        let (json, dir) = match (text(config_json), text(out_dir)) {
            (Ok(j), Ok(d)) => (j, d),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let cfg = match RunConfig::from_json(json) {
            Ok(c) => c,
            Err(e) => return from_error(&e),
        };
        match qwell1d::cli::execute(&cfg, Path::new(dir), true) {
            Ok(qwell1d::cli::EXIT_OK) => Qwell1dStatus::Ok,
            Ok(_) => fail(Qwell1dStatus::ValidationFailed, "validation checks failed"),
            Err(e) => from_error(&e),
        }
    })
}
