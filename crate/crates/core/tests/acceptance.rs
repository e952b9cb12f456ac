//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines always reach the output.
//!
//! Criteria 1 and 6 compare against published figure values that this
//! implementation does not reproduce at m = 0.067 (see
//! docs/caption-discrepancies.md). They are reported as FAIL and the run
//! only succeeds while they still fail in exactly that way, so a change in
//! either direction is noticed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qwell1d::analytic::{self, ClosedForm};
use qwell1d::config::{self, BoundJob, RunConfig, Task};
use qwell1d::numerov::{assemble, confinement_report, solve};
use qwell1d::pdm::{residual_check, solve_pdm, MassProfile, VonRoosParams};
use qwell1d::scattering::find_peaks;
use qwell1d::structure::{Layer, LayeredStructure};
use qwell1d::tmm::sweep_tmm;
use qwell1d::units::infinite_well_level;
use qwell1d::validate::{self, fig4_double_barrier, fig4_triple_barrier, fig5_triple_barrier};
use qwell1d::{build_grid, EnergyGrid, MassSpec, SweepTable};

const M: f64 = 0.067;
const CAPTION_TOL: f64 = 0.003;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    /// Missed the numeric target but met the criterion's own fallback clause.
    Recorded,
}

struct Verdict {
    status: Status,
    detail: String,
}

fn verdict(ok: bool, detail: String) -> Verdict {
    Verdict {
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn bound_jobs(preset: &str) -> Vec<BoundJob> {
    match config::preset(preset).expect("preset").task {
        Task::Bound { wells } => wells,
        _ => panic!("{preset} is not a bound preset"),
    }
}

fn at_dx(mut job: BoundJob, dx: f64) -> BoundJob {
    job.dx = Some(dx);
    job
}

/// Maximizes T on [lo, hi] by golden-section search.
fn refine_peak(form: &ClosedForm, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let t = |e: f64| form.evaluate(e).map(|s| s.transmission).unwrap_or(f64::NAN);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if t(a) > t(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let e = 0.5 * (lo + hi);
    (e, t(e))
}

fn criterion_1() -> Verdict {
    let grid = EnergyGrid::new(0.0005, 1.0, 2000).unwrap();
    let dqw = fig4_triple_barrier();
    let sqw = fig4_double_barrier();
    let start = Instant::now();
    let table = analytic::sweep(&dqw, &grid);
    let sqw_table = analytic::sweep(&sqw, &grid);
    let tmm_table = sweep_tmm(&dqw.to_structure().unwrap(), &grid);
    let elapsed = start.elapsed();
    let failed = table.failures() + sqw_table.failures() + tmm_table.failures();

    let first = find_peaks(&table, 0.5)
        .into_iter()
        .next()
        .expect("a resonance below 1 eV");
    let h = grid.step();
    let (e_peak, t_peak) = refine_peak(&dqw, first.energy - h, first.energy + h);
    let t_539 = dqw.evaluate(0.5396).unwrap().transmission;
    let t_sqw = sqw.evaluate(0.5396).unwrap().transmission;
    let checks = [
        (e_peak - 0.1529).abs() <= 0.002,
        (t_peak - 0.9646).abs() <= 0.005,
        (t_539 - 0.1313).abs() <= 0.005,
        (t_sqw - 0.9974).abs() <= 0.005,
        elapsed < Duration::from_secs(1),
        failed == 0,
    ];
    verdict(
        checks.iter().all(|&c| c),
        format!(
            "DQW-TB peak E = {e_peak:.4} eV (want 0.1529 +/- 0.002), T = {t_peak:.4} (want 0.9646 +/- 0.005); \
             T(0.5396) = {t_539:.4} (want 0.1313 +/- 0.005); SQW-DB T(0.5396) = {t_sqw:.4} (want 0.9974 +/- 0.005); \
             three 2000-point sweeps in {:.1} ms with {failed} failed rows (want < 1 s)",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn oracle_forms() -> Vec<(&'static str, ClosedForm)> {
    vec![
        (
            "single barrier",
            ClosedForm::SingleBarrier {
                v0: 0.4655,
                a: 2.5,
                mass_ratio: M,
            },
        ),
        ("SQW-DB", fig4_double_barrier()),
        ("DQW-TB fig4", fig4_triple_barrier()),
        ("DQW-TB V2=0.5", fig5_triple_barrier(0.5)),
        ("DQW-TB V2=2", fig5_triple_barrier(2.0)),
    ]
}

fn criterion_2() -> Verdict {
    let grid = EnergyGrid::new(0.01, 1.0, 2000).unwrap();
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for (name, form) in oracle_forms() {
        let a = analytic::sweep(&form, &grid);
        let b = sweep_tmm(&form.to_structure().unwrap(), &grid);
        let failed = a.failures() + b.failures();
        let d = if failed > 0 { f64::INFINITY } else { a.max_abs_diff(&b) };
        worst = worst.max(d);
        parts.push(format!("{name} {d:.1e}"));
    }
    verdict(
        worst < 1e-8,
        format!("max |T_analytic - T_tmm| = {worst:.2e} ({}) (want < 1e-8)", parts.join(", ")),
    )
}

fn criterion_3() -> Verdict {
    let grid = EnergyGrid::new(0.01, 1.0, 2000).unwrap();
    let mut tables: Vec<SweepTable> = Vec::new();
    for (_, form) in oracle_forms() {
        tables.push(analytic::sweep(&form, &grid));
        tables.push(sweep_tmm(&form.to_structure().unwrap(), &grid));
    }
    let graded = LayeredStructure::new(
        vec![
            Layer::new(2.0, 0.3, 0.092).unwrap(),
            Layer::new(4.0, 0.0, M).unwrap(),
            Layer::new(1.0, 0.8, 0.15).unwrap(),
        ],
        0.0,
        M,
    )
    .unwrap();
    tables.push(sweep_tmm(&graded, &grid));
    let failed: usize = tables.iter().map(SweepTable::failures).sum();
    let worst = tables.iter().map(SweepTable::max_flux_defect).fold(0.0, f64::max);
    verdict(
        failed == 0 && worst < 1e-10,
        format!(
            "max |T + R - 1| = {worst:.2e} over {} sweeps x 2000 energies, {failed} failed rows (want < 1e-10)",
            tables.len()
        ),
    )
}

fn criterion_4() -> Verdict {
    let grid = EnergyGrid::new(0.0005, 1.0, 2000).unwrap();
    let form = |l1: f64, l2: f64| ClosedForm::TripleBarrier {
        v1: 0.4655,
        a: 2.5,
        well1: l1,
        v2: 0.3258,
        b: 1.5,
        well2: l2,
        mass_ratio: M,
    };
    let d_analytic = analytic::sweep(&form(1.0, 4.0), &grid).max_abs_diff(&analytic::sweep(&form(4.0, 1.0), &grid));
    let d_tmm = sweep_tmm(&form(1.0, 4.0).to_structure().unwrap(), &grid)
        .max_abs_diff(&sweep_tmm(&form(4.0, 1.0).to_structure().unwrap(), &grid));
    verdict(
        d_analytic < 1e-12 && d_tmm < 1e-12,
        format!("max |T(1,4) - T(4,1)| = {d_analytic:.2e} closed form, {d_tmm:.2e} transfer matrix (want < 1e-12)"),
    )
}

struct CaptionValue {
    preset: &'static str,
    level: usize,
    caption: f64,
}

const fn cv(preset: &'static str, level: usize, caption: f64) -> CaptionValue {
    CaptionValue { preset, level, caption }
}

const CRITERION_5: [CaptionValue; 15] = [
    cv("fig6", 1, 0.2449),
    cv("fig6", 3, 0.3522),
    cv("fig6", 4, 0.3537),
    cv("fig6", 6, 0.9025),
    cv("fig7", 10, 2.7435),
    cv("fig7", 11, 3.2672),
    cv("fig8", 1, 0.3774),
    cv("fig8", 13, 5.0469),
    cv("fig9", 15, 5.4929),
    cv("fig13", 1, 0.3402),
    cv("fig13", 20, 6.5684),
    cv("fig14", 17, 5.5417),
    cv("fig16", 9, 2.3678),
    cv("fig16", 10, 2.3690),
    cv("fig17", 19, 5.6595),
];

const CRITERION_6: [CaptionValue; 3] = [cv("fig11", 1, 0.2333), cv("fig11", 3, 0.2740), cv("fig11", 7, 1.0540)];

/// `(preset, level) -> energy at dx = 0.005` as recorded in the docs table.
fn recorded_values() -> BTreeMap<(String, usize), f64> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/caption-discrepancies.md");
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    text.lines()
        .filter(|l| l.starts_with("| fig"))
        .filter_map(|l| {
            let cells: Vec<&str> = l.trim_matches('|').split('|').map(str::trim).collect();
            Some(((cells[0].to_string(), cells[1].parse().ok()?), cells[3].parse().ok()?))
        })
        .collect()
}

struct Solved {
    energies: BTreeMap<&'static str, Vec<f64>>,
    fine: BTreeMap<&'static str, Vec<f64>>,
    slowest: Duration,
}

fn solve_presets(values: &[CaptionValue]) -> Solved {
    let mut solved = Solved {
        energies: BTreeMap::new(),
        fine: BTreeMap::new(),
        slowest: Duration::ZERO,
    };
    for v in values {
        if solved.energies.contains_key(v.preset) {
            continue;
        }
        let job = bound_jobs(v.preset).remove(0);
        let start = Instant::now();
        let (_, pairs) = at_dx(job.clone(), 0.005).solve().unwrap();
        solved.slowest = solved.slowest.max(start.elapsed());
        let (_, fine) = at_dx(job, 0.0025).solve().unwrap();
        solved.energies.insert(v.preset, pairs.iter().map(|p| p.energy).collect());
        solved.fine.insert(v.preset, fine.iter().map(|p| p.energy).collect());
    }
    solved
}

fn caption_comparison(values: &[CaptionValue], solved: &Solved) -> (usize, f64, Vec<String>) {
    let mut within = 0;
    let mut drift = 0.0_f64;
    let mut parts = Vec::new();
    for v in values {
        let e = solved.energies[v.preset][v.level - 1];
        let fine = solved.fine[v.preset][v.level - 1];
        drift = drift.max((e - fine).abs());
        if (e - v.caption).abs() <= CAPTION_TOL {
            within += 1;
        }
        parts.push(format!("{} E{} {:.4}/{:.4}", v.preset, v.level, e, v.caption));
    }
    (within, drift, parts)
}

fn criterion_5() -> Verdict {
    let solved = solve_presets(&CRITERION_5);
    let (within, drift, parts) = caption_comparison(&CRITERION_5, &solved);
    let recorded = recorded_values();
    let documented = CRITERION_5.iter().all(|v| {
        recorded
            .get(&(v.preset.to_string(), v.level))
            .is_some_and(|&r| (r - solved.energies[v.preset][v.level - 1]).abs() <= 5e-7)
    });
    let converged = drift < 1e-5;
    let fast = solved.slowest < Duration::from_secs(30);
    let status = if within == CRITERION_5.len() && fast {
        Status::Pass
    } else if converged && documented && fast {
        Status::Recorded
    } else {
        Status::Fail
    };
    Verdict {
        status,
        detail: format!(
            "{within}/{} caption values within +/-{CAPTION_TOL} eV (computed/caption: {}); \
             dx 0.005 vs 0.0025 differ by <= {drift:.1e} eV; converged values {} in docs/caption-discrepancies.md; \
             slowest structure {:.2} s (want < 30 s)",
            CRITERION_5.len(),
            parts.join(", "),
            if documented { "recorded" } else { "NOT recorded" },
            solved.slowest.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Verdict {
    let solved = solve_presets(&CRITERION_6);
    let (within, _, parts) = caption_comparison(&CRITERION_6, &solved);
    verdict(
        within == CRITERION_6.len(),
        format!(
            "{within}/{} within +/-{CAPTION_TOL} eV (computed/caption: {})",
            CRITERION_6.len(),
            parts.join(", ")
        ),
    )
}

fn criterion_7() -> Verdict {
    let grid = build_grid(
        21.0,
        0.005,
        &qwell1d::PotentialSpec::Flat { height: 0.0 },
        &MassSpec::uniform(M),
    )
    .unwrap();
    let pairs = solve(&assemble(&grid).unwrap(), 10).unwrap();
    let worst = pairs
        .iter()
        .map(|p| {
            let exact = infinite_well_level(p.index, 21.0, M);
            ((p.energy - exact) / exact).abs()
        })
        .fold(0.0, f64::max);
    let (mode, ladder, errors) = validate::convergence_errors(0.01).unwrap();
    let slope = validate::loglog_slope(&ladder, &errors);
    verdict(
        worst < 1e-4 && (slope - 4.0).abs() <= 0.3,
        format!(
            "max relative error of E1..E10 {worst:.2e} at dx 0.005 (want < 1e-4); \
             order {slope:.3} from E{mode} over dx {ladder:?} nm (want 4.0 +/- 0.3)"
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut by_height: Vec<(f64, Vec<f64>)> = bound_jobs("fig10")
        .into_iter()
        .map(|job| {
            let height = match &job.potential {
                qwell1d::PotentialSpec::Layered { structure, .. } => structure.layers[0].height,
                _ => 0.0,
            };
            let (_, pairs) = job.solve().unwrap();
            (height, pairs.iter().map(|p| p.energy).collect())
        })
        .collect();
    by_height.sort_by(|a, b| a.0.total_cmp(&b.0));
    let heights: Vec<f64> = by_height.iter().map(|h| h.0).collect();
    let mut decreases = 0;
    for w in by_height.windows(2) {
        decreases += w[0].1.iter().zip(&w[1].1).filter(|(lo, hi)| hi < lo).count();
    }
    verdict(
        decreases == 0 && heights == [0.0, 1.0, 2.0, 3.0, 10.0] && by_height.iter().all(|h| h.1.len() == 10),
        format!("{decreases} decreases among E1..E10 across V = {heights:?} eV (want 0)"),
    )
}

/// Archived energies of the mass-bump fixture at dx = 0.005 nm.
const LOCALIZED: [f64; 2] = [3.848002081e-1, 3.919033825e-1];

fn localization_fixture() -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pdm_localization.json");
    RunConfig::from_file(&path).unwrap()
}

fn criterion_9() -> Verdict {
    let mut reduction = 0.0_f64;
    let mut cases = 0;
    let presets = ["fig6", "fig7", "fig8", "fig9", "fig13", "fig14", "fig16", "fig17", "fig11", "fig10"];
    for name in presets {
        for job in bound_jobs(name) {
            let grid = build_grid(
                job.width,
                0.005,
                &job.potential,
                &MassSpec::Profile {
                    profile: MassProfile::Constant { mass_ratio: M },
                },
            )
            .unwrap();
            let a = solve_pdm(&grid, &VonRoosParams::default(), job.n_modes).unwrap();
            let b = solve(&assemble(&grid).unwrap(), job.n_modes).unwrap();
            for (p, q) in a.iter().zip(&b) {
                reduction = reduction.max(((p.energy - q.energy) / q.energy).abs());
            }
            cases += 1;
        }
    }

    let params = VonRoosParams::default();
    let mut residual = 0.0_f64;
    for (_, width, potential, profile) in validate::residual_cases() {
        let grid = build_grid(width, 0.005, &potential, &MassSpec::Profile { profile }).unwrap();
        for p in solve_pdm(&grid, &params, 10).unwrap() {
            residual = residual.max(residual_check(&p, &grid, &params) / p.energy.abs().max(1.0));
        }
    }

    let fixture = localization_fixture();
    let Task::Bound { wells } = &fixture.task else {
        panic!("fixture is a bound config")
    };
    let (grid, pairs) = wells[0].solve().unwrap();
    let inner = |k: usize| -> (f64, f64) {
        let report = confinement_report(&pairs[k], &grid);
        let p = |lo: f64| report.iter().find(|r| (r.lo - lo).abs() < 1e-9).map(|r| r.probability).unwrap();
        (p(6.0), p(12.0))
    };
    let (l1, r1) = inner(0);
    let (l2, r2) = inner(1);
    let split = (l1.max(r1) > 0.9 && l2.max(r2) > 0.9) && ((l1 > r1) != (l2 > r2));
    let archived = pairs
        .iter()
        .zip(LOCALIZED)
        .map(|(p, e)| ((p.energy - e) / e).abs())
        .fold(0.0, f64::max);

    verdict(
        reduction < 1e-9 && residual <= 1e-5 && split && archived < 1e-8,
        format!(
            "constant-mass reduction max relative dE {reduction:.1e} over {cases} wells (want < 1e-9); \
             von Roos residual {residual:.1e} for 10 modes of 2 profiles (want <= 1e-5 max(1,|E|)); \
             mass-bump fixture: mode 1 inner wells {l1:.3}/{r1:.3}, mode 2 {l2:.3}/{r2:.3} (want one well > 0.9 each, opposite), \
             energies vs archive {archived:.1e} relative"
        ),
    )
}

fn run_all_presets(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_qwell1d"))
        .args(["reproduce", "all", "--quiet", "--out"])
        .arg(dir)
        .status()
        .expect("binary runs");
    assert!(status.success(), "reproduce all failed: {status}");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p: PathBuf = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Verdict {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_all_presets(a.path());
    let second = run_all_presets(b.path());
    let differing = first.iter().zip(&second).filter(|(x, y)| x != y).count();
    let bytes: usize = first.iter().map(|f| f.1.len()).sum();
    verdict(
        !first.is_empty() && first.len() == second.len() && differing == 0,
        format!(
            "two `reproduce all` runs: {} vs {} CSV files, {differing} differ, {bytes} bytes compared (want identical)",
            first.len(),
            second.len()
        ),
    )
}

/// Criteria reported FAIL on purpose; see the module comment.
const EXPECTED_FAIL: [usize; 2] = [1, 6];

fn main() {
    let criteria: [(usize, fn() -> Verdict); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (id, check) in criteria {
        let v = check();
        let word = match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Recorded => "FAIL, discrepancy recorded as the criterion allows",
        };
        println!("criterion {id:>2} {word}: {}", v.detail);
        let expected_red = EXPECTED_FAIL.contains(&id);
        let acceptable = match v.status {
            Status::Pass | Status::Recorded => !expected_red,
            Status::Fail => expected_red,
        };
        if !acceptable {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: outcomes as recorded (criteria {EXPECTED_FAIL:?} fail against figure values, see docs/caption-discrepancies.md)");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
