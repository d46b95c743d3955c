//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Reference quantities are re-derived here from the closed-form dispersion
//! relations, without going through the crate's lattice formulas.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tline_dce::dynamics::{self, DriveSpec, IntegratorOptions, Method};
use tline_dce::observables::{self, SweepOptions, Trend};
use tline_dce::quantization::ModeSet;
use tline_dce::verify;
use tline_dce::{CircuitFamily, CircuitSpec};

const C: f64 = 0.4e-12;
const L: f64 = 60e-12;
const C_J: f64 = 0.02e-12;
const I_C: f64 = 1.25e-6;
const CELLS: usize = 200;
const FLUX_QUANTUM: f64 = 2.067_833_848e-15;
const TAU: f64 = 1e-12;

const FAMILIES: [CircuitFamily; 4] = [
    CircuitFamily::Lhtl1,
    CircuitFamily::Lhtl2,
    CircuitFamily::Rhtl1,
    CircuitFamily::Rhtl2,
];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn reduced_energy(ic: f64) -> f64 {
    4.0 * PI * PI * ic / FLUX_QUANTUM
}

fn sin2_half(j: i64, cells: usize) -> f64 {
    (PI * j as f64 / cells as f64).sin().powi(2)
}

/// `ω0_j` straight from the dispersion relations at the reference parameters.
fn omega0_ref(family: CircuitFamily, j: i64, ic: f64) -> f64 {
    let e = reduced_energy(ic);
    let s2 = sin2_half(j, CELLS);
    let w2 = match family {
        CircuitFamily::Lhtl1 => e / (4.0 * C * s2 + C_J),
        CircuitFamily::Lhtl2 => 1.0 / (4.0 * C * L * s2) + e / C,
        CircuitFamily::Rhtl1 => 4.0 * s2 / (L * C) + e / C,
        CircuitFamily::Rhtl2 => 4.0 * s2 * e / (C + 4.0 * C_J * s2),
    };
    w2.sqrt()
}

fn growth_ref(family: CircuitFamily, j: i64) -> f64 {
    let w = omega0_ref(family, j, I_C);
    match family {
        CircuitFamily::Lhtl1 | CircuitFamily::Rhtl2 => w,
        CircuitFamily::Lhtl2 | CircuitFamily::Rhtl1 => reduced_energy(I_C) / (C * w),
    }
}

fn chi_ref(family: CircuitFamily, j: i64, cells: usize) -> f64 {
    let s2 = sin2_half(j, cells);
    match family {
        CircuitFamily::Lhtl1 => 4.0 * s2 + C_J / C,
        CircuitFamily::Lhtl2 => 4.0 * s2,
        CircuitFamily::Rhtl1 | CircuitFamily::Rhtl2 => 1.0,
    }
}

fn sinh2_ref(x: f64) -> f64 {
    let s = 0.5 * (x.exp_m1() - (-x).exp_m1());
    s * s
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn reference(family: CircuitFamily) -> CircuitSpec {
    let spec = CircuitSpec::reference(family);
    assert_eq!(
        (spec.capacitance(), spec.inductance(), spec.critical_current(), spec.cells()),
        (C, L, I_C, CELLS)
    );
    if family == CircuitFamily::Lhtl1 || family == CircuitFamily::Rhtl2 {
        assert_eq!(spec.junction_capacitance(), C_J);
    }
    spec
}

fn numeric_n(spec: &CircuitSpec, drive: &DriveSpec, h: i64) -> f64 {
    dynamics::numeric_bogoliubov(spec, drive, h, &IntegratorOptions::default())
        .expect("integration")
        .0
        .particles()
}

fn analytic_n(spec: &CircuitSpec, h: i64, tau: f64) -> f64 {
    observables::particle_number_analytic(spec, h, tau).expect("analytic").n
}

fn within(limit: Duration, started: Instant) -> (bool, f64) {
    let t = started.elapsed();
    (t < limit, t.as_secs_f64())
}

fn spectrum() -> Outcome {
    let start = Instant::now();
    let spec = reference(CircuitFamily::Lhtl1);
    let rows = observables::dispersion_table(std::slice::from_ref(&spec), true).unwrap();
    let edge = rows.iter().find(|r| r.j == 100).expect("band-edge row").omega0;
    let exact = (reduced_energy(I_C) / (4.0 * C + C_J)).sqrt();
    let approx = (reduced_energy(I_C) / (4.0 * C)).sqrt();
    let ir = spec.infrared_limit().unwrap();
    let edge_err = rel(edge, exact).max(rel(ir.exact, exact));
    let ir_err = rel(approx, exact).max(rel(ir.approx, approx));
    let (fast, secs) = within(Duration::from_secs(1), start);
    let ok = edge_err <= 1e-10 && rel(approx, exact) <= 0.01 && rel(ir.approx, approx) <= 1e-10 && fast;
    outcome(
        ok,
        format!(
            "band edge {edge:.6e} rad/s, rel err {edge_err:.2e} (tol 1e-10); IR approx off by {:.3e} (tol 1e-2), {ir_err:.2e}; {secs:.3} s",
            rel(approx, exact)
        ),
    )
}

fn analytic_particles() -> Outcome {
    let start = Instant::now();
    let specs: Vec<CircuitSpec> = FAMILIES.iter().map(|&f| reference(f)).collect();
    let results = observables::sweep_spectrum(&specs, TAU, &SweepOptions::default()).unwrap();
    let mut worst: f64 = 0.0;
    let mut trends = Vec::new();
    for r in &results {
        let mut ns = Vec::new();
        for row in r.rows_for(Method::AnalyticMultiscale) {
            let expected = sinh2_ref(growth_ref(r.family, row.j) * TAU);
            worst = worst.max(rel(row.n, expected));
            ns.push(row.n);
        }
        let observed = Trend::of(&ns);
        let expected = match r.family {
            CircuitFamily::Lhtl1 | CircuitFamily::Rhtl1 => Trend::StrictlyDecreasing,
            CircuitFamily::Lhtl2 | CircuitFamily::Rhtl2 => Trend::StrictlyIncreasing,
        };
        trends.push((r.family, ns.len(), observed == expected));
    }
    let trends_ok = trends.iter().all(|&(_, len, ok)| ok && len == 100);
    let (fast, secs) = within(Duration::from_secs(1), start);
    outcome(
        worst <= 1e-12 && trends_ok && fast,
        format!(
            "max rel err {worst:.2e} (tol 1e-12); trends {}; {secs:.3} s",
            trends
                .iter()
                .map(|(f, _, ok)| format!("{f}:{}", if *ok { "ok" } else { "wrong" }))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    )
}

const ETAS: [f64; 3] = [0.02, 0.01, 0.005];
const MODES: [i64; 3] = [10, 60, 100];
const PHASES: [f64; 3] = [0.5, 1.0, 1.5];

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let mut points = 0;
    for family in FAMILIES {
        let spec = reference(family);
        for h in MODES {
            let w0 = spec.omega0(h).unwrap();
            for x in PHASES {
                let tau = x / w0;
                let ana = analytic_n(&spec, h, tau);
                let errs: Vec<f64> = ETAS
                    .iter()
                    .map(|&eta| {
                        let d = DriveSpec::resonant(&spec, h, eta, tau).unwrap();
                        rel(numeric_n(&spec, &d, h), ana)
                    })
                    .collect();
                points += errs.len();
                for (e, eta) in errs.iter().zip(ETAS) {
                    worst_ratio = worst_ratio.max(e / (5.0 * eta));
                }
                let bounded = errs.iter().zip(ETAS).all(|(e, eta)| *e <= 5.0 * eta);
                let monotone = errs.windows(2).all(|w| w[1] < w[0]);
                if !(bounded && monotone) {
                    failures.push(format!("{family} j={h} w0*tau={x}: {errs:?}"));
                }
            }
        }
    }
    let (fast, secs) = within(Duration::from_secs(30), start);
    outcome(
        failures.is_empty() && fast,
        format!(
            "{points} points, worst err/tol {worst_ratio:.3}, {} non-conforming sequences{}; {secs:.2} s",
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(" [{}]", failures.join("; ")) }
        ),
    )
}

fn unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let opts = IntegratorOptions::default();
    let mut worst_unit: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    let mut cases = 0;
    while cases < 20 {
        let family = FAMILIES[rng.gen_range(0..4)];
        let spec = reference(family);
        let h = rng.gen_range(1..=spec.half());
        let eta = rng.gen_range(0.005..=0.02);
        let x = rng.gen_range(0.5..=1.5);
        let w0 = spec.omega0(h).unwrap();
        let tau = x / dynamics::growth_rate(&spec, h).unwrap();
        if w0 * tau / eta > 40.0 * PI {
            continue;
        }
        let d = DriveSpec::resonant(&spec, h, eta, tau).unwrap();
        let (r, traj) = dynamics::numeric_bogoliubov(&spec, &d, h, &opts).unwrap();
        worst_unit = worst_unit.max((r.unitarity() - 1.0).abs());
        worst_drift = worst_drift.max(traj.max_wronskian_drift());
        cases += 1;
    }
    let drift_tol = 10.0 * opts.rtol;
    outcome(
        worst_unit <= 1e-8 && worst_drift <= drift_tol,
        format!(
            "{cases} cases at rtol {:.0e}: max ||a|^2-|b|^2-1| {worst_unit:.2e} (tol 1e-8), max Wronskian drift {worst_drift:.2e} (tol {drift_tol:.0e})",
            opts.rtol
        ),
    )
}

fn quantization_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut norm: f64 = 0.0;
    let mut comm_all: f64 = 0.0;
    let mut comm_sampled: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for family in FAMILIES {
        let spec = reference(family);
        let small = spec.with_cells(64).unwrap();
        let modes = ModeSet::new(&small).unwrap();
        let nm = modes.normalization_matrix().unwrap();
        let cm = modes.commutator_matrix().unwrap();
        let ms = modes.modes();
        for (r, a) in ms.iter().enumerate() {
            for (c, b) in ms.iter().enumerate() {
                let same = (a.j - b.j).rem_euclid(64) == 0;
                let delta = if same { 1.0 } else { 0.0 };
                let inv_chi = if same { 1.0 / chi_ref(family, a.j, 64) } else { 0.0 };
                norm = norm.max((nm.get(r, c) - delta).norm());
                comm_all = comm_all.max((cm.get(r, c) - inv_chi).norm() / inv_chi.max(1.0));
            }
        }

        let modes = ModeSet::new(&spec).unwrap();
        let half = spec.half();
        for k in 0..200 {
            let j = rng.gen_range(1..=half) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let h = if k % 2 == 0 { j } else { rng.gen_range(1..=half) * if rng.gen_bool(0.5) { 1 } else { -1 } };
            let same = (j - h).rem_euclid(CELLS as i64) == 0;
            let inv_chi = if same { 1.0 / chi_ref(family, j, CELLS) } else { 0.0 };
            let got: Complex64 = modes.commutator(j, h).unwrap();
            comm_sampled = comm_sampled.max((got - inv_chi).norm() / inv_chi.max(1.0));
        }
        round_trip = round_trip.max(verify::round_trip_residual(&modes, 50, &mut rng).unwrap());
    }
    outcome(
        norm <= 1e-12 && comm_all <= 1e-12 && comm_sampled <= 1e-12 && round_trip <= 1e-10,
        format!(
            "normalization {norm:.2e}, commutator N=64 {comm_all:.2e}, N=200 sampled {comm_sampled:.2e} (tol 1e-12); round-trip {round_trip:.2e} (tol 1e-10)"
        ),
    )
}

fn off_resonance() -> Outcome {
    let eta = 0.01;
    let mut worst: f64 = 0.0;
    for family in FAMILIES {
        let spec = reference(family);
        for h in [10, 60, 100] {
            let w0 = spec.omega0(h).unwrap();
            let tau = 1.0 / dynamics::growth_rate(&spec, h).unwrap();
            let on = DriveSpec::resonant(&spec, h, eta, tau).unwrap();
            let off = DriveSpec::new(eta, 2.0 * w0 * 1.2, tau / eta).unwrap();
            let ratio = numeric_n(&spec, &off, h) / numeric_n(&spec, &on, h);
            worst = worst.max(ratio);
        }
    }
    outcome(worst < 0.05, format!("max N_detuned/N_resonant {worst:.3e} (limit 5e-2) over 12 modes"))
}

fn duality() -> Outcome {
    let lhtl1 = reference(CircuitFamily::Lhtl1);
    let rhtl2_ref = reference(CircuitFamily::Rhtl2);
    let mut worst_ratio: f64 = 0.0;
    let mut lines = Vec::new();
    for (hl, hr) in [(60, 20), (100, 40), (30, 10)] {
        let target = omega0_ref(CircuitFamily::Lhtl1, hl, I_C);
        let s2 = sin2_half(hr, CELLS);
        let e = target * target * (C + 4.0 * C_J * s2) / (4.0 * s2);
        let ic = e * FLUX_QUANTUM / (4.0 * PI * PI);
        let rhtl2 = rhtl2_ref.with_critical_current(ic).unwrap();
        let wl = lhtl1.omega0(hl).unwrap();
        let wr = rhtl2.omega0(hr).unwrap();
        let freq_err = rel(wr, wl);
        let tau = 1.0 / wl;
        let (al, ar) = (analytic_n(&lhtl1, hl, tau), analytic_n(&rhtl2, hr, tau));
        let mut ok = freq_err <= 1e-12 && rel(ar, al) <= 1e-12;
        for eta in ETAS {
            let nl = numeric_n(&lhtl1, &DriveSpec::resonant(&lhtl1, hl, eta, tau).unwrap(), hl);
            let nr = numeric_n(&rhtl2, &DriveSpec::resonant(&rhtl2, hr, eta, tau).unwrap(), hr);
            let tol = 5.0 * eta;
            let errs = [rel(nr, nl), rel(nl, al), rel(nr, ar)];
            for e in errs {
                worst_ratio = worst_ratio.max(e / tol);
            }
            ok &= errs.iter().all(|&e| e <= tol);
        }
        lines.push(format!("LHTL1 j={hl} / RHTL2 j={hr} (I_c={ic:.4e} A): {}", if ok { "ok" } else { "mismatch" }));
        if !ok {
            return outcome(false, lines.join("; "));
        }
    }
    outcome(true, format!("{}; worst err/tol {worst_ratio:.3}", lines.join("; ")))
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 7] = [
        ("1 spectrum reproduction", spectrum),
        ("2 analytic particle numbers", analytic_particles),
        ("3 oracle agreement", oracle_agreement),
        ("4 unitarity", unitarity),
        ("5 quantization identities", quantization_identities),
        ("6 off-resonance suppression", off_resonance),
        ("7 duality", duality),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
