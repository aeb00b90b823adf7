//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qtclone::linalg::ComplexMatrix;
use qtclone::photonics::{
    exact_ratio, fidelity_from_r, postselected_polarization, r_from_fidelity, single_photon_marginal,
    solve_visibility_for_ratio, Ancilla,
};
use qtclone::protocols::{
    modified_protocol, standard_teleport, symmetric_clone_state, transpose_variant, unot_as_mixture,
};
use qtclone::quantum::{apply_channel, fidelity, standard_channels};
use qtclone::selftest::reference_inputs;
use qtclone::{Execution, PureState};
use qtclone_cli::{execute, Report, StateSpec};

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Run a command line through the CLI library.
fn cli(args: &str) -> Report {
    let argv: Vec<String> = std::iter::once("qtclone")
        .chain(args.split_whitespace())
        .map(String::from)
        .collect();
    execute(&argv, Execution::default())
        .unwrap_or_else(|e| panic!("`{args}` failed: {e}"))
        .1
}

/// Data rows of a report keyed by column name.
fn rows(report: &Report) -> Vec<HashMap<String, String>> {
    let csv = report.table.render();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().expect("header").split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn num(row: &HashMap<String, String>, col: &str) -> f64 {
    row[col]
        .parse()
        .unwrap_or_else(|_| panic!("column {col} is not numeric: {}", row[col]))
}

/// `quantity,value` table as a map.
fn quantities(report: &Report) -> HashMap<String, f64> {
    rows(report)
        .iter()
        .map(|r| (r["quantity"].clone(), num(r, "value")))
        .collect()
}

fn summary_value(report: &Report, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    let line = report
        .summary
        .iter()
        .find(|l| l.starts_with(&prefix))
        .expect("summary line");
    line[prefix.len()..].parse().expect("numeric summary")
}

/// Haar-random Bloch angles in degrees.
fn haar_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u: f64 = rng.random();
    let theta = (1.0 - 2.0 * u).acos().to_degrees();
    let phi = rng.random_range(0.0..360.0);
    (theta, phi)
}

fn haar_states(n: usize, seed: u64) -> Vec<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (t, p) = haar_angles(&mut rng);
            StateSpec::bloch(t, p).state().clone()
        })
        .collect()
}

fn spread(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min)
}

fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.frobenius_distance(b).expect("same shape")
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail.push_str(&format!(" [{:.3} s", took.as_secs_f64()));
    if let Some(limit) = limit {
        out.detail.push_str(&format!(", limit {} s", limit.as_secs()));
        out.passed &= took < limit;
    }
    out.detail.push(']');
    out
}

fn clone_fidelity() -> Outcome {
    let q = quantities(&cli("clone --state H --variant psi_minus"));
    let (s, a) = (q["F_clone_S"], q["F_clone_A"]);
    let ok = (s - 5.0 / 6.0).abs() <= 1e-10 && (a - 5.0 / 6.0).abs() <= 1e-10;
    outcome(
        ok,
        format!("F_clone_S={s:.15} F_clone_A={a:.15} (target 5/6, tol 1e-10)"),
    )
}

fn unot_fidelity() -> Outcome {
    let q = quantities(&cli("clone --state H --variant psi_minus"));
    let b = q["F_unot_B"];
    outcome(
        (b - 2.0 / 3.0).abs() <= 1e-10,
        format!("F_unot_B={b:.15} (target 2/3, tol 1e-10)"),
    )
}

fn haar_clone_runs(n: usize, seed: u64) -> Vec<HashMap<String, f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (t, p) = haar_angles(&mut rng);
            quantities(&cli(&format!(
                "clone --variant psi_minus --state theta={t:?},phi={p:?}"
            )))
        })
        .collect()
}

fn universality() -> Outcome {
    let runs = haar_clone_runs(100, 2024);
    let col = |k: &str| runs.iter().map(|q| q[k]).collect::<Vec<f64>>();
    let (s, b) = (spread(&col("F_clone_S")), spread(&col("F_unot_B")));
    outcome(
        s < 1e-10 && b < 1e-10,
        format!("100 Haar inputs: spread F_clone_S={s:.2e} F_unot_B={b:.2e} (tol 1e-10)"),
    )
}

fn branch_probabilities() -> Outcome {
    let mut runs = haar_clone_runs(100, 2025);
    for s in ["H", "V", "+", "-", "R", "L"] {
        runs.push(quantities(&cli(&format!("clone --state {s}"))));
    }
    let worst = runs
        .iter()
        .map(|q| (q["p_singlet"] - 0.25).abs().max((q["p_complement"] - 0.75).abs()))
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-12,
        format!("{} inputs: max |p - (1/4, 3/4)| = {worst:.2e} (tol 1e-12)", runs.len()),
    )
}

fn protocol_channel_oracle() -> Outcome {
    let ch = standard_channels();
    let (mut d_mix, mut d_ch) = (0.0f64, 0.0f64);
    for phi in haar_states(50, 5) {
        let rho_b = modified_protocol(&phi).unwrap().rho_b;
        d_mix = d_mix.max(dist(rho_b.matrix(), unot_as_mixture(&phi).unwrap().matrix()));
        let channel = apply_channel(&ch.unot, &phi.to_density()).unwrap();
        d_ch = d_ch.max(dist(rho_b.matrix(), channel.matrix()));
    }
    outcome(
        d_mix <= 1e-12 && d_ch <= 1e-12,
        format!("50 inputs: |rho_B - mixture|={d_mix:.2e} |rho_B - E_UNOT|={d_ch:.2e} (tol 1e-12)"),
    )
}

fn transpose_variant_check() -> Outcome {
    let ch = standard_channels();
    let (mut d_s, mut d_a, mut d_b, mut d_same) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut inputs = reference_inputs().to_vec();
    inputs.extend(haar_states(20, 6));
    for phi in &inputs {
        let singlet = modified_protocol(phi).unwrap();
        let variant = transpose_variant(phi).unwrap();
        let rotated = apply_channel(&ch.sigma_y, &singlet.rho_s).unwrap();
        d_s = d_s.max(dist(variant.rho_s.matrix(), rotated.matrix()));
        d_a = d_a.max(dist(variant.rho_a.matrix(), rotated.matrix()));
        d_same = d_same.max(dist(variant.rho_s.matrix(), singlet.rho_s.matrix()));
        let expected_b = apply_channel(&ch.sigma_y, &apply_channel(&ch.unot, &phi.to_density()).unwrap()).unwrap();
        d_b = d_b.max(dist(variant.rho_b.matrix(), expected_b.matrix()));
    }
    outcome(
        d_s <= 1e-12 && d_b <= 1e-12,
        format!(
            "{} inputs: |rho'_S - Y rho_S Y|={d_s:.2e} |rho_B - E_Y(E_UNOT)|={d_b:.2e} (tol 1e-12); |rho'_A - Y rho_S Y|={d_a:.2e} |rho'_S - rho_S|={d_same:.2e}",
            inputs.len()
        ),
    )
}

fn photonics_equivalence() -> Outcome {
    let worst = reference_inputs()
        .iter()
        .map(|phi| {
            let (rho, _) = postselected_polarization(phi, &Ancilla::MixedHV, 1.0).unwrap();
            dist(rho.matrix(), symmetric_clone_state(phi).unwrap().matrix())
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-10,
        format!("H, +, R at v=1: max |rho_out1 - rho_SA| = {worst:.2e} (tol 1e-10)"),
    )
}

fn enhancement_ratio() -> Outcome {
    let report = cli("hom-scan --state H --mode exact --z-min -120 --z-max 120 --steps 49");
    let (r, f) = (summary_value(&report, "R"), summary_value(&report, "F"));
    let table = rows(&report);
    let a2b: Vec<f64> = table.iter().map(|row| num(row, "p_A2B")).collect();
    let flat = spread(&a2b);
    let ok = (r - 2.0).abs() <= 1e-10 && (f - 5.0 / 6.0).abs() <= 1e-6 && flat <= 1e-12 && table.len() == 49;
    outcome(
        ok,
        format!("R={r:.12} F={f:.9} p_A2B spread={flat:.2e} over {} points", table.len()),
    )
}

fn monte_carlo_consistency() -> Outcome {
    let report = cli("hom-scan --state H --mode monte-carlo --trials 100000 --seed 42");
    let (r, f) = (summary_value(&report, "R"), summary_value(&report, "F"));
    let first = (1.94..=2.06).contains(&r) && (f - 5.0 / 6.0).abs() <= 0.005;

    let inside = |n: f64, trials: f64, p: f64| {
        let est = n / trials;
        let sigma = (est * (1.0 - est) / trials).sqrt();
        (p - est).abs() <= 3.0 * sigma
    };
    let mut hits = 0;
    for seed in 1..=30 {
        let scan = cli(&format!(
            "hom-scan --state H --mode monte-carlo --trials 100000 --seed {seed} --steps 3"
        ));
        let peak = rows(&scan)
            .into_iter()
            .find(|row| num(row, "z_um") == 0.0)
            .expect("z=0 row");
        let t = num(&peak, "trials");
        if inside(num(&peak, "n_A1A2"), t, num(&peak, "p_A1A2")) && inside(num(&peak, "n_A2B"), t, num(&peak, "p_A2B"))
        {
            hits += 1;
        }
    }
    outcome(
        first && hits >= 28,
        format!("seed 42: R={r:.5} F={f:.5}; 30 seeds: {hits}/30 peak points inside 3 sigma"),
    )
}

fn measured_value_reconciliation() -> Outcome {
    let target_f = 0.827;
    let r = r_from_fidelity(target_f);
    let mut worst = 0.0f64;
    let mut v_used = 0.0;
    for phi in reference_inputs() {
        let v = solve_visibility_for_ratio(&phi, r).unwrap();
        v_used = v;
        let (rho, _) = postselected_polarization(&phi, &Ancilla::MixedHV, v).unwrap();
        let f_engine = fidelity(&single_photon_marginal(&rho).unwrap(), &phi).unwrap();
        let f_formula = fidelity_from_r(exact_ratio(&phi, v).unwrap()).unwrap();
        worst = worst.max((f_engine - target_f).abs()).max((f_formula - target_f).abs());
    }
    let ok = (r - 1.890).abs() < 5e-4 && worst <= 1e-3;
    outcome(
        ok,
        format!("R(F=0.827)={r:.6} at v={v_used:.6}; max |F_engine - 0.827| = {worst:.2e} (tol 1e-3)"),
    )
}

fn teleport_sanity() -> Outcome {
    let mut worst_corrected = 0.0f64;
    for s in ["H", "V", "+", "-", "R", "L", "theta=60,phi=30", "theta=123.4,phi=-77"] {
        for row in rows(&cli(&format!("teleport --state {s}"))) {
            worst_corrected = worst_corrected.max((num(&row, "corrected_fidelity") - 1.0).abs());
        }
    }
    let half = ComplexMatrix::identity(2).scale(qtclone::linalg::re(0.5));
    let mut worst_mix = 0.0f64;
    for phi in haar_states(20, 11).iter().chain(reference_inputs().iter()) {
        let mut acc = ComplexMatrix::zeros(2, 2);
        for o in standard_teleport(phi).unwrap() {
            acc = acc
                .add(&o.uncorrected.matrix().scale(qtclone::linalg::re(o.probability)))
                .unwrap();
        }
        worst_mix = worst_mix.max(dist(&acc, &half));
    }
    outcome(
        worst_corrected <= 1e-12 && worst_mix <= 1e-12,
        format!("max |F_corrected - 1|={worst_corrected:.2e}, |mixture - I/2|={worst_mix:.2e} (tol 1e-12)"),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("cloning fidelity", Some(1), clone_fidelity),
        ("U-NOT fidelity", None, unot_fidelity),
        ("universality", Some(5), universality),
        ("branch probabilities", None, branch_probabilities),
        ("protocol-channel oracle", None, protocol_channel_oracle),
        ("transpose variant", None, transpose_variant_check),
        ("photonics-algebra equivalence", None, photonics_equivalence),
        ("enhancement ratio", Some(10), enhancement_ratio),
        ("Monte Carlo consistency", Some(60), monte_carlo_consistency),
        ("measured-value reconciliation", None, measured_value_reconciliation),
        ("teleportation sanity", None, teleport_sanity),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let out = timed(limit.map(Duration::from_secs), check);
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {:>2} {name}: {}", i + 1, out.detail);
        if !out.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
