use qtclone::photonics::{run_hom_scan, ScanMode, GENERATOR};
use qtclone::protocols::{modified_protocol, standard_teleport, transpose_variant, CloneUnotResult};
use qtclone::quantum::{fidelity, orthogonal_qubit, pauli};
use qtclone::{selftest, Execution, Pauli, PureState};

use crate::config::{Mode, RunConfig, Variant};
use crate::csv::{fixed, Cell, Table};
use crate::CliError;

/// CSV table plus human-readable summary of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub summary: Vec<String>,
    /// False when the command ran but found failures (selftest).
    pub ok: bool,
}

fn provenance(cfg: &RunConfig, columns: &[&'static str]) -> Table {
    let mut t = Table::new(columns);
    t.comment(format!("qtclone {} {}", env!("CARGO_PKG_VERSION"), cfg.command));
    t.comment(format!("invocation: {}", cfg.invocation));
    t.comment(format!("config: {}", cfg.describe()));
    t.comment(format!("seed: {}", cfg.seed));
    t.comment(format!("generator: {GENERATOR}"));
    t
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

pub fn cmd_teleport(cfg: &RunConfig) -> Result<Report, CliError> {
    let phi = cfg.state.state();
    let outcomes = standard_teleport(phi).map_err(compute)?;
    let mut t = provenance(
        cfg,
        &[
            "bell_outcome",
            "probability",
            "corrected_fidelity",
            "uncorrected_fidelity",
        ],
    );
    let mut mixture_fidelity = 0.0;
    for o in &outcomes {
        let corrected = fidelity(&o.bob_state, phi).map_err(compute)?;
        let uncorrected = fidelity(&o.uncorrected, phi).map_err(compute)?;
        mixture_fidelity += o.probability * uncorrected;
        t.row(vec![
            o.bell_result.to_string().into(),
            o.probability.into(),
            corrected.into(),
            uncorrected.into(),
        ]);
    }
    Ok(Report {
        table: t,
        summary: vec![format!("uncorrected mixture fidelity = {}", fixed(mixture_fidelity))],
        ok: true,
    })
}

/// Targets `(S, A, B)` the clone and U-NOT fidelities are measured against.
fn clone_targets(phi: &PureState, variant: Variant) -> Result<[PureState; 3], CliError> {
    let perp = orthogonal_qubit(phi).map_err(compute)?;
    Ok(match variant {
        Variant::PsiMinus => [phi.clone(), phi.clone(), perp],
        Variant::PhiPlus => {
            let y = pauli(Pauli::Y);
            let y_phi = phi.apply(&y).map_err(compute)?;
            let y_perp = perp.apply(&y).map_err(compute)?;
            [phi.clone(), y_phi, y_perp]
        }
    })
}

pub fn cmd_clone(cfg: &RunConfig) -> Result<Report, CliError> {
    let phi = cfg.state.state();
    let out: CloneUnotResult = match cfg.variant {
        Variant::PsiMinus => modified_protocol(phi),
        Variant::PhiPlus => transpose_variant(phi),
    }
    .map_err(compute)?;
    let [ts, ta, tb] = clone_targets(phi, cfg.variant)?;
    let rows = [
        ("p_singlet", out.p_singlet),
        ("p_complement", out.p_complement),
        ("F_clone_S", fidelity(&out.rho_s, &ts).map_err(compute)?),
        ("F_clone_A", fidelity(&out.rho_a, &ta).map_err(compute)?),
        ("F_unot_B", fidelity(&out.rho_b, &tb).map_err(compute)?),
    ];
    let mut t = provenance(cfg, &["quantity", "value"]);
    t.comment(match cfg.variant {
        Variant::PsiMinus => "targets: S and A against phi, B against phi_perp",
        Variant::PhiPlus => "targets: S against phi, A against sigma_y phi, B against sigma_y phi_perp",
    });
    for (name, value) in rows {
        t.row(vec![name.into(), value.into()]);
    }
    let summary = rows[2..]
        .iter()
        .map(|(name, v)| format!("{name} = {}", fixed(*v)))
        .collect();
    Ok(Report {
        table: t,
        summary,
        ok: true,
    })
}

pub fn cmd_hom_scan(cfg: &RunConfig, exec: Execution) -> Result<Report, CliError> {
    let mode = match cfg.mode {
        Mode::Exact => ScanMode::Exact,
        Mode::MonteCarlo => ScanMode::MonteCarlo {
            trials: cfg.trials,
            seed: cfg.seed,
        },
    };
    let scan = run_hom_scan(cfg.state.state(), &cfg.z_grid(), cfg.tau_coh, mode, exec).map_err(compute)?;
    let mut t = provenance(
        cfg,
        &["z_um", "visibility", "p_A1A2", "p_A2B", "n_A1A2", "n_A2B", "trials"],
    );
    let b = &scan.baseline;
    t.comment(format!(
        "baseline: z_um={} visibility={} p_A1A2={} p_A2B={} n_A1A2={} n_A2B={} trials={}",
        fixed(b.z_um),
        fixed(b.visibility),
        fixed(b.p_a1a2),
        fixed(b.p_a2b),
        b.n_a1a2,
        b.n_a2b,
        b.trials
    ));
    for r in &scan.records {
        t.row(vec![
            r.z_um.into(),
            r.visibility.into(),
            r.p_a1a2.into(),
            r.p_a2b.into(),
            r.n_a1a2.into(),
            r.n_a2b.into(),
            r.trials.into(),
        ]);
    }
    let summary = vec![
        format!("peak z_um = {}", fixed(scan.peak.z_um)),
        format!("baseline z_um = {}", fixed(b.z_um)),
        format!("R = {}", fixed(scan.ratio)),
        format!("F = {}", fixed(scan.fidelity)),
    ];
    Ok(Report {
        table: t,
        summary,
        ok: true,
    })
}

pub fn cmd_selftest(cfg: &RunConfig) -> Result<Report, CliError> {
    let checks = selftest::run(cfg.tolerance);
    let mut t = provenance(cfg, &["check", "status", "detail"]);
    for c in &checks {
        let status = if c.passed { "pass" } else { "fail" };
        t.row(vec![c.name.into(), status.into(), Cell::Text(c.detail.clone())]);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut summary: Vec<String> = checks.iter().map(|c| c.to_string()).collect();
    summary.push(format!("{} of {} checks passed", checks.len() - failed, checks.len()));
    Ok(Report {
        table: t,
        summary,
        ok: failed == 0,
    })
}
