//! Delay scans of the coincidence channels, exact and Monte Carlo.
//!
//! Monte Carlo trials at scan point `i` are split into fixed batches of
//! [`BATCH_SIZE`]; batch `j` draws from ChaCha8 stream `(i << 32) | j` of the
//! master seed. Tallies are integer sums, so the counts are identical for a
//! given seed whatever the thread count or execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::par::{map_indexed, try_map_indexed, Execution};
use crate::quantum::PureState;

use super::delay::{switched_off_position, visibility_model};
use super::experiment::{point_distribution, Ancilla, DetectionEvent, PointDistribution};
use super::PhotonicsError;

pub const BATCH_SIZE: u64 = 8192;
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9), stream = point << 32 | batch";

/// Stream index reserved for the switched-off reference point.
const BASELINE_POINT: u64 = u32::MAX as u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// Coincidence probabilities (and counts, in Monte Carlo mode) at one stage
/// position. Probabilities are per injected photon pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceRecord {
    pub z_um: f64,
    pub visibility: f64,
    pub p_a1a2: f64,
    pub p_a2b: f64,
    pub n_a1a2: u64,
    pub n_a2b: u64,
    /// Zero in exact mode.
    pub trials: u64,
}

impl CoincidenceRecord {
    pub fn is_sampled(&self) -> bool {
        self.trials > 0
    }

    /// Observed `[D_A1, D_A2]` rate: the count fraction when sampled, else
    /// the exact probability.
    pub fn rate_a1a2(&self) -> f64 {
        if self.is_sampled() {
            self.n_a1a2 as f64 / self.trials as f64
        } else {
            self.p_a1a2
        }
    }

    pub fn rate_a2b(&self) -> f64 {
        if self.is_sampled() {
            self.n_a2b as f64 / self.trials as f64
        } else {
            self.p_a2b
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    a1a2: u64,
    a2b: u64,
}

fn sample_batch(dist: &PointDistribution, seed: u64, point: u64, batch: u64, n: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((point << 32) | batch);
    let mut t = Tally::default();
    for _ in 0..n {
        match dist.sample(&mut rng) {
            DetectionEvent::A1A2 => t.a1a2 += 1,
            DetectionEvent::A2B => t.a2b += 1,
            _ => {}
        }
    }
    t
}

/// Evaluate (and optionally sample) the pipeline at the given points.
/// `points[k] = (stream index, z, visibility)`.
fn evaluate(
    phi: &PureState,
    points: &[(u64, f64, f64)],
    mode: ScanMode,
    exec: Execution,
) -> Result<Vec<CoincidenceRecord>, PhotonicsError> {
    let dists = try_map_indexed(points.len(), exec, |k| {
        point_distribution(phi, &Ancilla::MixedHV, points[k].2)
    })?;
    let mut records: Vec<CoincidenceRecord> = points
        .iter()
        .zip(&dists)
        .map(|(&(_, z_um, visibility), d)| CoincidenceRecord {
            z_um,
            visibility,
            p_a1a2: d.probability(DetectionEvent::A1A2),
            p_a2b: d.probability(DetectionEvent::A2B),
            n_a1a2: 0,
            n_a2b: 0,
            trials: 0,
        })
        .collect();

    if let ScanMode::MonteCarlo { trials, seed } = mode {
        if trials == 0 {
            return Err(PhotonicsError::ZeroTrials);
        }
        let batches = trials.div_ceil(BATCH_SIZE);
        let tasks: Vec<(usize, u64, u64)> = (0..points.len())
            .flat_map(|k| {
                (0..batches).map(move |j| {
                    let n = BATCH_SIZE.min(trials - j * BATCH_SIZE);
                    (k, j, n)
                })
            })
            .collect();
        let tallies = map_indexed(tasks.len(), exec, |i| {
            let (k, j, n) = tasks[i];
            (k, sample_batch(&dists[k], seed, points[k].0, j, n))
        });
        for (k, t) in tallies {
            records[k].n_a1a2 += t.a1a2;
            records[k].n_a2b += t.a2b;
        }
        for r in &mut records {
            r.trials = trials;
        }
    }
    Ok(records)
}

pub fn hom_scan(
    phi: &PureState,
    z_values: &[f64],
    tau_coh_fs: f64,
    mode: ScanMode,
    exec: Execution,
) -> Result<Vec<CoincidenceRecord>, PhotonicsError> {
    if z_values.is_empty() {
        return Err(PhotonicsError::EmptyScan);
    }
    let points = z_values
        .iter()
        .enumerate()
        .map(|(i, &z)| Ok((i as u64, z, visibility_model(z, tau_coh_fs)?)))
        .collect::<Result<Vec<_>, PhotonicsError>>()?;
    evaluate(phi, &points, mode, exec)
}

/// A scan together with its switched-off reference and the derived ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct HomScan {
    pub records: Vec<CoincidenceRecord>,
    /// Point with the largest overlap.
    pub peak: CoincidenceRecord,
    /// Reference far outside the coherence window.
    pub baseline: CoincidenceRecord,
    pub ratio: f64,
    pub fidelity: f64,
}

/// Scan plus enhancement ratio. The baseline is evaluated (and sampled, in
/// Monte Carlo mode, with the same trial count) at
/// [`switched_off_position`], where the photons no longer interfere.
pub fn run_hom_scan(
    phi: &PureState,
    z_values: &[f64],
    tau_coh_fs: f64,
    mode: ScanMode,
    exec: Execution,
) -> Result<HomScan, PhotonicsError> {
    let records = hom_scan(phi, z_values, tau_coh_fs, mode, exec)?;
    let z_off = switched_off_position(tau_coh_fs);
    let baseline = evaluate(
        phi,
        &[(BASELINE_POINT, z_off, visibility_model(z_off, tau_coh_fs)?)],
        mode,
        exec,
    )?[0];
    let peak = *records
        .iter()
        .max_by(|a, b| a.visibility.total_cmp(&b.visibility))
        .expect("nonempty scan");
    let ratio = extract_r(&peak, &baseline)?;
    let fidelity = fidelity_from_r(ratio)?;
    Ok(HomScan {
        records,
        peak,
        baseline,
        ratio,
        fidelity,
    })
}

/// Peak-to-baseline ratio of the `[D_A1, D_A2]` channel; count ratio when
/// both records are sampled.
pub fn extract_r(peak: &CoincidenceRecord, baseline: &CoincidenceRecord) -> Result<f64, PhotonicsError> {
    let sampled = peak.is_sampled() && baseline.is_sampled();
    let (num, den) = if sampled {
        (peak.rate_a1a2(), baseline.rate_a1a2())
    } else {
        (peak.p_a1a2, baseline.p_a1a2)
    };
    if den.is_nan() || den <= 0.0 {
        return Err(PhotonicsError::ZeroBaseline);
    }
    Ok(num / den)
}

/// `F = (2R + 1) / (2R + 2)`.
pub fn fidelity_from_r(r: f64) -> Result<f64, PhotonicsError> {
    if r.is_nan() || r < 1.0 {
        return Err(PhotonicsError::SubClassicalRatio(r));
    }
    Ok((2.0 * r + 1.0) / (2.0 * r + 2.0))
}

/// Inverse of [`fidelity_from_r`]: `R = (2F - 1) / (2 - 2F)`.
pub fn r_from_fidelity(f: f64) -> f64 {
    (2.0 * f - 1.0) / (2.0 - 2.0 * f)
}

/// Enhancement ratio of the exact engine at overlap `v` against `v = 0`.
pub fn exact_ratio(phi: &PureState, v: f64) -> Result<f64, PhotonicsError> {
    let on = point_distribution(phi, &Ancilla::MixedHV, v)?.probability(DetectionEvent::A1A2);
    let off = point_distribution(phi, &Ancilla::MixedHV, 0.0)?.probability(DetectionEvent::A1A2);
    if off.is_nan() || off <= 0.0 {
        return Err(PhotonicsError::ZeroBaseline);
    }
    Ok(on / off)
}

/// Overlap at which the exact engine yields ratio `target`, by bisection.
pub fn solve_visibility_for_ratio(phi: &PureState, target: f64) -> Result<f64, PhotonicsError> {
    let (mut lo, mut hi) = (0.0, 1.0);
    let f = |v| exact_ratio(phi, v).map(|r| r - target);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo > 0.0 || fhi < 0.0 {
        return Err(PhotonicsError::RatioOutOfRange(target));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
