//! Heralded non-Gaussian state preparation: a trainable Gaussian block on
//! vacuum followed by photon-number projections on all modes but the first.
//! Covers cat-state preparation (2 modes, herald 3), staged cubic-phase-state
//! preparation (3 modes, heralds up to 16,16), and verification of a
//! published cubic-phase solution matrix.

use ndarray::{Array1, Array2, ArrayD, IxDyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bargmann::pure_triple_unchecked;
use crate::fock::{hermite_renormalized, FockTensor};
use crate::linalg::C64;
use crate::opt::{optimize, random_symplectic, FockProblem, OptimizerConfig, SymplecticPoint};
use crate::phase_space::{is_symplectic, omega};
use crate::{Error, Result};

use super::report::{matrix_rows, ExperimentReport};
use super::targets::{target_cat, target_cubic, Parity};

/// Fidelity/probability of the mode-0 state heralded by measuring `outcome`
/// photons on every remaining mode, from the unnormalized multimode ket.
pub fn herald_metrics(
    tensor: &FockTensor,
    outcomes: &[usize],
    target: &Array1<C64>,
) -> Result<(f64, f64)> {
    let (w, prob) = heralded_vector(tensor, outcomes)?;
    if target.len() != w.len() {
        return Err(Error::DimensionMismatch(
            "target length must match the mode-0 cutoff".into(),
        ));
    }
    if prob <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let t: C64 = target.iter().zip(w.iter()).map(|(t, w)| t.conj() * w).sum();
    Ok((t.norm_sqr() / prob, prob))
}

fn heralded_vector(tensor: &FockTensor, outcomes: &[usize]) -> Result<(Array1<C64>, f64)> {
    let modes = tensor.cutoffs.len();
    if outcomes.len() != modes - 1 {
        return Err(Error::DimensionMismatch(format!(
            "need {} herald outcomes, got {}",
            modes - 1,
            outcomes.len()
        )));
    }
    for (m, &o) in outcomes.iter().enumerate() {
        if o >= tensor.cutoffs[m + 1] {
            return Err(Error::InvalidArgument(format!(
                "herald outcome {} exceeds cutoff {} on mode {}",
                o,
                tensor.cutoffs[m + 1],
                m + 1
            )));
        }
    }
    let k = tensor.cutoffs[0];
    let mut w = Array1::zeros(k);
    let mut idx = vec![0usize; modes];
    idx[1..].copy_from_slice(outcomes);
    for n in 0..k {
        idx[0] = n;
        w[n] = tensor.amps[IxDyn(&idx)];
    }
    let prob: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    Ok((w, prob))
}

/// The published cost: 1 − fid − prob once fid > 0.99, else 1 − fid.
/// Returns (cost, fid, prob, upstream ∂cost/∂𝒢).
fn herald_cost_and_upstream(
    tensor: &FockTensor,
    outcomes: &[usize],
    target: &Array1<C64>,
) -> Result<(f64, f64, f64, ArrayD<C64>)> {
    let (w, prob) = heralded_vector(tensor, outcomes)?;
    let t_amp: C64 = target.iter().zip(w.iter()).map(|(t, w)| t.conj() * w).sum();
    let fid = if prob > 0.0 { t_amp.norm_sqr() / prob } else { 0.0 };
    let include_prob = fid > 0.99;
    let cost = if include_prob { 1.0 - fid - prob } else { 1.0 - fid };

    // ∂fid/∂w_k = (t*_k T̄ p − |T|² w̄_k)/p²; ∂prob/∂w_k = w̄_k
    let mut upstream = ArrayD::zeros(IxDyn(&tensor.cutoffs));
    let modes = tensor.cutoffs.len();
    let mut idx = vec![0usize; modes];
    idx[1..].copy_from_slice(outcomes);
    if prob > 0.0 {
        for n in 0..tensor.cutoffs[0] {
            idx[0] = n;
            let dfid =
                (target[n].conj() * t_amp.conj() * prob - t_amp.norm_sqr() * w[n].conj())
                    / (prob * prob);
            let mut u = -dfid;
            if include_prob {
                u -= w[n].conj();
            }
            upstream[IxDyn(&idx)] = u;
        }
    }
    Ok((cost, fid, prob, upstream))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatPrepConfig {
    pub alpha: f64,
    pub herald: usize,
    pub cutoff: usize,
    pub steps: usize,
    pub symplectic_lr: f64,
    pub seed: u64,
    #[serde(default)]
    pub hbar: Option<f64>,
}

impl Default for CatPrepConfig {
    fn default() -> Self {
        CatPrepConfig {
            alpha: 2.0,
            herald: 3,
            cutoff: 100,
            steps: 150,
            symplectic_lr: 0.2,
            seed: 7,
            hbar: None,
        }
    }
}

fn resolve_hbar(explicit: Option<f64>) -> f64 {
    explicit.unwrap_or_else(crate::hbar_from_env)
}

pub fn run_cat_prep(config: &CatPrepConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let hbar = resolve_hbar(config.hbar);
    let parity = if config.herald % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    let target = target_cat(C64::new(config.alpha, 0.0), parity, config.cutoff)?;
    let target_vec = target
        .amps
        .clone()
        .into_shape(config.cutoff)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;

    let outcomes = vec![config.herald];
    let cutoffs = vec![config.cutoff, config.herald + 1];
    let problem = FockProblem {
        cutoffs: cutoffs.clone(),
        hbar,
        fd_step: 1e-6,
        train_displacement: false,
        cost_and_upstream: Box::new({
            let target_vec = target_vec.clone();
            let outcomes = outcomes.clone();
            move |tensor: &FockTensor| {
                let (cost, _, _, up) = herald_cost_and_upstream(tensor, &outcomes, &target_vec)?;
                Ok((cost, up))
            }
        }),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let s0 = random_symplectic(2, &mut rng)?;
    let opt_config = OptimizerConfig {
        symplectic_lr: config.symplectic_lr,
        max_steps: config.steps,
        seed: config.seed,
        ..Default::default()
    };
    let run = optimize(&problem, s0, Array1::zeros(4), &opt_config)?;

    let cov = run.s.dot(&run.s.t()).mapv(|x| 0.5 * hbar * x);
    let triple = pure_triple_unchecked(&cov, &run.d, hbar)?;
    let tensor = hermite_renormalized(&triple, &cutoffs)?;
    let (fid, prob) = herald_metrics(&tensor, &outcomes, &target_vec)?;
    let (heralded, _) = heralded_vector(&tensor, &outcomes)?;

    let mut report = ExperimentReport::new(
        "cat-prep",
        serde_json::to_value(config).map_err(|e| Error::Numerical(e.to_string()))?,
    );
    report.set_metric("fidelity", fid);
    report.set_metric("probability", prob);
    report.set_metric("final_cost", run.cost);
    report.trajectory = run.trajectory;
    report.solution_s = Some(matrix_rows(&run.s));
    report.solution_d = Some(run.d.to_vec());
    let scale = prob.sqrt();
    report.output_amplitudes = Some(
        FockTensor {
            cutoffs: vec![config.cutoff],
            amps: heralded
                .mapv(|x| if scale > 0.0 { x / scale } else { x })
                .into_shape(IxDyn(&[config.cutoff]))
                .unwrap(),
            kind: crate::bargmann::TripleKind::PureState,
        }
        .to_json(),
    );
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.validate()?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubicPrepConfig {
    /// Herald photon numbers per stage; each stage heralds (n, n) on modes 1
    /// and 2, re-optimizing from the previous stage's parameters.
    pub schedule: Vec<usize>,
    pub cutoff: usize,
    pub steps_per_stage: usize,
    pub symplectic_lr: f64,
    pub euclidean_lr: f64,
    pub seed: u64,
    pub gamma_over_hbar: f64,
    pub target_squeezing: f64,
    #[serde(default)]
    pub hbar: Option<f64>,
}

impl Default for CubicPrepConfig {
    fn default() -> Self {
        CubicPrepConfig {
            schedule: vec![2, 4, 8, 12, 16],
            cutoff: 100,
            steps_per_stage: 2000,
            symplectic_lr: 0.05,
            euclidean_lr: 0.05,
            seed: 7,
            gamma_over_hbar: 0.3,
            target_squeezing: -1.0,
            hbar: None,
        }
    }
}

pub fn run_cubic_prep(config: &CubicPrepConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let hbar = resolve_hbar(config.hbar);
    if config.schedule.is_empty() {
        return Err(Error::InvalidArgument("schedule must be non-empty".into()));
    }
    let target = target_cubic(
        config.gamma_over_hbar,
        config.target_squeezing,
        config.cutoff,
        hbar,
    )?;
    let target_vec = target
        .amps
        .into_shape(config.cutoff)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut s = random_symplectic(3, &mut rng)?;
    let mut d = Array1::zeros(6);

    let mut report = ExperimentReport::new(
        "cubic-prep",
        serde_json::to_value(config).map_err(|e| Error::Numerical(e.to_string()))?,
    );
    let mut trajectory = Vec::new();
    let mut step_offset = 0usize;
    for (stage_idx, &n) in config.schedule.iter().enumerate() {
        let outcomes = vec![n, n];
        let cutoffs = vec![config.cutoff, n + 1, n + 1];
        let problem = FockProblem {
            cutoffs: cutoffs.clone(),
            hbar,
            fd_step: 1e-6,
            train_displacement: true,
            cost_and_upstream: Box::new({
                let target_vec = target_vec.clone();
                let outcomes = outcomes.clone();
                move |tensor: &FockTensor| {
                    let (cost, _, _, up) =
                        herald_cost_and_upstream(tensor, &outcomes, &target_vec)?;
                    Ok((cost, up))
                }
            }),
        };
        let opt_config = OptimizerConfig {
            symplectic_lr: config.symplectic_lr,
            euclidean_lr: config.euclidean_lr,
            max_steps: config.steps_per_stage,
            seed: config.seed,
            ..Default::default()
        };
        match optimize(&problem, s.clone(), d.clone(), &opt_config) {
            Ok(run) => {
                s = SymplecticPoint::new(run.s)?;
                d = run.d;
                for mut p in run.trajectory {
                    p.step += step_offset;
                    trajectory.push(p);
                }
                step_offset = trajectory.last().map(|p| p.step + 1).unwrap_or(0);
                let (fid, prob) = stage_metrics(&s.s, &d, hbar, &cutoffs, &outcomes, &target_vec)?;
                report.set_metric(&format!("stage{}_herald", stage_idx), n as f64);
                report.set_metric(&format!("stage{}_fidelity", stage_idx), fid);
                report.set_metric(&format!("stage{}_probability", stage_idx), prob);
            }
            Err(e) => {
                // keep earlier stages' progress and report the failure
                report
                    .notes
                    .push(format!("stage {} (herald {},{}) failed: {}", stage_idx, n, n, e));
            }
        }
    }

    let n_final = *config.schedule.last().unwrap();
    let cutoffs = vec![config.cutoff, n_final + 1, n_final + 1];
    let outcomes = vec![n_final, n_final];
    let (fid, prob) = stage_metrics(&s.s, &d, hbar, &cutoffs, &outcomes, &target_vec)?;
    report.set_metric("fidelity", fid);
    report.set_metric("probability", prob);
    report.trajectory = trajectory;
    report.solution_s = Some(matrix_rows(&s.s));
    report.solution_d = Some(d.to_vec());
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.validate()?;
    Ok(report)
}

fn stage_metrics(
    s: &Array2<f64>,
    d: &Array1<f64>,
    hbar: f64,
    cutoffs: &[usize],
    outcomes: &[usize],
    target: &Array1<C64>,
) -> Result<(f64, f64)> {
    let cov = s.dot(&s.t()).mapv(|x| 0.5 * hbar * x);
    let triple = pure_triple_unchecked(&cov, d, hbar)?;
    let tensor = hermite_renormalized(&triple, cutoffs)?;
    herald_metrics(&tensor, outcomes, target)
}

/// The published 3-mode solution: symplectic matrix rows followed by the x
/// and y displacement components of the three displacement gates.
pub const CUBIC_SOLUTION_S: [[f64; 6]; 6] = [
    [0.336437829, -0.587437101, 0.151967502, 2.011467789, 1.858626268, -1.401857238],
    [1.416888301, 0.409496273, 0.448704546, -1.759418716, -5.552019032, 2.056880833],
    [-0.477864655, 0.14143573, -2.111321823, -2.485020087, -4.623168982, 2.511539347],
    [-5.701053833, 1.587452315, 0.364136769, -1.343878855, 12.237643127, -2.543280972],
    [-2.302558433, 1.344598162, 0.378523959, -2.291630056, 3.35733036, 0.527469667],
    [-1.386435201, 0.479622105, -0.771833605, -1.523680547, 0.579084776, 0.246557173],
];
pub const CUBIC_SOLUTION_X: [f64; 3] = [-0.642981239, 2.326888363, 3.021233284];
pub const CUBIC_SOLUTION_Y: [f64; 3] = [2.266497837, -1.655566694, -2.858640664];

/// Reorders a matrix written in interleaved (x₁,p₁,x₂,p₂,…) convention into
/// the grouped (x₁,…,x_M,p₁,…,p_M) convention used throughout this crate.
fn interleaved_to_grouped(s: &Array2<f64>) -> Array2<f64> {
    let n = s.nrows();
    let m = n / 2;
    let perm: Vec<usize> = (0..m).map(|i| 2 * i).chain((0..m).map(|i| 2 * i + 1)).collect();
    Array2::from_shape_fn((n, n), |(i, j)| s[(perm[i], perm[j])])
}

pub fn verify_cubic_solution() -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let hbar = crate::hbar_from_env();
    let cutoff = 100usize;
    let herald = 16usize;

    let raw = Array2::from_shape_fn((6, 6), |(i, j)| CUBIC_SOLUTION_S[i][j]);
    let om = omega(3);
    let defect = |s: &Array2<f64>| {
        let d = s.dot(&om).dot(&s.t()) - &om;
        d.iter().map(|x| x * x).sum::<f64>().sqrt()
    };
    let defect_grouped = defect(&raw);
    let regrouped = interleaved_to_grouped(&raw);
    let defect_interleaved = defect(&regrouped);

    let mut report = ExperimentReport::new("verify-cubic", serde_json::json!({
        "cutoff": cutoff,
        "herald": herald,
        "hbar": hbar,
    }));
    report.set_metric("symplectic_defect_grouped", defect_grouped);
    report.set_metric("symplectic_defect_interleaved", defect_interleaved);

    let (s, convention) = if defect_grouped < 1e-3 {
        (raw, "grouped (x..x p..p)")
    } else if defect_interleaved < 1e-3 {
        (regrouped, "interleaved (xp xp xp), regrouped before use")
    } else {
        report.notes.push(format!(
            "published matrix is not symplectic under either quadrature ordering \
             (grouped defect {:.3e}, interleaved defect {:.3e}); no forward \
             simulation attempted",
            defect_grouped, defect_interleaved
        ));
        report.wall_time_s = start.elapsed().as_secs_f64();
        return Ok(report);
    };
    report.notes.push(format!(
        "published matrix is symplectic (defect {:.3e}) under the {} ordering",
        defect(&s),
        convention
    ));
    if !is_symplectic(&s, 1e-6) {
        report
            .notes
            .push("warning: defect exceeds the 1e-6 transcription bound".into());
    }

    let target = target_cubic(0.3, -1.0, cutoff, hbar)?;
    let target_vec = target
        .amps
        .into_shape(cutoff)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    let cutoffs = vec![cutoff, herald + 1, herald + 1];
    let outcomes = vec![herald, herald];

    // The displacement scale of the published (x, y) rows is resolved
    // empirically: quadrature means √(2ħ)(x, y) versus (x, y) directly.
    let mut best: Option<(f64, f64, f64, String)> = None;
    for (scale, label) in [((2.0 * hbar).sqrt(), "sqrt(2*hbar)*(x,y)"), (1.0, "(x,y)")] {
        let mut d = Array1::zeros(6);
        for i in 0..3 {
            d[i] = scale * CUBIC_SOLUTION_X[i];
            d[i + 3] = scale * CUBIC_SOLUTION_Y[i];
        }
        let (fid, prob) = stage_metrics(&s, &d, hbar, &cutoffs, &outcomes, &target_vec)?;
        report.set_metric(&format!("fidelity_scale_{}", if scale == 1.0 { "unit" } else { "sqrt2hbar" }), fid);
        report.set_metric(&format!("probability_scale_{}", if scale == 1.0 { "unit" } else { "sqrt2hbar" }), prob);
        if best.as_ref().map_or(true, |(f, _, _, _)| fid > *f) {
            best = Some((fid, prob, scale, label.to_string()));
        }
    }
    let (fid, prob, scale, label) = best.unwrap();
    report.set_metric("fidelity", fid);
    report.set_metric("probability", prob);
    report.set_metric("displacement_scale", scale);
    report
        .notes
        .push(format!("displacement interpretation chosen empirically: {}", label));
    if fid < 0.985 || !(2e-4..=2e-3).contains(&prob) {
        report.notes.push(format!(
            "forward simulation does not reproduce the published metrics \
             (fidelity {:.4}, probability {:.3e} vs expected ~0.99 / ~6e-4) under \
             either displacement convention; consider re-optimizing via cubic-prep",
            fid, prob
        ));
    }
    report.solution_s = Some(matrix_rows(&s));
    let mut d = Array1::zeros(6);
    for i in 0..3 {
        d[i] = scale * CUBIC_SOLUTION_X[i];
        d[i + 3] = scale * CUBIC_SOLUTION_Y[i];
    }
    report.solution_d = Some(d.to_vec());
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.validate()?;
    Ok(report)
}
