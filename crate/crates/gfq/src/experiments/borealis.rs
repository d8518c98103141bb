//! High-dimensional Gaussian-boson-sampling interferometers (Borealis-style)
//! and flattening of the output A matrix by gradient descent on the
//! beamsplitter/rotation angles.
//!
//! The circuit on M = d^D modes applies, for each layer τ ∈ {1, d, …,
//! d^{D−1}}, a local rotation on mode 0 followed by beamsplitters between
//! modes (i, i+τ) for every valid i; the beamsplitter phase is fixed at π/2.
//! All modes carry equal input squeezing r, so the output A matrix is
//! −tanh(r)·UUᵀ and the flatness cost acts on |A|² directly in phase space —
//! no Fock tensors are involved.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::C64;
use crate::opt::TrajectoryPoint;
use crate::{Error, Result};

use super::report::{histogram, ExperimentReport};

#[derive(Debug, Clone)]
pub struct BorealisCircuit {
    pub base: usize,
    pub depth: usize,
    /// Equal input squeezing on every mode.
    pub squeezing: f64,
    gates: Vec<Gate>,
    num_params: usize,
}

#[derive(Debug, Clone, Copy)]
enum Gate {
    /// e^{iφ} on mode 0; parameter index into the angle vector.
    Rotation { param: usize },
    /// Modes (a, b), phase fixed to π/2: [[cosθ, i sinθ], [i sinθ, cosθ]].
    Beamsplitter { a: usize, b: usize, param: usize },
}

impl BorealisCircuit {
    pub fn new(base: usize, depth: usize, squeezing: f64) -> Result<Self> {
        if base < 2 || depth < 1 {
            return Err(Error::InvalidArgument(
                "base must be ≥ 2 and depth ≥ 1".into(),
            ));
        }
        let m = base.pow(depth as u32);
        let mut gates = Vec::new();
        let mut param = 0usize;
        for layer in 0..depth {
            let tau = base.pow(layer as u32);
            gates.push(Gate::Rotation { param });
            param += 1;
            for i in 0..m - tau {
                gates.push(Gate::Beamsplitter {
                    a: i,
                    b: i + tau,
                    param,
                });
                param += 1;
            }
        }
        Ok(BorealisCircuit {
            base,
            depth,
            squeezing,
            gates,
            num_params: param,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.base.pow(self.depth as u32)
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    /// Interferometer matrix: ordered product of the embedded gates.
    pub fn unitary(&self, angles: &Array1<f64>) -> Result<Array2<C64>> {
        self.check_angles(angles)?;
        let m = self.num_modes();
        let mut u = crate::linalg::eye_c(m);
        for g in &self.gates {
            apply_gate_rows(&mut u, *g, angles);
        }
        Ok(u)
    }

    fn check_angles(&self, angles: &Array1<f64>) -> Result<()> {
        if angles.len() != self.num_params {
            return Err(Error::DimensionMismatch(format!(
                "expected {} angles, got {}",
                self.num_params,
                angles.len()
            )));
        }
        Ok(())
    }

    /// Columns a (and b for beamsplitters) of the product of gates strictly
    /// after `idx`, obtained by pushing basis vectors through the remaining
    /// gates.
    fn suffix_columns(&self, idx: usize, angles: &Array1<f64>, col: usize) -> Array1<C64> {
        let m = self.num_modes();
        let mut v = Array1::zeros(m);
        v[col] = C64::new(1.0, 0.0);
        for g in &self.gates[idx + 1..] {
            apply_gate_vec(&mut v, *g, angles);
        }
        v
    }

    /// Row `row` of the product of gates strictly before `idx`; both gate
    /// types are symmetric, so the transposed product is the reversed
    /// application of the same gates.
    fn prefix_row(&self, idx: usize, angles: &Array1<f64>, row: usize) -> Array1<C64> {
        let m = self.num_modes();
        let mut v = Array1::zeros(m);
        v[row] = C64::new(1.0, 0.0);
        for g in self.gates[..idx].iter().rev() {
            apply_gate_vec(&mut v, *g, angles);
        }
        v
    }
}

fn apply_gate_rows(u: &mut Array2<C64>, g: Gate, angles: &Array1<f64>) {
    let m = u.ncols();
    match g {
        Gate::Rotation { param } => {
            let ph = C64::from_polar(1.0, angles[param]);
            for j in 0..m {
                u[(0, j)] *= ph;
            }
        }
        Gate::Beamsplitter { a, b, param } => {
            let (s, c) = angles[param].sin_cos();
            let is = C64::new(0.0, s);
            for j in 0..m {
                let ra = u[(a, j)];
                let rb = u[(b, j)];
                u[(a, j)] = c * ra + is * rb;
                u[(b, j)] = is * ra + c * rb;
            }
        }
    }
}

fn apply_gate_vec(v: &mut Array1<C64>, g: Gate, angles: &Array1<f64>) {
    match g {
        Gate::Rotation { param } => {
            v[0] *= C64::from_polar(1.0, angles[param]);
        }
        Gate::Beamsplitter { a, b, param } => {
            let (s, c) = angles[param].sin_cos();
            let is = C64::new(0.0, s);
            let va = v[a];
            let vb = v[b];
            v[a] = c * va + is * vb;
            v[b] = is * va + c * vb;
        }
    }
}

/// A = −tanh(r)·UUᵀ, explicitly symmetrized.
pub fn build_borealis_a(circuit: &BorealisCircuit, angles: &Array1<f64>) -> Result<Array2<C64>> {
    let u = circuit.unitary(angles)?;
    Ok(a_from_u(&u, circuit.squeezing))
}

fn a_from_u(u: &Array2<C64>, squeezing: f64) -> Array2<C64> {
    let g = u.dot(&u.t());
    let scale = -squeezing.tanh();
    let sym = (&g + &g.t()).mapv(|x| 0.5 * scale * x);
    sym
}

/// Σᵢⱼ(|A|²ᵢⱼ − mean|A|²)², mean over all M² entries.
pub fn flatness_cost(a: &Array2<C64>) -> f64 {
    let n2 = (a.len()) as f64;
    let mean = a.iter().map(|x| x.norm_sqr()).sum::<f64>() / n2;
    a.iter()
        .map(|x| {
            let d = x.norm_sqr() - mean;
            d * d
        })
        .sum()
}

/// Flatness cost for angles(param `idx` shifted by `delta`) without
/// rebuilding UUᵀ: the perturbed unitary differs from U by a rank-≤2 update
/// P·ΔB·Q, so the Gram matrix correction is rank ≤ 4 and costs O(M²).
fn perturbed_cost(
    circuit: &BorealisCircuit,
    angles: &Array1<f64>,
    u: &Array2<C64>,
    gram: &Array2<C64>,
    gate_idx: usize,
    delta: f64,
) -> f64 {
    let g = circuit.gates[gate_idx];
    // ΔU = Σ_a u_a r_aᵀ
    let (us, rs): (Vec<Array1<C64>>, Vec<Array1<C64>>) = match g {
        Gate::Rotation { param } => {
            let old = C64::from_polar(1.0, angles[param]);
            let new = C64::from_polar(1.0, angles[param] + delta);
            let col = circuit.suffix_columns(gate_idx, angles, 0);
            let row = circuit.prefix_row(gate_idx, angles, 0).mapv(|x| (new - old) * x);
            (vec![col], vec![row])
        }
        Gate::Beamsplitter { a, b, param } => {
            let (s0, c0) = angles[param].sin_cos();
            let (s1, c1) = (angles[param] + delta).sin_cos();
            let dc = C64::new(c1 - c0, 0.0);
            let ds = C64::new(0.0, s1 - s0);
            let pa = circuit.suffix_columns(gate_idx, angles, a);
            let pb = circuit.suffix_columns(gate_idx, angles, b);
            let qa = circuit.prefix_row(gate_idx, angles, a);
            let qb = circuit.prefix_row(gate_idx, angles, b);
            let ra = &qa.mapv(|x| dc * x) + &qb.mapv(|x| ds * x);
            let rb = &qa.mapv(|x| ds * x) + &qb.mapv(|x| dc * x);
            (vec![pa, pb], vec![ra, rb])
        }
    };
    // G± = G + Σ_a (U r_a) u_aᵀ + Σ_a u_a (U r_a)ᵀ + Σ_ab (r_a·r_b) u_a u_bᵀ
    let ur: Vec<Array1<C64>> = rs.iter().map(|r| u.dot(r)).collect();
    let rr: Vec<Vec<C64>> = rs
        .iter()
        .map(|ra| rs.iter().map(|rb| ra.dot(rb)).collect())
        .collect();
    let m = u.nrows();
    let scale = -circuit.squeezing.tanh();
    let mut sum_sq = 0.0;
    let mut sum_quad = 0.0;
    let n2 = (m * m) as f64;
    for i in 0..m {
        for j in 0..m {
            let mut gij = gram[(i, j)];
            for a in 0..us.len() {
                gij += ur[a][i] * us[a][j] + us[a][i] * ur[a][j];
                for b in 0..us.len() {
                    gij += rr[a][b] * us[a][i] * us[b][j];
                }
            }
            let v = (scale * gij).norm_sqr();
            sum_sq += v;
            sum_quad += v * v;
        }
    }
    // Σ(v − mean)² = Σv² − (Σv)²/N
    sum_quad - sum_sq * sum_sq / n2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbsConfig {
    pub base: usize,
    pub depth: usize,
    pub steps: usize,
    pub lr: f64,
    pub seed: u64,
    #[serde(default = "default_squeezing")]
    pub squeezing: f64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    /// Optional wall-clock budget; the descent loop stops once exceeded.
    #[serde(default)]
    pub max_seconds: Option<f64>,
}

fn default_squeezing() -> f64 {
    1.0_f64.asinh()
}

fn default_fd_step() -> f64 {
    1e-5
}

impl Default for GbsConfig {
    fn default() -> Self {
        GbsConfig {
            base: 3,
            depth: 2,
            steps: 200,
            lr: 0.005,
            seed: 7,
            squeezing: default_squeezing(),
            fd_step: default_fd_step(),
            max_seconds: None,
        }
    }
}

/// Central finite-difference gradient of the flatness cost over all angles,
/// evaluated in parallel with a deterministic (index-ordered) reduction.
pub fn flatness_gradient(
    circuit: &BorealisCircuit,
    angles: &Array1<f64>,
    h: f64,
) -> Result<Array1<f64>> {
    let u = circuit.unitary(angles)?;
    let gram = u.dot(&u.t());
    let mut per_gate: Vec<(usize, usize)> = Vec::new();
    for (gi, g) in circuit.gates.iter().enumerate() {
        let p = match g {
            Gate::Rotation { param } => *param,
            Gate::Beamsplitter { param, .. } => *param,
        };
        per_gate.push((gi, p));
    }
    let entries: Vec<(usize, f64)> = per_gate
        .par_iter()
        .map(|&(gi, p)| {
            let plus = perturbed_cost(circuit, angles, &u, &gram, gi, h);
            let minus = perturbed_cost(circuit, angles, &u, &gram, gi, -h);
            (p, (plus - minus) / (2.0 * h))
        })
        .collect();
    let mut grad = Array1::zeros(circuit.num_params);
    for (p, g) in entries {
        grad[p] += g;
    }
    Ok(grad)
}

pub fn run_gbs_flatten(config: &GbsConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let circuit = BorealisCircuit::new(config.base, config.depth, config.squeezing)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut angles = Array1::from_shape_fn(circuit.num_params(), |_| {
        rng.gen_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2)
    });
    let initial_angles = angles.clone();

    let a0 = build_borealis_a(&circuit, &angles)?;
    let initial_cost = flatness_cost(&a0);
    let initial_sq: Vec<f64> = a0.iter().map(|x| x.norm_sqr()).collect();

    let mut trajectory = vec![TrajectoryPoint {
        step: 0,
        cost: initial_cost,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    }];
    for step in 1..=config.steps {
        if let Some(budget) = config.max_seconds {
            if start.elapsed().as_secs_f64() > budget {
                break;
            }
        }
        let grad = flatness_gradient(&circuit, &angles, config.fd_step)?;
        angles = &angles - &grad.mapv(|x| config.lr * x);
        let cost = flatness_cost(&build_borealis_a(&circuit, &angles)?);
        if !cost.is_finite() {
            return Err(Error::Numerical(format!(
                "flatness cost became non-finite at step {}",
                step
            )));
        }
        trajectory.push(TrajectoryPoint {
            step,
            cost,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }

    let a1 = build_borealis_a(&circuit, &angles)?;
    let final_cost = flatness_cost(&a1);
    let final_sq: Vec<f64> = a1.iter().map(|x| x.norm_sqr()).collect();

    let mut report = ExperimentReport::new(
        "gbs-flatten",
        serde_json::to_value(config).map_err(|e| Error::Numerical(e.to_string()))?,
    );
    report.set_metric("num_modes", circuit.num_modes() as f64);
    report.set_metric("num_params", circuit.num_params() as f64);
    report.set_metric("initial_cost", initial_cost);
    report.set_metric("final_cost", final_cost);
    report.set_metric("cost_reduction", 1.0 - final_cost / initial_cost);
    report.trajectory = trajectory;
    report.solution_d = Some(angles.to_vec());
    report.notes.push(
        "solution_d holds the optimized angle vector (per-layer rotation followed by \
         beamsplitter transmission angles)"
            .into(),
    );
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.set_metric("initial_sq_mean", mean(&initial_sq));
    report.set_metric("final_sq_mean", mean(&final_sq));
    report.extra = Some(serde_json::json!({
        "initial_angles": initial_angles.to_vec(),
    }));
    report.validate()?;
    Ok(report)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// 64-bin before/after histograms of |A|² entries over a shared range.
pub fn histogram_series(
    circuit_cfg: &GbsConfig,
    angles_before: &Array1<f64>,
    angles_after: &Array1<f64>,
) -> Result<(Vec<f64>, Vec<(String, Vec<usize>)>)> {
    let circuit = BorealisCircuit::new(circuit_cfg.base, circuit_cfg.depth, circuit_cfg.squeezing)?;
    let before: Vec<f64> = build_borealis_a(&circuit, angles_before)?
        .iter()
        .map(|x| x.norm_sqr())
        .collect();
    let after: Vec<f64> = build_borealis_a(&circuit, angles_after)?
        .iter()
        .map(|x| x.norm_sqr())
        .collect();
    let all: Vec<f64> = before.iter().chain(after.iter()).cloned().collect();
    let (edges, _) = histogram(&all, 64);
    let width = edges[1] - edges[0];
    let count = |vals: &[f64]| {
        let mut c = vec![0usize; 64];
        for &v in vals {
            c[((v / width) as usize).min(63)] += 1;
        }
        c
    };
    Ok((
        edges,
        vec![
            ("initial".to_string(), count(&before)),
            ("final".to_string(), count(&after)),
        ],
    ))
}
