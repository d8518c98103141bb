//! Riemannian optimization on the symplectic group Sp(2n,ℝ) and the unitary
//! group U(n): tangent-space gradients, geodesic update steps, plain
//! Euclidean steps for displacement vectors, and a generic descent loop for
//! cost functions built on Fock amplitudes of parametrized Gaussian objects.
//!
//! Gradient conventions. For a real cost L, `euclid_grad` on Sp is the plain
//! matrix of partials ∂L/∂S_ij. On U(n) it is the Wirtinger conjugate
//! gradient ∂L/∂M* (the steepest-ascent direction), so that
//! dL = 2 Re tr(∂L† dM). Upstream cotangents u_k = ∂L/∂𝒢_k feeding
//! [`crate::fock::fock_vjp`] follow the same convention: dL/dθ = 2 Re[Σ_k u_k ∂𝒢_k/∂θ].

use ndarray::{Array1, Array2, ArrayD};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::bargmann::pure_triple_unchecked;
use crate::fock::{fock_vjp, hermite_renormalized, FockTensor};
use crate::linalg::{self, C64};
use crate::phase_space::{is_symplectic, omega};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymplecticPoint {
    pub s: Array2<f64>,
}

impl SymplecticPoint {
    pub fn new(s: Array2<f64>) -> Result<Self> {
        if !is_symplectic(&s, 1e-8) {
            return Err(Error::ConstraintViolation(
                "matrix is not symplectic to 1e-8".into(),
            ));
        }
        Ok(SymplecticPoint { s })
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryPoint {
    pub m: Array2<C64>,
}

impl UnitaryPoint {
    pub fn new(m: Array2<C64>) -> Result<Self> {
        let n = m.nrows();
        let defect =
            linalg::frobenius_norm(&(m.t().mapv(|x| x.conj()).dot(&m) - linalg::eye_c(n)));
        if defect > 1e-8 {
            return Err(Error::ConstraintViolation(format!(
                "matrix is not unitary (defect {:.2e})",
                defect
            )));
        }
        Ok(UnitaryPoint { m })
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Geodesic learning rate t on the group manifold.
    pub symplectic_lr: f64,
    /// Plain gradient-descent rate for displacement parameters.
    pub euclidean_lr: f64,
    pub max_steps: usize,
    pub seed: u64,
    /// Central-difference step for the triple-map Jacobian.
    pub fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            symplectic_lr: 0.2,
            euclidean_lr: 0.05,
            max_steps: 150,
            seed: 7,
            fd_step: 1e-6,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.symplectic_lr <= 0.0 || self.euclidean_lr <= 0.0 || self.fd_step <= 0.0 {
            return Err(Error::InvalidArgument(
                "learning rates and fd_step must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// ∇L = (S/2)(Z + ΩZᵀΩ) with Z = Sᵀ∂L; lies in the tangent space at S.
pub fn riemannian_grad_sp(s: &Array2<f64>, euclid_grad: &Array2<f64>) -> Array2<f64> {
    let om = omega(s.nrows() / 2);
    let z = s.t().dot(euclid_grad);
    let sym = &z + &om.dot(&z.t()).dot(&om);
    s.dot(&sym).mapv(|x| 0.5 * x)
}

/// ∇L = (M/2)(Z − Z†) with Z = M†∂L; M†∇L is skew-Hermitian.
pub fn riemannian_grad_u(m: &Array2<C64>, euclid_grad: &Array2<C64>) -> Array2<C64> {
    let z = m.t().mapv(|x| x.conj()).dot(euclid_grad);
    let skew = &z - &z.t().mapv(|x| x.conj());
    m.dot(&skew).mapv(|x| 0.5 * x)
}

/// One geodesic descent step on Sp(2n): S ← S e^{−tY} e^{−t(Y−Yᵀ)} with
/// Y = ½(Z + ΩZᵀΩ), Z = Sᵀ∂L.
pub fn geodesic_step_sp(
    s: &SymplecticPoint,
    euclid_grad: &Array2<f64>,
    t: f64,
) -> Result<SymplecticPoint> {
    let om = omega(s.s.nrows() / 2);
    let z = s.s.t().dot(euclid_grad);
    let y = (&z + &om.dot(&z.t()).dot(&om)).mapv(|x| 0.5 * x);
    let e1 = linalg::expm_real(&y.mapv(|x| -t * x))?;
    let skew = (&y - &y.t()).mapv(|x| -t * x);
    let e2 = linalg::expm_real(&skew)?;
    let out = s.s.dot(&e1).dot(&e2);
    SymplecticPoint::new(out).map_err(|_| {
        Error::Numerical("geodesic update left the symplectic manifold (expm accuracy)".into())
    })
}

/// One geodesic descent step on U(n): M ← M e^{−tY}, Y = ½(Z − Z†), Z = M†∂L.
pub fn geodesic_step_u(
    m: &UnitaryPoint,
    euclid_grad: &Array2<C64>,
    t: f64,
) -> Result<UnitaryPoint> {
    let z = m.m.t().mapv(|x| x.conj()).dot(euclid_grad);
    let y = (&z - &z.t().mapv(|x| x.conj())).mapv(|x| 0.5 * x);
    let e = linalg::expm(&y.mapv(|x| -t * x))?;
    let out = m.m.dot(&e);
    UnitaryPoint::new(out)
        .map_err(|_| Error::Numerical("geodesic update left the unitary manifold".into()))
}

pub fn euclidean_step(d: &Array1<f64>, grad: &Array1<f64>, lr: f64) -> Array1<f64> {
    d - &grad.mapv(|x| lr * x)
}

/// Matrix exponential (alias into the linear-algebra kernels).
pub fn matrix_exp(a: &Array2<C64>) -> Result<Array2<C64>> {
    linalg::expm(a)
}

/// Random symplectic S = exp(ΩA) with A symmetric, entries N(0, 0.25).
pub fn random_symplectic<R: Rng>(num_modes: usize, rng: &mut R) -> Result<SymplecticPoint> {
    let n = 2 * num_modes;
    let dist = Normal::new(0.0, 0.25).unwrap();
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let v = dist.sample(rng);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let s = linalg::expm_real(&omega(num_modes).dot(&a))?;
    SymplecticPoint::new(s)
}

/// A cost over a symplectic point and a displacement vector, returning the
/// cost value with its Euclidean gradients.
pub trait OptimizationProblem {
    fn cost_grad(&self, s: &Array2<f64>, d: &Array1<f64>) -> Result<(f64, Array2<f64>, Array1<f64>)>;
    fn train_displacement(&self) -> bool {
        false
    }
}

type CostUpstream = dyn Fn(&FockTensor) -> Result<(f64, ArrayD<C64>)> + Sync;

/// A cost over the Fock ket of the pure state S·|vac⟩ displaced by d. The
/// heavy tensor generation is differentiated analytically (the VJP); only
/// the small triple map (S, d) → (A, b, c) uses central finite differences.
pub struct FockProblem {
    pub cutoffs: Vec<usize>,
    pub hbar: f64,
    pub fd_step: f64,
    pub train_displacement: bool,
    /// Maps the generated ket to (cost, upstream ∂L/∂𝒢_k in the Wirtinger
    /// convention of the module docs).
    pub cost_and_upstream: Box<CostUpstream>,
}

impl FockProblem {
    fn triple_of(&self, s: &Array2<f64>, d: &Array1<f64>) -> Result<crate::bargmann::BargmannTriple> {
        let cov = s.dot(&s.t()).mapv(|x| 0.5 * self.hbar * x);
        pure_triple_unchecked(&cov, d, self.hbar)
    }
}

impl OptimizationProblem for FockProblem {
    fn cost_grad(
        &self,
        s: &Array2<f64>,
        d: &Array1<f64>,
    ) -> Result<(f64, Array2<f64>, Array1<f64>)> {
        let n = s.nrows();
        let triple = self.triple_of(s, d)?;
        let tensor = hermite_renormalized(&triple, &self.cutoffs)?;
        let (cost, upstream) = (self.cost_and_upstream)(&tensor)?;
        if !cost.is_finite() {
            return Err(Error::Numerical("non-finite cost".into()));
        }
        let grad = fock_vjp(&triple, &tensor, &upstream)?;

        let h = self.fd_step;
        let contract = |tp: &crate::bargmann::BargmannTriple,
                        tm: &crate::bargmann::BargmannTriple|
         -> f64 {
            let inv2h = 1.0 / (2.0 * h);
            let mut acc = grad.dc * ((tp.c - tm.c) * inv2h);
            for i in 0..triple.dim() {
                acc += grad.db[i] * ((tp.b[i] - tm.b[i]) * inv2h);
                for j in 0..triple.dim() {
                    acc += grad.da[(i, j)] * ((tp.a[(i, j)] - tm.a[(i, j)]) * inv2h);
                }
            }
            2.0 * acc.re
        };

        let mut ds = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut sp = s.clone();
                sp[(i, j)] += h;
                let mut sm = s.clone();
                sm[(i, j)] -= h;
                let tp = self.triple_of(&sp, d)?;
                let tm = self.triple_of(&sm, d)?;
                ds[(i, j)] = contract(&tp, &tm);
            }
        }
        let mut dd = Array1::zeros(n);
        if self.train_displacement {
            for i in 0..n {
                let mut dp = d.clone();
                dp[i] += h;
                let mut dm = d.clone();
                dm[i] -= h;
                let tp = self.triple_of(s, &dp)?;
                let tm = self.triple_of(s, &dm)?;
                dd[i] = contract(&tp, &tm);
            }
        }
        Ok((cost, ds, dd))
    }

    fn train_displacement(&self) -> bool {
        self.train_displacement
    }
}

/// Chains (i) the cost-to-amplitude upstream, (ii) the analytic tensor VJP
/// and (iii) the finite-difference triple-map Jacobian for a Fock problem.
pub fn euclidean_cost_grad(
    problem: &dyn OptimizationProblem,
    s: &Array2<f64>,
    d: &Array1<f64>,
) -> Result<(Array2<f64>, Array1<f64>)> {
    let (_, ds, dd) = problem.cost_grad(s, d)?;
    Ok((ds, dd))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub cost: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct OptRun {
    pub trajectory: Vec<TrajectoryPoint>,
    pub s: Array2<f64>,
    pub d: Array1<f64>,
    pub cost: f64,
}

/// Plain geodesic descent with fixed learning rates; stops at `max_steps` or
/// once |Δcost| < 1e−9 for 20 consecutive steps.
pub fn optimize(
    problem: &dyn OptimizationProblem,
    s0: SymplecticPoint,
    d0: Array1<f64>,
    config: &OptimizerConfig,
) -> Result<OptRun> {
    config.validate()?;
    let start = std::time::Instant::now();
    let mut s = s0;
    let mut d = d0;
    let mut trajectory = Vec::new();
    let mut prev_cost = f64::INFINITY;
    let mut flat_steps = 0usize;
    let mut last_cost = f64::NAN;
    for step in 0..config.max_steps {
        let (cost, ds, dd) = problem.cost_grad(&s.s, &d)?;
        if !cost.is_finite() {
            return Err(Error::Numerical(format!(
                "cost became non-finite at step {} (last finite cost {:.6e})",
                step, prev_cost
            )));
        }
        trajectory.push(TrajectoryPoint {
            step,
            cost,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        last_cost = cost;
        if (prev_cost - cost).abs() < 1e-9 {
            flat_steps += 1;
            if flat_steps >= 20 {
                break;
            }
        } else {
            flat_steps = 0;
        }
        prev_cost = cost;
        s = geodesic_step_sp(&s, &ds, config.symplectic_lr)?;
        if problem.train_displacement() {
            d = euclidean_step(&d, &dd, config.euclidean_lr);
        }
    }
    Ok(OptRun {
        trajectory,
        s: s.s,
        d,
        cost: last_cost,
    })
}
