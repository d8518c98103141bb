//! Phase-space representation of Gaussian objects: states as (covariance,
//! mean) pairs in xxpp quadrature ordering, unitaries as (S, d), channels as
//! (X, Y, d), the quadrature ↔ complex (annihilation-operator) basis change,
//! and the standard gate/channel constructors.

use ndarray::{s, Array1, Array2};

use crate::linalg::{self, C64};
use crate::{Error, Result};

/// The symplectic form Ω = [[0, I], [−I, 0]] on M modes in xxpp ordering.
pub fn omega(num_modes: usize) -> Array2<f64> {
    let m = num_modes;
    let mut w = Array2::zeros((2 * m, 2 * m));
    for i in 0..m {
        w[(i, m + i)] = 1.0;
        w[(m + i, i)] = -1.0;
    }
    w
}

/// The unitary W = (1/√2) [[I, I], [−iI, iI]] relating quadratures to the
/// (z, z*) doubled complex basis.
pub fn w_matrix(num_modes: usize) -> Array2<C64> {
    let m = num_modes;
    let f = 1.0 / 2f64.sqrt();
    let mut w = Array2::zeros((2 * m, 2 * m));
    for i in 0..m {
        w[(i, i)] = C64::new(f, 0.0);
        w[(i, m + i)] = C64::new(f, 0.0);
        w[(m + i, i)] = C64::new(0.0, -f);
        w[(m + i, m + i)] = C64::new(0.0, f);
    }
    w
}

fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|x| x.conj())
}

#[derive(Debug, Clone)]
pub struct GaussianState {
    pub num_modes: usize,
    /// Real symmetric 2M×2M covariance matrix in units of ħ, xxpp ordering.
    pub cov: Array2<f64>,
    /// Real 2M mean vector.
    pub mean: Array1<f64>,
    pub hbar: f64,
}

impl GaussianState {
    pub fn new(cov: Array2<f64>, mean: Array1<f64>, hbar: f64) -> Result<Self> {
        if hbar <= 0.0 {
            return Err(Error::InvalidArgument("hbar must be positive".into()));
        }
        let n = cov.nrows();
        if cov.ncols() != n || n == 0 || n % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be 2M x 2M, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "mean length {} does not match covariance size {}",
                mean.len(),
                n
            )));
        }
        let m = n / 2;
        let sym_defect = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (cov[(i, j)] - cov[(j, i)]).abs())
            .fold(0.0f64, f64::max);
        if sym_defect > 1e-9 {
            return Err(Error::ConstraintViolation(format!(
                "covariance asymmetry {:.2e}",
                sym_defect
            )));
        }
        // uncertainty relation: V + i(ħ/2)Ω ⪰ 0
        let om = omega(m);
        let mut h = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = C64::new(cov[(i, j)], 0.5 * hbar * om[(i, j)]);
            }
        }
        let min_ev = linalg::min_hermitian_eigval(&h)?;
        if min_ev < -1e-9 * hbar.max(1.0) {
            return Err(Error::ConstraintViolation(format!(
                "uncertainty relation violated: min eig {:.3e}",
                min_ev
            )));
        }
        Ok(GaussianState {
            num_modes: m,
            cov,
            mean,
            hbar,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ComplexState {
    /// Complex Hermitian 2M×2M covariance σ = (1/ħ) W† V W.
    pub sigma: Array2<C64>,
    /// Complex 2M mean μ̄ = (1/√ħ) W† r̄; the second half is the conjugate of
    /// the first.
    pub mu: Array1<C64>,
}

pub fn vacuum(num_modes: usize, hbar: f64) -> Result<GaussianState> {
    if num_modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let n = 2 * num_modes;
    GaussianState::new(
        Array2::from_diag_elem(n, hbar / 2.0),
        Array1::zeros(n),
        hbar,
    )
}

/// Single-mode thermal state with mean photon number n̄: V = ħ(n̄ + ½) I₂.
pub fn thermal(nbar: f64, hbar: f64) -> Result<GaussianState> {
    if nbar < 0.0 {
        return Err(Error::InvalidArgument(
            "mean photon number must be non-negative".into(),
        ));
    }
    GaussianState::new(
        Array2::from_diag_elem(2, hbar * (nbar + 0.5)),
        Array1::zeros(2),
        hbar,
    )
}

pub fn quad_to_complex(state: &GaussianState) -> ComplexState {
    let m = state.num_modes;
    let w = w_matrix(m);
    let wd = dagger(&w);
    let vc = linalg::to_complex(&state.cov);
    let sigma = wd.dot(&vc).dot(&w).mapv(|x| x / state.hbar);
    let rc = state.mean.mapv(|x| C64::new(x, 0.0));
    let mu = wd.dot(&rc).mapv(|x| x / state.hbar.sqrt());
    ComplexState { sigma, mu }
}

/// Inverse of [`quad_to_complex`]: V = ħ W σ W†, r̄ = √ħ W μ̄ (real parts;
/// imaginary residues are roundoff by construction).
pub fn complex_to_quad(cs: &ComplexState, hbar: f64) -> Result<GaussianState> {
    let n = cs.sigma.nrows();
    if n == 0 || n % 2 != 0 || cs.mu.len() != n {
        return Err(Error::DimensionMismatch(
            "complex state must have 2M x 2M sigma and 2M mu".into(),
        ));
    }
    let m = n / 2;
    let w = w_matrix(m);
    let wd = dagger(&w);
    let v = w.dot(&cs.sigma).dot(&wd).mapv(|x| x.re * hbar);
    let r = w.dot(&cs.mu).mapv(|x| x.re * hbar.sqrt());
    GaussianState::new(v, r, hbar)
}

#[derive(Debug, Clone)]
pub struct GaussianUnitary {
    /// Real symplectic 2M×2M matrix.
    pub s: Array2<f64>,
    /// Real 2M displacement, units of √ħ.
    pub d: Array1<f64>,
    pub hbar: f64,
}

impl GaussianUnitary {
    pub fn new(s: Array2<f64>, d: Array1<f64>, hbar: f64) -> Result<Self> {
        let n = s.nrows();
        if s.ncols() != n || n == 0 || n % 2 != 0 || d.len() != n {
            return Err(Error::DimensionMismatch(
                "unitary needs square 2M x 2M S and matching d".into(),
            ));
        }
        if !is_symplectic(&s, 1e-9) {
            return Err(Error::ConstraintViolation(
                "S is not symplectic to 1e-9".into(),
            ));
        }
        Ok(GaussianUnitary { s, d, hbar })
    }

    pub fn num_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn identity(num_modes: usize, hbar: f64) -> Self {
        GaussianUnitary {
            s: Array2::eye(2 * num_modes),
            d: Array1::zeros(2 * num_modes),
            hbar,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaussianChannel {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub d: Array1<f64>,
    pub hbar: f64,
}

impl GaussianChannel {
    pub fn new(x: Array2<f64>, y: Array2<f64>, d: Array1<f64>, hbar: f64) -> Result<Self> {
        let n = x.nrows();
        if x.ncols() != n || n == 0 || n % 2 != 0 || y.nrows() != n || y.ncols() != n || d.len() != n
        {
            return Err(Error::DimensionMismatch(
                "channel needs 2M x 2M X and Y and a 2M d".into(),
            ));
        }
        let m = n / 2;
        let om = omega(m);
        // complete positivity: Y + i(ħ/2)(Ω − XΩXᵀ) ⪰ 0
        let xox = x.dot(&om).dot(&x.t());
        let mut h = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let ys = 0.5 * (y[(i, j)] + y[(j, i)]);
                h[(i, j)] = C64::new(ys, 0.5 * hbar * (om[(i, j)] - xox[(i, j)]));
            }
        }
        let min_ev = linalg::min_hermitian_eigval(&h)?;
        if min_ev < -1e-9 * hbar.max(1.0) {
            return Err(Error::ConstraintViolation(format!(
                "channel CP condition violated: min eig {:.3e}",
                min_ev
            )));
        }
        Ok(GaussianChannel { x, y, d, hbar })
    }

    pub fn num_modes(&self) -> usize {
        self.x.nrows() / 2
    }

    /// Lossless embedding of a Gaussian unitary as a channel (X = S, Y = 0).
    pub fn from_unitary(u: &GaussianUnitary) -> Self {
        let n = u.s.nrows();
        GaussianChannel {
            x: u.s.clone(),
            y: Array2::zeros((n, n)),
            d: u.d.clone(),
            hbar: u.hbar,
        }
    }
}

pub fn displacement_gate(gamma: &[C64], hbar: f64) -> GaussianUnitary {
    let m = gamma.len();
    let mut d = Array1::zeros(2 * m);
    let f = (2.0 * hbar).sqrt();
    for (i, g) in gamma.iter().enumerate() {
        d[i] = f * g.re;
        d[m + i] = f * g.im;
    }
    GaussianUnitary {
        s: Array2::eye(2 * m),
        d,
        hbar,
    }
}

/// Single-mode rotation S = [[cos φ, −sin φ], [sin φ, cos φ]].
pub fn rotation_gate(phi: f64, hbar: f64) -> GaussianUnitary {
    let s = ndarray::array![[phi.cos(), -phi.sin()], [phi.sin(), phi.cos()]];
    GaussianUnitary {
        s,
        d: Array1::zeros(2),
        hbar,
    }
}

/// Single-mode squeezer S = S_rot(δ/2) diag(e^{−r}, e^{r}) S_rot(δ/2)ᵀ.
pub fn squeezer_gate(r: f64, delta: f64, hbar: f64) -> GaussianUnitary {
    let rot = rotation_gate(delta / 2.0, hbar).s;
    let sq = Array2::from_diag(&ndarray::array![(-r).exp(), r.exp()]);
    let s = rot.dot(&sq).dot(&rot.t());
    GaussianUnitary {
        s,
        d: Array1::zeros(2),
        hbar,
    }
}

/// S = [[Re U, −Im U], [Im U, Re U]] for a complex M×M unitary U.
pub fn interferometer_gate(u: &Array2<C64>, hbar: f64) -> Result<GaussianUnitary> {
    let m = u.nrows();
    if u.ncols() != m || m == 0 {
        return Err(Error::DimensionMismatch(
            "interferometer matrix must be square".into(),
        ));
    }
    let defect = linalg::frobenius_norm(&(dagger(u).dot(u) - linalg::eye_c(m)));
    if defect > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "interferometer matrix is not unitary (defect {:.2e})",
            defect
        )));
    }
    let mut s = Array2::zeros((2 * m, 2 * m));
    for i in 0..m {
        for j in 0..m {
            s[(i, j)] = u[(i, j)].re;
            s[(i, m + j)] = -u[(i, j)].im;
            s[(m + i, j)] = u[(i, j)].im;
            s[(m + i, m + j)] = u[(i, j)].re;
        }
    }
    Ok(GaussianUnitary {
        s,
        d: Array1::zeros(2 * m),
        hbar,
    })
}

/// The 2×2 beamsplitter matrix [[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]].
pub fn beamsplitter_unitary(theta: f64, phi: f64) -> Array2<C64> {
    let (st, ct) = (theta.sin(), theta.cos());
    ndarray::array![
        [C64::new(ct, 0.0), -C64::from_polar(st, -phi)],
        [C64::from_polar(st, phi), C64::new(ct, 0.0)]
    ]
}

pub fn loss_channel(eta: f64, hbar: f64) -> Result<GaussianChannel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!(
            "transmission eta = {} outside [0, 1]",
            eta
        )));
    }
    Ok(GaussianChannel {
        x: Array2::from_diag_elem(2, eta.sqrt()),
        y: Array2::from_diag_elem(2, 0.5 * hbar * (1.0 - eta)),
        d: Array1::zeros(2),
        hbar,
    })
}

pub fn amplifier_channel(g: f64, hbar: f64) -> Result<GaussianChannel> {
    if g < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "amplifier gain g = {} must be >= 1",
            g
        )));
    }
    Ok(GaussianChannel {
        x: Array2::from_diag_elem(2, g.sqrt()),
        y: Array2::from_diag_elem(2, 0.5 * hbar * (g - 1.0)),
        d: Array1::zeros(2),
        hbar,
    })
}

/// Lossy interferometer with transmission matrix T (singular values ≤ 1):
/// X is the quadrature embedding of T and Y = (ħ/2)(I − XXᵀ).
pub fn lossy_interferometer_channel(t: &Array2<C64>, hbar: f64) -> Result<GaussianChannel> {
    let m = t.nrows();
    if t.ncols() != m || m == 0 {
        return Err(Error::DimensionMismatch(
            "transmission matrix must be square".into(),
        ));
    }
    let gram = dagger(t).dot(t);
    let top = linalg::hermitian_eigvals(&gram)?
        .into_iter()
        .fold(0.0f64, f64::max);
    if top > 1.0 + 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "transmission matrix has singular value {:.6} > 1",
            top.sqrt()
        )));
    }
    let mut x = Array2::zeros((2 * m, 2 * m));
    for i in 0..m {
        for j in 0..m {
            x[(i, j)] = t[(i, j)].re;
            x[(i, m + j)] = -t[(i, j)].im;
            x[(m + i, j)] = t[(i, j)].im;
            x[(m + i, m + j)] = t[(i, j)].re;
        }
    }
    let y = (Array2::eye(2 * m) - x.dot(&x.t())).mapv(|v: f64| 0.5 * hbar * v);
    Ok(GaussianChannel {
        x,
        y,
        d: Array1::zeros(2 * m),
        hbar,
    })
}

pub fn apply_unitary(state: &GaussianState, u: &GaussianUnitary) -> Result<GaussianState> {
    if u.s.nrows() != 2 * state.num_modes {
        return Err(Error::DimensionMismatch(format!(
            "unitary on {} modes applied to {}-mode state",
            u.s.nrows() / 2,
            state.num_modes
        )));
    }
    GaussianState::new(
        u.s.dot(&state.cov).dot(&u.s.t()),
        u.s.dot(&state.mean) + &u.d,
        state.hbar,
    )
}

pub fn apply_channel(state: &GaussianState, c: &GaussianChannel) -> Result<GaussianState> {
    if c.x.nrows() != 2 * state.num_modes {
        return Err(Error::DimensionMismatch(format!(
            "channel on {} modes applied to {}-mode state",
            c.x.nrows() / 2,
            state.num_modes
        )));
    }
    GaussianState::new(
        c.x.dot(&state.cov).dot(&c.x.t()) + &c.y,
        c.x.dot(&state.mean) + &c.d,
        state.hbar,
    )
}

pub fn is_symplectic(s: &Array2<f64>, tol: f64) -> bool {
    let n = s.nrows();
    if s.ncols() != n || n % 2 != 0 {
        return false;
    }
    let om = omega(n / 2);
    let defect = s.dot(&om).dot(&s.t()) - &om;
    linalg::frobenius_norm_real(&defect) < tol
}

/// Purity (ħ/2)^M / √det V; equals 1 iff the state is pure.
pub fn purity(state: &GaussianState) -> Result<f64> {
    let d = linalg::det(&linalg::to_complex(&state.cov), "purity determinant")?;
    if d.re <= 0.0 {
        return Err(Error::SingularMatrix("purity determinant"));
    }
    Ok((state.hbar / 2.0).powi(state.num_modes as i32) / d.re.sqrt())
}

pub fn is_pure(state: &GaussianState) -> Result<bool> {
    Ok((purity(state)? - 1.0).abs() < 1e-6)
}

/// Two-mode squeezer S(r) in xxpp ordering: hyperbolic mixing of the two
/// position quadratures and the opposite-sign mixing of the momenta.
pub fn two_mode_squeezer(r: f64, hbar: f64) -> GaussianUnitary {
    let (ch, sh) = (r.cosh(), r.sinh());
    let s = ndarray::array![
        [ch, sh, 0.0, 0.0],
        [sh, ch, 0.0, 0.0],
        [0.0, 0.0, ch, -sh],
        [0.0, 0.0, -sh, ch]
    ];
    GaussianUnitary {
        s,
        d: Array1::zeros(4),
        hbar,
    }
}

/// Embeds a single-mode symplectic acting on `mode` into an M-mode identity.
pub fn embed_single_mode(s1: &Array2<f64>, mode: usize, num_modes: usize) -> Array2<f64> {
    let mut s = Array2::eye(2 * num_modes);
    s[(mode, mode)] = s1[(0, 0)];
    s[(mode, num_modes + mode)] = s1[(0, 1)];
    s[(num_modes + mode, mode)] = s1[(1, 0)];
    s[(num_modes + mode, num_modes + mode)] = s1[(1, 1)];
    s
}

/// Direct sum of per-mode single-mode symplectics in xxpp ordering.
pub fn direct_sum_single_modes(blocks: &[Array2<f64>]) -> Array2<f64> {
    let m = blocks.len();
    let mut s = Array2::eye(2 * m);
    for (i, b) in blocks.iter().enumerate() {
        s.slice_mut(s![i..=i, i..=i]).fill(b[(0, 0)]);
        s[(i, m + i)] = b[(0, 1)];
        s[(m + i, i)] = b[(1, 0)];
        s[(m + i, m + i)] = b[(1, 1)];
    }
    s
}
