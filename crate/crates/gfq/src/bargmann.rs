//! Bargmann triples (A, b, c): the complex symmetric matrix, vector and
//! scalar that generate the Fock amplitudes of a Gaussian object. One triple
//! class exists per object class — pure state (ℓ = M), mixed state (ℓ = 2M),
//! unitary (ℓ = 2M) and channel (ℓ = 4M) — together with the Choi-state
//! embedding, parameter recovery from triples, and the permanent formula for
//! photon-count probabilities through passive (lossy-interferometer) maps.

use ndarray::{s, Array1, Array2};

use crate::linalg::{self, C64};
use crate::phase_space::{
    self, quad_to_complex, GaussianChannel, GaussianState, GaussianUnitary,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleKind {
    /// ℓ = M: generates ψ_k.
    PureState,
    /// ℓ = 2M: generates ρ_{jk} (bra index first).
    MixedState,
    /// ℓ = 2M: generates U_{ij} = ⟨i|U|j⟩ with index order i ⊕ j.
    Unitary,
    /// ℓ = 4M: generates ⟨i|Φ[|j⟩⟨l|]|k⟩ with index order k ⊕ l ⊕ i ⊕ j.
    Channel,
}

#[derive(Debug, Clone)]
pub struct BargmannTriple {
    pub a: Array2<C64>,
    pub b: Array1<C64>,
    pub c: C64,
    pub kind: TripleKind,
}

impl BargmannTriple {
    pub fn new(a: Array2<C64>, b: Array1<C64>, c: C64, kind: TripleKind) -> Result<Self> {
        let l = a.nrows();
        if a.ncols() != l || b.len() != l || l == 0 {
            return Err(Error::DimensionMismatch(
                "triple needs square A and matching b".into(),
            ));
        }
        let asym = (0..l)
            .flat_map(|i| (0..l).map(move |j| (i, j)))
            .map(|(i, j)| (a[(i, j)] - a[(j, i)]).norm())
            .fold(0.0f64, f64::max);
        if asym > 1e-10 {
            return Err(Error::ConstraintViolation(format!(
                "A asymmetry {:.2e}",
                asym
            )));
        }
        let t = BargmannTriple {
            a: symmetrize(&a),
            b,
            c,
            kind,
        };
        match kind {
            TripleKind::PureState | TripleKind::MixedState => {
                let top_sv = t.max_singular_value()?;
                if top_sv > 1.0 + 1e-9 {
                    return Err(Error::ConstraintViolation(format!(
                        "state A has singular value {:.6} > 1 (not normalizable)",
                        top_sv
                    )));
                }
            }
            TripleKind::Unitary => {
                let ada = dagger(&t.a).dot(&t.a);
                let defect = linalg::frobenius_norm(&(&ada - &linalg::eye_c(l)));
                if defect > 1e-8 {
                    return Err(Error::ConstraintViolation(format!(
                        "unitary A is not unitary-symmetric (defect {:.2e})",
                        defect
                    )));
                }
            }
            TripleKind::Channel => {}
        }
        Ok(t)
    }

    /// Builds the triple without validating the kind-specific constraints;
    /// used in finite-difference paths where perturbed inputs sit slightly
    /// off the constraint manifold.
    pub fn new_unchecked(a: Array2<C64>, b: Array1<C64>, c: C64, kind: TripleKind) -> Self {
        BargmannTriple {
            a: symmetrize(&a),
            b,
            c,
            kind,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_modes(&self) -> usize {
        match self.kind {
            TripleKind::PureState => self.dim(),
            TripleKind::MixedState | TripleKind::Unitary => self.dim() / 2,
            TripleKind::Channel => self.dim() / 4,
        }
    }

    fn max_singular_value(&self) -> Result<f64> {
        let ada = dagger(&self.a).dot(&self.a);
        let ev = linalg::hermitian_eigvals(&ada)?;
        Ok(ev.into_iter().fold(0.0f64, f64::max).max(0.0).sqrt())
    }
}

fn symmetrize(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let mut out = a.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]);
        }
    }
    out
}

fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|x| x.conj())
}

/// Permutation [[0, I_h], [I_h, 0]] swapping the two halves of a 2h vector.
fn swap_halves(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let h = n / 2;
    let mut out = Array2::zeros(a.raw_dim());
    for i in 0..n {
        let pi = (i + h) % n;
        for j in 0..n {
            out[(i, j)] = a[(pi, j)];
        }
    }
    out
}

fn swap_halves_vec(b: &Array1<C64>) -> Array1<C64> {
    let n = b.len();
    let h = n / 2;
    Array1::from_iter((0..n).map(|i| b[(i + h) % n]))
}

fn mixed_triple_from_sigma_mu(
    sigma: &Array2<C64>,
    mu: &Array1<C64>,
) -> Result<(Array2<C64>, Array1<C64>, C64)> {
    let n = sigma.nrows();
    let mut sigma_plus = sigma.clone();
    for i in 0..n {
        sigma_plus[(i, i)] += 0.5;
    }
    let lu = linalg::Lu::new(&sigma_plus, "sigma + 1/2")?;
    let inv = lu.inverse();
    let a = swap_halves(&(linalg::eye_c(n) - &inv));
    let b = swap_halves_vec(&inv.dot(mu));
    let mu_conj = mu.mapv(|x| x.conj());
    let quad: C64 = mu_conj.dot(&inv.dot(mu));
    let c = (-0.5 * quad).exp() / lu.sqrt_det();
    Ok((symmetrize(&a), b, c))
}

pub fn triple_from_mixed(state: &GaussianState) -> Result<BargmannTriple> {
    let cs = quad_to_complex(state);
    let (a, b, c) = mixed_triple_from_sigma_mu(&cs.sigma, &cs.mu)?;
    BargmannTriple::new(a, b, c, TripleKind::MixedState)
}

/// Deterministic square-root branch for c_ψ and c_U: the principal root,
/// nudged to non-negative imaginary part when the real part vanishes.
fn half_power(c: C64) -> C64 {
    let s = c.sqrt();
    if s.re < 1e-12 && s.im < 0.0 {
        -s
    } else {
        s
    }
}

pub fn triple_from_pure(state: &GaussianState, phase: f64) -> Result<BargmannTriple> {
    if !phase_space::is_pure(state)? {
        return Err(Error::InvalidArgument(format!(
            "state is not pure (purity {:.6})",
            phase_space::purity(state)?
        )));
    }
    let mixed = triple_from_mixed(state)?;
    let (a, b, c) = split_state_blocks(&mixed.a, &mixed.b, mixed.c, true)?;
    BargmannTriple::new(a, b, c * C64::from_polar(1.0, phase), TripleKind::PureState)
}

/// Pure-state triple straight from (V, r̄) with every physicality check
/// skipped — the finite-difference path through perturbed symplectics.
pub fn pure_triple_unchecked(
    cov: &Array2<f64>,
    mean: &Array1<f64>,
    hbar: f64,
) -> Result<BargmannTriple> {
    let m = cov.nrows() / 2;
    let w = phase_space::w_matrix(m);
    let wd = dagger(&w);
    let sigma = wd
        .dot(&linalg::to_complex(cov))
        .dot(&w)
        .mapv(|x| x / hbar);
    let mu = wd
        .dot(&mean.mapv(|x| C64::new(x, 0.0)))
        .mapv(|x| x / hbar.sqrt());
    let (a, b, c) = mixed_triple_from_sigma_mu(&sigma, &mu)?;
    let (ap, bp, cp) = split_state_blocks(&a, &b, c, false)?;
    Ok(BargmannTriple::new_unchecked(
        ap,
        bp,
        cp,
        TripleKind::PureState,
    ))
}

/// Splits a mixed/channel-level triple A = A* ⊕ A (bra block first) into its
/// ket half, optionally verifying the conjugate-block structure.
fn split_state_blocks(
    a: &Array2<C64>,
    b: &Array1<C64>,
    c: C64,
    check: bool,
) -> Result<(Array2<C64>, Array1<C64>, C64)> {
    let n = a.nrows();
    let h = n / 2;
    let ket = a.slice(s![h.., h..]).to_owned();
    if check {
        let bra = a.slice(s![..h, ..h]).to_owned();
        let conj_defect = linalg::frobenius_norm(&(&bra - &ket.mapv(|x| x.conj())));
        let cross = linalg::frobenius_norm(&a.slice(s![..h, h..]).to_owned());
        if conj_defect > 1e-8 || cross > 1e-8 {
            return Err(Error::ConstraintViolation(format!(
                "A does not split as A* ⊕ A (conjugacy defect {:.2e}, cross-block {:.2e})",
                conj_defect, cross
            )));
        }
        let b_defect: f64 = (0..h)
            .map(|i| (b[i] - b[h + i].conj()).norm())
            .fold(0.0, f64::max);
        if b_defect > 1e-8 {
            return Err(Error::ConstraintViolation(format!(
                "b does not split as b* ⊕ b (defect {:.2e})",
                b_defect
            )));
        }
    }
    let bk = b.slice(s![h..]).to_owned();
    Ok((ket, bk, half_power(c)))
}

/// The fixed 4M×4M basis-change matrix R of the channel triple.
pub fn r_matrix(num_modes: usize) -> Array2<C64> {
    let m = num_modes;
    let f = 1.0 / 2f64.sqrt();
    let mut r = Array2::zeros((4 * m, 4 * m));
    for k in 0..m {
        // rows are M-blocks: [I, iI, 0, 0], [0, 0, I, −iI], [I, −iI, 0, 0], [0, 0, I, iI]
        r[(k, k)] = C64::new(f, 0.0);
        r[(k, m + k)] = C64::new(0.0, f);
        r[(m + k, 2 * m + k)] = C64::new(f, 0.0);
        r[(m + k, 3 * m + k)] = C64::new(0.0, -f);
        r[(2 * m + k, k)] = C64::new(f, 0.0);
        r[(2 * m + k, m + k)] = C64::new(0.0, -f);
        r[(3 * m + k, 2 * m + k)] = C64::new(f, 0.0);
        r[(3 * m + k, 3 * m + k)] = C64::new(0.0, f);
    }
    r
}

/// ξ = ½(I + XXᵀ + 2Y/ħ).
pub fn xi_matrix(x: &Array2<f64>, y: &Array2<f64>, hbar: f64) -> Array2<f64> {
    let n = x.nrows();
    let mut xi = x.dot(&x.t());
    for i in 0..n {
        for j in 0..n {
            xi[(i, j)] = 0.5 * (xi[(i, j)] + 2.0 * y[(i, j)] / hbar);
        }
        xi[(i, i)] += 0.5;
    }
    xi
}

fn channel_triple_from_xyd(
    x: &Array2<f64>,
    y: &Array2<f64>,
    d: &Array1<f64>,
    hbar: f64,
) -> Result<(Array2<C64>, Array1<C64>, C64)> {
    let n = x.nrows();
    let m = n / 2;
    let xi = linalg::to_complex(&xi_matrix(x, y, hbar));
    let lu = linalg::Lu::new(&xi, "channel xi")?;
    let xi_inv = lu.inverse();
    let xc = linalg::to_complex(x);
    let xi_inv_x = xi_inv.dot(&xc);
    let xt_xi_inv = xc.t().dot(&xi_inv);
    let xt_xi_inv_x = xt_xi_inv.dot(&xc);
    let id = linalg::eye_c(n);
    let mut k = Array2::zeros((2 * n, 2 * n));
    k.slice_mut(s![..n, ..n]).assign(&(&id - &xi_inv));
    k.slice_mut(s![..n, n..]).assign(&xi_inv_x);
    k.slice_mut(s![n.., ..n]).assign(&xt_xi_inv);
    k.slice_mut(s![n.., n..]).assign(&(&id - &xt_xi_inv_x));

    let r = r_matrix(m);
    let a = swap_halves(&r.dot(&k).dot(&dagger(&r)));

    let dc = d.mapv(|v| C64::new(v, 0.0));
    let xi_inv_d = xi_inv.dot(&dc);
    let mut stacked = Array1::zeros(2 * n);
    stacked.slice_mut(s![..n]).assign(&xi_inv_d);
    stacked
        .slice_mut(s![n..])
        .assign(&(-xc.t().dot(&xi_inv_d)));
    let b = r.mapv(|v| v.conj()).dot(&stacked).mapv(|v| v / hbar.sqrt());

    let quad: C64 = dc.dot(&xi_inv_d);
    let c = (-quad / (2.0 * hbar)).exp() / lu.sqrt_det();
    Ok((symmetrize(&a), b, c))
}

pub fn triple_from_channel(ch: &GaussianChannel) -> Result<BargmannTriple> {
    let (a, b, c) = channel_triple_from_xyd(&ch.x, &ch.y, &ch.d, ch.hbar)?;
    BargmannTriple::new(a, b, c, TripleKind::Channel)
}

pub fn triple_from_unitary(u: &GaussianUnitary, phase: f64) -> Result<BargmannTriple> {
    let n = u.s.nrows();
    let (a, b, c) = channel_triple_from_xyd(&u.s, &Array2::zeros((n, n)), &u.d, u.hbar)?;
    let (au, bu, cu) = split_state_blocks(&a, &b, c, true)?;
    BargmannTriple::new(au, bu, cu * C64::from_polar(1.0, phase), TripleKind::Unitary)
}

/// Triple of the (non-trace-preserving) Fock damping map
/// ρ ↦ e^{−βn} ρ e^{−βn}: amplitudes δ_{ik} δ_{jl} e^{−β(j+l)}.
pub fn fock_damping_triple(beta: f64) -> Result<BargmannTriple> {
    if beta < 0.0 {
        return Err(Error::InvalidArgument(
            "damping strength must be non-negative".into(),
        ));
    }
    let e = C64::new((-beta).exp(), 0.0);
    let mut a = Array2::zeros((4, 4));
    a[(0, 1)] = e;
    a[(1, 0)] = e;
    a[(2, 3)] = e;
    a[(3, 2)] = e;
    Ok(BargmannTriple::new_unchecked(
        a,
        Array1::zeros(4),
        C64::new(1.0, 0.0),
        TripleKind::Channel,
    ))
}

/// E(t) = I_M ⊕ tanh(t) I_M ⊕ I_M ⊕ tanh(t) I_M, the diagonal rescaling of a
/// channel triple into its Choi-state triple over 2M modes.
fn choi_scaling(num_modes: usize, tanh_t: f64) -> Array1<C64> {
    let m = num_modes;
    Array1::from_iter((0..4 * m).map(|i| {
        let block = i / m;
        if block % 2 == 1 {
            C64::new(tanh_t, 0.0)
        } else {
            C64::new(1.0, 0.0)
        }
    }))
}

/// The Choi state of a channel: the channel applied to half of a two-mode
/// squeezed resource with squeezing t per mode pair.
pub fn choi_state_triple(ch: &GaussianChannel, t: f64) -> Result<BargmannTriple> {
    if t <= 0.0 {
        return Err(Error::InvalidArgument(
            "Choi squeezing parameter must be positive".into(),
        ));
    }
    let m = ch.num_modes();
    let phi = triple_from_channel(ch)?;
    let e = choi_scaling(m, t.tanh());
    let n = phi.dim();
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = e[i] * phi.a[(i, j)] * e[j];
        }
    }
    let b = Array1::from_iter((0..n).map(|i| e[i] * phi.b[i]));
    let c = phi.c * (1.0 - t.tanh().powi(2)).powi(m as i32);
    BargmannTriple::new(a, b, c, TripleKind::MixedState)
}

/// Inverts [`choi_state_triple`]: rescales a Choi-state triple back into the
/// channel triple. Must give the same answer for every t.
pub fn channel_triple_from_choi(choi: &BargmannTriple, t: f64) -> Result<BargmannTriple> {
    if choi.kind != TripleKind::MixedState || choi.dim() % 4 != 0 {
        return Err(Error::InvalidArgument(
            "expected the mixed-state triple of a Choi state on 2M modes".into(),
        ));
    }
    let m = choi.dim() / 4;
    let tanh_t = t.tanh();
    if tanh_t <= 0.0 || tanh_t >= 1.0 {
        return Err(Error::InvalidArgument("need 0 < tanh t < 1".into()));
    }
    let e_inv = choi_scaling(m, tanh_t).mapv(|v| 1.0 / v);
    let n = choi.dim();
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = e_inv[i] * choi.a[(i, j)] * e_inv[j];
        }
    }
    let b = Array1::from_iter((0..n).map(|i| e_inv[i] * choi.b[i]));
    let c = choi.c / (1.0 - tanh_t * tanh_t).powi(m as i32);
    BargmannTriple::new(a, b, c, TripleKind::Channel)
}

/// Recovers the phase-space parameters (X, Y, d) of a channel from its
/// triple by undoing the R-conjugation.
pub fn channel_params_from_triple(
    triple: &BargmannTriple,
    hbar: f64,
) -> Result<(Array2<f64>, Array2<f64>, Array1<f64>)> {
    if triple.kind != TripleKind::Channel {
        return Err(Error::InvalidArgument("expected a channel triple".into()));
    }
    let m = triple.num_modes();
    let n = 2 * m;
    let r = r_matrix(m);
    let k = dagger(&r).dot(&swap_halves(&triple.a)).dot(&r);
    let k11 = k.slice(s![..n, ..n]).to_owned();
    let k12 = k.slice(s![..n, n..]).to_owned();
    let xi = linalg::inverse(&(linalg::eye_c(n) - &k11), "xi recovery")?;
    let x = xi.dot(&k12);
    let x_re = x.mapv(|v| v.re);
    // Y from the definition of ξ
    let mut y = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let idm = if i == j { 1.0 } else { 0.0 };
            y[(i, j)] = 0.5 * hbar * (2.0 * xi[(i, j)].re - idm)
                - 0.5 * hbar * x_re.row(i).dot(&x_re.row(j));
        }
    }
    let stacked = r.t().dot(&triple.b).mapv(|v| v * hbar.sqrt());
    let d = xi.dot(&stacked.slice(s![..n]).to_owned()).mapv(|v| v.re);
    Ok((x_re, y, d))
}

/// Recovers the symplectic shadow (S, d) of a unitary triple by embedding it
/// as a channel triple and reusing the channel recovery.
pub fn unitary_params_from_triple(triple: &BargmannTriple, hbar: f64) -> Result<GaussianUnitary> {
    if triple.kind != TripleKind::Unitary {
        return Err(Error::InvalidArgument("expected a unitary triple".into()));
    }
    let n = triple.dim();
    let mut a = Array2::zeros((2 * n, 2 * n));
    a.slice_mut(s![..n, ..n])
        .assign(&triple.a.mapv(|v| v.conj()));
    a.slice_mut(s![n.., n..]).assign(&triple.a);
    let mut b = Array1::zeros(2 * n);
    b.slice_mut(s![..n]).assign(&triple.b.mapv(|v| v.conj()));
    b.slice_mut(s![n..]).assign(&triple.b);
    let phi = BargmannTriple::new_unchecked(a, b, triple.c * triple.c.conj(), TripleKind::Channel);
    let (x, _y, d) = channel_params_from_triple(&phi, hbar)?;
    GaussianUnitary::new(x, d, hbar)
}

/// Permanent of a complex matrix by Ryser's formula with Gray-code subset
/// updates, O(2^n n).
pub fn permanent(m: &Array2<C64>) -> Result<C64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch("permanent of non-square".into()));
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if n > 24 {
        return Err(Error::InvalidArgument(format!(
            "permanent of {}x{} exceeds the exact-computation budget",
            n, n
        )));
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut gray_prev: u64 = 0;
    for k in 1u64..(1 << n) {
        let gray = k ^ (k >> 1);
        let changed = gray ^ gray_prev;
        let col = changed.trailing_zeros() as usize;
        if gray & changed != 0 {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs += m[(i, col)];
            }
        } else {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs -= m[(i, col)];
            }
        }
        gray_prev = gray;
        let prod: C64 = row_sums.iter().product();
        let popcount = gray.count_ones() as usize;
        if (n - popcount) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Probability of counting pattern `outcome` when Fock state `input` passes
/// through the passive map with transfer matrix T (singular values ≤ 1):
/// perm of the doubled matrix [[I − T†T, T†], [T, 0]] with rows/columns
/// repeated per the photon patterns, normalized by i!·j!.
pub fn passive_probability(t: &Array2<C64>, input: &[usize], outcome: &[usize]) -> Result<f64> {
    let m = t.nrows();
    if t.ncols() != m || input.len() != m || outcome.len() != m {
        return Err(Error::DimensionMismatch(
            "transfer matrix and photon patterns must share the mode count".into(),
        ));
    }
    let total: usize = input.iter().sum::<usize>() + outcome.iter().sum::<usize>();
    if total > 20 {
        return Err(Error::InvalidArgument(format!(
            "pattern with {} total photons exceeds the exact-permanent budget",
            total
        )));
    }
    let td = dagger(t);
    let mut big = Array2::zeros((2 * m, 2 * m));
    let gram = linalg::eye_c(m) - td.dot(t);
    big.slice_mut(s![..m, ..m]).assign(&gram);
    big.slice_mut(s![..m, m..]).assign(&td);
    big.slice_mut(s![m.., ..m]).assign(t);
    // repetition pattern over the doubled index: input counts on the first
    // block, outcome counts on the second
    let mut reps = Vec::with_capacity(2 * m);
    reps.extend_from_slice(input);
    reps.extend_from_slice(outcome);
    let idx: Vec<usize> = reps
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| std::iter::repeat(i).take(r))
        .collect();
    let k = idx.len();
    let mut sub = Array2::zeros((k, k));
    for (r, &ir) in idx.iter().enumerate() {
        for (c, &ic) in idx.iter().enumerate() {
            sub[(r, c)] = big[(ir, ic)];
        }
    }
    let p = permanent(&sub)?;
    let norm: f64 = input.iter().map(|&v| factorial(v)).product::<f64>()
        * outcome.iter().map(|&v| factorial(v)).product::<f64>();
    Ok(p.re / norm)
}
