//! Composition of Gaussian-unitary triples with the correct global phase,
//! application of a unitary triple to a pure-state triple, and linear
//! combinations of Gaussian pure states (superpositions such as cat states)
//! whose relative phases survive Gaussian evolution.

use ndarray::{s, Array1, Array2};

use crate::bargmann::{BargmannTriple, TripleKind};
use crate::fock::{hermite_renormalized, FockTensor};
use crate::linalg::{self, C64};
use crate::{Error, Result};

struct Blocks {
    b: Array2<C64>,
    c: Array2<C64>,
    d: Array2<C64>,
    cvec: Array1<C64>,
    dvec: Array1<C64>,
}

fn split_unitary(u: &BargmannTriple) -> Result<Blocks> {
    if u.kind != TripleKind::Unitary {
        return Err(Error::InvalidArgument("expected a unitary triple".into()));
    }
    let m = u.num_modes();
    Ok(Blocks {
        b: u.a.slice(s![..m, ..m]).to_owned(),
        c: u.a.slice(s![..m, m..]).to_owned(),
        d: u.a.slice(s![m.., m..]).to_owned(),
        cvec: u.b.slice(s![..m]).to_owned(),
        dvec: u.b.slice(s![m..]).to_owned(),
    })
}

/// Composes the triples of two Gaussian unitaries into the triple of
/// U_f = U₁ U₂ (U₂ acts first), global phase included. The contraction
/// kernel is 𝒵 = [[−D₁, I], [I, −B₂]]⁻¹ expressed through 𝒴 = I − B₂D₁.
pub fn compose(u1: &BargmannTriple, u2: &BargmannTriple) -> Result<BargmannTriple> {
    let b1 = split_unitary(u1)?;
    let b2 = split_unitary(u2)?;
    let m = u1.num_modes();
    if u2.num_modes() != m {
        return Err(Error::DimensionMismatch(
            "composed unitaries must share the mode count".into(),
        ));
    }
    let id = linalg::eye_c(m);
    let y = &id - &b2.b.dot(&b1.d);
    let lu = linalg::Lu::new(&y, "composition Y")?;
    let y_inv = lu.inverse();
    let y_inv_t = y_inv.t().to_owned();
    // 𝒵 blocks (symmetric 2M×2M)
    let z11 = y_inv.dot(&b2.b);
    let z12 = y_inv.clone();
    let z21 = y_inv_t;
    let z22 = b1.d.dot(&y_inv);

    // {C₁ ⊕ C₂ᵀ} 𝒵 {C₁ᵀ ⊕ C₂}
    let c2t = b2.c.t().to_owned();
    let mut a = Array2::zeros((2 * m, 2 * m));
    a.slice_mut(s![..m, ..m])
        .assign(&(&b1.b + &b1.c.dot(&z11).dot(&b1.c.t())));
    a.slice_mut(s![..m, m..])
        .assign(&b1.c.dot(&z12).dot(&b2.c));
    a.slice_mut(s![m.., ..m])
        .assign(&c2t.dot(&z21).dot(&b1.c.t()));
    a.slice_mut(s![m.., m..])
        .assign(&(&b2.d + &c2t.dot(&z22).dot(&b2.c)));

    // [d₁ᵀ, c₂ᵀ] 𝒵, kept as the pair of half-row vectors
    let left1 = b1.dvec.dot(&z11) + b2.cvec.dot(&z21);
    let left2 = b1.dvec.dot(&z12) + b2.cvec.dot(&z22);
    let mut b = Array1::zeros(2 * m);
    b.slice_mut(s![..m])
        .assign(&(&b1.cvec + &left1.dot(&b1.c.t())));
    b.slice_mut(s![m..])
        .assign(&(&b2.dvec + &left2.dot(&b2.c)));

    let quad: C64 = left1.dot(&b1.dvec) + left2.dot(&b2.cvec);
    let c = u1.c * u2.c / lu.sqrt_det() * (0.5 * quad).exp();
    BargmannTriple::new(a, b, c, TripleKind::Unitary)
}

/// Applies a unitary triple to a pure-state triple, producing the triple of
/// U|ψ⟩ with its phase. Same contraction as [`compose`] with the state
/// occupying the input block of the second factor.
pub fn apply_unitary_to_pure(
    u: &BargmannTriple,
    psi: &BargmannTriple,
) -> Result<BargmannTriple> {
    if psi.kind != TripleKind::PureState {
        return Err(Error::InvalidArgument("expected a pure-state triple".into()));
    }
    let blk = split_unitary(u)?;
    let m = u.num_modes();
    if psi.dim() != m {
        return Err(Error::DimensionMismatch(
            "state and unitary must share the mode count".into(),
        ));
    }
    let id = linalg::eye_c(m);
    let y = &id - &psi.a.dot(&blk.d);
    let lu = linalg::Lu::new(&y, "state application Y")?;
    let y_inv = lu.inverse();

    let a_out = &blk.b + &blk.c.dot(&y_inv).dot(&psi.a).dot(&blk.c.t());
    let b_out = &blk.cvec + &blk.c.dot(&y_inv.dot(&(psi.a.dot(&blk.dvec) + &psi.b)));

    let y_inv_a = y_inv.dot(&psi.a);
    let quad: C64 = 0.5 * blk.dvec.dot(&y_inv_a.dot(&blk.dvec))
        + blk.dvec.dot(&y_inv.dot(&psi.b))
        + 0.5 * psi.b.dot(&blk.d.dot(&y_inv).dot(&psi.b));
    let c_out = u.c * psi.c / lu.sqrt_det() * quad.exp();
    BargmannTriple::new(a_out, b_out, c_out, TripleKind::PureState)
}

#[derive(Debug, Clone)]
pub struct GaussianLinearCombination {
    pub terms: Vec<(C64, BargmannTriple)>,
}

impl GaussianLinearCombination {
    pub fn new(terms: Vec<(C64, BargmannTriple)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "linear combination needs at least one term".into(),
            ));
        }
        let m = terms[0].1.dim();
        for (_, t) in &terms {
            if t.kind != TripleKind::PureState || t.dim() != m {
                return Err(Error::InvalidArgument(
                    "all terms must be pure-state triples on the same modes".into(),
                ));
            }
        }
        Ok(GaussianLinearCombination { terms })
    }

    /// Applies a Gaussian unitary to every component, keeping each component's
    /// phase — the point where a dropped global phase becomes observable.
    pub fn apply_unitary(&self, u: &BargmannTriple) -> Result<GaussianLinearCombination> {
        let terms = self
            .terms
            .iter()
            .map(|(coeff, t)| Ok((*coeff, apply_unitary_to_pure(u, t)?)))
            .collect::<Result<Vec<_>>>()?;
        GaussianLinearCombination::new(terms)
    }
}

/// Σᵢ coeffᵢ · Fock(tripleᵢ) — unnormalized by design.
pub fn combination_to_fock(
    lc: &GaussianLinearCombination,
    cutoffs: &[usize],
) -> Result<FockTensor> {
    let mut acc: Option<FockTensor> = None;
    for (coeff, t) in &lc.terms {
        let g = hermite_renormalized(t, cutoffs)?;
        match &mut acc {
            None => {
                let mut g = g;
                g.amps.mapv_inplace(|x| coeff * x);
                acc = Some(g);
            }
            Some(a) => {
                a.amps
                    .iter_mut()
                    .zip(g.amps.iter())
                    .for_each(|(x, y)| *x += coeff * y);
            }
        }
    }
    Ok(acc.unwrap())
}
