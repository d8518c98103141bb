//! Target-state constructors: cat states (superpositions of two coherent
//! states) and finite-energy cubic phase states e^{iγx³/3ħ}S(r)|0⟩.

use ndarray::{Array1, Array2, IxDyn};

use crate::bargmann::{triple_from_pure, TripleKind};
use crate::fock::{hermite_renormalized, FockTensor};
use crate::linalg::{expm, C64};
use crate::phase_space::{apply_unitary, squeezer_gate, vacuum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// ⟨k|α⟩ = e^{−|α|²/2} α^k/√k! for k < cutoff.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Array1<C64> {
    let mut amps = Array1::zeros(cutoff);
    let mut cur = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for k in 0..cutoff {
        amps[k] = cur;
        cur = cur * alpha / ((k + 1) as f64).sqrt();
    }
    amps
}

/// Normalized (|α⟩ ± |−α⟩)/√(2 ± 2e^{−2|α|²}) as a single-mode ket.
///
/// Errors if the truncated tail beyond `cutoff` carries more than 1e−8 of
/// the state's norm.
pub fn target_cat(alpha: C64, parity: Parity, cutoff: usize) -> Result<FockTensor> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cat cutoff must be positive".into()));
    }
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let norm = 2.0 + sign * 2.0 * (-2.0 * alpha.norm_sqr()).exp();
    let extended = cutoff + 16;
    let plus = coherent_amplitudes(alpha, extended);
    let minus = coherent_amplitudes(-alpha, extended);
    let full = (&plus + &minus.mapv(|x| sign * x)).mapv(|x| x / norm.sqrt());
    let tail: f64 = full.iter().skip(cutoff).map(|x| x.norm_sqr()).sum();
    if tail > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "cat state tail beyond cutoff {} carries {:.2e} of the norm",
            cutoff, tail
        )));
    }
    let amps = full
        .slice(ndarray::s![..cutoff])
        .to_owned()
        .into_shape(IxDyn(&[cutoff]))
        .unwrap();
    Ok(FockTensor {
        cutoffs: vec![cutoff],
        amps,
        kind: TripleKind::PureState,
    })
}

/// Position quadrature matrix q = √(ħ/2)(a + a†) truncated at `dim`.
fn q_matrix(dim: usize, hbar: f64) -> Array2<C64> {
    let mut q = Array2::zeros((dim, dim));
    let scale = (hbar / 2.0).sqrt();
    for n in 0..dim - 1 {
        let v = C64::new(scale * ((n + 1) as f64).sqrt(), 0.0);
        q[(n, n + 1)] = v;
        q[(n + 1, n)] = v;
    }
    q
}

/// Finite-energy cubic phase state e^{i(γ/3ħ)q³} S(r)|0⟩, normalized.
/// Also returns the pre-normalization norm of the truncated ket as a
/// truncation diagnostic.
pub fn target_cubic_with_norm(
    gamma_over_hbar: f64,
    r: f64,
    cutoff: usize,
    hbar: f64,
) -> Result<(FockTensor, f64)> {
    target_cubic_internal(gamma_over_hbar, r, cutoff, 2 * cutoff, hbar)
}

pub fn target_cubic(gamma_over_hbar: f64, r: f64, cutoff: usize, hbar: f64) -> Result<FockTensor> {
    Ok(target_cubic_with_norm(gamma_over_hbar, r, cutoff, hbar)?.0)
}

pub(crate) fn target_cubic_internal(
    gamma_over_hbar: f64,
    r: f64,
    cutoff: usize,
    internal: usize,
    hbar: f64,
) -> Result<(FockTensor, f64)> {
    if internal < cutoff {
        return Err(Error::InvalidArgument(
            "internal cutoff must be at least the target cutoff".into(),
        ));
    }
    // squeezed vacuum ket at the enlarged internal cutoff
    let sq = apply_unitary(&vacuum(1, hbar)?, &squeezer_gate(r, 0.0, hbar))?;
    let triple = triple_from_pure(&sq, 0.0)?;
    let ket = hermite_renormalized(&triple, &[internal])?;
    // e^{i(γ/3ħ)q³} via dense matrix exponential
    let q = q_matrix(internal, hbar);
    let q3 = q.dot(&q).dot(&q);
    let gen = q3.mapv(|x| C64::new(0.0, gamma_over_hbar / 3.0) * x);
    let u = expm(&gen)?;
    let vec = ket
        .amps
        .into_shape(internal)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    let out = u.dot(&vec);
    let truncated = out.slice(ndarray::s![..cutoff]).to_owned();
    let norm = truncated.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::Numerical("cubic target truncated to zero".into()));
    }
    let amps = truncated
        .mapv(|x| x / norm)
        .into_shape(IxDyn(&[cutoff]))
        .unwrap();
    Ok((
        FockTensor {
            cutoffs: vec![cutoff],
            amps,
            kind: TripleKind::PureState,
        },
        norm,
    ))
}
