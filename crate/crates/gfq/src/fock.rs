//! Fock-space engine: generates the amplitude tensor of any Gaussian object
//! from its Bargmann triple with a single order-2 linear recurrence, provides
//! the exact reverse-mode gradient (vector–Jacobian product) of the tensor
//! with respect to the triple, a brute-force loop-hafnian oracle for testing,
//! and Fock-space utilities (heralding projection, fidelity, normalization).

use ndarray::{Array1, Array2, ArrayD, IxDyn};
use serde::{Deserialize, Serialize};

use crate::bargmann::{BargmannTriple, TripleKind};
use crate::linalg::C64;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FockTensor {
    pub cutoffs: Vec<usize>,
    pub amps: ArrayD<C64>,
    pub kind: TripleKind,
}

/// Cotangent of a tensor-valued loss with respect to the generating triple.
#[derive(Debug, Clone)]
pub struct TripleGradient {
    pub da: Array2<C64>,
    pub db: Array1<C64>,
    pub dc: C64,
}

fn strides_for(cutoffs: &[usize]) -> Vec<usize> {
    let n = cutoffs.len();
    let mut st = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        st[i] = st[i + 1] * cutoffs[i + 1];
    }
    st
}

/// Fills 𝒢_k in lexicographic (row-major) order:
/// 𝒢_0 = c and, pivoting on the first axis i with k_i > 0,
/// 𝒢_k = (1/√k_i) (b_i 𝒢_{k−1_i} + Σ_j √((k−1_i)_j) A_{ij} 𝒢_{k−1_i−1_j}).
pub fn hermite_renormalized(triple: &BargmannTriple, cutoffs: &[usize]) -> Result<FockTensor> {
    let l = triple.dim();
    if cutoffs.len() != l {
        return Err(Error::DimensionMismatch(format!(
            "triple has {} axes, got {} cutoffs",
            l,
            cutoffs.len()
        )));
    }
    if cutoffs.iter().any(|&c| c == 0) {
        return Err(Error::InvalidArgument("cutoffs must be positive".into()));
    }
    let strides = strides_for(cutoffs);
    let total: usize = cutoffs.iter().product();
    let mut flat = vec![C64::new(0.0, 0.0); total];
    flat[0] = triple.c;
    let mut idx = vec![0usize; l];
    for f in 1..total {
        // advance the multi-index (row-major increment)
        for ax in (0..l).rev() {
            idx[ax] += 1;
            if idx[ax] < cutoffs[ax] {
                break;
            }
            idx[ax] = 0;
        }
        let pivot = idx.iter().position(|&k| k > 0).unwrap();
        let base = f - strides[pivot];
        let mut val = triple.b[pivot] * flat[base];
        for j in 0..l {
            let kj = if j == pivot { idx[j] - 1 } else { idx[j] };
            if kj > 0 {
                val += (kj as f64).sqrt() * triple.a[(pivot, j)] * flat[base - strides[j]];
            }
        }
        flat[f] = val / (idx[pivot] as f64).sqrt();
    }
    let amps = ArrayD::from_shape_vec(IxDyn(cutoffs), flat)
        .map_err(|e| Error::Numerical(format!("tensor shape: {}", e)))?;
    Ok(FockTensor {
        cutoffs: cutoffs.to_vec(),
        amps,
        kind: triple.kind,
    })
}

/// Exhaustive loop-hafnian of the index-repeated matrix fdiag(A_k, b_k):
/// the sum over matchings-with-loops, equal to the (unnormalized)
/// multidimensional Hermite polynomial G^A_k(b). Budget: Σk ≤ 8.
pub fn loop_hafnian_oracle(a: &Array2<C64>, b: &Array1<C64>, k: &[usize]) -> Result<C64> {
    let l = a.nrows();
    if a.ncols() != l || b.len() != l || k.len() != l {
        return Err(Error::DimensionMismatch(
            "oracle inputs must share the triple dimension".into(),
        ));
    }
    let total: usize = k.iter().sum();
    if total > 8 {
        return Err(Error::InvalidArgument(format!(
            "index weight {} exceeds the enumeration budget of 8",
            total
        )));
    }
    let labels: Vec<usize> = k
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| std::iter::repeat(i).take(r))
        .collect();
    fn walk(labels: &[usize], used: &mut [bool], a: &Array2<C64>, b: &Array1<C64>) -> C64 {
        let v = match used.iter().position(|u| !u) {
            Some(v) => v,
            None => return C64::new(1.0, 0.0),
        };
        used[v] = true;
        // vertex v takes a loop (weight b) ...
        let mut acc = b[labels[v]] * walk(labels, used, a, b);
        // ... or pairs with a later unmatched vertex (weight A)
        for u in (v + 1)..labels.len() {
            if !used[u] {
                used[u] = true;
                acc += a[(labels[v], labels[u])] * walk(labels, used, a, b);
                used[u] = false;
            }
        }
        used[v] = false;
        acc
    }
    let mut used = vec![false; labels.len()];
    Ok(walk(&labels, &mut used, a, b))
}

/// Reverse-mode gradient through the recurrence, computed from the already
/// generated tensor (the tensor entries are the only intermediates needed):
/// dc = Σ u_k 𝒢_k / c, db_i = Σ u_k √k_i 𝒢_{k−1_i},
/// dA_ij = ½ Σ u_k √(k_i (k_j − δ_ij)) 𝒢_{k−1_i−1_j}.
pub fn fock_vjp(
    triple: &BargmannTriple,
    tensor: &FockTensor,
    upstream: &ArrayD<C64>,
) -> Result<TripleGradient> {
    let l = triple.dim();
    if upstream.shape() != tensor.amps.shape() {
        return Err(Error::DimensionMismatch(
            "upstream cotangent shape differs from the tensor".into(),
        ));
    }
    let cutoffs = &tensor.cutoffs;
    let strides = strides_for(cutoffs);
    let flat = tensor.amps.as_slice().ok_or_else(|| {
        Error::Numerical("tensor memory not contiguous".into())
    })?;
    let up = upstream
        .as_standard_layout()
        .to_owned();
    let up = up.as_slice().unwrap().to_vec();
    let total: usize = cutoffs.iter().product();
    let mut da = Array2::<C64>::zeros((l, l));
    let mut db = Array1::<C64>::zeros(l);
    let mut dc = C64::new(0.0, 0.0);
    let mut idx = vec![0usize; l];
    for f in 0..total {
        if f > 0 {
            for ax in (0..l).rev() {
                idx[ax] += 1;
                if idx[ax] < cutoffs[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        let u = up[f];
        if u == C64::new(0.0, 0.0) {
            continue;
        }
        dc += u * flat[f] / triple.c;
        for i in 0..l {
            if idx[i] == 0 {
                continue;
            }
            let gi = flat[f - strides[i]];
            db[i] += u * (idx[i] as f64).sqrt() * gi;
            for j in 0..l {
                let kj = if j == i { idx[j] - 1 } else { idx[j] };
                if kj == 0 {
                    continue;
                }
                let g2 = flat[f - strides[i] - strides[j]];
                da[(i, j)] += 0.5 * u * ((idx[i] * kj) as f64).sqrt() * g2;
            }
        }
    }
    Ok(TripleGradient { da, db, dc })
}

impl FockTensor {
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<FockTensor> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Numerical("cannot normalize a zero tensor".into()));
        }
        Ok(FockTensor {
            cutoffs: self.cutoffs.clone(),
            amps: self.amps.mapv(|x| x / n),
            kind: self.kind,
        })
    }
}

/// Σ |amps|²: for a pure-state ket, the total probability captured below the
/// cutoffs (1 − tail).
pub fn state_probability(ket: &FockTensor) -> f64 {
    ket.norm_sqr()
}

pub fn overlap(a: &FockTensor, b: &FockTensor) -> Result<C64> {
    if a.cutoffs != b.cutoffs {
        return Err(Error::DimensionMismatch(
            "overlap needs matching cutoffs".into(),
        ));
    }
    Ok(a.amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// |⟨A|B⟩|² after normalizing both kets.
pub fn fidelity(a: &FockTensor, b: &FockTensor) -> Result<f64> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Numerical("fidelity of a zero-norm ket".into()));
    }
    Ok(overlap(a, b)?.norm_sqr() / (na * nb))
}

/// Projects the listed modes onto photon-number outcomes. Returns the
/// unnormalized heralded ket on the remaining modes and the success
/// probability Σ|slice|² (under cutoff truncation; the complementary tail is
/// not corrected for).
pub fn project_fock(
    tensor: &FockTensor,
    pattern: &[(usize, usize)],
) -> Result<(FockTensor, f64)> {
    if tensor.kind != TripleKind::PureState {
        return Err(Error::InvalidArgument(
            "heralding projection expects a pure-state ket".into(),
        ));
    }
    let mut measured: Vec<(usize, usize)> = pattern.to_vec();
    measured.sort();
    for w in measured.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InvalidArgument(format!(
                "mode {} measured twice",
                w[0].0
            )));
        }
    }
    for &(mode, n) in &measured {
        if mode >= tensor.cutoffs.len() {
            return Err(Error::InvalidArgument(format!(
                "mode {} out of range",
                mode
            )));
        }
        if n >= tensor.cutoffs[mode] {
            return Err(Error::InvalidArgument(format!(
                "outcome {} at mode {} exceeds cutoff {}",
                n, mode, tensor.cutoffs[mode]
            )));
        }
    }
    let mut amps = tensor.amps.clone();
    // fix measured axes from the highest axis down so indices stay valid
    for &(mode, n) in measured.iter().rev() {
        amps = amps.index_axis(ndarray::Axis(mode), n).to_owned();
    }
    let cutoffs: Vec<usize> = tensor
        .cutoffs
        .iter()
        .enumerate()
        .filter(|(i, _)| !measured.iter().any(|&(m, _)| m == *i))
        .map(|(_, &c)| c)
        .collect();
    let prob = amps.iter().map(|x| x.norm_sqr()).sum();
    Ok((
        FockTensor {
            cutoffs,
            amps,
            kind: TripleKind::PureState,
        },
        prob,
    ))
}

/// Flat JSON form of a tensor: cutoffs plus row-major real/imaginary parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FockTensorJson {
    pub cutoffs: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl FockTensor {
    pub fn to_json(&self) -> FockTensorJson {
        let std = self.amps.as_standard_layout();
        let flat = std.as_slice().unwrap();
        FockTensorJson {
            cutoffs: self.cutoffs.clone(),
            re: flat.iter().map(|x| x.re).collect(),
            im: flat.iter().map(|x| x.im).collect(),
        }
    }

    pub fn from_json(j: &FockTensorJson, kind: TripleKind) -> Result<FockTensor> {
        let total: usize = j.cutoffs.iter().product();
        if j.re.len() != total || j.im.len() != total {
            return Err(Error::DimensionMismatch(
                "serialized amplitude count does not match cutoffs".into(),
            ));
        }
        let flat: Vec<C64> = j
            .re
            .iter()
            .zip(j.im.iter())
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        let amps = ArrayD::from_shape_vec(IxDyn(&j.cutoffs), flat)
            .map_err(|e| Error::Numerical(format!("tensor shape: {}", e)))?;
        Ok(FockTensor {
            cutoffs: j.cutoffs.clone(),
            amps,
            kind,
        })
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// √(k!) 𝒢_k / c, the unnormalized Hermite value at one index — the quantity
/// the loop-hafnian oracle computes directly.
pub fn unnormalized_hermite(tensor: &FockTensor, c: C64, k: &[usize]) -> C64 {
    let scale: f64 = k.iter().map(|&v| factorial(v)).product::<f64>().sqrt();
    tensor.amps[IxDyn(k)] * scale / c
}
