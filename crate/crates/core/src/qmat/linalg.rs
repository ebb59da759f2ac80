use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{CMatrix, DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Anything that can appear as a factor of a tensor product.
pub trait Tensor: Sized {
    fn matrix(&self) -> &CMatrix;
    fn from_kron(m: CMatrix) -> Result<Self>;
}

impl Tensor for CMatrix {
    fn matrix(&self) -> &CMatrix {
        self
    }
    fn from_kron(m: CMatrix) -> Result<Self> {
        Ok(m)
    }
}

impl Tensor for HermitianOperator {
    fn matrix(&self) -> &CMatrix {
        self.entries()
    }
    fn from_kron(m: CMatrix) -> Result<Self> {
        HermitianOperator::new(m)
    }
}

impl Tensor for DensityMatrix {
    fn matrix(&self) -> &CMatrix {
        self.entries()
    }
    fn from_kron(m: CMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

/// Kronecker product of square matrices in the given order.
pub fn kron_all(factors: &[&CMatrix], cap: usize) -> Result<CMatrix> {
    if factors.is_empty() {
        return Err(Error::Dimension("empty tensor product".into()));
    }
    let mut required: usize = 1;
    for f in factors {
        if f.nrows() != f.ncols() || f.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "tensor factor must be square, got {}x{}",
                f.nrows(),
                f.ncols()
            )));
        }
        required = required.saturating_mul(f.nrows());
    }
    if required > cap {
        return Err(Error::DimensionCap { required, cap });
    }
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.kronecker(*f);
    }
    Ok(acc)
}

/// Tensor product of operators or states in declared subsystem order.
pub fn tensor_product<T: Tensor>(factors: &[&T], cap: usize) -> Result<T> {
    let mats: Vec<&CMatrix> = factors.iter().map(|f| f.matrix()).collect();
    T::from_kron(kron_all(&mats, cap)?)
}

/// Mixed-radix digits of `index` for the given dims (most significant first).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Reduced state on the subsystems listed in `keep`, in ascending subsystem
/// order.
pub fn partial_trace(state: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != state.dim() {
        return Err(Error::Dimension(format!(
            "subsystem dims {:?} do not multiply to state dim {}",
            dims,
            state.dim()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::Dimension("partial trace must keep at least one subsystem".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "subsystem index {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    if kept.len() == dims.len() {
        return Ok(state.clone());
    }

    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let mut strides = alloc::vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offset = |sel: &[usize], sel_digits: &[usize]| -> usize {
        sel.iter().zip(sel_digits).map(|(&s, &d)| strides[s] * d).sum()
    };

    let mut kept_offsets = Vec::with_capacity(kept_total);
    let mut buf = alloc::vec![0usize; kept.len()];
    for i in 0..kept_total {
        digits(i, &kept_dims, &mut buf);
        kept_offsets.push(offset(&kept, &buf));
    }
    let mut traced_offsets = Vec::with_capacity(traced_total);
    let mut buf = alloc::vec![0usize; traced.len()];
    for k in 0..traced_total {
        digits(k, &traced_dims, &mut buf);
        traced_offsets.push(offset(&traced, &buf));
    }

    let rho = state.entries();
    let reduced = CMatrix::from_fn(kept_total, kept_total, |i, j| {
        let (oi, oj) = (kept_offsets[i], kept_offsets[j]);
        traced_offsets
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &ok| acc + rho[(oi + ok, oj + ok)])
    });
    DensityMatrix::new(reduced)
}
