//! Named local operators used to build couplings.
//!
//! Basis index 0 is the lowest level of every subsystem. For qubits the
//! Pauli set is written in that energy basis: `sigma_plus = |1⟩⟨0|` raises,
//! `sigma_z = |1⟩⟨1| − |0⟩⟨0|`, and `sigma_y = i(σ₋ − σ₊)`, so
//! `σx σy = i σz` still holds.

use alloc::format;
use alloc::string::String;

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::qmat::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum LocalOperator {
    Identity,
    SigmaX,
    SigmaY,
    SigmaZ,
    SigmaPlus,
    SigmaMinus,
    /// Truncated annihilation operator `a`.
    Lower,
    /// Truncated creation operator `a†`.
    Raise,
    /// `(a + a†)/√2`.
    Position,
    /// `i(a† − a)/√2`.
    Momentum,
    /// `a† a`.
    Number,
    Matrix(CMatrix),
}

impl LocalOperator {
    pub const NAMES: [&'static str; 11] = [
        "identity", "sigma_x", "sigma_y", "sigma_z", "sigma_plus", "sigma_minus", "a", "a_dag", "x", "p", "n",
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "identity" | "id" => LocalOperator::Identity,
            "sigma_x" | "sx" => LocalOperator::SigmaX,
            "sigma_y" | "sy" => LocalOperator::SigmaY,
            "sigma_z" | "sz" => LocalOperator::SigmaZ,
            "sigma_plus" | "sp" => LocalOperator::SigmaPlus,
            "sigma_minus" | "sm" => LocalOperator::SigmaMinus,
            "a" | "lower" => LocalOperator::Lower,
            "a_dag" | "raise" => LocalOperator::Raise,
            "x" | "position" => LocalOperator::Position,
            "p" | "momentum" => LocalOperator::Momentum,
            "n" | "number" => LocalOperator::Number,
            other => return Err(Error::UnknownName(String::from(other))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LocalOperator::Identity => "identity",
            LocalOperator::SigmaX => "sigma_x",
            LocalOperator::SigmaY => "sigma_y",
            LocalOperator::SigmaZ => "sigma_z",
            LocalOperator::SigmaPlus => "sigma_plus",
            LocalOperator::SigmaMinus => "sigma_minus",
            LocalOperator::Lower => "a",
            LocalOperator::Raise => "a_dag",
            LocalOperator::Position => "x",
            LocalOperator::Momentum => "p",
            LocalOperator::Number => "n",
            LocalOperator::Matrix(_) => "matrix",
        }
    }

    /// Matrix representation on a `dim`-level subsystem.
    pub fn matrix(&self, dim: usize) -> Result<CMatrix> {
        let zero = Complex64::new(0.0, 0.0);
        let lower = || {
            CMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { Complex64::new((j as f64).sqrt(), 0.0) } else { zero })
        };
        let qubit_only = |m: CMatrix| {
            if dim != 2 {
                return Err(Error::Dimension(format!("{} needs a 2-level subsystem, got {dim}", self.name())));
            }
            Ok(m)
        };
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            LocalOperator::Identity => Ok(CMatrix::identity(dim, dim)),
            LocalOperator::SigmaX => qubit_only(CMatrix::from_row_slice(2, 2, &[zero, c(1.0, 0.0), c(1.0, 0.0), zero])),
            LocalOperator::SigmaY => qubit_only(CMatrix::from_row_slice(2, 2, &[zero, c(0.0, 1.0), c(0.0, -1.0), zero])),
            LocalOperator::SigmaZ => qubit_only(CMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), zero, zero, c(1.0, 0.0)])),
            LocalOperator::SigmaPlus => qubit_only(CMatrix::from_row_slice(2, 2, &[zero, zero, c(1.0, 0.0), zero])),
            LocalOperator::SigmaMinus => qubit_only(CMatrix::from_row_slice(2, 2, &[zero, c(1.0, 0.0), zero, zero])),
            LocalOperator::Lower => Ok(lower()),
            LocalOperator::Raise => Ok(lower().adjoint()),
            LocalOperator::Position => {
                let a = lower();
                Ok((&a + a.adjoint()).scale(core::f64::consts::FRAC_1_SQRT_2))
            }
            LocalOperator::Momentum => {
                let a = lower();
                Ok((a.adjoint() - &a) * c(0.0, core::f64::consts::FRAC_1_SQRT_2))
            }
            LocalOperator::Number => {
                Ok(CMatrix::from_fn(dim, dim, |i, j| if i == j { c(i as f64, 0.0) } else { zero }))
            }
            LocalOperator::Matrix(m) => {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::Dimension(format!(
                        "explicit operator is {}x{}, subsystem has dim {dim}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                Ok(m.clone())
            }
        }
    }
}
