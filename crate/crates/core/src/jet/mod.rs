//! Truncated multivariate Taylor series ("jets").
//!
//! A jet of order `R` in `n` variables stores every coefficient of total
//! degree at most `R`, Taylor-normalized: the coefficient at multi-index
//! `alpha` is `d^alpha f / alpha!` at the expansion point. Products are plain
//! truncated convolutions; division, square roots and the elementary
//! functions are solved degree by degree.

mod layout;
mod multi_index;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use layout::{layout, JetLayout};
pub use multi_index::MultiIndex;

/// Absolute floor on the constant term of a divisor.
pub const DIV_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("jet shape mismatch: ({0}, {1}) vs ({2}, {3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("division by a jet with constant term {0:e}")]
    SingularDivision(f64),
    #[error("square root of a jet with non-positive constant term {0:e}")]
    NonPositiveSqrt(f64),
    #[error("multi-index {alpha:?} outside a jet of order {order}")]
    OutOfTruncation { alpha: MultiIndex, order: usize },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
}

/// Univariate functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Elementary::Sin => x.sin(),
            Elementary::Cos => x.cos(),
            Elementary::Exp => x.exp(),
        }
    }

    /// Taylor coefficients `f^(k)(x) / k!` for `k = 0..=order`.
    fn series(self, x: f64, order: usize) -> Vec<f64> {
        let (s, c) = x.sin_cos();
        let mut out = Vec::with_capacity(order + 1);
        let mut inv_fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                inv_fact /= k as f64;
            }
            let d = match self {
                Elementary::Exp => x.exp(),
                Elementary::Sin => [s, c, -s, -c][k % 4],
                Elementary::Cos => [c, -s, -c, s][k % 4],
            };
            out.push(d * inv_fact);
        }
        out
    }
}

/// A truncated Taylor expansion of a scalar function of `num_vars` variables.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn zeros(num_vars: usize, order: usize) -> Self {
        let layout = layout(num_vars, order);
        let coeffs = vec![0.0; layout.len()];
        Self { layout, coeffs }
    }

    pub fn constant(value: f64, num_vars: usize, order: usize) -> Self {
        let mut jet = Self::zeros(num_vars, order);
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate function `u_index` expanded at `center`.
    pub fn variable(
        index: usize,
        center: f64,
        num_vars: usize,
        order: usize,
    ) -> Result<Self, JetError> {
        if index >= num_vars {
            return Err(JetError::VariableOutOfRange { index, num_vars });
        }
        let mut jet = Self::constant(center, num_vars, order);
        if order >= 1 {
            let slot = jet.layout.position(&MultiIndex::unit(num_vars, index));
            jet.coeffs[slot.expect("first-order slot exists")] = 1.0;
        }
        Ok(jet)
    }

    /// Builds a jet from Taylor-normalized coefficients in graded-lex order.
    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: Vec<f64>) -> Result<Self, JetError> {
        let layout = layout(num_vars, order);
        if coeffs.len() != layout.len() {
            return Err(JetError::CoefficientCount {
                expected: layout.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { layout, coeffs })
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Multi-indices matching `coeffs()` slot by slot.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.layout.indices
    }

    /// Value at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<f64> {
        self.layout.position(alpha).map(|k| self.coeffs[k])
    }

    fn same_shape(&self, other: &Self) -> Result<(), JetError> {
        if self.num_vars() == other.num_vars() && self.order() == other.order() {
            Ok(())
        } else {
            Err(JetError::ShapeMismatch(
                self.num_vars(),
                self.order(),
                other.num_vars(),
                other.order(),
            ))
        }
    }

    fn with_coeffs(&self, coeffs: Vec<f64>) -> Self {
        Self {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &Self) -> Result<Self, JetError> {
        self.same_shape(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &Self) -> Result<Self, JetError> {
        self.same_shape(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a * s).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Truncated Cauchy product.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &Self) -> Result<Self, JetError> {
        self.same_shape(other)?;
        let coeffs = self
            .layout
            .products
            .iter()
            .map(|pairs| {
                pairs
                    .iter()
                    .map(|&(i, j)| self.coeffs[i] * other.coeffs[j])
                    .sum()
            })
            .collect();
        Ok(self.with_coeffs(coeffs))
    }

    /// `self / other`, solved one coefficient at a time in graded order.
    #[allow(clippy::should_implement_trait)]
    pub fn div(&self, other: &Self) -> Result<Self, JetError> {
        self.same_shape(other)?;
        let b0 = other.coeffs[0];
        if b0.is_nan() || b0.abs() <= DIV_FLOOR {
            return Err(JetError::SingularDivision(b0));
        }
        let mut q = vec![0.0; self.coeffs.len()];
        for (k, pairs) in self.layout.products.iter().enumerate() {
            let mut acc = self.coeffs[k];
            for &(i, j) in pairs {
                if i != 0 {
                    acc -= other.coeffs[i] * q[j];
                }
            }
            q[k] = acc / b0;
        }
        Ok(self.with_coeffs(q))
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let a0 = self.coeffs[0];
        if a0.is_nan() || a0 <= 0.0 {
            return Err(JetError::NonPositiveSqrt(a0));
        }
        let mut s = vec![0.0; self.coeffs.len()];
        s[0] = a0.sqrt();
        let two_s0 = 2.0 * s[0];
        for (k, pairs) in self.layout.products.iter().enumerate().skip(1) {
            let mut acc = self.coeffs[k];
            for &(i, j) in pairs {
                if i != 0 && j != 0 {
                    acc -= s[i] * s[j];
                }
            }
            s[k] = acc / two_s0;
        }
        Ok(self.with_coeffs(s))
    }

    /// Non-negative integer power by repeated squaring.
    pub fn powi(&self, exponent: u32) -> Self {
        let mut result = Self::constant(1.0, self.num_vars(), self.order());
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same shape");
            }
        }
        result
    }

    /// `func(self)`: the univariate series of `func` at the constant term,
    /// evaluated on the nilpotent remainder with Horner's rule.
    pub fn elementary(&self, func: Elementary) -> Self {
        let series = func.series(self.coeffs[0], self.order());
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut acc = Self::constant(series[self.order()], self.num_vars(), self.order());
        for &c in series.iter().rev().skip(1) {
            acc = acc.mul(&h).expect("same shape").add_constant(c);
        }
        acc
    }

    pub fn sin(&self) -> Self {
        self.elementary(Elementary::Sin)
    }

    pub fn cos(&self) -> Self {
        self.elementary(Elementary::Cos)
    }

    pub fn exp(&self) -> Self {
        self.elementary(Elementary::Exp)
    }

    /// The partial derivative `d^alpha` at the expansion point.
    pub fn derivative(&self, alpha: &MultiIndex) -> Result<f64, JetError> {
        match self.layout.position(alpha) {
            Some(k) => Ok(alpha.factorial() * self.coeffs[k]),
            None => Err(JetError::OutOfTruncation {
                alpha: alpha.clone(),
                order: self.order(),
            }),
        }
    }

    /// `d/du_var` at the expansion point.
    pub fn first_order(&self, var: usize) -> f64 {
        if self.order() == 0 || var >= self.num_vars() {
            return 0.0;
        }
        self.coeffs[1 + var]
    }

    /// The jet of `d^alpha f`, one order shorter per differentiation.
    pub fn differentiate(&self, alpha: &MultiIndex) -> Result<Self, JetError> {
        let shift = alpha.degree();
        if alpha.num_vars() != self.num_vars() || shift > self.order() {
            return Err(JetError::OutOfTruncation {
                alpha: alpha.clone(),
                order: self.order(),
            });
        }
        let mut out = Self::zeros(self.num_vars(), self.order() - shift);
        for (k, beta) in out.layout.indices.iter().enumerate() {
            let src = beta.plus(alpha);
            let slot = self.layout.position(&src).expect("within truncation");
            out.coeffs[k] = self.coeffs[slot] * src.factorial() / beta.factorial();
        }
        Ok(out)
    }

    /// Drops every coefficient above `new_order`.
    pub fn truncate(&self, new_order: usize) -> Result<Self, JetError> {
        if new_order > self.order() {
            return Err(JetError::OutOfTruncation {
                alpha: MultiIndex::zero(self.num_vars()),
                order: self.order(),
            });
        }
        let layout = layout(self.num_vars(), new_order);
        let coeffs = self.coeffs[..layout.len()].to_vec();
        Ok(Self { layout, coeffs })
    }

    /// Coefficients of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> &[f64] {
        if d > self.order() {
            return &[];
        }
        let starts = &self.layout.block_start;
        &self.coeffs[starts[d]..starts[d + 1]]
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars() == other.num_vars()
            && self.order() == other.order()
            && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("num_vars", &self.num_vars())
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}
