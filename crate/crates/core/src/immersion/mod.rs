//! Parametrized immersions `f: R^n -> R^m` given by one expression per
//! ambient coordinate.

mod expr;
mod gallery;
mod generators;
mod spec_file;

use thiserror::Error;

use crate::jet::{Jet, JetError};
use crate::linalg::Mat;

pub use expr::{parse_expression, Expr, ParseError};
pub use gallery::{gallery, gallery_names};
pub use generators::{
    extremal_ambient_dim, extremal_example, random_corpus, random_polynomial_immersion,
};
pub use spec_file::{load_spec, load_spec_file, save_spec, ImmersionSpec, DEFAULT_MAX_ORDER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImmersionError {
    #[error("component {component}: {source}")]
    Parse {
        component: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {message}")]
    Spec { line: usize, message: String },
    #[error("ambient dimension {ambient} is smaller than domain dimension {domain}")]
    AmbientTooSmall { domain: usize, ambient: usize },
    #[error("domain dimension must be at least 1")]
    EmptyDomain,
    #[error("component {component} uses u{var} but the domain has {domain} variable(s)")]
    VariableOutOfRange {
        component: usize,
        var: usize,
        domain: usize,
    },
    #[error("component {0} contains a non-finite literal")]
    NonFiniteLiteral(usize),
    #[error("point has {got} coordinate(s), expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("extremal coefficient {index} is zero")]
    ZeroCoefficient { index: usize },
    #[error("expected {expected} extremal coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("jet evaluation failed: {0}")]
    Jet(#[from] JetError),
    #[error("{0}")]
    Io(String),
}

/// An immersion given by `m` component expressions in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Immersion {
    name: String,
    dim_domain: usize,
    components: Vec<Expr>,
}

impl Immersion {
    pub fn new(
        name: impl Into<String>,
        dim_domain: usize,
        components: Vec<Expr>,
    ) -> Result<Self, ImmersionError> {
        if dim_domain == 0 {
            return Err(ImmersionError::EmptyDomain);
        }
        if components.len() < dim_domain {
            return Err(ImmersionError::AmbientTooSmall {
                domain: dim_domain,
                ambient: components.len(),
            });
        }
        for (c, e) in components.iter().enumerate() {
            if let Some(v) = e.max_var() {
                if v >= dim_domain {
                    return Err(ImmersionError::VariableOutOfRange {
                        component: c,
                        var: v + 1,
                        domain: dim_domain,
                    });
                }
            }
            if !e.all_literals_finite() {
                return Err(ImmersionError::NonFiniteLiteral(c));
            }
        }
        Ok(Self {
            name: name.into(),
            dim_domain,
            components,
        })
    }

    /// Parses one expression per component.
    pub fn parse<S: AsRef<str>>(
        name: impl Into<String>,
        dim_domain: usize,
        components: &[S],
    ) -> Result<Self, ImmersionError> {
        let exprs = components
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_expression(s.as_ref(), dim_domain).map_err(|source| ImmersionError::Parse {
                    component: i,
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, dim_domain, exprs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_domain(&self) -> usize {
        self.dim_domain
    }

    pub fn dim_ambient(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    fn check_point(&self, point: &[f64]) -> Result<(), ImmersionError> {
        if point.len() != self.dim_domain {
            return Err(ImmersionError::PointDimension {
                expected: self.dim_domain,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// `f(point)` in plain floating point.
    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, ImmersionError> {
        self.check_point(point)?;
        Ok(self.components.iter().map(|e| e.eval(point)).collect())
    }

    /// Jets of every component at `point`, of the given order.
    pub fn eval_jet(&self, point: &[f64], order: usize) -> Result<Vec<Jet>, ImmersionError> {
        self.eval_jet_reparametrized(point, &Mat::identity(self.dim_domain), order)
    }

    /// Jets of `v -> f(point + rotation * v)` at `v = 0`.
    pub fn eval_jet_reparametrized(
        &self,
        point: &[f64],
        rotation: &Mat,
        order: usize,
    ) -> Result<Vec<Jet>, ImmersionError> {
        self.check_point(point)?;
        let n = self.dim_domain;
        if rotation.rows() != n || rotation.cols() != n {
            return Err(ImmersionError::InvalidArgument(format!(
                "reparametrization must be {n}x{n}"
            )));
        }
        let seeds: Vec<Jet> = (0..n)
            .map(|b| Jet::variable(b, 0.0, n, order))
            .collect::<Result<_, _>>()?;
        let mut vars = Vec::with_capacity(n);
        for (a, &p) in point.iter().enumerate() {
            let mut u = Jet::constant(p, n, order);
            for (b, seed) in seeds.iter().enumerate() {
                let q = rotation[(a, b)];
                if q != 0.0 {
                    u = u.add(&seed.scale(q))?;
                }
            }
            vars.push(u);
        }
        Ok(self
            .components
            .iter()
            .map(|e| e.eval_jet(&vars))
            .collect::<Result<_, _>>()?)
    }
}
