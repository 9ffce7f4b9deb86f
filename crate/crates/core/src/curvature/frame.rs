use crate::jet::{Jet, MultiIndex};
use crate::linalg::{
    dot, mgs_pivoted_jets_graded, norm, solve, JetFrame, JetVec, Mat, RankTolerance,
};

use super::AnalysisError;

/// Orthonormal tangent frame at the base point.
#[derive(Debug, Clone)]
pub struct BasePointFrame {
    /// `Y_1..Y_n` as ambient vectors.
    pub tangent: Vec<Vec<f64>>,
    /// The same frame as fields around the base point.
    pub tangent_fields: Vec<JetVec>,
    /// `coeffs_c[j][a]` with `Y_j = sum_a c_ja d_a f` at the base point.
    pub coeffs_c: Vec<Vec<f64>>,
}

impl BasePointFrame {
    pub fn dim(&self) -> usize {
        self.tangent.len()
    }

    /// `nabla_{Y_j} B` at the base point for a field `B`.
    pub fn directional_derivative(&self, j: usize, field: &JetVec) -> Vec<f64> {
        let mut out = vec![0.0; field.dim()];
        for (a, &c) in self.coeffs_c[j].iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, d) in out.iter_mut().zip(field.first_order(a)) {
                *o += c * d;
            }
        }
        out
    }

    fn build(tangent_fields: Vec<JetVec>, jacobian: &[Vec<f64>]) -> Result<Self, AnalysisError> {
        let n = jacobian.len();
        let tangent: Vec<Vec<f64>> = tangent_fields.iter().map(JetVec::value).collect();
        let mut gram = Mat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                gram[(a, b)] = dot(&jacobian[a], &jacobian[b]);
            }
        }
        let mut coeffs_c = Vec::with_capacity(n);
        for y in &tangent {
            let rhs: Vec<f64> = jacobian.iter().map(|col| dot(col, y)).collect();
            let c = solve(&gram, &rhs)?;
            let mut recon = vec![0.0; y.len()];
            for (a, &ca) in c.iter().enumerate() {
                for (r, x) in recon.iter_mut().zip(&jacobian[a]) {
                    *r += ca * x;
                }
            }
            let err = norm(&recon.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>());
            if err > 1e-10 {
                return Err(AnalysisError::NotAnImmersion { rank: 0, n });
            }
            coeffs_c.push(c);
        }
        Ok(Self {
            tangent,
            tangent_fields,
            coeffs_c,
        })
    }
}

/// Multi-indices, their derivative columns and the block label of each.
pub type DerivativeColumns = (Vec<MultiIndex>, Vec<JetVec>, Vec<usize>);

/// Columns `d^alpha f` for `1 <= |alpha| <= max_degree` as jet-valued fields,
/// with the block label `|alpha| - 1`.
pub fn derivative_columns(
    jets: &[Jet],
    max_degree: usize,
) -> Result<DerivativeColumns, AnalysisError> {
    let n = jets.first().map_or(0, Jet::num_vars);
    let alphas = MultiIndex::up_to_degree(n, 1, max_degree);
    let mut columns = Vec::with_capacity(alphas.len());
    let mut labels = Vec::with_capacity(alphas.len());
    for alpha in &alphas {
        let entries = jets
            .iter()
            .map(|j| j.differentiate(alpha))
            .collect::<Result<Vec<_>, _>>()?;
        columns.push(JetVec::new(entries)?);
        labels.push(alpha.degree() - 1);
    }
    Ok((alphas, columns, labels))
}

fn jacobian_columns(jets: &[Jet]) -> Vec<Vec<f64>> {
    let n = jets.first().map_or(0, Jet::num_vars);
    (0..n)
        .map(|a| jets.iter().map(|j| j.first_order(a)).collect())
        .collect()
}

/// Orthonormal tangent frame (point values and fields) from the first
/// partials of `f`.
pub fn tangent_frame(jets: &[Jet], tol: RankTolerance) -> Result<BasePointFrame, AnalysisError> {
    let order = jets.first().map_or(0, Jet::order);
    if order < 1 {
        return Err(AnalysisError::JetOrderExhausted { level: 0 });
    }
    let (_, columns, labels) = derivative_columns(jets, 1)?;
    let frame = mgs_pivoted_jets_graded(&columns, &labels, tol)?;
    let n = jets[0].num_vars();
    if frame.fields.len() < n {
        return Err(AnalysisError::NotAnImmersion {
            rank: frame.fields.len(),
            n,
        });
    }
    BasePointFrame::build(frame.fields, &jacobian_columns(jets))
}

/// Graded frame fields: level 0 spans the tangent space, level `l` the new
/// directions contributed by the derivatives of degree `l + 1`.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub frame: JetFrame,
    pub base: BasePointFrame,
    pub top_level: usize,
}

impl AdaptedFrame {
    pub fn level(&self, l: usize) -> Vec<&JetVec> {
        self.frame.fields_in(l)
    }

    /// Number of fields at every level `0..=top_level`.
    pub fn level_sizes(&self) -> Vec<usize> {
        (0..=self.top_level).map(|l| self.level(l).len()).collect()
    }
}

/// Runs graded jet Gram-Schmidt over all `d^alpha f` with
/// `1 <= |alpha| <= max_order + 1`. The jets must have order `max_order + 1`;
/// the degree-`d` block then carries order `max_order + 1 - d`.
pub fn adapted_frame_fields(
    jets: &[Jet],
    tol: RankTolerance,
    max_order: usize,
) -> Result<AdaptedFrame, AnalysisError> {
    let order = jets.first().map_or(0, Jet::order);
    if order < max_order + 1 {
        return Err(AnalysisError::JetOrderExhausted { level: max_order });
    }
    let (_, columns, labels) = derivative_columns(jets, max_order + 1)?;
    let frame = mgs_pivoted_jets_graded(&columns, &labels, tol)?;
    let n = jets[0].num_vars();
    let tangent_fields: Vec<JetVec> = frame.fields_in(0).into_iter().cloned().collect();
    if tangent_fields.len() < n {
        return Err(AnalysisError::NotAnImmersion {
            rank: tangent_fields.len(),
            n,
        });
    }
    let base = BasePointFrame::build(tangent_fields, &jacobian_columns(jets))?;
    Ok(AdaptedFrame {
        frame,
        base,
        top_level: max_order,
    })
}
