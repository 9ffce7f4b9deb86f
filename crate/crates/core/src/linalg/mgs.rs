//! Modified Gram-Schmidt with greedy column pivoting.
//!
//! At every step the remaining column with the largest residual norm is
//! accepted, provided that norm exceeds `rel_tol * max(1, largest initial
//! column norm)`. Ties within `1e-12` relative go to the lowest column index.
//! The jet-valued variant makes the same decisions from the values at the
//! base point and carries the whole Taylor expansion along, so its constant
//! terms reproduce the point-wise result operation for operation.

use super::{dot, norm, JetVec, LinalgError, RankTolerance};

const TIE_REL: f64 = 1e-12;

/// Result of a pivoted Gram-Schmidt pass over real columns.
#[derive(Debug, Clone)]
pub struct MgsOutcome {
    pub basis: Vec<Vec<f64>>,
    /// Accepted column indices, in acceptance order.
    pub pivots: Vec<usize>,
    /// Residual norm of each pivot when it was accepted.
    pub accepted_norms: Vec<f64>,
    /// Largest residual norm left among rejected columns (0 if none).
    pub largest_rejected: f64,
    pub threshold: f64,
}

impl MgsOutcome {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Whether any accept/reject decision sat within a factor of ten of the threshold.
    pub fn ill_conditioned(&self) -> bool {
        self.accepted_norms
            .iter()
            .chain(std::iter::once(&self.largest_rejected))
            .any(|&q| RankTolerance::near_threshold(q, self.threshold))
    }
}

fn pick_pivot(norms: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, nrm) in norms {
        match best {
            Some((_, b)) if nrm <= b * (1.0 + TIE_REL) => {}
            _ => best = Some((i, nrm)),
        }
    }
    best
}

fn subtract_projection(v: &mut [f64], b: &[f64]) {
    let c = dot(v, b);
    for (x, y) in v.iter_mut().zip(b) {
        *x -= c * y;
    }
}

/// Orthonormalizes `columns` after removing the span of the orthonormal
/// list `against`. The returned basis is orthogonal to `against`.
pub fn mgs_pivoted(
    columns: &[Vec<f64>],
    against: &[Vec<f64>],
    tol: RankTolerance,
) -> Result<MgsOutcome, LinalgError> {
    let dim = columns.first().or(against.first()).map_or(0, Vec::len);
    for c in columns.iter().chain(against) {
        if c.len() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: c.len(),
            });
        }
    }
    let scale = columns.iter().map(|c| norm(c)).fold(1.0, f64::max);
    let threshold = tol.value() * scale;

    let mut residuals: Vec<Vec<f64>> = columns.to_vec();
    for r in residuals.iter_mut() {
        for b in against {
            subtract_projection(r, b);
        }
    }
    let mut open = vec![true; columns.len()];
    let mut outcome = MgsOutcome {
        basis: Vec::new(),
        pivots: Vec::new(),
        accepted_norms: Vec::new(),
        largest_rejected: 0.0,
        threshold,
    };

    loop {
        let best = pick_pivot(
            residuals
                .iter()
                .enumerate()
                .filter(|(i, _)| open[*i])
                .map(|(i, r)| (i, norm(r))),
        );
        let Some((p, p_norm)) = best else { break };
        if p_norm <= threshold {
            outcome.largest_rejected = p_norm;
            break;
        }
        open[p] = false;
        let mut v = residuals[p].clone();
        for b in against.iter().chain(&outcome.basis) {
            subtract_projection(&mut v, b);
        }
        let v_norm = norm(&v);
        let b: Vec<f64> = v.iter().map(|x| x / v_norm).collect();
        for (i, r) in residuals.iter_mut().enumerate() {
            if open[i] {
                subtract_projection(r, &b);
            }
        }
        outcome.basis.push(b);
        outcome.pivots.push(p);
        outcome.accepted_norms.push(p_norm);
    }
    Ok(outcome)
}

/// Decisions taken inside one degree block of a graded jet Gram-Schmidt.
#[derive(Debug, Clone)]
pub struct BlockDecision {
    pub label: usize,
    pub accepted_norms: Vec<f64>,
    pub largest_rejected: f64,
}

/// Orthonormal frame fields produced by [`mgs_pivoted_jets_graded`].
#[derive(Debug, Clone)]
pub struct JetFrame {
    pub fields: Vec<JetVec>,
    pub pivots: Vec<usize>,
    /// Block label of the column each field came from.
    pub level_of: Vec<usize>,
    pub blocks: Vec<BlockDecision>,
    pub threshold: f64,
}

impl JetFrame {
    /// Fields whose pivot came from block `label`.
    pub fn fields_in(&self, label: usize) -> Vec<&JetVec> {
        self.fields
            .iter()
            .zip(&self.level_of)
            .filter(|(_, &l)| l == label)
            .map(|(f, _)| f)
            .collect()
    }

    pub fn block(&self, label: usize) -> Option<&BlockDecision> {
        self.blocks.iter().find(|b| b.label == label)
    }

    pub fn block_ill_conditioned(&self, label: usize) -> bool {
        self.block(label).is_some_and(|b| {
            b.accepted_norms
                .iter()
                .chain(std::iter::once(&b.largest_rejected))
                .any(|&q| RankTolerance::near_threshold(q, self.threshold))
        })
    }
}

/// Jet-valued pivoted Gram-Schmidt over a single block of columns.
pub fn mgs_pivoted_jets(columns: &[JetVec], tol: RankTolerance) -> Result<JetFrame, LinalgError> {
    mgs_pivoted_jets_graded(columns, &vec![0; columns.len()], tol)
}

/// Jet-valued pivoted Gram-Schmidt with columns grouped into labelled blocks.
///
/// Blocks are processed in increasing label order and pivoting is greedy
/// within a block only, so the output is graded: every field from block `l`
/// is orthogonal to the fields of all earlier blocks. Columns may have
/// different jet orders; a projection onto a field is carried out at the
/// smaller of the two orders.
pub fn mgs_pivoted_jets_graded(
    columns: &[JetVec],
    labels: &[usize],
    tol: RankTolerance,
) -> Result<JetFrame, LinalgError> {
    if labels.len() != columns.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: columns.len(),
            got: labels.len(),
        });
    }
    let dim = columns.first().map_or(0, JetVec::dim);
    for c in columns {
        if c.dim() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: c.dim(),
            });
        }
    }
    let scale = columns.iter().map(|c| norm(&c.value())).fold(1.0, f64::max);
    let threshold = tol.value() * scale;

    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();

    let mut residuals: Vec<JetVec> = columns.to_vec();
    let mut open = vec![true; columns.len()];
    let mut frame = JetFrame {
        fields: Vec::new(),
        pivots: Vec::new(),
        level_of: Vec::new(),
        blocks: Vec::new(),
        threshold,
    };

    for &label in &distinct {
        let mut decision = BlockDecision {
            label,
            accepted_norms: Vec::new(),
            largest_rejected: 0.0,
        };
        loop {
            let best = pick_pivot(
                residuals
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| open[*i] && labels[*i] == label)
                    .map(|(i, r)| (i, norm(&r.value()))),
            );
            let Some((p, p_norm)) = best else { break };
            if p_norm <= threshold {
                decision.largest_rejected = p_norm;
                break;
            }
            open[p] = false;
            let mut v = residuals[p].clone();
            for b in &frame.fields {
                let b = b.truncate(v.order())?;
                v = v.sub_scaled(&v.dot(&b)?, &b)?;
            }
            let v_norm = v.dot(&v)?.sqrt()?;
            let b = v.div_scalar(&v_norm)?;
            for (i, r) in residuals.iter_mut().enumerate() {
                if open[i] && labels[i] >= label {
                    let bt = b.truncate(r.order().min(b.order()))?;
                    let rt = if r.order() > bt.order() {
                        r.truncate(bt.order())?
                    } else {
                        r.clone()
                    };
                    *r = rt.sub_scaled(&rt.dot(&bt)?, &bt)?;
                }
            }
            frame.fields.push(b);
            frame.pivots.push(p);
            frame.level_of.push(label);
            decision.accepted_norms.push(p_norm);
        }
        // Columns left over in this block are never revisited.
        for (i, &l) in labels.iter().enumerate() {
            if l == label {
                open[i] = false;
            }
        }
        frame.blocks.push(decision);
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use crate::linalg::orthonormality_defect;
    use approx::assert_relative_eq;

    fn tol() -> RankTolerance {
        RankTolerance::default()
    }

    #[test]
    fn plane_from_three_columns() {
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        let out = mgs_pivoted(&cols, &[], tol()).unwrap();
        // (2,0,0) has the largest residual, so it is taken before (1,0,0).
        assert_eq!(out.pivots, vec![1, 2]);
        assert!(orthonormality_defect(&out.basis) < 1e-15);
        assert!(out.basis.iter().all(|b| b[2] == 0.0));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let cols = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let out = mgs_pivoted(&cols, &[], tol()).unwrap();
        assert_eq!(out.pivots, vec![0, 1]);
    }

    #[test]
    fn zero_columns_give_empty_basis() {
        let cols = vec![vec![0.0; 4]; 3];
        let out = mgs_pivoted(&cols, &[], tol()).unwrap();
        assert!(out.basis.is_empty());
        assert!(!out.ill_conditioned());
    }

    #[test]
    fn result_is_orthogonal_to_against() {
        let against = vec![vec![1.0, 0.0, 0.0]];
        let cols = vec![vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]];
        let out = mgs_pivoted(&cols, &against, tol()).unwrap();
        assert_eq!(out.rank(), 1);
        assert_relative_eq!(out.basis[0][1], 1.0);
        assert_eq!(out.basis[0][0], 0.0);
    }

    fn jv(entries: Vec<Jet>) -> JetVec {
        JetVec::new(entries).unwrap()
    }

    #[test]
    fn unit_direction_field_normalizes_exactly() {
        let u = Jet::variable(0, 0.0, 1, 2).unwrap();
        let col = jv(vec![u.add_constant(1.0), Jet::zeros(1, 2)]);
        let frame = mgs_pivoted_jets(&[col], tol()).unwrap();
        assert_eq!(frame.fields.len(), 1);
        assert_eq!(frame.fields[0].entries()[0], Jet::constant(1.0, 1, 2));
        assert_eq!(frame.fields[0].entries()[1], Jet::zeros(1, 2));
    }

    #[test]
    fn circle_tangent_field() {
        // f = (cos u, sin u); the unit tangent is (-sin u, cos u).
        let u = Jet::variable(0, 0.0, 1, 2).unwrap();
        let col = jv(vec![u.sin().neg(), u.cos()]);
        let frame = mgs_pivoted_jets(&[col], tol()).unwrap();
        let t = &frame.fields[0];
        assert_eq!(t.value(), vec![0.0, 1.0]);
        assert_relative_eq!(t.first_order(0)[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(t.first_order(0)[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dependent_jet_columns_collapse() {
        let u = Jet::variable(0, 1.0, 1, 2).unwrap();
        let v = jv(vec![u.clone(), u.powi(2)]);
        let w = jv(vec![u.scale(2.0), u.powi(2).scale(2.0)]);
        let frame = mgs_pivoted_jets(&[v, w], tol()).unwrap();
        assert_eq!(frame.fields.len(), 1);
    }

    #[test]
    fn jet_constant_terms_match_point_version() {
        let n = 2;
        let u1 = Jet::variable(0, 0.3, n, 2).unwrap();
        let u2 = Jet::variable(1, -0.2, n, 2).unwrap();
        let cols = vec![
            jv(vec![u1.clone(), u2.clone(), u1.mul(&u2).unwrap()]),
            jv(vec![u2.sin(), u1.exp(), u1.clone()]),
            jv(vec![u1.powi(2), u2.cos(), u2.clone()]),
        ];
        let frame = mgs_pivoted_jets(&cols, tol()).unwrap();
        let values: Vec<Vec<f64>> = cols.iter().map(JetVec::value).collect();
        let point = mgs_pivoted(&values, &[], tol()).unwrap();
        assert_eq!(frame.pivots, point.pivots);
        for (f, b) in frame.fields.iter().zip(&point.basis) {
            assert_eq!(&f.value(), b);
        }
    }

    #[test]
    fn jet_fields_stay_orthonormal_nearby() {
        let n = 2;
        let u1 = Jet::variable(0, 0.1, n, 3).unwrap();
        let u2 = Jet::variable(1, 0.4, n, 3).unwrap();
        let cols = vec![
            jv(vec![u1.cos(), u2.clone(), u1.mul(&u2).unwrap()]),
            jv(vec![u2.sin(), u1.exp(), u1.clone()]),
        ];
        let frame = mgs_pivoted_jets(&cols, tol()).unwrap();
        for a in &frame.fields {
            for b in &frame.fields {
                let g = a.dot(b).unwrap();
                let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                assert!((g.value() - target).abs() < 1e-14);
                for c in &g.coeffs()[1..] {
                    assert!(c.abs() < 1e-12, "{c}");
                }
            }
        }
    }

    #[test]
    fn graded_blocks_do_not_mix() {
        // Block 1 has a small column, block 0 a large one along the same axis.
        let c0 = jv(vec![Jet::constant(1.0, 1, 1), Jet::constant(0.0, 1, 1)]);
        let c1 = jv(vec![Jet::constant(5.0, 1, 1), Jet::constant(0.5, 1, 1)]);
        let frame = mgs_pivoted_jets_graded(&[c1, c0], &[1, 0], tol()).unwrap();
        assert_eq!(frame.pivots, vec![1, 0]);
        assert_eq!(frame.level_of, vec![0, 1]);
        assert_eq!(frame.fields_in(1)[0].value(), vec![0.0, 1.0]);
    }
}
