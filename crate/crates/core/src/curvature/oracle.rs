use crate::immersion::Immersion;
use crate::jet::{Jet, MultiIndex};
use crate::linalg::{mgs_pivoted, RankTolerance};

use super::AnalysisError;

/// Osculating dimensions straight from the partial derivatives of `f`:
/// `d_r` is the rank of `{d^alpha f(point) : 1 <= |alpha| <= r + 1}` for
/// `r = 0..=max_order`. No frames and no curvature matrices are involved.
pub fn oracle_flag_dims(
    im: &Immersion,
    point: &[f64],
    max_order: usize,
    tol: RankTolerance,
) -> Result<Vec<usize>, AnalysisError> {
    let jets = im.eval_jet(point, max_order + 1)?;
    oracle_flag_dims_from_jets(&jets, max_order, tol)
}

/// As [`oracle_flag_dims`], from jets of order at least `max_order + 1`.
pub fn oracle_flag_dims_from_jets(
    jets: &[Jet],
    max_order: usize,
    tol: RankTolerance,
) -> Result<Vec<usize>, AnalysisError> {
    let n = jets.first().map_or(0, Jet::num_vars);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut dims = Vec::with_capacity(max_order + 1);
    for r in 0..=max_order {
        for alpha in MultiIndex::of_degree(n, r + 1) {
            columns.push(
                jets.iter()
                    .map(|j| j.derivative(&alpha))
                    .collect::<Result<_, _>>()?,
            );
        }
        dims.push(mgs_pivoted(&columns, &[], tol)?.rank());
    }
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::extremal_example;

    #[test]
    fn extremal_dims() {
        let im = extremal_example(2, 2, None).unwrap();
        let dims = oracle_flag_dims(&im, &[0.0, 0.0], 2, RankTolerance::default()).unwrap();
        assert_eq!(dims, vec![2, 5, 9]);
    }

    #[test]
    fn circle_saturates() {
        let im = Immersion::parse("c", 1, &["cos(u1)", "sin(u1)"]).unwrap();
        let dims = oracle_flag_dims(&im, &[0.0], 3, RankTolerance::default()).unwrap();
        assert_eq!(dims, vec![1, 2, 2, 2]);
    }

    #[test]
    fn higher_order_contact_shows_up_late() {
        let im = Immersion::parse("flat", 1, &["u1", "u1^3"]).unwrap();
        let dims = oracle_flag_dims(&im, &[0.0], 2, RankTolerance::default()).unwrap();
        assert_eq!(dims, vec![1, 1, 2]);
    }
}
