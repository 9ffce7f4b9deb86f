use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::immersion::Immersion;
use crate::jet::MultiIndex;
use crate::linalg::{dot, mgs_pivoted, orthonormal_complement, span_distance, Mat, RankTolerance};

use super::analysis::{analyze_jets, Analysis, OsculatingFlag};
use super::AnalysisError;

/// Largest asymmetry of the second fundamental form, relative to
/// `max(1, max |h|)`.
///
/// `h^alpha_ij` is formed twice: from the tangent frame fields as
/// `N_alpha . nabla_{Y_j} Y_i`, and from coordinates as
/// `N_alpha . sum_ab c_ia c_jb d_a d_b f`. Both must be symmetric and agree.
pub fn symmetry_residual(analysis: &Analysis) -> Result<f64, AnalysisError> {
    let base = &analysis.frame.base;
    let n = analysis.n;
    let normals = orthonormal_complement(analysis.m, &base.tangent)?;
    let mut second = vec![vec![Vec::new(); n]; n];
    for (a, row) in second.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let alpha = MultiIndex::unit(n, a).plus(&MultiIndex::unit(n, b));
            *slot = analysis
                .derivative(&alpha)
                .ok_or(AnalysisError::JetOrderExhausted { level: 1 })?
                .to_vec();
        }
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for normal in &normals {
        let mut from_fields = vec![vec![0.0; n]; n];
        let mut from_coords = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let d = base.directional_derivative(j, &base.tangent_fields[i]);
                from_fields[i][j] = dot(normal, &d);
                let mut h = 0.0;
                for (a, row) in second.iter().enumerate() {
                    for (b, d2) in row.iter().enumerate() {
                        h += base.coeffs_c[i][a] * base.coeffs_c[j][b] * dot(normal, d2);
                    }
                }
                from_coords[i][j] = h;
            }
        }
        for i in 0..n {
            for j in 0..n {
                scale = scale
                    .max(from_fields[i][j].abs())
                    .max(from_coords[i][j].abs());
                worst = worst.max((from_fields[i][j] - from_coords[i][j]).abs());
                if i < j {
                    worst = worst
                        .max((from_fields[i][j] - from_fields[j][i]).abs())
                        .max((from_coords[i][j] - from_coords[j][i]).abs());
                }
            }
        }
    }
    Ok(worst / scale)
}

/// [`symmetry_residual`] for `im` at `point`.
pub fn verify_symmetry(
    im: &Immersion,
    point: &[f64],
    tol: RankTolerance,
) -> Result<f64, AnalysisError> {
    let jets = im.eval_jet(point, 2)?;
    symmetry_residual(&analyze_jets(&jets, 1, tol)?)
}

/// Projector distance between the order-`r` normal vectors and the
/// orthonormalized projections of all `d^alpha f`, `|alpha| = r + 1`, off
/// `O_{r-1}`.
pub fn verify_eigen_span(analysis: &Analysis, r: usize) -> Result<f64, AnalysisError> {
    let Some(level) = r.checked_sub(1).and_then(|i| analysis.flag.levels.get(i)) else {
        return Ok(0.0);
    };
    let previous = &analysis.osculating_bases[r - 1];
    let columns = analysis.derivatives_of_degree(r + 1);
    let projected = mgs_pivoted(&columns, previous, analysis.tol)?;
    if projected.basis.is_empty() && level.normal_vectors.is_empty() {
        return Ok(0.0);
    }
    Ok(span_distance(&level.normal_vectors, &projected.basis)?)
}

/// A seeded orthogonal `n x n` matrix, reflections included.
pub fn random_orthogonal(n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = RankTolerance::new(1e-6).expect("valid tolerance");
    loop {
        let columns: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        let outcome = mgs_pivoted(&columns, &[], tol).expect("square input");
        if outcome.rank() == n {
            return Mat::from_columns(n, &outcome.basis).expect("square basis");
        }
    }
}

/// Compares two flags order by order: sorted spectra by relative
/// sup-distance and normal spaces by projector distance. Any difference in
/// level count or rank adds 1.
pub fn frame_invariance_residual(
    a: &OsculatingFlag,
    b: &OsculatingFlag,
) -> Result<f64, AnalysisError> {
    let mut worst: f64 = 0.0;
    if a.levels.len() != b.levels.len() {
        worst += 1.0;
    }
    for (la, lb) in a.levels.iter().zip(&b.levels) {
        let mut r = 0.0;
        if la.rank_k != lb.rank_k {
            r += 1.0;
        }
        let top = la
            .curvatures
            .first()
            .copied()
            .unwrap_or(0.0)
            .max(lb.curvatures.first().copied().unwrap_or(0.0));
        if top > 0.0 {
            let diff = la
                .curvatures
                .iter()
                .zip(&lb.curvatures)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            r += diff / top;
        }
        r += span_distance(&la.normal_vectors, &lb.normal_vectors)?;
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Reanalyzes `v -> f(point + q v)` and compares against the plain analysis.
pub fn verify_frame_invariance_with(
    im: &Immersion,
    point: &[f64],
    max_order: usize,
    q: &Mat,
    tol: RankTolerance,
) -> Result<f64, AnalysisError> {
    let plain = analyze_jets(&im.eval_jet(point, max_order + 1)?, max_order, tol)?;
    let rotated = analyze_jets(
        &im.eval_jet_reparametrized(point, q, max_order + 1)?,
        max_order,
        tol,
    )?;
    frame_invariance_residual(&plain.flag, &rotated.flag)
}

/// [`verify_frame_invariance_with`] under a seeded random orthogonal matrix.
pub fn verify_frame_invariance(
    im: &Immersion,
    point: &[f64],
    max_order: usize,
    seed: u64,
    tol: RankTolerance,
) -> Result<f64, AnalysisError> {
    let q = random_orthogonal(im.dim_domain(), seed);
    verify_frame_invariance_with(im, point, max_order, &q, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{extremal_example, gallery};
    use crate::linalg::orthonormality_defect;

    fn tol() -> RankTolerance {
        RankTolerance::default()
    }

    #[test]
    fn random_orthogonal_is_orthogonal_and_seeded() {
        for n in 1..5 {
            let q = random_orthogonal(n, 9);
            let cols: Vec<Vec<f64>> = (0..n).map(|j| q.column(j)).collect();
            assert!(orthonormality_defect(&cols) < 1e-14);
            assert_eq!(q, random_orthogonal(n, 9));
        }
    }

    #[test]
    fn extremal_symmetry_is_exact() {
        let im = extremal_example(2, 1, None).unwrap();
        assert!(verify_symmetry(&im, &[0.0, 0.0], tol()).unwrap() < 1e-15);
    }

    #[test]
    fn gallery_symmetry() {
        for spec in gallery() {
            let r = verify_symmetry(&spec.immersion, &spec.base_point, tol()).unwrap();
            assert!(r <= 1e-9, "{}: {r}", spec.immersion.name());
        }
    }

    #[test]
    fn helix_eigen_span() {
        let im = Immersion::parse("h", 1, &["cos(u1)", "sin(u1)", "u1"]).unwrap();
        let a = analyze_jets(&im.eval_jet(&[0.0], 3).unwrap(), 2, tol()).unwrap();
        assert!(verify_eigen_span(&a, 1).unwrap() <= 1e-10);
        assert!(verify_eigen_span(&a, 2).unwrap() <= 1e-10);
    }

    #[test]
    fn extremal_eigen_span() {
        let im = extremal_example(2, 2, None).unwrap();
        let a = analyze_jets(&im.eval_jet(&[0.0, 0.0], 3).unwrap(), 2, tol()).unwrap();
        assert_eq!(a.flag.levels[1].normal_vectors.len(), 4);
        assert!(verify_eigen_span(&a, 2).unwrap() <= 1e-12);
    }

    #[test]
    fn flat_level_has_zero_span_residual() {
        let im = Immersion::parse("plane", 2, &["u1", "u2", "0"]).unwrap();
        let a = analyze_jets(&im.eval_jet(&[0.0, 0.0], 2).unwrap(), 1, tol()).unwrap();
        assert_eq!(verify_eigen_span(&a, 1).unwrap(), 0.0);
    }

    #[test]
    fn identity_rotation_is_exact() {
        let im =
            Immersion::parse("s", 2, &["cos(u1)*cos(u2)", "sin(u1)*cos(u2)", "sin(u2)"]).unwrap();
        let r =
            verify_frame_invariance_with(&im, &[0.2, 0.1], 2, &Mat::identity(2), tol()).unwrap();
        assert_eq!(r, 0.0);
        let r = verify_frame_invariance(&im, &[0.2, 0.1], 2, 3, tol()).unwrap();
        assert!(r <= 1e-10, "{r}");
    }

    #[test]
    fn helix_reversal() {
        let im = Immersion::parse("h", 1, &["cos(u1)", "sin(u1)", "u1"]).unwrap();
        let q = Mat::from_rows(&[vec![-1.0]]).unwrap();
        assert!(verify_frame_invariance_with(&im, &[0.0], 2, &q, tol()).unwrap() <= 1e-12);
    }

    #[test]
    fn mismatched_flags_score_one() {
        let im = Immersion::parse("h", 1, &["cos(u1)", "sin(u1)", "u1"]).unwrap();
        let a = analyze_jets(&im.eval_jet(&[0.0], 3).unwrap(), 2, tol()).unwrap();
        let b = analyze_jets(&im.eval_jet(&[0.0], 2).unwrap(), 1, tol()).unwrap();
        assert!(frame_invariance_residual(&a.flag, &b.flag).unwrap() >= 1.0);
    }
}
