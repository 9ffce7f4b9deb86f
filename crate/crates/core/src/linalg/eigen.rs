use super::{LinalgError, Mat, RankTolerance};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const ASYMMETRY_TOL: f64 = 1e-10;
const SIGN_FLOOR: f64 = 1e-8;

/// Spectrum of a symmetric matrix: eigenvalues in descending order and the
/// matching orthonormal eigenvectors as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl SymEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// The input is symmetrized as `(A + A^T) / 2` after checking that its
/// asymmetry is at rounding level. Sweeps run until the off-diagonal
/// Frobenius norm drops to `1e-14 * ||A||_F`. Each eigenvector is signed so
/// that its first entry of magnitude above `1e-8` is positive.
pub fn sym_eigen(a: &Mat) -> Result<SymEigen, LinalgError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let asymmetry = a.sub(&a.transpose())?.norm_inf();
    let allowed = ASYMMETRY_TOL * a.norm_inf();
    if asymmetry > allowed {
        return Err(LinalgError::Asymmetric { asymmetry, allowed });
    }

    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]);
        }
    }
    let mut v = Mat::identity(n);
    let target = OFF_DIAGONAL_TOL * m.norm_frobenius();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps solver order inside clusters of equal eigenvalues.
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut x = v.column(src);
        canonical_sign(&mut x);
        for (row, value) in x.into_iter().enumerate() {
            vectors[(row, col)] = value;
        }
    }
    Ok(SymEigen { values, vectors })
}

fn off_diagonal_norm(m: &Mat) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `m[(p, q)]`.
fn rotate(m: &mut Mat, v: &mut Mat, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = m.rows();
    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = c * akp - s * akq;
        m[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = c * apk - s * aqk;
        m[(q, k)] = s * apk + c * aqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

pub(crate) fn canonical_sign(x: &mut [f64]) {
    if let Some(&lead) = x.iter().find(|e| e.abs() > SIGN_FLOOR) {
        if lead < 0.0 {
            x.iter_mut().for_each(|e| *e = -*e);
        }
    }
}

/// Number of eigenvalues above `rel_tol * max(lambda_1, 0)`.
pub fn rank_positive(eigenvalues: &[f64], tol: RankTolerance) -> usize {
    let Some(&top) = eigenvalues.first() else {
        return 0;
    };
    if top <= 0.0 {
        return 0;
    }
    let threshold = tol.value() * top;
    eigenvalues.iter().filter(|&&l| l > threshold).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn residual(a: &Mat, e: &SymEigen) -> f64 {
        (0..a.rows())
            .map(|i| {
                let x = e.vector(i);
                let ax = a.matvec(&x).unwrap();
                ax.iter()
                    .zip(&x)
                    .map(|(p, q)| (p - e.values[i] * q).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_spectrum() {
        let e = sym_eigen(&Mat::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let a = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let e = sym_eigen(&a).unwrap();
        assert_eq!(e.values, vec![4.0, 1.0]);
        assert_eq!(e.vector(0), vec![0.0, 1.0]);
        assert_eq!(e.vector(1), vec![1.0, 0.0]);
    }

    #[test]
    fn two_by_two() {
        // char. polynomial (2 - l)^2 - 1 has roots 3 and 1
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = sym_eigen(&a).unwrap();
        assert_relative_eq!(e.values[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vector(0);
        let v1 = e.vector(1);
        assert_relative_eq!(v0[0], h, epsilon = 1e-14);
        assert_relative_eq!(v0[1], h, epsilon = 1e-14);
        assert_relative_eq!(v1[0], h, epsilon = 1e-14);
        assert_relative_eq!(v1[1], -h, epsilon = 1e-14);
        assert!(residual(&a, &e) < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        let rect = Mat::zeros(2, 3);
        assert!(matches!(
            sym_eigen(&rect),
            Err(LinalgError::NotSquare { .. })
        ));
        let skew = Mat::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            sym_eigen(&skew),
            Err(LinalgError::Asymmetric { .. })
        ));
    }

    #[test]
    fn empty_matrix() {
        let e = sym_eigen(&Mat::zeros(0, 0)).unwrap();
        assert!(e.values.is_empty());
    }

    #[test]
    fn positive_ranks() {
        let tol = RankTolerance::default();
        assert_eq!(rank_positive(&[3.0, 1.0, 1e-17], tol), 2);
        assert_eq!(rank_positive(&[0.0, 0.0, 0.0], tol), 0);
        assert_eq!(rank_positive(&[], tol), 0);
        assert_eq!(rank_positive(&[-1.0, -2.0], tol), 0);
    }
}
