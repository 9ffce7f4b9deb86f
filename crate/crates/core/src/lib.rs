//! Higher-order normal curvatures and osculating flags of parametrized
//! immersions `f: R^n -> R^m`.
//!
//! The pipeline evaluates jets of `f` at a base point, builds an adapted
//! frame by jet-valued Gram-Schmidt, forms the normal curvature matrices
//! `P^(r)` level by level, and checks the resulting osculating flag against
//! an independent rank computation on the raw partial derivatives of `f`.

pub mod cli;
pub mod curvature;
pub mod immersion;
pub mod jet;
pub mod linalg;
pub mod report;

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
