use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Expr, Immersion, ImmersionError, ImmersionSpec};
use crate::binomial;
use crate::jet::MultiIndex;

/// Ambient dimension of [`extremal_example`]: `n + sum_{d=2}^{r+1} C(n+d-1, d)`.
pub fn extremal_ambient_dim(n: usize, r: usize) -> usize {
    n + (2..=r + 1).map(|d| binomial(n + d - 1, d)).sum::<usize>()
}

/// The surface whose every monomial of degree `2..=r+1` sits on its own
/// ambient axis: `f(u) = (u_1, .., u_n, a_alpha u^alpha, ...)` with the
/// monomials in graded-lex order. At the origin it attains
/// `k_d = C(n+d, d+1)` for `d = 1..=r`.
///
/// `coefficients`, when given, supplies `a_alpha` per monomial in the same
/// order and must not contain zeros; the default is all ones.
pub fn extremal_example(
    n: usize,
    r: usize,
    coefficients: Option<&[f64]>,
) -> Result<Immersion, ImmersionError> {
    if n == 0 {
        return Err(ImmersionError::InvalidArgument(
            "n must be at least 1".into(),
        ));
    }
    if r == 0 {
        return Err(ImmersionError::InvalidArgument(
            "r must be at least 1".into(),
        ));
    }
    let monomials = MultiIndex::up_to_degree(n, 2, r + 1);
    if let Some(cs) = coefficients {
        if cs.len() != monomials.len() {
            return Err(ImmersionError::CoefficientCount {
                expected: monomials.len(),
                got: cs.len(),
            });
        }
        if let Some(index) = cs.iter().position(|&c| c == 0.0) {
            return Err(ImmersionError::ZeroCoefficient { index });
        }
    }
    let mut components: Vec<Expr> = (0..n).map(Expr::var).collect();
    for (i, alpha) in monomials.iter().enumerate() {
        let mono = Expr::monomial(alpha.exponents());
        let a = coefficients.map_or(1.0, |cs| cs[i]);
        components.push(if a == 1.0 {
            mono
        } else {
            Expr::mul(Expr::number(a), mono)
        });
    }
    Immersion::new(format!("extremal_n{n}_r{r}"), n, components)
}

/// A seeded random polynomial immersion.
///
/// The first `n` components are `u_i` plus random terms of degree
/// `2..=max_degree`; the other `m - n` are random polynomials of degree
/// `1..=max_degree`. All coefficients are uniform in `[-1, 1]` and there
/// are no constant terms, so the Jacobian at the origin is `(I | *)`.
pub fn random_polynomial_immersion(
    n: usize,
    m: usize,
    max_degree: usize,
    seed: u64,
) -> Result<Immersion, ImmersionError> {
    if n == 0 {
        return Err(ImmersionError::EmptyDomain);
    }
    if m < n {
        return Err(ImmersionError::AmbientTooSmall {
            domain: n,
            ambient: m,
        });
    }
    if max_degree == 0 {
        return Err(ImmersionError::InvalidArgument(
            "max_degree must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components = Vec::with_capacity(m);
    for c in 0..m {
        let (start, init) = if c < n {
            (2, Some(Expr::var(c)))
        } else {
            (1, None)
        };
        let mut acc = init;
        for alpha in MultiIndex::up_to_degree(n, start, max_degree) {
            let a: f64 = rng.gen_range(-1.0..=1.0);
            let term = Expr::mul(Expr::number(a), Expr::monomial(alpha.exponents()));
            acc = Some(match acc {
                Some(prev) => Expr::add(prev, term),
                None => term,
            });
        }
        components.push(acc.unwrap_or(Expr::Num(0.0)));
    }
    Immersion::new(
        format!("random_n{n}_m{m}_d{max_degree}_s{seed}"),
        n,
        components,
    )
}

/// A seeded batch of random polynomial immersions analyzed at the origin,
/// with `n <= 3`, `m <= 15`, degree `<= 4` and order `<= 3`.
pub fn random_corpus(count: usize, seed: u64) -> Vec<ImmersionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=3usize);
            let m = rng.gen_range(n..=15usize);
            let degree = rng.gen_range(1..=4usize);
            let order = rng.gen_range(1..=3usize);
            let case_seed: u64 = rng.gen();
            let im = random_polynomial_immersion(n, m, degree, case_seed)
                .expect("parameters are in range");
            ImmersionSpec::at_origin(im, order)
        })
        .collect()
}
