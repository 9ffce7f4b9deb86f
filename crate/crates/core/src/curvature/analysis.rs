use crate::binomial;
use crate::immersion::Immersion;
use crate::jet::{Jet, MultiIndex};
use crate::linalg::{
    canonical_sign, dot, norm, orthonormal_complement, project_off, rank_positive, sym_eigen,
    JetVec, Mat, RankTolerance,
};

use super::frame::{adapted_frame_fields, AdaptedFrame, BasePointFrame};
use super::oracle::oracle_flag_dims_from_jets;
use super::verify::{
    frame_invariance_residual, random_orthogonal, symmetry_residual, verify_eigen_span,
};
use super::AnalysisError;

/// Negative eigenvalues down to `-PSD_SLACK * max(1, |P|)` count as rounding.
pub(crate) const PSD_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxOrderReached,
    RankZero,
    AmbientExhausted,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxOrderReached => "max_order_reached",
            StopReason::RankZero => "rank_zero",
            StopReason::AmbientExhausted => "ambient_exhausted",
        }
    }
}

/// The normal curvature matrix of one order and what it yields.
#[derive(Debug, Clone)]
pub struct CurvatureLevel {
    pub order: usize,
    /// `P^(r)` in an orthonormal basis of the complement of `O_{r-1}`.
    pub matrix_p: Mat,
    /// Every eigenvalue of `P^(r)`, descending, rounding negatives clamped.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue before clamping.
    pub min_raw_eigenvalue: f64,
    pub curvatures: Vec<f64>,
    pub normal_vectors: Vec<Vec<f64>>,
    pub rank_k: usize,
    pub bound: usize,
    pub ill_conditioned: bool,
}

impl CurvatureLevel {
    fn exhausted(order: usize, n: usize) -> Self {
        Self {
            order,
            matrix_p: Mat::zeros(0, 0),
            eigenvalues: Vec::new(),
            min_raw_eigenvalue: 0.0,
            curvatures: Vec::new(),
            normal_vectors: Vec::new(),
            rank_k: 0,
            bound: binomial(n + order, order + 1),
            ill_conditioned: false,
        }
    }

    pub fn sqrt_curvatures(&self) -> Vec<f64> {
        self.curvatures.iter().map(|l| l.sqrt()).collect()
    }

    pub fn psd_satisfied(&self) -> bool {
        self.min_raw_eigenvalue >= -PSD_SLACK * self.matrix_p.norm_inf().max(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct OsculatingFlag {
    pub levels: Vec<CurvatureLevel>,
    /// `d_0 = n`, `d_r = d_{r-1} + k_r`.
    pub dims: Vec<usize>,
    pub stop_reason: StopReason,
}

impl OsculatingFlag {
    pub fn ranks(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.rank_k).collect()
    }
}

/// Everything computed at one base point, kept for the verification checks.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub n: usize,
    pub m: usize,
    pub max_order: usize,
    pub tol: RankTolerance,
    pub frame: AdaptedFrame,
    pub flag: OsculatingFlag,
    /// Point bases of `O_0, O_1, ...`, one per reported level plus `O_0`.
    pub osculating_bases: Vec<Vec<Vec<f64>>>,
    /// `d^alpha f` at the point for `1 <= |alpha| <= max_order + 1`.
    pub derivatives: Vec<(MultiIndex, Vec<f64>)>,
}

impl Analysis {
    pub fn derivative(&self, alpha: &MultiIndex) -> Option<&[f64]> {
        self.derivatives
            .iter()
            .find(|(a, _)| a == alpha)
            .map(|(_, v)| v.as_slice())
    }

    pub fn derivatives_of_degree(&self, d: usize) -> Vec<Vec<f64>> {
        self.derivatives
            .iter()
            .filter(|(a, _)| a.degree() == d)
            .map(|(_, v)| v.clone())
            .collect()
    }
}

/// Builds `P^(l+1)` from the level-`l` frame fields.
///
/// For each field `B` and tangent direction `Y_j`, `nabla_{Y_j} B` at the
/// point is projected off `O_l` and written in an orthonormal basis of the
/// complement; `P` is the sum of the outer products of those coordinates.
///
/// An eigenvalue counts towards the rank when it exceeds both
/// `tol * lambda_1` and `floor`. Without the floor a matrix made purely of
/// rounding noise would be reported at full rank.
#[allow(clippy::too_many_arguments)]
pub fn curvature_matrix(
    level: usize,
    fields: &[&JetVec],
    base: &BasePointFrame,
    osculating: &[Vec<f64>],
    ambient_dim: usize,
    tol: RankTolerance,
    floor: f64,
) -> Result<CurvatureLevel, AnalysisError> {
    let order = level + 1;
    let n = base.dim();
    let complement = orthonormal_complement(ambient_dim, osculating)?;
    if complement.is_empty() {
        return Ok(CurvatureLevel::exhausted(order, n));
    }
    let mut p = Mat::zeros(complement.len(), complement.len());
    for field in fields {
        if field.order() < 1 {
            return Err(AnalysisError::JetOrderExhausted { level });
        }
        for j in 0..n {
            let d = base.directional_derivative(j, field);
            let residual = project_off(&d, osculating)?;
            let w: Vec<f64> = complement.iter().map(|c| dot(c, &residual)).collect();
            p.add_outer(&w);
        }
    }
    let eig = sym_eigen(&p)?;
    let min_raw = eig.values.last().copied().unwrap_or(0.0);
    let slack = PSD_SLACK * p.norm_inf().max(1.0);
    let eigenvalues: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l < 0.0 && l >= -slack { 0.0 } else { l })
        .collect();
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    let threshold = (tol.value() * top).max(floor);
    let k = if top > floor {
        rank_positive(&eigenvalues, tol).min(eigenvalues.iter().filter(|&&l| l > threshold).count())
    } else {
        0
    };
    let mut normal_vectors = Vec::with_capacity(k);
    for i in 0..k {
        let coords = eig.vector(i);
        let mut v = vec![0.0; ambient_dim];
        for (c, basis) in coords.iter().zip(&complement) {
            for (x, b) in v.iter_mut().zip(basis) {
                *x += c * b;
            }
        }
        canonical_sign(&mut v);
        normal_vectors.push(v);
    }
    let ill_conditioned = threshold > 0.0
        && eigenvalues
            .iter()
            .any(|&l| RankTolerance::near_threshold(l, threshold));
    Ok(CurvatureLevel {
        order,
        matrix_p: p,
        curvatures: eigenvalues[..k].to_vec(),
        eigenvalues,
        min_raw_eigenvalue: min_raw,
        normal_vectors,
        rank_k: k,
        bound: binomial(n + order, order + 1),
        ill_conditioned,
    })
}

/// Runs the full recursion on jets of order `max_order + 1`.
pub fn analyze_jets(
    jets: &[Jet],
    max_order: usize,
    tol: RankTolerance,
) -> Result<Analysis, AnalysisError> {
    if max_order == 0 {
        return Err(AnalysisError::InvalidOrder);
    }
    let m = jets.len();
    let n = jets.first().map_or(0, Jet::num_vars);
    let frame = adapted_frame_fields(jets, tol, max_order)?;

    let mut derivatives = Vec::new();
    // scales[d] is the largest norm among derivatives of degree <= d + 1.
    let mut scales = vec![1.0f64; max_order + 1];
    for alpha in MultiIndex::up_to_degree(n, 1, max_order + 1) {
        let v = jets
            .iter()
            .map(|j| j.derivative(&alpha))
            .collect::<Result<Vec<_>, _>>()?;
        let size = norm(&v);
        for s in scales.iter_mut().skip(alpha.degree() - 1) {
            *s = s.max(size);
        }
        derivatives.push((alpha, v));
    }

    let mut osculating = frame.base.tangent.clone();
    let mut osculating_bases = vec![osculating.clone()];
    let mut levels = Vec::new();
    let mut dims = vec![n];
    let mut stop_reason = StopReason::MaxOrderReached;
    for l in 0..max_order {
        let fields = frame.level(l);
        let floor = (tol.value() * scales[l + 1]).powi(2);
        let mut level = curvature_matrix(l, &fields, &frame.base, &osculating, m, tol, floor)?;
        let exhausted = level.matrix_p.rows() == 0;
        if !exhausted {
            level.ill_conditioned |= frame.frame.block_ill_conditioned(l + 1);
            if l == 0 {
                level.ill_conditioned |= frame.frame.block_ill_conditioned(0);
            }
        }
        let k = level.rank_k;
        osculating.extend(level.normal_vectors.iter().cloned());
        osculating_bases.push(osculating.clone());
        dims.push(dims[dims.len() - 1] + k);
        levels.push(level);
        if exhausted {
            stop_reason = StopReason::AmbientExhausted;
            break;
        }
        if k == 0 {
            stop_reason = StopReason::RankZero;
            break;
        }
    }

    Ok(Analysis {
        n,
        m,
        max_order,
        tol,
        frame,
        flag: OsculatingFlag {
            levels,
            dims,
            stop_reason,
        },
        osculating_bases,
        derivatives,
    })
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    /// Seeds of the domain rotations used by the invariance check; none skips it.
    pub invariance_seeds: Vec<u64>,
}

/// The outcome of [`analyze`] together with all verification results.
#[derive(Debug, Clone)]
pub struct FlagReport {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub base_point: Vec<f64>,
    pub max_order: usize,
    pub tolerance: f64,
    pub flag: OsculatingFlag,
    /// Oracle dimensions for the orders present in `flag.dims`.
    pub oracle_dims: Vec<usize>,
    /// One residual per reported level.
    pub eigen_span_residuals: Vec<f64>,
    pub symmetry_residual: f64,
    pub frame_invariance_residual: Option<f64>,
}

impl FlagReport {
    pub fn bound_satisfied(&self) -> bool {
        self.flag.levels.iter().all(|l| l.rank_k <= l.bound)
    }

    /// `k_1 <= n^2` and `k_{r+1} <= n k_r`.
    pub fn weak_bounds_satisfied(&self) -> bool {
        let ks = self.flag.ranks();
        ks.first().is_none_or(|&k| k <= self.n * self.n)
            && ks.windows(2).all(|w| w[1] <= self.n * w[0])
    }

    pub fn psd_satisfied(&self) -> bool {
        self.flag.levels.iter().all(CurvatureLevel::psd_satisfied)
    }

    pub fn oracle_match(&self) -> bool {
        self.flag.dims == self.oracle_dims
    }

    pub fn any_ill_conditioned(&self) -> bool {
        self.flag.levels.iter().any(|l| l.ill_conditioned)
    }
}

/// [`analyze_with`] without the invariance check.
pub fn analyze(
    im: &Immersion,
    point: &[f64],
    max_order: usize,
    tol: RankTolerance,
) -> Result<FlagReport, AnalysisError> {
    analyze_with(im, point, max_order, tol, &AnalysisOptions::default())
}

/// Analyzes `im` at `point` through order `max_order` and runs every check.
pub fn analyze_with(
    im: &Immersion,
    point: &[f64],
    max_order: usize,
    tol: RankTolerance,
    options: &AnalysisOptions,
) -> Result<FlagReport, AnalysisError> {
    if max_order == 0 {
        return Err(AnalysisError::InvalidOrder);
    }
    let jets = im.eval_jet(point, max_order + 1)?;
    let analysis = analyze_jets(&jets, max_order, tol)?;
    let computed = analysis.flag.dims.len() - 1;
    let oracle_dims = oracle_flag_dims_from_jets(&jets, computed, tol)?;
    let eigen_span_residuals = (1..=analysis.flag.levels.len())
        .map(|r| verify_eigen_span(&analysis, r))
        .collect::<Result<Vec<_>, _>>()?;
    let symmetry = symmetry_residual(&analysis)?;

    let mut invariance: Option<f64> = None;
    for &seed in &options.invariance_seeds {
        let q = random_orthogonal(im.dim_domain(), seed);
        let rotated_jets = im.eval_jet_reparametrized(point, &q, max_order + 1)?;
        let rotated = analyze_jets(&rotated_jets, max_order, tol)?;
        let r = frame_invariance_residual(&analysis.flag, &rotated.flag)?;
        invariance = Some(invariance.map_or(r, |x: f64| x.max(r)));
    }

    Ok(FlagReport {
        name: im.name().to_string(),
        n: analysis.n,
        m: analysis.m,
        base_point: point.to_vec(),
        max_order,
        tolerance: tol.value(),
        flag: analysis.flag,
        oracle_dims,
        eigen_span_residuals,
        symmetry_residual: symmetry,
        frame_invariance_residual: invariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{extremal_example, gallery};
    use approx::assert_relative_eq;

    fn tol() -> RankTolerance {
        RankTolerance::default()
    }

    fn run(components: &[&str], n: usize, point: &[f64], r: usize) -> FlagReport {
        let im = Immersion::parse("t", n, components).unwrap();
        analyze(&im, point, r, tol()).unwrap()
    }

    #[test]
    fn circle_of_radius_two() {
        let rep = run(&["2*cos(u1)", "2*sin(u1)"], 1, &[0.3], 2);
        let l1 = &rep.flag.levels[0];
        assert_eq!(l1.rank_k, 1);
        assert_relative_eq!(l1.curvatures[0], 0.25, max_relative = 1e-12);
        assert_eq!(rep.flag.dims, vec![1, 2, 2]);
        assert_eq!(rep.flag.stop_reason, StopReason::AmbientExhausted);
    }

    #[test]
    fn unit_sphere() {
        let rep = run(
            &["cos(u1)*cos(u2)", "sin(u1)*cos(u2)", "sin(u2)"],
            2,
            &[0.0, 0.0],
            2,
        );
        assert_eq!(rep.flag.levels[0].rank_k, 1);
        assert_relative_eq!(rep.flag.levels[0].curvatures[0], 2.0, max_relative = 1e-12);
        // The normal at (1, 0, 0) is radial.
        assert_relative_eq!(
            rep.flag.levels[0].normal_vectors[0][0].abs(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn helix_curvature_and_torsion() {
        let rep = run(&["cos(u1)", "sin(u1)", "u1"], 1, &[0.0], 2);
        assert_eq!(rep.flag.ranks(), vec![1, 1]);
        assert_relative_eq!(rep.flag.levels[0].curvatures[0], 0.25, max_relative = 1e-12);
        assert_relative_eq!(rep.flag.levels[1].curvatures[0], 0.25, max_relative = 1e-12);
        assert_relative_eq!(
            rep.flag.levels[1].sqrt_curvatures()[0],
            0.5,
            max_relative = 1e-12
        );
        assert_eq!(rep.flag.stop_reason, StopReason::MaxOrderReached);
        assert!(rep.oracle_match());
    }

    #[test]
    fn plane_stops_at_rank_zero() {
        let rep = run(&["u1", "u2", "0"], 2, &[0.0, 0.0], 3);
        assert_eq!(rep.flag.levels.len(), 1);
        assert_eq!(rep.flag.levels[0].rank_k, 0);
        assert_eq!(rep.flag.levels[0].matrix_p.rows(), 1);
        assert_eq!(rep.flag.stop_reason, StopReason::RankZero);
        assert_eq!(rep.flag.dims, vec![2, 2]);
        assert_eq!(rep.oracle_dims, vec![2, 2]);
    }

    #[test]
    fn affine_immersion_is_flat() {
        let rep = run(&["u1 + 2*u2", "u2 - u1", "3*u1", "1"], 2, &[0.4, -1.0], 2);
        assert_eq!(rep.flag.ranks(), vec![0]);
        assert_eq!(rep.flag.stop_reason, StopReason::RankZero);
    }

    #[test]
    fn extremal_two_two_is_sharp() {
        let im = extremal_example(2, 2, None).unwrap();
        let rep = analyze(&im, &[0.0, 0.0], 2, tol()).unwrap();
        assert_eq!(rep.flag.ranks(), vec![3, 4]);
        assert_eq!(rep.flag.dims, vec![2, 5, 9]);
        assert!(rep.oracle_match());
        assert!(rep.bound_satisfied());
        assert!(rep.weak_bounds_satisfied());
        assert!(!rep.any_ill_conditioned());
        assert_eq!(
            rep.flag.levels.iter().map(|l| l.bound).collect::<Vec<_>>(),
            vec![3, 4]
        );
    }

    #[test]
    fn cusp_is_rejected() {
        let im = Immersion::parse("cusp", 1, &["u1^2", "u1^3"]).unwrap();
        assert!(matches!(
            analyze(&im, &[0.0], 2, tol()),
            Err(AnalysisError::NotAnImmersion { .. })
        ));
        assert!(matches!(
            analyze(&im, &[1.0], 0, tol()),
            Err(AnalysisError::InvalidOrder)
        ));
    }

    #[test]
    fn normal_vectors_are_orthonormal_and_normal() {
        for spec in gallery() {
            let jets = spec
                .immersion
                .eval_jet(&spec.base_point, spec.max_order + 1)
                .unwrap();
            let a = analyze_jets(&jets, spec.max_order, tol()).unwrap();
            for (r, level) in a.flag.levels.iter().enumerate() {
                for (i, x) in level.normal_vectors.iter().enumerate() {
                    for o in &a.osculating_bases[r] {
                        assert!(dot(x, o).abs() < 1e-12);
                    }
                    for (j, y) in level.normal_vectors.iter().enumerate() {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((dot(x, y) - expect).abs() < 1e-12);
                    }
                }
                assert!(level.psd_satisfied());
            }
            assert!(a.flag.dims.iter().all(|&d| d <= a.m));
        }
    }

    #[test]
    fn weak_bound_detects_violation() {
        let im = extremal_example(1, 1, None).unwrap();
        let mut rep = analyze(&im, &[0.0], 1, tol()).unwrap();
        assert!(rep.weak_bounds_satisfied());
        rep.flag.levels[0].rank_k = 2;
        assert!(!rep.weak_bounds_satisfied());
        assert!(!rep.bound_satisfied());
    }
}
