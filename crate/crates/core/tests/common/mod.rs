#![allow(dead_code)]

use osculant::immersion::Immersion;
use osculant::jet::MultiIndex;

pub fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Squared Frenet curvature and torsion of a space curve from its first
/// three derivatives.
pub fn frenet_squares(d1: &[f64], d2: &[f64], d3: &[f64]) -> (f64, f64) {
    let c = cross(d1, d2);
    let kappa = norm(&c) / norm(d1).powi(3);
    let tau = dot(&c, d3) / dot(&c, &c);
    (kappa * kappa, tau * tau)
}

/// Central finite difference of `d^alpha f_component` at `point`, built by
/// applying the one-variable stencil once per unit of `alpha`.
pub fn central_difference(
    im: &Immersion,
    component: usize,
    point: &[f64],
    alpha: &MultiIndex,
    h: f64,
) -> f64 {
    fn rec(
        im: &Immersion,
        component: usize,
        point: &mut Vec<f64>,
        remaining: &mut Vec<u32>,
        h: f64,
    ) -> f64 {
        match remaining.iter().position(|&e| e > 0) {
            None => im.components()[component].eval(point),
            Some(var) => {
                remaining[var] -= 1;
                let x = point[var];
                point[var] = x + h;
                let plus = rec(im, component, point, remaining, h);
                point[var] = x - h;
                let minus = rec(im, component, point, remaining, h);
                point[var] = x;
                remaining[var] += 1;
                (plus - minus) / (2.0 * h)
            }
        }
    }
    let mut p = point.to_vec();
    let mut rem = alpha.exponents().to_vec();
    rec(im, component, &mut p, &mut rem, h)
}

pub fn torus(big: f64, small: f64) -> Immersion {
    Immersion::parse(
        "torus",
        2,
        &[
            format!("({big} + {small}*cos(u2))*cos(u1)"),
            format!("({big} + {small}*cos(u2))*sin(u1)"),
            format!("{small}*sin(u2)"),
        ],
    )
    .unwrap()
}

/// `kappa_1^2 + kappa_2^2` of the torus at latitude `v`.
pub fn torus_curvature_square_sum(big: f64, small: f64, v: f64) -> f64 {
    let k1 = v.cos() / (big + small * v.cos());
    let k2 = 1.0 / small;
    k1 * k1 + k2 * k2
}

pub fn helix(a: f64, b: f64) -> Immersion {
    Immersion::parse(
        "helix",
        1,
        &[
            format!("{a}*cos(u1)"),
            format!("{a}*sin(u1)"),
            format!("{b}*u1"),
        ],
    )
    .unwrap()
}

pub fn circle(rho: f64) -> Immersion {
    Immersion::parse(
        "circle",
        1,
        &[format!("{rho}*cos(u1)"), format!("{rho}*sin(u1)")],
    )
    .unwrap()
}

pub fn unit_sphere() -> Immersion {
    Immersion::parse(
        "sphere",
        2,
        &["cos(u1)*cos(u2)", "sin(u1)*cos(u2)", "sin(u2)"],
    )
    .unwrap()
}
