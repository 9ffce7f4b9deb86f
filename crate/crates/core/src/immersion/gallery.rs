//! Built-in test immersions with their analysis points.

use super::{extremal_example, Immersion, ImmersionSpec};

struct Entry {
    name: &'static str,
    dim_domain: usize,
    components: &'static [&'static str],
    base_point: &'static [f64],
    max_order: usize,
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "plane",
        dim_domain: 2,
        components: &["u1", "u2", "0"],
        base_point: &[0.0, 0.0],
        max_order: 2,
    },
    Entry {
        name: "circle",
        dim_domain: 1,
        components: &["cos(u1)", "sin(u1)"],
        base_point: &[0.0],
        max_order: 2,
    },
    Entry {
        name: "parabola",
        dim_domain: 1,
        components: &["u1", "u1^2"],
        base_point: &[0.0],
        max_order: 2,
    },
    Entry {
        name: "helix",
        dim_domain: 1,
        components: &["cos(u1)", "sin(u1)", "u1"],
        base_point: &[0.0],
        max_order: 2,
    },
    Entry {
        name: "twisted_cubic",
        dim_domain: 1,
        components: &["u1", "u1^2", "u1^3"],
        base_point: &[0.5],
        max_order: 2,
    },
    Entry {
        name: "sphere",
        dim_domain: 2,
        components: &["cos(u1)*cos(u2)", "sin(u1)*cos(u2)", "sin(u2)"],
        base_point: &[0.0, 0.0],
        max_order: 2,
    },
    Entry {
        name: "torus",
        dim_domain: 2,
        components: &["(2 + cos(u2))*cos(u1)", "(2 + cos(u2))*sin(u1)", "sin(u2)"],
        base_point: &[0.4, 0.9],
        max_order: 2,
    },
    Entry {
        name: "paraboloid",
        dim_domain: 2,
        components: &["u1", "u2", "u1^2 + u2^2"],
        base_point: &[0.0, 0.0],
        max_order: 3,
    },
    Entry {
        name: "veronese",
        dim_domain: 2,
        components: &[
            "cos(u1)*cos(u2)*sin(u1)*cos(u2)",
            "sin(u1)*cos(u2)*sin(u2)",
            "sin(u2)*cos(u1)*cos(u2)",
            "(cos(u1)^2*cos(u2)^2 - sin(u1)^2*cos(u2)^2)/2",
            "(cos(u2)^2 - 2*sin(u2)^2)/3.4641016151377544",
        ],
        base_point: &[0.3, 0.2],
        max_order: 2,
    },
];

/// Extremal instances included in the gallery, as `(n, r)`.
const EXTREMAL: &[(usize, usize)] = &[(1, 3), (2, 2), (3, 1)];

/// Every gallery surface, in a fixed order.
pub fn gallery() -> Vec<ImmersionSpec> {
    let mut out: Vec<ImmersionSpec> = ENTRIES
        .iter()
        .map(|e| ImmersionSpec {
            immersion: Immersion::parse(e.name, e.dim_domain, e.components)
                .expect("gallery entries parse"),
            base_point: e.base_point.to_vec(),
            max_order: e.max_order,
        })
        .collect();
    for &(n, r) in EXTREMAL {
        let im = extremal_example(n, r, None).expect("valid extremal parameters");
        out.push(ImmersionSpec::at_origin(im, r));
    }
    out
}

pub fn gallery_names() -> Vec<String> {
    gallery()
        .into_iter()
        .map(|s| s.immersion.name().to_string())
        .collect()
}
