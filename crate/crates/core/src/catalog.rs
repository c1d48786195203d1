//! Bundled test problems.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffs::{CoefficientFunction, PolyPiece, ProblemSpec};

/// Seed of the randomized entry when none is given.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: ProblemSpec,
}

fn unit(a: f64, b: f64, alpha: f64, beta: f64) -> ProblemSpec {
    ProblemSpec::constant(a, b, alpha, beta, 0.0, 1.0, 1.0)
}

/// Smooth random coefficients on a random interval with random Robin angles.
pub fn random_spec(seed: u64) -> ProblemSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = -rng.random_range(0.8..1.5);
    let b = rng.random_range(0.8..1.5);
    let alpha = rng.random_range(0.0..PI);
    let beta = rng.random_range(0.0..PI);
    let q: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
    let r = vec![rng.random_range(0.8..1.2), rng.random_range(-0.1..0.1)];
    let h = vec![
        rng.random_range(0.7..1.3),
        rng.random_range(-0.15..0.15),
        rng.random_range(0.0..0.3),
    ];
    let poly = |l: f64, r: f64, c: Vec<f64>| {
        CoefficientFunction::piecewise(vec![PolyPiece::new(l, r, c)]).expect("one valid piece")
    };
    ProblemSpec {
        a,
        b,
        alpha,
        beta,
        q: poly(a, b, q),
        r: poly(a, b, r),
        h: poly(-1.0, 1.0, h),
    }
}

/// The bundled specs; `seed` drives the randomized entry.
pub fn list_builtin_specs(seed: u64) -> Vec<CatalogEntry> {
    let n = PI / 2.0;
    vec![
        CatalogEntry {
            name: "neumann-trivial",
            description:
                "Neumann ends on (-1, 1), unit coefficients; lambda_1 = 0 with constant mode",
            spec: unit(-1.0, 1.0, n, n),
        },
        CatalogEntry {
            name: "dirichlet-symmetric",
            description: "Dirichlet ends on (-1, 1); triple eigenvalues at pi^2 and 4 pi^2",
            spec: unit(-1.0, 1.0, 0.0, 0.0),
        },
        CatalogEntry {
            name: "dirichlet-asymmetric",
            description:
                "Dirichlet ends on (-1, 2); double Jordan eigenvalue pi^2/4 shared by A_b and B",
            spec: unit(-1.0, 2.0, 0.0, 0.0),
        },
        CatalogEntry {
            name: "jordan-left",
            description:
                "Dirichlet ends on (-2, 1); double Jordan eigenvalue pi^2/4 shared by A_a and B",
            spec: unit(-2.0, 1.0, 0.0, 0.0),
        },
        CatalogEntry {
            name: "generic-random",
            description: "random smooth q, r, h and Robin angles from the seed",
            spec: random_spec(seed),
        },
        CatalogEntry {
            name: "offset-left",
            description: "Dirichlet ends on (-1.5, 1); simple eigenvalue (pi / 1.5)^2 of A_a alone",
            spec: unit(-1.5, 1.0, 0.0, 0.0),
        },
    ]
}

pub fn builtin(name: &str, seed: u64) -> Option<ProblemSpec> {
    list_builtin_specs(seed)
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| e.spec)
}
