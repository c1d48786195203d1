//! Vectors of the product space `L2(r, (a,0)) x L2(h, (-1,1)) x L2(r, (0,b))`
//! and the quadrature used for weighted inner products.

use num_complex::Complex64 as C64;

use crate::coeffs::{CoefficientFunction, ProblemSpec};
use crate::curve::{Curve, GridFunction};
use crate::quad::CompositeRule;

/// Nodes per interval in weighted inner products.
pub const INNER_PRODUCT_NODES: usize = 600;
const ORDER: usize = 12;

/// `int_l^r weight * f * conj(g)` on a rule split at every known kink.
pub fn weighted_inner(f: &Curve, g: &Curve, weight: &CoefficientFunction, l: f64, r: f64) -> C64 {
    let mut breaks = f.breaks().to_vec();
    breaks.extend_from_slice(g.breaks());
    breaks.extend(weight.breakpoints_in(l, r));
    let rule = CompositeRule::with_breaks(l, r, &breaks, INNER_PRODUCT_NODES, ORDER);
    let mut s = C64::new(0.0, 0.0);
    for (&x, &wq) in rule.nodes.iter().zip(&rule.weights) {
        s += f.value(x) * g.value(x).conj() * (wq * weight.eval(x));
    }
    s
}

pub fn weighted_norm(f: &Curve, weight: &CoefficientFunction, l: f64, r: f64) -> f64 {
    weighted_inner(f, f, weight, l, r).re.max(0.0).sqrt()
}

/// A vector `(u, w, v)` with `u` on `(a, 0)`, `w` on `(-1, 1)` and `v` on `(0, b)`.
#[derive(Debug, Clone)]
pub struct Triple {
    pub a: Curve,
    pub mid: Curve,
    pub b: Curve,
}

impl Triple {
    pub fn new(a: Curve, mid: Curve, b: Curve) -> Self {
        Triple { a, mid, b }
    }

    pub fn zero(spec: &ProblemSpec) -> Self {
        Triple {
            a: Curve::zero(spec.a, 0.0),
            mid: Curve::zero(-1.0, 1.0),
            b: Curve::zero(0.0, spec.b),
        }
    }

    /// Real components without derivative data.
    pub fn from_real(
        spec: &ProblemSpec,
        fa: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fb: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Triple {
            a: Curve::from_real(spec.a, 0.0, fa),
            mid: Curve::from_real(-1.0, 1.0, f0),
            b: Curve::from_real(0.0, spec.b, fb),
        }
    }

    pub fn scaled(&self, c: C64) -> Triple {
        Triple {
            a: self.a.scaled(c),
            mid: self.mid.scaled(c),
            b: self.b.scaled(c),
        }
    }

    pub fn add_scaled(&self, c: C64, o: &Triple) -> Triple {
        Triple {
            a: self.a.add_scaled(c, &o.a),
            mid: self.mid.add_scaled(c, &o.mid),
            b: self.b.add_scaled(c, &o.b),
        }
    }

    /// Inner product in the product space.
    pub fn inner(&self, o: &Triple, spec: &ProblemSpec) -> C64 {
        weighted_inner(&self.a, &o.a, &spec.r, spec.a, 0.0)
            + weighted_inner(&self.mid, &o.mid, &spec.h, -1.0, 1.0)
            + weighted_inner(&self.b, &o.b, &spec.r, 0.0, spec.b)
    }

    pub fn norm(&self, spec: &ProblemSpec) -> f64 {
        self.inner(self, spec).re.max(0.0).sqrt()
    }

    pub fn normalized(&self, spec: &ProblemSpec) -> Triple {
        let n = self.norm(spec);
        self.scaled(C64::new(1.0 / n, 0.0))
    }

    /// Samples of each component, tagged `a`, `mid`, `b`.
    pub fn sample(&self, n: usize) -> [(&'static str, GridFunction); 3] {
        [
            ("a", self.a.sample(n)),
            ("mid", self.mid.sample(n)),
            ("b", self.b.sample(n)),
        ]
    }

    /// Tagged grid-function CSV of all three components.
    pub fn to_csv(&self, n: usize) -> String {
        let mut s = String::from("piece,x,re,im,re_deriv,im_deriv\n");
        for (tag, g) in self.sample(n) {
            g.write_csv_rows(&mut s, Some(tag));
        }
        s
    }
}
