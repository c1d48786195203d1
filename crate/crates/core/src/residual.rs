//! Residuals of computed solutions, measured in integral form.
//!
//! On each panel `[x0, x1]` the two defects
//! `y(x1) - y(x0) - int y'` and `y'(x1) - y'(x0) - int ((q - zeta w) y - w f)`
//! vanish for an exact solution; `sqrt(sum |d|^2 / h)` approximates the `L2`
//! norm of the pointwise residual without differentiating sampled data.

use num_complex::Complex64 as C64;

use crate::coeffs::CoefficientFunction;
use crate::curve::Curve;
use crate::quad::gauss_legendre;

/// `-y'' + q y - zeta w y = w f` on `[left, right]`; derivatives of `y` are
/// taken in the same variable as the coefficients.
#[derive(Clone, Copy)]
pub struct Equation<'a> {
    pub q: &'a CoefficientFunction,
    pub w: &'a CoefficientFunction,
    pub zeta: C64,
    pub f: Option<&'a Curve>,
    pub left: f64,
    pub right: f64,
}

/// Residual norm and the norm of the largest term, for relative comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub residual: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }

    pub fn combine(self, o: Residual) -> Residual {
        Residual {
            residual: self.residual.hypot(o.residual),
            scale: self.scale.hypot(o.scale),
        }
    }
}

pub const RESIDUAL_PANELS: usize = 200;

pub fn ode_residual(y: &Curve, eq: &Equation, panels: usize) -> Residual {
    let (l, r) = (eq.left, eq.right);
    let mut edges: Vec<f64> = (0..=panels)
        .map(|i| l + (r - l) * i as f64 / panels as f64)
        .collect();
    let tol = 1e-13 * (r - l);
    let mut extra: Vec<f64> = y.breaks().to_vec();
    extra.extend(eq.q.breakpoints_in(l, r));
    extra.extend(eq.w.breakpoints_in(l, r));
    if let Some(f) = eq.f {
        extra.extend_from_slice(f.breaks());
    }
    edges.extend(extra.into_iter().filter(|&x| x > l + tol && x < r - tol));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let (gx, gw) = gauss_legendre(10);
    let (mut res, mut scale) = (0.0, 0.0);
    for e in edges.windows(2) {
        let (x0, x1) = (e[0], e[1]);
        let (mid, half) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
        let (mut iy, mut ipot, mut isrc) =
            (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (t, wq) in gx.iter().zip(&gw) {
            let x = mid + half * t;
            let (v, d) = y.eval(x);
            let wv = eq.w.eval_near(x, mid);
            let qv = eq.q.eval_near(x, mid);
            iy += d * (half * wq);
            ipot += v * (qv - eq.zeta * wv) * (half * wq);
            if let Some(f) = eq.f {
                isrc += f.value(x) * wv * (half * wq);
            }
        }
        let (y0, d0) = y.eval(x0);
        let (y1, d1) = y.eval(x1);
        let h = x1 - x0;
        let r1 = y1 - y0 - iy;
        let r2 = d1 - d0 - (ipot - isrc);
        res += (r1.norm_sqr() + r2.norm_sqr()) / h;
        scale += ((d1 - d0).norm_sqr() + ipot.norm_sqr() + isrc.norm_sqr()) / h;
    }
    Residual {
        residual: res.sqrt(),
        scale: scale.sqrt(),
    }
}
