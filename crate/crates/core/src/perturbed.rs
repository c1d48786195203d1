//! The concentrated-mass problem at fixed `eps`.
//!
//! The problem is solved as a chain `(a, -eps)`, `(-1, 1)`, `(eps, b)` where
//! the middle piece uses `t = x / eps`: there `-w'' + eps^2 q(eps t) w =
//! lambda h w` and `eps y'(+-eps) = w'(+-1)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::chain::{propagate, Chain, Piece, Robin, EIG_TOL, SPECTRAL_GUARD};
use crate::coeffs::{validate_spec, CoefficientFunction, ProblemSpec};
use crate::curve::{Curve, GridFunction, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::residual::{ode_residual, Equation, Residual, RESIDUAL_PANELS};
use crate::space::Triple;

/// Smallest admissible `eps`.
pub const MIN_EPS: f64 = 1e-6;

/// Tolerance on the four junction conditions of an eigenfunction.
pub const COUPLING_TOL: f64 = 1e-8;

pub fn check_eps(spec: &ProblemSpec, eps: f64) -> Result<()> {
    let report = validate_spec(spec);
    if !report.is_valid() {
        let msg: Vec<String> = report.issues.iter().map(|i| i.to_string()).collect();
        return Err(Error::domain(msg.join("; ")));
    }
    if !(eps >= MIN_EPS) || !(eps < spec.max_eps()) {
        return Err(Error::domain(format!(
            "eps = {eps} must lie in [{MIN_EPS}, {}) for this interval",
            spec.max_eps()
        )));
    }
    Ok(())
}

/// Inner-piece potential `eps^2 q(eps t)`.
pub fn inner_potential(spec: &ProblemSpec, eps: f64) -> CoefficientFunction {
    spec.q.pullback(eps, 0.0, eps * eps)
}

/// The three-piece chain for `eps`.
pub fn perturbed_chain(spec: &ProblemSpec, eps: f64) -> Result<Chain> {
    check_eps(spec, eps)?;
    Ok(Chain::new(
        vec![
            Piece::new(spec.a, -eps, spec.q.clone(), spec.r.clone(), 1.0),
            Piece::new(-1.0, 1.0, inner_potential(spec, eps), spec.h.clone(), eps),
            Piece::new(eps, spec.b, spec.q.clone(), spec.r.clone(), 1.0),
        ],
        Robin::from_angle(spec.alpha),
        Robin::from_angle(spec.beta),
    ))
}

/// An eigenvalue of the perturbed problem with its three-piece eigenfunction,
/// normalized in `L2(r_eps, (a, b))`.
#[derive(Debug, Clone)]
pub struct PerturbedEigenpair {
    /// Zero-based.
    pub index: usize,
    pub eps: f64,
    pub lambda_eps: f64,
    pub outer_left: GridFunction,
    pub inner: GridFunction,
    pub outer_right: GridFunction,
    /// Evaluable pieces: `y` on `(a, -eps)`, `w` on `(-1, 1)` with `w' = dw/dt`,
    /// `y` on `(eps, b)`.
    pub pieces: [Curve; 3],
}

impl PerturbedEigenpair {
    /// Defects of `y(-eps) = w(-1)`, `y(eps) = w(1)`, `eps y'(-eps) = w'(-1)`
    /// and `eps y'(eps) = w'(1)`, relative to the largest of the values.
    pub fn coupling_residuals(&self) -> [f64; 4] {
        let eps = self.eps;
        let [l, m, r] = &self.pieces;
        let (yl, dl) = l.eval(-eps);
        let (yr, dr) = r.eval(eps);
        let (wl, el) = m.eval(-1.0);
        let (wr, er) = m.eval(1.0);
        let scale = [
            yl.norm(),
            yr.norm(),
            wl.norm(),
            wr.norm(),
            el.norm(),
            er.norm(),
        ]
        .into_iter()
        .fold(1e-300, f64::max);
        [
            (yl - wl).norm() / scale,
            (yr - wr).norm() / scale,
            (dl * eps - el).norm() / scale,
            (dr * eps - er).norm() / scale,
        ]
    }

    /// Product-space image: the outer parts continued to the origin by the
    /// homogeneous outer equation at `lambda_eps`, the inner part in `t`.
    pub fn to_product_space(&self, spec: &ProblemSpec) -> Result<Triple> {
        let eps = self.eps;
        let z = C64::new(self.lambda_eps, 0.0);
        let [l, m, r] = self.pieces.clone();
        let (yl, dl) = l.eval(-eps);
        let ext_l = propagate(
            &Piece::new(-eps, 0.0, spec.q.clone(), spec.r.clone(), 1.0),
            z,
            None,
            -eps,
            yl,
            dl,
        )?;
        let (yr, dr) = r.eval(eps);
        let ext_r = propagate(
            &Piece::new(0.0, eps, spec.q.clone(), spec.r.clone(), 1.0),
            z,
            None,
            eps,
            yr,
            dr,
        )?;
        let mut bl = l.breaks().to_vec();
        bl.push(-eps);
        let mut br = r.breaks().to_vec();
        br.push(eps);
        let a = Curve::new(spec.a, 0.0, move |x| {
            if x <= -eps {
                l.eval(x)
            } else {
                ext_l.eval(x)
            }
        })
        .with_breaks(bl);
        let b = Curve::new(0.0, spec.b, move |x| {
            if x >= eps {
                r.eval(x)
            } else {
                ext_r.eval(x)
            }
        })
        .with_breaks(br);
        Ok(Triple::new(a, m, b))
    }

    /// The eigenfunction on `(a, b)` with physical derivative.
    pub fn physical(&self) -> Curve {
        let eps = self.eps;
        let [l, m, r] = self.pieces.clone();
        let (a, b) = (l.left(), r.right());
        Curve::new(a, b, move |x| {
            if x <= -eps {
                l.eval(x)
            } else if x >= eps {
                r.eval(x)
            } else {
                let (w, d) = m.eval(x / eps);
                (w, d / eps)
            }
        })
        .with_breaks(vec![-eps, eps])
    }
}

/// Eigenvalues only.
pub fn perturbed_eigenvalue_list(spec: &ProblemSpec, eps: f64, n_max: usize) -> Result<Vec<f64>> {
    let chain = perturbed_chain(spec, eps)?;
    let lams: Vec<f64> = (0..n_max)
        .into_par_iter()
        .map(|n| chain.eigenvalue(n))
        .collect::<Result<_>>()?;
    check_simple(&lams)?;
    Ok(lams)
}

/// Every eigenvalue strictly below `cutoff`.
pub fn perturbed_eigenvalues_below(spec: &ProblemSpec, eps: f64, cutoff: f64) -> Result<Vec<f64>> {
    let chain = perturbed_chain(spec, eps)?;
    let n = chain.count_below(cutoff)?;
    perturbed_eigenvalue_list(spec, eps, n)
}

fn check_simple(lams: &[f64]) -> Result<()> {
    for (n, w) in lams.windows(2).enumerate() {
        let sep = 10.0 * EIG_TOL * w[1].abs().max(1.0);
        if !(w[1] - w[0] > sep) {
            return Err(Error::Bracketing {
                index: n + 1,
                reason: format!("eigenvalues {} and {} are not separated", w[0], w[1]),
            });
        }
    }
    Ok(())
}

/// The first `n_max` eigenpairs, increasing.
pub fn perturbed_eigenvalues(
    spec: &ProblemSpec,
    eps: f64,
    n_max: usize,
) -> Result<Vec<PerturbedEigenpair>> {
    let chain = perturbed_chain(spec, eps)?;
    let lams = perturbed_eigenvalue_list(spec, eps, n_max)?;
    lams.into_par_iter()
        .enumerate()
        .map(|(index, lambda)| eigenpair_at(&chain, eps, index, lambda))
        .collect()
}

/// The eigenpair with index `n`.
pub fn perturbed_eigenpair(spec: &ProblemSpec, eps: f64, n: usize) -> Result<PerturbedEigenpair> {
    let chain = perturbed_chain(spec, eps)?;
    let lambda = chain.eigenvalue(n)?;
    eigenpair_at(&chain, eps, n, lambda)
}

fn eigenpair_at(chain: &Chain, eps: f64, index: usize, lambda: f64) -> Result<PerturbedEigenpair> {
    let mode = chain.mode(lambda)?;
    let mut it = mode.curves.into_iter();
    let pieces = [
        it.next().expect("three pieces"),
        it.next().expect("three pieces"),
        it.next().expect("three pieces"),
    ];
    let pair = PerturbedEigenpair {
        index,
        eps,
        lambda_eps: lambda,
        outer_left: pieces[0].sample(DEFAULT_SAMPLES),
        inner: pieces[1].sample(DEFAULT_SAMPLES),
        outer_right: pieces[2].sample(DEFAULT_SAMPLES),
        pieces,
    };
    let worst = pair.coupling_residuals().into_iter().fold(0.0, f64::max);
    if !(worst <= COUPLING_TOL) {
        return Err(Error::Integrator {
            x: -eps,
            reason: format!("coupling residual {worst:e} exceeds tolerance"),
        });
    }
    Ok(pair)
}

/// `l_b` of the solution satisfying the left condition, assembled from the
/// transfer matrices of the three pieces. Zeros are the eigenvalues.
pub fn characteristic_function(spec: &ProblemSpec, eps: f64, lambda: f64) -> Result<f64> {
    let chain = perturbed_chain(spec, eps)?;
    Ok(chain.characteristic(C64::new(lambda, 0.0))?.re)
}

/// Transfer matrices of the three pieces at `zeta`.
pub fn transfer_matrices(
    spec: &ProblemSpec,
    eps: f64,
    zeta: C64,
) -> Result<Vec<crate::chain::TransferMatrix>> {
    perturbed_chain(spec, eps)?.transfers(zeta)
}

/// Action of the perturbed resolvent in product-space coordinates:
/// `f_a` on `(a, 0)`, `f_0` on `(-1, 1)`, `f_b` on `(0, b)`.
///
/// The chain problem is solved with `f_a`, `f_0`, `f_b` on the three pieces;
/// the outer solutions are then continued to the origin by the outer equation.
pub fn apply_perturbed_resolvent(
    spec: &ProblemSpec,
    eps: f64,
    zeta: C64,
    f: &Triple,
) -> Result<Triple> {
    let chain = perturbed_chain(spec, eps)?;
    chain.check_regular(zeta, SPECTRAL_GUARD)?;
    let sources = [Some(f.a.clone()), Some(f.mid.clone()), Some(f.b.clone())];
    let sol = chain.solve(zeta, &sources, C64::new(0.0, 0.0), C64::new(0.0, 0.0))?;
    let [left, mid, right]: [Curve; 3] = sol.curves.try_into().expect("three pieces");
    let (yl, dl) = left.eval(-eps);
    let ext_l = propagate(
        &Piece::new(-eps, 0.0, spec.q.clone(), spec.r.clone(), 1.0),
        zeta,
        Some(&f.a),
        -eps,
        yl,
        dl,
    )?;
    let (yr, dr) = right.eval(eps);
    let ext_r = propagate(
        &Piece::new(0.0, eps, spec.q.clone(), spec.r.clone(), 1.0),
        zeta,
        Some(&f.b),
        eps,
        yr,
        dr,
    )?;
    let mut bl = left.breaks().to_vec();
    bl.push(-eps);
    let phi_a = Curve::new(spec.a, 0.0, move |x| {
        if x <= -eps {
            left.eval(x)
        } else {
            ext_l.eval(x)
        }
    })
    .with_breaks(bl);
    let mut br = right.breaks().to_vec();
    br.push(eps);
    let phi_b = Curve::new(0.0, spec.b, move |x| {
        if x >= eps {
            right.eval(x)
        } else {
            ext_r.eval(x)
        }
    })
    .with_breaks(br);
    Ok(Triple::new(phi_a, mid, phi_b))
}

/// Residual of a candidate `y = R(F)` in the defining coupled problem:
/// the three equations, both outer conditions and the four junction conditions.
pub fn perturbed_resolvent_residual(
    spec: &ProblemSpec,
    eps: f64,
    zeta: C64,
    f: &Triple,
    y: &Triple,
) -> Residual {
    let qi = inner_potential(spec, eps);
    let eqs = [
        (
            &y.a,
            Equation {
                q: &spec.q,
                w: &spec.r,
                zeta,
                f: Some(&f.a),
                left: spec.a,
                right: 0.0,
            },
        ),
        (
            &y.mid,
            Equation {
                q: &qi,
                w: &spec.h,
                zeta,
                f: Some(&f.mid),
                left: -1.0,
                right: 1.0,
            },
        ),
        (
            &y.b,
            Equation {
                q: &spec.q,
                w: &spec.r,
                zeta,
                f: Some(&f.b),
                left: 0.0,
                right: spec.b,
            },
        ),
    ];
    let mut total = Residual {
        residual: 0.0,
        scale: 0.0,
    };
    for (c, e) in &eqs {
        total = total.combine(ode_residual(c, e, RESIDUAL_PANELS));
    }
    let la = Robin::from_angle(spec.alpha);
    let lb = Robin::from_angle(spec.beta);
    let (ya, da) = y.a.eval(spec.a);
    let (yb, db) = y.b.eval(spec.b);
    let (ul, dul) = y.a.eval(-eps);
    let (vr, dvr) = y.b.eval(eps);
    let (wl, dwl) = y.mid.eval(-1.0);
    let (wr, dwr) = y.mid.eval(1.0);
    let defects = [
        la.form(ya, da),
        lb.form(yb, db),
        ul - wl,
        vr - wr,
        dul * eps - dwl,
        dvr * eps - dwr,
    ];
    let d = defects.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    total.combine(Residual {
        residual: d,
        scale: 0.0,
    })
}
