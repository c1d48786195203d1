//! Single Sturm-Liouville problems `-y'' + q y = lambda w y` on an interval.

use num_complex::Complex64 as C64;

use crate::chain::{Chain, Piece, Robin, EIG_TOL, SPECTRAL_GUARD};
use crate::coeffs::{CoefficientFunction, POSITIVITY_FLOOR};
use crate::curve::{Curve, GridFunction, DEFAULT_SAMPLES};
use crate::error::{Error, Result};

/// Endpoint condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bc {
    /// `y cos + y' sin = 0`, stored normalized.
    Robin { cos: f64, sin: f64 },
    /// `y = value`; homogeneous Dirichlet for eigenvalue problems.
    DirichletValue(C64),
}

impl Bc {
    pub fn robin(cos: f64, sin: f64) -> Self {
        let r = Robin::new(cos, sin);
        Bc::Robin {
            cos: r.cos,
            sin: r.sin,
        }
    }

    pub fn from_angle(theta: f64) -> Self {
        Bc::Robin {
            cos: theta.cos(),
            sin: theta.sin(),
        }
    }

    pub fn dirichlet() -> Self {
        Bc::Robin { cos: 1.0, sin: 0.0 }
    }

    pub fn neumann() -> Self {
        Bc::Robin { cos: 0.0, sin: 1.0 }
    }

    pub fn trace(value: C64) -> Self {
        Bc::DirichletValue(value)
    }

    fn form(&self) -> Robin {
        match *self {
            Bc::Robin { cos, sin } => Robin { cos, sin },
            Bc::DirichletValue(_) => Robin::dirichlet(),
        }
    }

    fn value(&self) -> C64 {
        match *self {
            Bc::Robin { .. } => C64::new(0.0, 0.0),
            Bc::DirichletValue(v) => v,
        }
    }
}

/// A regular self-adjoint problem on `(left, right)`.
#[derive(Debug, Clone)]
pub struct SLProblem {
    pub left: f64,
    pub right: f64,
    pub q: CoefficientFunction,
    pub weight: CoefficientFunction,
    pub left_bc: Bc,
    pub right_bc: Bc,
}

impl SLProblem {
    pub fn new(
        interval: (f64, f64),
        q: CoefficientFunction,
        weight: CoefficientFunction,
        left_bc: Bc,
        right_bc: Bc,
    ) -> Self {
        SLProblem {
            left: interval.0,
            right: interval.1,
            q,
            weight,
            left_bc,
            right_bc,
        }
    }

    /// Constant coefficients.
    pub fn constant(interval: (f64, f64), q: f64, w: f64, left_bc: Bc, right_bc: Bc) -> Self {
        SLProblem::new(
            interval,
            CoefficientFunction::constant(q),
            CoefficientFunction::constant(w),
            left_bc,
            right_bc,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.left < self.right) || !self.left.is_finite() || !self.right.is_finite() {
            return Err(Error::domain(format!(
                "empty interval ({}, {})",
                self.left, self.right
            )));
        }
        let min = self.weight.sampled_min(self.left, self.right, 2000);
        if !(min >= POSITIVITY_FLOOR) {
            return Err(Error::domain(format!(
                "weight not positive: sampled minimum {min}"
            )));
        }
        for bc in [self.left_bc, self.right_bc] {
            if let Bc::Robin { cos, sin } = bc {
                if ((cos * cos + sin * sin) - 1.0).abs() > 1e-12 {
                    return Err(Error::domain("Robin coefficients must be normalized"));
                }
            }
        }
        Ok(())
    }

    /// The problem as a one-piece chain with homogeneous conditions.
    pub fn chain(&self) -> Chain {
        Chain::single(
            Piece::new(
                self.left,
                self.right,
                self.q.clone(),
                self.weight.clone(),
                1.0,
            ),
            self.left_bc.form(),
            self.right_bc.form(),
        )
    }
}

/// An indexed eigenvalue with its normalized eigenfunction.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    /// Zero-based; equals the number of zeros of the eigenfunction.
    pub index: usize,
    pub lambda: f64,
    pub efun: GridFunction,
    pub curve: Curve,
}

/// Solution of the homogeneous equation with one prescribed trace.
#[derive(Debug, Clone)]
pub struct BoundarySolution {
    pub zeta: C64,
    pub trace: C64,
    pub sol: GridFunction,
    pub curve: Curve,
}

/// Eigenvalue tolerance at `lambda`.
pub fn eig_tol(lambda: f64) -> f64 {
    EIG_TOL * lambda.abs().max(1.0)
}

/// The first `n_max` eigenpairs, increasing, indexed by oscillation count.
pub fn eigenvalues(p: &SLProblem, n_max: usize) -> Result<Vec<Eigenpair>> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    p.validate()?;
    let chain = p.chain();
    let lams = chain.eigenvalues(n_max)?;
    for (n, w) in lams.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::Bracketing {
                index: n + 1,
                reason: format!("eigenvalues not increasing: {} then {}", w[0], w[1]),
            });
        }
    }
    lams.into_iter()
        .enumerate()
        .map(|(index, lambda)| {
            let mode = chain.mode(lambda)?;
            let curve = mode.curves.into_iter().next().expect("one piece");
            Ok(Eigenpair {
                index,
                lambda,
                efun: curve.sample(DEFAULT_SAMPLES),
                curve,
            })
        })
        .collect()
}

/// Eigenvalues only, without eigenfunctions.
pub fn eigenvalue_list(p: &SLProblem, n_max: usize) -> Result<Vec<f64>> {
    p.validate()?;
    p.chain().eigenvalues(n_max)
}

/// Every eigenvalue strictly below `cutoff`.
pub fn eigenvalues_below(p: &SLProblem, cutoff: f64) -> Result<Vec<f64>> {
    p.validate()?;
    p.chain().eigenvalues_below(cutoff)
}

/// Locate the computed eigenvalue matching `lambda` and its index.
pub fn match_eigenvalue(p: &SLProblem, lambda: f64) -> Result<(usize, f64)> {
    let chain = p.chain();
    let n = chain.count_below(lambda)?;
    let tol = 1e-7 * lambda.abs().max(1.0);
    let mut cands = vec![(n, chain.eigenvalue(n)?)];
    if n > 0 {
        cands.push((n - 1, chain.eigenvalue(n - 1)?));
    }
    cands
        .into_iter()
        .filter(|(_, l)| (l - lambda).abs() <= tol)
        .min_by(|a, b| (a.1 - lambda).abs().total_cmp(&(b.1 - lambda).abs()))
        .ok_or_else(|| Error::domain(format!("{lambda} is not an eigenvalue of the problem")))
}

/// Normalized eigenfunction curve for an eigenvalue `lambda`.
pub fn eigenfunction(p: &SLProblem, lambda: f64) -> Result<Eigenpair> {
    p.validate()?;
    let (index, lam) = match_eigenvalue(p, lambda)?;
    let mode = p.chain().mode(lam)?;
    let curve = mode.curves.into_iter().next().expect("one piece");
    Ok(Eigenpair {
        index,
        lambda: lam,
        efun: curve.sample(DEFAULT_SAMPLES),
        curve,
    })
}

/// Value and derivative at `x` of the normalized eigenfunction for `lambda`.
pub fn eigenfunction_at(p: &SLProblem, lambda: f64, x: f64) -> Result<(f64, f64)> {
    if !(x >= p.left && x <= p.right) {
        return Err(Error::domain(format!(
            "x = {x} outside [{}, {}]",
            p.left, p.right
        )));
    }
    let e = eigenfunction(p, lambda)?;
    let (v, d) = e.curve.eval(x);
    Ok((v.re, d.re))
}

fn guard_homogeneous(p: &SLProblem, zeta: C64) -> Result<()> {
    p.chain().check_regular(zeta, SPECTRAL_GUARD)
}

/// Solution with a homogeneous Robin condition at one end and a prescribed
/// trace at the other.
pub fn solve_boundary(p: &SLProblem, zeta: C64, trace: C64) -> Result<BoundarySolution> {
    p.validate()?;
    let (lv, rv) = match (p.left_bc, p.right_bc) {
        (Bc::DirichletValue(_), Bc::Robin { .. }) => (trace, C64::new(0.0, 0.0)),
        (Bc::Robin { .. }, Bc::DirichletValue(_)) => (C64::new(0.0, 0.0), trace),
        _ => {
            return Err(Error::domain(
                "boundary solve needs exactly one trace end and one Robin end",
            ))
        }
    };
    if !trace.re.is_finite() || !trace.im.is_finite() {
        return Err(Error::domain("trace must be finite"));
    }
    guard_homogeneous(p, zeta)?;
    let sol = p.chain().solve(zeta, &[None], lv, rv)?;
    let curve = sol.curves.into_iter().next().expect("one piece");
    Ok(BoundarySolution {
        zeta,
        trace,
        sol: curve.sample(DEFAULT_SAMPLES),
        curve,
    })
}

/// Solve `-y'' + q y - zeta w y = w f` with the problem's boundary conditions
/// taken homogeneous.
pub fn solve_nonhomogeneous(p: &SLProblem, zeta: C64, f: &Curve) -> Result<Curve> {
    p.validate()?;
    guard_homogeneous(p, zeta)?;
    let sol = p.chain().solve(
        zeta,
        &[Some(f.clone())],
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    )?;
    Ok(sol.curves.into_iter().next().expect("one piece"))
}

/// [`solve_nonhomogeneous`] for sampled data, returned on the same grid.
pub fn solve_nonhomogeneous_grid(
    p: &SLProblem,
    zeta: C64,
    f: &GridFunction,
) -> Result<GridFunction> {
    let y = solve_nonhomogeneous(p, zeta, &f.to_curve())?;
    let (values, derivs) = f.xs.iter().map(|&x| y.eval(x)).unzip();
    GridFunction::new(f.xs.clone(), values, derivs)
}

/// The homogeneous boundary values a solution should satisfy.
pub fn boundary_defects(p: &SLProblem, y: &Curve) -> (C64, C64) {
    let (ya, da) = y.eval(p.left);
    let (yb, db) = y.eval(p.right);
    (
        p.left_bc.form().form(ya, da) - p.left_bc.value(),
        p.right_bc.form().form(yb, db) - p.right_bc.value(),
    )
}
