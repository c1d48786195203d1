//! Problem data: coefficient functions, the problem definition and the
//! concentrated-mass weight `r_eps`.
//!
//! A [`ProblemSpec`] describes `-y'' + q y = lambda r_eps y` on `(a, b)` with
//! Robin conditions `y cos(alpha) + y' sin(alpha) = 0` at `a` and the analogous
//! condition with `beta` at `b`. The weight equals `r` away from the origin and
//! `eps^-2 h(x / eps)` on `(-eps, eps)`.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Default lower bound a weight must stay above.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Interior sample count used by [`validate_spec`].
pub const VALIDATION_SAMPLES: usize = 10_000;

/// One polynomial piece `p(x) = sum_k coeffs[k] * (x - left)^k` on `[left, right]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPiece {
    pub left: f64,
    pub right: f64,
    pub coeffs: Vec<f64>,
}

impl PolyPiece {
    pub fn new(left: f64, right: f64, coeffs: Vec<f64>) -> Self {
        PolyPiece {
            left,
            right,
            coeffs,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = x - self.left;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

#[derive(Debug)]
enum Kind {
    Constant(f64),
    Piecewise(Vec<PolyPiece>),
    Grid {
        xs: Vec<f64>,
        values: Vec<f64>,
    },
    /// `factor * base(scale * t + shift)`
    Affine {
        base: CoefficientFunction,
        scale: f64,
        shift: f64,
        factor: f64,
    },
}

/// A real coefficient function of one variable.
///
/// Cheap to clone. Evaluation outside the declared domain extends the first
/// or last piece; callers are responsible for staying inside their interval.
#[derive(Debug, Clone)]
pub struct CoefficientFunction {
    kind: Arc<Kind>,
    domain: Option<(f64, f64)>,
}

impl CoefficientFunction {
    pub fn constant(value: f64) -> Self {
        CoefficientFunction {
            kind: Arc::new(Kind::Constant(value)),
            domain: None,
        }
    }

    /// Piecewise polynomial in local powers of `x - piece.left`. Pieces must be
    /// contiguous and sorted.
    pub fn piecewise(pieces: Vec<PolyPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::domain(
                "piecewise coefficient needs at least one piece",
            ));
        }
        for p in &pieces {
            if !(p.left < p.right) || p.coeffs.is_empty() {
                return Err(Error::domain(format!(
                    "piece [{}, {}] is empty or has no coefficients",
                    p.left, p.right
                )));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::domain("non-finite polynomial coefficient"));
            }
        }
        for w in pieces.windows(2) {
            if (w[0].right - w[1].left).abs() > 1e-12 * (1.0 + w[0].right.abs()) {
                return Err(Error::domain(format!(
                    "pieces are not contiguous at {} / {}",
                    w[0].right, w[1].left
                )));
            }
        }
        let domain = Some((pieces[0].left, pieces[pieces.len() - 1].right));
        Ok(CoefficientFunction {
            kind: Arc::new(Kind::Piecewise(pieces)),
            domain,
        })
    }

    /// Linear interpolation of `(xs, values)`; `xs` strictly increasing.
    pub fn grid(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::domain(
                "grid coefficient needs matching x/value arrays with at least two samples",
            ));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("grid abscissae must be strictly increasing"));
        }
        if values.iter().chain(xs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite grid sample"));
        }
        let domain = Some((xs[0], xs[xs.len() - 1]));
        Ok(CoefficientFunction {
            kind: Arc::new(Kind::Grid { xs, values }),
            domain,
        })
    }

    /// `t -> factor * self(scale * t + shift)`.
    pub fn pullback(&self, scale: f64, shift: f64, factor: f64) -> Self {
        assert!(scale != 0.0, "affine pullback needs a nonzero scale");
        let domain = self.domain.map(|(l, r)| {
            let (u, v) = ((l - shift) / scale, (r - shift) / scale);
            if u < v {
                (u, v)
            } else {
                (v, u)
            }
        });
        CoefficientFunction {
            kind: Arc::new(Kind::Affine {
                base: self.clone(),
                scale,
                shift,
                factor,
            }),
            domain,
        }
    }

    /// The same function with its declared domain narrowed to `[left, right]`.
    pub fn restrict(&self, left: f64, right: f64) -> Self {
        CoefficientFunction {
            kind: Arc::clone(&self.kind),
            domain: Some((left, right)),
        }
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    pub fn is_constant(&self) -> Option<f64> {
        match &*self.kind {
            Kind::Constant(c) => Some(*c),
            Kind::Affine { base, factor, .. } => base.is_constant().map(|c| c * factor),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_near(x, x)
    }

    /// Evaluate at `x` using the smooth branch that contains `hint`.
    ///
    /// At a breakpoint this gives the one-sided limit from the side of `hint`,
    /// which integrators need when a stage lands exactly on a segment end.
    pub fn eval_near(&self, x: f64, hint: f64) -> f64 {
        match &*self.kind {
            Kind::Constant(c) => *c,
            Kind::Piecewise(pieces) => {
                let i = locate(pieces.len(), |i| pieces[i].right, hint);
                pieces[i].eval(x)
            }
            Kind::Grid { xs, values } => {
                let i = locate(xs.len() - 1, |i| xs[i + 1], hint);
                let (x0, x1) = (xs[i], xs[i + 1]);
                let s = (x - x0) / (x1 - x0);
                values[i] + s * (values[i + 1] - values[i])
            }
            Kind::Affine {
                base,
                scale,
                shift,
                factor,
            } => factor * base.eval_near(scale * x + shift, scale * hint + shift),
        }
    }

    /// Interior points where the function or its derivatives may jump, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &*self.kind {
            Kind::Constant(_) => Vec::new(),
            Kind::Piecewise(pieces) => pieces[..pieces.len() - 1].iter().map(|p| p.right).collect(),
            Kind::Grid { xs, .. } => xs[1..xs.len() - 1].to_vec(),
            Kind::Affine {
                base, scale, shift, ..
            } => {
                let mut v: Vec<f64> = base
                    .breakpoints()
                    .into_iter()
                    .map(|x| (x - shift) / scale)
                    .collect();
                v.sort_by(f64::total_cmp);
                v
            }
        }
    }

    /// Breakpoints strictly inside `(left, right)`.
    pub fn breakpoints_in(&self, left: f64, right: f64) -> Vec<f64> {
        let (lo, hi) = if left < right {
            (left, right)
        } else {
            (right, left)
        };
        let tol = 1e-14 * (1.0 + lo.abs().max(hi.abs()));
        self.breakpoints()
            .into_iter()
            .filter(|&x| x > lo + tol && x < hi - tol)
            .collect()
    }

    /// Sample points on `[left, right]`: a uniform grid plus every breakpoint
    /// approached from both sides.
    fn probe_points(&self, left: f64, right: f64, n: usize) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let x = left + (right - left) * i as f64 / n as f64;
            let hint = x.clamp(left, right);
            pts.push((x, hint));
        }
        let span = right - left;
        for bp in self.breakpoints_in(left, right) {
            let d = 1e-9 * span;
            pts.push((bp, bp - d));
            pts.push((bp, bp + d));
        }
        pts
    }

    /// Sampled infimum over `[left, right]`.
    pub fn sampled_min(&self, left: f64, right: f64, n: usize) -> f64 {
        self.probe_points(left, right, n)
            .into_iter()
            .map(|(x, h)| self.eval_near(x, h))
            .fold(f64::INFINITY, f64::min)
    }

    /// Sampled supremum of `|f|` over `[left, right]`.
    pub fn sampled_sup_abs(&self, left: f64, right: f64, n: usize) -> f64 {
        self.probe_points(left, right, n)
            .into_iter()
            .map(|(x, h)| self.eval_near(x, h).abs())
            .fold(0.0, f64::max)
    }

    fn sampled_all_finite(&self, left: f64, right: f64, n: usize) -> bool {
        self.probe_points(left, right, n)
            .into_iter()
            .all(|(x, h)| self.eval_near(x, h).is_finite())
    }
}

/// Index of the piece whose right end is the first one above `x`; the last
/// piece absorbs everything to its right.
fn locate(n: usize, right_end: impl Fn(usize) -> f64, x: f64) -> usize {
    let (mut lo, mut hi) = (0usize, n - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if x < right_end(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Input of the perturbed problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub q: CoefficientFunction,
    pub r: CoefficientFunction,
    pub h: CoefficientFunction,
}

impl ProblemSpec {
    /// Constant coefficients `q`, `r`, `h`.
    pub fn constant(a: f64, b: f64, alpha: f64, beta: f64, q: f64, r: f64, h: f64) -> Self {
        ProblemSpec {
            a,
            b,
            alpha,
            beta,
            q: CoefficientFunction::constant(q),
            r: CoefficientFunction::constant(r),
            h: CoefficientFunction::constant(h),
        }
    }

    /// Largest admissible `eps` for the perturbed problem.
    pub fn max_eps(&self) -> f64 {
        (-self.a).min(self.b) / 2.0
    }

    /// `sup |q / r|` over `(a, b)`, sampled.
    pub fn sup_q_over_r(&self) -> f64 {
        let n = 2000;
        (0..=n)
            .map(|i| {
                let x = self.a + (self.b - self.a) * i as f64 / n as f64;
                (self.q.eval(x) / self.r.eval(x)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// One violated invariant found by [`validate_spec`].
#[derive(Debug, Clone, PartialEq)]
pub enum SpecIssue {
    OriginNotInterior {
        a: f64,
        b: f64,
    },
    NonFiniteAngle(&'static str),
    WeightNotPositive {
        name: &'static str,
        min: f64,
    },
    NotFinite(&'static str),
    DomainTooShort {
        name: &'static str,
        domain: (f64, f64),
        needed: (f64, f64),
    },
}

impl std::fmt::Display for SpecIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecIssue::OriginNotInterior { a, b } => {
                write!(
                    f,
                    "origin not interior: need a < 0 < b, got a = {a}, b = {b}"
                )
            }
            SpecIssue::NonFiniteAngle(n) => write!(f, "boundary angle {n} is not finite"),
            SpecIssue::WeightNotPositive { name, min } => {
                write!(f, "weight {name} not positive: sampled minimum {min}")
            }
            SpecIssue::NotFinite(n) => write!(f, "coefficient {n} takes non-finite values"),
            SpecIssue::DomainTooShort {
                name,
                domain,
                needed,
            } => write!(
                f,
                "coefficient {name} is declared on [{}, {}] but must cover [{}, {}]",
                domain.0, domain.1, needed.0, needed.1
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<SpecIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Check every invariant of a [`ProblemSpec`], reporting all violations.
pub fn validate_spec(spec: &ProblemSpec) -> ValidationReport {
    validate_spec_with_floor(spec, POSITIVITY_FLOOR)
}

pub fn validate_spec_with_floor(spec: &ProblemSpec, floor: f64) -> ValidationReport {
    let mut issues = Vec::new();
    let ordered = spec.a.is_finite() && spec.b.is_finite() && spec.a < 0.0 && 0.0 < spec.b;
    if !ordered {
        issues.push(SpecIssue::OriginNotInterior {
            a: spec.a,
            b: spec.b,
        });
    }
    if !spec.alpha.is_finite() {
        issues.push(SpecIssue::NonFiniteAngle("alpha"));
    }
    if !spec.beta.is_finite() {
        issues.push(SpecIssue::NonFiniteAngle("beta"));
    }
    let n = VALIDATION_SAMPLES;
    let mut covers = |name: &'static str, c: &CoefficientFunction, l: f64, r: f64| {
        if let Some(d) = c.domain() {
            let tol = 1e-12 * (1.0 + l.abs().max(r.abs()));
            if d.0 > l + tol || d.1 < r - tol {
                issues.push(SpecIssue::DomainTooShort {
                    name,
                    domain: d,
                    needed: (l, r),
                });
            }
        }
    };
    if ordered {
        covers("q", &spec.q, spec.a, spec.b);
        covers("r", &spec.r, spec.a, spec.b);
    }
    covers("h", &spec.h, -1.0, 1.0);
    if ordered {
        if !spec.q.sampled_all_finite(spec.a, spec.b, n) {
            issues.push(SpecIssue::NotFinite("q"));
        }
        if !spec.r.sampled_all_finite(spec.a, spec.b, n) {
            issues.push(SpecIssue::NotFinite("r"));
        } else {
            let min = spec.r.sampled_min(spec.a, spec.b, n);
            if !(min >= floor) {
                issues.push(SpecIssue::WeightNotPositive { name: "r", min });
            }
        }
    }
    if !spec.h.sampled_all_finite(-1.0, 1.0, n) {
        issues.push(SpecIssue::NotFinite("h"));
    } else {
        let min = spec.h.sampled_min(-1.0, 1.0, n);
        if !(min >= floor) {
            issues.push(SpecIssue::WeightNotPositive { name: "h", min });
        }
    }
    ValidationReport { issues }
}

/// The weight `r_eps` for a fixed `eps`.
#[derive(Debug, Clone)]
pub struct EpsWeight {
    spec: ProblemSpec,
    eps: f64,
}

impl EpsWeight {
    pub fn new(spec: ProblemSpec, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || eps >= (-spec.a).min(spec.b) {
            return Err(Error::domain(format!(
                "eps = {eps} must lie in (0, min(-a, b)) = (0, {})",
                (-spec.a).min(spec.b)
            )));
        }
        Ok(EpsWeight { spec, eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    /// Junction points `x = +-eps` take the outer value `r(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > self.spec.a && x < self.spec.b) {
            return Err(Error::domain(format!(
                "x = {x} outside ({}, {})",
                self.spec.a, self.spec.b
            )));
        }
        Ok(eval_weight_eps_unchecked(&self.spec, self.eps, x))
    }

    /// Points where `r_eps` may jump: `+-eps` and the breakpoints of `r` and `h`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let eps = self.eps;
        let mut v: Vec<f64> = self
            .spec
            .r
            .breakpoints_in(self.spec.a, self.spec.b)
            .into_iter()
            .filter(|x| x.abs() > eps)
            .collect();
        v.extend(
            self.spec
                .h
                .breakpoints_in(-1.0, 1.0)
                .into_iter()
                .map(|t| eps * t),
        );
        v.push(-eps);
        v.push(eps);
        v.sort_by(f64::total_cmp);
        v
    }
}

fn eval_weight_eps_unchecked(spec: &ProblemSpec, eps: f64, x: f64) -> f64 {
    if x.abs() < eps {
        spec.h.eval(x / eps) / (eps * eps)
    } else {
        spec.r.eval(x)
    }
}

/// `r_eps(x)`: `r(x)` for `|x| >= eps`, `eps^-2 h(x / eps)` inside.
pub fn eval_weight_eps(w: &EpsWeight, x: f64) -> Result<f64> {
    w.eval(x)
}
