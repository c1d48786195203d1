//! Shooting engine for a chain of Sturm-Liouville pieces.
//!
//! Each piece carries its own local variable `t`, coefficients `Q(t)`, `W(t)`
//! and a derivative scale `s`: the physical derivative equals `dy/dt / s`.
//! Values and physical derivatives are continuous across junctions, so a
//! single piece with `s = 1` is an ordinary problem, and the rescaled
//! concentrated-mass problem is a chain of three. The physical weighted norm
//! of a chain function is `sum_k (1/s_k) int W_k |y|^2 dt`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::coeffs::CoefficientFunction;
use crate::curve::{Curve, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::ode::{integrate, Tolerances, Trajectory};
use crate::roots::brent;

/// Eigenvalue tolerance: absolute for `|lambda| <= 1`, relative above.
pub const EIG_TOL: f64 = 1e-9;

/// Minimal distance between a spectral parameter and an eigenvalue.
pub const SPECTRAL_GUARD: f64 = 1e-6;

/// A homogeneous Robin form `y cos + y' sin` in physical derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robin {
    pub cos: f64,
    pub sin: f64,
}

impl Robin {
    /// Normalizes `(cos, sin)` to unit length.
    pub fn new(cos: f64, sin: f64) -> Self {
        let n = cos.hypot(sin);
        assert!(n > 0.0, "Robin form needs a nonzero coefficient");
        Robin {
            cos: cos / n,
            sin: sin / n,
        }
    }

    pub fn from_angle(theta: f64) -> Self {
        Robin {
            cos: theta.cos(),
            sin: theta.sin(),
        }
    }

    pub fn dirichlet() -> Self {
        Robin { cos: 1.0, sin: 0.0 }
    }

    pub fn neumann() -> Self {
        Robin { cos: 0.0, sin: 1.0 }
    }

    pub fn form(&self, y: C64, dy: C64) -> C64 {
        y * self.cos + dy * self.sin
    }
}

/// One piece of a chain.
#[derive(Debug, Clone)]
pub struct Piece {
    pub left: f64,
    pub right: f64,
    pub q: CoefficientFunction,
    pub w: CoefficientFunction,
    pub scale: f64,
}

impl Piece {
    pub fn new(
        left: f64,
        right: f64,
        q: CoefficientFunction,
        w: CoefficientFunction,
        scale: f64,
    ) -> Self {
        Piece {
            left,
            right,
            q,
            w,
            scale,
        }
    }

    /// Ascending cut points: both ends and every coefficient breakpoint.
    pub fn knots(&self, extra: &[f64]) -> Vec<f64> {
        let mut k = vec![self.left, self.right];
        k.extend(self.q.breakpoints_in(self.left, self.right));
        k.extend(self.w.breakpoints_in(self.left, self.right));
        let tol = 1e-13 * (self.right - self.left);
        k.extend(
            extra
                .iter()
                .copied()
                .filter(|&x| x > self.left + tol && x < self.right - tol),
        );
        k.sort_by(f64::total_cmp);
        k.dedup_by(|a, b| (*a - *b).abs() <= tol);
        k
    }

    pub fn sup_q_over_w(&self) -> f64 {
        let n = 400;
        (0..=n)
            .map(|i| {
                let t = self.left + (self.right - self.left) * i as f64 / n as f64;
                (self.q.eval(t) / self.w.eval(t)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Integrate across the segments between `knots` (ascending), forward or
/// backward, restarting the integrator at every knot.
pub(crate) fn integrate_knots<const N: usize, F>(
    knots: &[f64],
    forward: bool,
    y0: [f64; N],
    tol: &Tolerances,
    record: bool,
    mut rhs: F,
) -> Result<([f64; N], Option<Trajectory<N>>)>
where
    F: FnMut(f64, &[f64; N], f64) -> [f64; N],
{
    let mut y = y0;
    let mut traj: Option<Trajectory<N>> = None;
    let nseg = knots.len() - 1;
    for j in 0..nseg {
        let i = if forward { j } else { nseg - 1 - j };
        let (lo, hi) = (knots[i], knots[i + 1]);
        let mid = 0.5 * (lo + hi);
        let (from, to) = if forward { (lo, hi) } else { (hi, lo) };
        let (y1, t) = integrate(|x, s| rhs(x, s, mid), from, y, to, tol, record)?;
        y = y1;
        if let Some(t) = t {
            match traj.as_mut() {
                Some(acc) => acc.append(t),
                None => traj = Some(t),
            }
        }
    }
    Ok((y, traj))
}

fn prufer_tol() -> Tolerances {
    Tolerances {
        rtol: 1e-11,
        atol: 1e-12,
        ..Tolerances::default()
    }
}

/// 2x2 complex matrix acting on physical `(y, y')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[C64; 2]; 2]);

impl TransferMatrix {
    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        TransferMatrix([[o, z], [z, o]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.0, &other.0);
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TransferMatrix(m)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }
}

/// A normalized real eigenfunction of a chain, one curve per piece.
///
/// Curve derivatives are taken in each piece's local variable.
#[derive(Debug, Clone)]
pub struct ChainMode {
    pub lambda: f64,
    pub curves: Vec<Curve>,
    /// Relative mismatch of the two shooting directions at the matching point.
    pub match_defect: f64,
}

/// Solution of a boundary-value problem on a chain, one curve per piece.
#[derive(Debug, Clone)]
pub struct ChainSolution {
    pub curves: Vec<Curve>,
}

/// A chain of pieces with Robin conditions at the outer ends.
#[derive(Debug, Clone)]
pub struct Chain {
    pub pieces: Vec<Piece>,
    pub left_bc: Robin,
    pub right_bc: Robin,
}

fn normalize_angle_left(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(PI);
    if p >= PI {
        p -= PI;
    }
    p
}

fn normalize_angle_right(phi: f64) -> f64 {
    let p = normalize_angle_left(phi);
    if p <= 0.0 {
        PI
    } else {
        p
    }
}

impl Chain {
    pub fn new(pieces: Vec<Piece>, left_bc: Robin, right_bc: Robin) -> Self {
        assert!(!pieces.is_empty());
        Chain {
            pieces,
            left_bc,
            right_bc,
        }
    }

    pub fn single(piece: Piece, left_bc: Robin, right_bc: Robin) -> Self {
        Chain::new(vec![piece], left_bc, right_bc)
    }

    fn first_scale(&self) -> f64 {
        self.pieces[0].scale
    }

    fn last_scale(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].scale
    }

    fn initial_angle(&self) -> f64 {
        let bc = self.left_bc;
        normalize_angle_left(bc.sin.atan2(-self.first_scale() * bc.cos))
    }

    fn target_angle(&self) -> f64 {
        let bc = self.right_bc;
        normalize_angle_right(bc.sin.atan2(-self.last_scale() * bc.cos))
    }

    /// Prüfer angle at the right end for real `lambda`.
    pub fn prufer_end(&self, lambda: f64) -> Result<f64> {
        let tol = prufer_tol();
        let mut theta = self.initial_angle();
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                let c = p.scale / self.pieces[k - 1].scale;
                let m = (theta / PI).floor();
                let frac = theta - m * PI;
                theta = m * PI + frac.sin().atan2(c * frac.cos());
            }
            let (q, w) = (&p.q, &p.w);
            let (end, _) =
                integrate_knots(&p.knots(&[]), true, [theta], &tol, false, |t, y, hint| {
                    let (s, c) = y[0].sin_cos();
                    [c * c + (lambda * w.eval_near(t, hint) - q.eval_near(t, hint)) * s * s]
                })?;
            theta = end[0];
        }
        Ok(theta)
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: f64) -> Result<usize> {
        let phi = self.prufer_end(lambda)?;
        let k = ((phi - self.target_angle()) / PI).ceil();
        Ok(if k > 0.0 { k as usize } else { 0 })
    }

    /// A value below the whole spectrum.
    pub fn lower_bound(&self) -> f64 {
        let sup = self
            .pieces
            .iter()
            .map(Piece::sup_q_over_w)
            .fold(0.0, f64::max);
        -sup - 1.0
    }

    /// The `n`-th eigenvalue (0-based oscillation index).
    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        let goal = self.target_angle() + n as f64 * PI;
        let g = |l: f64| -> Result<f64> { Ok(self.prufer_end(l)? - goal) };
        let mut lo = self.lower_bound();
        let mut tries = 0;
        while g(lo)? >= 0.0 {
            lo = 2.0 * lo - 1.0;
            tries += 1;
            if tries > 60 {
                return Err(Error::Bracketing {
                    index: n,
                    reason: "no lower bracket".into(),
                });
            }
        }
        let mut step = lo.abs().max(1.0);
        let mut hi = lo + step;
        tries = 0;
        while g(hi)? <= 0.0 {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
            tries += 1;
            if tries > 80 {
                return Err(Error::Bracketing {
                    index: n,
                    reason: "no upper bracket".into(),
                });
            }
        }
        let lam = brent(g, lo, hi, 1e-13 * hi.abs().max(1.0), 200).map_err(|e| retag(e, n))?;
        Ok(self.polish(lam))
    }

    /// Refine an eigenvalue on the transfer-matrix characteristic function.
    fn polish(&self, lam: f64) -> f64 {
        let scale = lam.abs().max(1.0);
        let delta = 1e-7 * scale;
        let chi = |l: f64| self.characteristic(C64::new(l, 0.0)).map(|v| v.re);
        match (chi(lam - delta), chi(lam + delta)) {
            (Ok(a), Ok(b)) if a.signum() != b.signum() => {
                brent(chi, lam - delta, lam + delta, 1e-15 * scale, 100).unwrap_or(lam)
            }
            _ => lam,
        }
    }

    pub fn eigenvalues(&self, n_max: usize) -> Result<Vec<f64>> {
        (0..n_max).map(|n| self.eigenvalue(n)).collect()
    }

    /// Every eigenvalue strictly below `cutoff`.
    pub fn eigenvalues_below(&self, cutoff: f64) -> Result<Vec<f64>> {
        let n = self.count_below(cutoff)?;
        self.eigenvalues(n)
    }

    /// Physical transfer matrix of piece `k` at spectral parameter `zeta`.
    pub fn transfer(&self, k: usize, zeta: C64) -> Result<TransferMatrix> {
        let p = &self.pieces[k];
        let (q, w) = (&p.q, &p.w);
        let y0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let (y, _) = integrate_knots(
            &p.knots(&[]),
            true,
            y0,
            &Tolerances::boundary_value(),
            false,
            |t, y, hint| {
                let qv = q.eval_near(t, hint);
                let wv = w.eval_near(t, hint);
                let (cr, ci) = (qv - zeta.re * wv, -zeta.im * wv);
                let mut d = [0.0; 8];
                for j in 0..2 {
                    let o = 4 * j;
                    d[o] = y[o + 2];
                    d[o + 1] = y[o + 3];
                    d[o + 2] = cr * y[o] - ci * y[o + 1];
                    d[o + 3] = cr * y[o + 1] + ci * y[o];
                }
                d
            },
        )?;
        let s = p.scale;
        let m00 = C64::new(y[0], y[1]);
        let m10 = C64::new(y[2], y[3]);
        let m01 = C64::new(y[4], y[5]);
        let m11 = C64::new(y[6], y[7]);
        Ok(TransferMatrix([[m00, m01 * s], [m10 / s, m11]]))
    }

    /// Transfer matrices of all pieces, in order.
    pub fn transfers(&self, zeta: C64) -> Result<Vec<TransferMatrix>> {
        (0..self.pieces.len())
            .map(|k| self.transfer(k, zeta))
            .collect()
    }

    /// Right boundary form of the solution satisfying the left condition.
    pub fn characteristic(&self, zeta: C64) -> Result<C64> {
        let bc = self.left_bc;
        let mut v = [C64::new(bc.sin, 0.0), C64::new(-bc.cos, 0.0)];
        for k in 0..self.pieces.len() {
            v = self.transfer(k, zeta)?.apply(v);
        }
        Ok(self.right_bc.form(v[0], v[1]))
    }

    /// Fail when `zeta` lies within `guard` of an eigenvalue.
    pub fn check_regular(&self, zeta: C64, guard: f64) -> Result<()> {
        if zeta.im.abs() >= guard {
            return Ok(());
        }
        let k = self.count_below(zeta.re)?;
        let mut near = vec![self.eigenvalue(k)?];
        if k > 0 {
            near.push(self.eigenvalue(k - 1)?);
        }
        for l in near {
            let d = (C64::new(l, 0.0) - zeta).norm();
            if d < guard {
                return Err(Error::NearSingular {
                    eigenvalue: l,
                    distance: d,
                });
            }
        }
        Ok(())
    }

    /// Normalized eigenfunction for an eigenvalue `lambda`, by shooting from
    /// both ends to the midpoint of the middle piece.
    pub fn mode(&self, lambda: f64) -> Result<ChainMode> {
        let tol = Tolerances::default();
        let np = self.pieces.len();
        let m = np / 2;
        let pm = &self.pieces[m];
        let tm = 0.5 * (pm.left + pm.right);
        let rhs = |p: &Piece, sign: f64| {
            let (q, w, s) = (p.q.clone(), p.w.clone(), p.scale);
            move |t: f64, y: &[f64; 3], hint: f64| {
                let wv = w.eval_near(t, hint);
                [
                    y[1],
                    (q.eval_near(t, hint) - lambda * wv) * y[0],
                    sign * wv / s * y[0] * y[0],
                ]
            }
        };
        let mut left_trajs: Vec<Arc<Trajectory<3>>> = Vec::new();
        let bc = self.left_bc;
        let mut st = [bc.sin, -bc.cos * self.pieces[0].scale, 0.0];
        for k in 0..=m {
            let p = &self.pieces[k];
            if k > 0 {
                st[1] *= p.scale / self.pieces[k - 1].scale;
            }
            let mut knots = p.knots(&[tm]);
            if k == m {
                knots.retain(|&x| x <= tm);
            }
            let (y, t) = integrate_knots(&knots, true, st, &tol, true, rhs(p, 1.0))?;
            st = y;
            left_trajs.push(Arc::new(t.expect("recorded")));
        }
        let left_at_m = st;
        let bc = self.right_bc;
        let mut st = [bc.sin, -bc.cos * self.pieces[np - 1].scale, 0.0];
        let mut right_trajs: Vec<Arc<Trajectory<3>>> = Vec::new();
        for k in (m..np).rev() {
            let p = &self.pieces[k];
            if k < np - 1 {
                st[1] *= p.scale / self.pieces[k + 1].scale;
            }
            let mut knots = p.knots(&[tm]);
            if k == m {
                knots.retain(|&x| x >= tm);
            }
            let (y, t) = integrate_knots(&knots, false, st, &tol, true, rhs(p, -1.0))?;
            st = y;
            right_trajs.push(Arc::new(t.expect("recorded")));
        }
        right_trajs.reverse();
        let right_at_m = st;
        let (l, r) = (left_at_m, right_at_m);
        let rr = r[0] * r[0] + r[1] * r[1];
        if !(rr > 0.0) {
            return Err(Error::Degenerate("vanishing shooting solution".into()));
        }
        let c = (l[0] * r[0] + l[1] * r[1]) / rr;
        let defect = ((l[0] - c * r[0]).powi(2) + (l[1] - c * r[1]).powi(2)).sqrt()
            / (l[0] * l[0] + l[1] * l[1]).sqrt().max(1e-300);
        let norm2 = l[2] + c * c * r[2];
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::Degenerate(
                "eigenfunction norm is not positive".into(),
            ));
        }
        let nl = 1.0 / norm2.sqrt();
        let nr = c / norm2.sqrt();
        let mut curves = Vec::with_capacity(np);
        for k in 0..np {
            let p = &self.pieces[k];
            let knots = p.knots(&[]);
            let curve = if k < m {
                let t = Arc::clone(&left_trajs[k]);
                Curve::new(p.left, p.right, move |x| {
                    let s = t.eval(x);
                    (C64::new(nl * s[0], 0.0), C64::new(nl * s[1], 0.0))
                })
            } else if k > m {
                let t = Arc::clone(&right_trajs[k - m]);
                Curve::new(p.left, p.right, move |x| {
                    let s = t.eval(x);
                    (C64::new(nr * s[0], 0.0), C64::new(nr * s[1], 0.0))
                })
            } else {
                let tl = Arc::clone(&left_trajs[m]);
                let tr = Arc::clone(&right_trajs[0]);
                Curve::new(p.left, p.right, move |x| {
                    let (s, f) = if x <= tm {
                        (tl.eval(x), nl)
                    } else {
                        (tr.eval(x), nr)
                    };
                    (C64::new(f * s[0], 0.0), C64::new(f * s[1], 0.0))
                })
            };
            curves.push(curve.with_breaks(knots));
        }
        // sign: first sample above a tenth of the maximum is positive
        let samples: Vec<f64> = curves
            .iter()
            .flat_map(|c| c.sample(DEFAULT_SAMPLES).values.into_iter().map(|v| v.re))
            .collect();
        let max = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let first = samples
            .iter()
            .find(|v| v.abs() > 0.1 * max)
            .copied()
            .unwrap_or(1.0);
        if first < 0.0 {
            curves = curves
                .iter()
                .map(|c| c.scaled(C64::new(-1.0, 0.0)))
                .collect();
        }
        Ok(ChainMode {
            lambda,
            curves,
            match_defect: defect,
        })
    }

    /// Solve `-y'' + Q y - zeta W y = W f` on every piece with
    /// `left_bc(y) = left_value`, `right_bc(y) = right_value` and continuity
    /// of values and physical derivatives at the junctions.
    ///
    /// `sources[k]` is the right-hand side on piece `k` in its local variable.
    pub fn solve(
        &self,
        zeta: C64,
        sources: &[Option<Curve>],
        left_value: C64,
        right_value: C64,
    ) -> Result<ChainSolution> {
        assert_eq!(sources.len(), self.pieces.len());
        let tol = Tolerances::boundary_value();
        let np = self.pieces.len();
        let s0 = self.pieces[0].scale;
        // particular from zero state; fundamentals (1, 0) and (0, 1) in physical form
        let mut st = [0.0; 12];
        st[4] = 1.0;
        st[10] = s0;
        let mut trajs = Vec::with_capacity(np);
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                let c = p.scale / self.pieces[k - 1].scale;
                for o in [2, 3, 6, 7, 10, 11] {
                    st[o] *= c;
                }
            }
            let src = sources[k].clone();
            let extra: Vec<f64> = src
                .as_ref()
                .map(|c| c.breaks().to_vec())
                .unwrap_or_default();
            let (q, w) = (&p.q, &p.w);
            let (y, t) = integrate_knots(&p.knots(&extra), true, st, &tol, true, |t, y, hint| {
                let qv = q.eval_near(t, hint);
                let wv = w.eval_near(t, hint);
                let (cr, ci) = (qv - zeta.re * wv, -zeta.im * wv);
                let mut d = [0.0; 12];
                for j in 0..3 {
                    let o = 4 * j;
                    d[o] = y[o + 2];
                    d[o + 1] = y[o + 3];
                    d[o + 2] = cr * y[o] - ci * y[o + 1];
                    d[o + 3] = cr * y[o + 1] + ci * y[o];
                }
                if let Some(f) = &src {
                    let fv = f.value(t);
                    d[2] -= wv * fv.re;
                    d[3] -= wv * fv.im;
                }
                d
            })?;
            st = y;
            trajs.push(Arc::new(t.expect("recorded")));
        }
        let sl = self.last_scale();
        let cplx = |o: usize| {
            (
                C64::new(st[o], st[o + 1]),
                C64::new(st[o + 2], st[o + 3]) / sl,
            )
        };
        let (yp, dp) = cplx(0);
        let (y1, d1) = cplx(4);
        let (y2, d2) = cplx(8);
        let (la, lb) = (self.left_bc, self.right_bc);
        // [ la.cos  la.sin ] [c1]   [ left_value              ]
        // [ lb(y1)  lb(y2) ] [c2] = [ right_value - lb(yp)    ]
        let a11 = C64::new(la.cos, 0.0);
        let a12 = C64::new(la.sin, 0.0);
        let a21 = lb.form(y1, d1);
        let a22 = lb.form(y2, d2);
        let rhs1 = left_value;
        let rhs2 = right_value - lb.form(yp, dp);
        let det = a11 * a22 - a12 * a21;
        let scale = (a21.norm() + a22.norm()).max(1e-300);
        if !(det.norm() > 1e-14 * scale) {
            return Err(Error::Degenerate(
                "boundary-value problem is singular at this spectral parameter".into(),
            ));
        }
        let c1 = (rhs1 * a22 - a12 * rhs2) / det;
        let c2 = (a11 * rhs2 - a21 * rhs1) / det;
        let curves = self
            .pieces
            .iter()
            .zip(trajs)
            .map(|(p, t)| {
                Curve::new(p.left, p.right, move |x| {
                    let s = t.eval(x);
                    let c = |o: usize| (C64::new(s[o], s[o + 1]), C64::new(s[o + 2], s[o + 3]));
                    let (vp, ep) = c(0);
                    let (v1, e1) = c(4);
                    let (v2, e2) = c(8);
                    (vp + c1 * v1 + c2 * v2, ep + c1 * e1 + c2 * e2)
                })
                .with_breaks(p.knots(&[]))
            })
            .collect();
        Ok(ChainSolution { curves })
    }
}

/// Initial-value solve of `-y'' + Q y - zeta W y = W f` across one piece,
/// starting from `(y0, d0)` at `start` (either end) with local derivative `d0`.
pub fn propagate(
    piece: &Piece,
    zeta: C64,
    source: Option<&Curve>,
    start: f64,
    y0: C64,
    d0: C64,
) -> Result<Curve> {
    let forward = if start == piece.left {
        true
    } else if start == piece.right {
        false
    } else {
        return Err(Error::domain("propagation must start at a piece end"));
    };
    let extra: Vec<f64> = source.map(|c| c.breaks().to_vec()).unwrap_or_default();
    let (q, w) = (&piece.q, &piece.w);
    let knots = piece.knots(&extra);
    let (_, t) = integrate_knots(
        &knots,
        forward,
        [y0.re, y0.im, d0.re, d0.im],
        &Tolerances::boundary_value(),
        true,
        |t, y, hint| {
            let qv = q.eval_near(t, hint);
            let wv = w.eval_near(t, hint);
            let (cr, ci) = (qv - zeta.re * wv, -zeta.im * wv);
            let mut d = [y[2], y[3], cr * y[0] - ci * y[1], cr * y[1] + ci * y[0]];
            if let Some(f) = source {
                let fv = f.value(t);
                d[2] -= wv * fv.re;
                d[3] -= wv * fv.im;
            }
            d
        },
    )?;
    let t = Arc::new(t.expect("recorded"));
    Ok(Curve::new(piece.left, piece.right, move |x| {
        let s = t.eval(x);
        (C64::new(s[0], s[1]), C64::new(s[2], s[3]))
    })
    .with_breaks(knots))
}

fn retag(e: Error, index: usize) -> Error {
    match e {
        Error::Bracketing { reason, .. } => Error::Bracketing { index, reason },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::CompositeRule;

    fn unit_piece(l: f64, r: f64) -> Piece {
        Piece::new(
            l,
            r,
            CoefficientFunction::constant(0.0),
            CoefficientFunction::constant(1.0),
            1.0,
        )
    }

    #[test]
    fn dirichlet_sine_modes() {
        let c = Chain::single(
            unit_piece(-1.0, 0.0),
            Robin::dirichlet(),
            Robin::dirichlet(),
        );
        let ev = c.eigenvalues(3).unwrap();
        for (n, l) in ev.iter().enumerate() {
            let exact = ((n + 1) as f64 * PI).powi(2);
            assert!((l - exact).abs() < 1e-8 * exact, "{l} vs {exact}");
        }
        assert_eq!(c.count_below(ev[1] + 0.01).unwrap(), 2);
        assert_eq!(c.count_below(ev[1] - 0.01).unwrap(), 1);
    }

    #[test]
    fn neumann_modes_start_at_zero() {
        let c = Chain::single(unit_piece(-1.0, 1.0), Robin::neumann(), Robin::neumann());
        let ev = c.eigenvalues(3).unwrap();
        assert!(ev[0].abs() < 1e-9);
        assert!((ev[1] - PI * PI / 4.0).abs() < 1e-8);
        assert!((ev[2] - PI * PI).abs() < 1e-8);
    }

    #[test]
    fn scaled_chain_counts_like_physical_problem() {
        // -y'' = lambda y on (-1, 1), Dirichlet, split into three pieces with the
        // middle one rescaled by eps: t = x / eps, W = eps^2 (r_eps = 1).
        let eps = 0.2;
        let mid = Piece::new(
            -1.0,
            1.0,
            CoefficientFunction::constant(0.0),
            CoefficientFunction::constant(eps * eps),
            eps,
        );
        let c = Chain::new(
            vec![unit_piece(-1.0, -eps), mid, unit_piece(eps, 1.0)],
            Robin::dirichlet(),
            Robin::dirichlet(),
        );
        let ev = c.eigenvalues(4).unwrap();
        for (n, l) in ev.iter().enumerate() {
            let exact = ((n + 1) as f64 * PI / 2.0).powi(2);
            assert!((l - exact).abs() < 1e-8 * exact, "n={n}: {l} vs {exact}");
        }
        for k in 0..3 {
            let d = c.transfer(k, C64::new(3.0, 0.5)).unwrap().det();
            assert!((d - 1.0).norm() < 1e-10);
        }
        let mode = c.mode(ev[0]).unwrap();
        // physical norm: outer pieces plus (1/eps) * int W w^2 dt
        let mut total = 0.0;
        for (p, cv) in c.pieces.iter().zip(&mode.curves) {
            let rule = CompositeRule::uniform(p.left, p.right, 16, 10);
            total += rule.integrate(|t| p.w.eval(t) * cv.value(t).norm_sqr()) / p.scale;
        }
        assert!((total - 1.0).abs() < 1e-9);
        // y = cos(pi x / 2) normalized: value 1 at x = 0 is t = 0 on the middle piece
        assert!((mode.curves[1].value(0.0).re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn solve_matches_closed_form() {
        // -y'' + y = 1 on (0, 1) with y(0) = y(1) = 0
        let c = Chain::single(unit_piece(0.0, 1.0), Robin::dirichlet(), Robin::dirichlet());
        let one = Curve::constant(0.0, 1.0, C64::new(1.0, 0.0));
        let s = c
            .solve(
                C64::new(-1.0, 0.0),
                &[Some(one)],
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            )
            .unwrap();
        let e = std::f64::consts::E;
        let exact = |x: f64| {
            1.0 - ((1.0 - e.powf(-1.0)) * x.exp() + (e - 1.0) * (-x).exp()) / (e - e.powf(-1.0))
        };
        for x in [0.1, 0.5, 0.9] {
            assert!((s.curves[0].value(x).re - exact(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn near_singular_is_detected() {
        let c = Chain::single(unit_piece(0.0, 1.0), Robin::dirichlet(), Robin::dirichlet());
        let z = C64::new(PI * PI + 1e-8, 0.0);
        assert!(matches!(
            c.check_regular(z, SPECTRAL_GUARD),
            Err(Error::NearSingular { .. })
        ));
        assert!(c
            .check_regular(C64::new(PI * PI, 0.5), SPECTRAL_GUARD)
            .is_ok());
    }
}
