//! The limit operator: two outer problems coupled to a Neumann problem on
//! `(-1, 1)` through the traces `u(0) = w(-1)`, `v(0) = w(1)`.
//!
//! Its spectrum is the union of the three block spectra. Eigenvalues shared
//! with the middle block carry a Jordan chain of length two.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::chain::{propagate, Piece, Robin, SPECTRAL_GUARD};
use crate::coeffs::{validate_spec, CoefficientFunction, ProblemSpec};
use crate::curve::{fmt_num, Curve};
use crate::error::{Error, Result};
use crate::residual::{ode_residual, Equation, Residual, RESIDUAL_PANELS};
use crate::slsolve::{self, Bc, SLProblem};
use crate::space::{weighted_inner, weighted_norm, Triple};

/// Relative distance below which block eigenvalues are identified.
pub const MERGE_TOL: f64 = 1e-7;

/// Magnitude below which a trace or derivative the theory asserts nonzero is
/// treated as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Bound on the Jordan-chain residual.
pub const JORDAN_TOL: f64 = 1e-6;

/// Jordan structure of a limit eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Simple,
    DoubleDiagonal,
    DoubleJordan,
    TripleJordan,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Simple => "simple",
            Kind::DoubleDiagonal => "double_diagonal",
            Kind::DoubleJordan => "double_jordan",
            Kind::TripleJordan => "triple_jordan",
        }
    }

    /// Whether the root subspace is larger than the eigenspace.
    pub fn has_root_vector(&self) -> bool {
        matches!(self, Kind::DoubleJordan | Kind::TripleJordan)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification from block membership.
pub fn classify(in_aa: bool, in_b: bool, in_ab: bool) -> Result<Kind> {
    Ok(match (in_aa, in_b, in_ab) {
        (false, false, false) => {
            return Err(Error::domain(
                "classification needs at least one membership flag",
            ))
        }
        (true, false, false) | (false, true, false) | (false, false, true) => Kind::Simple,
        (true, false, true) => Kind::DoubleDiagonal,
        (true, true, false) | (false, true, true) => Kind::DoubleJordan,
        (true, true, true) => Kind::TripleJordan,
    })
}

/// Block problems `A_a` on `(a, 0)`, `B` on `(-1, 1)`, `A_b` on `(0, b)`.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub aa: SLProblem,
    pub b: SLProblem,
    pub ab: SLProblem,
}

pub fn blocks(spec: &ProblemSpec) -> Blocks {
    Blocks {
        aa: SLProblem::new(
            (spec.a, 0.0),
            spec.q.clone(),
            spec.r.clone(),
            Bc::from_angle(spec.alpha),
            Bc::dirichlet(),
        ),
        b: SLProblem::new(
            (-1.0, 1.0),
            CoefficientFunction::constant(0.0),
            spec.h.clone(),
            Bc::neumann(),
            Bc::neumann(),
        ),
        ab: SLProblem::new(
            (0.0, spec.b),
            spec.q.clone(),
            spec.r.clone(),
            Bc::dirichlet(),
            Bc::from_angle(spec.beta),
        ),
    }
}

/// Role of a basis vector of the root subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorTag {
    Eigenvector,
    RootVector,
}

#[derive(Debug, Clone)]
pub struct LimitVector {
    pub tag: VectorTag,
    pub v: Triple,
}

/// A limit eigenvalue with membership flags and root-subspace basis.
#[derive(Debug, Clone)]
pub struct LimitEigendata {
    pub lambda: f64,
    pub in_aa: bool,
    pub in_b: bool,
    pub in_ab: bool,
    pub alg_mult: usize,
    pub kind: Kind,
    /// Oscillation index within each block spectrum, when a member.
    pub block_index: [Option<usize>; 3],
    /// Empty unless requested through [`limit_spectrum`].
    pub basis: Vec<LimitVector>,
}

fn check_spec(spec: &ProblemSpec) -> Result<()> {
    let report = validate_spec(spec);
    if report.is_valid() {
        Ok(())
    } else {
        let msg: Vec<String> = report.issues.iter().map(|i| i.to_string()).collect();
        Err(Error::domain(msg.join("; ")))
    }
}

/// Merge three sorted block spectra, identifying values within [`MERGE_TOL`].
pub fn merge_block_spectra(aa: &[f64], b: &[f64], ab: &[f64]) -> Vec<LimitEigendata> {
    let mut all: Vec<(f64, usize, usize)> = Vec::new();
    for (blk, list) in [aa, b, ab].into_iter().enumerate() {
        all.extend(list.iter().enumerate().map(|(i, &l)| (l, blk, i)));
    }
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<LimitEigendata> = Vec::new();
    let mut group: Vec<(f64, usize, usize)> = Vec::new();
    let flush = |group: &mut Vec<(f64, usize, usize)>, out: &mut Vec<LimitEigendata>| {
        if group.is_empty() {
            return;
        }
        let mut idx = [None; 3];
        for &(_, blk, i) in group.iter() {
            idx[blk] = Some(i);
        }
        let lambda = group.iter().map(|g| g.0).sum::<f64>() / group.len() as f64;
        let (in_aa, in_b, in_ab) = (idx[0].is_some(), idx[1].is_some(), idx[2].is_some());
        out.push(LimitEigendata {
            lambda,
            in_aa,
            in_b,
            in_ab,
            alg_mult: group.len(),
            kind: classify(in_aa, in_b, in_ab).expect("nonempty group"),
            block_index: idx,
            basis: Vec::new(),
        });
        group.clear();
    };
    for e in all {
        let joins = group.first().is_some_and(|g| {
            (e.0 - g.0).abs() <= MERGE_TOL * g.0.abs().max(1.0) && !group.iter().any(|x| x.1 == e.1)
        });
        if !joins {
            flush(&mut group, &mut out);
        }
        group.push(e);
    }
    flush(&mut group, &mut out);
    out
}

fn truncate_counted(list: Vec<LimitEigendata>, n_max: usize) -> Vec<LimitEigendata> {
    let mut count = 0;
    list.into_iter()
        .take_while(|d| {
            let keep = count < n_max;
            count += d.alg_mult;
            keep
        })
        .collect()
}

/// Limit eigenvalues covering the first `n_max` counted with multiplicity,
/// without basis vectors.
pub fn limit_eigenvalues(spec: &ProblemSpec, n_max: usize) -> Result<Vec<LimitEigendata>> {
    check_spec(spec)?;
    let bl = blocks(spec);
    let aa = slsolve::eigenvalue_list(&bl.aa, n_max)?;
    let b = slsolve::eigenvalue_list(&bl.b, n_max)?;
    let ab = slsolve::eigenvalue_list(&bl.ab, n_max)?;
    Ok(truncate_counted(merge_block_spectra(&aa, &b, &ab), n_max))
}

/// Limit eigenvalues strictly below `cutoff`.
pub fn limit_eigenvalues_below(spec: &ProblemSpec, cutoff: f64) -> Result<Vec<LimitEigendata>> {
    check_spec(spec)?;
    let bl = blocks(spec);
    let aa = slsolve::eigenvalues_below(&bl.aa, cutoff)?;
    let b = slsolve::eigenvalues_below(&bl.b, cutoff)?;
    let ab = slsolve::eigenvalues_below(&bl.ab, cutoff)?;
    Ok(merge_block_spectra(&aa, &b, &ab))
}

/// As [`limit_eigenvalues`], with the root-subspace basis of every entry.
pub fn limit_spectrum(spec: &ProblemSpec, n_max: usize) -> Result<Vec<LimitEigendata>> {
    let mut list = limit_eigenvalues(spec, n_max)?;
    for d in &mut list {
        let mut basis: Vec<LimitVector> = eigenvector_basis(spec, d)?
            .into_iter()
            .map(|v| LimitVector {
                tag: VectorTag::Eigenvector,
                v,
            })
            .collect();
        if d.kind.has_root_vector() {
            basis.push(LimitVector {
                tag: VectorTag::RootVector,
                v: root_vector(spec, d)?.root,
            });
        }
        d.basis = basis;
    }
    Ok(list)
}

/// Eigenvalues counted with multiplicity.
pub fn counted(list: &[LimitEigendata]) -> Vec<f64> {
    list.iter()
        .flat_map(|d| std::iter::repeat_n(d.lambda, d.alg_mult))
        .collect()
}

/// Report table with columns `n, lambda, mult, in_Aa, in_B, in_Ab, kind`;
/// `n` is the first one-based counted index of the eigenvalue.
pub fn limit_spectrum_csv(list: &[LimitEigendata]) -> String {
    let mut s = String::from("n,lambda,mult,in_Aa,in_B,in_Ab,kind\n");
    let mut n = 1;
    for d in list {
        s += &format!(
            "{n},{},{},{},{},{},{}\n",
            fmt_num(d.lambda),
            d.alg_mult,
            d.in_aa,
            d.in_b,
            d.in_ab,
            d.kind
        );
        n += d.alg_mult;
    }
    s
}

/// Normalized eigenfunction of one block at a member eigenvalue.
fn block_mode(p: &SLProblem, lambda: f64) -> Result<Curve> {
    Ok(slsolve::eigenfunction(p, lambda)?.curve)
}

/// `T_a(zeta) c`: solution on `(a, 0)` with `l_a = 0` and value `c` at 0.
pub fn boundary_operator_a(spec: &ProblemSpec, zeta: C64, trace: C64) -> Result<Curve> {
    let p = SLProblem::new(
        (spec.a, 0.0),
        spec.q.clone(),
        spec.r.clone(),
        Bc::from_angle(spec.alpha),
        Bc::trace(trace),
    );
    Ok(slsolve::solve_boundary(&p, zeta, trace)?.curve)
}

/// `T_b(zeta) c`: solution on `(0, b)` with value `c` at 0 and `l_b = 0`.
pub fn boundary_operator_b(spec: &ProblemSpec, zeta: C64, trace: C64) -> Result<Curve> {
    let p = SLProblem::new(
        (0.0, spec.b),
        spec.q.clone(),
        spec.r.clone(),
        Bc::trace(trace),
        Bc::from_angle(spec.beta),
    );
    Ok(slsolve::solve_boundary(&p, zeta, trace)?.curve)
}

/// Eigenvectors of the limit operator for `data`, unit in the product norm.
pub fn eigenvector_basis(spec: &ProblemSpec, data: &LimitEigendata) -> Result<Vec<Triple>> {
    let bl = blocks(spec);
    let lam = data.lambda;
    let zero_a = || Curve::zero(spec.a, 0.0);
    let zero_m = || Curve::zero(-1.0, 1.0);
    let zero_b = || Curve::zero(0.0, spec.b);
    let mut out = Vec::new();
    if data.in_aa {
        out.push(Triple::new(block_mode(&bl.aa, lam)?, zero_m(), zero_b()));
    }
    if data.in_ab {
        out.push(Triple::new(zero_a(), zero_m(), block_mode(&bl.ab, lam)?));
    }
    if data.in_b && !data.in_aa && !data.in_ab {
        let w = block_mode(&bl.b, lam)?;
        let z = C64::new(lam, 0.0);
        let ta = boundary_operator_a(spec, z, w.value(-1.0))?;
        let tb = boundary_operator_b(spec, z, w.value(1.0))?;
        out.push(Triple::new(ta, w, tb).normalized(spec));
    }
    Ok(out)
}

/// A Jordan chain: `(A - lambda) root = target`.
#[derive(Debug, Clone)]
pub struct RootVectorData {
    pub c0: f64,
    /// Coefficients of `(u, 0, 0)` and `(0, 0, v)` in `target`.
    pub c1: f64,
    pub c2: f64,
    pub root: Triple,
    pub target: Triple,
    /// Residual of `(A - lambda) root - target`, including trace conditions.
    pub jordan_residual: f64,
}

fn nonzero(name: &str, v: f64) -> Result<f64> {
    if v.abs() < DEGENERACY_TOL || !v.is_finite() {
        Err(Error::Degenerate(format!(
            "{name} = {v:e} is numerically zero"
        )))
    } else {
        Ok(v)
    }
}

/// Particular solution of `-u'' + q u - lambda r u = r c mode` started with
/// zero data at `start`, made orthogonal to `mode` in `L2(r)`.
fn orthogonal_particular(
    spec: &ProblemSpec,
    interval: (f64, f64),
    start: f64,
    lambda: f64,
    mode: &Curve,
    c: f64,
) -> Result<Curve> {
    let piece = Piece::new(interval.0, interval.1, spec.q.clone(), spec.r.clone(), 1.0);
    let src = mode.scaled(C64::new(c, 0.0));
    let zero = C64::new(0.0, 0.0);
    let up = propagate(&piece, C64::new(lambda, 0.0), Some(&src), start, zero, zero)?;
    let proj = weighted_inner(&up, mode, &spec.r, interval.0, interval.1);
    Ok(up.add_scaled(-proj, mode))
}

/// Canonical Jordan chain for a `double_jordan` or `triple_jordan` eigenvalue.
///
/// With `u`, `v`, `w` the unit block eigenfunctions, `w_* = c0 w` and the outer
/// components solve the outer equations with right-hand sides `c1 u`, `c2 v`.
/// Solvability forces `c1 = c0 w(-1) u'(0)` and `c2 = -c0 w(1) v'(0)`. The two
/// double cases fix `c1 = 1` or `c2 = 1`; the triple case fixes `c2 = 1`.
pub fn root_vector(spec: &ProblemSpec, data: &LimitEigendata) -> Result<RootVectorData> {
    if !data.kind.has_root_vector() {
        return Err(Error::domain(format!(
            "eigenvalue {} of kind {} has no root vector",
            data.lambda, data.kind
        )));
    }
    let bl = blocks(spec);
    let lam = data.lambda;
    let z = C64::new(lam, 0.0);
    let w = block_mode(&bl.b, lam)?;
    let u = data.in_aa.then(|| block_mode(&bl.aa, lam)).transpose()?;
    let v = data.in_ab.then(|| block_mode(&bl.ab, lam)).transpose()?;
    let (c0, c1, c2) = match (&u, &v) {
        (Some(u), None) => {
            let wl = nonzero("w(-1)", w.value(-1.0).re)?;
            let du = nonzero("u'(0)", u.eval(0.0).1.re)?;
            (1.0 / (wl * du), 1.0, 0.0)
        }
        (None, Some(v)) => {
            let wr = nonzero("w(1)", w.value(1.0).re)?;
            let dv = nonzero("v'(0)", v.eval(0.0).1.re)?;
            (-1.0 / (wr * dv), 0.0, 1.0)
        }
        (Some(u), Some(v)) => {
            let wl = nonzero("w(-1)", w.value(-1.0).re)?;
            let du = nonzero("u'(0)", u.eval(0.0).1.re)?;
            let wr = nonzero("w(1)", w.value(1.0).re)?;
            let dv = nonzero("v'(0)", v.eval(0.0).1.re)?;
            let c0 = -1.0 / (wr * dv);
            (c0, c0 * wl * du, 1.0)
        }
        (None, None) => unreachable!("classified with a root vector"),
    };
    let w_star = w.scaled(C64::new(c0, 0.0));
    let u_star = match &u {
        Some(u) => orthogonal_particular(spec, (spec.a, 0.0), spec.a, lam, u, c1)?,
        None => boundary_operator_a(spec, z, w_star.value(-1.0))?,
    };
    let v_star = match &v {
        Some(v) => orthogonal_particular(spec, (0.0, spec.b), spec.b, lam, v, c2)?,
        None => boundary_operator_b(spec, z, w_star.value(1.0))?,
    };
    let root = Triple::new(u_star, w_star, v_star);
    let target = Triple::new(
        u.map(|u| u.scaled(C64::new(c1, 0.0)))
            .unwrap_or_else(|| Curve::zero(spec.a, 0.0)),
        Curve::zero(-1.0, 1.0),
        v.map(|v| v.scaled(C64::new(c2, 0.0)))
            .unwrap_or_else(|| Curve::zero(0.0, spec.b)),
    );
    let jordan_residual = operator_residual(spec, z, &root, &target).residual;
    Ok(RootVectorData {
        c0,
        c1,
        c2,
        root,
        target,
        jordan_residual,
    })
}

/// Solvability obstruction for extending a Jordan chain past the root vector:
/// the middle equation `-w'' - lambda h w = h c0 w_lambda` with Neumann ends
/// requires `<h w_lambda, w_lambda> = 0`.
pub fn second_chain_obstruction(spec: &ProblemSpec, data: &LimitEigendata) -> Result<f64> {
    if !data.in_b {
        return Err(Error::domain(
            "obstruction is defined for eigenvalues of the middle block",
        ));
    }
    let w = block_mode(&blocks(spec).b, data.lambda)?;
    Ok(weighted_inner(&w, &w, &spec.h, -1.0, 1.0).re)
}

/// Normalizing factor of the two-sided limit function of a simple middle-block
/// eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaFactor {
    pub theta: f64,
    pub norm_ta_sq: f64,
    pub norm_tb_sq: f64,
}

/// `theta = (|T_a(lambda) w(-1)|^2 + |T_b(lambda) w(1)|^2)^-1`, norms in `L2(r)`.
pub fn theta_factor(spec: &ProblemSpec, lambda: f64, w: &Curve) -> Result<ThetaFactor> {
    let z = C64::new(lambda, 0.0);
    let ta = boundary_operator_a(spec, z, w.value(-1.0))?;
    let tb = boundary_operator_b(spec, z, w.value(1.0))?;
    let na = weighted_norm(&ta, &spec.r, spec.a, 0.0).powi(2);
    let nb = weighted_norm(&tb, &spec.r, 0.0, spec.b).powi(2);
    let s = na + nb;
    if !(s > 0.0) {
        return Err(Error::Degenerate(
            "both outer boundary solutions vanish".into(),
        ));
    }
    Ok(ThetaFactor {
        theta: 1.0 / s,
        norm_ta_sq: na,
        norm_tb_sq: nb,
    })
}

/// Fail unless `zeta` keeps [`SPECTRAL_GUARD`] from every block spectrum.
pub fn check_resolvent_set(spec: &ProblemSpec, zeta: C64) -> Result<()> {
    let bl = blocks(spec);
    for p in [&bl.aa, &bl.b, &bl.ab] {
        p.chain().check_regular(zeta, SPECTRAL_GUARD)?;
    }
    Ok(())
}

/// Block resolvent: the middle component is `R(B) f_0`; the outer ones solve
/// their equations with traces taken from it.
pub fn apply_limit_resolvent(spec: &ProblemSpec, zeta: C64, f: &Triple) -> Result<Triple> {
    check_spec(spec)?;
    check_resolvent_set(spec, zeta)?;
    let bl = blocks(spec);
    let zero = C64::new(0.0, 0.0);
    let w =
        bl.b.chain()
            .solve(zeta, &[Some(f.mid.clone())], zero, zero)?;
    let w = w.curves.into_iter().next().expect("one piece");
    let u = bl
        .aa
        .chain()
        .solve(zeta, &[Some(f.a.clone())], zero, w.value(-1.0))?
        .curves
        .remove(0);
    let v = bl
        .ab
        .chain()
        .solve(zeta, &[Some(f.b.clone())], w.value(1.0), zero)?
        .curves
        .remove(0);
    Ok(Triple::new(u, w, v))
}

/// Residual of `(A - zeta) y = f`: the three block equations plus the outer
/// conditions, the Neumann ends of the middle block and both trace couplings.
pub fn operator_residual(spec: &ProblemSpec, zeta: C64, y: &Triple, f: &Triple) -> Residual {
    let zero = CoefficientFunction::constant(0.0);
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
                q: &zero,
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
    let (ya, da) = y.a.eval(spec.a);
    let (yb, db) = y.b.eval(spec.b);
    let (wl, dwl) = y.mid.eval(-1.0);
    let (wr, dwr) = y.mid.eval(1.0);
    let defects = [
        Robin::from_angle(spec.alpha).form(ya, da),
        Robin::from_angle(spec.beta).form(yb, db),
        y.a.value(0.0) - wl,
        y.b.value(0.0) - wr,
        dwl,
        dwr,
    ];
    let d = defects.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    total.combine(Residual {
        residual: d,
        scale: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn model(a: f64, b: f64) -> ProblemSpec {
        ProblemSpec::constant(a, b, 0.0, 0.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn classify_table() {
        use Kind::*;
        let cases = [
            ((true, false, false), Simple),
            ((false, true, false), Simple),
            ((false, false, true), Simple),
            ((true, false, true), DoubleDiagonal),
            ((true, true, false), DoubleJordan),
            ((false, true, true), DoubleJordan),
            ((true, true, true), TripleJordan),
        ];
        for ((a, b, c), k) in cases {
            assert_eq!(classify(a, b, c).unwrap(), k);
        }
        assert!(classify(false, false, false).is_err());
    }

    #[test]
    fn symmetric_model_spectrum() {
        let l = limit_eigenvalues(&model(-1.0, 1.0), 9).unwrap();
        let lambdas = counted(&l);
        let p2 = PI * PI;
        let expect = [
            0.0,
            p2 / 4.0,
            p2,
            p2,
            p2,
            9.0 * p2 / 4.0,
            4.0 * p2,
            4.0 * p2,
            4.0 * p2,
        ];
        assert_eq!(lambdas.len(), 9);
        for (x, e) in lambdas.iter().zip(expect) {
            assert!((x - e).abs() <= 1e-8 * e.max(1.0), "{x} vs {e}");
        }
        assert_eq!(l[2].kind, Kind::TripleJordan);
        assert_eq!(l[4].kind, Kind::TripleJordan);
    }

    #[test]
    fn asymmetric_model_double_jordan() {
        let l = limit_eigenvalues(&model(-1.0, 2.0), 4).unwrap();
        let d = l
            .iter()
            .find(|d| (d.lambda - PI * PI / 4.0).abs() < 1e-6)
            .unwrap();
        assert_eq!(d.kind, Kind::DoubleJordan);
        assert!(d.in_ab && d.in_b && !d.in_aa);
    }

    #[test]
    fn left_jordan_constant() {
        let spec = model(-2.0, 1.0);
        let l = limit_eigenvalues(&spec, 4).unwrap();
        let d = l
            .iter()
            .find(|d| (d.lambda - PI * PI / 4.0).abs() < 1e-6)
            .unwrap();
        assert_eq!(d.kind, Kind::DoubleJordan);
        let rv = root_vector(&spec, d).unwrap();
        // leftmost-positive convention gives u = -sin(pi x / 2), w = cos(pi (t + 1) / 2)
        let u = block_mode(&blocks(&spec).aa, d.lambda).unwrap();
        let named = Curve::from_real(-2.0, 0.0, |x| (PI * x / 2.0).sin());
        let su = weighted_inner(&u, &named, &spec.r, -2.0, 0.0).re.signum();
        assert_eq!(su, -1.0);
        assert!((su * rv.c0 - 2.0 / PI).abs() < 1e-6, "{}", rv.c0);
        assert!(rv.jordan_residual < JORDAN_TOL, "{}", rv.jordan_residual);
        assert!((second_chain_obstruction(&spec, d).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mirrored_and_triple_chains() {
        let spec = model(-1.0, 2.0);
        let l = limit_eigenvalues(&spec, 4).unwrap();
        let d = l.iter().find(|d| d.kind == Kind::DoubleJordan).unwrap();
        let rv = root_vector(&spec, d).unwrap();
        assert!(rv.jordan_residual < JORDAN_TOL, "{}", rv.jordan_residual);
        let spec = model(-1.0, 1.0);
        let l = limit_eigenvalues(&spec, 5).unwrap();
        let rv = root_vector(&spec, &l[2]).unwrap();
        assert!(rv.jordan_residual < JORDAN_TOL, "{}", rv.jordan_residual);
        assert_eq!(rv.c2, 1.0);
        assert!(root_vector(&spec, &l[0]).is_err());
    }

    #[test]
    fn middle_block_eigenvector() {
        let spec = model(-1.0, 1.0);
        let l = limit_eigenvalues(&spec, 2).unwrap();
        let d = &l[1];
        assert!(d.in_b && d.kind == Kind::Simple);
        let e = &eigenvector_basis(&spec, d).unwrap()[0];
        let r = operator_residual(&spec, C64::new(d.lambda, 0.0), e, &Triple::zero(&spec));
        assert!(r.residual < 1e-8, "{r:?}");
        let w = block_mode(&blocks(&spec).b, d.lambda).unwrap();
        let th = theta_factor(&spec, d.lambda, &w).unwrap();
        assert!((th.norm_ta_sq - th.norm_tb_sq).abs() < 1e-10);
        assert!(th.theta > 0.0);
    }

    #[test]
    fn resolvent_blocks() {
        let spec = model(-1.0, 1.0);
        let z = C64::new(0.0, 1.0);
        let f = Triple::from_real(&spec, |x| (PI * x).sin(), |t| t * t, |x| x.cos());
        let y = apply_limit_resolvent(&spec, z, &f).unwrap();
        assert!(operator_residual(&spec, z, &y, &f).residual < 1e-8);
        let fa = Triple::from_real(&spec, |x| (PI * x).sin(), |_| 0.0, |_| 0.0);
        let ya = apply_limit_resolvent(&spec, z, &fa).unwrap();
        assert!(ya.mid.value(0.2).norm() == 0.0 && ya.b.value(0.4).norm() == 0.0);
    }
}
