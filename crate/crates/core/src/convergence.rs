//! Convergence of the perturbed problem to the limit operator along a sweep
//! of `eps`: index-matched eigenvalue gaps and rates, cluster counts,
//! truncated Hausdorff distances, eigenfunction and subspace gaps and the
//! norm-resolvent gap.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::EIG_TOL;
use crate::coeffs::ProblemSpec;
use crate::curve::{fmt_num, Curve};
use crate::error::{Error, Result};
use crate::kernel::{resolvent_difference, Grid, Part, DEFAULT_NODES};
use crate::limitop::{
    self, blocks, boundary_operator_a, boundary_operator_b, counted, theta_factor, Kind,
    LimitEigendata, MERGE_TOL,
};
use crate::perturbed::{
    check_eps, perturbed_eigenvalues, perturbed_eigenvalues_below, PerturbedEigenpair,
};
use crate::slsolve;
use crate::space::{weighted_inner, Triple};

/// Relative change allowed between a resolvent gap and its value on the
/// doubled grid.
pub const RESOLUTION_TOL: f64 = 1e-2;

/// Largest cluster radius used by default.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Strictly decreasing.
    pub eps_grid: Vec<f64>,
    pub n_track: usize,
    pub truncation: f64,
    pub zeta_probe: C64,
    pub resolvent_nodes: usize,
    /// Skip the dense resolvent comparison.
    pub resolvent: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            eps_grid: vec![0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625],
            n_track: 8,
            truncation: 50.0,
            zeta_probe: C64::new(0.0, 1.0),
            resolvent_nodes: DEFAULT_NODES,
            resolvent: true,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        if self.eps_grid.is_empty() {
            return Err(Error::config("eps grid is empty"));
        }
        if self.eps_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::config("eps grid must be strictly decreasing"));
        }
        for &e in &self.eps_grid {
            check_eps(spec, e).map_err(|e| Error::config(e.to_string()))?;
        }
        if self.n_track == 0 {
            return Err(Error::config("n_track must be positive"));
        }
        if !(self.truncation.is_finite()) {
            return Err(Error::config("truncation must be finite"));
        }
        if self.resolvent_nodes < 16 {
            return Err(Error::config(
                "resolvent grid needs at least 16 nodes per component",
            ));
        }
        let z = self.zeta_probe;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::config("zeta probe must be finite"));
        }
        if z.im == 0.0 {
            let floor = -spec.sup_q_over_r() - 1.0;
            if !(z.re < floor) {
                return Err(Error::config(format!(
                    "real zeta probe {} must lie below {floor}",
                    z.re
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRow {
    pub n: usize,
    pub eps: f64,
    pub lambda_eps: f64,
    pub lambda: f64,
    pub gap: f64,
}

/// Pair the `n`-th perturbed eigenvalue with the `n`-th limit eigenvalue
/// counted with algebraic multiplicity.
pub fn match_spectra(
    eps_grid: &[f64],
    perturbed: &[Vec<f64>],
    limit: &[f64],
    n_track: usize,
) -> Result<Vec<PairRow>> {
    if perturbed.len() != eps_grid.len() {
        return Err(Error::config("one perturbed list per eps is required"));
    }
    if limit.len() < n_track || perturbed.iter().any(|p| p.len() < n_track) {
        return Err(Error::config(format!(
            "spectra must cover indices 1..={n_track}"
        )));
    }
    let mut rows = Vec::with_capacity(n_track * eps_grid.len());
    for n in 0..n_track {
        for (k, &eps) in eps_grid.iter().enumerate() {
            let (le, l) = (perturbed[k][n], limit[n]);
            rows.push(PairRow {
                n: n + 1,
                eps,
                lambda_eps: le,
                lambda: l,
                gap: (le - l).abs(),
            });
        }
    }
    Ok(rows)
}

/// Indices where nearest-neighbour matching disagrees with index matching.
pub fn nearest_neighbor_anomalies(perturbed: &[f64], limit: &[f64]) -> Vec<usize> {
    perturbed
        .iter()
        .zip(limit)
        .enumerate()
        .filter_map(|(n, (&p, &l))| {
            let nearest = limit
                .iter()
                .copied()
                .min_by(|a, b| (a - p).abs().total_cmp(&(b - p).abs()))
                .unwrap_or(l);
            ((nearest - l).abs() > MERGE_TOL * l.abs().max(1.0)).then_some(n + 1)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateStatus {
    Fitted,
    /// A gap is exactly zero; the slope is reported as infinite.
    ExactZero,
    /// Every gap is below `1e2 * EIG_TOL`; no fit.
    BeyondResolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub status: RateStatus,
    pub slope: f64,
    /// `max gap / sqrt(eps)` over the grid.
    pub c: f64,
}

/// Least-squares slope of `ln gap` against `ln eps` and `C = max gap / sqrt(eps)`.
pub fn fit_rate(eps: &[f64], gaps: &[f64]) -> Result<RateFit> {
    if eps.len() != gaps.len() || eps.len() < 4 {
        return Err(Error::config("rate fit needs at least 4 matching points"));
    }
    let c = eps
        .iter()
        .zip(gaps)
        .map(|(e, g)| g / e.sqrt())
        .fold(0.0, f64::max);
    if gaps.iter().all(|&g| g < 1e2 * EIG_TOL) {
        let status = if gaps.contains(&0.0) {
            RateStatus::ExactZero
        } else {
            RateStatus::BeyondResolution
        };
        let slope = if status == RateStatus::ExactZero {
            f64::INFINITY
        } else {
            f64::NAN
        };
        return Ok(RateFit { status, slope, c });
    }
    if gaps.contains(&0.0) {
        return Ok(RateFit {
            status: RateStatus::ExactZero,
            slope: f64::INFINITY,
            c,
        });
    }
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(RateFit {
        status: RateStatus::Fitted,
        slope: sxy / sxx,
        c,
    })
}

/// Number of perturbed eigenvalues within `radius` of `lambda`.
///
/// `limit` holds the distinct limit eigenvalues; `radius` must stay below half
/// the distance from `lambda` to the others. Each perturbed list must hold
/// every eigenvalue below `complete_to`, which must exceed `lambda + radius`.
pub fn cluster_count(
    lambda: f64,
    radius: f64,
    limit: &[f64],
    perturbed: &[Vec<f64>],
    complete_to: f64,
) -> Result<Vec<usize>> {
    if !(radius > 0.0) {
        return Err(Error::config("cluster radius must be positive"));
    }
    let tol = MERGE_TOL * lambda.abs().max(1.0);
    let nearest = limit
        .iter()
        .filter(|&&l| (l - lambda).abs() > tol)
        .map(|l| (l - lambda).abs())
        .fold(f64::INFINITY, f64::min);
    if !(radius < 0.5 * nearest) {
        return Err(Error::config(format!(
            "radius {radius} reaches past half the distance {nearest} to the next limit eigenvalue"
        )));
    }
    if !(complete_to > lambda + radius) {
        return Err(Error::config(
            "perturbed lists end inside the cluster window",
        ));
    }
    Ok(perturbed
        .iter()
        .map(|p| p.iter().filter(|&&x| (x - lambda).abs() <= radius).count())
        .collect())
}

/// Default radius: `min(1, 0.45 * distance to the next distinct eigenvalue)`.
pub fn default_cluster_radius(lambda: f64, limit: &[f64]) -> f64 {
    let tol = MERGE_TOL * lambda.abs().max(1.0);
    let nearest = limit
        .iter()
        .filter(|&&l| (l - lambda).abs() > tol)
        .map(|l| (l - lambda).abs())
        .fold(f64::INFINITY, f64::min);
    DEFAULT_CLUSTER_RADIUS.min(0.45 * nearest)
}

/// Hausdorff distance of `s1` and `s2` after discarding values above `cutoff`.
pub fn hausdorff_truncated(s1: &[f64], s2: &[f64], cutoff: f64) -> Result<f64> {
    let t1: Vec<f64> = s1.iter().copied().filter(|&x| x <= cutoff).collect();
    let t2: Vec<f64> = s2.iter().copied().filter(|&x| x <= cutoff).collect();
    if t1.is_empty() || t2.is_empty() {
        return Err(Error::domain(format!(
            "no values below {cutoff} in one of the sets"
        )));
    }
    let directed = |a: &[f64], b: &[f64]| {
        a.iter()
            .map(|x| {
                b.iter()
                    .map(|y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(&t1, &t2).max(directed(&t2, &t1)))
}

/// Which block a simple limit eigenvalue comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Aa,
    B,
    Ab,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfunGap {
    pub n: usize,
    pub eps: f64,
    pub lambda: f64,
    pub block: Block,
    pub gap: f64,
    /// Middle-block eigenvalues only: `theta`, the `L2(r)` norm of the
    /// `theta`-scaled outer limit, and `y_eps(-eps) / w(-1)` for the unit
    /// perturbed eigenfunction.
    pub theta: Option<f64>,
    pub theta_scaled_norm: Option<f64>,
    pub trace_ratio: Option<f64>,
}

fn unit_in_r(spec: &ProblemSpec, y: &Curve) -> Result<Curve> {
    let n = weighted_inner(y, y, &spec.r, spec.a, spec.b).re.sqrt();
    if !(n > 0.0) {
        return Err(Error::Degenerate("function vanishes in L2(r)".into()));
    }
    Ok(y.scaled(C64::new(1.0 / n, 0.0)))
}

fn glue(a: Curve, b: Curve) -> Curve {
    let (l, r) = (a.left(), b.right());
    let mut br: Vec<f64> = a.breaks().to_vec();
    br.extend_from_slice(b.breaks());
    br.push(0.0);
    Curve::new(l, r, move |x| if x < 0.0 { a.eval(x) } else { b.eval(x) }).with_breaks(br)
}

/// `L2(r, (a, b))` distance between the `n`-th perturbed eigenfunction and its
/// limit counterpart, both unit in `L2(r, (a, b))` and phase-aligned.
pub fn eigenfunction_gap(
    spec: &ProblemSpec,
    pair: &PerturbedEigenpair,
    data: &LimitEigendata,
) -> Result<EfunGap> {
    if data.alg_mult != 1 {
        return Err(Error::config(format!(
            "eigenvalue {} has multiplicity {}; use subspace_gap",
            data.lambda, data.alg_mult
        )));
    }
    let bl = blocks(spec);
    let lam = data.lambda;
    let z = C64::new(lam, 0.0);
    let (block, limit, theta, wl) = if data.in_aa {
        let u = slsolve::eigenfunction(&bl.aa, lam)?.curve;
        (Block::Aa, glue(u, Curve::zero(0.0, spec.b)), None, None)
    } else if data.in_ab {
        let v = slsolve::eigenfunction(&bl.ab, lam)?.curve;
        (Block::Ab, glue(Curve::zero(spec.a, 0.0), v), None, None)
    } else {
        let w = slsolve::eigenfunction(&bl.b, lam)?.curve;
        let th = theta_factor(spec, lam, &w)?;
        let ta = boundary_operator_a(spec, z, w.value(-1.0))?;
        let tb = boundary_operator_b(spec, z, w.value(1.0))?;
        let y = glue(ta, tb).scaled(C64::new(th.theta, 0.0));
        (Block::B, y, Some(th), Some(w.value(-1.0).re))
    };
    let theta_scaled_norm = theta.map(|_| {
        weighted_inner(&limit, &limit, &spec.r, spec.a, spec.b)
            .re
            .sqrt()
    });
    let limit = unit_in_r(spec, &limit)?;
    let ye = unit_in_r(spec, &pair.physical())?;
    let ip = weighted_inner(&ye, &limit, &spec.r, spec.a, spec.b);
    let phase = if ip.norm() > 0.0 {
        ip.conj() / ip.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let ye = ye.scaled(phase);
    let diff = ye.add_scaled(C64::new(-1.0, 0.0), &limit);
    let gap = weighted_inner(&diff, &diff, &spec.r, spec.a, spec.b)
        .re
        .max(0.0)
        .sqrt();
    Ok(EfunGap {
        n: pair.index + 1,
        eps: pair.eps,
        lambda: lam,
        block,
        gap,
        theta: theta.map(|t| t.theta),
        theta_scaled_norm,
        trace_ratio: wl.map(|w| ye.value(-pair.eps).re / w),
    })
}

/// Gap `||P - Q||` between the spans of two families, given their Gram
/// matrices and cross inner products `<x_i, y_j>`.
pub fn projector_gap(g1: &DMatrix<C64>, cross: &DMatrix<C64>, g2: &DMatrix<C64>) -> Result<f64> {
    if g1.nrows() != g2.nrows() {
        return Ok(1.0);
    }
    let l1 = g1
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Degenerate("first family is linearly dependent".into()))?;
    let l2 = g2
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Degenerate("second family is linearly dependent".into()))?;
    let inv1 = l1
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular Gram factor".into()))?;
    let inv2 = l2
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular Gram factor".into()))?;
    // orthonormal coordinates: X L1^-H and Y L2^-H
    let m = &inv1 * cross * inv2.adjoint();
    let smin = m
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok((1.0 - smin.min(1.0).powi(2)).max(0.0).sqrt())
}

fn gram(x: &[Triple], y: &[Triple], spec: &ProblemSpec) -> DMatrix<C64> {
    DMatrix::from_fn(x.len(), y.len(), |i, j| x[i].inner(&y[j], spec))
}

/// Gap in the product space between the span of the matched perturbed
/// eigenfunctions and the root subspace of a multiple limit eigenvalue.
pub fn subspace_gap(
    spec: &ProblemSpec,
    data: &LimitEigendata,
    pairs: &[PerturbedEigenpair],
) -> Result<f64> {
    let m = data.alg_mult;
    if !(2..=3).contains(&m) {
        return Err(Error::config("subspace gap needs multiplicity 2 or 3"));
    }
    if pairs.len() != m {
        return Err(Error::config(format!(
            "cluster has {} of {m} eigenfunctions",
            pairs.len()
        )));
    }
    if data.basis.len() != m {
        return Err(Error::config("limit data carries no root-subspace basis"));
    }
    let x: Vec<Triple> = pairs
        .iter()
        .map(|p| p.to_product_space(spec))
        .collect::<Result<_>>()?;
    let y: Vec<Triple> = data.basis.iter().map(|b| b.v.clone()).collect();
    projector_gap(
        &gram(&x, &x, spec),
        &gram(&x, &y, spec),
        &gram(&y, &y, spec),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventGap {
    pub eps: f64,
    pub zeta: [f64; 2],
    pub nodes: usize,
    /// Gap on the doubled grid.
    pub gap: f64,
    pub gap_coarse: f64,
    /// Gap restricted to sources `(f_a, 0, 0)`.
    pub gap_outer_left: f64,
    pub resolved: bool,
}

/// Norm of `R_zeta(A_eps) - R_zeta(A)` on grids of `nodes` and `2 nodes`
/// per component.
pub fn resolvent_gap(
    spec: &ProblemSpec,
    eps: f64,
    zeta: C64,
    nodes: usize,
) -> Result<ResolventGap> {
    let coarse = {
        let g = Grid::new(spec, eps, nodes);
        resolvent_difference(spec, eps, zeta, &g)?.norm()
    };
    let g = Grid::new(spec, eps, 2 * nodes);
    let d = resolvent_difference(spec, eps, zeta, &g)?;
    let fine = d.norm();
    let outer = d.norm_on(g.range(Part::A));
    Ok(ResolventGap {
        eps,
        zeta: [zeta.re, zeta.im],
        nodes,
        gap: fine,
        gap_coarse: coarse,
        gap_outer_left: outer,
        resolved: (fine - coarse).abs() <= RESOLUTION_TOL * fine.max(f64::MIN_POSITIVE),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub lambda: f64,
    pub fit: RateFit,
    /// Largest `eps` past which gaps are nonincreasing.
    pub eps_monotone: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterRow {
    pub lambda: f64,
    pub multiplicity: usize,
    pub radius: f64,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffRow {
    pub eps: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubspaceRow {
    pub lambda: f64,
    pub multiplicity: usize,
    pub kind: Kind,
    pub eps: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub eps_grid: Vec<f64>,
    pub truncation: f64,
    pub limit: Vec<f64>,
    pub pairs: Vec<PairRow>,
    pub rates: Vec<RateRow>,
    pub clusters: Vec<ClusterRow>,
    pub hausdorff: Vec<HausdorffRow>,
    pub efun_gaps: Vec<EfunGap>,
    pub subspace_gaps: Vec<SubspaceRow>,
    pub resolvent_gaps: Vec<ResolventGap>,
    /// Indices where nearest-neighbour and index matching disagree, per eps.
    pub anomalies: Vec<(f64, Vec<usize>)>,
}

/// Largest grid value from which the sequence is nonincreasing.
pub fn monotone_from(eps: &[f64], gaps: &[f64]) -> Option<f64> {
    let mut k = gaps.len().checked_sub(1)?;
    while k >= 1 && gaps[k] <= gaps[k - 1] {
        k -= 1;
    }
    (k + 1 < gaps.len()).then(|| eps[k])
}

struct PerEps {
    pairs: Vec<PerturbedEigenpair>,
    below: Vec<f64>,
}

/// Full sweep. Per-`eps` work runs in parallel; the resolvent comparisons
/// run one `eps` at a time.
pub fn run_sweep(spec: &ProblemSpec, cfg: &SweepConfig) -> Result<ConvergenceReport> {
    cfg.validate(spec)?;
    let limit_data = limitop::limit_spectrum(spec, cfg.n_track)?;
    let limit = counted(&limit_data);
    let limit = limit[..cfg.n_track.min(limit.len())].to_vec();
    let distinct: Vec<f64> =
        limitop::limit_eigenvalues_below(spec, cfg.truncation.max(limit[limit.len() - 1]) + 10.0)?
            .iter()
            .map(|d| d.lambda)
            .collect();
    let windows: Vec<(f64, usize, f64)> = limit_data
        .iter()
        .map(|d| {
            (
                d.lambda,
                d.alg_mult,
                default_cluster_radius(d.lambda, &distinct),
            )
        })
        .collect();
    let cutoff = windows
        .iter()
        .map(|w| w.0 + w.2)
        .fold(cfg.truncation, f64::max)
        + 1.0;
    let per_eps: Vec<PerEps> = cfg
        .eps_grid
        .par_iter()
        .map(|&eps| {
            Ok(PerEps {
                pairs: perturbed_eigenvalues(spec, eps, cfg.n_track)?,
                below: perturbed_eigenvalues_below(spec, eps, cutoff)?,
            })
        })
        .collect::<Result<_>>()?;
    let lists: Vec<Vec<f64>> = per_eps
        .iter()
        .map(|p| p.pairs.iter().map(|e| e.lambda_eps).collect())
        .collect();
    let pairs = match_spectra(&cfg.eps_grid, &lists, &limit, cfg.n_track)?;
    let mut rates = Vec::new();
    for n in 1..=cfg.n_track {
        let gaps: Vec<f64> = pairs.iter().filter(|r| r.n == n).map(|r| r.gap).collect();
        let fit = if cfg.eps_grid.len() >= 4 {
            fit_rate(&cfg.eps_grid, &gaps)?
        } else {
            RateFit {
                status: RateStatus::BeyondResolution,
                slope: f64::NAN,
                c: f64::NAN,
            }
        };
        rates.push(RateRow {
            n,
            lambda: limit[n - 1],
            fit,
            eps_monotone: monotone_from(&cfg.eps_grid, &gaps),
        });
    }
    let below: Vec<Vec<f64>> = per_eps.iter().map(|p| p.below.clone()).collect();
    let clusters = windows
        .iter()
        .map(|&(l, m, radius)| {
            Ok(ClusterRow {
                lambda: l,
                multiplicity: m,
                radius,
                counts: cluster_count(l, radius, &distinct, &below, cutoff)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hausdorff = cfg
        .eps_grid
        .iter()
        .zip(&below)
        .map(|(&eps, b)| {
            Ok(HausdorffRow {
                eps,
                distance: hausdorff_truncated(b, &distinct, cfg.truncation)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut efun_gaps = Vec::new();
    let mut subspace_gaps = Vec::new();
    let mut first = 0;
    for d in &limit_data {
        let idx: Vec<usize> = (first..first + d.alg_mult)
            .filter(|&i| i < cfg.n_track)
            .collect();
        first += d.alg_mult;
        if idx.len() != d.alg_mult {
            continue;
        }
        for p in &per_eps {
            if d.alg_mult == 1 {
                efun_gaps.push(eigenfunction_gap(spec, &p.pairs[idx[0]], d)?);
            } else {
                let cl: Vec<PerturbedEigenpair> = idx.iter().map(|&i| p.pairs[i].clone()).collect();
                subspace_gaps.push(SubspaceRow {
                    lambda: d.lambda,
                    multiplicity: d.alg_mult,
                    kind: d.kind,
                    eps: p.pairs[0].eps,
                    gap: subspace_gap(spec, d, &cl)?,
                });
            }
        }
    }
    let resolvent_gaps = if cfg.resolvent {
        cfg.eps_grid
            .iter()
            .map(|&eps| resolvent_gap(spec, eps, cfg.zeta_probe, cfg.resolvent_nodes))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let anomalies = cfg
        .eps_grid
        .iter()
        .zip(&lists)
        .map(|(&e, l)| (e, nearest_neighbor_anomalies(l, &limit)))
        .filter(|(_, a)| !a.is_empty())
        .collect();
    Ok(ConvergenceReport {
        eps_grid: cfg.eps_grid.clone(),
        truncation: cfg.truncation,
        limit,
        pairs,
        rates,
        clusters,
        hausdorff,
        efun_gaps,
        subspace_gaps,
        resolvent_gaps,
        anomalies,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

impl ConvergenceReport {
    pub fn pairs_csv(&self) -> String {
        let mut s = String::from("n,eps,lambda_eps,lambda,gap\n");
        for r in &self.pairs {
            s += &format!(
                "{},{},{},{},{}\n",
                r.n,
                fmt_num(r.eps),
                fmt_num(r.lambda_eps),
                fmt_num(r.lambda),
                fmt_num(r.gap)
            );
        }
        s
    }

    pub fn rates_csv(&self) -> String {
        let mut s = String::from("n,lambda,status,slope,c_n,eps_monotone\n");
        for r in &self.rates {
            let status = match r.fit.status {
                RateStatus::Fitted => "fitted",
                RateStatus::ExactZero => "exact_zero",
                RateStatus::BeyondResolution => "beyond_resolution",
            };
            let slope = if r.fit.slope.is_finite() {
                fmt_num(r.fit.slope)
            } else {
                String::new()
            };
            let c = if r.fit.c.is_finite() {
                fmt_num(r.fit.c)
            } else {
                String::new()
            };
            s += &format!(
                "{},{},{status},{slope},{c},{}\n",
                r.n,
                fmt_num(r.lambda),
                opt(r.eps_monotone)
            );
        }
        s
    }

    pub fn clusters_csv(&self) -> String {
        let mut s = String::from("lambda,multiplicity,radius,eps,count\n");
        for c in &self.clusters {
            for (e, n) in self.eps_grid.iter().zip(&c.counts) {
                s += &format!(
                    "{},{},{},{},{n}\n",
                    fmt_num(c.lambda),
                    c.multiplicity,
                    fmt_num(c.radius),
                    fmt_num(*e)
                );
            }
        }
        s
    }

    pub fn hausdorff_csv(&self) -> String {
        let mut s = String::from("eps,truncation,distance\n");
        for h in &self.hausdorff {
            s += &format!(
                "{},{},{}\n",
                fmt_num(h.eps),
                fmt_num(self.truncation),
                fmt_num(h.distance)
            );
        }
        s
    }

    pub fn efun_csv(&self) -> String {
        let mut s = String::from("n,eps,lambda,block,gap,theta,theta_scaled_norm,trace_ratio\n");
        for g in &self.efun_gaps {
            let block = match g.block {
                Block::Aa => "a",
                Block::B => "mid",
                Block::Ab => "b",
            };
            s += &format!(
                "{},{},{},{block},{},{},{},{}\n",
                g.n,
                fmt_num(g.eps),
                fmt_num(g.lambda),
                fmt_num(g.gap),
                opt(g.theta),
                opt(g.theta_scaled_norm),
                opt(g.trace_ratio)
            );
        }
        s
    }

    pub fn subspace_csv(&self) -> String {
        let mut s = String::from("lambda,multiplicity,kind,eps,gap\n");
        for g in &self.subspace_gaps {
            s += &format!(
                "{},{},{},{},{}\n",
                fmt_num(g.lambda),
                g.multiplicity,
                g.kind,
                fmt_num(g.eps),
                fmt_num(g.gap)
            );
        }
        s
    }

    pub fn resolvent_csv(&self) -> String {
        resolvent_csv(&self.resolvent_gaps)
    }
}

/// Table with columns `eps, zeta_re, zeta_im, nodes, gap, gap_coarse,
/// gap_outer_left, resolved`.
pub fn resolvent_csv(rows: &[ResolventGap]) -> String {
    let mut s = String::from("eps,zeta_re,zeta_im,nodes,gap,gap_coarse,gap_outer_left,resolved\n");
    for g in rows {
        s += &format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_num(g.eps),
            fmt_num(g.zeta[0]),
            fmt_num(g.zeta[1]),
            g.nodes,
            fmt_num(g.gap),
            fmt_num(g.gap_coarse),
            fmt_num(g.gap_outer_left),
            g.resolved
        );
    }
    s
}
