//! Nystrom discretizations of the perturbed and limit resolvents on the
//! product space, assembled from semiseparable Green's kernels.
//!
//! For `-y'' + Q y - zeta W y = W f` with solutions `pl`, `pr` satisfying the
//! left and right conditions, `G(x, s) = pl(min) pr(max) / W'` where
//! `W' = pl' pr - pl pr'`. Matrices are stored in weighted form
//! `sqrt(m_i) K(x_i, s_j) sqrt(m_j)`, so the Euclidean norm is the operator
//! norm of the product space.

use std::ops::Range;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::chain::{propagate, Chain, Piece, SPECTRAL_GUARD};
use crate::coeffs::ProblemSpec;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::limitop::{blocks, check_resolvent_set};
use crate::perturbed::perturbed_chain;
use crate::quad::CompositeRule;
use crate::space::Triple;

/// Default quadrature nodes per component.
pub const DEFAULT_NODES: usize = 512;
const ORDER: usize = 16;
const POWER_ITERS: usize = 4000;
const POWER_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    A,
    Mid,
    B,
}

/// Quadrature nodes on `(a, 0)`, `(-1, 1)`, `(0, b)`, split at `-eps`, `eps`
/// and every coefficient breakpoint.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub part: Vec<Part>,
    /// Quadrature weight times the product-space weight.
    pub mass: Vec<f64>,
    ranges: [Range<usize>; 3],
}

impl Grid {
    pub fn new(spec: &ProblemSpec, eps: f64, per_part: usize) -> Self {
        let mut ba = spec.q.breakpoints_in(spec.a, 0.0);
        ba.extend(spec.r.breakpoints_in(spec.a, 0.0));
        ba.push(-eps);
        let mut bm = spec.h.breakpoints_in(-1.0, 1.0);
        bm.extend(
            spec.q
                .breakpoints_in(-eps, eps)
                .into_iter()
                .map(|x| x / eps),
        );
        let mut bb = spec.q.breakpoints_in(0.0, spec.b);
        bb.extend(spec.r.breakpoints_in(0.0, spec.b));
        bb.push(eps);
        let rules = [
            (
                Part::A,
                CompositeRule::with_breaks(spec.a, 0.0, &ba, per_part, ORDER),
            ),
            (
                Part::Mid,
                CompositeRule::with_breaks(-1.0, 1.0, &bm, per_part, ORDER),
            ),
            (
                Part::B,
                CompositeRule::with_breaks(0.0, spec.b, &bb, per_part, ORDER),
            ),
        ];
        let mut g = Grid {
            nodes: Vec::new(),
            part: Vec::new(),
            mass: Vec::new(),
            ranges: [0..0, 0..0, 0..0],
        };
        for (k, (p, rule)) in rules.into_iter().enumerate() {
            let start = g.nodes.len();
            let weight = if p == Part::Mid { &spec.h } else { &spec.r };
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                g.nodes.push(x);
                g.part.push(p);
                g.mass.push(w * weight.eval(x));
            }
            g.ranges[k] = start..g.nodes.len();
        }
        g
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn range(&self, p: Part) -> Range<usize> {
        self.ranges[p as usize].clone()
    }

    pub fn sample(&self, f: &Triple) -> Vec<C64> {
        self.nodes
            .iter()
            .zip(&self.part)
            .map(|(&x, p)| match p {
                Part::A => f.a.value(x),
                Part::Mid => f.mid.value(x),
                Part::B => f.b.value(x),
            })
            .collect()
    }
}

/// Homogeneous chain solution whose boundary form vanishes at one end, one
/// curve per piece with local derivatives.
pub fn end_solution(chain: &Chain, zeta: C64, from_left: bool) -> Result<Vec<Curve>> {
    let np = chain.pieces.len();
    let mut out: Vec<Option<Curve>> = vec![None; np];
    let order: Vec<usize> = if from_left {
        (0..np).collect()
    } else {
        (0..np).rev().collect()
    };
    let bc = if from_left {
        chain.left_bc
    } else {
        chain.right_bc
    };
    let (mut y, mut dphys) = (C64::new(bc.sin, 0.0), C64::new(-bc.cos, 0.0));
    for k in order {
        let p = &chain.pieces[k];
        let start = if from_left { p.left } else { p.right };
        let c = propagate(p, zeta, None, start, y, dphys * p.scale)?;
        let end = if from_left { p.right } else { p.left };
        let (ye, de) = c.eval(end);
        y = ye;
        dphys = de / p.scale;
        out[k] = Some(c);
    }
    Ok(out
        .into_iter()
        .map(|c| c.expect("every piece visited"))
        .collect())
}

/// `pl' pr - pl pr'` in physical derivatives, evaluated on the first piece.
fn wronskian(chain: &Chain, pl: &[Curve], pr: &[Curve]) -> Result<C64> {
    let p = &chain.pieces[0];
    let x = 0.5 * (p.left + p.right);
    let (yl, dl) = pl[0].eval(x);
    let (yr, dr) = pr[0].eval(x);
    let w = (dl * yr - yl * dr) / p.scale;
    let scale = (yl.norm() + dl.norm() / p.scale) * (yr.norm() + dr.norm() / p.scale);
    if !(w.norm() > 1e-14 * scale) {
        return Err(Error::Degenerate(
            "end solutions are linearly dependent".into(),
        ));
    }
    Ok(w)
}

/// Kernel entries `K(x_i, s_j)` without quadrature mass.
trait Kernel: Sync {
    fn entry(&self, i: usize, j: usize) -> C64;
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Chain,
    ExtLeft,
    ExtRight,
}

#[derive(Clone, Copy)]
struct Node {
    class: Class,
    pos: f64,
    x: f64,
    pl: C64,
    pr: C64,
    sigma: f64,
}

/// Chain Green's kernel with the outer solutions continued over `(-eps, 0)`
/// and `(0, eps)`; sources there enter only through the continuation.
struct PerturbedKernel {
    nodes: Vec<Node>,
    wr: C64,
}

impl PerturbedKernel {
    fn new(spec: &ProblemSpec, eps: f64, zeta: C64, grid: &Grid) -> Result<Self> {
        let chain = perturbed_chain(spec, eps)?;
        chain.check_regular(zeta, SPECTRAL_GUARD)?;
        let pl = end_solution(&chain, zeta, true)?;
        let pr = end_solution(&chain, zeta, false)?;
        let wr = wronskian(&chain, &pl, &pr)?;
        let ext = |c: &Curve, at: f64, l: f64, r: f64| -> Result<Curve> {
            let (y, d) = c.eval(at);
            propagate(
                &Piece::new(l, r, spec.q.clone(), spec.r.clone(), 1.0),
                zeta,
                None,
                at,
                y,
                d,
            )
        };
        let (ll, lr) = (ext(&pl[0], -eps, -eps, 0.0)?, ext(&pr[0], -eps, -eps, 0.0)?);
        let (rl, rr) = (ext(&pl[2], eps, 0.0, eps)?, ext(&pr[2], eps, 0.0, eps)?);
        let nodes = grid
            .nodes
            .iter()
            .zip(&grid.part)
            .map(|(&x, p)| {
                let chain_node = |k: usize, pos: f64, sigma: f64| Node {
                    class: Class::Chain,
                    pos,
                    x,
                    pl: pl[k].value(x),
                    pr: pr[k].value(x),
                    sigma,
                };
                match p {
                    Part::A if x < -eps => chain_node(0, x, 1.0),
                    Part::A => Node {
                        class: Class::ExtLeft,
                        pos: -eps,
                        x,
                        pl: ll.value(x),
                        pr: lr.value(x),
                        sigma: 1.0,
                    },
                    Part::Mid => chain_node(1, eps * x, 1.0 / eps),
                    Part::B if x > eps => chain_node(2, x, 1.0),
                    Part::B => Node {
                        class: Class::ExtRight,
                        pos: eps,
                        x,
                        pl: rl.value(x),
                        pr: rr.value(x),
                        sigma: 1.0,
                    },
                }
            })
            .collect();
        Ok(PerturbedKernel { nodes, wr })
    }
}

impl Kernel for PerturbedKernel {
    fn entry(&self, i: usize, j: usize) -> C64 {
        let (ni, nj) = (&self.nodes[i], &self.nodes[j]);
        let g = match nj.class {
            Class::Chain if nj.pos < ni.pos => ni.pr * nj.pl,
            Class::Chain => ni.pl * nj.pr,
            Class::ExtLeft if ni.class == Class::ExtLeft && nj.x < ni.x => {
                ni.pr * nj.pl - ni.pl * nj.pr
            }
            Class::ExtRight if ni.class == Class::ExtRight && nj.x > ni.x => {
                ni.pl * nj.pr - ni.pr * nj.pl
            }
            _ => return C64::new(0.0, 0.0),
        };
        g * (nj.sigma / self.wr)
    }
}

/// Block kernels plus the rank-one trace couplings `chi_a G_B(-1, .)` and
/// `chi_b G_B(1, .)`.
struct LimitKernel {
    part: Vec<Part>,
    x: Vec<f64>,
    pl: Vec<C64>,
    pr: Vec<C64>,
    chi: Vec<C64>,
    gl: Vec<C64>,
    gr: Vec<C64>,
    inv_w: [C64; 3],
}

impl LimitKernel {
    fn new(spec: &ProblemSpec, zeta: C64, grid: &Grid) -> Result<Self> {
        check_resolvent_set(spec, zeta)?;
        let bl = blocks(spec);
        let mut sols = Vec::new();
        for p in [&bl.aa, &bl.b, &bl.ab] {
            let c = p.chain();
            let l = end_solution(&c, zeta, true)?.remove(0);
            let r = end_solution(&c, zeta, false)?.remove(0);
            let w = wronskian(&c, std::slice::from_ref(&l), std::slice::from_ref(&r))?;
            sols.push((l, r, w));
        }
        let inv_w = [1.0 / sols[0].2, 1.0 / sols[1].2, 1.0 / sols[2].2];
        let (la0, rb0) = (sols[0].0.value(0.0), sols[2].1.value(0.0));
        let (wl, wr) = (sols[1].0.value(-1.0), sols[1].1.value(1.0));
        let n = grid.len();
        let mut k = LimitKernel {
            part: grid.part.clone(),
            x: grid.nodes.clone(),
            pl: Vec::with_capacity(n),
            pr: Vec::with_capacity(n),
            chi: Vec::with_capacity(n),
            gl: Vec::with_capacity(n),
            gr: Vec::with_capacity(n),
            inv_w,
        };
        let zero = C64::new(0.0, 0.0);
        for (&x, &p) in grid.nodes.iter().zip(&grid.part) {
            let (l, r, _) = &sols[p as usize];
            let (vl, vr) = (l.value(x), r.value(x));
            k.pl.push(vl);
            k.pr.push(vr);
            match p {
                Part::A => {
                    k.chi.push(vl / la0);
                    k.gl.push(zero);
                    k.gr.push(zero);
                }
                Part::Mid => {
                    k.chi.push(zero);
                    k.gl.push(wl * vr * inv_w[1]);
                    k.gr.push(vl * wr * inv_w[1]);
                }
                Part::B => {
                    k.chi.push(vr / rb0);
                    k.gl.push(zero);
                    k.gr.push(zero);
                }
            }
        }
        Ok(k)
    }
}

impl Kernel for LimitKernel {
    fn entry(&self, i: usize, j: usize) -> C64 {
        let (pi, pj) = (self.part[i], self.part[j]);
        if pi == pj {
            let g = if self.x[j] < self.x[i] {
                self.pr[i] * self.pl[j]
            } else {
                self.pl[i] * self.pr[j]
            };
            return g * self.inv_w[pi as usize];
        }
        match (pi, pj) {
            (Part::A, Part::Mid) => self.chi[i] * self.gl[j],
            (Part::B, Part::Mid) => self.chi[i] * self.gr[j],
            _ => C64::new(0.0, 0.0),
        }
    }
}

/// A dense matrix in weighted form on a [`Grid`].
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub n: usize,
    pub data: Vec<C64>,
    sqrt_mass: Vec<f64>,
}

impl DenseOperator {
    fn assemble(grid: &Grid, entry: impl Fn(usize, usize) -> C64 + Sync) -> Self {
        let n = grid.len();
        let sqrt_mass: Vec<f64> = grid.mass.iter().map(|m| m.sqrt()).collect();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = entry(i, j) * (sqrt_mass[i] * sqrt_mass[j]);
            }
        });
        DenseOperator { n, data, sqrt_mass }
    }

    /// Unweighted action on nodal values: `y_i = sum_j K_ij m_j f_j`.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let g: Vec<C64> = f.iter().zip(&self.sqrt_mass).map(|(v, s)| v * s).collect();
        self.matvec(&g)
            .into_iter()
            .zip(&self.sqrt_mass)
            .map(|(v, s)| v / s)
            .collect()
    }

    fn matvec(&self, v: &[C64]) -> Vec<C64> {
        self.data
            .par_chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn matvec_adjoint(&self, u: &[C64]) -> Vec<C64> {
        let n = self.n;
        let rows_per = n.div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
        self.data
            .par_chunks(n * rows_per)
            .enumerate()
            .map(|(c, block)| {
                let mut acc = vec![C64::new(0.0, 0.0); n];
                for (r, row) in block.chunks(n).enumerate() {
                    let ui = u[c * rows_per + r];
                    for (a, m) in acc.iter_mut().zip(row) {
                        *a += m.conj() * ui;
                    }
                }
                acc
            })
            .reduce(
                || vec![C64::new(0.0, 0.0); n],
                |mut x, y| {
                    x.iter_mut().zip(&y).for_each(|(a, b)| *a += b);
                    x
                },
            )
    }

    /// Largest singular value by power iteration on `A* A`.
    pub fn norm(&self) -> f64 {
        self.norm_on(0..self.n)
    }

    /// Largest singular value of the restriction to inputs in `cols`.
    pub fn norm_on(&self, cols: Range<usize>) -> f64 {
        let n = self.n;
        let mut v: Vec<C64> = (0..n)
            .map(|j| {
                if cols.contains(&j) {
                    let t = j as f64;
                    C64::new(1.0 + 0.3 * (1.7 * t).sin(), 0.2 * (0.9 * t).cos())
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let l2 = |x: &[C64]| x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nv = l2(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|c| *c /= nv);
        let mut sigma = 0.0;
        for _ in 0..POWER_ITERS {
            let u = self.matvec(&v);
            let s = l2(&u);
            let mut z = self.matvec_adjoint(&u);
            for (j, c) in z.iter_mut().enumerate() {
                if !cols.contains(&j) {
                    *c = C64::new(0.0, 0.0);
                }
            }
            let nz = l2(&z);
            let done = (s - sigma).abs() <= POWER_TOL * s;
            sigma = s;
            if done || nz == 0.0 {
                break;
            }
            v = z.into_iter().map(|c| c / nz).collect();
        }
        sigma
    }
}

/// Perturbed resolvent at `zeta` realized on the product space.
pub fn perturbed_operator(
    spec: &ProblemSpec,
    eps: f64,
    zeta: C64,
    grid: &Grid,
) -> Result<DenseOperator> {
    let k = PerturbedKernel::new(spec, eps, zeta, grid)?;
    Ok(DenseOperator::assemble(grid, |i, j| k.entry(i, j)))
}

/// Limit resolvent at `zeta`.
pub fn limit_operator(spec: &ProblemSpec, zeta: C64, grid: &Grid) -> Result<DenseOperator> {
    let k = LimitKernel::new(spec, zeta, grid)?;
    Ok(DenseOperator::assemble(grid, |i, j| k.entry(i, j)))
}

/// Difference of the two resolvents, assembled without storing either.
pub fn resolvent_difference(
    spec: &ProblemSpec,
    eps: f64,
    zeta: C64,
    grid: &Grid,
) -> Result<DenseOperator> {
    let kp = PerturbedKernel::new(spec, eps, zeta, grid)?;
    let kl = LimitKernel::new(spec, zeta, grid)?;
    Ok(DenseOperator::assemble(grid, |i, j| {
        kp.entry(i, j) - kl.entry(i, j)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitop::apply_limit_resolvent;
    use crate::perturbed::apply_perturbed_resolvent;
    use std::f64::consts::PI;

    fn model() -> ProblemSpec {
        ProblemSpec::constant(-1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    }

    fn source(spec: &ProblemSpec) -> Triple {
        Triple::from_real(
            spec,
            |x| (PI * x).sin() + 0.5,
            |t| 1.0 - t * t,
            |x| (2.0 * x).cos(),
        )
    }

    fn max_err(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn matrices_reproduce_resolvent_actions() {
        let spec = model();
        let (eps, z) = (0.1, C64::new(0.3, 1.0));
        let grid = Grid::new(&spec, eps, 256);
        let f = source(&spec);
        let fs = grid.sample(&f);
        let yp = grid.sample(&apply_perturbed_resolvent(&spec, eps, z, &f).unwrap());
        let kp = perturbed_operator(&spec, eps, z, &grid).unwrap();
        assert!(
            max_err(&kp.apply(&fs), &yp) < 1e-4,
            "{}",
            max_err(&kp.apply(&fs), &yp)
        );
        let yl = grid.sample(&apply_limit_resolvent(&spec, z, &f).unwrap());
        let kl = limit_operator(&spec, z, &grid).unwrap();
        assert!(
            max_err(&kl.apply(&fs), &yl) < 1e-4,
            "{}",
            max_err(&kl.apply(&fs), &yl)
        );
    }

    #[test]
    fn power_iteration_on_known_norm() {
        // the Neumann block at zeta = i has norm 1 / |lambda_0 - i| = 1
        let spec = ProblemSpec::constant(-1.0, 1.0, PI / 2.0, PI / 2.0, 0.0, 1.0, 1.0);
        let grid = Grid::new(&spec, 0.1, 128);
        let kl = limit_operator(&spec, C64::new(0.0, 1.0), &grid).unwrap();
        let mid = kl.norm_on(grid.range(Part::Mid));
        assert!(mid >= 1.0 - 1e-6, "{mid}");
        let full = kl.norm();
        assert!(full >= mid - 1e-12);
    }
}
