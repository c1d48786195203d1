//! Independent finite-element oracle: piecewise-linear elements with lumped
//! mass on a piecewise-uniform mesh, eigenvalues by Sturm-count bisection on
//! the symmetric tridiagonal pencil, Richardson-extrapolated over one mesh
//! halving.

#![allow(dead_code)]

use deltamass::ProblemSpec;

pub struct Pencil {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Problem `-y'' + q y = lambda w y` on `(left, right)` with
/// `y cos(alpha) + y' sin(alpha) = 0` at both ends.
pub struct FemProblem<'a> {
    pub left: f64,
    pub right: f64,
    pub alpha: f64,
    pub beta: f64,
    pub q: &'a dyn Fn(f64) -> f64,
    pub w: &'a dyn Fn(f64) -> f64,
    /// Mesh nodes forced at coefficient jumps.
    pub breaks: Vec<f64>,
}

fn mesh(p: &FemProblem, cells: usize) -> Vec<f64> {
    let mut edges = vec![p.left];
    edges.extend(
        p.breaks
            .iter()
            .copied()
            .filter(|&x| x > p.left && x < p.right),
    );
    edges.push(p.right);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    // Cells per segment follow the local wavelength, sqrt(w) times length.
    let scale: Vec<f64> = edges
        .windows(2)
        .map(|s| (s[1] - s[0]) * (p.w)(0.5 * (s[0] + s[1])).abs().sqrt().max(1.0))
        .collect();
    let total: f64 = scale.iter().sum();
    let mut x = vec![p.left];
    for (s, sc) in edges.windows(2).zip(&scale) {
        let k = ((cells as f64 * sc / total).round() as usize).max(4);
        for i in 1..=k {
            x.push(s[0] + (s[1] - s[0]) * i as f64 / k as f64);
        }
    }
    x
}

fn assemble(p: &FemProblem, cells: usize) -> Pencil {
    let x = mesh(p, cells);
    let n = x.len();
    let mut k_diag = vec![0.0; n];
    let mut k_off = vec![0.0; n - 1];
    let mut m = vec![0.0; n];
    for i in 0..n - 1 {
        let h = x[i + 1] - x[i];
        k_diag[i] += 1.0 / h;
        k_diag[i + 1] += 1.0 / h;
        k_off[i] = -1.0 / h;
        let (xl, xr) = (x[i] + 0.25 * h, x[i + 1] - 0.25 * h);
        m[i] += 0.5 * h * (p.w)(xl);
        m[i + 1] += 0.5 * h * (p.w)(xr);
        k_diag[i] += 0.5 * h * (p.q)(xl);
        k_diag[i + 1] += 0.5 * h * (p.q)(xr);
    }
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let lo = if sa.abs() < 1e-14 {
        1
    } else {
        k_diag[0] -= ca / sa;
        0
    };
    let hi = if sb.abs() < 1e-14 {
        n - 1
    } else {
        k_diag[n - 1] += cb / sb;
        n
    };
    let diag: Vec<f64> = (lo..hi).map(|i| k_diag[i] / m[i]).collect();
    let off: Vec<f64> = (lo..hi - 1)
        .map(|i| k_off[i] / (m[i] * m[i + 1]).sqrt())
        .collect();
    Pencil { diag, off }
}

impl Pencil {
    /// Number of eigenvalues below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            d = self.diag[i] - lambda - e2 / d;
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalue with zero-based index `k`.
    fn eigenvalue(&self, k: usize) -> f64 {
        let mut lo = self
            .diag
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = self.off.get(i).map_or(0.0, |x| x.abs());
                d - l - r
            })
            .fold(f64::INFINITY, f64::min);
        let mut hi = 1.0_f64.max(lo + 1.0);
        while self.count_below(hi) <= k {
            hi = 2.0 * hi.abs() + 1.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// First `n` eigenvalues on `cells` and `cells / 2` cells, extrapolated.
pub fn fem_eigenvalues(p: &FemProblem, n: usize, cells: usize) -> Vec<f64> {
    let fine = assemble(p, cells);
    let coarse = assemble(p, cells / 2);
    (0..n)
        .map(|k| {
            let (f, c) = (fine.eigenvalue(k), coarse.eigenvalue(k));
            (4.0 * f - c) / 3.0
        })
        .collect()
}

/// Oracle for the perturbed problem with density `r` outside `(-eps, eps)`
/// and `eps^-2 h(x / eps)` inside.
pub fn perturbed_oracle(spec: &ProblemSpec, eps: f64, n: usize, cells: usize) -> Vec<f64> {
    let q = |x: f64| spec.q.eval(x);
    let w = |x: f64| {
        if x.abs() < eps {
            spec.h.eval(x / eps) / (eps * eps)
        } else {
            spec.r.eval(x)
        }
    };
    let mut breaks = vec![-eps, 0.0, eps];
    breaks.extend(spec.q.breakpoints());
    breaks.extend(spec.r.breakpoints().into_iter().filter(|x| x.abs() > eps));
    breaks.extend(spec.h.breakpoints().into_iter().map(|t| eps * t));
    let p = FemProblem {
        left: spec.a,
        right: spec.b,
        alpha: spec.alpha,
        beta: spec.beta,
        q: &q,
        w: &w,
        breaks,
    };
    fem_eigenvalues(&p, n, cells)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
