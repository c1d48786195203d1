//! Gauss-Legendre rules and composite panel quadrature.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A composite rule: nodes ascending on `[left, right]`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub left: f64,
    pub right: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// `panels` equal panels of `order` points each.
    pub fn uniform(left: f64, right: f64, panels: usize, order: usize) -> Self {
        let edges: Vec<f64> = (0..=panels)
            .map(|i| left + (right - left) * i as f64 / panels as f64)
            .collect();
        Self::from_edges(&edges, order)
    }

    /// Panels between consecutive `edges`.
    pub fn from_edges(edges: &[f64], order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((edges.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for e in edges.windows(2) {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        CompositeRule {
            left: edges[0],
            right: edges[edges.len() - 1],
            nodes,
            weights,
        }
    }

    /// About `total` nodes on `[left, right]`, split at `breaks` so that no
    /// panel straddles one; every sub-interval receives at least one panel.
    pub fn with_breaks(left: f64, right: f64, breaks: &[f64], total: usize, order: usize) -> Self {
        let mut cuts = vec![left];
        let tol = 1e-13 * (right - left);
        for &b in breaks {
            if b > left + tol && b < right - tol {
                cuts.push(b);
            }
        }
        cuts.push(right);
        cuts.sort_by(f64::total_cmp);
        let panels_total = (total / order).max(cuts.len() - 1);
        let len = right - left;
        let mut edges = vec![left];
        let n_sub = cuts.len() - 1;
        // proportional allocation with at least one panel per sub-interval
        let mut alloc: Vec<usize> = cuts
            .windows(2)
            .map(|c| (((c[1] - c[0]) / len) * panels_total as f64).floor() as usize)
            .map(|p| p.max(1))
            .collect();
        let mut assigned: usize = alloc.iter().sum();
        while assigned < panels_total {
            // give the next panel to the sub-interval with the widest panels
            let (k, _) = cuts
                .windows(2)
                .enumerate()
                .map(|(k, c)| (k, (c[1] - c[0]) / alloc[k] as f64))
                .fold(
                    (0, f64::MIN),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            alloc[k] += 1;
            assigned += 1;
        }
        for k in 0..n_sub {
            let (l, r) = (cuts[k], cuts[k + 1]);
            for i in 1..=alloc[k] {
                edges.push(l + (r - l) * i as f64 / alloc[k] as f64);
            }
        }
        Self::from_edges(&edges, order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Composite Gauss-Legendre integral of `f` over `[left, right]`.
pub fn integrate_real(
    f: impl Fn(f64) -> f64,
    left: f64,
    right: f64,
    panels: usize,
    order: usize,
) -> f64 {
    CompositeRule::uniform(left, right, panels, order).integrate(f)
}
