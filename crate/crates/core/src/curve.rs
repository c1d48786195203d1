//! Evaluable and sampled functions on an interval.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

type Eval = dyn Fn(f64) -> (C64, C64) + Send + Sync;

/// A complex function with derivative, evaluated lazily on `[left, right]`.
#[derive(Clone)]
pub struct Curve {
    left: f64,
    right: f64,
    breaks: Vec<f64>,
    f: Arc<Eval>,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Curve[{}, {}]", self.left, self.right)
    }
}

impl Curve {
    pub fn new(
        left: f64,
        right: f64,
        f: impl Fn(f64) -> (C64, C64) + Send + Sync + 'static,
    ) -> Self {
        Curve {
            left,
            right,
            breaks: Vec::new(),
            f: Arc::new(f),
        }
    }

    /// Declare interior points where the curve is only piecewise smooth.
    pub fn with_breaks(mut self, mut breaks: Vec<f64>) -> Self {
        breaks.retain(|&b| b > self.left && b < self.right);
        breaks.sort_by(f64::total_cmp);
        self.breaks = breaks;
        self
    }

    pub fn zero(left: f64, right: f64) -> Self {
        Curve::new(left, right, |_| (C64::new(0.0, 0.0), C64::new(0.0, 0.0)))
    }

    pub fn constant(left: f64, right: f64, c: C64) -> Self {
        Curve::new(left, right, move |_| (c, C64::new(0.0, 0.0)))
    }

    /// A real function without a known derivative; the derivative slot is zero.
    pub fn from_real(
        left: f64,
        right: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Curve::new(left, right, move |x| {
            (C64::new(f(x), 0.0), C64::new(0.0, 0.0))
        })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Value and derivative at `x`.
    pub fn eval(&self, x: f64) -> (C64, C64) {
        (self.f)(x)
    }

    pub fn value(&self, x: f64) -> C64 {
        (self.f)(x).0
    }

    pub fn scaled(&self, c: C64) -> Curve {
        let f = Arc::clone(&self.f);
        Curve {
            left: self.left,
            right: self.right,
            breaks: self.breaks.clone(),
            f: Arc::new(move |x| {
                let (v, d) = f(x);
                (c * v, c * d)
            }),
        }
    }

    /// `self + c * other` on the common interval.
    pub fn add_scaled(&self, c: C64, other: &Curve) -> Curve {
        let (f, g) = (Arc::clone(&self.f), Arc::clone(&other.f));
        let mut breaks = self.breaks.clone();
        breaks.extend_from_slice(&other.breaks);
        Curve::new(self.left, self.right, move |x| {
            let (v, d) = f(x);
            let (u, e) = g(x);
            (v + c * u, d + c * e)
        })
        .with_breaks(breaks)
    }

    /// `n + 1` uniform samples including both ends.
    pub fn sample(&self, n: usize) -> GridFunction {
        GridFunction::from_curve(self, n)
    }
}

/// Uniform default sample count.
pub const DEFAULT_SAMPLES: usize = 2048;

/// A function sampled on a grid, with derivative samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub xs: Vec<f64>,
    pub values: Vec<C64>,
    pub derivs: Vec<C64>,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, values: Vec<C64>, derivs: Vec<C64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() || xs.len() != derivs.len() {
            return Err(Error::domain(
                "grid function needs matching arrays of length >= 2",
            ));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("grid abscissae must be strictly increasing"));
        }
        Ok(GridFunction { xs, values, derivs })
    }

    pub fn from_curve(c: &Curve, n: usize) -> Self {
        let n = n.max(1);
        let xs: Vec<f64> = (0..=n)
            .map(|i| c.left + (c.right - c.left) * i as f64 / n as f64)
            .collect();
        let (values, derivs) = xs.iter().map(|&x| c.eval(x)).unzip();
        GridFunction { xs, values, derivs }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn left(&self) -> f64 {
        self.xs[0]
    }

    pub fn right(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Linear interpolation of value and derivative; clamps outside the grid.
    pub fn interpolate(&self, x: f64) -> (C64, C64) {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return (self.values[i], self.derivs[i]),
            Err(0) => return (self.values[0], self.derivs[0]),
            Err(i) if i >= n => return (self.values[n - 1], self.derivs[n - 1]),
            Err(i) => i - 1,
        };
        let s = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        (
            self.values[i] + (self.values[i + 1] - self.values[i]) * s,
            self.derivs[i] + (self.derivs[i + 1] - self.derivs[i]) * s,
        )
    }

    pub fn to_curve(&self) -> Curve {
        let g = self.clone();
        Curve::new(self.left(), self.right(), move |x| g.interpolate(x))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// CSV rows `x,re,im,re_deriv,im_deriv`, optionally prefixed by a piece tag.
    pub fn write_csv_rows(&self, out: &mut String, tag: Option<&str>) {
        for ((x, v), d) in self.xs.iter().zip(&self.values).zip(&self.derivs) {
            if let Some(t) = tag {
                let _ = write!(out, "{t},");
            }
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(*x),
                fmt_num(v.re),
                fmt_num(v.im),
                fmt_num(d.re),
                fmt_num(d.im)
            );
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im,re_deriv,im_deriv\n");
        self.write_csv_rows(&mut s, None);
        s
    }
}

/// Fixed 17-significant-digit scientific formatting used in every CSV.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}
