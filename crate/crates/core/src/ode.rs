//! Adaptive Dormand-Prince 5(4) integration with dense output.

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

impl Tolerances {
    /// Tighter settings for boundary-value solves, whose residuals are
    /// checked through the dense output.
    pub fn boundary_value() -> Self {
        Tolerances {
            rtol: 1e-12,
            atol: 1e-14,
            ..Tolerances::default()
        }
    }
}

#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    x0: f64,
    h: f64,
    rc: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, x: f64) -> [f64; N] {
        let s = (x - self.x0) / self.h;
        let s1 = 1.0 - s;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.rc;
            *o = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        out
    }
}

/// Continuous solution over the integrated range.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    steps: Vec<DenseStep<N>>,
    start: f64,
    end: f64,
}

impl<const N: usize> Trajectory<N> {
    fn empty(start: f64) -> Self {
        Trajectory {
            steps: Vec::new(),
            start,
            end: start,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn steps(&self) -> usize {
        self.steps.len()
    }

    /// Append a trajectory that starts where this one ends, in the same direction.
    pub fn append(&mut self, other: Trajectory<N>) {
        if self.steps.is_empty() {
            self.start = other.start;
        }
        self.end = other.end;
        self.steps.extend(other.steps);
    }

    /// Dense-output state at `x`; clamps to the covered range.
    pub fn eval(&self, x: f64) -> [f64; N] {
        assert!(!self.steps.is_empty(), "evaluating an empty trajectory");
        let forward = self.end >= self.start;
        // first step whose far end passes x
        let (mut lo, mut hi) = (0usize, self.steps.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let st = &self.steps[mid];
            let far = st.x0 + st.h;
            let passed = if forward { x <= far } else { x >= far };
            if passed {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let st = &self.steps[lo];
        let (a, b) = (st.x0, st.x0 + st.h);
        let xc = if forward {
            x.clamp(a, b)
        } else {
            x.clamp(b, a)
        };
        st.eval(xc)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction).
///
/// Returns the final state and, when `record` is set, the dense trajectory.
pub fn integrate<const N: usize, F>(
    mut f: F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    tol: &Tolerances,
    record: bool,
) -> Result<([f64; N], Option<Trajectory<N>>)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut traj = Trajectory::empty(x0);
    let span = x1 - x0;
    if span == 0.0 {
        return Ok((y0, record.then_some(traj)));
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = dir * (span.abs() / 8.0).min(0.05 * (1.0 + x0.abs().max(x1.abs())));
    let mut k1 = f(x, &y);
    let mut steps = 0usize;
    let mut last_ratio: Option<f64> = None;
    loop {
        let remaining = x1 - x;
        if remaining * dir <= 0.0 {
            break;
        }
        let last = (h * dir) >= (remaining * dir) * (1.0 - 1e-13);
        if last {
            h = remaining;
        }
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::Integrator {
                x,
                reason: format!("exceeded {} steps", tol.max_steps),
            });
        }
        let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            x + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            x + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let xe = if last { x1 } else { x + h };
        let k6 = f(
            xe,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y1 = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(xe, &y1);
        let mut err = 0.0;
        let mut finite = true;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
            finite &= y1[i].is_finite();
        }
        err = (err / N as f64).sqrt();
        if !finite || !err.is_finite() {
            h *= 0.25;
            if h.abs() < 1e-15 * (1.0 + x.abs()) {
                return Err(Error::Integrator {
                    x,
                    reason: "non-finite state".into(),
                });
            }
            continue;
        }
        if err <= 1.0 {
            if record {
                let mut rc = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    rc[0][i] = y[i];
                    rc[1][i] = ydiff;
                    rc[2][i] = bspl;
                    rc[3][i] = ydiff - h * k7[i] - bspl;
                    rc[4][i] = h
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                traj.steps.push(DenseStep { x0: x, h, rc });
            }
            x = xe;
            y = y1;
            k1 = k7;
            if last {
                break;
            }
            // PI-flavoured controller
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            if let Some(prev) = last_ratio {
                fac *= (prev / err.max(1e-10)).powf(0.04).min(1.5);
            }
            last_ratio = Some(err.max(1e-4));
            h *= fac.clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < 1e-15 * (1.0 + x.abs()) {
                return Err(Error::Integrator {
                    x,
                    reason: "step size underflow".into(),
                });
            }
        }
    }
    traj.end = x1;
    Ok((y, record.then_some(traj)))
}
