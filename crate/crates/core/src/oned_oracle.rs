//! One-dimensional ground truth: Gelfand–Yaglom determinants of `-d²/dx² + V + z`
//! on intervals and circles, Dirichlet-to-Neumann matrices at cut points from
//! fundamental solutions, and the one-dimensional gluing identity.
//!
//! Normalization: with `y1(a) = 1, y1'(a) = 0` and `y2(a) = 0, y2'(a) = 1`,
//! DD = `2 y2(b)`, DN = `2 y2'(b)`, ND = `2 y1(b)`, NN = `2 y1'(b)` and
//! periodic = `y1(b) + y2'(b) - 2`. For `V = 0` on `[0, L]` with Dirichlet ends this
//! gives `2L`, the zeta-regularized value.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cylinder::BoundaryCondition;
use crate::error::{invalid, Error, Result};

/// Potential on the line, tagged by shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Potential {
    /// `V(x) = value`.
    Constant { value: f64 },
    /// `V(x) = depth` on `[from, to]`, zero elsewhere.
    Well { depth: f64, from: f64, to: f64 },
    /// `V(x) = values[i]` on `[breaks[i], breaks[i+1])`; constant extension outside.
    PiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
    /// Linear interpolation of `(x_i, v_i)`; constant extension outside.
    Table { x: Vec<f64>, v: Vec<f64> },
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::Constant { value } if !value.is_finite() => Err(invalid("potential must be finite")),
            Potential::Well { depth, from, to } if !(depth.is_finite() && from < to) => {
                Err(invalid("well needs a finite depth and from < to"))
            }
            Potential::PiecewiseConstant { breaks, values } => {
                if breaks.len() != values.len() + 1 || values.is_empty() {
                    return Err(invalid(
                        "piecewise-constant potential needs len(breaks) = len(values) + 1",
                    ));
                }
                if breaks.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(invalid("piecewise-constant breaks must increase strictly"));
                }
                Ok(())
            }
            Potential::Table { x, v } => {
                if x.len() != v.len() || x.len() < 2 {
                    return Err(invalid("table potential needs at least two equally long columns"));
                }
                if x.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(invalid("table abscissae must increase strictly"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Constant { value } => *value,
            Potential::Well { depth, from, to } => {
                if x >= *from && x <= *to {
                    *depth
                } else {
                    0.0
                }
            }
            Potential::PiecewiseConstant { breaks, values } => {
                let i = breaks[1..breaks.len() - 1].partition_point(|b| *b <= x);
                values[i]
            }
            Potential::Table { x: xs, v } => {
                if x <= xs[0] {
                    return v[0];
                }
                if x >= xs[xs.len() - 1] {
                    return v[v.len() - 1];
                }
                let i = xs.partition_point(|p| *p <= x) - 1;
                let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
                v[i] * (1.0 - w) + v[i + 1] * w
            }
        }
    }

    /// Points where `V` or its derivative may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Potential::Constant { .. } => vec![],
            Potential::Well { from, to, .. } => vec![*from, *to],
            Potential::PiecewiseConstant { breaks, .. } => breaks.clone(),
            Potential::Table { x, .. } => x.clone(),
        }
    }
}

/// `-d²/dx² + V + shift` on `[a, b]` with end conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerProblem {
    pub potential: Potential,
    pub a: f64,
    pub b: f64,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    #[serde(default)]
    pub shift: f64,
}

impl SchrodingerProblem {
    pub fn new(
        potential: Potential,
        a: f64,
        b: f64,
        left: BoundaryCondition,
        right: BoundaryCondition,
        shift: f64,
    ) -> Result<Self> {
        let p = Self {
            potential,
            a,
            b,
            left,
            right,
            shift,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(invalid(format!("interval needs a < b, got [{}, {}]", self.a, self.b)));
        }
        if !self.shift.is_finite() {
            return Err(invalid("shift must be finite"));
        }
        Ok(())
    }

    /// Warnings for sample points where `V + shift < 0`.
    pub fn warnings(&self) -> Vec<String> {
        let n = 200;
        let mut out = Vec::new();
        for i in 0..=n {
            let x = self.a + (self.b - self.a) * i as f64 / n as f64;
            if self.potential.eval(x) + self.shift < 0.0 {
                out.push(format!("V + z < 0 at x = {x:.6}; positivity is not guaranteed"));
                break;
            }
        }
        out
    }

    fn sub(&self, a: f64, b: f64, left: BoundaryCondition, right: BoundaryCondition) -> Self {
        Self {
            potential: self.potential.clone(),
            a,
            b,
            left,
            right,
            shift: self.shift,
        }
    }
}

/// A value with an absolute error estimate from a tightened rerun.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    pub error: f64,
}

/// Default relative tolerance of the integrator.
pub const ODE_TOL: f64 = 1e-13;

/// `[[y1, y2], [y1', y2']]` at `b` for `y'' = (V + z) y` started at `a`.
pub fn fundamental_matrix(potential: &Potential, shift: f64, a: f64, b: f64, tol: f64) -> Result<[[f64; 2]; 2]> {
    if !(a < b) {
        return Err(invalid(format!("fundamental matrix needs a < b, got [{a}, {b}]")));
    }
    let mut knots = vec![a];
    knots.extend(potential.breakpoints().into_iter().filter(|x| *x > a && *x < b));
    knots.push(b);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut y = [1.0, 0.0, 0.0, 1.0];
    for w in knots.windows(2) {
        // sample the potential strictly inside each piece so jumps are not straddled
        let (lo, hi) = (w[0], w[1]);
        let eps = 1e-14 * (hi - lo);
        let q = |x: f64| potential.eval(x.clamp(lo + eps, hi - eps)) + shift;
        y = dopri5(&q, lo, hi, y, tol)?;
    }
    Ok([[y[0], y[2]], [y[1], y[3]]])
}

/// State `[y1, y1', y2, y2']`.
fn rhs<F: Fn(f64) -> f64>(q: &F, x: f64, y: &[f64; 4]) -> [f64; 4] {
    let v = q(x);
    [y[1], v * y[0], y[3], v * y[2]]
}

fn dopri5<F: Fn(f64) -> f64>(q: &F, a: f64, b: f64, y0: [f64; 4], tol: f64) -> Result<[f64; 4]> {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut x = a;
    let mut y = y0;
    let mut h = ((b - a) / 64.0).min(0.01);
    let mut steps = 0usize;
    while x < b {
        if steps > 5_000_000 {
            return Err(Error::Numeric("integrator exceeded the step budget".into()));
        }
        steps += 1;
        if x + h > b {
            h = b - x;
        }
        let mut k = [[0.0; 4]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for c in 0..4 {
                    ys[c] += h * A[s][j] * kj[c];
                }
            }
            k[s] = rhs(q, x + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..4 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][c];
                d4 += B4[s] * k[s][c];
            }
            y5[c] += h * d5;
            let scale = tol * (1.0 + y[c].abs().max(y5[c].abs()));
            err = err.max((h * (d5 - d4)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Numeric("integrator produced a non-finite value".into()));
        }
        if err <= 1.0 {
            x += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * (b - a) {
            return Err(Error::Numeric("integrator step size underflow".into()));
        }
    }
    Ok(y)
}

fn gy_from(p: &SchrodingerProblem, tol: f64) -> Result<f64> {
    use BoundaryCondition::*;
    let f = fundamental_matrix(&p.potential, p.shift, p.a, p.b, tol)?;
    Ok(2.0
        * match (p.left, p.right) {
            (Dirichlet, Dirichlet) => f[0][1],
            (Dirichlet, Neumann) => f[1][1],
            (Neumann, Dirichlet) => f[0][0],
            (Neumann, Neumann) => f[1][0],
        })
}

/// Gelfand–Yaglom determinant with an error estimate from a rerun at `tol/100`.
pub fn gy_det(p: &SchrodingerProblem) -> Result<OracleValue> {
    p.validate()?;
    let v = gy_from(p, ODE_TOL)?;
    let w = gy_from(p, ODE_TOL * 1e-2)?;
    Ok(OracleValue {
        value: w,
        error: (v - w).abs() + 1e-15 * w.abs(),
    })
}

/// Periodic determinant `y1(b) + y2'(b) - 2` of `-d²/dx² + V + z` on the circle `[a, b]`.
pub fn gy_det_periodic(potential: &Potential, shift: f64, a: f64, b: f64) -> Result<OracleValue> {
    potential.validate()?;
    let at = |tol: f64| -> Result<f64> {
        let f = fundamental_matrix(potential, shift, a, b, tol)?;
        Ok(f[0][0] + f[1][1] - 2.0)
    };
    let v = at(ODE_TOL)?;
    let w = at(ODE_TOL * 1e-2)?;
    Ok(OracleValue {
        value: w,
        error: (v - w).abs() + 1e-15 * w.abs(),
    })
}

fn check_cuts(p: &SchrodingerProblem, cuts: &[f64]) -> Result<()> {
    if cuts.is_empty() {
        return Err(invalid("at least one cut point is required"));
    }
    let mut prev = p.a;
    for &c in cuts {
        if !(c > prev) {
            return Err(invalid("cut points must increase strictly inside (a, b)"));
        }
        prev = c;
    }
    if !(p.b > prev) {
        return Err(invalid("cut points must lie inside (a, b)"));
    }
    Ok(())
}

/// Dirichlet-to-Neumann matrix at the cut points: `(Rφ)_i` is the jump
/// `u'(c_i-) - u'(c_i+)` of the solution of `(-d² + V + z)u = 0` on each piece with
/// `u(c_i) = φ_i` and the outer end conditions.
pub fn dtn_1d(p: &SchrodingerProblem, cuts: &[f64]) -> Result<DMatrix<f64>> {
    use BoundaryCondition::*;
    p.validate()?;
    check_cuts(p, cuts)?;
    let n = cuts.len();
    let mut r = DMatrix::zeros(n, n);
    let fm = |lo: f64, hi: f64| fundamental_matrix(&p.potential, p.shift, lo, hi, ODE_TOL);
    let singular = |what: &str| Error::SingularOperator(format!("{what} piece has a zero-boundary solution"));
    let left = fm(p.a, cuts[0])?;
    let (y1, y1p, y2, y2p) = (left[0][0], left[1][0], left[0][1], left[1][1]);
    r[(0, 0)] += match p.left {
        Dirichlet if y2 != 0.0 => y2p / y2,
        Neumann if y1 != 0.0 => y1p / y1,
        _ => return Err(singular("left")),
    };
    for i in 0..n - 1 {
        let f = fm(cuts[i], cuts[i + 1])?;
        let (y1, y2, y2p) = (f[0][0], f[0][1], f[1][1]);
        if y2 == 0.0 {
            return Err(singular("interior"));
        }
        r[(i, i)] += y1 / y2;
        r[(i + 1, i + 1)] += y2p / y2;
        r[(i, i + 1)] -= 1.0 / y2;
        r[(i + 1, i)] -= 1.0 / y2;
    }
    let right = fm(cuts[n - 1], p.b)?;
    let (y1, y1p, y2, y2p) = (right[0][0], right[1][0], right[0][1], right[1][1]);
    r[(n - 1, n - 1)] += match p.right {
        Dirichlet if y2 != 0.0 => y1 / y2,
        Neumann if y2p != 0.0 => y1p / y2p,
        _ => return Err(singular("right")),
    };
    Ok(r)
}

/// Both sides of the one-dimensional gluing identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingCheck {
    /// Determinant on the whole interval.
    pub lhs: f64,
    /// Product of the piece determinants (Dirichlet at cuts) and `det R`.
    pub product: f64,
    /// `lhs / product`.
    pub constant: f64,
    /// `2^(-number of cuts)`.
    pub expected_constant: f64,
    pub error: f64,
}

/// `det(H + z)` against `Π det(pieces) · det R(z)`.
pub fn bfk_1d_check(p: &SchrodingerProblem, cuts: &[f64]) -> Result<GluingCheck> {
    use BoundaryCondition::*;
    check_cuts(p, cuts)?;
    let whole = gy_det(p)?;
    let mut ends = vec![p.a];
    ends.extend_from_slice(cuts);
    ends.push(p.b);
    let mut product = 1.0;
    let mut rel_err = whole.error / whole.value.abs();
    for (i, w) in ends.windows(2).enumerate() {
        let l = if i == 0 { p.left } else { Dirichlet };
        let r = if i + 2 == ends.len() { p.right } else { Dirichlet };
        let d = gy_det(&p.sub(w[0], w[1], l, r))?;
        product *= d.value;
        rel_err += d.error / d.value.abs();
    }
    let det_r = dtn_1d(p, cuts)?.determinant();
    product *= det_r;
    let constant = whole.value / product;
    Ok(GluingCheck {
        lhs: whole.value,
        product,
        constant,
        expected_constant: 0.5f64.powi(cuts.len() as i32),
        error: (rel_err + 1e-12) * constant.abs(),
    })
}
