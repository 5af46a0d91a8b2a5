//! Gamma, digamma, Riemann zeta with its derivative, upper incomplete gamma
//! for real order, and the incomplete Bessel integrals
//! `K_s(a,b) = ∫₀^∞ exp(-(a²t + b²/t)) t^(s-1) dt`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(s: f64) -> bool {
    s <= 0.0 && s == s.round()
}

fn lanczos_sum(x: f64) -> f64 {
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Gamma function for real argument; reflection below 1/2.
pub fn gamma(s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(invalid(format!("gamma: non-finite argument {s}")));
    }
    if is_nonpositive_integer(s) {
        return Err(Error::Domain(format!("gamma has a pole at {s}")));
    }
    if s < 0.5 {
        let sin = (PI * s).sin();
        return Ok(PI / (sin * gamma(1.0 - s)?));
    }
    let x = s - 1.0;
    let t = x + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * lanczos_sum(x))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        let sin = (PI * x).sin();
        return Ok((PI / sin).ln() - ln_gamma(1.0 - x)?);
    }
    let x1 = x - 1.0;
    let t = x1 + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (x1 + 0.5) * t.ln() - t + lanczos_sum(x1).ln())
}

/// Digamma function `ψ = Γ'/Γ`.
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("digamma has a pole at {x}")));
    }
    if x < 0.0 {
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let series = x2
        * (1.0 / 12.0
            - x2 * (1.0 / 120.0
                - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 * (1.0 / 132.0 - x2 * (691.0 / 32_760.0 - x2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// Forward-mode dual number used to differentiate series termwise.
#[derive(Clone, Copy, Debug)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn new(v: f64, d: f64) -> Self {
        Self { v, d }
    }
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.v * o.v, self.v * o.d + self.d * o.v)
    }
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.v + o.v, self.d + o.d)
    }
    fn scale(self, c: f64) -> Dual {
        Dual::new(self.v * c, self.d * c)
    }
    fn recip(self) -> Dual {
        Dual::new(1.0 / self.v, -self.d / (self.v * self.v))
    }
}

/// `n^(-s)` as a dual number in `s`.
fn pow_neg(n: f64, s: f64) -> Dual {
    let v = (-s * n.ln()).exp();
    Dual::new(v, -n.ln() * v)
}

const BERNOULLI_2K: [f64; 14] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43_867.0 / 798.0,
    -174_611.0 / 330.0,
    854_513.0 / 138.0,
    -236_364_091.0 / 2730.0,
    8_553_103.0 / 6.0,
    -23_749_461_029.0 / 870.0,
];

/// Euler–Maclaurin evaluation of ζ and ζ' at real `s ≠ 1`.
fn zeta_euler_maclaurin(s: f64) -> Dual {
    const N: usize = 30;
    let sd = Dual::new(s, 1.0);
    let mut acc = Dual::new(0.0, 0.0);
    for n in 1..N {
        acc = acc.add(pow_neg(n as f64, s));
    }
    let nf = N as f64;
    let n_pow = pow_neg(nf, s);
    // N^(1-s)/(s-1)
    let tail = n_pow.scale(nf).mul(Dual::new(s - 1.0, 1.0).recip());
    acc = acc.add(tail).add(n_pow.scale(0.5));
    // Σ B_2k/(2k)! · s(s+1)…(s+2k-2) · N^(-s-2k+1)
    let mut rising = sd;
    let mut fact = 2.0;
    let mut n_shift = n_pow.scale(1.0 / nf);
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let k1 = k + 1;
        if k1 > 1 {
            let j0 = (2 * k1 - 3) as f64;
            rising = rising.mul(Dual::new(s + j0, 1.0)).mul(Dual::new(s + j0 + 1.0, 1.0));
            fact *= ((2 * k1 - 1) * (2 * k1)) as f64;
            n_shift = n_shift.scale(1.0 / (nf * nf));
        }
        acc = acc.add(rising.mul(n_shift).scale(b / fact));
    }
    acc
}

/// Riemann ζ(s) and ζ'(s) for real `s ≠ 1`.
pub fn riemann_zeta_with_deriv(s: f64) -> Result<(f64, f64)> {
    if !s.is_finite() {
        return Err(invalid(format!("riemann_zeta: non-finite argument {s}")));
    }
    if s == 1.0 {
        return Err(Error::Domain("riemann zeta has a pole at s = 1".into()));
    }
    if s < -0.5 {
        // ζ(s) = 2^s π^(s-1) sin(πs/2) Γ(1-s) ζ(1-s), differentiated by the product rule.
        let (z1, dz1) = riemann_zeta_with_deriv(1.0 - s)?;
        let g = gamma(1.0 - s)?;
        let psi = digamma(1.0 - s)?;
        let sin = (PI * s / 2.0).sin();
        let cos = (PI * s / 2.0).cos();
        let pre = (2.0f64).powf(s) * PI.powf(s - 1.0);
        let v = pre * sin * g * z1;
        let d = pre * g * ((2.0f64.ln() + PI.ln()) * sin * z1 + 0.5 * PI * cos * z1 - psi * sin * z1 - sin * dz1);
        return Ok((v, d));
    }
    let r = zeta_euler_maclaurin(s);
    Ok((r.v, r.d))
}

/// Riemann ζ(s) for real `s ≠ 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    Ok(riemann_zeta_with_deriv(s)?.0)
}

/// Riemann ζ'(s) for real `s ≠ 1`.
pub fn riemann_zeta_deriv(s: f64) -> Result<f64> {
    Ok(riemann_zeta_with_deriv(s)?.1)
}

fn zeta_integers() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=64)
            .map(|k| {
                if k < 2 {
                    0.0
                } else {
                    riemann_zeta(k as f64).unwrap_or(1.0)
                }
            })
            .collect()
    })
}

/// `(Γ(a) - 1/a)` for `|a| ≤ 1/2`, continuous through `a = 0` where it equals `-γ`.
fn gamma_minus_pole(a: f64) -> f64 {
    // ln Γ(1+a) = -γa + Σ_{k≥2} (-1)^k ζ(k) a^k / k
    let z = zeta_integers();
    let mut lg = -EULER_GAMMA * a;
    let mut p = a;
    for (k, zk) in z.iter().enumerate().skip(2) {
        p *= a;
        let term = zk * p / k as f64;
        lg += if k % 2 == 0 { term } else { -term };
        if term.abs() < 1e-19 {
            break;
        }
    }
    if a == 0.0 {
        -EULER_GAMMA
    } else {
        lg.exp_m1() / a
    }
}

/// Upper incomplete gamma `Γ(a,x) = ∫_x^∞ t^(a-1) e^(-t) dt` for real `a` and `x > 0`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !a.is_finite() || !x.is_finite() {
        return Err(invalid(format!(
            "upper_incomplete_gamma requires x > 0, got a = {a}, x = {x}"
        )));
    }
    if x >= 1.5 && (a <= 0.0 || x >= a + 1.0) {
        return continued_fraction(a, x);
    }
    if a > 0.5 {
        if x < 1.5 {
            // forward recurrence from a0 ∈ (-1/2, 1/2]
            let m = (a - 0.5).ceil();
            let a0 = a - m;
            let mut g = small_order_series(a0, x);
            let mut ak = a0;
            for _ in 0..(m as usize) {
                g = ak * g + (ak * x.ln() - x).exp();
                ak += 1.0;
            }
            return Ok(g);
        }
        return Ok(gamma(a)? - lower_series(a, x));
    }
    if a > -0.5 {
        return Ok(small_order_series(a, x));
    }
    // backward recurrence Γ(a,x) = (Γ(a+1,x) - x^a e^(-x)) / a
    let m = (0.5 - a).floor();
    let mut ak = a + m;
    let steps = m as usize;
    let mut g = small_order_series(ak, x);
    for _ in 0..steps {
        let an = ak - 1.0;
        g = (g - (an * x.ln() - x).exp()) / an;
        ak = an;
    }
    Ok(g)
}

/// Series valid for `a ∈ (-1/2, 1/2]` and small `x`, free of cancellation near `a = 0`.
fn small_order_series(a: f64, x: f64) -> f64 {
    let lx = x.ln();
    let head = if a == 0.0 { lx } else { (a * lx).exp_m1() / a };
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 1..200 {
        term *= -x / n as f64;
        let add = term / (a + n as f64);
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    gamma_minus_pole(a) - head - (a * lx).exp() * sum
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut sum = 1.0 / a;
    let mut term = 1.0 / a;
    let mut n = 1.0;
    while n < 1000.0 {
        term *= x / (a + n);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        n += 1.0;
    }
    sum * (a * x.ln() - x).exp()
}

fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok((a * x.ln() - x).exp() * h);
        }
    }
    Err(Error::Numeric(format!(
        "incomplete gamma continued fraction did not converge (a = {a}, x = {x})"
    )))
}

/// Value of `K_s(a,b)` with a certified quadrature error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselEval {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub abs_error_bound: f64,
}

/// `K_s(a,b) = ∫₀^∞ exp(-(a²t + b²/t)) t^(s-1) dt`.
///
/// Substituting `t = (b/a) e^u` gives `(b/a)^s ∫ exp(-2ab cosh u + s u) du`, evaluated by
/// the trapezoid rule centred at the saddle point and truncated where the integrand drops
/// below `1e-18` of its peak. The step is halved until two levels agree.
pub fn incomplete_bessel(s: f64, a: f64, b: f64) -> Result<BesselEval> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() || !s.is_finite() {
        return Err(invalid(format!(
            "incomplete_bessel requires a, b > 0, got a = {a}, b = {b}"
        )));
    }
    let c = a * b;
    let u_star = (s / (2.0 * c)).asinh();
    let phi = |u: f64| -2.0 * c * u.cosh() + s * u;
    let peak = phi(u_star);
    let width = 1.0 / (2.0 * c * u_star.cosh()).sqrt();
    let cut = (1e-18f64).ln();
    let mut lo = u_star;
    while phi(lo) - peak > cut {
        lo -= width;
    }
    let mut hi = u_star;
    while phi(hi) - peak > cut {
        hi += width;
    }
    let span = hi - lo;
    let trap = |n: usize| -> f64 {
        let h = span / n as f64;
        let mut acc = 0.5 * ((phi(lo) - peak).exp() + (phi(hi) - peak).exp());
        for i in 1..n {
            acc += (phi(lo + i as f64 * h) - peak).exp();
        }
        acc * h
    };
    let mut n = ((span / width) * 2.0).ceil().max(8.0) as usize;
    let mut prev = trap(n);
    let mut diff = f64::INFINITY;
    for _ in 0..20 {
        n *= 2;
        let cur = trap(n);
        diff = (cur - prev).abs();
        prev = cur;
        if diff <= 1e-15 * cur {
            break;
        }
    }
    let log_scale = s * (b / a).ln() + peak;
    let scale = log_scale.exp();
    let truncation = 1e-18 * span;
    let rounding = 4.0 * f64::EPSILON * (1.0 + log_scale.abs() + s.abs() * u_star.abs().max(span) + n as f64 * 1e-3);
    Ok(BesselEval {
        s,
        a,
        b,
        value: scale * prev,
        abs_error_bound: scale * (diff + truncation) + rounding * scale * prev,
    })
}

/// Single-argument form `K_s(c) = K_s(√c, √c)`.
pub fn incomplete_bessel_c(s: f64, c: f64) -> Result<BesselEval> {
    if !(c > 0.0) {
        return Err(invalid(format!("incomplete_bessel_c requires c > 0, got {c}")));
    }
    let r = c.sqrt();
    incomplete_bessel(s, r, r)
}
