//! Dirichlet-to-Neumann operators of product models, diagonal in the eigenbasis of
//! `Δ_Y`: caps `[0, a] × Y` with an outer condition, the half-cylinder operator
//! `√Δ_Y`, the two-boundary neck operator `R_r = R_∞ + K_r` and the single-boundary
//! correction `L_r`.
//!
//! Determinants are zeta-regularized by factoring over the asymptote `c·√Δ_Y` of
//! each boundary copy: `det_ζ(c√Δ_Y) = c^ζ_Y(0) (det Δ_Y)^(1/2)`, times the absolutely
//! convergent product of `det(block(μ)) / Π c_i √μ` over the positive modes and the
//! determinant of the zero-mode block on `ker Δ_Y`.

use nalgebra::{Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cylinder::BoundaryCondition;
use crate::error::{invalid, Error, Result};
use crate::extrapolate::{linear_fit, richardson};
use crate::spectra::{shift_spectrum, CrossSectionSpectrum};
use crate::zeta_det::{log_det_zeta, zeta_at};

/// One summand of a mode symbol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolTerm {
    /// `√μ`: the half-cylinder operator.
    SqrtLaplacian,
    /// Cap `[0, a]` with Dirichlet outer condition: `√μ coth(a√μ)`, `1/a` on the kernel.
    CapDirichlet { a: f64 },
    /// Cap `[0, a]` with Neumann outer condition: `√μ tanh(a√μ)`, `0` on the kernel.
    CapNeumann { a: f64 },
    /// `L_r`: `√μ e^(-r√μ) / sinh(r√μ)`, `1/r` on the kernel.
    NeckCorrection { r: f64 },
}

impl SymbolTerm {
    /// Coefficient `c` of the asymptote `c√μ`.
    fn leading(&self) -> f64 {
        match self {
            SymbolTerm::NeckCorrection { .. } => 0.0,
            _ => 1.0,
        }
    }

    /// `(value - leading·√μ)/√μ` for `μ > 0`.
    fn deviation(&self, sq: f64) -> f64 {
        match *self {
            SymbolTerm::SqrtLaplacian => 0.0,
            SymbolTerm::CapDirichlet { a } => 2.0 / (2.0 * a * sq).exp_m1(),
            SymbolTerm::CapNeumann { a } => -2.0 / ((2.0 * a * sq).exp() + 1.0),
            SymbolTerm::NeckCorrection { r } => 2.0 / (2.0 * r * sq).exp_m1(),
        }
    }

    fn zero_value(&self) -> f64 {
        match *self {
            SymbolTerm::SqrtLaplacian | SymbolTerm::CapNeumann { .. } => 0.0,
            SymbolTerm::CapDirichlet { a } => 1.0 / a,
            SymbolTerm::NeckCorrection { r } => 1.0 / r,
        }
    }

    fn decay_length(&self) -> f64 {
        match *self {
            SymbolTerm::SqrtLaplacian => f64::INFINITY,
            SymbolTerm::CapDirichlet { a } | SymbolTerm::CapNeumann { a } => a,
            SymbolTerm::NeckCorrection { r } => r,
        }
    }

    fn validate(&self) -> Result<()> {
        let l = self.decay_length();
        if l.is_infinite() || (l > 0.0 && l.is_finite()) {
            Ok(())
        } else {
            Err(invalid(format!("symbol lengths must be positive, got {l}")))
        }
    }
}

fn sum_value(terms: &[SymbolTerm], mu: f64) -> f64 {
    if mu == 0.0 {
        return terms.iter().map(SymbolTerm::zero_value).sum();
    }
    let sq = mu.sqrt();
    sq * terms.iter().map(|t| t.leading() + t.deviation(sq)).sum::<f64>()
}

fn leading(terms: &[SymbolTerm]) -> f64 {
    terms.iter().map(SymbolTerm::leading).sum()
}

fn deviation(terms: &[SymbolTerm], sq: f64) -> f64 {
    terms.iter().map(|t| t.deviation(sq)).sum()
}

/// Operator acting on the `μ`-eigenspace of `Δ_Y` by a scalar `symbol(μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeOperator {
    spectrum: CrossSectionSpectrum,
    terms: Vec<SymbolTerm>,
}

impl ModeOperator {
    pub fn new(spectrum: CrossSectionSpectrum, terms: Vec<SymbolTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("a mode operator needs at least one symbol term"));
        }
        for t in &terms {
            t.validate()?;
        }
        Ok(Self { spectrum, terms })
    }

    pub fn spectrum(&self) -> &CrossSectionSpectrum {
        &self.spectrum
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    /// Value on the `μ`-eigenspace; `μ = 0` gives the kernel value.
    pub fn symbol(&self, mu: f64) -> f64 {
        sum_value(&self.terms, mu)
    }

    pub fn zero_mode_value(&self) -> f64 {
        self.symbol(0.0)
    }

    /// Sum of the symbol terms of both operators.
    pub fn plus(&self, other: &ModeOperator) -> Result<ModeOperator> {
        if self.spectrum != other.spectrum {
            return Err(invalid("mode operators live on different spectra"));
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ModeOperator::new(self.spectrum.clone(), terms)
    }

    /// Same symbol over the spectrum shifted by `lambda`.
    pub fn shifted(&self, lambda: f64) -> Result<ModeOperator> {
        ModeOperator::new(shift_spectrum(&self.spectrum, lambda)?, self.terms.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "spectrum": self.spectrum.to_json(),
            "symbol": self.terms,
            "zero_block": [[self.zero_mode_value()]],
        })
    }
}

/// Operator on `L²(Y) ⊕ L²(Y)` acting on each eigenspace by a symmetric 2×2 block:
/// `diag(d_1(μ), d_2(μ))` plus, when `coupling = Some(r)`, the neck term `K_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockModeOperator {
    spectrum: CrossSectionSpectrum,
    diag: [Vec<SymbolTerm>; 2],
    coupling: Option<f64>,
}

impl BlockModeOperator {
    pub fn spectrum(&self) -> &CrossSectionSpectrum {
        &self.spectrum
    }

    pub fn coupling(&self) -> Option<f64> {
        self.coupling
    }

    /// `K_r` on the `μ`-eigenspace: `√μ (coth(2√μ r) - 1)` on the diagonal and
    /// `-√μ / sinh(2√μ r)` off it; `(1/2r)(1, -1; -1, 1)` on the kernel.
    pub fn coupling_block(&self, mu: f64) -> Matrix2<f64> {
        match self.coupling {
            None => Matrix2::zeros(),
            Some(r) => {
                let (d, o) = coupling_entries(mu, r);
                Matrix2::new(d, o, o, d)
            }
        }
    }

    /// Full block on the `μ`-eigenspace; `μ = 0` gives the kernel block.
    pub fn block(&self, mu: f64) -> Matrix2<f64> {
        let d1 = sum_value(&self.diag[0], mu);
        let d2 = sum_value(&self.diag[1], mu);
        Matrix2::new(d1, 0.0, 0.0, d2) + self.coupling_block(mu)
    }

    pub fn zero_block(&self) -> Matrix2<f64> {
        self.block(0.0)
    }

    /// `‖K_r‖₁ = Σ mult·(|k11| + 2|k12| + |k22|)` including the kernel block.
    pub fn coupling_trace_norm(&self) -> f64 {
        let Some(r) = self.coupling else { return 0.0 };
        let mut total = self.spectrum.h_y() as f64 * 4.0 / (2.0 * r);
        for (mu, m) in self.spectrum.positive_modes_up_to(window(r, 80.0)) {
            let (d, o) = coupling_entries(mu, r);
            total += m as f64 * (2.0 * d.abs() + 2.0 * o.abs());
        }
        total
    }

    /// Same blocks over the spectrum shifted by `lambda`.
    pub fn shifted(&self, lambda: f64) -> Result<BlockModeOperator> {
        Ok(BlockModeOperator {
            spectrum: shift_spectrum(&self.spectrum, lambda)?,
            diag: self.diag.clone(),
            coupling: self.coupling,
        })
    }

    pub fn to_json(&self) -> Value {
        let z = self.zero_block();
        json!({
            "spectrum": self.spectrum.to_json(),
            "symbol": {"diag": [self.diag[0], self.diag[1]], "coupling_r": self.coupling},
            "zero_block": [[z[(0, 0)], z[(0, 1)]], [z[(1, 0)], z[(1, 1)]]],
        })
    }

    fn decay_length(&self) -> f64 {
        let mut l = self.coupling.map_or(f64::INFINITY, |r| 2.0 * r);
        for t in self.diag.iter().flatten() {
            l = l.min(t.decay_length());
        }
        l
    }
}

fn coupling_entries(mu: f64, r: f64) -> (f64, f64) {
    if mu == 0.0 {
        return (0.5 / r, -0.5 / r);
    }
    let sq = mu.sqrt();
    let x = 2.0 * sq * r;
    let d = sq * 2.0 / (2.0 * x).exp_m1();
    let o = -sq * 2.0 * (-x).exp() / (-(-2.0 * x).exp_m1());
    (d, o)
}

fn window(length: f64, decay: f64) -> f64 {
    (decay / (2.0 * length)).powi(2)
}

/// Dirichlet-to-Neumann operator of a cap `[0, a] × Y` with the given outer condition.
pub fn cap_dtn(a: f64, outer: BoundaryCondition, spec: &CrossSectionSpectrum) -> Result<ModeOperator> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid(format!("cap length must be positive, got {a}")));
    }
    let t = match outer {
        BoundaryCondition::Dirichlet => SymbolTerm::CapDirichlet { a },
        BoundaryCondition::Neumann => SymbolTerm::CapNeumann { a },
    };
    ModeOperator::new(spec.clone(), vec![t])
}

/// `√Δ_Y`, the Dirichlet-to-Neumann operator of the half-cylinder.
pub fn half_cylinder_dtn(spec: &CrossSectionSpectrum) -> Result<ModeOperator> {
    ModeOperator::new(spec.clone(), vec![SymbolTerm::SqrtLaplacian])
}

/// `R_∞ = cap + √Δ_Y` for a single boundary.
pub fn r_infinity(cap: &ModeOperator) -> Result<ModeOperator> {
    cap.plus(&half_cylinder_dtn(cap.spectrum())?)
}

/// `R_∞ = diag(cap_1 + √Δ_Y, cap_2 + √Δ_Y)`.
pub fn assemble_r_infinity(cap1: &ModeOperator, cap2: &ModeOperator) -> Result<BlockModeOperator> {
    if cap1.spectrum() != cap2.spectrum() {
        return Err(invalid("caps live on different spectra"));
    }
    let d1 = r_infinity(cap1)?.terms;
    let d2 = r_infinity(cap2)?.terms;
    Ok(BlockModeOperator {
        spectrum: cap1.spectrum.clone(),
        diag: [d1, d2],
        coupling: None,
    })
}

/// `R_r = R_∞ + K_r` for the neck `[-r, r] × Y`.
pub fn assemble_r_r(r_inf: &BlockModeOperator, r: f64) -> Result<BlockModeOperator> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid(format!("neck half-length must be positive, got {r}")));
    }
    Ok(BlockModeOperator {
        coupling: Some(r),
        ..r_inf.clone()
    })
}

/// `L_r = (P₀/r + f_r(Δ_Y) P₀^⊥) e^(-r√Δ_Y)` with `f_r(x) = √x / sinh(r√x)`.
pub fn assemble_l_r(spec: &CrossSectionSpectrum, r: f64) -> Result<ModeOperator> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid(format!("length must be positive, got {r}")));
    }
    ModeOperator::new(spec.clone(), vec![SymbolTerm::NeckCorrection { r }])
}

/// A zeta-regularized determinant with its kernel removed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtnDet {
    pub value: f64,
    pub log_value: f64,
    /// Absolute error of `log_value`.
    pub error: f64,
    /// Dimension of the removed kernel.
    pub kernel_dim: u64,
}

struct Base {
    zeta0: f64,
    log_det: f64,
    error: f64,
}

fn base(spec: &CrossSectionSpectrum) -> Result<Base> {
    let z = zeta_at(spec, 0.0)?;
    let d = log_det_zeta(spec)?;
    Ok(Base {
        zeta0: z.value,
        log_det: d.value,
        error: z.error + d.error,
    })
}

const KERNEL_TOL: f64 = 1e-12;

/// `det'` of a scalar mode operator.
pub fn det_zeta_mode(op: &ModeOperator) -> Result<DtnDet> {
    let c = leading(&op.terms);
    if c == 0.0 {
        return Err(Error::UnsupportedModel(
            "a symbol without a √μ asymptote is not zeta-regularized here".into(),
        ));
    }
    let spec = &op.spectrum;
    let b = base(spec)?;
    let length = op
        .terms
        .iter()
        .map(SymbolTerm::decay_length)
        .fold(f64::INFINITY, f64::min);
    let prod = |max: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (mu, m) in spec.positive_modes_up_to(max) {
            let sq = mu.sqrt();
            let x = deviation(&op.terms, sq) / c;
            if !(1.0 + x > 0.0) {
                return Err(Error::SingularOperator(format!(
                    "mode μ = {mu} has symbol {}",
                    op.symbol(mu)
                )));
            }
            acc += m as f64 * x.ln_1p();
        }
        Ok(acc)
    };
    let (inner, outer) = if length.is_infinite() {
        (0.0, 0.0)
    } else {
        (prod(window(length, 48.0))?, prod(window(length, 80.0))?)
    };
    let h = spec.h_y();
    let z = op.zero_mode_value();
    let (kernel_dim, log_zero) = if h == 0 {
        (0, 0.0)
    } else if z.abs() <= KERNEL_TOL * (1.0 + c) {
        (h, 0.0)
    } else if z > 0.0 {
        (0, h as f64 * z.ln())
    } else {
        return Err(Error::SingularOperator(format!("kernel mode has value {z}")));
    };
    let log = b.zeta0 * c.ln() + 0.5 * b.log_det + outer + log_zero;
    let error = b.error * (c.ln().abs() + 0.5) + (outer - inner).abs() + 1e-15 * log.abs();
    Ok(DtnDet {
        value: log.exp(),
        log_value: log,
        error,
        kernel_dim,
    })
}

/// Eigen-decomposition of the kernel block of a block operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSplit {
    /// The 2×2 block acting on each copy of `ker Δ_Y`.
    pub zero_block: [[f64; 2]; 2],
    /// Eigenvalues in ascending order.
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors (columns match `eigenvalues`).
    pub eigenvectors: [[f64; 2]; 2],
    /// Number of zero eigenvalues of the block (0, 1 or 2).
    pub block_kernel: usize,
    /// `block_kernel · h_Y`.
    pub kernel_dim: u64,
    /// Log of the product of the nonzero eigenvalues, raised to `h_Y`.
    pub log_det_restricted: f64,
}

/// Splits the kernel block of `op`, identifying the kernel of `R_r` on `ker Δ_Y ⊕ ker Δ_Y`.
pub fn kernel_split(op: &BlockModeOperator) -> Result<KernelSplit> {
    let z = op.zero_block();
    let eig = SymmetricEigen::new(z);
    let mut idx = [0usize, 1];
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let ev = [eig.eigenvalues[idx[0]], eig.eigenvalues[idx[1]]];
    let scale = z.abs().max().max(1e-300);
    let mut block_kernel = 0;
    let mut log = 0.0;
    for &e in &ev {
        if e.abs() <= KERNEL_TOL * scale {
            block_kernel += 1;
        } else if e > 0.0 {
            log += e.ln();
        } else {
            return Err(Error::SingularOperator(format!("kernel block has eigenvalue {e}")));
        }
    }
    let h = op.spectrum.h_y();
    let col = |k: usize| [eig.eigenvectors[(0, idx[k])], eig.eigenvectors[(1, idx[k])]];
    let (c0, c1) = (col(0), col(1));
    Ok(KernelSplit {
        zero_block: [[z[(0, 0)], z[(0, 1)]], [z[(1, 0)], z[(1, 1)]]],
        eigenvalues: ev,
        eigenvectors: [[c0[0], c1[0]], [c0[1], c1[1]]],
        block_kernel,
        kernel_dim: block_kernel as u64 * h,
        log_det_restricted: h as f64 * log,
    })
}

/// `det'` of a block operator.
pub fn det_zeta_block(op: &BlockModeOperator) -> Result<DtnDet> {
    let c1 = leading(&op.diag[0]);
    let c2 = leading(&op.diag[1]);
    if c1 == 0.0 || c2 == 0.0 {
        return Err(Error::UnsupportedModel(
            "a block without a √μ asymptote is not zeta-regularized here".into(),
        ));
    }
    let spec = &op.spectrum;
    let b = base(spec)?;
    let length = op.decay_length();
    let prod = |max: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (mu, m) in spec.positive_modes_up_to(max) {
            let sq = mu.sqrt();
            let (kd, ko) = match op.coupling {
                Some(r) => {
                    let (d, o) = coupling_entries(mu, r);
                    (d / sq, o / sq)
                }
                None => (0.0, 0.0),
            };
            let e1 = (deviation(&op.diag[0], sq) + kd) / c1;
            let e2 = (deviation(&op.diag[1], sq) + kd) / c2;
            let x = e1 + e2 + e1 * e2 - ko * ko / (c1 * c2);
            let t1 = 1.0 + e1;
            if !(1.0 + x > 0.0) || !(t1 > 0.0) {
                return Err(Error::SingularOperator(format!(
                    "mode μ = {mu} is not positive definite"
                )));
            }
            acc += m as f64 * x.ln_1p();
        }
        Ok(acc)
    };
    let (inner, outer) = if length.is_infinite() {
        (0.0, 0.0)
    } else {
        (prod(window(length, 48.0))?, prod(window(length, 80.0))?)
    };
    let split = if spec.h_y() > 0 { Some(kernel_split(op)?) } else { None };
    let (kernel_dim, log_zero) = split.map_or((0, 0.0), |s| (s.kernel_dim, s.log_det_restricted));
    let log = b.zeta0 * (c1 * c2).ln() + b.log_det + outer + log_zero;
    let error = b.error * ((c1 * c2).ln().abs() + 1.0) + (outer - inner).abs() + 1e-15 * log.abs();
    Ok(DtnDet {
        value: log.exp(),
        log_value: log,
        error,
        kernel_dim,
    })
}

/// `det'` of a block operator with the first `split` positive-mode levels
/// multiplied out exactly instead of through the `c√Δ_Y` base.
pub fn det_zeta_block_refactored(op: &BlockModeOperator, split: usize) -> Result<DtnDet> {
    let full = det_zeta_block(op)?;
    let spec = &op.spectrum;
    let c1 = leading(&op.diag[0]);
    let c2 = leading(&op.diag[1]);
    let length = op.decay_length();
    let max = if length.is_finite() {
        window(length, 80.0)
    } else {
        spec.cutoff()
    };
    let modes = spec.positive_modes_up_to(max);
    let moved: Vec<_> = modes.into_iter().take(split).collect();
    let count: f64 = moved.iter().map(|m| m.1 as f64).sum();
    let log_mu: f64 = moved.iter().map(|(mu, m)| *m as f64 * mu.ln()).sum();
    let direct: f64 = moved
        .iter()
        .map(|(mu, m)| *m as f64 * op.block(*mu).determinant().ln())
        .sum();
    let fredholm: f64 = moved
        .iter()
        .map(|(mu, m)| *m as f64 * (op.block(*mu).determinant() / (c1 * c2 * mu)).ln())
        .sum();
    // base over the remaining modes: ζ(0) and log det lose the moved levels
    let log = full.log_value - ((c1 * c2).ln() * count + log_mu + fredholm) + direct;
    Ok(DtnDet {
        value: log.exp(),
        log_value: log,
        ..full
    })
}

/// Fitted small-`λ` behaviour of `log det R(λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallLambdaFit {
    pub grid: Vec<f64>,
    pub log_values: Vec<f64>,
    /// Least-squares slope of `log det` against `log λ`.
    pub slope: f64,
    /// Slope rounded to the nearest half-integer.
    pub exponent: f64,
    /// Extrapolated `lim (log det(λ) - exponent·log λ)`.
    pub constant: f64,
    pub constant_error: f64,
}

/// Fit of `log det` values on a geometric `λ` grid: slope, half-integer exponent and the
/// constant extrapolated in `√λ`.
pub fn fit_small_lambda(grid: &[f64], log_values: &[f64]) -> Result<SmallLambdaFit> {
    if grid.len() < 4 || grid.len() != log_values.len() {
        return Err(invalid("small-λ fits need at least four grid points"));
    }
    if grid.iter().any(|l| !(*l > 0.0)) || grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("small-λ grid must be positive and strictly decreasing"));
    }
    let ratio = grid[0] / grid[1];
    if grid.windows(2).any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9) {
        return Err(invalid("small-λ grid must be geometric"));
    }
    let lx: Vec<f64> = grid.iter().map(|l| l.ln()).collect();
    let (slope, _) = linear_fit(&lx, log_values)?;
    let exponent = (2.0 * slope).round() / 2.0;
    let rest: Vec<f64> = lx.iter().zip(log_values).map(|(x, y)| y - exponent * x).collect();
    let (constant, constant_error) = richardson(&rest, ratio.sqrt(), 1.0)?;
    Ok(SmallLambdaFit {
        grid: grid.to_vec(),
        log_values: log_values.to_vec(),
        slope,
        exponent,
        constant,
        constant_error,
    })
}

/// Default grid for small-`λ` probes.
pub const SMALL_LAMBDA_GRID: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

/// `log det R(λ)` for `R = cap + √Δ_Y` on the grid, with fitted exponent and constant.
pub fn detr_small_lambda_probe(cap: &ModeOperator, grid: &[f64]) -> Result<SmallLambdaFit> {
    let r = r_infinity(cap)?;
    let mut values = Vec::with_capacity(grid.len());
    for &l in grid {
        values.push(det_zeta_mode(&r.shifted(l)?)?.log_value);
    }
    fit_small_lambda(grid, &values)
}
