//! Evaluation of an [`ExperimentConfig`] into a [`Report`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_surgery::acceptance::run_all;
use spectral_surgery::cylinder::{
    cylinder_det_bc, cylinder_det_closed, cylinder_det_direct, BoundaryCondition, CylinderModel,
};
use spectral_surgery::oned_oracle::{bfk_1d_check, gy_det, Potential, SchrodingerProblem};
use spectral_surgery::relative_det::{relative_det, small_lambda_probe, PerModeRule, RelativePair};
use spectral_surgery::report::{CheckResult, ErrorBound, Report};
use spectral_surgery::scattering::block_identity_ensemble;
use spectral_surgery::spectra::{CrossSectionSpectrum, Generator};
use spectral_surgery::surgery::{adiabatic_experiment, bfk_check, relative_det_via_gluing, Cap, SurgeryModel};
use spectral_surgery::zeta_det::{
    det_zeta, xi_prime_zero, zeta_at, zeta_closed_form, zeta_prime_zero, zeta_prime_zero_closed_form,
};
use spectral_surgery::{Error, Result};

use crate::config::*;

use BoundaryCondition::{Dirichlet, Neumann};

/// Runs the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let results = match &cfg.experiment {
        Experiment::DetCylinder(p) => det_cylinder(p)?,
        Experiment::Zeta(p) => zeta(p)?,
        Experiment::RelativeDet(p) => relative(p)?,
        Experiment::BfkCheck(p) => bfk(p)?,
        Experiment::Surgery(p) => surgery(p)?,
        Experiment::ScatteringCheck(p) => scattering(p, cfg.seed)?,
        Experiment::Oracle1d(p) => oracle_1d(p)?,
        Experiment::Acceptance(_) => acceptance(cfg.seed),
    };
    Ok(Report {
        command: cfg.experiment.name().into(),
        config: serde_json::to_value(cfg).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        results,
        seed: cfg.seed,
    })
}

fn certified(v: f64) -> ErrorBound {
    ErrorBound::certified(v)
}

/// `n` for a shifted or unshifted point spectrum.
fn point_modes(spec: &CrossSectionSpectrum) -> Option<u64> {
    match spec.generator() {
        Generator::Point { n } => Some(*n),
        _ => None,
    }
}

fn det_cylinder(p: &DetCylinderParams) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let value = if (p.left, p.right) == (Dirichlet, Dirichlet) {
        let m = CylinderModel::new(p.spectrum.clone(), p.length)?;
        let closed = cylinder_det_closed(&m)?;
        let direct = cylinder_det_direct(&m)?;
        out.push(CheckResult::value(
            "closed form",
            closed.value,
            certified(closed.rel_error * closed.value),
        ));
        out.push(CheckResult::value(
            "direct",
            direct.det.value,
            certified(direct.det.rel_error * direct.det.value),
        ));
        out.push(CheckResult::relative(
            "closed form vs direct",
            closed.value,
            certified((closed.rel_error + direct.det.rel_error) * closed.value),
            direct.det.value,
            p.tolerance,
        ));
        closed
    } else {
        let d = cylinder_det_bc(&p.spectrum, p.length, p.left, p.right)?;
        out.push(CheckResult::value(
            "closed form",
            d.value,
            certified(d.rel_error * d.value),
        ));
        d
    };
    let z = p.spectrum.shift();
    let kernel = (p.left, p.right) == (Neumann, Neumann) && z == 0.0;
    if let (Some(n), false) = (point_modes(&p.spectrum), kernel) {
        let prob = SchrodingerProblem::new(Potential::Constant { value: 0.0 }, 0.0, p.length, p.left, p.right, z)?;
        let g = gy_det(&prob)?;
        let expected = g.value.powi(n as i32);
        out.push(CheckResult::relative(
            "closed form vs 1D oracle",
            value.value,
            certified(value.rel_error * value.value + n as f64 * g.error / g.value * expected),
            expected,
            p.tolerance,
        ));
    }
    Ok(out)
}

fn zeta(p: &ZetaParams) -> Result<Vec<CheckResult>> {
    let y = &p.spectrum;
    let mut out = Vec::new();
    let z0 = zeta_at(y, 0.0)?;
    let dz0 = zeta_prime_zero(y)?;
    let det = det_zeta(y)?;
    let xi = xi_prime_zero(y)?;
    out.push(CheckResult::value("zeta_Y(0)", z0.value, certified(z0.error)));
    out.push(CheckResult::value("zeta_Y'(0)", dz0.value, certified(dz0.error)));
    out.push(CheckResult::value("det Delta_Y", det.value, certified(det.error)));
    out.push(CheckResult::value("xi_Y'(0)", xi.value, certified(xi.error)));
    if let Ok(cf) = zeta_prime_zero_closed_form(y) {
        out.push(CheckResult::absolute(
            "zeta_Y'(0) vs closed form",
            dz0.value,
            certified(dz0.error),
            cf.value,
            p.tolerance,
        ));
    }
    for &s in &p.s {
        let v = zeta_at(y, s)?;
        out.push(CheckResult::value(format!("zeta_Y({s})"), v.value, certified(v.error)));
        if let Ok(cf) = zeta_closed_form(y, s) {
            out.push(CheckResult::relative(
                format!("zeta_Y({s}) vs closed form"),
                v.value,
                certified(v.error + cf.error),
                cf.value,
                p.tolerance,
            ));
        }
    }
    Ok(out)
}

fn relative(p: &RelativeDetParams) -> Result<Vec<CheckResult>> {
    let pair = RelativePair::new(p.spectrum.clone(), p.rule)?;
    let d = relative_det(&pair)?;
    let mut out = vec![CheckResult::value("det(H, H0)", d.value, certified(d.error * d.value))];
    let cap = match p.rule {
        PerModeRule::Translate { a } if a > 0.0 => Some(Cap::new(a, Dirichlet)?),
        PerModeRule::NeumannCap { a } if a > 0.0 => Some(Cap::new(a, Neumann)?),
        _ => None,
    };
    if let Some(cap) = cap {
        let g = relative_det_via_gluing(&SurgeryModel::new(p.spectrum.clone(), cap, None, 1.0, 0.0)?)?;
        out.push(CheckResult::relative(
            "relative zeta vs gluing",
            d.value,
            certified(d.error * d.value + g.error * g.value),
            g.value,
            p.tolerance,
        ));
    }
    if p.rule == PerModeRule::Identical {
        out.push(CheckResult::relative(
            "identical pair",
            d.value,
            certified(d.error * d.value),
            1.0,
            p.tolerance,
        ));
    }
    if p.probe {
        let fit = small_lambda_probe(&pair, &spectral_surgery::dtn::SMALL_LAMBDA_GRID)?;
        out.push(CheckResult::absolute(
            "small-lambda exponent vs b0",
            fit.slope,
            ErrorBound::heuristic(),
            pair.b0(),
            p.probe_tolerance,
        ));
    }
    Ok(out)
}

fn bfk(p: &BfkCheckParams) -> Result<Vec<CheckResult>> {
    p.model.validate()?;
    if p.z.is_empty() {
        return Err(Error::InvalidArgument("bfk-check needs at least one z".into()));
    }
    let mut out = Vec::new();
    for &z in &p.z {
        let b = bfk_check(&p.model, z)?;
        out.push(CheckResult::value(
            format!("z = {z}: lhs"),
            b.lhs,
            ErrorBound::heuristic(),
        ));
        out.push(CheckResult::value(
            format!("z = {z}: rhs"),
            b.rhs,
            ErrorBound::heuristic(),
        ));
        out.push(CheckResult::relative(
            format!("z = {z}: lhs/rhs"),
            b.ratio,
            certified(b.error),
            1.0,
            p.tolerance,
        ));
    }
    Ok(out)
}

fn surgery(p: &SurgeryParams) -> Result<Vec<CheckResult>> {
    p.model.validate()?;
    let rep = adiabatic_experiment(p.law, &p.model, &p.grid)?;
    let mut out: Vec<CheckResult> = rep
        .grid
        .iter()
        .zip(&rep.values)
        .map(|(r, v)| CheckResult::value(format!("r = {r}"), *v, ErrorBound::heuristic()))
        .collect();
    out.push(CheckResult::relative(
        "limit vs prediction",
        rep.limit_estimate,
        ErrorBound::heuristic(),
        rep.predicted,
        p.tolerance.unwrap_or(rep.tolerance),
    ));
    out.push(CheckResult::flag("deviation decreases along the grid", rep.monotone));
    Ok(out)
}

fn scattering(p: &ScatteringCheckParams, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = block_identity_ensemble(&mut rng, p.trials, p.max_dim)?;
    Ok(vec![
        CheckResult::absolute(
            "max |det S - det((Id - C12)/2)|",
            e.max_deviation,
            ErrorBound::heuristic(),
            0.0,
            p.tolerance,
        ),
        CheckResult::value(
            "pairs with nontrivial intersections",
            e.with_intersection as f64,
            certified(0.0),
        ),
        CheckResult::flag(
            "det((Id - C12)/2) in [0, 1]",
            e.min_det >= -1e-12 && e.max_det <= 1.0 + 1e-12,
        ),
    ])
}

fn oracle_1d(p: &Oracle1dParams) -> Result<Vec<CheckResult>> {
    p.problem.validate()?;
    let prob = &p.problem;
    let g = gy_det(prob)?;
    let mut out = vec![CheckResult::value("det", g.value, certified(g.error))];
    if let (Potential::Constant { value }, Dirichlet, Dirichlet) = (&prob.potential, prob.left, prob.right) {
        let m2 = value + prob.shift;
        let l = prob.b - prob.a;
        if m2 >= 0.0 {
            let m = m2.sqrt();
            let exact = if m == 0.0 { 2.0 * l } else { 2.0 * (m * l).sinh() / m };
            out.push(CheckResult::relative(
                "det vs 2 sinh(mL)/m",
                g.value,
                certified(g.error),
                exact,
                p.tolerance,
            ));
        }
    }
    if !p.cuts.is_empty() {
        let c = bfk_1d_check(prob, &p.cuts)?;
        out.push(CheckResult::relative(
            "gluing constant",
            c.constant,
            certified(c.error),
            c.expected_constant,
            p.tolerance,
        ));
    }
    Ok(out)
}

fn acceptance(seed: u64) -> Vec<CheckResult> {
    run_all(seed)
        .into_iter()
        .flat_map(|c| {
            let id = c.id;
            c.checks.into_iter().map(move |mut r| {
                r.name = format!("[{id}] {}", r.name);
                r
            })
        })
        .collect()
}
