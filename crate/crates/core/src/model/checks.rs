use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::algebroid::{e_differential_squared, CourantGeometry, LieGeometry};
use crate::berezin::berezinian_report;
use crate::bracket::CheckReport;
use crate::structures::{LieAlgebroidData, Sampling};

use super::resolve::{CheckSpec, Model};
use super::{At, ModelError, Span};

/// A check name together with the statement it tests.
#[derive(Clone, Copy, Debug)]
pub struct CheckInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    /// What the model has to provide.
    pub needs: &'static str,
}

pub const CHECKS: [CheckInfo; 13] = [
    CheckInfo { name: "master", anchor: "classical master equation {Theta,Theta} = 0", needs: "theta with pair/metric, or poisson or courant data" },
    CheckInfo { name: "quantum-master", anchor: "quantum master equation -2 I hbar Delta S + {S,S} = 0", needs: "theta on a degree -1 chart" },
    CheckInfo { name: "poisson-jacobi", anchor: "Jacobi identity of the bivector (cyclic sum)", needs: "poisson data" },
    CheckInfo { name: "schouten", anchor: "Poisson condition [pi,pi]_S = 0", needs: "poisson data" },
    CheckInfo { name: "twisted-poisson", anchor: "twisted Poisson condition 1/2[pi,pi]_S = <(x)^3 pi, H>", needs: "twisted_poisson data" },
    CheckInfo { name: "lie-algebroid", anchor: "degree-1 Q-manifold gives a Lie algebroid", needs: "lie_algebroid or twisted_poisson data" },
    CheckInfo { name: "courant-axioms", anchor: "degree-2 QP-manifold gives a Courant algebroid", needs: "courant data" },
    CheckInfo { name: "pre-courant-jacobiator", anchor: "pre-Courant Jacobiator equals rho^* H", needs: "pre_courant data" },
    CheckInfo { name: "e-differential-squared", anchor: "E-differential squares to zero", needs: "lie_algebroid or twisted_poisson data" },
    CheckInfo { name: "basic-curvature-decomposition", anchor: "basic curvature = nabla T + alternated i_rho R", needs: "lie_algebroid data, optional connection" },
    CheckInfo { name: "bianchi", anchor: "Bianchi identity E-d S = 0 for the basic curvature", needs: "lie_algebroid data, optional connection" },
    CheckInfo { name: "twisted-courant-torsion", anchor: "E-torsion of pre-Courant data is a 3-form", needs: "courant or pre_courant data, optional metric connection" },
    CheckInfo { name: "berezinian", anchor: "Berezinian is multiplicative; block diagonal case det A / det D", needs: "a chart with odd coordinates" },
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.name)
}

fn info(name: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.name == name)
}

const PARAMS: [&str; 4] = ["trials", "seed", "degree", "terms"];

/// Rejects unknown checks, unknown parameters and checks whose data is
/// missing, pointing at the `check` line.
pub(crate) fn validate(model: &Model) -> Result<(), ModelError> {
    for spec in &model.checks {
        let span = spec.span;
        let Some(ci) = info(&spec.name) else {
            return Err(ModelError::invalid(span, format!("unknown check `{}`; see --list-checks", spec.name)));
        };
        for (k, v) in &spec.params {
            let extra = ci.name == "berezinian" && (k == "even" || k == "odd");
            if !PARAMS.contains(&k.as_str()) && !extra {
                return Err(ModelError::invalid(span, format!("check `{}` has no parameter `{k}`", ci.name)));
            }
            if *v < 0 {
                return Err(ModelError::invalid(span, format!("parameter `{k}` must be non-negative")));
            }
        }
        let ok = match ci.name {
            "master" => (model.theta.is_some() && model.symplectic.is_some()) || model.poisson.is_some() || model.courant.is_some(),
            "quantum-master" => model.theta.is_some() && model.symplectic.is_some(),
            "poisson-jacobi" | "schouten" => model.poisson.is_some(),
            "twisted-poisson" => model.twisted.is_some(),
            "lie-algebroid" | "e-differential-squared" => model.lie.is_some() || model.twisted.is_some(),
            "courant-axioms" | "twisted-courant-torsion" => model.courant.is_some(),
            "pre-courant-jacobiator" => model.pre_courant.is_some(),
            "basic-curvature-decomposition" | "bianchi" => model.lie.is_some(),
            _ => true,
        };
        if !ok {
            return Err(ModelError::invalid(span, format!("check `{}` needs {}", ci.name, ci.needs)));
        }
    }
    Ok(())
}

/// Command-line overrides; they take precedence over per-check parameters.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub parallel: bool,
}

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    pub report: CheckReport,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub model: String,
    pub model_sha256: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.report.passed())
    }
}

fn sampling(spec: &CheckSpec, opts: &RunOptions) -> Sampling {
    let d = Sampling::default();
    Sampling {
        trials: opts.trials.or(spec.param("trials").map(|v| v as usize)).unwrap_or(d.trials),
        seed: opts.seed.or(spec.param("seed").map(|v| v as u64)).unwrap_or(DEFAULT_SEED),
        max_degree: spec.param("degree").map(|v| v as u32).unwrap_or(d.max_degree),
        terms: spec.param("terms").map(|v| v as usize).unwrap_or(d.terms),
    }
}

fn lie_data(model: &Model, span: Span) -> Result<LieAlgebroidData, ModelError> {
    if let Some(l) = &model.lie {
        return Ok(l.clone());
    }
    let t = model.twisted.as_ref().expect("validated");
    t.cotangent_algebroid().at(span)
}

fn run_one(model: &Model, spec: &CheckSpec, opts: &RunOptions) -> Result<CheckReport, ModelError> {
    let span = spec.span;
    let s = sampling(spec, opts);
    let mut report = match spec.name.as_str() {
        "master" => match (&model.theta, &model.symplectic, &model.poisson, &model.courant) {
            (Some((theta, tspan)), Some(sym), _, _) => sym.master_obstruction(theta).at(*tspan)?,
            (_, _, Some(p), _) => p.master_report(),
            (_, _, _, Some(c)) => c.master_report(),
            _ => unreachable!("validated"),
        },
        "quantum-master" => {
            let (theta, tspan) = model.theta.as_ref().expect("validated");
            model.symplectic.as_ref().expect("validated").quantum_master_obstruction(theta).at(*tspan)?
        }
        "poisson-jacobi" => model.poisson.as_ref().expect("validated").jacobi_report(),
        "schouten" => model.poisson.as_ref().expect("validated").schouten_report(),
        "twisted-poisson" => model.twisted.as_ref().expect("validated").obstruction(),
        "lie-algebroid" => lie_data(model, span)?.report(),
        "courant-axioms" => model.courant.as_ref().expect("validated").axiom_report(&s),
        "pre-courant-jacobiator" => model.pre_courant.as_ref().expect("validated").report(&s),
        "e-differential-squared" => e_differential_squared(&lie_data(model, span)?, &s),
        "basic-curvature-decomposition" | "bianchi" => {
            let lie = model.lie.as_ref().expect("validated");
            let conn = model.connection_or_flat(lie.base(), lie.rank());
            let geo = LieGeometry::new(lie, &conn).at(span)?;
            if spec.name == "bianchi" {
                geo.bianchi_check()
            } else {
                geo.decomposition_check()
            }
        }
        "twisted-courant-torsion" => {
            let c = model.courant.as_ref().expect("validated");
            let conn = model.connection_or_flat(c.base(), c.rank());
            CourantGeometry::new(c, &conn).at(span)?.torsion_report(&s)
        }
        "berezinian" => {
            let m = spec.param("even").unwrap_or(1) as usize;
            let n = spec.param("odd").unwrap_or(1) as usize;
            berezinian_report(&model.chart, m, n, &s).at(span)?
        }
        other => unreachable!("unknown check {other} passed validation"),
    };
    report.name = spec.name.clone();
    Ok(report)
}

/// Runs the checks of the model in file order. With `parallel` the checks
/// run concurrently; the report order is unchanged.
pub fn run_checks(model: &Model, name: &str, opts: &RunOptions) -> Result<Report, ModelError> {
    let run = |spec: &CheckSpec| -> Result<CheckResult, ModelError> {
        let report = run_one(model, spec, opts)?;
        let anchor = info(&spec.name).map(|c| c.anchor).unwrap_or_default();
        Ok(CheckResult { name: spec.name.clone(), anchor: anchor.to_string(), report })
    };
    let checks: Result<Vec<CheckResult>, ModelError> = if opts.parallel {
        model.checks.par_iter().map(run).collect()
    } else {
        model.checks.iter().map(run).collect()
    };
    let digest = Sha256::digest(model.file.to_source().as_bytes());
    Ok(Report {
        model: name.to_string(),
        model_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        seed: opts.seed.unwrap_or(DEFAULT_SEED),
        checks: checks?,
    })
}
