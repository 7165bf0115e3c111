//! Scanning parametrized families for structures that satisfy the
//! quasi contact condition without being contact metric.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{cosymplectic_flat, darboux_phi_rotation, expr_mat_mul, standard_darboux, symmetrize_upper};
use crate::classify::{evaluate, CheckStatus, ConditionId};
use crate::error::{Error, Result};
use crate::expr::CoordExpr;
use crate::kernel::{MetricFieldExpr, OneFormFieldExpr, Tensor11FieldExpr, VectorFieldExpr};
use crate::residual::TolerancePolicy;
use crate::sampling::{DomainBox, SamplingPlan};
use crate::structure::AcmStructure;

/// Samples with an axiom residual above this are rejected.
pub const AXIOM_ACCEPT: f64 = 1e-6;
/// A candidate has quasi contact residual below this ...
pub const WITNESS_QUASI_MAX: f64 = 1e-6;
/// ... and contact residual above this.
pub const WITNESS_CONTACT_MIN: f64 = 1e-3;
/// In dimension 3, quasi contact below [`WITNESS_QUASI_MAX`] must come with
/// contact residual below this.
pub const DIM3_CONTACT_MAX: f64 = 1e-5;
/// Witnesses are re-checked with this many times more points and vectors.
pub const CONFIRM_FACTOR: usize = 10;

/// Structure fields whose expressions may reference family parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyTemplate {
    pub coords: Vec<String>,
    pub phi: Tensor11FieldExpr,
    pub xi: VectorFieldExpr,
    pub eta: OneFormFieldExpr,
    pub g: MetricFieldExpr,
    pub domain: DomainBox,
}

impl FamilyTemplate {
    pub fn from_structure(s: &AcmStructure) -> Self {
        Self {
            coords: s.coords.clone(),
            phi: s.phi.clone(),
            xi: s.xi.clone(),
            eta: s.eta.clone(),
            g: s.g.clone(),
            domain: s.domain.clone(),
        }
    }

    /// Substitute parameter values; constant subexpressions fold.
    pub fn instantiate(&self, name: &str, values: &[f64]) -> Result<AcmStructure> {
        let sub1 = |v: &[CoordExpr]| v.iter().map(|e| e.substitute_params(values)).collect::<Result<Vec<_>>>();
        let sub2 = |m: &[Vec<CoordExpr>]| m.iter().map(|r| sub1(r)).collect::<Result<Vec<_>>>();
        AcmStructure::new(
            name,
            self.coords.clone(),
            Tensor11FieldExpr(sub2(&self.phi.0)?),
            VectorFieldExpr(sub1(&self.xi.0)?),
            OneFormFieldExpr(sub1(&self.eta.0)?),
            MetricFieldExpr(sub2(&self.g.0)?),
            self.domain.clone(),
        )
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSampler {
    /// `per_axis` evenly spaced values per parameter, endpoints included.
    Grid { per_axis: usize },
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub name: String,
    pub template: FamilyTemplate,
    pub params: Vec<ParamRange>,
    pub sampler: ParamSampler,
    /// Per-sample plan for the residuals.
    pub plan: SamplingPlan,
}

/// Default per-sample plan for family scans.
pub fn scan_plan() -> SamplingPlan {
    SamplingPlan::new(20, 4, 0)
}

impl FamilySpec {
    pub fn parameter_values(&self) -> Vec<Vec<f64>> {
        match self.sampler {
            ParamSampler::Grid { per_axis } => {
                let axis = |r: &ParamRange| -> Vec<f64> {
                    if per_axis <= 1 {
                        vec![r.lo]
                    } else {
                        (0..per_axis).map(|i| r.lo + (r.hi - r.lo) * i as f64 / (per_axis - 1) as f64).collect()
                    }
                };
                self.params.iter().fold(vec![Vec::new()], |acc, r| {
                    acc.iter()
                        .flat_map(|prefix| {
                            axis(r).into_iter().map(move |v| {
                                let mut p = prefix.clone();
                                p.push(v);
                                p
                            })
                        })
                        .collect()
                })
            }
            ParamSampler::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| {
                        self.params.iter().map(|r| if r.hi > r.lo { rng.gen_range(r.lo..=r.hi) } else { r.lo }).collect()
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub params: Vec<f64>,
    pub axiom_residual: f64,
    pub quasi_residual: f64,
    pub contact_residual: f64,
    pub accepted: bool,
    /// Why the structure could not be evaluated, if it could not.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub params: Vec<f64>,
    pub quasi_residual: f64,
    pub contact_residual: f64,
    /// Residuals under the denser plan.
    pub confirmed_quasi: f64,
    pub confirmed_contact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub family: String,
    pub samples: Vec<SampleOutcome>,
    pub rejected: usize,
    /// Candidates that did not survive the denser re-check.
    pub unconfirmed: usize,
    pub witnesses: Vec<Witness>,
    pub summary: String,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

fn evaluate_sample(f: &FamilySpec, values: &[f64], plan: &SamplingPlan) -> SampleOutcome {
    let policy = TolerancePolicy::default();
    let result = f.template.instantiate(&f.name, values).and_then(|s| evaluate(&s, plan));
    match result {
        Ok(ev) => {
            let axiom = ev.condition(ConditionId::Axioms, &policy).residual;
            SampleOutcome {
                params: values.to_vec(),
                axiom_residual: axiom,
                quasi_residual: ev.condition(ConditionId::QuasiContactC1, &policy).residual,
                contact_residual: ev.condition(ConditionId::ContactMetric, &policy).residual,
                accepted: axiom <= AXIOM_ACCEPT,
                error: None,
            }
        }
        Err(e) => SampleOutcome {
            params: values.to_vec(),
            axiom_residual: f64::INFINITY,
            quasi_residual: f64::NAN,
            contact_residual: f64::NAN,
            accepted: false,
            error: Some(e.to_string()),
        },
    }
}

fn is_candidate(s: &SampleOutcome) -> bool {
    s.accepted && s.quasi_residual < WITNESS_QUASI_MAX && s.contact_residual > WITNESS_CONTACT_MIN
}

/// Evaluate every sampled member; a witness must be a candidate under both
/// the family's plan and a plan [`CONFIRM_FACTOR`] times denser.
pub fn scan_family(f: &FamilySpec) -> Result<SearchOutcome> {
    let samples: Vec<SampleOutcome> = f.parameter_values().iter().map(|v| evaluate_sample(f, v, &f.plan)).collect();
    let rejected = samples.iter().filter(|s| !s.accepted).count();
    if 2 * rejected > samples.len() {
        return Err(Error::FamilyDegenerate { rejected, total: samples.len() });
    }
    let dense = f.plan.denser(CONFIRM_FACTOR);
    let mut witnesses = Vec::new();
    let mut unconfirmed = 0;
    for s in samples.iter().filter(|s| is_candidate(s)) {
        let again = evaluate_sample(f, &s.params, &dense);
        if is_candidate(&again) {
            witnesses.push(Witness {
                params: s.params.clone(),
                quasi_residual: s.quasi_residual,
                contact_residual: s.contact_residual,
                confirmed_quasi: again.quasi_residual,
                confirmed_contact: again.contact_residual,
            });
        } else {
            unconfirmed += 1;
        }
    }
    let summary = if witnesses.is_empty() {
        format!("no witness found at these scales ({} samples, {} rejected)", samples.len(), rejected)
    } else {
        format!("{} confirmed witness(es) of quasi contact without contact", witnesses.len())
    };
    Ok(SearchOutcome { family: f.name.clone(), samples, rejected, unconfirmed, witnesses, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemarkCheck {
    pub family: String,
    /// Accepted samples that satisfy the quasi contact condition.
    pub non_vacuous: usize,
    /// Parameters of quasi contact samples with a large contact residual.
    pub violations: Vec<Vec<f64>>,
    pub status: CheckStatus,
}

/// In dimension 3 every quasi contact metric structure in the family must
/// be contact metric.
pub fn dim3_remark_check(f: &FamilySpec) -> Result<RemarkCheck> {
    if f.template.dim() != 3 {
        return Err(Error::DimensionMismatch { what: "family dimension".into(), expected: 3, found: f.template.dim() });
    }
    let samples: Vec<SampleOutcome> = f.parameter_values().iter().map(|v| evaluate_sample(f, v, &f.plan)).collect();
    let quasi: Vec<&SampleOutcome> = samples.iter().filter(|s| s.accepted && s.quasi_residual < WITNESS_QUASI_MAX).collect();
    let violations: Vec<Vec<f64>> =
        quasi.iter().filter(|s| !(s.contact_residual < DIM3_CONTACT_MAX)).map(|s| s.params.clone()).collect();
    let status = if !violations.is_empty() {
        CheckStatus::Fail
    } else if quasi.is_empty() {
        CheckStatus::Vacuous
    } else {
        CheckStatus::Pass
    };
    Ok(RemarkCheck { family: f.name.clone(), non_vacuous: quasi.len(), violations, status })
}

// ---------------------------------------------------------------------------
// Built-in families

/// `g + ε(θ⊗θ + (θ∘φ)⊗(θ∘φ))` with `θ(ξ) = 0`; compatible with `(φ, ξ, η)`
/// for every `ε > −1/|θ|²`, so the axioms keep holding.
fn compatible_deformation(
    g: &MetricFieldExpr,
    phi: &Tensor11FieldExpr,
    theta: &[CoordExpr],
    eps: CoordExpr,
) -> MetricFieldExpr {
    let d = theta.len();
    let theta_phi: Vec<CoordExpr> = expr_mat_mul(&[theta.to_vec()], &phi.0).remove(0);
    let mut out = vec![vec![CoordExpr::zero(); d]; d];
    for i in 0..d {
        for j in i..d {
            let p = theta[i].clone() * theta[j].clone() + theta_phi[i].clone() * theta_phi[j].clone();
            out[i][j] = g.0[i][j].clone() + eps.clone() * p;
        }
    }
    MetricFieldExpr(symmetrize_upper(out))
}

/// A fixed non-constant one-form on the Darboux chart annihilating `ξ`.
fn darboux_theta(n: usize) -> Vec<CoordExpr> {
    let d = 2 * n + 1;
    let mut theta = vec![CoordExpr::zero(); d];
    theta[0] = 1.0 + 0.5 * CoordExpr::var(n).sin();
    theta[2 * n - 1] = CoordExpr::var(0);
    theta
}

fn template_with(s: &AcmStructure, phi: Tensor11FieldExpr, g: MetricFieldExpr) -> FamilyTemplate {
    FamilyTemplate { phi, g, ..FamilyTemplate::from_structure(s) }
}

fn range(name: &str, lo: f64, hi: f64) -> ParamRange {
    ParamRange { name: name.into(), lo, hi }
}

/// Compatible metric deformations of the standard Sasakian `ℝ^{2n+1}`.
pub fn darboux_metric_family(n: usize) -> FamilySpec {
    let s = standard_darboux(n).structure;
    let g = compatible_deformation(&s.g, &s.phi, &darboux_theta(n), CoordExpr::param(0));
    FamilySpec {
        name: format!("darboux_{}_metric", 2 * n + 1),
        template: template_with(&s, s.phi.clone(), g),
        params: vec![range("eps", 0.0, 0.5)],
        sampler: ParamSampler::Grid { per_axis: 26 },
        plan: scan_plan(),
    }
}

/// `φ` conjugated by a frame rotation of the contact distribution.
pub fn darboux_rotation_family() -> FamilySpec {
    let s = standard_darboux(2).structure;
    FamilySpec {
        name: "darboux_5_phi_rotation".into(),
        template: template_with(&s, darboux_phi_rotation(2, CoordExpr::param(0)), s.g.clone()),
        params: vec![range("angle", 0.0, std::f64::consts::PI)],
        sampler: ParamSampler::Grid { per_axis: 37 },
        plan: scan_plan(),
    }
}

/// Rotation of `φ` combined with a compatible metric deformation.
pub fn darboux_mixed_family() -> FamilySpec {
    let s = standard_darboux(2).structure;
    let phi = darboux_phi_rotation(2, CoordExpr::param(0));
    let g = compatible_deformation(&s.g, &phi, &darboux_theta(2), CoordExpr::param(1));
    FamilySpec {
        name: "darboux_5_mixed".into(),
        template: template_with(&s, phi, g),
        params: vec![range("angle", 0.0, std::f64::consts::PI), range("eps", 0.0, 0.5)],
        sampler: ParamSampler::Random { count: 100, seed: 0 },
        plan: scan_plan(),
    }
}

/// `(1−s)·A + s·B` entrywise for the standard Sasakian and flat
/// cosymplectic structures on `ℝ³`. Only `s = 0` and `s = 1` satisfy the
/// axioms, so use a two-point grid.
pub fn darboux_cosymplectic_blend() -> FamilySpec {
    let a = standard_darboux(1).structure;
    let b = cosymplectic_flat(1).structure;
    let s = CoordExpr::param(0);
    let mix = |x: &CoordExpr, y: &CoordExpr| (1.0 - s.clone()) * x.clone() + s.clone() * y.clone();
    let mix1 = |x: &[CoordExpr], y: &[CoordExpr]| x.iter().zip(y).map(|(p, q)| mix(p, q)).collect::<Vec<_>>();
    let mix2 = |x: &[Vec<CoordExpr>], y: &[Vec<CoordExpr>]| x.iter().zip(y).map(|(p, q)| mix1(p, q)).collect::<Vec<_>>();
    FamilySpec {
        name: "darboux_cosymplectic_3_blend".into(),
        template: FamilyTemplate {
            coords: a.coords.clone(),
            phi: Tensor11FieldExpr(mix2(&a.phi.0, &b.phi.0)),
            xi: VectorFieldExpr(mix1(&a.xi.0, &b.xi.0)),
            eta: OneFormFieldExpr(mix1(&a.eta.0, &b.eta.0)),
            g: MetricFieldExpr(mix2(&a.g.0, &b.g.0)),
            domain: a.domain.clone(),
        },
        params: vec![range("s", 0.0, 1.0)],
        sampler: ParamSampler::Grid { per_axis: 2 },
        plan: scan_plan(),
    }
}

/// Families scanned by the `search` command.
pub fn builtin_families() -> Vec<FamilySpec> {
    vec![
        darboux_metric_family(2),
        darboux_rotation_family(),
        darboux_mixed_family(),
        darboux_metric_family(1),
        darboux_cosymplectic_blend(),
    ]
}

pub fn lookup_family(name: &str) -> Option<FamilySpec> {
    builtin_families().into_iter().find(|f| f.name == name)
}
