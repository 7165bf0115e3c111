//! Condition residuals, identity checks and the implication suite.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{axpy, dot, mat_vec, sub, Vector};
use crate::residual::{ResidualReport, Sup, TolerancePolicy, Verdict};
use crate::sampling::SamplingPlan;
use crate::structure::{
    axiom_report, axiom_residuals_at, map_samples, AcmStructure, Axiom, AxiomReport, DerivedTensors, PointGeometry,
};

/// Named predicates on an almost contact metric structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConditionId {
    Axioms,
    ContactMetric,
    KContact,
    Sasakian,
    Normal,
    QuasiContactC1,
    QuasiContactC1Prime,
    QuasiContactSplit,
    C0,
    C2,
    C3,
    C4,
    CHSymmetric,
    N1Zero,
    N2Zero,
    N3Zero,
    N4Zero,
}

impl ConditionId {
    pub const ALL: [ConditionId; 17] = [
        ConditionId::Axioms,
        ConditionId::ContactMetric,
        ConditionId::KContact,
        ConditionId::Sasakian,
        ConditionId::Normal,
        ConditionId::QuasiContactC1,
        ConditionId::QuasiContactC1Prime,
        ConditionId::QuasiContactSplit,
        ConditionId::C0,
        ConditionId::C2,
        ConditionId::C3,
        ConditionId::C4,
        ConditionId::CHSymmetric,
        ConditionId::N1Zero,
        ConditionId::N2Zero,
        ConditionId::N3Zero,
        ConditionId::N4Zero,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConditionId::Axioms => "Axioms",
            ConditionId::ContactMetric => "ContactMetric",
            ConditionId::KContact => "KContact",
            ConditionId::Sasakian => "Sasakian",
            ConditionId::Normal => "Normal",
            ConditionId::QuasiContactC1 => "QuasiContact_C1",
            ConditionId::QuasiContactC1Prime => "QuasiContact_C1prime",
            ConditionId::QuasiContactSplit => "QuasiContact_Split",
            ConditionId::C0 => "C0",
            ConditionId::C2 => "C2",
            ConditionId::C3 => "C3",
            ConditionId::C4 => "C4",
            ConditionId::CHSymmetric => "C_hSymmetric",
            ConditionId::N1Zero => "N1Zero",
            ConditionId::N2Zero => "N2Zero",
            ConditionId::N3Zero => "N3Zero",
            ConditionId::N4Zero => "N4Zero",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConditionId::ALL
            .iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

/// Per-point quantities; every condition and identity is a max over some
/// of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Measure {
    Contact,
    N1,
    N2,
    N3,
    N4,
    Sasakian,
    C0,
    C1,
    C1Prime,
    C2,
    C3,
    C4,
    HSym,
    N2Dual,
    HFormulas,
    HXi,
    TraceH,
    PhiAntisym,
    PhiXiSlot,
    HAnticommute,
    HSkew,
    Killing,
}

const MEASURES: usize = 22;

type PointMeasures = [f64; MEASURES];

/// Evaluate every measure at one point over ordered pairs of `vectors`.
fn measures_at(geom: &PointGeometry, t: &DerivedTensors, vectors: &[Vector]) -> PointMeasures {
    use Measure as M;
    let mut m = [0.0f64; MEASURES];
    let bump = |m: &mut PointMeasures, which: Measure, v: f64| {
        let slot = &mut m[which as usize];
        if v.is_nan() || v > *slot {
            *slot = if v.is_nan() { f64::INFINITY } else { v };
        }
    };
    let xi = &geom.xi.value;
    let n = |v: &[f64]| geom.norm(v);
    let eta_row = |a: &[f64]| -> Vector {
        let mut row = vec![0.0; a.len()];
        for (ai, r) in a.iter().zip(&t.nabla_eta) {
            axpy(*ai, r, &mut row);
        }
        row
    };

    struct Pre {
        norm: f64,
        phi: Vector,
        eta: f64,
        h: Vector,
        nphi: Vec<Vector>,
        nphi_phi: Vec<Vector>,
        nxi_phi: Vector,
        neta: Vector,
        neta_phi: Vector,
    }
    let pre: Vec<Pre> = vectors
        .iter()
        .map(|v| {
            let phi = geom.phi_of(v);
            Pre {
                norm: n(v),
                eta: geom.eta_of(v),
                h: mat_vec(&t.h, v),
                nphi: t.nabla_phi_along(v),
                nphi_phi: t.nabla_phi_along(&phi),
                nxi_phi: mat_vec(&t.nabla_xi, &phi),
                neta: eta_row(v),
                neta_phi: eta_row(&phi),
                phi,
            }
        })
        .collect();

    let nabla_phi_xi = t.nabla_phi_along(xi);
    for (a, x) in vectors.iter().enumerate() {
        let pa = &pre[a];
        let mut c0 = mat_vec(&t.nabla_xi, x);
        axpy(1.0, &pa.phi, &mut c0);
        axpy(1.0, &geom.phi_of(&pa.h), &mut c0);
        bump(&mut m, M::C0, n(&c0) / pa.norm);
        bump(&mut m, M::C3, n(&mat_vec(&nabla_phi_xi, x)) / pa.norm);
        bump(&mut m, M::N3, n(&mat_vec(&t.n3, x)) / pa.norm);
        bump(&mut m, M::N4, dot(&t.n4, x).abs() / pa.norm);
        bump(&mut m, M::HFormulas, n(&sub(&pa.h, &mat_vec(&t.h_nabla, x))) / pa.norm);
        let mut anti = geom.phi_of(&pa.h);
        axpy(1.0, &mat_vec(&t.h, &pa.phi), &mut anti);
        bump(&mut m, M::HAnticommute, n(&anti) / pa.norm);

        for (b, y) in vectors.iter().enumerate() {
            let pb = &pre[b];
            let nn = pa.norm * pb.norm;
            let gxy = geom.g(x, y);
            let phi_form = DerivedTensors::bilinear(&t.phi_form, x, y);
            let d_eta = DerivedTensors::bilinear(&t.d_eta, x, y);
            bump(&mut m, M::Contact, (d_eta - phi_form).abs() / nn);
            bump(&mut m, M::PhiAntisym, (phi_form + DerivedTensors::bilinear(&t.phi_form, y, x)).abs() / nn);

            let nphi_xy = mat_vec(&pa.nphi, y);
            let mut sas = nphi_xy.clone();
            axpy(-gxy, xi, &mut sas);
            axpy(pb.eta, x, &mut sas);
            bump(&mut m, M::Sasakian, n(&sas) / nn);

            let mut lhs = nphi_xy;
            axpy(1.0, &mat_vec(&pa.nphi_phi, &pb.phi), &mut lhs);
            axpy(-2.0 * gxy, xi, &mut lhs);
            let mut c1 = lhs.clone();
            axpy(pb.eta, x, &mut c1);
            axpy(pa.eta * pb.eta, xi, &mut c1);
            axpy(pb.eta, &pa.h, &mut c1);
            bump(&mut m, M::C1, n(&c1) / nn);
            let mut c1p = lhs;
            axpy(2.0 * pb.eta, x, &mut c1p);
            axpy(-pb.eta, &pa.nxi_phi, &mut c1p);
            bump(&mut m, M::C1Prime, n(&c1p) / nn);

            let c2 = dot(&pa.neta, y) + dot(&pa.neta_phi, &pb.phi) + 2.0 * geom.g(&pa.phi, y);
            bump(&mut m, M::C2, c2.abs() / nn);

            let hsym = geom.g(&pa.h, y) - geom.g(x, &pb.h);
            bump(&mut m, M::HSym, hsym.abs() / nn);
            let n2 = DerivedTensors::bilinear(&t.n2, x, y);
            bump(&mut m, M::N2, n2.abs() / nn);
            bump(&mut m, M::N2Dual, (n2 - DerivedTensors::bilinear(&t.n2_nabla, x, y)).abs() / nn);
            bump(&mut m, M::HSkew, (hsym + 0.5 * n2).abs() / nn);
            bump(&mut m, M::N1, n(&t.n1_of(x, y)) / nn);
            bump(&mut m, M::Killing, DerivedTensors::bilinear(&t.killing, x, y).abs() / nn);
        }
        bump(&mut m, M::PhiXiSlot, geom.fundamental(xi, x).abs() / pa.norm);
    }
    bump(&mut m, M::C4, n(&mat_vec(&t.nabla_xi, xi)));
    bump(&mut m, M::HXi, n(&mat_vec(&t.h, xi)));
    bump(&mut m, M::TraceH, t.trace_h().abs());
    m
}

/// Sups of every measure and axiom over a sampling plan.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub axioms: Vec<Sup>,
    measures: Vec<Sup>,
    conditions: Vec<Sup>,
}

fn condition_value(c: ConditionId, m: &PointMeasures, axioms: &[f64; 5]) -> f64 {
    use Measure as M;
    let max = |ms: &[Measure]| ms.iter().map(|k| m[*k as usize]).fold(0.0, f64::max);
    match c {
        ConditionId::Axioms => axioms.iter().copied().fold(0.0, f64::max),
        ConditionId::ContactMetric => m[M::Contact as usize],
        ConditionId::KContact => max(&[M::Contact, M::N3]),
        ConditionId::Sasakian => m[M::Sasakian as usize],
        ConditionId::Normal | ConditionId::N1Zero => m[M::N1 as usize],
        ConditionId::QuasiContactC1 => m[M::C1 as usize],
        ConditionId::QuasiContactC1Prime => m[M::C1Prime as usize],
        ConditionId::QuasiContactSplit => max(&[M::C1Prime, M::C2, M::C3, M::C4]),
        ConditionId::C0 => m[M::C0 as usize],
        ConditionId::C2 => m[M::C2 as usize],
        ConditionId::C3 => m[M::C3 as usize],
        ConditionId::C4 => m[M::C4 as usize],
        ConditionId::CHSymmetric => m[M::HSym as usize],
        ConditionId::N2Zero => m[M::N2 as usize],
        ConditionId::N3Zero => m[M::N3 as usize],
        ConditionId::N4Zero => m[M::N4 as usize],
    }
}

/// Sample the structure once and keep every sup.
pub fn evaluate(s: &AcmStructure, plan: &SamplingPlan) -> Result<Evaluation> {
    let samples = plan.draw(&s.domain);
    let per_point = map_samples(&samples, |smp| {
        let geom = s.geometry_at(&smp.point)?;
        let t = geom.derived();
        Ok((axiom_residuals_at(&geom, &smp.vectors), measures_at(&geom, &t, &smp.vectors)))
    })?;
    let mut axioms = vec![Sup::default(); 5];
    let mut measures = vec![Sup::default(); MEASURES];
    let mut conditions = vec![Sup::default(); ConditionId::ALL.len()];
    for (smp, (ax, ms)) in samples.iter().zip(&per_point) {
        let at = smp.point.coords();
        for (sup, v) in axioms.iter_mut().zip(ax) {
            sup.observe(*v, at);
        }
        for (sup, v) in measures.iter_mut().zip(ms) {
            sup.observe(*v, at);
        }
        for (sup, c) in conditions.iter_mut().zip(ConditionId::ALL) {
            sup.observe(condition_value(c, ms, ax), at);
        }
    }
    Ok(Evaluation { axioms, measures, conditions })
}

impl Evaluation {
    pub fn axiom_report(&self, policy: &TolerancePolicy) -> AxiomReport {
        axiom_report(&self.axioms, policy)
    }

    pub fn condition(&self, c: ConditionId, policy: &TolerancePolicy) -> ResidualReport {
        let i = ConditionId::ALL.iter().position(|k| *k == c).expect("listed");
        ResidualReport::from_sup(c.name(), &self.conditions[i], policy)
    }

    fn measure(&self, name: &str, m: Measure, policy: &TolerancePolicy) -> ResidualReport {
        ResidualReport::from_sup(name, &self.measures[m as usize], policy)
    }

    /// Whether the axiom gate is passed (anything but a clear failure).
    pub fn axioms_pass(&self, policy: &TolerancePolicy) -> bool {
        self.axiom_report(policy).max.verdict != Verdict::Fails
    }
}

pub fn condition_residual(
    s: &AcmStructure,
    c: ConditionId,
    plan: &SamplingPlan,
    policy: &TolerancePolicy,
) -> Result<ResidualReport> {
    Ok(evaluate(s, plan)?.condition(c, policy))
}

/// Like [`condition_residual`] with the condition given by name.
pub fn condition_residual_by_name(
    s: &AcmStructure,
    name: &str,
    plan: &SamplingPlan,
    policy: &TolerancePolicy,
) -> Result<ResidualReport> {
    condition_residual(s, name.parse()?, plan, policy)
}

/// `|dη(X,Y) − Φ(X,Y)|`
pub fn contact_metric_residual(s: &AcmStructure, plan: &SamplingPlan, policy: &TolerancePolicy) -> Result<ResidualReport> {
    condition_residual(s, ConditionId::ContactMetric, plan, policy)
}

/// `|(∇_Xφ)Y − g(X,Y)ξ + η(Y)X|`
pub fn sasakian_residual(s: &AcmStructure, plan: &SamplingPlan, policy: &TolerancePolicy) -> Result<ResidualReport> {
    condition_residual(s, ConditionId::Sasakian, plan, policy)
}

/// The two independent K-contact tests on a contact metric structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KContactReport {
    pub n3: ResidualReport,
    pub killing: ResidualReport,
}

impl KContactReport {
    pub fn agree(&self) -> bool {
        self.n3.verdict == self.killing.verdict
    }
}

/// `N⁽³⁾ = 0` and `L_ξ g = 0`, computed by separate routes. Errors if the
/// structure is clearly not contact metric.
pub fn kcontact_residual(s: &AcmStructure, plan: &SamplingPlan, policy: &TolerancePolicy) -> Result<KContactReport> {
    let ev = evaluate(s, plan)?;
    let contact = ev.condition(ConditionId::ContactMetric, policy);
    if contact.verdict == Verdict::Fails {
        return Err(Error::NotContactMetric { residual: contact.residual });
    }
    Ok(KContactReport {
        n3: ev.condition(ConditionId::N3Zero, policy),
        killing: ev.measure("Killing", Measure::Killing, policy),
    })
}

/// `(g(hX,Y) − g(X,hY), N⁽²⁾(X,Y))`
pub fn h_symmetry_residual(
    s: &AcmStructure,
    plan: &SamplingPlan,
    policy: &TolerancePolicy,
) -> Result<(ResidualReport, ResidualReport)> {
    let ev = evaluate(s, plan)?;
    Ok((ev.condition(ConditionId::CHSymmetric, policy), ev.condition(ConditionId::N2Zero, policy)))
}

/// Outcome of one suite check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Indeterminate,
    Vacuous,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Indeterminate => "indeterminate",
            CheckStatus::Vacuous => "vacuous",
        }
    }
}

/// An identity that must hold whenever its axiom prerequisites do.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub status: CheckStatus,
}

struct IdentitySpec {
    name: &'static str,
    measure: Measure,
    threshold: f64,
    needs: &'static [Axiom],
}

const ALL_AXIOMS: &[Axiom] = &Axiom::ALL;

const IDENTITIES: [IdentitySpec; 6] = [
    IdentitySpec { name: "n2_covariant_form", measure: Measure::N2Dual, threshold: 1e-10, needs: &[Axiom::EtaPhi] },
    IdentitySpec { name: "h_lie_equals_h_nabla", measure: Measure::HFormulas, threshold: 1e-10, needs: &[] },
    IdentitySpec { name: "h_xi_vanishes", measure: Measure::HXi, threshold: 1e-11, needs: &[Axiom::PhiXi] },
    IdentitySpec {
        name: "h_traceless",
        measure: Measure::TraceH,
        threshold: 1e-10,
        needs: &[Axiom::PhiSquare, Axiom::PhiXi, Axiom::EtaPhi, Axiom::EtaXi],
    },
    IdentitySpec { name: "fundamental_form_antisymmetric", measure: Measure::PhiAntisym, threshold: 1e-10, needs: ALL_AXIOMS },
    IdentitySpec { name: "fundamental_form_kills_xi", measure: Measure::PhiXiSlot, threshold: 1e-10, needs: ALL_AXIOMS },
];

impl Evaluation {
    pub fn identities(&self, policy: &TolerancePolicy) -> Vec<IdentityCheck> {
        let axioms = self.axiom_report(policy);
        IDENTITIES
            .iter()
            .map(|spec| {
                let gated = spec.needs.iter().any(|a| {
                    let i = Axiom::ALL.iter().position(|k| k == a).expect("listed");
                    axioms.components[i].verdict == Verdict::Fails
                });
                let residual = self.measures[spec.measure as usize].value;
                let status = if gated {
                    CheckStatus::Vacuous
                } else if residual < spec.threshold {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                };
                IdentityCheck { name: spec.name.into(), residual, threshold: spec.threshold, status }
            })
            .collect()
    }

    /// Quantities that appear in the implication suite besides conditions.
    pub fn extra_quantities(&self, policy: &TolerancePolicy) -> Vec<ResidualReport> {
        vec![
            self.measure("Killing", Measure::Killing, policy),
            self.measure("hAnticommutesWithPhi", Measure::HAnticommute, policy),
            self.measure("hSkewIdentity", Measure::HSkew, policy),
        ]
    }
}

/// `antecedents ⇒ consequents`, or a biconditional `left ⇔ right` that is
/// only tested where every `under` condition holds.
#[derive(Clone, Debug, PartialEq)]
pub enum ImplicationSpec {
    Implies { name: &'static str, antecedents: &'static [&'static str], consequents: &'static [&'static str] },
    Iff {
        name: &'static str,
        under: &'static [&'static str],
        left: &'static [&'static str],
        right: &'static [&'static str],
    },
}

impl ImplicationSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ImplicationSpec::Implies { name, .. } | ImplicationSpec::Iff { name, .. } => name,
        }
    }
}

pub const IMPLICATIONS: [ImplicationSpec; 13] = [
    ImplicationSpec::Implies {
        name: "normal_implies_n2_n3_n4_vanish",
        antecedents: &["Normal"],
        consequents: &["N2Zero", "N3Zero", "N4Zero"],
    },
    ImplicationSpec::Implies {
        name: "contact_implies_n2_n4_vanish",
        antecedents: &["ContactMetric"],
        consequents: &["N2Zero", "N4Zero"],
    },
    ImplicationSpec::Iff {
        name: "contact_kcontact_iff_killing",
        under: &["ContactMetric"],
        left: &["N3Zero"],
        right: &["Killing"],
    },
    ImplicationSpec::Iff {
        name: "sasakian_iff_contact_and_normal",
        under: &[],
        left: &["Sasakian"],
        right: &["ContactMetric", "Normal"],
    },
    ImplicationSpec::Implies {
        name: "contact_implies_c0_c1_c2",
        antecedents: &["ContactMetric"],
        consequents: &["C0", "QuasiContact_C1", "C2"],
    },
    ImplicationSpec::Iff {
        name: "c3_h_symmetric_iff_n2_vanishes",
        under: &["C3"],
        left: &["C_hSymmetric"],
        right: &["N2Zero"],
    },
    ImplicationSpec::Implies {
        name: "c3_implies_h_anticommutes",
        antecedents: &["C3"],
        consequents: &["hAnticommutesWithPhi"],
    },
    ImplicationSpec::Implies { name: "c3_implies_h_skew_identity", antecedents: &["C3"], consequents: &["hSkewIdentity"] },
    ImplicationSpec::Implies {
        name: "c1_implies_c2_c3_c4",
        antecedents: &["QuasiContact_C1"],
        consequents: &["C2", "C3", "C4"],
    },
    ImplicationSpec::Implies {
        name: "c1prime_implies_c2_c3_c4",
        antecedents: &["QuasiContact_C1prime"],
        consequents: &["C2", "C3", "C4"],
    },
    ImplicationSpec::Iff { name: "c1_iff_c1prime", under: &[], left: &["QuasiContact_C1"], right: &["QuasiContact_C1prime"] },
    ImplicationSpec::Iff {
        name: "split_conditions_iff_c1",
        under: &[],
        left: &["QuasiContact_Split"],
        right: &["QuasiContact_C1"],
    },
    ImplicationSpec::Iff {
        name: "contact_iff_c1_and_h_symmetric",
        under: &[],
        left: &["ContactMetric"],
        right: &["QuasiContact_C1", "C_hSymmetric"],
    },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImplicationOutcome {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// Verdict of a conjunction: `holds` if all hold, `fails` if any fails.
fn conjunction(reports: &[&ResidualReport]) -> Verdict {
    if reports.iter().any(|r| r.verdict == Verdict::Fails) {
        Verdict::Fails
    } else if reports.iter().all(|r| r.verdict == Verdict::Holds) {
        Verdict::Holds
    } else if reports.iter().any(|r| r.verdict == Verdict::Vacuous) {
        Verdict::Vacuous
    } else {
        Verdict::Indeterminate
    }
}

/// Evaluate the suite on already computed reports (looked up by name).
/// An implication passes when its consequents are below `10·tol`.
pub fn evaluate_implications(reports: &[ResidualReport], policy: &TolerancePolicy) -> Result<Vec<ImplicationOutcome>> {
    let find = |names: &[&str]| -> Result<Vec<&ResidualReport>> {
        names
            .iter()
            .map(|n| reports.iter().find(|r| r.name == *n).ok_or_else(|| Error::UnknownCondition(n.to_string())))
            .collect()
    };
    let show = |rs: &[&ResidualReport]| {
        rs.iter().map(|r| format!("{}={:.3e} ({})", r.name, r.residual, r.verdict.as_str())).collect::<Vec<_>>().join(", ")
    };
    IMPLICATIONS
        .iter()
        .map(|spec| {
            let (status, detail) = match spec {
                ImplicationSpec::Implies { antecedents, consequents, .. } => {
                    let ante = find(antecedents)?;
                    let cons = find(consequents)?;
                    let status = match conjunction(&ante) {
                        Verdict::Holds => {
                            if cons.iter().all(|r| r.residual < 10.0 * policy.tol) {
                                CheckStatus::Pass
                            } else {
                                CheckStatus::Fail
                            }
                        }
                        Verdict::Fails | Verdict::Vacuous => CheckStatus::Vacuous,
                        Verdict::Indeterminate => CheckStatus::Indeterminate,
                    };
                    (status, format!("{} => {}", show(&ante), show(&cons)))
                }
                ImplicationSpec::Iff { under, left, right, .. } => {
                    let under = find(under)?;
                    let l = find(left)?;
                    let r = find(right)?;
                    let status = match conjunction(&under) {
                        Verdict::Fails | Verdict::Vacuous if !under.is_empty() => CheckStatus::Vacuous,
                        Verdict::Indeterminate if !under.is_empty() => CheckStatus::Indeterminate,
                        _ => match (conjunction(&l), conjunction(&r)) {
                            (Verdict::Vacuous, _) | (_, Verdict::Vacuous) => CheckStatus::Vacuous,
                            (a, b) if a == b && a != Verdict::Indeterminate => CheckStatus::Pass,
                            (Verdict::Holds, Verdict::Fails) | (Verdict::Fails, Verdict::Holds) => CheckStatus::Fail,
                            _ => CheckStatus::Indeterminate,
                        },
                    };
                    (status, format!("{} <=> {}", show(&l), show(&r)))
                }
            };
            Ok(ImplicationOutcome { name: spec.name().into(), status, detail })
        })
        .collect()
}

/// Everything known about one structure under one sampling plan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub structure: String,
    pub dimension: usize,
    pub plan: SamplingPlan,
    pub policy: TolerancePolicy,
    pub axioms: AxiomReport,
    /// One report per [`ConditionId`], in declaration order. Class
    /// predicates are `vacuous` when the axioms fail.
    pub conditions: Vec<ResidualReport>,
    pub quantities: Vec<ResidualReport>,
    pub identities: Vec<IdentityCheck>,
    pub implications: Vec<ImplicationOutcome>,
}

impl ClassificationReport {
    pub fn condition(&self, c: ConditionId) -> &ResidualReport {
        self.conditions.iter().find(|r| r.name == c.name()).expect("every condition is reported")
    }

    pub fn verdict(&self, c: ConditionId) -> Verdict {
        self.condition(c).verdict
    }

    /// Names of identities or implications that failed.
    pub fn failures(&self) -> Vec<String> {
        self.identities
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.clone())
            .chain(self.implications.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.name.clone()))
            .collect()
    }

    /// Re-run the implication suite on the (possibly edited) reports.
    pub fn recheck_implications(&mut self) -> Result<()> {
        if self.axioms.max.verdict == Verdict::Fails {
            return Ok(());
        }
        let all: Vec<ResidualReport> = self.conditions.iter().chain(&self.quantities).cloned().collect();
        self.implications = evaluate_implications(&all, &self.policy)?;
        Ok(())
    }
}

pub fn implication_suite(s: &AcmStructure, plan: &SamplingPlan, policy: &TolerancePolicy) -> Result<Vec<ImplicationOutcome>> {
    Ok(classify(s, plan, policy)?.implications)
}

pub fn classify(s: &AcmStructure, plan: &SamplingPlan, policy: &TolerancePolicy) -> Result<ClassificationReport> {
    let ev = evaluate(s, plan)?;
    Ok(report_from_evaluation(s, &ev, plan, policy))
}

pub(crate) fn report_from_evaluation(
    s: &AcmStructure,
    ev: &Evaluation,
    plan: &SamplingPlan,
    policy: &TolerancePolicy,
) -> ClassificationReport {
    let axioms = ev.axiom_report(policy);
    let gated = axioms.max.verdict == Verdict::Fails;
    let conditions: Vec<ResidualReport> = ConditionId::ALL
        .iter()
        .map(|c| {
            if gated && *c != ConditionId::Axioms {
                ResidualReport::vacuous(c.name())
            } else {
                ev.condition(*c, policy)
            }
        })
        .collect();
    let quantities: Vec<ResidualReport> = if gated {
        ev.extra_quantities(policy).into_iter().map(|r| ResidualReport::vacuous(r.name)).collect()
    } else {
        ev.extra_quantities(policy)
    };
    let mut report = ClassificationReport {
        structure: s.name.clone(),
        dimension: s.dim(),
        plan: *plan,
        policy: *policy,
        axioms,
        conditions,
        quantities,
        identities: ev.identities(policy),
        implications: IMPLICATIONS
            .iter()
            .map(|spec| ImplicationOutcome {
                name: spec.name().into(),
                status: CheckStatus::Vacuous,
                detail: "axioms fail".into(),
            })
            .collect(),
    };
    report.recheck_implications().expect("suite names are all reported");
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn plan() -> SamplingPlan {
        SamplingPlan::new(12, 4, 3)
    }

    #[test]
    fn condition_names_parse() {
        for c in ConditionId::ALL {
            assert_eq!(c.name().parse::<ConditionId>().unwrap(), c);
        }
        assert_eq!("Bogus".parse::<ConditionId>().unwrap_err(), Error::UnknownCondition("Bogus".into()));
    }

    #[test]
    fn darboux_is_sasakian() {
        let s = catalog::standard_darboux(1).structure;
        let p = TolerancePolicy::default();
        let r = classify(&s, &plan(), &p).unwrap();
        for c in ConditionId::ALL {
            assert_eq!(r.verdict(c), Verdict::Holds, "{c}: {:?}", r.condition(c));
        }
        assert!(r.failures().is_empty(), "{:?}", r.failures());
    }

    #[test]
    fn cosymplectic_fails_contact_but_is_normal() {
        let s = catalog::cosymplectic_flat(1).structure;
        let p = TolerancePolicy::default();
        let r = classify(&s, &plan(), &p).unwrap();
        assert_eq!(r.verdict(ConditionId::Axioms), Verdict::Holds);
        assert_eq!(r.verdict(ConditionId::ContactMetric), Verdict::Fails);
        assert_eq!(r.verdict(ConditionId::Normal), Verdict::Holds);
        assert_eq!(r.verdict(ConditionId::QuasiContactC1), Verdict::Fails);
        assert!((r.condition(ConditionId::ContactMetric).residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kcontact_requires_contact() {
        let s = catalog::cosymplectic_flat(1).structure;
        let err = kcontact_residual(&s, &plan(), &TolerancePolicy::default()).unwrap_err();
        assert!(matches!(err, Error::NotContactMetric { .. }));
    }

    #[test]
    fn corrupted_report_fails_the_suite() {
        let s = catalog::standard_darboux(1).structure;
        let mut r = classify(&s, &plan(), &TolerancePolicy::default()).unwrap();
        let c1p = r.conditions.iter_mut().find(|c| c.name == "QuasiContact_C1prime").unwrap();
        c1p.residual = 0.5;
        c1p.verdict = Verdict::Fails;
        r.recheck_implications().unwrap();
        assert!(r.failures().contains(&"c1_iff_c1prime".to_string()));
    }
}
