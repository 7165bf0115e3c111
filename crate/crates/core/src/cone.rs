//! The metric cone `M × ℝ` with `ḡ = e^{−2t}(g + dt²)` and the almost
//! complex structure `J̄X = φX − η(X)∂t`, `J̄∂t = ξ`.

use serde::Serialize;

use crate::classify::{classify, CheckStatus, ClassificationReport, ConditionId, IdentityCheck, ImplicationOutcome};
use crate::error::{Error, Result};
use crate::expr::{CoordExpr, ExprNames};
use crate::kernel::{
    axpy, basis, christoffel, dot, lie_bracket, mat_vec, sub, zeros, ChartPoint, Christoffel, Matrix, MetricAtPoint,
    MetricFieldExpr, Tensor11FieldExpr, Tensor11Jet, TwoFormJet, Vector, VectorJet,
};
use crate::kernel::exterior_d2;
use crate::residual::{ResidualReport, Sup, TolerancePolicy, Verdict};
use crate::sampling::{DomainBox, Sample, SamplingPlan};
use crate::structure::{axiom_residual, map_samples, AcmStructure, DerivedTensors, PointGeometry};

/// Range of the cone coordinate `t` in the sampled box.
pub const T_RANGE: (f64, f64) = (-1.0, 1.0);

/// Fixed `t` slices on which verdicts must agree.
pub const T_SLICES: [f64; 3] = [-1.0, 0.0, 1.0];

#[derive(Clone, Debug, PartialEq)]
pub struct ConeStructure {
    pub base: AcmStructure,
    pub coords: Vec<String>,
    pub jbar: Tensor11FieldExpr,
    pub gbar: MetricFieldExpr,
    pub domain: DomainBox,
}

/// Build `(J̄, ḡ)` on the product chart; the last coordinate is `t`.
pub fn build_cone(s: &AcmStructure) -> Result<ConeStructure> {
    let axioms = axiom_residual(s, &SamplingPlan::new(20, 4, 0), &TolerancePolicy::default())?;
    if axioms.max.verdict == Verdict::Fails {
        return Err(Error::AxiomFailure { residual: axioms.max.residual });
    }
    let d = s.dim();
    let mut jbar = vec![vec![CoordExpr::zero(); d + 1]; d + 1];
    let mut gbar = vec![vec![CoordExpr::zero(); d + 1]; d + 1];
    let conformal = (-2.0 * CoordExpr::var(d)).exp();
    for i in 0..d {
        for j in 0..d {
            jbar[i][j] = s.phi.0[i][j].clone();
            gbar[i][j] = conformal.clone() * s.g.0[i][j].clone();
        }
        jbar[i][d] = s.xi.0[i].clone();
        jbar[d][i] = -s.eta.0[i].clone();
    }
    gbar[d][d] = conformal;
    let mut coords = s.coords.clone();
    coords.push(if coords.iter().any(|c| c == "t") { "t_cone".into() } else { "t".into() });
    Ok(ConeStructure {
        base: s.clone(),
        coords,
        jbar: Tensor11FieldExpr(jbar),
        gbar: MetricFieldExpr(gbar),
        domain: s.domain.extended(T_RANGE.0, T_RANGE.1),
    })
}

impl ConeStructure {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn names(&self) -> ExprNames {
        ExprNames::new(self.coords.clone(), Vec::new())
    }

    pub fn geometry_at(&self, q: &ChartPoint) -> Result<ConeGeometry> {
        let d = self.base.dim();
        let base_point = ChartPoint::new(q.coords()[..d].to_vec())?;
        let base = self.base.geometry_at(&base_point)?;
        let base_tensors = base.derived();
        let metric = self.gbar.at(q)?;
        let gamma = christoffel(&metric);
        let jbar = self.jbar.jet_at(q)?;
        let nabla_j = (0..=d).map(|i| gamma.nabla_tensor11(&basis(d + 1, i), &jbar)).collect();
        Ok(ConeGeometry { base, base_tensors, jbar, metric, gamma, nabla_j })
    }
}

/// Cone quantities at one point together with the base geometry below it.
#[derive(Clone, Debug)]
pub struct ConeGeometry {
    pub base: PointGeometry,
    pub base_tensors: DerivedTensors,
    pub jbar: Tensor11Jet,
    pub metric: MetricAtPoint,
    pub gamma: Christoffel,
    /// `nabla_j[i]` is the matrix of `∇̄_{∂_i} J̄`.
    pub nabla_j: Vec<Matrix>,
}

impl ConeGeometry {
    pub fn dim(&self) -> usize {
        self.jbar.dim()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.metric.norm(u)
    }

    /// Matrix of `∇̄_U J̄`.
    pub fn nabla_j_along(&self, u: &[f64]) -> Matrix {
        let n = self.dim();
        let mut out = zeros(n);
        for (ui, m) in u.iter().zip(&self.nabla_j) {
            for (orow, mrow) in out.iter_mut().zip(m) {
                axpy(*ui, mrow, orow);
            }
        }
        out
    }

    /// `N_J̄(U,V) = [J̄U,J̄V] − [U,V] − J̄[J̄U,V] − J̄[U,J̄V]` on constant
    /// coordinate fields, from brackets only.
    pub fn nijenhuis(&self, u: &[f64], v: &[f64]) -> Vector {
        let (uj, vj) = (VectorJet::constant(u), VectorJet::constant(v));
        let (ju, jv) = (self.jbar.apply(&uj), self.jbar.apply(&vj));
        let mut out = sub(&lie_bracket(&ju, &jv), &lie_bracket(&uj, &vj));
        axpy(-1.0, &self.jbar.apply_value(&lie_bracket(&ju, &vj)), &mut out);
        axpy(-1.0, &self.jbar.apply_value(&lie_bracket(&uj, &jv)), &mut out);
        out
    }

    /// Jet of the Kähler form `Ω̄(U,V) = ḡ(U, J̄V)`.
    pub fn kaehler_form(&self) -> TwoFormJet {
        let n = self.dim();
        let g = &self.metric.g;
        let mut value = zeros(n);
        let mut deriv = vec![zeros(n); n];
        for i in 0..n {
            for j in 0..n {
                value[i][j] = (0..n).map(|l| g[i][l] * self.jbar.value[l][j]).sum();
                for (k, dk) in deriv.iter_mut().enumerate() {
                    dk[i][j] = (0..n)
                        .map(|l| self.metric.dg[k][i][l] * self.jbar.value[l][j] + g[i][l] * self.jbar.deriv[k][l][j])
                        .sum();
                }
            }
        }
        TwoFormJet { value, deriv }
    }
}

/// The Gray–Hervella type classes checked on the cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum HermitianClass {
    /// `∇̄J̄ = 0`
    Kaehler,
    /// `dΩ̄ = 0`
    AlmostKaehler,
    /// `(∇̄_U J̄)U = 0`
    NearlyKaehler,
    /// `(∇̄_U J̄)V + (∇̄_{J̄U} J̄)J̄V = 0`
    QuasiKaehler,
    /// `N_J̄ = 0`
    Hermitian,
}

impl HermitianClass {
    pub const ALL: [HermitianClass; 5] = [
        HermitianClass::Kaehler,
        HermitianClass::AlmostKaehler,
        HermitianClass::NearlyKaehler,
        HermitianClass::QuasiKaehler,
        HermitianClass::Hermitian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            HermitianClass::Kaehler => "Kaehler",
            HermitianClass::AlmostKaehler => "AlmostKaehler",
            HermitianClass::NearlyKaehler => "NearlyKaehler",
            HermitianClass::QuasiKaehler => "QuasiKaehler",
            HermitianClass::Hermitian => "Hermitian",
        }
    }
}

// Indices into the per-point measure array.
const K: usize = 0;
const AK: usize = 1;
const NK: usize = 2;
const QK: usize = 3;
const H: usize = 4;
const PRODUCT_CONNECTION: usize = 5;
const NABLA_J_BASE: usize = 6;
const NABLA_J_VERTICAL: usize = 7;
const NBAR_MINUS: usize = 8;
const NBAR_PLUS: usize = 9;
const NBAR_VERTICAL: usize = 10;
const N2_SIZE: usize = 11;
const KAEHLER_FORM_DUAL: usize = 12;
const CONE_MEASURES: usize = 13;

type ConeMeasures = [f64; CONE_MEASURES];

fn bump(m: &mut ConeMeasures, i: usize, v: f64) {
    let v = if v.is_nan() { f64::INFINITY } else { v };
    if v > m[i] {
        m[i] = v;
    }
}

fn cone_measures_at(c: &ConeGeometry, vectors: &[Vector]) -> Result<ConeMeasures> {
    let n = c.dim();
    let d = n - 1;
    let mut m = [0.0f64; CONE_MEASURES];
    let norms: Vec<f64> = vectors.iter().map(|u| c.norm(u)).collect();
    let ku: Vec<Matrix> = vectors.iter().map(|u| c.nabla_j_along(u)).collect();
    let ju: Vec<Vector> = vectors.iter().map(|u| c.jbar.apply_value(u)).collect();
    let kju: Vec<Matrix> = ju.iter().map(|u| c.nabla_j_along(u)).collect();
    // lowered[a][b] = ḡ((∇̄_{U_a} J̄) U_b, ·)
    let kv: Vec<Vec<Vector>> = ku.iter().map(|k| vectors.iter().map(|v| mat_vec(k, v)).collect()).collect();
    let lowered: Vec<Vec<Vector>> = kv.iter().map(|row| row.iter().map(|w| c.metric.flat(w)).collect()).collect();
    let omega = c.kaehler_form();
    let consts: Vec<VectorJet> = vectors.iter().map(|u| VectorJet::constant(u)).collect();

    for a in 0..vectors.len() {
        bump(&mut m, NK, c.norm(&kv[a][a]) / (norms[a] * norms[a]));
        for b in 0..vectors.len() {
            let nn = norms[a] * norms[b];
            bump(&mut m, K, c.norm(&kv[a][b]) / nn);
            let mut qk = kv[a][b].clone();
            axpy(1.0, &mat_vec(&kju[a], &ju[b]), &mut qk);
            bump(&mut m, QK, c.norm(&qk) / nn);
            bump(&mut m, H, c.norm(&c.nijenhuis(&vectors[a], &vectors[b])) / nn);
            for w in 0..vectors.len() {
                let cyc = dot(&lowered[a][b], &vectors[w]) + dot(&lowered[b][w], &vectors[a]) + dot(&lowered[w][a], &vectors[b]);
                let nnn = nn * norms[w];
                bump(&mut m, AK, cyc.abs() / nnn);
                let d_omega = exterior_d2(&omega, &consts[a], &consts[b], &consts[w])?;
                bump(&mut m, KAEHLER_FORM_DUAL, (cyc + 3.0 * d_omega).abs() / nnn);
            }
        }
    }

    // Base-tangent parts of the sample vectors, lifted to the cone.
    let base = &c.base;
    let bt = &c.base_tensors;
    let dt = basis(n, d);
    let ndt = c.norm(&dt);
    let lifts: Vec<(Vector, Vector)> = vectors
        .iter()
        .filter(|u| u[..d].iter().any(|x| *x != 0.0))
        .map(|u| {
            let x = u[..d].to_vec();
            let mut hat = x.clone();
            hat.push(0.0);
            (x, hat)
        })
        .collect();
    let lift = |v: &[f64], t_part: f64| -> Vector {
        let mut out = v.to_vec();
        out.push(t_part);
        out
    };
    let gamma_dt_dt = c.gamma.contract(&dt, &dt);
    let mut r = gamma_dt_dt.clone();
    axpy(1.0, &dt, &mut r);
    bump(&mut m, PRODUCT_CONNECTION, c.norm(&r) / (ndt * ndt));
    for (x, xh) in &lifts {
        let nx = c.norm(xh);
        let mut r = c.gamma.contract(xh, &dt);
        axpy(1.0, xh, &mut r);
        bump(&mut m, PRODUCT_CONNECTION, c.norm(&r) / (nx * ndt));
        let mut r = c.gamma.contract(&dt, xh);
        axpy(1.0, xh, &mut r);
        bump(&mut m, PRODUCT_CONNECTION, c.norm(&r) / (nx * ndt));

        let kx = c.nabla_j_along(xh);
        let mut r = mat_vec(&kx, &dt);
        axpy(-1.0, &lift(&mat_vec(&bt.nabla_xi, x), 0.0), &mut r);
        axpy(-1.0, &lift(&base.phi_of(x), 0.0), &mut r);
        bump(&mut m, NABLA_J_VERTICAL, c.norm(&r) / (nx * ndt));
        let kt = c.nabla_j_along(&dt);
        bump(&mut m, NABLA_J_VERTICAL, c.norm(&mat_vec(&kt, xh)) / (nx * ndt));

        let nbar = c.nijenhuis(xh, &dt);
        let expected = lift(&mat_vec(&bt.n3, x), dot(&bt.n4, x));
        bump(&mut m, NBAR_VERTICAL, c.norm(&sub(&nbar, &expected)) / (nx * ndt));

        for (y, yh) in &lifts {
            let ny = c.norm(yh);
            let nn = nx * ny;
            let gxy = base.g(x, y);
            let mut expected = c.gamma.contract(xh, yh);
            let base_part = lift(&base.gamma.contract(x, y), gxy);
            axpy(-1.0, &base_part, &mut expected);
            bump(&mut m, PRODUCT_CONNECTION, c.norm(&expected) / nn);

            let mut want = mat_vec(&bt.nabla_phi_along(x), y);
            axpy(-gxy, &base.xi.value, &mut want);
            axpy(base.eta_of(y), x, &mut want);
            let neta = {
                let mut row = vec![0.0; d];
                for (xi_, r) in x.iter().zip(&bt.nabla_eta) {
                    axpy(*xi_, r, &mut row);
                }
                row
            };
            let t_part = -(base.g(&base.phi_of(x), y) + dot(&neta, y));
            let got = mat_vec(&kx, yh);
            bump(&mut m, NABLA_J_BASE, c.norm(&sub(&got, &lift(&want, t_part))) / nn);

            let nbar = c.nijenhuis(xh, yh);
            let n1 = bt.n1_of(x, y);
            let n2 = DerivedTensors::bilinear(&bt.n2, x, y);
            bump(&mut m, NBAR_MINUS, c.norm(&sub(&nbar, &lift(&n1, -n2))) / nn);
            bump(&mut m, NBAR_PLUS, c.norm(&sub(&nbar, &lift(&n1, n2))) / nn);
            bump(&mut m, N2_SIZE, c.norm(&lift(&vec![0.0; d], n2)) / nn);
        }
    }
    Ok(m)
}

fn cone_sups(c: &ConeStructure, samples: &[Sample]) -> Result<Vec<Sup>> {
    let per_point = map_samples(samples, |smp| cone_measures_at(&c.geometry_at(&smp.point)?, &smp.vectors))?;
    let mut sups = vec![Sup::default(); CONE_MEASURES];
    for (smp, ms) in samples.iter().zip(&per_point) {
        for (sup, v) in sups.iter_mut().zip(ms) {
            sup.observe(*v, smp.point.coords());
        }
    }
    Ok(sups)
}

/// Samples with `t` pinned to `t`, or free when `None`.
fn slice_samples(c: &ConeStructure, plan: &SamplingPlan, t: Option<f64>) -> Vec<Sample> {
    match t {
        Some(t) => plan.draw_with_last(&c.domain, &vec![t; plan.points]),
        None => plan.draw(&c.domain),
    }
}

fn class_reports(sups: &[Sup], policy: &TolerancePolicy) -> Vec<ResidualReport> {
    HermitianClass::ALL.iter().enumerate().map(|(i, h)| ResidualReport::from_sup(h.name(), &sups[i], policy)).collect()
}

/// Sup over the plan of `|∇̄_X Y − ∇_X Y − g(X,Y)∂t|`, `|∇̄_X ∂t + X|`,
/// `|∇̄_∂t X + X|`, `|∇̄_∂t ∂t + ∂t|`.
pub fn product_connection_residual(c: &ConeStructure, plan: &SamplingPlan) -> Result<f64> {
    Ok(cone_sups(c, &plan.draw(&c.domain))?[PRODUCT_CONNECTION].value)
}

/// Sup of the deviation of `∇̄J̄` from its expression through base data.
pub fn nabla_jbar_residual(c: &ConeStructure, plan: &SamplingPlan) -> Result<f64> {
    let sups = cone_sups(c, &plan.draw(&c.domain))?;
    Ok(sups[NABLA_J_BASE].value.max(sups[NABLA_J_VERTICAL].value))
}

/// Deviation of `N_J̄` from `N⁽¹⁾ ± N⁽²⁾∂t` (tangent arguments) and from
/// `N⁽³⁾X + N⁽⁴⁾(X)∂t` (mixed arguments).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NijenhuisSplit {
    pub minus: f64,
    pub plus: f64,
    pub vertical: f64,
    /// Size of the `N⁽²⁾` term; the sign is only determined when this is
    /// well above rounding.
    pub n2_size: f64,
}

impl NijenhuisSplit {
    /// `Some(−1.0)` or `Some(1.0)` if one sign fits and the other does not.
    pub fn sign(&self) -> Option<f64> {
        if self.n2_size < 1e-6 {
            None
        } else if self.minus < self.plus {
            Some(-1.0)
        } else {
            Some(1.0)
        }
    }

    pub fn residual(&self) -> f64 {
        self.minus.min(self.plus).max(self.vertical)
    }
}

pub fn nijenhuis_bar_residual(c: &ConeStructure, plan: &SamplingPlan) -> Result<NijenhuisSplit> {
    let sups = cone_sups(c, &plan.draw(&c.domain))?;
    Ok(NijenhuisSplit {
        minus: sups[NBAR_MINUS].value,
        plus: sups[NBAR_PLUS].value,
        vertical: sups[NBAR_VERTICAL].value,
        n2_size: sups[N2_SIZE].value,
    })
}

pub fn hermitian_class_residuals(
    c: &ConeStructure,
    plan: &SamplingPlan,
    policy: &TolerancePolicy,
) -> Result<Vec<ResidualReport>> {
    Ok(class_reports(&cone_sups(c, &plan.draw(&c.domain))?, policy))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSlice {
    /// `None` for the slice with random `t`.
    pub t: Option<f64>,
    pub classes: Vec<ResidualReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeReport {
    pub structure: String,
    pub plan: SamplingPlan,
    pub policy: TolerancePolicy,
    /// Sup over all slices.
    pub classes: Vec<ResidualReport>,
    pub slices: Vec<ConeSlice>,
    pub identities: Vec<IdentityCheck>,
    pub nijenhuis: NijenhuisSplit,
    /// Base verdicts and cone classes compared pairwise, plus the
    /// inclusions between classes and `t`-independence.
    pub correspondences: Vec<ImplicationOutcome>,
}

impl ConeReport {
    pub fn class(&self, h: HermitianClass) -> &ResidualReport {
        &self.classes[h as usize]
    }

    pub fn failures(&self) -> Vec<String> {
        self.identities
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.clone())
            .chain(self.correspondences.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.name.clone()))
            .collect()
    }
}

fn identity(name: &str, residual: f64, threshold: f64) -> IdentityCheck {
    let status = if residual < threshold { CheckStatus::Pass } else { CheckStatus::Fail };
    IdentityCheck { name: name.into(), residual, threshold, status }
}

fn agreement(name: &str, base: &ResidualReport, cone: &ResidualReport) -> ImplicationOutcome {
    let status = match (base.verdict, cone.verdict) {
        (Verdict::Vacuous, _) | (_, Verdict::Vacuous) => CheckStatus::Vacuous,
        (a, b) if a == b && a != Verdict::Indeterminate => CheckStatus::Pass,
        (Verdict::Holds, Verdict::Fails) | (Verdict::Fails, Verdict::Holds) => CheckStatus::Fail,
        _ => CheckStatus::Indeterminate,
    };
    ImplicationOutcome {
        name: name.into(),
        status,
        detail: format!(
            "base {}={:.3e} ({}), cone {}={:.3e} ({})",
            base.name,
            base.residual,
            base.verdict.as_str(),
            cone.name,
            cone.residual,
            cone.verdict.as_str()
        ),
    }
}

/// `antecedents < a_tol ⇒ consequents < c_tol`, vacuous otherwise.
fn inclusion(name: &str, antecedents: &[&ResidualReport], a_tol: f64, consequents: &[&ResidualReport], c_tol: f64) -> ImplicationOutcome {
    let holds = antecedents.iter().all(|r| r.residual < a_tol);
    let status = if !holds {
        CheckStatus::Vacuous
    } else if consequents.iter().all(|r| r.residual < c_tol) {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    let show = |rs: &[&ResidualReport]| rs.iter().map(|r| format!("{}={:.3e}", r.name, r.residual)).collect::<Vec<_>>().join(", ");
    ImplicationOutcome { name: name.into(), status, detail: format!("{} => {}", show(antecedents), show(consequents)) }
}

/// Classify the base, build the cone, and compare. Each `t` slice
/// (`−1, 0, 1` and random) uses `plan`.
pub fn correspondence_suite(s: &AcmStructure, plan: &SamplingPlan, policy: &TolerancePolicy) -> Result<ConeReport> {
    let base = classify(s, plan, policy)?;
    let cone = build_cone(s)?;
    correspondence_with_base(&cone, &base, plan, policy)
}

pub fn correspondence_with_base(
    cone: &ConeStructure,
    base: &ClassificationReport,
    plan: &SamplingPlan,
    policy: &TolerancePolicy,
) -> Result<ConeReport> {
    let mut slices = Vec::new();
    let mut all = vec![Sup::default(); CONE_MEASURES];
    for t in T_SLICES.iter().map(|t| Some(*t)).chain([None]) {
        let sups = cone_sups(cone, &slice_samples(cone, plan, t))?;
        for (a, s) in all.iter_mut().zip(&sups) {
            a.merge(s);
        }
        slices.push(ConeSlice { t, classes: class_reports(&sups, policy) });
    }
    let classes = class_reports(&all, policy);
    let nijenhuis = NijenhuisSplit {
        minus: all[NBAR_MINUS].value,
        plus: all[NBAR_PLUS].value,
        vertical: all[NBAR_VERTICAL].value,
        n2_size: all[N2_SIZE].value,
    };
    let identities = vec![
        identity("cone_connection_from_base", all[PRODUCT_CONNECTION].value, 1e-10),
        identity("cone_nabla_j_tangent", all[NABLA_J_BASE].value, 1e-9),
        identity("cone_nabla_j_vertical", all[NABLA_J_VERTICAL].value, 1e-9),
        identity("cone_nijenhuis_tangent", nijenhuis.minus.min(nijenhuis.plus), 1e-9),
        identity("cone_nijenhuis_vertical", nijenhuis.vertical, 1e-9),
        identity("cone_kaehler_form_closedness_dual", all[KAEHLER_FORM_DUAL].value, 1e-9),
    ];
    let c = |h: HermitianClass| &classes[h as usize];
    use HermitianClass as Hc;
    let mut correspondences = vec![
        agreement("sasakian_iff_cone_kaehler", base.condition(ConditionId::Sasakian), c(Hc::Kaehler)),
        agreement("contact_iff_cone_almost_kaehler", base.condition(ConditionId::ContactMetric), c(Hc::AlmostKaehler)),
        agreement("split_conditions_iff_cone_quasi_kaehler", base.condition(ConditionId::QuasiContactSplit), c(Hc::QuasiKaehler)),
        agreement("c1_iff_cone_quasi_kaehler", base.condition(ConditionId::QuasiContactC1), c(Hc::QuasiKaehler)),
        agreement("normal_iff_cone_hermitian", base.condition(ConditionId::Normal), c(Hc::Hermitian)),
        inclusion(
            "kaehler_implies_almost_nearly_quasi_kaehler",
            &[c(Hc::Kaehler)],
            1e-9,
            &[c(Hc::AlmostKaehler), c(Hc::NearlyKaehler), c(Hc::QuasiKaehler)],
            1e-8,
        ),
        inclusion("almost_and_nearly_kaehler_imply_kaehler", &[c(Hc::AlmostKaehler), c(Hc::NearlyKaehler)], 1e-8, &[c(Hc::Kaehler)], 1e-7),
        inclusion("quasi_kaehler_and_hermitian_imply_kaehler", &[c(Hc::QuasiKaehler), c(Hc::Hermitian)], 1e-8, &[c(Hc::Kaehler)], 1e-7),
    ];
    for h in HermitianClass::ALL {
        let verdicts: Vec<Verdict> = slices.iter().map(|s| s.classes[h as usize].verdict).collect();
        let status = if verdicts.contains(&Verdict::Indeterminate) {
            CheckStatus::Indeterminate
        } else if verdicts.windows(2).all(|w| w[0] == w[1]) {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        correspondences.push(ImplicationOutcome {
            name: format!("{}_independent_of_t", h.name()),
            status,
            detail: verdicts.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", "),
        });
    }
    Ok(ConeReport {
        structure: base.structure.clone(),
        plan: *plan,
        policy: *policy,
        classes,
        slices,
        identities,
        nijenhuis,
        correspondences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn cone_of_axiom_violator_is_rejected() {
        let s = catalog::eta_scaled(&catalog::standard_darboux(1).structure, 2.0).unwrap();
        assert!(matches!(build_cone(&s), Err(Error::AxiomFailure { .. })));
    }

    #[test]
    fn cone_structure_is_almost_hermitian() {
        let c = build_cone(&catalog::motion_group_contact().structure).unwrap();
        let q = ChartPoint::new(vec![0.2, -0.5, 0.3, 0.7]).unwrap();
        let g = c.geometry_at(&q).unwrap();
        let j = &g.jbar.value;
        let jj = crate::kernel::mat_mul(j, j);
        for (i, row) in jj.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let want = if i == k { -1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
        for u in 0..4 {
            for v in 0..4 {
                let (eu, ev) = (basis(4, u), basis(4, v));
                let lhs = g.metric.inner(&g.jbar.apply_value(&eu), &g.jbar.apply_value(&ev));
                assert!((lhs - g.metric.inner(&eu, &ev)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn darboux_cone_is_kaehler() {
        let r = correspondence_suite(&catalog::standard_darboux(1).structure, &SamplingPlan::new(8, 3, 1), &TolerancePolicy::default())
            .unwrap();
        for h in HermitianClass::ALL {
            assert_eq!(r.class(h).verdict, Verdict::Holds, "{:?}", r.class(h));
        }
        assert!(r.failures().is_empty(), "{:?}", r.failures());
    }

    #[test]
    fn cosymplectic_cone_is_hermitian_not_quasi_kaehler() {
        let r = correspondence_suite(&catalog::cosymplectic_flat(1).structure, &SamplingPlan::new(8, 3, 1), &TolerancePolicy::default())
            .unwrap();
        assert!(r.class(HermitianClass::Hermitian).residual < 1e-9);
        assert!(r.class(HermitianClass::QuasiKaehler).residual >= 1.0);
        assert!(r.failures().is_empty(), "{:?}", r.failures());
    }
}
