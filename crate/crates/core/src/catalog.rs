//! Built-in structures with known classifications.

use crate::classify::ConditionId;
use crate::error::{Error, Result};
use crate::expr::CoordExpr;
use crate::kernel::{ChartPoint, MetricFieldExpr, OneFormFieldExpr, Tensor11FieldExpr, VectorFieldExpr};
use crate::residual::Verdict;
use crate::sampling::{DomainBox, SamplingPlan};
use crate::structure::AcmStructure;

/// A named structure with the verdicts it is known to have.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub structure: AcmStructure,
    /// Verdicts under the default sampling plan and tolerance policy.
    pub expected: Vec<(ConditionId, Verdict)>,
}

impl CatalogEntry {
    pub fn expected(&self, c: ConditionId) -> Option<Verdict> {
        self.expected.iter().find(|(k, _)| *k == c).map(|(_, v)| *v)
    }
}

fn expr_matrix(d: usize) -> Vec<Vec<CoordExpr>> {
    vec![vec![CoordExpr::zero(); d]; d]
}

/// Mirror the upper triangle so the matrix is structurally symmetric.
pub(crate) fn symmetrize_upper(mut m: Vec<Vec<CoordExpr>>) -> Vec<Vec<CoordExpr>> {
    for i in 0..m.len() {
        for j in 0..i {
            m[i][j] = m[j][i].clone();
        }
    }
    m
}

fn darboux_coords(n: usize) -> Vec<String> {
    if n == 1 {
        return vec!["x".into(), "y".into(), "z".into()];
    }
    let mut c: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    c.extend((1..=n).map(|i| format!("y{i}")));
    c.push("z".into());
    c
}

/// `η = ½(dz − Σ yᵢ dxᵢ)`, coordinates ordered `x₁…xₙ, y₁…yₙ, z`.
fn darboux_eta(n: usize) -> Vec<CoordExpr> {
    let d = 2 * n + 1;
    let mut eta = vec![CoordExpr::zero(); d];
    for i in 0..n {
        eta[i] = -0.5 * CoordExpr::var(n + i);
    }
    eta[2 * n] = CoordExpr::constant(0.5);
    eta
}

/// `g = η⊗η + ¼ Σ (dxᵢ² + dyᵢ²)`
fn darboux_metric(n: usize) -> Vec<Vec<CoordExpr>> {
    let d = 2 * n + 1;
    let eta = darboux_eta(n);
    let mut g = expr_matrix(d);
    for a in 0..d {
        for b in a..d {
            let mut e = eta[a].clone() * eta[b].clone();
            if a == b && a < 2 * n {
                e = e + 0.25;
            }
            g[a][b] = e;
        }
    }
    symmetrize_upper(g)
}

/// The standard Sasakian structure on `ℝ^{2n+1}`: `ξ = 2∂z`,
/// `φ∂xᵢ = −∂yᵢ`, `φ∂yᵢ = ∂xᵢ + yᵢ∂z`.
pub fn standard_darboux(n: usize) -> CatalogEntry {
    assert!(n >= 1, "n must be positive");
    let d = 2 * n + 1;
    let mut phi = expr_matrix(d);
    for i in 0..n {
        phi[n + i][i] = CoordExpr::constant(-1.0);
        phi[i][n + i] = CoordExpr::one();
        phi[2 * n][n + i] = CoordExpr::var(n + i);
    }
    let mut xi = vec![CoordExpr::zero(); d];
    xi[2 * n] = CoordExpr::constant(2.0);
    let structure = AcmStructure::new(
        format!("darboux_{d}"),
        darboux_coords(n),
        Tensor11FieldExpr(phi),
        VectorFieldExpr(xi),
        OneFormFieldExpr(darboux_eta(n)),
        MetricFieldExpr(darboux_metric(n)),
        DomainBox::cube(d, 1.0),
    )
    .expect("well-formed");
    CatalogEntry {
        name: structure.name.clone(),
        description: format!("standard Sasakian structure on R^{d} in Darboux coordinates"),
        structure,
        expected: ConditionId::ALL.iter().map(|c| (*c, Verdict::Holds)).collect(),
    }
}

/// Flat cosymplectic structure on `ℝ^{2n+1}`: Euclidean metric,
/// `ξ = ∂z`, `η = dz`, `φ∂xᵢ = ∂yᵢ`, `φ∂yᵢ = −∂xᵢ`.
pub fn cosymplectic_flat(n: usize) -> CatalogEntry {
    assert!(n >= 1, "n must be positive");
    let d = 2 * n + 1;
    let mut phi = expr_matrix(d);
    let mut g = expr_matrix(d);
    for i in 0..n {
        phi[n + i][i] = CoordExpr::one();
        phi[i][n + i] = CoordExpr::constant(-1.0);
    }
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = CoordExpr::one();
    }
    let mut unit_z = vec![CoordExpr::zero(); d];
    unit_z[2 * n] = CoordExpr::one();
    let structure = AcmStructure::new(
        format!("cosymplectic_{d}"),
        darboux_coords(n),
        Tensor11FieldExpr(phi),
        VectorFieldExpr(unit_z.clone()),
        OneFormFieldExpr(unit_z),
        MetricFieldExpr(g),
        DomainBox::cube(d, 1.0),
    )
    .expect("well-formed");
    use ConditionId as C;
    use Verdict::{Fails, Holds};
    CatalogEntry {
        name: structure.name.clone(),
        description: format!("flat cosymplectic structure on R^{d}"),
        structure,
        expected: vec![
            (C::Axioms, Holds),
            (C::ContactMetric, Fails),
            (C::KContact, Fails),
            (C::Sasakian, Fails),
            (C::Normal, Holds),
            (C::QuasiContactC1, Fails),
            (C::QuasiContactC1Prime, Fails),
            (C::QuasiContactSplit, Fails),
            (C::C0, Fails),
            (C::C2, Fails),
            (C::C3, Holds),
            (C::C4, Holds),
            (C::CHSymmetric, Holds),
            (C::N1Zero, Holds),
            (C::N2Zero, Holds),
            (C::N3Zero, Holds),
            (C::N4Zero, Holds),
        ],
    }
}

/// Same `φ, ξ, g` with `η` replaced by `λη`.
pub fn eta_scaled(s: &AcmStructure, lambda: f64) -> Result<AcmStructure> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Invalid(format!("scale factor must be finite and nonzero, got {lambda}")));
    }
    let eta = OneFormFieldExpr(s.eta.0.iter().map(|e| lambda * e.clone()).collect());
    s.with_fields(format!("{}_eta_scaled", s.name), s.phi.clone(), s.xi.clone(), eta, s.g.clone())
}

/// `g + ε·direction` with everything else unchanged. The result need not
/// satisfy the axioms; it is only required to stay positive definite,
/// which is checked on a grid and at random points of the domain.
pub fn metric_perturbed(s: &AcmStructure, eps: f64, direction: &[Vec<CoordExpr>]) -> Result<AcmStructure> {
    let d = s.dim();
    if direction.len() != d || direction.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { what: "perturbation direction".into(), expected: d, found: direction.len() });
    }
    let mut g = expr_matrix(d);
    for i in 0..d {
        for j in i..d {
            g[i][j] = s.g.0[i][j].clone() + eps * direction[i][j].clone();
        }
    }
    let out = s.with_fields(
        format!("{}_metric_perturbed", s.name),
        s.phi.clone(),
        s.xi.clone(),
        s.eta.clone(),
        MetricFieldExpr(symmetrize_upper(g)),
    )?;
    check_positive_definite(&out)?;
    Ok(out)
}

/// Probe the metric at the corners, center and face midpoints of the
/// domain box (for small dimensions) and at random points.
pub(crate) fn check_positive_definite(s: &AcmStructure) -> Result<()> {
    let d = s.dim();
    let mut points: Vec<Vec<f64>> = Vec::new();
    if d <= 7 {
        let total = 3usize.pow(d as u32);
        for mut code in 0..total {
            let p = s
                .domain
                .intervals
                .iter()
                .map(|&(lo, hi)| {
                    let k = code % 3;
                    code /= 3;
                    lo + 0.5 * k as f64 * (hi - lo)
                })
                .collect();
            points.push(p);
        }
    }
    points.extend(SamplingPlan::new(64, 0, 0x5eed).draw(&s.domain).into_iter().map(|smp| smp.point.coords().to_vec()));
    for p in points {
        s.g.at(&ChartPoint::new(p)?)?;
    }
    Ok(())
}

/// Left-invariant contact metric structure on the Euclidean motion group,
/// in coordinates `(x, y, z)` with `z` the rotation angle:
/// `η = cos z dx + sin z dy`, `g = η⊗η + ½θ⊗θ + ½dz⊗dz` with
/// `θ = −sin z dx + cos z dy`. It is contact metric but not K-contact.
pub fn motion_group_contact() -> CatalogEntry {
    let z = CoordExpr::var(2);
    let (c, s) = (z.clone().cos(), z.sin());
    let zero = CoordExpr::zero;
    let phi = vec![
        vec![zero(), zero(), s.clone()],
        vec![zero(), zero(), -c.clone()],
        vec![-s.clone(), c.clone(), zero()],
    ];
    let eta = vec![c.clone(), s.clone(), zero()];
    let mut g = expr_matrix(3);
    g[0][0] = c.clone().powi(2) + 0.5 * s.clone().powi(2);
    g[0][1] = 0.5 * (s.clone() * c.clone());
    g[1][1] = s.clone().powi(2) + 0.5 * c.clone().powi(2);
    g[2][2] = CoordExpr::constant(0.5);
    let structure = AcmStructure::new(
        "motion_group_contact_3",
        vec!["x".into(), "y".into(), "z".into()],
        Tensor11FieldExpr(phi),
        VectorFieldExpr(eta.clone()),
        OneFormFieldExpr(eta),
        MetricFieldExpr(symmetrize_upper(g)),
        DomainBox::cube(3, 1.0),
    )
    .expect("well-formed");
    use ConditionId as C;
    use Verdict::{Fails, Holds};
    CatalogEntry {
        name: structure.name.clone(),
        description: "left-invariant contact metric structure on the Euclidean motion group E(2), not K-contact".into(),
        structure,
        expected: vec![
            (C::Axioms, Holds),
            (C::ContactMetric, Holds),
            (C::KContact, Fails),
            (C::Sasakian, Fails),
            (C::Normal, Fails),
            (C::QuasiContactC1, Holds),
            (C::QuasiContactC1Prime, Holds),
            (C::QuasiContactSplit, Holds),
            (C::C0, Holds),
            (C::C2, Holds),
            (C::C3, Holds),
            (C::C4, Holds),
            (C::CHSymmetric, Holds),
            (C::N1Zero, Fails),
            (C::N2Zero, Holds),
            (C::N3Zero, Fails),
            (C::N4Zero, Holds),
        ],
    }
}

/// Replace `φ` of the standard Sasakian structure by `U φ U⁻¹`, where `U`
/// rotates the orthonormal frame `Eₓ₁ = 2(∂x₁ + y₁∂z)`, `Eₓ₂ = 2(∂x₂ + y₂∂z)`
/// of the contact distribution by `angle`. `ξ, η, g` are unchanged, so
/// the axioms still hold. Needs `n ≥ 2`; `angle` may contain parameters.
pub fn darboux_phi_rotation(n: usize, angle: CoordExpr) -> Tensor11FieldExpr {
    assert!(n >= 2, "the rotation needs two x directions");
    let d = 2 * n + 1;
    let m = 2 * n;
    // Frame of the distribution (columns) and its dual coframe (rows).
    let mut frame = vec![vec![CoordExpr::zero(); m]; d];
    let mut coframe = vec![vec![CoordExpr::zero(); d]; m];
    for i in 0..n {
        frame[i][i] = CoordExpr::constant(2.0);
        frame[2 * n][i] = 2.0 * CoordExpr::var(n + i);
        frame[n + i][n + i] = CoordExpr::constant(2.0);
        coframe[i][i] = CoordExpr::constant(0.5);
        coframe[n + i][n + i] = CoordExpr::constant(0.5);
    }
    let mut j = vec![vec![CoordExpr::zero(); m]; m];
    for i in 0..n {
        j[n + i][i] = CoordExpr::constant(-1.0);
        j[i][n + i] = CoordExpr::one();
    }
    let mut u = vec![vec![CoordExpr::zero(); m]; m];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = CoordExpr::one();
    }
    let (c, s) = (angle.clone().cos(), angle.sin());
    u[0][0] = c.clone();
    u[0][1] = -s.clone();
    u[1][0] = s;
    u[1][1] = c;
    let ut: Vec<Vec<CoordExpr>> = (0..m).map(|a| (0..m).map(|b| u[b][a].clone()).collect()).collect();
    let rotated = expr_mat_mul(&expr_mat_mul(&u, &j), &ut);
    Tensor11FieldExpr(expr_mat_mul(&expr_mat_mul(&frame, &rotated), &coframe))
}

pub(crate) fn expr_mat_mul(a: &[Vec<CoordExpr>], b: &[Vec<CoordExpr>]) -> Vec<Vec<CoordExpr>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|k| CoordExpr::sum_all((0..inner).map(|l| row[l].clone() * b[l][k].clone())))
                .collect()
        })
        .collect()
}

/// Standard Sasakian `ℝ⁵` with `φ` rotated by a fixed angle: an almost
/// contact metric structure that is neither contact nor normal.
pub fn darboux_rotated() -> CatalogEntry {
    let base = standard_darboux(2).structure;
    let structure = base
        .with_fields(
            "darboux_5_phi_rotated",
            darboux_phi_rotation(2, CoordExpr::constant(0.3)),
            base.xi.clone(),
            base.eta.clone(),
            base.g.clone(),
        )
        .expect("well-formed");
    use ConditionId as C;
    use Verdict::{Fails, Holds};
    CatalogEntry {
        name: structure.name.clone(),
        description: "standard Sasakian R^5 with phi conjugated by a frame rotation".into(),
        structure,
        expected: vec![
            (C::Axioms, Holds),
            (C::ContactMetric, Fails),
            (C::KContact, Fails),
            (C::Sasakian, Fails),
            (C::Normal, Fails),
            (C::QuasiContactC1, Fails),
            (C::QuasiContactC1Prime, Fails),
            (C::QuasiContactSplit, Fails),
            (C::C0, Fails),
            (C::C2, Fails),
            (C::C3, Fails),
            (C::C4, Holds),
            (C::CHSymmetric, Holds),
            (C::N1Zero, Fails),
            (C::N2Zero, Fails),
            (C::N3Zero, Holds),
            (C::N4Zero, Holds),
        ],
    }
}

fn gated(name: &str, s: AcmStructure, description: &str) -> CatalogEntry {
    let expected = ConditionId::ALL
        .iter()
        .map(|c| (*c, if *c == ConditionId::Axioms { Verdict::Fails } else { Verdict::Vacuous }))
        .collect();
    CatalogEntry { name: name.into(), description: description.into(), structure: s, expected }
}

/// `dx⊗dx` on a chart of dimension `d`.
pub fn dx_squared(d: usize) -> Vec<Vec<CoordExpr>> {
    let mut p = expr_matrix(d);
    p[0][0] = CoordExpr::one();
    p
}

/// Every built-in entry, in a fixed order.
pub fn entries() -> Vec<CatalogEntry> {
    let darboux3 = standard_darboux(1).structure;
    let scaled = eta_scaled(&darboux3, 2.0).expect("nonzero factor");
    let perturbed = metric_perturbed(&darboux3, 1e-3, &dx_squared(3)).expect("small perturbation stays definite");
    vec![
        standard_darboux(1),
        standard_darboux(2),
        cosymplectic_flat(1),
        cosymplectic_flat(2),
        motion_group_contact(),
        darboux_rotated(),
        gated("darboux_3_eta_scaled", scaled, "standard Sasakian R^3 with eta doubled (violates eta(xi) = 1)"),
        gated(
            "darboux_3_metric_perturbed",
            perturbed,
            "standard Sasakian R^3 with g + 0.001 dx^2 (violates metric compatibility)",
        ),
    ]
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.name == name)
}
