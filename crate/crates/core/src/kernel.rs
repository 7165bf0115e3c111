//! Pointwise tensor calculus on a single coordinate chart.
//!
//! Fields are given as coordinate expressions and evaluated to first-order
//! jets at a point; every derivative entering a bracket, a connection or an
//! exterior derivative comes from jet arithmetic. Composite fields such as
//! `φX` are formed by multiplying jets, which is the same as differentiating
//! the composed expression.
//!
//! Index conventions: `jac[k][i] = ∂_i V^k`, `deriv[i][k][j] = ∂_i φ^k_j`,
//! `dg[k][i][j] = ∂_k g_ij`, `gamma[k][i][j] = Γ^k_ij`.

use crate::error::{Error, Result};
use crate::expr::CoordExpr;
use crate::jet::{eval_jet1, eval_jet2, ScalarJet1, ScalarJet2};

pub type Vector = Vec<f64>;
pub type Matrix = Vec<Vec<f64>>;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn mat_vec(m: &Matrix, v: &[f64]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

pub(crate) fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn scale(alpha: f64, x: &[f64]) -> Vector {
    x.iter().map(|v| alpha * v).collect()
}

pub(crate) fn zeros(d: usize) -> Matrix {
    vec![vec![0.0; d]; d]
}

pub(crate) fn basis(d: usize, i: usize) -> Vector {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// A point of the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("chart point needs at least one coordinate".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!("non-finite coordinate {c}")));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

fn check_dim(what: &str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what: what.into(), expected, found })
    }
}

fn jets(exprs: &[CoordExpr], p: &[f64]) -> Result<Vec<ScalarJet1>> {
    exprs.iter().map(|e| eval_jet1(e, p)).collect()
}

fn split_jets(js: Vec<ScalarJet1>) -> (Vector, Matrix) {
    js.into_iter().map(|j| (j.value, j.gradient)).unzip()
}

// ---------------------------------------------------------------------------
// Field expressions

/// Vector field `V^k ∂_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldExpr(pub Vec<CoordExpr>);

impl VectorFieldExpr {
    pub fn constant(v: &[f64]) -> Self {
        Self(v.iter().map(|c| CoordExpr::constant(*c)).collect())
    }

    /// Coordinate field `∂_i` on a chart of dimension `d`.
    pub fn coordinate(i: usize, d: usize) -> Self {
        Self::constant(&basis(d, i))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn jet_at(&self, p: &ChartPoint) -> Result<VectorJet> {
        check_dim("vector field", p.dim(), self.dim())?;
        let (value, jac) = split_jets(jets(&self.0, p.coords())?);
        Ok(VectorJet { value, jac })
    }
}

/// One-form `η_j dx^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormFieldExpr(pub Vec<CoordExpr>);

impl OneFormFieldExpr {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn jet_at(&self, p: &ChartPoint) -> Result<CovectorJet> {
        check_dim("one-form", p.dim(), self.dim())?;
        let (value, jac) = split_jets(jets(&self.0, p.coords())?);
        Ok(CovectorJet { value, jac })
    }

    /// Second-order jets of the components, for exterior derivatives of `dη`.
    pub fn jet2_at(&self, p: &ChartPoint) -> Result<Vec<ScalarJet2>> {
        check_dim("one-form", p.dim(), self.dim())?;
        self.0.iter().map(|e| eval_jet2(e, p.coords())).collect()
    }
}

fn square_jets(rows: &[Vec<CoordExpr>], what: &str, p: &ChartPoint) -> Result<(Matrix, Vec<Matrix>)> {
    let d = p.dim();
    check_dim(what, d, rows.len())?;
    let mut value = zeros(d);
    let mut deriv = vec![zeros(d); d];
    for (k, row) in rows.iter().enumerate() {
        check_dim(what, d, row.len())?;
        for (j, e) in row.iter().enumerate() {
            let jet = eval_jet1(e, p.coords())?;
            value[k][j] = jet.value;
            for (i, g) in jet.gradient.iter().enumerate() {
                deriv[i][k][j] = *g;
            }
        }
    }
    Ok((value, deriv))
}

/// (1,1) tensor field, `rows[k][j] = φ^k_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor11FieldExpr(pub Vec<Vec<CoordExpr>>);

impl Tensor11FieldExpr {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn jet_at(&self, p: &ChartPoint) -> Result<Tensor11Jet> {
        let (value, deriv) = square_jets(&self.0, "(1,1) tensor", p)?;
        Ok(Tensor11Jet { value, deriv })
    }

    /// The field `φX` as an expression.
    pub fn apply(&self, x: &VectorFieldExpr) -> VectorFieldExpr {
        VectorFieldExpr(
            self.0
                .iter()
                .map(|row| CoordExpr::sum_all(row.iter().zip(&x.0).map(|(a, b)| a.clone() * b.clone())))
                .collect(),
        )
    }
}

/// Symmetric (0,2) tensor field `g_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricFieldExpr(pub Vec<Vec<CoordExpr>>);

impl MetricFieldExpr {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn at(&self, p: &ChartPoint) -> Result<MetricAtPoint> {
        let (g, dg) = square_jets(&self.0, "metric", p)?;
        MetricAtPoint::new(g, dg, p)
    }
}

/// Antisymmetric (0,2) tensor field `ω_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormFieldExpr(pub Vec<Vec<CoordExpr>>);

impl TwoFormFieldExpr {
    pub fn jet_at(&self, p: &ChartPoint) -> Result<TwoFormJet> {
        let (value, d) = square_jets(&self.0, "two-form", p)?;
        Ok(TwoFormJet { value, deriv: d })
    }
}

// ---------------------------------------------------------------------------
// Jets of fields at a point

/// First-order jet of a vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorJet {
    pub value: Vector,
    pub jac: Matrix,
}

impl VectorJet {
    /// Constant-coefficient field through `v`.
    pub fn constant(v: &[f64]) -> Self {
        Self { value: v.to_vec(), jac: zeros(v.len()) }
    }

    pub fn dim(&self) -> usize {
        self.value.len()
    }

    /// Directional derivative `X(V)` of this field along `dir`.
    pub fn derivative_along(&self, dir: &[f64]) -> Vector {
        mat_vec(&self.jac, dir)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            value: scale(alpha, &self.value),
            jac: self.jac.iter().map(|r| scale(alpha, r)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            value: self.value.iter().zip(&other.value).map(|(a, b)| a + b).collect(),
            jac: self
                .jac
                .iter()
                .zip(&other.jac)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    /// `f V` for a scalar jet `f`.
    pub fn times_scalar(&self, f: &ScalarJet1) -> Self {
        Self {
            value: scale(f.value, &self.value),
            jac: self
                .jac
                .iter()
                .zip(&self.value)
                .map(|(row, vk)| row.iter().zip(&f.gradient).map(|(dv, df)| f.value * dv + vk * df).collect())
                .collect(),
        }
    }
}

/// First-order jet of a one-form.
#[derive(Clone, Debug, PartialEq)]
pub struct CovectorJet {
    pub value: Vector,
    pub jac: Matrix,
}

impl CovectorJet {
    /// The scalar field `η(X)` as a jet.
    pub fn pair(&self, x: &VectorJet) -> ScalarJet1 {
        let d = self.value.len();
        ScalarJet1 {
            value: dot(&self.value, &x.value),
            gradient: (0..d)
                .map(|i| (0..d).map(|j| self.jac[j][i] * x.value[j] + self.value[j] * x.jac[j][i]).sum())
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.value, x)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            value: scale(alpha, &self.value),
            jac: self.jac.iter().map(|r| scale(alpha, r)).collect(),
        }
    }
}

/// First-order jet of a (1,1) tensor field.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor11Jet {
    pub value: Matrix,
    pub deriv: Vec<Matrix>,
}

impl Tensor11Jet {
    pub fn dim(&self) -> usize {
        self.value.len()
    }

    /// The composite field `φX` as a jet.
    pub fn apply(&self, x: &VectorJet) -> VectorJet {
        let d = self.dim();
        let value = mat_vec(&self.value, &x.value);
        let mut jac = zeros(d);
        for (k, row) in jac.iter_mut().enumerate() {
            for (i, entry) in row.iter_mut().enumerate() {
                *entry = (0..d).map(|j| self.deriv[i][k][j] * x.value[j] + self.value[k][j] * x.jac[j][i]).sum();
            }
        }
        VectorJet { value, jac }
    }

    pub fn apply_value(&self, x: &[f64]) -> Vector {
        mat_vec(&self.value, x)
    }
}

/// First-order jet of a two-form.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormJet {
    pub value: Matrix,
    /// `deriv[k][i][j] = ∂_k ω_ij`
    pub deriv: Vec<Matrix>,
}

impl TwoFormJet {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &mat_vec(&self.value, y))
    }

    /// `ω(X, Y)` as a scalar jet.
    pub fn pair(&self, x: &VectorJet, y: &VectorJet) -> ScalarJet1 {
        let d = self.value.len();
        let gradient = (0..d)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        s += self.deriv[k][i][j] * x.value[i] * y.value[j]
                            + self.value[i][j] * (x.jac[i][k] * y.value[j] + x.value[i] * y.jac[j][k]);
                    }
                }
                s
            })
            .collect();
        ScalarJet1 { value: self.eval(&x.value, &y.value), gradient }
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let d = self.value.len();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                worst = worst.max((self.value[i][j] + self.value[j][i]).abs());
            }
        }
        worst
    }
}

/// Metric, inverse and first derivatives at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricAtPoint {
    pub g: Matrix,
    pub g_inv: Matrix,
    pub dg: Vec<Matrix>,
}

impl MetricAtPoint {
    /// Factorizes `g`; fails with `SingularMetric` unless it is symmetric
    /// positive definite.
    pub fn new(g: Matrix, dg: Vec<Matrix>, p: &ChartPoint) -> Result<Self> {
        let singular = || Error::SingularMetric { point: p.coords().to_vec() };
        let d = g.len();
        let scale_ = g.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..d {
            for j in 0..i {
                if (g[i][j] - g[j][i]).abs() > 1e-12 * scale_ {
                    return Err(singular());
                }
            }
        }
        let l = cholesky(&g).ok_or_else(singular)?;
        let g_inv = cholesky_inverse(&l);
        Ok(Self { g, g_inv, dg })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &mat_vec(&self.g, y))
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Index lowering `X ↦ g(X, ·)`.
    pub fn flat(&self, x: &[f64]) -> Vector {
        mat_vec(&self.g, x)
    }

    /// Index raising.
    pub fn sharp(&self, w: &[f64]) -> Vector {
        mat_vec(&self.g_inv, w)
    }

    /// `max |g g⁻¹ - I|`.
    pub fn inverse_defect(&self) -> f64 {
        let prod = mat_mul(&self.g, &self.g_inv);
        let mut worst = 0.0f64;
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// `g(X, Y)` as a scalar jet.
    pub fn pair(&self, x: &VectorJet, y: &VectorJet) -> ScalarJet1 {
        TwoFormJet { value: self.g.clone(), deriv: self.dg.clone() }.pair(x, y)
    }
}

fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut l = zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = a[i][i] - s;
                if !(v > 0.0) || !v.is_finite() {
                    return None;
                }
                l[i][j] = v.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_inverse(l: &Matrix) -> Matrix {
    let n = l.len();
    let mut inv = zeros(n);
    for c in 0..n {
        // Solve L y = e_c, then Lᵀ x = y.
        let mut y = vec![0.0; n];
        for i in 0..n {
            let rhs = if i == c { 1.0 } else { 0.0 };
            y[i] = (rhs - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
        }
        for (r, v) in x.into_iter().enumerate() {
            inv[r][c] = v;
        }
    }
    // Symmetrize away rounding.
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (inv[i][j] + inv[j][i]);
            inv[i][j] = m;
            inv[j][i] = m;
        }
    }
    inv
}

/// Levi-Civita connection coefficients at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub gamma: Vec<Matrix>,
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`, filled for `i ≤ j` and
/// mirrored so the lower indices are exactly symmetric.
pub fn christoffel(m: &MetricAtPoint) -> Christoffel {
    let d = m.dim();
    let mut gamma = vec![zeros(d); d];
    for i in 0..d {
        for j in i..d {
            let lowered: Vector =
                (0..d).map(|l| 0.5 * (m.dg[i][j][l] + m.dg[j][i][l] - m.dg[l][i][j])).collect();
            let raised = m.sharp(&lowered);
            for k in 0..d {
                gamma[k][i][j] = raised[k];
                gamma[k][j][i] = raised[k];
            }
        }
    }
    Christoffel { gamma }
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `Γ(X, Y)^k = Γ^k_ij X^i Y^j`.
    pub fn contract(&self, x: &[f64], y: &[f64]) -> Vector {
        self.gamma.iter().map(|gk| dot(x, &mat_vec(gk, y))).collect()
    }

    /// `∇_X Y` for a field `Y` given by its jet.
    pub fn nabla_vector(&self, x: &[f64], y: &VectorJet) -> Vector {
        let mut out = y.derivative_along(x);
        axpy(1.0, &self.contract(x, &y.value), &mut out);
        out
    }

    /// Components `(∇_X η)_j`.
    pub fn nabla_covector(&self, x: &[f64], eta: &CovectorJet) -> Vector {
        let d = self.dim();
        (0..d)
            .map(|j| {
                let mut s: f64 = (0..d).map(|i| x[i] * eta.jac[j][i]).sum();
                for l in 0..d {
                    let g: f64 = (0..d).map(|i| x[i] * self.gamma[l][i][j]).sum();
                    s -= g * eta.value[l];
                }
                s
            })
            .collect()
    }

    /// Matrix of `∇_X φ`.
    pub fn nabla_tensor11(&self, x: &[f64], phi: &Tensor11Jet) -> Matrix {
        let d = self.dim();
        // A^k_l = Γ^k_il X^i
        let a: Matrix = (0..d).map(|k| (0..d).map(|l| (0..d).map(|i| x[i] * self.gamma[k][i][l]).sum()).collect()).collect();
        let mut out = zeros(d);
        for k in 0..d {
            for j in 0..d {
                let mut s: f64 = (0..d).map(|i| x[i] * phi.deriv[i][k][j]).sum();
                for l in 0..d {
                    s += a[k][l] * phi.value[l][j] - phi.value[k][l] * a[l][j];
                }
                out[k][j] = s;
            }
        }
        out
    }
}

/// `[X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k`.
pub fn lie_bracket(x: &VectorJet, y: &VectorJet) -> Vector {
    sub(&y.derivative_along(&x.value), &x.derivative_along(&y.value))
}

/// `[X, Y]` of two vector field expressions at `p`.
pub fn lie_bracket_at(x: &VectorFieldExpr, y: &VectorFieldExpr, p: &ChartPoint) -> Result<Vector> {
    Ok(lie_bracket(&x.jet_at(p)?, &y.jet_at(p)?))
}

/// Tensor jets accepted by [`cov_deriv`].
#[derive(Clone, Debug, PartialEq)]
pub enum TensorJet {
    Vector(VectorJet),
    Covector(CovectorJet),
    Tensor11(Tensor11Jet),
    Covariant2(TwoFormJet),
}

/// Value of a covariant derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorValue {
    Vector(Vector),
    Covector(Vector),
    Tensor11(Matrix),
}

/// `∇_X T` for valence (1,0), (0,1) or (1,1).
pub fn cov_deriv(t: &TensorJet, x: &[f64], gamma: &Christoffel) -> Result<TensorValue> {
    match t {
        TensorJet::Vector(v) => Ok(TensorValue::Vector(gamma.nabla_vector(x, v))),
        TensorJet::Covector(w) => Ok(TensorValue::Covector(gamma.nabla_covector(x, w))),
        TensorJet::Tensor11(phi) => Ok(TensorValue::Tensor11(gamma.nabla_tensor11(x, phi))),
        TensorJet::Covariant2(_) => Err(Error::UnsupportedValence("(0,2)".into())),
    }
}

/// `(L_ξ φ)X = [ξ, φX] − φ[ξ, X]`.
pub fn lie_deriv_tensor11(xi: &VectorJet, phi: &Tensor11Jet, x: &VectorJet) -> Vector {
    let phi_x = phi.apply(x);
    sub(&lie_bracket(xi, &phi_x), &phi.apply_value(&lie_bracket(xi, x)))
}

/// `(L_A η)(B) = A(η(B)) − η([A, B])`.
pub fn lie_deriv_covector(a: &VectorJet, eta: &CovectorJet, b: &VectorJet) -> f64 {
    eta.pair(b).directional(&a.value) - eta.eval(&lie_bracket(a, b))
}

/// `(L_ξ g)(X, Y) = ξ(g(X,Y)) − g([ξ,X], Y) − g(X, [ξ,Y])`.
pub fn lie_deriv_metric(xi: &VectorJet, m: &MetricAtPoint, x: &VectorJet, y: &VectorJet) -> f64 {
    m.pair(x, y).directional(&xi.value)
        - m.inner(&lie_bracket(xi, x), &y.value)
        - m.inner(&x.value, &lie_bracket(xi, y))
}

/// `dη(X, Y) = ½(X(η(Y)) − Y(η(X)) − η([X, Y]))`.
pub fn exterior_d1(eta: &CovectorJet, x: &VectorJet, y: &VectorJet) -> f64 {
    0.5 * (eta.pair(y).directional(&x.value) - eta.pair(x).directional(&y.value) - eta.eval(&lie_bracket(x, y)))
}

/// The two-form `dη` with components `½(∂_i η_j − ∂_j η_i)` and their
/// first derivatives, built from second-order jets of `η`.
pub fn exterior_d1_form(eta: &[ScalarJet2]) -> TwoFormJet {
    let d = eta.len();
    let mut value = zeros(d);
    let mut deriv = vec![zeros(d); d];
    for i in 0..d {
        for j in 0..d {
            value[i][j] = 0.5 * (eta[j].gradient[i] - eta[i].gradient[j]);
            for k in 0..d {
                deriv[k][i][j] = 0.5 * (eta[j].hessian[i][k] - eta[i].hessian[j][k]);
            }
        }
    }
    TwoFormJet { value, deriv }
}

/// Tolerance on `|ω_ij + ω_ji|` accepted by [`exterior_d2`].
pub const ANTISYMMETRY_TOL: f64 = 1e-10;

/// `dω(X,Y,Z) = ⅓(X ω(Y,Z) + Y ω(Z,X) + Z ω(X,Y) − ω([X,Y],Z) − ω([Y,Z],X) − ω([Z,X],Y))`.
pub fn exterior_d2(omega: &TwoFormJet, x: &VectorJet, y: &VectorJet, z: &VectorJet) -> Result<f64> {
    let defect = omega.antisymmetry_defect();
    if defect > ANTISYMMETRY_TOL {
        return Err(Error::NotAntisymmetric(defect));
    }
    let derivs = omega.pair(y, z).directional(&x.value)
        + omega.pair(z, x).directional(&y.value)
        + omega.pair(x, y).directional(&z.value);
    let brackets = omega.eval(&lie_bracket(x, y), &z.value)
        + omega.eval(&lie_bracket(y, z), &x.value)
        + omega.eval(&lie_bracket(z, x), &y.value);
    Ok((derivs - brackets) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> CoordExpr {
        CoordExpr::var(i)
    }

    fn pt(c: &[f64]) -> ChartPoint {
        ChartPoint::new(c.to_vec()).unwrap()
    }

    fn polar_metric() -> MetricFieldExpr {
        MetricFieldExpr(vec![vec![1.0.into(), 0.0.into()], vec![0.0.into(), x(0).powi(2)]])
    }

    #[test]
    fn coordinate_fields_commute() {
        let b = lie_bracket_at(&VectorFieldExpr::coordinate(0, 2), &VectorFieldExpr::coordinate(1, 2), &pt(&[0.3, 0.4]))
            .unwrap();
        assert_eq!(b, vec![0.0, 0.0]);
    }

    #[test]
    fn bracket_of_shear_field() {
        let xf = VectorFieldExpr(vec![x(1), 0.0.into()]);
        let yf = VectorFieldExpr::coordinate(1, 2);
        for p in [[0.0, 0.0], [1.5, -2.0]] {
            assert_eq!(lie_bracket_at(&xf, &yf, &pt(&p)).unwrap(), vec![-1.0, 0.0]);
        }
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let f = VectorFieldExpr(vec![x(0) * x(1), x(0).sin(), x(1).exp()]);
        let b = lie_bracket_at(&f, &f, &pt(&[0.2, 0.7, -0.1])).unwrap();
        assert!(b.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn flat_metric_has_no_christoffels() {
        let id = MetricFieldExpr((0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }.into()).collect()).collect());
        let c = christoffel(&id.at(&pt(&[0.1, 0.2, 0.3])).unwrap());
        assert!(c.gamma.iter().flatten().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn polar_christoffels() {
        let c = christoffel(&polar_metric().at(&pt(&[2.0, 0.3])).unwrap());
        let expected = [[[0.0, 0.0], [0.0, -2.0]], [[0.0, 0.5], [0.5, 0.0]]];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!((c.gamma[k][i][j] - expected[k][i][j]).abs() < 1e-15, "Γ^{k}_{i}{j}");
                }
            }
        }
    }

    #[test]
    fn singular_metric_is_rejected() {
        let err = polar_metric().at(&pt(&[0.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::SingularMetric { point: vec![0.0, 1.0] });
    }

    #[test]
    fn nabla_of_radial_field_on_flat_plane() {
        let flat = MetricFieldExpr(vec![vec![1.0.into(), 0.0.into()], vec![0.0.into(), 1.0.into()]]);
        let p = pt(&[0.7, -0.2]);
        let c = christoffel(&flat.at(&p).unwrap());
        let y = VectorFieldExpr(vec![x(0), 0.0.into()]).jet_at(&p).unwrap();
        assert_eq!(c.nabla_vector(&[1.0, 0.0], &y), vec![1.0, 0.0]);
    }

    #[test]
    fn covariant_two_tensors_are_unsupported() {
        let p = pt(&[1.0, 1.0]);
        let c = christoffel(&polar_metric().at(&p).unwrap());
        let form = TwoFormJet { value: zeros(2), deriv: vec![zeros(2); 2] };
        assert!(matches!(cov_deriv(&TensorJet::Covariant2(form), &[1.0, 0.0], &c), Err(Error::UnsupportedValence(_))));
    }

    #[test]
    fn exterior_derivative_of_shear_form() {
        // η = x1 dx0 on R³
        let eta = OneFormFieldExpr(vec![x(1), 0.0.into(), 0.0.into()]);
        let p = pt(&[0.4, 0.9, -0.3]);
        let e = eta.jet_at(&p).unwrap();
        let (e0, e1) = (VectorJet::constant(&basis(3, 0)), VectorJet::constant(&basis(3, 1)));
        assert_eq!(exterior_d1(&e, &e0, &e1), -0.5);
        assert_eq!(exterior_d1(&e, &e1, &e0), 0.5);
        let closed = OneFormFieldExpr(vec![0.0.into(), 0.0.into(), 1.0.into()]).jet_at(&p).unwrap();
        assert_eq!(exterior_d1(&closed, &e0, &e1), 0.0);
    }

    #[test]
    fn exterior_d2_rejects_symmetric_input() {
        let omega = TwoFormJet { value: vec![vec![0.0, 1.0], vec![1.0, 0.0]], deriv: vec![zeros(2); 2] };
        let v = VectorJet::constant(&[1.0, 0.0]);
        assert!(matches!(exterior_d2(&omega, &v, &v, &v), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn constant_two_form_is_closed() {
        let omega = TwoFormJet { value: vec![vec![0.0, 2.0, 0.0], vec![-2.0, 0.0, 1.0], vec![0.0, -1.0, 0.0]], deriv: vec![zeros(3); 3] };
        let (a, b, c) = (VectorJet::constant(&[1.0, 0.2, 0.0]), VectorJet::constant(&[0.0, 1.0, 0.5]), VectorJet::constant(&[0.3, 0.0, 1.0]));
        assert_eq!(exterior_d2(&omega, &a, &b, &c).unwrap(), 0.0);
    }
}
