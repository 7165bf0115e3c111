//! Almost contact metric structures `(φ, ξ, η, g)` on one chart and the
//! tensors derived from them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{CoordExpr, ExprNames};
use crate::kernel::{
    axpy, basis, christoffel, dot, exterior_d1, lie_bracket, lie_deriv_covector, lie_deriv_metric,
    lie_deriv_tensor11, mat_vec, scale, sub, zeros, ChartPoint, Christoffel, CovectorJet, Matrix,
    MetricAtPoint, MetricFieldExpr, OneFormFieldExpr, Tensor11FieldExpr, Tensor11Jet, TwoFormJet,
    Vector, VectorFieldExpr, VectorJet,
};
use crate::residual::{ResidualReport, Sup, TolerancePolicy};
use crate::sampling::{DomainBox, Sample, SamplingPlan};

/// An almost contact metric structure on a chart of dimension `2n+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AcmStructure {
    pub name: String,
    pub n: usize,
    pub coords: Vec<String>,
    pub phi: Tensor11FieldExpr,
    pub xi: VectorFieldExpr,
    pub eta: OneFormFieldExpr,
    pub g: MetricFieldExpr,
    pub domain: DomainBox,
}

impl AcmStructure {
    /// Checks shapes and that every expression lives on the chart.
    pub fn new(
        name: impl Into<String>,
        coords: Vec<String>,
        phi: Tensor11FieldExpr,
        xi: VectorFieldExpr,
        eta: OneFormFieldExpr,
        g: MetricFieldExpr,
        domain: DomainBox,
    ) -> Result<Self> {
        let d = coords.len();
        if d < 3 || d % 2 == 0 {
            return Err(Error::Invalid(format!("structure dimension must be odd and at least 3, got {d}")));
        }
        let shape = |what: &str, found: usize| {
            if found == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { what: what.into(), expected: d, found })
            }
        };
        shape("phi rows", phi.0.len())?;
        for row in &phi.0 {
            shape("phi columns", row.len())?;
        }
        shape("xi", xi.0.len())?;
        shape("eta", eta.0.len())?;
        shape("g rows", g.0.len())?;
        for row in &g.0 {
            shape("g columns", row.len())?;
        }
        shape("domain", domain.dim())?;
        let all = phi.0.iter().flatten().chain(&xi.0).chain(&eta.0).chain(g.0.iter().flatten());
        for e in all {
            if e.has_params() {
                return Err(Error::Invalid("structure expressions may not contain parameters".into()));
            }
            if let Some(i) = e.max_var() {
                if i >= d {
                    return Err(Error::VariableOutOfRange { index: i, dim: d });
                }
            }
        }
        Ok(Self { name: name.into(), n: (d - 1) / 2, coords, phi, xi, eta, g, domain })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn names(&self) -> ExprNames {
        ExprNames::new(self.coords.clone(), Vec::new())
    }

    pub fn geometry_at(&self, p: &ChartPoint) -> Result<PointGeometry> {
        PointGeometry::new(&self.phi, &self.xi, &self.eta, &self.g, p)
    }

    /// `[φ,φ](X,Y)` for vector field expressions.
    pub fn nijenhuis_phi(&self, x: &VectorFieldExpr, y: &VectorFieldExpr, p: &ChartPoint) -> Result<Vector> {
        Ok(self.geometry_at(p)?.nijenhuis_phi(&x.jet_at(p)?, &y.jet_at(p)?))
    }

    /// One of `N⁽¹⁾ … N⁽⁴⁾` evaluated on field arguments.
    pub fn tensor_n(&self, which: NTensor, args: &[VectorFieldExpr], p: &ChartPoint) -> Result<TensorValueAt> {
        let geom = self.geometry_at(p)?;
        let jets = args.iter().map(|a| a.jet_at(p)).collect::<Result<Vec<_>>>()?;
        let need = match which {
            NTensor::N1 | NTensor::N2 => 2,
            NTensor::N3 | NTensor::N4 => 1,
        };
        if jets.len() != need {
            return Err(Error::DimensionMismatch { what: format!("{which:?} arguments"), expected: need, found: jets.len() });
        }
        Ok(match which {
            NTensor::N1 => TensorValueAt::Vector(geom.n1(&jets[0], &jets[1])),
            NTensor::N2 => TensorValueAt::Scalar(geom.n2(&jets[0], &jets[1])),
            NTensor::N3 => TensorValueAt::Vector(geom.n3(&jets[0])),
            NTensor::N4 => TensorValueAt::Scalar(geom.n4(&jets[0])),
        })
    }

    /// Covariant form of `N⁽²⁾`.
    pub fn tensor_n2_nabla_form(&self, x: &VectorFieldExpr, y: &VectorFieldExpr, p: &ChartPoint) -> Result<f64> {
        let geom = self.geometry_at(p)?;
        Ok(geom.n2_nabla(&x.jet_at(p)?.value, &y.jet_at(p)?.value))
    }

    pub fn tensor_h(&self, x: &VectorFieldExpr, p: &ChartPoint, formula: HFormula) -> Result<Vector> {
        let geom = self.geometry_at(p)?;
        let xj = x.jet_at(p)?;
        Ok(match formula {
            HFormula::Lie => geom.h_lie(&xj),
            HFormula::Nabla => geom.h_nabla(&xj.value),
        })
    }

    /// A copy with different `φ, ξ, η, g` (shapes are rechecked).
    pub fn with_fields(
        &self,
        name: impl Into<String>,
        phi: Tensor11FieldExpr,
        xi: VectorFieldExpr,
        eta: OneFormFieldExpr,
        g: MetricFieldExpr,
    ) -> Result<Self> {
        Self::new(name, self.coords.clone(), phi, xi, eta, g, self.domain.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NTensor {
    N1,
    N2,
    N3,
    N4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HFormula {
    /// `h = ½ L_ξ φ`
    Lie,
    /// `hX = ½((∇_ξ φ)X − ∇_{φX} ξ + φ ∇_X ξ)`
    Nabla,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TensorValueAt {
    Scalar(f64),
    Vector(Vector),
}

/// Jets of the structure fields, the metric and its connection at a point.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub point: ChartPoint,
    pub phi: Tensor11Jet,
    pub xi: VectorJet,
    pub eta: CovectorJet,
    pub metric: MetricAtPoint,
    pub gamma: Christoffel,
}

impl PointGeometry {
    pub fn new(
        phi: &Tensor11FieldExpr,
        xi: &VectorFieldExpr,
        eta: &OneFormFieldExpr,
        g: &MetricFieldExpr,
        p: &ChartPoint,
    ) -> Result<Self> {
        let metric = g.at(p)?;
        let gamma = christoffel(&metric);
        Ok(Self { point: p.clone(), phi: phi.jet_at(p)?, xi: xi.jet_at(p)?, eta: eta.jet_at(p)?, metric, gamma })
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn phi_of(&self, x: &[f64]) -> Vector {
        self.phi.apply_value(x)
    }

    pub fn eta_of(&self, x: &[f64]) -> f64 {
        self.eta.eval(x)
    }

    pub fn g(&self, x: &[f64], y: &[f64]) -> f64 {
        self.metric.inner(x, y)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.metric.norm(x)
    }

    /// `Φ(X,Y) = g(X, φY)`
    pub fn fundamental(&self, x: &[f64], y: &[f64]) -> f64 {
        self.g(x, &self.phi_of(y))
    }

    pub fn d_eta(&self, x: &VectorJet, y: &VectorJet) -> f64 {
        exterior_d1(&self.eta, x, y)
    }

    /// Jet of the fundamental two-form `Φ_ij = g_il φ^l_j`.
    pub fn fundamental_form(&self) -> TwoFormJet {
        let d = self.dim();
        let g = &self.metric.g;
        let mut value = zeros(d);
        let mut deriv = vec![zeros(d); d];
        for i in 0..d {
            for j in 0..d {
                value[i][j] = (0..d).map(|l| g[i][l] * self.phi.value[l][j]).sum();
                for (k, dk) in deriv.iter_mut().enumerate() {
                    dk[i][j] = (0..d)
                        .map(|l| self.metric.dg[k][i][l] * self.phi.value[l][j] + g[i][l] * self.phi.deriv[k][l][j])
                        .sum();
                }
            }
        }
        TwoFormJet { value, deriv }
    }

    /// `[φ,φ](X,Y) = [φX,φY] − [X,Y] − φ[φX,Y] − φ[X,φY] + η([X,Y])ξ`
    pub fn nijenhuis_phi(&self, x: &VectorJet, y: &VectorJet) -> Vector {
        let (px, py) = (self.phi.apply(x), self.phi.apply(y));
        let xy = lie_bracket(x, y);
        let mut out = sub(&lie_bracket(&px, &py), &xy);
        axpy(-1.0, &self.phi_of(&lie_bracket(&px, y)), &mut out);
        axpy(-1.0, &self.phi_of(&lie_bracket(x, &py)), &mut out);
        axpy(self.eta_of(&xy), &self.xi.value, &mut out);
        out
    }

    /// `N⁽¹⁾(X,Y) = [φ,φ](X,Y) + 2dη(X,Y)ξ`
    pub fn n1(&self, x: &VectorJet, y: &VectorJet) -> Vector {
        let mut out = self.nijenhuis_phi(x, y);
        axpy(2.0 * self.d_eta(x, y), &self.xi.value, &mut out);
        out
    }

    /// `N⁽²⁾(X,Y) = (L_{φX}η)(Y) − (L_{φY}η)(X)`
    pub fn n2(&self, x: &VectorJet, y: &VectorJet) -> f64 {
        let (px, py) = (self.phi.apply(x), self.phi.apply(y));
        lie_deriv_covector(&px, &self.eta, y) - lie_deriv_covector(&py, &self.eta, x)
    }

    /// `(∇_{φX}η)(Y) − (∇_Yη)(φX) − (∇_{φY}η)(X) + (∇_Xη)(φY)`
    pub fn n2_nabla(&self, x: &[f64], y: &[f64]) -> f64 {
        let (px, py) = (self.phi_of(x), self.phi_of(y));
        let ne = |v: &[f64], w: &[f64]| dot(&self.gamma.nabla_covector(v, &self.eta), w);
        ne(&px, y) - ne(y, &px) - ne(&py, x) + ne(x, &py)
    }

    /// `N⁽³⁾X = −(L_ξφ)X`
    pub fn n3(&self, x: &VectorJet) -> Vector {
        scale(-1.0, &lie_deriv_tensor11(&self.xi, &self.phi, x))
    }

    /// `N⁽⁴⁾X = (L_ξη)(X)`
    pub fn n4(&self, x: &VectorJet) -> f64 {
        lie_deriv_covector(&self.xi, &self.eta, x)
    }

    /// `hX = ½(L_ξφ)X`
    pub fn h_lie(&self, x: &VectorJet) -> Vector {
        scale(0.5, &lie_deriv_tensor11(&self.xi, &self.phi, x))
    }

    /// `hX = ½((∇_ξφ)X − ∇_{φX}ξ + φ∇_Xξ)`
    pub fn h_nabla(&self, x: &[f64]) -> Vector {
        let mut out = mat_vec(&self.nabla_phi(&self.xi.value), x);
        axpy(-1.0, &self.nabla_xi(&self.phi_of(x)), &mut out);
        axpy(1.0, &self.phi_of(&self.nabla_xi(x)), &mut out);
        scale(0.5, &out)
    }

    /// Matrix of `∇_X φ`.
    pub fn nabla_phi(&self, x: &[f64]) -> Matrix {
        self.gamma.nabla_tensor11(x, &self.phi)
    }

    /// `∇_X ξ`
    pub fn nabla_xi(&self, x: &[f64]) -> Vector {
        self.gamma.nabla_vector(x, &self.xi)
    }

    /// Components of `∇_X η`.
    pub fn nabla_eta(&self, x: &[f64]) -> Vector {
        self.gamma.nabla_covector(x, &self.eta)
    }

    /// `(L_ξ g)(X,Y)` from the Lie derivative formula (no connection).
    pub fn killing(&self, x: &VectorJet, y: &VectorJet) -> f64 {
        lie_deriv_metric(&self.xi, &self.metric, x, y)
    }

    /// All derived tensors in coordinate components, assembled by feeding
    /// constant coordinate fields to the field-level operations above.
    pub fn derived(&self) -> DerivedTensors {
        let d = self.dim();
        let e: Vec<VectorJet> = (0..d).map(|i| VectorJet::constant(&basis(d, i))).collect();
        let ev: Vec<Vector> = (0..d).map(|i| basis(d, i)).collect();
        let columns = |f: &dyn Fn(usize) -> Vector| -> Matrix {
            let cols: Vec<Vector> = (0..d).map(f).collect();
            (0..d).map(|k| (0..d).map(|j| cols[j][k]).collect()).collect()
        };
        let pair_matrix = |f: &dyn Fn(usize, usize) -> f64| -> Matrix {
            (0..d).map(|i| (0..d).map(|j| f(i, j)).collect()).collect()
        };
        let n1_cols: Vec<Vec<Vector>> = (0..d).map(|i| (0..d).map(|j| self.n1(&e[i], &e[j])).collect()).collect();
        let n1 = (0..d)
            .map(|k| (0..d).map(|i| (0..d).map(|j| n1_cols[i][j][k]).collect()).collect())
            .collect();
        DerivedTensors {
            phi_form: pair_matrix(&|i, j| self.fundamental(&ev[i], &ev[j])),
            d_eta: pair_matrix(&|i, j| self.d_eta(&e[i], &e[j])),
            n1,
            n2: pair_matrix(&|i, j| self.n2(&e[i], &e[j])),
            n2_nabla: pair_matrix(&|i, j| self.n2_nabla(&ev[i], &ev[j])),
            n3: columns(&|j| self.n3(&e[j])),
            n4: (0..d).map(|j| self.n4(&e[j])).collect(),
            h: columns(&|j| self.h_lie(&e[j])),
            h_nabla: columns(&|j| self.h_nabla(&ev[j])),
            nabla_phi: ev.iter().map(|v| self.nabla_phi(v)).collect(),
            nabla_xi: columns(&|i| self.nabla_xi(&ev[i])),
            nabla_eta: ev.iter().map(|v| self.nabla_eta(v)).collect(),
            killing: pair_matrix(&|i, j| self.killing(&e[i], &e[j])),
        }
    }
}

/// Coordinate components of the derived tensors at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedTensors {
    /// `Φ_ij = Φ(∂_i, ∂_j)`
    pub phi_form: Matrix,
    pub d_eta: Matrix,
    /// `n1[k][i][j] = N⁽¹⁾(∂_i, ∂_j)^k`
    pub n1: Vec<Matrix>,
    pub n2: Matrix,
    pub n2_nabla: Matrix,
    /// Column `j` is `N⁽³⁾∂_j`.
    pub n3: Matrix,
    pub n4: Vector,
    /// Column `j` is `h∂_j` (Lie form).
    pub h: Matrix,
    pub h_nabla: Matrix,
    /// `nabla_phi[i]` is the matrix of `∇_{∂_i}φ`.
    pub nabla_phi: Vec<Matrix>,
    /// Column `i` is `∇_{∂_i}ξ`.
    pub nabla_xi: Matrix,
    /// `nabla_eta[i][j] = (∇_{∂_i}η)_j`
    pub nabla_eta: Matrix,
    /// `(L_ξ g)_ij`
    pub killing: Matrix,
}

impl DerivedTensors {
    pub fn bilinear(m: &Matrix, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &mat_vec(m, y))
    }

    pub fn n1_of(&self, x: &[f64], y: &[f64]) -> Vector {
        self.n1.iter().map(|mk| Self::bilinear(mk, x, y)).collect()
    }

    /// Matrix of `∇_X φ`.
    pub fn nabla_phi_along(&self, x: &[f64]) -> Matrix {
        let d = x.len();
        let mut out = zeros(d);
        for (xi, m) in x.iter().zip(&self.nabla_phi) {
            for (orow, mrow) in out.iter_mut().zip(m) {
                axpy(*xi, mrow, orow);
            }
        }
        out
    }

    pub fn trace_h(&self) -> f64 {
        (0..self.h.len()).map(|i| self.h[i][i]).sum()
    }
}

/// The five axiom groups checked at sample points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    /// `φ²X = −X + η(X)ξ`
    PhiSquare,
    /// `φξ = 0`
    PhiXi,
    /// `η∘φ = 0`
    EtaPhi,
    /// `η(ξ) = 1`
    EtaXi,
    /// `g(φX,φY) = g(X,Y) − η(X)η(Y)` and `η(X) = g(ξ,X)`
    Compatibility,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [Axiom::PhiSquare, Axiom::PhiXi, Axiom::EtaPhi, Axiom::EtaXi, Axiom::Compatibility];

    pub fn name(&self) -> &'static str {
        match self {
            Axiom::PhiSquare => "phi_square",
            Axiom::PhiXi => "phi_xi",
            Axiom::EtaPhi => "eta_phi",
            Axiom::EtaXi => "eta_xi",
            Axiom::Compatibility => "metric_compatibility",
        }
    }
}

/// Axiom residuals at one point, normalized by the g-norms of the inputs.
pub fn axiom_residuals_at(geom: &PointGeometry, vectors: &[Vector]) -> [f64; 5] {
    let xi = &geom.xi.value;
    let norms: Vec<f64> = vectors.iter().map(|v| geom.norm(v)).collect();
    let phis: Vec<Vector> = vectors.iter().map(|v| geom.phi_of(v)).collect();
    let etas: Vec<f64> = vectors.iter().map(|v| geom.eta_of(v)).collect();
    let mut out = [0.0f64; 5];
    for (a, x) in vectors.iter().enumerate() {
        let mut r = geom.phi_of(&phis[a]);
        axpy(1.0, x, &mut r);
        axpy(-etas[a], xi, &mut r);
        out[0] = out[0].max(geom.norm(&r) / norms[a]);
        out[2] = out[2].max(geom.eta_of(&phis[a]).abs() / norms[a]);
        let dual = (etas[a] - geom.g(xi, x)).abs() / norms[a];
        out[4] = out[4].max(dual);
        for (b, y) in vectors.iter().enumerate() {
            let c = geom.g(&phis[a], &phis[b]) - geom.g(x, y) + etas[a] * etas[b];
            out[4] = out[4].max(c.abs() / (norms[a] * norms[b]));
        }
    }
    out[1] = geom.norm(&geom.phi_of(xi));
    out[3] = (geom.eta_of(xi) - 1.0).abs();
    out
}

/// Per-axiom sups plus their maximum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub components: Vec<ResidualReport>,
    pub max: ResidualReport,
}

/// Evaluate `f` at every sample in parallel; results come back in sample
/// order. The first error (in sample order) aborts.
pub fn map_samples<T, F>(samples: &[Sample], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Sample) -> Result<T> + Sync + Send,
{
    samples.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}

/// Sup of the axiom residuals over a sampling plan.
pub fn axiom_residual(s: &AcmStructure, plan: &SamplingPlan, policy: &TolerancePolicy) -> Result<AxiomReport> {
    let samples = plan.draw(&s.domain);
    let per_point = map_samples(&samples, |smp| {
        let geom = s.geometry_at(&smp.point)?;
        Ok(axiom_residuals_at(&geom, &smp.vectors))
    })?;
    let mut sups: Vec<Sup> = vec![Sup::default(); 5];
    for (smp, vals) in samples.iter().zip(&per_point) {
        for (sup, v) in sups.iter_mut().zip(vals) {
            sup.observe(*v, smp.point.coords());
        }
    }
    Ok(axiom_report(&sups, policy))
}

pub(crate) fn axiom_report(sups: &[Sup], policy: &TolerancePolicy) -> AxiomReport {
    let components: Vec<ResidualReport> =
        Axiom::ALL.iter().zip(sups).map(|(a, s)| ResidualReport::from_sup(a.name(), s, policy)).collect();
    let mut all = Sup::default();
    for s in sups {
        all.merge(s);
    }
    // count is per point, not per axiom
    all.count = sups.first().map_or(0, |s| s.count);
    AxiomReport { max: ResidualReport::from_sup("axioms", &all, policy), components }
}

/// Build a constant matrix field.
pub fn constant_matrix(m: &[Vec<f64>]) -> Vec<Vec<CoordExpr>> {
    m.iter().map(|r| r.iter().map(|c| CoordExpr::constant(*c)).collect()).collect()
}
