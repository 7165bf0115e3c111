use acms_core::catalog;
use acms_core::expr::CoordExpr;
use acms_core::jet::eval_jet2;
use acms_core::kernel::{
    christoffel, exterior_d1, exterior_d1_form, exterior_d2, lie_bracket, lie_deriv_tensor11, ChartPoint,
    MetricFieldExpr, OneFormFieldExpr, Tensor11FieldExpr, VectorFieldExpr, VectorJet,
};
use acms_core::structure::AcmStructure;
use proptest::prelude::*;

const D: usize = 3;
const FIELD_COEFFS: usize = 8;

fn c(v: f64) -> CoordExpr {
    CoordExpr::constant(v)
}

fn x(i: usize) -> CoordExpr {
    CoordExpr::var(i)
}

/// `c0 + c1 x0 + c2 x1 x2 + c3 sin(c4 x0 + x1) + c5 exp(c6 x2 / 2) + c7 x0²`
fn scalar_field(k: &[f64]) -> CoordExpr {
    CoordExpr::sum_all([
        c(k[0]),
        c(k[1]) * x(0),
        c(k[2]) * x(1) * x(2),
        c(k[3]) * (c(k[4]) * x(0) + x(1)).sin(),
        c(k[5]) * (c(0.5 * k[6]) * x(2)).exp(),
        c(k[7]) * x(0).powi(2),
    ])
}

fn vector_field(k: &[f64]) -> VectorFieldExpr {
    VectorFieldExpr(k.chunks(FIELD_COEFFS).map(scalar_field).collect())
}

fn one_form(k: &[f64]) -> OneFormFieldExpr {
    OneFormFieldExpr(k.chunks(FIELD_COEFFS).map(scalar_field).collect())
}

fn tensor11(k: &[f64]) -> Tensor11FieldExpr {
    let entries: Vec<CoordExpr> = k.chunks(FIELD_COEFFS).map(scalar_field).collect();
    Tensor11FieldExpr(entries.chunks(D).map(|r| r.to_vec()).collect())
}

/// `I + Σ_k exp(a_k · x) v_k v_kᵀ`, positive definite everywhere.
fn metric(k: &[f64]) -> MetricFieldExpr {
    let mut g = vec![vec![CoordExpr::zero(); D]; D];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = CoordExpr::one();
    }
    for term in k.chunks(2 * D) {
        let (a, v) = term.split_at(D);
        let weight = CoordExpr::sum_all((0..D).map(|i| c(a[i]) * x(i))).exp();
        for i in 0..D {
            for j in 0..D {
                g[i][j] = g[i][j].clone() + weight.clone() * c(v[i] * v[j]);
            }
        }
    }
    MetricFieldExpr(g)
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
}

fn point() -> impl Strategy<Value = ChartPoint> {
    prop::collection::vec(-1.0..1.0f64, D).prop_map(|v| ChartPoint::new(v).unwrap())
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

fn diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn scale(v: &[f64]) -> f64 {
    1.0 + max_abs(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hessian_is_symmetric_and_matches_first_order(k in coeffs(FIELD_COEFFS), p in point()) {
        let f = scalar_field(&k);
        let j2 = eval_jet2(&f, p.coords()).unwrap();
        let j1 = acms_core::jet::eval_jet1(&f, p.coords()).unwrap();
        prop_assert!(j2.hessian_asymmetry() < 1e-12);
        prop_assert!((j1.value - j2.value).abs() < 1e-14 * scale(&[j2.value]));
        prop_assert!(diff(&j1.gradient, &j2.gradient) < 1e-13 * scale(&j2.gradient));
    }

    #[test]
    fn connection_is_metric_compatible(k in coeffs(3 * 2 * D), p in point()) {
        let m = metric(&k).at(&p).unwrap();
        let gamma = christoffel(&m).gamma;
        let size = 1.0 + m.g.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        for kk in 0..D {
            for i in 0..D {
                for j in 0..D {
                    let mut r = m.dg[kk][i][j];
                    for l in 0..D {
                        r -= gamma[l][kk][i] * m.g[l][j] + gamma[l][kk][j] * m.g[i][l];
                    }
                    prop_assert!(r.abs() < 1e-11 * size, "{r:e}");
                }
            }
        }
    }

    #[test]
    fn connection_is_torsion_free(
        km in coeffs(2 * 2 * D), kx in coeffs(D * FIELD_COEFFS), ky in coeffs(D * FIELD_COEFFS), p in point()
    ) {
        let gamma = christoffel(&metric(&km).at(&p).unwrap());
        let (xj, yj) = (vector_field(&kx).jet_at(&p).unwrap(), vector_field(&ky).jet_at(&p).unwrap());
        let lhs: Vec<f64> = gamma.nabla_vector(&xj.value, &yj).iter().zip(gamma.nabla_vector(&yj.value, &xj)).map(|(a, b)| a - b).collect();
        let rhs = lie_bracket(&xj, &yj);
        prop_assert!(diff(&lhs, &rhs) < 1e-10 * scale(&rhs));
    }

    #[test]
    fn covariant_derivative_of_tensor11_obeys_leibniz(
        km in coeffs(2 * 2 * D), kphi in coeffs(D * D * FIELD_COEFFS), ky in coeffs(D * FIELD_COEFFS),
        dir in prop::collection::vec(-1.0..1.0f64, D), p in point()
    ) {
        let gamma = christoffel(&metric(&km).at(&p).unwrap());
        let phi = tensor11(&kphi);
        let y = vector_field(&ky);
        let phi_j = phi.jet_at(&p).unwrap();
        let lhs = mat_vec(&gamma.nabla_tensor11(&dir, &phi_j), &y.jet_at(&p).unwrap().value);
        let phi_y = phi.apply(&y).jet_at(&p).unwrap();
        let nabla_y = gamma.nabla_vector(&dir, &y.jet_at(&p).unwrap());
        let rhs: Vec<f64> = gamma.nabla_vector(&dir, &phi_y).iter().zip(mat_vec(&phi_j.value, &nabla_y)).map(|(a, b)| a - b).collect();
        prop_assert!(diff(&lhs, &rhs) < 1e-10 * scale(&rhs));
    }

    #[test]
    fn covariant_derivative_of_one_form_obeys_leibniz(
        km in coeffs(2 * 2 * D), keta in coeffs(D * FIELD_COEFFS), ky in coeffs(D * FIELD_COEFFS),
        dir in prop::collection::vec(-1.0..1.0f64, D), p in point()
    ) {
        let gamma = christoffel(&metric(&km).at(&p).unwrap());
        let eta = one_form(&keta).jet_at(&p).unwrap();
        let y = vector_field(&ky).jet_at(&p).unwrap();
        let nabla_eta = gamma.nabla_covector(&dir, &eta);
        let lhs: f64 = nabla_eta.iter().zip(&y.value).map(|(a, b)| a * b).sum::<f64>() + eta.eval(&gamma.nabla_vector(&dir, &y));
        let rhs = eta.pair(&y).directional(&dir);
        prop_assert!((lhs - rhs).abs() < 1e-10 * scale(&[rhs]));
    }

    #[test]
    fn lie_derivative_matches_connection_formula(
        km in coeffs(2 * 2 * D), kphi in coeffs(D * D * FIELD_COEFFS),
        kxi in coeffs(D * FIELD_COEFFS), kx in coeffs(D * FIELD_COEFFS), p in point()
    ) {
        let gamma = christoffel(&metric(&km).at(&p).unwrap());
        let phi = tensor11(&kphi);
        let (xi, xf) = (vector_field(&kxi), vector_field(&kx));
        let (phi_j, xi_j, x_j) = (phi.jet_at(&p).unwrap(), xi.jet_at(&p).unwrap(), xf.jet_at(&p).unwrap());
        let lie = lie_deriv_tensor11(&xi_j, &phi_j, &x_j);
        // ∇_ξ(φX) − ∇_{φX}ξ − φ(∇_ξX − ∇_Xξ)
        let phi_x = phi.apply(&xf).jet_at(&p).unwrap();
        let a = gamma.nabla_vector(&xi_j.value, &phi_x);
        let b = gamma.nabla_vector(&phi_x.value, &xi_j);
        let inner: Vec<f64> = gamma.nabla_vector(&xi_j.value, &x_j).iter().zip(gamma.nabla_vector(&x_j.value, &xi_j)).map(|(u, v)| u - v).collect();
        let c = mat_vec(&phi_j.value, &inner);
        let rhs: Vec<f64> = (0..D).map(|k| a[k] - b[k] - c[k]).collect();
        prop_assert!(diff(&lie, &rhs) < 1e-10 * scale(&rhs));
    }

    #[test]
    fn d_squared_vanishes(
        keta in coeffs(D * FIELD_COEFFS), kx in coeffs(D * FIELD_COEFFS), ky in coeffs(D * FIELD_COEFFS),
        kz in coeffs(D * FIELD_COEFFS), p in point()
    ) {
        let omega = exterior_d1_form(&one_form(&keta).jet2_at(&p).unwrap());
        let j = |k: &[f64]| vector_field(k).jet_at(&p).unwrap();
        let v = exterior_d2(&omega, &j(&kx), &j(&ky), &j(&kz)).unwrap();
        let size = 1.0 + omega.deriv.iter().flatten().flatten().fold(0.0f64, |m, a| m.max(a.abs()));
        prop_assert!(v.abs() < 1e-9 * size, "{v:e}");
    }

    #[test]
    fn one_form_differential_is_antisymmetric(
        keta in coeffs(D * FIELD_COEFFS), kx in coeffs(D * FIELD_COEFFS), ky in coeffs(D * FIELD_COEFFS), p in point()
    ) {
        let eta = one_form(&keta).jet_at(&p).unwrap();
        let (xj, yj): (VectorJet, VectorJet) = (vector_field(&kx).jet_at(&p).unwrap(), vector_field(&ky).jet_at(&p).unwrap());
        let a = exterior_d1(&eta, &xj, &yj);
        let b = exterior_d1(&eta, &yj, &xj);
        prop_assert!((a + b).abs() < 1e-12 * scale(&[a]));
    }
}

fn catalog_structures() -> Vec<AcmStructure> {
    catalog::entries().into_iter().take(6).map(|e| e.structure).collect()
}

fn unit_box_point(s: &AcmStructure, u: &[f64]) -> ChartPoint {
    let c: Vec<f64> = s.domain.intervals.iter().zip(u).map(|((lo, hi), t)| lo + (hi - lo) * t).collect();
    ChartPoint::new(c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Identities of the derived tensors on every catalog structure that
    /// satisfies the axioms.
    #[test]
    fn derived_tensor_identities(
        which in 0usize..6, u in prop::collection::vec(0.0..1.0f64, 5),
        a in prop::collection::vec(-1.0..1.0f64, 5), b in prop::collection::vec(-1.0..1.0f64, 5)
    ) {
        let s = &catalog_structures()[which];
        let d = s.dim();
        let p = unit_box_point(s, &u);
        let geom = s.geometry_at(&p).unwrap();
        let (a, b) = (&a[..d], &b[..d]);
        let (aj, bj) = (VectorJet::constant(a), VectorJet::constant(b));
        let norm = geom.norm(a) * geom.norm(b);

        let hl = geom.h_lie(&aj);
        let hn = geom.h_nabla(a);
        prop_assert!(diff(&hl, &hn) < 1e-10 * geom.norm(a));
        let xi: Vec<f64> = s.xi.jet_at(&p).unwrap().value;
        prop_assert!(max_abs(&geom.h_lie(&VectorJet::constant(&xi))) < 1e-11);
        prop_assert!((geom.n2(&aj, &bj) - geom.n2_nabla(a, b)).abs() < 1e-10 * norm);
        prop_assert!((geom.n2(&aj, &bj) + geom.n2(&bj, &aj)).abs() < 1e-10 * norm);
        prop_assert!((geom.fundamental(a, b) + geom.fundamental(b, a)).abs() < 1e-10 * norm);
        prop_assert!(geom.fundamental(&xi, a).abs() < 1e-10 * geom.norm(a));
        let nab: Vec<f64> = geom.nijenhuis_phi(&aj, &bj).iter().zip(geom.nijenhuis_phi(&bj, &aj)).map(|(u, v)| u + v).collect();
        prop_assert!(max_abs(&nab) < 1e-10 * norm);
        prop_assert!(geom.derived().trace_h().abs() < 1e-10);
    }
}
