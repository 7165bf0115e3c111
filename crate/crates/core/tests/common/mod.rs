#![allow(dead_code)]

use acms_core::dsl::parse_expr;
use acms_core::expr::{CoordExpr, ExprNames};

/// Value, gradient and Hessian in two variables.
pub type Closed = (f64, [f64; 2], [[f64; 2]; 2]);

pub struct BatteryCase {
    pub source: &'static str,
    pub expr: CoordExpr,
    pub exact: fn(f64, f64) -> Closed,
}

fn sym(a: f64, b: f64, c: f64) -> [[f64; 2]; 2] {
    [[a, b], [b, c]]
}

/// Twenty composite expressions in `x, y` with hand-derived derivatives.
/// All are defined for `x, y` in `[0.5, 1.5]`.
pub fn battery() -> Vec<BatteryCase> {
    let cases: [(&'static str, fn(f64, f64) -> Closed); 20] = [
        ("x^2", |x, _| (x * x, [2.0 * x, 0.0], sym(2.0, 0.0, 0.0))),
        ("sin(x)", |x, _| (x.sin(), [x.cos(), 0.0], sym(-x.sin(), 0.0, 0.0))),
        ("x*y", |x, y| (x * y, [y, x], sym(0.0, 1.0, 0.0))),
        ("exp(x*y)", |x, y| {
            let e = (x * y).exp();
            (e, [y * e, x * e], sym(y * y * e, (1.0 + x * y) * e, x * x * e))
        }),
        ("log(1 + x^2)", |x, _| {
            let r = 1.0 + x * x;
            (r.ln(), [2.0 * x / r, 0.0], sym(2.0 * (1.0 - x * x) / (r * r), 0.0, 0.0))
        }),
        ("cos(x*y)", |x, y| {
            let (s, c) = (x * y).sin_cos();
            (c, [-y * s, -x * s], sym(-y * y * c, -s - x * y * c, -x * x * c))
        }),
        ("x/y", |x, y| (x / y, [1.0 / y, -x / (y * y)], sym(0.0, -1.0 / (y * y), 2.0 * x / y.powi(3)))),
        ("y^-2", |_, y| (y.powi(-2), [0.0, -2.0 * y.powi(-3)], sym(0.0, 0.0, 6.0 * y.powi(-4)))),
        ("sin(x)^3", |x, _| {
            let (s, c) = x.sin_cos();
            (s.powi(3), [3.0 * s * s * c, 0.0], sym(6.0 * s * c * c - 3.0 * s.powi(3), 0.0, 0.0))
        }),
        ("exp(sin(y))", |_, y| {
            let e = y.sin().exp();
            (e, [0.0, y.cos() * e], sym(0.0, 0.0, (y.cos().powi(2) - y.sin()) * e))
        }),
        ("x^3*y^2", |x, y| {
            (x.powi(3) * y * y, [3.0 * x * x * y * y, 2.0 * x.powi(3) * y], sym(6.0 * x * y * y, 6.0 * x * x * y, 2.0 * x.powi(3)))
        }),
        ("(x + y)^4", |x, y| {
            let s = x + y;
            (s.powi(4), [4.0 * s.powi(3); 2], sym(12.0 * s * s, 12.0 * s * s, 12.0 * s * s))
        }),
        ("sin(x + 2*y)", |x, y| {
            let (s, c) = (x + 2.0 * y).sin_cos();
            (s, [c, 2.0 * c], sym(-s, -2.0 * s, -4.0 * s))
        }),
        ("cos(x)*exp(y)", |x, y| {
            let e = y.exp();
            (x.cos() * e, [-x.sin() * e, x.cos() * e], sym(-x.cos() * e, -x.sin() * e, x.cos() * e))
        }),
        ("log(y)*x", |x, y| (y.ln() * x, [y.ln(), x / y], sym(0.0, 1.0 / y, -x / (y * y)))),
        ("1/(1 + x^2 + y^2)", |x, y| {
            let r = 1.0 + x * x + y * y;
            let (r2, r3) = (r * r, r * r * r);
            (
                1.0 / r,
                [-2.0 * x / r2, -2.0 * y / r2],
                sym(-2.0 / r2 + 8.0 * x * x / r3, 8.0 * x * y / r3, -2.0 / r2 + 8.0 * y * y / r3),
            )
        }),
        ("-x*y + 3", |x, y| (3.0 - x * y, [-y, -x], sym(0.0, -1.0, 0.0))),
        ("exp(-x^2)", |x, _| {
            let e = (-x * x).exp();
            (e, [-2.0 * x * e, 0.0], sym((4.0 * x * x - 2.0) * e, 0.0, 0.0))
        }),
        ("sin(x)*cos(y)", |x, y| {
            let ((sx, cx), (sy, cy)) = (x.sin_cos(), y.sin_cos());
            (sx * cy, [cx * cy, -sx * sy], sym(-sx * cy, -cx * sy, -sx * cy))
        }),
        ("(x*y)^-1", |x, y| {
            (
                1.0 / (x * y),
                [-1.0 / (x * x * y), -1.0 / (x * y * y)],
                sym(2.0 / (x.powi(3) * y), 1.0 / (x * x * y * y), 2.0 / (x * y.powi(3))),
            )
        }),
    ];
    let names = ExprNames::new(vec!["x".into(), "y".into()], vec![]);
    cases
        .into_iter()
        .map(|(source, exact)| BatteryCase { source, expr: parse_expr(source, &names).unwrap(), exact })
        .collect()
}

/// Largest relative discrepancy between jets of the battery and the
/// closed forms over a grid of points.
pub fn battery_residual() -> f64 {
    let mut worst = 0.0f64;
    for case in battery() {
        for i in 0..5 {
            for j in 0..5 {
                let (x, y) = (0.5 + 0.25 * i as f64, 0.5 + 0.25 * j as f64);
                let jet = acms_core::jet::eval_jet2(&case.expr, &[x, y]).unwrap();
                let (v, g, h) = (case.exact)(x, y);
                let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + b.abs());
                worst = worst.max(rel(jet.value, v));
                for a in 0..2 {
                    worst = worst.max(rel(jet.gradient[a], g[a]));
                    for b in 0..2 {
                        worst = worst.max(rel(jet.hessian[a][b], h[a][b]));
                    }
                }
            }
        }
    }
    worst
}

/// `Γ` of `diag(1, x₀²)`: `Γ⁰₁₁ = −x₀`, `Γ¹₀₁ = Γ¹₁₀ = 1/x₀`, all others 0.
pub fn polar_christoffel_residual(x0: f64) -> f64 {
    use acms_core::kernel::{christoffel, ChartPoint, MetricFieldExpr};
    let g = MetricFieldExpr(vec![
        vec![CoordExpr::one(), CoordExpr::zero()],
        vec![CoordExpr::zero(), CoordExpr::var(0).powi(2)],
    ]);
    let p = ChartPoint::new(vec![x0, 0.3]).unwrap();
    let gamma = christoffel(&g.at(&p).unwrap()).gamma;
    let mut want = [[[0.0; 2]; 2]; 2];
    want[0][1][1] = -x0;
    want[1][0][1] = 1.0 / x0;
    want[1][1][0] = 1.0 / x0;
    let mut worst = 0.0f64;
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((gamma[k][i][j] - want[k][i][j]).abs());
            }
        }
    }
    worst
}
