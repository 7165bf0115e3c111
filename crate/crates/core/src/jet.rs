//! Truncated Taylor arithmetic for exact derivatives of coordinate
//! expressions.
//!
//! [`ScalarJet2`] carries value, gradient and Hessian; [`ScalarJet1`] drops
//! the Hessian and is what the structure evaluators use when only first
//! derivatives enter a formula.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::expr::CoordExpr;

/// Arithmetic needed by the expression evaluator.
///
/// `compose(f0, f1, f2)` applies a scalar function with value `f0`, first
/// derivative `f1` and second derivative `f2` at `self.value()`.
pub trait JetScalar: Sized {
    fn constant(c: f64, dim: usize) -> Self;
    fn variable(value: f64, index: usize, dim: usize) -> Self;
    fn value(&self) -> f64;
    fn add(self, other: &Self) -> Self;
    fn sub(self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(self) -> Self;
    fn compose(&self, f0: f64, f1: f64, f2: f64) -> Self;
}

impl JetScalar for f64 {
    fn constant(c: f64, _dim: usize) -> Self {
        c
    }
    fn variable(value: f64, _index: usize, _dim: usize) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(self, other: &Self) -> Self {
        self + other
    }
    fn sub(self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(self) -> Self {
        -self
    }
    fn compose(&self, f0: f64, _f1: f64, _f2: f64) -> Self {
        f0
    }
}

/// Value and gradient of a scalar field at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarJet1 {
    pub value: f64,
    pub gradient: Vec<f64>,
}

impl ScalarJet1 {
    /// Derivative along `dir`.
    pub fn directional(&self, dir: &[f64]) -> f64 {
        self.gradient.iter().zip(dir).map(|(g, v)| g * v).sum()
    }
}

impl JetScalar for ScalarJet1 {
    fn constant(c: f64, dim: usize) -> Self {
        Self { value: c, gradient: vec![0.0; dim] }
    }

    fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut gradient = vec![0.0; dim];
        gradient[index] = 1.0;
        Self { value, gradient }
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn add(mut self, other: &Self) -> Self {
        self.value += other.value;
        self.gradient.iter_mut().zip(&other.gradient).for_each(|(a, b)| *a += b);
        self
    }

    fn sub(mut self, other: &Self) -> Self {
        self.value -= other.value;
        self.gradient.iter_mut().zip(&other.gradient).for_each(|(a, b)| *a -= b);
        self
    }

    fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.value, other.value);
        Self {
            value: a * b,
            gradient: self.gradient.iter().zip(&other.gradient).map(|(da, db)| da * b + a * db).collect(),
        }
    }

    fn neg(mut self) -> Self {
        self.value = -self.value;
        self.gradient.iter_mut().for_each(|g| *g = -*g);
        self
    }

    fn compose(&self, f0: f64, f1: f64, _f2: f64) -> Self {
        Self { value: f0, gradient: self.gradient.iter().map(|g| f1 * g).collect() }
    }
}

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarJet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
}

impl ScalarJet2 {
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn truncate(&self) -> ScalarJet1 {
        ScalarJet1 { value: self.value, gradient: self.gradient.clone() }
    }

    /// Largest `|H_ij - H_ji|`.
    pub fn hessian_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                worst = worst.max((self.hessian[i][j] - self.hessian[j][i]).abs());
            }
        }
        worst
    }
}

impl JetScalar for ScalarJet2 {
    fn constant(c: f64, dim: usize) -> Self {
        Self { value: c, gradient: vec![0.0; dim], hessian: vec![vec![0.0; dim]; dim] }
    }

    fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut jet = Self::constant(value, dim);
        jet.gradient[index] = 1.0;
        jet
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn add(mut self, other: &Self) -> Self {
        self.value += other.value;
        self.gradient.iter_mut().zip(&other.gradient).for_each(|(a, b)| *a += b);
        for (row, orow) in self.hessian.iter_mut().zip(&other.hessian) {
            row.iter_mut().zip(orow).for_each(|(a, b)| *a += b);
        }
        self
    }

    fn sub(mut self, other: &Self) -> Self {
        self.value -= other.value;
        self.gradient.iter_mut().zip(&other.gradient).for_each(|(a, b)| *a -= b);
        for (row, orow) in self.hessian.iter_mut().zip(&other.hessian) {
            row.iter_mut().zip(orow).for_each(|(a, b)| *a -= b);
        }
        self
    }

    fn mul(&self, other: &Self) -> Self {
        let d = self.dim();
        let (a, b) = (self.value, other.value);
        let (ga, gb) = (&self.gradient, &other.gradient);
        let hessian = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        self.hessian[i][j] * b + a * other.hessian[i][j] + ga[i] * gb[j] + ga[j] * gb[i]
                    })
                    .collect()
            })
            .collect();
        Self {
            value: a * b,
            gradient: ga.iter().zip(gb).map(|(da, db)| da * b + a * db).collect(),
            hessian,
        }
    }

    fn neg(mut self) -> Self {
        self.value = -self.value;
        self.gradient.iter_mut().for_each(|g| *g = -*g);
        self.hessian.iter_mut().flatten().for_each(|h| *h = -*h);
        self
    }

    fn compose(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let g = &self.gradient;
        Self {
            value: f0,
            gradient: g.iter().map(|x| f1 * x).collect(),
            hessian: self
                .hessian
                .iter()
                .enumerate()
                .map(|(i, row)| row.iter().enumerate().map(|(j, h)| f1 * h + f2 * g[i] * g[j]).collect())
                .collect(),
        }
    }
}

/// Exact value, gradient and Hessian of `f` at `p`.
pub fn eval_jet2(f: &CoordExpr, p: &[f64]) -> Result<ScalarJet2> {
    f.eval_as::<ScalarJet2>(p)
}

/// Exact value and gradient of `f` at `p`.
pub fn eval_jet1(f: &CoordExpr, p: &[f64]) -> Result<ScalarJet1> {
    f.eval_as::<ScalarJet1>(p)
}
