//! Residual reports and the verdict policy with its dead band.

use serde::{Deserialize, Serialize};

/// Outcome of comparing a residual against the tolerance policy.
///
/// `Vacuous` also marks class predicates that are not applicable because
/// the structure failed the axiom gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
    Vacuous,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Indeterminate => "indeterminate",
            Verdict::Vacuous => "vacuous",
        }
    }
}

/// `holds` below `tol`, `fails` above `dead_band`, `indeterminate` between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub tol: f64,
    pub dead_band: f64,
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_DEAD_BAND: f64 = 1e-3;

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, dead_band: DEFAULT_DEAD_BAND }
    }
}

impl TolerancePolicy {
    pub fn new(tol: f64, dead_band: f64) -> Self {
        Self { tol, dead_band }
    }

    pub fn verdict(&self, residual: f64) -> Verdict {
        if residual < self.tol {
            Verdict::Holds
        } else if residual > self.dead_band || residual.is_nan() {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }
}

/// Sup-norm residual of one named identity over a sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub residual: f64,
    pub samples: usize,
    /// Chart point where the sup was attained.
    pub worst_point: Option<Vec<f64>>,
    pub verdict: Verdict,
}

impl ResidualReport {
    pub fn from_sup(name: impl Into<String>, sup: &Sup, policy: &TolerancePolicy) -> Self {
        Self {
            name: name.into(),
            residual: sup.value,
            samples: sup.count,
            worst_point: sup.at.clone(),
            verdict: policy.verdict(sup.value),
        }
    }

    /// Report for a predicate that was not evaluated.
    pub fn vacuous(name: impl Into<String>) -> Self {
        Self { name: name.into(), residual: f64::NAN, samples: 0, worst_point: None, verdict: Verdict::Vacuous }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Running supremum with the location where it was attained. Ties keep
/// the earliest location, so merging in sample order is deterministic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sup {
    pub value: f64,
    pub count: usize,
    pub at: Option<Vec<f64>>,
}

impl Sup {
    pub fn observe(&mut self, v: f64, at: &[f64]) {
        // NaN compares as worse than anything.
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if self.at.is_none() || v > self.value {
            self.value = v;
            self.at = Some(at.to_vec());
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Sup) {
        if let Some(at) = &other.at {
            if self.at.is_none() || other.value > self.value {
                self.value = other.value;
                self.at = Some(at.clone());
            }
        }
        self.count += other.count;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_band_policy() {
        let p = TolerancePolicy::default();
        assert_eq!(p.verdict(0.0), Verdict::Holds);
        assert_eq!(p.verdict(9.9e-9), Verdict::Holds);
        assert_eq!(p.verdict(1e-8), Verdict::Indeterminate);
        assert_eq!(p.verdict(1e-3), Verdict::Indeterminate);
        assert_eq!(p.verdict(1.1e-3), Verdict::Fails);
        assert_eq!(p.verdict(f64::NAN), Verdict::Fails);
    }

    #[test]
    fn sup_keeps_first_argmax() {
        let mut s = Sup::default();
        s.observe(1.0, &[0.0]);
        s.observe(1.0, &[1.0]);
        s.observe(0.5, &[2.0]);
        assert_eq!(s.value, 1.0);
        assert_eq!(s.at, Some(vec![0.0]));
        assert_eq!(s.count, 3);
        let mut t = Sup::default();
        t.observe(f64::NAN, &[3.0]);
        s.merge(&t);
        assert_eq!(s.value, f64::INFINITY);
        assert_eq!(s.count, 4);
    }
}
