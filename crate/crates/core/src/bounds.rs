//! Closed-form continuity and amplification bounds, in bits.

use crate::error::{Error, Result};

/// Slack allowed when comparing a measured quantity against a bound.
pub const BOUND_TOL: f64 = 1e-9;

/// `1/(2e)`, the cap on the Fannes correction term.
pub const FANNES_CAP: f64 = 1.0 / (2.0 * std::f64::consts::E);

/// Outcome of comparing a measured `lhs` against a bound `rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::with_tol(name, lhs, rhs, BOUND_TOL)
    }

    pub fn with_tol(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        BoundReport {
            name: name.into(),
            lhs,
            rhs,
            satisfied: lhs <= rhs + tol,
            slack: rhs - lhs,
        }
    }
}

fn unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("{name} = {x} not in [0, 1]")));
    }
    Ok(())
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    unit_interval("p", p)?;
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// `2δ log₂ d + min{−δ log₂ δ, 1/(2e)}`.
pub fn fannes_bound(delta: f64, d: usize) -> Result<f64> {
    unit_interval("delta", delta)?;
    if d < 2 {
        return Err(Error::OutOfRange(format!("dimension {d} < 2")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let corr = (-delta * delta.log2()).min(FANNES_CAP);
    Ok((2.0 * delta * (d as f64).log2() + corr).max(0.0))
}

/// `ε κ + (1+ε) h(ε/(1+ε))`: continuity of the relative entropy of resource
/// when the resource diameter is κ.
pub fn winter_resource_bound(eps: f64, kappa: f64) -> Result<f64> {
    unit_interval("eps", eps)?;
    if !(kappa >= 0.0) {
        return Err(Error::OutOfRange(format!("kappa = {kappa} < 0")));
    }
    Ok((eps * kappa + (1.0 + eps) * binary_entropy(eps / (1.0 + eps))?).max(0.0))
}

/// `ε log₂ d + (1+ε) h(ε/(1+ε))`: continuity of the (regularised) relative
/// entropy of entanglement on a space of total dimension d.
pub fn winter_entanglement_bound(eps: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("dimension {d} < 2")));
    }
    winter_resource_bound(eps, (d as f64).log2())
}

/// `1 − exp(−nδ/2)`.
pub fn copies_amplification(delta: f64, n: usize) -> Result<f64> {
    unit_interval("delta", delta)?;
    Ok((1.0 - (-(n as f64) * delta / 2.0).exp()).clamp(0.0, 1.0))
}

/// `√(1 − δ²)`.
pub fn binding_fidelity_bound(delta: f64) -> Result<f64> {
    unit_interval("delta", delta)?;
    Ok((1.0 - delta * delta).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Expected values below were evaluated independently at 30 digits.

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11).unwrap() - 0.499_915_958_164_528).abs() < 1e-12);
        assert!(binary_entropy(1.2).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn fannes_values() {
        assert_eq!(fannes_bound(0.0, 7).unwrap(), 0.0);
        assert!((fannes_bound(0.1, 2).unwrap() - 0.383_939_720_585_721).abs() < 1e-12);
        assert!((fannes_bound(0.5, 4).unwrap() - 2.183_939_720_585_721).abs() < 1e-12);
        assert!(fannes_bound(0.1, 1).is_err());
    }

    #[test]
    fn winter_values() {
        assert_eq!(winter_resource_bound(0.0, 3.0).unwrap(), 0.0);
        assert!((winter_resource_bound(1.0, 3.0).unwrap() - 5.0).abs() < 1e-12);
        assert!((winter_resource_bound(0.5, 2.0).unwrap() - 2.377_443_751_081_734).abs() < 1e-12);
        assert_eq!(winter_entanglement_bound(0.0, 5).unwrap(), 0.0);
        assert!((winter_entanglement_bound(1.0, 4).unwrap() - 4.0).abs() < 1e-12);
        assert!(
            (winter_entanglement_bound(0.25, 16).unwrap() - 1.902_410_118_609_203).abs() < 1e-12
        );
    }

    #[test]
    fn amplification_and_binding_values() {
        assert_eq!(copies_amplification(0.4, 0).unwrap(), 0.0);
        assert_eq!(copies_amplification(0.0, 9).unwrap(), 0.0);
        assert!((copies_amplification(0.3, 20).unwrap() - 0.950_212_931_632_136).abs() < 1e-12);
        assert_eq!(binding_fidelity_bound(1.0).unwrap(), 0.0);
        assert_eq!(binding_fidelity_bound(0.0).unwrap(), 1.0);
        assert!((binding_fidelity_bound(0.6).unwrap() - 0.8).abs() < 1e-15);
        let chain = binding_fidelity_bound(copies_amplification(0.3, 20).unwrap()).unwrap();
        assert!((chain - 0.311_601_323_102_232).abs() < 1e-12);
        let chain = binding_fidelity_bound(copies_amplification(0.5, 8).unwrap()).unwrap();
        assert!((chain - 0.502_349_407_867_165).abs() < 1e-12);
    }

    #[test]
    fn report_slack() {
        let r = BoundReport::new("x", 1.0, 1.0 + 5e-10);
        assert!(r.satisfied);
        let r = BoundReport::new("x", 1.0, 0.9);
        assert!(!r.satisfied);
        assert!((r.slack + 0.1).abs() < 1e-15);
    }

    #[test]
    fn bounds_are_monotone_in_distance() {
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let mono = |f: &dyn Fn(f64) -> f64, inc: bool| {
            grid.windows(2).all(|w| {
                let (a, b) = (f(w[0]), f(w[1]));
                if inc {
                    b >= a - 1e-15
                } else {
                    b <= a + 1e-15
                }
            })
        };
        for d in [2usize, 4, 16] {
            assert!(mono(&|x| fannes_bound(x, d).unwrap(), true));
            assert!(mono(&|x| winter_entanglement_bound(x, d).unwrap(), true));
        }
        assert!(mono(&|x| winter_resource_bound(x, 3.0).unwrap(), true));
        assert!(mono(&|x| copies_amplification(x, 5).unwrap(), true));
        assert!(mono(&|x| binding_fidelity_bound(x).unwrap(), false));
    }
}
