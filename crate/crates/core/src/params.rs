//! Event probabilities shared by the simulator and the closed-form theory.

use thiserror::Error;

/// Slack allowed when checking `p_v + p_e + p_d = 1`.
const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("probability {name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("p_v + p_e + p_d = {0}, expected 1")]
    BadSum(f64),
    #[error(
        "p_v = {p_v} must exceed p_d = {p_d}: otherwise vertices are deactivated \
         at least as fast as they arrive and the active set does not grow"
    )]
    DeactivationDominates { p_v: f64, p_d: f64 },
}

/// `(p_v, p_e, p_d)`: probabilities of a vertex event, an edge event and a
/// deactivation event in one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probabilities {
    vertex: f64,
    edge: f64,
    deactivation: f64,
}

fn check_unit(name: &'static str, value: f64) -> Result<(), ParamError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ParamError::OutOfRange { name, value })
    }
}

impl Probabilities {
    pub fn new(p_v: f64, p_e: f64, p_d: f64) -> Result<Self, ParamError> {
        check_unit("p_v", p_v)?;
        check_unit("p_e", p_e)?;
        check_unit("p_d", p_d)?;
        let sum = p_v + p_e + p_d;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(ParamError::BadSum(sum));
        }
        if p_d > 0.0 && p_v <= p_d {
            return Err(ParamError::DeactivationDominates { p_v, p_d });
        }
        Ok(Self {
            vertex: p_v,
            edge: p_e,
            deactivation: p_d,
        })
    }

    /// Derives `p_d = 1 - p_v - p_e`.
    pub fn from_vertex_edge(p_v: f64, p_e: f64) -> Result<Self, ParamError> {
        let p_d = (1.0 - p_v - p_e).max(0.0);
        let p_d = if p_d < SUM_TOLERANCE { 0.0 } else { p_d };
        Self::new(p_v, p_e, p_d)
    }

    pub fn vertex(&self) -> f64 {
        self.vertex
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn deactivation(&self) -> f64 {
        self.deactivation
    }

    /// Probability that a step adds a hyperedge (`p_v + p_e`).
    pub fn growth(&self) -> f64 {
        self.vertex + self.edge
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_standard_triple() {
        let p = Probabilities::new(0.3, 0.5, 0.2).unwrap();
        assert_eq!(p.deactivation(), 0.2);
        let q = Probabilities::from_vertex_edge(0.3, 0.5).unwrap();
        assert!((q.deactivation() - 0.2).abs() < 1e-15);
        let ba = Probabilities::from_vertex_edge(1.0, 0.0).unwrap();
        assert_eq!(ba.deactivation(), 0.0);
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!(
            Probabilities::new(0.2, 0.5, 0.3),
            Err(ParamError::DeactivationDominates { .. })
        ));
        assert!(matches!(
            Probabilities::new(0.2, 0.6, 0.3),
            Err(ParamError::BadSum(_))
        ));
        assert!(matches!(
            Probabilities::new(-0.1, 0.9, 0.2),
            Err(ParamError::OutOfRange { name: "p_v", .. })
        ));
        assert!(Probabilities::from_vertex_edge(0.7, 0.5).is_err());
        let msg = Probabilities::new(0.1, 0.8, 0.1).unwrap_err().to_string();
        assert!(msg.contains("must exceed"));
    }
}
