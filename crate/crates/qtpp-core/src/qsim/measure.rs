use rand::Rng;

use super::{StateVector, MIN_OUTCOME_PROB};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementResult {
    pub outcome: bool,
    /// Born probability of the returned outcome; always > 0.
    pub probability: f64,
    pub collapsed: StateVector,
}

impl StateVector {
    /// Measures one qubit in the computational basis. Contrary amplitudes are
    /// zeroed and the rest divided by sqrt(probability), so re-measuring the
    /// collapsed state repeats the outcome exactly.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<MeasurementResult> {
        let p1 = self.outcome_probability(qubit, true)?;
        let draw: f64 = rng
            .gen::<f64>()
            .clamp(MIN_OUTCOME_PROB, 1.0 - MIN_OUTCOME_PROB);
        let outcome = draw < p1;
        let probability = if outcome {
            p1
        } else {
            self.outcome_probability(qubit, false)?
        };
        Ok(MeasurementResult {
            outcome,
            probability,
            collapsed: self.collapse(qubit, outcome, probability),
        })
    }
}
