//! Per-pass channel imperfections: systematic rotation misalignment, Gaussian
//! rotation jitter, basis-flip noise, and photon loss.
//!
//! Noise runs once per pass, after the adversary hook; the order
//! (adversary, then noise) is fixed. Within one transmission the sampling
//! order is: loss, then rotation by `fixed_offset + jitter`, then flip.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{CoreError, Result};
use crate::qsim::{Gate, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    fixed_offset: f64,
    jitter_sigma: f64,
    flip_prob: f64,
    loss_prob: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            fixed_offset: 0.0,
            jitter_sigma: 0.0,
            flip_prob: 0.0,
            loss_prob: 0.0,
        }
    }
}

impl NoiseModel {
    pub fn new(
        fixed_offset: f64,
        jitter_sigma: f64,
        flip_prob: f64,
        loss_prob: f64,
    ) -> Result<Self> {
        if !fixed_offset.is_finite() {
            return Err(CoreError::NonFiniteAngle);
        }
        if !jitter_sigma.is_finite() || jitter_sigma < 0.0 {
            return Err(CoreError::Config(format!(
                "channel.jitter_sigma must be a finite value >= 0, got {jitter_sigma}"
            )));
        }
        for (key, p) in [
            ("channel.flip_prob", flip_prob),
            ("channel.loss_prob", loss_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(CoreError::Config(format!(
                    "{key} must lie in [0, 1], got {p}"
                )));
            }
        }
        Ok(Self {
            fixed_offset,
            jitter_sigma,
            flip_prob,
            loss_prob,
        })
    }

    pub fn with_flip_prob(&self, flip_prob: f64) -> Result<Self> {
        Self::new(
            self.fixed_offset,
            self.jitter_sigma,
            flip_prob,
            self.loss_prob,
        )
    }

    pub fn fixed_offset(&self) -> f64 {
        self.fixed_offset
    }

    pub fn jitter_sigma(&self) -> f64 {
        self.jitter_sigma
    }

    pub fn flip_prob(&self) -> f64 {
        self.flip_prob
    }

    pub fn loss_prob(&self) -> f64 {
        self.loss_prob
    }

    pub fn is_quiet(&self) -> bool {
        self.fixed_offset == 0.0
            && self.jitter_sigma == 0.0
            && self.flip_prob == 0.0
            && self.loss_prob == 0.0
    }

    /// Sends the wire qubit (qubit 0 of `state`) through the channel once.
    /// `None` means the photon was lost.
    pub fn transmit<R: Rng + ?Sized>(
        &self,
        state: StateVector,
        rng: &mut R,
    ) -> Result<Option<StateVector>> {
        if self.loss_prob > 0.0 && rng.gen::<f64>() < self.loss_prob {
            return Ok(None);
        }
        let mut state = state;
        let mut angle = self.fixed_offset;
        if self.jitter_sigma > 0.0 {
            let normal =
                Normal::new(0.0, self.jitter_sigma).expect("sigma validated at construction");
            angle += normal.sample(rng);
        }
        if angle != 0.0 {
            state = state.apply_gate(&Gate::rotation(angle)?, &[0])?;
        }
        if self.flip_prob > 0.0 && rng.gen::<f64>() < self.flip_prob {
            state = state.apply_gate(&Gate::pauli_x(), &[0])?;
        }
        Ok(Some(state))
    }
}
