//! Prepare-and-measure BB84 baseline: two conjugate bases (rectilinear = 0,
//! diagonal = pi/4 rotation), random-basis intercept-resend eavesdropper,
//! basis sifting, and sifted QBER. One quantum pass per bit; the adversary
//! hook runs before channel noise, as in the three-pass protocol.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;

use crate::channel::NoiseModel;
use crate::error::{CoreError, Result};
use crate::protocol::encode_bit;
use crate::qsim::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Basis {
    pub fn angle(self) -> f64 {
        match self {
            Basis::Rectilinear => 0.0,
            Basis::Diagonal => FRAC_PI_4,
        }
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen::<bool>() {
            Basis::Diagonal
        } else {
            Basis::Rectilinear
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bb84Adversary {
    Passive,
    InterceptResend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bb84Session {
    pub alice_bits: Vec<bool>,
    pub alice_bases: Vec<Basis>,
    pub bob_bases: Vec<Basis>,
    /// `None` marks a lost photon.
    pub bob_outcomes: Vec<Option<bool>>,
    /// Eve's measured bit per position when intercepting, else `None`.
    pub eve_observed: Vec<Option<bool>>,
    /// Received positions where the bases matched.
    pub sifted_positions: Vec<usize>,
    /// Mismatch fraction over sifted positions (0 when none were sifted).
    pub sifted_qber: f64,
}

impl Bb84Session {
    pub fn lost_count(&self) -> usize {
        self.bob_outcomes.iter().filter(|o| o.is_none()).count()
    }
}

pub fn run_bb84<R: Rng + ?Sized>(
    n: usize,
    adversary: Bb84Adversary,
    channel: &NoiseModel,
    rng: &mut R,
) -> Result<Bb84Session> {
    if n == 0 {
        return Err(CoreError::EmptyMessage);
    }
    let mut alice_bits = Vec::with_capacity(n);
    let mut alice_bases = Vec::with_capacity(n);
    let mut bob_bases = Vec::with_capacity(n);
    let mut bob_outcomes = Vec::with_capacity(n);
    let mut eve_observed = Vec::with_capacity(n);

    for _ in 0..n {
        let bit: bool = rng.gen();
        let basis = Basis::random(rng);
        alice_bits.push(bit);
        alice_bases.push(basis);

        let mut state = encode_bit(bit);
        if basis == Basis::Diagonal {
            state = state.apply_gate(&Gate::rotation(basis.angle())?, &[0])?;
        }

        let observed = match adversary {
            Bb84Adversary::Passive => None,
            Bb84Adversary::InterceptResend => {
                let eve_basis = Basis::random(rng);
                if eve_basis == Basis::Diagonal {
                    state = state.apply_gate(&Gate::rotation(-eve_basis.angle())?, &[0])?;
                }
                let m = state.measure_qubit(0, rng)?;
                state = m.collapsed;
                if eve_basis == Basis::Diagonal {
                    state = state.apply_gate(&Gate::rotation(eve_basis.angle())?, &[0])?;
                }
                Some(m.outcome)
            }
        };
        eve_observed.push(observed);

        let bob_basis = Basis::random(rng);
        bob_bases.push(bob_basis);
        match channel.transmit(state, rng)? {
            None => bob_outcomes.push(None),
            Some(mut received) => {
                if bob_basis == Basis::Diagonal {
                    received = received.apply_gate(&Gate::rotation(-bob_basis.angle())?, &[0])?;
                }
                bob_outcomes.push(Some(received.measure_qubit(0, rng)?.outcome));
            }
        }
    }

    let sifted_positions: Vec<usize> = (0..n)
        .filter(|&j| alice_bases[j] == bob_bases[j] && bob_outcomes[j].is_some())
        .collect();
    let mismatches = sifted_positions
        .iter()
        .filter(|&&j| bob_outcomes[j] != Some(alice_bits[j]))
        .count();
    let sifted_qber = if sifted_positions.is_empty() {
        0.0
    } else {
        mismatches as f64 / sifted_positions.len() as f64
    };

    Ok(Bb84Session {
        alice_bits,
        alice_bases,
        bob_bases,
        bob_outcomes,
        eve_observed,
        sifted_positions,
        sifted_qber,
    })
}
