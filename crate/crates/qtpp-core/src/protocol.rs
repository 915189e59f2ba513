//! The rotation-cipher three-pass protocol: per-session random angle keys,
//! |0>/|1> bit encoding, and the full pass sequence with channel and
//! adversary hooks on every pass.
//!
//! Per bit: Alice sends R(theta_A)|m> (pass 1), Bob returns it re-encrypted
//! with R(theta_B) (pass 2), Alice strips her rotation with R(-theta_A)
//! (pass 3), Bob strips his and measures. On each pass the adversary hook
//! runs first, then channel noise. Bits are independent single-qubit (or,
//! under the entangling attack, wire+ancilla) channels.

use std::f64::consts::PI;

use rand::Rng;
use serde_json::json;

use crate::adversary::{AdversaryStrategy, EveRecord};
use crate::channel::NoiseModel;
use crate::error::{CoreError, Result};
use crate::qsim::{Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// Per-session cipher key: one angle in [0, pi) per message bit, each used
/// exactly twice (encrypt, decrypt) and discarded with the session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionKey {
    owner: Party,
    angles: Vec<f64>,
}

impl SessionKey {
    pub fn generate<R: Rng + ?Sized>(owner: Party, n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::EmptyMessage);
        }
        let angles = (0..n).map(|_| rng.gen::<f64>() * PI).collect();
        Ok(Self { owner, angles })
    }

    pub fn from_angles(owner: Party, angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(CoreError::EmptyMessage);
        }
        for &a in &angles {
            if !(0.0..PI).contains(&a) {
                return Err(CoreError::Config(format!(
                    "key angles must lie in [0, pi), got {a}"
                )));
            }
        }
        Ok(Self { owner, angles })
    }

    pub fn fixed(owner: Party, theta: f64, n: usize) -> Result<Self> {
        Self::from_angles(owner, vec![theta; n])
    }

    pub fn owner(&self) -> Party {
        self.owner
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

pub fn encode_bit(bit: bool) -> StateVector {
    StateVector::basis_state(1, &[bit]).expect("single qubit basis state")
}

/// R(theta) on the wire qubit.
pub fn encrypt(state: &StateVector, theta: f64) -> Result<StateVector> {
    state.apply_gate(&Gate::rotation(theta)?, &[0])
}

/// R(-theta) on the wire qubit.
pub fn decrypt(state: &StateVector, theta: f64) -> Result<StateVector> {
    state.apply_gate(&Gate::rotation(-theta)?, &[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

/// One pass over the wire, as released to the channel (post-adversary,
/// pre-noise). Wire states are recorded only on request; an experiment over
/// 10^5 bits should not retain 3x10^5 state vectors.
///
/// `wire_states` holds one entry per bit that was actually sent on this pass,
/// in bit order; a bit lost on an earlier pass leaves no entry here. The
/// `lost` flags of earlier passes recover the alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct PassRecord {
    pub pass_index: u8,
    pub direction: Direction,
    pub wire_states: Option<Vec<StateVector>>,
    pub lost: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub message: Vec<bool>,
    pub key_a: SessionKey,
    pub key_b: SessionKey,
    pub passes: [PassRecord; 3],
    /// Bob's measured bits; `None` marks a photon lost in transit.
    pub recovered: Vec<Option<bool>>,
    /// `recovered[j] != message[j]`, `None` for lost bits.
    pub per_bit_error: Vec<Option<bool>>,
}

impl SessionTranscript {
    pub fn lost_count(&self) -> usize {
        self.recovered.iter().filter(|r| r.is_none()).count()
    }

    pub fn error_count(&self) -> usize {
        self.per_bit_error
            .iter()
            .filter(|e| **e == Some(true))
            .count()
    }

    /// JSON view of the transcript. Key angles are redacted unless
    /// `debug_keys` is set; nothing else in the simulator serializes them.
    pub fn to_json(&self, debug_keys: bool) -> serde_json::Value {
        let bits = |v: &[bool]| v.iter().map(|&b| u8::from(b)).collect::<Vec<_>>();
        let opt_bits = |v: &[Option<bool>]| v.iter().map(|o| o.map(u8::from)).collect::<Vec<_>>();
        let keys = if debug_keys {
            json!({
                "alice_angles": self.key_a.angles(),
                "bob_angles": self.key_b.angles(),
            })
        } else {
            serde_json::Value::Null
        };
        let passes: Vec<_> = self
            .passes
            .iter()
            .map(|p| {
                let states = p.wire_states.as_ref().map(|states| {
                    states
                        .iter()
                        .map(|s| {
                            s.amplitudes()
                                .iter()
                                .map(|a| vec![a.re, a.im])
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>()
                });
                json!({
                    "pass_index": p.pass_index,
                    "direction": match p.direction {
                        Direction::AliceToBob => "alice_to_bob",
                        Direction::BobToAlice => "bob_to_alice",
                    },
                    "lost": p.lost,
                    "wire_states": states,
                })
            })
            .collect();
        json!({
            "message": bits(&self.message),
            "keys": keys,
            "passes": passes,
            "recovered": opt_bits(&self.recovered),
            "per_bit_error": opt_bits(&self.per_bit_error),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SessionOptions {
    pub record_wire_states: bool,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            record_wire_states: true,
        }
    }
}

/// Runs one session; also returns Eve's accumulated record so her guesses can
/// be finalized afterwards.
pub fn run_session<R: Rng + ?Sized>(
    message: &[bool],
    key_a: &SessionKey,
    key_b: &SessionKey,
    channel: &NoiseModel,
    adversary: &AdversaryStrategy,
    rng: &mut R,
) -> Result<(SessionTranscript, EveRecord)> {
    run_session_with(
        message,
        key_a,
        key_b,
        channel,
        adversary,
        SessionOptions::default(),
        rng,
    )
}

pub fn run_session_with<R: Rng + ?Sized>(
    message: &[bool],
    key_a: &SessionKey,
    key_b: &SessionKey,
    channel: &NoiseModel,
    adversary: &AdversaryStrategy,
    options: SessionOptions,
    rng: &mut R,
) -> Result<(SessionTranscript, EveRecord)> {
    let n = message.len();
    if n == 0 {
        return Err(CoreError::EmptyMessage);
    }
    for key in [key_a, key_b] {
        if key.len() != n {
            return Err(CoreError::KeyLength {
                key: key.len(),
                message: n,
            });
        }
    }

    let mut passes = [
        new_pass_record(1, Direction::AliceToBob, n, options.record_wire_states),
        new_pass_record(2, Direction::BobToAlice, n, options.record_wire_states),
        new_pass_record(3, Direction::AliceToBob, n, options.record_wire_states),
    ];
    let mut eve = EveRecord::with_len(n);
    let mut recovered = Vec::with_capacity(n);

    for (j, &bit) in message.iter().enumerate() {
        let theta_a = key_a.angles()[j];
        let theta_b = key_b.angles()[j];
        // None once the photon is lost in transit.
        let mut wire = Some(encode_bit(bit));
        let mut lost_wire = None;

        for pass_index in 1u8..=3 {
            let state = wire.take().expect("wire present while passes continue");
            let state = match pass_index {
                1 => encrypt(&state, theta_a)?,
                2 => encrypt(&state, theta_b)?,
                _ => decrypt(&state, theta_a)?,
            };
            let entering = adversary.on_pass(state, pass_index, &mut eve.bits[j], rng)?;
            let record = &mut passes[pass_index as usize - 1];
            if let Some(states) = record.wire_states.as_mut() {
                states.push(entering.clone());
            }
            let keep = (channel.loss_prob() > 0.0 && eve.bits[j].ancilla_count > 0)
                .then(|| entering.clone());
            match channel.transmit(entering, rng)? {
                Some(next) => wire = Some(next),
                None => {
                    record.lost[j] = true;
                    lost_wire = keep;
                    break;
                }
            }
        }

        if let Some(state) = wire {
            let final_state = decrypt(&state, theta_b)?;
            let m = final_state.measure_qubit(0, rng)?;
            recovered.push(Some(m.outcome));
            if eve.bits[j].ancilla_count > 0 {
                eve.bits[j].post_state = Some(m.collapsed);
            }
        } else {
            recovered.push(None);
            // A lost photon decoheres in the environment, which for
            // basis statistics is a wire measurement nobody reads; Eve's
            // entangled ancillas survive in her lab.
            if let Some(dropped) = lost_wire {
                let m = dropped.measure_qubit(0, rng)?;
                eve.bits[j].post_state = Some(m.collapsed);
            }
        }
    }

    let per_bit_error = recovered
        .iter()
        .zip(message)
        .map(|(r, &m)| r.map(|bit| bit != m))
        .collect();

    Ok((
        SessionTranscript {
            message: message.to_vec(),
            key_a: key_a.clone(),
            key_b: key_b.clone(),
            passes,
            recovered,
            per_bit_error,
        },
        eve,
    ))
}

fn new_pass_record(pass_index: u8, direction: Direction, n: usize, record: bool) -> PassRecord {
    PassRecord {
        pass_index,
        direction,
        wire_states: record.then(|| Vec::with_capacity(n)),
        lost: vec![false; n],
    }
}
