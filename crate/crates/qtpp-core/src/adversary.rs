//! Eavesdropper strategies attached to the wire, one hook per pass, plus the
//! post-session guess procedure over whatever Eve recorded.
//!
//! The entangling attack keeps Eve's ancillas in the same joint state vector
//! as the wire qubit (wire = qubit 0, ancillas appended in attack order), so
//! downstream rotations and Bob's measurement act on the true joint state.

use rand::Rng;

use crate::error::{CoreError, Result};
use crate::qsim::{Gate, StateVector, MAX_QUBITS};

pub const PASS_COUNT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    Passive,
    InterceptResend,
    EntangleCnot,
}

/// Deterministic map from Eve's recorded bits (ordered by pass) to her guess.
///
/// `Earliest` reads the first record; under uniform keys it is correct with
/// probability exactly 1/2 for both non-passive attacks. `Majority` over the
/// three entangled ancillas is anti-correlated with the message (accuracy
/// 3/8), and `Xor` decodes it with accuracy 3/4; both stay available for
/// studying the attack, with `Earliest` as the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessRule {
    Random,
    Earliest,
    Latest,
    Majority,
    Xor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryStrategy {
    kind: AdversaryKind,
    attacked_passes: [bool; PASS_COUNT],
    measurement_basis_angle: f64,
    guess_rule: GuessRule,
    pre_measure_unitary: Option<Gate>,
}

impl AdversaryStrategy {
    pub fn passive() -> Self {
        Self {
            kind: AdversaryKind::Passive,
            attacked_passes: [false; PASS_COUNT],
            measurement_basis_angle: 0.0,
            guess_rule: GuessRule::Random,
            pre_measure_unitary: None,
        }
    }

    /// Measure-and-resend on the given passes (at least one of 1..=3).
    pub fn intercept_resend(passes: &[u8]) -> Result<Self> {
        Ok(Self {
            kind: AdversaryKind::InterceptResend,
            attacked_passes: parse_passes(passes)?,
            measurement_basis_angle: 0.0,
            guess_rule: GuessRule::Earliest,
            pre_measure_unitary: None,
        })
    }

    /// CNOT a fresh ancilla off the wire on each of the given passes.
    pub fn entangle_cnot(passes: &[u8]) -> Result<Self> {
        Ok(Self {
            kind: AdversaryKind::EntangleCnot,
            attacked_passes: parse_passes(passes)?,
            measurement_basis_angle: 0.0,
            guess_rule: GuessRule::Earliest,
            pre_measure_unitary: None,
        })
    }

    /// Stock configuration per kind: intercept-resend hits pass 1, the
    /// entangling attack hits all three passes.
    pub fn default_for(kind: AdversaryKind) -> Self {
        match kind {
            AdversaryKind::Passive => Self::passive(),
            AdversaryKind::InterceptResend => Self::intercept_resend(&[1]).expect("valid"),
            AdversaryKind::EntangleCnot => Self::entangle_cnot(&[1, 2, 3]).expect("valid"),
        }
    }

    pub fn with_guess_rule(mut self, rule: GuessRule) -> Self {
        self.guess_rule = rule;
        self
    }

    /// Basis for intercept-resend measurements: Eve measures in the basis
    /// rotated by `angle` (0 = computational).
    pub fn with_measurement_basis_angle(mut self, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(CoreError::NonFiniteAngle);
        }
        self.measurement_basis_angle = angle;
        Ok(self)
    }

    /// Joint unitary applied to the retained ancillas before Eve measures
    /// them. Must act on exactly as many qubits as there are attacked passes;
    /// skipped if a lost photon left fewer ancillas than planned.
    pub fn with_pre_measure_unitary(mut self, gate: Gate) -> Result<Self> {
        if self.kind != AdversaryKind::EntangleCnot {
            return Err(CoreError::Config(
                "pre-measure unitary only applies to the entangle-cnot strategy".into(),
            ));
        }
        let planned = self.attacked_pass_count();
        if gate.num_qubits() != planned {
            return Err(CoreError::Config(format!(
                "pre-measure unitary acts on {} qubit(s) but {planned} ancilla(s) are planned",
                gate.num_qubits()
            )));
        }
        self.pre_measure_unitary = Some(gate);
        Ok(self)
    }

    pub fn kind(&self) -> AdversaryKind {
        self.kind
    }

    pub fn guess_rule(&self) -> GuessRule {
        self.guess_rule
    }

    pub fn measurement_basis_angle(&self) -> f64 {
        self.measurement_basis_angle
    }

    pub fn attacked_passes(&self) -> Vec<u8> {
        (1..=PASS_COUNT as u8)
            .filter(|&p| self.attacked_passes[p as usize - 1])
            .collect()
    }

    pub fn attacks_pass(&self, pass_index: u8) -> bool {
        (1..=PASS_COUNT as u8).contains(&pass_index)
            && self.attacked_passes[pass_index as usize - 1]
    }

    fn attacked_pass_count(&self) -> usize {
        self.attacked_passes.iter().filter(|&&b| b).count()
    }

    /// Eve's action while one pass's qubit crosses her segment of the wire.
    /// Returns the state she releases onto the channel.
    pub fn on_pass<R: Rng + ?Sized>(
        &self,
        wire_state: StateVector,
        pass_index: u8,
        record: &mut EveBitRecord,
        rng: &mut R,
    ) -> Result<StateVector> {
        if !self.attacks_pass(pass_index) {
            return Ok(wire_state);
        }
        match self.kind {
            AdversaryKind::Passive => Ok(wire_state),
            AdversaryKind::InterceptResend => {
                let beta = self.measurement_basis_angle;
                let mut state = wire_state;
                if beta != 0.0 {
                    state = state.apply_gate(&Gate::rotation(-beta)?, &[0])?;
                }
                let m = state.measure_qubit(0, rng)?;
                record.observed[pass_index as usize - 1] = Some(m.outcome);
                let mut released = m.collapsed;
                if beta != 0.0 {
                    released = released.apply_gate(&Gate::rotation(beta)?, &[0])?;
                }
                Ok(released)
            }
            AdversaryKind::EntangleCnot => {
                if record.ancilla_count + 1 >= MAX_QUBITS {
                    return Err(CoreError::Config(
                        "ancilla budget exceeded: at most one ancilla per pass".into(),
                    ));
                }
                let joint = wire_state.tensor(&StateVector::basis_state(1, &[false])?)?;
                let ancilla = joint.num_qubits() - 1;
                let entangled = joint.apply_gate(&Gate::cnot(), &[0, ancilla])?;
                record.ancilla_count += 1;
                Ok(entangled)
            }
        }
    }

    /// Post-session guess for every message position. Fills
    /// `record.final_guess` and returns it.
    pub fn finalize_guess<R: Rng + ?Sized>(
        &self,
        record: &mut EveRecord,
        rng: &mut R,
    ) -> Result<Vec<bool>> {
        let mut guesses = Vec::with_capacity(record.bits.len());
        let planned = self.attacked_pass_count();
        for bit in &mut record.bits {
            let observed: Vec<bool> = match self.kind {
                AdversaryKind::EntangleCnot => {
                    let mut outcomes = Vec::new();
                    if let Some(state) = bit.post_state.take() {
                        let mut state = state;
                        let first = state.num_qubits() - bit.ancilla_count;
                        if bit.ancilla_count == planned {
                            if let Some(u) = &self.pre_measure_unitary {
                                let targets: Vec<usize> = (first..state.num_qubits()).collect();
                                state = state.apply_gate(u, &targets)?;
                            }
                        }
                        for q in first..state.num_qubits() {
                            let m = state.measure_qubit(q, rng)?;
                            outcomes.push(m.outcome);
                            state = m.collapsed;
                        }
                    }
                    outcomes
                }
                _ => bit.observed.iter().flatten().copied().collect(),
            };
            let guess = match (self.guess_rule, observed.as_slice()) {
                (_, []) | (GuessRule::Random, _) => rng.gen::<bool>(),
                (GuessRule::Earliest, obs) => obs[0],
                (GuessRule::Latest, obs) => obs[obs.len() - 1],
                (GuessRule::Majority, obs) => {
                    let ones = obs.iter().filter(|&&b| b).count();
                    // even split falls back to the earliest record
                    match (2 * ones).cmp(&obs.len()) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => obs[0],
                    }
                }
                (GuessRule::Xor, obs) => obs.iter().fold(false, |acc, &b| acc ^ b),
            };
            guesses.push(guess);
        }
        record.final_guess = Some(guesses.clone());
        Ok(guesses)
    }
}

fn parse_passes(passes: &[u8]) -> Result<[bool; PASS_COUNT]> {
    if passes.is_empty() {
        return Err(CoreError::Config(
            "attack_passes must name at least one pass".into(),
        ));
    }
    let mut attacked = [false; PASS_COUNT];
    for &p in passes {
        if !(1..=PASS_COUNT as u8).contains(&p) {
            return Err(CoreError::Config(format!(
                "attack_passes entries must be 1, 2, or 3, got {p}"
            )));
        }
        if attacked[p as usize - 1] {
            return Err(CoreError::Config(format!(
                "attack_passes lists pass {p} twice"
            )));
        }
        attacked[p as usize - 1] = true;
    }
    Ok(attacked)
}

/// Everything Eve retains about one message position.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EveBitRecord {
    /// Intercept-resend outcomes, indexed by pass - 1.
    pub observed: [Option<bool>; PASS_COUNT],
    pub ancilla_count: usize,
    /// Joint state after Bob's (or the environment's) wire measurement; the
    /// last `ancilla_count` qubits are Eve's.
    pub post_state: Option<StateVector>,
}

/// Eve's session memory: one record per message position plus her final
/// guesses once `finalize_guess` has run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EveRecord {
    pub bits: Vec<EveBitRecord>,
    pub final_guess: Option<Vec<bool>>,
}

impl EveRecord {
    pub fn with_len(n: usize) -> Self {
        Self {
            bits: vec![EveBitRecord::default(); n],
            final_guess: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rotated(theta: f64) -> StateVector {
        StateVector::basis_state(1, &[false])
            .unwrap()
            .apply_gate(&Gate::rotation(theta).unwrap(), &[0])
            .unwrap()
    }

    #[test]
    fn passive_is_identity_and_guesses_randomly() {
        let eve = AdversaryStrategy::passive();
        let mut rec = EveBitRecord::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = rotated(0.4);
        let out = eve.on_pass(s.clone(), 1, &mut rec, &mut rng).unwrap();
        assert_eq!(out, s);
        assert_eq!(rec, EveBitRecord::default());
    }

    #[test]
    fn strategies_require_a_pass() {
        assert!(AdversaryStrategy::intercept_resend(&[]).is_err());
        assert!(AdversaryStrategy::entangle_cnot(&[4]).is_err());
        assert!(AdversaryStrategy::intercept_resend(&[1, 1]).is_err());
    }

    #[test]
    fn intercept_resend_releases_exact_basis_state() {
        let eve = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..200 {
            let mut rec = EveBitRecord::default();
            let out = eve
                .on_pass(rotated(0.1 + i as f64 * 0.013), 1, &mut rec, &mut rng)
                .unwrap();
            let e = rec.observed[0].unwrap();
            // amplitudes are 0 / +-1 exactly up to 1e-12
            let hit = out.amplitudes()[usize::from(e)].norm();
            let miss = out.amplitudes()[usize::from(!e)].norm();
            assert_abs_diff_eq!(hit, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(miss, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn intercept_resend_observation_follows_born_rule() {
        let theta = 0.9f64;
        let eve = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mut zeros = 0;
        for _ in 0..n {
            let mut rec = EveBitRecord::default();
            eve.on_pass(rotated(theta), 1, &mut rec, &mut rng).unwrap();
            if !rec.observed[0].unwrap() {
                zeros += 1;
            }
        }
        assert_abs_diff_eq!(zeros as f64 / n as f64, theta.cos().powi(2), epsilon = 5e-3);
    }

    #[test]
    fn rotated_basis_measurement_is_transparent_to_matching_state() {
        // measuring R(beta)|0> in the beta-rotated basis observes 0 surely
        let beta = 0.6;
        let eve = AdversaryStrategy::intercept_resend(&[1])
            .unwrap()
            .with_measurement_basis_angle(beta)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let mut rec = EveBitRecord::default();
            let out = eve.on_pass(rotated(beta), 1, &mut rec, &mut rng).unwrap();
            assert_eq!(rec.observed[0], Some(false));
            assert_abs_diff_eq!(out.amplitudes()[0].re, beta.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(out.amplitudes()[1].re, -beta.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn entangle_cnot_preserves_wire_marginals() {
        let eve = AdversaryStrategy::entangle_cnot(&[1, 2, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = 1.2f64;
        let mut rec = EveBitRecord::default();
        let before = rotated(theta);
        let p_before = before.outcome_probability(0, true).unwrap();
        let after = eve.on_pass(before, 1, &mut rec, &mut rng).unwrap();
        let p_after = after.outcome_probability(0, true).unwrap();
        assert!((p_before - p_after).abs() < 1e-12);
        assert_eq!(after.num_qubits(), 2);
        assert_eq!(rec.ancilla_count, 1);
    }

    #[test]
    fn entangle_cnot_ancilla_copies_basis_statistics() {
        let eve = AdversaryStrategy::entangle_cnot(&[1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let theta = 0.7f64;
        let mut rec = EveBitRecord::default();
        let joint = eve.on_pass(rotated(theta), 1, &mut rec, &mut rng).unwrap();
        assert_abs_diff_eq!(
            joint.outcome_probability(1, true).unwrap(),
            theta.sin().powi(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn guess_rules_read_records_in_pass_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut record = EveRecord::with_len(1);
        record.bits[0].observed = [Some(true), Some(false), Some(false)];
        let base = AdversaryStrategy::intercept_resend(&[1, 2, 3]).unwrap();

        let mut rec = record.clone();
        let g = base.clone().finalize_guess(&mut rec, &mut rng).unwrap();
        assert_eq!(g, vec![true]); // earliest

        let mut rec = record.clone();
        let g = base
            .clone()
            .with_guess_rule(GuessRule::Latest)
            .finalize_guess(&mut rec, &mut rng)
            .unwrap();
        assert_eq!(g, vec![false]);

        let mut rec = record.clone();
        let g = base
            .clone()
            .with_guess_rule(GuessRule::Majority)
            .finalize_guess(&mut rec, &mut rng)
            .unwrap();
        assert_eq!(g, vec![false]);

        let mut rec = record;
        let g = base
            .with_guess_rule(GuessRule::Xor)
            .finalize_guess(&mut rec, &mut rng)
            .unwrap();
        assert_eq!(g, vec![true]);
    }

    #[test]
    fn majority_tie_falls_back_to_earliest() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut record = EveRecord::with_len(1);
        record.bits[0].observed = [Some(true), Some(false), None];
        let eve = AdversaryStrategy::intercept_resend(&[1, 2])
            .unwrap()
            .with_guess_rule(GuessRule::Majority);
        assert_eq!(
            eve.finalize_guess(&mut record, &mut rng).unwrap(),
            vec![true]
        );
    }

    #[test]
    fn finalize_sets_final_guess_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let eve = AdversaryStrategy::passive();
        let mut record = EveRecord::with_len(4);
        let g = eve.finalize_guess(&mut record, &mut rng).unwrap();
        assert_eq!(record.final_guess.as_ref(), Some(&g));
        assert_eq!(g.len(), 4);
    }

    /// Kronecker product of two gates, row-major entries.
    fn kron(a: &Gate, b: &Gate) -> Vec<num_complex::Complex64> {
        let (da, db) = (a.dimension(), b.dimension());
        let dim = da * db;
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); dim * dim];
        for ra in 0..da {
            for ca in 0..da {
                for rb in 0..db {
                    for cb in 0..db {
                        out[(ra * db + rb) * dim + (ca * db + cb)] =
                            a.entry(ra, ca) * b.entry(rb, cb);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn pre_measure_unitary_must_match_ancilla_count() {
        let eve = AdversaryStrategy::entangle_cnot(&[1, 2]).unwrap();
        assert!(eve
            .clone()
            .with_pre_measure_unitary(Gate::pauli_x())
            .is_err());
        let xx = Gate::from_matrix(2, kron(&Gate::pauli_x(), &Gate::pauli_x())).unwrap();
        assert!(eve.with_pre_measure_unitary(xx).is_ok());
    }
}
