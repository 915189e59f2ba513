//! Monte Carlo experiment runner and eavesdropper detection: many sessions
//! under one configuration, pooled QBER over sacrificed check bits, Eve
//! accuracy against ground truth, detection decisions, and parameter sweeps.
//!
//! Aggregation is order-independent (integer counters keyed by trial), and
//! every trial draws its stream from (master_seed, salt, trial_index) via
//! [`crate::rng::trial_rng`], so reports are reproducible bit for bit.

use rand::Rng;

use crate::adversary::{AdversaryKind, AdversaryStrategy, EveRecord};
use crate::bb84::{run_bb84, Bb84Adversary};
use crate::channel::NoiseModel;
use crate::error::{CoreError, Result};
use crate::protocol::{run_session_with, Party, SessionKey, SessionOptions, SessionTranscript};
use crate::rng::trial_rng;

pub const Z95: f64 = 1.959963984540054;

pub const DEFAULT_CHECK_FRACTION: f64 = 0.2;
pub const DEFAULT_DETECTION_THRESHOLD: f64 = 0.11;

/// Salt words separating the independent scenarios of one invocation.
pub const SALT_MAIN: u64 = 0;
pub const SALT_SWEEP_BASE: u64 = 0x1000;
pub const SALT_COMPARE_QTPP_FLOOR: u64 = 0x2001;
pub const SALT_COMPARE_QTPP_ATTACK: u64 = 0x2002;
pub const SALT_COMPARE_BB84_FLOOR: u64 = 0x2003;
pub const SALT_COMPARE_BB84_ATTACK: u64 = 0x2004;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Qtpp,
    Bb84,
}

/// How per-bit key angles are drawn: fresh uniform angles, one shared fixed
/// angle, or uniform draws from the discrete grid {k*pi/m}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleMode {
    Uniform,
    Fixed(f64),
    Grid(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub trials: u64,
    pub bits_per_session: usize,
    pub adversary: AdversaryStrategy,
    pub channel: NoiseModel,
    pub check_fraction: f64,
    pub detection_threshold: f64,
    pub master_seed: u64,
    /// Domain separation for derived streams; leave 0 unless the caller runs
    /// several scenarios under one master seed.
    pub salt: u64,
    pub angle_mode: AngleMode,
}

impl ExperimentConfig {
    pub fn new(protocol: Protocol, master_seed: u64) -> Self {
        Self {
            protocol,
            trials: 1,
            bits_per_session: 1024,
            adversary: AdversaryStrategy::passive(),
            channel: NoiseModel::default(),
            check_fraction: DEFAULT_CHECK_FRACTION,
            detection_threshold: DEFAULT_DETECTION_THRESHOLD,
            master_seed,
            salt: SALT_MAIN,
            angle_mode: AngleMode::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CoreError::Config("trials must be at least 1".into()));
        }
        if self.bits_per_session == 0 {
            return Err(CoreError::Config("bits must be at least 1".into()));
        }
        if !(self.check_fraction > 0.0 && self.check_fraction <= 1.0) {
            return Err(CoreError::Config(format!(
                "check_fraction must lie in (0, 1], got {}",
                self.check_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.detection_threshold) {
            return Err(CoreError::Config(format!(
                "detection_threshold must lie in [0, 1], got {}",
                self.detection_threshold
            )));
        }
        match self.angle_mode {
            AngleMode::Fixed(theta) if !(0.0..std::f64::consts::PI).contains(&theta) => {
                return Err(CoreError::Config(format!(
                    "theta must lie in [0, pi), got {theta}"
                )));
            }
            AngleMode::Grid(0) => {
                return Err(CoreError::Config("grid_m must be at least 1".into()));
            }
            _ => {}
        }
        if self.protocol == Protocol::Bb84 && self.adversary.kind() == AdversaryKind::EntangleCnot {
            return Err(CoreError::Config(
                "adversary entangle-cnot is not defined for bb84; use passive or intercept-resend"
                    .into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentReport {
    /// Pooled mismatch fraction over all sacrificed check bits.
    pub mean_qber: f64,
    /// 95% normal-approximation half-width for `mean_qber`.
    pub qber_ci95: f64,
    /// Eve's guesses scored against the true message bits, all positions.
    pub eve_accuracy: f64,
    pub eve_ci95: f64,
    /// Fraction of sessions whose check QBER exceeded the threshold.
    pub detection_rate: f64,
    /// Fraction of received bits that survive sifting (1.0 by construction
    /// for the three-pass protocol).
    pub sift_fraction: f64,
    /// Fraction of sent bits lost in transit.
    pub lost_fraction: f64,
    /// Fraction of sent bits left for keying after sifting, loss, and the
    /// sacrificed check bits.
    pub usable_key_fraction: f64,
    pub trials: u64,
    pub check_bits: u64,
    pub check_errors: u64,
    pub eve_bits: u64,
    /// Sessions that produced no estimable check set (all bits lost or
    /// nothing sifted); counted, never fatal.
    pub sessions_errored: u64,
}

/// Mismatch fraction of Bob's bits against Alice's over the check positions.
pub fn estimate_qber(
    sent: &[bool],
    recovered: &[Option<bool>],
    check_positions: &[usize],
) -> Result<f64> {
    if check_positions.is_empty() {
        return Err(CoreError::EmptyCheckSet);
    }
    let mut mismatches = 0usize;
    for &j in check_positions {
        let Some(Some(bit)) = recovered.get(j) else {
            return Err(CoreError::Config(format!(
                "check position {j} is lost or out of range"
            )));
        };
        if *bit != sent[j] {
            mismatches += 1;
        }
    }
    Ok(mismatches as f64 / check_positions.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Clean,
    Compromised,
}

pub fn detect_eavesdropper(qber: f64, threshold: f64) -> Detection {
    if qber > threshold {
        Detection::Compromised
    } else {
        Detection::Clean
    }
}

fn normal_ci95(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Default)]
struct Tally {
    check_bits: u64,
    check_errors: u64,
    eve_correct: u64,
    eve_bits: u64,
    flagged: u64,
    lost: u64,
    sent: u64,
    received: u64,
    sifted: u64,
    usable: u64,
    errored: u64,
}

impl Tally {
    fn into_report(self, trials: u64) -> ExperimentReport {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let mean_qber = ratio(self.check_errors, self.check_bits);
        let eve_accuracy = ratio(self.eve_correct, self.eve_bits);
        ExperimentReport {
            mean_qber,
            qber_ci95: normal_ci95(mean_qber, self.check_bits),
            eve_accuracy,
            eve_ci95: normal_ci95(eve_accuracy, self.eve_bits),
            detection_rate: ratio(self.flagged, trials),
            sift_fraction: ratio(self.sifted, self.received),
            lost_fraction: ratio(self.lost, self.sent),
            usable_key_fraction: ratio(self.usable, self.sent),
            trials,
            check_bits: self.check_bits,
            check_errors: self.check_errors,
            eve_bits: self.eve_bits,
            sessions_errored: self.errored,
        }
    }
}

/// Number of bits sacrificed for estimation out of `available`.
fn check_count(check_fraction: f64, available: usize) -> usize {
    ((check_fraction * available as f64).ceil() as usize).min(available)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.protocol {
        Protocol::Qtpp => run_qtpp_experiment(config),
        Protocol::Bb84 => run_bb84_experiment(config),
    }
}

fn draw_key<R: Rng + ?Sized>(
    owner: Party,
    mode: AngleMode,
    n: usize,
    rng: &mut R,
) -> Result<SessionKey> {
    match mode {
        AngleMode::Uniform => SessionKey::generate(owner, n, rng),
        AngleMode::Fixed(theta) => SessionKey::fixed(owner, theta, n),
        AngleMode::Grid(m) => {
            let step = std::f64::consts::PI / f64::from(m);
            let angles = (0..n)
                .map(|_| step * f64::from(rng.gen_range(0..m)))
                .collect();
            SessionKey::from_angles(owner, angles)
        }
    }
}

/// One trial's draws in their committed order: message bits, Alice's key,
/// Bob's key, then the session itself. Both the experiment loop and
/// [`replay_qtpp_trial`] go through here so their streams agree.
fn qtpp_trial_session<R: Rng + ?Sized>(
    config: &ExperimentConfig,
    record: bool,
    rng: &mut R,
) -> Result<(SessionTranscript, EveRecord)> {
    let n = config.bits_per_session;
    let message: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let key_a = draw_key(Party::Alice, config.angle_mode, n, rng)?;
    let key_b = draw_key(Party::Bob, config.angle_mode, n, rng)?;
    run_session_with(
        &message,
        &key_a,
        &key_b,
        &config.channel,
        &config.adversary,
        SessionOptions {
            record_wire_states: record,
        },
        rng,
    )
}

/// Re-runs one trial of a qtpp experiment with wire-state recording turned
/// on, drawing exactly what [`run_experiment`] drew for that trial.
pub fn replay_qtpp_trial(
    config: &ExperimentConfig,
    trial: u64,
) -> Result<(SessionTranscript, EveRecord)> {
    config.validate()?;
    if config.protocol != Protocol::Qtpp {
        return Err(CoreError::Config(
            "transcript replay requires the qtpp protocol".into(),
        ));
    }
    if trial >= config.trials {
        return Err(CoreError::Config(format!(
            "trial {trial} out of range (trials = {})",
            config.trials
        )));
    }
    let mut rng = trial_rng(config.master_seed, config.salt, trial);
    qtpp_trial_session(config, true, &mut rng)
}

fn run_qtpp_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = config.bits_per_session;
    let mut tally = Tally::default();
    for trial in 0..config.trials {
        let mut rng = trial_rng(config.master_seed, config.salt, trial);
        let (transcript, mut eve) = qtpp_trial_session(config, false, &mut rng)?;
        let message = &transcript.message;

        tally.sent += n as u64;
        let valid: Vec<usize> = (0..n)
            .filter(|&j| transcript.recovered[j].is_some())
            .collect();
        tally.lost += (n - valid.len()) as u64;
        tally.received += valid.len() as u64;
        tally.sifted += valid.len() as u64; // every received bit is usable

        if valid.is_empty() {
            tally.errored += 1;
        } else {
            let count = check_count(config.check_fraction, valid.len());
            let picks = rand::seq::index::sample(&mut rng, valid.len(), count);
            let check_positions: Vec<usize> = picks.iter().map(|i| valid[i]).collect();
            let qber = estimate_qber(message, &transcript.recovered, &check_positions)?;
            tally.check_bits += count as u64;
            tally.check_errors += (qber * count as f64).round() as u64;
            tally.usable += (valid.len() - count) as u64;
            if detect_eavesdropper(qber, config.detection_threshold) == Detection::Compromised {
                tally.flagged += 1;
            }
        }

        let guesses = config.adversary.finalize_guess(&mut eve, &mut rng)?;
        tally.eve_bits += n as u64;
        tally.eve_correct += guesses
            .iter()
            .zip(message.iter())
            .filter(|(g, m)| g == m)
            .count() as u64;
    }
    Ok(tally.into_report(config.trials))
}

fn run_bb84_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let adversary = match config.adversary.kind() {
        AdversaryKind::Passive => Bb84Adversary::Passive,
        AdversaryKind::InterceptResend => Bb84Adversary::InterceptResend,
        AdversaryKind::EntangleCnot => unreachable!("rejected by validate"),
    };
    let n = config.bits_per_session;
    let mut tally = Tally::default();
    for trial in 0..config.trials {
        let mut rng = trial_rng(config.master_seed, config.salt, trial);
        let session = run_bb84(n, adversary, &config.channel, &mut rng)?;

        tally.sent += n as u64;
        let received = n - session.lost_count();
        tally.lost += (n - received) as u64;
        tally.received += received as u64;
        tally.sifted += session.sifted_positions.len() as u64;

        if session.sifted_positions.is_empty() {
            tally.errored += 1;
        } else {
            let count = check_count(config.check_fraction, session.sifted_positions.len());
            let picks = rand::seq::index::sample(&mut rng, session.sifted_positions.len(), count);
            let check_positions: Vec<usize> =
                picks.iter().map(|i| session.sifted_positions[i]).collect();
            let qber = estimate_qber(&session.alice_bits, &session.bob_outcomes, &check_positions)?;
            tally.check_bits += count as u64;
            tally.check_errors += (qber * count as f64).round() as u64;
            tally.usable += (session.sifted_positions.len() - count) as u64;
            if detect_eavesdropper(qber, config.detection_threshold) == Detection::Compromised {
                tally.flagged += 1;
            }
        }

        tally.eve_bits += n as u64;
        for j in 0..n {
            let guess = session.eve_observed[j].unwrap_or_else(|| rng.gen());
            if guess == session.alice_bits[j] {
                tally.eve_correct += 1;
            }
        }
    }
    Ok(tally.into_report(config.trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Theta,
    FlipProb,
    JitterSigma,
    FixedOffset,
    LossProb,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Theta => "theta",
            SweepParam::FlipProb => "flip-prob",
            SweepParam::JitterSigma => "jitter-sigma",
            SweepParam::FixedOffset => "fixed-offset",
            SweepParam::LossProb => "loss-prob",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(SweepParam::Theta),
            "flip-prob" => Ok(SweepParam::FlipProb),
            "jitter-sigma" => Ok(SweepParam::JitterSigma),
            "fixed-offset" => Ok(SweepParam::FixedOffset),
            "loss-prob" => Ok(SweepParam::LossProb),
            other => Err(CoreError::Config(format!(
                "param must be one of theta|flip-prob|jitter-sigma|fixed-offset|loss-prob, got {other}"
            ))),
        }
    }

    fn apply(self, base: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut config = base.clone();
        let ch = &base.channel;
        match self {
            SweepParam::Theta => {
                if base.protocol == Protocol::Bb84 {
                    return Err(CoreError::Config(
                        "param theta only applies to the qtpp protocol".into(),
                    ));
                }
                config.angle_mode = AngleMode::Fixed(value);
            }
            SweepParam::FlipProb => {
                config.channel =
                    NoiseModel::new(ch.fixed_offset(), ch.jitter_sigma(), value, ch.loss_prob())?;
            }
            SweepParam::JitterSigma => {
                config.channel =
                    NoiseModel::new(ch.fixed_offset(), value, ch.flip_prob(), ch.loss_prob())?;
            }
            SweepParam::FixedOffset => {
                config.channel =
                    NoiseModel::new(value, ch.jitter_sigma(), ch.flip_prob(), ch.loss_prob())?;
            }
            SweepParam::LossProb => {
                config.channel =
                    NoiseModel::new(ch.fixed_offset(), ch.jitter_sigma(), ch.flip_prob(), value)?;
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param_value: f64,
    pub report: ExperimentReport,
}

/// Runs one experiment per grid point over [from, to] inclusive; each point
/// gets its own salt so points never share streams.
pub fn run_sweep(
    base: &ExperimentConfig,
    param: SweepParam,
    from: f64,
    to: f64,
    points: usize,
) -> Result<Vec<SweepPoint>> {
    if points == 0 {
        return Err(CoreError::Config("points must be at least 1".into()));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(CoreError::Config("sweep bounds must be finite".into()));
    }
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let value = if points == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (points - 1) as f64
        };
        let mut config = param.apply(base, value)?;
        config.salt = SALT_SWEEP_BASE + i as u64;
        out.push(SweepPoint {
            param_value: value,
            report: run_experiment(&config)?,
        });
    }
    Ok(out)
}

/// One protocol's side of a comparison: the channel's noise floor (no
/// adversary, flip noise included) against the adversary's clean-channel
/// signature, so "does the attack look like noise?" is answerable per
/// protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolComparison {
    pub floor: ExperimentReport,
    pub attack: ExperimentReport,
    /// (attack QBER - floor QBER) in pooled binomial standard errors.
    pub separation_sigma: f64,
    /// Usable fraction under the honest channel.
    pub usable_key_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareReport {
    pub qtpp: ProtocolComparison,
    pub bb84: ProtocolComparison,
}

fn comparison(
    config: &ExperimentConfig,
    floor_salt: u64,
    attack_salt: u64,
) -> Result<ProtocolComparison> {
    let mut floor_cfg = config.clone();
    floor_cfg.adversary = AdversaryStrategy::passive();
    floor_cfg.salt = floor_salt;
    let floor = run_experiment(&floor_cfg)?;

    let mut attack_cfg = config.clone();
    attack_cfg.channel = config.channel.with_flip_prob(0.0)?;
    attack_cfg.salt = attack_salt;
    let attack = run_experiment(&attack_cfg)?;

    let var = |r: &ExperimentReport| {
        if r.check_bits == 0 {
            0.0
        } else {
            r.mean_qber * (1.0 - r.mean_qber) / r.check_bits as f64
        }
    };
    let denom = (var(&floor) + var(&attack)).sqrt();
    let separation_sigma = if denom == 0.0 {
        0.0
    } else {
        (attack.mean_qber - floor.mean_qber) / denom
    };
    Ok(ProtocolComparison {
        floor,
        attack,
        separation_sigma,
        usable_key_fraction: floor.usable_key_fraction,
    })
}

/// Side-by-side run of both protocols with matched trials and seeds. Each
/// side reports its noise floor and its under-attack signature; flip noise is
/// left out of the attack runs so the signature is the attack's own.
pub fn compare_protocols(
    qtpp_config: &ExperimentConfig,
    bb84_config: &ExperimentConfig,
) -> Result<CompareReport> {
    if qtpp_config.protocol != Protocol::Qtpp || bb84_config.protocol != Protocol::Bb84 {
        return Err(CoreError::Config(
            "compare_protocols expects a qtpp config and a bb84 config".into(),
        ));
    }
    if qtpp_config.trials != bb84_config.trials
        || qtpp_config.master_seed != bb84_config.master_seed
        || qtpp_config.bits_per_session != bb84_config.bits_per_session
    {
        return Err(CoreError::Config(
            "compare_protocols requires matched trials, bits, and master_seed".into(),
        ));
    }
    Ok(CompareReport {
        qtpp: comparison(
            qtpp_config,
            SALT_COMPARE_QTPP_FLOOR,
            SALT_COMPARE_QTPP_ATTACK,
        )?,
        bb84: comparison(
            bb84_config,
            SALT_COMPARE_BB84_FLOOR,
            SALT_COMPARE_BB84_ATTACK,
        )?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn qtpp(seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(Protocol::Qtpp, seed)
    }

    #[test]
    fn estimate_qber_counts_mismatches() {
        let sent = vec![true, false, true, false];
        let same: Vec<_> = sent.iter().map(|&b| Some(b)).collect();
        let flipped: Vec<_> = sent.iter().map(|&b| Some(!b)).collect();
        let all = [0, 1, 2, 3];
        assert_eq!(estimate_qber(&sent, &same, &all).unwrap(), 0.0);
        assert_eq!(estimate_qber(&sent, &flipped, &all).unwrap(), 1.0);
        let half = vec![Some(true), Some(true), Some(false), Some(false)];
        assert_eq!(estimate_qber(&sent, &half, &all).unwrap(), 0.5);
        assert_eq!(
            estimate_qber(&sent, &same, &[]),
            Err(CoreError::EmptyCheckSet)
        );
        assert!(estimate_qber(&sent, &[None, None, None, None], &[0]).is_err());
    }

    #[test]
    fn detection_thresholds_strictly() {
        assert_eq!(detect_eavesdropper(0.0, 0.11), Detection::Clean);
        assert_eq!(detect_eavesdropper(0.11, 0.11), Detection::Clean);
        assert_eq!(detect_eavesdropper(0.45, 0.11), Detection::Compromised);
    }

    #[test]
    fn clean_experiment_has_zero_qber() {
        let mut config = qtpp(5);
        config.trials = 20;
        config.bits_per_session = 512;
        let r = run_experiment(&config).unwrap();
        assert_eq!(r.mean_qber, 0.0);
        assert_eq!(r.qber_ci95, 0.0);
        assert_eq!(r.detection_rate, 0.0);
        assert_eq!(r.lost_fraction, 0.0);
        assert_eq!(r.sift_fraction, 1.0);
        assert_eq!(r.sessions_errored, 0);
        // ceil(0.2 * 512) = 103 bits sacrificed per session
        assert_abs_diff_eq!(r.usable_key_fraction, 409.0 / 512.0, epsilon = 1e-12);
    }

    #[test]
    fn reports_are_reproducible() {
        let mut config = qtpp(1234);
        config.trials = 5;
        config.bits_per_session = 300;
        config.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        config.channel = NoiseModel::new(0.01, 0.02, 0.05, 0.03).unwrap();
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = qtpp(1);
        let mut b = qtpp(2);
        for config in [&mut a, &mut b] {
            config.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
            config.bits_per_session = 2000;
        }
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        assert_ne!(ra.mean_qber, rb.mean_qber);
    }

    #[test]
    fn intercept_resend_at_quarter_pi_hits_half_qber() {
        let mut config = qtpp(42);
        config.bits_per_session = 100_000;
        config.check_fraction = 1.0;
        config.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        config.angle_mode = AngleMode::Fixed(FRAC_PI_4);
        let r = run_experiment(&config).unwrap();
        assert_abs_diff_eq!(r.mean_qber, 0.5, epsilon = 0.01);
        assert_eq!(r.detection_rate, 1.0);
    }

    #[test]
    fn uniform_keys_average_to_quarter_qber() {
        // E[sin^2(2 theta)/2] over theta ~ U[0, pi) = 1/4
        let mut config = qtpp(7);
        config.bits_per_session = 100_000;
        config.check_fraction = 1.0;
        config.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let r = run_experiment(&config).unwrap();
        assert_abs_diff_eq!(r.mean_qber, 0.25, epsilon = 0.01);
        assert_abs_diff_eq!(r.eve_accuracy, 0.5, epsilon = 0.005);
    }

    #[test]
    fn grid_mode_draws_from_discrete_angles() {
        let mut config = qtpp(3);
        config.angle_mode = AngleMode::Grid(2); // angles in {0, pi/2}
        config.bits_per_session = 50_000;
        config.check_fraction = 1.0;
        config.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        // sin^2(2 theta) = 0 at both grid angles: interception is invisible
        let r = run_experiment(&config).unwrap();
        assert_eq!(r.mean_qber, 0.0);
    }

    #[test]
    fn lossy_channel_reports_lost_fraction() {
        let mut config = qtpp(9);
        config.bits_per_session = 20_000;
        config.channel = NoiseModel::new(0.0, 0.0, 0.0, 0.1).unwrap();
        let r = run_experiment(&config).unwrap();
        // survival = 0.9^3
        assert_abs_diff_eq!(r.lost_fraction, 1.0 - 0.9f64.powi(3), epsilon = 0.01);
        assert_eq!(r.mean_qber, 0.0);
    }

    #[test]
    fn detection_sweep_separates_attack_from_silence() {
        let mut config = qtpp(21);
        config.trials = 50;
        config.bits_per_session = 200;
        config.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let attacked = run_experiment(&config).unwrap();
        assert!(attacked.detection_rate > 0.95);

        config.adversary = AdversaryStrategy::passive();
        let silent = run_experiment(&config).unwrap();
        assert_eq!(silent.detection_rate, 0.0);
    }

    #[test]
    fn bb84_matches_reference_rates() {
        let mut config = ExperimentConfig::new(Protocol::Bb84, 11);
        config.bits_per_session = 100_000;
        config.check_fraction = 1.0;
        let clean = run_experiment(&config).unwrap();
        assert_abs_diff_eq!(clean.sift_fraction, 0.5, epsilon = 0.005);
        assert_eq!(clean.mean_qber, 0.0);

        config.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let attacked = run_experiment(&config).unwrap();
        assert_abs_diff_eq!(attacked.mean_qber, 0.25, epsilon = 0.01);
        assert_abs_diff_eq!(attacked.eve_accuracy, 0.75, epsilon = 0.005);
    }

    #[test]
    fn bb84_rejects_entangling_adversary() {
        let mut config = ExperimentConfig::new(Protocol::Bb84, 0);
        config.adversary = AdversaryStrategy::entangle_cnot(&[1, 2, 3]).unwrap();
        assert!(matches!(run_experiment(&config), Err(CoreError::Config(_))));
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let mut config = qtpp(0);
        config.trials = 0;
        assert!(config.validate().is_err());

        let mut config = qtpp(0);
        config.check_fraction = 0.0;
        assert!(config.validate().is_err());

        let mut config = qtpp(0);
        config.angle_mode = AngleMode::Fixed(PI);
        assert!(config.validate().is_err());

        let mut config = qtpp(0);
        config.angle_mode = AngleMode::Grid(0);
        assert!(config.validate().is_err());
    }

    #[test]
    fn sweep_covers_inclusive_grid() {
        let mut base = qtpp(15);
        base.bits_per_session = 2000;
        base.check_fraction = 1.0;
        base.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let points = run_sweep(&base, SweepParam::Theta, 0.0, 1.2, 5).unwrap();
        assert_eq!(points.len(), 5);
        assert_eq!(points[0].param_value, 0.0);
        assert_abs_diff_eq!(points[4].param_value, 1.2, epsilon = 1e-12);
        // endpoints of the curve sin^2(2 theta)/2
        assert_eq!(points[0].report.mean_qber, 0.0);
        assert_abs_diff_eq!(
            points[2].report.mean_qber,
            0.5 * (2.0f64 * 0.6).sin().powi(2),
            epsilon = 0.05
        );
    }

    #[test]
    fn sweep_rejects_theta_for_bb84() {
        let base = ExperimentConfig::new(Protocol::Bb84, 0);
        assert!(run_sweep(&base, SweepParam::Theta, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn qber_monotone_in_flip_prob() {
        let mut base = qtpp(33);
        base.bits_per_session = 100_000;
        base.check_fraction = 1.0;
        let points = run_sweep(&base, SweepParam::FlipProb, 0.0, 0.5, 6).unwrap();
        for pair in points.windows(2) {
            assert!(pair[1].report.mean_qber >= pair[0].report.mean_qber - 1e-9);
        }
        assert_eq!(points[0].report.mean_qber, 0.0);
        assert_abs_diff_eq!(points[5].report.mean_qber, 0.5, epsilon = 0.01);
    }

    #[test]
    fn compare_requires_matched_settings() {
        let qtpp_cfg = qtpp(1);
        let mut bb84_cfg = ExperimentConfig::new(Protocol::Bb84, 2);
        bb84_cfg.trials = qtpp_cfg.trials;
        bb84_cfg.bits_per_session = qtpp_cfg.bits_per_session;
        assert!(compare_protocols(&qtpp_cfg, &bb84_cfg).is_err());
    }

    #[test]
    fn compare_shows_usable_key_advantage() {
        let mut qtpp_cfg = qtpp(8);
        qtpp_cfg.bits_per_session = 50_000;
        qtpp_cfg.angle_mode = AngleMode::Fixed(FRAC_PI_4);
        qtpp_cfg.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let mut bb84_cfg = ExperimentConfig::new(Protocol::Bb84, 8);
        bb84_cfg.bits_per_session = 50_000;
        bb84_cfg.adversary = AdversaryStrategy::intercept_resend(&[1]).unwrap();
        let report = compare_protocols(&qtpp_cfg, &bb84_cfg).unwrap();
        // every received bit usable vs roughly half
        assert_abs_diff_eq!(report.qtpp.usable_key_fraction, 0.8, epsilon = 0.01);
        assert_abs_diff_eq!(report.bb84.usable_key_fraction, 0.4, epsilon = 0.01);
        assert_abs_diff_eq!(report.qtpp.attack.mean_qber, 0.5, epsilon = 0.02);
        assert_abs_diff_eq!(report.bb84.attack.mean_qber, 0.25, epsilon = 0.02);
        assert_eq!(report.qtpp.floor.mean_qber, 0.0);
    }
}
