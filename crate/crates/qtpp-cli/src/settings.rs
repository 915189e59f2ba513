//! Merges defaults, the optional config file, and flags (in that order) into
//! validated core types. Every diagnostic names the offending key so a bad
//! invocation is fixable from the error message alone.

use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use qtpp_core::experiment::{DEFAULT_CHECK_FRACTION, DEFAULT_DETECTION_THRESHOLD, SALT_MAIN};
use qtpp_core::report::{ChannelDoc, ConfigDoc, SweepConfigDoc};
use qtpp_core::{
    AdversaryKind, AdversaryStrategy, AngleMode, ExperimentConfig, GuessRule, NoiseModel, Protocol,
    RNG_SCHEME,
};

use crate::args::{AngleOpts, CommonOpts};
use crate::CliError;

/// Which subcommand is consuming the settings; controls the accepted config
/// keys and format defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Qtpp,
    Bb84,
    Compare,
    Sweep,
}

const SHARED_KEYS: &[&str] = &[
    "seed",
    "bits",
    "trials",
    "adversary",
    "attack_passes",
    "eve_basis",
    "guess_rule",
    "check_fraction",
    "detection_threshold",
    "channel.fixed_offset",
    "channel.jitter_sigma",
    "channel.flip_prob",
    "channel.loss_prob",
    "format",
];
const ANGLE_KEYS: &[&str] = &["angle_mode", "theta", "grid_m"];
const COMPARE_KEYS: &[&str] = &["theta", "qtpp.flip_prob", "bb84.flip_prob"];
const SWEEP_KEYS: &[&str] = &["protocol", "param", "from", "to", "points"];

fn allowed_keys(scope: Scope) -> Vec<&'static str> {
    let mut keys = SHARED_KEYS.to_vec();
    match scope {
        Scope::Qtpp => keys.extend(ANGLE_KEYS),
        Scope::Bb84 => {}
        Scope::Compare => keys.extend(COMPARE_KEYS),
        Scope::Sweep => {
            keys.extend(ANGLE_KEYS);
            keys.extend(SWEEP_KEYS);
        }
    }
    keys
}

/// All knobs in their raw optional form; `None` means "use the default".
#[derive(Debug, Default, Clone)]
pub struct Settings {
    pub seed: Option<u64>,
    pub bits: Option<usize>,
    pub trials: Option<u64>,
    pub adversary: Option<String>,
    pub attack_passes: Option<String>,
    pub eve_basis: Option<f64>,
    pub guess_rule: Option<String>,
    pub angle_mode: Option<String>,
    pub theta: Option<f64>,
    pub grid_m: Option<u32>,
    pub check_fraction: Option<f64>,
    pub detection_threshold: Option<f64>,
    pub fixed_offset: Option<f64>,
    pub jitter_sigma: Option<f64>,
    pub flip_prob: Option<f64>,
    pub loss_prob: Option<f64>,
    pub format: Option<String>,
    pub qtpp_flip_prob: Option<f64>,
    pub bb84_flip_prob: Option<f64>,
    pub protocol: Option<String>,
    pub param: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("invalid value for `{key}`: {e} (got {value:?})")))
}

impl Settings {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "seed" => self.seed = Some(parse_value(key, value)?),
            "bits" => self.bits = Some(parse_value(key, value)?),
            "trials" => self.trials = Some(parse_value(key, value)?),
            "adversary" => self.adversary = Some(value.to_string()),
            "attack_passes" => self.attack_passes = Some(value.to_string()),
            "eve_basis" => self.eve_basis = Some(parse_value(key, value)?),
            "guess_rule" => self.guess_rule = Some(value.to_string()),
            "angle_mode" => self.angle_mode = Some(value.to_string()),
            "theta" => self.theta = Some(parse_value(key, value)?),
            "grid_m" => self.grid_m = Some(parse_value(key, value)?),
            "check_fraction" => self.check_fraction = Some(parse_value(key, value)?),
            "detection_threshold" => self.detection_threshold = Some(parse_value(key, value)?),
            "channel.fixed_offset" => self.fixed_offset = Some(parse_value(key, value)?),
            "channel.jitter_sigma" => self.jitter_sigma = Some(parse_value(key, value)?),
            "channel.flip_prob" => self.flip_prob = Some(parse_value(key, value)?),
            "channel.loss_prob" => self.loss_prob = Some(parse_value(key, value)?),
            "format" => self.format = Some(value.to_string()),
            "qtpp.flip_prob" => self.qtpp_flip_prob = Some(parse_value(key, value)?),
            "bb84.flip_prob" => self.bb84_flip_prob = Some(parse_value(key, value)?),
            "protocol" => self.protocol = Some(value.to_string()),
            "param" => self.param = Some(value.to_string()),
            "from" => self.from = Some(parse_value(key, value)?),
            "to" => self.to = Some(parse_value(key, value)?),
            "points" => self.points = Some(parse_value(key, value)?),
            other => {
                return Err(CliError::Config(format!("unknown config key `{other}`")));
            }
        }
        Ok(())
    }
}

fn parse_config_file(
    path: &Path,
    allowed: &[&'static str],
) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "config line {} is not key=value: {line:?}",
                idx + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if !allowed.contains(&key) {
            return Err(CliError::Config(format!(
                "unknown config key `{key}` (line {})",
                idx + 1
            )));
        }
        if pairs.iter().any(|(k, _)| k == key) {
            return Err(CliError::Config(format!(
                "duplicate config key `{key}` (line {})",
                idx + 1
            )));
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

/// Config file first, then flags on top.
pub fn resolve(
    common: &CommonOpts,
    angle: Option<&AngleOpts>,
    scope: Scope,
) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = &common.config {
        for (key, value) in parse_config_file(path, &allowed_keys(scope))? {
            s.set(&key, &value)?;
        }
    }
    merge_common(&mut s, common);
    if let Some(a) = angle {
        merge_angle(&mut s, a);
    }
    Ok(s)
}

fn merge_common(s: &mut Settings, o: &CommonOpts) {
    macro_rules! take {
        ($($field:ident => $slot:ident),* $(,)?) => {
            $(if let Some(v) = &o.$field { s.$slot = Some(v.clone()); })*
        };
    }
    take!(
        seed => seed,
        bits => bits,
        trials => trials,
        adversary => adversary,
        attack_passes => attack_passes,
        eve_basis => eve_basis,
        guess_rule => guess_rule,
        check_fraction => check_fraction,
        detection_threshold => detection_threshold,
        channel_fixed_offset => fixed_offset,
        channel_jitter_sigma => jitter_sigma,
        channel_flip_prob => flip_prob,
        channel_loss_prob => loss_prob,
        format => format,
    );
}

fn merge_angle(s: &mut Settings, o: &AngleOpts) {
    if let Some(v) = &o.angle_mode {
        s.angle_mode = Some(v.clone());
    }
    if let Some(v) = o.theta {
        s.theta = Some(v);
    }
    if let Some(v) = o.grid_m {
        s.grid_m = Some(v);
    }
}

pub fn build_adversary(s: &Settings) -> Result<AdversaryStrategy, CliError> {
    let name = s.adversary.as_deref().unwrap_or("passive");
    let kind = match name {
        "passive" => AdversaryKind::Passive,
        "intercept-resend" => AdversaryKind::InterceptResend,
        "entangle-cnot" => AdversaryKind::EntangleCnot,
        other => {
            return Err(CliError::Config(format!(
                "`adversary` must be passive, intercept-resend, or entangle-cnot, got `{other}`"
            )));
        }
    };
    if kind == AdversaryKind::Passive {
        for (key, given) in [
            ("attack_passes", s.attack_passes.is_some()),
            ("eve_basis", s.eve_basis.is_some()),
            ("guess_rule", s.guess_rule.is_some()),
        ] {
            if given {
                return Err(CliError::Config(format!(
                    "`{key}` does not apply to the passive adversary"
                )));
            }
        }
        return Ok(AdversaryStrategy::passive());
    }

    let mut adversary = match &s.attack_passes {
        None => AdversaryStrategy::default_for(kind),
        Some(text) => {
            let passes = parse_passes_list(text)?;
            match kind {
                AdversaryKind::InterceptResend => AdversaryStrategy::intercept_resend(&passes)?,
                AdversaryKind::EntangleCnot => AdversaryStrategy::entangle_cnot(&passes)?,
                AdversaryKind::Passive => unreachable!(),
            }
        }
    };
    if let Some(rule) = &s.guess_rule {
        adversary = adversary.with_guess_rule(parse_guess_rule(rule)?);
    }
    if let Some(basis) = s.eve_basis {
        if kind != AdversaryKind::InterceptResend {
            return Err(CliError::Config(
                "`eve_basis` only applies to the intercept-resend adversary".into(),
            ));
        }
        adversary = adversary.with_measurement_basis_angle(basis)?;
    }
    Ok(adversary)
}

fn parse_passes_list(text: &str) -> Result<Vec<u8>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<u8>().map_err(|_| {
                CliError::Config(format!(
                    "`attack_passes` must be comma-separated pass numbers, got {part:?}"
                ))
            })
        })
        .collect()
}

fn parse_guess_rule(name: &str) -> Result<GuessRule, CliError> {
    match name {
        "random" => Ok(GuessRule::Random),
        "earliest" => Ok(GuessRule::Earliest),
        "latest" => Ok(GuessRule::Latest),
        "majority" => Ok(GuessRule::Majority),
        "xor" => Ok(GuessRule::Xor),
        other => Err(CliError::Config(format!(
            "`guess_rule` must be earliest, latest, majority, xor, or random, got `{other}`"
        ))),
    }
}

pub fn build_channel(s: &Settings) -> Result<NoiseModel, CliError> {
    Ok(NoiseModel::new(
        s.fixed_offset.unwrap_or(0.0),
        s.jitter_sigma.unwrap_or(0.0),
        s.flip_prob.unwrap_or(0.0),
        s.loss_prob.unwrap_or(0.0),
    )?)
}

/// An explicit `theta` or `grid_m` implies its mode; contradictions are
/// rejected rather than silently resolved.
pub fn build_angle_mode(s: &Settings) -> Result<AngleMode, CliError> {
    let implied = match (s.theta.is_some(), s.grid_m.is_some()) {
        (true, true) => {
            return Err(CliError::Config(
                "`theta` and `grid_m` cannot both be set".into(),
            ));
        }
        (true, false) => Some("fixed"),
        (false, true) => Some("grid"),
        (false, false) => None,
    };
    let mode = s.angle_mode.as_deref().or(implied).unwrap_or("uniform");
    match mode {
        "uniform" => {
            if s.theta.is_some() {
                return Err(CliError::Config(
                    "`theta` only applies to angle_mode=fixed".into(),
                ));
            }
            if s.grid_m.is_some() {
                return Err(CliError::Config(
                    "`grid_m` only applies to angle_mode=grid".into(),
                ));
            }
            Ok(AngleMode::Uniform)
        }
        "fixed" => {
            if s.grid_m.is_some() {
                return Err(CliError::Config(
                    "`grid_m` only applies to angle_mode=grid".into(),
                ));
            }
            let theta = s.theta.ok_or_else(|| {
                CliError::Config("`theta` is required when angle_mode=fixed".into())
            })?;
            Ok(AngleMode::Fixed(theta))
        }
        "grid" => {
            if s.theta.is_some() {
                return Err(CliError::Config(
                    "`theta` only applies to angle_mode=fixed".into(),
                ));
            }
            let m = s.grid_m.ok_or_else(|| {
                CliError::Config("`grid_m` is required when angle_mode=grid".into())
            })?;
            Ok(AngleMode::Grid(m))
        }
        other => Err(CliError::Config(format!(
            "`angle_mode` must be uniform, fixed, or grid, got `{other}`"
        ))),
    }
}

pub fn build_experiment_config(
    protocol: Protocol,
    s: &Settings,
    angle_mode: AngleMode,
) -> Result<ExperimentConfig, CliError> {
    let config = ExperimentConfig {
        protocol,
        trials: s.trials.unwrap_or(1),
        bits_per_session: s.bits.unwrap_or(1024),
        adversary: build_adversary(s)?,
        channel: build_channel(s)?,
        check_fraction: s.check_fraction.unwrap_or(DEFAULT_CHECK_FRACTION),
        detection_threshold: s.detection_threshold.unwrap_or(DEFAULT_DETECTION_THRESHOLD),
        master_seed: s.seed.unwrap_or(0),
        salt: SALT_MAIN,
        angle_mode,
    };
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub fn resolve_format(s: &Settings, scope: Scope) -> Result<Format, CliError> {
    let default = if scope == Scope::Sweep { "csv" } else { "json" };
    match s.format.as_deref().unwrap_or(default) {
        "json" => Ok(Format::Json),
        "csv" if scope == Scope::Sweep => Ok(Format::Csv),
        "csv" => Err(CliError::Config(
            "`format` csv is only available for the sweep subcommand".into(),
        )),
        other => Err(CliError::Config(format!(
            "`format` must be json or csv, got `{other}`"
        ))),
    }
}

fn adversary_label(kind: AdversaryKind) -> &'static str {
    match kind {
        AdversaryKind::Passive => "passive",
        AdversaryKind::InterceptResend => "intercept-resend",
        AdversaryKind::EntangleCnot => "entangle-cnot",
    }
}

fn guess_rule_label(rule: GuessRule) -> &'static str {
    match rule {
        GuessRule::Random => "random",
        GuessRule::Earliest => "earliest",
        GuessRule::Latest => "latest",
        GuessRule::Majority => "majority",
        GuessRule::Xor => "xor",
    }
}

/// Echo of the fully resolved run, embedded in every report.
pub fn config_doc(
    protocol_label: &str,
    config: &ExperimentConfig,
    sweep: Option<SweepConfigDoc>,
) -> ConfigDoc {
    let adversary = &config.adversary;
    let (mode_label, theta, grid_m) = match config.angle_mode {
        AngleMode::Uniform => ("uniform", None, None),
        AngleMode::Fixed(t) => ("fixed", Some(t), None),
        AngleMode::Grid(m) => ("grid", None, Some(m)),
    };
    ConfigDoc {
        protocol: protocol_label.to_string(),
        trials: config.trials,
        bits_per_session: config.bits_per_session,
        adversary: adversary_label(adversary.kind()).to_string(),
        attack_passes: adversary.attacked_passes(),
        eve_basis: adversary.measurement_basis_angle(),
        guess_rule: guess_rule_label(adversary.guess_rule()).to_string(),
        angle_mode: mode_label.to_string(),
        theta,
        grid_m,
        check_fraction: config.check_fraction,
        detection_threshold: config.detection_threshold,
        channel: ChannelDoc {
            fixed_offset: config.channel.fixed_offset(),
            jitter_sigma: config.channel.jitter_sigma(),
            flip_prob: config.channel.flip_prob(),
            loss_prob: config.channel.loss_prob(),
        },
        qtpp_flip_prob: None,
        bb84_flip_prob: None,
        master_seed: config.master_seed,
        rng_scheme: RNG_SCHEME.to_string(),
        sweep,
    }
}
