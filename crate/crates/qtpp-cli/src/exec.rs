//! Runs the resolved configuration and emits the report.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use qtpp_core::report::{render_json, render_sweep_csv, CompareDoc, ReportDoc, SweepConfigDoc};
use qtpp_core::{
    bits_from_str, bits_to_string, compare_protocols, eve_xor_recover, replay_qtpp_trial,
    run_experiment, run_sweep, xor_three_pass, AngleMode, ExperimentConfig, NoiseModel, Protocol,
    SweepParam,
};
use serde_json::Value;

use crate::args::{Bb84Args, ClassicalDemoArgs, Command, CompareArgs, QtppArgs, SweepArgs};
use crate::settings::{
    self, build_angle_mode, build_channel, build_experiment_config, config_doc, resolve_format,
    Format, Scope, Settings,
};
use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Qtpp(args) => run_qtpp(args),
        Command::Bb84(args) => run_bb84(args),
        Command::Compare(args) => run_compare(args),
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::ClassicalDemo(args) => run_classical_demo(args),
    }
}

fn emit(output: Option<&Path>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json_string<T: serde::Serialize>(doc: &T) -> Result<String, CliError> {
    render_json(doc).map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))
}

fn run_qtpp(args: QtppArgs) -> Result<(), CliError> {
    let s = settings::resolve(&args.common, Some(&args.angle), Scope::Qtpp)?;
    resolve_format(&s, Scope::Qtpp)?;
    let angle_mode = build_angle_mode(&s)?;
    let config = build_experiment_config(Protocol::Qtpp, &s, angle_mode)?;

    if args.debug_keys && args.dump_transcript.is_none() {
        return Err(CliError::Config(
            "`debug_keys` requires --dump-transcript".into(),
        ));
    }
    if let Some(path) = &args.dump_transcript {
        let (transcript, _) = replay_qtpp_trial(&config, 0)?;
        let doc: Value = transcript.to_json(args.debug_keys);
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::Io(format!("cannot serialize transcript: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }

    let report = run_experiment(&config)?;
    let doc = ReportDoc::single(TOOL_VERSION, config_doc("qtpp", &config, None), &report);
    emit(args.common.output.as_deref(), &to_json_string(&doc)?)
}

fn run_bb84(args: Bb84Args) -> Result<(), CliError> {
    let s = settings::resolve(&args.common, None, Scope::Bb84)?;
    resolve_format(&s, Scope::Bb84)?;
    let config = build_experiment_config(Protocol::Bb84, &s, AngleMode::Uniform)?;
    let report = run_experiment(&config)?;
    let doc = ReportDoc::single(TOOL_VERSION, config_doc("bb84", &config, None), &report);
    emit(args.common.output.as_deref(), &to_json_string(&doc)?)
}

fn run_compare(args: CompareArgs) -> Result<(), CliError> {
    let mut s = settings::resolve(&args.common, None, Scope::Compare)?;
    if let Some(v) = args.theta {
        s.theta = Some(v);
    }
    if let Some(v) = args.qtpp_flip_prob {
        s.qtpp_flip_prob = Some(v);
    }
    if let Some(v) = args.bb84_flip_prob {
        s.bb84_flip_prob = Some(v);
    }
    resolve_format(&s, Scope::Compare)?;

    let base_channel = build_channel(&s)?;
    let theta = s.theta.unwrap_or(FRAC_PI_4);
    let side_channel = |flip: Option<f64>| -> Result<NoiseModel, CliError> {
        match flip {
            None => Ok(base_channel.clone()),
            Some(p) => Ok(base_channel.with_flip_prob(p)?),
        }
    };

    let mut qtpp_config = build_experiment_config(Protocol::Qtpp, &s, AngleMode::Fixed(theta))?;
    qtpp_config.channel = side_channel(s.qtpp_flip_prob)?;
    qtpp_config.validate()?;
    let mut bb84_config = build_experiment_config(Protocol::Bb84, &s, AngleMode::Uniform)?;
    bb84_config.channel = side_channel(s.bb84_flip_prob)?;
    bb84_config.validate()?;

    let report = compare_protocols(&qtpp_config, &bb84_config)?;
    let mut doc_config = config_doc("compare", &qtpp_config, None);
    doc_config.channel.flip_prob = base_channel.flip_prob();
    doc_config.qtpp_flip_prob = Some(qtpp_config.channel.flip_prob());
    doc_config.bb84_flip_prob = Some(bb84_config.channel.flip_prob());
    let doc = CompareDoc::new(TOOL_VERSION, doc_config, &report);
    emit(args.common.output.as_deref(), &to_json_string(&doc)?)
}

fn run_sweep_cmd(args: SweepArgs) -> Result<(), CliError> {
    let mut s = settings::resolve(&args.common, Some(&args.angle), Scope::Sweep)?;
    if let Some(v) = &args.protocol {
        s.protocol = Some(v.clone());
    }
    if let Some(v) = &args.param {
        s.param = Some(v.clone());
    }
    if let Some(v) = args.from {
        s.from = Some(v);
    }
    if let Some(v) = args.to {
        s.to = Some(v);
    }
    if let Some(v) = args.points {
        s.points = Some(v);
    }
    let format = resolve_format(&s, Scope::Sweep)?;

    let protocol = match s.protocol.as_deref().unwrap_or("qtpp") {
        "qtpp" => Protocol::Qtpp,
        "bb84" => Protocol::Bb84,
        other => {
            return Err(CliError::Config(format!(
                "`protocol` must be qtpp or bb84, got `{other}`"
            )));
        }
    };
    let require = |name: &str, value: Option<f64>| {
        value.ok_or_else(|| CliError::Config(format!("missing required key `{name}`")))
    };
    let param = SweepParam::parse(
        s.param
            .as_deref()
            .ok_or_else(|| CliError::Config("missing required key `param`".into()))?,
    )?;
    let from = require("from", s.from)?;
    let to = require("to", s.to)?;
    let points = s
        .points
        .ok_or_else(|| CliError::Config("missing required key `points`".into()))?;

    if param == SweepParam::Theta
        && (s.angle_mode.is_some() || s.theta.is_some() || s.grid_m.is_some())
    {
        return Err(CliError::Config(
            "`angle_mode`, `theta`, and `grid_m` conflict with param=theta, \
             which pins the key angle per grid point"
                .into(),
        ));
    }
    let angle_mode = if protocol == Protocol::Qtpp {
        build_angle_mode(&s)?
    } else {
        AngleMode::Uniform
    };
    let base = build_experiment_config(protocol, &s, angle_mode)?;
    let sweep_points = run_sweep(&base, param, from, to, points)?;

    let content = match format {
        Format::Csv => render_sweep_csv(param.name(), &sweep_points),
        Format::Json => {
            let sweep_doc = SweepConfigDoc {
                param: param.name().to_string(),
                from,
                to,
                points,
            };
            let label = match protocol {
                Protocol::Qtpp => "qtpp",
                Protocol::Bb84 => "bb84",
            };
            let doc = ReportDoc::sweep(
                TOOL_VERSION,
                config_doc(label, &base, Some(sweep_doc)),
                &sweep_points,
            );
            to_json_string(&doc)?
        }
    };
    emit(args.common.output.as_deref(), &content)
}

fn run_classical_demo(args: ClassicalDemoArgs) -> Result<(), CliError> {
    let named = |key: &str, text: &str| {
        bits_from_str(text).map_err(|e| CliError::Config(format!("invalid `{key}`: {e}")))
    };
    let message = named("message", &args.message)?;
    let ka = named("ka", &args.ka)?;
    let kb = named("kb", &args.kb)?;
    let (transcript, bob) = xor_three_pass(&message, &ka, &kb)?;
    let eve = eve_xor_recover(&transcript);
    println!("m1={}", bits_to_string(&transcript.m1));
    println!("m2={}", bits_to_string(&transcript.m2));
    println!("m3={}", bits_to_string(&transcript.m3));
    println!("bob_recovered={}", bits_to_string(&bob));
    println!("eve_recovered={}", bits_to_string(&eve));
    Ok(())
}

/// Core inputs assembled without running; lets tests inspect resolution.
pub fn resolved_qtpp_config(s: &Settings) -> Result<ExperimentConfig, CliError> {
    let angle_mode = build_angle_mode(s)?;
    build_experiment_config(Protocol::Qtpp, s, angle_mode)
}
