//! Flag surface. Values arrive as loosely typed options here; defaults,
//! config-file merging, and validation happen in [`crate::settings`] so that
//! flag and file inputs share one diagnostic path.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "qtpp-sim",
    version,
    about = "Seeded Monte Carlo study of a rotation-cipher three-pass protocol, \
             with BB84 and classical XOR baselines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run three-pass sessions and report QBER, Eve accuracy, and detection
    Qtpp(QtppArgs),
    /// Run BB84 prepare-and-measure sessions under the same reporting
    Bb84(Bb84Args),
    /// Run both protocols with matched seeds: noise floor vs attack signature
    Compare(CompareArgs),
    /// Scan one parameter across a grid, one report row per point
    Sweep(SweepArgs),
    /// Walk the classical XOR three-pass exchange and Eve's recovery of it
    ClassicalDemo(ClassicalDemoArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonOpts {
    /// Master seed; every random draw derives from it (default 0)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Message bits per session (default 1024)
    #[arg(long)]
    pub bits: Option<usize>,

    /// Independent sessions to run (default 1)
    #[arg(long)]
    pub trials: Option<u64>,

    /// Eavesdropper: passive | intercept-resend | entangle-cnot
    #[arg(long)]
    pub adversary: Option<String>,

    /// Passes Eve touches, comma separated, e.g. "1" or "1,2,3"
    #[arg(long)]
    pub attack_passes: Option<String>,

    /// Basis angle (radians) for intercept-resend measurements (default 0)
    #[arg(long)]
    pub eve_basis: Option<f64>,

    /// How Eve turns her records into a bit: earliest | latest | majority |
    /// xor | random
    #[arg(long)]
    pub guess_rule: Option<String>,

    /// Fraction of received bits sacrificed for error estimation (default 0.2)
    #[arg(long)]
    pub check_fraction: Option<f64>,

    /// QBER above which a session is flagged compromised (default 0.11)
    #[arg(long)]
    pub detection_threshold: Option<f64>,

    /// Systematic rotation misalignment per pass, radians
    #[arg(long)]
    pub channel_fixed_offset: Option<f64>,

    /// Std-dev of zero-mean Gaussian rotation jitter per pass, radians
    #[arg(long)]
    pub channel_jitter_sigma: Option<f64>,

    /// Per-pass probability of swapping the wire qubit's amplitudes
    #[arg(long)]
    pub channel_flip_prob: Option<f64>,

    /// Per-pass probability of losing the photon
    #[arg(long)]
    pub channel_loss_prob: Option<f64>,

    /// Report format: json (default) | csv (sweep only)
    #[arg(long)]
    pub format: Option<String>,

    /// Write the report here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Flat key=value config file; flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct AngleOpts {
    /// Key-angle sampling: uniform (default) | fixed | grid
    #[arg(long)]
    pub angle_mode: Option<String>,

    /// Shared key angle in [0, pi) for --angle-mode fixed
    #[arg(long)]
    pub theta: Option<f64>,

    /// Grid order m for --angle-mode grid (angles k*pi/m)
    #[arg(long)]
    pub grid_m: Option<u32>,
}

#[derive(Debug, Args)]
pub struct QtppArgs {
    #[command(flatten)]
    pub common: CommonOpts,

    #[command(flatten)]
    pub angle: AngleOpts,

    /// Write trial 0's full session transcript (JSON) to this path
    #[arg(long)]
    pub dump_transcript: Option<PathBuf>,

    /// Include the secret key angles in the transcript dump
    #[arg(long)]
    pub debug_keys: bool,
}

#[derive(Debug, Args)]
pub struct Bb84Args {
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonOpts,

    /// Fixed key angle for the three-pass side (default pi/4, the
    /// worst case for the attacker)
    #[arg(long)]
    pub theta: Option<f64>,

    /// Flip probability for the three-pass noise floor (defaults to
    /// --channel-flip-prob)
    #[arg(long)]
    pub qtpp_flip_prob: Option<f64>,

    /// Flip probability for the BB84 noise floor (defaults to
    /// --channel-flip-prob)
    #[arg(long)]
    pub bb84_flip_prob: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonOpts,

    #[command(flatten)]
    pub angle: AngleOpts,

    /// Protocol to sweep: qtpp (default) | bb84
    #[arg(long)]
    pub protocol: Option<String>,

    /// What to scan: theta | flip-prob | jitter-sigma | fixed-offset |
    /// loss-prob
    #[arg(long)]
    pub param: Option<String>,

    /// First grid value
    #[arg(long)]
    pub from: Option<f64>,

    /// Last grid value (inclusive)
    #[arg(long)]
    pub to: Option<f64>,

    /// Number of grid points
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassicalDemoArgs {
    /// Message bits, e.g. 1010
    #[arg(long)]
    pub message: String,

    /// Alice's key bits, same length as the message
    #[arg(long)]
    pub ka: String,

    /// Bob's key bits, same length as the message
    #[arg(long)]
    pub kb: String,
}
