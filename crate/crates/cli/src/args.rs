use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qinfo",
    version,
    about = "Seeded quantum information demos with machine-readable output"
)]
pub struct Cli {
    /// RNG seed; a random seed is drawn and reported on stderr when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the summary here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write per-round records as JSON lines.
    #[arg(long, global = true)]
    pub transcript: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Base {
    Bits,
    Nats,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shannon entropy of a distribution, or the entropies of a joint one.
    Entropy(EntropyArgs),
    /// Capacity of a discrete memoryless channel.
    Capacity(CapacityArgs),
    /// Exhaustive ε-typical set of an i.i.d. source.
    Typical(TypicalArgs),
    /// Random-coding Monte-Carlo over a noisy channel.
    Shannon2(Shannon2Args),
    /// Holevo χ and an accessible-information lower bound for qubit signals.
    Holevo(HolevoArgs),
    /// Distinguishability measures for two pure qubit states.
    Discriminate(DiscriminateArgs),
    /// CHSH value at the E91 settings.
    Chsh(ChshArgs),
    /// BB84 key distribution.
    Bb84(QkdArgs),
    /// Entanglement-based key distribution with a CHSH test.
    E91(QkdArgs),
    /// Teleport a qubit state.
    Teleport(TeleportArgs),
    /// Send two classical bits through one qubit.
    Superdense(SuperdenseArgs),
    /// Entanglement swapping.
    Swap(SwapArgs),
    /// Recurrence entanglement purification of Werner pairs.
    Purify(PurifyArgs),
    /// Block compression into the typical subspace.
    Schumacher(SchumacherArgs),
    /// Error-correction condition check and repetition-code recovery.
    Qecc(QeccArgs),
    /// Largest k allowed by the Hamming bound.
    Hamming(HammingArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ChannelSpec {
    /// Binary symmetric channel with flip probability p.
    #[arg(long)]
    pub bsc: Option<f64>,
    /// Ternary channel with noise parameter p.
    #[arg(long)]
    pub ternary: Option<f64>,
    /// Noiseless channel on n symbols.
    #[arg(long)]
    pub noiseless: Option<usize>,
    /// Transition matrix, rows separated by ';' and entries by ','.
    #[arg(long)]
    pub matrix: Option<String>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DistributionSpec {
    /// Probability vector, comma separated.
    #[arg(long)]
    pub probs: Option<String>,
    /// Joint distribution, rows separated by ';'.
    #[arg(long)]
    pub joint: Option<String>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub dist: DistributionSpec,
    #[arg(long, value_enum, default_value_t = Base::Bits)]
    pub base: Base,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CapacityMethod {
    Closed,
    Numeric,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub channel: ChannelSpec,
    /// Defaults to closed form for named channels and numeric for matrices.
    #[arg(long, value_enum)]
    pub method: Option<CapacityMethod>,
    /// Stopping gap of the numeric optimizer, in bits.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct TypicalArgs {
    #[arg(long)]
    pub probs: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eps: f64,
    /// Include the member sequences in the summary.
    #[arg(long)]
    pub members: bool,
}

#[derive(Debug, Args)]
pub struct Shannon2Args {
    #[command(flatten)]
    pub channel: ChannelSpec,
    /// Code rate in bits per channel use.
    #[arg(long)]
    pub rate: f64,
    /// Block lengths, comma separated.
    #[arg(long, default_value = "8,12,16")]
    pub lengths: String,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct HolevoArgs {
    /// Linear polarization angles in degrees, comma separated.
    #[arg(long, default_value = "0,45")]
    pub angles: String,
    /// Priors; uniform when absent.
    #[arg(long)]
    pub priors: Option<String>,
    /// Random starts per POVM size in the accessible-information search.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Skip the accessible-information search.
    #[arg(long)]
    pub no_search: bool,
}

#[derive(Debug, Args)]
pub struct DiscriminateArgs {
    /// Two linear polarization angles in degrees.
    #[arg(long, default_value = "0,45")]
    pub angles: String,
    #[arg(long, default_value = "0.5,0.5")]
    pub priors: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChshState {
    Singlet,
    Werner,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[arg(long, value_enum, default_value_t = ChshState::Singlet)]
    pub state: ChshState,
    /// Werner fidelity with Φ⁺.
    #[arg(long, default_value_t = 1.0)]
    pub fidelity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Eve {
    None,
    Intercept,
    Depolarize,
}

#[derive(Debug, Args)]
pub struct QkdArgs {
    #[arg(long, default_value_t = 10_000)]
    pub rounds: u64,
    #[arg(long, value_enum, default_value_t = Eve::None)]
    pub eve: Eve,
    /// Eve's fixed basis for intercept-resend; random when absent.
    #[arg(long)]
    pub eve_basis: Option<u8>,
    /// Depolarizing probability when `--eve depolarize`.
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Abort threshold on the QBER.
    #[arg(long, default_value_t = qinfo::protocols::DEFAULT_QBER_ABORT)]
    pub abort_qber: f64,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// Two complex amplitudes, e.g. `1,0` or `0.6,0.8i`; normalized.
    #[arg(long)]
    pub state: String,
    /// Bell outcome name, or `random`.
    #[arg(long, default_value = "random")]
    pub outcome: String,
}

#[derive(Debug, Args)]
pub struct SuperdenseArgs {
    /// Two-bit message 0..3; all four when absent.
    #[arg(long)]
    pub message: Option<u8>,
}

#[derive(Debug, Args)]
pub struct SwapArgs {
    /// Bell outcome name on BC, or `random`.
    #[arg(long, default_value = "random")]
    pub outcome: String,
    /// Also tally outcomes over this many seeded runs.
    #[arg(long, default_value_t = 0)]
    pub runs: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PurifyModeArg {
    Analytic,
    Simulated,
}

#[derive(Debug, Args)]
pub struct PurifyArgs {
    /// Initial Werner fidelity.
    #[arg(long)]
    pub from: f64,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, value_enum, default_value_t = PurifyModeArg::Analytic)]
    pub mode: PurifyModeArg,
    /// Initial pair count in simulated mode.
    #[arg(long, default_value_t = 100_000)]
    pub pairs: u64,
}

#[derive(Debug, Args)]
pub struct SchumacherArgs {
    /// Diagonal source spectrum, used when no angles are given.
    #[arg(long, default_value = "0.9,0.1")]
    pub probs: String,
    /// Pure signal states as polarization angles in degrees.
    #[arg(long)]
    pub angles: Option<String>,
    /// Priors for `--angles`; uniform when absent.
    #[arg(long)]
    pub priors: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Keep the ⌊2^{n·rate}⌋ most likely eigenvectors instead of the typical window.
    #[arg(long)]
    pub rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct QeccArgs {
    /// Codewords, comma separated; each is bit strings joined by '+' for an
    /// equal superposition.
    #[arg(long, default_value = "000,111")]
    pub codewords: String,
    /// Pauli error strings, comma separated.
    #[arg(long, default_value = "III,XII,IXI,IIX")]
    pub errors: String,
    /// Run the repetition-code recovery for this error.
    #[arg(long)]
    pub recover: Option<String>,
    /// Logical amplitudes for `--recover`.
    #[arg(long, default_value = "0.6,0.8")]
    pub logical: String,
}

#[derive(Debug, Args)]
pub struct HammingArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub t: u32,
}
