use std::cell::Cell;

use qinfo::coding::{self, CodeSubspace, PauliErrorSet, SignalSource, SubspaceSelection};
use qinfo::distinguish::{self, DiscriminationProblem, Ensemble, SearchConfig};
use qinfo::dynamics::measure_probabilities;
use qinfo::dynamics::KrausChannel;
use qinfo::entanglement::{self, bell_state, BellLabel, ChshSetting};
use qinfo::linalg::C64;
use qinfo::probability::{self, DiscreteChannel, JointDistribution};
use qinfo::protocols::{self, BasisPolicy, EveStrategy, OutcomeChoice, PurifyMode, QkdTranscript};
use qinfo::state::{self, DensityOperator};
use qinfo::LogBase;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{invalid, CliError};
use crate::output::Report;
use crate::parse::{self, ParsedChannel};

/// Resolves the seed lazily so deterministic commands never draw one.
pub struct SeedSource {
    given: Option<u64>,
    drawn: Cell<Option<u64>>,
}

impl SeedSource {
    pub fn new(given: Option<u64>) -> Self {
        Self {
            given,
            drawn: Cell::new(None),
        }
    }

    pub fn get(&self) -> u64 {
        if let Some(s) = self.given.or(self.drawn.get()) {
            return s;
        }
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        self.drawn.set(Some(s));
        s
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

fn log_base(b: Base) -> LogBase {
    match b {
        Base::Bits => LogBase::Bits,
        Base::Nats => LogBase::Nats,
    }
}

pub fn run(cmd: &Command, seed: &SeedSource) -> Result<Report, CliError> {
    match cmd {
        Command::Entropy(a) => entropy(a),
        Command::Capacity(a) => capacity(a),
        Command::Typical(a) => typical(a),
        Command::Shannon2(a) => shannon2(a, seed),
        Command::Holevo(a) => holevo(a, seed),
        Command::Discriminate(a) => discriminate(a),
        Command::Chsh(a) => chsh(a),
        Command::Bb84(a) => qkd(a, seed, false),
        Command::E91(a) => qkd(a, seed, true),
        Command::Teleport(a) => teleport(a, seed),
        Command::Superdense(a) => superdense(a),
        Command::Swap(a) => swap(a, seed),
        Command::Purify(a) => purify(a, seed),
        Command::Schumacher(a) => schumacher(a),
        Command::Qecc(a) => qecc(a),
        Command::Hamming(a) => hamming(a),
    }
}

fn entropy(a: &EntropyArgs) -> Result<Report, CliError> {
    let base = log_base(a.base);
    let mut r = Report::default();
    r.insert("base", format!("{:?}", a.base).to_lowercase());
    if let Some(p) = &a.dist.probs {
        r.insert(
            "entropy",
            probability::shannon_entropy(&parse::distribution(p)?, base),
        );
    } else if let Some(j) = &a.dist.joint {
        let j = JointDistribution::new(parse::matrix(j, "probability")?)?;
        r.insert(
            "entropy_x",
            probability::shannon_entropy(&j.marginal_a(), base),
        );
        r.insert(
            "entropy_y",
            probability::shannon_entropy(&j.marginal_b(), base),
        );
        r.insert("joint_entropy", probability::joint_entropy(&j, base));
        r.insert(
            "conditional_entropy_x_given_y",
            probability::conditional_entropy(&j, base),
        );
        r.insert(
            "mutual_information",
            probability::mutual_information(&j, base),
        );
    }
    Ok(r)
}

fn capacity(a: &CapacityArgs) -> Result<Report, CliError> {
    let parsed = parse::channel(&a.channel)?;
    let method = a.method.unwrap_or(match parsed {
        ParsedChannel::Named(_) => CapacityMethod::Closed,
        ParsedChannel::Matrix(_) => CapacityMethod::Numeric,
    });
    let cap = match (&parsed, method) {
        (ParsedChannel::Named(kind), CapacityMethod::Closed) => {
            probability::channel_capacity_closed(*kind, LogBase::Bits)?
        }
        (ParsedChannel::Matrix(_), CapacityMethod::Closed) => {
            return Err(invalid("closed form needs --bsc, --ternary or --noiseless"))
        }
        (_, CapacityMethod::Numeric) => {
            probability::channel_capacity_numeric(&parsed.channel()?, a.tol, LogBase::Bits)?
        }
    };
    let mut r = Report::default();
    r.insert("capacity_bits", cap.capacity);
    r.insert("method", format!("{method:?}").to_lowercase());
    r.insert("optimal_input", cap.optimal_input.probs().to_vec());
    r.insert("iterations", cap.iterations);
    Ok(r)
}

fn typical(a: &TypicalArgs) -> Result<Report, CliError> {
    let set = probability::typical_set(
        &parse::distribution(&a.probs)?,
        a.n,
        a.eps,
        parse::enum_cap()?,
    )?;
    let mut r = Report::default();
    r.insert("n", set.n);
    r.insert("eps", set.eps);
    r.insert("entropy_bits", set.entropy_bits);
    r.insert("size", set.size());
    r.insert("total_prob", set.total_prob);
    r.insert("bounds", to_value(&set.bounds)?);
    if a.members {
        r.insert("members", to_value(&set.members)?);
    }
    Ok(r)
}

fn shannon2(a: &Shannon2Args, seed: &SeedSource) -> Result<Report, CliError> {
    let channel: DiscreteChannel = parse::channel(&a.channel)?.channel()?;
    let lengths: Vec<usize> = parse::list(&a.lengths, "block length")?;
    let seed = seed.get();
    let rows = probability::noisy_coding_demo(&channel, a.rate, &lengths, a.trials, seed)?;
    let capacity = probability::channel_capacity_numeric(&channel, 1e-10, LogBase::Bits)?.capacity;
    let mut r = Report::default();
    r.insert("seed", seed);
    r.insert("rate", a.rate);
    r.insert("capacity_bits", capacity);
    r.insert("rows", to_value(&rows)?);
    r.records = rows.iter().map(to_value).collect::<Result<_, _>>()?;
    Ok(r)
}

fn holevo(a: &HolevoArgs, seed: &SeedSource) -> Result<Report, CliError> {
    let states = parse::polarizations(&a.angles)?;
    let e = Ensemble::pure(parse::priors(a.priors.as_deref(), states.len())?, &states)?;
    let mut r = Report::default();
    r.insert("chi_bits", distinguish::holevo_chi(&e, LogBase::Bits));
    r.insert(
        "preparation_bits",
        distinguish::preparation_information(&e, LogBase::Bits),
    );
    if !a.no_search {
        let seed = seed.get();
        let config = SearchConfig {
            restarts: a.restarts,
            seed,
            ..SearchConfig::default()
        };
        let acc = distinguish::accessible_information_search(&e, &config, LogBase::Bits)?;
        r.insert("seed", seed);
        r.insert("accessible_lower_bits", acc.lower_bound);
        r.insert("povm_outcomes", acc.povm.elements().len());
        r.insert("approximate", acc.approximate);
    }
    Ok(r)
}

fn discriminate(a: &DiscriminateArgs) -> Result<Report, CliError> {
    let states = parse::polarizations(&a.angles)?;
    let [s0, s1] =
        <[_; 2]>::try_from(states).map_err(|_| invalid("--angles needs exactly two values"))?;
    let priors = parse::distribution(&a.priors)?;
    let (d0, d1) = (s0.density(), s1.density());
    let problem = DiscriminationProblem::new(priors.clone(), [d0.clone(), d1.clone()])?;
    let helstrom = distinguish::helstrom_measurement(&problem)?;
    let q0 = measure_probabilities(&d0, &helstrom)?;
    let q1 = measure_probabilities(&d1, &helstrom)?;
    let chernoff = distinguish::chernoff_bound(&q0, &q1)?;
    let mut r = Report::default();
    r.insert(
        "error_probability",
        distinguish::error_probability(&problem),
    );
    r.insert("trace_distance", state::trace_distance(&d0, &d1)?);
    r.insert("fidelity", state::fidelity(&d0, &d1)?);
    r.insert("statistical_overlap", state::statistical_overlap(&d0, &d1)?);
    r.insert("hilbert_angle", state::hilbert_angle(&s0, &s1)?);
    r.insert("chernoff_lambda", chernoff.lambda);
    r.insert("chernoff_alpha", chernoff.alpha);
    let unambiguous = distinguish::unambiguous_discriminator(&[s0, s1], &priors)
        .map(|u| Value::from(u.average_success))
        .unwrap_or(Value::Null);
    r.insert("unambiguous_success", unambiguous);
    Ok(r)
}

fn chsh(a: &ChshArgs) -> Result<Report, CliError> {
    let rho = match a.state {
        ChshState::Singlet => bell_state(BellLabel::PSI_MINUS).density(),
        ChshState::Werner => entanglement::werner_density(a.fidelity)?,
    };
    let setting = ChshSetting::e91();
    let s = entanglement::chsh_value(&rho, &setting)?;
    let mut r = Report::default();
    r.insert("state", format!("{:?}", a.state).to_lowercase());
    if a.state == ChshState::Werner {
        r.insert("fidelity", a.fidelity);
    }
    r.insert("chsh", s);
    r.insert("violates_classical_bound", s.abs() > 2.0 + 1e-12);
    r.insert(
        "werner_threshold",
        entanglement::werner_chsh_threshold(&setting)?,
    );
    Ok(r)
}

fn eve_strategy(a: &QkdArgs) -> Result<EveStrategy, CliError> {
    Ok(match a.eve {
        Eve::None => EveStrategy::None,
        Eve::Intercept => EveStrategy::InterceptResend {
            policy: a.eve_basis.map_or(BasisPolicy::Random, BasisPolicy::Fixed),
        },
        Eve::Depolarize => EveStrategy::Channel {
            channel: KrausChannel::depolarizing(a.p)?,
        },
    })
}

fn qkd(a: &QkdArgs, seed: &SeedSource, entangled: bool) -> Result<Report, CliError> {
    if a.rounds == 0 {
        return Err(invalid("--rounds must be positive"));
    }
    let eve = eve_strategy(a)?;
    let seed = seed.get();
    let t: QkdTranscript = if entangled {
        protocols::ekert91(a.rounds, &eve, seed)?
    } else {
        protocols::bb84(a.rounds, &eve, seed)?
    };
    let mut r = Report::default();
    r.insert("seed", seed);
    r.insert("rounds", a.rounds);
    r.insert("eve", to_value(&eve)?);
    r.insert("sifted_bits", t.sifted_key_alice.len());
    r.insert("sift_fraction", t.sift_fraction);
    r.insert("qber", t.qber);
    if !entangled {
        r.insert(
            "expected_qber",
            protocols::bb84_expected_qber(&eve, protocols::BB84_SECOND_BASIS)?,
        );
    }
    r.insert("chsh_estimate", t.chsh_estimate);
    r.insert("abort", t.should_abort(a.abort_qber));
    r.records = t.rounds.iter().map(to_value).collect::<Result<_, _>>()?;
    Ok(r)
}

fn choice(label: Option<BellLabel>, seed: &SeedSource) -> OutcomeChoice {
    match label {
        Some(l) => OutcomeChoice::Fixed(l),
        None => OutcomeChoice::Sampled(seed.get()),
    }
}

fn amplitudes(v: &qinfo::state::StateVector) -> Value {
    v.amps().iter().map(|z: &C64| json!([z.re, z.im])).collect()
}

fn teleport(a: &TeleportArgs, seed: &SeedSource) -> Result<Report, CliError> {
    let mu = parse::state_vector(&a.state)?;
    let label = parse::outcome(&a.outcome)?;
    let res = protocols::teleport(&mu, choice(label, seed))?;
    let mut r = Report::default();
    if label.is_none() {
        r.insert("seed", seed.get());
    }
    r.insert("outcome", res.outcome.name());
    r.insert("probability", res.probability);
    r.insert("bob_before", amplitudes(&res.bob_before));
    r.insert("bob_after", amplitudes(&res.bob_after));
    r.insert("fidelity", res.fidelity);
    Ok(r)
}

fn superdense(a: &SuperdenseArgs) -> Result<Report, CliError> {
    let messages: Vec<u8> = a.message.map_or_else(|| (0..4).collect(), |m| vec![m]);
    let results = messages
        .iter()
        .map(|&m| protocols::superdense_send(m))
        .collect::<qinfo::Result<Vec<_>>>()?;
    let mut r = Report::default();
    r.insert(
        "all_decoded",
        results.iter().all(|x| x.decoded == x.message),
    );
    r.insert("results", to_value(&results)?);
    Ok(r)
}

fn swap(a: &SwapArgs, seed: &SeedSource) -> Result<Report, CliError> {
    let label = parse::outcome(&a.outcome)?;
    let res = protocols::entanglement_swap(choice(label, seed))?;
    let mut r = Report::default();
    if label.is_none() || a.runs > 0 {
        r.insert("seed", seed.get());
    }
    r.insert("outcome", res.outcome.name());
    r.insert("probability", res.probability);
    r.insert("ad_after", amplitudes(&res.ad_after));
    r.insert("fidelity", res.fidelity);
    if a.runs > 0 {
        let counts = protocols::swap_outcome_counts(a.runs, seed.get());
        let tally: serde_json::Map<String, Value> = BellLabel::ALL
            .iter()
            .map(|l| (l.name().to_string(), Value::from(counts[l.index()])))
            .collect();
        r.insert("counts", Value::Object(tally));
    }
    Ok(r)
}

fn purify(a: &PurifyArgs, seed: &SeedSource) -> Result<Report, CliError> {
    if a.rounds == 0 {
        return Err(invalid("--rounds must be positive"));
    }
    let mode = match a.mode {
        PurifyModeArg::Analytic => PurifyMode::Analytic,
        PurifyModeArg::Simulated => PurifyMode::Simulated {
            seed: seed.get(),
            pairs: a.pairs,
        },
    };
    let run = protocols::purify_run(a.from, a.rounds, mode)?;
    let last = run
        .rounds
        .last()
        .ok_or_else(|| invalid("no pairs survived to run a round"))?;
    let mut r = Report::default();
    if let PurifyMode::Simulated { seed, .. } = mode {
        r.insert("seed", seed);
        r.insert("pairs", a.pairs);
    }
    r.insert("mode", format!("{:?}", a.mode).to_lowercase());
    r.insert("F_initial", a.from);
    r.insert("rounds_completed", run.rounds.len());
    r.insert("F_next", last.fidelity);
    r.insert("p_pass", last.p_pass);
    r.insert("rounds", to_value(&run.rounds)?);
    r.records = run.rounds.iter().map(to_value).collect::<Result<_, _>>()?;
    Ok(r)
}

fn schumacher(a: &SchumacherArgs) -> Result<Report, CliError> {
    let source = match &a.angles {
        Some(angles) => {
            let states = parse::polarizations(angles)?;
            SignalSource::Ensemble(Ensemble::pure(
                parse::priors(a.priors.as_deref(), states.len())?,
                &states,
            )?)
        }
        None => SignalSource::Density(DensityOperator::diagonal(
            parse::distribution(&a.probs)?.probs(),
        )?),
    };
    let selection = a.rate.map_or(SubspaceSelection::Typical, |rate| {
        SubspaceSelection::Truncated { rate }
    });
    let (report, sub) =
        coding::schumacher_roundtrip(&source, a.n, a.delta, selection, parse::enum_cap()?)?;
    let mut r = Report::default();
    if let Value::Object(m) = to_value(&report)? {
        r.summary = m;
    }
    r.insert("selection", to_value(&selection)?);
    r.insert("checks", to_value(&sub.checks)?);
    Ok(r)
}

fn qecc(a: &QeccArgs) -> Result<Report, CliError> {
    let words = a
        .codewords
        .split(',')
        .map(parse::codeword)
        .collect::<Result<Vec<_>, _>>()?;
    let code = CodeSubspace::new(words)?;
    let errors: Vec<String> = parse::list(&a.errors, "error")?;
    let report = coding::qecc_check(&code, &PauliErrorSet::new(&errors)?)?;
    let mut r = Report::default();
    r.insert("qubits", code.qubits());
    r.insert("codewords", code.codewords().len());
    r.insert("correctable", report.correctable);
    r.insert("witness", to_value(&report.witness)?);
    r.insert("pairs_checked", report.pairs_checked);
    if let Some(err) = &a.recover {
        let logical: Vec<C64> = parse::list(&a.logical, "amplitude")?;
        let [alpha, beta] =
            <[C64; 2]>::try_from(logical).map_err(|_| invalid("--logical needs two amplitudes"))?;
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(invalid("--logical amplitudes are zero"));
        }
        let rec = coding::recovery_demo(alpha / norm, beta / norm, err)?;
        r.insert("recovery", to_value(&rec)?);
    }
    Ok(r)
}

fn hamming(a: &HammingArgs) -> Result<Report, CliError> {
    let mut r = Report::default();
    r.insert("n", a.n);
    r.insert("t", a.t);
    r.insert("k_max", coding::hamming_bound(a.n, a.t)?);
    Ok(r)
}
