use std::str::FromStr;

use qinfo::entanglement::BellLabel;
use qinfo::linalg::{CVector, C64};
use qinfo::probability::{ChannelKind, DiscreteChannel, Distribution};
use qinfo::state::StateVector;

use crate::args::ChannelSpec;
use crate::error::{invalid, CliError};

/// Environment variable overriding the enumeration cap.
pub const ENUM_CAP_VAR: &str = "QINFO_ENUM_CAP";

pub fn list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| invalid(format!("bad {what} entry '{}'", t.trim())))
        })
        .collect()
}

pub fn matrix(s: &str, what: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';').map(|row| list(row, what)).collect()
}

pub fn distribution(s: &str) -> Result<Distribution, CliError> {
    Ok(Distribution::new(list(s, "probability")?)?)
}

pub fn priors(s: Option<&str>, n: usize) -> Result<Distribution, CliError> {
    match s {
        Some(s) => distribution(s),
        None => Ok(Distribution::uniform(n)?),
    }
}

pub fn polarizations(s: &str) -> Result<Vec<StateVector>, CliError> {
    Ok(list::<f64>(s, "angle")?
        .into_iter()
        .map(|deg| StateVector::qubit_at_angle(deg.to_radians()))
        .collect())
}

/// Comma-separated complex amplitudes, normalized.
pub fn state_vector(s: &str) -> Result<StateVector, CliError> {
    let amps: Vec<C64> = list(s, "amplitude")?;
    let n = amps.len();
    Ok(StateVector::from_unnormalized(
        CVector::from_vec(amps),
        vec![n],
    )?)
}

/// A Bell label name, or `None` for `random`.
pub fn outcome(s: &str) -> Result<Option<BellLabel>, CliError> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(None);
    }
    Ok(Some(s.parse()?))
}

/// Equal superposition of '+'-joined bit strings.
pub fn codeword(s: &str) -> Result<StateVector, CliError> {
    let terms: Vec<&str> = s.split('+').map(str::trim).collect();
    let len = terms[0].len();
    if terms.iter().any(|t| t.len() != len) {
        return Err(invalid(format!("codeword '{s}' mixes lengths")));
    }
    let dim = 1usize
        .checked_shl(len as u32)
        .filter(|_| len <= 20)
        .ok_or_else(|| invalid(format!("codeword '{s}' too long")))?;
    let mut amps = CVector::zeros(dim);
    for t in terms {
        let idx =
            usize::from_str_radix(t, 2).map_err(|_| invalid(format!("bad bit string '{t}'")))?;
        amps[idx] += C64::new(1.0, 0.0);
    }
    Ok(StateVector::from_unnormalized(amps, vec![2; len])?)
}

pub enum ParsedChannel {
    Named(ChannelKind),
    Matrix(DiscreteChannel),
}

impl ParsedChannel {
    pub fn channel(&self) -> Result<DiscreteChannel, CliError> {
        match self {
            ParsedChannel::Named(k) => Ok(k.channel()?),
            ParsedChannel::Matrix(c) => Ok(c.clone()),
        }
    }
}

pub fn channel(spec: &ChannelSpec) -> Result<ParsedChannel, CliError> {
    if let Some(p) = spec.bsc {
        return Ok(ParsedChannel::Named(ChannelKind::BinarySymmetric(p)));
    }
    if let Some(p) = spec.ternary {
        return Ok(ParsedChannel::Named(ChannelKind::Ternary(p)));
    }
    if let Some(n) = spec.noiseless {
        return Ok(ParsedChannel::Named(ChannelKind::Noiseless(n)));
    }
    let rows = matrix(spec.matrix.as_deref().unwrap_or_default(), "transition")?;
    Ok(ParsedChannel::Matrix(DiscreteChannel::new(rows)?))
}

/// Enumeration cap from the environment, else the library default.
pub fn enum_cap() -> Result<u128, CliError> {
    match std::env::var(ENUM_CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            invalid(format!(
                "{ENUM_CAP_VAR}='{v}' is not a non-negative integer"
            ))
        }),
        Err(_) => Ok(qinfo::coding::default_cap()),
    }
}
