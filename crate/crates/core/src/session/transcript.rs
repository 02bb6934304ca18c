use serde::{Deserialize, Serialize};

use super::{Mode, PinSession, SessionConfig, Status, DEFAULT_CLICK_CAP};
use crate::engine::{ClickEvent, Digit};
use crate::error::{Error, Result};
use crate::policy::PolicyKind;
use crate::rng::RngSeed;

pub const TRANSCRIPT_VERSION: u32 = 1;

fn default_click_cap() -> usize {
    DEFAULT_CLICK_CAP
}

fn is_default_click_cap(cap: &usize) -> bool {
    *cap == DEFAULT_CLICK_CAP
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Everything a shoulder-surfer could see, plus the config needed to replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transcript {
    pub version: u32,
    pub mode: Mode,
    pub n_buttons: usize,
    pub pin_length: usize,
    pub seed: u64,
    pub policy: PolicyKind,
    pub carryover: bool,
    #[serde(
        default = "default_click_cap",
        skip_serializing_if = "is_default_click_cap"
    )]
    pub click_cap: usize,
    pub phases: Vec<TranscriptPhase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptPhase {
    pub clicks: Vec<ClickEvent>,
    pub committed: Option<Digit>,
    /// The phase was abandoned and restarted.
    #[serde(default, skip_serializing_if = "is_false")]
    pub reset: bool,
}

impl Transcript {
    pub(super) fn from_session(session: &PinSession) -> Transcript {
        let config = session.config();
        let mut phases: Vec<TranscriptPhase> = session
            .history()
            .iter()
            .map(|p| TranscriptPhase {
                clicks: p.clicks.clone(),
                committed: p.committed,
                reset: p.reset,
            })
            .collect();
        if session.status() != Status::Complete {
            phases.push(TranscriptPhase {
                clicks: session.phase_clicks().to_vec(),
                committed: None,
                reset: false,
            });
        }
        Transcript {
            version: TRANSCRIPT_VERSION,
            mode: config.mode,
            n_buttons: config.n_buttons,
            pin_length: config.pin_length,
            seed: config.seed.0,
            policy: config.policy,
            carryover: config.carryover,
            click_cap: config.click_cap,
            phases,
        }
    }

    pub fn config(&self) -> SessionConfig {
        SessionConfig {
            mode: self.mode,
            n_buttons: self.n_buttons,
            pin_length: self.pin_length,
            policy: self.policy,
            seed: RngSeed(self.seed),
            carryover: self.carryover,
            click_cap: self.click_cap,
        }
    }

    /// Digits recorded as committed, in order.
    pub fn committed_digits(&self) -> Vec<Digit> {
        self.phases.iter().filter_map(|p| p.committed).collect()
    }

    /// Phases that count toward the PIN (abandoned attempts excluded).
    pub fn pin_phases(&self) -> impl Iterator<Item = &TranscriptPhase> {
        self.phases.iter().filter(|p| !p.reset)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("transcript serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Transcript> {
        Transcript::from_bytes(text.as_bytes())
    }

    /// Parses and validates a transcript document. Errors carry the JSON
    /// path of the offending field.
    pub fn from_bytes(bytes: &[u8]) -> Result<Transcript> {
        let mut de = serde_json::Deserializer::from_slice(bytes);
        let transcript: Transcript = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let context = if path == "." {
                "document".to_string()
            } else {
                path
            };
            Error::parse(context, e.into_inner().to_string())
        })?;
        de.end()
            .map_err(|e| Error::parse("document", e.to_string()))?;
        transcript.validate()?;
        Ok(transcript)
    }

    fn validate(&self) -> Result<()> {
        if self.version != TRANSCRIPT_VERSION {
            return Err(Error::parse(
                "version",
                format!(
                    "unsupported version {}, expected {TRANSCRIPT_VERSION}",
                    self.version
                ),
            ));
        }
        self.config()
            .validate()
            .map_err(|e| Error::parse("config", e.to_string()))?;
        for (i, phase) in self.phases.iter().enumerate() {
            for (k, click) in phase.clicks.iter().enumerate() {
                click.button.check(self.n_buttons).map_err(|e| {
                    Error::parse(format!("phases[{i}].clicks[{k}].button"), e.to_string())
                })?;
            }
            if phase.reset && phase.committed.is_some() {
                return Err(Error::parse(
                    format!("phases[{i}].committed"),
                    "a reset phase cannot commit a digit",
                ));
            }
        }
        Ok(())
    }
}

/// Re-runs a transcript through a fresh session. Every recorded coloring
/// must match the one the session draws and every recorded commitment must
/// match what the engine infers.
pub fn replay(transcript: &Transcript) -> Result<PinSession> {
    let mut session = PinSession::start(transcript.config())?;
    let last = transcript.phases.len().saturating_sub(1);
    for (i, phase) in transcript.phases.iter().enumerate() {
        if session.phase_index() != i {
            return Err(Error::ReplayMismatch(format!(
                "phase {i} starts while session is in phase {}",
                session.phase_index()
            )));
        }
        for (k, click) in phase.clicks.iter().enumerate() {
            if session.status() != Status::InProgress || session.phase_index() != i {
                return Err(Error::ReplayMismatch(format!(
                    "phase {i} ended before click {k}"
                )));
            }
            if session.current_coloring() != click.coloring {
                return Err(Error::ReplayMismatch(format!(
                    "phase {i} click {k}: recorded coloring {} but session showed {}",
                    click.coloring,
                    session.current_coloring()
                )));
            }
            session = session.click(click.button)?;
        }
        let committed_here = session.history().get(i).and_then(|record| record.committed);
        if committed_here != phase.committed {
            return Err(Error::ReplayMismatch(format!(
                "phase {i}: recorded commitment {:?}, engine inferred {:?}",
                phase.committed.map(|d| d.value()),
                committed_here.map(|d| d.value())
            )));
        }
        if phase.reset {
            session = session.reset()?;
        } else if phase.committed.is_none() && i != last {
            return Err(Error::ReplayMismatch(format!(
                "phase {i} neither committed nor reset but is not the last phase"
            )));
        }
    }
    Ok(session)
}
