//! Multi-digit PIN entry on top of the engine.
//!
//! A session runs one phase per PIN digit. Each phase starts from a fresh
//! belief, optionally seeded with the button colors learned in earlier
//! phases, and ends when a single hypothesis survives. The session is a
//! value: [`PinSession::click`] and [`PinSession::reset`] return the next
//! state, so replaying the same clicks from the same config always walks the
//! same path.

mod transcript;
mod view;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{
    check_button_count, BeliefState, ButtonId, ButtonMapping, ClickEvent, Coloring, Digit,
};
use crate::error::{Error, Result};
use crate::policy::{next_coloring, PolicyKind};
use crate::rng::RngSeed;

pub use transcript::{replay, Transcript, TranscriptPhase, TRANSCRIPT_VERSION};
pub use view::{DashboardRow, PinMask, ViewState};

pub const DEFAULT_CLICK_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Two pre-colored buttons, left yellow and right grey.
    Classic,
    /// Unlabeled buttons; colors live only in the user's head.
    #[default]
    SelfCal,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Classic => "classic",
            Mode::SelfCal => "selfcal",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "classic" => Ok(Mode::Classic),
            "selfcal" | "self-cal" => Ok(Mode::SelfCal),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode {other:?} (expected classic or selfcal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SessionConfig {
    pub mode: Mode,
    pub n_buttons: usize,
    pub pin_length: usize,
    pub policy: PolicyKind,
    pub seed: RngSeed,
    pub carryover: bool,
    pub click_cap: usize,
}

impl SessionConfig {
    pub fn classic(pin_length: usize, seed: u64) -> SessionConfig {
        SessionConfig {
            mode: Mode::Classic,
            n_buttons: 2,
            pin_length,
            policy: PolicyKind::RandomBalanced,
            seed: RngSeed(seed),
            carryover: true,
            click_cap: DEFAULT_CLICK_CAP,
        }
    }

    pub fn selfcal(n_buttons: usize, pin_length: usize, seed: u64) -> SessionConfig {
        SessionConfig {
            mode: Mode::SelfCal,
            n_buttons,
            ..SessionConfig::classic(pin_length, seed)
        }
    }

    pub fn with_policy(mut self, policy: PolicyKind) -> SessionConfig {
        self.policy = policy;
        self
    }

    pub fn with_carryover(mut self, carryover: bool) -> SessionConfig {
        self.carryover = carryover;
        self
    }

    pub fn with_click_cap(mut self, click_cap: usize) -> SessionConfig {
        self.click_cap = click_cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_button_count(self.n_buttons)?;
        if self.mode == Mode::Classic && self.n_buttons != 2 {
            return Err(Error::InvalidConfig(format!(
                "classic mode uses exactly 2 buttons, got {}",
                self.n_buttons
            )));
        }
        if self.pin_length == 0 {
            return Err(Error::InvalidConfig("pin_length must be at least 1".into()));
        }
        if self.click_cap == 0 {
            return Err(Error::InvalidConfig("click_cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    /// Every hypothesis was eliminated: the user contradicted themselves.
    AllInconsistent,
    /// The phase hit the click cap without converging.
    Capped,
    Complete,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        self != Status::InProgress
    }
}

/// A finished or abandoned phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseRecord {
    pub clicks: Vec<ClickEvent>,
    pub committed: Option<Digit>,
    /// Abandoned after `AllInconsistent` or `Capped`.
    pub reset: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PinSession {
    config: SessionConfig,
    committed: Vec<Digit>,
    belief: BeliefState,
    coloring: Coloring,
    learned: ButtonMapping,
    history: Vec<PhaseRecord>,
    phase_clicks: Vec<ClickEvent>,
    status: Status,
}

impl PinSession {
    pub fn start(config: SessionConfig) -> Result<PinSession> {
        config.validate()?;
        let learned = match config.mode {
            Mode::Classic => ButtonMapping::classic(),
            Mode::SelfCal => ButtonMapping::unassigned(config.n_buttons),
        };
        let mut session = PinSession {
            belief: BeliefState::new(config.n_buttons)?,
            coloring: "YYYYYGGGGG".parse()?,
            learned,
            committed: Vec::new(),
            history: Vec::new(),
            phase_clicks: Vec::new(),
            status: Status::InProgress,
            config,
        };
        session.belief = session.fresh_belief()?;
        session.coloring = session.draw_coloring()?;
        Ok(session)
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn committed_digits(&self) -> &[Digit] {
        &self.committed
    }

    pub fn belief(&self) -> &BeliefState {
        &self.belief
    }

    pub fn current_coloring(&self) -> Coloring {
        self.coloring
    }

    pub fn learned_mapping(&self) -> &ButtonMapping {
        &self.learned
    }

    pub fn phase_clicks(&self) -> &[ClickEvent] {
        &self.phase_clicks
    }

    pub fn history(&self) -> &[PhaseRecord] {
        &self.history
    }

    /// Index of the phase in progress, counting abandoned attempts.
    pub fn phase_index(&self) -> usize {
        self.history.len()
    }

    pub fn pin_string(&self) -> String {
        self.committed.iter().map(|d| d.to_string()).collect()
    }

    pub fn click(&self, button: ButtonId) -> Result<PinSession> {
        match self.status {
            Status::InProgress => {}
            Status::Complete => {
                return Err(Error::InvalidState("session already complete".into()));
            }
            other => {
                return Err(Error::InvalidState(format!(
                    "phase ended as {other:?}; reset before clicking"
                )));
            }
        }
        let button = button.check(self.config.n_buttons)?;
        let event = ClickEvent::new(self.coloring, button);

        let mut next = self.clone();
        next.belief = self.belief.apply_click(&event)?;
        next.phase_clicks.push(event);

        if let Some(digit) = next.belief.inferred_digit() {
            let implied = next.belief.implied_mapping(digit)?;
            next.learned = merge_learned(&next.learned, &implied);
            next.committed.push(digit);
            next.history.push(PhaseRecord {
                clicks: std::mem::take(&mut next.phase_clicks),
                committed: Some(digit),
                reset: false,
            });
            if next.committed.len() == next.config.pin_length {
                // Final belief kept so the dashboard still shows the last phase.
                next.status = Status::Complete;
            } else {
                next.belief = next.fresh_belief()?;
                next.coloring = next.draw_coloring()?;
            }
        } else if next.belief.all_inconsistent() {
            next.status = Status::AllInconsistent;
        } else if next.phase_clicks.len() >= next.config.click_cap {
            next.status = Status::Capped;
        } else {
            next.coloring = next.draw_coloring()?;
        }
        Ok(next)
    }

    /// Abandons a phase that ended `AllInconsistent` or `Capped` and starts
    /// it over.
    pub fn reset(&self) -> Result<PinSession> {
        if !matches!(self.status, Status::AllInconsistent | Status::Capped) {
            return Err(Error::InvalidState(format!(
                "reset only applies after an inconsistent or capped phase, status is {:?}",
                self.status
            )));
        }
        let mut next = self.clone();
        next.history.push(PhaseRecord {
            clicks: std::mem::take(&mut next.phase_clicks),
            committed: None,
            reset: true,
        });
        next.status = Status::InProgress;
        next.belief = next.fresh_belief()?;
        next.coloring = next.draw_coloring()?;
        Ok(next)
    }

    pub fn view(&self) -> ViewState {
        ViewState::project(self)
    }

    pub fn export_transcript(&self) -> Transcript {
        Transcript::from_session(self)
    }

    fn fresh_belief(&self) -> Result<BeliefState> {
        let belief = BeliefState::new(self.config.n_buttons)?;
        match self.config.mode {
            Mode::Classic => belief.seed_evidence(&ButtonMapping::classic()),
            Mode::SelfCal if self.config.carryover => belief.seed_evidence(&self.learned),
            Mode::SelfCal => Ok(belief),
        }
    }

    /// The coloring shown after `k` clicks of phase `j` depends only on
    /// `(seed, j, k)` and, for `Bisect`, the surviving candidates.
    fn draw_coloring(&self) -> Result<Coloring> {
        let mut rng = self
            .config
            .seed
            .stream(&[self.phase_index() as u64, self.phase_clicks.len() as u64]);
        next_coloring(self.config.policy, self.belief.consistent_set(), &mut rng)
    }
}

/// Union of learned and newly implied colors. A button claimed for both
/// colors across phases (only possible without carryover, when the user
/// changed convention) goes back to unknown.
fn merge_learned(learned: &ButtonMapping, implied: &ButtonMapping) -> ButtonMapping {
    if let Some(merged) = learned.union(implied) {
        return merged;
    }
    let mut merged = learned.clone();
    for (button, color) in implied.iter() {
        let keep = match (learned.get(button), color) {
            (Some(a), Some(b)) if a != b => None,
            (a, b) => a.or(b),
        };
        merged.set(button, keep).expect("same button count");
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Color, DigitSet};

    fn d(v: u8) -> Digit {
        Digit::new(v).unwrap()
    }

    /// Presses whatever button `mapping` assigns to the digit's current color.
    fn press_for(session: &PinSession, digit: Digit, mapping: &ButtonMapping) -> PinSession {
        let want = session.current_coloring().color_of(digit);
        let button = mapping.buttons_with(want)[0];
        session.click(button).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(PinSession::start(SessionConfig::selfcal(9, 0, 1)).is_err());
        assert!(PinSession::start(SessionConfig::selfcal(1, 4, 1)).is_err());
        let mut bad = SessionConfig::classic(4, 1);
        bad.n_buttons = 3;
        assert!(matches!(
            PinSession::start(bad),
            Err(Error::InvalidConfig(_))
        ));
        assert!(PinSession::start(SessionConfig::selfcal(9, 4, 1).with_click_cap(0)).is_err());
    }

    #[test]
    fn classic_start_is_preseeded() {
        let s = PinSession::start(SessionConfig::classic(4, 1)).unwrap();
        for h in s.belief().hypotheses() {
            assert_eq!(h.evidence.at(ButtonId(0)).single(), Some(Color::Yellow));
            assert_eq!(h.evidence.at(ButtonId(1)).single(), Some(Color::Grey));
        }
        assert_eq!(s.status(), Status::InProgress);
    }

    #[test]
    fn selfcal_start_is_empty() {
        let s = PinSession::start(SessionConfig::selfcal(9, 4, 1)).unwrap();
        assert!(s
            .belief()
            .hypotheses()
            .iter()
            .all(|h| h.evidence.is_empty()));
        assert_eq!(s.belief().consistent_set(), DigitSet::all());
    }

    #[test]
    fn classic_session_commits_pin() {
        let mapping = ButtonMapping::classic();
        let pin = [d(1), d(9), d(8), d(4)];
        let mut s = PinSession::start(SessionConfig::classic(4, 11)).unwrap();
        let mut guard = 0;
        while s.status() == Status::InProgress {
            let digit = pin[s.committed_digits().len()];
            s = press_for(&s, digit, &mapping);
            guard += 1;
            assert!(guard < 200);
        }
        assert_eq!(s.status(), Status::Complete);
        assert_eq!(s.committed_digits(), &pin);
        assert_eq!(s.pin_string(), "1984");
        assert!(matches!(s.click(ButtonId(0)), Err(Error::InvalidState(_))));
    }

    #[test]
    fn selfcal_session_learns_mapping() {
        let mapping: ButtonMapping = "YGGYGYYGG".parse().unwrap();
        let pin = [d(3), d(0), d(7)];
        let mut s = PinSession::start(SessionConfig::selfcal(9, 3, 5)).unwrap();
        let mut guard = 0;
        while s.status() == Status::InProgress {
            let digit = pin[s.committed_digits().len()];
            s = press_for(&s, digit, &mapping);
            guard += 1;
            assert!(guard < 600);
        }
        assert_eq!(s.committed_digits(), &pin);
        assert!(s.learned_mapping().is_restriction_of(&mapping));
        assert!(!s.learned_mapping().is_empty());
    }

    #[test]
    fn contradictory_clicks_reach_all_inconsistent_and_reset() {
        let s = (0..50)
            .find_map(|seed| {
                let mut s = PinSession::start(SessionConfig::selfcal(2, 1, seed)).unwrap();
                while s.status() == Status::InProgress {
                    let b = crate::sim::contradicting_button(s.belief(), &s.current_coloring());
                    s = s.click(b).unwrap();
                }
                (s.status() == Status::AllInconsistent).then_some(s)
            })
            .expect("some seed lets the scripted user contradict every digit");
        assert!(s.belief().consistent_set().is_empty());
        assert!(matches!(s.click(ButtonId(0)), Err(Error::InvalidState(_))));

        let r = s.reset().unwrap();
        assert_eq!(r.status(), Status::InProgress);
        assert_eq!(r.phase_index(), 1);
        assert!(r.history()[0].reset);
        assert_eq!(r.belief().consistent_set(), DigitSet::all());
    }

    #[test]
    fn cap_stops_the_phase() {
        let s = PinSession::start(SessionConfig::selfcal(9, 1, 3).with_click_cap(1)).unwrap();
        let s = s.click(ButtonId(4)).unwrap();
        assert_eq!(s.status(), Status::Capped);
        assert!(s.reset().is_ok());
    }

    #[test]
    fn reset_rejected_while_in_progress() {
        let s = PinSession::start(SessionConfig::selfcal(9, 1, 3)).unwrap();
        assert!(matches!(s.reset(), Err(Error::InvalidState(_))));
    }

    #[test]
    fn out_of_range_click() {
        let s = PinSession::start(SessionConfig::selfcal(9, 1, 3)).unwrap();
        assert_eq!(
            s.click(ButtonId(12)),
            Err(Error::ButtonOutOfRange {
                button: 12,
                n_buttons: 9
            })
        );
    }

    #[test]
    fn click_is_pure() {
        let s = PinSession::start(SessionConfig::selfcal(9, 2, 3)).unwrap();
        let a = s.click(ButtonId(2)).unwrap();
        let b = s.click(ButtonId(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(s.phase_clicks().len(), 0);
    }

    #[test]
    fn merge_drops_conflicts() {
        let a: ButtonMapping = "YG?".parse().unwrap();
        let b: ButtonMapping = "GGY".parse().unwrap();
        assert_eq!(merge_learned(&a, &b).to_string(), "?GY");
    }
}
