use serde::{Deserialize, Serialize};

use crate::engine::{ButtonId, ButtonMapping};
use crate::error::Error;
use crate::policy::PolicyKind;
use crate::rng::RngSeed;
use crate::session::{
    Mode, PinSession, SessionConfig, Status, Transcript, ViewState, DEFAULT_CLICK_CAP,
};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    /// Starts a new session. Omitted fields fall back to the server defaults.
    Configure {
        #[serde(default)]
        mode: Option<Mode>,
        #[serde(default)]
        n_buttons: Option<usize>,
        #[serde(default)]
        pin_length: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        policy: Option<PolicyKind>,
        #[serde(default)]
        carryover: Option<bool>,
        #[serde(default)]
        click_cap: Option<usize>,
    },
    Click {
        button: usize,
    },
    Reset,
    Export,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello { version: u32 },
    State { view: ViewState },
    Committed { index: usize },
    Complete { pin: String, mapping: ButtonMapping },
    Error { code: String, text: String },
    Transcript { document: Transcript },
}

impl ServerMessage {
    pub fn hello() -> ServerMessage {
        ServerMessage::Hello {
            version: PROTOCOL_VERSION,
        }
    }

    fn error(code: &str, text: impl Into<String>) -> ServerMessage {
        ServerMessage::Error {
            code: code.to_string(),
            text: text.into(),
        }
    }

    /// One line of newline-delimited JSON, without the newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("server message serializes")
    }
}

/// Defaults applied to `configure` fields the client leaves out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionDefaults {
    pub mode: Mode,
    pub n_buttons: Option<usize>,
    pub pin_length: usize,
    pub seed: u64,
    pub policy: PolicyKind,
    pub carryover: bool,
    pub click_cap: usize,
}

impl Default for SessionDefaults {
    fn default() -> Self {
        SessionDefaults {
            mode: Mode::SelfCal,
            n_buttons: None,
            pin_length: 4,
            seed: 0,
            policy: PolicyKind::RandomBalanced,
            carryover: true,
            click_cap: DEFAULT_CLICK_CAP,
        }
    }
}

/// The per-connection session holder.
#[derive(Debug, Clone, Default)]
pub struct SessionSlot {
    defaults: SessionDefaults,
    session: Option<PinSession>,
}

impl SessionSlot {
    pub fn new(defaults: SessionDefaults) -> SessionSlot {
        SessionSlot {
            defaults,
            session: None,
        }
    }

    pub fn session(&self) -> Option<&PinSession> {
        self.session.as_ref()
    }

    /// Parses one inbound line and handles it.
    pub fn handle_line(&mut self, line: &str) -> Vec<ServerMessage> {
        match serde_json::from_str::<ClientMessage>(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => vec![ServerMessage::error("bad-message", e.to_string())],
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerMessage> {
        match msg {
            ClientMessage::Configure {
                mode,
                n_buttons,
                pin_length,
                seed,
                policy,
                carryover,
                click_cap,
            } => {
                let d = &self.defaults;
                let mode = mode.unwrap_or(d.mode);
                let default_buttons = match mode {
                    Mode::Classic => 2,
                    Mode::SelfCal => d.n_buttons.unwrap_or(9),
                };
                let config = SessionConfig {
                    mode,
                    n_buttons: n_buttons.unwrap_or(default_buttons),
                    pin_length: pin_length.unwrap_or(d.pin_length),
                    policy: policy.unwrap_or(d.policy),
                    seed: RngSeed(seed.unwrap_or(d.seed)),
                    carryover: carryover.unwrap_or(d.carryover),
                    click_cap: click_cap.unwrap_or(d.click_cap),
                };
                match PinSession::start(config) {
                    Ok(session) => {
                        let view = session.view();
                        self.session = Some(session);
                        vec![ServerMessage::State { view }]
                    }
                    Err(e) => vec![ServerMessage::error("bad-config", e.to_string())],
                }
            }
            ClientMessage::Click { button } => {
                let Some(session) = &self.session else {
                    return vec![not_configured()];
                };
                let next = match session.click(ButtonId(button)) {
                    Ok(next) => next,
                    Err(e) => return vec![click_error(session, e)],
                };
                let mut out = vec![ServerMessage::State { view: next.view() }];
                if next.committed_digits().len() > session.committed_digits().len() {
                    out.push(ServerMessage::Committed {
                        index: next.committed_digits().len() - 1,
                    });
                }
                if next.status() == Status::Complete {
                    out.push(ServerMessage::Complete {
                        pin: next.pin_string(),
                        mapping: next.learned_mapping().clone(),
                    });
                }
                self.session = Some(next);
                out
            }
            ClientMessage::Reset => {
                let Some(session) = &self.session else {
                    return vec![not_configured()];
                };
                match session.reset() {
                    Ok(next) => {
                        let view = next.view();
                        self.session = Some(next);
                        vec![ServerMessage::State { view }]
                    }
                    Err(e) => vec![ServerMessage::error("bad-state", e.to_string())],
                }
            }
            ClientMessage::Export => match &self.session {
                Some(session) => vec![ServerMessage::Transcript {
                    document: session.export_transcript(),
                }],
                None => vec![not_configured()],
            },
        }
    }
}

fn not_configured() -> ServerMessage {
    ServerMessage::error("not-configured", "send configure before other messages")
}

fn click_error(session: &PinSession, err: Error) -> ServerMessage {
    match err {
        Error::ButtonOutOfRange { .. } => ServerMessage::error("bad-button", err.to_string()),
        _ if session.status() == Status::Complete => {
            ServerMessage::error("finished", err.to_string())
        }
        _ if session.status().is_terminal() => ServerMessage::error("needs-reset", err.to_string()),
        _ => ServerMessage::error("internal", err.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn configured(extra: &str) -> SessionSlot {
        let mut slot = SessionSlot::default();
        let out = slot.handle_line(&format!(r#"{{"type":"configure"{extra}}}"#));
        assert!(matches!(out[0], ServerMessage::State { .. }), "{out:?}");
        slot
    }

    fn contradict(s: &PinSession) -> ButtonId {
        crate::sim::contradicting_button(s.belief(), &s.current_coloring())
    }

    fn code(msgs: &[ServerMessage]) -> &str {
        match &msgs[0] {
            ServerMessage::Error { code, .. } => code,
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn hello_line() {
        assert_eq!(
            ServerMessage::hello().to_line(),
            r#"{"type":"hello","version":1}"#
        );
    }

    #[test]
    fn click_before_configure() {
        let mut slot = SessionSlot::default();
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"click","button":0}"#)),
            "not-configured"
        );
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"export"}"#)),
            "not-configured"
        );
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"reset"}"#)),
            "not-configured"
        );
    }

    #[test]
    fn configure_selfcal() {
        let mut slot = SessionSlot::default();
        let out = slot.handle_line(
            r#"{"type":"configure","mode":"selfcal","n_buttons":9,"pin_length":4,"seed":7,"policy":"random_balanced","carryover":true}"#,
        );
        let ServerMessage::State { view } = &out[0] else {
            panic!()
        };
        assert_eq!(view.buttons.to_string(), "?????????");
        assert_eq!(view.digits.yellow_count(), 5);
    }

    #[test]
    fn bad_button() {
        let mut slot = configured(r#","n_buttons":9"#);
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"click","button":12}"#)),
            "bad-button"
        );
    }

    #[test]
    fn malformed_messages() {
        let mut slot = SessionSlot::default();
        assert_eq!(code(&slot.handle_line("not json")), "bad-message");
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"dance"}"#)),
            "bad-message"
        );
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"click","button":1,"x":2}"#)),
            "bad-message"
        );
    }

    #[test]
    fn bad_config() {
        let mut slot = SessionSlot::default();
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"configure","n_buttons":1}"#)),
            "bad-config"
        );
        assert_eq!(
            code(&slot.handle_line(r#"{"type":"configure","pin_length":0}"#)),
            "bad-config"
        );
    }

    #[test]
    fn classic_completes_once() {
        let mut slot = configured(r#","mode":"classic","pin_length":1,"seed":3"#);
        let digit = crate::engine::Digit::new(8).unwrap();
        let mut completes = 0;
        let mut committed = Vec::new();
        for _ in 0..50 {
            let session = slot.session().unwrap();
            if session.status() == Status::Complete {
                break;
            }
            let button = match session.current_coloring().color_of(digit) {
                crate::engine::Color::Yellow => 0,
                crate::engine::Color::Grey => 1,
            };
            let out = slot.handle(ClientMessage::Click { button });
            assert!(matches!(out[0], ServerMessage::State { .. }));
            for m in &out {
                match m {
                    ServerMessage::Committed { index } => committed.push(*index),
                    ServerMessage::Complete { pin, mapping } => {
                        completes += 1;
                        assert_eq!(pin, "8");
                        assert_eq!(mapping.to_string(), "YG");
                    }
                    _ => {}
                }
            }
        }
        assert_eq!(completes, 1);
        assert_eq!(committed, vec![0]);
        assert_eq!(
            code(&slot.handle(ClientMessage::Click { button: 0 })),
            "finished"
        );
        assert_eq!(code(&slot.handle(ClientMessage::Reset)), "bad-state");
        let out = slot.handle(ClientMessage::Export);
        let ServerMessage::Transcript { document } = &out[0] else {
            panic!()
        };
        assert_eq!(document.committed_digits(), vec![digit]);
    }

    #[test]
    fn reset_after_inconsistency() {
        let mut slot = (0..50)
            .map(|seed| configured(&format!(r#","n_buttons":2,"pin_length":1,"seed":{seed}"#)))
            .find(|slot| {
                let mut s = slot.session().unwrap().clone();
                while s.status() == Status::InProgress {
                    s = s.click(contradict(&s)).unwrap();
                }
                s.status() == Status::AllInconsistent
            })
            .unwrap();
        loop {
            let button = contradict(slot.session().unwrap()).index();
            let out = slot.handle(ClientMessage::Click { button });
            if let ServerMessage::State { view } = &out[0] {
                if view.status == Status::AllInconsistent {
                    break;
                }
            } else {
                panic!("{out:?}");
            }
        }
        assert_eq!(
            code(&slot.handle(ClientMessage::Click { button: 0 })),
            "needs-reset"
        );
        let out = slot.handle(ClientMessage::Reset);
        let ServerMessage::State { view } = &out[0] else {
            panic!()
        };
        assert_eq!(view.status, Status::InProgress);
    }
}
