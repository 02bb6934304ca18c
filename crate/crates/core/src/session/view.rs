use serde::{Deserialize, Serialize};

use super::{Mode, PinSession, Status};
use crate::engine::{BeliefState, ButtonMapping, Coloring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinMask {
    pub committed: usize,
    pub total: usize,
}

/// One dashboard row: the evidence dots a digit hypothesis has collected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DashboardRow {
    pub digit: u8,
    /// Per button: `""`, `"Y"`, `"G"` or `"YG"` (struck through).
    pub dots: Vec<String>,
    pub consistent: bool,
}

/// What a screen shows. Built only from the click history and the current
/// coloring; never contains uncommitted digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewState {
    pub mode: Mode,
    pub pin: PinMask,
    pub digits: Coloring,
    /// One character per button: `Y`, `G`, or `?` while the color is hidden.
    pub buttons: ButtonMapping,
    pub dashboard: Vec<DashboardRow>,
    pub status: Status,
    pub phase_clicks: usize,
}

impl ViewState {
    pub(super) fn project(session: &PinSession) -> ViewState {
        let config = session.config();
        let buttons = match (config.mode, session.status()) {
            (Mode::Classic, _) => ButtonMapping::classic(),
            (Mode::SelfCal, Status::Complete) => session.learned_mapping().clone(),
            (Mode::SelfCal, _) => ButtonMapping::unassigned(config.n_buttons),
        };
        ViewState {
            mode: config.mode,
            pin: PinMask {
                committed: session.committed_digits().len(),
                total: config.pin_length,
            },
            digits: session.current_coloring(),
            buttons,
            dashboard: dashboard(session.belief()),
            status: session.status(),
            phase_clicks: session.phase_clicks().len(),
        }
    }
}

pub fn dashboard(belief: &BeliefState) -> Vec<DashboardRow> {
    belief
        .hypotheses()
        .iter()
        .map(|h| DashboardRow {
            digit: h.digit.value(),
            dots: h.evidence.iter().map(|(_, s)| s.letters()).collect(),
            consistent: h.consistent,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ButtonId;
    use crate::session::SessionConfig;

    #[test]
    fn fresh_selfcal_view() {
        let v = PinSession::start(SessionConfig::selfcal(9, 4, 7))
            .unwrap()
            .view();
        assert_eq!(v.buttons.to_string(), "?????????");
        assert_eq!(
            v.pin,
            PinMask {
                committed: 0,
                total: 4
            }
        );
        assert_eq!(v.dashboard.len(), 10);
        assert!(v
            .dashboard
            .iter()
            .all(|r| r.consistent && r.dots.iter().all(String::is_empty)));
        assert_eq!(v.digits.yellow_count(), 5);
    }

    #[test]
    fn classic_buttons_always_colored() {
        let s = PinSession::start(SessionConfig::classic(4, 7)).unwrap();
        assert_eq!(s.view().buttons.to_string(), "YG");
        let s = s.click(ButtonId(1)).unwrap();
        assert_eq!(s.view().buttons.to_string(), "YG");
    }

    #[test]
    fn dots_follow_clicks() {
        let s = PinSession::start(SessionConfig::selfcal(9, 4, 7)).unwrap();
        let shown = s.current_coloring();
        let v = s.click(ButtonId(0)).unwrap().view();
        for row in &v.dashboard {
            let digit = crate::engine::Digit::new(row.digit).unwrap();
            assert_eq!(row.dots[0], shown.color_of(digit).letter().to_string());
            assert!(row.dots[1..].iter().all(String::is_empty));
        }
        assert_eq!(v.phase_clicks, 1);
    }

    #[test]
    fn view_json_field_names() {
        let v = PinSession::start(SessionConfig::selfcal(3, 2, 7))
            .unwrap()
            .view();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["status"], "in_progress");
        assert_eq!(json["buttons"], "???");
        assert_eq!(json["pin"]["total"], 2);
        assert_eq!(json["dashboard"][0]["digit"], 0);
    }
}
