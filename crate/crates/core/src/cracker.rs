//! Observer-side PIN recovery.
//!
//! The attacker sees the colorings and which buttons were pressed, nothing
//! else. Each phase is run through the engine on its own; the survivors are
//! then combined, keeping only PIN tuples whose per-phase implied mappings
//! agree on a single button convention.

use serde::Serialize;

use crate::engine::{BeliefState, ButtonMapping, ClickEvent, Digit, DigitSet};
use crate::error::{Error, Result};
use crate::session::{Mode, Transcript};

/// Cap on listed PIN candidates. Past this only per-phase sets are reported.
pub const MAX_PIN_CANDIDATES: usize = 10_000;

/// Every digit still consistent with the clicks, with the button colors
/// that digit would imply.
pub fn crack_phase(clicks: &[ClickEvent], n_buttons: usize) -> Result<Vec<(Digit, ButtonMapping)>> {
    if clicks.is_empty() {
        return Err(Error::InvalidArgument(
            "crack_phase needs at least one click".into(),
        ));
    }
    phase_candidates(BeliefState::new(n_buttons)?, clicks)
}

fn phase_candidates(
    belief: BeliefState,
    clicks: &[ClickEvent],
) -> Result<Vec<(Digit, ButtonMapping)>> {
    let belief = clicks
        .iter()
        .try_fold(belief, |b, click| b.apply_click(click))?;
    belief
        .consistent_set()
        .iter()
        .map(|d| Ok((d, belief.implied_mapping(d)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseReport {
    pub clicks: usize,
    pub candidates: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrackReport {
    pub phases: Vec<PhaseReport>,
    /// PINs admitting one shared button mapping, ascending.
    pub pin_candidates: Vec<String>,
    /// Number of PIN candidates found, saturating one past the cap.
    pub candidate_count: usize,
    /// Candidates were not listed because there were too many.
    pub truncated: bool,
    /// Button colors shared by every candidate's mapping (`?` where they
    /// differ or nothing is known).
    pub mapping_constraints: ButtonMapping,
    pub unique: bool,
}

impl CrackReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn pin(&self) -> Option<&str> {
        if self.unique {
            self.pin_candidates.first().map(String::as_str)
        } else {
            None
        }
    }
}

pub fn crack_transcript(transcript: &Transcript) -> Result<CrackReport> {
    let n_buttons = transcript.n_buttons;
    let start = match transcript.mode {
        Mode::Classic => BeliefState::new(n_buttons)?.seed_evidence(&ButtonMapping::classic())?,
        Mode::SelfCal => BeliefState::new(n_buttons)?,
    };

    let per_phase: Vec<Vec<(Digit, ButtonMapping)>> = transcript
        .pin_phases()
        .map(|phase| phase_candidates(start.clone(), &phase.clicks))
        .collect::<Result<_>>()?;

    let mut search = Search {
        per_phase: &per_phase,
        prefix: Vec::with_capacity(per_phase.len()),
        found: Vec::new(),
        count: 0,
        shared: None,
    };
    search.descend(0, ButtonMapping::unassigned(n_buttons));

    let truncated = search.count > MAX_PIN_CANDIDATES;
    let mut pin_candidates = if truncated { Vec::new() } else { search.found };
    pin_candidates.sort();

    let phases = transcript
        .pin_phases()
        .zip(&per_phase)
        .map(|(phase, cands)| PhaseReport {
            clicks: phase.clicks.len(),
            candidates: cands.iter().map(|(d, _)| d.value()).collect(),
        })
        .collect();

    Ok(CrackReport {
        phases,
        unique: search.count == 1,
        candidate_count: search.count,
        truncated,
        mapping_constraints: search
            .shared
            .unwrap_or_else(|| ButtonMapping::unassigned(n_buttons)),
        pin_candidates,
    })
}

/// Per-phase digit sets after cross-phase pruning: digit `d` survives in
/// phase `i` only if some full candidate PIN has `d` there.
pub fn pruned_phase_sets(report: &CrackReport) -> Option<Vec<DigitSet>> {
    if report.truncated {
        return None;
    }
    let mut sets = vec![DigitSet::empty(); report.phases.len()];
    for pin in &report.pin_candidates {
        for (set, ch) in sets.iter_mut().zip(pin.chars()) {
            let value = ch.to_digit(10).expect("pin candidates are decimal") as u8;
            set.insert(Digit::new(value).expect("single decimal digit"));
        }
    }
    Some(sets)
}

struct Search<'a> {
    per_phase: &'a [Vec<(Digit, ButtonMapping)>],
    prefix: Vec<Digit>,
    found: Vec<String>,
    count: usize,
    /// Agreement of all complete candidates' mappings so far.
    shared: Option<ButtonMapping>,
}

impl Search<'_> {
    fn descend(&mut self, phase: usize, mapping: ButtonMapping) {
        if self.count > MAX_PIN_CANDIDATES {
            return;
        }
        if phase == self.per_phase.len() {
            self.record(mapping);
            return;
        }
        for (digit, implied) in &self.per_phase[phase] {
            let Some(merged) = mapping.union(implied) else {
                continue;
            };
            if !merged.is_extendable() {
                continue;
            }
            self.prefix.push(*digit);
            self.descend(phase + 1, merged);
            self.prefix.pop();
        }
    }

    fn record(&mut self, mapping: ButtonMapping) {
        self.count += 1;
        if self.count <= MAX_PIN_CANDIDATES {
            self.found
                .push(self.prefix.iter().map(|d| d.to_string()).collect());
        }
        self.shared = Some(match self.shared.take() {
            None => mapping,
            Some(prev) => agreement(&prev, &mapping),
        });
    }
}

fn agreement(a: &ButtonMapping, b: &ButtonMapping) -> ButtonMapping {
    let mut out = ButtonMapping::unassigned(a.n_buttons());
    for ((button, x), (_, y)) in a.iter().zip(b.iter()) {
        if x == y {
            out.set(button, x).expect("same button count");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{ButtonId, Coloring};
    use crate::policy::PolicyKind;
    use crate::session::{TranscriptPhase, TRANSCRIPT_VERSION};

    fn click(coloring: &str, button: usize) -> ClickEvent {
        ClickEvent::new(coloring.parse::<Coloring>().unwrap(), ButtonId(button))
    }

    fn transcript(mode: Mode, n_buttons: usize, phases: Vec<Vec<ClickEvent>>) -> Transcript {
        Transcript {
            version: TRANSCRIPT_VERSION,
            mode,
            n_buttons,
            pin_length: phases.len(),
            seed: 0,
            policy: PolicyKind::RandomBalanced,
            carryover: true,
            click_cap: 200,
            phases: phases
                .into_iter()
                .map(|clicks| TranscriptPhase {
                    clicks,
                    committed: None,
                    reset: false,
                })
                .collect(),
        }
    }

    #[test]
    fn single_click_keeps_everything() {
        let result = crack_phase(&[click("YGGYYGYGGY", 2)], 9).unwrap();
        assert_eq!(result.len(), 10);
    }

    #[test]
    fn empty_phase_rejected() {
        assert!(crack_phase(&[], 9).is_err());
    }

    #[test]
    fn classic_transcript_is_set_intersection() {
        let t = transcript(
            Mode::Classic,
            2,
            vec![vec![click("YYYYYGGGGG", 0), click("YYGGGYYGGG", 1)]],
        );
        let report = crack_transcript(&t).unwrap();
        assert_eq!(report.phases[0].candidates, vec![2, 3, 4]);
        assert_eq!(report.pin_candidates, vec!["2", "3", "4"]);
        assert_eq!(report.mapping_constraints.to_string(), "YG");
        assert!(!report.unique);
    }

    #[test]
    fn cross_phase_mapping_prunes() {
        // Phase 1 alone: digits 0..4 say button 0 is Yellow, 5..9 say Grey.
        // Phase 2 forces button 0 Yellow via repeated use, then commits elsewhere.
        let p1 = vec![click("YYYYYGGGGG", 0)];
        let p2 = vec![click("YYYYYGGGGG", 0), click("YYYYYGGGGG", 1)];
        let alone = crack_transcript(&transcript(Mode::SelfCal, 2, vec![p1.clone()])).unwrap();
        assert_eq!(alone.candidate_count, 10);

        let both = crack_transcript(&transcript(Mode::SelfCal, 2, vec![p1, p2])).unwrap();
        // Phase 2 on two buttons under the same coloring: button 0 and 1 mean
        // the same color, so the shared mapping would be monochrome.
        assert_eq!(both.candidate_count, 0);
        assert!(!both.unique);
    }

    #[test]
    fn report_json_fields() {
        let t = transcript(Mode::SelfCal, 3, vec![vec![click("YGGYYGYGGY", 0)]]);
        let json: serde_json::Value =
            serde_json::from_str(&crack_transcript(&t).unwrap().to_json()).unwrap();
        assert!(json["phases"].is_array());
        assert!(json["pin_candidates"].is_array());
        assert_eq!(json["unique"], false);
    }

    #[test]
    fn combinatorial_guard() {
        // One click per phase on distinct buttons: no pruning, 10^5 tuples.
        let phases = (0..5).map(|b| vec![click("YGGYYGYGGY", b)]).collect();
        let report = crack_transcript(&transcript(Mode::SelfCal, 9, phases)).unwrap();
        assert!(report.truncated);
        assert!(report.pin_candidates.is_empty());
        assert_eq!(report.phases.len(), 5);
        assert!(report.candidate_count > MAX_PIN_CANDIDATES);
    }
}
