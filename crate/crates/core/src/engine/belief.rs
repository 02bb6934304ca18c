use std::fmt;

use serde::{Deserialize, Serialize};

use super::mapping::check_button_count;
use super::{ButtonId, ButtonMapping, Color, Coloring, Digit, DigitSet};
use crate::error::{Error, Result};

/// One observed round: the coloring on screen and the button the user hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClickEvent {
    pub coloring: Coloring,
    pub button: ButtonId,
}

impl ClickEvent {
    pub fn new(coloring: Coloring, button: ButtonId) -> ClickEvent {
        ClickEvent { coloring, button }
    }
}

/// Subset of `{Yellow, Grey}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ColorSet(u8);

impl ColorSet {
    pub fn contains(self, color: Color) -> bool {
        self.0 & color.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Both colors present.
    pub fn is_conflicting(self) -> bool {
        self.len() == 2
    }

    /// The single color, if exactly one.
    pub fn single(self) -> Option<Color> {
        match self.0 {
            0b01 => Some(Color::Yellow),
            0b10 => Some(Color::Grey),
            _ => None,
        }
    }

    fn with(self, color: Color) -> ColorSet {
        ColorSet(self.0 | color.bit())
    }

    /// `""`, `"Y"`, `"G"` or `"YG"`.
    pub fn letters(self) -> String {
        Color::ALL
            .iter()
            .filter(|&&c| self.contains(c))
            .map(|c| c.letter())
            .collect()
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.letters())
    }
}

/// Colors each button has been used to mean, under one digit hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Evidence {
    per_button: Vec<ColorSet>,
}

impl Evidence {
    fn empty(n_buttons: usize) -> Evidence {
        Evidence {
            per_button: vec![ColorSet::default(); n_buttons],
        }
    }

    pub fn at(&self, button: ButtonId) -> ColorSet {
        self.per_button[button.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ButtonId, ColorSet)> + '_ {
        self.per_button
            .iter()
            .enumerate()
            .map(|(b, &s)| (ButtonId(b), s))
    }

    pub fn is_empty(&self) -> bool {
        self.per_button.iter().all(|s| s.is_empty())
    }

    fn has_conflict(&self) -> bool {
        self.per_button.iter().any(|s| s.is_conflicting())
    }

    fn record(&mut self, button: ButtonId, color: Color) {
        let slot = &mut self.per_button[button.index()];
        *slot = slot.with(color);
    }
}

/// "The user is entering `digit`", together with what that would imply about
/// each button.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypothesisState {
    pub digit: Digit,
    pub evidence: Evidence,
    pub consistent: bool,
}

/// Ten competing digit hypotheses for the phase in progress.
///
/// Updates are pure: every operation returns a new state and leaves the
/// receiver untouched.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeliefState {
    n_buttons: usize,
    hypotheses: Vec<HypothesisState>,
    click_count: u64,
}

impl BeliefState {
    pub fn new(n_buttons: usize) -> Result<BeliefState> {
        check_button_count(n_buttons)?;
        let hypotheses = Digit::all()
            .map(|digit| HypothesisState {
                digit,
                evidence: Evidence::empty(n_buttons),
                consistent: true,
            })
            .collect();
        Ok(BeliefState {
            n_buttons,
            hypotheses,
            click_count: 0,
        })
    }

    pub fn n_buttons(&self) -> usize {
        self.n_buttons
    }

    pub fn click_count(&self) -> u64 {
        self.click_count
    }

    pub fn hypotheses(&self) -> &[HypothesisState] {
        &self.hypotheses
    }

    pub fn hypothesis(&self, digit: Digit) -> &HypothesisState {
        &self.hypotheses[digit.index()]
    }

    /// Interprets the click under every hypothesis: if the user is entering
    /// `d`, the pressed button meant `coloring[d]`. A hypothesis dies once any
    /// button has been used for both colors. Evidence keeps accumulating on
    /// dead hypotheses so the dashboard can show it.
    pub fn apply_click(&self, event: &ClickEvent) -> Result<BeliefState> {
        let button = event.button.check(self.n_buttons)?;
        let mut next = self.clone();
        for h in &mut next.hypotheses {
            h.evidence.record(button, event.coloring.color_of(h.digit));
            if h.evidence.at(button).is_conflicting() {
                h.consistent = false;
            }
        }
        next.click_count += 1;
        Ok(next)
    }

    pub fn consistent_set(&self) -> DigitSet {
        self.hypotheses
            .iter()
            .filter(|h| h.consistent)
            .map(|h| h.digit)
            .collect()
    }

    pub fn inferred_digit(&self) -> Option<Digit> {
        self.consistent_set().single()
    }

    pub fn all_inconsistent(&self) -> bool {
        self.hypotheses.iter().all(|h| !h.consistent)
    }

    /// Button colors implied by a still-consistent hypothesis.
    pub fn implied_mapping(&self, digit: Digit) -> Result<ButtonMapping> {
        let h = self.hypothesis(digit);
        if !h.consistent {
            return Err(Error::InconsistentHypothesis(digit));
        }
        let mut mapping = ButtonMapping::unassigned(self.n_buttons);
        for (button, colors) in h.evidence.iter() {
            mapping.set(button, colors.single())?;
        }
        Ok(mapping)
    }

    /// Pre-loads known button colors into every hypothesis of a fresh belief.
    pub fn seed_evidence(&self, mapping: &ButtonMapping) -> Result<BeliefState> {
        if self.click_count != 0 {
            return Err(Error::InvalidState(format!(
                "cannot seed a belief that has already seen {} clicks",
                self.click_count
            )));
        }
        if mapping.n_buttons() != self.n_buttons {
            return Err(Error::InvalidConfig(format!(
                "seed mapping covers {} buttons, belief has {}",
                mapping.n_buttons(),
                self.n_buttons
            )));
        }
        let mut next = self.clone();
        for h in &mut next.hypotheses {
            for (button, color) in mapping.assigned() {
                h.evidence.record(button, color);
            }
            h.consistent = !h.evidence.has_conflict();
        }
        Ok(next)
    }
}

/// Known-color elimination: keep the candidates whose digit shows the
/// announced color this round.
pub fn classic_intersect(candidates: DigitSet, coloring: &Coloring, announced: Color) -> DigitSet {
    candidates.intersection(coloring.digits_with(announced))
}
