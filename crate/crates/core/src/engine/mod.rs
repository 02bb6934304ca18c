//! Belief-update engine.
//!
//! Ten hypotheses, one per digit, are tracked in parallel. Each click is
//! reinterpreted under every hypothesis ("if the user is entering `d`, that
//! button meant `d`'s current color"), and a hypothesis is dropped the moment
//! it would require some button to mean both colors. With pre-colored buttons
//! (see [`BeliefState::seed_evidence`]) this reduces to plain set
//! intersection, [`classic_intersect`].

mod belief;
mod color;
mod mapping;

pub use belief::{classic_intersect, BeliefState, ClickEvent, ColorSet, Evidence, HypothesisState};
pub use color::{ButtonId, Color, Coloring, Digit, DigitSet, DIGIT_COUNT};
pub(crate) use mapping::check_button_count;
pub use mapping::{count_valid_mappings, ButtonMapping, MAX_BUTTONS};
