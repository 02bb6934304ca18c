//! Synthetic consistent users and a Monte Carlo harness.
//!
//! A simulated user holds a digit and a total button mapping and always
//! presses some button whose color matches the digit's current color. Which
//! of those buttons it picks is governed by `reuse_bias`: the chance of
//! pressing the button it last used for that color instead of a uniformly
//! random one. Each trial owns a stream derived from `(seed, trial index)`,
//! so batches give identical results in parallel or in series.

use std::collections::BTreeMap;
use std::io;

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{
    check_button_count, BeliefState, ButtonId, ButtonMapping, ClickEvent, Color, Coloring, Digit,
    DIGIT_COUNT,
};
use crate::error::{Error, Result};
use crate::policy::{next_coloring, PolicyKind};
use crate::rng::RngSeed;
use crate::session::{Mode, PinSession, SessionConfig, Status, DEFAULT_CLICK_CAP};

const TRIAL_LABEL: u64 = 0x74_7269_616c;
const SESSION_LABEL: u64 = 0x7365_7373;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedUser {
    pub digit: Digit,
    pub mapping: ButtonMapping,
    pub reuse_bias: f64,
    last_used: [Option<ButtonId>; 2],
}

impl SimulatedUser {
    pub fn new(digit: Digit, mapping: ButtonMapping, reuse_bias: f64) -> Result<SimulatedUser> {
        if !mapping.is_valid_total() {
            return Err(Error::InvalidArgument(format!(
                "simulated user needs a total mapping with both colors, got {mapping}"
            )));
        }
        check_reuse_bias(reuse_bias)?;
        Ok(SimulatedUser {
            digit,
            mapping,
            reuse_bias,
            last_used: [None; 2],
        })
    }

    /// Presses a button meaning the digit's color this round.
    pub fn choose_button<R: Rng + ?Sized>(&mut self, coloring: &Coloring, rng: &mut R) -> ButtonId {
        let need = coloring.color_of(self.digit);
        let slot = match need {
            Color::Yellow => 0,
            Color::Grey => 1,
        };
        let reuse = self.last_used[slot].filter(|&b| self.mapping.get(b) == Some(need));
        let button = match reuse {
            Some(b) if self.reuse_bias > 0.0 && rng.random_bool(self.reuse_bias) => b,
            _ => *self
                .mapping
                .buttons_with(need)
                .choose(rng)
                .expect("valid total mapping has both colors"),
        };
        self.last_used[slot] = Some(button);
        button
    }

    /// Switches to a new digit, keeping the button habits.
    pub fn retarget(&mut self, digit: Digit) {
        self.digit = digit;
    }
}

fn check_reuse_bias(reuse_bias: f64) -> Result<()> {
    if (0.0..=1.0).contains(&reuse_bias) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "reuse_bias must lie in [0, 1], got {reuse_bias}"
        )))
    }
}

/// Uniform over the `2^n - 2` total mappings that use both colors.
pub fn random_valid_mapping<R: Rng + ?Sized>(
    n_buttons: usize,
    rng: &mut R,
) -> Result<ButtonMapping> {
    check_button_count(n_buttons)?;
    let all_grey = (1u64 << n_buttons) - 1;
    loop {
        let mask = rng.random_range(0..=all_grey);
        if mask != 0 && mask != all_grey {
            return ButtonMapping::from_grey_mask(n_buttons, mask);
        }
    }
}

pub fn random_digit<R: Rng + ?Sized>(rng: &mut R) -> Digit {
    Digit::new(rng.random_range(0..DIGIT_COUNT as u8)).expect("in range")
}

/// Scripted inconsistent user: picks the button that leaves the fewest
/// surviving hypotheses, preferring a click that kills all of them and
/// avoiding one that leaves exactly one (which would commit a digit).
pub fn contradicting_button(belief: &BeliefState, coloring: &Coloring) -> ButtonId {
    let score = |button: ButtonId| {
        let survivors = belief
            .apply_click(&ClickEvent::new(*coloring, button))
            .map(|b| b.consistent_set().len())
            .unwrap_or(usize::MAX);
        match survivors {
            0 => (0, 0),
            1 => (2, 0),
            n => (1, n),
        }
    };
    (0..belief.n_buttons())
        .map(ButtonId)
        .min_by_key(|&b| score(b))
        .expect("at least two buttons")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mode: Mode,
    pub n_buttons: usize,
    pub policy: PolicyKind,
    pub reuse_bias: f64,
    pub click_cap: usize,
}

impl SimConfig {
    pub fn classic(policy: PolicyKind) -> SimConfig {
        SimConfig {
            mode: Mode::Classic,
            n_buttons: 2,
            policy,
            reuse_bias: 0.0,
            click_cap: DEFAULT_CLICK_CAP,
        }
    }

    pub fn selfcal(n_buttons: usize, reuse_bias: f64) -> SimConfig {
        SimConfig {
            mode: Mode::SelfCal,
            n_buttons,
            policy: PolicyKind::RandomBalanced,
            reuse_bias,
            click_cap: DEFAULT_CLICK_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        check_button_count(self.n_buttons)?;
        check_reuse_bias(self.reuse_bias)?;
        if self.mode == Mode::Classic && self.n_buttons != 2 {
            return Err(Error::InvalidConfig(
                "classic mode uses exactly 2 buttons".into(),
            ));
        }
        if self.click_cap == 0 {
            return Err(Error::InvalidArgument(
                "click_cap must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn fresh_belief(&self) -> Result<BeliefState> {
        let belief = BeliefState::new(self.n_buttons)?;
        match self.mode {
            Mode::Classic => belief.seed_evidence(&ButtonMapping::classic()),
            Mode::SelfCal => Ok(belief),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseOutcome {
    pub identified: Option<Digit>,
    pub clicks_used: usize,
    pub capped: bool,
    pub all_inconsistent: bool,
    /// Mapping implied by the identified hypothesis.
    pub implied_mapping: Option<ButtonMapping>,
}

/// Runs one digit's worth of rounds against a simulated user.
pub fn run_phase<R: Rng + ?Sized>(
    config: &SimConfig,
    user: &mut SimulatedUser,
    rng: &mut R,
) -> Result<(Vec<ClickEvent>, PhaseOutcome)> {
    config.validate()?;
    if user.mapping.n_buttons() != config.n_buttons {
        return Err(Error::InvalidArgument(format!(
            "user mapping has {} buttons, phase has {}",
            user.mapping.n_buttons(),
            config.n_buttons
        )));
    }
    let mut belief = config.fresh_belief()?;
    let mut clicks = Vec::new();
    loop {
        let coloring = next_coloring(config.policy, belief.consistent_set(), rng)?;
        let event = ClickEvent::new(coloring, user.choose_button(&coloring, rng));
        belief = belief.apply_click(&event)?;
        clicks.push(event);

        let identified = belief.inferred_digit();
        let all_inconsistent = belief.all_inconsistent();
        let capped = identified.is_none() && !all_inconsistent && clicks.len() >= config.click_cap;
        if identified.is_some() || all_inconsistent || capped {
            let implied_mapping = identified.map(|d| belief.implied_mapping(d)).transpose()?;
            let outcome = PhaseOutcome {
                identified,
                clicks_used: clicks.len(),
                capped,
                all_inconsistent,
                implied_mapping,
            };
            return Ok((clicks, outcome));
        }
    }
}

/// One row of the batch CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub digit: u8,
    pub identified: Option<u8>,
    pub clicks: usize,
    pub capped: bool,
    #[serde(skip)]
    pub mapping_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub trials: usize,
    pub identified: usize,
    pub wrong_digits: usize,
    /// Identified phases whose implied mapping contradicted the hidden one.
    pub mapping_violations: usize,
    pub capped: usize,
    pub all_inconsistent: usize,
    pub success_rate: f64,
    pub wrong_digit_rate: f64,
    /// Clicks needed, over identified trials.
    pub click_histogram: BTreeMap<usize, usize>,
    pub mean_clicks: f64,
    pub records: Vec<TrialRecord>,
}

fn run_trial(config: &SimConfig, seed: RngSeed, trial: usize) -> Result<TrialRecord> {
    let mut rng = seed.stream(&[TRIAL_LABEL, trial as u64]);
    let digit = random_digit(&mut rng);
    let mapping = match config.mode {
        Mode::Classic => ButtonMapping::classic(),
        Mode::SelfCal => random_valid_mapping(config.n_buttons, &mut rng)?,
    };
    let mut user = SimulatedUser::new(digit, mapping, config.reuse_bias)?;
    let (_, outcome) = run_phase(config, &mut user, &mut rng)?;
    let mapping_ok = outcome
        .implied_mapping
        .as_ref()
        .is_none_or(|m| m.is_restriction_of(&user.mapping));
    Ok(TrialRecord {
        trial,
        digit: digit.value(),
        identified: outcome.identified.map(Digit::value),
        clicks: outcome.clicks_used,
        capped: outcome.capped,
        mapping_ok,
    })
}

pub fn run_batch(config: &SimConfig, trials: usize, seed: RngSeed) -> Result<SimStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    config.validate()?;
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| run_trial(config, seed, trial))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimStats::from_records(records))
}

impl SimStats {
    fn from_records(records: Vec<TrialRecord>) -> SimStats {
        let trials = records.len();
        let mut click_histogram = BTreeMap::new();
        let mut identified = 0;
        let mut wrong_digits = 0;
        let mut mapping_violations = 0;
        let mut capped = 0;
        let mut all_inconsistent = 0;
        let mut click_sum = 0;
        for r in &records {
            match r.identified {
                Some(d) => {
                    identified += 1;
                    click_sum += r.clicks;
                    *click_histogram.entry(r.clicks).or_insert(0) += 1;
                    if d != r.digit {
                        wrong_digits += 1;
                    }
                    if !r.mapping_ok {
                        mapping_violations += 1;
                    }
                }
                None if r.capped => capped += 1,
                None => all_inconsistent += 1,
            }
        }
        SimStats {
            trials,
            identified,
            wrong_digits,
            mapping_violations,
            capped,
            all_inconsistent,
            success_rate: identified as f64 / trials as f64,
            wrong_digit_rate: wrong_digits as f64 / trials as f64,
            mean_clicks: if identified == 0 {
                0.0
            } else {
                click_sum as f64 / identified as f64
            },
            click_histogram,
            records,
        }
    }

    /// Columns `trial,digit,identified,clicks,capped`, one row per trial.
    pub fn write_csv<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for r in &self.records {
            writer.serialize(r)?;
        }
        writer.flush()
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "trials: {}\nidentified: {}\nsuccess_rate: {:.6}\nwrong_digit_rate: {:.6}\n\
             capped: {}\nall_inconsistent: {}\nmean_clicks: {:.4}\nclick_histogram:\n",
            self.trials,
            self.identified,
            self.success_rate,
            self.wrong_digit_rate,
            self.capped,
            self.all_inconsistent,
            self.mean_clicks,
        );
        for (clicks, count) in &self.click_histogram {
            out.push_str(&format!("  {clicks}: {count}\n"));
        }
        out
    }
}

/// A full PIN entered by a simulated user through a real session.
#[derive(Debug, Clone)]
pub struct SessionRun {
    pub pin: Vec<Digit>,
    pub mapping: ButtonMapping,
    pub session: PinSession,
}

impl SessionRun {
    /// Clicks spent on each committed digit, in order.
    pub fn clicks_per_digit(&self) -> Vec<usize> {
        self.session
            .history()
            .iter()
            .filter(|p| p.committed.is_some())
            .map(|p| p.clicks.len())
            .collect()
    }
}

/// Drives `session` to a terminal status with a consistent user entering
/// `pin` via `mapping`.
pub fn enter_pin<R: Rng + ?Sized>(
    session: PinSession,
    pin: &[Digit],
    mapping: &ButtonMapping,
    reuse_bias: f64,
    rng: &mut R,
) -> Result<PinSession> {
    let first = *pin
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty pin".into()))?;
    let mut user = SimulatedUser::new(first, mapping.clone(), reuse_bias)?;
    let mut session = session;
    while session.status() == Status::InProgress {
        let position = session.committed_digits().len();
        let digit = *pin.get(position).ok_or_else(|| {
            Error::InvalidArgument(format!("pin has {} digits, session wants more", pin.len()))
        })?;
        user.retarget(digit);
        let button = user.choose_button(&session.current_coloring(), rng);
        session = session.click(button)?;
    }
    Ok(session)
}

/// Runs `count` complete sessions. Session `i` draws its PIN, hidden mapping
/// and session seed from `(seed, i)`; `template.seed` is ignored.
pub fn run_sessions(
    template: &SessionConfig,
    count: usize,
    reuse_bias: f64,
    seed: RngSeed,
) -> Result<Vec<SessionRun>> {
    template.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.stream(&[SESSION_LABEL, i as u64]);
            let pin: Vec<Digit> = (0..template.pin_length)
                .map(|_| random_digit(&mut rng))
                .collect();
            let mapping = match template.mode {
                Mode::Classic => ButtonMapping::classic(),
                Mode::SelfCal => random_valid_mapping(template.n_buttons, &mut rng)?,
            };
            let config = SessionConfig {
                seed: RngSeed(rng.random()),
                ..template.clone()
            };
            let session = enter_pin(
                PinSession::start(config)?,
                &pin,
                &mapping,
                reuse_bias,
                &mut rng,
            )?;
            Ok(SessionRun {
                pin,
                mapping,
                session,
            })
        })
        .collect()
}
