//! C ABI over the `iftt-pin` engine.
//!
//! Every fallible call returns an [`IfttStatus`]; on failure the message is
//! kept per thread and read back with [`iftt_last_error`]. Handles are
//! opaque and owned by the caller until passed to their `_free` function.
//! Strings handed out by this library must be released with
//! [`iftt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use iftt_pin::cracker::crack_transcript;
use iftt_pin::engine::{count_valid_mappings, BeliefState, ButtonId, ClickEvent, Coloring};
use iftt_pin::policy::PolicyKind;
use iftt_pin::rng::RngSeed;
use iftt_pin::session::{
    replay, Mode, PinSession, SessionConfig, Status, Transcript, DEFAULT_CLICK_CAP,
};
use iftt_pin::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfttStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    OutOfRange = 3,
    InvalidColoring = 4,
    InvalidState = 5,
    Parse = 6,
    Utf8 = 7,
    ReplayMismatch = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfttMode {
    Classic = 0,
    SelfCal = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfttPolicy {
    RandomBalanced = 0,
    Bisect = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfttSessionStatus {
    InProgress = 0,
    AllInconsistent = 1,
    Capped = 2,
    Complete = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IfttConfig {
    pub mode: IfttMode,
    pub n_buttons: usize,
    pub pin_length: usize,
    pub seed: u64,
    pub policy: IfttPolicy,
    pub carryover: bool,
    pub click_cap: usize,
}

/// Opaque session handle.
pub struct IfttSession {
    inner: PinSession,
}

/// Opaque belief handle for driving the engine directly.
pub struct IfttBelief {
    inner: BeliefState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn fail(status: IfttStatus, message: impl Into<String>) -> IfttStatus {
    set_last_error(message.into());
    status
}

fn status_of(err: &Error) -> IfttStatus {
    match err {
        Error::InvalidConfig(_) | Error::InvalidArgument(_) => IfttStatus::InvalidConfig,
        Error::ButtonOutOfRange { .. } | Error::DigitOutOfRange(_) => IfttStatus::OutOfRange,
        Error::InvalidColoring(_) => IfttStatus::InvalidColoring,
        Error::InvalidState(_) | Error::InconsistentHypothesis(_) | Error::NothingToSplit(_) => {
            IfttStatus::InvalidState
        }
        Error::Parse { .. } => IfttStatus::Parse,
        Error::ReplayMismatch(_) => IfttStatus::ReplayMismatch,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        Failure(status_of(&err), err.to_string())
    }
}

struct Failure(IfttStatus, String);

fn null(what: &str) -> Failure {
    Failure(IfttStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, recording the error message and catching panics.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IfttStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            IfttStatus::Ok
        }
        Ok(Err(Failure(status, message))) => fail(status, message),
        Err(_) => fail(IfttStatus::Internal, "panic inside iftt-pin"),
    }
}

unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| Failure(IfttStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let owned = CString::new(text).map_err(|e| Failure(IfttStatus::Internal, e.to_string()))?;
    *out = owned.into_raw();
    Ok(())
}

unsafe fn session_ref<'a>(session: *const IfttSession) -> Result<&'a IfttSession, Failure> {
    session.as_ref().ok_or_else(|| null("session"))
}

unsafe fn session_mut<'a>(session: *mut IfttSession) -> Result<&'a mut IfttSession, Failure> {
    session.as_mut().ok_or_else(|| null("session"))
}

fn convert_config(config: &IfttConfig) -> SessionConfig {
    SessionConfig {
        mode: match config.mode {
            IfttMode::Classic => Mode::Classic,
            IfttMode::SelfCal => Mode::SelfCal,
        },
        n_buttons: config.n_buttons,
        pin_length: config.pin_length,
        policy: match config.policy {
            IfttPolicy::RandomBalanced => PolicyKind::RandomBalanced,
            IfttPolicy::Bisect => PolicyKind::Bisect,
        },
        seed: RngSeed(config.seed),
        carryover: config.carryover,
        click_cap: config.click_cap,
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn iftt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Defaults for a mode: 9 buttons (2 for classic), 4 digits, seed 0,
/// balanced random colorings, carryover on, 200-click cap.
#[no_mangle]
pub extern "C" fn iftt_config_default(mode: IfttMode) -> IfttConfig {
    IfttConfig {
        mode,
        n_buttons: match mode {
            IfttMode::Classic => 2,
            IfttMode::SelfCal => 9,
        },
        pin_length: 4,
        seed: 0,
        policy: IfttPolicy::RandomBalanced,
        carryover: true,
        click_cap: DEFAULT_CLICK_CAP,
    }
}

/// # Safety
/// `config` must point to a valid config and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_new(
    config: *const IfttConfig,
    out: *mut *mut IfttSession,
) -> IfttStatus {
    guard(|| {
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = PinSession::start(convert_config(config))?;
        *out = Box::into_raw(Box::new(IfttSession { inner }));
        Ok(())
    })
}

/// Rebuilds a session by replaying a transcript document.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_from_transcript(
    json: *const c_char,
    out: *mut *mut IfttSession,
) -> IfttStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = replay(&Transcript::from_json(text)?)?;
        *out = Box::into_raw(Box::new(IfttSession { inner }));
        Ok(())
    })
}

/// # Safety
/// `session` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_free(session: *mut IfttSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// # Safety
/// `session` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_click(
    session: *mut IfttSession,
    button: usize,
) -> IfttStatus {
    guard(|| {
        let session = session_mut(session)?;
        session.inner = session.inner.click(ButtonId(button))?;
        Ok(())
    })
}

/// # Safety
/// `session` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_reset(session: *mut IfttSession) -> IfttStatus {
    guard(|| {
        let session = session_mut(session)?;
        session.inner = session.inner.reset()?;
        Ok(())
    })
}

/// # Safety
/// `session` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_status(
    session: *const IfttSession,
    out: *mut IfttSessionStatus,
) -> IfttStatus {
    guard(|| {
        let session = session_ref(session)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match session.inner.status() {
            Status::InProgress => IfttSessionStatus::InProgress,
            Status::AllInconsistent => IfttSessionStatus::AllInconsistent,
            Status::Capped => IfttSessionStatus::Capped,
            Status::Complete => IfttSessionStatus::Complete,
        };
        Ok(())
    })
}

/// Digits committed so far.
///
/// # Safety
/// `session` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_committed_count(
    session: *const IfttSession,
    out: *mut usize,
) -> IfttStatus {
    guard(|| {
        let session = session_ref(session)?;
        *out.as_mut().ok_or_else(|| null("out"))? = session.inner.committed_digits().len();
        Ok(())
    })
}

/// Current coloring as ten `Y`/`G` letters, digit 0 first.
///
/// # Safety
/// `session` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_coloring(
    session: *const IfttSession,
    out: *mut *mut c_char,
) -> IfttStatus {
    guard(|| {
        let session = session_ref(session)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_string(out, session.inner.current_coloring().to_string())
    })
}

/// Display state as JSON. Free the result with `iftt_string_free`.
///
/// # Safety
/// `session` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_view_json(
    session: *const IfttSession,
    out: *mut *mut c_char,
) -> IfttStatus {
    guard(|| {
        let session = session_ref(session)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = serde_json::to_string(&session.inner.view())
            .map_err(|e| Failure(IfttStatus::Internal, e.to_string()))?;
        write_string(out, json)
    })
}

/// Transcript document as JSON. Free the result with `iftt_string_free`.
///
/// # Safety
/// `session` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_session_export_transcript(
    session: *const IfttSession,
    out: *mut *mut c_char,
) -> IfttStatus {
    guard(|| {
        let session = session_ref(session)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_string(out, session.inner.export_transcript().to_json())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_belief_new(
    n_buttons: usize,
    out: *mut *mut IfttBelief,
) -> IfttStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = BeliefState::new(n_buttons)?;
        *out = Box::into_raw(Box::new(IfttBelief { inner }));
        Ok(())
    })
}

/// # Safety
/// `belief` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iftt_belief_free(belief: *mut IfttBelief) {
    if !belief.is_null() {
        drop(Box::from_raw(belief));
    }
}

/// Applies one click. `coloring` is ten `Y`/`G` letters, digit 0 first.
///
/// # Safety
/// `belief` must be a live handle, `coloring` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn iftt_belief_apply_click(
    belief: *mut IfttBelief,
    coloring: *const c_char,
    button: usize,
) -> IfttStatus {
    guard(|| {
        let belief = belief.as_mut().ok_or_else(|| null("belief"))?;
        let coloring: Coloring = read_str(coloring, "coloring")?.parse()?;
        belief.inner = belief
            .inner
            .apply_click(&ClickEvent::new(coloring, ButtonId(button)))?;
        Ok(())
    })
}

/// Consistent digits as a bitmask, bit `d` for digit `d`.
///
/// # Safety
/// `belief` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_belief_consistent_mask(
    belief: *const IfttBelief,
    out: *mut u16,
) -> IfttStatus {
    guard(|| {
        let belief = belief.as_ref().ok_or_else(|| null("belief"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = belief.inner.consistent_set().bits();
        Ok(())
    })
}

/// The single remaining digit, or -1 while zero or several remain.
///
/// # Safety
/// `belief` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_belief_inferred_digit(
    belief: *const IfttBelief,
    out: *mut i32,
) -> IfttStatus {
    guard(|| {
        let belief = belief.as_ref().ok_or_else(|| null("belief"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = belief
            .inner
            .inferred_digit()
            .map_or(-1, |d| i32::from(d.value()));
        Ok(())
    })
}

/// Cracks a transcript document. Writes the report JSON to `out` and
/// whether the PIN was recovered uniquely to `unique` (may be null).
///
/// # Safety
/// `json` must be nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_crack_transcript_json(
    json: *const c_char,
    out: *mut *mut c_char,
    unique: *mut bool,
) -> IfttStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = crack_transcript(&Transcript::from_json(text)?)?;
        if let Some(unique) = unique.as_mut() {
            *unique = report.unique;
        }
        write_string(out, report.to_json())
    })
}

/// Number of valid button-to-color mappings for `n_buttons` buttons.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iftt_count_valid_mappings(n_buttons: usize, out: *mut u64) -> IfttStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = count_valid_mappings(n_buttons)?;
        Ok(())
    })
}

/// # Safety
/// `text` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn iftt_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
