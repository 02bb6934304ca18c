//! Text-mode front end.
//!
//! Keys `1`..`9` press buttons 0..8, `d` toggles the dashboard, `r` restarts
//! a failed phase, `q` quits. Keys may be separated by spaces or typed in a
//! run (`3141`). Each line of input is processed in order.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use crate::engine::{ButtonId, Color, Coloring};
use crate::session::{Mode, PinSession, Status, ViewState};

const YELLOW_BG: &str = "\x1b[30;43m";
const GREY_BG: &str = "\x1b[30;47m";
const RESET: &str = "\x1b[0m";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub color: bool,
    pub dashboard: bool,
}

fn paint(letter: char, color: Option<Color>, opts: RenderOptions) -> String {
    match (opts.color, color) {
        (true, Some(Color::Yellow)) => format!("{YELLOW_BG} {letter} {RESET}"),
        (true, Some(Color::Grey)) => format!("{GREY_BG} {letter} {RESET}"),
        _ => format!(" {letter} "),
    }
}

fn digit_row(coloring: &Coloring, opts: RenderOptions) -> (String, String) {
    let mut top = String::new();
    let mut bottom = String::new();
    for (digit, &c) in coloring.colors().iter().enumerate() {
        top.push_str(&paint(char::from(b'0' + digit as u8), Some(c), opts));
        bottom.push_str(&format!(" {} ", c.letter()));
    }
    (top, bottom)
}

pub fn render(view: &ViewState, opts: RenderOptions) -> String {
    let mut out = String::new();
    let mask: Vec<&str> = (0..view.pin.total)
        .map(|i| if i < view.pin.committed { "*" } else { "_" })
        .collect();
    let _ = writeln!(out, "PIN      [{}]", mask.join(" "));

    let (digits, letters) = digit_row(&view.digits, opts);
    let _ = writeln!(out, "digits   {digits}");
    let _ = writeln!(out, "         {letters}");

    let buttons: Vec<String> = view
        .buttons
        .iter()
        .map(|(b, c)| {
            let label = c.map_or('?', Color::letter);
            format!("{}:{}", b.index() + 1, paint(label, c, opts).trim())
        })
        .collect();
    let _ = writeln!(out, "buttons  {}", buttons.join("  "));

    if opts.dashboard {
        let _ = writeln!(out, "dashboard (button columns, x = eliminated)");
        let header: String = (1..=view.buttons.n_buttons())
            .map(|b| format!("{b:>3}"))
            .collect();
        let _ = writeln!(out, "      {header}");
        for row in &view.dashboard {
            let cells: String = row
                .dots
                .iter()
                .map(|d| format!("{:>3}", if d.is_empty() { "." } else { d.as_str() }))
                .collect();
            let mark = if row.consistent { ' ' } else { 'x' };
            let _ = writeln!(out, "  {}{mark}  {cells}", row.digit);
        }
    }

    match view.status {
        Status::InProgress => {}
        Status::AllInconsistent => {
            let _ = writeln!(
                out,
                "every digit was ruled out: buttons were used inconsistently; press r to retry"
            );
        }
        Status::Capped => {
            let _ = writeln!(out, "click limit reached for this digit; press r to retry");
        }
        Status::Complete => {}
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DemoEnd {
    Complete { pin: String, mapping: String },
    Quit,
    EndOfInput,
}

/// Runs the interactive loop until the PIN is complete, the user quits, or
/// input ends.
pub fn run<R: BufRead, W: Write>(
    session: PinSession,
    input: R,
    out: &mut W,
    mut opts: RenderOptions,
) -> io::Result<(PinSession, DemoEnd)> {
    let mut session = session;
    let hint = match session.config().mode {
        Mode::Classic => "press 1 if your digit is yellow, 2 if grey".to_string(),
        Mode::SelfCal => format!(
            "pick your own colors for buttons 1-{}; press a button of your digit's color",
            session.config().n_buttons
        ),
    };
    writeln!(out, "{hint}  (d: dashboard, r: retry, q: quit)")?;
    write!(out, "{}", render(&session.view(), opts))?;

    for line in input.lines() {
        let line = line?;
        for key in line.chars().filter(|c| !c.is_whitespace()) {
            match key {
                'q' => return Ok((session, DemoEnd::Quit)),
                'd' => opts.dashboard = !opts.dashboard,
                'r' => match session.reset() {
                    Ok(next) => session = next,
                    Err(e) => writeln!(out, "{e}")?,
                },
                '1'..='9' => {
                    let button = ButtonId(key as usize - '1' as usize);
                    match session.click(button) {
                        Ok(next) => {
                            if next.committed_digits().len() > session.committed_digits().len() {
                                writeln!(out, "digit {} entered", next.committed_digits().len())?;
                            }
                            session = next;
                        }
                        Err(e) => writeln!(out, "{e}")?,
                    }
                }
                other => writeln!(out, "unknown key {other:?}")?,
            }
            if session.status() == Status::Complete {
                write!(out, "{}", render(&session.view(), opts))?;
                let pin = session.pin_string();
                let mapping = session.learned_mapping().to_string();
                writeln!(out, "PIN: {pin}")?;
                writeln!(out, "mapping: {mapping}")?;
                return Ok((session, DemoEnd::Complete { pin, mapping }));
            }
        }
        write!(out, "{}", render(&session.view(), opts))?;
    }
    Ok((session, DemoEnd::EndOfInput))
}
