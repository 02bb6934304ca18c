use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use iftt_pin::bridge::{self, SessionDefaults};
use iftt_pin::cracker::crack_transcript;
use iftt_pin::demo::{self, RenderOptions};
use iftt_pin::policy::PolicyKind;
use iftt_pin::rng::RngSeed;
use iftt_pin::session::{Mode, PinSession, SessionConfig, Transcript, DEFAULT_CLICK_CAP};
use iftt_pin::sim::{run_batch, SimConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_BIND: u8 = 5;

/// Self-calibrating PIN entry: terminal demo, simulation, cracking, UI bridge.
///
/// Exit codes: 0 success, 2 usage, 3 ambiguous crack, 4 parse failure,
/// 5 port unavailable.
#[derive(Debug, Parser)]
#[command(name = "iftt-pin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enter a PIN interactively in the terminal.
    Demo(DemoArgs),
    /// Run a Monte Carlo batch of simulated users.
    Simulate(SimulateArgs),
    /// Recover a PIN from a transcript file.
    Crack(CrackArgs),
    /// Serve the browser UI bridge (newline-delimited JSON over TCP).
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct SessionArgs {
    /// classic (two colored buttons) or selfcal (unlabeled buttons)
    #[arg(long, default_value = "selfcal")]
    mode: Mode,
    /// Number of buttons; defaults to 2 in classic mode and 9 otherwise.
    #[arg(long)]
    buttons: Option<usize>,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..))]
    pin_length: u16,
    /// Random seed; the IFTT_PIN_SEED environment variable sets the default.
    #[arg(long, env = "IFTT_PIN_SEED", default_value_t = 0)]
    seed: u64,
    /// random_balanced or bisect
    #[arg(long, default_value = "random_balanced")]
    policy: PolicyKind,
    /// Seed each new digit with the button colors learned so far.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    carryover: bool,
    /// Click limit per digit.
    #[arg(long, default_value_t = DEFAULT_CLICK_CAP)]
    cap: usize,
}

impl SessionArgs {
    fn config(&self, max_buttons: usize) -> Result<SessionConfig, String> {
        let n_buttons = match (self.mode, self.buttons) {
            (Mode::Classic, None | Some(2)) => 2,
            (Mode::Classic, Some(n)) => {
                return Err(format!("classic mode uses 2 buttons, got --buttons {n}"))
            }
            (Mode::SelfCal, None) => 9.min(max_buttons),
            (Mode::SelfCal, Some(n)) => n,
        };
        if !(2..=max_buttons).contains(&n_buttons) {
            return Err(format!(
                "--buttons must be between 2 and {max_buttons}, got {n_buttons}"
            ));
        }
        let config = SessionConfig {
            mode: self.mode,
            n_buttons,
            pin_length: usize::from(self.pin_length),
            policy: self.policy,
            seed: RngSeed(self.seed),
            carryover: self.carryover,
            click_cap: self.cap,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[command(flatten)]
    session: SessionArgs,
    /// Plain text output without terminal colors.
    #[arg(long)]
    no_color: bool,
    /// Show the per-digit evidence dashboard from the start.
    #[arg(long)]
    dashboard: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value = "selfcal")]
    mode: Mode,
    #[arg(long)]
    buttons: Option<usize>,
    #[arg(long, default_value = "random_balanced")]
    policy: PolicyKind,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, env = "IFTT_PIN_SEED", default_value_t = 0)]
    seed: u64,
    /// Probability of reusing the last button used for a color.
    #[arg(long, default_value_t = 0.0)]
    reuse_bias: f64,
    #[arg(long, default_value_t = DEFAULT_CLICK_CAP)]
    cap: usize,
    /// Write the per-trial CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CrackArgs {
    /// Transcript JSON file.
    transcript: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[command(flatten)]
    session: SessionArgs,
}

fn usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Demo(args) => cmd_demo(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Crack(args) => cmd_crack(args),
        Command::Serve(args) => cmd_serve(args),
    }
}

fn cmd_demo(args: DemoArgs) -> ExitCode {
    let config = match args.session.config(9) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let session = match PinSession::start(config) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let opts = RenderOptions {
        color: !args.no_color,
        dashboard: args.dashboard,
    };
    let stdin = io::stdin();
    let mut stdout = io::stdout().lock();
    match demo::run(session, stdin.lock(), &mut stdout, opts) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> ExitCode {
    let n_buttons = match (args.mode, args.buttons) {
        (Mode::Classic, None | Some(2)) => 2,
        (Mode::Classic, Some(n)) => {
            return usage(format!("classic mode uses 2 buttons, got --buttons {n}"))
        }
        (Mode::SelfCal, n) => n.unwrap_or(9),
    };
    let config = SimConfig {
        mode: args.mode,
        n_buttons,
        policy: args.policy,
        reuse_bias: args.reuse_bias,
        click_cap: args.cap,
    };
    let stats = match run_batch(&config, args.trials as usize, RngSeed(args.seed)) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let written = match &args.csv {
        Some(path) => fs::File::create(path)
            .and_then(|f| stats.write_csv(BufWriter::new(f)))
            .and_then(|_| out.write_all(stats.summary().as_bytes())),
        None => stats.write_csv(&mut out).and_then(|_| {
            let commented: String = stats
                .summary()
                .lines()
                .map(|l| format!("# {l}\n"))
                .collect();
            out.write_all(commented.as_bytes())
        }),
    };
    match written.and_then(|_| out.flush()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_crack(args: CrackArgs) -> ExitCode {
    let bytes = match fs::read(&args.transcript) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.transcript.display());
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let transcript = match Transcript::from_bytes(&bytes) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.transcript.display());
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let report = match crack_transcript(&transcript) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    };
    print!("{}", report.to_json());
    match report.pin() {
        Some(pin) => {
            eprintln!("PIN: {pin}");
            ExitCode::SUCCESS
        }
        None => {
            eprintln!("ambiguous: {} candidates", report.candidate_count);
            ExitCode::from(EXIT_AMBIGUOUS)
        }
    }
}

fn cmd_serve(args: ServeArgs) -> ExitCode {
    let config = match args.session.config(MAX_SERVE_BUTTONS) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let defaults = SessionDefaults {
        mode: config.mode,
        n_buttons: args.session.buttons,
        pin_length: config.pin_length,
        seed: config.seed.0,
        policy: config.policy,
        carryover: config.carryover,
        click_cap: config.click_cap,
    };
    let listener = match bridge::bind(args.port) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind port {}: {e}", args.port);
            return ExitCode::from(EXIT_BIND);
        }
    };
    match listener.local_addr() {
        Ok(addr) => eprintln!("listening on {addr} ({} sessions)", config.mode),
        Err(_) => eprintln!("listening on port {}", args.port),
    }
    match bridge::serve(listener, defaults) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

const MAX_SERVE_BUTTONS: usize = iftt_pin::engine::MAX_BUTTONS;
