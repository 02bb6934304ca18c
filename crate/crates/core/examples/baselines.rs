//! Prints convergence baselines from seeded simulation runs.
//!
//! `cargo run --release --example baselines`

use iftt_pin::policy::PolicyKind;
use iftt_pin::rng::RngSeed;
use iftt_pin::session::SessionConfig;
use iftt_pin::sim::{run_batch, run_sessions, SimConfig};

fn main() -> iftt_pin::Result<()> {
    let classic = run_batch(&SimConfig::classic(PolicyKind::Bisect), 10_000, RngSeed(1))?;
    println!(
        "classic bisect: mean {:.4} histogram {:?}",
        classic.mean_clicks, classic.click_histogram
    );

    let classic_random = run_batch(
        &SimConfig::classic(PolicyKind::RandomBalanced),
        10_000,
        RngSeed(1),
    )?;
    println!(
        "classic random: mean {:.4} max {:?}",
        classic_random.mean_clicks,
        classic_random.click_histogram.keys().last()
    );

    for bias in [0.0, 0.5, 1.0] {
        for n in [2, 4, 9] {
            let s = run_batch(&SimConfig::selfcal(n, bias), 10_000, RngSeed(1))?;
            println!(
                "selfcal n={n} bias={bias}: success {:.4} mean {:.3} capped {} wrong {} max {:?}",
                s.success_rate,
                s.mean_clicks,
                s.capped,
                s.wrong_digits,
                s.click_histogram.keys().last()
            );
        }
    }

    for carryover in [true, false] {
        let runs = run_sessions(
            &SessionConfig::selfcal(9, 4, 0).with_carryover(carryover),
            2_000,
            0.0,
            RngSeed(2),
        )?;
        let mut sums = [0usize; 4];
        let mut complete = 0;
        for run in &runs {
            let clicks = run.clicks_per_digit();
            if clicks.len() == 4 {
                complete += 1;
                for (s, c) in sums.iter_mut().zip(clicks) {
                    *s += c;
                }
            }
        }
        let means: Vec<String> = sums
            .iter()
            .map(|s| format!("{:.3}", *s as f64 / complete as f64))
            .collect();
        println!(
            "sessions carryover={carryover}: complete {complete}/2000 per-digit means {}",
            means.join(" ")
        );
    }
    Ok(())
}
