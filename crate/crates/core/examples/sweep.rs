//! Sweeps the scripted baselines over formations and zealot counts and
//! writes the table as CSV to stdout.

use kiteneat::baseline::Policy;
use kiteneat::scenario::Formation;
use kiteneat::sweep::{summarize, sweep, write_sweep_csv, SweepOptions};

fn main() {
    let options = SweepOptions {
        formations: vec![Formation::Diagonal, Formation::Surrounded],
        max_zealots: 8,
        repeats: 3,
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..SweepOptions::default()
    };
    for policy in [Policy::StandAndFire, Policy::Flee] {
        let rows = sweep(|| policy.controller(0), &options).unwrap();
        println!("# {policy}");
        write_sweep_csv(std::io::stdout().lock(), &rows).unwrap();
        for s in summarize(&rows) {
            println!(
                "# {}: fewest survivors {:.2}, wipes out every group up to {} zealots",
                s.formation.name(),
                s.min_mean_remaining_ranged,
                s.annihilated_up_to
            );
        }
    }
}
