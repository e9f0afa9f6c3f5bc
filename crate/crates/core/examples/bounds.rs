//! Closed-form upper bounds on expected latency under all-P(c, p).
//!
//! cargo run --example bounds -- 11/10 0.75

use contention::analysis::{bound_report, delta_bound, k1_truncation_factor, y30_upper};
use contention::{Probability, RationalParam};

fn main() -> contention::Result<()> {
    let mut args = std::env::args().skip(1);
    let c: RationalParam = args.next().as_deref().unwrap_or("11/10").parse()?;
    let p: Probability = args.next().as_deref().unwrap_or("0.75").parse()?;

    let report = bound_report(&c, p, None, 6)?;
    println!("c = {c}, p = {p}");
    println!("smallest k1' = {}, smallest k2' = {}", report.k1_min, report.k2_min);
    println!("E[Y_(1,k)] upper bounds: {:.2?}", report.y1k_upper);

    println!("\n{:>4} {:>10} {:>14} {:>14}", "k1'", "factor", "Delta", "y30_upper");
    for k1 in 1..=8 {
        let factor = k1_truncation_factor(&c, p, k1)?;
        match (delta_bound(&c, p, k1), y30_upper(&c, p, k1)) {
            (Ok(d), Ok(y)) => println!("{k1:>4} {factor:>10.4} {d:>14.4} {y:>14.4}"),
            (Err(e), _) | (_, Err(e)) => println!("{k1:>4} {factor:>10.4}  {e}"),
        }
    }
    Ok(())
}
