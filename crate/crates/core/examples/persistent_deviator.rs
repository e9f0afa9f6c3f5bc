//! Exact latency distribution of a player who always transmits while the
//! other two run P(c, p), and the evidence that its mean is infinite.
//!
//! cargo run --example persistent_deviator -- 300

use contention::analysis::persistent_distribution;
use contention::{Probability, RationalParam};

fn main() -> contention::Result<()> {
    let z_max: usize = std::env::args()
        .nth(1)
        .map(|v| v.parse().expect("z_max"))
        .unwrap_or(300);
    let c = RationalParam::new(11, 10)?;
    let p = Probability::new(0.75)?;
    let d = persistent_distribution(&c, p, z_max)?;

    println!(
        "E[Z+1] = {}, s_(floor E[Z]) = {} (Jensen lower bound)",
        d.expected_rounds, d.jensen_lower
    );
    println!(
        "term ratio limit c*gamma = {} ({}), divergent = {}",
        d.certificate.ratio_limit_exact, d.certificate.ratio_limit, d.certificate.divergent
    );
    println!(
        "\n{:>5} {:>14} {:>12} {:>16} {:>8}",
        "z", "s_z", "pmf", "partial E", "ratio"
    );
    for z in (0..=z_max).step_by((z_max / 15).max(1)) {
        let ratio = if z == 0 { f64::NAN } else { d.term_ratios[z - 1] };
        println!(
            "{z:>5} {:>14} {:>12.4e} {:>16.3} {ratio:>8.4}",
            d.support[z], d.pmf[z], d.partial_expectations[z]
        );
    }
    match d.first_partial_above(2759.0) {
        Some(z) => println!("\npartial expectation passes the all-P bound 2759 at z = {z}"),
        None => println!("\npartial expectation stays below 2759 up to z = {z_max}"),
    }
    Ok(())
}
