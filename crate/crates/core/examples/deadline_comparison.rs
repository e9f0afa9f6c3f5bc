//! Lower bounds on the expected latency of a deadline deviator, against
//! the all-P upper bound.
//!
//! cargo run --example deadline_comparison -- 1 5 14 30

use contention::analysis::{deadline_comparison, y30_upper};
use contention::{Probability, RationalParam};

fn main() -> contention::Result<()> {
    let mut deadlines: Vec<u64> = std::env::args().skip(1).map(|v| v.parse().expect("t0")).collect();
    if deadlines.is_empty() {
        deadlines = vec![1, 5, 14];
    }
    let c = RationalParam::new(11, 10)?;
    let p = Probability::new(0.75)?;
    let all_p = y30_upper(&c, p, 2)?;
    let grid: Vec<usize> = (0..=800).step_by(20).collect();
    println!("all-P upper bound: {all_p:.1}");
    for t0 in deadlines {
        let cmp = deadline_comparison(&c, p, t0, &grid)?;
        let crossing = cmp.first_exceeding(all_p);
        println!(
            "t0 = {t0:>3}: xi = {:>2}, Pr(E) >= {:.6}, divergent = {}, lower bound exceeds {all_p:.0} at z_max = {}",
            cmp.xi,
            cmp.pr_e_lower,
            cmp.diverges,
            crossing.map_or("beyond grid".into(), |b| b.z_max.to_string())
        );
    }
    Ok(())
}
