//! Certified enclosures of the expected latency under all-P(c, p) as the
//! truncation index grows, for both lone-player semantics.
//!
//! cargo run --example expectations

use contention::analysis::{solve_expectations, Semantics};
use contention::{Probability, RationalParam};

fn main() -> contention::Result<()> {
    let c = RationalParam::new(11, 10)?;
    let p = Probability::new(0.75)?;
    for semantics in [Semantics::Literal, Semantics::PaperSeries] {
        println!("{semantics:?}");
        println!("{:>5} {:>14} {:>14} {:>12}", "K", "lower", "upper", "width");
        for k in [10, 30, 60, 100, 150, 200, 300] {
            let iv = solve_expectations(&c, p, semantics, k)?.latency();
            println!("{k:>5} {:>14.6} {:>14.6} {:>12.3e}", iv.lower, iv.upper, iv.width());
        }
        let table = solve_expectations(&c, p, semantics, 200)?;
        println!(
            "  n=1: {:.6}  n=2: {:.6}  n=3: {:.6}\n",
            table.y1[0].midpoint(),
            table.y2[0].midpoint(),
            table.y3[0].midpoint()
        );
    }
    Ok(())
}
