//! Thresholds on c for a given p, and a sweep of c showing where the
//! finiteness and persistence conditions hold together.
//!
//! cargo run --example feasibility -- 0.75

use contention::analysis::{derive_constants, feasibility};
use contention::{Probability, RationalParam};

fn main() -> contention::Result<()> {
    let p: Probability = std::env::args().nth(1).as_deref().unwrap_or("0.75").parse()?;
    let k = derive_constants(p);
    println!("p = {p}: gamma = {}, delta = {}, beta = {}", k.gamma, k.delta, k.beta);

    let reference = feasibility(&RationalParam::new(11, 10)?, p)?;
    let t = &reference.thresholds;
    println!("1/(1-p)  = {} ({})", t.inv_1mp.exact, t.inv_1mp.value);
    println!("1/delta  = {} ({})", t.inv_delta.exact, t.inv_delta.value);
    println!("1/beta   = {} ({})", t.inv_beta.exact, t.inv_beta.value);
    println!("1/gamma  = {} ({})", t.persist_lb.exact, t.persist_lb.value);

    println!(
        "\n{:>6} {:>8} {:>10} {:>9}  violated",
        "c", "finite", "persist", "feasible"
    );
    for hundredths in (100..=130).step_by(2) {
        let c = RationalParam::new(hundredths, 100)?;
        let r = feasibility(&c, p)?;
        println!(
            "{:>6} {:>8} {:>10} {:>9}  {}",
            c.to_f64(),
            r.finite_all_p,
            r.persistent_diverges,
            r.feasible,
            r.violated().join("; ")
        );
    }
    Ok(())
}
