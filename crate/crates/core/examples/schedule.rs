//! Non-trivial transmission times of P(c, p) and the growth bracket between
//! inter-transmission gaps.
//!
//! cargo run --example schedule -- 11/10 12

use contention::{Probability, RationalParam, Schedule};

fn main() -> contention::Result<()> {
    let mut args = std::env::args().skip(1);
    let c: RationalParam = args.next().as_deref().unwrap_or("11/10").parse()?;
    let k: usize = args
        .next()
        .map(|v| v.parse().expect("k must be an integer"))
        .unwrap_or(12);

    let sched = Schedule::build(c.clone(), k)?;
    println!("c = {c}");
    println!("{:>4} {:>8} {:>10}", "k", "x_k", "s_k");
    for (i, (x, s)) in sched.x().iter().zip(sched.s()).enumerate() {
        println!("{i:>4} {x:>8} {s:>10}");
    }

    let p = Probability::new(0.75)?;
    let first: Vec<String> = (1..=sched.s_f64(k.min(6)) as u64)
        .map(|t| format!("{}", sched.transmission_probability(p, t).unwrap()))
        .collect();
    println!("\ntransmission probability at p = {p}, slots 1..: {}", first.join(" "));

    if c.to_f64() <= 2.0 && k >= 4 {
        println!("\ngap bracket c^(k'-k-1)(c-1) x_(k+j) <= x_(k'+j) <= c^(k'-k-1)(c+1) x_(k+j), j = 0:");
        for kp in 1..=k.min(8) {
            let check = sched.check_domination(0, kp, 0)?;
            println!(
                "  k'={kp}: {:.3} <= {} <= {:.3}  holds={}",
                to_f64(&check.lower),
                check.value,
                to_f64(&check.upper),
                check.holds
            );
        }
    }
    Ok(())
}

fn to_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
