//! Restricted qubit simulation of the switch on unitary channels in the
//! orders AAB and BAA, with sampled unitary bases (35 two-copy, 10 one-copy).
//! Pass an order (e.g. `BAA`) to run just that one.

use std::time::Instant;

use switchcert::basis::unitary_k_copy_basis;
use switchcert::sdp::{build_primal, solve, Restriction, SimulationScenario, SolverOptions};

fn main() -> switchcert::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let verbose = args.iter().any(|a| a == "-v");
    let orders: Vec<String> = match args.iter().find(|a| !a.starts_with('-')) {
        Some(o) => vec![o.clone()],
        None => vec!["AAB".into(), "BAA".into()],
    };
    let a = unitary_k_copy_basis(2, 11)?;
    let b = unitary_k_copy_basis(1, 12)?;
    println!("bases: {} two-copy and {} one-copy elements", a.span_dim(), b.span_dim());
    for order in orders {
        let scn = SimulationScenario::comb(&order, Restriction::Restricted);
        let t = Instant::now();
        let p = build_primal(&scn, &a, Some(&b))?;
        println!("{order}: {} equalities, blocks {:?}, built in {:.1?}", p.num_constraints(), p.block_summary(), t.elapsed());
        let s = solve(&p, &SolverOptions { verbose, ..Default::default() })?;
        println!("{order}: status {:?}, p* = {:.6}, {} iterations, {:.1?}", s.status, s.objective, s.iterations, t.elapsed());
    }
    Ok(())
}
