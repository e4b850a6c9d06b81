//! Approximate simulation: success probability when the heralded output only
//! needs fidelity 1 − ε with the switch, partly restricted AB.

use switchcert::basis::single_copy_basis;
use switchcert::sdp::{build_epsilon_primal, solve, Restriction, SimulationScenario, SolverOptions};

fn main() -> switchcert::Result<()> {
    let b = single_copy_basis();
    let scn = SimulationScenario::comb("AB", Restriction::PartlyRestricted);
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let p0 = build_epsilon_primal(&scn, &b, Some(&b))?;
    println!("{} equalities, blocks {:?}", p0.num_constraints(), p0.block_summary());
    println!("{:>6} {:>12}  status", "ε", "p(ε)");
    for i in 0..=steps {
        let eps = 0.2 * i as f64 / steps as f64;
        let s = solve(&build_epsilon_primal(&scn.clone().with_epsilon(eps), &b, Some(&b))?, &SolverOptions::default())?;
        println!("{eps:>6.3} {:>12.8}  {:?}", s.objective, s.status);
    }
    Ok(())
}
