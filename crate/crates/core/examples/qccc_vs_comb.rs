//! Restricted AB simulation by QC-CCs (classical control of order) against
//! fixed-order combs; mixing orders does not help here.

use switchcert::basis::single_copy_basis;
use switchcert::sdp::{build_primal, solve, CausalClass, Restriction, SimulationScenario, SolverOptions};

fn main() -> switchcert::Result<()> {
    let b = single_copy_basis();
    let opts = SolverOptions::default();
    let mut vals = vec![];
    for class in [CausalClass::Comb, CausalClass::Qccc] {
        let scn = SimulationScenario::new("AB", class, Restriction::Restricted);
        let p = build_primal(&scn, &b, Some(&b))?;
        let s = solve(&p, &opts)?;
        println!("{}: blocks {:?}, p* = {:.8} ({:?})", scn.name(), p.block_summary(), s.objective, s.status);
        vals.push(s.objective);
    }
    println!("difference {:.1e}", (vals[1] - vals[0]).abs());
    Ok(())
}
