//! Restricted (1,1) simulation with combs: primal optimum, dual bound and gap.

use std::time::Instant;

use switchcert::basis::single_copy_basis;
use switchcert::sdp::{build_dual, build_primal, solve, Restriction, SimulationScenario, SolverOptions};

fn main() -> switchcert::Result<()> {
    let scn = SimulationScenario::comb("AB", Restriction::Restricted);
    let basis = single_copy_basis();
    let opts = SolverOptions { verbose: std::env::args().any(|a| a == "-v"), ..Default::default() };

    let t = Instant::now();
    let primal = build_primal(&scn, &basis, Some(&basis))?;
    println!("primal: {} equalities, blocks {:?}", primal.num_constraints(), primal.block_summary());
    let ps = solve(&primal, &opts)?;
    println!("  status {:?}, p* = {:.8}, {} iterations, {:.1?}", ps.status, ps.objective, ps.iterations, t.elapsed());
    println!("  max equality violation {:.2e}", ps.residuals.max_equality_violation);

    let t = Instant::now();
    let dual = build_dual(&scn, &basis, Some(&basis))?;
    println!("dual: {} variables, blocks {:?}", dual.num_constraints(), dual.block_summary());
    let ds = solve(&dual, &opts)?;
    println!("  status {:?}, bound = {:.8}, {} iterations, {:.1?}", ds.status, ds.objective, ds.iterations, t.elapsed());
    println!("duality gap {:.2e}", (ds.objective - ps.objective).abs());
    Ok(())
}
