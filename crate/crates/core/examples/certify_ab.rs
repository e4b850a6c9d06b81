//! Exact certificate for the restricted AB scenario, written to `cert_ab.json`
//! (or the path given as first argument) and then re-verified.

use std::time::Instant;

use switchcert::basis::single_copy_basis;
use switchcert::certify::{certify_scenario, verify_certificate, CertifyOptions};
use switchcert::io::write_json;
use switchcert::sdp::{Restriction, SimulationScenario, SolverOptions};

fn main() -> switchcert::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.iter().find(|a| !a.starts_with('-')).cloned().unwrap_or_else(|| "cert_ab.json".into());
    let digits = args.iter().find_map(|a| a.strip_prefix("--digits=")).map(|d| d.parse().unwrap()).unwrap_or(6);

    let scn = SimulationScenario::comb("AB", Restriction::Restricted);
    let basis = single_copy_basis();
    let t = Instant::now();
    let cert = certify_scenario(&scn, &basis, Some(&basis), &SolverOptions::default(), &CertifyOptions { digits, ..Default::default() })?;
    println!("certified p ≤ {} ≈ {:.7} (η = {}, {:.1?})", cert.bound, cert.bound_decimal, cert.eta, t.elapsed());
    for e in &cert.psd_evidence {
        println!("  {:<6} {:?}: {}", e.matrix, e.method, e.accepted);
    }
    write_json(path.as_ref(), &cert)?;

    let t = Instant::now();
    let report = verify_certificate(&cert);
    println!("verifier: accepted = {} ({:.1?})", report.accepted, t.elapsed());
    for f in &report.failures {
        println!("  {f}");
    }
    Ok(())
}
