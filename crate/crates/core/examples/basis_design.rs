//! Spanning sets of channel Chois for k-copy constraints: exact Pauli-type
//! bases and sampled unitary bases.

use std::time::Instant;

use switchcert::basis::{
    pauli_basis, random_k_copy_basis, span_dimension, unitary_k_copy_basis, unitary_span_dimension,
};
use switchcert::channels::{is_cp, is_tp};

fn main() -> switchcert::Result<()> {
    for k in 1..=3 {
        let t = Instant::now();
        let b = pauli_basis(k)?;
        let exact = b.exact.as_ref().map(|e| e.len()).unwrap_or(0);
        let valid = b.elements.iter().all(|j| is_cp(j, 1e-10) && is_tp(j, &["out"], 1e-12));
        println!(
            "pauli k = {k}: {} elements (expected {}), {exact} exact, all channels: {valid}, {:.1?}",
            b.span_dim(),
            span_dimension(13, k),
            t.elapsed()
        );
    }
    for k in 1..=3 {
        let b = unitary_k_copy_basis(k, 7)?;
        println!("unitary k = {k}: {} elements (expected {})", b.span_dim(), unitary_span_dimension(k));
    }
    let r = random_k_copy_basis(2, 5)?;
    println!("random k = 2, seed 5: {} elements", r.span_dim());
    Ok(())
}
