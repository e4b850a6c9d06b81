//! The switch as a Choi operator and as a map on Kraus operators.

use switchcert::channels::{fully_depolarizing_qubit, kraus_to_choi, KrausChannel};
use switchcert::circuits::purity;
use switchcert::switch::{apply_switch, switch_choi, switch_fixed_inputs};
use switchcert::tensor::mats;
use switchcert::Operator;

fn main() -> switchcert::Result<()> {
    let s = switch_choi(2)?;
    let ev = s.operator.eigenvalues();
    let rank = ev.iter().filter(|&&e| e > 1e-9).count();
    println!("switch Choi on {}: trace {:.3}, rank {rank}", s.operator.layout(), s.operator.trace_re());

    let fixed = switch_fixed_inputs(2)?;
    println!("fixed inputs |+⟩|0⟩: layout {}, trace {:.3}", fixed.layout(), fixed.trace_re());

    let x = KrausChannel::unitary(mats::pauli(1))?;
    let z = KrausChannel::unitary(mats::pauli(3))?;
    let sw = apply_switch(&x, &z)?;
    let psi = mats::plus().kronecker(&mats::ket(2, 0));
    let out = Operator::new(sw.out_layout().clone(), sw.apply_ket(&psi))?;
    // XZ = −ZX, so the control ends up in |−⟩
    let minus = mats::minus().kronecker(&mats::ket(2, 1));
    let overlap = (minus.adjoint() * out.data() * &minus)[(0, 0)].re;
    println!("S(X, Z) on |+⟩|0⟩: ⟨−,1|ρ|−,1⟩ = {overlap:.6}");

    let dep = fully_depolarizing_qubit();
    let sd = apply_switch(&dep, &dep)?;
    let rho = Operator::new(sd.out_layout().clone(), sd.apply_ket(&psi))?;
    let control = rho.partial_trace(&["tO"])?;
    println!(
        "S(D, D): {} Kraus operators, TP deviation {:.1e}, control purity {:.4}, ⟨+|ρ_c|+⟩ = {:.4}",
        sd.kraus().len(),
        sd.tp_deviation(),
        purity(&control),
        (mats::plus().adjoint() * control.data() * mats::plus())[(0, 0)].re
    );
    println!("Choi of S(D, D) has trace {:.3}", kraus_to_choi(&sd)?.trace_re());
    Ok(())
}
