//! Circuit simulations of the switch: the ABA circuits reproduce it on
//! unitary inputs and fail on noisy ones, the naive two-copy circuit leaks
//! order information into its aux system.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use switchcert::channels::{amplitude_damping, haar_unitary, random_channel, random_unitary_channel, KrausChannel};
use switchcert::circuits::{bipartite_aba_circuit, check_simulation, chiribella_circuit, naive_circuit, purity, reduced_output};
use switchcert::switch::apply_switch;
use switchcert::tensor::mats;
use switchcert::SpaceLayout;

fn bipartite(k: Vec<nalgebra::DMatrix<num_complex::Complex64>>, x: &str, d: usize, dp: usize) -> KrausChannel {
    let l = |s: &str| SpaceLayout::new(&[(format!("{x}{s}"), d), (format!("{x}'{s}"), dp)]).unwrap();
    KrausChannel::new(k, l("I"), l("O")).unwrap()
}

fn main() -> switchcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = random_unitary_channel(2, &mut rng);
        let b = random_unitary_channel(2, &mut rng);
        let c = chiribella_circuit(&a, &b)?;
        worst = worst.max(check_simulation(&c.channel, &apply_switch(&a, &b)?, &c.aux)?.choi_distance);
    }
    println!("ABA circuit, 50 Haar unitary pairs: max Choi distance {worst:.2e}");

    let a = amplitude_damping(0.5);
    let b = random_unitary_channel(2, &mut rng);
    let c = chiribella_circuit(&a, &b)?;
    let r = check_simulation(&c.channel, &apply_switch(&a, &b)?, &c.aux)?;
    println!("ABA circuit, amplitude damping A: {r:?}");

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = bipartite(vec![haar_unitary(4, &mut rng)], "A", 2, 2);
        let bk = random_channel(4, 4, 3, &mut rng)?.kraus().to_vec();
        let b = bipartite(bk, "B", 2, 2);
        let c = bipartite_aba_circuit(&a, &b)?;
        worst = worst.max(check_simulation(&c.channel, &apply_switch(&a, &b)?, &c.aux)?.choi_distance);
    }
    println!("bipartite ABA circuit, 50 (unitary, general) pairs: max Choi distance {worst:.2e}");

    let a = bipartite(random_channel(4, 4, 2, &mut rng)?.kraus().to_vec(), "A", 2, 2);
    let b = bipartite(random_channel(4, 4, 2, &mut rng)?.kraus().to_vec(), "B", 2, 2);
    let c = bipartite_aba_circuit(&a, &b)?;
    println!("bipartite ABA circuit, rank-2 A: {:?}", check_simulation(&c.channel, &apply_switch(&a, &b)?, &c.aux)?);

    let psi = mats::plus().kronecker(&mats::ket(2, 0));
    for (name, b) in [("Z", mats::pauli(3)), ("H", mats::hadamard())] {
        let a = KrausChannel::unitary(mats::pauli(1))?;
        let b = KrausChannel::unitary(b)?;
        let c = naive_circuit(&a, &b)?;
        let out = reduced_output(&c.channel, &["auxO"], &psi)?;
        let r = check_simulation(&c.channel, &apply_switch(&a, &b)?, &c.aux)?;
        println!("naive circuit (X, {name}): output purity {:.6}, Choi distance {:.3e}", purity(&out), r.choi_distance);
    }
    Ok(())
}
