//! Comb projectors as signed sums of trace-and-replace maps, checked on a
//! sequential circuit and on the switch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use switchcert::channels::{kraus_to_choi, random_channel};
use switchcert::comb::{CombSpec, QcccSpec, Slot};
use switchcert::switch::switch_choi;
use switchcert::{Operator, SpaceLayout};

fn slots(names: &[(&str, &str)]) -> Vec<Slot> {
    names.iter().map(|(i, o)| Slot::new((i, 2), (o, 2))).collect()
}

fn main() -> switchcert::Result<()> {
    for k in 2..=4 {
        let names: Vec<(String, String)> = (1..=k).map(|i| (format!("I{i}"), format!("O{i}"))).collect();
        let refs: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let spec = CombSpec::new(vec![("P".into(), 2)], slots(&refs), vec![("F".into(), 2)]);
        let map = spec.projector_map()?;
        let terms: Vec<String> = map
            .terms()
            .iter()
            .map(|(c, ls)| {
                let ls: Vec<&str> = ls.iter().map(|s| s.as_str()).collect();
                format!("{c:+}·[{}]", ls.join(" "))
            })
            .collect();
        println!("k = {k}: {} terms, normalization {}", terms.len(), spec.normalization());
        if k == 2 {
            println!("  {}", terms.join(" "));
        }
    }

    // two slots between random channels with a qubit memory M1, M2
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = CombSpec::new(vec![("P".into(), 2)], slots(&[("I1", "O1"), ("I2", "O2")]), vec![("F".into(), 2)]);
    let l = |s: &[(&str, usize)]| SpaceLayout::new(s);
    let steps = [
        (l(&[("P", 2)])?, l(&[("I1", 2), ("M1", 2)])?),
        (l(&[("O1", 2), ("M1", 2)])?, l(&[("I2", 2), ("M2", 2)])?),
        (l(&[("O2", 2), ("M2", 2)])?, l(&[("F", 2)])?),
    ];
    let mut c: Option<Operator> = None;
    for (i, o) in steps {
        let ch = random_channel(i.total_dim(), o.total_dim(), 2, &mut rng)?.with_layouts(i, o)?;
        let j = kraus_to_choi(&ch)?;
        c = Some(match c {
            None => j,
            Some(prev) => prev.link(&j)?,
        });
    }
    let c = c.expect("three steps").aligned_to(&spec.layout()?)?;
    println!("sequential circuit is a comb: {}", spec.is_comb(&c, 1e-9)?);
    let rnd: Operator = Operator::identity(spec.layout()?).scale_re(2.0);
    println!("2·𝟙 is a comb: {}", spec.is_comb(&rnd, 1e-9)?);

    let s = switch_choi(2)?.operator;
    for (first, second) in [(("AI", "AO"), ("BI", "BO")), (("BI", "BO"), ("AI", "AO"))] {
        let spec = CombSpec::new(
            vec![("cI".into(), 2), ("tI".into(), 2)],
            vec![Slot::new((first.0, 2), (first.1, 2)), Slot::new((second.0, 2), (second.1, 2))],
            vec![("tO".into(), 2), ("cO".into(), 2)],
        );
        let c = s.aligned_to(&spec.layout()?)?;
        println!("switch is a comb with {} first: {}", &first.0[..1], spec.is_comb(&c, 1e-9)?);
    }

    for k in [2, 3] {
        let names: Vec<(String, String)> = (1..=k).map(|i| (format!("AI{i}"), format!("AO{i}"))).collect();
        let refs: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let q = QcccSpec { slots: slots(&refs), future: vec![("F".into(), 2)] };
        let cons = q.constraints()?;
        println!("QC-CC k = {k}: {} orders, {} coupled equalities, trace {}", cons.orders.len(), cons.equalities.len(), cons.trace);
    }
    Ok(())
}
