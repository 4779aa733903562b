mod common;

use common::{ideal_order_oracle, planted_pair, Gen};
use multires_core::pairs::MarkedPair;
use multires_core::poly::Order;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn order_matches_binomial_oracle(seed in any::<u64>()) {
        let inst = planted_pair(&mut Gen::new(seed));
        for p in &inst.points {
            let got = inst.ideal.order_at(p).unwrap();
            prop_assert_eq!(got.finite(), ideal_order_oracle(&inst.ideal, p));
        }
    }

    #[test]
    fn sing_agrees_with_coefficient_ideals(seed in any::<u64>()) {
        let inst = planted_pair(&mut Gen::new(seed));
        let c = inst.mark;
        let pair = MarkedPair::new(inst.ideal.clone(), c).unwrap();
        let deltas: Vec<_> = (0..c).map(|j| inst.ideal.delta_iter(j)).collect();
        for p in &inst.points {
            let sing = pair.sing_member(p).unwrap();
            let by_oracle = ideal_order_oracle(&inst.ideal, p).is_none_or(|o| o >= c);
            prop_assert_eq!(sing, by_oracle);
            let top = &deltas[(c - 1) as usize];
            let vanishes = top.gens().iter().all(|g| g.eval(p).unwrap().is_zero());
            prop_assert_eq!(sing, vanishes, "V(Δ^(c-1)) at {:?}", p);
            for q in 1..=c {
                let d = &deltas[(c - q) as usize];
                prop_assert_eq!(sing, d.order_at(p).unwrap().at_least(q), "q = {} at {:?}", q, p);
            }
        }
    }
}

#[test]
fn order_of_zero_ideal_is_infinite() {
    let i = multires_core::ideals::IdealRep::zero(multires_core::poly::CoefRing::FIELD, 2);
    let p = vec![multires_core::poly::int(1), multires_core::poly::int(0)];
    assert_eq!(i.order_at(&p).unwrap(), Order::Infinite);
}
