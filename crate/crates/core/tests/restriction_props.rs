mod common;

use std::collections::BTreeMap;

use common::{restriction_instance, Gen};
use multires_core::charts::ChartTree;
use multires_core::ideals::IdealRep;
use multires_core::multiideal::{transform_multiideal, MultiIdeal};
use multires_core::pairs::MarkedPair;
use multires_core::poly::CoefRing;
use proptest::prelude::*;

/// Transforms of `(J|Z, c)` inside `Z = V(z)` and of `(J, c)` restricted to
/// the strict transform of `Z`, keyed by chart label.
fn both_sides(seed: u64) -> Vec<(String, IdealRep, IdealRep)> {
    let inst = restriction_instance(&mut Gen::new(seed));
    let z = 2;
    let j = IdealRep::principal(inst.f.clone());

    let (mut tz, rz) = ChartTree::new(CoefRing::FIELD, inst.names.clone(), &[z], &[]).unwrap();
    let restricted = MarkedPair::new(j.restrict_to(z).unwrap(), inst.mark).unwrap();
    let mz = MultiIdeal::new(&tz, rz, &[z], vec![restricted], vec![]).unwrap();
    let left = transform_multiideal(&mut tz, &mz, &inst.center, 1).unwrap();

    let (mut tw, rw) = ChartTree::new(CoefRing::FIELD, inst.names.clone(), &[], &[]).unwrap();
    let mw = MultiIdeal::new(&tw, rw, &[], vec![MarkedPair::new(j, inst.mark).unwrap()], vec![]).unwrap();
    let right = transform_multiideal(&mut tw, &mw, &inst.center, 1).unwrap();
    let right: BTreeMap<String, IdealRep> = right
        .iter()
        .map(|m| (tw.chart(m.chart).label.clone(), m.pairs[0].ideal.restrict_to(z).unwrap()))
        .collect();

    left.iter()
        .map(|m| {
            let label = tz.chart(m.chart).label.clone();
            let r = right.get(&label).expect("chart on both sides").clone();
            (label, m.pairs[0].ideal.clone(), r)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restriction_commutes_with_transform(seed in any::<u64>()) {
        let sides = both_sides(seed);
        prop_assert!(!sides.is_empty());
        for (label, l, r) in sides {
            prop_assert!(l.same_ideal(&r).unwrap(), "chart {}: {:?} vs {:?}", label, l, r);
        }
    }
}
