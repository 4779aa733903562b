mod common;

use common::{names, Gen};
use multires_core::charts::ChartTree;
use multires_core::ideals::IdealRep;
use multires_core::invariants::{omega, ResolutionState};
use multires_core::multiideal::MultiIdeal;
use multires_core::pairs::MarkedPair;
use multires_core::poly::{int, CoefRing, Poly, Rational};
use multires_core::resolution::{build_i_prime, descent_consistency, resolve, ResolveOptions, Resolver};
use multires_core::Error;
use proptest::prelude::*;

fn plane(f: &str, b: u32) -> (ChartTree, MultiIdeal) {
    let nm = names(&["x", "y"]);
    let (tree, root) = ChartTree::new(CoefRing::FIELD, nm.clone(), &[], &[]).unwrap();
    let p = Poly::parse(f, &nm, CoefRing::FIELD).unwrap();
    let m = MultiIdeal::new(&tree, root, &[], vec![MarkedPair::new(IdealRep::principal(p), b).unwrap()], vec![]).unwrap();
    (tree, m)
}

/// `y^a − x^c` plus random terms of weighted degree above `a·c` and
/// `y`-degree below `a`.
fn quasi_homogeneous(g: &mut Gen) -> (String, u32) {
    let a = g.range(2, 3);
    let c = g.range(a + 1, 6);
    let mut f = format!("y^{a}-x^{c}");
    for _ in 0..g.range(0, 2) {
        let i = g.range(0, c);
        let j = g.range(0, a - 1);
        if i * a + j * c > a * c {
            f.push_str(&format!("+{}*x^{i}*y^{j}", g.range(1, 3)));
        }
    }
    (f, a as u32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn i_prime_singular_locus_is_max_omega(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (f, b) = quasi_homogeneous(&mut g);
        let (tree, m) = plane(&f, b);
        let state = ResolutionState::new(&tree, &m);
        let origin = vec![int(0), int(0)];
        let top = omega(&state, &tree, m.chart, &origin).unwrap();
        let prime = build_i_prime(&state, &tree, m.chart, &top).unwrap();
        let mut points = vec![origin];
        for _ in 0..40 {
            points.push(vec![g.coord(), g.coord()]);
        }
        for p in &points {
            let value: Option<Rational> = match omega(&state, &tree, m.chart, p) {
                Ok(v) => Some(v),
                Err(Error::NotSingular) => None,
                Err(e) => panic!("{e}"),
            };
            prop_assume!(value.as_ref().is_none_or(|v| *v <= top));
            prop_assert_eq!(prime.sing_member(p).unwrap(), value == Some(top.clone()), "{} at {:?}", f, p);
        }
    }

    #[test]
    fn traces_end_resolved(seed in any::<u64>()) {
        let (f, b) = quasi_homogeneous(&mut Gen::new(seed));
        let (tree, m) = plane(&f, b);
        let trace = resolve(tree, &m, ResolveOptions::default()).map_err(|e| format!("{f}: {e}")).unwrap();
        prop_assert!(trace.resolved, "{}", f);
        prop_assert!(trace.phases_well_formed());
        prop_assert!(trace.h_strictly_decreasing(), "{}", f);
    }
}

#[test]
fn descent_is_independent_of_the_adapted_hypersurface() {
    let cases = [("y^2-x^3", 1, "y", "y+x^2"), ("y^2-x^5", 1, "y", "y+x^4"), ("x^2-y^5", 0, "x", "x+y^4")];
    for (f, z, a, b) in cases {
        let (tree, m) = plane(f, 2);
        let nm = names(&["x", "y"]);
        let pa = Poly::parse(a, &nm, CoefRing::FIELD).unwrap();
        let pb = Poly::parse(b, &nm, CoefRing::FIELD).unwrap();
        let r = Resolver::new(tree, &m, ResolveOptions::default()).unwrap();
        assert!(descent_consistency(&r, (z, &pa), (z, &pb)).unwrap(), "{f}");
    }
}
