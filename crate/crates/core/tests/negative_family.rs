use ep_core::counterexample::{negative_family, verify_negative};
use ep_core::minor_model::pattern_preset;
use ep_core::pack_cover::covering_number;
use ep_core::Budget;

#[test]
fn tau_grows_while_nu_stays_one() {
    let k1 = pattern_preset("K1").unwrap();
    let mut taus = Vec::new();
    for n in 2..=4 {
        let inst = negative_family(&k1, 3, n, 0).unwrap();
        let r = verify_negative(
            &inst,
            &k1,
            if n == 4 { 1 } else { 0 },
            Budget::new(u64::MAX),
        )
        .unwrap();
        assert!(r.holds(), "n={n}: {r:?}");
        let c = covering_number(&inst.rooted, &k1, 3, false, Budget::new(u64::MAX)).unwrap();
        taus.push(c.tau);
    }
    println!("taus={taus:?}");
    assert!(taus.windows(2).all(|w| w[0] < w[1]), "{taus:?}");
}
