use proptest::prelude::*;

use qsig_core::field::FieldElement;
use qsig_core::gc_qds::GcSetup;
use qsig_core::hanaoka::{setup, HanaokaParams};
use qsig_core::harness::oracle::{
    mqds_repudiation_oracle, p2_best_injection, p2_repudiation_oracle,
};
use qsig_core::mqds::{honest_trial, mqds_repudiation_bound, MqdsParams};
use qsig_core::p2::{
    p2_distribute, p2_repudiation_bound, p2_sign, p2_symmetrise, p2_verify, ThresholdConfig,
};
use qsig_core::quantum::code::LinearCode;
use qsig_core::quantum::coherent::p_usd;
use qsig_core::rng::seeded;
use qsig_core::threshold::{accepts, max_accepted, Role};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn acceptance_is_downward_closed(limit in 0.0f64..200.0, count in 0usize..300) {
        if accepts(count + 1, limit) {
            prop_assert!(accepts(count, limit));
        }
        prop_assert_eq!(accepts(count, limit), count <= max_accepted(limit));
    }

    #[test]
    fn honest_p2_always_accepted(half in 1usize..64, s_v in 0.01f64..0.49, seed in any::<u64>(), b in any::<bool>()) {
        let mut rng = seeded(seed);
        let cfg = ThresholdConfig::new(0.0, s_v, 2 * half).unwrap();
        let (keys, mut bob, mut charlie) = p2_distribute(2 * half, &mut rng).unwrap();
        p2_symmetrise(&mut bob, &mut charlie, &mut rng).unwrap();
        let d = p2_sign(&keys, b);
        let vb = p2_verify(&d, &bob, &cfg, Role::Direct).unwrap();
        let vc = p2_verify(&d, &charlie, &cfg, Role::Forwarded).unwrap();
        prop_assert!(vb.accept && vc.accept);
        prop_assert_eq!(vb.mismatches + vc.mismatches, 0);
    }

    #[test]
    fn honest_hanaoka_verifies(q_idx in 0usize..4, n in 3usize..6, omega in 1usize..3, psi in 1u32..3, seed in any::<u64>()) {
        let q = [11u64, 13, 101, 251][q_idx];
        let mut rng = seeded(seed);
        let (_, users) = setup(HanaokaParams { n, omega, psi, q }, &mut rng).unwrap();
        let m = FieldElement::random(q, &mut rng).unwrap();
        let sig = users[0].sign(m).unwrap();
        for u in &users[1..] {
            prop_assert!(u.verify(users[0].identity, &sig).unwrap());
        }
    }

    #[test]
    fn noiseless_mqds_honest_runs_accept(l in 1usize..300, alpha in 0.1f64..2.0, seed in any::<u64>()) {
        let p = MqdsParams {
            l,
            alpha,
            s_a: 0.0,
            s_v: 0.1,
            measurement: Default::default(),
            noise: 0.0,
            scale: Default::default(),
        };
        let (vb, vc) = honest_trial(&p, &mut seeded(seed)).unwrap();
        prop_assert!(vb.accept && vc.accept);
        prop_assert_eq!(vb.mismatches + vc.mismatches, 0);
    }

    #[test]
    fn mqds_repudiation_oracle_within_bound(l in 20usize..400, alpha in 0.3f64..1.5, s_v in 0.02f64..0.3, j_frac in 0.0f64..1.0) {
        let p = MqdsParams {
            l,
            alpha,
            s_a: 0.0,
            s_v,
            measurement: Default::default(),
            noise: 0.0,
            scale: Default::default(),
        };
        let j = (j_frac * l as f64) as usize;
        let exact = mqds_repudiation_oracle(&p, j);
        let bound = mqds_repudiation_bound(p_usd(alpha), 0.0, s_v, l).unwrap();
        prop_assert!((0.0..=bound + 1e-12).contains(&exact), "{} > {}", exact, bound);
    }

    #[test]
    fn p2_repudiation_oracle_within_bound(half in 4usize..40, s_v in 0.02f64..0.45) {
        let l = 2 * half;
        let (j, best) = p2_best_injection(l, 0.0, s_v);
        prop_assert_eq!(best, p2_repudiation_oracle(l, 0.0, s_v, j));
        prop_assert!(best <= p2_repudiation_bound(s_v, l).unwrap() + 1e-12);
    }
}

#[test]
fn gc_honest_run_without_noise_accepts() {
    let setup = GcSetup::new(LinearCode::default_code(), 32, 2, 0.0, 0.2).unwrap();
    let mut rng = seeded(8);
    for _ in 0..50 {
        let (vb, vc) = setup.transfer_trial(0.0, &mut rng).unwrap();
        assert!(vb.accept && vc.accept);
        assert_eq!(vb.mismatches + vc.mismatches, 0);
    }
}
