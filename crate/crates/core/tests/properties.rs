use proptest::prelude::*;

use qfactory_core::encoding::{decode_preimage, encode_preimage};
use qfactory_core::params::gen_params;
use qfactory_core::protocol::hardcore::{hardcore_value, HardcoreInputs};
use qfactory_core::protocol::{client_theta, generate, FamilyId, Inversion, ThetaOutcome};
use qfactory_core::quantum::{
    analytic_run_stage2, fidelity, sv_prepare_claw, sv_run_stage2, AnalyticOutput,
};
use qfactory_core::seeded_rng;
use qfactory_core::zq::{gadget_apply, gadget_invert, BitString, Modulus, SignedVector, ZqVector};

fn claw(max_n: usize) -> impl Strategy<Value = (BitString, BitString)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0..2u8, n),
            prop::collection::vec(0..2u8, n),
        )
            .prop_map(move |(x, mut xp)| {
                xp[n - 1] = 1 - x[n - 1];
                (BitString::new(x).unwrap(), BitString::new(xp).unwrap())
            })
    })
}

proptest! {
    #[test]
    fn signed_lift_round_trips(k in 2u32..=126, v in any::<i128>()) {
        let m = Modulus::new(k).unwrap();
        let half = m.half() as i128;
        let v = v.rem_euclid(2 * half) - half + 1;
        prop_assert_eq!(m.lift(m.from_signed(v)), v);
    }

    #[test]
    fn gadget_inverts_exactly(k in 2u32..=64, entries in prop::collection::vec(any::<u128>(), 1..6)) {
        let m = Modulus::new(k).unwrap();
        let s = ZqVector::from_entries(entries, m);
        prop_assert_eq!(gadget_invert(&gadget_apply(&s), s.len(), k).unwrap(), s);
    }

    #[test]
    fn packed_bits_round_trip(bits in prop::collection::vec(0..2u8, 0..200)) {
        let b = BitString::new(bits).unwrap();
        prop_assert_eq!(BitString::from_packed(&b.to_packed(), b.len()).unwrap(), b);
    }

    #[test]
    fn preimage_encoding_round_trips(n in 2usize..5, seed in any::<u64>(), c in any::<bool>()) {
        let params = gen_params(n).unwrap();
        let mut rng = seeded_rng(seed);
        let s = ZqVector::random(n, params.modulus(), &mut rng);
        let e = SignedVector::random_bounded(params.m, params.mu, &mut rng);
        let bits = encode_preimage(&s, &e, c, &params).unwrap();
        prop_assert_eq!(bits.len(), params.domain_bits());
        prop_assert_eq!(bits.last(), Some(u8::from(c)));
        prop_assert_eq!(decode_preimage(&bits, &params).unwrap(), (s, e, c));
    }

    #[test]
    fn decomposition_matches_direct_sum(
        z in prop::collection::vec(-1i8..=1, 1..40),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = seeded_rng(seed);
        let alphas: Vec<u8> = (0..z.len()).map(|_| rng.random_range(0..8u8)).collect();
        let b: BitString = (0..z.len()).map(|_| rng.random_range(0..2u8)).collect();
        let direct = z.iter().zip(&alphas).zip(b.iter())
            .map(|((&zi, &a), bi)| i64::from(zi) * (4 * i64::from(bi) + i64::from(a)))
            .sum::<i64>()
            .rem_euclid(8) as u8;
        let inputs = HardcoreInputs::new(z, &alphas, b).unwrap();
        prop_assert_eq!(hardcore_value(&inputs), direct);
    }

    #[test]
    fn engines_agree((x, xp) in claw(9), seed in any::<u64>()) {
        use rand::Rng;
        let n = x.len();
        let mut rng = seeded_rng(seed);
        let alphas: Vec<u8> = (0..n - 1).map(|_| rng.random_range(0..8u8)).collect();
        let draw_seed = rng.random::<u64>();
        let a = analytic_run_stage2(&x, &xp, &alphas, &mut seeded_rng(draw_seed)).unwrap();
        let s = sv_run_stage2(sv_prepare_claw(&x, &xp).unwrap(), &alphas, &mut seeded_rng(draw_seed)).unwrap();
        prop_assert_eq!(&a.b, &s.b);
        let ThetaOutcome::Theta(r) = client_theta(&x, &xp, &alphas, &a.b).unwrap() else {
            return Err(TestCaseError::fail("claw differs in the last bit"));
        };
        prop_assert_eq!(a.output, AnalyticOutput::Angle(r));
        prop_assert!(fidelity(s.output, r) >= 1.0 - 1e-9);
    }

    #[test]
    fn toy_inversion_recovers_both_preimages(
        family in prop::sample::select(vec![FamilyId::ToyLinear, FamilyId::ToyPerm]),
        n in 2usize..14,
        seed in any::<u64>(),
    ) {
        let mut rng = seeded_rng(seed);
        let (key, td) = generate(family, n, &mut rng).unwrap();
        let x = key.sample_domain(&mut rng).unwrap();
        let y = key.eval(&x).unwrap();
        let Inversion::Claw(a, b) = td.invert(&key, &y).unwrap() else {
            return Err(TestCaseError::fail("toy family lost a preimage"));
        };
        prop_assert!(a == x || b == x);
        prop_assert_ne!(a.last(), b.last());
        prop_assert_eq!(key.eval(&a).unwrap(), y.clone());
        prop_assert_eq!(key.eval(&b).unwrap(), y);
    }
}
