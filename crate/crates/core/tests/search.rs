use deuber_core::catalog::{ap3, chained, monomial, quadruple, schur};
use deuber_core::search::{
    find_mono, min_partition_number, verify_certificate, Claim, DomainFamily, MonoOutcome, ProofMode,
    SearchBudget,
};
use deuber_core::{Certificate, Coloring, Domain, Pattern, Point};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn number(pattern: &Pattern) -> (usize, Certificate) {
    let out = min_partition_number(pattern, 2, DomainFamily::Positive, &SearchBudget::default()).unwrap();
    assert!(!out.exhausted);
    let Claim::MinimalN { n, proof_mode, bad, .. } = &out.certificate.claim else {
        panic!("{:?}", out.certificate.claim)
    };
    let n = *n;
    assert_eq!(proof_mode, &ProofMode::Exhaustive);
    assert_eq!(bad.as_ref().unwrap().domain().size(), n - 1);
    (n, out.certificate)
}

#[test]
fn schur_number_is_five() {
    let (n, cert) = number(&schur().unwrap());
    assert_eq!(n, 5);
    assert!(verify_certificate(&cert, None).unwrap().ok);
}

#[test]
fn three_term_progressions_need_nine() {
    let (n, cert) = number(&ap3().unwrap());
    assert_eq!(n, 9);
    let back = Certificate::from_json(&cert.to_json()).unwrap();
    assert_eq!(back, cert);
    assert!(verify_certificate(&back, Some(&ap3().unwrap())).unwrap().ok);
}

#[test]
fn tampered_bad_coloring_is_rejected() {
    let (_, cert) = number(&schur().unwrap());
    let Claim::MinimalN { n, r, family, proof_mode, bad } = cert.claim.clone() else { unreachable!() };
    let bad = bad.unwrap();
    let forged = Coloring::new(bad.domain().clone(), 2, vec![0; bad.domain().size()]).unwrap();
    assert_ne!(forged, bad);
    let tampered = Certificate {
        claim: Claim::MinimalN { n, r, family, proof_mode, bad: Some(forged) },
        ..cert
    };
    assert!(!verify_certificate(&tampered, None).unwrap().ok);
}

fn random_coloring(domain: Domain, seed: u64) -> Coloring {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let colors = (0..domain.size()).map(|_| rng.gen_range(0..2u8)).collect();
    Coloring::new(domain, 2, colors).unwrap()
}

fn seed_values(cert: &Certificate) -> (Vec<i64>, usize) {
    let Claim::MonoWitness { seed, color, .. } = &cert.claim else { panic!() };
    (seed.iter().map(|p| i64::try_from(&p[0]).unwrap()).collect(), *color)
}

#[test]
fn quadruples_under_parity_and_random_colorings() {
    let pat = Pattern::whole(quadruple().unwrap());
    let domain = Domain::interval(1, 2000).unwrap();
    let parity = Coloring::from_fn(domain.clone(), 2, |p| (&p[0] % 2u32 == BigInt::from(0)) as usize).unwrap();
    for (i, col) in std::iter::once(parity).chain((0..10).map(|s| random_coloring(domain.clone(), s))).enumerate() {
        let MonoOutcome::Found(cert) = find_mono(&pat, &col, &SearchBudget::default()).unwrap() else {
            panic!("coloring {i}")
        };
        assert!(verify_certificate(&cert, None).unwrap().ok);
        let (s, color) = seed_values(&cert);
        let (x, y, z) = (s[0], s[1], s[2]);
        for v in [x, y + x * x, z, z + y * y] {
            assert!((1..=2000).contains(&v));
            assert_eq!(col.color_of(&[v.into()]), Some(color));
        }
    }
}

#[test]
fn squares_chain_of_length_two() {
    let pat = Pattern::whole(chained(&[monomial(2), monomial(2)]).unwrap());
    let domain = Domain::interval(1, 5000).unwrap();
    for seed in 0..5 {
        let col = random_coloring(domain.clone(), 100 + seed);
        let MonoOutcome::Found(cert) = find_mono(&pat, &col, &SearchBudget::default()).unwrap() else {
            panic!("coloring {seed}")
        };
        let (s, color) = seed_values(&cert);
        let (x0, x1, x2) = (s[0], s[1], s[2]);
        for v in [x0, x1, x2, x1 + x0 * x0, x2 + x1 * x1] {
            assert_eq!(col.color_of(&[v.into()]), Some(color));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_colors_keeps_the_witness(colors in prop::collection::vec(0u8..3, 30), swap in 0usize..6) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let perm = perms[swap];
        let domain = Domain::interval(1, 30).unwrap();
        let col = Coloring::new(domain, 3, colors).unwrap();
        let pat = ap3().unwrap();
        let budget = SearchBudget::default();
        let a = find_mono(&pat, &col, &budget).unwrap();
        let b = find_mono(&pat, &col.permuted(&perm).unwrap(), &budget).unwrap();
        match (a, b) {
            (MonoOutcome::Found(x), MonoOutcome::Found(y)) => {
                let (sx, cx) = seed_values(&x);
                let (sy, cy) = seed_values(&y);
                prop_assert_eq!(sx, sy);
                prop_assert_eq!(perm[cx], cy);
            }
            (MonoOutcome::NoneWithinBudget, MonoOutcome::NoneWithinBudget) => {}
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn mono_certificates_round_trip(colors in prop::collection::vec(0u8..2, 12)) {
        let domain = Domain::interval(1, 12).unwrap();
        let col = Coloring::new(domain, 2, colors).unwrap();
        let pat = schur().unwrap();
        let out = find_mono(&pat, &col, &SearchBudget::default()).unwrap();
        let MonoOutcome::Found(cert) = out else { return Err(TestCaseError::fail("Schur number is 5")) };
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert!(verify_certificate(&back, None).unwrap().ok);
        let (seed, color) = seed_values(&back);
        for p in pat.points(&pts(&seed)).unwrap() {
            prop_assert_eq!(col.color_of(&p), Some(color));
        }
    }
}

fn pts(v: &[i64]) -> Vec<Point> {
    v.iter().map(|&x| vec![BigInt::from(x)]).collect()
}
