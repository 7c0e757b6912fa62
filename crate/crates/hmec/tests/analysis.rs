//! Cross-checks of the cryptanalysis operations against independent
//! brute-force routes.

use std::time::Duration;

use hmec::cipher::{encrypt, CipherKey, Mode};
use hmec::cryptanalysis::{
    bit_change_percent, identifiability_scan, key_space_size, known_plaintext_attack, KeyGrid,
    PublicParams,
};
use hmec::hill::HillKey;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixed_key() -> CipherKey {
    CipherKey::new(
        3.781234567,
        0.37,
        4,
        3,
        HillKey::new([[5, 8], [3, 7]]).unwrap(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn key_space_size_agrees_with_integer_enumeration(
        start in 3_570_000_000u64..=3_999_000_000,
        step in 1u64..5_000_000,
        span_points in 1u64..1000,
    ) {
        // Build the grid from integer nanounits; the independent count is
        // plain integer arithmetic.
        let last = (start + step * (span_points - 1)).min(4_000_000_000);
        prop_assume!(last >= start);
        let expected = (last - start) / step + 1;
        let grid = KeyGrid::new(start as f64 / 1e9, last as f64 / 1e9, step as f64 / 1e9).unwrap();
        prop_assert_eq!(key_space_size(&grid), expected);
    }

    #[test]
    fn bit_change_percent_is_symmetric_and_definite(
        a in prop::collection::vec(any::<u8>(), 1..256),
        b in prop::collection::vec(any::<u8>(), 1..256),
    ) {
        let len = a.len().min(b.len());
        let (a, b) = (&a[..len], &b[..len]);
        let ab = bit_change_percent(a, b).unwrap();
        let ba = bit_change_percent(b, a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=100.0).contains(&ab));
        prop_assert_eq!(ab == 0.0, a == b);
    }

    #[test]
    fn bit_change_percent_is_invariant_under_shared_permutation(
        pair in prop::collection::vec((any::<u8>(), any::<u8>()), 2..64),
        seed in any::<u64>(),
    ) {
        let (a, b): (Vec<u8>, Vec<u8>) = pair.into_iter().unzip();
        let before = bit_change_percent(&a, &b).unwrap();
        // Apply the same byte-position shuffle to both sequences.
        let mut order: Vec<usize> = (0..a.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let pa: Vec<u8> = order.iter().map(|&i| a[i]).collect();
        let pb: Vec<u8> = order.iter().map(|&i| b[i]).collect();
        prop_assert_eq!(before, bit_change_percent(&pa, &pb).unwrap());
    }
}

#[test]
fn identifiability_scan_matches_a_brute_force_pair_walk() {
    let base = fixed_key();
    let input = b"cross check input";
    let grid = KeyGrid::new(3.70, 3.74, 0.005).unwrap();
    let points = key_space_size(&grid);
    let report = identifiability_scan(&base, Mode::Strict, input, &grid, 16, 0.0).unwrap();

    // Independent route: encrypt under every grid key with the library's
    // public entry point and compare prefixes pairwise.
    let outputs: Vec<Vec<u8>> = (0..points)
        .map(|i| {
            let key = base.with_r(grid.point(i)).unwrap();
            let mut ct = encrypt(&key, Mode::Strict, input).unwrap();
            ct.truncate(16);
            ct
        })
        .collect();
    let mut expected = Vec::new();
    for i in 0..outputs.len() {
        for j in i + 1..outputs.len() {
            if outputs[i] == outputs[j] {
                expected.push((grid.point(i as u64), grid.point(j as u64)));
            }
        }
    }
    assert_eq!(report.equivalent_pairs(), expected.as_slice());
    assert_eq!(report.identifiable(), expected.is_empty());
}

#[test]
fn attack_on_grids_excluding_the_key_finds_almost_nothing() {
    // Ten random instances; the searched window is shifted off the true
    // key's value, so a five-byte prefix should essentially never match.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut spurious_total = 0usize;
    for _ in 0..10 {
        let r = rng.gen_range(3_650_000_000u64..=3_950_000_000) as f64 / 1e9;
        let x0 = rng.gen_range(0.05..0.95);
        let key = CipherKey::new(r, x0, 3, 4, HillKey::new([[2, 1], [1, 1]]).unwrap()).unwrap();
        let plaintext: Vec<u8> = (0..64).map(|_| rng.gen_range(32u8..127)).collect();
        let ciphertext = encrypt(&key, Mode::Strict, &plaintext).unwrap();

        // 2,000 points starting half a step away from the true value.
        let r_min = key.r() + 0.5e-6;
        let grid = KeyGrid::new(r_min, r_min + 1_999.0 * 1e-6, 1e-6).unwrap();
        let result = known_plaintext_attack(
            &ciphertext,
            &plaintext[..5],
            &PublicParams::from_key(&key),
            Mode::Strict,
            &grid,
        )
        .unwrap();
        assert_eq!(result.searched(), 2000);
        spurious_total += result.candidates().len();
    }
    assert!(
        spurious_total < 10,
        "expected near-zero spurious candidates, got {spurious_total}"
    );
}

#[test]
fn coarse_grid_attack_completes_and_reports_timing() {
    let key = fixed_key();
    let plaintext = b"timed coarse sweep";
    let ciphertext = encrypt(&key, Mode::Strict, plaintext).unwrap();
    let grid = KeyGrid::full_region(1e-4).unwrap();
    let result = known_plaintext_attack(
        &ciphertext,
        &plaintext[..5],
        &PublicParams::from_key(&key),
        Mode::Strict,
        &grid,
    )
    .unwrap();
    assert_eq!(result.searched(), 4301);
    assert!(result.elapsed() > Duration::ZERO);
}
