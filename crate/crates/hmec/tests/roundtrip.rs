//! Randomized round-trip and stream-shape properties of the full cipher
//! pipeline, plus the pinned golden vectors.

use hmec::cipher::{decrypt, decrypt_exact, encrypt, CipherKey, Mode};
use hmec::hill::HillKey;
use proptest::prelude::*;

fn arbitrary_key() -> impl Strategy<Value = CipherKey> {
    (
        3_570_000_000u64..=4_000_000_000,
        1u64..1_000_000_000,
        1u32..=16,
        1u32..=16,
        (0u8..128, 0u8..128, 0u8..128, 0u8..128),
    )
        .prop_filter_map("hill determinant must be odd", |(rn, xn, n1, n2, k)| {
            let hill = HillKey::new([[k.0, k.1], [k.2, k.3]]).ok()?;
            CipherKey::new(rn as f64 / 1e9, xn as f64 / 1e9, n1, n2, hill).ok()
        })
}

proptest! {
    #[test]
    fn lenient_round_trip_is_identity(
        key in arbitrary_key(),
        plaintext in prop::collection::vec(any::<u8>(), 0..2048),
    ) {
        let ciphertext = encrypt(&key, Mode::Lenient, &plaintext).unwrap();
        prop_assert_eq!(ciphertext.len(), plaintext.len().next_multiple_of(2) * 2);
        let recovered = decrypt_exact(&key, Mode::Lenient, &ciphertext, plaintext.len()).unwrap();
        prop_assert_eq!(recovered, plaintext);
    }

    #[test]
    fn strict_round_trip_is_identity(
        key in arbitrary_key(),
        plaintext in prop::collection::vec(0u8..128, 0..2048),
    ) {
        let ciphertext = encrypt(&key, Mode::Strict, &plaintext).unwrap();
        prop_assert_eq!(ciphertext.len(), plaintext.len().next_multiple_of(2));
        let recovered = decrypt_exact(&key, Mode::Strict, &ciphertext, plaintext.len()).unwrap();
        prop_assert_eq!(recovered, plaintext);
    }

    #[test]
    fn padded_decrypt_extends_with_zeros_only(
        key in arbitrary_key(),
        plaintext in prop::collection::vec(0u8..128, 0..512),
    ) {
        let ciphertext = encrypt(&key, Mode::Strict, &plaintext).unwrap();
        let padded = decrypt(&key, Mode::Strict, &ciphertext).unwrap();
        prop_assert_eq!(&padded[..plaintext.len()], plaintext.as_slice());
        prop_assert!(padded[plaintext.len()..].iter().all(|&b| b == 0));
    }
}

#[test]
fn golden_vectors_stay_pinned() {
    let key = CipherKey::new(
        3.912345678,
        0.5,
        3,
        4,
        HillKey::new([[1, 1], [0, 1]]).unwrap(),
    )
    .unwrap();
    let strict = encrypt(&key, Mode::Strict, b"HELLO").unwrap();
    assert_eq!(strict, [0x92, 0x8E, 0xE6, 0xF1, 0x01, 0x00]);
    let lenient = encrypt(&key, Mode::Lenient, b"HELLO").unwrap();
    assert_eq!(
        lenient,
        [0x29, 0x3E, 0xD9, 0x63, 0x4D, 0xBA, 0xE5, 0xB6, 0x0F, 0x8E, 0x78, 0x97]
    );
    assert_eq!(
        decrypt_exact(&key, Mode::Strict, &strict, 5).unwrap(),
        b"HELLO"
    );
    assert_eq!(
        decrypt_exact(&key, Mode::Lenient, &lenient, 5).unwrap(),
        b"HELLO"
    );
}

#[test]
fn repeated_byte_ciphertext_has_no_dominant_value() {
    // 1 KiB of one repeated byte must not leave a visible pattern: no
    // ciphertext value may account for more than 5% of the stream.
    let key = CipherKey::new(
        3.912345678,
        0.5,
        3,
        4,
        HillKey::new([[1, 1], [0, 1]]).unwrap(),
    )
    .unwrap();
    for mode in [Mode::Strict, Mode::Lenient] {
        let plaintext = vec![b'e'; 1024];
        let ciphertext = encrypt(&key, mode, &plaintext).unwrap();
        let mut histogram = [0usize; 256];
        for &b in &ciphertext {
            histogram[b as usize] += 1;
        }
        let worst = histogram.iter().max().copied().unwrap();
        assert!(
            (worst as f64) <= 0.05 * ciphertext.len() as f64,
            "a ciphertext byte value occurs {worst} times in {} ({mode:?})",
            ciphertext.len()
        );
    }
}
