//! 2×2 Hill cipher over the alphabet Z/128.
//!
//! Blocks of two 7-bit symbols are multiplied by the key matrix mod 128.
//! A key matrix is invertible iff its determinant is odd (the units mod
//! 2⁷ are exactly the odd residues), which the constructor enforces, so
//! [`HillKey::inverse`] never fails.

use thiserror::Error;

/// Alphabet size of the Hill stage. Symbols are 7-bit values.
pub const ALPHABET_SIZE: u16 = 128;

/// Hill block size in symbols.
pub const BLOCK_SIZE: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum HillError {
    /// Determinant even, hence not a unit mod 128.
    #[error("hill matrix determinant {det} is even and not invertible mod {ALPHABET_SIZE}")]
    NonInvertible { det: u8 },
    /// Block symbol outside the 7-bit alphabet.
    #[error("block symbol {0} is outside the alphabet [0, {ALPHABET_SIZE})")]
    SymbolOutOfRange(u8),
}

/// Invertible 2×2 matrix over Z/128.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HillKey {
    k: [[u8; 2]; 2],
}

impl HillKey {
    /// Builds a key from row-major entries, reducing them mod 128.
    /// Fails when the reduced determinant is even.
    pub fn new(entries: [[u8; 2]; 2]) -> Result<Self, HillError> {
        let k = entries.map(|row| row.map(|e| e % 128));
        let det = Self::det_of(&k);
        if det % 2 == 0 {
            return Err(HillError::NonInvertible { det });
        }
        Ok(Self { k })
    }

    pub fn identity() -> Self {
        Self {
            k: [[1, 0], [0, 1]],
        }
    }

    /// Row-major entries, each in `[0, 128)`.
    pub fn entries(&self) -> [[u8; 2]; 2] {
        self.k
    }

    /// Determinant mod 128; odd by construction.
    pub fn det(&self) -> u8 {
        Self::det_of(&self.k)
    }

    fn det_of(k: &[[u8; 2]; 2]) -> u8 {
        let d = k[0][0] as i32 * k[1][1] as i32 - k[0][1] as i32 * k[1][0] as i32;
        d.rem_euclid(ALPHABET_SIZE as i32) as u8
    }

    /// Modular inverse: `inv_det · adj(K) mod 128`, with `K·K⁻¹ ≡ I`.
    pub fn inverse(&self) -> HillKey {
        let det = self.det() as i32;
        let det_inv = (0..ALPHABET_SIZE as i32)
            .find(|cand| (det * cand).rem_euclid(ALPHABET_SIZE as i32) == 1)
            .expect("odd determinants are units mod 128");
        let adj = [
            [self.k[1][1] as i32, -(self.k[0][1] as i32)],
            [-(self.k[1][0] as i32), self.k[0][0] as i32],
        ];
        let k = adj.map(|row| row.map(|e| (e * det_inv).rem_euclid(ALPHABET_SIZE as i32) as u8));
        Self { k }
    }

    /// `(K·p) mod 128` componentwise. Rejects symbols outside the alphabet.
    pub fn encrypt_block(&self, block: [u8; 2]) -> Result<[u8; 2], HillError> {
        for &p in &block {
            if p >= ALPHABET_SIZE as u8 {
                return Err(HillError::SymbolOutOfRange(p));
            }
        }
        let p0 = block[0] as i32;
        let p1 = block[1] as i32;
        let m = ALPHABET_SIZE as i32;
        Ok([
            ((self.k[0][0] as i32 * p0 + self.k[0][1] as i32 * p1).rem_euclid(m)) as u8,
            ((self.k[1][0] as i32 * p0 + self.k[1][1] as i32 * p1).rem_euclid(m)) as u8,
        ])
    }

    /// Inverse of [`HillKey::encrypt_block`]: multiply by `K⁻¹` mod 128.
    pub fn decrypt_block(&self, block: [u8; 2]) -> Result<[u8; 2], HillError> {
        self.inverse().encrypt_block(block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_fixes_every_block() {
        let k = HillKey::identity();
        assert_eq!(k.encrypt_block([72, 73]).unwrap(), [72, 73]);
    }

    #[test]
    fn shear_matrix_adds_mod_128() {
        let k = HillKey::new([[1, 1], [0, 1]]).unwrap();
        assert_eq!(k.encrypt_block([65, 66]).unwrap(), [3, 66]);
    }

    #[test]
    fn zero_vector_is_fixed() {
        let k = HillKey::new([[3, 3], [2, 5]]).unwrap(); // det 9, odd
        assert_eq!(k.encrypt_block([0, 0]).unwrap(), [0, 0]);
    }

    #[test]
    fn symbols_outside_the_alphabet_are_rejected() {
        let k = HillKey::identity();
        assert_eq!(
            k.encrypt_block([128, 0]),
            Err(HillError::SymbolOutOfRange(128))
        );
        assert_eq!(
            k.encrypt_block([5, 255]),
            Err(HillError::SymbolOutOfRange(255))
        );
    }

    #[test]
    fn even_determinant_is_rejected() {
        assert_eq!(
            HillKey::new([[2, 0], [0, 2]]),
            Err(HillError::NonInvertible { det: 4 })
        );
        assert_eq!(
            HillKey::new([[1, 1], [1, 1]]),
            Err(HillError::NonInvertible { det: 0 })
        );
    }

    #[test]
    fn constructor_reduces_entries_mod_128() {
        let k = HillKey::new([[129, 0], [0, 129]]).unwrap();
        assert_eq!(k.entries(), [[1, 0], [0, 1]]);
    }

    #[test]
    fn inverse_matches_hand_computations() {
        assert_eq!(HillKey::identity().inverse(), HillKey::identity());
        let k = HillKey::new([[1, 1], [0, 1]]).unwrap();
        assert_eq!(k.inverse().entries(), [[1, 127], [0, 1]]);
        let k = HillKey::new([[2, 1], [1, 1]]).unwrap(); // det 1
        assert_eq!(k.inverse().entries(), [[1, 127], [127, 2]]);
    }

    #[test]
    fn inverse_multiplies_back_to_identity() {
        let k = HillKey::new([[2, 1], [1, 1]]).unwrap();
        let inv = k.inverse();
        // K·K⁻¹ applied to the basis vectors gives the basis back.
        assert_eq!(
            inv.encrypt_block(k.encrypt_block([1, 0]).unwrap()).unwrap(),
            [1, 0]
        );
        assert_eq!(
            inv.encrypt_block(k.encrypt_block([0, 1]).unwrap()).unwrap(),
            [0, 1]
        );
    }

    fn odd_det_key() -> impl Strategy<Value = HillKey> {
        (0u8..128, 0u8..128, 0u8..128, 0u8..128)
            .prop_filter_map("determinant must be odd", |(a, b, c, d)| {
                HillKey::new([[a, b], [c, d]]).ok()
            })
    }

    proptest! {
        #[test]
        fn decrypt_inverts_encrypt(key in odd_det_key(), p0 in 0u8..128, p1 in 0u8..128) {
            let c = key.encrypt_block([p0, p1]).unwrap();
            let back = key.inverse().encrypt_block(c).unwrap();
            prop_assert_eq!(back, [p0, p1]);
        }

        #[test]
        fn inverse_of_inverse_is_the_key(key in odd_det_key()) {
            prop_assert_eq!(key.inverse().inverse(), key);
        }
    }
}
