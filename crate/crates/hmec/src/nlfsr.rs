//! Invertible byte substitution built from an 8-bit nonlinear feedback
//! shift register.
//!
//! A byte is loaded into the register (bit `i` of the byte in cell `b_i`),
//! the register is clocked exactly eight times, and the final contents are
//! the substituted byte. Each clock shifts toward `b0`, dropping the
//! outgoing bit, and feeds
//!
//! ```text
//! f(b7…b0) = b0 ⊕ (b1 ∧ b2) ⊕ (b4 ∧ b6) ⊕ b3
//! ```
//!
//! into `b7`. Because `f` XORs the outgoing bit `b0`, every clock is a
//! bijection on the 256 register states, so the eight-step substitution is
//! a permutation of the byte alphabet and can be run backwards.

/// The fixed, public register description: 8 cells, 8 clocks per byte, and
/// the feedback function above.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NlfsrSpec;

impl NlfsrSpec {
    /// Register width in bits.
    pub const WIDTH: u32 = 8;
    /// Clocks applied per substituted byte.
    pub const STEPS: u32 = 8;

    /// Substitute one byte: load, clock [`Self::STEPS`] times, read out.
    pub fn substitute(&self, byte: u8) -> u8 {
        let mut state = byte;
        for _ in 0..Self::STEPS {
            state = Self::step(state);
        }
        state
    }

    /// Inverse permutation of [`Self::substitute`].
    pub fn inverse(&self, byte: u8) -> u8 {
        let mut state = byte;
        for _ in 0..Self::STEPS {
            state = Self::step_back(state);
        }
        state
    }

    fn feedback(state: u8) -> u8 {
        let bit = |i: u8| (state >> i) & 1;
        bit(0) ^ (bit(1) & bit(2)) ^ (bit(4) & bit(6)) ^ bit(3)
    }

    fn step(state: u8) -> u8 {
        (state >> 1) | (Self::feedback(state) << 7)
    }

    fn step_back(state: u8) -> u8 {
        // The previous state's bits 1..=7 sit in our bits 0..=6 and our
        // bit 7 holds f(previous); XOR-ing out the non-b0 feedback terms
        // recovers the dropped bit.
        let bit = |i: u8| (state >> i) & 1;
        let b0 = bit(7) ^ (bit(0) & bit(1)) ^ (bit(3) & bit(5)) ^ bit(2);
        (state << 1) | b0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reference: simulate the register on a vector of bits
    /// instead of packed-byte shifts.
    fn reference_substitute(byte: u8) -> u8 {
        let mut bits: Vec<u8> = (0..8).map(|i| (byte >> i) & 1).collect();
        for _ in 0..8 {
            let f = bits[0] ^ (bits[1] & bits[2]) ^ (bits[4] & bits[6]) ^ bits[3];
            bits.remove(0);
            bits.push(f);
        }
        bits.iter()
            .enumerate()
            .fold(0u8, |acc, (i, bit)| acc | (bit << i))
    }

    #[test]
    fn all_zero_state_is_fixed() {
        let s = NlfsrSpec;
        assert_eq!(s.substitute(0x00), 0x00);
        assert_eq!(s.inverse(0x00), 0x00);
    }

    #[test]
    fn spot_values_match_the_enumeration_oracle() {
        // Frozen from the bit-vector reference simulation.
        let s = NlfsrSpec;
        assert_eq!(s.substitute(0x01), 0x21);
        assert_eq!(s.substitute(0x48), 0xB5);
        assert_eq!(s.substitute(0x5A), 0x94);
        assert_eq!(s.substitute(0x7F), 0x8E);
        assert_eq!(s.substitute(0x80), 0x90);
        assert_eq!(s.substitute(0xFF), 0x1C);
        assert_eq!(s.inverse(0x21), 0x01);
    }

    #[test]
    fn matches_the_reference_simulation_everywhere() {
        let s = NlfsrSpec;
        for b in 0..=255u8 {
            assert_eq!(s.substitute(b), reference_substitute(b), "byte {b:#04x}");
        }
    }

    #[test]
    fn substitution_is_a_permutation() {
        let s = NlfsrSpec;
        let mut seen = [false; 256];
        for b in 0..=255u8 {
            seen[s.substitute(b) as usize] = true;
        }
        assert!(seen.iter().all(|&hit| hit));
    }

    #[test]
    fn inverse_undoes_substitute_exhaustively() {
        let s = NlfsrSpec;
        for b in 0..=255u8 {
            assert_eq!(s.inverse(s.substitute(b)), b);
            assert_eq!(s.substitute(s.inverse(b)), b);
        }
    }
}
