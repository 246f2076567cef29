//! Fixed-width byte/symbol packing and stripe planning.

use crate::error::CliError;

/// Bits carried by one symbol of GF(q): `floor(log2 q)`.
pub fn bits_per_symbol(q: u32) -> u32 {
    31 - q.leading_zeros()
}

/// Reads `bytes` as a little-endian bitstream and cuts it into `w`-bit
/// symbols. The last symbol is zero-padded.
pub fn pack(bytes: &[u8], w: u32) -> Vec<u16> {
    assert!((1..=16).contains(&w));
    let total = bytes.len() * 8;
    let mut out = Vec::with_capacity(total.div_ceil(w as usize));
    let (mut acc, mut have) = (0u32, 0u32);
    for &b in bytes {
        acc |= (b as u32) << have;
        have += 8;
        while have >= w {
            out.push((acc & ((1 << w) - 1)) as u16);
            acc >>= w;
            have -= w;
        }
    }
    if have > 0 {
        out.push(acc as u16);
    }
    out
}

/// Inverse of [`pack`]; returns the first `len` bytes.
pub fn unpack(symbols: &[u16], w: u32, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    let (mut acc, mut have) = (0u32, 0u32);
    for &s in symbols {
        if out.len() == len {
            break;
        }
        acc |= ((s as u32) & ((1 << w) - 1)) << have;
        have += w;
        while have >= 8 && out.len() < len {
            out.push(acc as u8);
            acc >>= 8;
            have -= 8;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripePlan {
    pub symbols_per_stripe: usize,
    pub stripe_count: usize,
    /// Zero symbols appended after the packed file.
    pub padding_symbols: usize,
}

impl StripePlan {
    /// An empty input still gets one stripe.
    pub fn new(packed: usize, symbols_per_stripe: usize) -> Result<Self, CliError> {
        if symbols_per_stripe == 0 {
            return Err(CliError::NoCapacity);
        }
        let stripe_count = packed.div_ceil(symbols_per_stripe).max(1);
        Ok(StripePlan {
            symbols_per_stripe,
            stripe_count,
            padding_symbols: stripe_count * symbols_per_stripe - packed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn widths() {
        assert_eq!(bits_per_symbol(3), 1);
        assert_eq!(bits_per_symbol(11), 3);
        assert_eq!(bits_per_symbol(17), 4);
        assert_eq!(bits_per_symbol(65521), 15);
    }

    #[test]
    fn round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for w in 1..=15 {
            for len in [0usize, 1, 2, 3, 7, 100] {
                let bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
                let syms = pack(&bytes, w);
                assert_eq!(syms.len(), (len * 8).div_ceil(w as usize));
                assert!(syms.iter().all(|&s| (s as u32) < 1 << w));
                assert_eq!(unpack(&syms, w, len), bytes);
            }
        }
    }

    #[test]
    fn known_bits() {
        assert_eq!(pack(&[0b1011_0110], 3), vec![0b110, 0b110, 0b10]);
    }

    #[test]
    fn plans() {
        assert_eq!(
            StripePlan::new(0, 40).unwrap(),
            StripePlan {
                symbols_per_stripe: 40,
                stripe_count: 1,
                padding_symbols: 40
            }
        );
        assert_eq!(StripePlan::new(80, 40).unwrap().stripe_count, 2);
        assert_eq!(StripePlan::new(81, 40).unwrap().padding_symbols, 39);
        assert!(StripePlan::new(1, 0).is_err());
    }
}
