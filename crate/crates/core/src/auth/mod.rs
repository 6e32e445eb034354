//! One-time polynomial MAC over GF(2^t).
//!
//! A key `(a, b)` authenticates one message. The message is encoded as a
//! block sequence `L_1 … L_k x_1 … x_d`, where the `L` blocks hold the bit
//! length in base `2^t` (most significant first, no leading zero block) and
//! the `x` blocks are the message bits, first bit first, with the last
//! block zero-padded. The tag is
//!
//! ```text
//! e_(a,b)(x) = c_1·a^D ⊕ c_2·a^(D−1) ⊕ … ⊕ c_D·a ⊕ b
//! ```
//!
//! over the encoded blocks `c_1 … c_D`. Two distinct messages collide under a
//! substitution `δ` for at most `D/2^t` of the keys.

pub mod gf;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use gf::Gf2t;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MacKey {
    pub t: u32,
    pub a: u32,
    pub b: u32,
}

impl MacKey {
    pub fn new(t: u32, a: u32, b: u32) -> Result<Self> {
        let field = Gf2t::new(t)?;
        for (name, v) in [("a", a), ("b", b)] {
            if v >= field.order() {
                return Err(Error::ValueOutOfRange {
                    what: format!("MAC key component {name}"),
                    value: v as u64,
                    width: t,
                });
            }
        }
        Ok(Self { t, a, b })
    }
}

/// A bit string of `len` bits; bit `len−1` of `bits` is the first bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub bits: u64,
    pub len: u32,
}

impl Message {
    pub fn new(bits: u64, len: u32) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyMessage);
        }
        if len > 64 {
            return Err(Error::InvalidWidth {
                what: "message length",
                width: len,
                min: 1,
                max: 64,
            });
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::ValueOutOfRange {
                what: "message".into(),
                value: bits,
                width: len,
            });
        }
        Ok(Self { bits, len })
    }
}

pub fn mac_keygen<R: Rng + ?Sized>(t: u32, rng: &mut R) -> Result<MacKey> {
    let field = Gf2t::new(t)?;
    let a = rng.gen_range(0..field.order());
    let b = rng.gen_range(0..field.order());
    Ok(MacKey { t, a, b })
}

/// Every key for width `t`, ordered by `(a, b)`.
pub fn enumerate_keys(t: u32) -> Result<impl Iterator<Item = MacKey>> {
    let q = Gf2t::new(t)?.order();
    Ok((0..q).flat_map(move |a| (0..q).map(move |b| MacKey { t, a, b })))
}

/// Length-prefixed block encoding of a message.
pub fn encode_blocks(t: u32, msg: &Message) -> Vec<u32> {
    let mask = (1u64 << t) - 1;
    let mut len_blocks = Vec::new();
    let mut len = msg.len as u64;
    while len > 0 {
        len_blocks.push((len & mask) as u32);
        len >>= t;
    }
    len_blocks.reverse();

    let d = msg.len.div_ceil(t);
    let padded_len = d * t;
    // Left-align the message in a padded_len-bit window.
    let padded = (msg.bits as u128) << (padded_len - msg.len);
    let data = (0..d).map(|i| {
        let shift = padded_len - (i + 1) * t;
        ((padded >> shift) as u64 & mask) as u32
    });
    len_blocks.into_iter().chain(data).collect()
}

/// `c_1·a^D ⊕ … ⊕ c_D·a ⊕ b` over raw blocks.
pub fn poly_tag(key: &MacKey, blocks: &[u32]) -> Result<u32> {
    if blocks.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let field = Gf2t::new(key.t)?;
    let mut acc = 0;
    for &c in blocks {
        if c >= field.order() {
            return Err(Error::ValueOutOfRange {
                what: "MAC block".into(),
                value: c as u64,
                width: key.t,
            });
        }
        acc = field.mul(acc ^ c, key.a);
    }
    Ok(acc ^ key.b)
}

pub fn mac_tag(key: &MacKey, msg: &Message) -> Result<u32> {
    poly_tag(key, &encode_blocks(key.t, msg))
}

pub fn mac_verify(key: &MacKey, msg: &Message, tag: u32) -> Result<bool> {
    Ok(mac_tag(key, msg)? == tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn degenerate_multipliers() {
        let key = MacKey::new(4, 0, 0x9).unwrap();
        for x in 0..16 {
            assert_eq!(mac_tag(&key, &Message::new(x, 4).unwrap()).unwrap(), 0x9);
        }
        let key = MacKey::new(4, 1, 0x6).unwrap();
        for x in 0..16 {
            assert_eq!(poly_tag(&key, &[x]).unwrap(), x ^ 0x6);
        }
    }

    #[test]
    fn gf16_single_block_reference() {
        // 0x3 · 0x5 in GF(16)/(z⁴+z+1) by shift-and-reduce: 0x5<<1 = 0xa, ⊕ 0x5 = 0xf.
        let key = MacKey::new(4, 0x3, 0x7).unwrap();
        assert_eq!(poly_tag(&key, &[0x5]).unwrap(), 0xf ^ 0x7);
    }

    #[test]
    fn block_encoding() {
        assert_eq!(encode_blocks(3, &Message::new(0b10, 2).unwrap()), vec![2, 0b100]);
        assert_eq!(encode_blocks(3, &Message::new(0b101, 3).unwrap()), vec![3, 0b101]);
        assert_eq!(encode_blocks(3, &Message::new(0b1011, 4).unwrap()), vec![4, 0b101, 0b100]);
        assert_eq!(encode_blocks(1, &Message::new(0b10, 2).unwrap()), vec![1, 0, 1, 0]);
        // Leading zero bits still count toward the length.
        assert_ne!(
            encode_blocks(4, &Message::new(1, 1).unwrap()),
            encode_blocks(4, &Message::new(1, 2).unwrap())
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(Message::new(0, 0), Err(Error::EmptyMessage)));
        assert!(poly_tag(&MacKey::new(3, 1, 1).unwrap(), &[]).is_err());
        assert!(mac_keygen(0, &mut rng::stream(0)).is_err());
        assert!(mac_keygen(17, &mut rng::stream(0)).is_err());
        assert!(MacKey::new(3, 8, 0).is_err());
    }

    #[test]
    fn keygen_is_seeded_and_uniform() {
        assert_eq!(
            mac_keygen(5, &mut rng::stream(4)).unwrap(),
            mac_keygen(5, &mut rng::stream(4)).unwrap()
        );
        let k = mac_keygen(1, &mut rng::stream(4)).unwrap();
        assert!(k.a < 2 && k.b < 2);

        let trials = 10_000;
        let mut r = rng::stream(12);
        let mut counts = [0usize; 64];
        for _ in 0..trials {
            let k = mac_keygen(3, &mut r).unwrap();
            counts[(k.a * 8 + k.b) as usize] += 1;
        }
        let p = 1.0 / 64.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for c in counts {
            assert!((c as f64 / trials as f64 - p).abs() <= 3.0 * sigma + 1e-12, "count {c}");
        }
    }

    #[test]
    fn verify_accepts_own_tags_exhaustively() {
        for t in 1..=4 {
            for key in enumerate_keys(t).unwrap() {
                for len in 1..=6 {
                    for x in 0..1u64 << len {
                        let msg = Message::new(x, len).unwrap();
                        let tag = mac_tag(&key, &msg).unwrap();
                        assert!(tag < 1 << t);
                        assert!(mac_verify(&key, &msg, tag).unwrap());
                    }
                }
            }
        }
    }
}
