//! Arithmetic in GF(2^t) for 1 ≤ t ≤ 16.

use crate::{Error, Result};

/// Reduction polynomials, indexed by `t`, including the leading `z^t` term.
///
/// | t | polynomial |
/// |---|------------|
/// | 1 | z + 1 |
/// | 2 | z² + z + 1 |
/// | 3 | z³ + z + 1 |
/// | 4 | z⁴ + z + 1 |
/// | 5 | z⁵ + z² + 1 |
/// | 6 | z⁶ + z + 1 |
/// | 7 | z⁷ + z + 1 |
/// | 8 | z⁸ + z⁴ + z³ + z + 1 |
/// | 9 | z⁹ + z⁴ + 1 |
/// | 10 | z¹⁰ + z³ + 1 |
/// | 11 | z¹¹ + z² + 1 |
/// | 12 | z¹² + z³ + 1 |
/// | 13 | z¹³ + z⁴ + z³ + z + 1 |
/// | 14 | z¹⁴ + z⁵ + 1 |
/// | 15 | z¹⁵ + z + 1 |
/// | 16 | z¹⁶ + z⁵ + z³ + z + 1 |
pub const REDUCTION_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x211, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b,
];

pub const MAX_FIELD_WIDTH: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2t {
    width: u32,
    poly: u32,
}

impl Gf2t {
    pub fn new(width: u32) -> Result<Self> {
        if !(1..=MAX_FIELD_WIDTH).contains(&width) {
            return Err(Error::InvalidWidth {
                what: "MAC tag width",
                width,
                min: 1,
                max: MAX_FIELD_WIDTH,
            });
        }
        Ok(Self {
            width,
            poly: REDUCTION_POLYS[width as usize],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn order(&self) -> u32 {
        1 << self.width
    }

    /// Carry-less product followed by polynomial reduction.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.order() && b < self.order());
        let mut prod = clmul(a, b);
        for bit in (self.width..2 * self.width).rev() {
            if prod >> bit & 1 == 1 {
                prod ^= (self.poly as u64) << (bit - self.width);
            }
        }
        prod as u32
    }

    pub fn pow(&self, a: u32, mut e: u32) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn clmul(a: u32, b: u32) -> u64 {
    let mut out = 0u64;
    for i in 0..32 {
        if b >> i & 1 == 1 {
            out ^= (a as u64) << i;
        }
    }
    out
}
