//! Truth-table oracles: Boolean permutations, Boolean functions and pads.
//!
//! Tables are sampled from an explicit stream, so a `(seed, widths)` pair
//! always reproduces the same table.

mod table_file;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use table_file::{parse_table_file, write_table_file, TableFile};

use crate::{Error, Result};

/// Largest input or output width a table may have.
pub const TABLE_WIDTH_CAP: u32 = 22;
/// Default bound on the size of an exhaustive enumeration.
pub const DEFAULT_ENUM_LIMIT: u64 = 1 << 16;

fn check_width(what: &'static str, width: u32) -> Result<()> {
    if !(1..=TABLE_WIDTH_CAP).contains(&width) {
        return Err(Error::InvalidWidth {
            what,
            width,
            min: 1,
            max: TABLE_WIDTH_CAP,
        });
    }
    Ok(())
}

/// A bijection on `n`-bit strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct BooleanPermutation {
    n: u32,
    table: Vec<u64>,
}

/// A map from `n`-bit strings to `l`-bit strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct BooleanFunction {
    n: u32,
    l: u32,
    table: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    n: u32,
    l: u32,
    table: Vec<u64>,
}

impl BooleanPermutation {
    pub fn new(n: u32, table: Vec<u64>) -> Result<Self> {
        check_width("permutation width", n)?;
        let size = 1usize << n;
        if table.len() != size {
            return Err(Error::IncompleteTable {
                expected: size,
                got: table.len(),
            });
        }
        let mut seen = vec![false; size];
        for &v in &table {
            if v >= size as u64 {
                return Err(Error::ValueOutOfRange {
                    what: "permutation entry".into(),
                    value: v,
                    width: n,
                });
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::NotPermutation(v));
            }
        }
        Ok(Self { n, table })
    }

    pub fn identity(n: u32) -> Result<Self> {
        Self::new(n, (0..1u64 << n).collect())
    }

    pub fn width(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn apply(&self, m: u64) -> u64 {
        self.table[m as usize]
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        self.table
            .iter()
            .all(|&v| (v as usize) < seen.len() && !std::mem::replace(&mut seen[v as usize], true))
    }
}

impl BooleanFunction {
    pub fn new(n: u32, l: u32, table: Vec<u64>) -> Result<Self> {
        check_width("function input width", n)?;
        check_width("function output width", l)?;
        let size = 1usize << n;
        if table.len() != size {
            return Err(Error::IncompleteTable {
                expected: size,
                got: table.len(),
            });
        }
        if let Some(&v) = table.iter().find(|&&v| v >> l != 0) {
            return Err(Error::ValueOutOfRange {
                what: "function entry".into(),
                value: v,
                width: l,
            });
        }
        Ok(Self { n, l, table })
    }

    pub fn input_width(&self) -> u32 {
        self.n
    }

    pub fn output_width(&self) -> u32 {
        self.l
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn apply(&self, m: u64) -> u64 {
        self.table[m as usize]
    }
}

impl From<BooleanPermutation> for RawTable {
    fn from(p: BooleanPermutation) -> Self {
        RawTable {
            n: p.n,
            l: p.n,
            table: p.table,
        }
    }
}

impl TryFrom<RawTable> for BooleanPermutation {
    type Error = Error;
    fn try_from(raw: RawTable) -> Result<Self> {
        if raw.l != raw.n {
            return Err(Error::WidthMismatch {
                what: "permutation output width".into(),
                expected: raw.n as u64,
                got: raw.l as u64,
            });
        }
        BooleanPermutation::new(raw.n, raw.table)
    }
}

impl From<BooleanFunction> for RawTable {
    fn from(f: BooleanFunction) -> Self {
        RawTable {
            n: f.n,
            l: f.l,
            table: f.table,
        }
    }
}

impl TryFrom<RawTable> for BooleanFunction {
    type Error = Error;
    fn try_from(raw: RawTable) -> Result<Self> {
        BooleanFunction::new(raw.n, raw.l, raw.table)
    }
}

/// A uniform `l`-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pad {
    pub l: u32,
    pub value: u64,
}

impl Pad {
    pub fn new(l: u32, value: u64) -> Result<Self> {
        check_width("pad width", l)?;
        if value >> l != 0 {
            return Err(Error::ValueOutOfRange {
                what: "pad".into(),
                value,
                width: l,
            });
        }
        Ok(Self { l, value })
    }
}

/// Uniform permutation of `[0, 2^n)` by Fisher–Yates.
pub fn sample_permutation<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<BooleanPermutation> {
    check_width("permutation width", n)?;
    let mut table: Vec<u64> = (0..1u64 << n).collect();
    for i in (1..table.len()).rev() {
        let j = rng.gen_range(0..=i);
        table.swap(i, j);
    }
    Ok(BooleanPermutation { n, table })
}

pub fn sample_function<R: Rng + ?Sized>(n: u32, l: u32, rng: &mut R) -> Result<BooleanFunction> {
    check_width("function input width", n)?;
    check_width("function output width", l)?;
    let table = (0..1usize << n).map(|_| rng.gen_range(0..1u64 << l)).collect();
    Ok(BooleanFunction { n, l, table })
}

pub fn sample_pad<R: Rng + ?Sized>(l: u32, rng: &mut R) -> Result<Pad> {
    check_width("pad width", l)?;
    Ok(Pad {
        l,
        value: rng.gen_range(0..1u64 << l),
    })
}

pub(crate) fn check_limit(log2_count: u128, limit: u64) -> Result<()> {
    // Counts are powers of two; compare exponents to avoid overflow.
    let fits = log2_count < 127 && (1u128 << log2_count) <= limit as u128;
    if !fits {
        let count = if log2_count < 128 { 1u128 << log2_count } else { u128::MAX };
        return Err(Error::EnumerationLimit {
            count,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// All `2^l` pads in increasing order.
pub fn enumerate_pads(l: u32, limit: u64) -> Result<impl Iterator<Item = Pad>> {
    check_width("pad width", l)?;
    check_limit(l as u128, limit)?;
    Ok((0..1u64 << l).map(move |value| Pad { l, value }))
}

/// Number of Boolean functions `{0,1}^n → {0,1}^l`, as a power of two exponent.
pub fn function_count_log2(n: u32, l: u32) -> u128 {
    (l as u128) << n
}

/// All `2^(l·2^n)` functions in lexicographic order of their tables
/// (`table[0]` varies slowest).
pub fn enumerate_functions(n: u32, l: u32, limit: u64) -> Result<FunctionIter> {
    check_width("function input width", n)?;
    check_width("function output width", l)?;
    check_limit(function_count_log2(n, l), limit)?;
    Ok(FunctionIter {
        n,
        l,
        next: Some(vec![0; 1usize << n]),
    })
}

#[derive(Debug, Clone)]
pub struct FunctionIter {
    n: u32,
    l: u32,
    next: Option<Vec<u64>>,
}

impl Iterator for FunctionIter {
    type Item = BooleanFunction;

    fn next(&mut self) -> Option<BooleanFunction> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let top = (1u64 << self.l) - 1;
        let mut carry = true;
        for v in succ.iter_mut().rev() {
            if *v == top {
                *v = 0;
            } else {
                *v += 1;
                carry = false;
                break;
            }
        }
        if !carry {
            self.next = Some(succ);
        }
        Some(BooleanFunction {
            n: self.n,
            l: self.l,
            table: current,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn permutation_validation() {
        assert!(BooleanPermutation::new(2, vec![0, 1, 2, 3]).is_ok());
        assert!(matches!(
            BooleanPermutation::new(2, vec![0, 1, 1, 3]),
            Err(Error::NotPermutation(1))
        ));
        assert!(matches!(
            BooleanPermutation::new(2, vec![0, 1, 2]),
            Err(Error::IncompleteTable { .. })
        ));
        assert!(BooleanPermutation::new(2, vec![0, 1, 2, 4]).is_err());
    }

    #[test]
    fn sample_permutation_is_bijective_and_seeded() {
        let mut r = rng::stream(9);
        for n in 1..=8 {
            for _ in 0..25 {
                assert!(sample_permutation(n, &mut r).unwrap().is_bijection());
            }
        }
        let a = sample_permutation(5, &mut rng::stream(11)).unwrap();
        let b = sample_permutation(5, &mut rng::stream(11)).unwrap();
        assert_eq!(a, b);
        assert!(sample_permutation(TABLE_WIDTH_CAP + 1, &mut r).is_err());
        assert!(sample_permutation(0, &mut r).is_err());
    }

    #[test]
    fn single_bit_permutations_are_balanced() {
        // S₂ = {id, swap}: each has probability 1/2.
        let trials = 10_000;
        let mut r = rng::stream(21);
        let swaps = (0..trials)
            .filter(|_| sample_permutation(1, &mut r).unwrap().table() == [1, 0])
            .count();
        let p = swaps as f64 / trials as f64;
        assert!((p - 0.5).abs() <= 3.0 * (0.25f64 / trials as f64).sqrt(), "p = {p}");
    }

    #[test]
    fn first_entry_chi_square() {
        let draws = 40_000;
        let mut r = rng::stream(5);
        let mut counts = [0f64; 4];
        for _ in 0..draws {
            counts[sample_permutation(2, &mut r).unwrap().apply(0) as usize] += 1.0;
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        let critical = ChiSquared::new(3.0).unwrap().inverse_cdf(0.999);
        assert!(chi2 < critical, "chi2 = {chi2}, critical = {critical}");
    }

    #[test]
    fn function_bits_are_fair() {
        let trials = 10_000;
        let mut r = rng::stream(33);
        let mut ones = [0usize; 4];
        for _ in 0..trials {
            let f = sample_function(2, 1, &mut r).unwrap();
            for (m, c) in ones.iter_mut().enumerate() {
                *c += f.apply(m as u64) as usize;
            }
        }
        let sigma = (0.25f64 / trials as f64).sqrt();
        for c in ones {
            assert!((c as f64 / trials as f64 - 0.5).abs() <= 3.0 * sigma);
        }
        assert_eq!(
            sample_function(3, 2, &mut rng::stream(2)).unwrap(),
            sample_function(3, 2, &mut rng::stream(2)).unwrap()
        );
    }

    #[test]
    fn zero_width_pad_is_rejected() {
        assert!(sample_pad(0, &mut rng::stream(0)).is_err());
        assert!(Pad::new(2, 4).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let pads: Vec<u64> = enumerate_pads(2, DEFAULT_ENUM_LIMIT).unwrap().map(|p| p.value).collect();
        assert_eq!(pads, vec![0, 1, 2, 3]);

        let funcs: Vec<_> = enumerate_functions(2, 1, DEFAULT_ENUM_LIMIT).unwrap().collect();
        assert_eq!(funcs.len(), 16);
        assert_eq!(funcs[0].table(), [0, 0, 0, 0]);
        assert_eq!(funcs[1].table(), [0, 0, 0, 1]);
        assert_eq!(funcs[15].table(), [1, 1, 1, 1]);
        let mut sorted = funcs.iter().map(|f| f.table().to_vec()).collect::<Vec<_>>();
        sorted.dedup();
        assert_eq!(sorted.len(), 16);

        // The limit is inclusive: 2^(2·8) = 2^16 is allowed, 2^(3·8) is not.
        assert_eq!(enumerate_functions(3, 2, DEFAULT_ENUM_LIMIT).unwrap().count(), 1 << 16);
        match enumerate_functions(3, 3, DEFAULT_ENUM_LIMIT) {
            Err(Error::EnumerationLimit { count, limit }) => {
                assert_eq!(count, 1 << 24);
                assert_eq!(limit, 1 << 16);
            }
            other => panic!("expected limit error, got {other:?}"),
        }
    }
}
