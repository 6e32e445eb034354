//! Plain-text truth tables.
//!
//! ```text
//! n=3 l=3 perm=true
//! 5
//! 0
//! ...
//! ```
//!
//! The header names the widths; permutations carry `l=n` and `perm=true`.
//! Each following line is one table entry in lowercase hex, in input order.

use super::{BooleanFunction, BooleanPermutation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableFile {
    Permutation(BooleanPermutation),
    Function(BooleanFunction),
}

impl TableFile {
    pub fn into_permutation(self) -> Result<BooleanPermutation> {
        match self {
            TableFile::Permutation(p) => Ok(p),
            TableFile::Function(f) => BooleanPermutation::new(f.input_width(), f.table().to_vec())
                .and_then(|p| {
                    if f.output_width() == f.input_width() {
                        Ok(p)
                    } else {
                        Err(Error::Parse("table is not a permutation".into()))
                    }
                }),
        }
    }

    pub fn into_function(self) -> BooleanFunction {
        match self {
            TableFile::Function(f) => f,
            TableFile::Permutation(p) => BooleanFunction {
                n: p.n,
                l: p.n,
                table: p.table,
            },
        }
    }
}

pub fn write_table_file(table: &TableFile) -> String {
    let (header, entries) = match table {
        TableFile::Permutation(p) => (format!("n={} l={} perm=true", p.n, p.n), p.table()),
        TableFile::Function(f) => (format!("n={} l={}", f.n, f.l), f.table()),
    };
    let mut out = header;
    out.push('\n');
    for v in entries {
        out.push_str(&format!("{v:x}\n"));
    }
    out
}

pub fn parse_table_file(text: &str) -> Result<TableFile> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty table file".into()))?;
    let (mut n, mut l, mut perm) = (None, None, false);
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
        match key {
            "n" => n = Some(parse_dec(value)?),
            "l" => l = Some(parse_dec(value)?),
            "perm" => {
                perm = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(Error::Parse(format!("bad perm flag `{value}`"))),
                }
            }
            _ => return Err(Error::Parse(format!("unknown header field `{key}`"))),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("header lacks n=".into()))?;
    let l = l.ok_or_else(|| Error::Parse("header lacks l=".into()))?;
    let table = lines
        .map(|line| {
            if line.chars().any(|c| c.is_ascii_uppercase()) {
                return Err(Error::Parse(format!("entry `{line}` is not lowercase hex")));
            }
            u64::from_str_radix(line, 16).map_err(|e| Error::Parse(format!("entry `{line}`: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if perm {
        if l != n {
            return Err(Error::Parse(format!("permutation header has l={l} != n={n}")));
        }
        Ok(TableFile::Permutation(BooleanPermutation::new(n, table)?))
    } else {
        Ok(TableFile::Function(BooleanFunction::new(n, l, table)?))
    }
}

fn parse_dec(s: &str) -> Result<u32> {
    s.parse().map_err(|_| Error::Parse(format!("bad width `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{sample_function, sample_permutation};
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn exact_layout() {
        let p = BooleanPermutation::new(2, vec![3, 0, 2, 1]).unwrap();
        assert_eq!(write_table_file(&TableFile::Permutation(p)), "n=2 l=2 perm=true\n3\n0\n2\n1\n");
        let f = BooleanFunction::new(1, 4, vec![0xa, 0xf]).unwrap();
        assert_eq!(write_table_file(&TableFile::Function(f)), "n=1 l=4\na\nf\n");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_table_file("").is_err());
        assert!(parse_table_file("n=1 l=1\n0\n").is_err());
        assert!(parse_table_file("n=1 l=1 perm=true\n0\n0\n").is_err());
        assert!(parse_table_file("n=1 l=4\nA\n0\n").is_err());
        assert!(parse_table_file("n=1 l=2 perm=true\n0\n1\n").is_err());
        assert!(parse_table_file("n=1 q=2\n0\n1\n").is_err());
    }

    proptest! {
        #[test]
        fn tables_survive_the_file_format(seed in any::<u64>(), n in 1u32..6, l in 1u32..9) {
            let mut r = rng::stream(seed);
            let p = TableFile::Permutation(sample_permutation(n, &mut r).unwrap());
            prop_assert_eq!(parse_table_file(&write_table_file(&p)).unwrap(), p);
            let f = TableFile::Function(sample_function(n, l, &mut r).unwrap());
            prop_assert_eq!(parse_table_file(&write_table_file(&f)).unwrap(), f);
        }
    }
}
