use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{dot_parity, DensityMatrix, C64, DENSITY_TOL};
use crate::{Error, Result};

pub const DEFAULT_QUBIT_CAP: u32 = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Holder {
    Alice,
    Bob,
    Channel,
    Eve,
}

impl fmt::Display for Holder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Holder::Alice => "Alice",
            Holder::Bob => "Bob",
            Holder::Channel => "Channel",
            Holder::Eve => "Eve",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: u32,
    pub holder: Holder,
}

impl Register {
    pub fn new(name: impl Into<String>, width: u32, holder: Holder) -> Self {
        Self {
            name: name.into(),
            width,
            holder,
        }
    }

    fn max_value(&self) -> u64 {
        (1u64 << self.width) - 1
    }
}

/// Bit position and mask of one register inside the basis index.
#[derive(Debug, Clone, Copy)]
struct Slot {
    pos: usize,
    shift: u32,
    width: u32,
}

impl Slot {
    #[inline]
    fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.shift
    }

    #[inline]
    fn value(&self, idx: usize) -> u64 {
        ((idx & self.mask()) >> self.shift) as u64
    }
}

/// Pure state over an ordered, dynamic set of registers.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    layout: Vec<Register>,
    amps: Vec<C64>,
    cap: u32,
}

impl CompositeState {
    /// Basis state `|v_1⟩|v_2⟩…` over `layout`, with the default cap.
    pub fn basis(layout: Vec<Register>, values: &[u64]) -> Result<Self> {
        Self::basis_with_cap(layout, values, DEFAULT_QUBIT_CAP)
    }

    pub fn basis_with_cap(layout: Vec<Register>, values: &[u64], cap: u32) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::WidthMismatch {
                what: "register assignment".into(),
                expected: layout.len() as u64,
                got: values.len() as u64,
            });
        }
        let mut seen = HashSet::new();
        let mut total = 0u32;
        for reg in &layout {
            if reg.width == 0 {
                return Err(Error::ZeroWidth(reg.name.clone()));
            }
            if !seen.insert(reg.name.as_str()) {
                return Err(Error::DuplicateRegister(reg.name.clone()));
            }
            total += reg.width;
        }
        check_cap(total, cap, &layout)?;
        let mut index = 0usize;
        for (reg, &v) in layout.iter().zip(values) {
            if v > reg.max_value() {
                return Err(Error::ValueOutOfRange {
                    what: reg.name.clone(),
                    value: v,
                    width: reg.width,
                });
            }
            index = (index << reg.width) | v as usize;
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << total];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { layout, amps, cap })
    }

    /// Build from raw amplitudes; the vector is normalized.
    pub fn from_amplitudes(layout: Vec<Register>, amps: Vec<C64>) -> Result<Self> {
        let zeros = vec![0; layout.len()];
        let mut s = Self::basis(layout, &zeros)?;
        if amps.len() != s.amps.len() {
            return Err(Error::DimensionMismatch(s.amps.len(), amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidConfig("zero state vector".into()));
        }
        s.amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(s)
    }

    pub fn layout(&self) -> &[Register] {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn total_width(&self) -> u32 {
        self.layout.iter().map(|r| r.width).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.layout
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn has_register(&self, name: &str) -> bool {
        self.layout.iter().any(|r| r.name == name)
    }

    pub fn set_holder(&mut self, name: &str, holder: Holder) -> Result<()> {
        let pos = self.slot(name)?.pos;
        self.layout[pos].holder = holder;
        Ok(())
    }

    fn slot(&self, name: &str) -> Result<Slot> {
        let mut shift = 0u32;
        for (pos, reg) in self.layout.iter().enumerate().rev() {
            if reg.name == name {
                return Ok(Slot {
                    pos,
                    shift,
                    width: reg.width,
                });
            }
            shift += reg.width;
        }
        Err(Error::UnknownRegister(name.to_string()))
    }

    /// Append `|0⟩` on a new register (least significant position).
    pub fn add_register(&mut self, reg: Register) -> Result<()> {
        if reg.width == 0 {
            return Err(Error::ZeroWidth(reg.name));
        }
        if self.has_register(&reg.name) {
            return Err(Error::DuplicateRegister(reg.name));
        }
        let mut layout = self.layout.clone();
        layout.push(reg);
        check_cap(self.total_width() + layout.last().unwrap().width, self.cap, &layout)?;
        let w = layout.last().unwrap().width;
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len() << w];
        for (i, a) in self.amps.iter().enumerate() {
            amps[i << w] = *a;
        }
        self.layout = layout;
        self.amps = amps;
        Ok(())
    }

    /// `H^{⊗w}` on the target register.
    pub fn apply_hadamard_layer(&mut self, target: &str) -> Result<()> {
        let slot = self.slot(target)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for q in 0..slot.width {
            let bit = 1usize << (slot.shift + q);
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    let a = self.amps[i];
                    let b = self.amps[i | bit];
                    self.amps[i] = (a + b) * s;
                    self.amps[i | bit] = (a - b) * s;
                }
            }
        }
        Ok(())
    }

    /// `Z^x`: the amplitude of `|m⟩` on the target picks up `(-1)^{x·m}`.
    pub fn apply_phase_flip(&mut self, target: &str, x: u64) -> Result<()> {
        let slot = self.slot(target)?;
        check_fits(target, x, slot.width)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if dot_parity(x, slot.value(i)) {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// `X^x`: `|m⟩ ↦ |m ⊕ x⟩` on the target.
    pub fn apply_bit_flip(&mut self, target: &str, x: u64) -> Result<()> {
        let slot = self.slot(target)?;
        check_fits(target, x, slot.width)?;
        let flip = (x as usize) << slot.shift;
        for i in 0..self.amps.len() {
            let j = i ^ flip;
            if i < j {
                self.amps.swap(i, j);
            }
        }
        Ok(())
    }

    /// `|m⟩_src |y⟩_dst ↦ |m⟩_src |y ⊕ table[m] ⊕ pad⟩_dst`.
    ///
    /// The map permutes basis indices, so it is exactly unitary and applying
    /// it twice with the same arguments restores the state bit for bit.
    pub fn apply_xor_oracle(&mut self, src: &str, dst: &str, table: &[u64], pad: u64) -> Result<()> {
        if src == dst {
            return Err(Error::InvalidConfig(format!(
                "oracle source and destination are both `{src}`"
            )));
        }
        let s = self.slot(src)?;
        let d = self.slot(dst)?;
        let expected = 1usize << s.width;
        if table.len() != expected {
            return Err(Error::IncompleteTable {
                expected,
                got: table.len(),
            });
        }
        for &v in table {
            check_fits(dst, v, d.width)?;
        }
        check_fits(dst, pad, d.width)?;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let m = s.value(i) as usize;
            let j = i ^ (((table[m] ^ pad) as usize) << d.shift);
            out[j] = *a;
        }
        self.amps = out;
        Ok(())
    }

    /// Outcome probabilities of a computational-basis measurement.
    pub fn register_probabilities(&self, target: &str) -> Result<Vec<f64>> {
        let slot = self.slot(target)?;
        let mut probs = vec![0.0; 1usize << slot.width];
        for (i, a) in self.amps.iter().enumerate() {
            probs[slot.value(i) as usize] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Born-rule measurement; the register stays in the layout holding the outcome.
    pub fn measure_register<R: Rng + ?Sized>(&mut self, target: &str, rng: &mut R) -> Result<u64> {
        let probs = self.register_probabilities(target)?;
        let total: f64 = probs.iter().sum();
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = probs.len() - 1;
        for (v, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && *p > 0.0 {
                outcome = v;
                break;
            }
        }
        while probs[outcome] == 0.0 && outcome > 0 {
            outcome -= 1;
        }
        self.project(target, outcome as u64)?;
        Ok(outcome as u64)
    }

    /// Project the target onto `|value⟩` and renormalize.
    pub fn project(&mut self, target: &str, value: u64) -> Result<()> {
        let slot = self.slot(target)?;
        check_fits(target, value, slot.width)?;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if slot.value(i) != value {
                *a = C64::new(0.0, 0.0);
            } else {
                norm += a.norm_sqr();
            }
        }
        if norm == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "projection of `{target}` onto {value} has zero probability"
            )));
        }
        let scale = 1.0 / norm.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(())
    }

    /// Remove a register that is in a product state with the rest.
    pub fn discard_register(&mut self, target: &str) -> Result<()> {
        let slot = self.slot(target)?;
        let rho = self.reduced_density_matrix(&[target])?;
        let purity = rho.purity();
        if purity < 1.0 - DENSITY_TOL {
            return Err(Error::Entangled {
                register: target.to_string(),
                purity,
            });
        }
        let probs = self.register_probabilities(target)?;
        let (v, _) = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("register has at least one value");
        let low_mask = (1usize << slot.shift) - 1;
        let rest_len = self.amps.len() >> slot.width;
        let mut rest = Vec::with_capacity(rest_len);
        for j in 0..rest_len {
            let high = j >> slot.shift;
            let low = j & low_mask;
            let i = (((high << slot.width) | v) << slot.shift) | low;
            rest.push(self.amps[i]);
        }
        let norm = rest.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        rest.iter_mut().for_each(|a| *a /= norm);
        self.layout.remove(slot.pos);
        self.amps = rest;
        Ok(())
    }

    /// Partial trace onto `keep` (kept registers appear in layout order).
    pub fn reduced_density_matrix(&self, keep: &[&str]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let mut kept = Vec::new();
        for name in keep {
            let slot = self.slot(name)?;
            if kept.iter().any(|s: &Slot| s.pos == slot.pos) {
                return Err(Error::DuplicateRegister(name.to_string()));
            }
            kept.push(slot);
        }
        kept.sort_by_key(|s| s.pos);
        let keep_mask: usize = kept.iter().map(|s| s.mask()).fold(0, |a, m| a | m);
        let keep_width: u32 = kept.iter().map(|s| s.width).sum();
        let dim = 1usize << keep_width;
        let trace_dim = self.amps.len() >> keep_width;

        // Gather the state into a dim x trace_dim matrix.
        let mut m = vec![C64::new(0.0, 0.0); dim * trace_dim];
        for (i, a) in self.amps.iter().enumerate() {
            let k = pext(i, keep_mask);
            let t = pext(i, !keep_mask & (self.amps.len() - 1));
            m[k * trace_dim + t] = *a;
        }
        let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            let row_r = &m[r * trace_dim..(r + 1) * trace_dim];
            for c in r..dim {
                let row_c = &m[c * trace_dim..(c + 1) * trace_dim];
                let v: C64 = row_r.iter().zip(row_c).map(|(a, b)| a * b.conj()).sum();
                rho[r * dim + c] = v;
                rho[c * dim + r] = v.conj();
            }
        }
        DensityMatrix::from_entries(dim, rho)
    }
}

/// Extract the bits of `x` selected by `mask` into a dense low-order word.
#[inline]
fn pext(x: usize, mask: usize) -> usize {
    let mut out = 0usize;
    let mut bit = 0;
    let mut m = mask;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if x & low != 0 {
            out |= 1 << bit;
        }
        bit += 1;
        m ^= low;
    }
    out
}

fn check_fits(what: &str, value: u64, width: u32) -> Result<()> {
    if width < 64 && value >> width != 0 {
        return Err(Error::ValueOutOfRange {
            what: what.to_string(),
            value,
            width,
        });
    }
    Ok(())
}

fn check_cap(total: u32, cap: u32, layout: &[Register]) -> Result<()> {
    if total > cap {
        let detail = layout
            .iter()
            .map(|r| format!("{}:{}", r.name, r.width))
            .collect::<Vec<_>>()
            .join(" + ");
        return Err(Error::CapExceeded {
            needed: total,
            cap,
            detail,
        });
    }
    Ok(())
}
