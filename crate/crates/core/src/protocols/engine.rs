//! Stage engines shared by all protocol runners.
//!
//! A stage creates a fresh message register `R1` and carries it through its
//! passes; auxiliary registers are discarded as soon as they are back in a
//! product state (after an uncompute or a measurement).

use super::transcript::{MeasurementRecord, PadSlot, RegisterInfo, TransmissionRecord};
use super::{KeyId, RunContext};
use crate::adversary::EveObservation;
use crate::oracles::{sample_function, sample_pad, sample_permutation, BooleanFunction, BooleanPermutation};
use crate::qstate::{CompositeState, Holder, Register};
use crate::rng::{Role, Stream};
use crate::Result;

const MSG: &str = "R1";

/// A party's view of the authentication functions.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Participant<'k> {
    pub who: Holder,
    /// Function used to tag outgoing registers.
    pub own: &'k BooleanFunction,
    pub own_id: Option<KeyId>,
    /// Function used to strip the counterpart's tags.
    pub peer: &'k BooleanFunction,
}

pub(crate) struct Session<'c> {
    ctx: &'c RunContext,
    alice: Stream,
    bob: Stream,
    eve: Stream,
    nature: Stream,
    snapshots: bool,
    round: usize,
    pub stage: usize,
    /// Round at which an impersonating Eve measures `R1` for her guess.
    pub tap_round: Option<usize>,
    pub rounds: Vec<TransmissionRecord>,
    pub measurements: Vec<MeasurementRecord>,
    pub eve_log: Vec<EveObservation>,
}

impl<'c> Session<'c> {
    pub fn new(ctx: &'c RunContext) -> Self {
        let tree = ctx.seed_tree();
        Self {
            ctx,
            alice: tree.stream(ctx.trial, Role::Alice),
            bob: tree.stream(ctx.trial, Role::Bob),
            eve: tree.stream(ctx.trial, Role::Eve),
            nature: tree.stream(ctx.trial, Role::Nature),
            snapshots: ctx.params.snapshots || ctx.attack.forces_snapshots(),
            round: 0,
            stage: 0,
            tap_round: None,
            rounds: Vec::new(),
            measurements: Vec::new(),
            eve_log: Vec::new(),
        }
    }

    fn rng(&mut self, who: Holder) -> &mut Stream {
        match who {
            Holder::Alice => &mut self.alice,
            Holder::Bob => &mut self.bob,
            Holder::Eve | Holder::Channel => &mut self.eve,
        }
    }

    fn draw_permutation(&mut self, who: Holder, n: u32) -> Result<BooleanPermutation> {
        let drawn = sample_permutation(n, self.rng(who))?;
        let fixed = match who {
            Holder::Alice => self.ctx.fixed_f_a.as_ref(),
            Holder::Bob => self.ctx.fixed_f_b.as_ref(),
            _ => None,
        };
        Ok(match fixed {
            Some(p) if p.width() == n => p.clone(),
            _ => drawn,
        })
    }

    fn draw_pad(&mut self, who: Holder, l: u32, label: String) -> Result<(u64, PadSlot)> {
        let drawn = sample_pad(l, self.rng(who))?.value;
        let slot = PadSlot::new(self.stage, label);
        let value = self.ctx.pad_overrides.get(&slot).copied().unwrap_or(drawn);
        Ok((value, slot))
    }

    /// Eve's stand-ins for the two preshared functions she lacks.
    pub fn guess_keys(&mut self, width: u32, l: u32) -> Result<(BooleanFunction, BooleanFunction)> {
        let own = sample_function(width, l, &mut self.eve)?;
        let peer = sample_function(width, l, &mut self.eve)?;
        Ok((own, peer))
    }

    fn transmit(
        &mut self,
        state: &mut CompositeState,
        from: Holder,
        to: Holder,
        registers: &[&str],
        pad: Option<PadSlot>,
        key: Option<KeyId>,
    ) -> Result<()> {
        self.round += 1;
        let round = self.round;
        for r in registers {
            state.set_holder(r, Holder::Channel)?;
        }
        let snapshot = if self.snapshots {
            Some(state.reduced_density_matrix(registers)?)
        } else {
            None
        };
        let observed = self
            .ctx
            .attack
            .intercept(round, state, registers, MSG, &mut self.nature)?;
        self.eve_log.extend(observed);
        if self.tap_round == Some(round) {
            let outcome = state.measure_register(MSG, &mut self.nature)?;
            self.eve_log.push(EveObservation {
                round,
                register: MSG.to_string(),
                outcome,
            });
        }
        let mut infos = Vec::with_capacity(registers.len());
        for r in registers {
            state.set_holder(r, to)?;
            infos.push(RegisterInfo {
                name: r.to_string(),
                width: state.register(r)?.width,
            });
        }
        self.rounds.push(TransmissionRecord {
            round,
            stage: self.stage,
            from,
            to,
            registers: infos,
            snapshot,
            pad,
            key,
        });
        Ok(())
    }

    fn measure(&mut self, state: &mut CompositeState, register: &str, owner: Holder) -> Result<u64> {
        let outcome = state.measure_register(register, &mut self.nature)?;
        self.measurements.push(MeasurementRecord {
            stage: self.stage,
            after_round: self.round,
            register: register.to_string(),
            outcome,
            owner,
        });
        Ok(outcome)
    }

    /// Strip a tag with `f`, measure the pad left behind and drop the register.
    fn strip_and_measure(
        &mut self,
        state: &mut CompositeState,
        register: &str,
        f: &BooleanFunction,
        owner: Holder,
    ) -> Result<u64> {
        state.apply_xor_oracle(MSG, register, f.table(), 0)?;
        let pad = self.measure(state, register, owner)?;
        state.discard_register(register)?;
        Ok(pad)
    }

    fn decode(&mut self, state: &mut CompositeState, owner: Holder) -> Result<u64> {
        state.apply_hadamard_layer(MSG)?;
        self.measure(state, MSG, owner)
    }

    fn fresh_message(&self, holder: Holder, n: u32, value: u64) -> Result<CompositeState> {
        CompositeState::basis_with_cap(
            vec![Register::new(MSG, n, holder)],
            &[value],
            self.ctx.params.qubit_cap,
        )
    }

    /// Three passes, permutations only.
    pub fn basic_stage(&mut self, sender: Holder, receiver: Holder, x: u64, n: u32) -> Result<u64> {
        self.stage += 1;
        let mut st = self.fresh_message(sender, n, x)?;
        st.apply_hadamard_layer(MSG)?;
        st.add_register(Register::new("R2", n, sender))?;
        let f_s = self.draw_permutation(sender, n)?;
        st.apply_xor_oracle(MSG, "R2", f_s.table(), 0)?;
        self.transmit(&mut st, sender, receiver, &[MSG], None, None)?;

        st.add_register(Register::new("R3", n, receiver))?;
        let f_r = self.draw_permutation(receiver, n)?;
        st.apply_xor_oracle(MSG, "R3", f_r.table(), 0)?;
        self.transmit(&mut st, receiver, sender, &[MSG], None, None)?;

        st.apply_xor_oracle(MSG, "R2", f_s.table(), 0)?;
        st.discard_register("R2")?;
        self.transmit(&mut st, sender, receiver, &[MSG], None, None)?;

        st.apply_xor_oracle(MSG, "R3", f_r.table(), 0)?;
        st.discard_register("R3")?;
        self.decode(&mut st, receiver)
    }

    /// Three passes with masked tags `s(m) ⊕ r` riding along `R1`.
    pub fn keyed_three_pass(
        &mut self,
        s: &Participant<'_>,
        r: &Participant<'_>,
        x: u64,
        n: u32,
        l: u32,
    ) -> Result<u64> {
        self.stage += 1;
        let (sl, rl) = (initial(s.who), initial(r.who));
        let mut st = self.fresh_message(s.who, n, x)?;
        st.apply_hadamard_layer(MSG)?;
        st.add_register(Register::new("R2", n, s.who))?;
        let f_s = self.draw_permutation(s.who, n)?;
        st.apply_xor_oracle(MSG, "R2", f_s.table(), 0)?;
        st.add_register(Register::new("R3", l, s.who))?;
        let (pad, slot) = self.draw_pad(s.who, l, format!("r_{sl}"))?;
        st.apply_xor_oracle(MSG, "R3", s.own.table(), pad)?;
        self.transmit(&mut st, s.who, r.who, &[MSG, "R3"], Some(slot), s.own_id)?;

        self.strip_and_measure(&mut st, "R3", r.peer, r.who)?;
        st.add_register(Register::new("R4", n, r.who))?;
        let f_r = self.draw_permutation(r.who, n)?;
        st.apply_xor_oracle(MSG, "R4", f_r.table(), 0)?;
        st.add_register(Register::new("R5", l, r.who))?;
        let (pad, slot) = self.draw_pad(r.who, l, format!("r_{rl}"))?;
        st.apply_xor_oracle(MSG, "R5", r.own.table(), pad)?;
        self.transmit(&mut st, r.who, s.who, &[MSG, "R5"], Some(slot), r.own_id)?;

        st.apply_xor_oracle(MSG, "R2", f_s.table(), 0)?;
        st.discard_register("R2")?;
        self.strip_and_measure(&mut st, "R5", s.peer, s.who)?;
        st.add_register(Register::new("R6", l, s.who))?;
        let (pad, slot) = self.draw_pad(s.who, l, format!("r_{sl}'"))?;
        st.apply_xor_oracle(MSG, "R6", s.own.table(), pad)?;
        self.transmit(&mut st, s.who, r.who, &[MSG, "R6"], Some(slot), s.own_id)?;

        st.apply_xor_oracle(MSG, "R4", f_r.table(), 0)?;
        st.discard_register("R4")?;
        self.strip_and_measure(&mut st, "R6", r.peer, r.who)?;
        self.decode(&mut st, r.who)
    }

    /// Two passes initiated by the receiver; the sender writes `x` as `Z^x`.
    pub fn keyed_two_pass(
        &mut self,
        s: &Participant<'_>,
        r: &Participant<'_>,
        x: u64,
        n: u32,
        l: u32,
    ) -> Result<u64> {
        self.stage += 1;
        let (sl, rl) = (initial(s.who), initial(r.who));
        let mut st = self.fresh_message(r.who, n, 0)?;
        st.apply_hadamard_layer(MSG)?;
        st.add_register(Register::new("R2", n, r.who))?;
        let f_r = self.draw_permutation(r.who, n)?;
        st.apply_xor_oracle(MSG, "R2", f_r.table(), 0)?;
        st.add_register(Register::new("R3", l, r.who))?;
        let (pad, slot) = self.draw_pad(r.who, l, format!("r_{rl}"))?;
        st.apply_xor_oracle(MSG, "R3", r.own.table(), pad)?;
        self.transmit(&mut st, r.who, s.who, &[MSG, "R3"], Some(slot), r.own_id)?;

        self.strip_and_measure(&mut st, "R3", s.peer, s.who)?;
        st.apply_phase_flip(MSG, x)?;
        st.add_register(Register::new("R4", l, s.who))?;
        let (pad, slot) = self.draw_pad(s.who, l, format!("r_{sl}"))?;
        st.apply_xor_oracle(MSG, "R4", s.own.table(), pad)?;
        self.transmit(&mut st, s.who, r.who, &[MSG, "R4"], Some(slot), s.own_id)?;

        self.strip_and_measure(&mut st, "R4", r.peer, r.who)?;
        st.apply_xor_oracle(MSG, "R2", f_r.table(), 0)?;
        st.discard_register("R2")?;
        self.decode(&mut st, r.who)
    }

    /// A single tagged pass with no interaction.
    pub fn one_pass(
        &mut self,
        s: &Participant<'_>,
        r: &Participant<'_>,
        x: u64,
        n: u32,
        l: u32,
    ) -> Result<u64> {
        self.stage += 1;
        let mut st = self.fresh_message(s.who, n, x)?;
        st.apply_hadamard_layer(MSG)?;
        st.add_register(Register::new("R2", l, s.who))?;
        let (pad, slot) = self.draw_pad(s.who, l, format!("r_{}", initial(s.who)))?;
        st.apply_xor_oracle(MSG, "R2", s.own.table(), pad)?;
        self.transmit(&mut st, s.who, r.who, &[MSG, "R2"], Some(slot), s.own_id)?;

        self.strip_and_measure(&mut st, "R2", r.peer, r.who)?;
        self.decode(&mut st, r.who)
    }
}

fn initial(who: Holder) -> char {
    match who {
        Holder::Alice => 'A',
        Holder::Bob => 'B',
        Holder::Eve => 'E',
        Holder::Channel => 'C',
    }
}
