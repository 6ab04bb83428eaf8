//! Stochastic Pauli noise by trajectory sampling.
//!
//! Each shot draws its own fault pattern:
//! - after a 1-qubit gate, with probability `p1`, one of X, Y, Z on its qubit;
//! - after a CNOT, with probability `p2`, one of the 15 non-identity two-qubit
//!   Paulis on its pair;
//! - for an MCZ with `m ≥ 1` controls, `mcz_cnot_cost(m)` independent
//!   two-qubit fault steps, each on a uniformly chosen pair of its qubits;
//! - after measurement, each bit flips with probability `p_ro`.
//!
//! A shot without gate faults is drawn from the ideal output distribution, so
//! the simulator only re-runs the circuit for faulty shots, starting from the
//! nearest stored checkpoint before the first fault. Fault draws and the
//! measurement draw come from separate random streams: with all rates zero
//! the measurement stream is consumed exactly as in
//! [`StateVector::sample`], and results match ideal sampling bit for bit.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::{BitString, Counts};
use crate::error::{Error, Result};
use crate::seed;
use crate::statevector::{histogram_to_counts, Circuit, Gate, Sampler, StateVector};

/// Memory allowed for stored intermediate states per executor.
const CHECKPOINT_BYTES: usize = 64 << 20;
/// Memory allowed for cached faulty-pattern distributions per executor.
const CACHE_BYTES: usize = 64 << 20;

/// `c(m) = 2m²` equivalent CNOTs for `m ≥ 2` controls, `c(1) = 1`.
pub fn quadratic_cnot_cost(controls: usize) -> usize {
    if controls <= 1 {
        1
    } else {
        2 * controls * controls
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub p_ro: f64,
    /// Number of two-qubit fault steps charged to an MCZ, by control count.
    pub mcz_cnot_cost: fn(usize) -> usize,
}

impl NoiseModel {
    pub const DEFAULT_P1: f64 = 1e-3;
    pub const DEFAULT_P2: f64 = 1e-2;
    pub const DEFAULT_P_RO: f64 = 2e-2;

    pub fn new(p1: f64, p2: f64, p_ro: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2), ("p_ro", p_ro)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {p} is not a probability"
                )));
            }
        }
        Ok(Self {
            p1,
            p2,
            p_ro,
            mcz_cnot_cost: quadratic_cnot_cost,
        })
    }

    pub fn noiseless() -> Self {
        Self::new(0.0, 0.0, 0.0).expect("valid")
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p_ro == 0.0
    }

    /// Probability that a shot of `circuit` has no gate fault and no readout flip.
    pub fn survival_probability(&self, circuit: &Circuit) -> f64 {
        let gate_part: f64 = circuit
            .gates()
            .iter()
            .map(|g| match g.num_qubits() {
                1 => 1.0 - self.p1,
                2 if matches!(g, Gate::Cnot { .. }) => 1.0 - self.p2,
                k => (1.0 - self.p2).powi((self.mcz_cnot_cost)(k - 1) as i32),
            })
            .product();
        gate_part * (1.0 - self.p_ro).powi(circuit.n() as i32)
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::new(Self::DEFAULT_P1, Self::DEFAULT_P2, Self::DEFAULT_P_RO).expect("valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Fault {
    /// Index of the gate the fault follows.
    after: u32,
    qubit: u8,
    /// 1 = X, 2 = Y, 3 = Z.
    pauli: u8,
}

impl Fault {
    fn gate(&self) -> Gate {
        let q = self.qubit as usize;
        match self.pauli {
            1 => Gate::PauliX(q),
            2 => Gate::PauliY(q),
            _ => Gate::PauliZ(q),
        }
    }
}

/// Outcome of one noisy shot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shot {
    pub outcome: BitString,
    /// Pauli faults injected during the circuit.
    pub gate_faults: usize,
    pub readout_flips: usize,
}

impl Shot {
    pub fn is_error_free(&self) -> bool {
        self.gate_faults == 0 && self.readout_flips == 0
    }
}

/// Runs noisy shots of one circuit.
pub struct NoisyExecutor<'c> {
    circuit: &'c Circuit,
    model: NoiseModel,
    stride: usize,
    /// `checkpoints[i]` is the ideal state before gate `i · stride`.
    checkpoints: Vec<StateVector>,
    ideal: Sampler,
    cache: HashMap<Vec<Fault>, Sampler>,
    cache_bytes: usize,
    faults: Vec<Fault>,
}

impl<'c> NoisyExecutor<'c> {
    pub fn new(circuit: &'c Circuit, model: NoiseModel) -> Result<Self> {
        NoiseModel::new(model.p1, model.p2, model.p_ro)?;
        let n = circuit.n();
        let state_bytes = 16usize << n;
        let max_checkpoints = (CHECKPOINT_BYTES / state_bytes).max(1);
        let stride = circuit.len().div_ceil(max_checkpoints).max(1);
        let mut state = StateVector::new(n)?;
        let mut checkpoints = Vec::new();
        for (i, g) in circuit.gates().iter().enumerate() {
            if i % stride == 0 {
                checkpoints.push(state.clone());
            }
            state.apply_unchecked(g);
        }
        if checkpoints.is_empty() {
            checkpoints.push(state.clone());
        }
        Ok(Self {
            circuit,
            model,
            stride,
            checkpoints,
            ideal: Sampler::new(&state.probabilities()),
            cache: HashMap::new(),
            cache_bytes: 0,
            faults: Vec::new(),
        })
    }

    fn push_pair_fault(rng: &mut ChaCha8Rng, after: u32, a: usize, b: usize, out: &mut Vec<Fault>) {
        let k: u8 = rng.gen_range(1..16);
        for (q, p) in [(a, k & 3), (b, k >> 2)] {
            if p != 0 {
                out.push(Fault {
                    after,
                    qubit: q as u8,
                    pauli: p,
                });
            }
        }
    }

    fn draw_faults(&mut self, rng: &mut ChaCha8Rng) {
        let NoiseModel {
            p1,
            p2,
            mcz_cnot_cost,
            ..
        } = self.model;
        self.faults.clear();
        for (i, g) in self.circuit.gates().iter().enumerate() {
            let after = i as u32;
            match g {
                Gate::Cnot { control, target } => {
                    if p2 > 0.0 && rng.gen::<f64>() < p2 {
                        Self::push_pair_fault(rng, after, *control, *target, &mut self.faults);
                    }
                }
                Gate::Mcz(qs) if qs.len() >= 2 => {
                    if p2 == 0.0 {
                        continue;
                    }
                    for _ in 0..mcz_cnot_cost(qs.len() - 1) {
                        if rng.gen::<f64>() < p2 {
                            let a = rng.gen_range(0..qs.len());
                            let mut b = rng.gen_range(0..qs.len() - 1);
                            if b >= a {
                                b += 1;
                            }
                            Self::push_pair_fault(rng, after, qs[a], qs[b], &mut self.faults);
                        }
                    }
                }
                _ => {
                    if p1 > 0.0 && rng.gen::<f64>() < p1 {
                        let q = g.qubits()[0];
                        self.faults.push(Fault {
                            after,
                            qubit: q as u8,
                            pauli: rng.gen_range(1..4),
                        });
                    }
                }
            }
        }
    }

    fn faulty_state(&self) -> StateVector {
        let gates = self.circuit.gates();
        let first = self.faults[0].after as usize;
        let cp = first / self.stride;
        let mut state = self.checkpoints[cp].clone();
        let mut pending = self.faults.iter().peekable();
        for (i, g) in gates.iter().enumerate().skip(cp * self.stride) {
            state.apply_unchecked(g);
            while let Some(f) = pending.next_if(|f| f.after as usize == i) {
                state.apply_unchecked(&f.gate());
            }
        }
        state
    }

    /// One trajectory using the given fault and measurement streams.
    pub fn shot(&mut self, noise_rng: &mut ChaCha8Rng, meas_rng: &mut ChaCha8Rng) -> Shot {
        let n = self.circuit.n();
        self.draw_faults(noise_rng);
        let u: f64 = meas_rng.gen();
        let index = if self.faults.is_empty() {
            self.ideal.draw(u)
        } else if let Some(s) = self.cache.get(&self.faults) {
            s.draw(u)
        } else {
            let sampler = Sampler::new(&self.faulty_state().probabilities());
            let index = sampler.draw(u);
            let bytes = 8usize << n;
            if self.cache_bytes + bytes <= CACHE_BYTES {
                self.cache_bytes += bytes;
                self.cache.insert(self.faults.clone(), sampler);
            }
            index
        };
        let mut index = index as u64;
        let mut readout_flips = 0;
        if self.model.p_ro > 0.0 {
            for q in 0..n {
                if noise_rng.gen::<f64>() < self.model.p_ro {
                    index ^= 1 << q;
                    readout_flips += 1;
                }
            }
        }
        Shot {
            outcome: BitString::new(index, n).expect("index fits"),
            gate_faults: self.faults.len(),
            readout_flips,
        }
    }

    /// `shots` trajectories reproducible from `rng_seed`.
    pub fn shots(&mut self, shots: u64, rng_seed: u64) -> Result<Vec<Shot>> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let (mut noise_rng, mut meas_rng) = streams(rng_seed);
        Ok((0..shots)
            .map(|_| self.shot(&mut noise_rng, &mut meas_rng))
            .collect())
    }

    pub fn counts(&mut self, shots: u64, rng_seed: u64) -> Result<Counts> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let (mut noise_rng, mut meas_rng) = streams(rng_seed);
        let mut hist = vec![0u64; 1 << self.circuit.n()];
        for _ in 0..shots {
            hist[self.shot(&mut noise_rng, &mut meas_rng).outcome.index() as usize] += 1;
        }
        Ok(histogram_to_counts(&hist, self.circuit.n()))
    }
}

/// Fault stream and measurement stream for one seed. The measurement stream
/// is the one [`StateVector::sample`] uses.
fn streams(rng_seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut noise = seed::rng(rng_seed);
    noise.set_stream(1);
    (noise, seed::rng(rng_seed))
}

/// A single noisy shot of `circuit` starting from `|0…0⟩`.
pub fn run_noisy_trajectory(circuit: &Circuit, model: &NoiseModel, rng_seed: u64) -> Result<BitString> {
    Ok(NoisyExecutor::new(circuit, *model)?.shots(1, rng_seed)?[0].outcome)
}

pub fn run_noisy_counts(circuit: &Circuit, model: &NoiseModel, shots: u64, rng_seed: u64) -> Result<Counts> {
    NoisyExecutor::new(circuit, *model)?.counts(shots, rng_seed)
}

/// Serializable noise rates, as they appear in configs and records.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRates {
    pub p1: f64,
    pub p2: f64,
    pub p_ro: f64,
}

impl Default for NoiseRates {
    fn default() -> Self {
        Self {
            p1: NoiseModel::DEFAULT_P1,
            p2: NoiseModel::DEFAULT_P2,
            p_ro: NoiseModel::DEFAULT_P_RO,
        }
    }
}

impl NoiseRates {
    pub fn model(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.p1, self.p2, self.p_ro)
    }
}
