//! Dense statevector simulation.
//!
//! Amplitude `x` belongs to basis state `|x⟩` where bit `i` of `x` is the value
//! of qubit `i`. States are exact up to double-precision rounding; MCZ is a
//! single diagonal sweep rather than a decomposition.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::{BitString, Counts};
use crate::error::{Error, Result};
use crate::seed;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Ry { target: usize, angle: f64 },
    X(usize),
    H(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    /// Phase −1 on the all-ones subspace of the listed qubits.
    Mcz(Vec<usize>),
    // Error injections. Same unitaries as X/Z (and Y), kept distinct so a
    // circuit can tell a scheduled gate from a fault.
    PauliX(usize),
    PauliY(usize),
    PauliZ(usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Ry { target, .. } => vec![*target],
            Gate::X(q) | Gate::H(q) | Gate::Z(q) => vec![*q],
            Gate::PauliX(q) | Gate::PauliY(q) | Gate::PauliZ(q) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Mcz(qs) => qs.clone(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            Gate::Cnot { .. } => 2,
            Gate::Mcz(qs) => qs.len(),
            _ => 1,
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Ry { target, angle } => Gate::Ry {
                target: *target,
                angle: -angle,
            },
            other => other.clone(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.is_empty() {
            return Err(Error::InvalidGate("gate acts on no qubits".into()));
        }
        for (i, &q) in qs.iter().enumerate() {
            if q >= n {
                return Err(Error::InvalidGate(format!(
                    "{self:?}: qubit {q} out of range for {n} qubits"
                )));
            }
            if qs[..i].contains(&q) {
                return Err(Error::InvalidGate(format!("{self:?}: repeated qubit {q}")));
            }
        }
        if let Gate::Ry { angle, .. } = self {
            if !angle.is_finite() {
                return Err(Error::InvalidGate(format!("non-finite Ry angle {angle}")));
            }
        }
        Ok(())
    }
}

/// An ordered gate list over `n` qubits.
///
/// Barriers split the list into blocks for depth accounting: gates never move
/// across a barrier when the circuit is layered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    barriers: Vec<usize>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            n,
            gates: Vec::new(),
            barriers: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Synchronizes all qubits before the next gate.
    pub fn barrier(&mut self) -> &mut Self {
        if self.barriers.last() != Some(&self.gates.len()) {
            self.barriers.push(self.gates.len());
        }
        self
    }

    /// Appends `other`, keeping its barriers and adding one at the seam.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: other.n,
            });
        }
        self.barrier();
        let offset = self.gates.len();
        self.gates.extend(other.gates.iter().cloned());
        for &b in &other.barriers {
            if b > 0 && self.barriers.last() != Some(&(b + offset)) {
                self.barriers.push(b + offset);
            }
        }
        Ok(self)
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    /// Layered depth with every gate costing one layer.
    pub fn depth(&self) -> usize {
        self.depth_with(|_| 1)
    }

    /// Layered depth where gate `g` occupies `cost(g)` consecutive layers on
    /// all of its qubits. Gates are scheduled as early as their qubits allow
    /// within a barrier block.
    pub fn depth_with(&self, cost: impl Fn(&Gate) -> usize) -> usize {
        let mut frontier = vec![0usize; self.n];
        let mut barriers = self.barriers.iter().peekable();
        for (i, gate) in self.gates.iter().enumerate() {
            while barriers.next_if(|&&b| b <= i).is_some() {
                let level = frontier.iter().copied().max().unwrap_or(0);
                frontier.fill(level);
            }
            let qs = gate.qubits();
            let start = qs.iter().map(|&q| frontier[q]).max().unwrap_or(0);
            let end = start + cost(gate);
            for q in qs {
                frontier[q] = end;
            }
        }
        frontier.into_iter().max().unwrap_or(0)
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("qubit count must be at least 1".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "{n} qubits exceeds simulator limit of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        Self::basis(&BitString::zeros(n)?)
    }

    pub fn basis(bits: &BitString) -> Result<Self> {
        let n = bits.len();
        check_qubits(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[bits.index() as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {} is not 2^n with n ≥ 1",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(Self { n, amps })
    }

    /// Uniform superposition over all basis states.
    pub fn uniform(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let a = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Ok(Self {
            n,
            amps: vec![a; 1 << n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        match *gate {
            Gate::Ry { target, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                self.for_pairs(target, |a0, a1| {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = x0 * c - x1 * s;
                    *a1 = x0 * s + x1 * c;
                });
            }
            Gate::H(q) => self.for_pairs(q, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = (x0 + x1) * FRAC_1_SQRT_2;
                *a1 = (x0 - x1) * FRAC_1_SQRT_2;
            }),
            Gate::X(q) | Gate::PauliX(q) => self.for_pairs(q, std::mem::swap),
            Gate::PauliY(q) => self.for_pairs(q, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = Complex64::new(x1.im, -x1.re);
                *a1 = Complex64::new(-x0.im, x0.re);
            }),
            Gate::Z(q) | Gate::PauliZ(q) => {
                let mask = 1usize << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amps.swap(i, i | tmask);
                    }
                }
            }
            Gate::Mcz(ref qs) => {
                let mask = qs.iter().fold(0usize, |m, &q| m | (1 << q));
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
        }
    }

    /// Calls `f(a0, a1)` for every amplitude pair differing only in `qubit`.
    #[inline]
    fn for_pairs(&mut self, qubit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                f(a0, a1);
            }
        }
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: circuit.n(),
            });
        }
        for g in circuit.gates() {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability(&self, bits: &BitString) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: bits.len(),
            });
        }
        Ok(self.amps[bits.index() as usize].norm_sqr())
    }

    /// Multinomial draw of `shots` outcomes, reproducible from `rng_seed`.
    pub fn sample(&self, shots: u64, rng_seed: u64) -> Result<Counts> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let sampler = Sampler::new(&self.probabilities());
        let mut rng = seed::rng(rng_seed);
        let mut hist = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            hist[sampler.draw(rng.gen())] += 1;
        }
        Ok(histogram_to_counts(&hist, self.n))
    }
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

pub(crate) fn histogram_to_counts(hist: &[u64], n: usize) -> Counts {
    hist.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (BitString::new(i as u64, n).expect("index fits"), c))
        .collect()
}

/// Inverse-CDF sampler over basis-state indices.
#[derive(Clone, Debug)]
pub(crate) struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub(crate) fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cdf }
    }

    /// Maps a uniform `u ∈ [0, 1)` to an index.
    #[inline]
    pub(crate) fn draw(&self, u: f64) -> usize {
        let total = *self.cdf.last().expect("non-empty");
        let target = u * total;
        self.cdf
            .partition_point(|&c| c <= target)
            .min(self.cdf.len() - 1)
    }
}
