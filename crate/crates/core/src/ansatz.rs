//! Real-amplitude ansatz: three `Ry` layers separated by two linear CNOT chains.
//!
//! ```text
//! q0: ─Ry(θ0)──●──────────Ry(θ3)──●──────────Ry(θ6)─
//! q1: ─Ry(θ1)──X──●───────Ry(θ4)──X──●───────Ry(θ7)─
//! q2: ─Ry(θ2)─────X───────Ry(θ5)─────X───────Ry(θ8)─
//! ```
//!
//! Parameters are layer-major and qubit-ascending within a layer. Every gate
//! has a real matrix, so the prepared amplitudes are real.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::statevector::{Circuit, Gate, StateVector};

pub const ROTATION_LAYERS: usize = 3;
pub const ENTANGLING_LAYERS: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    n: usize,
    theta: Vec<f64>,
}

impl AnsatzParams {
    pub fn new(n: usize, theta: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("ansatz needs at least one qubit".into()));
        }
        if theta.len() != ROTATION_LAYERS * n {
            return Err(Error::Dimension {
                expected: ROTATION_LAYERS * n,
                actual: theta.len(),
            });
        }
        Ok(Self { n, theta })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; ROTATION_LAYERS * n])
    }

    /// Each angle uniform in `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let theta = (0..ROTATION_LAYERS * n).map(|_| rng.gen::<f64>() * TAU).collect();
        Self::new(n, theta)
    }

    /// Closed-form assignment preparing `|ω⟩`: first two layers zero, last
    /// layer `π·ω_i`.
    pub fn for_target(target: &BitString) -> Self {
        let n = target.len();
        let mut theta = vec![0.0; ROTATION_LAYERS * n];
        for (i, b) in target.bits().enumerate() {
            if b {
                theta[(ROTATION_LAYERS - 1) * n + i] = PI;
            }
        }
        Self { n, theta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn dimension(&self) -> usize {
        self.theta.len()
    }
}

pub fn parameter_count(n: usize) -> usize {
    ROTATION_LAYERS * n
}

fn cnot_chain(c: &mut Circuit) -> Result<()> {
    for q in 0..c.n().saturating_sub(1) {
        c.push(Gate::Cnot {
            control: q,
            target: q + 1,
        })?;
    }
    Ok(())
}

pub fn build_real_amplitude(params: &AnsatzParams) -> Result<Circuit> {
    let n = params.n;
    let mut c = Circuit::new(n)?;
    for (layer, angles) in params.theta.chunks_exact(n).enumerate() {
        if layer > 0 {
            c.barrier();
            cnot_chain(&mut c)?;
            c.barrier();
        }
        for (q, &angle) in angles.iter().enumerate() {
            c.push(Gate::Ry { target: q, angle })?;
        }
    }
    Ok(c)
}

/// `|ψ(θ)⟩`: the ansatz applied to `|0…0⟩`.
pub fn ansatz_state(params: &AnsatzParams) -> Result<StateVector> {
    let mut s = StateVector::new(params.n)?;
    s.run(&build_real_amplitude(params)?)?;
    Ok(s)
}

/// Layered depth: one per rotation layer plus `n − 1` per CNOT chain.
pub fn ansatz_depth(n: usize) -> usize {
    ROTATION_LAYERS + ENTANGLING_LAYERS * n.saturating_sub(1)
}
