//! Grover search baseline with a phase oracle and the standard diffuser.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::Result;
use crate::statevector::{Circuit, Gate, StateVector};

/// Resource guard on the iteration count.
pub const MAX_ITERATIONS: usize = 100_000;

/// `max(1, ⌊(π/4)·√(2^n)⌋)`, capped at [`MAX_ITERATIONS`].
pub fn iteration_count(n: usize) -> usize {
    let k = (FRAC_PI_4 * (2f64).powf(n as f64 / 2.0)).floor();
    (k as usize).clamp(1, MAX_ITERATIONS)
}

/// Closed-form success probability after `k` iterations on `N = 2^n` items.
pub fn success_after(n: usize, k: usize) -> f64 {
    let theta = (2f64).powf(-(n as f64) / 2.0).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Ideal success probability of the default schedule; independent of `ω`.
pub fn grover_success_ideal(n: usize) -> f64 {
    success_after(n, iteration_count(n))
}

/// How a multi-controlled Z is charged in depth reports, by control count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MczDepthCost {
    /// One layer regardless of width.
    Logical,
    /// `8m − 12` layers for `m ≥ 2` controls, a linear stand-in for a
    /// transpiled Toffoli cascade; one layer below that.
    Decomposed,
}

impl MczDepthCost {
    pub fn layers(self, controls: usize) -> usize {
        match self {
            MczDepthCost::Logical => 1,
            MczDepthCost::Decomposed if controls >= 2 => 8 * controls - 12,
            MczDepthCost::Decomposed => 1,
        }
    }

    /// Depth weight for any gate under this cost model.
    pub fn gate_layers(self, gate: &Gate) -> usize {
        match gate {
            Gate::Mcz(qs) => self.layers(qs.len().saturating_sub(1)),
            _ => 1,
        }
    }
}

fn all_qubits(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Phase oracle: `|ω⟩ ↦ −|ω⟩`, every other basis state fixed.
pub fn oracle_circuit(target: &BitString) -> Result<Circuit> {
    let n = target.len();
    let zeros: Vec<usize> = (0..n).filter(|&q| !target.bit(q)).collect();
    let mut c = Circuit::new(n)?;
    if !zeros.is_empty() {
        for &q in &zeros {
            c.push(Gate::X(q))?;
        }
        c.barrier();
    }
    c.push(Gate::Mcz(all_qubits(n)))?;
    if !zeros.is_empty() {
        c.barrier();
        for &q in &zeros {
            c.push(Gate::X(q))?;
        }
    }
    Ok(c)
}

/// Reflection about the uniform superposition, `H X MCZ X H` (up to global phase).
pub fn diffuser_circuit(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    for layer in [Gate::H, Gate::X] {
        for q in 0..n {
            c.push(layer(q))?;
        }
        c.barrier();
    }
    c.push(Gate::Mcz(all_qubits(n)))?;
    for layer in [Gate::X, Gate::H] {
        c.barrier();
        for q in 0..n {
            c.push(layer(q))?;
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverPlan {
    pub target: BitString,
    pub iterations: usize,
    pub circuit: Circuit,
}

impl GroverPlan {
    pub fn n(&self) -> usize {
        self.target.len()
    }

    pub fn depth(&self, cost: MczDepthCost) -> usize {
        self.circuit.depth_with(|g| cost.gate_layers(g))
    }

    pub fn final_state(&self) -> Result<StateVector> {
        let mut s = StateVector::new(self.n())?;
        s.run(&self.circuit)?;
        Ok(s)
    }
}

pub fn build_grover(target: &BitString) -> Result<GroverPlan> {
    build_grover_with(target, iteration_count(target.len()))
}

/// Grover circuit with an explicit iteration count.
pub fn build_grover_with(target: &BitString, iterations: usize) -> Result<GroverPlan> {
    let n = target.len();
    let oracle = oracle_circuit(target)?;
    let diffuser = diffuser_circuit(n)?;
    let mut circuit = Circuit::new(n)?;
    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    for _ in 0..iterations {
        circuit.extend(&oracle)?;
        circuit.extend(&diffuser)?;
    }
    Ok(GroverPlan {
        target: *target,
        iterations,
        circuit,
    })
}

/// Layered depth `1 + k·(D_oracle + D_diffuser)` for a target containing at
/// least one zero (so the oracle carries its X layers).
pub fn grover_depth(n: usize, cost: MczDepthCost) -> usize {
    let mcz = cost.layers(n.saturating_sub(1));
    let oracle = 2 + mcz;
    let diffuser = 4 + mcz;
    1 + iteration_count(n) * (oracle + diffuser)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn schedule() {
        assert_eq!(iteration_count(1), 1);
        assert_eq!(iteration_count(2), 1);
        assert_eq!(iteration_count(3), 2);
        assert_eq!(iteration_count(8), 12);
        assert_eq!(iteration_count(40), MAX_ITERATIONS);
    }

    #[test]
    fn n2_is_certain() {
        let plan = build_grover(&bs("11")).unwrap();
        assert_eq!(plan.iterations, 1);
        let p = plan.final_state().unwrap().probability(&bs("11")).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!((grover_success_ideal(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n3_closed_form() {
        let expected = (5.0 * (1.0 / 8f64.sqrt()).asin()).sin().powi(2);
        assert!((grover_success_ideal(3) - expected).abs() < 1e-15);
        assert!((expected - 0.9453).abs() < 1e-4);
        for w in BitString::all(3).unwrap() {
            let p = build_grover(&w).unwrap().final_state().unwrap().probability(&w).unwrap();
            assert!((p - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_flips_only_target() {
        for n in 1..=6 {
            for w in BitString::all(n).unwrap().step_by(5) {
                let mut s = StateVector::uniform(n).unwrap();
                s.run(&oracle_circuit(&w).unwrap()).unwrap();
                let amp = (1.0 / (1u64 << n) as f64).sqrt();
                for (i, a) in s.amplitudes().iter().enumerate() {
                    let sign = if i as u64 == w.index() { -1.0 } else { 1.0 };
                    assert!((a.re - sign * amp).abs() < 1e-12 && a.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gate_count_matches_plan() {
        let w = bs("0110");
        let plan = build_grover(&w).unwrap();
        let oracle = oracle_circuit(&w).unwrap().len();
        let diffuser = diffuser_circuit(4).unwrap().len();
        assert_eq!(plan.circuit.len(), 4 + plan.iterations * (oracle + diffuser));
    }

    #[test]
    fn depth_formula_matches_circuit() {
        assert_eq!(grover_depth(2, MczDepthCost::Logical), 9);
        assert_eq!(build_grover(&bs("01")).unwrap().depth(MczDepthCost::Logical), 9);
        assert_eq!(grover_depth(8, MczDepthCost::Logical), 97);
        for n in 1..=9 {
            let w = BitString::new(0, n).unwrap();
            let plan = build_grover(&w).unwrap();
            for cost in [MczDepthCost::Logical, MczDepthCost::Decomposed] {
                assert_eq!(plan.depth(cost), grover_depth(n, cost), "n={n} {cost:?}");
            }
        }
        // all-ones target has no oracle X layers
        let plan = build_grover(&bs("111")).unwrap();
        assert_eq!(plan.depth(MczDepthCost::Logical), 1 + 2 * 6);
    }

    #[test]
    fn decomposed_cost() {
        assert_eq!(MczDepthCost::Decomposed.layers(1), 1);
        assert_eq!(MczDepthCost::Decomposed.layers(2), 4);
        assert_eq!(MczDepthCost::Decomposed.layers(8), 52);
    }
}
