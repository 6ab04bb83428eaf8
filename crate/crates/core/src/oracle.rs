//! The oracle Hamiltonian `H = Σ_i h_i σ_i^z` for a target string `ω`.
//!
//! `h_i = −1` where `ω_i = 1` and `h_i = +1` where `ω_i = 0`. Combined with the
//! sign convention in [`eigval`] every term is `−1` on `|ω⟩`, so `|ω⟩` is the
//! unique ground state with energy `−n`, and a basis state at Hamming distance
//! `d` from `ω` has energy `−n + 2d`.
//!
//! The Hamiltonian is kept as its coefficient vector; it is never expanded to
//! a matrix.

use serde::{Deserialize, Serialize};

use crate::bitstring::{BitString, Counts};
use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Largest `n` accepted by [`OracleHamiltonian::ground_state_bruteforce`].
pub const BRUTEFORCE_MAX_QUBITS: usize = 20;

/// Tag stored alongside serialized targets.
pub const SIGMA_Z_CONVENTION: &str = "sigma_z|0>=-|0>,sigma_z|1>=+|1>";

/// σ_z eigenvalue of a basis value: `|0⟩ ↦ −1`, `|1⟩ ↦ +1`.
///
/// This is the only place the sign convention is written down.
#[inline]
pub fn eigval(bit: bool) -> f64 {
    2.0 * f64::from(u8::from(bit)) - 1.0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleHamiltonian {
    target: BitString,
    h: Vec<i8>,
}

impl OracleHamiltonian {
    pub fn new(target: BitString) -> Self {
        let h = target.bits().map(|b| if b { -1 } else { 1 }).collect();
        Self { target, h }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn coefficients(&self) -> &[i8] {
        &self.h
    }

    pub fn target(&self) -> BitString {
        self.target
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                actual: len,
            });
        }
        Ok(())
    }

    /// Energy of a basis state given by index, no length check.
    #[inline]
    pub(crate) fn energy_of_index(&self, index: u64) -> f64 {
        self.h
            .iter()
            .enumerate()
            .map(|(i, &h)| f64::from(h) * eigval((index >> i) & 1 == 1))
            .sum()
    }

    pub fn basis_energy(&self, x: &BitString) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.energy_of_index(x.index()))
    }

    /// `⟨ψ|H|ψ⟩` computed from amplitudes as `Σ_i h_i ⟨σ_i^z⟩`.
    pub fn expectation_exact(&self, state: &StateVector) -> Result<f64> {
        self.check_len(state.n())?;
        let mut z = vec![0.0; self.n()];
        for (x, a) in state.amplitudes().iter().enumerate() {
            let p = a.norm_sqr();
            for (i, zi) in z.iter_mut().enumerate() {
                *zi += p * eigval((x >> i) & 1 == 1);
            }
        }
        Ok(self.h.iter().zip(&z).map(|(&h, zi)| f64::from(h) * zi).sum())
    }

    /// Sample mean of the basis energy over a measurement histogram.
    pub fn expectation_from_counts(&self, counts: &Counts) -> Result<f64> {
        let mut shots = 0u64;
        let mut acc = 0.0;
        for (x, &c) in counts {
            self.check_len(x.len())?;
            shots += c;
            acc += c as f64 * self.energy_of_index(x.index());
        }
        if shots == 0 {
            return Err(Error::InvalidArgument("counts contain no shots".into()));
        }
        Ok(acc / shots as f64)
    }

    /// Minimum over all `2^n` basis energies by enumeration.
    pub fn ground_state_bruteforce(&self) -> Result<(BitString, f64)> {
        if self.n() > BRUTEFORCE_MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "enumeration over {} qubits exceeds limit {BRUTEFORCE_MAX_QUBITS}",
                self.n()
            )));
        }
        let mut best: Option<(BitString, f64)> = None;
        for x in BitString::all(self.n())? {
            let e = self.energy_of_index(x.index());
            if best.is_none_or(|(_, b)| e < b) {
                best = Some((x, e));
            }
        }
        Ok(best.expect("at least one basis state"))
    }

    /// Distinct energies with multiplicities, ascending, by enumeration.
    pub fn spectrum(&self) -> Result<Vec<(f64, u64)>> {
        if self.n() > BRUTEFORCE_MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "enumeration over {} qubits exceeds limit {BRUTEFORCE_MAX_QUBITS}",
                self.n()
            )));
        }
        let mut levels: Vec<(f64, u64)> = Vec::new();
        let mut energies: Vec<f64> = BitString::all(self.n())?
            .map(|x| self.energy_of_index(x.index()))
            .collect();
        energies.sort_by(f64::total_cmp);
        for e in energies {
            match levels.last_mut() {
                Some((v, m)) if *v == e => *m += 1,
                _ => levels.push((e, 1)),
            }
        }
        Ok(levels)
    }
}

pub fn build_oracle(target: &BitString) -> OracleHamiltonian {
    OracleHamiltonian::new(*target)
}

/// Parses `target` and builds its Hamiltonian.
pub fn build_oracle_str(target: &str) -> Result<OracleHamiltonian> {
    Ok(OracleHamiltonian::new(target.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::Gate;
    use num_complex::Complex64;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn coefficients_follow_target() {
        assert_eq!(build_oracle_str("101").unwrap().coefficients(), &[-1, 1, -1]);
        assert_eq!(build_oracle_str("000").unwrap().coefficients(), &[1, 1, 1]);
        let h = build_oracle_str("1").unwrap();
        assert_eq!(h.coefficients(), &[-1]);
        let levels: Vec<f64> = h.spectrum().unwrap().into_iter().map(|(e, _)| e).collect();
        assert_eq!(levels, [-1.0, 1.0]);
    }

    #[test]
    fn invalid_targets() {
        assert!(matches!(build_oracle_str(""), Err(Error::InvalidTarget(_))));
        assert!(matches!(build_oracle_str("012"), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn basis_energies() {
        let h = build_oracle_str("101").unwrap();
        assert_eq!(h.basis_energy(&bs("101")).unwrap(), -3.0);
        assert_eq!(h.basis_energy(&bs("100")).unwrap(), -1.0);
        assert!(matches!(
            h.basis_energy(&bs("10")),
            Err(Error::Dimension { .. })
        ));
        // full 3-qubit table against Hamming distance
        for x in BitString::all(3).unwrap() {
            let d = x.hamming_distance(&bs("101")).unwrap() as f64;
            assert_eq!(h.basis_energy(&x).unwrap(), -3.0 + 2.0 * d);
        }
        let h = build_oracle_str("11").unwrap();
        let max = BitString::all(2)
            .unwrap()
            .map(|x| h.basis_energy(&x).unwrap())
            .fold(f64::MIN, f64::max);
        assert_eq!(h.basis_energy(&bs("00")).unwrap(), 2.0);
        assert_eq!(max, 2.0);
    }

    #[test]
    fn exact_expectation_cases() {
        let h = build_oracle_str("0110").unwrap();
        let s = StateVector::basis(&bs("0110")).unwrap();
        assert_eq!(h.expectation_exact(&s).unwrap(), -4.0);
        let u = StateVector::uniform(4).unwrap();
        assert!(h.expectation_exact(&u).unwrap().abs() < 1e-12);

        // (|ω⟩ + |ω'⟩)/√2 with ω' one flip away
        let h = build_oracle_str("101").unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[bs("101").index() as usize] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[bs("100").index() as usize] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = StateVector::from_amplitudes(amps).unwrap();
        assert!((h.expectation_exact(&s).unwrap() + 2.0).abs() < 1e-12);

        assert!(h.expectation_exact(&StateVector::new(2).unwrap()).is_err());
    }

    #[test]
    fn counts_expectation_cases() {
        let h = build_oracle_str("11").unwrap();
        let counts: Counts = [(bs("11"), 3), (bs("00"), 1)].into_iter().collect();
        assert_eq!(h.expectation_from_counts(&counts).unwrap(), -1.0);

        let point: Counts = [(bs("11"), 17)].into_iter().collect();
        assert_eq!(h.expectation_from_counts(&point).unwrap(), -2.0);

        let uniform: Counts = BitString::all(2).unwrap().map(|x| (x, 5)).collect();
        assert_eq!(h.expectation_from_counts(&uniform).unwrap(), 0.0);

        assert!(matches!(
            h.expectation_from_counts(&Counts::new()),
            Err(Error::InvalidArgument(_))
        ));
        let zero: Counts = [(bs("11"), 0)].into_iter().collect();
        assert!(h.expectation_from_counts(&zero).is_err());
    }

    #[test]
    fn bruteforce_finds_target() {
        assert_eq!(
            build_oracle_str("0110").unwrap().ground_state_bruteforce().unwrap(),
            (bs("0110"), -4.0)
        );
        assert_eq!(
            build_oracle_str("0").unwrap().ground_state_bruteforce().unwrap(),
            (bs("0"), -1.0)
        );
        let big = OracleHamiltonian::new(BitString::zeros(21).unwrap());
        assert!(matches!(
            big.ground_state_bruteforce(),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn expectation_tracks_single_qubit_rotation() {
        // Ry(t)|0⟩: ⟨σ_z⟩ = P1 − P0 = −cos t, and h = −1 for ω = "1"
        let h = build_oracle_str("1").unwrap();
        for k in 0..16 {
            let t = k as f64 * 0.4;
            let mut s = StateVector::new(1).unwrap();
            s.apply(&Gate::Ry { target: 0, angle: t }).unwrap();
            assert!((h.expectation_exact(&s).unwrap() - t.cos()).abs() < 1e-12);
        }
    }
}
