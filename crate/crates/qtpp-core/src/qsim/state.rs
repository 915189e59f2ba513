use num_complex::Complex64;

use super::{Gate, MAX_QUBITS};
use crate::error::{CoreError, Result};

pub type Amplitude = Complex64;

/// Normalized pure state of `num_qubits` qubits as 2^n complex amplitudes.
/// Index `i` is the ket |binary(i)>, qubit 0 = most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

impl StateVector {
    pub fn basis_state(num_qubits: usize, bits: &[bool]) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(CoreError::QubitCount(num_qubits));
        }
        if bits.len() != num_qubits {
            return Err(CoreError::BasisLength {
                bit: bits.len(),
                num_qubits,
            });
        }
        let mut index = 0usize;
        for &b in bits {
            index = (index << 1) | usize::from(b);
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Kronecker product, `self`'s qubits first (most significant).
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let num_qubits = self.num_qubits + other.num_qubits;
        if num_qubits > MAX_QUBITS {
            return Err(CoreError::TooManyQubits);
        }
        let mut amplitudes = Vec::with_capacity(1 << num_qubits);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Applies `gate` to the ordered `targets`: bit `j` of the gate's own
    /// index addresses `targets[j]`. Pure; returns the new state.
    pub fn apply_gate(&self, gate: &Gate, targets: &[usize]) -> Result<Self> {
        let k = targets.len();
        if gate.dimension() != 1usize << k {
            return Err(CoreError::DimensionMismatch {
                gate_dim: gate.dimension(),
                targets: k,
            });
        }
        let mut seen = [false; MAX_QUBITS];
        for &t in targets {
            if t >= self.num_qubits {
                return Err(CoreError::QubitIndex {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
            if seen[t] {
                return Err(CoreError::DuplicateTarget(t));
            }
            seen[t] = true;
        }

        // Bit position (from LSB) of each target within a basis index.
        let mut shifts = [0u32; MAX_QUBITS];
        for (j, &t) in targets.iter().enumerate() {
            shifts[j] = (self.num_qubits - 1 - t) as u32;
        }
        let spread = |g: usize| -> usize {
            let mut x = 0usize;
            for (j, &shift) in shifts[..k].iter().enumerate() {
                x |= ((g >> (k - 1 - j)) & 1) << shift;
            }
            x
        };
        let target_mask: usize = shifts[..k].iter().map(|&shift| 1usize << shift).sum();

        let dim = self.amplitudes.len();
        let gdim = gate.dimension();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        let offsets: Vec<usize> = (0..gdim).map(spread).collect();
        for base in 0..dim {
            if base & target_mask != 0 {
                continue;
            }
            for (row, &row_off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, &col_off) in offsets.iter().enumerate() {
                    acc += gate.entry(row, col) * self.amplitudes[base | col_off];
                }
                out[base | row_off] = acc;
            }
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: out,
        })
    }

    /// P(measuring `qubit` yields `outcome`).
    pub fn outcome_probability(&self, qubit: usize, outcome: bool) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(CoreError::QubitIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let shift = self.num_qubits - 1 - qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| ((i >> shift) & 1 == 1) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub(crate) fn collapse(&self, qubit: usize, outcome: bool, probability: f64) -> Self {
        let shift = self.num_qubits - 1 - qubit;
        // Skipping the rescale at probability ~ 1 makes re-collapsing an
        // already-collapsed state bit-identical.
        let scale = if (probability - 1.0).abs() < 1e-12 {
            1.0
        } else {
            probability.sqrt().recip()
        };
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if ((i >> shift) & 1 == 1) == outcome {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self {
            num_qubits: self.num_qubits,
            amplitudes,
        }
    }
}
