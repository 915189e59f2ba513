use num_complex::Complex64;

use crate::error::{CoreError, Result};

const UNITARITY_TOL: f64 = 1e-12;

/// Unitary matrix over 1, 2, or 3 qubits, row-major.
///
/// 3-qubit support exists for an eavesdropper's joint operation on her
/// ancillas; the protocol itself only ever constructs 2- and 4-dimensional
/// gates.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Gate {
    /// R(theta) = [[cos, sin], [-sin, cos]]; R(theta)|0> = cos|0> - sin|1>.
    pub fn rotation(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(CoreError::NonFiniteAngle);
        }
        let (s, c) = theta.sin_cos();
        let r = |x: f64| Complex64::new(x, 0.0);
        Ok(Self {
            dim: 2,
            entries: vec![r(c), r(s), r(-s), r(c)],
        })
    }

    /// Controlled-NOT; first target is the control, second the target.
    pub fn cnot() -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); 16];
        // |00>->|00>, |01>->|01>, |10>->|11>, |11>->|10>
        for (row, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
            entries[row * 4 + col] = Complex64::new(1.0, 0.0);
        }
        Self { dim: 4, entries }
    }

    pub fn pauli_x() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self {
            dim: 2,
            entries: vec![z, one, one, z],
        }
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        let dim = checked_dim(num_qubits)?;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { dim, entries })
    }

    /// Arbitrary unitary from row-major entries; rejected unless
    /// conj(G)^T * G stays within 1e-12 of the identity elementwise.
    pub fn from_matrix(num_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = checked_dim(num_qubits)?;
        if entries.len() != dim * dim {
            return Err(CoreError::DimensionMismatch {
                gate_dim: entries.len(),
                targets: num_qubits,
            });
        }
        let gate = Self { dim, entries };
        let dev = gate.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(CoreError::NotUnitary(dev));
        }
        Ok(gate)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Max elementwise deviation of conj(G)^T * G from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.dim {
                    acc += self.entry(k, i).conj() * self.entry(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }
}

fn checked_dim(num_qubits: usize) -> Result<usize> {
    match num_qubits {
        1..=3 => Ok(1 << num_qubits),
        _ => Err(CoreError::GateDimension(
            1usize.checked_shl(num_qubits as u32).unwrap_or(0),
        )),
    }
}
