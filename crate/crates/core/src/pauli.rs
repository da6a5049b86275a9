//! Pauli strings with a global phase in {+1, +i, -1, -i}.

use crate::error::{Error, Result};
use crate::math::{gates, Mat2, C64};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i & 3]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => crate::math::mat2_identity(),
            Pauli::X => gates::x(),
            Pauli::Y => gates::y(),
            Pauli::Z => gates::z(),
        }
    }

    /// `self * other = i^k * result`; returns `(k, result)`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(self, Pauli::I | Pauli::Z)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub symbols: Vec<Pauli>,
    /// Global phase as a power of i.
    pub phase: u8,
}

impl PauliString {
    pub fn new(symbols: Vec<Pauli>) -> Self {
        PauliString { symbols, phase: 0 }
    }

    pub fn identity(n: usize) -> Self {
        PauliString::new(vec![Pauli::I; n])
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn phase_value(&self) -> C64 {
        match self.phase & 3 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Enumerates the 4^n strings with `index` in base 4, first qubit most significant.
    pub fn from_index(n: usize, index: usize) -> Self {
        let symbols = (0..n).map(|k| Pauli::from_index(index >> (2 * (n - 1 - k)))).collect();
        PauliString::new(symbols)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let symbols = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Config(format!("bad pauli symbol `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString { symbols, phase })
    }

    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let mut phase = self.phase + other.phase;
        let symbols = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase += k;
                p
            })
            .collect();
        Ok(PauliString { symbols, phase: phase & 3 })
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let n = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a.anticommutes(**b))
            .count();
        Ok(n % 2 == 0)
    }

    /// Dense matrix including phase, first symbol on the most significant bit.
    pub fn matrix(&self) -> Vec<Vec<C64>> {
        let mut m = vec![vec![self.phase_value()]];
        for p in &self.symbols {
            let pm = p.matrix();
            let d = m.len();
            let mut out = vec![vec![C64::new(0.0, 0.0); 2 * d]; 2 * d];
            for i in 0..d {
                for j in 0..d {
                    for a in 0..2 {
                        for b in 0..2 {
                            out[2 * i + a][2 * j + b] = m[i][j] * pm[a][b];
                        }
                    }
                }
            }
            m = out;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][(self.phase & 3) as usize];
        write!(f, "{prefix}")?;
        for p in &self.symbols {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Product with phase; free-function form.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.mul(b)
}

pub fn pauli_commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}
