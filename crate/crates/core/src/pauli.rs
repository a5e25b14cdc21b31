//! n-qubit Pauli operators in the symplectic representation.
//!
//! An operator is `i^phase` times a tensor product of single-qubit factors,
//! where qubit `j` carries `I`, `X`, `Z` or `Y` according to the bit pair
//! `(x_j, z_j)`, with `(1, 1)` meaning `Y` itself (not `XZ`). Under this
//! convention `X * Z = -i Y`, and an operator is Hermitian exactly when its
//! phase is 0 or 2.
//!
//! Dense matrices index computational basis states so that qubit `j` is bit
//! `j` of the state index.

use std::fmt;

use nalgebra::{Complex, DMatrix};
use serde::{Serialize, Serializer};

use crate::bits::Bits;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Powers of `i`.
pub const I_POW: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

/// A single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: Bits,
    z: Bits,
    phase: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: Bits::zeros(n),
            z: Bits::zeros(n),
            phase: 0,
        }
    }

    pub fn from_parts(x: Bits, z: Bits, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self {
            n: x.len(),
            x,
            z,
            phase: phase % 4,
        })
    }

    /// Tensor product of the given single-qubit factors, phase +1.
    pub fn from_axes(n: usize, factors: impl IntoIterator<Item = (usize, Axis)>) -> Self {
        let mut p = Self::identity(n);
        for (q, axis) in factors {
            let (xb, zb) = axis.bits();
            assert!(!p.x.get(q) && !p.z.get(q), "qubit {q} listed twice");
            p.x.set(q, xb);
            p.z.set(q, zb);
        }
        p
    }

    pub fn single(n: usize, qubit: usize, axis: Axis) -> Self {
        Self::from_axes(n, [(qubit, axis)])
    }

    pub fn x_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self::from_axes(n, qubits.into_iter().map(|q| (q, Axis::X)))
    }

    pub fn z_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self::from_axes(n, qubits.into_iter().map(|q| (q, Axis::Z)))
    }

    /// Inverse of [`PauliOp::symplectic`], phase +1.
    pub fn from_symplectic(n: usize, v: &Bits) -> Self {
        assert_eq!(v.len(), 2 * n);
        Self {
            n,
            x: v.slice(0, n),
            z: v.slice(n, 2 * n),
            phase: 0,
        }
    }

    /// Parses whitespace-separated tokens such as `X0 Z3 Y12`; `I` or an empty
    /// string denotes the identity. A leading `-`, `+i` or `-i` token sets the phase.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let mut p = Self::identity(n);
        let mut tokens = s.split_whitespace().peekable();
        if let Some(&first) = tokens.peek() {
            let phase = match first {
                "+" => Some(0),
                "-" => Some(2),
                "+i" | "i" => Some(1),
                "-i" => Some(3),
                _ => None,
            };
            if let Some(ph) = phase {
                p.phase = ph;
                tokens.next();
            }
        }
        for tok in tokens {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let axis = match chars.next() {
                Some('X') => Axis::X,
                Some('Y') => Axis::Y,
                Some('Z') => Axis::Z,
                _ => return Err(Error::Parse(format!("bad Pauli token {tok:?}"))),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in {tok:?}")))?;
            if q >= n {
                return Err(Error::Parse(format!("qubit {q} out of range for n = {n}")));
            }
            if p.x.get(q) || p.z.get(q) {
                return Err(Error::Parse(format!("qubit {q} appears twice in {s:?}")));
            }
            let (xb, zb) = axis.bits();
            p.x.set(q, xb);
            p.z.set(q, zb);
        }
        Ok(p)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    /// Exponent of `i` in the overall phase.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// Same operator with phase +1.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on nontrivially.
    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    pub fn support(&self) -> Bits {
        self.x.or(&self.z)
    }

    fn y_count(&self) -> u32 {
        self.x.and_count(&self.z)
    }

    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    pub fn axis_at(&self, q: usize) -> Option<Axis> {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    /// The GF(2) image `x || z` of length `2n`; the phase is dropped.
    pub fn symplectic(&self) -> Bits {
        self.x.concat(&self.z)
    }

    fn check_dims(&self, other: &PauliOp) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Symplectic form: `true` when the operators anticommute.
    #[inline]
    pub fn anticommutes_with(&self, other: &PauliOp) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)) & 1 == 1
    }

    pub fn commutes(&self, other: &PauliOp) -> Result<bool> {
        self.check_dims(other)?;
        Ok(!self.anticommutes_with(other))
    }

    /// Exact operator product `self * other`.
    pub fn mul(&self, other: &PauliOp) -> Result<PauliOp> {
        self.check_dims(other)?;
        // Move to the X^x Z^z form (Y = i XZ), multiply there, and move back.
        let mut p = self.phase as u32 + self.y_count() + other.phase as u32 + other.y_count();
        p += 2 * self.z.and_count(&other.x);
        let x = self.x.xor(&other.x);
        let z = self.z.xor(&other.z);
        let y = x.and_count(&z);
        let phase = ((p + 4 * 64 - (y % 4)) % 4) as u8;
        Ok(PauliOp { n: self.n, x, z, phase })
    }

    /// Places this operator on qubits `offset..offset + n` of a larger register.
    pub fn embed(&self, n_total: usize, offset: usize) -> Result<PauliOp> {
        if offset + self.n > n_total {
            return Err(Error::DimensionMismatch {
                expected: n_total,
                found: offset + self.n,
            });
        }
        let shift = |b: &Bits| Bits::from_indices(n_total, b.iter_ones().map(|i| i + offset));
        Ok(PauliOp {
            n: n_total,
            x: shift(&self.x),
            z: shift(&self.z),
            phase: self.phase,
        })
    }

    /// Image of a computational basis state: `P |b> = coeff |b'>`.
    /// Requires `n <= 63`.
    #[inline]
    pub fn act_on_basis(&self, b: usize) -> (usize, C64) {
        let xm = self.x.low_word() as usize;
        let zm = self.z.low_word() as usize;
        let sign = ((zm & b).count_ones() & 1) * 2;
        let k = (self.phase as u32 + self.y_count() + sign) % 4;
        (b ^ xm, I_POW[k as usize])
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_dense(&self) -> DMatrix<C64> {
        assert!(self.n < 32, "dense Pauli matrix requested for {} qubits", self.n);
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (b2, c) = self.act_on_basis(b);
            m[(b2, b)] = c;
        }
        m
    }
}

/// Free-function form of [`PauliOp::mul`].
pub fn pauli_mul(p: &PauliOp, q: &PauliOp) -> Result<PauliOp> {
    p.mul(q)
}

/// Free-function form of [`PauliOp::commutes`].
pub fn commutes(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    p.commutes(q)
}

/// Free-function form of [`PauliOp::weight`].
pub fn weight(p: &PauliOp) -> usize {
    p.weight()
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "+i ", "- ", "-i "][self.phase as usize];
        f.write_str(prefix)?;
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in self.support().iter_ones() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}{q}", self.axis_at(q).unwrap().letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp[{}]({self})", self.n)
    }
}

impl Serialize for PauliOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
