//! Real-weighted Pauli sums and the Hamiltonians built from them: the penalty
//! Hamiltonian, bare and two-local encodings of a problem Hamiltonian, and a
//! toy bath.

use std::ops::ControlFlow;

use indexmap::IndexMap;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{CodeStructure, SubsystemCodeSpec};
use crate::error::{Error, Result};
use crate::matrix_code::FamilyCode;
use crate::pauli::{Axis, PauliOp, C64};
use crate::spectral::PenaltyCalibration;

/// Largest register `to_matrix` will densify by default.
pub const DEFAULT_DENSE_CAP: usize = 14;

/// Couplings whose calibration ratio is smaller than this are rejected.
pub const DEFAULT_ALPHA_FLOOR: f64 = 1e-6;

/// `sum_i c_i P_i` with real `c_i` and Hermitian, phase-free `P_i`. Terms with
/// equal Pauli strings are merged on insertion.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: IndexMap<PauliOp, f64>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: IndexMap::new(),
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (f64, PauliOp)>) -> Result<Self> {
        let mut s = Self::new(n);
        for (c, p) in terms {
            s.add(c, p)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff * op`. A phase of -1 on `op` is folded into the coefficient;
    /// anti-Hermitian operators are rejected.
    pub fn add(&mut self, coeff: f64, op: PauliOp) -> Result<()> {
        if op.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: op.n(),
            });
        }
        let coeff = match op.phase() {
            0 => coeff,
            2 => -coeff,
            _ => return Err(Error::Precondition(format!("{op} is not Hermitian"))),
        };
        *self.terms.entry(op.unsigned()).or_insert(0.0) += coeff;
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &PauliOp)> {
        self.terms.iter().map(|(p, &c)| (c, p))
    }

    pub fn coefficient(&self, op: &PauliOp) -> f64 {
        self.terms.get(&op.unsigned()).copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * factor)).collect(),
        }
    }

    pub fn plus(&self, other: &PauliSum) -> Result<Self> {
        let mut out = self.clone();
        for (c, p) in other.terms() {
            out.add(c, p.clone())?;
        }
        Ok(out)
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &PauliSum, b: f64) -> Result<Self> {
        self.scaled(a).plus(&other.scaled(b))
    }

    pub fn embed(&self, n_total: usize, offset: usize) -> Result<Self> {
        let mut out = Self::new(n_total);
        for (c, p) in self.terms() {
            out.add(c, p.embed(n_total, offset)?)?;
        }
        Ok(out)
    }

    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(PauliOp::weight).max().unwrap_or(0)
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Dense matrix, refusing registers above `cap` qubits.
    pub fn to_matrix_capped(&self, cap: usize) -> Result<DMatrix<C64>> {
        if self.n > cap {
            return Err(Error::DenseCap { qubits: self.n, cap });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in self.terms() {
            for b in 0..dim {
                let (b2, ph) = p.act_on_basis(b);
                m[(b2, b)] += ph * c;
            }
        }
        Ok(m)
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        self.to_matrix_capped(DEFAULT_DENSE_CAP)
    }

    /// Matrix-free `H |psi>`.
    pub fn apply(&self, psi: &[C64]) -> Result<Vec<C64>> {
        if self.n >= 64 || psi.len() != 1usize << self.n {
            return Err(Error::DimensionMismatch {
                expected: 1usize << self.n.min(63),
                found: psi.len(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        for (c, p) in self.terms() {
            for (b, amp) in psi.iter().enumerate() {
                let (b2, ph) = p.act_on_basis(b);
                out[b2] += ph * amp * c;
            }
        }
        Ok(out)
    }
}

#[derive(Serialize)]
struct TermRecord<'a> {
    coefficient: f64,
    op: &'a PauliOp,
}

impl Serialize for PauliSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms().map(|(coefficient, op)| TermRecord { coefficient, op }))
    }
}

/// `H = -sum_g g` over the supplied generators, which must each be purely
/// X-type or purely Z-type.
pub fn penalty_hamiltonian(code: &SubsystemCodeSpec) -> Result<PauliSum> {
    let mut h = PauliSum::new(code.n());
    for g in code.gauge_generators() {
        if !(g.is_x_type() || g.is_z_type()) {
            return Err(Error::MixedGenerator(g.to_string()));
        }
        h.add(-1.0, g.clone())?;
    }
    Ok(h)
}

/// Logical problem Hamiltonian
/// `sum a_i X_i + sum b_i Z_i + sum_{i<j} (c_ij X_iX_j + d_ij Z_iZ_j + yy_ij Y_iY_j)`.
/// Only the upper triangles of the coupling matrices are read; they must be
/// symmetric with zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub m: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yy: Option<Vec<Vec<f64>>>,
}

/// One two-body coupling of a problem; `i < j`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub axis: Axis,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

impl ProblemSpec {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            a: vec![0.0; m],
            b: vec![0.0; m],
            c: vec![vec![0.0; m]; m],
            d: vec![vec![0.0; m]; m],
            yy: None,
        }
    }

    /// Uniform coefficients in `[-1, 1]` for fields and XX/ZZ couplings.
    pub fn random<R: Rng>(m: usize, rng: &mut R) -> Self {
        let mut p = Self::zero(m);
        for i in 0..m {
            p.a[i] = rng.gen_range(-1.0..=1.0);
            p.b[i] = rng.gen_range(-1.0..=1.0);
        }
        for i in 0..m {
            for j in i + 1..m {
                let (c, d) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
                p.c[i][j] = c;
                p.c[j][i] = c;
                p.d[i][j] = d;
                p.d[j][i] = d;
            }
        }
        p
    }

    pub fn set_coupling(&mut self, axis: Axis, i: usize, j: usize, value: f64) {
        let m = self.m;
        let mat = match axis {
            Axis::X => &mut self.c,
            Axis::Z => &mut self.d,
            Axis::Y => self.yy.get_or_insert_with(|| vec![vec![0.0; m]; m]),
        };
        mat[i - 1][j - 1] = value;
        mat[j - 1][i - 1] = value;
    }

    #[allow(clippy::needless_range_loop)]
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        let square = |name: &str, mat: &Vec<Vec<f64>>| -> Result<()> {
            if mat.len() != m || mat.iter().any(|r| r.len() != m) {
                return Err(Error::Config(format!("{name} must be {m}x{m}")));
            }
            for i in 0..m {
                if mat[i][i] != 0.0 {
                    return Err(Error::Config(format!("{name} has a nonzero diagonal at {i}")));
                }
                for j in 0..m {
                    if (mat[i][j] - mat[j][i]).abs() > 1e-12 {
                        return Err(Error::Config(format!("{name} is not symmetric at ({i},{j})")));
                    }
                }
            }
            Ok(())
        };
        if self.a.len() != m || self.b.len() != m {
            return Err(Error::Config(format!("field vectors must have length {m}")));
        }
        square("c", &self.c)?;
        square("d", &self.d)?;
        if let Some(yy) = &self.yy {
            square("yy", yy)?;
        }
        Ok(())
    }

    /// Nonzero couplings in the order XX, ZZ, YY, each by `(i, j)`.
    #[allow(clippy::needless_range_loop)]
    pub fn couplings(&self) -> Vec<Coupling> {
        let mut out = Vec::new();
        let mut push = |axis, mat: &Vec<Vec<f64>>| {
            for i in 0..self.m {
                for j in i + 1..self.m {
                    if mat[i][j] != 0.0 {
                        out.push(Coupling {
                            axis,
                            i: i + 1,
                            j: j + 1,
                            value: mat[i][j],
                        });
                    }
                }
            }
        };
        push(Axis::X, &self.c);
        push(Axis::Z, &self.d);
        if let Some(yy) = &self.yy {
            push(Axis::Y, yy);
        }
        out
    }

    /// `(1 - w) * self + w * other`, entrywise.
    pub fn interpolate(&self, other: &ProblemSpec, w: f64) -> Result<ProblemSpec> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        let mix = |x: f64, y: f64| (1.0 - w) * x + w * y;
        let vec = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(&p, &q)| mix(p, q)).collect::<Vec<_>>();
        let mat = |x: &[Vec<f64>], y: &[Vec<f64>]| x.iter().zip(y).map(|(p, q)| vec(p, q)).collect::<Vec<_>>();
        let zeros = vec![vec![0.0; self.m]; self.m];
        let yy = match (&self.yy, &other.yy) {
            (None, None) => None,
            (x, y) => Some(mat(x.as_ref().unwrap_or(&zeros), y.as_ref().unwrap_or(&zeros))),
        };
        Ok(ProblemSpec {
            m: self.m,
            a: vec(&self.a, &other.a),
            b: vec(&self.b, &other.b),
            c: mat(&self.c, &other.c),
            d: mat(&self.d, &other.d),
            yy,
        })
    }

    fn check_size(&self, pc: &FamilyCode) -> Result<()> {
        if self.m != pc.m() {
            return Err(Error::DimensionMismatch {
                expected: pc.m(),
                found: self.m,
            });
        }
        self.validate()
    }
}

/// Piecewise-linear schedule of problems, knots sorted by time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    pub knots: Vec<(f64, ProblemSpec)>,
}

impl Schedule {
    pub fn constant(p: ProblemSpec) -> Self {
        Self { knots: vec![(0.0, p)] }
    }

    pub fn is_constant(&self) -> bool {
        self.knots.len() == 1
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .knots
            .first()
            .ok_or_else(|| Error::Config("schedule has no knots".into()))?;
        for w in self.knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Config("schedule knot times must increase".into()));
            }
            if w[1].1.m != first.1.m {
                return Err(Error::Config("schedule knots disagree on m".into()));
            }
        }
        self.knots.iter().try_for_each(|(_, p)| p.validate())
    }

    /// Problem at time `t`, clamped to the end knots.
    pub fn at(&self, t: f64) -> Result<ProblemSpec> {
        let knots = &self.knots;
        let Some(first) = knots.first() else {
            return Err(Error::Config("schedule has no knots".into()));
        };
        if t <= first.0 || knots.len() == 1 {
            return Ok(first.1.clone());
        }
        for w in knots.windows(2) {
            let ((t0, p0), (t1, p1)) = (&w[0], &w[1]);
            if t <= *t1 {
                return p0.interpolate(p1, (t - t0) / (t1 - t0));
            }
        }
        Ok(knots.last().unwrap().1.clone())
    }
}

/// `sum a_i X-bar_i + sum b_i Z-bar_i + sum c_ij X-bar_i X-bar_j + ...` with the
/// bare logicals of the `[[6k, 2k, 2]]` code.
pub fn bare_encoded_hamiltonian(p: &ProblemSpec, pc: &FamilyCode) -> Result<PauliSum> {
    p.check_size(pc)?;
    let mut h = PauliSum::new(pc.n());
    for i in 1..=pc.m() {
        push_nonzero(&mut h, p.a[i - 1], pc.x_bar(i))?;
        push_nonzero(&mut h, p.b[i - 1], pc.z_bar(i))?;
    }
    for cp in p.couplings() {
        h.add(cp.value, pc.bare_coupling(cp.axis, cp.i, cp.j))?;
    }
    Ok(h)
}

fn push_nonzero(h: &mut PauliSum, c: f64, op: PauliOp) -> Result<()> {
    if c != 0.0 {
        h.add(c, op)?;
    }
    Ok(())
}

/// Two-local physical encoding: fields on `X_{L_i}X_{B_i}` and `Z_{B_i}Z_{R_i}`,
/// couplings on `A_{B_i}A_{B_j}` divided by the calibrated ratio of the
/// coupling's gauge residue. `None` disables the rescaling.
pub fn physical_encoded_hamiltonian(
    p: &ProblemSpec,
    pc: &FamilyCode,
    cal: Option<&PenaltyCalibration>,
) -> Result<PauliSum> {
    physical_encoded_hamiltonian_with_floor(p, pc, cal, DEFAULT_ALPHA_FLOOR)
}

pub fn physical_encoded_hamiltonian_with_floor(
    p: &ProblemSpec,
    pc: &FamilyCode,
    cal: Option<&PenaltyCalibration>,
    alpha_floor: f64,
) -> Result<PauliSum> {
    p.check_size(pc)?;
    let mut h = PauliSum::new(pc.n());
    for i in 1..=pc.m() {
        push_nonzero(&mut h, p.a[i - 1], pc.x_bar(i))?;
        push_nonzero(&mut h, p.b[i - 1], pc.z_bar(i))?;
    }
    for cp in p.couplings() {
        let scale = match cal {
            None => 1.0,
            Some(cal) => {
                let residue = pc.gauge_residue(cp.axis, cp.i, cp.j);
                let alpha = cal.alpha(&residue)?;
                if alpha.abs() < alpha_floor {
                    return Err(Error::VanishingAlpha {
                        element: residue.to_string(),
                        alpha,
                        floor: alpha_floor,
                    });
                }
                alpha
            }
        };
        h.add(cp.value / scale, pc.physical_coupling(cp.axis, cp.i, cp.j))?;
    }
    Ok(h)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeResidue {
    pub axis: Axis,
    pub i: usize,
    pub j: usize,
    pub element: PauliOp,
}

/// For each coupling, the gauge element `g` with
/// `physical term = (bare product) * g` exactly, phase included.
pub fn gauge_residues(p: &ProblemSpec, pc: &FamilyCode, st: &CodeStructure) -> Result<Vec<GaugeResidue>> {
    p.check_size(pc)?;
    p.couplings()
        .into_iter()
        .map(|cp| {
            let bare = pc.bare_coupling(cp.axis, cp.i, cp.j);
            let phys = pc.physical_coupling(cp.axis, cp.i, cp.j);
            // Paulis square to the identity up to phase, so g = bare^-1 * phys.
            let g = bare.mul(&bare)?.mul(&bare)?.mul(&phys)?;
            if g.phase() != 0 || bare.mul(&g)? != phys {
                return Err(Error::CheckFailed(format!(
                    "coupling {:?}({},{}) residue {g} does not reproduce {phys}",
                    cp.axis, cp.i, cp.j
                )));
            }
            if !st.in_gauge_group(&g) {
                return Err(Error::NotInGauge(g.to_string()));
            }
            Ok(GaugeResidue {
                axis: cp.axis,
                i: cp.i,
                j: cp.j,
                element: g,
            })
        })
        .collect()
}

/// One-local system-bath coupling `strength * sigma_axis(system_qubit) (x) bath_op`.
#[derive(Clone, Debug, Serialize)]
pub struct BathCoupling {
    pub system_qubit: usize,
    pub axis: Axis,
    pub bath_op: PauliOp,
    pub strength: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BathSpec {
    pub n_bath: usize,
    pub h_bath: PauliSum,
    pub couplings: Vec<BathCoupling>,
}

impl BathSpec {
    pub fn none() -> Self {
        Self {
            n_bath: 0,
            h_bath: PauliSum::new(0),
            couplings: Vec::new(),
        }
    }

    /// One bath qubit with `H_B = omega Z` and, on every listed system qubit and
    /// every axis, a coupling `sigma (x) B` with `B` drawn from `{X, Y, Z}` and
    /// strength uniform in `[-scale, scale]`.
    pub fn single_qubit<R: Rng>(omega: f64, system_qubits: &[usize], scale: f64, rng: &mut R) -> Self {
        let h_bath = PauliSum::from_terms(1, [(omega, PauliOp::single(1, 0, Axis::Z))]).unwrap();
        let mut couplings = Vec::new();
        for &q in system_qubits {
            for axis in Axis::ALL {
                let bath_axis = Axis::ALL[rng.gen_range(0..3)];
                couplings.push(BathCoupling {
                    system_qubit: q,
                    axis,
                    bath_op: PauliOp::single(1, 0, bath_axis),
                    strength: rng.gen_range(-scale..=scale),
                });
            }
        }
        Self {
            n_bath: 1,
            h_bath,
            couplings,
        }
    }

    /// `H_SB` on `n_system + n_bath` qubits, the bath placed after the system.
    pub fn interaction(&self, n_system: usize) -> Result<PauliSum> {
        let n = n_system + self.n_bath;
        let mut h = PauliSum::new(n);
        for c in &self.couplings {
            if c.system_qubit >= n_system || c.bath_op.n() != self.n_bath {
                return Err(Error::Config(format!("bath coupling {c:?} does not fit the registers")));
            }
            let sys = PauliOp::single(n, c.system_qubit, c.axis);
            let bath = c.bath_op.embed(n, n_system)?;
            h.add(c.strength, sys.mul(&bath)?)?;
        }
        Ok(h)
    }
}

/// `system + ep * penalty + H_B + H_SB` with the bath after the system qubits.
pub fn assemble_total(system: &PauliSum, ep: f64, penalty: &PauliSum, bath: &BathSpec) -> Result<PauliSum> {
    if system.n() != penalty.n() {
        return Err(Error::DimensionMismatch {
            expected: system.n(),
            found: penalty.n(),
        });
    }
    if bath.h_bath.n() != bath.n_bath {
        return Err(Error::DimensionMismatch {
            expected: bath.n_bath,
            found: bath.h_bath.n(),
        });
    }
    let n_sys = system.n();
    let n = n_sys + bath.n_bath;
    let mut total = system.embed(n, 0)?;
    total = total.plus(&penalty.scaled(ep).embed(n, 0)?)?;
    total = total.plus(&bath.h_bath.embed(n, n_sys)?)?;
    total.plus(&bath.interaction(n_sys)?)
}

/// Whether every term of `h` commutes with every term of `other`, which is
/// sufficient (not necessary) for the sums to commute.
pub fn termwise_commute(h: &PauliSum, other: &PauliSum) -> bool {
    let r = h.terms().try_for_each(|(_, p)| {
        if other.terms().any(|(_, q)| p.anticommutes_with(q)) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    r.is_continue()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_code::FamilyCode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_x_matrix() {
        let h = PauliSum::from_terms(1, [(1.0, PauliOp::single(1, 0, Axis::X))]).unwrap();
        let m = h.to_matrix().unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
    }

    #[test]
    fn empty_sum_is_zero_matrix() {
        let m = PauliSum::new(2).to_matrix().unwrap();
        assert!(m.iter().all(|z| z.norm() == 0.0));
        assert_eq!(m.nrows(), 4);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let h = PauliSum::new(15);
        assert!(matches!(h.to_matrix(), Err(Error::DenseCap { qubits: 15, cap: 14 })));
        assert!(h.to_matrix_capped(3).is_err());
    }

    #[test]
    fn terms_merge_and_fold_signs() {
        let mut h = PauliSum::new(2);
        h.add(1.0, PauliOp::parse(2, "X0 X1").unwrap()).unwrap();
        h.add(0.5, PauliOp::parse(2, "- X0 X1").unwrap()).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.coefficient(&PauliOp::parse(2, "X0 X1").unwrap()), 0.5);
        assert!(h.add(1.0, PauliOp::parse(2, "+i X0").unwrap()).is_err());
        assert!(h.add(1.0, PauliOp::parse(3, "X0").unwrap()).is_err());
    }

    #[test]
    fn penalty_k1_terms() {
        let pc = FamilyCode::new(1).unwrap();
        let h = penalty_hamiltonian(&pc.code).unwrap();
        assert_eq!(h.len(), 6);
        let mut labeled: Vec<String> = h.terms().map(|(c, p)| format!("{c} {}", pc.code.labeled(p))).collect();
        labeled.sort();
        assert_eq!(
            labeled,
            [
                "-1 X_L1 X_L2",
                "-1 X_R1 X_B1",
                "-1 X_R2 X_B2",
                "-1 Z_B1 Z_L1",
                "-1 Z_B2 Z_L2",
                "-1 Z_R1 Z_R2",
            ]
        );
        let m = h.to_matrix().unwrap();
        assert!(m.trace().norm() < 1e-12);
        assert!((&m - m.adjoint()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn penalty_term_count_is_8k_minus_2() {
        for k in 1..=4 {
            let pc = FamilyCode::new(k).unwrap();
            assert_eq!(penalty_hamiltonian(&pc.code).unwrap().len(), 8 * k - 2);
        }
        let empty = SubsystemCodeSpec::new(3, vec![]).unwrap();
        assert!(penalty_hamiltonian(&empty).unwrap().is_empty());
    }

    #[test]
    fn penalty_rejects_mixed_generators() {
        let code = SubsystemCodeSpec::new(2, vec![PauliOp::parse(2, "X0 Z1").unwrap()]).unwrap();
        assert!(matches!(penalty_hamiltonian(&code), Err(Error::MixedGenerator(_))));
    }

    #[test]
    fn bare_encoding_examples() {
        let pc = FamilyCode::new(1).unwrap();
        let mut p = ProblemSpec::zero(2);
        p.a[0] = 1.0;
        let h = bare_encoded_hamiltonian(&p, &pc).unwrap();
        assert_eq!(
            h.terms().map(|(c, op)| (c, pc.code.labeled(op))).collect::<Vec<_>>(),
            [(1.0, "X_B1 X_L1".to_string())]
        );

        let mut p = ProblemSpec::zero(2);
        p.set_coupling(Axis::X, 1, 2, 1.0);
        let h = bare_encoded_hamiltonian(&p, &pc).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.max_weight(), 4);
        assert_eq!(h.coefficient(&pc.x_bar(1).mul(&pc.x_bar(2)).unwrap()), 1.0);

        assert!(bare_encoded_hamiltonian(&ProblemSpec::zero(2), &pc).unwrap().is_empty());
        assert!(bare_encoded_hamiltonian(&ProblemSpec::zero(3), &pc).is_err());
    }

    #[test]
    fn physical_encoding_rescales_couplings_only() {
        let pc = FamilyCode::new(1).unwrap();
        let mut cal = PenaltyCalibration::new("k1");
        cal.insert(&pc.gauge_residue(Axis::X, 1, 2), 2.0 / 3.0);

        let mut p = ProblemSpec::zero(2);
        p.set_coupling(Axis::X, 1, 2, 1.0);
        let h = physical_encoded_hamiltonian(&p, &pc, Some(&cal)).unwrap();
        let coeff = h.coefficient(&pc.physical_coupling(Axis::X, 1, 2));
        assert!((coeff - 1.5).abs() < 1e-12);
        assert_eq!(h.max_weight(), 2);

        let mut p = ProblemSpec::zero(2);
        p.a[0] = 1.0;
        let h = physical_encoded_hamiltonian(&p, &pc, Some(&cal)).unwrap();
        assert_eq!(h.coefficient(&pc.x_bar(1)), 1.0);

        assert!(physical_encoded_hamiltonian(&ProblemSpec::zero(2), &pc, Some(&cal))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn physical_encoding_errors() {
        let pc = FamilyCode::new(1).unwrap();
        let mut p = ProblemSpec::zero(2);
        p.set_coupling(Axis::Z, 1, 2, 1.0);
        let empty = PenaltyCalibration::new("k1");
        assert!(matches!(
            physical_encoded_hamiltonian(&p, &pc, Some(&empty)),
            Err(Error::MissingCalibration(_))
        ));
        let mut tiny = PenaltyCalibration::new("k1");
        tiny.insert(&pc.gauge_residue(Axis::Z, 1, 2), 1e-9);
        assert!(matches!(
            physical_encoded_hamiltonian(&p, &pc, Some(&tiny)),
            Err(Error::VanishingAlpha { .. })
        ));
    }

    #[test]
    fn residues_examples() {
        let pc = FamilyCode::new(1).unwrap();
        let st = pc.code.derive_structure().unwrap();
        let mut p = ProblemSpec::zero(2);
        p.set_coupling(Axis::X, 1, 2, 0.3);
        p.set_coupling(Axis::Z, 1, 2, -0.4);
        let res = gauge_residues(&p, &pc, &st).unwrap();
        let labeled: Vec<String> = res.iter().map(|r| pc.code.labeled(&r.element)).collect();
        assert_eq!(labeled, ["X_L1 X_L2", "Z_R1 Z_R2"]);

        let pc2 = FamilyCode::new(2).unwrap();
        let st2 = pc2.code.derive_structure().unwrap();
        let mut p = ProblemSpec::zero(4);
        p.set_coupling(Axis::X, 1, 3, 1.0);
        let res = gauge_residues(&p, &pc2, &st2).unwrap();
        assert_eq!(pc2.code.labeled(&res[0].element), "X_L1 X_L3");
    }

    #[test]
    fn residue_identity_holds_for_every_coupling() {
        for k in 1..=3 {
            let pc = FamilyCode::new(k).unwrap();
            let st = pc.code.derive_structure().unwrap();
            let m = pc.m();
            let mut p = ProblemSpec::zero(m);
            for i in 1..=m {
                for j in i + 1..=m {
                    for axis in Axis::ALL {
                        p.set_coupling(axis, i, j, 1.0);
                    }
                }
            }
            let res = gauge_residues(&p, &pc, &st).unwrap();
            assert_eq!(res.len(), 3 * m * (m - 1) / 2);
            for r in &res {
                let prod = pc.bare_coupling(r.axis, r.i, r.j).mul(&r.element).unwrap();
                assert_eq!(prod, pc.physical_coupling(r.axis, r.i, r.j));
            }
        }
    }

    #[test]
    fn assemble_examples() {
        let pc = FamilyCode::new(1).unwrap();
        let penalty = penalty_hamiltonian(&pc.code).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sys = bare_encoded_hamiltonian(&ProblemSpec::random(2, &mut rng), &pc).unwrap();

        let same = assemble_total(&sys, 0.0, &penalty, &BathSpec::none()).unwrap();
        assert_eq!(same.to_matrix().unwrap(), sys.to_matrix().unwrap());

        let only = assemble_total(&PauliSum::new(6), 5.0, &penalty, &BathSpec::none()).unwrap();
        assert!(only.terms().all(|(c, _)| c == -5.0));

        let bath = BathSpec {
            n_bath: 1,
            h_bath: PauliSum::new(1),
            couplings: vec![BathCoupling {
                system_qubit: pc.b(1),
                axis: Axis::X,
                bath_op: PauliOp::single(1, 0, Axis::X),
                strength: 0.1,
            }],
        };
        let total = assemble_total(&PauliSum::new(6), 0.0, &PauliSum::new(6), &bath).unwrap();
        assert_eq!(total.n(), 7);
        assert_eq!(total.len(), 1);
        let (c, op) = total.terms().next().unwrap();
        assert_eq!(c, 0.1);
        assert_eq!(op.weight(), 2);
        assert_eq!(op.axis_at(6), Some(Axis::X));
    }

    #[test]
    fn apply_matches_dense() {
        let pc = FamilyCode::new(1).unwrap();
        let h = penalty_hamiltonian(&pc.code).unwrap();
        let m = h.to_matrix().unwrap();
        let psi: Vec<C64> = (0..64)
            .map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let out = h.apply(&psi).unwrap();
        let dense = &m * nalgebra::DVector::from_vec(psi);
        for (a, b) in out.iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bare_encoding_commutes_with_penalty() {
        let pc = FamilyCode::new(1).unwrap();
        let penalty = penalty_hamiltonian(&pc.code).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = ProblemSpec::random(2, &mut rng);
        assert!(termwise_commute(&bare_encoded_hamiltonian(&p, &pc).unwrap(), &penalty));
        let mut cal = PenaltyCalibration::new("k1");
        cal.insert(&pc.gauge_residue(Axis::X, 1, 2), 0.5);
        cal.insert(&pc.gauge_residue(Axis::Z, 1, 2), 0.5);
        let phys = physical_encoded_hamiltonian(&p, &pc, Some(&cal)).unwrap();
        assert!(!termwise_commute(&phys, &penalty));
    }

    #[test]
    fn schedule_interpolates_linearly() {
        let mut p1 = ProblemSpec::zero(2);
        p1.a[0] = 2.0;
        p1.set_coupling(Axis::X, 1, 2, 1.0);
        let s = Schedule {
            knots: vec![(0.0, ProblemSpec::zero(2)), (1.0, p1)],
        };
        s.validate().unwrap();
        let mid = s.at(0.25).unwrap();
        assert!((mid.a[0] - 0.5).abs() < 1e-15);
        assert!((mid.c[0][1] - 0.25).abs() < 1e-15);
        assert_eq!(s.at(-1.0).unwrap(), ProblemSpec::zero(2));
        assert_eq!(s.at(5.0).unwrap().a[0], 2.0);
        let bad = Schedule {
            knots: vec![(1.0, ProblemSpec::zero(2)), (0.5, ProblemSpec::zero(2))],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn problem_validation() {
        let mut p = ProblemSpec::zero(2);
        p.c[0][1] = 1.0;
        assert!(p.validate().is_err());
        p.c[1][0] = 1.0;
        p.validate().unwrap();
        p.d[0][0] = 1.0;
        assert!(p.validate().is_err());
        let json = serde_json::to_string(&ProblemSpec::zero(2)).unwrap();
        let back: ProblemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ProblemSpec::zero(2));
    }
}
