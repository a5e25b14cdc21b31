//! Exact diagonalization of penalty Hamiltonians and the checks built on it:
//! ground-space structure, calibration of gauge expectation ratios, error
//! detection and the sector decomposition.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::code::CodeStructure;
use crate::error::{Error, Result};
use crate::gf2::EchelonBasis;
use crate::hamiltonian::{PauliSum, DEFAULT_ALPHA_FLOOR, DEFAULT_DENSE_CAP};
use crate::linalg::{components_of, czero, hermitian_eigen, op_norm, SparseHermitian};
use crate::matrix_code::FamilyCode;
use crate::pauli::{Axis, PauliOp, C64};

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
pub const DEFAULT_CHECK_TOL: f64 = 1e-10;

/// Registers up to this size may materialise full `2^n x 2^n` projectors.
pub const PROJECTOR_CAP: usize = 10;

#[derive(Clone, Debug)]
struct Block {
    indices: Vec<usize>,
    values: Vec<f64>,
    vectors: DMatrix<C64>,
}

/// Full spectrum of a Hermitian Pauli sum. The ground space is stored as an
/// isometry `V` with `Pi_0 = V V^dagger`.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    /// First level above the ground level minus the ground energy.
    pub gap: Option<f64>,
    /// Absolute tolerance used to group degenerate levels.
    pub degeneracy_tol: f64,
    pub warning: Option<String>,
    ground_basis: DMatrix<C64>,
    blocks: Vec<Block>,
}

/// A distinct eigenvalue and its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

pub fn diagonalize(h: &PauliSum, degeneracy_tol: f64) -> Result<SpectralResult> {
    diagonalize_capped(h, degeneracy_tol, DEFAULT_DENSE_CAP)
}

/// Diagonalizes `h` block by block over the connected components of its
/// off-diagonal graph in the computational basis. `degeneracy_tol` is relative
/// to `max(1, spectral range)`.
pub fn diagonalize_capped(h: &PauliSum, degeneracy_tol: f64, cap: usize) -> Result<SpectralResult> {
    if h.n() > cap {
        return Err(Error::DenseCap { qubits: h.n(), cap });
    }
    let sparse = SparseHermitian::from_pauli_sum(h);
    let dim = sparse.dim();
    let blocks: Vec<Block> = sparse
        .components()
        .into_iter()
        .map(|indices| {
            let (values, vectors) = hermitian_eigen(sparse.dense_block(&indices));
            Block {
                indices,
                values,
                vectors,
            }
        })
        .collect();

    let mut eigenvalues: Vec<f64> = blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
    eigenvalues.sort_by(f64::total_cmp);
    let lo = eigenvalues[0];
    let range = eigenvalues[dim - 1] - lo;
    let tol = degeneracy_tol * range.max(1.0);

    let mut ground_cols = Vec::new();
    for b in &blocks {
        for (c, &v) in b.values.iter().enumerate() {
            if v - lo <= tol {
                let mut col = vec![czero(); dim];
                for (i, &idx) in b.indices.iter().enumerate() {
                    col[idx] = b.vectors[(i, c)];
                }
                ground_cols.push(col);
            }
        }
    }
    let deg = ground_cols.len();
    let ground_basis = DMatrix::from_fn(dim, deg, |r, c| ground_cols[c][r]);
    let gap = eigenvalues.iter().find(|&&v| v - lo > tol).map(|&v| v - lo);
    let ground_energy = eigenvalues[..deg].iter().sum::<f64>() / deg as f64;
    let warning = match gap {
        Some(g) if g < 10.0 * tol => Some(format!(
            "gap {g:.3e} is within 10x the degeneracy tolerance {tol:.3e}; degeneracy count is ambiguous"
        )),
        _ => None,
    };
    Ok(SpectralResult {
        n: h.n(),
        eigenvalues,
        ground_energy,
        ground_degeneracy: deg,
        gap,
        degeneracy_tol: tol,
        warning,
        ground_basis,
        blocks,
    })
}

impl SpectralResult {
    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// Orthonormal ground-space basis as a `2^n x deg` isometry.
    pub fn ground_basis(&self) -> &DMatrix<C64> {
        &self.ground_basis
    }

    pub fn ground_projector(&self) -> Result<DMatrix<C64>> {
        if self.n > PROJECTOR_CAP {
            return Err(Error::DenseCap {
                qubits: self.n,
                cap: PROJECTOR_CAP,
            });
        }
        Ok(&self.ground_basis * self.ground_basis.adjoint())
    }

    /// Distinct eigenvalues, grouped with the degeneracy tolerance.
    pub fn levels(&self) -> Vec<Level> {
        let mut out: Vec<Level> = Vec::new();
        for &v in &self.eigenvalues {
            match out.last_mut() {
                Some(l) if v - l.value <= self.degeneracy_tol => l.multiplicity += 1,
                _ => out.push(Level {
                    value: v,
                    multiplicity: 1,
                }),
            }
        }
        out
    }

    /// Spectral projectors `(lambda_a, Pi_a)` for each distinct level.
    pub fn spectral_projectors(&self) -> Result<Vec<(f64, DMatrix<C64>)>> {
        if self.n > PROJECTOR_CAP {
            return Err(Error::DenseCap {
                qubits: self.n,
                cap: PROJECTOR_CAP,
            });
        }
        let levels = self.levels();
        let dim = self.dim();
        let mut projectors: Vec<DMatrix<C64>> = vec![DMatrix::zeros(dim, dim); levels.len()];
        for b in &self.blocks {
            for (c, &v) in b.values.iter().enumerate() {
                // Levels start at their smallest member, so the last one not above `v` holds it.
                let a = levels.iter().rposition(|l| l.value <= v).unwrap_or(0);
                let p = &mut projectors[a];
                for (i, &ri) in b.indices.iter().enumerate() {
                    let u = b.vectors[(i, c)];
                    for (j, &rj) in b.indices.iter().enumerate() {
                        p[(ri, rj)] += u * b.vectors[(j, c)].conj();
                    }
                }
            }
        }
        Ok(levels.iter().map(|l| l.value).zip(projectors).collect())
    }

    /// `P V` for the ground isometry `V`.
    pub fn apply_to_ground(&self, op: &PauliOp) -> DMatrix<C64> {
        let v = &self.ground_basis;
        let mut out = DMatrix::zeros(v.nrows(), v.ncols());
        for b in 0..v.nrows() {
            let (b2, ph) = op.act_on_basis(b);
            for c in 0..v.ncols() {
                out[(b2, c)] += ph * v[(b, c)];
            }
        }
        out
    }

    /// `V^dagger P V`, the compression of `op` to the ground space.
    pub fn compress(&self, op: &PauliOp) -> DMatrix<C64> {
        self.ground_basis.adjoint() * self.apply_to_ground(op)
    }

    pub fn compress_sum(&self, h: &PauliSum) -> DMatrix<C64> {
        let deg = self.ground_degeneracy;
        let mut out = DMatrix::zeros(deg, deg);
        for (c, p) in h.terms() {
            out += self.compress(p) * C64::new(c, 0.0);
        }
        out
    }

    /// `||Pi_0 P Pi_0||`.
    pub fn ground_norm(&self, op: &PauliOp) -> f64 {
        op_norm(&self.compress(op))
    }

    /// Ratio `alpha = tr(Pi_0 g Pi_0) / tr(Pi_0)` and the residual
    /// `||Pi_0 g Pi_0 - alpha Pi_0||`.
    pub fn proportionality(&self, op: &PauliOp) -> (f64, f64) {
        let m = self.compress(op);
        let alpha = m.trace().re / self.ground_degeneracy as f64;
        let residual =
            op_norm(&(m - DMatrix::identity(self.ground_degeneracy, self.ground_degeneracy) * C64::new(alpha, 0.0)));
        (alpha, residual)
    }

    /// `||S Pi_0 - Pi_0||`.
    pub fn fixes_ground(&self, op: &PauliOp) -> f64 {
        op_norm(&(self.apply_to_ground(op) - &self.ground_basis))
    }

    /// `||[P, Pi_0]||` for a Hermitian Pauli `P`, equal to `||(1 - Pi_0) P V||`.
    pub fn commutator_norm(&self, op: &PauliOp) -> f64 {
        let pv = self.apply_to_ground(op);
        let inside = &self.ground_basis * (self.ground_basis.adjoint() * &pv);
        op_norm(&(pv - inside))
    }
}

/// One named pass/fail assertion with its measured value.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    fn below(name: String, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: value < tolerance,
            value,
            tolerance,
        }
    }
}

fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| !c.passed)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorAlpha {
    pub op: PauliOp,
    pub alpha: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundSpaceReport {
    /// Penalty terms are pure X or Z type and generate the full gauge group.
    pub hypothesis_satisfied: bool,
    pub hypothesis_note: Option<String>,
    pub expected_degeneracy: usize,
    pub degeneracy: usize,
    pub generator_alphas: Vec<GeneratorAlpha>,
    pub checks: Vec<Check>,
}

impl GroundSpaceReport {
    pub fn passed(&self) -> bool {
        self.hypothesis_satisfied && first_failure(&self.checks).is_none()
    }

    /// Converts a failing report into an error naming the first failed check.
    pub fn into_result(self) -> Result<Self> {
        if !self.hypothesis_satisfied {
            return Err(Error::CheckFailed(format!(
                "hypothesis violated: {}",
                self.hypothesis_note
                    .as_deref()
                    .unwrap_or("penalty terms do not generate the gauge group")
            )));
        }
        if let Some(c) = first_failure(&self.checks) {
            return Err(Error::CheckFailed(format!(
                "{}: measured {:.3e}, tolerance {:.1e}",
                c.name, c.value, c.tolerance
            )));
        }
        Ok(self)
    }
}

/// Checks the three ground-space statements: stabilizers fix `Pi_0`, the
/// degeneracy is `2^k`, and each penalty term compresses to a multiple of
/// `Pi_0`.
pub fn verify_ground_space(
    st: &CodeStructure,
    penalty: &PauliSum,
    result: &SpectralResult,
    tol: f64,
) -> Result<GroundSpaceReport> {
    if penalty.n() != st.n || result.n != st.n {
        return Err(Error::DimensionMismatch {
            expected: st.n,
            found: penalty.n(),
        });
    }
    let mut note = None;
    if let Some((_, p)) = penalty.terms().find(|(_, p)| !(p.is_x_type() || p.is_z_type())) {
        note = Some(format!("penalty term {p} is not X-type or Z-type"));
    } else {
        let span = EchelonBasis::from_vectors(penalty.terms().map(|(_, p)| p.symplectic()).collect::<Vec<_>>().iter());
        let full = st.generators().iter().all(|g| span.contains(&g.symplectic()));
        if !full {
            note = Some(format!(
                "penalty terms span a subgroup of rank {} inside the gauge group",
                span.dim()
            ));
        }
    }

    let mut checks = Vec::new();
    let expected = 1usize << st.k;
    checks.push(Check {
        name: "ground degeneracy".into(),
        passed: result.ground_degeneracy == expected,
        value: result.ground_degeneracy as f64,
        tolerance: expected as f64,
    });
    let (xs, zs) = st.css_stabilizers()?;
    for s in xs.iter().chain(&zs) {
        checks.push(Check::below(
            format!("stabilizer {s} fixes ground space"),
            result.fixes_ground(s),
            tol,
        ));
    }
    let mut generator_alphas = Vec::new();
    for (_, g) in penalty.terms() {
        let (alpha, residual) = result.proportionality(g);
        checks.push(Check::below(
            format!("generator {g} proportional to ground projector"),
            residual,
            tol,
        ));
        generator_alphas.push(GeneratorAlpha {
            op: g.clone(),
            alpha,
            residual,
        });
    }
    Ok(GroundSpaceReport {
        hypothesis_satisfied: note.is_none(),
        hypothesis_note: note,
        expected_degeneracy: expected,
        degeneracy: result.ground_degeneracy,
        generator_alphas,
        checks,
    })
}

/// Ground-space expectation ratios of gauge elements, keyed by their phase-free
/// Pauli string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyCalibration {
    pub code_id: String,
    pub alphas: BTreeMap<String, f64>,
}

impl PenaltyCalibration {
    pub fn new(code_id: impl Into<String>) -> Self {
        Self {
            code_id: code_id.into(),
            alphas: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, op: &PauliOp, alpha: f64) {
        self.alphas.insert(op.unsigned().to_string(), alpha);
    }

    pub fn get(&self, op: &PauliOp) -> Option<f64> {
        self.alphas.get(&op.unsigned().to_string()).copied()
    }

    pub fn alpha(&self, op: &PauliOp) -> Result<f64> {
        self.get(op)
            .ok_or_else(|| Error::MissingCalibration(op.unsigned().to_string()))
    }

    pub fn coupling_alpha(&self, pc: &FamilyCode, axis: Axis, i: usize, j: usize) -> Result<f64> {
        self.alpha(&pc.gauge_residue(axis, i, j))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CalibrationOptions {
    pub alpha_floor: f64,
    pub tol: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            alpha_floor: DEFAULT_ALPHA_FLOOR,
            tol: DEFAULT_CHECK_TOL,
        }
    }
}

/// Measures `alpha` for each requested gauge element from the ground space of
/// the penalty Hamiltonian.
pub fn calibrate(
    st: &CodeStructure,
    result: &SpectralResult,
    requested: &[PauliOp],
    code_id: &str,
    opts: CalibrationOptions,
) -> Result<PenaltyCalibration> {
    let mut cal = PenaltyCalibration::new(code_id);
    for g in requested {
        if !st.in_gauge_group(g) {
            return Err(Error::NotInGauge(g.to_string()));
        }
        let g = g.unsigned();
        let (alpha, residual) = result.proportionality(&g);
        if residual >= opts.tol {
            return Err(Error::CheckFailed(format!(
                "{g} is not proportional to the ground projector (residual {residual:.3e})"
            )));
        }
        if alpha.abs() < opts.alpha_floor {
            return Err(Error::VanishingAlpha {
                element: g.to_string(),
                alpha,
                floor: opts.alpha_floor,
            });
        }
        cal.insert(&g, alpha);
    }
    Ok(cal)
}

/// Gauge elements needed to encode any problem on the code family: every
/// generator, then the XX, ZZ and YY residues of every pair `i < j`.
pub fn encoding_calibration_targets(pc: &FamilyCode) -> Vec<PauliOp> {
    let mut out: Vec<PauliOp> = pc.code.gauge_generators().to_vec();
    for axis in [Axis::X, Axis::Z, Axis::Y] {
        for i in 1..=pc.m() {
            for j in i + 1..=pc.m() {
                out.push(pc.gauge_residue(axis, i, j));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorDetectionReport {
    pub tolerance: f64,
    pub max_residual: f64,
    pub worst: String,
    pub residuals: Vec<(String, f64)>,
}

impl ErrorDetectionReport {
    pub fn passed(&self) -> bool {
        self.max_residual < self.tolerance
    }
}

/// `||Pi_0 sigma Pi_0||` for all `3n` one-local Paulis.
pub fn error_detection_check(result: &SpectralResult, n: usize, tol: f64) -> Result<ErrorDetectionReport> {
    if n != result.n {
        return Err(Error::DimensionMismatch {
            expected: result.n,
            found: n,
        });
    }
    let mut residuals = Vec::with_capacity(3 * n);
    for q in 0..n {
        for axis in Axis::ALL {
            let op = PauliOp::single(n, q, axis);
            residuals.push((op.to_string(), result.ground_norm(&op)));
        }
    }
    let (worst, max_residual) = residuals
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .unwrap_or_else(|| ("I".into(), 0.0));
    Ok(ErrorDetectionReport {
        tolerance: tol,
        max_residual,
        worst,
        residuals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorRow {
    /// Eigenvalues of the Z-type logicals.
    pub z: Vec<i8>,
    /// Eigenvalues of the Z-type stabilizers.
    pub s: Vec<i8>,
    pub dim: usize,
    pub ground_energy: f64,
    pub gap: Option<f64>,
    pub connected: bool,
    pub min_ground_amplitude: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub z_logicals: Vec<PauliOp>,
    pub z_stabilizers: Vec<PauliOp>,
    pub sectors: Vec<SectorRow>,
    pub global_ground_energy: f64,
    pub block_diagonal: bool,
    pub nonpositive_off_diagonal: bool,
    pub irreducible: bool,
    pub unique_positive_ground: bool,
    pub ground_in_trivial_syndrome: bool,
    pub identical_across_z: bool,
    pub failures: Vec<String>,
}

impl SectorReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn signs(ops: &[PauliOp], b: usize) -> Vec<i8> {
    ops.iter()
        .map(|p| {
            if (p.z_bits().low_word() & b as u64).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Splits the computational basis by the eigenvalues of the Z-type logicals
/// and Z-type stabilizers and checks the Perron-Frobenius structure of each
/// block.
pub fn sector_analysis(st: &CodeStructure, penalty: &PauliSum, tol: f64) -> Result<SectorReport> {
    if penalty.n() > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCap {
            qubits: penalty.n(),
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let (_, z_stabilizers) = st.css_stabilizers()?;
    let mut z_logicals = Vec::new();
    let mut x_logicals = Vec::new();
    for (xl, zl) in &st.logical_pairs {
        if !xl.is_x_type() || !zl.is_z_type() {
            return Err(Error::Precondition(format!("logical pair ({xl}, {zl}) is not CSS")));
        }
        x_logicals.push(xl.clone());
        z_logicals.push(zl.clone());
    }
    let sparse = SparseHermitian::from_pauli_sum(penalty);
    let dim = sparse.dim();
    let label = |b: usize| (signs(&z_logicals, b), signs(&z_stabilizers, b));

    let mut failures = Vec::new();
    let mut by_label: BTreeMap<(Vec<i8>, Vec<i8>), Vec<usize>> = BTreeMap::new();
    for b in 0..dim {
        by_label.entry(label(b)).or_default().push(b);
    }

    let mut block_diagonal = true;
    let mut nonpositive = true;
    for (r, c, v) in sparse.off_diagonal() {
        if label(r) != label(c) {
            block_diagonal = false;
        }
        if v.re > tol || v.im.abs() > tol {
            nonpositive = false;
        }
    }
    if !block_diagonal {
        failures.push("penalty couples different sectors".into());
    }
    if !nonpositive {
        failures.push("penalty has a positive or complex off-diagonal entry".into());
    }

    let mut sectors = Vec::new();
    let mut irreducible = true;
    let mut unique_positive = true;
    for ((z, s), indices) in &by_label {
        let mut pos = vec![usize::MAX; dim];
        for (i, &b) in indices.iter().enumerate() {
            pos[b] = i;
        }
        let edges: Vec<(usize, usize)> = sparse
            .off_diagonal()
            .filter(|(r, c, _)| pos[*r] != usize::MAX && pos[*c] != usize::MAX)
            .map(|(r, c, _)| (pos[r], pos[c]))
            .collect();
        let connected = components_of(indices.len(), edges).len() == 1;
        let (values, vectors) = hermitian_eigen(sparse.dense_block(indices));
        let gap = values.get(1).map(|v| v - values[0]);
        let v0 = vectors.column(0);
        let pivot = v0.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).copied().unwrap();
        let phase = pivot.conj() / pivot.norm();
        let min_amp = v0
            .iter()
            .map(|a| {
                let a = a * phase;
                if a.im.abs() > tol {
                    f64::NEG_INFINITY
                } else {
                    a.re
                }
            })
            .fold(f64::INFINITY, f64::min);
        let tag = format!("sector z={z:?} s={s:?}");
        if !connected {
            irreducible = false;
            failures.push(format!("{tag} is reducible"));
        }
        if gap.is_some_and(|g| g <= tol) || min_amp <= tol {
            unique_positive = false;
            failures.push(format!("{tag} has no unique positive ground state"));
        }
        sectors.push(SectorRow {
            z: z.clone(),
            s: s.clone(),
            dim: indices.len(),
            ground_energy: values[0],
            gap,
            connected,
            min_ground_amplitude: min_amp,
        });
    }

    let global = sectors.iter().map(|r| r.ground_energy).fold(f64::INFINITY, f64::min);
    let trivial = |s: &[i8]| s.iter().all(|&x| x == 1);
    let mut ground_trivial = true;
    for r in &sectors {
        if r.ground_energy - global <= tol && !trivial(&r.s) {
            ground_trivial = false;
            failures.push(format!("global ground energy reached at z={:?} s={:?}", r.z, r.s));
        }
        if !trivial(&r.s) {
            let base = sectors
                .iter()
                .find(|q| q.z == r.z && trivial(&q.s))
                .map(|q| q.ground_energy);
            if base.is_none_or(|e| r.ground_energy - e <= tol) {
                ground_trivial = false;
                failures.push(format!(
                    "sector z={:?} s={:?} is not above its trivial-syndrome partner",
                    r.z, r.s
                ));
            }
        }
    }

    // Equal-s blocks are related by products of X-type logicals, which flip z
    // and commute with the penalty.
    let mut identical = true;
    let reference = vec![1i8; z_logicals.len()];
    for ((z, s), indices) in &by_label {
        let mut mask = 0usize;
        for (i, &zi) in z.iter().enumerate() {
            if zi != reference[i] {
                mask ^= x_logicals[i].x_bits().low_word() as usize;
            }
        }
        let Some(base) = by_label.get(&(reference.clone(), s.clone())) else {
            identical = false;
            continue;
        };
        let same = indices.len() == base.len()
            && base.iter().all(|&r| {
                base.iter()
                    .all(|&c| (sparse.get(r ^ mask, c ^ mask) - sparse.get(r, c)).norm() <= tol)
            })
            && base.iter().all(|&b| label(b ^ mask) == (z.clone(), s.clone()));
        if !same {
            identical = false;
            failures.push(format!("block z={z:?} s={s:?} differs from z={reference:?}"));
        }
    }

    Ok(SectorReport {
        z_logicals,
        z_stabilizers,
        sectors,
        global_ground_energy: global,
        block_diagonal,
        nonpositive_off_diagonal: nonpositive,
        irreducible,
        unique_positive_ground: unique_positive,
        ground_in_trivial_syndrome: ground_trivial,
        identical_across_z: identical,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{
        bare_encoded_hamiltonian, penalty_hamiltonian, physical_encoded_hamiltonian, ProblemSpec,
    };
    use crate::linalg::hermitian_eigen;
    use crate::matrix_code::FamilyCode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Ground projector from a plain dense eigendecomposition of the whole matrix.
    fn oracle_projector(h: &PauliSum) -> (Vec<f64>, DMatrix<C64>) {
        let (vals, vecs) = hermitian_eigen(h.to_matrix().unwrap());
        let deg = vals.iter().take_while(|&&v| v - vals[0] < 1e-8).count();
        let v = vecs.columns(0, deg).into_owned();
        (vals, &v * v.adjoint())
    }

    fn k1() -> (FamilyCode, CodeStructure, PauliSum, SpectralResult) {
        let pc = FamilyCode::new(1).unwrap();
        let st = pc.code.derive_structure().unwrap();
        let hp = penalty_hamiltonian(&pc.code).unwrap();
        let res = diagonalize(&hp, DEFAULT_DEGENERACY_TOL).unwrap();
        (pc, st, hp, res)
    }

    #[test]
    fn minus_z_ground_state() {
        let h = PauliSum::from_terms(1, [(-1.0, PauliOp::single(1, 0, Axis::Z))]).unwrap();
        let r = diagonalize(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(r.ground_energy, -1.0);
        assert_eq!(r.ground_degeneracy, 1);
        assert_eq!(r.gap, Some(2.0));
    }

    #[test]
    fn block_spectrum_matches_dense_oracle() {
        let (_, _, hp, res) = k1();
        let (vals, proj) = oracle_projector(&hp);
        for (a, b) in res.eigenvalues.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-10);
        }
        let p = res.ground_projector().unwrap();
        assert!(op_norm(&(p - proj)) < 1e-10);
        assert_eq!(res.ground_degeneracy, 4);
    }

    #[test]
    fn projector_is_idempotent_with_integer_trace() {
        let (_, _, _, res) = k1();
        let p = res.ground_projector().unwrap();
        assert!(op_norm(&(&p * &p - &p)) < 1e-12);
        assert!(op_norm(&(&p - p.adjoint())) < 1e-12);
        assert!((p.trace().re - 4.0).abs() < 1e-12);
        let total: DMatrix<C64> = res.spectral_projectors().unwrap().into_iter().map(|(_, p)| p).sum();
        assert!(op_norm(&(total - DMatrix::identity(64, 64))) < 1e-10);
    }

    #[test]
    fn k1_alpha_matches_oracle_and_worked_example() {
        let (pc, _, hp, res) = k1();
        let (_, proj) = oracle_projector(&hp);
        for g in pc.code.gauge_generators() {
            let (alpha, residual) = res.proportionality(g);
            let oracle = (&proj * g.to_dense() * &proj).trace().re / 4.0;
            assert!((alpha - oracle).abs() < 1e-10);
            assert!(residual < 1e-10);
            assert!((alpha - 0.6667).abs() < 1e-3, "{alpha}");
        }
    }

    #[test]
    fn k1_ground_space_checks_pass() {
        let (_, st, hp, res) = k1();
        let rep = verify_ground_space(&st, &hp, &res, DEFAULT_CHECK_TOL).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        assert_eq!(rep.degeneracy, 4);
        assert_eq!(rep.checks.len(), 1 + 2 + 6);
        let xs: Vec<f64> = rep
            .generator_alphas
            .iter()
            .filter(|g| g.op.is_x_type())
            .map(|g| g.alpha)
            .collect();
        let zs: Vec<f64> = rep
            .generator_alphas
            .iter()
            .filter(|g| g.op.is_z_type())
            .map(|g| g.alpha)
            .collect();
        for (a, b) in xs.iter().zip(&zs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn dropping_a_generator_violates_the_hypothesis() {
        let (pc, st, hp, _) = k1();
        let dropped = PauliOp::x_on(6, [pc.b(2), pc.r(2)]);
        let mut reduced = PauliSum::new(6);
        for (c, p) in hp.terms() {
            if *p != dropped {
                reduced.add(c, p.clone()).unwrap();
            }
        }
        assert_eq!(reduced.len(), 5);
        let res = diagonalize(&reduced, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!(res.ground_degeneracy > 4);
        let rep = verify_ground_space(&st, &reduced, &res, DEFAULT_CHECK_TOL).unwrap();
        assert!(!rep.hypothesis_satisfied);
        assert!(!rep.passed());
        assert!(rep.into_result().unwrap_err().to_string().contains("hypothesis"));
    }

    #[test]
    fn calibration_rules() {
        let (pc, st, _, res) = k1();
        let opts = CalibrationOptions::default();
        let id = PauliOp::identity(6);
        let cal = calibrate(&st, &res, std::slice::from_ref(&id), "k1", opts).unwrap();
        assert!((cal.alpha(&id).unwrap() - 1.0).abs() < 1e-12);
        let outside = pc.x_bar(1);
        assert!(matches!(
            calibrate(&st, &res, &[outside], "k1", opts),
            Err(Error::NotInGauge(_))
        ));

        let targets = encoding_calibration_targets(&pc);
        let cal = calibrate(&st, &res, &targets, "k1", opts).unwrap();
        assert!(cal.alphas.values().all(|a| a.abs() <= 1.0 + 1e-12));
        let ax = cal.coupling_alpha(&pc, Axis::X, 1, 2).unwrap();
        let az = cal.coupling_alpha(&pc, Axis::Z, 1, 2).unwrap();
        assert!((ax - 0.6667).abs() < 1e-3);
        assert!((ax - az).abs() < 1e-10);
        let back = PenaltyCalibration::from_json(&cal.to_json().unwrap()).unwrap();
        assert_eq!(back, cal);
    }

    #[test]
    fn alpha_is_constant_on_stabilizer_cosets() {
        let (pc, st, _, res) = k1();
        let (sx, sz) = pc.stabilizers();
        for g in pc.code.gauge_generators() {
            let (a, _) = res.proportionality(g);
            for s in [&sx, &sz] {
                let gs = g.mul(s).unwrap();
                if gs.is_hermitian() && st.in_gauge_group(&gs) {
                    let (b, _) = res.proportionality(&gs.unsigned());
                    let sign = if gs.phase() == 2 { -1.0 } else { 1.0 };
                    assert!((a - sign * b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn error_detection_k1() {
        let (pc, _, _, res) = k1();
        let rep = error_detection_check(&res, 6, DEFAULT_CHECK_TOL).unwrap();
        assert_eq!(rep.residuals.len(), 18);
        assert!(rep.passed(), "{} {}", rep.worst, rep.max_residual);
        let dressed = PauliOp::x_on(6, [pc.b(1), pc.b(2)]);
        assert!(res.ground_norm(&dressed) > 0.1);
        assert!((res.ground_norm(&PauliOp::identity(6)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bare_logicals_commute_with_ground_projector() {
        let (pc, _, _, res) = k1();
        let p = res.ground_projector().unwrap();
        for (x, z) in pc.logicals() {
            for l in [x, z] {
                let dense = op_norm(&(l.to_dense() * &p - &p * l.to_dense()));
                assert!(dense < 1e-10);
                assert!(res.commutator_norm(&l) < 1e-10);
            }
        }
        let one = PauliOp::single(6, 0, Axis::X);
        let dense = op_norm(&(one.to_dense() * &p - &p * one.to_dense()));
        assert!((res.commutator_norm(&one) - dense).abs() < 1e-10);
    }

    #[test]
    fn effective_hamiltonian_identity() {
        let (pc, st, _, res) = k1();
        let cal = calibrate(
            &st,
            &res,
            &encoding_calibration_targets(&pc),
            "k1",
            CalibrationOptions::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = ProblemSpec::random(2, &mut rng);
        let bare = res.compress_sum(&bare_encoded_hamiltonian(&p, &pc).unwrap());
        let phys = res.compress_sum(&physical_encoded_hamiltonian(&p, &pc, Some(&cal)).unwrap());
        assert!(op_norm(&(&bare - &phys)) < 1e-8);
        let raw = res.compress_sum(&physical_encoded_hamiltonian(&p, &pc, None).unwrap());
        assert!(op_norm(&(&bare - &raw)) > 1e-2);
    }

    #[test]
    fn k1_sectors() {
        let (_, st, hp, _) = k1();
        let rep = sector_analysis(&st, &hp, DEFAULT_CHECK_TOL).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.sectors.len(), 8);
        assert!(rep.sectors.iter().all(|r| r.dim == 8));
        assert!(rep.identical_across_z);
    }
}
