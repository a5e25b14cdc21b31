//! Generalized Bacon-Shor codes built from binary matrices, and the
//! `[[6k, 2k, 2]]` two-local family as a special case.
//!
//! Each nonzero cell of the matrix is a qubit (row-major order). Gauge
//! generators are `XX` between consecutive nonzero cells of a row and `ZZ`
//! between consecutive nonzero cells of a column.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::code::{CodeStructure, SubsystemCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::pauli::{Axis, PauliOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

/// Role of a qubit in the `[[6k, 2k, 2]]` layout; indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    B(usize),
    L(usize),
    R(usize),
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Role::B(i) => write!(f, "B{i}"),
            Role::L(i) => write!(f, "L{i}"),
            Role::R(i) => write!(f, "R{i}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LabeledLayout {
    pub matrix: BinaryMatrix,
    pub qubit_of_cell: BTreeMap<(usize, usize), usize>,
    pub cell_of_qubit: Vec<(usize, usize)>,
    /// Present only for the code family.
    pub role_of_qubit: Option<Vec<Role>>,
}

impl LabeledLayout {
    fn from_matrix(a: &BinaryMatrix) -> Self {
        let mut qubit_of_cell = BTreeMap::new();
        let mut cell_of_qubit = Vec::new();
        for r in 0..a.n_rows() {
            for c in a.row(r).iter_ones() {
                qubit_of_cell.insert((r, c), cell_of_qubit.len());
                cell_of_qubit.push((r, c));
            }
        }
        Self {
            matrix: a.clone(),
            qubit_of_cell,
            cell_of_qubit,
            role_of_qubit: None,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.cell_of_qubit.len()
    }
}

/// The `(2k+1) x (2k+1)` matrix whose first `2k` rows hold a 1 in the first
/// column and a 1 in column `i+1`, and whose last row is `0 1 1 ... 1`.
pub fn family_matrix(k: usize) -> Result<BinaryMatrix> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let size = 2 * k + 1;
    let mut a = BinaryMatrix::zeros(size, size);
    for i in 0..2 * k {
        a.set(i, 0, true);
        a.set(i, i + 1, true);
    }
    for c in 1..size {
        a.set(2 * k, c, true);
    }
    Ok(a)
}

/// Gauge group of the generalized Bacon-Shor code of `a`: row `XX` chains
/// first (row by row), then column `ZZ` chains (column by column).
pub fn code_from_matrix(a: &BinaryMatrix) -> Result<(SubsystemCodeSpec, LabeledLayout)> {
    if a.is_zero() {
        return Err(Error::Precondition("matrix has no nonzero cell".into()));
    }
    let layout = LabeledLayout::from_matrix(a);
    let n = layout.n_qubits();
    let mut gens = Vec::new();
    for r in 0..a.n_rows() {
        let qs: Vec<usize> = a.row(r).iter_ones().map(|c| layout.qubit_of_cell[&(r, c)]).collect();
        for w in qs.windows(2) {
            gens.push(PauliOp::x_on(n, [w[0], w[1]]));
        }
    }
    for c in 0..a.n_cols() {
        let qs: Vec<usize> = (0..a.n_rows())
            .filter(|&r| a.get(r, c))
            .map(|r| layout.qubit_of_cell[&(r, c)])
            .collect();
        for w in qs.windows(2) {
            gens.push(PauliOp::z_on(n, [w[0], w[1]]));
        }
    }
    let labels = layout
        .cell_of_qubit
        .iter()
        .enumerate()
        .map(|(q, (r, c))| (q, format!("({r},{c})")))
        .collect();
    Ok((SubsystemCodeSpec::new(n, gens)?.with_labels(labels), layout))
}

/// `[[|A|, rank A, min(d_row, d_col)]]`.
pub fn code_params(a: &BinaryMatrix) -> Result<CodeParams> {
    if a.is_zero() {
        return Err(Error::Precondition("matrix has no nonzero cell".into()));
    }
    let d_row = a.min_weight_in_span(true)?;
    let d_col = a.transpose().min_weight_in_span(true)?;
    Ok(CodeParams {
        n: a.weight(),
        k: a.rank(),
        d: d_row.min(d_col),
    })
}

/// The `[[6k, 2k, 2]]` code with its B/L/R qubit roles.
///
/// Row `i - 1` of the matrix holds `R_i` (first column) and `B_i`
/// (column `i`); the last row holds `L_1 .. L_2k`.
#[derive(Clone, Debug)]
pub struct FamilyCode {
    pub k: usize,
    pub code: SubsystemCodeSpec,
    pub layout: LabeledLayout,
    b: Vec<usize>,
    l: Vec<usize>,
    r: Vec<usize>,
}

impl FamilyCode {
    pub fn new(k: usize) -> Result<Self> {
        let a = family_matrix(k)?;
        let (code, mut layout) = code_from_matrix(&a)?;
        let m = 2 * k;
        let mut roles = Vec::with_capacity(layout.n_qubits());
        let (mut b, mut l, mut r) = (vec![0; m], vec![0; m], vec![0; m]);
        for (q, &(row, col)) in layout.cell_of_qubit.iter().enumerate() {
            let role = if row == m {
                l[col - 1] = q;
                Role::L(col)
            } else if col == 0 {
                r[row] = q;
                Role::R(row + 1)
            } else {
                debug_assert_eq!(col, row + 1);
                b[row] = q;
                Role::B(col)
            };
            roles.push(role);
        }
        let labels = roles
            .iter()
            .enumerate()
            .map(|(q, role)| (q, role.to_string()))
            .collect();
        layout.role_of_qubit = Some(roles);
        Ok(Self {
            k,
            code: code.with_labels(labels),
            layout,
            b,
            l,
            r,
        })
    }

    pub fn n(&self) -> usize {
        6 * self.k
    }

    /// Number of logical qubits, `2k`.
    pub fn m(&self) -> usize {
        2 * self.k
    }

    /// Qubit index of `B_i` (1-based `i`).
    pub fn b(&self, i: usize) -> usize {
        self.b[i - 1]
    }

    pub fn l(&self, i: usize) -> usize {
        self.l[i - 1]
    }

    pub fn r(&self, i: usize) -> usize {
        self.r[i - 1]
    }

    pub fn role(&self, q: usize) -> Role {
        self.layout.role_of_qubit.as_ref().expect("family layout has roles")[q]
    }

    fn ops(&self, factors: impl IntoIterator<Item = (usize, Axis)>) -> PauliOp {
        PauliOp::from_axes(self.n(), factors)
    }

    /// `X_{B_i} X_{L_i}`.
    pub fn x_bar(&self, i: usize) -> PauliOp {
        self.ops([(self.b(i), Axis::X), (self.l(i), Axis::X)])
    }

    /// `Z_{B_i} Z_{R_i}`.
    pub fn z_bar(&self, i: usize) -> PauliOp {
        self.ops([(self.b(i), Axis::Z), (self.r(i), Axis::Z)])
    }

    /// `i X-bar Z-bar = Y_{B_i} X_{L_i} Z_{R_i}`.
    pub fn y_bar(&self, i: usize) -> PauliOp {
        self.ops([(self.b(i), Axis::Y), (self.l(i), Axis::X), (self.r(i), Axis::Z)])
    }

    pub fn logicals(&self) -> Vec<(PauliOp, PauliOp)> {
        (1..=self.m()).map(|i| (self.x_bar(i), self.z_bar(i))).collect()
    }

    /// Nearest-neighbour chain generators:
    /// `X_{B_i}X_{R_i}`, `X_{L_i}X_{L_{i+1}}`, `Z_{B_i}Z_{L_i}`, `Z_{R_i}Z_{R_{i+1}}`,
    /// with the chain families running over `1 <= i <= 2k - 1`.
    pub fn chain_generators(&self) -> Vec<PauliOp> {
        let m = self.m();
        let mut gens = Vec::new();
        gens.extend((1..=m).map(|i| self.ops([(self.b(i), Axis::X), (self.r(i), Axis::X)])));
        gens.extend((1..m).map(|i| self.ops([(self.l(i), Axis::X), (self.l(i + 1), Axis::X)])));
        gens.extend((1..=m).map(|i| self.ops([(self.b(i), Axis::Z), (self.l(i), Axis::Z)])));
        gens.extend((1..m).map(|i| self.ops([(self.r(i), Axis::Z), (self.r(i + 1), Axis::Z)])));
        gens
    }

    /// The `4k - 2` canonical gauge pairs
    /// `(X_{L_i}X_{L_{i+1}}, prod_{j<=i} Z_{L_j}Z_{B_j})` and
    /// `(Z_{R_i}Z_{R_{i+1}}, X_{L_2k}^i prod_{j>i} X_{L_j}X_{B_j}X_{R_j})`,
    /// the exponent on `X_{L_2k}` taken mod 2.
    pub fn canonical_gauge_pairs(&self) -> Vec<(PauliOp, PauliOp)> {
        let m = self.m();
        let n = self.n();
        let mut pairs = Vec::new();
        for i in 1..m {
            let a = self.ops([(self.l(i), Axis::X), (self.l(i + 1), Axis::X)]);
            let b = PauliOp::z_on(n, (1..=i).flat_map(|j| [self.l(j), self.b(j)]));
            pairs.push((a, b));
        }
        for i in 1..m {
            let a = self.ops([(self.r(i), Axis::Z), (self.r(i + 1), Axis::Z)]);
            let mut qs: Vec<usize> = (i + 1..=m).flat_map(|j| [self.l(j), self.b(j), self.r(j)]).collect();
            if i % 2 == 1 {
                // X_{L_2k} appears in the product already; an odd power cancels it.
                qs.retain(|&q| q != self.l(m));
            }
            pairs.push((a, PauliOp::x_on(n, qs)));
        }
        pairs
    }

    /// All-X and all-Z on the `6k` qubits.
    pub fn stabilizers(&self) -> (PauliOp, PauliOp) {
        (
            PauliOp::x_on(self.n(), 0..self.n()),
            PauliOp::z_on(self.n(), 0..self.n()),
        )
    }

    /// `g` with `X_{B_i}X_{B_j} = (X-bar_i X-bar_j) g`, i.e. `X_{L_i}X_{L_j}`.
    pub fn gauge_residue(&self, axis: Axis, i: usize, j: usize) -> PauliOp {
        match axis {
            Axis::X => self.ops([(self.l(i), Axis::X), (self.l(j), Axis::X)]),
            Axis::Z => self.ops([(self.r(i), Axis::Z), (self.r(j), Axis::Z)]),
            Axis::Y => self.ops([
                (self.l(i), Axis::X),
                (self.l(j), Axis::X),
                (self.r(i), Axis::Z),
                (self.r(j), Axis::Z),
            ]),
        }
    }

    /// Physical two-body coupling `A_{B_i} A_{B_j}`.
    pub fn physical_coupling(&self, axis: Axis, i: usize, j: usize) -> PauliOp {
        self.ops([(self.b(i), axis), (self.b(j), axis)])
    }

    /// Logical product `A-bar_i A-bar_j` built from the bare logicals.
    pub fn bare_coupling(&self, axis: Axis, i: usize, j: usize) -> PauliOp {
        let single = |q| match axis {
            Axis::X => self.x_bar(q),
            Axis::Y => self.y_bar(q),
            Axis::Z => self.z_bar(q),
        };
        single(i).mul(&single(j)).expect("same register")
    }
}

pub fn family_logicals(k: usize) -> Result<Vec<(PauliOp, PauliOp)>> {
    Ok(FamilyCode::new(k)?.logicals())
}

pub fn canonical_gauge_pairs(k: usize) -> Result<Vec<(PauliOp, PauliOp)>> {
    Ok(FamilyCode::new(k)?.canonical_gauge_pairs())
}

/// The two stabilizers, checked against the derived structure: each must lie
/// in the stabilizer span and commute with every gauge generator.
pub fn family_stabilizers(k: usize) -> Result<(PauliOp, PauliOp)> {
    let pc = FamilyCode::new(k)?;
    let st = pc.code.derive_structure()?;
    let (sx, sz) = pc.stabilizers();
    for s in [&sx, &sz] {
        if !st.in_stabilizer_group(s) || !st.is_bare(s) {
            return Err(Error::CheckFailed(format!(
                "{s} is not a stabilizer of the k = {k} code"
            )));
        }
    }
    if st.s != 2 {
        return Err(Error::CheckFailed(format!("expected 2 stabilizers, derived {}", st.s)));
    }
    Ok((sx, sz))
}

/// Outcome of checking the canonical gauge pairs of one `k`.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalPairCheck {
    pub k: usize,
    pub pairs: usize,
    pub pairs_anticommute: bool,
    pub distinct_pairs_commute: bool,
    pub commute_with_logicals: bool,
    pub generate_gauge_group: bool,
}

impl CanonicalPairCheck {
    pub fn passed(&self) -> bool {
        self.pairs == 4 * self.k - 2
            && self.pairs_anticommute
            && self.distinct_pairs_commute
            && self.commute_with_logicals
            && self.generate_gauge_group
    }
}

pub fn check_canonical_pairs(pc: &FamilyCode, st: &CodeStructure) -> CanonicalPairCheck {
    let pairs = pc.canonical_gauge_pairs();
    let logicals = pc.logicals();
    let pairs_anticommute = pairs.iter().all(|(a, b)| a.anticommutes_with(b));
    let mut distinct_pairs_commute = true;
    for (i, (a1, b1)) in pairs.iter().enumerate() {
        for (a2, b2) in pairs.iter().skip(i + 1) {
            for (p, q) in [(a1, a2), (a1, b2), (b1, a2), (b1, b2)] {
                distinct_pairs_commute &= !p.anticommutes_with(q);
            }
        }
    }
    let commute_with_logicals = pairs.iter().all(|(a, b)| {
        logicals.iter().all(|(x, z)| {
            [a, b]
                .iter()
                .all(|g| !g.anticommutes_with(x) && !g.anticommutes_with(z))
        })
    });
    let (sx, sz) = pc.stabilizers();
    let mut span = crate::gf2::EchelonBasis::new();
    for p in pairs.iter().flat_map(|(a, b)| [a, b]).chain([&sx, &sz]) {
        span.insert(p.symplectic());
    }
    let gauge = pc.code.gauge_span();
    let generate_gauge_group = span.dim() == gauge.dim()
        && span.vectors().all(|v| gauge.contains(v))
        && pairs.iter().all(|(a, b)| st.in_gauge_group(a) && st.in_gauge_group(b));
    CanonicalPairCheck {
        k: pc.k,
        pairs: pairs.len(),
        pairs_anticommute,
        distinct_pairs_commute,
        commute_with_logicals,
        generate_gauge_group,
    }
}
