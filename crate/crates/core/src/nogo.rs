//! Empirical check of the weight lower bound for single-qubit bare logicals of
//! two-local CSS subsystem codes, and random scans over matrix codes.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::Bits;
use crate::code::{CodeStructure, SubsystemCodeSpec};
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, EchelonBasis};
use crate::matrix_code::{code_from_matrix, code_params};
use crate::pauli::{Axis, PauliOp};
use crate::search::{collect_up_to_weight, PauliFamily};

pub const SCAN_SIZE_CAP: usize = 6;

pub const INTERPRETATION: &str = "count = distinct two-local bare logicals of the opposite type, modulo \
stabilizers, whose logical action touches the logical qubit, restricted to the largest subset whose actions \
on that qubit pairwise commute; the bound is checked against the minimum weight of the single-qubit bare \
logical over its same-type stabilizer coset";

fn stabilizer_key(basis: &EchelonBasis, op: &PauliOp) -> Bits {
    basis.reduce(&op.symplectic())
}

fn require_two_local_css(code: &SubsystemCodeSpec) -> Result<()> {
    if code.is_css_two_local() {
        Ok(())
    } else {
        Err(Error::NotCssTwoLocal)
    }
}

/// Bare logicals of one type with weight `<= w_cap`, one per stabilizer class,
/// in enumeration order.
pub fn enumerate_bare_logicals(
    code: &SubsystemCodeSpec,
    st: &CodeStructure,
    w_cap: usize,
    family: PauliFamily,
) -> Result<Vec<PauliOp>> {
    require_two_local_css(code)?;
    if w_cap < 2 {
        return Err(Error::Precondition("w_cap must be at least 2".into()));
    }
    let stab = EchelonBasis::from_vectors(
        st.stabilizer_basis
            .iter()
            .map(PauliOp::symplectic)
            .collect::<Vec<_>>()
            .iter(),
    );
    let mut seen = std::collections::HashSet::new();
    Ok(collect_up_to_weight(code.n(), w_cap, family, |p| st.is_bare_logical(p))
        .into_iter()
        .filter(|p| seen.insert(stabilizer_key(&stab, p)))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundStatus {
    Holds,
    Violated,
    /// The minimum weight exceeded the search cap.
    Unresolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct NogoRow {
    pub logical: usize,
    /// Type of the single-qubit logical whose weight is bounded.
    pub logical_type: Axis,
    pub min_weight: Option<usize>,
    pub witness: Option<PauliOp>,
    pub count: usize,
    pub counted: Vec<PauliOp>,
    pub status: BoundStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct NogoReport {
    pub n: usize,
    pub k: usize,
    pub w_cap: usize,
    pub rows: Vec<NogoRow>,
    /// Same-type two-local bare logicals never share a qubit.
    pub support_disjoint: bool,
    pub overlapping_pairs: Vec<(PauliOp, PauliOp)>,
    pub interpretation: &'static str,
}

impl NogoReport {
    pub fn has_counterexample(&self) -> bool {
        !self.support_disjoint || self.rows.iter().any(|r| r.status == BoundStatus::Violated)
    }
}

/// Largest subset of `ops` whose actions on logical qubit `a` pairwise commute:
/// operators grouped by their letter there, the biggest group wins.
fn commuting_on(st: &CodeStructure, ops: &[PauliOp], a: usize) -> Vec<PauliOp> {
    let mut groups: BTreeMap<char, Vec<PauliOp>> = BTreeMap::new();
    for op in ops {
        if let Some(axis) = st.logical_action(op)[a] {
            groups.entry(axis.letter()).or_default().push(op.clone());
        }
    }
    groups.into_values().max_by_key(Vec::len).unwrap_or_default()
}

pub fn check_weight_bound(code: &SubsystemCodeSpec, w_cap: usize) -> Result<NogoReport> {
    let st = code.derive_structure()?;
    check_weight_bound_with(code, &st, w_cap)
}

pub fn check_weight_bound_with(code: &SubsystemCodeSpec, st: &CodeStructure, w_cap: usize) -> Result<NogoReport> {
    require_two_local_css(code)?;
    let (xs, zs) = st.css_stabilizers()?;
    let two_local_x = enumerate_bare_logicals(code, st, 2, PauliFamily::XType)?;
    let two_local_z = enumerate_bare_logicals(code, st, 2, PauliFamily::ZType)?;

    let mut rows = Vec::new();
    for (a, (xl, zl)) in st.logical_pairs.iter().enumerate() {
        for (logical, axis, subgroup, opposite) in [(xl, Axis::X, &xs, &two_local_z), (zl, Axis::Z, &zs, &two_local_x)]
        {
            let counted = commuting_on(st, opposite, a);
            let witness = match st.min_weight_in_stabilizer_coset(logical, Some(subgroup), w_cap) {
                Ok(w) => Some(w),
                Err(Error::WeightCapExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            let min_weight = witness.as_ref().map(PauliOp::weight);
            let status = match min_weight {
                None => BoundStatus::Unresolved,
                Some(w) if w >= counted.len() => BoundStatus::Holds,
                Some(_) => BoundStatus::Violated,
            };
            rows.push(NogoRow {
                logical: a,
                logical_type: axis,
                min_weight,
                witness,
                count: counted.len(),
                counted,
                status,
            });
        }
    }

    // Disjointness over every two-local bare logical, not just class representatives.
    let mut overlapping_pairs = Vec::new();
    for family in [PauliFamily::XType, PauliFamily::ZType] {
        let all: Vec<PauliOp> = collect_up_to_weight(code.n(), 2, family, |p| p.weight() == 2 && st.is_bare_logical(p));
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                if p.support().and_count(&q.support()) > 0 {
                    overlapping_pairs.push((p.clone(), q.clone()));
                }
            }
        }
    }
    Ok(NogoReport {
        n: code.n(),
        k: st.k,
        w_cap,
        rows,
        support_disjoint: overlapping_pairs.is_empty(),
        overlapping_pairs,
        interpretation: INTERPRETATION,
    })
}

/// Random square matrix with independent cells set with probability 1/2.
pub fn random_matrix<R: Rng>(size: usize, rng: &mut R) -> BinaryMatrix {
    let mut a = BinaryMatrix::zeros(size, size);
    for r in 0..size {
        for c in 0..size {
            a.set(r, c, rng.gen_bool(0.5));
        }
    }
    a
}

/// Whether the matrix code detects every single-qubit error.
pub fn passes_distance_filter(a: &BinaryMatrix) -> bool {
    !a.is_zero() && code_params(a).is_ok_and(|p| p.d >= 2)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanInstance {
    pub index: usize,
    pub matrix: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub report: NogoReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub size_max: usize,
    pub count: usize,
    pub seed: u64,
    pub w_cap: usize,
    pub rejected_by_filter: usize,
    pub passed: usize,
    pub counterexamples: Vec<usize>,
    pub unresolved_rows: usize,
    pub support_disjoint_everywhere: bool,
    /// Frequency of `(min_weight, count)` pairs over resolved rows.
    pub weight_count_histogram: BTreeMap<String, usize>,
    pub instances: Vec<ScanInstance>,
    pub interpretation: &'static str,
}

/// Draws `count` random square matrices of sizes `2..=size_max` passing the
/// distance filter and checks each induced code.
pub fn scan_matrices(size_max: usize, count: usize, seed: u64, w_cap: usize) -> Result<ScanReport> {
    if !(2..=SCAN_SIZE_CAP).contains(&size_max) {
        return Err(Error::Precondition(format!(
            "size_max must lie in 2..={SCAN_SIZE_CAP}, got {size_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices = Vec::with_capacity(count);
    let mut rejected = 0;
    while matrices.len() < count {
        let size = rng.gen_range(2..=size_max);
        let a = random_matrix(size, &mut rng);
        if passes_distance_filter(&a) {
            matrices.push(a);
        } else {
            rejected += 1;
        }
    }
    let mut report = scan_list(&matrices, w_cap)?;
    report.size_max = size_max;
    report.seed = seed;
    report.rejected_by_filter = rejected;
    Ok(report)
}

/// Runs the check on an explicit list of matrices.
pub fn scan_list(matrices: &[BinaryMatrix], w_cap: usize) -> Result<ScanReport> {
    let mut instances = Vec::with_capacity(matrices.len());
    let mut histogram = BTreeMap::new();
    let mut counterexamples = Vec::new();
    let mut unresolved_rows = 0;
    for (index, a) in matrices.iter().enumerate() {
        let params = code_params(a)?;
        let (code, _) = code_from_matrix(a)?;
        let report = check_weight_bound(&code, w_cap)?;
        for r in &report.rows {
            match r.min_weight {
                Some(w) => *histogram.entry(format!("({w},{})", r.count)).or_insert(0) += 1,
                None => unresolved_rows += 1,
            }
        }
        if report.has_counterexample() {
            counterexamples.push(index);
        }
        instances.push(ScanInstance {
            index,
            matrix: a.to_string(),
            n: params.n,
            k: params.k,
            d: params.d,
            report,
        });
    }
    Ok(ScanReport {
        size_max: matrices.iter().map(BinaryMatrix::n_rows).max().unwrap_or(0),
        count: matrices.len(),
        seed: 0,
        w_cap,
        rejected_by_filter: 0,
        passed: matrices.len() - counterexamples.len(),
        support_disjoint_everywhere: instances.iter().all(|i| i.report.support_disjoint),
        counterexamples,
        unresolved_rows,
        weight_count_histogram: histogram,
        instances,
        interpretation: INTERPRETATION,
    })
}
