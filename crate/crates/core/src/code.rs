//! Subsystem stabilizer codes defined by a list of gauge generators.
//!
//! Everything here works in the phase-free quotient of the Pauli group, so
//! membership questions ("is this operator in the gauge group?") ignore phases.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, EchelonBasis};
use crate::pauli::{Axis, PauliOp};
use crate::search::{first_by_weight, PauliFamily};

/// Default weight cap for distance and representative searches.
pub const DEFAULT_W_MAX: usize = 4;

/// Hard cap on the size of a stabilizer group enumerated for coset searches.
const COSET_CAP_BITS: usize = 24;

#[derive(Clone, Debug)]
pub struct SubsystemCodeSpec {
    n: usize,
    gauge_generators: Vec<PauliOp>,
    labels: BTreeMap<usize, String>,
}

/// On-disk form: `{"n": 6, "generators": ["X0 X1", ...], "labels": {"0": "R1"}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub generators: Vec<String>,
    #[serde(default)]
    pub labels: BTreeMap<usize, String>,
}

impl SubsystemCodeSpec {
    pub fn new(n: usize, gauge_generators: Vec<PauliOp>) -> Result<Self> {
        if let Some(g) = gauge_generators.iter().find(|g| g.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.n(),
            });
        }
        Ok(Self {
            n,
            gauge_generators: gauge_generators.into_iter().map(|g| g.unsigned()).collect(),
            labels: BTreeMap::new(),
        })
    }

    pub fn with_labels(mut self, labels: BTreeMap<usize, String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gauge_generators(&self) -> &[PauliOp] {
        &self.gauge_generators
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    /// Label of a qubit, falling back to `q<index>`.
    pub fn label(&self, q: usize) -> String {
        self.labels.get(&q).cloned().unwrap_or_else(|| format!("q{q}"))
    }

    /// Renders an operator with qubit labels, e.g. `X_B1 X_L1`.
    pub fn labeled(&self, op: &PauliOp) -> String {
        if op.is_identity() {
            return "I".into();
        }
        op.support()
            .iter_ones()
            .map(|q| format!("{}_{}", op.axis_at(q).unwrap().letter(), self.label(q)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            n: self.n,
            generators: self.gauge_generators.iter().map(|g| g.to_string()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self> {
        let gens = file
            .generators
            .iter()
            .map(|s| PauliOp::parse(file.n, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(file.n, gens)?.with_labels(file.labels.clone()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn gauge_span(&self) -> EchelonBasis {
        EchelonBasis::from_vectors(
            self.gauge_generators
                .iter()
                .map(PauliOp::symplectic)
                .collect::<Vec<_>>()
                .iter(),
        )
    }

    /// Basis of every Pauli commuting with all gauge generators: the kernel of
    /// the symplectic constraint system, `2n - rank` vectors.
    pub fn centralizer_basis(&self) -> Vec<PauliOp> {
        let n = self.n;
        // Row (z || x) dotted with (x' || z') is the symplectic product.
        let rows = self
            .gauge_generators
            .iter()
            .map(|g| g.z_bits().concat(g.x_bits()))
            .collect();
        let m = BinaryMatrix::from_rows(2 * n, rows).expect("generator lengths checked");
        m.kernel().iter().map(|v| PauliOp::from_symplectic(n, v)).collect()
    }

    /// True iff every supplied generator has weight at most two and is purely
    /// X-type or purely Z-type.
    pub fn is_css_two_local(&self) -> bool {
        self.gauge_generators
            .iter()
            .all(|g| g.weight() <= 2 && (g.is_x_type() || g.is_z_type()))
    }

    pub fn is_css(&self) -> bool {
        self.gauge_generators.iter().all(|g| g.is_x_type() || g.is_z_type())
    }

    pub fn derive_structure(&self) -> Result<CodeStructure> {
        CodeStructure::derive(self)
    }

    pub fn code_distance(&self, w_max: usize) -> Result<usize> {
        Ok(self.derive_structure()?.distance(w_max)?.weight())
    }

    pub fn min_weight_bare_representative(&self, logical: &PauliOp, w_max: usize) -> Result<PauliOp> {
        self.derive_structure()?.min_weight_bare_representative(logical, w_max)
    }
}

/// Derived stabilizer, logical and gauge structure of a subsystem code.
#[derive(Clone, Debug, Serialize)]
pub struct CodeStructure {
    pub n: usize,
    /// Logical qubits.
    pub k: usize,
    /// Independent stabilizer generators.
    pub s: usize,
    /// Gauge qubits.
    pub g: usize,
    pub stabilizer_basis: Vec<PauliOp>,
    /// `(X-bar, Z-bar)` pairs; for CSS codes the first member is X-type.
    pub logical_pairs: Vec<(PauliOp, PauliOp)>,
    pub gauge_pairs: Vec<(PauliOp, PauliOp)>,
    /// Supplied generators that were linearly dependent on earlier ones.
    pub dependent_generators: usize,
    #[serde(skip)]
    gauge_span: EchelonBasis,
    #[serde(skip)]
    stabilizer_span: EchelonBasis,
    #[serde(skip)]
    generators: Vec<PauliOp>,
}

/// Phase-free product.
fn xor_op(a: &PauliOp, b: &PauliOp) -> PauliOp {
    PauliOp::from_parts(a.x_bits().xor(b.x_bits()), a.z_bits().xor(b.z_bits()), 0).unwrap()
}

/// Symplectic Gram-Schmidt: takes elements in order, pairs each with the first
/// later element it anticommutes with, and symplectically orthogonalises the
/// rest against the pair. Elements that commute with everything left are dropped.
fn symplectic_pairs(mut pool: Vec<PauliOp>) -> Vec<(PauliOp, PauliOp)> {
    let mut pairs = Vec::new();
    while !pool.is_empty() {
        let a = pool.remove(0);
        let Some(j) = pool.iter().position(|c| a.anticommutes_with(c)) else {
            continue;
        };
        let b = pool.remove(j);
        for c in pool.iter_mut() {
            let ca = c.anticommutes_with(&a);
            let cb = c.anticommutes_with(&b);
            if cb {
                *c = xor_op(c, &a);
            }
            if ca {
                *c = xor_op(c, &b);
            }
        }
        pairs.push((a, b));
    }
    pairs
}

impl CodeStructure {
    pub fn derive(code: &SubsystemCodeSpec) -> Result<Self> {
        let n = code.n;
        let mut gauge_span = EchelonBasis::new();
        let mut independent = Vec::new();
        for g in &code.gauge_generators {
            if gauge_span.insert(g.symplectic()) {
                independent.push(g.clone());
            }
        }
        let r = independent.len();

        // Stabilizers: combinations of generators commuting with every generator.
        let mut omega = BinaryMatrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                omega.set(i, j, independent[i].anticommutes_with(&independent[j]));
            }
        }
        let stabilizer_basis: Vec<PauliOp> = omega
            .kernel()
            .iter()
            .map(|c| {
                c.iter_ones()
                    .fold(PauliOp::identity(n), |acc, i| xor_op(&acc, &independent[i]))
            })
            .collect();
        let stabilizer_span = EchelonBasis::from_vectors(
            stabilizer_basis
                .iter()
                .map(PauliOp::symplectic)
                .collect::<Vec<_>>()
                .iter(),
        );

        let orient = |(a, b): (PauliOp, PauliOp)| {
            if a.is_z_type() && b.is_x_type() && !a.is_identity() {
                (b, a)
            } else {
                (a, b)
            }
        };
        let logical_pairs: Vec<_> = symplectic_pairs(code.centralizer_basis())
            .into_iter()
            .map(orient)
            .collect();
        let gauge_pairs: Vec<_> = symplectic_pairs(independent).into_iter().map(orient).collect();

        let structure = Self {
            n,
            k: logical_pairs.len(),
            s: stabilizer_basis.len(),
            g: gauge_pairs.len(),
            stabilizer_basis,
            logical_pairs,
            gauge_pairs,
            dependent_generators: code.gauge_generators.len() - r,
            gauge_span,
            stabilizer_span,
            generators: code.gauge_generators.clone(),
        };
        if structure.k + structure.s + structure.g != n {
            return Err(Error::CheckFailed(format!(
                "n = {n} but k + s + g = {} + {} + {}",
                structure.k, structure.s, structure.g
            )));
        }
        Ok(structure)
    }

    pub fn in_gauge_group(&self, op: &PauliOp) -> bool {
        self.gauge_span.contains(&op.symplectic())
    }

    pub fn in_stabilizer_group(&self, op: &PauliOp) -> bool {
        self.stabilizer_span.contains(&op.symplectic())
    }

    /// Commutes with every gauge generator.
    pub fn is_bare(&self, op: &PauliOp) -> bool {
        self.generators.iter().all(|g| !g.anticommutes_with(op))
    }

    /// Commutes with every stabilizer.
    pub fn preserves_codespace(&self, op: &PauliOp) -> bool {
        self.stabilizer_basis.iter().all(|s| !s.anticommutes_with(op))
    }

    pub fn is_bare_logical(&self, op: &PauliOp) -> bool {
        self.is_bare(op) && !self.in_gauge_group(op)
    }

    pub fn is_dressed_logical(&self, op: &PauliOp) -> bool {
        self.preserves_codespace(op) && !self.in_gauge_group(op)
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    /// Action of a bare operator on each logical qubit, read off from its
    /// symplectic products with the logical pairs.
    pub fn logical_action(&self, op: &PauliOp) -> Vec<Option<Axis>> {
        self.logical_pairs
            .iter()
            .map(|(xl, zl)| match (op.anticommutes_with(zl), op.anticommutes_with(xl)) {
                (false, false) => None,
                (true, false) => Some(Axis::X),
                (true, true) => Some(Axis::Y),
                (false, true) => Some(Axis::Z),
            })
            .collect()
    }

    /// Stabilizer basis split into X-type and Z-type parts. Fails for codes
    /// whose stabilizer group is not generated by pure-type elements.
    pub fn css_stabilizers(&self) -> Result<(Vec<PauliOp>, Vec<PauliOp>)> {
        let n = self.n;
        // Echelon form with X columns first; rows without X part span the Z-type subgroup.
        let rows: Vec<Bits> = self.stabilizer_basis.iter().map(PauliOp::symplectic).collect();
        let (rref, pivots) = BinaryMatrix::from_rows(2 * n, rows)?.rref();
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for (row, &p) in rref.iter().zip(&pivots) {
            let op = PauliOp::from_symplectic(n, row);
            if p >= n {
                zs.push(op);
            } else if op.is_x_type() {
                xs.push(op);
            } else {
                return Err(Error::Precondition(format!("stabilizer group is not CSS: {op}")));
            }
        }
        Ok((xs, zs))
    }

    /// Minimum-weight element of `C(S)` outside the gauge group, searched in
    /// order of increasing weight up to `w_max`.
    pub fn distance(&self, w_max: usize) -> Result<PauliOp> {
        if w_max == 0 {
            return Err(Error::Precondition("w_max must be at least 1".into()));
        }
        first_by_weight(self.n, w_max, PauliFamily::Any, |p| self.is_dressed_logical(p))
            .ok_or(Error::WeightCapExceeded { w_max })
    }

    fn stabilizer_elements(&self, only: Option<&[PauliOp]>) -> Result<Vec<PauliOp>> {
        let basis = only.unwrap_or(&self.stabilizer_basis);
        if basis.len() > COSET_CAP_BITS {
            return Err(Error::EnumerationCap {
                requested: 1u128 << basis.len(),
                cap: 1u128 << COSET_CAP_BITS,
            });
        }
        let mut out = vec![PauliOp::identity(self.n)];
        for b in basis {
            let extra: Vec<_> = out.iter().map(|e| xor_op(e, b)).collect();
            out.extend(extra);
        }
        Ok(out)
    }

    /// Minimum-weight element of the coset `logical * S`, by exhaustive coset
    /// enumeration. Ties resolve to the first element in enumeration order.
    pub fn min_weight_bare_representative(&self, logical: &PauliOp, w_max: usize) -> Result<PauliOp> {
        self.min_weight_in_stabilizer_coset(logical, None, w_max)
    }

    /// Like [`Self::min_weight_bare_representative`], restricted to the
    /// stabilizer subgroup generated by `subgroup`.
    pub fn min_weight_in_stabilizer_coset(
        &self,
        logical: &PauliOp,
        subgroup: Option<&[PauliOp]>,
        w_max: usize,
    ) -> Result<PauliOp> {
        if logical.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: logical.n(),
            });
        }
        if !self.is_bare(logical) {
            return Err(Error::Precondition(format!(
                "{logical} does not commute with every gauge generator"
            )));
        }
        let best = self
            .stabilizer_elements(subgroup)?
            .iter()
            .map(|s| xor_op(logical, s))
            .min_by_key(PauliOp::weight)
            .expect("coset is never empty");
        if best.weight() > w_max {
            return Err(Error::WeightCapExceeded { w_max });
        }
        Ok(best)
    }

    /// Minimum-weight element of the coset `logical * G` (a dressed
    /// representative), searched by increasing weight up to `w_max`.
    pub fn min_weight_dressed_representative(&self, logical: &PauliOp, w_max: usize) -> Result<PauliOp> {
        if self.in_gauge_group(logical) {
            return Ok(PauliOp::identity(self.n));
        }
        let target = logical.symplectic();
        first_by_weight(self.n, w_max, PauliFamily::Any, |p| {
            self.gauge_span.contains(&p.symplectic().xor(&target))
        })
        .ok_or(Error::WeightCapExceeded { w_max })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, s: &str) -> PauliOp {
        PauliOp::parse(n, s).unwrap()
    }

    // Qubit order R1 B1 R2 B2 L1 L2.
    fn k1_code() -> SubsystemCodeSpec {
        let gens = ["X0 X1", "X2 X3", "X4 X5", "Z0 Z2", "Z1 Z4", "Z3 Z5"]
            .iter()
            .map(|s| op(6, s))
            .collect();
        SubsystemCodeSpec::new(6, gens).unwrap()
    }

    /// Every Pauli on n qubits, phase-free.
    fn all_paulis(n: usize) -> Vec<PauliOp> {
        (0..1usize << (2 * n))
            .map(|v| PauliOp::from_symplectic(n, &Bits::from_u64(2 * n, v as u64)))
            .collect()
    }

    #[test]
    fn centralizer_empty_gauge_group_is_everything() {
        let code = SubsystemCodeSpec::new(3, vec![]).unwrap();
        assert_eq!(code.centralizer_basis().len(), 6);
    }

    #[test]
    fn centralizer_single_generator_matches_exhaustive_count() {
        let code = SubsystemCodeSpec::new(2, vec![op(2, "X0 X1")]).unwrap();
        let basis = code.centralizer_basis();
        assert_eq!(basis.len(), 3);
        let g = &code.gauge_generators()[0];
        let commuting = all_paulis(2).iter().filter(|p| !p.anticommutes_with(g)).count();
        assert_eq!(commuting, 1 << basis.len());
    }

    #[test]
    fn centralizer_k1_matches_exhaustive_scan() {
        let code = k1_code();
        let basis = code.centralizer_basis();
        assert_eq!(basis.len(), 6);
        let span = EchelonBasis::from_vectors(basis.iter().map(PauliOp::symplectic).collect::<Vec<_>>().iter());
        let mut count = 0;
        for p in all_paulis(6) {
            let commutes = code.gauge_generators().iter().all(|g| !g.anticommutes_with(&p));
            assert_eq!(commutes, span.contains(&p.symplectic()), "{p}");
            count += commutes as usize;
        }
        assert_eq!(count, 64);
    }

    #[test]
    fn k1_structure_counts() {
        let st = k1_code().derive_structure().unwrap();
        assert_eq!((st.k, st.s, st.g), (2, 2, 2));
        assert_eq!(st.dependent_generators, 0);
        assert!(st.in_stabilizer_group(&op(6, "X0 X1 X2 X3 X4 X5")));
        assert!(st.in_stabilizer_group(&op(6, "Z0 Z1 Z2 Z3 Z4 Z5")));
        let (xs, zs) = st.css_stabilizers().unwrap();
        assert_eq!((xs.len(), zs.len()), (1, 1));
    }

    #[test]
    fn trivial_code() {
        let code = SubsystemCodeSpec::new(1, vec![]).unwrap();
        let st = code.derive_structure().unwrap();
        assert_eq!((st.k, st.s, st.g), (1, 0, 0));
        assert_eq!(code.code_distance(4).unwrap(), 1);
    }

    #[test]
    fn dependent_generators_are_reported_not_fatal() {
        let gens = vec![op(3, "X0 X1"), op(3, "X1 X2"), op(3, "X0 X2")];
        let st = SubsystemCodeSpec::new(3, gens).unwrap().derive_structure().unwrap();
        assert_eq!(st.dependent_generators, 1);
        assert_eq!(st.k + st.s + st.g, 3);
    }

    #[test]
    fn k1_distance_is_two() {
        assert_eq!(k1_code().code_distance(4).unwrap(), 2);
    }

    #[test]
    fn distance_cap_is_signalled() {
        let err = k1_code().code_distance(1).unwrap_err();
        assert!(matches!(err, Error::WeightCapExceeded { w_max: 1 }));
        assert!(k1_code().code_distance(0).is_err());
    }

    #[test]
    fn css_two_local_detection() {
        assert!(k1_code().is_css_two_local());
        let y = SubsystemCodeSpec::new(2, vec![op(2, "Y0 Y1")]).unwrap();
        assert!(!y.is_css_two_local());
        let x3 = SubsystemCodeSpec::new(3, vec![op(3, "X0 X1 X2")]).unwrap();
        assert!(!x3.is_css_two_local());
    }

    #[test]
    fn bare_representatives() {
        let st = k1_code().derive_structure().unwrap();
        // X_B1 X_L1 is already minimal.
        let xbar1 = op(6, "X1 X4");
        assert_eq!(st.min_weight_bare_representative(&xbar1, 4).unwrap(), xbar1);
        let id = PauliOp::identity(6);
        assert_eq!(st.min_weight_bare_representative(&id, 4).unwrap().weight(), 0);
        // Not in the centralizer.
        assert!(st.min_weight_bare_representative(&op(6, "X0"), 4).is_err());
    }

    #[test]
    fn logical_pairs_are_canonical() {
        let st = k1_code().derive_structure().unwrap();
        for (i, (xa, za)) in st.logical_pairs.iter().enumerate() {
            assert!(xa.is_x_type() && za.is_z_type());
            for (j, (xb, zb)) in st.logical_pairs.iter().enumerate() {
                assert_eq!(xa.anticommutes_with(zb), i == j);
                assert!(!xa.anticommutes_with(xb));
                assert!(!za.anticommutes_with(zb));
            }
            assert!(st.is_bare_logical(xa) && st.is_bare_logical(za));
        }
    }

    #[test]
    fn code_file_round_trip() {
        let mut labels = BTreeMap::new();
        labels.insert(0usize, "R1".to_string());
        let code = k1_code().with_labels(labels);
        let json = code.to_json().unwrap();
        let back = SubsystemCodeSpec::from_json(&json).unwrap();
        assert_eq!(back.gauge_generators(), code.gauge_generators());
        assert_eq!(back.label(0), "R1");
        assert_eq!(back.label(1), "q1");
        assert_eq!(code.labeled(&op(6, "X0 Z1")), "X_R1 Z_q1");
    }

    #[test]
    fn dense_commutators_agree_with_symplectic_form() {
        let code = k1_code();
        let gens = code.gauge_generators();
        for a in gens {
            for b in gens {
                let (ma, mb) = (a.to_dense(), b.to_dense());
                let comm = &ma * &mb - &mb * &ma;
                let zero = comm.iter().all(|c| c.norm() < 1e-12);
                assert_eq!(zero, !a.anticommutes_with(b));
            }
        }
    }
}
