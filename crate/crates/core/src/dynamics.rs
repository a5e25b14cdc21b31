//! Exact unitary evolution of assembled Hamiltonians, the decoupling
//! experiment against the penalty-strength error bound, and fidelity of the
//! two-local encoding against the bare encoding.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    bare_encoded_hamiltonian, penalty_hamiltonian, physical_encoded_hamiltonian, BathSpec, PauliSum, ProblemSpec,
    Schedule,
};
use crate::linalg::{expm_hermitian, identity, op_norm, unitarity_defect};
use crate::matrix_code::FamilyCode;
use crate::pauli::C64;
use crate::spectral::{diagonalize, Level, PenaltyCalibration, DEFAULT_DEGENERACY_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BathConfig {
    pub omega: f64,
    /// Coupling strengths are uniform in `[-coupling_scale, coupling_scale]`.
    pub coupling_scale: f64,
    /// System qubits coupled to the bath; all of them when absent.
    pub system_qubits: Option<Vec<usize>>,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            coupling_scale: 0.2,
            system_qubits: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub k: usize,
    pub total_time: f64,
    pub steps: usize,
    pub ep_values: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Problem schedule; a seeded random constant problem when absent.
    pub schedule: Option<Schedule>,
    pub bath: BathConfig,
    /// Divide couplings by their calibrated ratios.
    pub rescale: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            k: 1,
            total_time: 1.0,
            steps: 64,
            ep_values: vec![5.0, 10.0, 20.0, 40.0, 80.0],
            seeds: vec![1, 2, 3],
            schedule: None,
            bath: BathConfig::default(),
            rescale: true,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(Error::Config("total_time must be positive".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if self.ep_values.is_empty() || self.ep_values.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::Config("ep values must be positive".into()));
        }
        if self.ep_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("ep values must be strictly ascending".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if let Some(s) = &self.schedule {
            s.validate()?;
            if s.knots[0].1.m != 2 * self.k {
                return Err(Error::Config(format!("schedule problems must have m = {}", 2 * self.k)));
            }
        }
        Ok(())
    }

    /// Segment midpoints and the segment length; a constant schedule is a
    /// single exact segment.
    fn grid(&self, schedule: &Schedule) -> (Vec<f64>, f64) {
        if schedule.is_constant() {
            return (vec![0.5 * self.total_time], self.total_time);
        }
        let dt = self.total_time / self.steps as f64;
        ((0..self.steps).map(|s| (s as f64 + 0.5) * dt).collect(), dt)
    }
}

/// Time-ordered product of `exp(-i H(t_mid) dt)` over `steps` equal segments,
/// later segments to the left.
pub fn evolve(
    mut h_at: impl FnMut(f64) -> Result<DMatrix<C64>>,
    total_time: f64,
    steps: usize,
) -> Result<DMatrix<C64>> {
    if steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    let dt = total_time / steps as f64;
    let mut u: Option<DMatrix<C64>> = None;
    for s in 0..steps {
        let h = h_at((s as f64 + 0.5) * dt)?;
        let step = expm_hermitian(&h, dt);
        u = Some(match u {
            None => step,
            Some(prev) => step * prev,
        });
    }
    Ok(u.unwrap())
}

/// Evolution for a schedule of Pauli sums.
pub fn evolve_schedule(
    mut h_at: impl FnMut(f64) -> Result<PauliSum>,
    total_time: f64,
    steps: usize,
    dense_cap: usize,
) -> Result<DMatrix<C64>> {
    evolve(|t| h_at(t)?.to_matrix_capped(dense_cap), total_time, steps)
}

/// Terms of the decoupling bound for one penalty strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundTerms {
    pub k_norm: f64,
    pub rhs: f64,
}

/// Right-hand side of the decoupling bound,
/// `||K|| + T(||V|| + ||W||)||K|| + T sup||[K, H_0]||`, with
/// `||K|| <= (2/E_p) sum_{a != a'} ||V - W|| / |lambda_a - lambda_a'|` over
/// ordered pairs of distinct penalty eigenvalues and the commutator bounded by
/// `2 ||K|| ||H_0||`.
pub fn decoupling_bound_terms(
    levels: &[f64],
    v_norm: f64,
    w_norm: f64,
    v_minus_w_norm: f64,
    h0_norm: f64,
    total_time: f64,
    ep: f64,
) -> BoundTerms {
    let mut inverse_gaps = 0.0;
    for (a, la) in levels.iter().enumerate() {
        for (b, lb) in levels.iter().enumerate() {
            if a != b {
                inverse_gaps += 1.0 / (la - lb).abs();
            }
        }
    }
    let k_norm = 2.0 / ep * v_minus_w_norm * inverse_gaps;
    let rhs = k_norm + total_time * (v_norm + w_norm) * k_norm + total_time * 2.0 * k_norm * h0_norm;
    BoundTerms { k_norm, rhs }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingRow {
    pub ep: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub k_norm: f64,
    /// `||U_W P - P U_W P||`.
    pub invariance_defect: f64,
    /// Larger of the two unitarity defects.
    pub unitarity_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingReport {
    pub seed: u64,
    pub k: usize,
    pub total_time: f64,
    pub segments: usize,
    /// Sup norms are taken over segment midpoints only.
    pub grid_approximation: bool,
    pub penalty_levels: Vec<Level>,
    pub penalty_gap: f64,
    pub v_norm: f64,
    pub w_norm: f64,
    pub v_minus_w_norm: f64,
    pub h0_norm: f64,
    pub rows: Vec<DecouplingRow>,
    pub slope: f64,
    pub monotone: bool,
    pub bound_holds: bool,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn embed_system(m: &DMatrix<C64>, n_bath: usize) -> DMatrix<C64> {
    identity(1 << n_bath).kronecker(m)
}

/// Random constant problem and bath for one seed.
pub fn instance_for_seed(cfg: &EvolutionConfig, pc: &FamilyCode, seed: u64) -> (Schedule, BathSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedule = match &cfg.schedule {
        Some(s) => s.clone(),
        None => Schedule::constant(ProblemSpec::random(pc.m(), &mut rng)),
    };
    let qubits = cfg.bath.system_qubits.clone().unwrap_or_else(|| (0..pc.n()).collect());
    let bath = BathSpec::single_qubit(cfg.bath.omega, &qubits, cfg.bath.coupling_scale, &mut rng);
    (schedule, bath)
}

/// Runs the decoupling sweep for every configured seed.
pub fn decoupling_experiment(
    cfg: &EvolutionConfig,
    pc: &FamilyCode,
    cal: &PenaltyCalibration,
) -> Result<Vec<DecouplingReport>> {
    cfg.validate()?;
    cfg.seeds
        .iter()
        .map(|&seed| {
            let (schedule, bath) = instance_for_seed(cfg, pc, seed);
            let cal = cfg.rescale.then_some(cal);
            decoupling_for(cfg, pc, cal, &schedule, &bath, seed)
        })
        .collect()
}

/// Compares `U_V` generated by `H_s + E_p H_p + H_B + H_SB` with `U_W` where
/// only the ground-block part of the off-diagonal perturbation is kept.
pub fn decoupling_for(
    cfg: &EvolutionConfig,
    pc: &FamilyCode,
    cal: Option<&PenaltyCalibration>,
    schedule: &Schedule,
    bath: &BathSpec,
    seed: u64,
) -> Result<DecouplingReport> {
    let n_sys = pc.n();
    let nb = bath.n_bath;
    let hp = penalty_hamiltonian(&pc.code)?;
    let spec = diagonalize(&hp, DEFAULT_DEGENERACY_TOL)?;
    let projectors = spec.spectral_projectors()?;
    let levels = spec.levels();
    let pi0 = &projectors[0].1;
    let p = embed_system(pi0, nb);
    let hp_full = embed_system(&hp.to_matrix()?, nb);
    let h_bath = bath.h_bath.embed(n_sys + nb, n_sys)?.to_matrix()?;
    let h_sb = bath.interaction(n_sys)?.to_matrix()?;

    let (times, dt) = cfg.grid(schedule);
    let mut h0s = Vec::new();
    let mut vs = Vec::new();
    let mut ws = Vec::new();
    for &t in &times {
        let hs = physical_encoded_hamiltonian(&schedule.at(t)?, pc, cal)?.to_matrix()?;
        let mut diag = DMatrix::zeros(hs.nrows(), hs.ncols());
        for (_, pa) in &projectors {
            diag += pa * &hs * pa;
        }
        let off = &hs - &diag;
        let h0 = embed_system(&diag, nb) + &h_bath;
        let v = embed_system(&off, nb) + &h_sb;
        let w = &p * &v * &p;
        let scale = op_norm(&h0).max(1.0);
        let c1 = op_norm(&(&h0 * &p - &p * &h0));
        let c2 = op_norm(&(&h0 * &hp_full - &hp_full * &h0));
        if c1 > 1e-9 * scale || c2 > 1e-9 * scale {
            return Err(Error::Config(format!(
                "H_0 does not commute with the penalty or the initial projector ({c1:.2e}, {c2:.2e})"
            )));
        }
        h0s.push(h0);
        vs.push(v);
        ws.push(w);
    }
    let sup = |ms: &[DMatrix<C64>]| ms.iter().map(op_norm).fold(0.0, f64::max);
    let v_norm = sup(&vs);
    let w_norm = sup(&ws);
    let h0_norm = sup(&h0s);
    let vw: Vec<DMatrix<C64>> = vs.iter().zip(&ws).map(|(v, w)| v - w).collect();
    let v_minus_w_norm = sup(&vw);
    let level_values: Vec<f64> = levels.iter().map(|l| l.value).collect();

    let mut rows = Vec::new();
    for &ep in &cfg.ep_values {
        let mut uv = identity(p.nrows());
        let mut uw = identity(p.nrows());
        for s in 0..times.len() {
            let base = &h0s[s] + &hp_full * C64::new(ep, 0.0);
            uv = expm_hermitian(&(&base + &vs[s]), dt) * uv;
            uw = expm_hermitian(&(&base + &ws[s]), dt) * uw;
        }
        let lhs = op_norm(&((&uv - &uw) * &p));
        let invariance_defect = op_norm(&(&uw * &p - &p * &uw * &p));
        let bound = decoupling_bound_terms(
            &level_values,
            v_norm,
            w_norm,
            v_minus_w_norm,
            h0_norm,
            cfg.total_time,
            ep,
        );
        rows.push(DecouplingRow {
            ep,
            lhs,
            rhs: bound.rhs,
            k_norm: bound.k_norm,
            invariance_defect,
            unitarity_defect: unitarity_defect(&uv).max(unitarity_defect(&uw)),
        });
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.ep).collect();
    let lhs: Vec<f64> = rows.iter().map(|r| r.lhs).collect();
    let slope = if rows.len() >= 2 && lhs.iter().all(|&l| l > 0.0) {
        loglog_slope(&eps, &lhs)
    } else {
        f64::NAN
    };
    Ok(DecouplingReport {
        seed,
        k: pc.k,
        total_time: cfg.total_time,
        segments: times.len(),
        grid_approximation: !schedule.is_constant(),
        penalty_gap: spec.gap.unwrap_or(0.0),
        penalty_levels: levels,
        v_norm,
        w_norm,
        v_minus_w_norm,
        h0_norm,
        monotone: lhs.windows(2).all(|w| w[1] <= w[0]),
        bound_holds: rows.iter().all(|r| r.lhs <= r.rhs),
        rows,
        slope,
    })
}

/// CSV with one line per `(seed, ep)`.
pub fn decoupling_csv(reports: &[DecouplingReport]) -> String {
    let mut out = String::from("seed,ep,lhs,rhs,k_norm,invariance_defect,unitarity_defect\n");
    for r in reports {
        for row in &r.rows {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{:.3e},{:.3e}\n",
                r.seed, row.ep, row.lhs, row.rhs, row.k_norm, row.invariance_defect, row.unitarity_defect
            ));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityRow {
    pub ep: f64,
    pub infidelity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityReport {
    pub rescaled: bool,
    pub rows: Vec<FidelityRow>,
    pub decreasing: bool,
}

/// Evolves one ground-space state under `H_phys + E_p H_p` and under
/// `H_bare + E_p H_p` and reports `1 - |<bare|phys>|^2` per penalty strength.
/// The initial state is a seeded random combination of ground states.
pub fn encoded_computation_fidelity(
    cfg: &EvolutionConfig,
    pc: &FamilyCode,
    cal: Option<&PenaltyCalibration>,
    problem: &Schedule,
    seed: u64,
) -> Result<FidelityReport> {
    let hp = penalty_hamiltonian(&pc.code)?;
    let spec = diagonalize(&hp, DEFAULT_DEGENERACY_TOL)?;
    let basis = spec.ground_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = DVector::from_fn(basis.ncols(), |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let mut psi = basis * coeffs;
    psi /= C64::new(psi.norm(), 0.0);
    fidelity_from_state(cfg, pc, cal, problem, &psi)
}

pub fn fidelity_from_state(
    cfg: &EvolutionConfig,
    pc: &FamilyCode,
    cal: Option<&PenaltyCalibration>,
    problem: &Schedule,
    psi: &DVector<C64>,
) -> Result<FidelityReport> {
    let hp = penalty_hamiltonian(&pc.code)?;
    let spec = diagonalize(&hp, DEFAULT_DEGENERACY_TOL)?;
    let v = spec.ground_basis();
    let leak = (psi - v * (v.adjoint() * psi)).norm();
    if leak > 1e-10 * psi.norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "initial state is not in the penalty ground space (leakage {leak:.2e})"
        )));
    }
    let hp_m = hp.to_matrix()?;
    let (times, dt) = cfg.grid(problem);
    let mut rows = Vec::new();
    for &ep in &cfg.ep_values {
        let mut phys = psi.clone();
        let mut bare = psi.clone();
        for &t in &times {
            let p = problem.at(t)?;
            let penalty = &hp_m * C64::new(ep, 0.0);
            let h_phys = physical_encoded_hamiltonian(&p, pc, cal)?.to_matrix()? + &penalty;
            let h_bare = bare_encoded_hamiltonian(&p, pc)?.to_matrix()? + &penalty;
            phys = expm_hermitian(&h_phys, dt) * phys;
            bare = expm_hermitian(&h_bare, dt) * bare;
        }
        let overlap = bare.dotc(&phys).norm_sqr();
        rows.push(FidelityRow {
            ep,
            infidelity: (1.0 - overlap).max(0.0),
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].infidelity <= w[0].infidelity);
    Ok(FidelityReport {
        rescaled: cal.is_some(),
        rows,
        decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::assemble_total;
    use crate::pauli::{Axis, PauliOp};
    use crate::spectral::{calibrate, encoding_calibration_targets, CalibrationOptions};

    fn k1_calibration(pc: &FamilyCode) -> PenaltyCalibration {
        let st = pc.code.derive_structure().unwrap();
        let hp = penalty_hamiltonian(&pc.code).unwrap();
        let res = diagonalize(&hp, DEFAULT_DEGENERACY_TOL).unwrap();
        calibrate(
            &st,
            &res,
            &encoding_calibration_targets(pc),
            "k1",
            CalibrationOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn evolve_z_for_pi() {
        let z = PauliOp::single(1, 0, Axis::Z).to_dense();
        let u = evolve(|_| Ok(z.clone()), std::f64::consts::PI, 1).unwrap();
        assert!((u[(0, 0)] + C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((u[(1, 1)] + C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn evolve_zero_is_identity() {
        let u = evolve(|_| Ok(DMatrix::zeros(4, 4)), 2.0, 5).unwrap();
        assert!(op_norm(&(u - identity(4))) < 1e-15);
    }

    #[test]
    fn segmenting_constant_hamiltonian_is_exact() {
        let pc = FamilyCode::new(1).unwrap();
        let cfg = EvolutionConfig::default();
        let (schedule, bath) = instance_for_seed(&cfg, &pc, 1);
        let sys = physical_encoded_hamiltonian(&schedule.at(0.0).unwrap(), &pc, None).unwrap();
        let total = assemble_total(&sys, 5.0, &penalty_hamiltonian(&pc.code).unwrap(), &bath).unwrap();
        assert_eq!(total.n(), 7);
        let h = total.to_matrix().unwrap();
        let one = evolve(|_| Ok(h.clone()), 1.0, 1).unwrap();
        let many = evolve(|_| Ok(h.clone()), 1.0, 100).unwrap();
        assert!(op_norm(&(&one - &many)) < 1e-12, "{}", op_norm(&(&one - &many)));
        assert!(unitarity_defect(&many) < 1e-9);
    }

    #[test]
    fn bound_scales_inversely_with_ep() {
        let levels = [-4.0, -2.0, 0.0];
        let a = decoupling_bound_terms(&levels, 1.0, 0.5, 0.7, 2.0, 1.0, 10.0);
        let b = decoupling_bound_terms(&levels, 1.0, 0.5, 0.7, 2.0, 1.0, 20.0);
        assert!((a.k_norm - 2.0 * b.k_norm).abs() < 1e-15);
        let zero = decoupling_bound_terms(&levels, 1.0, 1.0, 0.0, 2.0, 1.0, 10.0);
        assert_eq!(zero.k_norm, 0.0);
        assert_eq!(zero.rhs, 0.0);
        // Ordered pairs: 2 * (1/2 + 1/4 + 1/2) = 2.5.
        assert!((a.k_norm - 2.0 / 10.0 * 0.7 * 2.5).abs() < 1e-15);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn decoupling_without_couplings_or_bath_is_exact() {
        let pc = FamilyCode::new(1).unwrap();
        let mut p = ProblemSpec::zero(2);
        p.a = vec![0.3, -0.7];
        p.b = vec![0.5, 0.2];
        let bath = BathSpec {
            n_bath: 1,
            h_bath: PauliSum::from_terms(1, [(1.0, PauliOp::single(1, 0, Axis::Z))]).unwrap(),
            couplings: vec![],
        };
        let cfg = EvolutionConfig {
            ep_values: vec![10.0, 1000.0],
            ..Default::default()
        };
        let rep = decoupling_for(&cfg, &pc, None, &Schedule::constant(p), &bath, 0).unwrap();
        // Projector roundoff is amplified by E_p T, hence the looser bound at ep = 1000.
        for r in &rep.rows {
            assert!(r.lhs < 1e-13 * r.ep.max(1.0) * 10.0, "{}", r.lhs);
            assert!(r.invariance_defect < 1e-9);
        }
    }

    #[test]
    fn decoupling_seed_one_behaves() {
        let pc = FamilyCode::new(1).unwrap();
        let cal = k1_calibration(&pc);
        let cfg = EvolutionConfig {
            seeds: vec![1],
            ..Default::default()
        };
        let reps = decoupling_experiment(&cfg, &pc, &cal).unwrap();
        let r = &reps[0];
        assert!(r.bound_holds);
        assert!(r
            .rows
            .iter()
            .all(|row| row.unitarity_defect < 1e-9 && row.invariance_defect < 1e-9));
        assert_eq!(r.segments, 1);
        assert!(!r.grid_approximation);
        let csv = decoupling_csv(&reps);
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn fields_only_fidelity_is_exact() {
        let pc = FamilyCode::new(1).unwrap();
        let cal = k1_calibration(&pc);
        let mut p = ProblemSpec::zero(2);
        p.a = vec![1.0, 0.4];
        p.b = vec![-0.3, 0.8];
        let rep = encoded_computation_fidelity(&EvolutionConfig::default(), &pc, Some(&cal), &Schedule::constant(p), 5)
            .unwrap();
        assert!(rep.rows.iter().all(|r| r.infidelity < 1e-10));
    }

    #[test]
    fn rescaling_is_needed_for_fidelity() {
        let pc = FamilyCode::new(1).unwrap();
        let cal = k1_calibration(&pc);
        let mut p = ProblemSpec::zero(2);
        p.set_coupling(Axis::X, 1, 2, 1.0);
        let s = Schedule::constant(p);
        let cfg = EvolutionConfig::default();
        let good = encoded_computation_fidelity(&cfg, &pc, Some(&cal), &s, 5).unwrap();
        let bad = encoded_computation_fidelity(&cfg, &pc, None, &s, 5).unwrap();
        assert!(good.decreasing, "{:?}", good.rows);
        let last_good = good.rows.last().unwrap().infidelity;
        let last_bad = bad.rows.last().unwrap().infidelity;
        assert!(last_bad > 100.0 * last_good, "{last_bad} vs {last_good}");
        assert!(last_bad > 1e-3);
    }

    #[test]
    fn non_ground_initial_state_is_rejected() {
        let pc = FamilyCode::new(1).unwrap();
        let mut psi = DVector::zeros(64);
        psi[0] = C64::new(1.0, 0.0);
        let err = fidelity_from_state(
            &EvolutionConfig::default(),
            &pc,
            None,
            &Schedule::constant(ProblemSpec::zero(2)),
            &psi,
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = EvolutionConfig::default();
        cfg.validate().unwrap();
        cfg.ep_values = vec![0.0, 5.0];
        assert!(cfg.validate().is_err());
        cfg.ep_values = vec![10.0, 5.0];
        assert!(cfg.validate().is_err());
        let cfg = EvolutionConfig {
            steps: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let json = serde_json::to_string(&EvolutionConfig::default()).unwrap();
        let back: EvolutionConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, EvolutionConfig::default());
        let partial: EvolutionConfig = serde_json::from_str(r#"{"total_time": 2.0}"#).unwrap();
        assert_eq!(partial.steps, 64);
    }
}
