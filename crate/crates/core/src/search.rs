//! Exhaustive enumeration of Pauli operators by weight.

use std::ops::ControlFlow;

use itertools::Itertools;

use crate::pauli::{Axis, PauliOp};

/// Which single-qubit letters an enumeration may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliFamily {
    Any,
    XType,
    ZType,
}

impl PauliFamily {
    fn axes(self) -> &'static [Axis] {
        match self {
            PauliFamily::Any => &Axis::ALL,
            PauliFamily::XType => &[Axis::X],
            PauliFamily::ZType => &[Axis::Z],
        }
    }
}

/// Calls `f` on every phase-free Pauli of exactly weight `w` in `family`, in a
/// fixed order (supports lexicographic, letters in `X, Y, Z` order). Stops early
/// when `f` breaks.
pub fn for_each_of_weight<B>(
    n: usize,
    w: usize,
    family: PauliFamily,
    mut f: impl FnMut(&PauliOp) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let axes = family.axes();
    if w == 0 {
        return f(&PauliOp::identity(n));
    }
    for support in (0..n).combinations(w) {
        for letters in std::iter::repeat_n(axes.iter().copied(), w).multi_cartesian_product() {
            let op = PauliOp::from_axes(n, support.iter().copied().zip(letters));
            f(&op)?;
        }
    }
    ControlFlow::Continue(())
}

/// Smallest-weight operator (weights `1..=w_max`) satisfying `pred`.
pub fn first_by_weight(
    n: usize,
    w_max: usize,
    family: PauliFamily,
    mut pred: impl FnMut(&PauliOp) -> bool,
) -> Option<PauliOp> {
    for w in 1..=w_max.min(n) {
        let found = for_each_of_weight(n, w, family, |p| {
            if pred(p) {
                ControlFlow::Break(p.clone())
            } else {
                ControlFlow::Continue(())
            }
        });
        if let ControlFlow::Break(p) = found {
            return Some(p);
        }
    }
    None
}

/// All operators of weight `1..=w_max` satisfying `pred`.
pub fn collect_up_to_weight(
    n: usize,
    w_max: usize,
    family: PauliFamily,
    mut pred: impl FnMut(&PauliOp) -> bool,
) -> Vec<PauliOp> {
    let mut out = Vec::new();
    for w in 1..=w_max.min(n) {
        let _ = for_each_of_weight::<()>(n, w, family, |p| {
            if pred(p) {
                out.push(p.clone());
            }
            ControlFlow::Continue(())
        });
    }
    out
}
