//! For rational `θ = p/q` the clock and shift matrices give a faithful
//! enough representation of low-degree monomials to act as an independent
//! oracle for the twisted product, adjoint, trace and gauge action.

use nalgebra::DMatrix;
use proptest::prelude::*;
use qbm_core::torus::{AlgebraContext, TorusElement};
use qbm_core::{unit_phase, Complex64};

type M = DMatrix<Complex64>;

struct ClockShift {
    q: usize,
    u: M,
    v: M,
}

impl ClockShift {
    fn new(p: usize, q: usize) -> Self {
        let lambda = |j: usize| unit_phase((p * j) as f64 / q as f64);
        let u = M::from_fn(q, q, |i, j| if i == j { lambda(j) } else { Complex64::default() });
        // V e_j = e_{j+1}, so UV = λ VU
        let v = M::from_fn(q, q, |i, j| {
            if i == (j + 1) % q {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        });
        Self { q, u, v }
    }

    fn power(m: &M, k: i64) -> M {
        let base = if k >= 0 { m.clone() } else { m.adjoint() };
        let mut out = M::identity(m.nrows(), m.ncols());
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    fn rep(&self, a: &TorusElement) -> M {
        let mut out = M::zeros(self.q, self.q);
        for ((m, n), c) in a.terms() {
            out += (Self::power(&self.u, m) * Self::power(&self.v, n)) * c;
        }
        out
    }
}

fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

const PAIRS: [(usize, usize); 5] = [(1, 7), (3, 11), (13, 31), (21, 34), (29, 60)];

fn element(ctx: AlgebraContext, terms: &[(i64, i64, f64, f64)]) -> TorusElement {
    TorusElement::from_terms(ctx, terms.iter().map(|&(m, n, re, im)| ((m, n), Complex64::new(re, im))))
}

fn terms_strategy() -> impl Strategy<Value = Vec<(i64, i64, f64, f64)>> {
    prop::collection::vec((-3i64..=3, -3i64..=3, -1.0f64..1.0, -1.0f64..1.0), 1..8)
}

#[test]
fn commutation_relation_holds_in_matrices() {
    for &(p, q) in &PAIRS {
        let cs = ClockShift::new(p, q);
        let lambda = unit_phase(p as f64 / q as f64);
        assert!(max_diff(&(&cs.u * &cs.v), &((&cs.v * &cs.u) * lambda)) < 1e-12);
    }
}

#[test]
fn normalised_trace_matches_constant_term() {
    // below degree q the normalised matrix trace only sees U⁰V⁰
    for &(p, q) in &PAIRS {
        let ctx = AlgebraContext::new(p as f64 / q as f64).unwrap();
        let cs = ClockShift::new(p, q);
        let a = element(ctx, &[(0, 0, 0.4, -0.1), (1, 2, 1.0, 0.0), (-2, 0, 0.3, 0.3), (3, -1, -0.5, 0.2)]);
        let tr = cs.rep(&a).trace() / q as f64;
        assert!((tr - a.trace()).norm() < 1e-12, "q = {q}");
    }
}

proptest! {
    #[test]
    fn product_is_represented((p, q) in prop::sample::select(PAIRS.to_vec()), ta in terms_strategy(), tb in terms_strategy()) {
        let ctx = AlgebraContext::new(p as f64 / q as f64).unwrap();
        let cs = ClockShift::new(p, q);
        let a = element(ctx, &ta);
        let b = element(ctx, &tb);
        let ab = a.mul(&b).unwrap();
        prop_assert!(max_diff(&cs.rep(&ab), &(cs.rep(&a) * cs.rep(&b))) < 1e-11);
    }

    #[test]
    fn adjoint_is_represented((p, q) in prop::sample::select(PAIRS.to_vec()), ta in terms_strategy()) {
        let ctx = AlgebraContext::new(p as f64 / q as f64).unwrap();
        let cs = ClockShift::new(p, q);
        let a = element(ctx, &ta);
        prop_assert!(max_diff(&cs.rep(&a.star()), &cs.rep(&a).adjoint()) < 1e-12);
    }

    #[test]
    fn gauge_action_is_conjugation_by_diagonals((p, q) in prop::sample::select(PAIRS.to_vec()), ta in terms_strategy(), j in 0usize..60, l in 0usize..60) {
        // with s = j/q, t = l/q the gauge automorphism U ↦ e^{2πis}U, V ↦ e^{2πit}V
        // becomes conjugation by a power of V and U respectively
        let ctx = AlgebraContext::new(p as f64 / q as f64).unwrap();
        let cs = ClockShift::new(p, q);
        let a = element(ctx, &ta);
        let (j, l) = (j % q, l % q);
        // W = V^{−k}U^m gives W*UW = λ^{−k}U and W*VW = λ^{−m}V
        let k = (0..q).find(|&k| (k * p) % q == (q - j) % q).unwrap() as i64;
        let m = (0..q).find(|&m| (m * p) % q == (q - l) % q).unwrap() as i64;
        let w = ClockShift::power(&cs.v, -k) * ClockShift::power(&cs.u, m);
        let conj = w.adjoint() * cs.rep(&a) * &w;
        let acted = a.act_angles(j as f64 / q as f64, l as f64 / q as f64);
        prop_assert!(max_diff(&cs.rep(&acted), &conj) < 1e-10);
    }
}
