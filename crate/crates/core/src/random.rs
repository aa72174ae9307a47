//! Seeded generators for randomized exact checks.
//!
//! Every trial draws from its own `ChaCha8Rng` seeded with
//! `trial_seed(seed, index)`, so trials are reproducible one by one and may
//! run in any order.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundlemaps::{FramePoint, GroupElement, MomentumLabel};
use crate::exterior::{Chart, VField, VForm};
use crate::hamilton::ProjectableField;
use crate::linalg::QMatrix;
use crate::scalar::{Monomial, Polynomial, Rational, Scalar, Var};
use crate::spaces::ConnectionCoefficients;

pub type TrialRng = ChaCha8Rng;

/// Name of the generator, as documented for cross-implementation reproducibility.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";

pub fn trial_seed(seed: u64, index: u64) -> u64 {
    // SplitMix64 finalizer over the pair.
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, index))
}

/// Small nonzero-or-zero rational with numerator in -5..=5 and denominator in 1..=3.
pub fn rational(rng: &mut impl Rng) -> Rational {
    Rational::new(
        rng.gen_range(-5i64..=5).into(),
        rng.gen_range(1i64..=3).into(),
    )
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let q = rational(rng);
        if q != Rational::from_integer(0.into()) {
            return q;
        }
    }
}

/// Random polynomial in `vars` with total degree at most `degree` and up to `terms` terms.
pub fn polynomial(rng: &mut impl Rng, vars: &[Var], degree: u32, terms: usize) -> Scalar {
    let mut p = Polynomial::zero();
    if vars.is_empty() {
        return Scalar::from_rational(rational(rng));
    }
    let count = rng.gen_range(1..=terms.max(1));
    for _ in 0..count {
        let d = rng.gen_range(0..=degree);
        let mut m = Monomial::one();
        for _ in 0..d {
            m = m.mul(&Monomial::var(*vars.choose(rng).expect("nonempty")));
        }
        p = &p + &Polynomial::term(nonzero_rational(rng), m);
    }
    Scalar::from_poly(p)
}

/// Random form of the given shape with polynomial coefficients over the chart coordinates.
pub fn form(
    rng: &mut impl Rng,
    chart: &Arc<Chart>,
    p: usize,
    r: usize,
    terms: usize,
    degree: u32,
) -> VForm {
    let vars: Vec<Var> = chart.vars().collect();
    let mut out = VForm::zero(chart, p, r);
    if p > vars.len() || r > chart.model_dim() {
        return out;
    }
    for _ in 0..terms {
        let form_vars: Vec<Var> = vars.choose_multiple(rng, p).copied().collect();
        let values: Vec<usize> = (1..=chart.model_dim()).collect();
        let value: Vec<usize> = values.choose_multiple(rng, r).copied().collect();
        let c = polynomial(rng, &vars, degree, 2);
        let t = VForm::monomial(chart, &form_vars, &value, c).expect("chart coordinates");
        out = out.add(&t).expect("same shape");
    }
    out
}

pub fn field(rng: &mut impl Rng, chart: &Arc<Chart>, degree: u32) -> VField {
    let vars: Vec<Var> = chart.vars().collect();
    let comps = vars
        .iter()
        .map(|_| {
            if rng.gen_bool(0.5) {
                polynomial(rng, &vars, degree, 2)
            } else {
                Scalar::zero()
            }
        })
        .collect();
    VField::from_components(chart, comps)
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| rational(rng))
}

/// Random invertible square matrix.
pub fn invertible(rng: &mut impl Rng, n: usize) -> QMatrix {
    loop {
        let m = matrix(rng, n, n);
        if m.det().is_ok_and(|d| d != Rational::from_integer(0.into())) {
            return m;
        }
    }
}

/// Random vertically adapted frame over a random base point.
pub fn frame_point(rng: &mut impl Rng, n: usize, k: usize) -> FramePoint {
    let base = (0..n + k).map(|_| rational(rng)).collect();
    let exx = invertible(rng, n);
    let eyy = invertible(rng, k);
    let eyx = matrix(rng, k, n);
    FramePoint::from_blocks(base, &exx, &eyx, &eyy).expect("invertible blocks")
}

pub fn group_element(rng: &mut impl Rng, n: usize, k: usize) -> GroupElement {
    let nb = invertible(rng, n);
    let kb = invertible(rng, k);
    GroupElement::new(nb, kb, matrix(rng, k, n)).expect("invertible blocks")
}

pub fn momentum_label(rng: &mut impl Rng, n: usize, k: usize) -> MomentumLabel {
    MomentumLabel::new(matrix(rng, n, k), rational(rng))
}

fn y_vars(n: usize, k: usize) -> (Vec<Var>, Vec<Var>) {
    let xs: Vec<Var> = (1..=n).map(crate::scalar::var::base).collect();
    let mut ys = xs.clone();
    ys.extend((1..=k).map(crate::scalar::var::fiber));
    (xs, ys)
}

/// Random projectable field: `v^i(x)` and `v^A(x, y)` of total degree at most `degree`.
pub fn projectable_field(rng: &mut impl Rng, n: usize, k: usize, degree: u32) -> ProjectableField {
    let (xs, ys) = y_vars(n, k);
    let vi = (0..n).map(|_| polynomial(rng, &xs, degree, 3)).collect();
    let va = (0..k).map(|_| polynomial(rng, &ys, degree, 3)).collect();
    ProjectableField::new(n, k, vi, va).expect("components over Y")
}

/// Random `(v^i, v^A)` over Y where some `v^i` depends on a fiber coordinate.
pub fn non_projectable_components(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    degree: u32,
) -> (Vec<Scalar>, Vec<Scalar>) {
    let (xs, ys) = y_vars(n, k);
    let mut vi: Vec<Scalar> = (0..n).map(|_| polynomial(rng, &xs, degree, 3)).collect();
    let i = rng.gen_range(0..n);
    let a = rng.gen_range(1..=k);
    let bump =
        Scalar::from_rational(nonzero_rational(rng)) * Scalar::var(crate::scalar::var::fiber(a));
    vi[i] = &vi[i] + &bump;
    let va = (0..k).map(|_| polynomial(rng, &ys, degree, 3)).collect();
    (vi, va)
}

/// Random connection coefficients over Y of total degree at most `degree`.
pub fn connection(rng: &mut impl Rng, n: usize, k: usize, degree: u32) -> ConnectionCoefficients {
    let (_, ys) = y_vars(n, k);
    let rows = (0..k)
        .map(|_| (0..n).map(|_| polynomial(rng, &ys, degree, 2)).collect())
        .collect();
    ConnectionCoefficients::new(n, k, rows).expect("coefficients over Y")
}
