//! The Jacobian of the last-row map, its singular set, and the
//! stratification of the fibers, with exact rational point sampling.
//!
//! Rank decisions here are exact: points are rational, the Jacobian is
//! evaluated exactly, and rank comes from exact elimination. Floating
//! point appears only in the numeric factorization pipeline.

use std::collections::BTreeMap;

use num::traits::{One, Zero};
use thiserror::Error;

use crate::matrix::{exact_rank, FieldScalar, Mat};
use crate::poly::{MPoly, Rat};
use crate::report::Report;
use crate::sampling::{random_assignment, small_rat, small_rat_nonzero, Prng};
use crate::symgroup::{ElemFactor, Parity};
use crate::vars::{active_vars, block_positions, VarId};

/// Rational value for every variable that matters; missing entries are
/// zero.
pub type Assignment = BTreeMap<VarId, Rat>;

fn value(point: &Assignment, v: VarId) -> Rat {
    point.get(&v).cloned().unwrap_or_else(Rat::zero)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrataError {
    #[error("factor count {0} is too small, need at least {1}")]
    KTooSmall(usize, usize),
    #[error("target vector must be nonzero")]
    ZeroTarget,
    #[error("pivot vector must be nonzero")]
    ZeroPivot,
    #[error("unsatisfiable sampling request: {0}")]
    Unsatisfiable(String),
    #[error("operation requires n = 2, got n = {0}")]
    NeedsN2(usize),
}

/// The symmetric block of one factor evaluated at a point.
pub fn block_at(point: &Assignment, factor: usize, n: usize) -> Mat<Rat> {
    Mat::from_fn(n, n, |i, j| {
        let (r, c) = if i <= j { (i + 1, j + 1) } else { (j + 1, i + 1) };
        value(point, VarId::new(factor, r, c))
    })
}

/// The last row of the K-factor product at a rational point, as a
/// column of length 2n, by the two-step recursion.
pub fn last_row_at(point: &Assignment, k: usize, n: usize) -> Vec<Rat> {
    let mut top: Vec<Rat> = (1..=n).map(|i| value(point, VarId::new(1, i, n))).collect();
    let mut bot: Vec<Rat> = (0..n)
        .map(|i| if i + 1 == n { Rat::one() } else { Rat::zero() })
        .collect();
    for m in 2..=k {
        let u = block_at(point, m, n);
        match Parity::of_factor(m) {
            Parity::Upper => {
                let add = u.mul_vec(&top);
                for (b, a) in bot.iter_mut().zip(add) {
                    *b = b.clone() + a;
                }
            }
            Parity::Lower => {
                let add = u.mul_vec(&bot);
                for (t, a) in top.iter_mut().zip(add) {
                    *t = t.clone() + a;
                }
            }
        }
    }
    top.extend(bot);
    top
}

/// Jacobian of the last-row map with labeled columns. Columns run over
/// the active variables in variable order; the non-last-row variables
/// of factor 1 contribute zero columns and are removed, following the
/// usual convention.
#[derive(Clone, Debug)]
pub struct Jacobian {
    pub mat: Mat<MPoly>,
    pub cols: Vec<VarId>,
}

impl Jacobian {
    pub fn eval(&self, point: &Assignment) -> Mat<Rat> {
        self.mat.map(|p| p.eval_rat(point))
    }
}

/// Jacobian of the K-factor last-row map, built by the block recursion:
/// extending by a factor multiplies the old Jacobian by the transposed
/// factor and appends one column per new variable, whose entries are
/// components of the previous last row.
pub fn jacobian(k: usize, n: usize) -> Result<Jacobian, StrataError> {
    if k < 1 {
        return Err(StrataError::KTooSmall(k, 1));
    }
    let d = n * (n + 1) / 2;
    let mut cols: Vec<VarId> = (1..=n).map(|i| VarId::new(1, i, n)).collect();
    let mut mat = Mat::<MPoly>::from_fn(2 * n, n, |i, j| {
        if i == j {
            MPoly::int(1)
        } else {
            MPoly::zero()
        }
    });
    // the running last row, updated alongside the Jacobian
    let mut p: Vec<MPoly> = crate::symgroup::last_row(1, n).expect("K = 1 is valid");
    for m in 2..=k {
        let factor = ElemFactor::<MPoly>::symbolic(m, n);
        let u = factor.params();
        let mut next = Mat::<MPoly>::zero(2 * n, mat.cols() + d);
        match factor.parity() {
            Parity::Lower => {
                // top rows += Z * bottom rows; new columns [A; 0]
                for j in 0..mat.cols() {
                    for i in 0..n {
                        let mut acc = mat[(i, j)].clone();
                        for s in 0..n {
                            acc = acc + u[(i, s)].clone() * mat[(n + s, j)].clone();
                        }
                        next[(i, j)] = acc;
                    }
                    for i in n..2 * n {
                        next[(i, j)] = mat[(i, j)].clone();
                    }
                }
                for (idx, (bi, bj)) in block_positions(n).into_iter().enumerate() {
                    let col = mat.cols() + idx;
                    // d/dz_{ij}: row i picks up P_{n+j}, row j picks up P_{n+i}
                    next[(bi - 1, col)] = p[n + bj - 1].clone();
                    if bi != bj {
                        next[(bj - 1, col)] = p[n + bi - 1].clone();
                    }
                }
                let add = u.mul_vec(&p[n..2 * n].to_vec());
                for (t, a) in p.iter_mut().take(n).zip(add) {
                    *t = t.clone() + a;
                }
            }
            Parity::Upper => {
                // bottom rows += W * top rows; new columns [0; B]
                for j in 0..mat.cols() {
                    for i in 0..n {
                        next[(i, j)] = mat[(i, j)].clone();
                    }
                    for i in 0..n {
                        let mut acc = mat[(n + i, j)].clone();
                        for s in 0..n {
                            acc = acc + u[(i, s)].clone() * mat[(s, j)].clone();
                        }
                        next[(n + i, j)] = acc;
                    }
                }
                for (idx, (bi, bj)) in block_positions(n).into_iter().enumerate() {
                    let col = mat.cols() + idx;
                    next[(n + bi - 1, col)] = p[bj - 1].clone();
                    if bi != bj {
                        next[(n + bj - 1, col)] = p[bi - 1].clone();
                    }
                }
                let add = u.mul_vec(&p[0..n].to_vec());
                for (b, a) in p.iter_mut().skip(n).zip(add) {
                    *b = b.clone() + a;
                }
            }
        }
        mat = next;
        for (bi, bj) in block_positions(n) {
            cols.push(VarId::new(m, bi, bj));
        }
    }
    Ok(Jacobian { mat, cols })
}

/// The singular set of the K-factor last-row map: all last-row
/// variables of the lower factors among the first K-1 factors vanish,
/// and the stacked columns of the upper blocks among the first K-1
/// factors span a space of rank < n.
#[derive(Clone, Copy, Debug)]
pub struct SingularSetSpec {
    pub k: usize,
    pub n: usize,
}

impl SingularSetSpec {
    pub fn new(k: usize, n: usize) -> Result<Self, StrataError> {
        if k < 2 {
            return Err(StrataError::KTooSmall(k, 2));
        }
        Ok(SingularSetSpec { k, n })
    }

    fn lower_rows_vanish(&self, point: &Assignment) -> bool {
        (1..self.k)
            .filter(|f| f % 2 == 1)
            .all(|f| (1..=self.n).all(|i| value(point, VarId::new(f, i, self.n)).is_zero()))
    }

    fn stacked_upper_rank(&self, point: &Assignment, include_kth: bool) -> usize {
        let bound = if include_kth { self.k } else { self.k - 1 };
        let blocks: Vec<Mat<Rat>> = (1..=bound)
            .filter(|f| f % 2 == 0)
            .map(|f| block_at(point, f, self.n))
            .collect();
        if blocks.is_empty() {
            return 0;
        }
        let mut stacked = blocks[0].clone();
        for b in &blocks[1..] {
            stacked = stacked.hcat(b);
        }
        exact_rank(&stacked)
    }

    /// Membership per the set definition (upper blocks of the first
    /// K-1 factors only).
    pub fn contains(&self, point: &Assignment) -> bool {
        self.lower_rows_vanish(point) && self.stacked_upper_rank(point, false) < self.n
    }

    /// The alternative reading of "no conditions on the K-th factor"
    /// for even K, where the K-th (upper) block also enters the rank
    /// condition. Coincides with [`Self::contains`] for odd K.
    pub fn contains_alt_reading(&self, point: &Assignment) -> bool {
        self.lower_rows_vanish(point) && self.stacked_upper_rank(point, self.k % 2 == 0) < self.n
    }
}

/// Membership in the singular set; requires K >= 2.
pub fn in_singular_set(point: &Assignment, k: usize, n: usize) -> Result<bool, StrataError> {
    Ok(SingularSetSpec::new(k, n)?.contains(point))
}

/// A random point of the singular set: mandated last-row variables
/// zeroed, every constrained upper block a scalar multiple of one
/// rank <= 1 outer square, everything else random.
pub fn singular_point(rng: &mut Prng, k: usize, n: usize) -> Assignment {
    let mut point = random_assignment(rng, &active_vars(k, n));
    for f in (1..k).filter(|f| f % 2 == 1) {
        for i in 1..=n {
            point.insert(VarId::new(f, i, n), Rat::zero());
        }
    }
    if n == 1 {
        for f in (1..k).filter(|f| f % 2 == 0) {
            point.insert(VarId::new(f, 1, 1), Rat::zero());
        }
        return point;
    }
    let v: Vec<Rat> = (0..n).map(|_| small_rat(rng)).collect();
    for f in (1..k).filter(|f| f % 2 == 0) {
        let lambda = small_rat(rng);
        for (i, j) in block_positions(n) {
            let entry = lambda.clone() * v[i - 1].clone() * v[j - 1].clone();
            point.insert(VarId::new(f, i, j), entry);
        }
    }
    point
}

/// For even K: a point where the two readings of the singular-set
/// definition disagree (constrained upper blocks rank-deficient, the
/// K-th upper block full rank). `None` when the parities make the
/// readings coincide.
pub fn reading_disagreement_point(rng: &mut Prng, k: usize, n: usize) -> Option<Assignment> {
    if k % 2 == 1 || k < 4 || n < 2 {
        return None;
    }
    let mut point = singular_point(rng, k, n);
    // make the K-th block invertible: identity plus small random noise
    for (i, j) in block_positions(n) {
        let entry = if i == j { Rat::one() } else { Rat::zero() };
        point.insert(VarId::new(k, i, j), entry);
    }
    Some(point)
}

/// Exhaustive lemma check: off the singular set the Jacobian has full
/// rank 2n, on constructed singular points the rank drops. For even K
/// the two readings of the definition are compared and the one matching
/// the rank dichotomy is recorded.
pub fn verify_submersivity(
    k: usize,
    n: usize,
    samples: usize,
    rng: &mut Prng,
) -> Result<Report, StrataError> {
    if k < 3 {
        return Err(StrataError::KTooSmall(k, 3));
    }
    let spec = SingularSetSpec::new(k, n)?;
    let jac = jacobian(k, n)?;
    let mut report = Report::new(&format!("submersivity K={k} n={n}"));
    let vars = active_vars(k, n);
    let mut produced = 0;
    while produced < samples {
        let point = random_assignment(rng, &vars);
        if spec.contains(&point) {
            continue;
        }
        if spec.contains_alt_reading(&point) != spec.contains(&point) {
            report.note(format!(
                "sample {produced}: singular-set readings disagree off the constructed family"
            ));
        }
        let rank = exact_rank(&jac.eval(&point));
        report.check(
            rank == 2 * n,
            format!("off-singular sample {produced}"),
            format!("rank {}", 2 * n),
            format!("rank {rank}"),
        );
        produced += 1;
    }
    let constructed = (samples / 5).max(8);
    for idx in 0..constructed {
        let point = singular_point(rng, k, n);
        debug_assert!(spec.contains(&point));
        let rank = exact_rank(&jac.eval(&point));
        report.check(
            rank < 2 * n,
            format!("singular-set sample {idx}"),
            format!("rank < {}", 2 * n),
            format!("rank {rank}"),
        );
    }
    if let Some(point) = reading_disagreement_point(rng, k, n) {
        let in_main = spec.contains(&point);
        let in_alt = spec.contains_alt_reading(&point);
        let rank = exact_rank(&jac.eval(&point));
        report.check(
            in_main && !in_alt && rank < 2 * n,
            "reading disagreement point",
            "rank deficient, so the K-1-factor reading is the correct one",
            format!("in_main={in_main} in_alt={in_alt} rank={rank}"),
        );
        report.note(format!(
            "even K={k}: point with deficient first K-1 upper blocks but invertible K-th block \
             has rank {rank} < {}; the rank condition excludes the K-th factor",
            2 * n
        ));
    }
    Ok(report)
}

/// A symmetric matrix `M` with `M c = d`, for `c != 0`. Pivot on the
/// largest entry of `c`; all unforced entries stay zero.
pub fn solve_symmetric<T: FieldScalar>(c: &[T], d: &[T]) -> Result<Mat<T>, StrataError> {
    let n = c.len();
    assert_eq!(n, d.len());
    let p = (0..n)
        .max_by(|&i, &j| {
            c[i].magnitude()
                .partial_cmp(&c[j].magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or(StrataError::ZeroPivot)?;
    if c[p].is_zero() {
        return Err(StrataError::ZeroPivot);
    }
    // column p of M is x = d/c_p + t e_p with t fixing the pivot row
    let dot = c
        .iter()
        .zip(d)
        .fold(T::zero(), |acc, (ci, di)| acc + ci.clone() * di.clone());
    let t = (d[p].clone() * c[p].clone() - dot) / (c[p].clone() * c[p].clone());
    let mut x: Vec<T> = d.iter().map(|di| di.clone() / c[p].clone()).collect();
    x[p] = x[p].clone() + t;
    let mut m = Mat::<T>::zero(n, n);
    for i in 0..n {
        m[(i, p)] = x[i].clone();
        m[(p, i)] = x[i].clone();
    }
    m[(p, p)] = x[p].clone();
    Ok(m)
}

/// Three factors (lower, upper, lower) outside the singular set whose
/// product has last row `a`: pick a symmetric block making the reduced
/// top `zhat` nonzero, give the first factor last row `zhat`, and solve
/// a symmetric system for the middle block.
pub fn preimage_last_row<T: FieldScalar>(
    a: &[T],
    n: usize,
) -> Result<[ElemFactor<T>; 3], StrataError> {
    assert_eq!(a.len(), 2 * n);
    if a.iter().all(|x| x.is_zero()) {
        return Err(StrataError::ZeroTarget);
    }
    let a_top = &a[0..n];
    let a_bot = &a[n..2 * n];

    // candidate symmetric blocks for the third factor: zero, then the
    // symmetric units; take the one maximizing |zhat|
    let mut candidates: Vec<Mat<T>> = vec![Mat::zero(n, n)];
    for (i, j) in block_positions(n) {
        let mut e = Mat::<T>::zero(n, n);
        e[(i - 1, j - 1)] = T::one();
        e[(j - 1, i - 1)] = T::one();
        candidates.push(e);
    }
    let mut best: Option<(f64, Mat<T>, Vec<T>)> = None;
    for cand in candidates {
        let zb = cand.mul_vec(a_bot);
        let zhat: Vec<T> = a_top
            .iter()
            .zip(zb)
            .map(|(t, s)| t.clone() - s)
            .collect();
        let score: f64 = zhat.iter().map(|x| x.magnitude().powi(2)).sum();
        if best.as_ref().map_or(true, |(s, _, _)| score > *s) {
            best = Some((score, cand, zhat));
        }
    }
    let (score, z2_block, zhat) = best.expect("candidate list is nonempty");
    let a_norm: f64 = a.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
    assert!(
        score.sqrt() >= 1e-6 * a_norm,
        "conditioning guard on zhat failed"
    );

    // first factor: symmetric with last row zhat, all else zero
    let mut z1_block = Mat::<T>::zero(n, n);
    for i in 0..n {
        z1_block[(n - 1, i)] = zhat[i].clone();
        z1_block[(i, n - 1)] = zhat[i].clone();
    }
    // middle factor: W zhat = a_bot - e_n
    let mut rhs: Vec<T> = a_bot.to_vec();
    rhs[n - 1] = rhs[n - 1].clone() - T::one();
    let w_block = solve_symmetric(&zhat, &rhs)?;

    Ok([
        ElemFactor::new(Parity::Lower, z1_block).expect("symmetric by construction"),
        ElemFactor::new(Parity::Upper, w_block).expect("symmetric by construction"),
        ElemFactor::new(Parity::Lower, z2_block).expect("symmetric by construction"),
    ])
}

/// Classification of a fiber by its target vector, for n = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Stratum {
    GenericSmooth,
    GenericSingular,
    NonGenericSmooth,
    NonGenericSingular,
}

/// Stratum of the fiber over `a` for the K-factor map. Odd K splits on
/// `(a3, a4)`, even K on `(a1, a2)`; the singular locus is `(a3, a4) =
/// (0, 1)` on the generic side for odd K and on the non-generic side
/// for even K.
pub fn classify_fiber(k: usize, a: &[Rat; 4]) -> Result<Stratum, StrataError> {
    if k < 3 {
        return Err(StrataError::KTooSmall(k, 3));
    }
    if a.iter().all(|x| x.is_zero()) {
        return Err(StrataError::ZeroTarget);
    }
    let zero = Rat::zero();
    let one = Rat::one();
    let tail_is = |x: &Rat, y: &Rat| a[2] == *x && a[3] == *y;
    if k % 2 == 1 {
        if tail_is(&zero, &zero) {
            Ok(Stratum::NonGenericSmooth)
        } else if tail_is(&zero, &one) {
            Ok(Stratum::GenericSingular)
        } else {
            Ok(Stratum::GenericSmooth)
        }
    } else if !(a[0].is_zero() && a[1].is_zero()) {
        Ok(Stratum::GenericSmooth)
    } else if tail_is(&zero, &one) {
        Ok(Stratum::NonGenericSingular)
    } else {
        Ok(Stratum::NonGenericSmooth)
    }
}

/// A rational point together with the exact target it maps to.
#[derive(Clone, Debug)]
pub struct FiberPoint {
    pub k: usize,
    pub n: usize,
    pub point: Assignment,
    pub target: Vec<Rat>,
}

impl FiberPoint {
    pub fn from_point(k: usize, n: usize, point: Assignment) -> Self {
        let target = last_row_at(&point, k, n);
        FiberPoint {
            k,
            n,
            point,
            target,
        }
    }

    /// Exact membership: the recomputed last row equals the recorded
    /// target.
    pub fn validate(&self) -> bool {
        last_row_at(&self.point, self.k, self.n) == self.target
    }

    pub fn value(&self, v: VarId) -> Rat {
        value(&self.point, v)
    }
}

/// Irreducible components of the singular level set at three factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    A1,
    A2,
}

/// Sampling modes for fiber points.
#[derive(Clone, Copy, Debug)]
pub enum SampleMode {
    Random,
    OnStratum(Stratum),
    OnComponent(Component),
}

/// Draw a fiber point. `Random` draws every coordinate and records the
/// exact target; the targeted modes construct points satisfying the
/// defining equations exactly (n = 2 only).
pub fn sample_fiber_point(
    k: usize,
    n: usize,
    mode: SampleMode,
    rng: &mut Prng,
) -> Result<FiberPoint, StrataError> {
    match mode {
        SampleMode::Random => {
            let point = random_assignment(rng, &active_vars(k, n));
            Ok(FiberPoint::from_point(k, n, point))
        }
        SampleMode::OnStratum(s) => {
            if n != 2 {
                return Err(StrataError::NeedsN2(n));
            }
            let a = stratum_target(k, s, rng)?;
            let factors = preimage_last_row(&a, 2)?;
            let mut point = Assignment::new();
            for (idx, f) in factors.iter().enumerate() {
                let u = f.params();
                for (i, j) in block_positions(2) {
                    point.insert(VarId::new(idx + 1, i, j), u[(i - 1, j - 1)].clone());
                }
            }
            // remaining factors are zero blocks; the product and its
            // last row are unchanged
            let fp = FiberPoint::from_point(k, 2, point);
            debug_assert_eq!(fp.target, a);
            Ok(fp)
        }
        SampleMode::OnComponent(c) => {
            if n != 2 {
                return Err(StrataError::NeedsN2(n));
            }
            if k != 3 {
                return Err(StrataError::Unsatisfiable(format!(
                    "component sampling targets the three-factor singular fiber, got K={k}"
                )));
            }
            let a1 = small_rat(rng);
            let a2 = small_rat(rng);
            let mut point = Assignment::new();
            point.insert(crate::vars::z(4), small_rat(rng));
            match c {
                Component::A1 => {
                    point.insert(crate::vars::z(2), Rat::zero());
                    point.insert(crate::vars::z(3), Rat::zero());
                    for m in 1..=3 {
                        point.insert(crate::vars::w(m), small_rat(rng));
                    }
                    point.insert(crate::vars::z(5), a1.clone());
                    point.insert(crate::vars::z(6), a2.clone());
                }
                Component::A2 => {
                    // rank-one upper block with (z2, z3) in its kernel
                    let v1 = small_rat_nonzero(rng);
                    let v2 = small_rat_nonzero(rng);
                    let t = small_rat_nonzero(rng);
                    let z2 = t.clone() * v2.clone();
                    let z3 = -t.clone() * v1.clone();
                    point.insert(crate::vars::w(1), v1.clone() * v1.clone());
                    point.insert(crate::vars::w(2), v1.clone() * v2.clone());
                    point.insert(crate::vars::w(3), v2.clone() * v2.clone());
                    point.insert(crate::vars::z(2), z2.clone());
                    point.insert(crate::vars::z(3), z3.clone());
                    point.insert(crate::vars::z(5), a1.clone() - z2);
                    point.insert(crate::vars::z(6), a2.clone() - z3);
                }
            }
            let fp = FiberPoint::from_point(3, 2, point);
            debug_assert_eq!(
                fp.target,
                vec![a1, a2, Rat::zero(), Rat::one()],
                "component point must land on the (a1, a2, 0, 1) fiber"
            );
            Ok(fp)
        }
    }
}

fn stratum_target(k: usize, s: Stratum, rng: &mut Prng) -> Result<Vec<Rat>, StrataError> {
    let zero = Rat::zero();
    let one = Rat::one();
    let pair_nonzero = |rng: &mut Prng| {
        loop {
            let x = small_rat(rng);
            let y = small_rat(rng);
            if !(x.is_zero() && y.is_zero()) {
                return (x, y);
            }
        }
    };
    if k % 2 == 1 {
        match s {
            Stratum::GenericSmooth => loop {
                let (a3, a4) = pair_nonzero(rng);
                if !(a3.is_zero() && a4 == one) {
                    return Ok(vec![small_rat(rng), small_rat(rng), a3, a4]);
                }
            },
            Stratum::GenericSingular => {
                Ok(vec![small_rat(rng), small_rat(rng), zero, one])
            }
            Stratum::NonGenericSmooth => {
                let (a1, a2) = pair_nonzero(rng);
                Ok(vec![a1, a2, zero.clone(), zero])
            }
            Stratum::NonGenericSingular => Err(StrataError::Unsatisfiable(
                "odd K has no singular non-generic stratum".into(),
            )),
        }
    } else {
        match s {
            Stratum::GenericSmooth => {
                let (a1, a2) = pair_nonzero(rng);
                Ok(vec![a1, a2, small_rat(rng), small_rat(rng)])
            }
            Stratum::GenericSingular => Err(StrataError::Unsatisfiable(
                "even K generic fibers are smooth".into(),
            )),
            Stratum::NonGenericSmooth => loop {
                let (a3, a4) = pair_nonzero(rng);
                if !(a3.is_zero() && a4 == one) {
                    return Ok(vec![zero.clone(), zero.clone(), a3, a4]);
                }
            },
            Stratum::NonGenericSingular => Ok(vec![zero.clone(), zero, Rat::zero(), one]),
        }
    }
}

/// Outcome of the search for a fiber point with `z2 z3 != 0`.
#[derive(Clone, Debug)]
pub enum WitnessOutcome {
    Found(FiberPoint),
    /// No such point exists on the requested locus; the reason names
    /// the forced vanishing.
    NotFound(String),
}

/// Search for a point on the K-factor fiber over `a` where `z2 z3 != 0`
/// (n = 2). Optionally restricted to one component of the three-factor
/// singular fiber. The excluded loci return `NotFound` with the forcing
/// equation spelled out.
pub fn z2z3_witness(
    k: usize,
    a: &[Rat; 4],
    component: Option<Component>,
    rng: &mut Prng,
) -> Result<WitnessOutcome, StrataError> {
    if k < 3 {
        return Err(StrataError::KTooSmall(k, 3));
    }
    if a.iter().all(|x| x.is_zero()) {
        return Err(StrataError::ZeroTarget);
    }
    if let Some(Component::A1) = component {
        return Ok(WitnessOutcome::NotFound(
            "on the component with z2 = z3 = 0 the product z2 z3 vanishes identically".into(),
        ));
    }
    if let Some(Component::A2) = component {
        if k != 3 {
            return Err(StrataError::Unsatisfiable(
                "component restriction applies to K = 3".into(),
            ));
        }
        let fp = sample_fiber_point(3, 2, SampleMode::OnComponent(Component::A2), rng)?;
        // the component construction fixes the target to (a1, a2, 0, 1)
        if fp.target[2] == a[2] && fp.target[3] == a[3] {
            let mut point = fp.point;
            // retarget the free trailing variables to the requested a1, a2
            let z2 = value(&point, crate::vars::z(2));
            let z3 = value(&point, crate::vars::z(3));
            point.insert(crate::vars::z(5), a[0].clone() - z2);
            point.insert(crate::vars::z(6), a[1].clone() - z3);
            let fp = FiberPoint::from_point(3, 2, point);
            debug_assert_eq!(fp.target, a.to_vec());
            return Ok(WitnessOutcome::Found(fp));
        }
        return Ok(WitnessOutcome::NotFound(
            "the A2 component lives over targets of the form (a1, a2, 0, 1)".into(),
        ));
    }

    for _attempt in 0..64 {
        match witness_descend(k, a, rng) {
            Some(WitnessOutcome::Found(fp)) => {
                debug_assert!(fp.validate());
                return Ok(WitnessOutcome::Found(fp));
            }
            Some(nf @ WitnessOutcome::NotFound(_)) => return Ok(nf),
            None => continue,
        }
    }
    Ok(WitnessOutcome::NotFound(
        "random descent failed to produce a witness (unexpected)".into(),
    ))
}

/// One randomized descent: peel groups down to three factors, then
/// solve the three-factor system with z2, z3 chosen nonzero. Returns
/// `None` when the drawn randoms hit a degenerate configuration.
fn witness_descend(k: usize, a: &[Rat; 4], rng: &mut Prng) -> Option<WitnessOutcome> {
    let mut point = Assignment::new();
    let mut target = a.to_vec();
    for level in (4..=k).rev() {
        if level % 2 == 1 {
            // odd level: new lower group, top pair of the target moves
            let z1 = small_rat(rng);
            let z2 = small_rat(rng);
            let z3 = small_rat(rng);
            point.insert(VarId::new(level, 1, 1), z1.clone());
            point.insert(VarId::new(level, 1, 2), z2.clone());
            point.insert(VarId::new(level, 2, 2), z3.clone());
            let b1 = target[0].clone() - z1 * target[2].clone() - z2.clone() * target[3].clone();
            let b2 = target[1].clone() - z2 * target[2].clone() - z3 * target[3].clone();
            target[0] = b1;
            target[1] = b2;
        } else {
            let w1 = small_rat(rng);
            let w2 = small_rat(rng);
            let w3 = small_rat(rng);
            point.insert(VarId::new(level, 1, 1), w1.clone());
            point.insert(VarId::new(level, 1, 2), w2.clone());
            point.insert(VarId::new(level, 2, 2), w3.clone());
            let b3 = target[2].clone() - w1 * target[0].clone() - w2.clone() * target[1].clone();
            let b4 = target[3].clone() - w2 * target[0].clone() - w3 * target[1].clone();
            target[2] = b3;
            target[3] = b4;
        }
    }

    // three-factor base case
    let (a1, a2, a3, a4) = (
        target[0].clone(),
        target[1].clone(),
        target[2].clone(),
        target[3].clone(),
    );
    if a3.is_zero() && a4.is_zero() {
        // z2, z3 are forced to (a1, a2)
        if a1.is_zero() || a2.is_zero() {
            if k == 3 {
                return Some(WitnessOutcome::NotFound(format!(
                    "on the fiber over ({}, {}, 0, 0) the coordinates z2, z3 are forced to the \
                     target, so z2 z3 = 0 identically",
                    a1, a2
                )));
            }
            // a deeper descent can redraw the peeled groups
            return None;
        }
        let c = [a1.clone(), a2.clone()];
        let d = [Rat::zero(), -Rat::one()];
        let w = solve_symmetric(&c, &d).ok()?;
        point.insert(crate::vars::z(2), a1);
        point.insert(crate::vars::z(3), a2);
        point.insert(crate::vars::w(1), w[(0, 0)].clone());
        point.insert(crate::vars::w(2), w[(0, 1)].clone());
        point.insert(crate::vars::w(3), w[(1, 1)].clone());
        point.insert(crate::vars::z(4), small_rat(rng));
        point.insert(crate::vars::z(5), small_rat(rng));
        point.insert(crate::vars::z(6), small_rat(rng));
    } else {
        // choose z2 z3 != 0 and solve the third block for the top pair
        let zhat = [small_rat_nonzero(rng), small_rat_nonzero(rng)];
        let c = [a3.clone(), a4.clone()];
        let d = [a1 - zhat[0].clone(), a2 - zhat[1].clone()];
        let z2_block = solve_symmetric(&c, &d).ok()?;
        let w_rhs = [a3.clone(), a4.clone() - Rat::one()];
        let w_block = solve_symmetric(&zhat, &w_rhs).ok()?;
        point.insert(crate::vars::z(2), zhat[0].clone());
        point.insert(crate::vars::z(3), zhat[1].clone());
        point.insert(crate::vars::w(1), w_block[(0, 0)].clone());
        point.insert(crate::vars::w(2), w_block[(0, 1)].clone());
        point.insert(crate::vars::w(3), w_block[(1, 1)].clone());
        point.insert(crate::vars::z(4), z2_block[(0, 0)].clone());
        point.insert(crate::vars::z(5), z2_block[(0, 1)].clone());
        point.insert(crate::vars::z(6), z2_block[(1, 1)].clone());
    }
    let fp = FiberPoint::from_point(k, 2, point);
    if fp.target == a.to_vec() {
        Some(WitnessOutcome::Found(fp))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::sampling::rng_for;
    use crate::symgroup::{psi_product, symbolic_factors};
    use crate::vars::z;

    #[test]
    fn jacobian_base_case() {
        let j = jacobian(1, 2).unwrap();
        assert_eq!(j.cols, vec![z(2), z(3)]);
        assert_eq!(j.mat.rows(), 4);
        assert_eq!(j.mat[(0, 0)], MPoly::int(1));
        assert_eq!(j.mat[(1, 1)], MPoly::int(1));
        assert!(j.mat[(2, 0)].is_zero() && j.mat[(3, 1)].is_zero());
    }

    #[test]
    fn jacobian_new_block_at_odd_level() {
        // the z5-column of JP^3 carries (P4^2, P3^2) in the top half
        let j = jacobian(3, 2).unwrap();
        let p = crate::symgroup::last_row(2, 2).unwrap();
        let col = j.cols.iter().position(|v| *v == z(5)).unwrap();
        assert_eq!(j.mat[(0, col)], p[3]);
        assert_eq!(j.mat[(1, col)], p[2]);
        assert!(j.mat[(2, col)].is_zero() && j.mat[(3, col)].is_zero());
        let col4 = j.cols.iter().position(|v| *v == z(4)).unwrap();
        assert_eq!(j.mat[(0, col4)], p[2]);
        assert!(j.mat[(1, col4)].is_zero());
    }

    #[test]
    fn jacobian_matches_brute_force_differentiation() {
        for (k, n) in [(1, 2), (2, 2), (3, 2), (4, 2), (5, 2), (3, 1), (3, 3)] {
            let j = jacobian(k, n).unwrap();
            let p = crate::symgroup::last_row(k, n).unwrap();
            for (ci, v) in j.cols.iter().enumerate() {
                for (ri, pi) in p.iter().enumerate() {
                    assert_eq!(
                        j.mat[(ri, ci)],
                        pi.diff(*v),
                        "entry ({ri},{ci}) K={k} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn rank_at_pinned_point_by_both_routes() {
        // z = (1,1,1), w = (1,0,0), third factor zero: the recursion
        // Jacobian and a dense brute-force differentiation of the last
        // row must agree, and the exact rank there is full
        let mut point = Assignment::new();
        point.insert(z(2), rat(1, 1));
        point.insert(z(3), rat(1, 1));
        point.insert(crate::vars::w(1), rat(1, 1));
        let jac = jacobian(3, 2).unwrap();
        let by_recursion = jac.eval(&point);
        let p = crate::symgroup::last_row(3, 2).unwrap();
        let by_diff = Mat::from_fn(4, jac.cols.len(), |i, j| {
            p[i].diff(jac.cols[j]).eval_rat(&point)
        });
        assert_eq!(by_recursion, by_diff);
        assert_eq!(exact_rank(&by_recursion), 4);
        assert_eq!(exact_rank(&by_diff), 4);
    }

    #[test]
    fn non_generic_odd_fibers_reduce_to_the_previous_level() {
        // over a target with vanishing bottom pair, membership at K
        // factors is membership at K-1 factors with a free new group
        let mut rng = rng_for(31, "nongeneric-reduction");
        for _ in 0..20 {
            let a1 = small_rat_nonzero(&mut rng);
            let a2 = small_rat_nonzero(&mut rng);
            let target = vec![a1.clone(), a2.clone(), Rat::zero(), Rat::zero()];
            // a level-4 point on the target fiber, built directly
            let factors = preimage_last_row(&target, 2).unwrap();
            let mut point = Assignment::new();
            for (idx, f) in factors.iter().enumerate() {
                for (i, j) in block_positions(2) {
                    point.insert(VarId::new(idx + 1, i, j), f.params()[(i - 1, j - 1)].clone());
                }
            }
            // check K = 5 membership for arbitrary fresh fifth-factor
            // values, with the fourth factor zero
            assert_eq!(last_row_at(&point, 4, 2), target);
            for (i, j) in block_positions(2) {
                point.insert(VarId::new(5, i, j), small_rat(&mut rng));
            }
            assert_eq!(last_row_at(&point, 5, 2), target);
        }
    }

    #[test]
    fn singular_set_membership() {
        // all variables zero lies in S_3
        let p = Assignment::new();
        assert!(in_singular_set(&p, 3, 2).unwrap());
        // any nonzero z2 leaves S_K
        let mut p = Assignment::new();
        p.insert(z(2), rat(1, 1));
        assert!(!in_singular_set(&p, 3, 2).unwrap());
        assert!(in_singular_set(&p, 1, 2).is_err());
    }

    #[test]
    fn singular_set_proportional_blocks() {
        // z-rows zero, W2 = 2 W1 with W1 of rank one: in S_4 under both readings
        let mut p = Assignment::new();
        let (v1, v2) = (rat(1, 1), rat(2, 1));
        for (m, scale) in [(0usize, rat(1, 1)), (1, rat(2, 1))] {
            let f = 2 + 2 * m;
            p.insert(VarId::new(f, 1, 1), scale.clone() * v1.clone() * v1.clone());
            p.insert(VarId::new(f, 1, 2), scale.clone() * v1.clone() * v2.clone());
            p.insert(VarId::new(f, 2, 2), scale.clone() * v2.clone() * v2.clone());
        }
        let spec = SingularSetSpec::new(4, 2).unwrap();
        assert!(spec.contains(&p));
        assert!(spec.contains_alt_reading(&p));
    }

    #[test]
    fn submersivity_small_run() {
        let mut rng = rng_for(11, "submersivity-test");
        let rep = verify_submersivity(3, 1, 25, &mut rng).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let rep = verify_submersivity(4, 2, 10, &mut rng).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(verify_submersivity(2, 2, 5, &mut rng).is_err());
    }

    #[test]
    fn all_zero_point_has_rank_n() {
        for (k, n) in [(3, 2), (4, 2), (5, 2), (4, 3)] {
            let j = jacobian(k, n).unwrap();
            let point = Assignment::new();
            let m = j.eval(&point);
            assert_eq!(exact_rank(&m), n, "K={k} n={n}");
            // bottom half is identically zero there
            let bottom = m.block(n, 0, n, m.cols());
            assert!(bottom.is_zero_matrix());
        }
    }

    #[test]
    fn solve_symmetric_examples() {
        // c = e1: first column d, free entries zero
        let c = [rat(1, 1), rat(0, 1)];
        let d = [rat(4, 1), rat(7, 1)];
        let m = solve_symmetric(&c, &d).unwrap();
        assert_eq!(m.mul_vec(&c), d.to_vec());
        assert_eq!(m[(0, 0)], rat(4, 1));
        assert_eq!(m[(1, 0)], rat(7, 1));
        assert_eq!(m[(1, 1)], rat(0, 1));

        // c = (0, 1), d = (5, 7) gives [[0,5],[5,7]]
        let c = [rat(0, 1), rat(1, 1)];
        let d = [rat(5, 1), rat(7, 1)];
        let m = solve_symmetric(&c, &d).unwrap();
        assert_eq!(m[(0, 0)], rat(0, 1));
        assert_eq!(m[(0, 1)], rat(5, 1));
        assert_eq!(m[(1, 1)], rat(7, 1));

        // isotropic complex pivot: no inner products involved
        let c = [crate::C64::new(1.0, 0.0), crate::C64::new(0.0, 1.0)];
        let d = [crate::C64::new(2.0, 1.0), crate::C64::new(-1.0, 3.0)];
        let m = solve_symmetric(&c, &d).unwrap();
        let mc = m.mul_vec(&c);
        for (x, y) in mc.iter().zip(&d) {
            assert!((x - y).norm() < 1e-14);
        }

        assert!(solve_symmetric(&[rat(0, 1)], &[rat(1, 1)]).is_err());
    }

    #[test]
    fn preimage_reconstructs_target() {
        let mut rng = rng_for(5, "preimage-test");
        for n in 1..=3usize {
            for trial in 0..20 {
                let mut a: Vec<Rat> = (0..2 * n).map(|_| small_rat(&mut rng)).collect();
                if a.iter().all(|x| x.is_zero()) {
                    a[0] = rat(1, 1);
                }
                let factors = preimage_last_row(&a, n).unwrap();
                let prod = psi_product(&factors).unwrap();
                let last: Vec<Rat> = (0..2 * n).map(|j| prod[(2 * n - 1, j)].clone()).collect();
                assert_eq!(last, a, "n={n} trial={trial}");
            }
        }
        // the basis target e_{2n} forces a nonzero third block
        let e4 = [rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)];
        let factors = preimage_last_row(&e4, 2).unwrap();
        assert!(!factors[2].is_zero());
        let prod = psi_product(&factors).unwrap();
        let last: Vec<Rat> = (0..4).map(|j| prod[(3, j)].clone()).collect();
        assert_eq!(last, e4.to_vec());
        let zeros: Vec<Rat> = vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        assert!(preimage_last_row(&zeros, 2).is_err());
    }

    #[test]
    fn preimage_of_last_row_of_symbolic_product() {
        // applying the constructor to a generic numeric last row of an
        // actual product and re-extracting must be the identity
        let mut rng = rng_for(9, "preimage-prod");
        let factors = symbolic_factors(4, 2);
        let prod = psi_product(&factors).unwrap();
        let point = random_assignment(&mut rng, &active_vars(4, 2));
        let a: Vec<Rat> = (0..4).map(|j| prod[(3, j)].eval_rat(&point)).collect();
        if a.iter().all(|x| x.is_zero()) {
            return;
        }
        let built = preimage_last_row(&a, 2).unwrap();
        let rebuilt = psi_product(&built).unwrap();
        let last: Vec<Rat> = (0..4).map(|j| rebuilt[(3, j)].clone()).collect();
        assert_eq!(last, a);
    }

    #[test]
    fn classify_fiber_examples() {
        let a = |x: [i64; 4]| {
            [
                rat(x[0], 1),
                rat(x[1], 1),
                rat(x[2], 1),
                rat(x[3], 1),
            ]
        };
        assert_eq!(
            classify_fiber(3, &a([0, 0, 0, 1])).unwrap(),
            Stratum::GenericSingular
        );
        assert_eq!(
            classify_fiber(4, &a([1, 0, 0, 1])).unwrap(),
            Stratum::GenericSmooth
        );
        assert_eq!(
            classify_fiber(4, &a([0, 0, 0, 1])).unwrap(),
            Stratum::NonGenericSingular
        );
        assert_eq!(
            classify_fiber(3, &a([5, 2, 0, 0])).unwrap(),
            Stratum::NonGenericSmooth
        );
        assert_eq!(
            classify_fiber(3, &a([1, 1, 2, 1])).unwrap(),
            Stratum::GenericSmooth
        );
        assert!(classify_fiber(3, &a([0, 0, 0, 0])).is_err());
    }

    #[test]
    fn sampled_points_validate() {
        let mut rng = rng_for(3, "fiber-sampling");
        let fp = sample_fiber_point(3, 2, SampleMode::Random, &mut rng).unwrap();
        assert!(fp.validate());

        let fp = sample_fiber_point(3, 2, SampleMode::OnComponent(Component::A1), &mut rng).unwrap();
        assert!(fp.value(z(2)).is_zero() && fp.value(z(3)).is_zero());
        assert_eq!(fp.target[2], rat(0, 1));
        assert_eq!(fp.target[3], rat(1, 1));

        let fp = sample_fiber_point(3, 2, SampleMode::OnComponent(Component::A2), &mut rng).unwrap();
        // kernel condition and singular block
        let wmat = block_at(&fp.point, 2, 2);
        let zvec = [fp.value(z(2)), fp.value(z(3))];
        assert_eq!(wmat.mul_vec(&zvec), vec![rat(0, 1), rat(0, 1)]);
        let det = wmat[(0, 0)].clone() * wmat[(1, 1)].clone()
            - wmat[(0, 1)].clone() * wmat[(1, 0)].clone();
        assert!(det.is_zero());
        assert!(!fp.value(z(2)).is_zero() && !fp.value(z(3)).is_zero());

        for s in [
            Stratum::GenericSmooth,
            Stratum::GenericSingular,
            Stratum::NonGenericSmooth,
        ] {
            let fp = sample_fiber_point(5, 2, SampleMode::OnStratum(s), &mut rng).unwrap();
            let arr = [
                fp.target[0].clone(),
                fp.target[1].clone(),
                fp.target[2].clone(),
                fp.target[3].clone(),
            ];
            assert_eq!(classify_fiber(5, &arr).unwrap(), s);
        }
        assert!(sample_fiber_point(4, 2, SampleMode::OnStratum(Stratum::GenericSingular), &mut rng)
            .is_err());
    }

    #[test]
    fn witness_found_and_excluded_cases() {
        let mut rng = rng_for(17, "witness");
        // K = 5, generic target: witness exists
        let a = [rat(2, 1), rat(-1, 3), rat(1, 2), rat(4, 1)];
        match z2z3_witness(5, &a, None, &mut rng).unwrap() {
            WitnessOutcome::Found(fp) => {
                assert!(fp.validate());
                assert!(!fp.value(z(2)).is_zero() && !fp.value(z(3)).is_zero());
            }
            WitnessOutcome::NotFound(why) => panic!("expected witness: {why}"),
        }
        // K = 3, a = (1, 0, 0, 0): z3 forced to zero
        let a = [rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        assert!(matches!(
            z2z3_witness(3, &a, None, &mut rng).unwrap(),
            WitnessOutcome::NotFound(_)
        ));
        // A1 component of the singular fiber: excluded
        let a = [rat(1, 1), rat(1, 1), rat(0, 1), rat(1, 1)];
        assert!(matches!(
            z2z3_witness(3, &a, Some(Component::A1), &mut rng).unwrap(),
            WitnessOutcome::NotFound(_)
        ));
        // but on A2 a witness exists
        match z2z3_witness(3, &a, Some(Component::A2), &mut rng).unwrap() {
            WitnessOutcome::Found(fp) => {
                assert!(fp.validate());
                assert_eq!(fp.target, a.to_vec());
                assert!(!fp.value(z(2)).is_zero() && !fp.value(z(3)).is_zero());
            }
            WitnessOutcome::NotFound(why) => panic!("expected A2 witness: {why}"),
        }
        // K = 3 with (a3, a4) = (0, 0) and both a1, a2 nonzero: forced
        // coordinates are fine
        let a = [rat(2, 1), rat(3, 1), rat(0, 1), rat(0, 1)];
        match z2z3_witness(3, &a, None, &mut rng).unwrap() {
            WitnessOutcome::Found(fp) => {
                assert!(fp.validate());
                assert_eq!(fp.value(z(2)), rat(2, 1));
                assert_eq!(fp.value(z(3)), rat(3, 1));
            }
            WitnessOutcome::NotFound(why) => panic!("expected witness: {why}"),
        }
        // K = 4 over the lemma's exceptional non-generic singular target
        let a = [rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)];
        match z2z3_witness(4, &a, None, &mut rng).unwrap() {
            WitnessOutcome::Found(fp) => {
                assert!(fp.validate());
                assert!(!fp.value(z(2)).is_zero() && !fp.value(z(3)).is_zero());
            }
            WitnessOutcome::NotFound(why) => panic!("expected witness: {why}"),
        }
    }
}
