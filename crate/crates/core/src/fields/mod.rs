//! Polynomial vector fields tangent to the fibers of the last-row map,
//! for 2x2 parameter blocks.
//!
//! The basic construction takes two polynomials and three variables and
//! forms the determinant field that is tangent to the joint level sets.
//! Applied to the governing pair of last-row components it yields the
//! candidate fields whose completeness is decided by a degree test (see
//! [`triples`]). Lifting a complete field through the graph structure
//! of the fiber produces the theta/phi/gamma families, which are
//! globally polynomial and tangent to every fiber from their level on.
//!
//! The correction-term signs of theta and phi are fixed by the tangency
//! contract: each built field must annihilate all four last-row
//! components identically. The opposite sign choice (the one the
//! display formulas carry) is kept around as a negative control and the
//! conformance outcome is recorded in reports.

pub mod tables;
pub mod triples;

use std::collections::BTreeMap;

use num::traits::Zero;
use thiserror::Error;

use crate::matrix::{exact_rank, Mat};
use crate::poly::{MPoly, Rat};
use crate::strata::{classify_fiber, Assignment, FiberPoint, Stratum};
use crate::symgroup::last_row;
use crate::vars::{z, VarId};

pub use triples::{classify_triples, triples_by_pattern, xi_set, Triple};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldsError {
    #[error("level {0} is out of range, need {1} <= K")]
    LevelTooSmall(usize, usize),
    #[error("triple {0:?} is not complete at level {1}")]
    NotComplete(Vec<String>, usize),
    #[error("row index {0} out of range 1..=4")]
    BadRow(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A polynomial vector field, stored as its finitely many nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct VField {
    coeffs: BTreeMap<VarId, MPoly>,
}

impl VField {
    pub fn new() -> Self {
        VField {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, v: VarId) -> MPoly {
        self.coeffs.get(&v).cloned().unwrap_or_else(MPoly::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&VarId, &MPoly)> {
        self.coeffs.iter()
    }

    pub fn set_coeff(&mut self, v: VarId, p: MPoly) {
        if p.is_zero() {
            self.coeffs.remove(&v);
        } else {
            self.coeffs.insert(v, p);
        }
    }

    pub fn add_coeff(&mut self, v: VarId, p: MPoly) {
        let sum = self.coeff(v) + p;
        self.set_coeff(v, sum);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Scale every coefficient.
    pub fn scaled(&self, s: &MPoly) -> VField {
        let mut out = VField::new();
        for (v, c) in &self.coeffs {
            out.set_coeff(*v, c.clone() * s.clone());
        }
        out
    }

    /// Apply as a derivation: sum of coefficient times partial.
    pub fn apply(&self, p: &MPoly) -> MPoly {
        let mut acc = MPoly::zero();
        for (v, c) in &self.coeffs {
            acc = acc + c.clone() * p.diff(*v);
        }
        acc
    }
}

impl Default for VField {
    fn default() -> Self {
        Self::new()
    }
}

/// The determinant field of two polynomials restricted to a triple of
/// variables: coefficients are the signed 2x2 minors of the gradient
/// rows, so the field annihilates both inputs identically.
pub fn d_field(p: &MPoly, q: &MPoly, t: &Triple) -> VField {
    let [x, y, zv] = t.vars();
    let minor = |u: VarId, v: VarId| {
        p.diff(u) * q.diff(v) - p.diff(v) * q.diff(u)
    };
    let mut f = VField::new();
    f.set_coeff(x, minor(y, zv));
    f.set_coeff(y, -minor(x, zv));
    f.set_coeff(zv, minor(x, y));
    f
}

/// The governing pair of last-row components at a level: the bottom
/// pair at even levels, the top pair at odd levels.
pub fn governing_pair(level: usize) -> (MPoly, MPoly) {
    let p = last_row(level, 2).expect("level >= 1");
    if level % 2 == 0 {
        (p[2].clone(), p[3].clone())
    } else {
        (p[0].clone(), p[1].clone())
    }
}

/// The level's determinant field for a triple, built from the governing
/// pair.
pub fn governing_field(level: usize, t: &Triple) -> VField {
    let (p, q) = governing_pair(level);
    d_field(&p, &q, t)
}

/// Determinant of the gradient matrix of the four last-row components
/// over a triple, with row `j` (1-based) removed.
pub fn r_minor(level: usize, t: &Triple, j: usize) -> Result<MPoly, FieldsError> {
    if !(1..=4).contains(&j) {
        return Err(FieldsError::BadRow(j));
    }
    let p = last_row(level, 2).expect("level >= 1");
    let rows: Vec<usize> = (0..4).filter(|&r| r + 1 != j).collect();
    let [x, y, zv] = t.vars();
    let grad = Mat::from_fn(3, 3, |ri, ci| {
        let v = [x, y, zv][ci];
        p[rows[ri]].diff(v)
    });
    Ok(crate::matrix::poly_det(&grad).expect("3x3 is square"))
}

/// R-minor evaluated at a rational point, using precomputed gradients.
/// `grads[i]` maps a variable to the value of the partial of the
/// (i+1)-th last-row component.
pub fn r_minor_at(
    grads: &[BTreeMap<VarId, Rat>; 4],
    t: &Triple,
    j: usize,
) -> Rat {
    let rows: Vec<usize> = (0..4).filter(|&r| r + 1 != j).collect();
    let [x, y, zv] = t.vars();
    let g = |r: usize, v: VarId| grads[rows[r]].get(&v).cloned().unwrap_or_else(Rat::zero);
    let m: Vec<Vec<Rat>> = (0..3)
        .map(|r| vec![g(r, x), g(r, y), g(r, zv)])
        .collect();
    let det2 = |a: &Rat, b: &Rat, c: &Rat, d: &Rat| a.clone() * d.clone() - b.clone() * c.clone();
    m[0][0].clone() * det2(&m[1][1], &m[1][2], &m[2][1], &m[2][2])
        - m[0][1].clone() * det2(&m[1][0], &m[1][2], &m[2][0], &m[2][2])
        + m[0][2].clone() * det2(&m[1][0], &m[1][1], &m[2][0], &m[2][1])
}

/// Gradients of the four last-row components at a point: one map per
/// component, over the given variables.
pub fn gradients_at(level: usize, vars: &[VarId], point: &Assignment) -> [BTreeMap<VarId, Rat>; 4] {
    let p = last_row(level, 2).expect("level >= 1");
    let mut out: [BTreeMap<VarId, Rat>; 4] = Default::default();
    for (i, pi) in p.iter().enumerate() {
        for v in vars {
            let d = pi.diff(*v);
            if !d.is_zero() {
                out[i].insert(*v, d.eval_rat(point));
            }
        }
    }
    out
}

/// A lifted field kept in structured form: a scalar polynomial times a
/// base field on the old variables, plus correction terms along new
/// directions. Applying in this form lets the base application collapse
/// before the scale multiplication, which keeps intermediate sizes
/// small at high levels; [`LiftedField::to_vfield`] expands when the
/// coefficient map itself is wanted.
#[derive(Clone, Debug)]
pub struct LiftedField {
    pub scale: MPoly,
    pub base: VField,
    pub corrections: Vec<(VarId, MPoly)>,
}

impl LiftedField {
    pub fn apply(&self, p: &MPoly) -> MPoly {
        let mut acc = self.scale.clone() * self.base.apply(p);
        for (v, c) in &self.corrections {
            acc = acc + c.clone() * p.diff(*v);
        }
        acc
    }

    pub fn to_vfield(&self) -> VField {
        let mut f = self.base.scaled(&self.scale);
        for (v, c) in &self.corrections {
            f.add_coeff(*v, c.clone());
        }
        f
    }
}

/// Sign convention for the correction terms of the theta/phi lifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CorrectionSign {
    /// The sign carried by the display formulas.
    Printed,
    /// The opposite sign, which is the one satisfying the tangency
    /// contract.
    Negated,
}

impl CorrectionSign {
    fn factor(self) -> MPoly {
        match self {
            CorrectionSign::Printed => MPoly::int(1),
            CorrectionSign::Negated => MPoly::int(-1),
        }
    }
}

/// The tangency-conforming sign. Fixed here; the conformance suite
/// demonstrates that the printed sign fails and this one passes.
pub const CONFORMING_SIGN: CorrectionSign = CorrectionSign::Negated;

/// New-direction variables of level `k` (the three variables of the
/// k-th factor), in position order.
pub fn new_direction_vars(k: usize) -> [VarId; 3] {
    [
        VarId::new(k, 1, 1),
        VarId::new(k, 1, 2),
        VarId::new(k, 2, 2),
    ]
}

fn require_complete(k: usize, t: &Triple) -> Result<(), FieldsError> {
    if k < 3 {
        return Err(FieldsError::LevelTooSmall(k, 3));
    }
    let complete = classify_triples(k - 1).map_err(|_| FieldsError::LevelTooSmall(k, 3))?;
    if !complete.contains(t) {
        return Err(FieldsError::NotComplete(
            t.vars().iter().map(|v| v.name(2)).collect(),
            k - 1,
        ));
    }
    Ok(())
}

/// The theta lift of a complete triple to level `k`, in structured
/// form, with an explicit sign convention for the correction terms.
pub fn lifted_theta_signed(
    k: usize,
    t: &Triple,
    sign: CorrectionSign,
) -> Result<LiftedField, FieldsError> {
    require_complete(k, t)?;
    let s = sign.factor();
    let base = governing_field(k - 1, t);
    let p = last_row(k - 1, 2).expect("level >= 1");
    let [d1, d2, _d3] = new_direction_vars(k);
    if k % 2 == 1 {
        // scale by the square of the third component, correct along the
        // first two new variables
        let (p3, p4) = (p[2].clone(), p[3].clone());
        let v1 = base.apply(&p[0]);
        let v2 = base.apply(&p[1]);
        Ok(LiftedField {
            scale: p3.clone() * p3.clone(),
            corrections: vec![
                (d2, s.clone() * p3.clone() * v2.clone()),
                (d1, s * (p3 * v1 - p4 * v2)),
            ],
            base,
        })
    } else {
        let (p1, p2) = (p[0].clone(), p[1].clone());
        let v3 = base.apply(&p[2]);
        let v4 = base.apply(&p[3]);
        Ok(LiftedField {
            scale: p1.clone() * p1.clone(),
            corrections: vec![
                (d2, s.clone() * p1.clone() * v4.clone()),
                (d1, s * (p1 * v3 - p2 * v4)),
            ],
            base,
        })
    }
}

/// The phi lift in structured form, with an explicit sign convention.
pub fn lifted_phi_signed(
    k: usize,
    t: &Triple,
    sign: CorrectionSign,
) -> Result<LiftedField, FieldsError> {
    require_complete(k, t)?;
    let s = sign.factor();
    let base = governing_field(k - 1, t);
    let p = last_row(k - 1, 2).expect("level >= 1");
    let [_d1, d2, d3] = new_direction_vars(k);
    if k % 2 == 1 {
        let (p3, p4) = (p[2].clone(), p[3].clone());
        let v1 = base.apply(&p[0]);
        let v2 = base.apply(&p[1]);
        Ok(LiftedField {
            scale: p4.clone() * p4.clone(),
            corrections: vec![
                (d2, s.clone() * p4.clone() * v1.clone()),
                (d3, s * (p4 * v2 - p3 * v1)),
            ],
            base,
        })
    } else {
        let (p1, p2) = (p[0].clone(), p[1].clone());
        let v3 = base.apply(&p[2]);
        let v4 = base.apply(&p[3]);
        Ok(LiftedField {
            scale: p2.clone() * p2.clone(),
            corrections: vec![
                (d2, s.clone() * p2.clone() * v3.clone()),
                (d3, s * (p2 * v4 - p1 * v3)),
            ],
            base,
        })
    }
}

/// Theta lift as a plain coefficient map, with an explicit sign.
pub fn build_theta_signed(
    k: usize,
    t: &Triple,
    sign: CorrectionSign,
) -> Result<VField, FieldsError> {
    Ok(lifted_theta_signed(k, t, sign)?.to_vfield())
}

/// Phi lift as a plain coefficient map, with an explicit sign.
pub fn build_phi_signed(
    k: usize,
    t: &Triple,
    sign: CorrectionSign,
) -> Result<VField, FieldsError> {
    Ok(lifted_phi_signed(k, t, sign)?.to_vfield())
}

/// Theta lift with the tangency-conforming sign.
pub fn build_theta(k: usize, t: &Triple) -> Result<VField, FieldsError> {
    build_theta_signed(k, t, CONFORMING_SIGN)
}

/// Phi lift with the tangency-conforming sign.
pub fn build_phi(k: usize, t: &Triple) -> Result<VField, FieldsError> {
    build_phi_signed(k, t, CONFORMING_SIGN)
}

/// The gamma field of level `k`: supported on the new directions only,
/// with coefficients from the previous level's governing pair. No sign
/// ambiguity here.
pub fn build_gamma(k: usize) -> Result<VField, FieldsError> {
    if k < 3 {
        return Err(FieldsError::LevelTooSmall(k, 3));
    }
    let p = last_row(k - 1, 2).expect("level >= 1");
    let [d1, d2, d3] = new_direction_vars(k);
    let (a, b) = if k % 2 == 1 {
        (p[2].clone(), p[3].clone())
    } else {
        // even level: the top pair takes over
        (p[1].clone(), p[0].clone())
    };
    let mut f = VField::new();
    if k % 2 == 1 {
        f.set_coeff(d3, a.clone() * a.clone());
        f.set_coeff(d1, b.clone() * b.clone());
        f.set_coeff(d2, -(a * b));
    } else {
        // gamma^{2k} = P1^2 d/dw_{3k} + P2^2 d/dw_{3k-2} - P1 P2 d/dw_{3k-1}
        f.set_coeff(d3, b.clone() * b.clone());
        f.set_coeff(d1, a.clone() * a.clone());
        f.set_coeff(d2, -(a * b));
    }
    Ok(f)
}

/// Whether a field annihilates all four last-row components of a level,
/// as exact polynomial identities.
pub fn annihilates_level(f: &VField, level: usize) -> bool {
    let p = last_row(level, 2).expect("level >= 1");
    p.iter().all(|pi| f.apply(pi).is_zero())
}

/// As [`annihilates_level`], on the structured form.
pub fn lifted_annihilates_level(f: &LiftedField, level: usize) -> bool {
    let p = last_row(level, 2).expect("level >= 1");
    p.iter().all(|pi| f.apply(pi).is_zero())
}

/// Tangency outcome for both sign conventions of one lifted field.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SignConformance {
    pub level: usize,
    pub printed_ok: bool,
    pub negated_ok: bool,
}

/// Test both sign conventions of the theta lift on one triple.
pub fn theta_sign_conformance(k: usize, t: &Triple) -> Result<SignConformance, FieldsError> {
    let printed = build_theta_signed(k, t, CorrectionSign::Printed)?;
    let negated = build_theta_signed(k, t, CorrectionSign::Negated)?;
    Ok(SignConformance {
        level: k,
        printed_ok: annihilates_level(&printed, k),
        negated_ok: annihilates_level(&negated, k),
    })
}

/// The rank of the two-row matrix of R-minors over all complete triples
/// of the previous level, evaluated at a point. Rows are the first two
/// minors at odd levels and the last two at even levels.
pub fn omega_rank(k: usize, fp: &FiberPoint) -> Result<usize, FieldsError> {
    if k < 3 {
        return Err(FieldsError::LevelTooSmall(k, 3));
    }
    let triples = classify_triples(k - 1).map_err(|_| FieldsError::LevelTooSmall(k, 3))?;
    let vars = crate::vars::active_vars(k - 1, 2);
    let grads = gradients_at(k - 1, &vars, &fp.point);
    let (j1, j2) = if k % 2 == 1 { (1, 2) } else { (3, 4) };
    let cols: Vec<Vec<Rat>> = triples
        .iter()
        .map(|t| vec![r_minor_at(&grads, t, j1), r_minor_at(&grads, t, j2)])
        .collect();
    let m = Mat::from_fn(2, cols.len(), |i, j| cols[j][i].clone());
    Ok(exact_rank(&m))
}

/// The stacked four-row matrix of R-minors at level `l`, with columns
/// over the complete triples of `triple_level`, evaluated at a point.
pub fn stacked_r_matrix(
    triple_level: usize,
    l: usize,
    point: &Assignment,
) -> Result<Mat<Rat>, FieldsError> {
    if l < triple_level {
        return Err(FieldsError::LevelTooSmall(l, triple_level));
    }
    let triples = classify_triples(triple_level).map_err(|_| FieldsError::LevelTooSmall(triple_level, 2))?;
    let vars = crate::vars::active_vars(l, 2);
    let grads = gradients_at(l, &vars, point);
    let cols: Vec<Vec<Rat>> = triples
        .iter()
        .map(|t| (1..=4).map(|j| r_minor_at(&grads, t, j)).collect())
        .collect();
    Ok(Mat::from_fn(4, cols.len(), |i, j| cols[j][i].clone()))
}

/// The matrix of new-direction components of the level-`k` field
/// collection (theta and phi over all complete triples of the previous
/// level, plus gamma), evaluated at a point. One row per field, three
/// columns.
pub fn spanning_matrix(k: usize, fp: &FiberPoint) -> Result<Mat<Rat>, FieldsError> {
    if k < 3 {
        return Err(FieldsError::LevelTooSmall(k, 3));
    }
    let triples = classify_triples(k - 1).map_err(|_| FieldsError::LevelTooSmall(k, 3))?;
    let vars = crate::vars::active_vars(k - 1, 2);
    let grads = gradients_at(k - 1, &vars, &fp.point);
    let p = last_row(k - 1, 2).expect("level >= 1");
    let sign = match CONFORMING_SIGN {
        CorrectionSign::Printed => Rat::from_integer(1.into()),
        CorrectionSign::Negated => Rat::from_integer((-1).into()),
    };
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(2 * triples.len() + 1);
    if k % 2 == 1 {
        let p3 = p[2].eval_rat(&fp.point);
        let p4 = p[3].eval_rat(&fp.point);
        for t in triples.iter() {
            // the first two R-minors are the base field applied to the
            // top pair of the previous level
            let v2 = r_minor_at(&grads, t, 1);
            let v1 = r_minor_at(&grads, t, 2);
            rows.push(vec![
                sign.clone() * (p3.clone() * v1.clone() - p4.clone() * v2.clone()),
                sign.clone() * p3.clone() * v2.clone(),
                Rat::zero(),
            ]);
            rows.push(vec![
                Rat::zero(),
                sign.clone() * p4.clone() * v1.clone(),
                sign.clone() * (p4.clone() * v2 - p3.clone() * v1),
            ]);
        }
        rows.push(vec![
            p4.clone() * p4.clone(),
            -(p3.clone() * p4.clone()),
            p3.clone() * p3.clone(),
        ]);
    } else {
        let p1 = p[0].eval_rat(&fp.point);
        let p2 = p[1].eval_rat(&fp.point);
        for t in triples.iter() {
            let v4 = r_minor_at(&grads, t, 3);
            let v3 = r_minor_at(&grads, t, 4);
            rows.push(vec![
                sign.clone() * (p1.clone() * v3.clone() - p2.clone() * v4.clone()),
                sign.clone() * p1.clone() * v4.clone(),
                Rat::zero(),
            ]);
            rows.push(vec![
                Rat::zero(),
                sign.clone() * p2.clone() * v3.clone(),
                sign.clone() * (p2.clone() * v4 - p1.clone() * v3),
            ]);
        }
        rows.push(vec![
            p2.clone() * p2.clone(),
            -(p1.clone() * p2.clone()),
            p1.clone() * p1.clone(),
        ]);
    }
    Ok(Mat::from_rows(rows))
}

/// Whether the level-`k` collection spans all three new directions at
/// the point. Preconditions: the point lies on a generic fiber and
/// `z2 z3 != 0` there; violations are reported as errors, not asserted.
pub fn spanning_check(k: usize, fp: &FiberPoint) -> Result<bool, FieldsError> {
    let target: [Rat; 4] = [
        fp.target[0].clone(),
        fp.target[1].clone(),
        fp.target[2].clone(),
        fp.target[3].clone(),
    ];
    let stratum = classify_fiber(k, &target)
        .map_err(|e| FieldsError::Precondition(format!("classify_fiber: {e}")))?;
    if !matches!(stratum, Stratum::GenericSmooth | Stratum::GenericSingular) {
        return Err(FieldsError::Precondition(format!(
            "point lies on a non-generic fiber ({stratum:?})"
        )));
    }
    let z2z3 = fp.value(z(2)) * fp.value(z(3));
    if z2z3.is_zero() {
        return Err(FieldsError::Precondition("z2 z3 vanishes at the point".into()));
    }
    let m = spanning_matrix(k, fp)?;
    Ok(exact_rank(&m) == 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::sampling::rng_for;
    use crate::strata::{sample_fiber_point, z2z3_witness, SampleMode, WitnessOutcome};
    use crate::vars::w;

    fn t3(a: VarId, b: VarId, c: VarId) -> Triple {
        Triple::new(a, b, c).unwrap()
    }

    #[test]
    fn d_field_table_rows() {
        let (p3, p4) = governing_pair(2);
        // level-2 field on (w1, w2, w3): z3^2 d/dw1 - z2 z3 d/dw2 + z2^2 d/dw3
        let f = d_field(&p3, &p4, &t3(w(1), w(2), w(3)));
        assert_eq!(f.coeff(w(1)).render(2), "z3^2");
        assert_eq!(f.coeff(w(2)).render(2), "-z2*z3");
        assert_eq!(f.coeff(w(3)).render(2), "z2^2");
        // coefficient of d/dw1 in the (z2, z3, w1) field
        let f = d_field(&p3, &p4, &t3(z(2), z(3), w(1)));
        assert_eq!(f.coeff(w(1)).render(2), "w1*w3 - w2^2");
        // the field annihilates both inputs identically
        assert!(f.apply(&p3).is_zero());
        assert!(f.apply(&p4).is_zero());
    }

    #[test]
    fn d_field_of_equal_inputs_is_zero() {
        let (p3, _) = governing_pair(2);
        let f = d_field(&p3, &p3, &t3(z(2), w(1), w(2)));
        assert!(f.is_zero());
    }

    #[test]
    fn r_minor_table_values() {
        // row (z2, w2, w3): only the second minor survives, equal to z3^2
        let t = t3(z(2), w(2), w(3));
        assert_eq!(r_minor(2, &t, 2).unwrap().render(2), "z3^2");
        assert!(r_minor(2, &t, 1).unwrap().is_zero());
        // row (w1, w2, w3): all four minors vanish
        let t = t3(w(1), w(2), w(3));
        for j in 1..=4 {
            assert!(r_minor(2, &t, j).unwrap().is_zero());
        }
        // row (z2, z3, w1): (z2 w2, -z2 w3, 0, z2)
        let t = t3(z(2), z(3), w(1));
        assert_eq!(r_minor(2, &t, 1).unwrap().render(2), "z2*w2");
        assert_eq!(r_minor(2, &t, 2).unwrap().render(2), "-z2*w3");
        assert!(r_minor(2, &t, 3).unwrap().is_zero());
        assert_eq!(r_minor(2, &t, 4).unwrap().render(2), "z2");
        assert!(r_minor(2, &t, 5).is_err());
    }

    #[test]
    fn r_minor_equals_governing_application_on_old_triples() {
        // both routes: row-deleted determinant vs applying the previous
        // level's field
        for k in [3usize, 5] {
            let lower = k - 1;
            let p_low = last_row(lower, 2).unwrap();
            let vars = crate::vars::active_vars(lower, 2);
            for t in triples_over(&vars) {
                let base = governing_field(lower, &t);
                assert_eq!(
                    r_minor(k, &t, 1).unwrap(),
                    base.apply(&p_low[1]),
                    "K={k} t={t:?} row 1"
                );
                assert_eq!(
                    r_minor(k, &t, 2).unwrap(),
                    base.apply(&p_low[0]),
                    "K={k} t={t:?} row 2"
                );
            }
        }
        for k in [2usize, 4] {
            let lower = k - 1;
            let p_low = last_row(lower, 2).unwrap();
            let vars = crate::vars::active_vars(lower, 2);
            for t in triples_over(&vars) {
                let base = governing_field(lower, &t);
                assert_eq!(r_minor(k, &t, 3).unwrap(), base.apply(&p_low[3]));
                assert_eq!(r_minor(k, &t, 4).unwrap(), base.apply(&p_low[2]));
            }
        }
    }

    fn triples_over(vars: &[VarId]) -> Vec<Triple> {
        let mut out = Vec::new();
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                for k in j + 1..vars.len() {
                    out.push(Triple::new(vars[i], vars[j], vars[k]).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn gamma_annihilates_by_cancellation() {
        for k in 3..=6 {
            let g = build_gamma(k).unwrap();
            assert!(annihilates_level(&g, k), "gamma at level {k}");
        }
    }

    #[test]
    fn theta_phi_tangency_and_sign() {
        let t = t3(z(2), z(3), w(1));
        for k in [3usize, 4] {
            let conf = theta_sign_conformance(k, &t).unwrap();
            assert!(conf.negated_ok, "negated sign must conform at level {k}");
            assert!(!conf.printed_ok, "printed sign must fail at level {k}");
            let theta = build_theta(k, &t).unwrap();
            let phi = build_phi(k, &t).unwrap();
            assert!(annihilates_level(&theta, k));
            assert!(annihilates_level(&phi, k));
            // and the printed phi fails too
            let phi_printed = build_phi_signed(k, &t, CorrectionSign::Printed).unwrap();
            assert!(!annihilates_level(&phi_printed, k));
        }
    }

    #[test]
    fn lifted_fields_stay_tangent_above_their_level() {
        let t = t3(z(2), z(3), w(1));
        let theta = build_theta(3, &t).unwrap();
        for l in 3..=5 {
            assert!(annihilates_level(&theta, l), "level {l}");
        }
        let gamma = build_gamma(3).unwrap();
        for l in 3..=5 {
            assert!(annihilates_level(&gamma, l), "gamma level {l}");
        }
    }

    #[test]
    fn builder_rejects_incomplete_triples() {
        // (z2, z3, w2) is a quadratic triple at level 2
        let t = t3(z(2), z(3), w(2));
        assert!(matches!(
            build_theta(3, &t),
            Err(FieldsError::NotComplete(..))
        ));
    }

    #[test]
    fn d_field_annihilates_governing_pairs_up_to_level_six() {
        let mut rng = rng_for(41, "dfield-levels");
        for level in 2..=6 {
            let (p, q) = governing_pair(level);
            let vars = crate::vars::active_vars(level, 2);
            for _ in 0..5 {
                use rand::Rng;
                let mut idx = [0usize; 3];
                loop {
                    idx = [
                        rng.gen_range(0..vars.len()),
                        rng.gen_range(0..vars.len()),
                        rng.gen_range(0..vars.len()),
                    ];
                    idx.sort_unstable();
                    if idx[0] != idx[1] && idx[1] != idx[2] {
                        break;
                    }
                }
                let t = Triple::new(vars[idx[0]], vars[idx[1]], vars[idx[2]]).unwrap();
                let f = d_field(&p, &q, &t);
                assert!(f.apply(&p).is_zero(), "level {level} {t:?}");
                assert!(f.apply(&q).is_zero(), "level {level} {t:?}");
            }
        }
    }

    #[test]
    fn good_set_fields_span_the_base_tangent_space() {
        // the three fields on (z3,w1,w3), (z2,w1,w3), (w1,w2,w3) span
        // the tangent space of the base-level joint level set wherever
        // z2 z3 != 0 (three dimensions: five variables, two equations)
        let mut rng = rng_for(43, "good-set");
        let (p3, p4) = governing_pair(2);
        let fields = [
            d_field(&p3, &p4, &t3(z(3), w(1), w(3))),
            d_field(&p3, &p4, &t3(z(2), w(1), w(3))),
            d_field(&p3, &p4, &t3(w(1), w(2), w(3))),
        ];
        let vars = crate::vars::active_vars(2, 2);
        for _ in 0..25 {
            let mut point = crate::sampling::random_assignment(&mut rng, &vars);
            point.insert(z(2), crate::sampling::small_rat_nonzero(&mut rng));
            point.insert(z(3), crate::sampling::small_rat_nonzero(&mut rng));
            let m = Mat::from_fn(3, vars.len(), |i, j| {
                fields[i].coeff(vars[j]).eval_rat(&point)
            });
            assert_eq!(exact_rank(&m), 3);
        }
    }

    #[test]
    fn omega_rank_zero_at_origin_and_generic_two() {
        let mut rng = rng_for(23, "omega");
        let origin = FiberPoint::from_point(3, 2, Assignment::new());
        assert_eq!(omega_rank(3, &origin).unwrap(), 0);
        // generic points give full rank two
        let fp = sample_fiber_point(4, 2, SampleMode::Random, &mut rng).unwrap();
        assert_eq!(omega_rank(4, &fp).unwrap(), 2);
    }

    #[test]
    fn spanning_rank_three_on_witness_points() {
        let mut rng = rng_for(29, "spanning");
        let a = [rat(1, 1), rat(2, 1), rat(1, 2), rat(-1, 1)];
        for k in [4usize, 5] {
            match z2z3_witness(k, &a, None, &mut rng).unwrap() {
                WitnessOutcome::Found(fp) => {
                    assert!(spanning_check(k, &fp).unwrap(), "K={k}");
                }
                WitnessOutcome::NotFound(why) => panic!("no witness: {why}"),
            }
        }
    }

    #[test]
    fn spanning_preconditions_are_reported() {
        // non-generic target for odd K
        let mut point = Assignment::new();
        point.insert(z(2), rat(1, 1));
        point.insert(z(3), rat(1, 1));
        let fp = FiberPoint::from_point(3, 2, point);
        // target is (1, 1, w-part...) with zero bottom pair: (a3, a4) = (0, 1)
        // computed exactly; only assert that precondition errors surface
        let res = spanning_check(3, &fp);
        match res {
            Ok(_) => {}
            Err(FieldsError::Precondition(_)) => {}
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }
}
