//! Pointwise factorization of Sp4(C) matrices into elementary
//! symplectic factors, and the rewriting of such a factorization as a
//! product of exponentials of nilpotent matrices.
//!
//! The pipeline mirrors the constant-matrix content of the last-row
//! argument: build three factors matching the last row, reduce to an
//! SL2 block sitting at rows and columns {1,3}, eliminate it with
//! transvections, and split the remaining residual into the fixed
//! four-factor identity plus one upper factor. The assembled list is
//! re-multiplied and the relative Frobenius residual recorded.

use thiserror::Error;

use crate::matrix::{field_inverse, frobenius, Mat, MatError};
use crate::strata::{preimage_last_row, StrataError};
use crate::symgroup::{
    product_of_factors, psi_embed_unchecked, symplectic_residuals, whitehead_factors, ElemFactor,
    Parity, SymGroupError, SYMPLECTIC_CONDITION_NAMES,
};
use crate::C64;

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("input is not symplectic: {condition} violated by {deviation:.3e}")]
    NotSymplectic { condition: String, deviation: f64 },
    #[error("input 2x2 block is not unimodular: |det - 1| = {0:.3e}")]
    NotUnimodular(f64),
    #[error("stage `{stage}` residual {value:.3e} exceeds tolerance {tol:.3e}")]
    StageResidual {
        stage: &'static str,
        value: f64,
        tol: f64,
    },
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    SymGroup(#[from] SymGroupError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// An SL2 transvection: unit lower or upper triangular with one
/// off-diagonal parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transvection {
    Lower(C64),
    Upper(C64),
}

impl Transvection {
    pub fn matrix(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::identity(2);
        match self {
            Transvection::Lower(c) => m[(1, 0)] = *c,
            Transvection::Upper(b) => m[(0, 1)] = *b,
        }
        m
    }

    /// The standard lift to an elementary factor of the 4x4 group: the
    /// parameter lands at the (1,1) slot of the symmetric block.
    pub fn lift(&self) -> ElemFactor<C64> {
        let (parity, value) = match self {
            Transvection::Lower(c) => (Parity::Lower, *c),
            Transvection::Upper(b) => (Parity::Upper, *b),
        };
        let mut block = Mat::<C64>::zero(2, 2);
        block[(0, 0)] = value;
        ElemFactor::new(parity, block).expect("diagonal block is symmetric")
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Factor a unimodular 2x2 matrix into at most four transvections whose
/// ordered product reconstructs it. Three suffice whenever an
/// off-diagonal pivot is usable; the diagonal case spends one extra
/// pre-transvection to create a pivot.
pub fn factor_sl2(m: &Mat<C64>, tol: f64) -> Result<Vec<Transvection>, FactorError> {
    assert_eq!((m.rows(), m.cols()), (2, 2));
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let dev = (det - one()).norm();
    if dev > tol {
        return Err(FactorError::NotUnimodular(dev));
    }
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let scale = frobenius(m).max(1.0);
    let keep = |t: Transvection| {
        let p = match t {
            Transvection::Lower(x) | Transvection::Upper(x) => x,
        };
        (p.norm() > 0.0).then_some(t)
    };
    let pick = |ts: [Option<Transvection>; 4]| ts.into_iter().flatten().collect::<Vec<_>>();
    if c.norm() >= b.norm() && c.norm() > 1e-8 * scale {
        // U(x) L(c) U(y) with x, y fixed by the diagonal
        let x = (a - one()) / c;
        let y = (d - one()) / c;
        Ok(pick([
            keep(Transvection::Upper(x)),
            keep(Transvection::Lower(c)),
            keep(Transvection::Upper(y)),
            None,
        ]))
    } else if b.norm() > 1e-8 * scale {
        // L(x) U(b) L(y)
        let x = (d - one()) / b;
        let y = (a - one()) / b;
        Ok(pick([
            keep(Transvection::Lower(x)),
            keep(Transvection::Upper(b)),
            keep(Transvection::Lower(y)),
            None,
        ]))
    } else if b.norm() == 0.0 && c.norm() == 0.0 && (a - one()).norm() == 0.0 && (d - one()).norm() == 0.0 {
        Ok(Vec::new())
    } else {
        // near-diagonal: premultiply by L(1) to create a usable pivot
        // (the new lower-left entry a + c cannot be small when ad = 1)
        let c2 = a + c;
        let a2 = a;
        let d2 = b + d;
        let x = (a2 - one()) / c2;
        let y = (d2 - one()) / c2;
        Ok(pick([
            keep(Transvection::Lower(-one())),
            keep(Transvection::Upper(x)),
            keep(Transvection::Lower(c2)),
            keep(Transvection::Upper(y)),
        ]))
    }
}

/// Ordered product of transvections.
pub fn transvection_product(ts: &[Transvection]) -> Mat<C64> {
    let mut acc = Mat::<C64>::identity(2);
    for t in ts {
        acc = acc.mul(&t.matrix());
    }
    acc
}

/// A factorization into elementary factors, with diagnostics.
#[derive(Clone, Debug)]
pub struct FactorizationResult {
    /// Factors in application order: their ordered product reconstructs
    /// the target.
    pub factors: Vec<ElemFactor<C64>>,
    /// Relative Frobenius residual of the reconstruction.
    pub residual: f64,
    pub count: usize,
    /// Structural deviations observed at the reduction stage (the
    /// forced zeros and ones of the reduced matrix).
    pub stage_deviation: f64,
}

/// Check the three symplectic block conditions, naming the first
/// violated one.
pub fn check_symplectic(m: &Mat<C64>, tol: f64) -> Result<(), FactorError> {
    let residuals = symplectic_residuals(m)?;
    for (res, name) in residuals.iter().zip(SYMPLECTIC_CONDITION_NAMES) {
        let dev = crate::matrix::max_abs(res);
        if dev > tol {
            return Err(FactorError::NotSymplectic {
                condition: name.to_string(),
                deviation: dev,
            });
        }
    }
    Ok(())
}

/// Merge adjacent same-parity factors (their parameters add) and drop
/// exact-zero factors, until stable.
pub fn merge_factors(factors: Vec<ElemFactor<C64>>) -> Vec<ElemFactor<C64>> {
    let mut out: Vec<ElemFactor<C64>> = Vec::with_capacity(factors.len());
    for f in factors {
        if f.is_zero() {
            continue;
        }
        match out.last() {
            Some(last) if last.parity() == f.parity() => {
                let merged = ElemFactor::new(f.parity(), last.params().add(f.params()))
                    .expect("sum of symmetric blocks is symmetric");
                out.pop();
                if !merged.is_zero() {
                    out.push(merged);
                }
            }
            _ => out.push(f),
        }
    }
    out
}

/// Factor a symplectic 4x4 matrix into elementary factors.
///
/// Stages: (1) three factors matching the last row; (2) the reduction
/// `C = E A^{-1}`, which must have last row `e4` and the forced column
/// structure; (3) the SL2 block at rows and columns {1,3}; (4) its
/// inverse as lifted transvections; (5) the residual split into the
/// four-factor identity and one upper factor; (6) assembly
/// `A = psi(f~^{-1}) R^{-1} E`, re-multiplication, residual.
pub fn factor_sp4(a: &Mat<C64>, tol: f64) -> Result<FactorizationResult, FactorError> {
    assert_eq!((a.rows(), a.cols()), (4, 4));
    check_symplectic(a, tol)?;
    let scale = frobenius(a).max(1.0);

    // stage 1: elementary product with the same last row
    let last: Vec<C64> = (0..4).map(|j| a[(3, j)]).collect();
    let e_factors = preimage_last_row(&last, 2)?;
    let e = product_of_factors(&e_factors, 2);

    // stage 2: reduce and check the forced structure
    let a_inv = field_inverse(a)?;
    let c = e.mul(&a_inv);
    let forced = [
        (3, 0, C64::new(0.0, 0.0)),
        (3, 1, C64::new(0.0, 0.0)),
        (3, 2, C64::new(0.0, 0.0)),
        (3, 3, one()),
        (0, 1, C64::new(0.0, 0.0)),
        (2, 1, C64::new(0.0, 0.0)),
        (1, 1, one()),
    ];
    let mut stage_deviation: f64 = 0.0;
    for (i, j, want) in forced {
        stage_deviation = stage_deviation.max((c[(i, j)] - want).norm());
    }
    if stage_deviation > tol * scale.max(frobenius(&c)) {
        return Err(FactorError::StageResidual {
            stage: "last-row reduction structure",
            value: stage_deviation,
            tol,
        });
    }

    // stage 3: the SL2 block and its inverse (exact adjugate)
    let f11 = c[(0, 0)];
    let f13 = c[(0, 2)];
    let f31 = c[(2, 0)];
    let f33 = c[(2, 2)];
    let ft_inv = Mat::from_rows(vec![vec![f33, -f13], vec![-f31, f11]]);

    // stage 4: transvections for the inverse block, lifted
    let ts = factor_sl2(&ft_inv, tol.max(1e-9))?;
    let lifted: Vec<ElemFactor<C64>> = ts.iter().map(|t| t.lift()).collect();
    let psi_ft_inv = psi_embed_unchecked(&ft_inv);

    // stage 5: residual split; R carries the last column of C
    let r = c.mul(&psi_ft_inv);
    let u = r[(0, 3)];
    let v = r[(1, 3)];
    let wv = r[(2, 3)];
    let split_dev = (r[(1, 0)] + wv).norm().max((r[(1, 2)] - u).norm());
    if split_dev > tol * scale.max(frobenius(&r)) {
        return Err(FactorError::StageResidual {
            stage: "residual split structure",
            value: split_dev,
            tol,
        });
    }
    let wh = whitehead_factors(&-wv);
    let mut upper_block = Mat::<C64>::zero(2, 2);
    upper_block[(0, 1)] = u;
    upper_block[(1, 0)] = u;
    upper_block[(1, 1)] = u * wv + v;
    let upper = ElemFactor::new(Parity::Upper, upper_block).expect("symmetric by construction");

    // stage 6: A = psi(f~^{-1}) R^{-1} E with elementary inverses
    let mut factors: Vec<ElemFactor<C64>> = Vec::with_capacity(12);
    factors.extend(lifted);
    factors.push(upper.inverse());
    for f in wh.iter().rev() {
        factors.push(f.inverse());
    }
    factors.extend(e_factors);

    let factors = merge_factors(factors);
    let rebuilt = product_of_factors(&factors, 2);
    let residual = frobenius(&rebuilt.sub(a)) / frobenius(a).max(f64::MIN_POSITIVE);
    Ok(FactorizationResult {
        count: factors.len(),
        factors,
        residual,
        stage_deviation,
    })
}

/// Logarithms of a factor list: each elementary factor is unipotent
/// with `(M - I)^2 = 0`, so the series stops after one term and
/// `exp(M - I) = M` exactly.
#[derive(Clone, Debug)]
pub struct ExpFactorization {
    pub logs: Vec<Mat<C64>>,
}

impl ExpFactorization {
    /// `exp` of one nilpotent log: identity plus the log.
    pub fn exp_term(g: &Mat<C64>) -> Mat<C64> {
        Mat::<C64>::identity(4).add(g)
    }

    /// Ordered product of the exponentials.
    pub fn product(&self) -> Mat<C64> {
        let mut acc = Mat::<C64>::identity(4);
        for g in &self.logs {
            acc = acc.mul(&Self::exp_term(g));
        }
        acc
    }

    /// Largest entry of any `G^2`; zero in exact arithmetic and at most
    /// rounding noise in floats.
    pub fn max_square_norm(&self) -> f64 {
        self.logs
            .iter()
            .map(|g| crate::matrix::max_abs(&g.mul(g)))
            .fold(0.0, f64::max)
    }
}

/// The logarithms `G = M - I` of the given factors.
pub fn exp_factorization(factors: &[ElemFactor<C64>]) -> ExpFactorization {
    let id = Mat::<C64>::identity(4);
    ExpFactorization {
        logs: factors.iter().map(|f| f.matrix().sub(&id)).collect(),
    }
}

/// A random symplectic matrix: ordered product of `count` elementary
/// factors with parameters uniform in [-1, 1] on both parts.
pub fn random_symplectic(rng: &mut crate::sampling::Prng, count: usize) -> Mat<C64> {
    let factors = random_factors(rng, count);
    product_of_factors(&factors, 2)
}

/// Random alternating elementary factors with parameters uniform in
/// [-1, 1].
pub fn random_factors(rng: &mut crate::sampling::Prng, count: usize) -> Vec<ElemFactor<C64>> {
    (1..=count)
        .map(|m| {
            let (a, b, c) = (
                crate::sampling::complex_unit(rng),
                crate::sampling::complex_unit(rng),
                crate::sampling::complex_unit(rng),
            );
            let block = Mat::from_rows(vec![vec![a, b], vec![b, c]]);
            ElemFactor::new(Parity::of_factor(m), block).expect("symmetric by construction")
        })
        .collect()
}
