//! JSON exchange formats: matrices with string-encoded entries (no
//! precision loss on the exact path) and factor lists with diagnostics.
//!
//! Matrix entries are `[re, im]` pairs of decimal strings; the exact
//! variant uses rational strings `"p/q"`. Both spellings are accepted
//! on input.

use num::traits::Zero;
use num::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Mat;
use crate::poly::{rat_to_f64, Rat};
use crate::symgroup::{ElemFactor, Parity};
use crate::C64;

#[derive(Debug, Error)]
pub enum JsonIoError {
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("matrix shape mismatch: expected {expected} rows/cols, found {found}")]
    BadShape { expected: usize, found: usize },
    #[error("unknown parity {0:?}, expected \"lower\" or \"upper\"")]
    BadParity(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Parse a decimal or rational string into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, JsonIoError> {
    let s = s.trim();
    let bad = || JsonIoError::BadScalar(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| bad())?;
        let den: BigInt = q.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Ok(Rat::new(num, den));
    }
    let num: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(num))
}

/// Parse a decimal or rational string into a double.
pub fn parse_f64(s: &str) -> Result<f64, JsonIoError> {
    let s = s.trim();
    if s.contains('/') {
        return Ok(rat_to_f64(&parse_rat(s)?));
    }
    s.parse::<f64>()
        .map_err(|_| JsonIoError::BadScalar(s.to_string()))
}

fn render_f64(x: f64) -> String {
    format!("{x}")
}

/// A square matrix of complex entries encoded as string pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<[String; 2]>>,
}

impl MatrixJson {
    pub fn from_c64(m: &Mat<C64>, n: usize) -> Self {
        MatrixJson {
            n,
            entries: (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| [render_f64(m[(i, j)].re), render_f64(m[(i, j)].im)])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_c64(&self) -> Result<Mat<C64>, JsonIoError> {
        let dim = 2 * self.n;
        if self.entries.len() != dim {
            return Err(JsonIoError::BadShape {
                expected: dim,
                found: self.entries.len(),
            });
        }
        let mut m = Mat::<C64>::zero(dim, dim);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != dim {
                return Err(JsonIoError::BadShape {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (j, [re, im]) in row.iter().enumerate() {
                m[(i, j)] = C64::new(parse_f64(re)?, parse_f64(im)?);
            }
        }
        Ok(m)
    }
}

/// One elementary factor on the wire.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorJson {
    pub parity: String,
    pub u: Vec<Vec<[String; 2]>>,
}

impl FactorJson {
    pub fn from_factor(f: &ElemFactor<C64>) -> Self {
        let n = f.n();
        FactorJson {
            parity: match f.parity() {
                Parity::Lower => "lower".to_string(),
                Parity::Upper => "upper".to_string(),
            },
            u: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let x = &f.params()[(i, j)];
                            [render_f64(x.re), render_f64(x.im)]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_factor(&self) -> Result<ElemFactor<C64>, JsonIoError> {
        let parity = match self.parity.as_str() {
            "lower" => Parity::Lower,
            "upper" => Parity::Upper,
            other => return Err(JsonIoError::BadParity(other.to_string())),
        };
        let n = self.u.len();
        let mut block = Mat::<C64>::zero(n, n);
        for (i, row) in self.u.iter().enumerate() {
            if row.len() != n {
                return Err(JsonIoError::BadShape {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, [re, im]) in row.iter().enumerate() {
                block[(i, j)] = C64::new(parse_f64(re)?, parse_f64(im)?);
            }
        }
        ElemFactor::new(parity, block).map_err(|_| JsonIoError::BadShape {
            expected: n,
            found: n,
        })
    }
}

/// Factor list with diagnostics, in application order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorsJson {
    pub factors: Vec<FactorJson>,
    pub count: usize,
    pub residual: f64,
    /// Logarithms of the factors when the exponential form is requested:
    /// each entry exponentiates to the matching factor.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub logs: Option<Vec<MatrixJson>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rat("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-7").unwrap(), rat(-7, 1));
        assert_eq!(parse_rat("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn matrix_roundtrip() {
        let mut m = Mat::<C64>::identity(4);
        m[(0, 3)] = C64::new(0.125, -3.5);
        let js = MatrixJson::from_c64(&m, 2);
        let text = serde_json::to_string(&js).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_c64().unwrap(), m);
    }

    #[test]
    fn matrix_accepts_rational_entries() {
        let js = MatrixJson {
            n: 1,
            entries: vec![
                vec![["1".into(), "0".into()], ["1/2".into(), "0".into()]],
                vec![["0".into(), "0".into()], ["1".into(), "0".into()]],
            ],
        };
        let m = js.to_c64().unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.5, 0.0));
    }

    #[test]
    fn factor_roundtrip() {
        let mut block = Mat::<C64>::zero(2, 2);
        block[(0, 0)] = C64::new(1.5, 0.0);
        block[(0, 1)] = C64::new(-0.25, 2.0);
        block[(1, 0)] = block[(0, 1)];
        let f = ElemFactor::new(Parity::Upper, block).unwrap();
        let js = FactorJson::from_factor(&f);
        assert_eq!(js.parity, "upper");
        let back = js.to_factor().unwrap();
        assert_eq!(back, f);
        let mut bad = js.clone();
        bad.parity = "diagonal".into();
        assert!(bad.to_factor().is_err());
    }
}
