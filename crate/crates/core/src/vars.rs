//! Variable identifiers for the parameter space of an alternating product
//! of elementary symplectic factors.
//!
//! Factor `f` (1-based, counted along the product) carries a symmetric
//! `n x n` parameter block. Odd factors are lower triangular block
//! matrices and their variables print as `z`'s, even factors are upper
//! and print as `w`'s. For `n = 2` the flat names match the usual
//! convention: factor 1 holds `z1, z2, z3` at positions `(1,1), (1,2),
//! (2,2)`, factor 2 holds `w1, w2, w3`, factor 3 holds `z4, z5, z6` and
//! so on.

use std::fmt;

use crate::symgroup::Parity;

/// One entry of the symmetric parameter block of one elementary factor.
///
/// `row <= col` always holds; the mirrored position denotes the same
/// variable. The derived ordering (factor, row, col) is the fixed
/// variable order used for monomial comparison everywhere.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub factor: u16,
    pub row: u8,
    pub col: u8,
}

impl VarId {
    pub fn new(factor: usize, row: usize, col: usize) -> Self {
        assert!(factor >= 1, "factor index is 1-based");
        assert!(row >= 1 && row <= col, "position must satisfy 1 <= i <= j");
        VarId {
            factor: factor as u16,
            row: row as u8,
            col: col as u8,
        }
    }

    pub fn parity(&self) -> Parity {
        if self.factor % 2 == 1 {
            Parity::Lower
        } else {
            Parity::Upper
        }
    }

    /// Ordinal of the factor among factors of the same parity (the `k`
    /// in the group names `Z_k`, `W_k`).
    pub fn group(&self) -> usize {
        ((self.factor as usize) + 1) / 2
    }

    /// Flat index within the paper's `n = 2` naming: `z1..z3` for the
    /// first lower factor, `w1..w3` for the first upper factor, etc.
    /// Only meaningful when the block size is 2.
    pub fn flat_index(&self) -> usize {
        let offset = match (self.row, self.col) {
            (1, 1) => 1,
            (1, 2) => 2,
            (2, 2) => 3,
            _ => panic!("flat_index is defined for 2x2 blocks only"),
        };
        3 * (self.group() - 1) + offset
    }

    /// Canonical display name: flat `z5`/`w3` names when the block size
    /// is 2, `z2_13`-style names otherwise.
    pub fn name(&self, n: usize) -> String {
        let letter = match self.parity() {
            Parity::Lower => 'z',
            Parity::Upper => 'w',
        };
        if n == 2 {
            format!("{}{}", letter, self.flat_index())
        } else {
            format!("{}{}_{}{}", letter, self.group(), self.row, self.col)
        }
    }

    /// Whether this variable sits in the last row of its block, i.e.
    /// `col == n` (using symmetry, position `(i, n)` is row `n` column `i`).
    pub fn is_last_row(&self, n: usize) -> bool {
        self.col as usize == n
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}({},{})", self.factor, self.row, self.col)
    }
}

/// The flat variable `z_m` or `w_m` of the `n = 2` naming as a `VarId`.
pub fn flat(parity: Parity, m: usize) -> VarId {
    assert!(m >= 1);
    let group = (m - 1) / 3 + 1;
    let factor = match parity {
        Parity::Lower => 2 * group - 1,
        Parity::Upper => 2 * group,
    };
    let (row, col) = match (m - 1) % 3 {
        0 => (1, 1),
        1 => (1, 2),
        _ => (2, 2),
    };
    VarId::new(factor, row, col)
}

/// `z_m` in the flat `n = 2` naming.
pub fn z(m: usize) -> VarId {
    flat(Parity::Lower, m)
}

/// `w_m` in the flat `n = 2` naming.
pub fn w(m: usize) -> VarId {
    flat(Parity::Upper, m)
}

/// All block positions `(i, j)` with `1 <= i <= j <= n` in variable order.
pub fn block_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 1..=n {
        for j in i..=n {
            out.push((i, j));
        }
    }
    out
}

/// All variables of the first `k` factors, in variable order.
pub fn level_vars(k: usize, n: usize) -> Vec<VarId> {
    let mut out = Vec::new();
    for f in 1..=k {
        for (i, j) in block_positions(n) {
            out.push(VarId::new(f, i, j));
        }
    }
    out
}

/// The variables that actually enter the last-row map: all variables of
/// the first `k` factors except the non-last-row positions of factor 1
/// (for `n = 2` this drops exactly `z1`).
pub fn active_vars(k: usize, n: usize) -> Vec<VarId> {
    level_vars(k, n)
        .into_iter()
        .filter(|v| v.factor != 1 || v.is_last_row(n))
        .collect()
}
