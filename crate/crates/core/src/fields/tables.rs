//! Regeneration of the three reference tables and the byte-level diff
//! against their embedded transcriptions.
//!
//! Table 1 lists the coefficients of the level-2 determinant fields for
//! the seven complete triples, table 2 their four R-minors, table 3 the
//! nonvanishing partials of the four-factor last-row components on the
//! locus `z2 = z3 = z5 = z6 = 0`.
//!
//! Two transcribed cells fail recomputation; both are cross-checked
//! independently (one against table 2 via the R-minor identity, one
//! against the two-step recursion) and recorded as errata. The diff
//! reports them separately from genuine mismatches, which remain hard
//! failures naming the cell.

use std::collections::BTreeMap;

use super::{d_field, governing_pair, r_minor, Triple};
use crate::poly::Rat;
use crate::symgroup::last_row;
use crate::vars::{w, z, VarId};

/// Row labels of tables 1 and 2: the seven complete triples of the base
/// level, in reference order.
pub fn table_rows() -> Vec<Triple> {
    let mk = |a: VarId, b: VarId, c: VarId| Triple::new(a, b, c).unwrap();
    vec![
        mk(w(1), w(2), w(3)),
        mk(z(2), w(2), w(3)),
        mk(z(3), w(1), w(2)),
        mk(z(2), w(1), w(3)),
        mk(z(3), w(1), w(3)),
        mk(z(2), z(3), w(1)),
        mk(z(2), z(3), w(3)),
    ]
}

pub const TABLE1_COLS: [&str; 5] = ["d/dz2", "d/dz3", "d/dw1", "d/dw2", "d/dw3"];
pub const TABLE2_COLS: [&str; 4] = ["R1", "R2", "R3", "R4"];
pub const TABLE3_COLS: [&str; 4] = ["d/dz2", "d/dz3", "d/dz5", "d/dz6"];
pub const TABLE3_ROWS: [&str; 4] = ["P1^4", "P2^4", "P3^4", "P4^4"];

/// Embedded transcription of table 1 (field coefficients), canonical
/// rendering, rows as in [`table_rows`].
pub const TABLE1_REF: [[&str; 5]; 7] = [
    ["0", "0", "z3^2", "-z2*z3", "z2^2"],
    ["z3^2", "0", "0", "-z3*w1", "z2*w1 - z3*w2"],
    ["0", "z2^2", "-z2*w2 + z3*w3", "-z2*w3", "0"],
    ["z2*z3", "0", "-z3*w1", "0", "-z2*w2"],
    ["0", "z2*z3", "-z3*w2", "0", "-z2*w3"],
    ["-z2*w3", "z2*w2", "w1*w3 - w2^2", "0", "0"],
    // the second cell of this row fails recomputation; see ERRATA
    ["z3*w2", "z3*w1", "0", "0", "w1*w3 - w2^2"],
];

/// Embedded transcription of table 2 (R-minors of the base level).
pub const TABLE2_REF: [[&str; 4]; 7] = [
    ["0", "0", "0", "0"],
    ["0", "z3^2", "0", "0"],
    ["z2^2", "0", "0", "0"],
    ["0", "z2*z3", "0", "0"],
    ["z2*z3", "0", "0", "0"],
    ["z2*w2", "-z2*w3", "0", "z2"],
    ["-z3*w1", "z3*w2", "z3", "0"],
];

/// Embedded transcription of table 3 (partials of the four-factor
/// last-row components on `z2 = z3 = z5 = z6 = 0`).
pub const TABLE3_REF: [[&str; 4]; 4] = [
    // the second cell of this row fails recomputation; see ERRATA
    ["w1*z4 + 1", "w3*z4", "1", "0"],
    ["0", "1", "0", "1"],
    ["w1*z4*w4 + w1 + w4", "w2*z4*w4 + w2 + w5", "w4", "w5"],
    ["w1*z4*w5 + w2 + w5", "w2*z4*w5 + w3 + w6", "w5", "w6"],
];

/// A known transcription error: the reference cell disagrees with
/// recomputation, and the recomputed value is confirmed by an
/// independent identity.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Erratum {
    pub table: &'static str,
    pub row: &'static str,
    pub col: &'static str,
    pub reference: &'static str,
    pub recomputed: &'static str,
    pub cross_check: &'static str,
}

/// The two reference cells that fail recomputation.
pub const ERRATA: [Erratum; 2] = [
    Erratum {
        table: "table1",
        row: "(z2,z3,w3)",
        col: "d/dz3",
        reference: "z3*w1",
        recomputed: "-z3*w1",
        cross_check: "table 2 row (z2,z3,w3) carries R1 = -z3*w1, and R1 is exactly this \
                      coefficient (the field applied to the second component)",
    },
    Erratum {
        table: "table3",
        row: "P1^4",
        col: "d/dz3",
        reference: "w3*z4",
        recomputed: "w2*z4",
        cross_check: "the two-step recursion gives d P1^4/dz3 = z4*w2 + z5*w3, which restricts \
                      to w2*z4 on the locus; the full symbolic product agrees",
    },
];

/// All three tables, recomputed from scratch.
#[derive(Clone, Debug)]
pub struct Tables {
    pub table1: Vec<Vec<String>>,
    pub table2: Vec<Vec<String>>,
    pub table3: Vec<Vec<String>>,
}

/// Recompute every cell symbolically.
pub fn regen_tables() -> Tables {
    let rows = table_rows();
    let (p3, p4) = governing_pair(2);
    let cols1 = [z(2), z(3), w(1), w(2), w(3)];
    let table1 = rows
        .iter()
        .map(|t| {
            let f = d_field(&p3, &p4, t);
            cols1.iter().map(|v| f.coeff(*v).render(2)).collect()
        })
        .collect();
    let table2 = rows
        .iter()
        .map(|t| {
            (1..=4)
                .map(|j| r_minor(2, t, j).expect("row index in range").render(2))
                .collect()
        })
        .collect();

    // table 3: partials of the four-factor components, restricted to
    // the locus where the base and third-group last-row variables vanish
    let p4k = last_row(4, 2).expect("four factors");
    let locus: BTreeMap<VarId, Rat> = [z(2), z(3), z(5), z(6)]
        .into_iter()
        .map(|v| (v, Rat::from_integer(0.into())))
        .collect();
    let cols3 = [z(2), z(3), z(5), z(6)];
    let table3 = p4k
        .iter()
        .map(|pi| {
            cols3
                .iter()
                .map(|v| pi.diff(*v).substitute(&locus).render(2))
                .collect()
        })
        .collect();
    Tables {
        table1,
        table2,
        table3,
    }
}

/// One differing cell.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CellDiff {
    pub table: String,
    pub row: String,
    pub col: String,
    pub reference: String,
    pub recomputed: String,
}

/// Outcome of the byte-level comparison: cells matching a recorded
/// erratum are confirmed separately; anything else differing is a
/// mismatch.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TableDiff {
    pub cells_checked: usize,
    pub mismatches: Vec<CellDiff>,
    pub errata_confirmed: Vec<CellDiff>,
}

impl TableDiff {
    pub fn clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare recomputed tables against the embedded transcription.
pub fn diff_tables(tables: &Tables) -> TableDiff {
    let mut diff = TableDiff {
        cells_checked: 0,
        mismatches: Vec::new(),
        errata_confirmed: Vec::new(),
    };
    let row_names: Vec<String> = table_rows().iter().map(|t| t.names2()).collect();
    compare(
        &mut diff,
        "table1",
        &row_names,
        &TABLE1_COLS,
        &tables.table1,
        &TABLE1_REF.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
    );
    compare(
        &mut diff,
        "table2",
        &row_names,
        &TABLE2_COLS,
        &tables.table2,
        &TABLE2_REF.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
    );
    let rows3: Vec<String> = TABLE3_ROWS.iter().map(|s| s.to_string()).collect();
    compare(
        &mut diff,
        "table3",
        &rows3,
        &TABLE3_COLS,
        &tables.table3,
        &TABLE3_REF.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
    );
    diff
}

fn compare(
    diff: &mut TableDiff,
    table: &str,
    rows: &[String],
    cols: &[&str],
    got: &[Vec<String>],
    reference: &[Vec<&str>],
) {
    for (ri, row) in reference.iter().enumerate() {
        for (ci, cell) in row.iter().enumerate() {
            diff.cells_checked += 1;
            let recomputed = &got[ri][ci];
            if recomputed == cell {
                continue;
            }
            let d = CellDiff {
                table: table.to_string(),
                row: rows[ri].clone(),
                col: cols[ci].to_string(),
                reference: cell.to_string(),
                recomputed: recomputed.clone(),
            };
            let known = ERRATA.iter().any(|e| {
                e.table == table
                    && e.row == rows[ri]
                    && e.col == cols[ci]
                    && e.reference == *cell
                    && e.recomputed == *recomputed
            });
            if known {
                diff.errata_confirmed.push(d);
            } else {
                diff.mismatches.push(d);
            }
        }
    }
}

/// Canonical text rendering of one table.
pub fn render_table(name: &str, rows: &[String], cols: &[&str], cells: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {name}\n"));
    out.push_str(&format!("# columns: {}\n", cols.join(" | ")));
    for (label, row) in rows.iter().zip(cells) {
        out.push_str(&format!("{label}: {}\n", row.join(" | ")));
    }
    out
}

/// The three canonical table files as (filename, contents) pairs.
pub fn render_all(tables: &Tables) -> Vec<(String, String)> {
    let row_names: Vec<String> = table_rows().iter().map(|t| t.names2()).collect();
    let rows3: Vec<String> = TABLE3_ROWS.iter().map(|s| s.to_string()).collect();
    vec![
        (
            "table1.txt".to_string(),
            render_table("table 1: field coefficients", &row_names, &TABLE1_COLS, &tables.table1),
        ),
        (
            "table2.txt".to_string(),
            render_table("table 2: R-minors", &row_names, &TABLE2_COLS, &tables.table2),
        ),
        (
            "table3.txt".to_string(),
            render_table(
                "table 3: partials on the vanishing locus",
                &rows3,
                &TABLE3_COLS,
                &tables.table3,
            ),
        ),
    ]
}

impl Triple {
    /// Row-label rendering used by the tables.
    pub fn names2(&self) -> String {
        self.names()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regenerated_tables_match_reference_up_to_recorded_errata() {
        let tables = regen_tables();
        let diff = diff_tables(&tables);
        assert_eq!(diff.cells_checked, 35 + 28 + 16);
        assert!(
            diff.mismatches.is_empty(),
            "unexpected mismatches: {:?}",
            diff.mismatches
        );
        assert_eq!(diff.errata_confirmed.len(), ERRATA.len());
    }

    #[test]
    fn erratum_cells_are_cross_checked() {
        // table 1 erratum: the coefficient equals the first R-minor of
        // the same row
        let t = Triple::new(z(2), z(3), w(3)).unwrap();
        let (p3, p4) = governing_pair(2);
        let f = d_field(&p3, &p4, &t);
        let r1 = r_minor(2, &t, 1).unwrap();
        assert_eq!(f.coeff(z(3)), r1);
        assert_eq!(r1.render(2), "-z3*w1");

        // table 3 erratum: recomputed value via an independent full
        // product of the four factor matrices
        let factors = crate::symgroup::symbolic_factors(4, 2);
        let prod = crate::symgroup::psi_product(&factors).unwrap();
        let p1 = prod[(3, 0)].clone();
        let locus: BTreeMap<VarId, Rat> = [z(2), z(3), z(5), z(6)]
            .into_iter()
            .map(|v| (v, Rat::from_integer(0.into())))
            .collect();
        assert_eq!(p1.diff(z(3)).substitute(&locus).render(2), "w2*z4");
    }

    #[test]
    fn corrupt_cell_is_named() {
        let mut tables = regen_tables();
        tables.table2[0][0] = "z9".to_string();
        let diff = diff_tables(&tables);
        assert_eq!(diff.mismatches.len(), 1);
        let m = &diff.mismatches[0];
        assert_eq!(m.table, "table2");
        assert_eq!(m.row, "(w1,w2,w3)");
        assert_eq!(m.col, "R1");
    }
}
