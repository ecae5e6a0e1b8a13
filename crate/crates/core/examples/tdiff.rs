fn main() {
    let tables = sympfact_core::fields::tables::regen_tables();
    let diff = sympfact_core::fields::tables::diff_tables(&tables);
    println!("checked {}", diff.cells_checked);
    for m in &diff.mismatches { println!("MISMATCH {} [{}][{}]: ref={:?} got={:?}", m.table, m.row, m.col, m.reference, m.recomputed); }
    for m in &diff.errata_confirmed { println!("ERRATUM  {} [{}][{}]: ref={:?} got={:?}", m.table, m.row, m.col, m.reference, m.recomputed); }
}
