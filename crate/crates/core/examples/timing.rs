use std::time::Instant;
use sympfact_core::suites::*;

fn main() {
    let cfg = CampaignConfig::default();
    for (name, f) in [
        ("whitehead", Box::new(|| whitehead_suite()) as Box<dyn Fn() -> sympfact_core::report::Report>),
        ("last_row", Box::new(|| last_row_suite())),
        ("submersivity", Box::new(move || submersivity_suite(200, 1))),
        ("surjectivity", Box::new(move || surjectivity_suite(100, 1))),
        ("triples", Box::new(move || triples_suite(6))),
        ("rminor", Box::new(move || rminor_suite(6))),
        ("tables", Box::new(|| tables_suite())),
        ("rank_stability", Box::new(move || rank_stability_suite(100, 6, 1))),
        ("spanning", Box::new(move || spanning_suite(34, 6, 1))),
        ("factorization", Box::new(move || factorization_suite(100, 1, 1e-9))),
    ] {
        let t0 = Instant::now();
        let rep = f();
        println!("{name:>16}: {:?} | {}", t0.elapsed(), rep.summary_line());
    }
    let _ = cfg;
}
