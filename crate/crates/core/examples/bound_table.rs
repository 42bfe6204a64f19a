//! The paving bounds side by side, and the KS_2 threshold in eta.

use ksr_paving::bounds::{bound_table, default_etas, mss_eta_threshold, BoundRow};

fn main() -> ksr_paving::Result<()> {
    for (k, r, eps) in [(1, 2, 0.25), (1, 2, 0.2), (2, 2, 0.5), (2, 3, 0.3)] {
        let row = BoundRow::new(k, r, eps);
        println!(
            "k={k} r={r} eps={eps}: this_paper {:?}, mss {:.4}, rl {:?}, branden {:?}",
            row.this_paper, row.mss, row.rl, row.branden
        );
    }
    let table = bound_table(&[], &default_etas());
    for row in &table.eta_rows {
        println!("eta {:>6.2}: this_paper below 1 {}, mss below 1 {}", row.eta, row.this_paper_below_one, row.mss_below_one);
    }
    println!("mss needs eta > {:.4}", mss_eta_threshold());
    table.write_eta_csv(std::io::stdout().lock())
}
