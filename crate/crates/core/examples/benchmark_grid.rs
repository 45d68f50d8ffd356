//! Rule-based, random and do-nothing policies on a few grid points.
//!
//! cargo run --release --example benchmark_grid

use container_sim::cli::run_benchmark;

fn main() {
    let grid = [(5, 2, 120.0), (5, 5, 120.0), (11, 11, 120.0)];
    let rows = run_benchmark(&grid, 15, 1, 600, 1.0, 4).expect("benchmark");
    for row in rows {
        let (n, m, delta) = row.grid_point;
        print!("n={n:<2} m={m:<2} delta={delta:<4}");
        for (policy, s) in &row.results {
            print!(" | {policy}: {:>7.2} ± {:<6.2}", s.mean, s.std);
        }
        println!();
    }
}
