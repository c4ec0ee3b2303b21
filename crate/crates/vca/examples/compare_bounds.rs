//! Prints the bound comparison for the 15-vertex mixed-strength hypergraph
//! and contrasts the guarantees with what the greedy actually builds.
//!
//! ```sh
//! cargo run --release -p vca --example compare_bounds
//! ```

use vca::bounds::{bound_table, GeneralLllOptions};
use vca::construct::{vardens, verify};
use vca::generators::h15;

fn main() {
    let (h, classes) = h15();
    println!("hypergraph: {} vertices, {} edges", h.k(), h.edge_count());
    println!("dependency degree: {}", h.dependency_degree().unwrap());
    println!();
    println!("{:>3} {:>10} {:>10} {:>10} {:>10} {:>8}", "v", "n_s", "n_g", "n_a", "n_dens", "greedy");

    let rows = bound_table(&h, &classes, 2..=10, &GeneralLllOptions::default()).unwrap();
    for row in rows {
        let array = vardens(&h, row.v).unwrap();
        assert!(verify(&array, &h).unwrap().is_covered());
        println!(
            "{:>3} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>8}",
            row.v,
            row.n_s,
            row.n_g,
            row.n_a,
            row.n_dens,
            array.n()
        );
    }
}
