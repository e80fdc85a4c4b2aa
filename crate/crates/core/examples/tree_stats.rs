//! Prints size statistics of default-config trees: `cargo run --example tree_stats -- 1 10`.

use symtree_core::treegen::{build_dataset, TreeConfig};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (lo, hi) = match args.as_slice() {
        [a, b] => (*a, *b),
        _ => (1, 10),
    };
    println!("seed\tentities\tparentOf\tdepth\tinferred\tnegatives\tattempts");
    for seed in lo..=hi {
        let (tree, closure, data) = build_dataset(&TreeConfig::with_seed(seed)).expect("default config is feasible");
        let negatives = data.problems[0].negatives().count();
        println!(
            "{seed}\t{}\t{}\t{}\t{}\t{negatives}\t{}",
            tree.theory.entities.len(),
            tree.parent_edges().count(),
            tree.depth(),
            closure.len(),
            tree.attempts
        );
    }
}
