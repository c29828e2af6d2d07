//! The expression language used by config games: parse, pretty-print,
//! evaluate, and see how errors are reported.
//!
//! cargo run --example expressions

use std::collections::BTreeMap;

use nes::expr::{eval_ast, parse_cost_expr};

fn main() {
    let params = BTreeMap::from([("beta".to_string(), 0.8), ("x".to_string(), 1.259)]);
    let src = "-log(x1) - beta * log(x - x1 - x2^1.1)";
    let ast = parse_cost_expr(src, &params).expect("valid expression");
    println!("source   {src}");
    println!("printed  {ast}");
    for (a, b) in [(0.3, 0.9), (0.5, 0.5), (1.0, 0.5)] {
        match eval_ast(&ast, a, b) {
            Ok(v) => println!("  at ({a}, {b}) = {v:.6}"),
            Err(e) => println!("  at ({a}, {b}): {e}"),
        }
    }
    for bad in ["x1 +", "x1 * gamma", "log(x1, x2)", "2 ^ ^ 3"] {
        println!("{bad:<14} -> {}", parse_cost_expr(bad, &params).unwrap_err());
    }
}
