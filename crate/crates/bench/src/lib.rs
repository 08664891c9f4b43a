//! Workloads for the reduction benchmarks.

use binet::{parse_binet, Binet};

/// Unary numeral `n` rooted at `root`, as `.binet` lines.
fn numeral(n: usize, root: &str, tag: &str) -> String {
    let mut out = String::new();
    let mut prev = root.to_string();
    for i in 0..n {
        let next = format!("{tag}{i}");
        out.push_str(&format!("S^{prev}({next})\n"));
        prev = next;
    }
    out.push_str(&format!("Z^{prev}()\n"));
    out
}

/// `x + y` for the unary-arithmetic rules.
pub fn addition(x: usize, y: usize) -> Binet {
    let src = format!(
        "Add^a(b, r)\n{}{}",
        numeral(x, "a", "x"),
        numeral(y, "b", "y")
    );
    parse_binet(&src).expect("generated addition parses")
}

/// `n` independent erasures of the numeral 2, all firing in the same pass.
pub fn erasures(n: usize) -> Binet {
    let mut src = String::new();
    for i in 0..n {
        src.push_str(&format!("eps^e{i}()\n"));
        src.push_str(&numeral(2, &format!("e{i}"), &format!("n{i}_")));
    }
    parse_binet(&src).expect("generated erasures parse")
}

/// `n` nested identity applications around a constant, as a ρ term.
pub fn identities(n: usize) -> String {
    let mut t = "H".to_string();
    for _ in 0..n {
        t = format!("(x -> x) ({t})");
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use binet::rho::nat_rules;
    use binet::{compile_rho, parse_rho, reduce, rho_rules, Limits, Strategy};

    #[test]
    fn workloads_reduce() {
        let t = reduce(
            &addition(4, 3),
            &nat_rules(),
            Strategy::deterministic(),
            Limits::default(),
        )
        .unwrap();
        assert_eq!(t.interactions(), 5);
        let t = reduce(
            &erasures(8),
            &nat_rules(),
            Strategy::deterministic(),
            Limits::default(),
        )
        .unwrap();
        assert!(t.final_binet().is_empty());
        assert_eq!(t.passes.len(), 3);
        let net = compile_rho(&parse_rho(&identities(3)).unwrap()).unwrap();
        let t = reduce(
            &net,
            &rho_rules(),
            Strategy::deterministic(),
            Limits::default(),
        )
        .unwrap();
        assert_eq!(t.final_binet().agent_count(), 1);
    }
}
