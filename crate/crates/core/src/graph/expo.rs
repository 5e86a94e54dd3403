//! A family of graphs on which recursive merging doubles its work per block.
//!
//! Block `i` holds the heads `A_i, B_i, C_i`, each merging a helper with one
//! head from block `i + 1`, so that any two of `A_i, B_i, C_i` have all three
//! heads of block `i + 1` as lowest common ancestors. The last block hangs
//! off a single root.

use super::{CommitGraph, Tree};

pub const HEAD_A: &str = "A0";
pub const HEAD_B: &str = "B0";

pub fn exponential_commit_count(n: usize) -> usize {
    6 * n + 4
}

pub fn build_exponential_graph(n: usize) -> CommitGraph {
    let tree = Tree::from([("file".to_string(), b"content\n".to_vec())]);
    let mut g = CommitGraph::new();
    let mut ts = 0;
    let mut add = |g: &mut CommitGraph, id: String, parents: Vec<String>| {
        ts += 1;
        g.add_commit(id, parents, tree.clone(), ts).expect("family is well formed");
    };
    add(&mut g, "R".into(), vec![]);
    for h in ["A", "B", "C"] {
        add(&mut g, format!("{h}{n}"), vec!["R".into()]);
    }
    for i in (0..n).rev() {
        let (a, b, c) = (format!("A{}", i + 1), format!("B{}", i + 1), format!("C{}", i + 1));
        add(&mut g, format!("D{i}"), vec![a.clone(), b.clone()]);
        add(&mut g, format!("E{i}"), vec![b.clone(), c.clone()]);
        add(&mut g, format!("F{i}"), vec![a.clone(), c.clone()]);
        add(&mut g, format!("A{i}"), vec![format!("D{i}"), c]);
        add(&mut g, format!("B{i}"), vec![format!("E{i}"), a]);
        add(&mut g, format!("C{i}"), vec![format!("F{i}"), b]);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        for n in 0..5 {
            assert_eq!(build_exponential_graph(n).len(), exponential_commit_count(n));
        }
    }

    #[test]
    fn heads_have_three_lcas() {
        let g = build_exponential_graph(2);
        assert_eq!(g.lowest_common_ancestors(HEAD_A, HEAD_B).unwrap(), ["C1", "B1", "A1"]);
        assert_eq!(g.lowest_common_ancestors("A2", "B2").unwrap(), ["R"]);
    }
}
