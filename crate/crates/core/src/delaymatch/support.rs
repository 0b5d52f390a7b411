use crate::embedding::TreeMetric;

use super::Request;

/// Supporting request sets `M_v`, bottom-up.
///
/// Leaves get `∅`. An internal node takes, oldest first, the largest multiple
/// of `k` among the open requests below it that no descendant claimed, so
/// fewer than `k` unclaimed requests remain. Returns request ids per node.
pub fn compute_supporting_sets(tree: &TreeMetric, open: &[Request], k: usize) -> Vec<Vec<u64>> {
    let n = tree.node_count();
    let mut sets = vec![Vec::new(); n];
    let mut free: Vec<Vec<Request>> = vec![Vec::new(); n];
    for r in open {
        free[r.leaf].push(*r);
    }
    for v in tree.post_order() {
        if tree.is_leaf(v) {
            continue;
        }
        let mut avail: Vec<Request> = Vec::new();
        for &c in tree.children(v) {
            avail.append(&mut free[c]);
        }
        avail.sort_by(|a, b| a.arrival.total_cmp(&b.arrival).then(a.id.cmp(&b.id)));
        let take = avail.len() / k * k;
        sets[v] = avail[..take].iter().map(|r| r.id).collect();
        free[v] = avail.split_off(take);
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmetrics::PointSet;

    /// r → {1, 2}; 1 → {3, 4}; 3 → {6, 7, 8}; 4 → {9, 10}; 2 → 5; 5 → 11.
    fn small_tree() -> TreeMetric {
        let mut parent = vec![None; 12];
        for (c, p) in [(1, 0), (2, 0), (3, 1), (4, 1), (6, 3), (7, 3), (8, 3), (9, 4), (10, 4), (5, 2), (11, 5)] {
            parent[c] = Some(p);
        }
        let mut w = vec![1.0; 12];
        w[0] = f64::INFINITY;
        let leaves = [6, 7, 8, 9, 10, 11];
        let points = PointSet::new(leaves.map(|l| format!("x{l}"))).unwrap();
        let hosts: Vec<_> = leaves.iter().enumerate().map(|(p, &l)| (l, p)).collect();
        TreeMetric::new(points, parent, w, &hosts).unwrap()
    }

    #[test]
    fn small_tree_configurations() {
        let t = small_tree();
        let rho = |id, leaf| Request { id, leaf, arrival: id as f64 };
        let left = [rho(1, 6), rho(2, 8), rho(3, 10)];
        let m = compute_supporting_sets(&t, &left, 3);
        assert_eq!(m[1], [1, 2, 3]);
        assert!(m[3].is_empty() && m[0].is_empty());
        assert!(m[6].is_empty());
        let right = [rho(1, 6), rho(2, 8), rho(3, 10), rho(4, 7)];
        let m = compute_supporting_sets(&t, &right, 3);
        assert_eq!(m[3], [1, 2, 4]);
        assert!(m[1].is_empty() && m[0].is_empty());
    }
}
