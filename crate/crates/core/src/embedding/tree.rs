use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmetrics::PointSet;

/// A rooted, edge-weighted tree whose leaves host the points of a metric.
///
/// Node `i` carries the weight of the edge to its parent; the root carries
/// `+∞`. Auxiliary leaves re-home points placed on internal nodes and hang
/// from them with weight 0.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMetric {
    points: PointSet,
    root: usize,
    parent: Vec<Option<usize>>,
    weight: Vec<f64>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    aux: Vec<bool>,
    leaf_point: Vec<Option<usize>>,
    point_leaf: Vec<usize>,
}

impl TreeMetric {
    /// Builds and validates a tree.
    ///
    /// `parent[i]` and `weight[i]` describe node `i`; `hosts` lists
    /// `(node, point)` pairs. A point hosted by an internal node is moved to a
    /// fresh zero-weight leaf below it.
    pub fn new(
        points: PointSet,
        parent: Vec<Option<usize>>,
        weight: Vec<f64>,
        hosts: &[(usize, usize)],
    ) -> Result<Self> {
        let n = parent.len();
        if weight.len() != n {
            return Err(Error::InvalidTree("parent and weight lengths differ".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        let &[root] = roots.as_slice() else {
            return Err(Error::InvalidTree(format!("expected exactly one root, found {}", roots.len())));
        };
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvalidTree(format!("node {i} has unknown parent {p}")));
                }
                children[p].push(i);
            }
        }
        let mut t = Self {
            points,
            root,
            parent,
            weight,
            children,
            depth: vec![usize::MAX; n],
            aux: vec![false; n],
            leaf_point: vec![None; n],
            point_leaf: Vec::new(),
        };
        let mut point_leaf = vec![usize::MAX; t.points.len()];
        for &(node, p) in hosts {
            if node >= n {
                return Err(Error::InvalidTree(format!("leaf entry names unknown node {node}")));
            }
            if p >= t.points.len() {
                return Err(Error::PointOutOfRange(p));
            }
            if point_leaf[p] != usize::MAX {
                return Err(Error::InvalidTree(format!("point {} appears at more than one leaf", t.points.label(p))));
            }
            let leaf =
                if t.children[node].is_empty() && t.leaf_point[node].is_none() { node } else { t.push_aux(node) };
            t.leaf_point[leaf] = Some(p);
            point_leaf[p] = leaf;
        }
        if let Some(p) = point_leaf.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidTree(format!("point {} has no leaf", t.points.label(p))));
        }
        t.point_leaf = point_leaf;
        t.finish()?;
        Ok(t)
    }

    fn push_aux(&mut self, under: usize) -> usize {
        let id = self.parent.len();
        self.parent.push(Some(under));
        self.weight.push(0.0);
        self.children.push(Vec::new());
        self.depth.push(usize::MAX);
        self.aux.push(true);
        self.leaf_point.push(None);
        self.children[under].push(id);
        id
    }

    fn finish(&mut self) -> Result<()> {
        let n = self.parent.len();
        let mut stack = vec![self.root];
        self.depth[self.root] = 0;
        let mut seen = 1;
        while let Some(u) = stack.pop() {
            for &c in &self.children[u] {
                if self.depth[c] != usize::MAX {
                    return Err(Error::InvalidTree(format!("node {c} reached twice")));
                }
                self.depth[c] = self.depth[u] + 1;
                seen += 1;
                stack.push(c);
            }
        }
        if seen != n {
            return Err(Error::InvalidTree("tree is not connected".into()));
        }
        if self.weight[self.root] != f64::INFINITY {
            return Err(Error::InvalidTree("root weight must be +inf".into()));
        }
        for i in 0..n {
            if i == self.root {
                continue;
            }
            let w = self.weight[i];
            let ok = if self.aux[i] { w == 0.0 } else { w.is_finite() && w > 0.0 };
            if !ok {
                return Err(Error::InvalidTree(format!("node {i} has invalid edge weight {w}")));
            }
            if self.children[i].is_empty() && self.leaf_point[i].is_none() {
                return Err(Error::InvalidTree(format!("leaf {i} hosts no point")));
            }
        }
        if n > 1 && self.children[self.root].is_empty() {
            return Err(Error::InvalidTree("root has no children".into()));
        }
        Ok(())
    }

    /// Single-node tree hosting one point.
    pub fn singleton(points: PointSet) -> Result<Self> {
        Self::new(points, vec![None], vec![f64::INFINITY], &[(0, 0)])
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weight[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn is_aux(&self, v: usize) -> bool {
        self.aux[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// Point hosted by a leaf.
    pub fn leaf_point(&self, v: usize) -> Option<usize> {
        self.leaf_point[v]
    }

    /// Leaf hosting a point.
    pub fn leaf_of(&self, point: usize) -> usize {
        self.point_leaf[point]
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u].expect("non-root");
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v].expect("non-root");
        }
        while u != v {
            u = self.parent[u].expect("non-root");
            v = self.parent[v].expect("non-root");
        }
        u
    }

    /// Sum of edge weights from `v` up to its ancestor `top`.
    pub fn path_up(&self, mut v: usize, top: usize) -> f64 {
        let mut s = 0.0;
        while v != top {
            s += self.weight[v];
            v = self.parent[v].expect("top is an ancestor");
        }
        s
    }

    /// Nodes strictly below `top` on the path from `v`, starting at `v`.
    pub fn path_nodes(&self, mut v: usize, top: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while v != top {
            out.push(v);
            v = self.parent[v].expect("top is an ancestor");
        }
        out
    }

    /// Distance between the leaves of two points.
    pub fn tree_distance(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        let (a, b) = (self.point_leaf[u], self.point_leaf[v]);
        let top = self.lca(a, b);
        self.path_up(a, top) + self.path_up(b, top)
    }

    /// [`tree_distance`](Self::tree_distance) by label.
    pub fn distance(&self, u: &str, v: &str) -> Result<f64> {
        Ok(self.tree_distance(self.points.index_of(u)?, self.points.index_of(v)?))
    }

    /// Nodes in post-order (children before parents), children visited in
    /// ascending id order.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.node_count());
        let mut stack = vec![(self.root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                out.push(u);
            } else {
                stack.push((u, true));
                for &c in self.children[u].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Whether `anc` is `v` or an ancestor of `v`.
    pub fn is_ancestor(&self, anc: usize, mut v: usize) -> bool {
        while self.depth[v] > self.depth[anc] {
            v = self.parent[v].expect("non-root");
        }
        v == anc
    }

    /// Contracts every unary non-root node into its child, summing the two
    /// edge weights, and drops a unary root. Leaf-to-leaf distances are
    /// unchanged; surviving nodes keep their relative id order.
    pub fn contract_height(&self) -> TreeMetric {
        let n = self.node_count();
        let removable = |v: usize| !self.is_leaf(v) && self.children[v].len() == 1 && !self.aux[v];
        let mut root = self.root;
        while removable(root) {
            root = self.children[root][0];
        }
        let mut keep = vec![false; n];
        let mut new_parent: Vec<Option<usize>> = vec![None; n];
        let mut new_weight = self.weight.clone();
        new_weight[root] = f64::INFINITY;
        let mut stack = vec![root];
        keep[root] = true;
        while let Some(u) = stack.pop() {
            for &c in &self.children[u] {
                let mut c = c;
                let mut w = self.weight[c];
                while removable(c) {
                    c = self.children[c][0];
                    w += self.weight[c];
                }
                keep[c] = true;
                new_parent[c] = Some(u);
                new_weight[c] = w;
                stack.push(c);
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if keep[v] {
                remap[v] = next;
                next += 1;
            }
        }
        let mut out = TreeMetric {
            points: self.points.clone(),
            root: remap[root],
            parent: Vec::with_capacity(next),
            weight: Vec::with_capacity(next),
            children: vec![Vec::new(); next],
            depth: vec![usize::MAX; next],
            aux: Vec::with_capacity(next),
            leaf_point: Vec::with_capacity(next),
            point_leaf: self.point_leaf.iter().map(|&l| remap[l]).collect(),
        };
        for v in (0..n).filter(|&v| keep[v]) {
            let p = new_parent[v].map(|p| remap[p]);
            if let Some(p) = p {
                out.children[p].push(remap[v]);
            }
            out.parent.push(p);
            out.weight.push(new_weight[v]);
            out.aux.push(self.aux[v] && new_weight[v] == 0.0);
            out.leaf_point.push(self.leaf_point[v]);
        }
        out.finish().expect("contraction preserves validity");
        out
    }

    pub fn to_file(&self) -> TreeFile {
        TreeFile {
            nodes: (0..self.node_count())
                .map(|i| NodeEntry {
                    id: i as u64,
                    parent: self.parent[i].map(|p| p as u64),
                    w: Weight(self.weight[i]),
                })
                .collect(),
            leaves: (0..self.node_count())
                .filter_map(|i| {
                    self.leaf_point[i].map(|p| LeafEntry { id: i as u64, point: self.points.label(p).to_string() })
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<TreeFile>(s)?.into_tree()
    }
}

/// Edge weight that serializes `+∞` as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight(pub f64);

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Weight(x)),
            Raw::Str(s) if s == "inf" => Ok(Weight(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("invalid weight `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: u64,
    pub parent: Option<u64>,
    pub w: Weight,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafEntry {
    pub id: u64,
    pub point: String,
}

/// `{ "nodes": [{ "id", "parent", "w" }], "leaves": [{ "id", "point" }] }`
///
/// Node ids may be arbitrary distinct integers; they are renumbered densely
/// in listing order. Points are ordered as the leaves are listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeFile {
    pub nodes: Vec<NodeEntry>,
    pub leaves: Vec<LeafEntry>,
}

impl TreeFile {
    pub fn into_tree(self) -> Result<TreeMetric> {
        let mut index = std::collections::HashMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(Error::InvalidTree(format!("duplicate node id {}", n.id)));
            }
        }
        let lookup =
            |id: u64| index.get(&id).copied().ok_or_else(|| Error::InvalidTree(format!("unknown node id {id}")));
        let parent = self.nodes.iter().map(|n| n.parent.map(lookup).transpose()).collect::<Result<Vec<_>>>()?;
        let weight = self.nodes.iter().map(|n| n.w.0).collect();
        let points = PointSet::new(self.leaves.iter().map(|l| l.point.clone()))?;
        let hosts = self.leaves.iter().enumerate().map(|(p, l)| Ok((lookup(l.id)?, p))).collect::<Result<Vec<_>>>()?;
        TreeMetric::new(points, parent, weight, &hosts)
    }
}
