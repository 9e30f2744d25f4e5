use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;

/// A finite rooted tree with positive edge lengths.
///
/// `parent[v]` is `None` exactly for the root; `edge_len[v]` is the length of the
/// edge from `v` to its parent (the root entry is unused and stored as zero).
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree<T> {
    parent: Vec<Option<usize>>,
    edge_len: Vec<T>,
    labels: Vec<String>,
    root: usize,
    children: Vec<Vec<usize>>,
    /// number of edges from the root
    level: Vec<usize>,
    /// summed edge length from the root
    depth: Vec<T>,
}

impl<T: Scalar> RootedTree<T> {
    pub fn new(parent: Vec<Option<usize>>, edge_len: Vec<T>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidTree("no vertices".into()));
        }
        if edge_len.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: edge_len.len() });
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        if labels.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: labels.len() });
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidTree(format!("expected exactly one root, found {}", roots.len())));
        }
        let root = roots[0];
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvalidVertex(p));
                }
                if p == v {
                    return Err(Error::InvalidTree(format!("vertex {v} is its own parent")));
                }
                if !(edge_len[v] > T::zero()) || !edge_len[v].is_finite() {
                    return Err(Error::NonpositiveEdge(v));
                }
                children[p].push(v);
            }
        }
        // breadth-first from the root; every vertex must be reached exactly once
        let mut level = vec![usize::MAX; n];
        let mut depth = vec![T::zero(); n];
        level[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut reached = 0;
        while let Some(v) = queue.pop_front() {
            reached += 1;
            for &c in &children[v] {
                level[c] = level[v] + 1;
                depth[c] = depth[v] + edge_len[c];
                queue.push_back(c);
            }
        }
        if reached != n {
            return Err(Error::InvalidTree("parent links contain a cycle".into()));
        }
        let mut edge_len = edge_len;
        edge_len[root] = T::zero();
        Ok(RootedTree { parent, edge_len, labels, root, children, level, depth })
    }

    /// Unit-length tree from parent links.
    pub fn unit(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        Self::new(parent, vec![T::one(); n], None)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn edge_len(&self, v: usize) -> T {
        self.edge_len[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of edges between `v` and the root.
    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    /// Summed edge length between `v` and the root.
    pub fn depth(&self, v: usize) -> T {
        self.depth[v]
    }

    pub fn height(&self) -> usize {
        self.level.iter().copied().max().unwrap_or(0)
    }

    /// Number of incident edges.
    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn has_unit_edges(&self) -> bool {
        (0..self.len()).filter(|&v| v != self.root).all(|v| self.edge_len[v] == T::one())
    }

    /// Deepest vertex on both root paths.
    pub fn common_ancestor(&self, v: usize, w: usize) -> Result<usize> {
        let n = self.len();
        for x in [v, w] {
            if x >= n {
                return Err(Error::InvalidVertex(x));
            }
        }
        let (mut a, mut b) = (v, w);
        while self.level[a] > self.level[b] {
            a = self.parent[a].expect("non-root above level 0");
        }
        while self.level[b] > self.level[a] {
            b = self.parent[b].expect("non-root above level 0");
        }
        while a != b {
            a = self.parent[a].expect("paths meet at the root");
            b = self.parent[b].expect("paths meet at the root");
        }
        Ok(a)
    }

    /// Path metric on the vertex set, in vertex order.
    pub fn to_metric_space(&self, cap: usize) -> Result<FiniteMetricSpace<T>> {
        if self.len() > cap {
            return Err(Error::ProductTooLarge { size: self.len(), cap });
        }
        Ok(FiniteMetricSpace::from_fn_unchecked(self.labels.clone(), |v, w| {
            tree_distance(self, v, w).expect("vertices in range")
        }))
    }
}

/// Path distance `depth(v) + depth(w) - 2 depth(a(v, w))`.
pub fn tree_distance<T: Scalar>(t: &RootedTree<T>, v: usize, w: usize) -> Result<T> {
    let a = t.common_ancestor(v, w)?;
    Ok(t.depth(v) + t.depth(w) - T::lit(2.0) * t.depth(a))
}

/// Levels `0..=depth` of the rooted tree in which every vertex has `k + 1` children.
///
/// Vertices are numbered breadth first with children in creation order, so the
/// vertices of level `l` appear left to right. Labels are `l:j` (level, ordinal).
pub fn truncated_tk<T: Scalar>(k: usize, depth: usize, cap: usize) -> Result<RootedTree<T>> {
    if k < 2 {
        return Err(Error::Input(format!("T_k needs k >= 2, got {k}")));
    }
    let arity = k + 1;
    let mut total: usize = 1;
    let mut width: usize = 1;
    for _ in 0..depth {
        width = width.checked_mul(arity).ok_or(Error::ProductTooLarge { size: usize::MAX, cap })?;
        total = total.checked_add(width).ok_or(Error::ProductTooLarge { size: usize::MAX, cap })?;
        if total > cap {
            return Err(Error::ProductTooLarge { size: total, cap });
        }
    }
    let mut parent = vec![None];
    let mut labels = vec!["0:0".to_string()];
    let mut level_start = 0;
    let mut level_len = 1;
    for l in 1..=depth {
        let next_start = parent.len();
        for (pj, p) in (level_start..level_start + level_len).enumerate() {
            for c in 0..arity {
                parent.push(Some(p));
                labels.push(format!("{l}:{}", pj * arity + c));
            }
        }
        level_start = next_start;
        level_len *= arity;
    }
    let n = parent.len();
    RootedTree::new(parent, vec![T::one(); n], Some(labels))
}

/// A unit-edge tree placed inside a truncated `T_k` as a subtree.
#[derive(Debug, Clone)]
pub struct TkPadding<T> {
    pub k: usize,
    pub tk: RootedTree<T>,
    /// `vertex_map[v]` is the `T_k` vertex carrying tree vertex `v`.
    pub vertex_map: Vec<usize>,
}

/// Embeds a unit-edge tree isometrically into the smallest truncated `T_k` (`k >= 2`) that holds it.
///
/// The root goes to the root; the `i`-th child of a vertex goes to the `i`-th child slot of its image.
pub fn pad_to_tk<T: Scalar>(tree: &RootedTree<T>, cap: usize) -> Result<TkPadding<T>> {
    if !tree.has_unit_edges() {
        return Err(Error::Input("padding into T_k needs unit edge lengths".into()));
    }
    let max_children = (0..tree.len()).map(|v| tree.children(v).len()).max().unwrap_or(0);
    let k = max_children.saturating_sub(1).max(2);
    let tk = truncated_tk::<T>(k, tree.height(), cap)?;
    let mut vertex_map = vec![usize::MAX; tree.len()];
    vertex_map[tree.root()] = tk.root();
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        let image = vertex_map[v];
        for (i, &c) in tree.children(v).iter().enumerate() {
            vertex_map[c] = tk.children(image)[i];
            stack.push(c);
        }
    }
    Ok(TkPadding { k, tk, vertex_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{validate_metric, DEFAULT_PRODUCT_CAP};

    #[test]
    fn distance_examples() {
        let t = RootedTree::<f64>::unit(vec![None, Some(0), Some(0)]).unwrap();
        assert_eq!(tree_distance(&t, 1, 1).unwrap(), 0.0);
        assert_eq!(tree_distance(&t, 1, 2).unwrap(), 2.0);
        let w = RootedTree::new(vec![None, Some(0), Some(0)], vec![0.0, 2.0, 3.0], None).unwrap();
        assert_eq!(tree_distance(&w, 1, 2).unwrap(), 5.0);
        assert!(matches!(tree_distance(&w, 1, 9), Err(Error::InvalidVertex(9))));
    }

    #[test]
    fn rejects_bad_trees() {
        assert!(RootedTree::<f64>::unit(vec![Some(1), Some(0)]).is_err());
        assert!(RootedTree::<f64>::unit(vec![None, Some(2), Some(1)]).is_err());
        assert!(RootedTree::<f64>::unit(vec![None, None]).is_err());
        assert!(matches!(RootedTree::new(vec![None, Some(0)], vec![0.0, 0.0], None), Err(Error::NonpositiveEdge(1))));
    }

    #[test]
    fn tk_sizes() {
        let t1 = truncated_tk::<f64>(2, 1, DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(t1.len(), 4);
        assert_eq!(t1.children(0).len(), 3);
        assert_eq!(truncated_tk::<f64>(2, 2, DEFAULT_PRODUCT_CAP).unwrap().len(), 13);
        assert_eq!(truncated_tk::<f64>(2, 0, DEFAULT_PRODUCT_CAP).unwrap().len(), 1);
        assert!(matches!(truncated_tk::<f64>(2, 9, 1000), Err(Error::ProductTooLarge { .. })));
        // degree of an inner non-root vertex is k + 2
        let t2 = truncated_tk::<f64>(3, 2, DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(t2.degree(1), 5);
        assert_eq!(t2.degree(0), 4);
    }

    #[test]
    fn tree_metric_is_valid() {
        let t = RootedTree::new(
            vec![None, Some(0), Some(0), Some(1), Some(1), Some(2)],
            vec![0.0, 1.0, 2.5, 0.5, 3.0, 1.0],
            None,
        )
        .unwrap();
        let m = t.to_metric_space(DEFAULT_PRODUCT_CAP).unwrap();
        validate_metric(&m.to_matrix()).unwrap();
        assert_eq!(m.dist(3, 5), 0.5 + 1.0 + 2.5 + 1.0);
        let tk = truncated_tk::<f64>(2, 3, DEFAULT_PRODUCT_CAP).unwrap();
        validate_metric(&tk.to_metric_space(DEFAULT_PRODUCT_CAP).unwrap().to_matrix()).unwrap();
    }

    #[test]
    fn padding_is_isometric() {
        // root with 4 children, one of which has 2 children
        let t = RootedTree::<f64>::unit(vec![None, Some(0), Some(0), Some(0), Some(0), Some(2), Some(2)]).unwrap();
        let pad = pad_to_tk(&t, DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(pad.k, 3);
        for v in 0..t.len() {
            for w in 0..t.len() {
                let d = tree_distance(&t, v, w).unwrap();
                let e = tree_distance(&pad.tk, pad.vertex_map[v], pad.vertex_map[w]).unwrap();
                assert_eq!(d, e);
            }
        }
    }
}
