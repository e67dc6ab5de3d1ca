use crate::trees::{ExpressionTree, NodeCoord};

/// One position shared by both parents. Both nodes sit at the same path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPair {
    pub coord: NodeCoord,
    /// Preorder index in the first tree.
    pub a: usize,
    /// Preorder index in the second tree.
    pub b: usize,
    /// Both nodes have the same arity, at least one.
    pub interior: bool,
}

/// Node pairs reachable from the two roots while arities keep matching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommonRegion {
    pub pairs: Vec<RegionPair>,
}

impl CommonRegion {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn interior_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.interior).count()
    }
}

/// Common region of two trees, pairs in preorder. The root pair is always
/// present; the children of a pair are included iff both nodes of the pair
/// have the same arity.
pub fn common_region(a: &ExpressionTree, b: &ExpressionTree) -> CommonRegion {
    let mut pairs = Vec::new();
    let mut stack = vec![(NodeCoord::root(), 0usize, 0usize)];
    while let Some((coord, ia, ib)) = stack.pop() {
        let arity = a.nodes()[ia].arity();
        let same = arity == b.nodes()[ib].arity();
        if same && arity > 0 {
            let ca = a.children(ia);
            let cb = b.children(ib);
            for k in (0..arity).rev() {
                stack.push((coord.child(k), ca[k], cb[k]));
            }
        }
        pairs.push(RegionPair {
            coord,
            a: ia,
            b: ib,
            interior: same && arity > 0,
        });
    }
    CommonRegion { pairs }
}
