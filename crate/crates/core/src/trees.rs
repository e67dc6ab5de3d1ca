//! Symbol alphabet and prefix-encoded expression trees.
//!
//! A tree is stored as its preorder symbol sequence. Every subtree is a
//! contiguous slice of that sequence, which keeps sizing, copying and
//! splicing linear and allocation-light. Trees have value semantics: all
//! editing operations return a new tree.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Built-in function primitives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Function {
    Add,
    Sub,
    Mul,
    Div,
    Log,
    Exp,
    Signum,
    Sin,
    Cos,
    Tan,
    IfThenElse,
    LessThan,
    GreaterThan,
    Equal,
    Not,
    And,
    Or,
    Xor,
}

impl Function {
    pub const ALL: [Function; 18] = [
        Function::Add,
        Function::Sub,
        Function::Mul,
        Function::Div,
        Function::Log,
        Function::Exp,
        Function::Signum,
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::IfThenElse,
        Function::LessThan,
        Function::GreaterThan,
        Function::Equal,
        Function::Not,
        Function::And,
        Function::Or,
        Function::Xor,
    ];

    /// The four arithmetic primitives used for Poly-10 and Mackey-Glass.
    pub const ARITHMETIC: [Function; 4] = [Function::Add, Function::Sub, Function::Mul, Function::Div];

    pub fn arity(self) -> usize {
        use Function::*;
        match self {
            Log | Exp | Signum | Sin | Cos | Tan | Not => 1,
            Add | Sub | Mul | Div | LessThan | GreaterThan | Equal | And | Or | Xor => 2,
            IfThenElse => 3,
        }
    }

    pub fn name(self) -> &'static str {
        use Function::*;
        match self {
            Add => "ADD",
            Sub => "SUB",
            Mul => "MUL",
            Div => "DIV",
            Log => "LOG",
            Exp => "EXP",
            Signum => "SIGNUM",
            Sin => "SIN",
            Cos => "COS",
            Tan => "TAN",
            IfThenElse => "IF-THEN-ELSE",
            LessThan => "LESS-THAN",
            GreaterThan => "GREATER-THAN",
            Equal => "EQUAL",
            Not => "NOT",
            And => "AND",
            Or => "OR",
            Xor => "XOR",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Function::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A node label. Variables carry the dataset column they read; constants
/// carry their own value, so every constant leaf is independent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Symbol {
    Function(Function),
    Variable(usize),
    Constant(f64),
}

impl Symbol {
    #[inline]
    pub fn arity(&self) -> usize {
        match self {
            Symbol::Function(f) => f.arity(),
            Symbol::Variable(_) | Symbol::Constant(_) => 0,
        }
    }

    #[inline]
    pub fn is_terminal(&self) -> bool {
        self.arity() == 0
    }

    /// Default rendering: functions by name, variable `i` as `x{i+1}`,
    /// constants by value.
    pub fn name(&self) -> String {
        match self {
            Symbol::Function(f) => f.name().to_string(),
            Symbol::Variable(i) => format!("x{}", i + 1),
            Symbol::Constant(v) => v.to_string(),
        }
    }
}

/// How constant leaves are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantSampler {
    /// Uniform integer in `[lo, hi]`.
    Integer { lo: i64, hi: i64 },
    /// Uniform real in `[lo, hi]`.
    Real { lo: f64, hi: f64 },
}

impl ConstantSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ConstantSampler::Integer { lo, hi } => rng.random_range(lo..=hi) as f64,
            ConstantSampler::Real { lo, hi } => rng.random_range(lo..=hi),
        }
    }

    fn is_well_ordered(&self) -> bool {
        match *self {
            ConstantSampler::Integer { lo, hi } => lo <= hi,
            ConstantSampler::Real { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
        }
    }
}

/// Function and terminal alphabet of a problem.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveSet {
    functions: Vec<Function>,
    variables: Vec<usize>,
    variable_names: Vec<String>,
    constants: Option<ConstantSampler>,
    max_arity: usize,
}

impl PrimitiveSet {
    /// `variables` pairs each dataset column index with its display name.
    pub fn new(
        functions: Vec<Function>,
        variables: Vec<(usize, String)>,
        constants: Option<ConstantSampler>,
    ) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidPrimitiveSet("no function symbols".into()));
        }
        if variables.is_empty() && constants.is_none() {
            return Err(Error::InvalidPrimitiveSet("no terminal symbols".into()));
        }
        if let Some(c) = &constants {
            if !c.is_well_ordered() {
                return Err(Error::InvalidPrimitiveSet(format!(
                    "constant range {c:?} is not well ordered"
                )));
            }
        }
        let mut names: Vec<&str> = functions.iter().map(|f| f.name()).collect();
        names.extend(variables.iter().map(|(_, n)| n.as_str()));
        let mut sorted = names.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidPrimitiveSet(format!(
                "duplicate symbol name `{}`",
                w[0]
            )));
        }
        let max_arity = functions.iter().map(|f| f.arity()).max().unwrap_or(0);
        let (variables, variable_names) = variables.into_iter().unzip();
        Ok(PrimitiveSet {
            functions,
            variables,
            variable_names,
            constants,
            max_arity,
        })
    }

    pub fn functions(&self) -> &[Function] {
        &self.functions
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn constants(&self) -> Option<&ConstantSampler> {
        self.constants.as_ref()
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    /// Display name of a dataset column, if it is one of our variables.
    pub fn variable_name(&self, column: usize) -> Option<&str> {
        self.variables
            .iter()
            .position(|&c| c == column)
            .map(|i| self.variable_names[i].as_str())
    }

    /// Number of distinct terminal generators. A constant sampler counts
    /// as one generator.
    pub fn terminal_choices(&self) -> usize {
        self.variables.len() + usize::from(self.constants.is_some())
    }

    pub fn random_function<R: Rng + ?Sized>(&self, rng: &mut R) -> Function {
        self.functions[rng.random_range(0..self.functions.len())]
    }

    /// Uniform draw over the terminal generators; a drawn constant
    /// generator materializes a fresh value.
    pub fn random_terminal<R: Rng + ?Sized>(&self, rng: &mut R) -> Symbol {
        let pick = rng.random_range(0..self.terminal_choices());
        match self.variables.get(pick) {
            Some(&col) => Symbol::Variable(col),
            None => Symbol::Constant(
                self.constants
                    .expect("terminal choice past variables implies a constant sampler")
                    .sample(rng),
            ),
        }
    }

    /// Renders a tree using this set's variable names.
    pub fn render(&self, tree: &ExpressionTree) -> String {
        tree.render_with(|col| {
            self.variable_name(col)
                .map(str::to_string)
                .unwrap_or_else(|| format!("x{}", col + 1))
        })
    }
}

/// Path of child indices from the root. The empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeCoord(pub Vec<usize>);

impl NodeCoord {
    pub fn root() -> Self {
        NodeCoord(Vec::new())
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, index: usize) -> Self {
        let mut path = self.0.clone();
        path.push(index);
        NodeCoord(path)
    }

    /// Sum of the lengths of the two path suffixes that follow the longest
    /// common prefix.
    pub fn prefix_distance(&self, other: &NodeCoord) -> usize {
        let shared = self
            .0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count();
        (self.0.len() - shared) + (other.0.len() - shared)
    }
}

impl From<Vec<usize>> for NodeCoord {
    fn from(path: Vec<usize>) -> Self {
        NodeCoord(path)
    }
}

impl fmt::Display for NodeCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Borrowed view of one node and the subtree below it.
#[derive(Clone, Copy, Debug)]
pub struct NodeRef<'a> {
    index: usize,
    nodes: &'a [Symbol],
}

impl<'a> NodeRef<'a> {
    /// Preorder index within the containing tree.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn symbol(&self) -> Symbol {
        self.nodes[0]
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn to_tree(&self) -> ExpressionTree {
        ExpressionTree {
            nodes: self.nodes.to_vec(),
        }
    }
}

/// Arity layout of a tree with labels erased.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeSignature(Vec<u8>);

/// An ordered rooted tree of symbols, stored in preorder.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpressionTree {
    nodes: Vec<Symbol>,
}

impl ExpressionTree {
    pub fn leaf(symbol: Symbol) -> Self {
        assert!(symbol.is_terminal(), "leaf symbol must have arity 0");
        ExpressionTree {
            nodes: vec![symbol],
        }
    }

    pub fn node(function: Function, children: Vec<ExpressionTree>) -> Result<Self> {
        if children.len() != function.arity() {
            return Err(Error::ArityMismatch {
                symbol: function.name(),
                expected: function.arity(),
                got: children.len(),
            });
        }
        let mut nodes = Vec::with_capacity(1 + children.iter().map(|c| c.len()).sum::<usize>());
        nodes.push(Symbol::Function(function));
        for c in children {
            nodes.extend(c.nodes);
        }
        Ok(ExpressionTree { nodes })
    }

    /// Builds a tree from a preorder sequence, checking that it encodes
    /// exactly one arity-consistent tree.
    pub fn from_prefix(nodes: Vec<Symbol>) -> Result<Self> {
        let mut open = 1usize;
        for (i, s) in nodes.iter().enumerate() {
            if open == 0 {
                return Err(Error::MalformedTree(format!(
                    "trailing symbols after position {i}"
                )));
            }
            open = open - 1 + s.arity();
        }
        if open != 0 {
            return Err(Error::MalformedTree(format!(
                "{open} missing operand(s) at end of sequence"
            )));
        }
        Ok(ExpressionTree { nodes })
    }

    pub(crate) fn from_prefix_unchecked(nodes: Vec<Symbol>) -> Self {
        debug_assert!(Self::from_prefix(nodes.clone()).is_ok());
        ExpressionTree { nodes }
    }

    /// Preorder symbol sequence.
    pub fn nodes(&self) -> &[Symbol] {
        &self.nodes
    }

    /// Node count.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> Symbol {
        self.nodes[0]
    }

    /// True when every node has exactly as many children as its arity.
    pub fn is_consistent(&self) -> bool {
        Self::from_prefix(self.nodes.clone()).is_ok()
    }

    /// One past the last preorder index of the subtree rooted at `index`.
    pub fn subtree_end(&self, index: usize) -> usize {
        let mut pending = 1usize;
        let mut i = index;
        while pending > 0 {
            pending = pending - 1 + self.nodes[i].arity();
            i += 1;
        }
        i
    }

    pub fn subtree_len(&self, index: usize) -> usize {
        self.subtree_end(index) - index
    }

    /// Preorder indices of the children of the node at `index`.
    pub fn children(&self, index: usize) -> Vec<usize> {
        let arity = self.nodes[index].arity();
        let mut out = Vec::with_capacity(arity);
        let mut next = index + 1;
        for _ in 0..arity {
            out.push(next);
            next = self.subtree_end(next);
        }
        out
    }

    /// Sizes of all subtrees, indexed by preorder position.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        for i in (0..self.nodes.len()).rev() {
            let mut size = 1;
            for _ in 0..self.nodes[i].arity() {
                size += stack.pop().expect("consistent tree");
            }
            sizes[i] = size;
            stack.push(size);
        }
        sizes
    }

    pub fn index_of(&self, coord: &NodeCoord) -> Result<usize> {
        let mut index = 0;
        for (depth, &child) in coord.0.iter().enumerate() {
            let arity = self.nodes[index].arity();
            if child >= arity {
                return Err(Error::InvalidCoordinate(format!(
                    "{coord}: step {depth} selects child {child} of a node with arity {arity}"
                )));
            }
            index += 1;
            for _ in 0..child {
                index = self.subtree_end(index);
            }
        }
        Ok(index)
    }

    /// Coordinates of every node, in preorder.
    pub fn coords(&self) -> Vec<NodeCoord> {
        let mut out = Vec::with_capacity(self.nodes.len());
        // (path, remaining children) for each open ancestor
        let mut stack: Vec<(NodeCoord, usize, usize)> = Vec::new();
        for sym in &self.nodes {
            let coord = match stack.last_mut() {
                None => NodeCoord::root(),
                Some((parent, next, _)) => {
                    let c = parent.child(*next);
                    *next += 1;
                    c
                }
            };
            while matches!(stack.last(), Some((_, next, arity)) if next == arity) {
                stack.pop();
            }
            if sym.arity() > 0 {
                stack.push((coord.clone(), 0, sym.arity()));
            }
            out.push(coord);
        }
        out
    }

    pub fn coord_of(&self, index: usize) -> NodeCoord {
        self.coords().swap_remove(index)
    }

    pub fn node_at(&self, coord: &NodeCoord) -> Result<NodeRef<'_>> {
        let index = self.index_of(coord)?;
        Ok(self.node_ref(index))
    }

    pub fn node_ref(&self, index: usize) -> NodeRef<'_> {
        NodeRef {
            index,
            nodes: &self.nodes[index..self.subtree_end(index)],
        }
    }

    pub fn subtree_size(&self, coord: &NodeCoord) -> Result<usize> {
        Ok(self.subtree_len(self.index_of(coord)?))
    }

    pub fn subtree(&self, coord: &NodeCoord) -> Result<ExpressionTree> {
        Ok(self.node_at(coord)?.to_tree())
    }

    pub fn subtree_at(&self, index: usize) -> ExpressionTree {
        self.node_ref(index).to_tree()
    }

    pub fn replace_subtree(&self, coord: &NodeCoord, sub: &ExpressionTree) -> Result<Self> {
        let index = self.index_of(coord)?;
        Ok(self.replace_at(index, sub.nodes()))
    }

    /// Copy of `self` with the subtree at preorder `index` replaced by the
    /// (consistent) preorder slice `sub`.
    pub fn replace_at(&self, index: usize, sub: &[Symbol]) -> Self {
        let end = self.subtree_end(index);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end - index) + sub.len());
        nodes.extend_from_slice(&self.nodes[..index]);
        nodes.extend_from_slice(sub);
        nodes.extend_from_slice(&self.nodes[end..]);
        ExpressionTree { nodes }
    }

    /// Copy with the label at `index` replaced by a symbol of equal arity.
    pub fn relabel_at(&self, index: usize, symbol: Symbol) -> Self {
        assert_eq!(
            self.nodes[index].arity(),
            symbol.arity(),
            "relabeling must preserve arity"
        );
        let mut nodes = self.nodes.clone();
        nodes[index] = symbol;
        ExpressionTree { nodes }
    }

    /// Preorder arity sequence. Preorder plus arities determines the tree
    /// uniquely, so equal signatures mean equal shapes.
    pub fn shape_signature(&self) -> ShapeSignature {
        ShapeSignature(self.nodes.iter().map(|s| s.arity() as u8).collect())
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|s| !s.is_terminal()).count()
    }

    pub fn depth(&self) -> usize {
        let mut max = 0;
        let mut stack: Vec<usize> = Vec::new();
        for i in (0..self.nodes.len()).rev() {
            let mut d = 0;
            for _ in 0..self.nodes[i].arity() {
                d = d.max(stack.pop().expect("consistent tree"));
            }
            stack.push(d + 1);
            max = max.max(d + 1);
        }
        max
    }

    /// Picks an internal node with probability `internal_bias` (uniform
    /// among internal nodes), otherwise a uniform leaf. Trees without
    /// internal nodes always yield the root.
    pub fn random_index<R: Rng + ?Sized>(&self, rng: &mut R, internal_bias: f64) -> usize {
        let internal = self.internal_count();
        if internal == 0 {
            return 0;
        }
        let leaves = self.nodes.len() - internal;
        let want_internal = rng.random_bool(internal_bias.clamp(0.0, 1.0));
        let (k, pick) = if want_internal {
            (rng.random_range(0..internal), true)
        } else {
            (rng.random_range(0..leaves), false)
        };
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_terminal() != pick)
            .nth(k)
            .map(|(i, _)| i)
            .expect("k is within the class size")
    }

    pub fn random_node<R: Rng + ?Sized>(&self, rng: &mut R, internal_bias: f64) -> NodeCoord {
        let index = self.random_index(rng, internal_bias);
        self.coord_of(index)
    }

    /// Prefix rendering with a custom variable namer.
    pub fn render_with<F: Fn(usize) -> String>(&self, name: F) -> String {
        let mut out = String::with_capacity(self.nodes.len() * 4);
        // remaining children for each open function
        let mut open: Vec<usize> = Vec::new();
        for sym in &self.nodes {
            if !open.is_empty() {
                out.push(' ');
            }
            match sym {
                Symbol::Function(f) => {
                    out.push('(');
                    out.push_str(f.name());
                    open.push(f.arity());
                    continue;
                }
                Symbol::Variable(i) => out.push_str(&name(*i)),
                Symbol::Constant(v) => out.push_str(&v.to_string()),
            }
            while let Some(rem) = open.last_mut() {
                *rem -= 1;
                if *rem > 0 {
                    break;
                }
                out.push(')');
                open.pop();
            }
        }
        out
    }
}

impl fmt::Display for ExpressionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(|i| format!("x{}", i + 1)))
    }
}

/// Parses the canonical prefix rendering, e.g. `(ADD x1 (MUL x2 3.5))`.
/// `xK` denotes column `K-1`.
impl FromStr for ExpressionTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut nodes = Vec::new();
        let mut pos = 0;
        parse_expr(&tokens, &mut pos, &mut nodes)?;
        if pos != tokens.len() {
            return Err(Error::MalformedTree(format!(
                "unexpected trailing token `{}`",
                tokens[pos]
            )));
        }
        ExpressionTree::from_prefix(nodes)
    }
}

fn parse_expr(tokens: &[&str], pos: &mut usize, out: &mut Vec<Symbol>) -> Result<()> {
    let tok = *tokens
        .get(*pos)
        .ok_or_else(|| Error::MalformedTree("unexpected end of input".into()))?;
    *pos += 1;
    if tok == "(" {
        let name = *tokens
            .get(*pos)
            .ok_or_else(|| Error::MalformedTree("missing function name".into()))?;
        *pos += 1;
        let f = Function::from_name(name)
            .ok_or_else(|| Error::MalformedTree(format!("unknown function `{name}`")))?;
        out.push(Symbol::Function(f));
        let mut argc = 0;
        while tokens.get(*pos) != Some(&")") {
            parse_expr(tokens, pos, out)?;
            argc += 1;
        }
        *pos += 1;
        if argc != f.arity() {
            return Err(Error::ArityMismatch {
                symbol: f.name(),
                expected: f.arity(),
                got: argc,
            });
        }
        return Ok(());
    }
    if tok == ")" {
        return Err(Error::MalformedTree("unbalanced `)`".into()));
    }
    if let Some(k) = tok
        .strip_prefix('x')
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&k| k >= 1)
    {
        out.push(Symbol::Variable(k - 1));
    } else if let Ok(v) = tok.parse::<f64>() {
        out.push(Symbol::Constant(v));
    } else {
        return Err(Error::MalformedTree(format!("unknown terminal `{tok}`")));
    }
    Ok(())
}
