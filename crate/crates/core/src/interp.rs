//! Tree evaluation over datasets and MSE fitness.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::trees::{ExpressionTree, Function, Symbol};

/// Numeric table with one designated target column. Stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    target: usize,
    rows: usize,
}

impl Dataset {
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>], target: usize) -> Result<Self> {
        let width = names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); width];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidDataset(format!(
                    "row {r} has {} values, expected {width}",
                    row.len()
                )));
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Self::from_columns(names, columns, target)
    }

    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>, target: usize) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidDataset(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if target >= columns.len() {
            return Err(Error::InvalidDataset(format!(
                "target index {target} out of range for {} columns",
                columns.len()
            )));
        }
        let rows = columns[0].len();
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != rows {
                return Err(Error::InvalidDataset(format!(
                    "column `{name}` has {} rows, expected {rows}",
                    col.len()
                )));
            }
            if let Some(r) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "non-finite value in column `{name}`, row {r}"
                )));
            }
        }
        Ok(Dataset {
            names,
            columns,
            target,
            rows,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.columns[index]
    }

    pub fn targets(&self) -> &[f64] {
        &self.columns[self.target]
    }

    /// Column indices other than the target.
    pub fn input_indices(&self) -> Vec<usize> {
        (0..self.width()).filter(|&c| c != self.target).collect()
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[r]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    /// Dataset whose row `i` is row `order[i]` of `self`.
    pub fn select_rows(&self, order: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|c| order.iter().map(|&r| c[r]).collect())
            .collect();
        Dataset {
            names: self.names.clone(),
            columns,
            target: self.target,
            rows: order.len(),
        }
    }

    pub fn truncate_rows(&mut self, n: usize) {
        for c in &mut self.columns {
            c.truncate(n);
        }
        self.rows = self.rows.min(n);
    }
}

/// Fitness value; smaller is better. Non-finite evaluations map to
/// [`Quality::WORST`], which orders after every finite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quality(f64);

impl Quality {
    pub const WORST: Quality = Quality(f64::INFINITY);

    pub fn new(value: f64) -> Self {
        if value.is_finite() {
            debug_assert!(value >= 0.0);
            Quality(value)
        } else {
            Quality::WORST
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_worst(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_better_than(self, other: Quality) -> bool {
        self < other
    }
}

impl Eq for Quality {}

impl PartialOrd for Quality {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quality {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
fn truth(v: f64) -> bool {
    v > 0.0
}

#[inline]
fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[inline]
fn protected_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        1.0
    } else {
        a / b
    }
}

#[inline]
fn protected_log(a: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a.abs().ln()
    }
}

#[inline]
fn signum(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        -1.0
    } else if a == 0.0 {
        0.0
    } else {
        a
    }
}

#[inline]
fn unary(f: Function, a: f64) -> f64 {
    match f {
        Function::Log => protected_log(a),
        Function::Exp => a.exp(),
        Function::Signum => signum(a),
        Function::Sin => a.sin(),
        Function::Cos => a.cos(),
        Function::Tan => a.tan(),
        Function::Not => bool_value(!truth(a)),
        _ => unreachable!("{f} is not unary"),
    }
}

#[inline]
fn binary(f: Function, a: f64, b: f64) -> f64 {
    match f {
        Function::Add => a + b,
        Function::Sub => a - b,
        Function::Mul => a * b,
        Function::Div => protected_div(a, b),
        Function::LessThan => bool_value(a < b),
        Function::GreaterThan => bool_value(a > b),
        Function::Equal => bool_value(a == b),
        Function::And => bool_value(truth(a) && truth(b)),
        Function::Or => bool_value(truth(a) || truth(b)),
        Function::Xor => bool_value(truth(a) != truth(b)),
        _ => unreachable!("{f} is not binary"),
    }
}

/// Applies one primitive to its arguments.
pub fn apply_primitive(function: Function, args: &[f64]) -> Result<f64> {
    if args.len() != function.arity() {
        return Err(Error::ArityMismatch {
            symbol: function.name(),
            expected: function.arity(),
            got: args.len(),
        });
    }
    Ok(match args {
        [a] => unary(function, *a),
        [a, b] => binary(function, *a, *b),
        [c, a, b] => {
            if truth(*c) {
                *a
            } else {
                *b
            }
        }
        _ => unreachable!(),
    })
}

/// Where a borrowed operand lives.
#[derive(Clone, Copy, Debug)]
enum Src {
    Column(usize),
    Memo(usize),
}

/// Stack entry during evaluation. Leaves and memoized subtrees are not
/// copied until an operator needs to write somewhere.
#[derive(Debug)]
enum Operand {
    Owned(Vec<f64>),
    Borrowed(Src),
    Constant(f64),
}

/// One instruction of an evaluation plan, executed in reverse order.
#[derive(Clone, Copy, Debug)]
enum Step {
    Sym(Symbol),
    /// Evaluate and hand the result to the memo under `keys[k]`.
    Record(Function, usize),
    /// Whole subtree already known.
    Memo(usize),
}

/// Read-only inputs of one plan execution.
struct Inputs<'a> {
    ds: &'a Dataset,
    memo: &'a [Vec<f64>],
}

impl<'a> Inputs<'a> {
    #[inline]
    fn slice(&self, src: Src) -> &'a [f64] {
        match src {
            Src::Column(c) => self.ds.column(c),
            Src::Memo(slot) => &self.memo[slot],
        }
    }
}

/// Column-at-a-time tree evaluator. Keeps a pool of row buffers so
/// repeated evaluations do not allocate.
#[derive(Debug, Default)]
pub struct Evaluator {
    pool: Vec<Vec<f64>>,
    stack: Vec<Operand>,
    plan: Vec<Step>,
}

fn check_variables(tree: &ExpressionTree, ds: &Dataset) -> Result<()> {
    let width = ds.width();
    match tree.nodes().iter().find_map(|s| match *s {
        Symbol::Variable(i) if i >= width => Some(i),
        _ => None,
    }) {
        Some(index) => Err(Error::UnknownVariable { index, width }),
        None => Ok(()),
    }
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    fn buffer(&mut self) -> Vec<f64> {
        let mut b = self.pool.pop().unwrap_or_default();
        b.clear();
        b
    }

    fn materialize(&mut self, op: Operand, inp: &Inputs<'_>) -> Vec<f64> {
        match op {
            Operand::Owned(v) => v,
            Operand::Borrowed(src) => {
                let mut b = self.buffer();
                b.extend_from_slice(inp.slice(src));
                b
            }
            Operand::Constant(v) => {
                let mut b = self.buffer();
                b.resize(inp.ds.rows(), v);
                b
            }
        }
    }

    fn release(&mut self, op: Operand) {
        if let Operand::Owned(v) = op {
            self.pool.push(v);
        }
    }

    /// Evaluates `tree` on every row of `ds`. The returned buffer can be
    /// handed back through [`Evaluator::recycle`].
    pub fn eval(&mut self, tree: &ExpressionTree, ds: &Dataset) -> Result<Vec<f64>> {
        check_variables(tree, ds)?;
        let mut plan = std::mem::take(&mut self.plan);
        plan.clear();
        plan.extend(tree.nodes().iter().map(|&s| Step::Sym(s)));
        let out = self.execute(&plan, &Inputs { ds, memo: &[] }, &mut |_, _| {});
        self.plan = plan;
        Ok(out)
    }

    /// Runs `plan` back to front. `record` receives the value of every
    /// `Record` step that did not fold to a constant.
    fn execute(
        &mut self,
        plan: &[Step],
        inp: &Inputs<'_>,
        record: &mut dyn FnMut(usize, &[f64]),
    ) -> Vec<f64> {
        for step in plan.iter().rev() {
            let (f, key) = match *step {
                Step::Sym(Symbol::Variable(i)) => {
                    self.stack.push(Operand::Borrowed(Src::Column(i)));
                    continue;
                }
                Step::Sym(Symbol::Constant(v)) => {
                    self.stack.push(Operand::Constant(v));
                    continue;
                }
                Step::Memo(slot) => {
                    self.stack.push(Operand::Borrowed(Src::Memo(slot)));
                    continue;
                }
                Step::Sym(Symbol::Function(f)) => (f, None),
                Step::Record(f, k) => (f, Some(k)),
            };
            let out = match f.arity() {
                1 => match self.stack.pop().expect("operand") {
                    Operand::Constant(v) => Operand::Constant(unary(f, v)),
                    a => {
                        let mut a = self.materialize(a, inp);
                        a.iter_mut().for_each(|x| *x = unary(f, *x));
                        Operand::Owned(a)
                    }
                },
                2 => {
                    // reverse preorder: the first operand is on top
                    let a = self.stack.pop().expect("operand");
                    let b = self.stack.pop().expect("operand");
                    self.binary_op(f, a, b, inp)
                }
                3 => {
                    let cond = self.stack.pop().expect("operand");
                    let then = self.stack.pop().expect("operand");
                    let other = self.stack.pop().expect("operand");
                    let mut out = self.materialize(then, inp);
                    {
                        let c = lane(&cond, inp);
                        let o = lane(&other, inp);
                        for (r, t) in out.iter_mut().enumerate() {
                            if !truth(c.get(r)) {
                                *t = o.get(r);
                            }
                        }
                    }
                    self.release(cond);
                    self.release(other);
                    Operand::Owned(out)
                }
                _ => unreachable!(),
            };
            if let (Some(k), Operand::Owned(v)) = (key, &out) {
                record(k, v);
            }
            self.stack.push(out);
        }
        let top = self.stack.pop().expect("tree yields one value");
        debug_assert!(self.stack.is_empty());
        let mut out = self.materialize(top, inp);
        out.truncate(inp.ds.rows());
        out
    }

    fn binary_op(&mut self, f: Function, a: Operand, b: Operand, inp: &Inputs<'_>) -> Operand {
        match (a, b) {
            (Operand::Constant(x), Operand::Constant(y)) => Operand::Constant(binary(f, x, y)),
            (Operand::Owned(mut x), b) => {
                match &b {
                    Operand::Owned(y) => apply_binary(f, &mut x, y),
                    Operand::Borrowed(s) => apply_binary(f, &mut x, inp.slice(*s)),
                    Operand::Constant(y) => x.iter_mut().for_each(|v| *v = binary(f, *v, *y)),
                }
                self.release(b);
                Operand::Owned(x)
            }
            (a, Operand::Owned(mut y)) => {
                match a {
                    Operand::Borrowed(s) => apply_binary_rev(f, inp.slice(s), &mut y),
                    Operand::Constant(x) => y.iter_mut().for_each(|v| *v = binary(f, x, *v)),
                    Operand::Owned(_) => unreachable!(),
                }
                Operand::Owned(y)
            }
            (a, b) => {
                let mut x = self.materialize(a, inp);
                match b {
                    Operand::Borrowed(s) => apply_binary(f, &mut x, inp.slice(s)),
                    Operand::Constant(y) => x.iter_mut().for_each(|v| *v = binary(f, *v, y)),
                    Operand::Owned(_) => unreachable!(),
                }
                Operand::Owned(x)
            }
        }
    }

    pub fn recycle(&mut self, buffer: Vec<f64>) {
        self.pool.push(buffer);
    }

    /// MSE of `tree` against the dataset's target column.
    pub fn fitness(&mut self, tree: &ExpressionTree, ds: &Dataset) -> Result<Quality> {
        let predictions = self.eval(tree, ds)?;
        let q = mse(&predictions, ds.targets());
        self.recycle(predictions);
        q
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Structural hash of a node given its children's hashes, two independent
/// 64-bit lanes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct NodeHash(u64, u64);

impl NodeHash {
    #[inline]
    fn leaf(sym: Symbol) -> Self {
        let code = match sym {
            Symbol::Function(f) => 1 + f as u64,
            Symbol::Variable(i) => (i as u64) << 8 | 0x80,
            Symbol::Constant(v) => mix64(v.to_bits()) | 1 << 63,
        };
        NodeHash(code, code ^ 0x9e37_79b9_7f4a_7c15)
    }

    #[inline]
    fn absorb(self, child: NodeHash) -> Self {
        NodeHash(
            (self.0.rotate_left(23) ^ child.0).wrapping_mul(0x2545_f491_4f6c_dd1d),
            (self.1.rotate_left(41).wrapping_add(child.1)).wrapping_mul(0xd6e8_feb8_6659_fd93),
        )
    }

    #[inline]
    fn finish(self) -> Self {
        NodeHash(mix64(self.0), mix64(self.1 ^ 0x6a09_e667_f3bc_c909))
    }
}

/// Evaluator bound to one dataset that remembers the values of large
/// subtrees. Offspring share most of their material with their parents,
/// so usually only the nodes above the crossover point are recomputed.
/// Results are identical to [`Evaluator`]'s.
#[derive(Debug)]
pub struct MemoEvaluator<'d> {
    ds: &'d Dataset,
    inner: Evaluator,
    /// Subtrees below this many nodes are always recomputed.
    min_size: usize,
    capacity: usize,
    table: std::collections::HashMap<NodeHash, usize>,
    slots: Vec<Vec<f64>>,
    hashes: Vec<NodeHash>,
    sizes: Vec<usize>,
    stack: Vec<(NodeHash, usize)>,
    keys: Vec<NodeHash>,
    pending: Vec<(NodeHash, Vec<f64>)>,
}

impl<'d> MemoEvaluator<'d> {
    pub const DEFAULT_MIN_SIZE: usize = 8;
    /// Approximate memory for remembered values.
    pub const DEFAULT_BYTES: usize = 64 << 20;

    pub fn new(ds: &'d Dataset) -> Self {
        Self::with_limits(ds, Self::DEFAULT_MIN_SIZE, Self::DEFAULT_BYTES)
    }

    pub fn with_limits(ds: &'d Dataset, min_size: usize, bytes: usize) -> Self {
        let per_slot = (ds.rows() * std::mem::size_of::<f64>()).max(1) + 64;
        MemoEvaluator {
            ds,
            inner: Evaluator::new(),
            min_size: min_size.max(2),
            capacity: (bytes / per_slot).max(1),
            table: Default::default(),
            slots: Vec::new(),
            hashes: Vec::new(),
            sizes: Vec::new(),
            stack: Vec::new(),
            keys: Vec::new(),
            pending: Vec::new(),
        }
    }

    pub fn dataset(&self) -> &'d Dataset {
        self.ds
    }

    /// Number of remembered subtrees.
    pub fn remembered(&self) -> usize {
        self.table.len()
    }

    fn hash_nodes(&mut self, tree: &ExpressionTree) {
        let n = tree.len();
        self.hashes.clear();
        self.hashes.resize(n, NodeHash(0, 0));
        self.sizes.clear();
        self.sizes.resize(n, 1);
        // reverse preorder leaves a node's first child on top of the stack
        let stack = &mut self.stack;
        stack.clear();
        for (i, &sym) in tree.nodes().iter().enumerate().rev() {
            let mut h = NodeHash::leaf(sym);
            let mut size = 1;
            for _ in 0..sym.arity() {
                let (ch, cs) = stack.pop().expect("well-formed prefix tree");
                h = h.absorb(ch);
                size += cs;
            }
            let h = h.finish();
            stack.push((h, size));
            self.hashes[i] = h;
            self.sizes[i] = size;
        }
    }

    pub fn eval(&mut self, tree: &ExpressionTree) -> Result<Vec<f64>> {
        check_variables(tree, self.ds)?;
        self.hash_nodes(tree);
        let mut plan = std::mem::take(&mut self.inner.plan);
        plan.clear();
        self.keys.clear();
        let nodes = tree.nodes();
        let mut i = 0;
        while i < nodes.len() {
            let step = match nodes[i] {
                Symbol::Function(f) if self.sizes[i] >= self.min_size => {
                    if let Some(&slot) = self.table.get(&self.hashes[i]) {
                        plan.push(Step::Memo(slot));
                        i += self.sizes[i];
                        continue;
                    }
                    self.keys.push(self.hashes[i]);
                    Step::Record(f, self.keys.len() - 1)
                }
                s => Step::Sym(s),
            };
            plan.push(step);
            i += 1;
        }

        let keys = &self.keys;
        let pending = &mut self.pending;
        let inp = Inputs { ds: self.ds, memo: &self.slots };
        let out = self.inner.execute(&plan, &inp, &mut |k, v| pending.push((keys[k], v.to_vec())));
        self.inner.plan = plan;

        if self.table.len() + self.pending.len() > self.capacity {
            self.table.clear();
            self.slots.clear();
        }
        for (key, values) in self.pending.drain(..) {
            self.table.insert(key, self.slots.len());
            self.slots.push(values);
        }
        Ok(out)
    }

    /// MSE against the bound dataset's target column.
    pub fn fitness(&mut self, tree: &ExpressionTree) -> Result<Quality> {
        let predictions = self.eval(tree)?;
        let q = mse(&predictions, self.ds.targets());
        self.inner.recycle(predictions);
        q
    }
}

enum Lane<'a> {
    Slice(&'a [f64]),
    Scalar(f64),
}

impl Lane<'_> {
    #[inline]
    fn get(&self, r: usize) -> f64 {
        match self {
            Lane::Slice(s) => s[r],
            Lane::Scalar(v) => *v,
        }
    }
}

fn lane<'a>(op: &'a Operand, inp: &Inputs<'a>) -> Lane<'a> {
    match op {
        Operand::Owned(v) => Lane::Slice(v),
        Operand::Borrowed(s) => Lane::Slice(inp.slice(*s)),
        Operand::Constant(v) => Lane::Scalar(*v),
    }
}

/// `a[i] = f(a[i], b[i])`, with monomorphic loops for the hot arithmetic
/// primitives.
fn apply_binary(f: Function, a: &mut [f64], b: &[f64]) {
    match f {
        Function::Add => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
        Function::Sub => a.iter_mut().zip(b).for_each(|(x, y)| *x -= y),
        Function::Mul => a.iter_mut().zip(b).for_each(|(x, y)| *x *= y),
        Function::Div => a
            .iter_mut()
            .zip(b)
            .for_each(|(x, &y)| *x = protected_div(*x, y)),
        _ => a.iter_mut().zip(b).for_each(|(x, &y)| *x = binary(f, *x, y)),
    }
}

/// `b[i] = f(a[i], b[i])`.
fn apply_binary_rev(f: Function, a: &[f64], b: &mut [f64]) {
    match f {
        Function::Add => b.iter_mut().zip(a).for_each(|(y, x)| *y += x),
        Function::Sub => b.iter_mut().zip(a).for_each(|(y, &x)| *y = x - *y),
        Function::Mul => b.iter_mut().zip(a).for_each(|(y, x)| *y *= x),
        Function::Div => b
            .iter_mut()
            .zip(a)
            .for_each(|(y, &x)| *y = protected_div(x, *y)),
        _ => b.iter_mut().zip(a).for_each(|(y, &x)| *y = binary(f, x, *y)),
    }
}

/// Row-wise evaluation of `tree` over `ds`.
pub fn eval_tree(tree: &ExpressionTree, ds: &Dataset) -> Result<Vec<f64>> {
    Evaluator::new().eval(tree, ds)
}

/// Mean squared error; any non-finite prediction gives [`Quality::WORST`].
pub fn mse(predictions: &[f64], targets: &[f64]) -> Result<Quality> {
    if predictions.len() != targets.len() {
        return Err(Error::LengthMismatch(predictions.len(), targets.len()));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sum = 0.0;
    for (&p, &t) in predictions.iter().zip(targets) {
        if !p.is_finite() {
            return Ok(Quality::WORST);
        }
        let d = p - t;
        sum += d * d;
    }
    Ok(Quality::new(sum / predictions.len() as f64))
}
