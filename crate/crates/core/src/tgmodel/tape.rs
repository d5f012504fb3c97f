//! Reverse-mode automatic differentiation over a tape of matrix operations.
//!
//! Forward methods evaluate eagerly and record the operation; `backward`
//! walks the tape in reverse and accumulates gradients per node.

use ndarray::{s, Array2, Axis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Act {
    Identity,
    Relu,
    Elu,
    Selu,
    LeakyRelu,
    Tanh,
    Sigmoid,
}

const SELU_ALPHA: f64 = 1.6732632423543772;
const SELU_LAMBDA: f64 = 1.0507009873554805;
const LEAKY_SLOPE: f64 = 0.01;

impl Act {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Act::Identity => x,
            Act::Relu => x.max(0.0),
            Act::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp() - 1.0
                }
            }
            Act::Selu => {
                if x > 0.0 {
                    SELU_LAMBDA * x
                } else {
                    SELU_LAMBDA * SELU_ALPHA * (x.exp() - 1.0)
                }
            }
            Act::LeakyRelu => {
                if x > 0.0 {
                    x
                } else {
                    LEAKY_SLOPE * x
                }
            }
            Act::Tanh => x.tanh(),
            Act::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Act::Identity => 1.0,
            Act::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Act::Elu => {
                if y > 0.0 {
                    1.0
                } else {
                    y + 1.0
                }
            }
            Act::Selu => {
                if y > 0.0 {
                    SELU_LAMBDA
                } else {
                    y + SELU_LAMBDA * SELU_ALPHA
                }
            }
            Act::LeakyRelu => {
                if y > 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Act::Tanh => 1.0 - y * y,
            Act::Sigmoid => y * (1.0 - y),
        }
    }
}

pub type NodeId = usize;

enum Op {
    Leaf,
    MatMul(NodeId, NodeId),
    Add(NodeId, NodeId),
    /// `a (r x c) + bias (1 x c)` broadcast over rows.
    AddRow(NodeId, NodeId),
    Mul(NodeId, NodeId),
    MulConst(NodeId, Array2<f64>),
    Act(NodeId, Act),
    Row(NodeId, usize),
    /// Stack 1-row nodes into a matrix.
    ConcatRows(Vec<NodeId>),
    ConcatCols(NodeId, NodeId),
    /// Row-major reshape of the child to this node's shape.
    Reshape(NodeId),
    /// Mean squared error against a constant target of the same shape.
    Mse(NodeId, Array2<f64>),
}

struct Node {
    value: Array2<f64>,
    op: Op,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, value: Array2<f64>, op: Op) -> NodeId {
        self.nodes.push(Node { value, op });
        self.nodes.len() - 1
    }

    pub fn value(&self, id: NodeId) -> &Array2<f64> {
        &self.nodes[id].value
    }

    pub fn leaf(&mut self, value: Array2<f64>) -> NodeId {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let value = self.nodes[a].value.dot(&self.nodes[b].value);
        self.push(value, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let value = &self.nodes[a].value + &self.nodes[b].value;
        self.push(value, Op::Add(a, b))
    }

    pub fn add_row(&mut self, a: NodeId, bias: NodeId) -> NodeId {
        let value = &self.nodes[a].value + &self.nodes[bias].value;
        self.push(value, Op::AddRow(a, bias))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let value = &self.nodes[a].value * &self.nodes[b].value;
        self.push(value, Op::Mul(a, b))
    }

    pub fn mul_const(&mut self, a: NodeId, mask: Array2<f64>) -> NodeId {
        let value = &self.nodes[a].value * &mask;
        self.push(value, Op::MulConst(a, mask))
    }

    pub fn act(&mut self, a: NodeId, f: Act) -> NodeId {
        let value = self.nodes[a].value.mapv(|x| f.apply(x));
        self.push(value, Op::Act(a, f))
    }

    pub fn row(&mut self, a: NodeId, i: usize) -> NodeId {
        let value = self.nodes[a]
            .value
            .slice(s![i..=i, ..])
            .to_owned();
        self.push(value, Op::Row(a, i))
    }

    pub fn concat_rows(&mut self, rows: Vec<NodeId>) -> NodeId {
        let cols = self.nodes[rows[0]].value.ncols();
        let mut value = Array2::zeros((rows.len(), cols));
        for (i, &id) in rows.iter().enumerate() {
            value.row_mut(i).assign(&self.nodes[id].value.row(0));
        }
        self.push(value, Op::ConcatRows(rows))
    }

    pub fn concat_cols(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let va = &self.nodes[a].value;
        let vb = &self.nodes[b].value;
        let value = ndarray::concatenate(Axis(1), &[va.view(), vb.view()])
            .expect("row counts agree");
        self.push(value, Op::ConcatCols(a, b))
    }

    pub fn reshape(&mut self, a: NodeId, rows: usize, cols: usize) -> NodeId {
        let src = &self.nodes[a].value;
        assert_eq!(src.len(), rows * cols, "element counts agree");
        let value = Array2::from_shape_vec((rows, cols), src.iter().copied().collect())
            .expect("element counts agree");
        self.push(value, Op::Reshape(a))
    }

    pub fn mse(&mut self, a: NodeId, target: Array2<f64>) -> NodeId {
        let diff = &self.nodes[a].value - &target;
        let value = diff.mapv(|d| d * d).sum() / diff.len() as f64;
        self.push(
            Array2::from_elem((1, 1), value),
            Op::Mse(a, target),
        )
    }

    /// Gradients of the scalar node `root` with respect to every node.
    pub fn backward(&self, root: NodeId) -> Vec<Option<Array2<f64>>> {
        let mut grads: Vec<Option<Array2<f64>>> = vec![None; self.nodes.len()];
        grads[root] = Some(Array2::ones(self.nodes[root].value.dim()));
        for id in (0..=root).rev() {
            let Some(g) = grads[id].take() else { continue };
            match &self.nodes[id].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let ga = g.dot(&self.nodes[*b].value.t());
                    let gb = self.nodes[*a].value.t().dot(&g);
                    accumulate(&mut grads, *a, ga);
                    accumulate(&mut grads, *b, gb);
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, g.clone());
                    accumulate(&mut grads, *b, g.clone());
                }
                Op::AddRow(a, bias) => {
                    let gb = g
                        .sum_axis(Axis(0))
                        .insert_axis(Axis(0));
                    accumulate(&mut grads, *a, g.clone());
                    accumulate(&mut grads, *bias, gb);
                }
                Op::Mul(a, b) => {
                    let ga = &g * &self.nodes[*b].value;
                    let gb = &g * &self.nodes[*a].value;
                    accumulate(&mut grads, *a, ga);
                    accumulate(&mut grads, *b, gb);
                }
                Op::MulConst(a, mask) => {
                    accumulate(&mut grads, *a, &g * mask);
                }
                Op::Act(a, f) => {
                    let ga = &g * &self.nodes[id].value.mapv(|y| f.derivative_from_output(y));
                    accumulate(&mut grads, *a, ga);
                }
                Op::Row(a, i) => {
                    let mut ga = Array2::zeros(self.nodes[*a].value.dim());
                    ga.row_mut(*i).assign(&g.row(0));
                    accumulate(&mut grads, *a, ga);
                }
                Op::ConcatRows(rows) => {
                    for (i, &child) in rows.iter().enumerate() {
                        let gi = g.slice(s![i..=i, ..]).to_owned();
                        accumulate(&mut grads, child, gi);
                    }
                }
                Op::ConcatCols(a, b) => {
                    let split = self.nodes[*a].value.ncols();
                    accumulate(&mut grads, *a, g.slice(s![.., ..split]).to_owned());
                    accumulate(&mut grads, *b, g.slice(s![.., split..]).to_owned());
                }
                Op::Reshape(a) => {
                    let dim = self.nodes[*a].value.dim();
                    let ga = Array2::from_shape_vec(dim, g.iter().copied().collect())
                        .expect("element counts agree");
                    accumulate(&mut grads, *a, ga);
                }
                Op::Mse(a, target) => {
                    let scale = 2.0 * g[[0, 0]] / self.nodes[*a].value.len() as f64;
                    let ga = (&self.nodes[*a].value - target) * scale;
                    accumulate(&mut grads, *a, ga);
                }
            }
            grads[id] = Some(g);
        }
        grads
    }
}

fn accumulate(grads: &mut [Option<Array2<f64>>], id: NodeId, g: Array2<f64>) {
    match &mut grads[id] {
        Some(existing) => *existing += &g,
        slot @ None => *slot = Some(g),
    }
}
