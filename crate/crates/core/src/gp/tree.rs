use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GpError;

/// A node label: one of the arithmetic functions or a feature terminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Primitive {
    Add,
    Sub,
    Mul,
    /// Protected division: yields 1.0 when the denominator is (near) zero.
    Div,
    /// `if a > 0 then b else c`.
    If,
    /// Reads one input feature column.
    Feature(u16),
}

impl Primitive {
    pub fn arity(self) -> usize {
        match self {
            Primitive::Add | Primitive::Sub | Primitive::Mul | Primitive::Div => 2,
            Primitive::If => 3,
            Primitive::Feature(_) => 0,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Primitive::Feature(_))
    }

    fn symbol(self) -> &'static str {
        match self {
            Primitive::Add => "add",
            Primitive::Sub => "sub",
            Primitive::Mul => "mul",
            Primitive::Div => "div",
            Primitive::If => "if",
            Primitive::Feature(_) => "x",
        }
    }

    fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "add" | "+" => Primitive::Add,
            "sub" | "-" => Primitive::Sub,
            "mul" | "*" => Primitive::Mul,
            "div" | "%" => Primitive::Div,
            "if" => Primitive::If,
            _ => {
                let idx = s.strip_prefix('x')?.parse().ok()?;
                Primitive::Feature(idx)
            }
        })
    }
}

/// Function and terminal sets available to a run.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveSet {
    functions: Vec<Primitive>,
    n_features: usize,
}

impl PrimitiveSet {
    /// `{+, -, *, %, IF}` over `n_features` feature terminals.
    pub fn standard(n_features: usize) -> Self {
        Self::new(
            vec![
                Primitive::Add,
                Primitive::Sub,
                Primitive::Mul,
                Primitive::Div,
                Primitive::If,
            ],
            n_features,
        )
        .expect("standard primitive set is valid")
    }

    pub fn new(functions: Vec<Primitive>, n_features: usize) -> Result<Self, GpError> {
        if n_features == 0 || n_features > u16::MAX as usize {
            return Err(GpError::FeatureCount(n_features));
        }
        if functions.is_empty() {
            return Err(GpError::EmptyFunctionSet);
        }
        if let Some(p) = functions.iter().find(|p| p.is_terminal()) {
            return Err(GpError::TerminalAsFunction(*p));
        }
        Ok(Self {
            functions,
            n_features,
        })
    }

    pub fn functions(&self) -> &[Primitive] {
        &self.functions
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn random_function<R: Rng + ?Sized>(&self, rng: &mut R) -> Primitive {
        self.functions[rng.random_range(0..self.functions.len())]
    }

    pub fn random_terminal<R: Rng + ?Sized>(&self, rng: &mut R) -> Primitive {
        Primitive::Feature(rng.random_range(0..self.n_features) as u16)
    }

    /// Uniform draw over the union of functions and terminals.
    pub fn random_primitive<R: Rng + ?Sized>(&self, rng: &mut R) -> Primitive {
        let k = rng.random_range(0..self.functions.len() + self.n_features);
        if k < self.functions.len() {
            self.functions[k]
        } else {
            Primitive::Feature((k - self.functions.len()) as u16)
        }
    }
}

/// Hard structural caps on program size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLimits {
    pub max_depth: usize,
    pub max_length: usize,
}

impl Default for TreeLimits {
    fn default() -> Self {
        Self {
            max_depth: 8,
            max_length: 800,
        }
    }
}

/// Expression tree stored as a prefix-ordered node list. Children of a node
/// follow it contiguously, so every subtree is a slice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ProgramTree {
    nodes: Vec<Primitive>,
}

impl ProgramTree {
    pub fn from_prefix(nodes: Vec<Primitive>) -> Result<Self, GpError> {
        if nodes.is_empty() {
            return Err(GpError::Malformed("empty node list".into()));
        }
        let mut open = 1usize;
        for (i, node) in nodes.iter().enumerate() {
            if open == 0 {
                return Err(GpError::Malformed(format!("trailing nodes after index {i}")));
            }
            open = open - 1 + node.arity();
        }
        if open != 0 {
            return Err(GpError::Malformed(format!("{open} missing children")));
        }
        Ok(Self { nodes })
    }

    pub(crate) fn from_prefix_unchecked(nodes: Vec<Primitive>) -> Self {
        debug_assert!(Self::from_prefix(nodes.clone()).is_ok());
        Self { nodes }
    }

    pub fn leaf(feature: u16) -> Self {
        Self {
            nodes: vec![Primitive::Feature(feature)],
        }
    }

    pub fn nodes(&self) -> &[Primitive] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Depth with the root at depth 0.
    pub fn depth(&self) -> usize {
        let mut max = 0;
        let mut pending: Vec<usize> = Vec::with_capacity(16);
        for node in &self.nodes {
            max = max.max(pending.len());
            match node.arity() {
                0 => {
                    while let Some(top) = pending.last_mut() {
                        *top -= 1;
                        if *top == 0 {
                            pending.pop();
                        } else {
                            break;
                        }
                    }
                }
                a => pending.push(a),
            }
        }
        max
    }

    /// Exclusive end index of the subtree rooted at `start`.
    pub fn subtree_end(&self, start: usize) -> usize {
        let mut needed = 1usize;
        let mut i = start;
        while needed > 0 {
            needed = needed - 1 + self.nodes[i].arity();
            i += 1;
        }
        i
    }

    pub fn subtree(&self, start: usize) -> &[Primitive] {
        &self.nodes[start..self.subtree_end(start)]
    }

    /// Copy of `self` with the subtree at `at` replaced by `replacement`.
    pub fn with_subtree(&self, at: usize, replacement: &[Primitive]) -> ProgramTree {
        let end = self.subtree_end(at);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end - at) + replacement.len());
        nodes.extend_from_slice(&self.nodes[..at]);
        nodes.extend_from_slice(replacement);
        nodes.extend_from_slice(&self.nodes[end..]);
        ProgramTree::from_prefix_unchecked(nodes)
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_terminal()).count()
    }

    pub fn fits(&self, limits: &TreeLimits) -> bool {
        self.len() <= limits.max_length && self.depth() <= limits.max_depth
    }

    pub fn max_feature(&self) -> Option<u16> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Primitive::Feature(k) => Some(*k),
                _ => None,
            })
            .max()
    }
}

impl fmt::Display for ProgramTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_at(t: &ProgramTree, i: usize, f: &mut fmt::Formatter<'_>) -> Result<usize, fmt::Error> {
            let node = t.nodes[i];
            if let Primitive::Feature(k) = node {
                write!(f, "x{k}")?;
                return Ok(i + 1);
            }
            write!(f, "({}", node.symbol())?;
            let mut next = i + 1;
            for _ in 0..node.arity() {
                write!(f, " ")?;
                next = write_at(t, next, f)?;
            }
            write!(f, ")")?;
            Ok(next)
        }
        write_at(self, 0, f).map(|_| ())
    }
}

/// Parses the S-expression form produced by `Display`, e.g. `(div x0 (add x1 x2))`.
impl FromStr for ProgramTree {
    type Err = GpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let mut nodes = Vec::new();
        for tok in spaced.split_whitespace() {
            if tok == "(" || tok == ")" {
                continue;
            }
            let p = Primitive::from_symbol(tok)
                .ok_or_else(|| GpError::Malformed(format!("unknown symbol `{tok}`")))?;
            nodes.push(p);
        }
        ProgramTree::from_prefix(nodes)
    }
}

impl TryFrom<String> for ProgramTree {
    type Error = GpError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ProgramTree> for String {
    fn from(t: ProgramTree) -> String {
        t.to_string()
    }
}
