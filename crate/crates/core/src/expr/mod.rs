//! Univariate integrand expressions in the variable `t`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | "t" | "pi" | "e"
//!         | func "(" expr ")" | "pow" "(" expr "," expr ")"
//!         | "(" expr ")" ;
//! func    = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "cbrt" | "abs" ;
//! number  = digits [ "." digits ] [ exponent ]
//!         | "." digits [ exponent ] ;
//! exponent = ("e" | "E") [ "+" | "-" ] digits ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-t^2`
//! is `-(t^2)` and `2^3^2` is `2^(3^2)`.

mod eval;
mod jet;
mod parser;

use std::fmt;

pub use eval::{eval_jet, eval_value, EvalError};
pub use jet::Jet2;
pub use parser::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Cbrt,
    Abs,
    Pow,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Cbrt,
        Func::Abs,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Cbrt => "cbrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Const(f64),
    Var,
    Neg(Box<ExprNode>),
    Binary {
        op: BinaryOp,
        lhs: Box<ExprNode>,
        rhs: Box<ExprNode>,
    },
    Call {
        func: Func,
        args: Vec<ExprNode>,
    },
}

impl ExprNode {
    pub fn binary(op: BinaryOp, lhs: ExprNode, rhs: ExprNode) -> Self {
        ExprNode::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn call(func: Func, args: Vec<ExprNode>) -> Self {
        debug_assert_eq!(args.len(), func.arity());
        ExprNode::Call { func, args }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprNode::Const(_) | ExprNode::Var => 1,
            ExprNode::Neg(inner) => 1 + inner.depth(),
            ExprNode::Binary { lhs, rhs, .. } => 1 + lhs.depth().max(rhs.depth()),
            ExprNode::Call { args, .. } => 1 + args.iter().map(ExprNode::depth).max().unwrap_or(0),
        }
    }

    /// Value, first and second derivative at `t`.
    pub fn jet(&self, t: f64) -> Result<Jet2, EvalError> {
        eval_jet(self, t)
    }
}

/// Fully parenthesised form; parsing it back yields the same tree as long
/// as every constant is non-negative (the parser only produces those).
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Const(v) => write!(f, "{v}"),
            ExprNode::Var => f.write_str("t"),
            ExprNode::Neg(inner) => write!(f, "(-{inner})"),
            ExprNode::Binary { op, lhs, rhs } => write!(f, "({lhs}{}{rhs})", op.symbol()),
            ExprNode::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
