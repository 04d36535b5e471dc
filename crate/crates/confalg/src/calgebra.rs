//! Free conformal structures: modules, elements, lambda-product tables,
//! axiom checkers, and structure-to-structure conversions.
//!
//! A structure is a free `Q[d]`-module of finite rank together with one or
//! more binary lambda-products, each given by a table of polynomials
//! `P_ij^k(lm, d)` meaning `e_i (op)_lm e_j = sum_k P_ij^k(lm, d) e_k`.
//! The table determines the product on every pair of elements through the
//! sesquilinearity rules
//!
//! ```text
//! (d a) (op)_lm b = -lm * (a (op)_lm b)
//! a (op)_lm (d b) = (d + lm) * (a (op)_lm b)
//! ```
//!
//! so a product of `f(d) e_i` and `g(d) e_j` contributes
//! `f(-lm) * g(lm + d) * P_ij^k(lm, d)` to the `e_k`-coordinate.
//!
//! Because every defining law of every supported kind is sesquilinear in each
//! argument, checking it on basis generators with symbolic lambda variables
//! proves it for all elements; `check_axioms` relies on this and a
//! randomized regression test exercises it.

use crate::error::{Error, Result};
use crate::polyring::{
    is_identifier, Affine, Poly, Rat, VarId, VarRegistry, VarRole, VAR_D, VAR_LM, VAR_MU, VAR_NU,
};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Lie bracket operation name.
pub const OP_BRACKET: &str = "bracket";
/// Left-symmetric / associative product name.
pub const OP_CIRC: &str = "circ";
/// Dendriform "greater" product.
pub const OP_SUCC: &str = "succ";
/// Dendriform "lesser" product.
pub const OP_PREC: &str = "prec";
/// Principal product of an L-dendriform structure.
pub const OP_TRI_R: &str = "tri_r";
/// Secondary product of an L-dendriform structure.
pub const OP_TRI_L: &str = "tri_l";
/// Quadri north-west product.
pub const OP_NW: &str = "nw";
/// Quadri south-west product.
pub const OP_SW: &str = "sw";
/// Quadri north-east product.
pub const OP_NE: &str = "ne";
/// Quadri south-east product.
pub const OP_SE: &str = "se";

// ---------------------------------------------------------------------------
// Modules and elements
// ---------------------------------------------------------------------------

/// A free `Q[d]`-module of finite rank with named basis generators.
#[derive(Debug, PartialEq, Eq)]
pub struct FreeModule {
    basis: Vec<String>,
}

impl FreeModule {
    /// Module with the given basis names (nonempty, unique identifiers).
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Arc<Self>> {
        let basis: Vec<String> = names.into_iter().map(Into::into).collect();
        if basis.is_empty() {
            return Err(Error::InvalidDefinition("a module needs at least one basis generator".into()));
        }
        for (i, name) in basis.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::InvalidDefinition(format!("`{name}` is not a valid basis name")));
            }
            if basis[..i].contains(name) {
                return Err(Error::InvalidDefinition(format!("duplicate basis name `{name}`")));
            }
        }
        Ok(Arc::new(FreeModule { basis }))
    }

    /// Number of basis generators.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Name of the `i`-th generator.
    pub fn name(&self, i: usize) -> &str {
        &self.basis[i]
    }

    /// All generator names in order.
    pub fn names(&self) -> &[String] {
        &self.basis
    }

    /// Index of a generator by name.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b == name)
            .ok_or_else(|| Error::UnknownBasis(name.to_string()))
    }
}

fn same_module(a: &Arc<FreeModule>, b: &Arc<FreeModule>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An element `sum_i f_i(d, ...) e_i` of a free module.
///
/// Coefficients may involve the derivation symbol `d`, parameters, and —
/// for intermediate values inside axiom computations — live lambda
/// variables.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    module: Arc<FreeModule>,
    reg: Arc<VarRegistry>,
    coeffs: Vec<Poly>,
}

impl Element {
    /// The zero element.
    pub fn zero(module: &Arc<FreeModule>, reg: &Arc<VarRegistry>) -> Self {
        Element {
            module: Arc::clone(module),
            reg: Arc::clone(reg),
            coeffs: vec![Poly::zero(reg); module.rank()],
        }
    }

    /// The basis generator `e_i`.
    pub fn basis(module: &Arc<FreeModule>, reg: &Arc<VarRegistry>, i: usize) -> Self {
        let mut el = Element::zero(module, reg);
        el.coeffs[i] = Poly::one(reg);
        el
    }

    /// Element from explicit coordinates.
    pub fn from_coeffs(
        module: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        coeffs: Vec<Poly>,
    ) -> Result<Self> {
        if coeffs.len() != module.rank() {
            return Err(Error::ModuleMismatch(format!(
                "expected {} coordinates, got {}",
                module.rank(),
                coeffs.len()
            )));
        }
        Ok(Element { module: Arc::clone(module), reg: Arc::clone(reg), coeffs })
    }

    /// The module this element belongs to.
    pub fn module(&self) -> &Arc<FreeModule> {
        &self.module
    }

    /// The variable registry of the coefficients.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    /// Coordinate vector.
    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// Single coordinate.
    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    /// True when all coordinates vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// Sum of two elements of the same module.
    pub fn add(&self, other: &Element) -> Element {
        assert!(same_module(&self.module, &other.module), "module mismatch in Element::add");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        Element { module: Arc::clone(&self.module), reg: Arc::clone(&self.reg), coeffs }
    }

    /// Difference.
    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Element {
        let coeffs = self.coeffs.iter().map(Poly::neg).collect();
        Element { module: Arc::clone(&self.module), reg: Arc::clone(&self.reg), coeffs }
    }

    /// Multiply every coordinate by a polynomial (module action of `Q[d]`
    /// extended by parameters and live lambdas).
    pub fn scale_poly(&self, f: &Poly) -> Element {
        let coeffs = self.coeffs.iter().map(|c| c.mul(f)).collect();
        Element { module: Arc::clone(&self.module), reg: Arc::clone(&self.reg), coeffs }
    }

    /// Multiply every coordinate by a rational scalar.
    pub fn scale(&self, c: &Rat) -> Element {
        let coeffs = self.coeffs.iter().map(|p| p.scale(c)).collect();
        Element { module: Arc::clone(&self.module), reg: Arc::clone(&self.reg), coeffs }
    }

    /// Apply the derivation: multiply every coordinate by `d`.
    pub fn apply_derivation(&self) -> Element {
        self.scale_poly(&Poly::var(&self.reg, VAR_D))
    }

    /// Apply an affine substitution to every coordinate.
    pub fn substitute_affine(&self, bindings: &BTreeMap<VarId, Affine>) -> Result<Element> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.substitute_affine(bindings))
            .collect::<Result<Vec<_>>>()?;
        Ok(Element { module: Arc::clone(&self.module), reg: Arc::clone(&self.reg), coeffs })
    }

    /// Apply a single-variable affine substitution to every coordinate.
    pub fn substitute_var(&self, v: VarId, image: Affine) -> Result<Element> {
        let mut bindings = BTreeMap::new();
        bindings.insert(v, image);
        self.substitute_affine(&bindings)
    }

    /// True when the variable occurs in some coordinate.
    pub fn contains_var(&self, v: VarId) -> bool {
        self.coeffs.iter().any(|c| c.contains_var(v))
    }

    /// Nonzero coordinates as `(basis name, coefficient)` pairs.
    pub fn nonzero_entries(&self) -> Vec<(String, Poly)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.module.name(i).to_string(), c.clone()))
            .collect()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries = self.nonzero_entries();
        if entries.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = entries
            .iter()
            .map(|(name, c)| {
                if c.as_constant().map(|k| k == Rat::from(num_bigint::BigInt::from(1))) == Some(true)
                {
                    name.clone()
                } else {
                    format!("({c})*{name}")
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

// ---------------------------------------------------------------------------
// Lambda tables and structures
// ---------------------------------------------------------------------------

/// The table of one binary lambda-product: `entries[i][j][k]` is the
/// polynomial `P_ij^k(lm, d)` in the display
/// `e_i (op)_lm e_j = sum_k P_ij^k(lm, d) e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaTable {
    entries: Vec<Vec<Vec<Poly>>>,
}

impl LambdaTable {
    /// The all-zero table for a given rank.
    pub fn zero(rank: usize, reg: &Arc<VarRegistry>) -> Self {
        LambdaTable {
            entries: vec![vec![vec![Poly::zero(reg); rank]; rank]; rank],
        }
    }

    /// Table from explicit entries; validates shape and variable usage
    /// (entries may use `d`, `lm`, and parameters only).
    pub fn new(rank: usize, reg: &Arc<VarRegistry>, entries: Vec<Vec<Vec<Poly>>>) -> Result<Self> {
        if entries.len() != rank || entries.iter().any(|row| row.len() != rank)
            || entries.iter().flatten().any(|cell| cell.len() != rank)
        {
            return Err(Error::InvalidDefinition(format!(
                "lambda table must be {rank} x {rank} with {rank} output coordinates per cell"
            )));
        }
        for row in &entries {
            for cell in row {
                for p in cell {
                    for v in p.vars_used() {
                        let ok = v == VAR_D
                            || v == VAR_LM
                            || reg.role(v) == VarRole::Parameter;
                        if !ok {
                            return Err(Error::DisallowedVariable(
                                reg.name(v).to_string(),
                                "lambda-table entries may use only d, lm, and parameters".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(LambdaTable { entries })
    }

    /// Rank of the underlying module.
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// Output coordinates of `e_i (op)_lm e_j`.
    pub fn cell(&self, i: usize, j: usize) -> &[Poly] {
        &self.entries[i][j]
    }

    /// True when every entry vanishes.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().flatten().all(Poly::is_zero)
    }

    /// Entry-wise sum of two tables.
    pub fn add(&self, other: &LambdaTable) -> LambdaTable {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(ca, cb)| ca.iter().zip(cb).map(|(a, b)| a.add(b)).collect())
                    .collect()
            })
            .collect();
        LambdaTable { entries }
    }

    /// Entry-wise scalar multiple.
    pub fn scale(&self, c: &Rat) -> LambdaTable {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|cell| cell.iter().map(|p| p.scale(c)).collect()).collect())
            .collect();
        LambdaTable { entries }
    }
}

/// The algebraic species a structure claims to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlgebraKind {
    /// No laws beyond sesquilinearity (which holds by construction).
    Raw,
    /// One bracket, skew-symmetric and Jacobi.
    Lie,
    /// One product whose associator is symmetric in its first two arguments.
    LeftSymmetric,
    /// One product with vanishing associator.
    Associative,
    /// Two products splitting an associative product.
    Dendriform,
    /// Two products splitting a left-symmetric product.
    LDendriform,
    /// Four products refining both dendriform splittings.
    Quadri,
}

impl AlgebraKind {
    /// The op-table names this kind requires, in declaration order.
    pub fn required_ops(self) -> &'static [&'static str] {
        match self {
            AlgebraKind::Raw => &[],
            AlgebraKind::Lie => &[OP_BRACKET],
            AlgebraKind::LeftSymmetric | AlgebraKind::Associative => &[OP_CIRC],
            AlgebraKind::Dendriform => &[OP_SUCC, OP_PREC],
            AlgebraKind::LDendriform => &[OP_TRI_R, OP_TRI_L],
            AlgebraKind::Quadri => &[OP_NW, OP_SW, OP_NE, OP_SE],
        }
    }

    /// Stable lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::Raw => "raw",
            AlgebraKind::Lie => "lie",
            AlgebraKind::LeftSymmetric => "left-symmetric",
            AlgebraKind::Associative => "associative",
            AlgebraKind::Dendriform => "dendriform",
            AlgebraKind::LDendriform => "l-dendriform",
            AlgebraKind::Quadri => "quadri",
        }
    }

    /// Parse a kind name.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(AlgebraKind::Raw),
            "lie" => Ok(AlgebraKind::Lie),
            "left-symmetric" => Ok(AlgebraKind::LeftSymmetric),
            "associative" => Ok(AlgebraKind::Associative),
            "dendriform" => Ok(AlgebraKind::Dendriform),
            "l-dendriform" => Ok(AlgebraKind::LDendriform),
            "quadri" => Ok(AlgebraKind::Quadri),
            other => Err(Error::InvalidDefinition(format!("unknown structure kind `{other}`"))),
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A free conformal structure: module + kind + named product tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    module: Arc<FreeModule>,
    reg: Arc<VarRegistry>,
    kind: AlgebraKind,
    ops: BTreeMap<String, LambdaTable>,
}

impl Structure {
    /// Build and validate a structure.
    ///
    /// For every kind except `raw` the op names must be exactly the required
    /// set; `raw` accepts any nonempty collection of identifier-named tables.
    pub fn new(
        kind: AlgebraKind,
        module: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        ops: BTreeMap<String, LambdaTable>,
    ) -> Result<Self> {
        let required = kind.required_ops();
        if kind == AlgebraKind::Raw {
            if ops.is_empty() {
                return Err(Error::InvalidDefinition("a raw structure needs at least one op table".into()));
            }
            for name in ops.keys() {
                if !is_identifier(name) {
                    return Err(Error::InvalidDefinition(format!("`{name}` is not a valid op name")));
                }
            }
        } else {
            for name in required {
                if !ops.contains_key(*name) {
                    return Err(Error::MissingOperation(format!(
                        "kind {kind} requires op `{name}`"
                    )));
                }
            }
            if let Some(extra) = ops.keys().find(|n| !required.contains(&n.as_str())) {
                return Err(Error::InvalidDefinition(format!(
                    "op `{extra}` does not belong to kind {kind}"
                )));
            }
        }
        for table in ops.values() {
            if table.rank() != module.rank() {
                return Err(Error::InvalidDefinition(format!(
                    "table rank {} does not match module rank {}",
                    table.rank(),
                    module.rank()
                )));
            }
        }
        Ok(Structure { module: Arc::clone(module), reg: Arc::clone(reg), kind, ops })
    }

    /// Structure with constant product tables (the "current" construction
    /// over a finite-dimensional algebra with the given structure constants:
    /// `constants[i][j][k]` is the `e_k`-coefficient of `e_i * e_j`).
    pub fn current(
        kind: AlgebraKind,
        module: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        op_constants: BTreeMap<String, Vec<Vec<Vec<Rat>>>>,
    ) -> Result<Self> {
        let rank = module.rank();
        let mut ops = BTreeMap::new();
        for (name, constants) in op_constants {
            let entries = constants
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|cell| cell.into_iter().map(|c| Poly::constant(reg, c)).collect())
                        .collect()
                })
                .collect();
            ops.insert(name, LambdaTable::new(rank, reg, entries)?);
        }
        Structure::new(kind, module, reg, ops)
    }

    /// The underlying module.
    pub fn module(&self) -> &Arc<FreeModule> {
        &self.module
    }

    /// The variable registry.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    /// The declared kind.
    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    /// A named op table.
    pub fn op(&self, name: &str) -> Result<&LambdaTable> {
        self.ops
            .get(name)
            .ok_or_else(|| Error::MissingOperation(name.to_string()))
    }

    /// All op tables in name order.
    pub fn op_tables(&self) -> impl Iterator<Item = (&String, &LambdaTable)> {
        self.ops.iter()
    }

    /// Same structure under a different kind tag (revalidates op names).
    pub fn with_kind(&self, kind: AlgebraKind) -> Result<Structure> {
        Structure::new(kind, &self.module, &self.reg, self.ops.clone())
    }

    /// Basis generator as an element.
    pub fn basis_element(&self, i: usize) -> Element {
        Element::basis(&self.module, &self.reg, i)
    }

    /// Rank of the module.
    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    // -- Product evaluation ------------------------------------------------

    /// Evaluate `a (op)_lv b` by sesquilinearity.
    ///
    /// `lv` must be a lambda variable that is live in neither operand's
    /// coefficients: the left operand's coefficients are evaluated at
    /// `d = -lv`, the right operand's are shifted by `d = d + lv`, and the
    /// table is read at `lm = lv`.  Lambda variables other than `lv` that are
    /// already live in an operand ride along unchanged (the right operand's
    /// shift touches only `d`).  Products at shifted indices such as
    /// `-d - lm` are obtained by evaluating at a scratch lambda variable and
    /// then substituting it on the result.
    pub fn eval_product(&self, op: &str, a: &Element, b: &Element, lv: VarId) -> Result<Element> {
        let table = self.op(op)?;
        if !same_module(&a.module, &self.module) || !same_module(&b.module, &self.module) {
            return Err(Error::ModuleMismatch(
                "operands do not belong to the structure's module".into(),
            ));
        }
        if self.reg.role(lv) != VarRole::Lambda {
            return Err(Error::WrongKind {
                expected: "a lambda variable".into(),
                found: format!("`{}` with role {}", self.reg.name(lv), self.reg.role(lv)),
            });
        }
        if a.contains_var(lv) {
            return Err(Error::LambdaConflict(format!(
                "lambda variable `{}` is already live in the left operand",
                self.reg.name(lv)
            )));
        }
        if b.contains_var(lv) {
            return Err(Error::LambdaConflict(format!(
                "lambda variable `{}` is already live in the right operand",
                self.reg.name(lv)
            )));
        }
        let rank = self.module.rank();
        let mut out = vec![Poly::zero(&self.reg); rank];
        for i in 0..rank {
            let fi = &a.coeffs[i];
            if fi.is_zero() {
                continue;
            }
            let fi_eval = fi.substitute_var(VAR_D, Affine::neg_var(lv))?;
            for j in 0..rank {
                let gj = &b.coeffs[j];
                if gj.is_zero() {
                    continue;
                }
                let gj_shift = gj.substitute_var(VAR_D, Affine::sum(VAR_D, lv))?;
                let fg = fi_eval.mul(&gj_shift);
                for (k, out_k) in out.iter_mut().enumerate() {
                    let p = &table.cell(i, j)[k];
                    if p.is_zero() {
                        continue;
                    }
                    let p_at = if lv == VAR_LM {
                        p.clone()
                    } else {
                        p.substitute_var(VAR_LM, Affine::var(lv))?
                    };
                    *out_k = out_k.add(&fg.mul(&p_at));
                }
            }
        }
        Element::from_coeffs(&self.module, &self.reg, out)
    }

    /// Evaluate the sum of several ops on the same operands.
    pub fn eval_op_sum(&self, ops: &[&str], a: &Element, b: &Element, lv: VarId) -> Result<Element> {
        let mut acc = Element::zero(&self.module, &self.reg);
        for op in ops {
            acc = acc.add(&self.eval_product(op, a, b, lv)?);
        }
        Ok(acc)
    }

    /// Evaluate `e_j (op)_{-d-lm} e_i`-style swapped products: the sum of
    /// `ops` on `(a, b)` at the scratch variable `nu`, with `nu -> -d - lm`
    /// substituted on the result (the `d` in the index is the result's `d`).
    fn eval_swapped(&self, ops: &[&str], a: &Element, b: &Element) -> Result<Element> {
        self.eval_op_sum(ops, a, b, VAR_NU)?
            .substitute_var(VAR_NU, Affine::neg_sum(VAR_D, VAR_LM))
    }

    /// Build a table by evaluating a rule on every basis pair.
    ///
    /// The rule returns the element `e_i (op)_lm e_j`; its coefficients must
    /// use only `d`, `lm`, and parameters.
    fn build_table<F>(&self, mut rule: F) -> Result<LambdaTable>
    where
        F: FnMut(usize, usize) -> Result<Element>,
    {
        let rank = self.module.rank();
        let mut entries = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut row = Vec::with_capacity(rank);
            for j in 0..rank {
                row.push(rule(i, j)?.coeffs);
            }
            entries.push(row);
        }
        LambdaTable::new(rank, &self.reg, entries)
    }
}

// ---------------------------------------------------------------------------
// Axiom checking
// ---------------------------------------------------------------------------

/// A reported law violation: which law, at which basis tuple, with what
/// nonzero residual (as basis-name / coefficient pairs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom_id: String,
    pub witness: Vec<usize>,
    pub witness_names: Vec<String>,
    pub residual: Vec<(String, Poly)>,
}

/// Outcome of an axiom or identity check.
///
/// `verdict` is true exactly when no law failed; on failure, `failure` holds
/// the first violation in canonical order: witness tuples ordered
/// lexicographically (a pair precedes the triples extending it), ties broken
/// by the laws' declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: bool,
    pub axioms_checked: Vec<String>,
    pub failure: Option<Violation>,
}

impl CheckReport {
    /// A passing report over the given law ids.
    pub fn pass(axioms: Vec<String>) -> Self {
        CheckReport { verdict: true, axioms_checked: axioms, failure: None }
    }

    /// A failing report.
    pub fn fail(axioms: Vec<String>, violation: Violation) -> Self {
        CheckReport { verdict: false, axioms_checked: axioms, failure: Some(violation) }
    }
}

enum AxiomArity {
    Pair,
    Triple,
}

struct AxiomSpec {
    id: &'static str,
    arity: AxiomArity,
}

fn axioms_for(kind: AlgebraKind) -> Vec<AxiomSpec> {
    use AxiomArity::*;
    match kind {
        AlgebraKind::Raw => Vec::new(),
        AlgebraKind::Lie => vec![
            AxiomSpec { id: "skew_symmetry", arity: Pair },
            AxiomSpec { id: "jacobi", arity: Triple },
        ],
        AlgebraKind::LeftSymmetric => vec![AxiomSpec { id: "left_symmetric", arity: Triple }],
        AlgebraKind::Associative => vec![AxiomSpec { id: "associativity", arity: Triple }],
        AlgebraKind::Dendriform => vec![
            AxiomSpec { id: "dendriform_1", arity: Triple },
            AxiomSpec { id: "dendriform_2", arity: Triple },
            AxiomSpec { id: "dendriform_3", arity: Triple },
        ],
        AlgebraKind::LDendriform => vec![
            AxiomSpec { id: "l_dendriform_1", arity: Triple },
            AxiomSpec { id: "l_dendriform_2", arity: Triple },
        ],
        AlgebraKind::Quadri => vec![
            AxiomSpec { id: "quadri_r1c1", arity: Triple },
            AxiomSpec { id: "quadri_r1c2", arity: Triple },
            AxiomSpec { id: "quadri_r1c3", arity: Triple },
            AxiomSpec { id: "quadri_r2c1", arity: Triple },
            AxiomSpec { id: "quadri_r2c2", arity: Triple },
            AxiomSpec { id: "quadri_r2c3", arity: Triple },
            AxiomSpec { id: "quadri_r3c1", arity: Triple },
            AxiomSpec { id: "quadri_r3c2", arity: Triple },
            AxiomSpec { id: "quadri_r3c3", arity: Triple },
        ],
    }
}

/// Combined quadri products used inside the quadri laws.
const QUADRI_STAR: [&str; 4] = [OP_NW, OP_SW, OP_NE, OP_SE];
/// `succ = ne + se` (the east half).
const QUADRI_SUCC: [&str; 2] = [OP_NE, OP_SE];
/// `prec = nw + sw` (the west half).
const QUADRI_PREC: [&str; 2] = [OP_NW, OP_SW];
/// `vee = sw + se` (the south half).
const QUADRI_VEE: [&str; 2] = [OP_SW, OP_SE];
/// `wedge = nw + ne` (the north half).
const QUADRI_WEDGE: [&str; 2] = [OP_NW, OP_NE];

impl Structure {
    /// Check every defining law of the declared kind on basis generators.
    ///
    /// Laws are expanded with the symbolic lambda variables `lm` (first
    /// argument) and `mu` (second argument); inner products at `lm + mu` or
    /// `-d - lm` are reached through the scratch variable `nu`.  Since every
    /// law is sesquilinear in each argument, basis verification implies the
    /// law for all elements.
    ///
    /// The first violation in canonical order is reported: witness tuples in
    /// lexicographic order — the pair `(p, q)` preceding the triples
    /// `(p, q, r)` — with ties broken by law declaration order.
    pub fn check_axioms(&self) -> Result<CheckReport> {
        if self.kind == AlgebraKind::Raw {
            return Err(Error::WrongKind {
                expected: "a structure with a declared law set".into(),
                found: "kind raw".into(),
            });
        }
        let axioms = axioms_for(self.kind);
        let ids: Vec<String> = axioms.iter().map(|a| a.id.to_string()).collect();
        let rank = self.module.rank();
        for p in 0..rank {
            for q in 0..rank {
                for ax in axioms.iter().filter(|a| matches!(a.arity, AxiomArity::Pair)) {
                    let res = self.pair_residual(ax.id, p, q)?;
                    if !res.is_zero() {
                        return Ok(CheckReport::fail(ids, self.violation(ax.id, vec![p, q], res)));
                    }
                }
                for r in 0..rank {
                    for ax in axioms.iter().filter(|a| matches!(a.arity, AxiomArity::Triple)) {
                        let res = self.triple_residual(ax.id, p, q, r)?;
                        if !res.is_zero() {
                            return Ok(CheckReport::fail(
                                ids,
                                self.violation(ax.id, vec![p, q, r], res),
                            ));
                        }
                    }
                }
            }
        }
        Ok(CheckReport::pass(ids))
    }

    fn violation(&self, id: &str, witness: Vec<usize>, residual: Element) -> Violation {
        Violation {
            axiom_id: id.to_string(),
            witness_names: witness.iter().map(|&i| self.module.name(i).to_string()).collect(),
            witness,
            residual: residual.nonzero_entries(),
        }
    }

    /// Residual of a two-argument law at `(e_p, e_q)`.
    pub fn pair_residual(&self, id: &str, p: usize, q: usize) -> Result<Element> {
        let a = self.basis_element(p);
        let b = self.basis_element(q);
        match id {
            // [a_lm b] + [b_{-d-lm} a] = 0
            "skew_symmetry" => {
                let direct = self.eval_product(OP_BRACKET, &a, &b, VAR_LM)?;
                let swapped = self.eval_swapped(&[OP_BRACKET], &b, &a)?;
                Ok(direct.add(&swapped))
            }
            other => Err(Error::InvalidDefinition(format!("unknown pair law `{other}`"))),
        }
    }

    /// Residual of a three-argument law at `(e_p, e_q, e_r)`, as
    /// left-hand side minus right-hand side with arguments `a, b, c` indexed
    /// by `lm`, `mu`, and the composite `lm + mu`.
    pub fn triple_residual(&self, id: &str, p: usize, q: usize, r: usize) -> Result<Element> {
        let a = self.basis_element(p);
        let b = self.basis_element(q);
        let c = self.basis_element(r);
        let sub_outer = |el: Element| -> Result<Element> {
            el.substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))
        };
        // Shorthands for the nested evaluations.
        let ev = |op: &str, x: &Element, y: &Element, lv: VarId| self.eval_product(op, x, y, lv);
        let evs = |ops: &[&str], x: &Element, y: &Element, lv: VarId| self.eval_op_sum(ops, x, y, lv);
        match id {
            // [a_lm [b_mu c]] - [[a_lm b]_{lm+mu} c] - [b_mu [a_lm c]]
            "jacobi" => {
                let t1 = ev(OP_BRACKET, &a, &ev(OP_BRACKET, &b, &c, VAR_MU)?, VAR_LM)?;
                let t2 = sub_outer(ev(OP_BRACKET, &ev(OP_BRACKET, &a, &b, VAR_LM)?, &c, VAR_NU)?)?;
                let t3 = ev(OP_BRACKET, &b, &ev(OP_BRACKET, &a, &c, VAR_LM)?, VAR_MU)?;
                Ok(t1.sub(&t2).sub(&t3))
            }
            // (a o b) o c - a o (b o c), symmetrized in (a, b):
            // the associator difference must vanish.
            "left_symmetric" => {
                let x1 = sub_outer(ev(OP_CIRC, &ev(OP_CIRC, &a, &b, VAR_LM)?, &c, VAR_NU)?)?;
                let x2 = ev(OP_CIRC, &a, &ev(OP_CIRC, &b, &c, VAR_MU)?, VAR_LM)?;
                let x3 = sub_outer(ev(OP_CIRC, &ev(OP_CIRC, &b, &a, VAR_MU)?, &c, VAR_NU)?)?;
                let x4 = ev(OP_CIRC, &b, &ev(OP_CIRC, &a, &c, VAR_LM)?, VAR_MU)?;
                Ok(x1.sub(&x2).sub(&x3).add(&x4))
            }
            // (a o b) o c - a o (b o c)
            "associativity" => {
                let x1 = sub_outer(ev(OP_CIRC, &ev(OP_CIRC, &a, &b, VAR_LM)?, &c, VAR_NU)?)?;
                let x2 = ev(OP_CIRC, &a, &ev(OP_CIRC, &b, &c, VAR_MU)?, VAR_LM)?;
                Ok(x1.sub(&x2))
            }
            // a succ (b succ c) = (a succ b + a prec b) succ c
            "dendriform_1" => {
                let lhs = ev(OP_SUCC, &a, &ev(OP_SUCC, &b, &c, VAR_MU)?, VAR_LM)?;
                let inner = evs(&[OP_SUCC, OP_PREC], &a, &b, VAR_LM)?;
                let rhs = sub_outer(ev(OP_SUCC, &inner, &c, VAR_NU)?)?;
                Ok(lhs.sub(&rhs))
            }
            // (a prec b) prec c = a prec (b succ c + b prec c)
            "dendriform_2" => {
                let lhs = sub_outer(ev(OP_PREC, &ev(OP_PREC, &a, &b, VAR_LM)?, &c, VAR_NU)?)?;
                let rhs = ev(OP_PREC, &a, &evs(&[OP_SUCC, OP_PREC], &b, &c, VAR_MU)?, VAR_LM)?;
                Ok(lhs.sub(&rhs))
            }
            // (a succ b) prec c = a succ (b prec c)
            "dendriform_3" => {
                let lhs = sub_outer(ev(OP_PREC, &ev(OP_SUCC, &a, &b, VAR_LM)?, &c, VAR_NU)?)?;
                let rhs = ev(OP_SUCC, &a, &ev(OP_PREC, &b, &c, VAR_MU)?, VAR_LM)?;
                Ok(lhs.sub(&rhs))
            }
            // a R (b R c) = ((a R b) + (a L b)) R c + b R (a R c)
            //             - ((b R a) + (b L a)) R c,  with R = tri_r, L = tri_l
            "l_dendriform_1" => {
                let t1 = ev(OP_TRI_R, &a, &ev(OP_TRI_R, &b, &c, VAR_MU)?, VAR_LM)?;
                let ab = evs(&[OP_TRI_R, OP_TRI_L], &a, &b, VAR_LM)?;
                let t2 = sub_outer(ev(OP_TRI_R, &ab, &c, VAR_NU)?)?;
                let t3 = ev(OP_TRI_R, &b, &ev(OP_TRI_R, &a, &c, VAR_LM)?, VAR_MU)?;
                let ba = evs(&[OP_TRI_R, OP_TRI_L], &b, &a, VAR_MU)?;
                let t4 = sub_outer(ev(OP_TRI_R, &ba, &c, VAR_NU)?)?;
                Ok(t1.sub(&t2).sub(&t3).add(&t4))
            }
            // a R (b L c) = (a R b) L c + b L (a R c) + b L (a L c)
            //             - (b L a) L c
            "l_dendriform_2" => {
                let t1 = ev(OP_TRI_R, &a, &ev(OP_TRI_L, &b, &c, VAR_MU)?, VAR_LM)?;
                let t2 = sub_outer(ev(OP_TRI_L, &ev(OP_TRI_R, &a, &b, VAR_LM)?, &c, VAR_NU)?)?;
                let t3 = ev(OP_TRI_L, &b, &ev(OP_TRI_R, &a, &c, VAR_LM)?, VAR_MU)?;
                let t4 = ev(OP_TRI_L, &b, &ev(OP_TRI_L, &a, &c, VAR_LM)?, VAR_MU)?;
                let t5 = sub_outer(ev(OP_TRI_L, &ev(OP_TRI_L, &b, &a, VAR_MU)?, &c, VAR_NU)?)?;
                Ok(t1.sub(&t2).sub(&t3).sub(&t4).add(&t5))
            }
            // The nine quadri laws, positioned (row, column) in a 3 x 3 grid.
            "quadri_r1c1" => self.quadri_residual(&a, &b, &c, OP_NW, &[OP_NW], OP_NW, &QUADRI_STAR),
            "quadri_r1c2" => self.quadri_residual(&a, &b, &c, OP_NW, &[OP_NE], OP_NE, &QUADRI_PREC),
            "quadri_r1c3" => self.quadri_residual(&a, &b, &c, OP_NE, &QUADRI_WEDGE, OP_NE, &QUADRI_SUCC),
            "quadri_r2c1" => self.quadri_residual(&a, &b, &c, OP_NW, &[OP_SW], OP_SW, &QUADRI_WEDGE),
            "quadri_r2c2" => self.quadri_residual(&a, &b, &c, OP_NE, &QUADRI_VEE, OP_SE, &[OP_NE]),
            "quadri_r2c3" => self.quadri_residual(&a, &b, &c, OP_NW, &[OP_SE], OP_SE, &[OP_NW]),
            "quadri_r3c1" => self.quadri_residual(&a, &b, &c, OP_SW, &QUADRI_PREC, OP_SW, &QUADRI_VEE),
            "quadri_r3c2" => self.quadri_residual(&a, &b, &c, OP_SE, &QUADRI_STAR, OP_SE, &[OP_SE]),
            "quadri_r3c3" => self.quadri_residual(&a, &b, &c, OP_SW, &QUADRI_SUCC, OP_SE, &[OP_SW]),
            other => Err(Error::InvalidDefinition(format!("unknown triple law `{other}`"))),
        }
    }

    /// Residual of `(a inner_lm b) outer_{lm+mu} c - a rhs_outer_lm (b rhs_inner_mu c)`.
    fn quadri_residual(
        &self,
        a: &Element,
        b: &Element,
        c: &Element,
        outer: &str,
        inner: &[&str],
        rhs_outer: &str,
        rhs_inner: &[&str],
    ) -> Result<Element> {
        let ab = self.eval_op_sum(inner, a, b, VAR_LM)?;
        let lhs = self
            .eval_product(outer, &ab, c, VAR_NU)?
            .substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))?;
        let bc = self.eval_op_sum(rhs_inner, b, c, VAR_MU)?;
        let rhs = self.eval_product(rhs_outer, a, &bc, VAR_LM)?;
        Ok(lhs.sub(&rhs))
    }
}

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

/// Structure-to-structure conversions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conversion {
    /// Left-symmetric or associative product to its commutator bracket
    /// `[a_lm b] = a o_lm b - b o_{-d-lm} a`.
    Commutator,
    /// The bracket every species above induces: for one-product kinds the
    /// commutator; for split kinds the commutator of the summed product.
    SubAdjacentLie,
    /// Sum of the two split products: L-dendriform to left-symmetric,
    /// dendriform to associative.
    Horizontal,
    /// Twisted difference `a tri_r b - b tri_l_{-d-lm} a` (and the
    /// dendriform analogue `a succ b - b prec_{-d-lm} a`), giving a
    /// left-symmetric product.
    Vertical,
    /// L-dendriform transpose: keep `tri_r`, replace `tri_l` by its swap.
    Transpose,
    /// View a dendriform structure as L-dendriform (identity on tables).
    DendToLDend,
    /// Quadri to dendriform via the east/west halves (`succ = ne + se`,
    /// `prec = nw + sw`).
    QuadriSuccPrec,
    /// Quadri to dendriform via the south/north halves (`succ = sw + se`,
    /// `prec = nw + ne`).
    QuadriVeeWedge,
    /// Quadri to associative via the total product (sum of all four).
    QuadriStar,
    /// Quadri to L-dendriform: `a tri_r b = a se b - b nw_{-d-lm} a`,
    /// `a tri_l b = a ne b - b sw_{-d-lm} a`.
    QuadriToLDend,
}

impl Conversion {
    /// Stable kebab-case name.
    pub fn name(self) -> &'static str {
        match self {
            Conversion::Commutator => "commutator",
            Conversion::SubAdjacentLie => "sub-adjacent-lie",
            Conversion::Horizontal => "horizontal",
            Conversion::Vertical => "vertical",
            Conversion::Transpose => "transpose",
            Conversion::DendToLDend => "dend-to-ldend",
            Conversion::QuadriSuccPrec => "quadri-succ-prec",
            Conversion::QuadriVeeWedge => "quadri-vee-wedge",
            Conversion::QuadriStar => "quadri-star",
            Conversion::QuadriToLDend => "quadri-to-ldend",
        }
    }

    /// Parse a conversion name.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "commutator" => Conversion::Commutator,
            "sub-adjacent-lie" => Conversion::SubAdjacentLie,
            "horizontal" => Conversion::Horizontal,
            "vertical" => Conversion::Vertical,
            "transpose" => Conversion::Transpose,
            "dend-to-ldend" => Conversion::DendToLDend,
            "quadri-succ-prec" => Conversion::QuadriSuccPrec,
            "quadri-vee-wedge" => Conversion::QuadriVeeWedge,
            "quadri-star" => Conversion::QuadriStar,
            "quadri-to-ldend" => Conversion::QuadriToLDend,
            other => {
                return Err(Error::InvalidDefinition(format!("unknown conversion `{other}`")))
            }
        })
    }
}

impl Structure {
    /// The commutator bracket of a one-product structure.
    pub fn commutator_lie(&self) -> Result<Structure> {
        match self.kind {
            AlgebraKind::LeftSymmetric | AlgebraKind::Associative => {}
            other => {
                return Err(Error::WrongKind {
                    expected: "left-symmetric or associative".into(),
                    found: other.name().into(),
                })
            }
        }
        let bracket = self.build_table(|i, j| {
            let a = self.basis_element(i);
            let b = self.basis_element(j);
            let direct = self.eval_product(OP_CIRC, &a, &b, VAR_LM)?;
            let swapped = self.eval_swapped(&[OP_CIRC], &b, &a)?;
            Ok(direct.sub(&swapped))
        })?;
        let mut ops = BTreeMap::new();
        ops.insert(OP_BRACKET.to_string(), bracket);
        Structure::new(AlgebraKind::Lie, &self.module, &self.reg, ops)
    }

    /// The L-dendriform transpose: `tri_r` unchanged,
    /// `a tri_l^t_lm b = -(b tri_l_{-d-lm} a)`.  Involutive on tables.
    pub fn transpose_l_dendriform(&self) -> Result<Structure> {
        if self.kind != AlgebraKind::LDendriform {
            return Err(Error::WrongKind {
                expected: "l-dendriform".into(),
                found: self.kind.name().into(),
            });
        }
        let tri_l = self.build_table(|i, j| {
            let a = self.basis_element(i);
            let b = self.basis_element(j);
            Ok(self.eval_swapped(&[OP_TRI_L], &b, &a)?.neg())
        })?;
        let mut ops = BTreeMap::new();
        ops.insert(OP_TRI_R.to_string(), self.op(OP_TRI_R)?.clone());
        ops.insert(OP_TRI_L.to_string(), tri_l);
        Structure::new(AlgebraKind::LDendriform, &self.module, &self.reg, ops)
    }

    /// Apply a conversion; the result is returned unverified (conversions are
    /// also used to build deliberate counterexamples — callers re-check).
    pub fn derive_structure(&self, which: Conversion) -> Result<Structure> {
        let wrong = |expected: &str| Error::WrongKind {
            expected: expected.into(),
            found: self.kind.name().into(),
        };
        match which {
            Conversion::Commutator => self.commutator_lie(),
            Conversion::SubAdjacentLie => match self.kind {
                AlgebraKind::LeftSymmetric | AlgebraKind::Associative => self.commutator_lie(),
                AlgebraKind::LDendriform => {
                    self.sum_and_commutate(&[OP_TRI_R, OP_TRI_L])
                }
                AlgebraKind::Dendriform => self.sum_and_commutate(&[OP_SUCC, OP_PREC]),
                AlgebraKind::Quadri => self.sum_and_commutate(&QUADRI_STAR),
                _ => Err(wrong("a structure with a product to commutate")),
            },
            Conversion::Horizontal => match self.kind {
                AlgebraKind::LDendriform => self.summed_product(
                    &[OP_TRI_R, OP_TRI_L],
                    AlgebraKind::LeftSymmetric,
                ),
                AlgebraKind::Dendriform => {
                    self.summed_product(&[OP_SUCC, OP_PREC], AlgebraKind::Associative)
                }
                _ => Err(wrong("l-dendriform or dendriform")),
            },
            Conversion::Vertical => match self.kind {
                AlgebraKind::LDendriform => self.vertical_product(OP_TRI_R, OP_TRI_L),
                AlgebraKind::Dendriform => self.vertical_product(OP_SUCC, OP_PREC),
                _ => Err(wrong("l-dendriform or dendriform")),
            },
            Conversion::Transpose => self.transpose_l_dendriform(),
            Conversion::DendToLDend => {
                if self.kind != AlgebraKind::Dendriform {
                    return Err(wrong("dendriform"));
                }
                let mut ops = BTreeMap::new();
                ops.insert(OP_TRI_R.to_string(), self.op(OP_SUCC)?.clone());
                ops.insert(OP_TRI_L.to_string(), self.op(OP_PREC)?.clone());
                Structure::new(AlgebraKind::LDendriform, &self.module, &self.reg, ops)
            }
            Conversion::QuadriSuccPrec => self.quadri_pair(&QUADRI_SUCC, &QUADRI_PREC),
            Conversion::QuadriVeeWedge => self.quadri_pair(&QUADRI_VEE, &QUADRI_WEDGE),
            Conversion::QuadriStar => {
                if self.kind != AlgebraKind::Quadri {
                    return Err(wrong("quadri"));
                }
                self.summed_product(&QUADRI_STAR, AlgebraKind::Associative)
            }
            Conversion::QuadriToLDend => {
                if self.kind != AlgebraKind::Quadri {
                    return Err(wrong("quadri"));
                }
                let tri_r = self.build_table(|i, j| {
                    let a = self.basis_element(i);
                    let b = self.basis_element(j);
                    let direct = self.eval_product(OP_SE, &a, &b, VAR_LM)?;
                    let swapped = self.eval_swapped(&[OP_NW], &b, &a)?;
                    Ok(direct.sub(&swapped))
                })?;
                let tri_l = self.build_table(|i, j| {
                    let a = self.basis_element(i);
                    let b = self.basis_element(j);
                    let direct = self.eval_product(OP_NE, &a, &b, VAR_LM)?;
                    let swapped = self.eval_swapped(&[OP_SW], &b, &a)?;
                    Ok(direct.sub(&swapped))
                })?;
                let mut ops = BTreeMap::new();
                ops.insert(OP_TRI_R.to_string(), tri_r);
                ops.insert(OP_TRI_L.to_string(), tri_l);
                Structure::new(AlgebraKind::LDendriform, &self.module, &self.reg, ops)
            }
        }
    }

    /// Sum the given ops into a single product of the stated kind.
    fn summed_product(&self, parts: &[&str], kind: AlgebraKind) -> Result<Structure> {
        let table = self.build_table(|i, j| {
            let a = self.basis_element(i);
            let b = self.basis_element(j);
            self.eval_op_sum(parts, &a, &b, VAR_LM)
        })?;
        let mut ops = BTreeMap::new();
        ops.insert(OP_CIRC.to_string(), table);
        Structure::new(kind, &self.module, &self.reg, ops)
    }

    /// `a o b = sum(parts)(a, b) - sum(parts)(b, a)` at the swapped index;
    /// the bracket of the summed product.
    fn sum_and_commutate(&self, parts: &[&str]) -> Result<Structure> {
        let bracket = self.build_table(|i, j| {
            let a = self.basis_element(i);
            let b = self.basis_element(j);
            let direct = self.eval_op_sum(parts, &a, &b, VAR_LM)?;
            let swapped = self.eval_swapped(parts, &b, &a)?;
            Ok(direct.sub(&swapped))
        })?;
        let mut ops = BTreeMap::new();
        ops.insert(OP_BRACKET.to_string(), bracket);
        Structure::new(AlgebraKind::Lie, &self.module, &self.reg, ops)
    }

    /// `a o b = a main_lm b - b side_{-d-lm} a`, a left-symmetric product.
    fn vertical_product(&self, main: &str, side: &str) -> Result<Structure> {
        let table = self.build_table(|i, j| {
            let a = self.basis_element(i);
            let b = self.basis_element(j);
            let direct = self.eval_product(main, &a, &b, VAR_LM)?;
            let swapped = self.eval_swapped(&[side], &b, &a)?;
            Ok(direct.sub(&swapped))
        })?;
        let mut ops = BTreeMap::new();
        ops.insert(OP_CIRC.to_string(), table);
        Structure::new(AlgebraKind::LeftSymmetric, &self.module, &self.reg, ops)
    }

    /// Quadri to dendriform with `succ = sum(s)`, `prec = sum(p)`.
    fn quadri_pair(&self, s: &[&str], p: &[&str]) -> Result<Structure> {
        if self.kind != AlgebraKind::Quadri {
            return Err(Error::WrongKind {
                expected: "quadri".into(),
                found: self.kind.name().into(),
            });
        }
        let succ = self.build_table(|i, j| {
            let a = self.basis_element(i);
            let b = self.basis_element(j);
            self.eval_op_sum(s, &a, &b, VAR_LM)
        })?;
        let prec = self.build_table(|i, j| {
            let a = self.basis_element(i);
            let b = self.basis_element(j);
            self.eval_op_sum(p, &a, &b, VAR_LM)
        })?;
        let mut ops = BTreeMap::new();
        ops.insert(OP_SUCC.to_string(), succ);
        ops.insert(OP_PREC.to_string(), prec);
        Structure::new(AlgebraKind::Dendriform, &self.module, &self.reg, ops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_poly, rat_int};

    fn table_from_strs(
        rank: usize,
        reg: &Arc<VarRegistry>,
        entries: &[&[&[&str]]],
    ) -> LambdaTable {
        let built: Vec<Vec<Vec<Poly>>> = entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| cell.iter().map(|s| parse_poly(reg, s).unwrap()).collect())
                    .collect()
            })
            .collect();
        LambdaTable::new(rank, reg, built).unwrap()
    }

    /// Rank-1 structure `a o_lm a = (lm + d + c) a` with symbolic `c`.
    fn vir() -> Structure {
        let reg = VarRegistry::new(&["c"]).unwrap();
        let module = FreeModule::new(vec!["a"]).unwrap();
        let table = table_from_strs(1, &reg, &[&[&["lm + d + c"]]]);
        let mut ops = BTreeMap::new();
        ops.insert(OP_CIRC.to_string(), table);
        Structure::new(AlgebraKind::LeftSymmetric, &module, &reg, ops).unwrap()
    }

    /// Rank-2 structure `L o_lm L = g(-lm) lm W` with `g(x) = g0 + g1 x`.
    fn lw() -> Structure {
        let reg = VarRegistry::new(&["g0", "g1"]).unwrap();
        let module = FreeModule::new(vec!["L", "W"]).unwrap();
        let table = table_from_strs(
            2,
            &reg,
            &[
                &[&["0", "(g0 - g1*lm)*lm"], &["0", "0"]],
                &[&["0", "0"], &["0", "0"]],
            ],
        );
        let mut ops = BTreeMap::new();
        ops.insert(OP_CIRC.to_string(), table);
        Structure::new(AlgebraKind::LeftSymmetric, &module, &reg, ops).unwrap()
    }

    #[test]
    fn eval_product_basis_case() {
        let s = vir();
        let reg = s.registry().clone();
        let a = s.basis_element(0);
        let out = s.eval_product(OP_CIRC, &a, &a, VAR_LM).unwrap();
        assert_eq!(out.coeff(0), &parse_poly(&reg, "lm + d + c").unwrap());
    }

    #[test]
    fn eval_product_left_derivation() {
        // (d a) o_lm a = -lm (lm + d + c) a.
        let s = vir();
        let reg = s.registry().clone();
        let a = s.basis_element(0);
        let da = a.apply_derivation();
        let out = s.eval_product(OP_CIRC, &da, &a, VAR_LM).unwrap();
        assert_eq!(out.coeff(0), &parse_poly(&reg, "-lm*(lm + d + c)").unwrap());
    }

    #[test]
    fn eval_product_right_derivation() {
        // a o_lm (d a) = (d + lm)(lm + d + c) a.
        let s = vir();
        let reg = s.registry().clone();
        let a = s.basis_element(0);
        let da = a.apply_derivation();
        let out = s.eval_product(OP_CIRC, &a, &da, VAR_LM).unwrap();
        assert_eq!(out.coeff(0), &parse_poly(&reg, "(d + lm)*(lm + d + c)").unwrap());
    }

    #[test]
    fn eval_product_rejects_live_lambda() {
        let s = vir();
        let a = s.basis_element(0);
        let live = a.scale_poly(&Poly::var(s.registry(), VAR_LM));
        assert!(s.eval_product(OP_CIRC, &live, &a, VAR_LM).is_err());
        assert!(s.eval_product(OP_CIRC, &a, &live, VAR_LM).is_err());
        // A different lambda variable is fine and rides along.
        let out = s.eval_product(OP_CIRC, &live, &a, VAR_MU).unwrap();
        assert!(out.coeff(0).contains_var(VAR_LM));
    }

    #[test]
    fn lw_products_match_display() {
        let s = lw();
        let reg = s.registry().clone();
        let l = s.basis_element(0);
        let w = s.basis_element(1);
        let ll = s.eval_product(OP_CIRC, &l, &l, VAR_LM).unwrap();
        assert!(ll.coeff(0).is_zero());
        assert_eq!(ll.coeff(1), &parse_poly(&reg, "(g0 - g1*lm)*lm").unwrap());
        assert!(s.eval_product(OP_CIRC, &l, &w, VAR_LM).unwrap().is_zero());
        assert!(s.eval_product(OP_CIRC, &w, &l, VAR_LM).unwrap().is_zero());
        assert!(s.eval_product(OP_CIRC, &w, &w, VAR_LM).unwrap().is_zero());
    }

    #[test]
    fn vir_passes_left_symmetric() {
        let report = vir().check_axioms().unwrap();
        assert!(report.verdict, "failure: {:?}", report.failure);
    }

    #[test]
    fn lw_passes_left_symmetric() {
        let report = lw().check_axioms().unwrap();
        assert!(report.verdict, "failure: {:?}", report.failure);
    }

    #[test]
    fn vir_commutator_is_shift_plus_two_lambda() {
        let s = vir();
        let reg = s.registry().clone();
        let lie = s.commutator_lie().unwrap();
        assert_eq!(lie.kind(), AlgebraKind::Lie);
        assert_eq!(
            lie.op(OP_BRACKET).unwrap().cell(0, 0)[0],
            parse_poly(&reg, "d + 2*lm").unwrap()
        );
        assert!(lie.check_axioms().unwrap().verdict);
    }

    #[test]
    fn lw_commutator_matches_formula() {
        let s = lw();
        let reg = s.registry().clone();
        let lie = s.commutator_lie().unwrap();
        // [L_lm L] = (g(-lm) lm + (d + lm) g(d + lm)) W.
        let expected =
            parse_poly(&reg, "(g0 - g1*lm)*lm + (d + lm)*(g0 + g1*(d + lm))").unwrap();
        let cell = lie.op(OP_BRACKET).unwrap().cell(0, 0);
        assert!(cell[0].is_zero());
        assert_eq!(cell[1], expected);
        assert!(lie.check_axioms().unwrap().verdict);
    }

    #[test]
    fn zero_structure_passes_every_kind() {
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["x", "y"]).unwrap();
        for kind in [
            AlgebraKind::Lie,
            AlgebraKind::LeftSymmetric,
            AlgebraKind::Associative,
            AlgebraKind::Dendriform,
            AlgebraKind::LDendriform,
            AlgebraKind::Quadri,
        ] {
            let mut ops = BTreeMap::new();
            for name in kind.required_ops() {
                ops.insert(name.to_string(), LambdaTable::zero(2, &reg));
            }
            let s = Structure::new(kind, &module, &reg, ops).unwrap();
            assert!(s.check_axioms().unwrap().verdict, "zero structure failed {kind}");
        }
    }

    #[test]
    fn bad_current_structure_fails_with_canonical_witness() {
        // Two-dimensional product e1 * e2 = e1, all other products zero.
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["e1", "e2"]).unwrap();
        let mut constants = vec![vec![vec![Rat::from(num_bigint::BigInt::from(0)); 2]; 2]; 2];
        constants[0][1][0] = rat_int(1);
        let mut op_constants = BTreeMap::new();
        op_constants.insert(OP_CIRC.to_string(), constants);
        let s =
            Structure::current(AlgebraKind::LeftSymmetric, &module, &reg, op_constants).unwrap();
        let report = s.check_axioms().unwrap();
        assert!(!report.verdict);
        let v = report.failure.unwrap();
        assert_eq!(v.axiom_id, "left_symmetric");
        assert_eq!(v.witness, vec![0, 1, 1]);
        assert_eq!(v.residual.len(), 1);
        assert_eq!(v.residual[0].0, "e1");
        assert_eq!(v.residual[0].1, Poly::one(&reg));
    }

    #[test]
    fn current_of_unital_idempotent_is_associative_and_left_symmetric() {
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["e"]).unwrap();
        let constants = vec![vec![vec![rat_int(1)]]];
        let mut op_constants = BTreeMap::new();
        op_constants.insert(OP_CIRC.to_string(), constants.clone());
        let assoc =
            Structure::current(AlgebraKind::Associative, &module, &reg, op_constants.clone())
                .unwrap();
        assert!(assoc.check_axioms().unwrap().verdict);
        let ls =
            Structure::current(AlgebraKind::LeftSymmetric, &module, &reg, op_constants).unwrap();
        assert!(ls.check_axioms().unwrap().verdict);
    }

    #[test]
    fn raw_kind_is_uncheckable_but_constructible() {
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["x"]).unwrap();
        let mut ops = BTreeMap::new();
        ops.insert("anything".to_string(), LambdaTable::zero(1, &reg));
        let s = Structure::new(AlgebraKind::Raw, &module, &reg, ops).unwrap();
        assert!(s.check_axioms().is_err());
    }

    #[test]
    fn transpose_is_involutive_and_swaps_horizontal_with_vertical() {
        // L-dendriform from the dendriform structure e succ e = e.
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["e"]).unwrap();
        let mut ops = BTreeMap::new();
        ops.insert(OP_SUCC.to_string(), table_from_strs(1, &reg, &[&[&["1"]]]));
        ops.insert(OP_PREC.to_string(), LambdaTable::zero(1, &reg));
        let dend = Structure::new(AlgebraKind::Dendriform, &module, &reg, ops).unwrap();
        assert!(dend.check_axioms().unwrap().verdict);
        let ld = dend.derive_structure(Conversion::DendToLDend).unwrap();
        assert!(ld.check_axioms().unwrap().verdict);

        let t = ld.transpose_l_dendriform().unwrap();
        assert!(t.check_axioms().unwrap().verdict);
        let tt = t.transpose_l_dendriform().unwrap();
        assert_eq!(tt, ld);

        let hor_t = t.derive_structure(Conversion::Horizontal).unwrap();
        let ver = ld.derive_structure(Conversion::Vertical).unwrap();
        assert_eq!(hor_t.op(OP_CIRC).unwrap(), ver.op(OP_CIRC).unwrap());
        let ver_t = t.derive_structure(Conversion::Vertical).unwrap();
        let hor = ld.derive_structure(Conversion::Horizontal).unwrap();
        assert_eq!(ver_t.op(OP_CIRC).unwrap(), hor.op(OP_CIRC).unwrap());
    }

    #[test]
    fn only_ne_quadri_satisfies_all_nine_laws() {
        // Four products with only `ne` nonzero, `ne` the current product of
        // the one-dimensional idempotent algebra.  This configuration
        // separates the two possible conventions for the combined east/west
        // products: it passes with `succ = ne + se`, `prec = nw + sw`.
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["e"]).unwrap();
        let mut ops = BTreeMap::new();
        ops.insert(OP_NE.to_string(), table_from_strs(1, &reg, &[&[&["1"]]]));
        for name in [OP_NW, OP_SW, OP_SE] {
            ops.insert(name.to_string(), LambdaTable::zero(1, &reg));
        }
        let q = Structure::new(AlgebraKind::Quadri, &module, &reg, ops).unwrap();
        let report = q.check_axioms().unwrap();
        assert!(report.verdict, "failure: {:?}", report.failure);

        // Both dendriform reductions and the associative total pass.
        for conv in [
            Conversion::QuadriSuccPrec,
            Conversion::QuadriVeeWedge,
            Conversion::QuadriStar,
            Conversion::QuadriToLDend,
        ] {
            let derived = q.derive_structure(conv).unwrap();
            let report = derived.check_axioms().unwrap();
            assert!(report.verdict, "{} failed: {:?}", conv.name(), report.failure);
        }
    }

    #[test]
    fn only_se_quadri_maps_to_ldend_with_trivial_tri_l() {
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["e"]).unwrap();
        let mut ops = BTreeMap::new();
        ops.insert(OP_SE.to_string(), table_from_strs(1, &reg, &[&[&["1"]]]));
        for name in [OP_NW, OP_SW, OP_NE] {
            ops.insert(name.to_string(), LambdaTable::zero(1, &reg));
        }
        let q = Structure::new(AlgebraKind::Quadri, &module, &reg, ops).unwrap();
        assert!(q.check_axioms().unwrap().verdict);
        let ld = q.derive_structure(Conversion::QuadriToLDend).unwrap();
        assert_eq!(ld.op(OP_TRI_R).unwrap(), q.op(OP_SE).unwrap());
        assert!(ld.op(OP_TRI_L).unwrap().is_zero());
        assert!(ld.check_axioms().unwrap().verdict);
    }

    #[test]
    fn horizontal_with_zero_tri_l_equals_tri_r() {
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["e"]).unwrap();
        let mut ops = BTreeMap::new();
        ops.insert(OP_TRI_R.to_string(), table_from_strs(1, &reg, &[&[&["1"]]]));
        ops.insert(OP_TRI_L.to_string(), LambdaTable::zero(1, &reg));
        let ld = Structure::new(AlgebraKind::LDendriform, &module, &reg, ops).unwrap();
        let hor = ld.derive_structure(Conversion::Horizontal).unwrap();
        assert_eq!(hor.op(OP_CIRC).unwrap(), ld.op(OP_TRI_R).unwrap());
        assert_eq!(hor.kind(), AlgebraKind::LeftSymmetric);
    }

    #[test]
    fn sub_adjacent_lie_same_through_horizontal_and_vertical() {
        // Dendriform e succ e = e; its L-dendriform image's horizontal and
        // vertical left-symmetric products must share one bracket.
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["e"]).unwrap();
        let mut ops = BTreeMap::new();
        ops.insert(OP_SUCC.to_string(), table_from_strs(1, &reg, &[&[&["1"]]]));
        ops.insert(OP_PREC.to_string(), LambdaTable::zero(1, &reg));
        let dend = Structure::new(AlgebraKind::Dendriform, &module, &reg, ops).unwrap();
        let ld = dend.derive_structure(Conversion::DendToLDend).unwrap();
        let hor = ld.derive_structure(Conversion::Horizontal).unwrap();
        let ver = ld.derive_structure(Conversion::Vertical).unwrap();
        let from_hor = hor.commutator_lie().unwrap();
        let from_ver = ver.commutator_lie().unwrap();
        assert_eq!(from_hor.op(OP_BRACKET).unwrap(), from_ver.op(OP_BRACKET).unwrap());
        let direct = ld.derive_structure(Conversion::SubAdjacentLie).unwrap();
        assert_eq!(direct.op(OP_BRACKET).unwrap(), from_hor.op(OP_BRACKET).unwrap());
        assert!(direct.check_axioms().unwrap().verdict);
    }

    #[test]
    fn lie_check_fails_on_nonskew_bracket() {
        // bracket a_lm a = a is not skew: residual 2a at (a, a).
        let reg = VarRegistry::new(&[]).unwrap();
        let module = FreeModule::new(vec!["a"]).unwrap();
        let mut ops = BTreeMap::new();
        ops.insert(OP_BRACKET.to_string(), table_from_strs(1, &reg, &[&[&["1"]]]));
        let s = Structure::new(AlgebraKind::Lie, &module, &reg, ops).unwrap();
        let report = s.check_axioms().unwrap();
        assert!(!report.verdict);
        let v = report.failure.unwrap();
        assert_eq!(v.axiom_id, "skew_symmetry");
        assert_eq!(v.witness, vec![0, 0]);
        assert_eq!(v.residual[0].1, parse_poly(&reg, "2").unwrap());
    }

    #[test]
    fn randomized_elements_satisfy_checked_law() {
        // Left-symmetry holds for arbitrary (not only basis) elements of a
        // passing structure: the basis check plus sesquilinearity covers all
        // elements.  Spot-check with polynomial-coefficient elements.
        let s = lw();
        let reg = s.registry().clone();
        let a = Element::from_coeffs(
            s.module(),
            &reg,
            vec![
                parse_poly(&reg, "d^2 - 3").unwrap(),
                parse_poly(&reg, "2*d").unwrap(),
            ],
        )
        .unwrap();
        let b = Element::from_coeffs(
            s.module(),
            &reg,
            vec![parse_poly(&reg, "5*d").unwrap(), parse_poly(&reg, "1 - d").unwrap()],
        )
        .unwrap();
        let c = Element::from_coeffs(
            s.module(),
            &reg,
            vec![parse_poly(&reg, "d^3").unwrap(), parse_poly(&reg, "7").unwrap()],
        )
        .unwrap();
        let x1 = s
            .eval_product(OP_CIRC, &s.eval_product(OP_CIRC, &a, &b, VAR_LM).unwrap(), &c, VAR_NU)
            .unwrap()
            .substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))
            .unwrap();
        let x2 = s
            .eval_product(OP_CIRC, &a, &s.eval_product(OP_CIRC, &b, &c, VAR_MU).unwrap(), VAR_LM)
            .unwrap();
        let x3 = s
            .eval_product(OP_CIRC, &s.eval_product(OP_CIRC, &b, &a, VAR_MU).unwrap(), &c, VAR_NU)
            .unwrap()
            .substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))
            .unwrap();
        let x4 = s
            .eval_product(OP_CIRC, &b, &s.eval_product(OP_CIRC, &a, &c, VAR_LM).unwrap(), VAR_MU)
            .unwrap();
        assert!(x1.sub(&x2).sub(&x3).add(&x4).is_zero());
    }

    #[test]
    fn sesquilinearity_identities_for_random_elements() {
        let s = lw();
        let reg = s.registry().clone();
        let a = Element::from_coeffs(
            s.module(),
            &reg,
            vec![parse_poly(&reg, "d - 2").unwrap(), parse_poly(&reg, "d^2").unwrap()],
        )
        .unwrap();
        let b = Element::from_coeffs(
            s.module(),
            &reg,
            vec![parse_poly(&reg, "3").unwrap(), parse_poly(&reg, "d + 1").unwrap()],
        )
        .unwrap();
        let base = s.eval_product(OP_CIRC, &a, &b, VAR_LM).unwrap();
        let left = s.eval_product(OP_CIRC, &a.apply_derivation(), &b, VAR_LM).unwrap();
        assert_eq!(left, base.scale_poly(&Poly::var(&reg, VAR_LM)).neg());
        let right = s.eval_product(OP_CIRC, &a, &b.apply_derivation(), VAR_LM).unwrap();
        let shift = Poly::var(&reg, VAR_D).add(&Poly::var(&reg, VAR_LM));
        assert_eq!(right, base.scale_poly(&shift));
    }
}
