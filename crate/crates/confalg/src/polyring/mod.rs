//! Sparse multivariate polynomials over the exact rationals.
//!
//! Variables live in a [`VarRegistry`] and carry a role: derivation symbols
//! (`d` plus the tensor-slot copies `d1`, `d2`, `d3`), lambda symbols from a
//! small ordered pool (`lm`, `mu`, `nu`, `th`), and free parameters.  The two
//! combination scalars `k1`, `k2` are always registered so that symbolic
//! linear-combination checks work over any registry; user parameters follow.
//!
//! A [`Poly`] is a finite map from exponent vectors to nonzero rational
//! coefficients.  The map itself is a `BTreeMap`, so iteration order — and
//! with it printing, hashing-free equality, and every downstream report — is
//! deterministic.  Terms are *printed* in graded-lexicographic order (total
//! degree descending, then exponent vector descending in registry order).
//!
//! Substitution is deliberately minimal: a variable can only be replaced by an
//! affine combination `c0 + c1*x1 + ... + cn*xn` of variables ([`Affine`]),
//! which is exactly what conformal sesquilinearity needs (`d -> -lm`,
//! `d -> d + lm`, `nu -> -d - lm - mu`, slot renamings, evaluation at zero).
//! Parameters can never be bound by [`Poly::substitute_affine`]; instantiating
//! parameters at rational points is a separate operation,
//! [`Poly::eval_parameters`], used by the search module.

mod text;

pub use text::parse_poly;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Exact rational scalar used everywhere in the crate.
pub type Rat = BigRational;

/// Convenience constructor for a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for an integer rational.
pub fn rat_int(num: i64) -> Rat {
    Rat::from(BigInt::from(num))
}

// ---------------------------------------------------------------------------
// Variable registry
// ---------------------------------------------------------------------------

/// What a variable means; roles gate which operations may bind it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarRole {
    /// A derivation symbol: the module generator `d` or a tensor-slot copy.
    Derivation,
    /// A lambda symbol from the ordered evaluation pool.
    Lambda,
    /// A free scalar parameter, treated as a transcendental over Q.
    Parameter,
}

impl fmt::Display for VarRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRole::Derivation => write!(f, "derivation"),
            VarRole::Lambda => write!(f, "lambda"),
            VarRole::Parameter => write!(f, "parameter"),
        }
    }
}

/// Index of a variable inside its registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub(crate) u32);

impl VarId {
    /// Position in the registry's variable list.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The ambient derivation symbol `d`.
pub const VAR_D: VarId = VarId(0);
/// Tensor-slot derivation `d1`.
pub const VAR_D1: VarId = VarId(1);
/// Tensor-slot derivation `d2`.
pub const VAR_D2: VarId = VarId(2);
/// Tensor-slot derivation `d3`.
pub const VAR_D3: VarId = VarId(3);
/// First lambda variable `lm`; tables are stored with this one.
pub const VAR_LM: VarId = VarId(4);
/// Second lambda variable `mu`.
pub const VAR_MU: VarId = VarId(5);
/// Third lambda variable `nu`, the usual scratch index.
pub const VAR_NU: VarId = VarId(6);
/// Fourth lambda variable `th`, a spare scratch index.
pub const VAR_TH: VarId = VarId(7);
/// Combination scalar `k1` for symbolic linear-combination checks.
pub const VAR_K1: VarId = VarId(8);
/// Combination scalar `k2` for symbolic linear-combination checks.
pub const VAR_K2: VarId = VarId(9);

const BUILTINS: [(&str, VarRole); 10] = [
    ("d", VarRole::Derivation),
    ("d1", VarRole::Derivation),
    ("d2", VarRole::Derivation),
    ("d3", VarRole::Derivation),
    ("lm", VarRole::Lambda),
    ("mu", VarRole::Lambda),
    ("nu", VarRole::Lambda),
    ("th", VarRole::Lambda),
    ("k1", VarRole::Parameter),
    ("k2", VarRole::Parameter),
];

/// Immutable, append-only set of variables shared by all values of a session.
///
/// Registries are compared structurally, so two registries with the same
/// names and roles are interchangeable.  [`VarRegistry::extend`] produces a
/// superset registry whose first variables coincide with the original ones;
/// [`Poly::lift`] moves polynomials into such a superset.
#[derive(Debug, PartialEq, Eq)]
pub struct VarRegistry {
    names: Vec<String>,
    roles: Vec<VarRole>,
    index: BTreeMap<String, u32>,
}

impl VarRegistry {
    /// Registry with the builtin variables plus the given parameters.
    ///
    /// Parameter names must be valid identifiers (letter or `_` first, then
    /// letters, digits, `_`), must not collide with builtin names, and must
    /// not repeat.
    pub fn new(parameters: &[&str]) -> Result<Arc<Self>> {
        let mut reg = VarRegistry {
            names: Vec::new(),
            roles: Vec::new(),
            index: BTreeMap::new(),
        };
        for (name, role) in BUILTINS {
            reg.push(name, role)?;
        }
        for p in parameters {
            reg.add_parameter(p)?;
        }
        Ok(Arc::new(reg))
    }

    /// Superset registry with additional parameters appended.
    pub fn extend(self: &Arc<Self>, parameters: &[&str]) -> Result<Arc<Self>> {
        let mut reg = VarRegistry {
            names: self.names.clone(),
            roles: self.roles.clone(),
            index: self.index.clone(),
        };
        for p in parameters {
            reg.add_parameter(p)?;
        }
        Ok(Arc::new(reg))
    }

    fn add_parameter(&mut self, name: &str) -> Result<()> {
        if BUILTINS.iter().any(|(b, _)| *b == name) {
            return Err(Error::ReservedName(name.to_string()));
        }
        if !is_identifier(name) {
            return Err(Error::Parse(format!("`{name}` is not a valid variable name")));
        }
        self.push(name, VarRole::Parameter)
    }

    fn push(&mut self, name: &str, role: VarRole) -> Result<()> {
        if self.index.contains_key(name) {
            return Err(Error::Parse(format!("duplicate variable `{name}`")));
        }
        self.index.insert(name.to_string(), self.names.len() as u32);
        self.names.push(name.to_string());
        self.roles.push(role);
        Ok(())
    }

    /// Number of registered variables.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True when no variables are registered (never the case in practice).
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Resolve a name to its id.
    pub fn lookup(&self, name: &str) -> Result<VarId> {
        self.index
            .get(name)
            .map(|&i| VarId(i))
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Name of a variable.
    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    /// Role of a variable.
    pub fn role(&self, v: VarId) -> VarRole {
        self.roles[v.index()]
    }

    /// All parameters (builtin `k1`, `k2` excluded), in registry order.
    pub fn user_parameters(&self) -> Vec<VarId> {
        (BUILTINS.len()..self.len()).map(|i| VarId(i as u32)).collect()
    }

    /// The ordered lambda pool.
    pub fn lambda_pool(&self) -> [VarId; 4] {
        [VAR_LM, VAR_MU, VAR_NU, VAR_TH]
    }

    /// First lambda-pool variable not contained in `busy`.
    pub fn fresh_lambda(&self, busy: &[VarId]) -> Result<VarId> {
        self.lambda_pool()
            .into_iter()
            .find(|v| !busy.contains(v))
            .ok_or_else(|| Error::LambdaConflict("lambda pool exhausted".into()))
    }

    /// True when the other registry is a prefix-compatible superset of `self`.
    pub fn is_prefix_of(&self, other: &VarRegistry) -> bool {
        self.len() <= other.len()
            && self.names[..] == other.names[..self.len()]
            && self.roles[..] == other.roles[..self.len()]
    }
}

/// True for `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// ---------------------------------------------------------------------------
// Affine expressions
// ---------------------------------------------------------------------------

/// An affine combination `constant + sum_i coeff_i * var_i`, the only shape a
/// substitution may assign to a variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub constant: Rat,
    pub terms: Vec<(VarId, Rat)>,
}

impl Affine {
    /// The zero expression.
    pub fn zero() -> Self {
        Affine { constant: Rat::zero(), terms: Vec::new() }
    }

    /// A constant expression.
    pub fn constant(c: Rat) -> Self {
        Affine { constant: c, terms: Vec::new() }
    }

    /// The expression `v`.
    pub fn var(v: VarId) -> Self {
        Affine { constant: Rat::zero(), terms: vec![(v, Rat::one())] }
    }

    /// The expression `-v`.
    pub fn neg_var(v: VarId) -> Self {
        Affine { constant: Rat::zero(), terms: vec![(v, -Rat::one())] }
    }

    /// Append `coeff * v`.
    pub fn plus(mut self, v: VarId, coeff: Rat) -> Self {
        self.terms.push((v, coeff));
        self
    }

    /// The expression `a + b` for variables `a`, `b`.
    pub fn sum(a: VarId, b: VarId) -> Self {
        Affine::var(a).plus(b, Rat::one())
    }

    /// The expression `-a - b` for variables `a`, `b`.
    pub fn neg_sum(a: VarId, b: VarId) -> Self {
        Affine::neg_var(a).plus(b, -Rat::one())
    }

    /// The expression `-a - b - c`.
    pub fn neg_sum3(a: VarId, b: VarId, c: VarId) -> Self {
        Affine::neg_var(a).plus(b, -Rat::one()).plus(c, -Rat::one())
    }
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Sparse polynomial over Q in the registry's variables.
///
/// Invariant: no stored coefficient is zero, and every exponent vector has
/// exactly `registry.len()` entries.  Equality therefore coincides with
/// mathematical equality of canonical forms.
#[derive(Clone)]
pub struct Poly {
    reg: Arc<VarRegistry>,
    terms: BTreeMap<Vec<u16>, Rat>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.reg, &other.reg) || self.reg == other.reg) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Poly {
    // ---- Constructors ----

    /// The zero polynomial.
    pub fn zero(reg: &Arc<VarRegistry>) -> Self {
        Poly { reg: Arc::clone(reg), terms: BTreeMap::new() }
    }

    /// The constant one.
    pub fn one(reg: &Arc<VarRegistry>) -> Self {
        Poly::constant(reg, Rat::one())
    }

    /// A constant polynomial.
    pub fn constant(reg: &Arc<VarRegistry>, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0u16; reg.len()], c);
        }
        Poly { reg: Arc::clone(reg), terms }
    }

    /// The variable `v`.
    pub fn var(reg: &Arc<VarRegistry>, v: VarId) -> Self {
        let mut exps = vec![0u16; reg.len()];
        exps[v.index()] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, Rat::one());
        Poly { reg: Arc::clone(reg), terms }
    }

    /// Materialize an affine expression as a polynomial.
    pub fn from_affine(reg: &Arc<VarRegistry>, a: &Affine) -> Self {
        let mut p = Poly::constant(reg, a.constant.clone());
        for (v, c) in &a.terms {
            p = p.add(&Poly::var(reg, *v).scale(c));
        }
        p
    }

    /// The registry this polynomial lives over.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    // ---- Predicates and inspection ----

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (exps, c) = self.terms.iter().next().unwrap();
                exps.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// True when `v` occurs in some term.
    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.keys().any(|e| e[v.index()] > 0)
    }

    /// Ids of all variables that occur.
    pub fn vars_used(&self) -> Vec<VarId> {
        let n = self.reg.len();
        let mut used = vec![false; n];
        for exps in self.terms.keys() {
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        (0..n).filter(|&i| used[i]).map(|i| VarId(i as u32)).collect()
    }

    /// Highest exponent of `v` across all terms.
    pub fn degree_in(&self, v: VarId) -> u16 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    /// Total degree counting only the given variables.
    pub fn total_degree_in(&self, vars: &[VarId]) -> u16 {
        self.terms
            .keys()
            .map(|e| vars.iter().map(|v| e[v.index()]).sum::<u16>())
            .max()
            .unwrap_or(0)
    }

    /// Number of terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate over `(exponents, coefficient)` pairs in map order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rat)> {
        self.terms.iter()
    }

    // ---- Ring operations ----

    fn check_reg(&self, other: &Poly) -> Result<()> {
        if Arc::ptr_eq(&self.reg, &other.reg) || self.reg == other.reg {
            Ok(())
        } else {
            Err(Error::RegistryMismatch(
                "polynomials come from different sessions".into(),
            ))
        }
    }

    /// Sum.  Panics on registry mismatch only via debug assertions; use
    /// [`Poly::try_add`] when operands may come from foreign registries.
    pub fn add(&self, other: &Poly) -> Poly {
        self.try_add(other).expect("registry mismatch in Poly::add")
    }

    /// Sum with registry checking.
    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_reg(other)?;
        let mut terms = self.terms.clone();
        for (exps, c) in &other.terms {
            add_term(&mut terms, exps.clone(), c.clone());
        }
        Ok(Poly { reg: Arc::clone(&self.reg), terms })
    }

    /// Difference.
    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Poly {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect();
        Poly { reg: Arc::clone(&self.reg), terms }
    }

    /// Product by a scalar.
    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.reg);
        }
        let terms = self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect();
        Poly { reg: Arc::clone(&self.reg), terms }
    }

    /// Product.
    pub fn mul(&self, other: &Poly) -> Poly {
        self.try_mul(other).expect("registry mismatch in Poly::mul")
    }

    /// Product with registry checking.
    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_reg(other)?;
        let mut terms: BTreeMap<Vec<u16>, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                add_term(&mut terms, exps, ca * cb);
            }
        }
        Ok(Poly { reg: Arc::clone(&self.reg), terms })
    }

    /// Power with a small non-negative exponent.
    pub fn pow(&self, e: u16) -> Poly {
        let mut acc = Poly::one(&self.reg);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    // ---- Substitution ----

    /// Replace each bound variable by its affine image, simultaneously.
    ///
    /// Only derivation and lambda variables may be bound; binding a parameter
    /// is an input error.  Unbound variables and the right-hand sides refer to
    /// the original variables (no chaining).
    pub fn substitute_affine(&self, bindings: &BTreeMap<VarId, Affine>) -> Result<Poly> {
        for v in bindings.keys() {
            if self.reg.role(*v) == VarRole::Parameter {
                return Err(Error::BadSubstitution(
                    self.reg.name(*v).to_string(),
                    VarRole::Parameter.to_string(),
                ));
            }
        }
        // Precompute the polynomial image of each bound variable.
        let images: BTreeMap<usize, Poly> = bindings
            .iter()
            .map(|(v, a)| (v.index(), Poly::from_affine(&self.reg, a)))
            .collect();
        let mut out = Poly::zero(&self.reg);
        for (exps, coeff) in &self.terms {
            let mut base = vec![0u16; self.reg.len()];
            let mut factor = Poly::constant(&self.reg, coeff.clone());
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match images.get(&i) {
                    Some(img) => factor = factor.mul(&img.pow(e)),
                    None => base[i] = e,
                }
            }
            let mut monomial_terms = BTreeMap::new();
            monomial_terms.insert(base, Rat::one());
            let monomial = Poly { reg: Arc::clone(&self.reg), terms: monomial_terms };
            out = out.add(&factor.mul(&monomial));
        }
        Ok(out)
    }

    /// Substitute a single variable.
    pub fn substitute_var(&self, v: VarId, image: Affine) -> Result<Poly> {
        let mut bindings = BTreeMap::new();
        bindings.insert(v, image);
        self.substitute_affine(&bindings)
    }

    /// Project onto the quotient by `d1 + d2 + d3`, eliminating `d3`.
    pub fn reduce_mod_diagonal(&self) -> Poly {
        self.substitute_var(VAR_D3, Affine::neg_sum(VAR_D1, VAR_D2))
            .expect("d3 is substitutable")
    }

    /// Instantiate parameters at rational values; all listed variables must be
    /// parameters.  Variables not listed stay symbolic.
    pub fn eval_parameters(&self, values: &BTreeMap<VarId, Rat>) -> Result<Poly> {
        for v in values.keys() {
            if self.reg.role(*v) != VarRole::Parameter {
                return Err(Error::BadSubstitution(
                    self.reg.name(*v).to_string(),
                    self.reg.role(*v).to_string(),
                ));
            }
        }
        let mut out = Poly::zero(&self.reg);
        for (exps, coeff) in &self.terms {
            let mut c = coeff.clone();
            let mut base = vec![0u16; self.reg.len()];
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match values.get(&VarId(i as u32)) {
                    Some(val) => {
                        let mut p = Rat::one();
                        for _ in 0..e {
                            p *= val;
                        }
                        c *= p;
                    }
                    None => base[i] = e,
                }
            }
            add_term(&mut out.terms, base, c);
        }
        Ok(out)
    }

    /// Move the polynomial into a superset registry.
    pub fn lift(&self, target: &Arc<VarRegistry>) -> Result<Poly> {
        if !self.reg.is_prefix_of(target) {
            return Err(Error::RegistryMismatch(
                "target registry is not a prefix-compatible superset".into(),
            ));
        }
        let pad = target.len() - self.reg.len();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut exps = e.clone();
                exps.extend(std::iter::repeat(0u16).take(pad));
                (exps, c.clone())
            })
            .collect();
        Ok(Poly { reg: Arc::clone(target), terms })
    }

    /// Terms grouped by their exponents in derivation and lambda variables.
    ///
    /// Returns, for each distinct derivation/lambda exponent pattern, the
    /// polynomial in the remaining (parameter) variables that multiplies it.
    /// This is how a symbolic residual becomes a list of scalar equations.
    pub fn coefficients_by_dl_monomial(&self) -> BTreeMap<Vec<u16>, Poly> {
        let n = self.reg.len();
        let is_dl: Vec<bool> = (0..n)
            .map(|i| self.reg.role(VarId(i as u32)) != VarRole::Parameter)
            .collect();
        let mut groups: BTreeMap<Vec<u16>, Poly> = BTreeMap::new();
        for (exps, coeff) in &self.terms {
            let mut dl = vec![0u16; n];
            let mut param = vec![0u16; n];
            for i in 0..n {
                if is_dl[i] {
                    dl[i] = exps[i];
                } else {
                    param[i] = exps[i];
                }
            }
            let entry = groups
                .entry(dl)
                .or_insert_with(|| Poly::zero(&self.reg));
            add_term(&mut entry.terms, param, coeff.clone());
        }
        groups
    }
}

fn add_term(terms: &mut BTreeMap<Vec<u16>, Rat>, exps: Vec<u16>, c: Rat) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(exps) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial matrices
// ---------------------------------------------------------------------------

/// Exact determinant of a square matrix of polynomials (Laplace expansion).
///
/// The ranks handled by this crate are small, so the factorial cost is
/// irrelevant; exactness and zero dependencies are what matter.
pub fn determinant(rows: &[Vec<Poly>], reg: &Arc<VarRegistry>) -> Result<Poly> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(Error::RegistryMismatch(
                "determinant requires a square matrix".into(),
            ));
        }
    }
    if n == 0 {
        return Ok(Poly::one(reg));
    }
    Ok(det_rec(rows, &(0..n).collect::<Vec<_>>(), 0, reg))
}

fn det_rec(rows: &[Vec<Poly>], cols: &[usize], top: usize, reg: &Arc<VarRegistry>) -> Poly {
    if cols.len() == 1 {
        return rows[top][cols[0]].clone();
    }
    let mut acc = Poly::zero(reg);
    for (pos, &col) in cols.iter().enumerate() {
        let cell = &rows[top][col];
        if cell.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != pos)
            .map(|(_, &c)| c)
            .collect();
        let minor = det_rec(rows, &rest, top + 1, reg);
        let signed = if pos % 2 == 0 { cell.mul(&minor) } else { cell.mul(&minor).neg() };
        acc = acc.add(&signed);
    }
    acc
}

/// Adjugate (transposed cofactor matrix), satisfying `M * adj(M) = det(M) * I`.
pub fn adjugate(rows: &[Vec<Poly>], reg: &Arc<VarRegistry>) -> Result<Vec<Vec<Poly>>> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(Error::RegistryMismatch(
                "adjugate requires a square matrix".into(),
            ));
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![vec![Poly::one(reg)]]);
    }
    let mut out = vec![vec![Poly::zero(reg); n]; n];
    for i in 0..n {
        for j in 0..n {
            // Cofactor C_{ji}: delete row j, column i.
            let sub: Vec<Vec<Poly>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| rows[r][c].clone())
                        .collect()
                })
                .collect();
            let minor = det_rec(&sub, &(0..n - 1).collect::<Vec<_>>(), 0, reg);
            out[i][j] = if (i + j) % 2 == 0 { minor } else { minor.neg() };
        }
    }
    Ok(out)
}

/// How a square polynomial matrix relates to being invertible over the
/// coefficient ring, judged by its determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invertibility {
    /// The determinant is a nonzero rational constant — a unit of the
    /// polynomial ring — so an exact polynomial inverse exists.
    Unit(Rat),
    /// The determinant is nonzero and involves parameters only: invertible
    /// for generic parameter values, subject to this nonvanishing condition.
    Generic(Poly),
    /// The determinant vanishes identically, or involves a bound variable
    /// (`d` or a lambda), so no inverse over the ring exists.
    Singular,
}

/// Classify a determinant per the invertibility policy above.
pub fn classify_invertibility(det: &Poly) -> Invertibility {
    if det.is_zero() {
        return Invertibility::Singular;
    }
    if let Some(c) = det.as_constant() {
        return Invertibility::Unit(c);
    }
    let reg = det.registry();
    if det.vars_used().iter().all(|&v| reg.role(v) == VarRole::Parameter) {
        Invertibility::Generic(det.clone())
    } else {
        Invertibility::Singular
    }
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

impl fmt::Display for Poly {
    /// Graded-lexicographic canonical form; re-parses to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<&Vec<u16>> = self.terms.keys().collect();
        order.sort_by(|a, b| {
            let da: u32 = a.iter().map(|&e| e as u32).sum();
            let db: u32 = b.iter().map(|&e| e as u32).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, exps) in order.iter().enumerate() {
            let coeff = &self.terms[*exps];
            let negative = coeff.is_negative();
            let magnitude = coeff.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    let name = self.reg.name(VarId(v as u32));
                    if e == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rat(&magnitude, false))?;
            } else if magnitude.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rat(&magnitude, true), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

fn format_rat(r: &Rat, in_product: bool) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if in_product {
        format!("({}/{})", r.numer(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
