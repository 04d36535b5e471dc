//! Operators on conformal structures and the constructions they induce.
//!
//! The central object is the [`ModuleMap`]: a coefficient-linear,
//! translation-equivariant map between free modules, given by a polynomial
//! matrix in the translation generator and parameters.  On top of it this
//! module provides:
//!
//! * relative operator checks against a bimodule ([`check_o_operator`]), with
//!   the two equivalent reformulations — graph closure inside the semidirect
//!   product ([`graph_check`]) and the lifted weight-zero Rota-Baxter check
//!   ([`lift_check`]);
//! * Rota-Baxter and Nijenhuis operator checks on single-product structures
//!   ([`check_rota_baxter`], [`check_nijenhuis`]), the deformed product a
//!   Nijenhuis candidate defines ([`deformed_product`]), and the classical
//!   equivalences between the two notions under polynomial constraints on the
//!   operator ([`nijenhuis_rb_relations`]);
//! * the split structures a relative operator induces
//!   ([`induced_l_dendriform`], [`invertible_o_compatible_structure`]), and
//!   the Lie-side constructions from one or two commuting Rota-Baxter
//!   operators ([`rota_baxter_left_symmetric`],
//!   [`commuting_pair_l_dendriform`], [`check_lie_o_operator`]);
//! * compatibility machinery: the mixed identity for two relative operators
//!   ([`check_compatible_o_operators`]), its symbolic-pencil cross-check
//!   ([`pencil_o_operator_check`]), the twisted condition linking a Nijenhuis
//!   operator with a relative operator ([`nt_check`]), quotients of operators
//!   ([`quotient_nijenhuis`]), and the mixed identities for two l-dendriform
//!   structures on one module ([`check_compatible_l_dendriform`],
//!   [`l_dendriform_pencil_check`], [`compatible_pair_from_o_operators`]).
//!
//! Constructions marked *unverified* do not re-check the axioms of what they
//! return: they are also used to build deliberate counterexamples, and the
//! caller decides which verification to run.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bimodule::{
    eval_action_raw, same_module, semidirect_product, ActionTable, Bimodule, LDendFlavor,
};
use crate::calgebra::{
    AlgebraKind, CheckReport, Element, FreeModule, LambdaTable, Structure, Violation, OP_BRACKET,
    OP_CIRC, OP_TRI_L, OP_TRI_R,
};
use crate::error::{Error, Result};
use crate::polyring::{
    adjugate, classify_invertibility, determinant, rat_int, Affine, Invertibility, Poly, Rat,
    VarRegistry, VarRole, VAR_D, VAR_K1, VAR_K2, VAR_LM, VAR_MU, VAR_NU,
};

// ---------------------------------------------------------------------------
// Module maps
// ---------------------------------------------------------------------------

/// A coefficient-linear map between free modules that commutes with the
/// translation generator, written on basis rows:
/// `T(v_i) = sum_j rows[i][j](d) e_j`.
///
/// Entries may use only `d` and parameters; the action on general elements
/// multiplies each coefficient through, so lambda variables in an argument's
/// coefficients ride along unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: Arc<FreeModule>,
    target: Arc<FreeModule>,
    reg: Arc<VarRegistry>,
    rows: Vec<Vec<Poly>>,
}

impl ModuleMap {
    /// Build and validate a map from its row matrix.
    pub fn new(
        source: &Arc<FreeModule>,
        target: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        rows: Vec<Vec<Poly>>,
    ) -> Result<Self> {
        if rows.len() != source.rank() || rows.iter().any(|row| row.len() != target.rank()) {
            return Err(Error::InvalidDefinition(format!(
                "module map must be {} x {} for these modules",
                source.rank(),
                target.rank()
            )));
        }
        for row in &rows {
            for p in row {
                for v in p.vars_used() {
                    if v != VAR_D && reg.role(v) != VarRole::Parameter {
                        return Err(Error::DisallowedVariable(
                            reg.name(v).to_string(),
                            "module-map entries may use only d and parameters".into(),
                        ));
                    }
                }
            }
        }
        Ok(ModuleMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            reg: Arc::clone(reg),
            rows,
        })
    }

    /// The zero map.
    pub fn zero(
        source: &Arc<FreeModule>,
        target: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
    ) -> Self {
        let rows = vec![vec![Poly::zero(reg); target.rank()]; source.rank()];
        ModuleMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            reg: Arc::clone(reg),
            rows,
        }
    }

    /// The identity on a module.
    pub fn identity(module: &Arc<FreeModule>, reg: &Arc<VarRegistry>) -> Self {
        let n = module.rank();
        let mut rows = vec![vec![Poly::zero(reg); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = Poly::one(reg);
        }
        ModuleMap {
            source: Arc::clone(module),
            target: Arc::clone(module),
            reg: Arc::clone(reg),
            rows,
        }
    }

    /// Source module.
    pub fn source(&self) -> &Arc<FreeModule> {
        &self.source
    }

    /// Target module.
    pub fn target(&self) -> &Arc<FreeModule> {
        &self.target
    }

    /// The variable registry.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    /// The row matrix (`rows[i][j]` is the `e_j`-coefficient of `T(v_i)`).
    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.rows
    }

    /// One matrix entry.
    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.rows[i][j]
    }

    /// True when every entry vanishes.
    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Poly::is_zero)
    }

    /// Apply the map to an element of its source module.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        if !same_module(x.module(), &self.source) {
            return Err(Error::ModuleMismatch(
                "the element does not belong to the map's source module".into(),
            ));
        }
        let mut out = vec![Poly::zero(&self.reg); self.target.rank()];
        for (i, xi) in x.coeffs().iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, out_j) in out.iter_mut().enumerate() {
                let t = &self.rows[i][j];
                if !t.is_zero() {
                    *out_j = out_j.add(&xi.mul(t));
                }
            }
        }
        Element::from_coeffs(&self.target, &self.reg, out)
    }

    /// Entry-wise sum (source and target must agree).
    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if !same_module(&self.source, &other.source) || !same_module(&self.target, &other.target) {
            return Err(Error::ModuleMismatch(
                "module maps must share source and target to be combined".into(),
            ));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.add(b)).collect())
            .collect();
        Ok(ModuleMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&self.target),
            reg: Arc::clone(&self.reg),
            rows,
        })
    }

    /// Entry-wise difference.
    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.add(&other.neg())
    }

    /// Entry-wise negation.
    pub fn neg(&self) -> ModuleMap {
        let rows = self.rows.iter().map(|row| row.iter().map(Poly::neg).collect()).collect();
        ModuleMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&self.target),
            reg: Arc::clone(&self.reg),
            rows,
        }
    }

    /// Scale by a rational constant.
    pub fn scale(&self, c: &Rat) -> ModuleMap {
        let rows =
            self.rows.iter().map(|row| row.iter().map(|p| p.scale(c)).collect()).collect();
        ModuleMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&self.target),
            reg: Arc::clone(&self.reg),
            rows,
        }
    }

    /// Scale by a parameter polynomial.
    pub fn scale_poly(&self, f: &Poly) -> Result<ModuleMap> {
        for v in f.vars_used() {
            if self.reg.role(v) != VarRole::Parameter {
                return Err(Error::DisallowedVariable(
                    self.reg.name(v).to_string(),
                    "map scale factors may use only parameters".into(),
                ));
            }
        }
        let rows = self.rows.iter().map(|row| row.iter().map(|p| p.mul(f)).collect()).collect();
        Ok(ModuleMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&self.target),
            reg: Arc::clone(&self.reg),
            rows,
        })
    }

    /// Composition in application order: `self.then(next)` applies `self`
    /// first, so its row matrix is `self.rows * next.rows`.
    pub fn then(&self, next: &ModuleMap) -> Result<ModuleMap> {
        if !same_module(&self.target, &next.source) {
            return Err(Error::ModuleMismatch(
                "the maps do not compose: target of the first differs from source of the second"
                    .into(),
            ));
        }
        let mid = self.target.rank();
        let out_rank = next.target.rank();
        let mut rows = vec![vec![Poly::zero(&self.reg); out_rank]; self.source.rank()];
        for (i, out_row) in rows.iter_mut().enumerate() {
            for j in 0..mid {
                let a = &self.rows[i][j];
                if a.is_zero() {
                    continue;
                }
                for (k, out_cell) in out_row.iter_mut().enumerate() {
                    let b = &next.rows[j][k];
                    if !b.is_zero() {
                        *out_cell = out_cell.add(&a.mul(b));
                    }
                }
            }
        }
        Ok(ModuleMap {
            source: Arc::clone(&self.source),
            target: Arc::clone(&next.target),
            reg: Arc::clone(&self.reg),
            rows,
        })
    }

    /// Determinant of a square map's row matrix.
    pub fn determinant(&self) -> Result<Poly> {
        if self.source.rank() != self.target.rank() {
            return Err(Error::NotInvertible("the map is not square".into()));
        }
        determinant(&self.rows, &self.reg)
    }

    /// Invert a square map through its adjugate.
    ///
    /// A unit determinant (nonzero rational) yields an exact inverse with
    /// denominator `1`; a nonzero parameter-only determinant yields the
    /// adjugate as numerator with the determinant as attached denominator
    /// (valid for generic parameter values); anything else is not invertible
    /// over the coefficient ring.
    pub fn inverse_scaled(&self) -> Result<ScaledModuleMap> {
        let det = self.determinant()?;
        let adj = adjugate(&self.rows, &self.reg)?;
        let mk = |rows: Vec<Vec<Poly>>| ModuleMap {
            source: Arc::clone(&self.target),
            target: Arc::clone(&self.source),
            reg: Arc::clone(&self.reg),
            rows,
        };
        match classify_invertibility(&det) {
            Invertibility::Unit(c) => {
                let inv = c.recip();
                let rows =
                    adj.iter().map(|row| row.iter().map(|p| p.scale(&inv)).collect()).collect();
                Ok(ScaledModuleMap { map: mk(rows), denominator: Poly::one(&self.reg) })
            }
            Invertibility::Generic(p) => {
                Ok(ScaledModuleMap { map: mk(adj), denominator: p })
            }
            Invertibility::Singular => Err(Error::NotInvertible(format!(
                "the determinant `{det}` is neither a unit nor a nonzero parameter expression"
            ))),
        }
    }
}

/// A module map divided by a scalar denominator: the true map is
/// `map / denominator`.  The denominator is `1` exactly when the inverse or
/// quotient is exact; otherwise it is a nonzero parameter polynomial and the
/// pair is valid for generic parameter values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledModuleMap {
    pub map: ModuleMap,
    pub denominator: Poly,
}

impl ScaledModuleMap {
    /// True when the denominator is `1`.
    pub fn is_exact(&self) -> bool {
        self.denominator.as_constant().map_or(false, |c| c == rat_int(1))
    }
}

/// A structure whose product tables carry a common scalar denominator: the
/// true products are `tables / denominator`.
///
/// Because the axioms of every supported kind are homogeneous of degree two in
/// the products, checking them on the numerator tables is equivalent to
/// checking them on the true structure whenever the denominator is a nonzero
/// parameter polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledStructure {
    pub structure: Structure,
    pub denominator: Poly,
}

impl ScaledStructure {
    /// True when the denominator is `1`.
    pub fn is_exact(&self) -> bool {
        self.denominator.as_constant().map_or(false, |c| c == rat_int(1))
    }

    /// Check the numerator structure's axioms (equivalent to checking the
    /// true structure, per the homogeneity note on the type).
    pub fn check_axioms(&self) -> Result<CheckReport> {
        self.structure.check_axioms()
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn single_op(s: &Structure) -> Result<&'static str> {
    match s.kind() {
        AlgebraKind::Lie => Ok(OP_BRACKET),
        AlgebraKind::LeftSymmetric | AlgebraKind::Associative => Ok(OP_CIRC),
        other => Err(Error::WrongKind {
            expected: "a single-product structure (lie, left-symmetric, or associative)".into(),
            found: other.name().into(),
        }),
    }
}

fn ensure_endomap(t: &ModuleMap, s: &Structure) -> Result<()> {
    if !same_module(&t.source, s.module()) || !same_module(&t.target, s.module()) {
        return Err(Error::ModuleMismatch(
            "the operator must map the structure's module to itself".into(),
        ));
    }
    Ok(())
}

fn ensure_o_shapes(t: &ModuleMap, m: &Bimodule) -> Result<()> {
    if !same_module(&t.source, m.space()) || !same_module(&t.target, m.base().module()) {
        return Err(Error::ModuleMismatch(
            "the map must send the bimodule's space into its base module".into(),
        ));
    }
    Ok(())
}

fn pair_violation(
    id: &str,
    i: usize,
    j: usize,
    witness_module: &Arc<FreeModule>,
    residual: &Element,
) -> Violation {
    Violation {
        axiom_id: id.to_string(),
        witness: vec![i, j],
        witness_names: vec![
            witness_module.name(i).to_string(),
            witness_module.name(j).to_string(),
        ],
        residual: residual.nonzero_entries(),
    }
}

/// Run a residual over all ordered pairs of a witness module's basis and
/// report the first nonzero one.
fn report_over_pairs<F>(
    id: &str,
    witness_module: &Arc<FreeModule>,
    mut residual: F,
) -> Result<CheckReport>
where
    F: FnMut(usize, usize) -> Result<Element>,
{
    let n = witness_module.rank();
    for i in 0..n {
        for j in 0..n {
            let res = residual(i, j)?;
            if !res.is_zero() {
                return Ok(CheckReport::fail(
                    vec![id.to_string()],
                    pair_violation(id, i, j, witness_module, &res),
                ));
            }
        }
    }
    Ok(CheckReport::pass(vec![id.to_string()]))
}

/// The right-hand interior of the relative operator identity:
/// `l(tu)_lm v + r(tv)_{-d-lm} u`.
fn o_inner(
    m: &Bimodule,
    tu: &Element,
    tv: &Element,
    u: &Element,
    v: &Element,
) -> Result<Element> {
    let left = m.eval_left(tu, v, VAR_LM)?;
    let right = m
        .eval_right(tv, u, VAR_NU)?
        .substitute_var(VAR_NU, Affine::neg_sum(VAR_D, VAR_LM))?;
    Ok(left.add(&right))
}

// ---------------------------------------------------------------------------
// Relative (o-)operators
// ---------------------------------------------------------------------------

/// Residual of the relative operator identity on one basis pair of the
/// space; zero for every pair means the identity holds.
pub(crate) fn o_operator_residual(
    t: &ModuleMap,
    m: &Bimodule,
    i: usize,
    j: usize,
) -> Result<Element> {
    let reg = m.registry();
    let space = m.space();
    let u = Element::basis(space, reg, i);
    let v = Element::basis(space, reg, j);
    let tu = t.apply(&u)?;
    let tv = t.apply(&v)?;
    let lhs = m.base().eval_product(OP_CIRC, &tu, &tv, VAR_LM)?;
    let rhs = t.apply(&o_inner(m, &tu, &tv, &u, &v)?)?;
    Ok(lhs.sub(&rhs))
}

/// Check the relative operator identity for `t` against the bimodule `m`:
/// `t(u) o_lm t(v) = t( l(t(u))_lm v + r(t(v))_{-d-lm} u )` on all basis
/// pairs of the space.
pub fn check_o_operator(t: &ModuleMap, m: &Bimodule) -> Result<CheckReport> {
    ensure_o_shapes(t, m)?;
    report_over_pairs("o_operator", m.space(), |i, j| o_operator_residual(t, m, i, j))
}

/// Check that the graph of `t` is closed under the semidirect-product
/// product: for basis graph elements `g_i = (t(v_i), v_i)`, the base part of
/// `g_i o_lm g_j` must equal `t` applied to the space part.
///
/// Equivalent to [`check_o_operator`]; errors if the bimodule fails its laws
/// (the semidirect product refuses to form).
pub fn graph_check(t: &ModuleMap, m: &Bimodule) -> Result<CheckReport> {
    ensure_o_shapes(t, m)?;
    let sd = semidirect_product(m)?;
    let reg = m.registry();
    let n = m.base().rank();
    let space = m.space();
    let graph_el = |i: usize| -> Result<Element> {
        let tv = t.apply(&Element::basis(space, reg, i))?;
        let mut coeffs = tv.coeffs().to_vec();
        for k in 0..space.rank() {
            coeffs.push(if k == i { Poly::one(reg) } else { Poly::zero(reg) });
        }
        Element::from_coeffs(sd.module(), reg, coeffs)
    };
    report_over_pairs("graph_closure", space, |i, j| {
        let p = sd.eval_product(OP_CIRC, &graph_el(i)?, &graph_el(j)?, VAR_LM)?;
        let base_part =
            Element::from_coeffs(m.base().module(), reg, p.coeffs()[..n].to_vec())?;
        let space_part = Element::from_coeffs(space, reg, p.coeffs()[n..].to_vec())?;
        Ok(base_part.sub(&t.apply(&space_part)?))
    })
}

/// Check that the lift of `t` to the semidirect product — zero on the base,
/// `t` followed by inclusion on the space — is a weight-zero Rota-Baxter
/// operator there.  Equivalent to [`check_o_operator`]; errors if the
/// bimodule fails its laws.
pub fn lift_check(t: &ModuleMap, m: &Bimodule) -> Result<CheckReport> {
    ensure_o_shapes(t, m)?;
    let sd = semidirect_product(m)?;
    let reg = m.registry();
    let n = m.base().rank();
    let total = sd.rank();
    let mut rows = vec![vec![Poly::zero(reg); total]; total];
    for (j, t_row) in t.rows().iter().enumerate() {
        for (k, p) in t_row.iter().enumerate() {
            rows[n + j][k] = p.clone();
        }
    }
    let lift = ModuleMap::new(sd.module(), sd.module(), reg, rows)?;
    let mut report = check_rota_baxter(&sd, &lift, &Poly::zero(reg))?;
    report.axioms_checked = vec!["lifted_rota_baxter".to_string()];
    if let Some(f) = report.failure.as_mut() {
        f.axiom_id = "lifted_rota_baxter".to_string();
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Rota-Baxter and Nijenhuis operators
// ---------------------------------------------------------------------------

/// Check the Rota-Baxter identity of the given weight on a single-product
/// structure:
/// `r(a) op r(b) = r( r(a) op b + a op r(b) + weight * (a op b) )`.
/// The weight may use only parameters.
pub fn check_rota_baxter(s: &Structure, r: &ModuleMap, weight: &Poly) -> Result<CheckReport> {
    single_op(s)?;
    ensure_endomap(r, s)?;
    ensure_parameter_weight(s.registry(), weight)?;
    report_over_pairs("rota_baxter", s.module(), |i, j| {
        rota_baxter_residual(s, r, weight, i, j)
    })
}

/// Reject weights that involve anything but scalar parameters.
pub(crate) fn ensure_parameter_weight(reg: &Arc<VarRegistry>, weight: &Poly) -> Result<()> {
    for v in weight.vars_used() {
        if reg.role(v) != VarRole::Parameter {
            return Err(Error::DisallowedVariable(
                reg.name(v).to_string(),
                "rota-baxter weights may use only parameters".into(),
            ));
        }
    }
    Ok(())
}

/// Residual of the weight-`weight` Rota-Baxter identity on one basis pair.
pub(crate) fn rota_baxter_residual(
    s: &Structure,
    r: &ModuleMap,
    weight: &Poly,
    i: usize,
    j: usize,
) -> Result<Element> {
    let op = single_op(s)?;
    let a = s.basis_element(i);
    let b = s.basis_element(j);
    let ra = r.apply(&a)?;
    let rb = r.apply(&b)?;
    let lhs = s.eval_product(op, &ra, &rb, VAR_LM)?;
    let inner = s
        .eval_product(op, &ra, &b, VAR_LM)?
        .add(&s.eval_product(op, &a, &rb, VAR_LM)?)
        .add(&s.eval_product(op, &a, &b, VAR_LM)?.scale_poly(weight));
    Ok(lhs.sub(&r.apply(&inner)?))
}

/// Check the Nijenhuis identity on a single-product structure:
/// `n(a) op n(b) = n( n(a) op b + a op n(b) - n(a op b) )`.
pub fn check_nijenhuis(s: &Structure, n: &ModuleMap) -> Result<CheckReport> {
    single_op(s)?;
    ensure_endomap(n, s)?;
    report_over_pairs("nijenhuis", s.module(), |i, j| nijenhuis_residual(s, n, i, j))
}

/// Residual of the Nijenhuis identity on one basis pair.
pub(crate) fn nijenhuis_residual(
    s: &Structure,
    n: &ModuleMap,
    i: usize,
    j: usize,
) -> Result<Element> {
    let op = single_op(s)?;
    let a = s.basis_element(i);
    let b = s.basis_element(j);
    let na = n.apply(&a)?;
    let nb = n.apply(&b)?;
    let lhs = s.eval_product(op, &na, &nb, VAR_LM)?;
    let inner = s
        .eval_product(op, &na, &b, VAR_LM)?
        .add(&s.eval_product(op, &a, &nb, VAR_LM)?)
        .sub(&n.apply(&s.eval_product(op, &a, &b, VAR_LM)?)?);
    Ok(lhs.sub(&n.apply(&inner)?))
}

/// The product deformed by an operator on a single-product structure:
/// `a op' b = n(a) op b + a op n(b) - n(a op b)`, under the same kind tag.
///
/// Returned unverified: when `n` passes [`check_nijenhuis`] the deformed
/// product satisfies the original kind's axioms and `n` becomes a
/// homomorphism from the deformed structure to the original (see
/// [`check_homomorphism`]), but the construction itself does not insist.
pub fn deformed_product(s: &Structure, n: &ModuleMap) -> Result<Structure> {
    let op = single_op(s)?;
    ensure_endomap(n, s)?;
    let reg = s.registry();
    let rank = s.rank();
    let mut entries = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut row = Vec::with_capacity(rank);
        let a = s.basis_element(i);
        let na = n.apply(&a)?;
        for j in 0..rank {
            let b = s.basis_element(j);
            let nb = n.apply(&b)?;
            let x = s
                .eval_product(op, &na, &b, VAR_LM)?
                .add(&s.eval_product(op, &a, &nb, VAR_LM)?)
                .sub(&n.apply(&s.eval_product(op, &a, &b, VAR_LM)?)?);
            row.push(x.coeffs().to_vec());
        }
        entries.push(row);
    }
    let table = LambdaTable::new(rank, reg, entries)?;
    let mut ops = BTreeMap::new();
    ops.insert(op.to_string(), table);
    Structure::new(s.kind(), s.module(), reg, ops)
}

/// Check that `t` is a homomorphism of single-product structures:
/// `t(a op b) = t(a) op' t(b)` on all basis pairs.
pub fn check_homomorphism(src: &Structure, dst: &Structure, t: &ModuleMap) -> Result<CheckReport> {
    let op_src = single_op(src)?;
    let op_dst = single_op(dst)?;
    if !same_module(&t.source, src.module()) || !same_module(&t.target, dst.module()) {
        return Err(Error::ModuleMismatch(
            "the map must send the source structure's module to the target structure's module"
                .into(),
        ));
    }
    report_over_pairs("homomorphism", src.module(), |i, j| {
        let a = src.basis_element(i);
        let b = src.basis_element(j);
        let lhs = t.apply(&src.eval_product(op_src, &a, &b, VAR_LM)?)?;
        let rhs = dst.eval_product(op_dst, &t.apply(&a)?, &t.apply(&b)?, VAR_LM)?;
        Ok(lhs.sub(&rhs))
    })
}

/// One clause of [`nijenhuis_rb_relations`]: under the named polynomial
/// constraint on the operator, being Nijenhuis is equivalent to a specific
/// Rota-Baxter property.  Inapplicable clauses (constraint not satisfied)
/// leave the verdict fields empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationClause {
    /// Stable clause identifier.
    pub id: String,
    /// Whether the operator satisfies the clause's polynomial constraint.
    pub applicable: bool,
    /// Verdict of the Nijenhuis check (when applicable).
    pub nijenhuis: Option<bool>,
    /// Verdict of the clause's Rota-Baxter property (when applicable).
    pub rota_baxter: Option<bool>,
    /// Whether the two verdicts agree (when applicable).
    pub agree: Option<bool>,
}

/// Evaluate the classical equivalences between the Nijenhuis identity and
/// Rota-Baxter identities under polynomial constraints on the operator:
///
/// * `n^2 = 0`: Nijenhuis is equivalent to Rota-Baxter of weight `0`;
/// * `n^2 = n`: Nijenhuis is equivalent to Rota-Baxter of weight `-1`;
/// * `n^2 = id`: Nijenhuis is equivalent to `n + id` being Rota-Baxter of
///   weight `-2` (and `n - id` of weight `2`; both are evaluated).
///
/// Clauses whose constraint fails are reported as inapplicable, never as
/// errors.
pub fn nijenhuis_rb_relations(s: &Structure, n: &ModuleMap) -> Result<Vec<RelationClause>> {
    single_op(s)?;
    ensure_endomap(n, s)?;
    let reg = s.registry();
    let n2 = n.then(n)?;
    let id_map = ModuleMap::identity(s.module(), reg);
    let mut out = Vec::with_capacity(3);

    let mut clause = |id: &str, applicable: bool, rb: Option<bool>, nij: Option<bool>| {
        let agree = match (nij, rb) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        };
        out.push(RelationClause {
            id: id.to_string(),
            applicable,
            nijenhuis: nij,
            rota_baxter: rb,
            agree,
        });
    };

    let nij_verdict = |applicable: bool| -> Result<Option<bool>> {
        Ok(if applicable { Some(check_nijenhuis(s, n)?.verdict) } else { None })
    };

    let applicable = n2.is_zero();
    let rb = if applicable {
        Some(check_rota_baxter(s, n, &Poly::zero(reg))?.verdict)
    } else {
        None
    };
    clause("square_zero_weight_zero", applicable, rb, nij_verdict(applicable)?);

    let applicable = n2 == *n;
    let rb = if applicable {
        Some(check_rota_baxter(s, n, &Poly::constant(reg, rat_int(-1)))?.verdict)
    } else {
        None
    };
    clause("idempotent_weight_minus_one", applicable, rb, nij_verdict(applicable)?);

    let applicable = n2 == id_map;
    let rb = if applicable {
        let plus = check_rota_baxter(s, &n.add(&id_map)?, &Poly::constant(reg, rat_int(-2)))?;
        let minus = check_rota_baxter(s, &n.sub(&id_map)?, &Poly::constant(reg, rat_int(2)))?;
        Some(plus.verdict && minus.verdict)
    } else {
        None
    };
    clause("involutive_shifted_weights", applicable, rb, nij_verdict(applicable)?);

    Ok(out)
}

// ---------------------------------------------------------------------------
// Induced split structures
// ---------------------------------------------------------------------------

/// The l-dendriform structure on the bimodule's space induced by a relative
/// operator, in the requested flavor:
///
/// * both flavors: `u tri_r_lm v = l(t(u))_lm v`;
/// * vertical: `u tri_l_lm v = -r(t(u))_lm v`;
/// * horizontal: `u tri_l_lm v = r(t(v))_{-d-lm} u`.
///
/// Gated: `t` must pass [`check_o_operator`] first.
pub fn induced_l_dendriform(
    t: &ModuleMap,
    m: &Bimodule,
    flavor: LDendFlavor,
) -> Result<Structure> {
    ensure_o_shapes(t, m)?;
    if !check_o_operator(t, m)?.verdict {
        return Err(Error::Precondition(
            "the map fails the relative operator identity for this bimodule, so no split \
             structure is induced"
                .into(),
        ));
    }
    let reg = m.registry();
    let space = m.space();
    let rank = space.rank();
    let tv: Vec<Element> = (0..rank)
        .map(|i| t.apply(&Element::basis(space, reg, i)))
        .collect::<Result<_>>()?;
    let mut tri_r = Vec::with_capacity(rank);
    let mut tri_l = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut row_r = Vec::with_capacity(rank);
        let mut row_l = Vec::with_capacity(rank);
        for j in 0..rank {
            let vj = Element::basis(space, reg, j);
            row_r.push(m.eval_left(&tv[i], &vj, VAR_LM)?.coeffs().to_vec());
            let left = match flavor {
                LDendFlavor::Vertical => m.eval_right(&tv[i], &vj, VAR_LM)?.neg(),
                LDendFlavor::Horizontal => {
                    let vi = Element::basis(space, reg, i);
                    m.eval_right(&tv[j], &vi, VAR_NU)?
                        .substitute_var(VAR_NU, Affine::neg_sum(VAR_D, VAR_LM))?
                }
            };
            row_l.push(left.coeffs().to_vec());
        }
        tri_r.push(row_r);
        tri_l.push(row_l);
    }
    let mut ops = BTreeMap::new();
    ops.insert(OP_TRI_R.to_string(), LambdaTable::new(rank, reg, tri_r)?);
    ops.insert(OP_TRI_L.to_string(), LambdaTable::new(rank, reg, tri_l)?);
    Structure::new(AlgebraKind::LDendriform, space, reg, ops)
}

/// The compatible l-dendriform structure an invertible relative operator puts
/// on the *base* module: `a tri_r_lm b = t(l(a)_lm t^{-1}(b))` and
/// `a tri_l_lm b = -t(r(a)_lm t^{-1}(b))`.
///
/// The map must be square with a unit or parameter-generic determinant; the
/// result carries the determinant as denominator (exact inverses yield
/// denominator `1`).  Not gated on [`check_o_operator`] — the caller chooses
/// which verification to run on the result.
pub fn invertible_o_compatible_structure(t: &ModuleMap, m: &Bimodule) -> Result<ScaledStructure> {
    ensure_o_shapes(t, m)?;
    if m.space().rank() != m.base().rank() {
        return Err(Error::NotInvertible("the map is not square".into()));
    }
    let reg = m.registry();
    let inv = t.inverse_scaled()?;
    let base_module = m.base().module();
    let rank = base_module.rank();
    let tinv: Vec<Element> = (0..rank)
        .map(|j| inv.map.apply(&Element::basis(base_module, reg, j)))
        .collect::<Result<_>>()?;
    let mut tri_r = Vec::with_capacity(rank);
    let mut tri_l = Vec::with_capacity(rank);
    for i in 0..rank {
        let a = Element::basis(base_module, reg, i);
        let mut row_r = Vec::with_capacity(rank);
        let mut row_l = Vec::with_capacity(rank);
        for tinv_j in &tinv {
            row_r.push(t.apply(&m.eval_left(&a, tinv_j, VAR_LM)?)?.coeffs().to_vec());
            row_l.push(t.apply(&m.eval_right(&a, tinv_j, VAR_LM)?)?.neg().coeffs().to_vec());
        }
        tri_r.push(row_r);
        tri_l.push(row_l);
    }
    let mut ops = BTreeMap::new();
    ops.insert(OP_TRI_R.to_string(), LambdaTable::new(rank, reg, tri_r)?);
    ops.insert(OP_TRI_L.to_string(), LambdaTable::new(rank, reg, tri_l)?);
    let structure = Structure::new(AlgebraKind::LDendriform, base_module, reg, ops)?;
    Ok(ScaledStructure { structure, denominator: inv.denominator })
}

// ---------------------------------------------------------------------------
// Lie-side operators
// ---------------------------------------------------------------------------

/// A lie structure acting on a free space through one action table
/// (`rho(a)_lm u`) — the one-sided companion of a bimodule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieRepresentation {
    base: Structure,
    space: Arc<FreeModule>,
    rho: ActionTable,
}

impl LieRepresentation {
    /// Build and validate a representation.
    pub fn new(base: &Structure, space: &Arc<FreeModule>, rho: ActionTable) -> Result<Self> {
        if base.kind() != AlgebraKind::Lie {
            return Err(Error::WrongKind {
                expected: "lie".into(),
                found: base.kind().name().into(),
            });
        }
        if rho.alg_rank() != base.rank() || rho.space_rank() != space.rank() {
            return Err(Error::ModuleMismatch(format!(
                "the action table must be {} x {} for this base and space",
                base.rank(),
                space.rank()
            )));
        }
        Ok(LieRepresentation { base: base.clone(), space: Arc::clone(space), rho })
    }

    /// The adjoint representation: the structure acting on its own module
    /// through its bracket.
    pub fn adjoint(s: &Structure) -> Result<LieRepresentation> {
        if s.kind() != AlgebraKind::Lie {
            return Err(Error::WrongKind { expected: "lie".into(), found: s.kind().name().into() });
        }
        let rho = ActionTable::from_lambda_table(s.op(OP_BRACKET)?);
        LieRepresentation::new(s, s.module(), rho)
    }

    /// The base structure.
    pub fn base(&self) -> &Structure {
        &self.base
    }

    /// The space acted on.
    pub fn space(&self) -> &Arc<FreeModule> {
        &self.space
    }

    /// The action table.
    pub fn rho(&self) -> &ActionTable {
        &self.rho
    }

    /// Evaluate `rho(a)_lv u` by sesquilinearity.
    pub fn eval(&self, a: &Element, u: &Element, lv: crate::polyring::VarId) -> Result<Element> {
        eval_action_raw(self.base.module(), &self.space, self.base.registry(), &self.rho, a, u, lv)
    }
}

/// Check the lie-side relative operator identity for `t` against a
/// representation: `[t(u)_lm t(v)] = t( rho(t(u))_lm v - rho(t(v))_{-d-lm} u )`.
pub fn check_lie_o_operator(t: &ModuleMap, rep: &LieRepresentation) -> Result<CheckReport> {
    if !same_module(&t.source, rep.space()) || !same_module(&t.target, rep.base().module()) {
        return Err(Error::ModuleMismatch(
            "the map must send the representation's space into its base module".into(),
        ));
    }
    let reg = rep.base().registry();
    let space = rep.space();
    let tv: Vec<Element> = (0..space.rank())
        .map(|i| t.apply(&Element::basis(space, reg, i)))
        .collect::<Result<_>>()?;
    report_over_pairs("lie_o_operator", space, |i, j| {
        let u = Element::basis(space, reg, i);
        let v = Element::basis(space, reg, j);
        let lhs = rep.base().eval_product(OP_BRACKET, &tv[i], &tv[j], VAR_LM)?;
        let inner = rep.eval(&tv[i], &v, VAR_LM)?.sub(
            &rep.eval(&tv[j], &u, VAR_NU)?
                .substitute_var(VAR_NU, Affine::neg_sum(VAR_D, VAR_LM))?,
        );
        Ok(lhs.sub(&t.apply(&inner)?))
    })
}

/// The single product a weight-zero Rota-Baxter operator on a lie structure
/// defines: `a o_lm b = [r(a)_lm b]`, tagged left-symmetric.  Returned
/// unverified.
pub fn rota_baxter_left_symmetric(s: &Structure, r: &ModuleMap) -> Result<Structure> {
    if s.kind() != AlgebraKind::Lie {
        return Err(Error::WrongKind { expected: "lie".into(), found: s.kind().name().into() });
    }
    ensure_endomap(r, s)?;
    let reg = s.registry();
    let rank = s.rank();
    let mut entries = Vec::with_capacity(rank);
    for i in 0..rank {
        let ra = r.apply(&s.basis_element(i))?;
        let mut row = Vec::with_capacity(rank);
        for j in 0..rank {
            let b = s.basis_element(j);
            row.push(s.eval_product(OP_BRACKET, &ra, &b, VAR_LM)?.coeffs().to_vec());
        }
        entries.push(row);
    }
    let mut ops = BTreeMap::new();
    ops.insert(OP_CIRC.to_string(), LambdaTable::new(rank, reg, entries)?);
    Structure::new(AlgebraKind::LeftSymmetric, s.module(), reg, ops)
}

/// The split structure a *commuting* pair of weight-zero Rota-Baxter
/// operators on a lie structure defines:
/// `a tri_r_lm b = [r1(r2(a))_lm b]` and `a tri_l_lm b = [r2(a)_lm r1(b)]`,
/// tagged l-dendriform.  Returned unverified; refuses a non-commuting pair.
pub fn commuting_pair_l_dendriform(
    s: &Structure,
    r1: &ModuleMap,
    r2: &ModuleMap,
) -> Result<Structure> {
    if s.kind() != AlgebraKind::Lie {
        return Err(Error::WrongKind { expected: "lie".into(), found: s.kind().name().into() });
    }
    ensure_endomap(r1, s)?;
    ensure_endomap(r2, s)?;
    if r1.then(r2)? != r2.then(r1)? {
        return Err(Error::Precondition(
            "non-commuting pair: the two operators must commute as module maps".into(),
        ));
    }
    let reg = s.registry();
    let rank = s.rank();
    let r12 = r2.then(r1)?;
    let mut tri_r = Vec::with_capacity(rank);
    let mut tri_l = Vec::with_capacity(rank);
    for i in 0..rank {
        let a = s.basis_element(i);
        let r12a = r12.apply(&a)?;
        let r2a = r2.apply(&a)?;
        let mut row_r = Vec::with_capacity(rank);
        let mut row_l = Vec::with_capacity(rank);
        for j in 0..rank {
            let b = s.basis_element(j);
            row_r.push(s.eval_product(OP_BRACKET, &r12a, &b, VAR_LM)?.coeffs().to_vec());
            let r1b = r1.apply(&b)?;
            row_l.push(s.eval_product(OP_BRACKET, &r2a, &r1b, VAR_LM)?.coeffs().to_vec());
        }
        tri_r.push(row_r);
        tri_l.push(row_l);
    }
    let mut ops = BTreeMap::new();
    ops.insert(OP_TRI_R.to_string(), LambdaTable::new(rank, reg, tri_r)?);
    ops.insert(OP_TRI_L.to_string(), LambdaTable::new(rank, reg, tri_l)?);
    Structure::new(AlgebraKind::LDendriform, s.module(), reg, ops)
}

// ---------------------------------------------------------------------------
// Compatibility of relative operators
// ---------------------------------------------------------------------------

/// Check the mixed identity making two relative operators on one bimodule
/// compatible:
/// `t1(u) o t2(v) + t2(u) o t1(v) =
///  t1( l(t2(u)) v + r(t2(v)) u ) + t2( l(t1(u)) v + r(t1(v)) u )`
/// with the usual index placement.  Not gated on the individual operator
/// checks.
pub fn check_compatible_o_operators(
    t1: &ModuleMap,
    t2: &ModuleMap,
    m: &Bimodule,
) -> Result<CheckReport> {
    ensure_o_shapes(t1, m)?;
    ensure_o_shapes(t2, m)?;
    let reg = m.registry();
    let space = m.space();
    let apply_basis = |t: &ModuleMap| -> Result<Vec<Element>> {
        (0..space.rank()).map(|i| t.apply(&Element::basis(space, reg, i))).collect()
    };
    let t1v = apply_basis(t1)?;
    let t2v = apply_basis(t2)?;
    report_over_pairs("compatible_o", space, |i, j| {
        let u = Element::basis(space, reg, i);
        let v = Element::basis(space, reg, j);
        let lhs = m
            .base()
            .eval_product(OP_CIRC, &t1v[i], &t2v[j], VAR_LM)?
            .add(&m.base().eval_product(OP_CIRC, &t2v[i], &t1v[j], VAR_LM)?);
        let rhs = t1
            .apply(&o_inner(m, &t2v[i], &t2v[j], &u, &v)?)?
            .add(&t2.apply(&o_inner(m, &t1v[i], &t1v[j], &u, &v)?)?);
        Ok(lhs.sub(&rhs))
    })
}

/// Cross-check compatibility through the symbolic pencil `k1*t1 + k2*t2`:
/// one relative operator check whose verdict is true exactly when both maps
/// are relative operators *and* the mixed identity holds (the `k1^2`, `k2^2`,
/// and `k1*k2` coefficients of the residual, respectively).
pub fn pencil_o_operator_check(
    t1: &ModuleMap,
    t2: &ModuleMap,
    m: &Bimodule,
) -> Result<CheckReport> {
    let reg = m.registry();
    let k1 = Poly::var(reg, VAR_K1);
    let k2 = Poly::var(reg, VAR_K2);
    let combined = t1.scale_poly(&k1)?.add(&t2.scale_poly(&k2)?)?;
    check_o_operator(&combined, m)
}

/// Check the twisted condition tying a candidate Nijenhuis operator `n` on
/// the base to a relative operator `t`:  writing `nt = n . t`,
/// `n( nt(u) o t(v) + t(u) o nt(v) ) =
///  n( t( l(nt(u)) v + r(nt(v)) u ) + nt( l(t(u)) v + r(t(v)) u ) )`
/// with the usual index placement.  When `n` is invertible and `t` is a
/// relative operator, this condition makes `nt` one as well, compatible with
/// `t`.
pub fn nt_check(n: &ModuleMap, t: &ModuleMap, m: &Bimodule) -> Result<CheckReport> {
    ensure_o_shapes(t, m)?;
    let base_module = m.base().module();
    if !same_module(&n.source, base_module) || !same_module(&n.target, base_module) {
        return Err(Error::ModuleMismatch(
            "the twisting operator must map the base module to itself".into(),
        ));
    }
    let reg = m.registry();
    let space = m.space();
    let nt = t.then(n)?;
    report_over_pairs("nt_condition", space, |i, j| {
        let u = Element::basis(space, reg, i);
        let v = Element::basis(space, reg, j);
        let tu = t.apply(&u)?;
        let tv = t.apply(&v)?;
        let ntu = nt.apply(&u)?;
        let ntv = nt.apply(&v)?;
        let lhs = n.apply(
            &m.base()
                .eval_product(OP_CIRC, &ntu, &tv, VAR_LM)?
                .add(&m.base().eval_product(OP_CIRC, &tu, &ntv, VAR_LM)?),
        )?;
        let rhs = n.apply(
            &t.apply(&o_inner(m, &ntu, &ntv, &u, &v)?)?
                .add(&nt.apply(&o_inner(m, &tu, &tv, &u, &v)?)?),
        )?;
        Ok(lhs.sub(&rhs))
    })
}

/// The quotient `t1 . t2^{-1}` of two operators with a common source and
/// target, inverted through the adjugate.  For a compatible pair of relative
/// operators with `t2` invertible, the quotient is a Nijenhuis operator on
/// the base.
pub fn quotient_nijenhuis(t1: &ModuleMap, t2: &ModuleMap) -> Result<ScaledModuleMap> {
    if !same_module(&t1.source, &t2.source) || !same_module(&t1.target, &t2.target) {
        return Err(Error::ModuleMismatch(
            "the operators must share source and target to form a quotient".into(),
        ));
    }
    let inv = t2.inverse_scaled()?;
    let map = inv.map.then(t1)?;
    Ok(ScaledModuleMap { map, denominator: inv.denominator })
}

// ---------------------------------------------------------------------------
// Compatibility of l-dendriform structures
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum NestShape {
    /// `outer(a, inner(b, c)_mu)_lm`
    NestBC,
    /// `outer(inner(a, b)_lm, c)_{lm+mu}`
    NestAB,
    /// `outer(b, inner(a, c)_lm)_mu`
    NestAC,
    /// `outer(inner(b, a)_mu, c)_{lm+mu}`
    NestBA,
}

struct MixClause {
    sign: i64,
    outer: &'static str,
    inner: &'static str,
    shape: NestShape,
}

const COMPAT_LD_1: &[MixClause] = &[
    MixClause { sign: 1, outer: OP_TRI_R, inner: OP_TRI_R, shape: NestShape::NestBC },
    MixClause { sign: -1, outer: OP_TRI_R, inner: OP_TRI_R, shape: NestShape::NestAB },
    MixClause { sign: -1, outer: OP_TRI_R, inner: OP_TRI_L, shape: NestShape::NestAB },
    MixClause { sign: -1, outer: OP_TRI_R, inner: OP_TRI_R, shape: NestShape::NestAC },
    MixClause { sign: 1, outer: OP_TRI_R, inner: OP_TRI_R, shape: NestShape::NestBA },
    MixClause { sign: 1, outer: OP_TRI_R, inner: OP_TRI_L, shape: NestShape::NestBA },
];

const COMPAT_LD_2: &[MixClause] = &[
    MixClause { sign: 1, outer: OP_TRI_R, inner: OP_TRI_L, shape: NestShape::NestBC },
    MixClause { sign: -1, outer: OP_TRI_L, inner: OP_TRI_R, shape: NestShape::NestAB },
    MixClause { sign: -1, outer: OP_TRI_L, inner: OP_TRI_R, shape: NestShape::NestAC },
    MixClause { sign: -1, outer: OP_TRI_L, inner: OP_TRI_L, shape: NestShape::NestAC },
    MixClause { sign: 1, outer: OP_TRI_L, inner: OP_TRI_L, shape: NestShape::NestBA },
];

fn mix_term(
    outer_s: &Structure,
    inner_s: &Structure,
    cl: &MixClause,
    a: &Element,
    b: &Element,
    c: &Element,
) -> Result<Element> {
    let term = match cl.shape {
        NestShape::NestBC => {
            let inner = inner_s.eval_product(cl.inner, b, c, VAR_MU)?;
            outer_s.eval_product(cl.outer, a, &inner, VAR_LM)?
        }
        NestShape::NestAB => {
            let inner = inner_s.eval_product(cl.inner, a, b, VAR_LM)?;
            outer_s
                .eval_product(cl.outer, &inner, c, VAR_NU)?
                .substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))?
        }
        NestShape::NestAC => {
            let inner = inner_s.eval_product(cl.inner, a, c, VAR_LM)?;
            outer_s.eval_product(cl.outer, b, &inner, VAR_MU)?
        }
        NestShape::NestBA => {
            let inner = inner_s.eval_product(cl.inner, b, a, VAR_MU)?;
            outer_s
                .eval_product(cl.outer, &inner, c, VAR_NU)?
                .substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))?
        }
    };
    Ok(if cl.sign < 0 { term.neg() } else { term })
}

/// Mixed residual of one compatibility identity at a basis triple: each
/// clause is summed over both assignments of the two structures to the outer
/// and inner slots.  With `s1 = s2` this is twice the corresponding axiom
/// residual.
fn mixed_ld_residual(
    s1: &Structure,
    s2: &Structure,
    clauses: &[MixClause],
    p: usize,
    q: usize,
    r: usize,
) -> Result<Element> {
    let a = s1.basis_element(p);
    let b = s1.basis_element(q);
    let c = s1.basis_element(r);
    let mut acc = Element::zero(s1.module(), s1.registry());
    for cl in clauses {
        acc = acc.add(&mix_term(s1, s2, cl, &a, &b, &c)?);
        acc = acc.add(&mix_term(s2, s1, cl, &a, &b, &c)?);
    }
    Ok(acc)
}

fn ensure_ld_pair(s1: &Structure, s2: &Structure) -> Result<()> {
    for s in [s1, s2] {
        if s.kind() != AlgebraKind::LDendriform {
            return Err(Error::WrongKind {
                expected: "l-dendriform".into(),
                found: s.kind().name().into(),
            });
        }
    }
    if !same_module(s1.module(), s2.module()) {
        return Err(Error::ModuleMismatch(
            "the structures must live on the same module".into(),
        ));
    }
    if !Arc::ptr_eq(s1.registry(), s2.registry()) && s1.registry() != s2.registry() {
        return Err(Error::RegistryMismatch(
            "the structures use different variable registries".into(),
        ));
    }
    Ok(())
}

/// Check the two mixed identities making a pair of l-dendriform structures
/// on one module compatible (every pencil `k1*s1 + k2*s2` is again
/// l-dendriform).  With `s1 = s2` the verdict coincides with the plain
/// axiom check.
pub fn check_compatible_l_dendriform(s1: &Structure, s2: &Structure) -> Result<CheckReport> {
    ensure_ld_pair(s1, s2)?;
    let ids = vec!["compatible_ld_1".to_string(), "compatible_ld_2".to_string()];
    let module = s1.module();
    let n = s1.rank();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for (id, clauses) in
                    [("compatible_ld_1", COMPAT_LD_1), ("compatible_ld_2", COMPAT_LD_2)]
                {
                    let res = mixed_ld_residual(s1, s2, clauses, p, q, r)?;
                    if !res.is_zero() {
                        let violation = Violation {
                            axiom_id: id.to_string(),
                            witness: vec![p, q, r],
                            witness_names: vec![
                                module.name(p).to_string(),
                                module.name(q).to_string(),
                                module.name(r).to_string(),
                            ],
                            residual: res.nonzero_entries(),
                        };
                        return Ok(CheckReport::fail(ids, violation));
                    }
                }
            }
        }
    }
    Ok(CheckReport::pass(ids))
}

/// Cross-check l-dendriform compatibility through the symbolic pencil: build
/// the structure with tables `k1*s1 + k2*s2` and run the plain axiom check.
/// Its verdict is true exactly when both structures satisfy the axioms *and*
/// the mixed identities hold.
pub fn l_dendriform_pencil_check(s1: &Structure, s2: &Structure) -> Result<CheckReport> {
    ensure_ld_pair(s1, s2)?;
    let reg = s1.registry();
    let k1 = Poly::var(reg, VAR_K1);
    let k2 = Poly::var(reg, VAR_K2);
    let rank = s1.rank();
    let mut ops = BTreeMap::new();
    for op in [OP_TRI_R, OP_TRI_L] {
        let ta = s1.op(op)?;
        let tb = s2.op(op)?;
        let mut entries = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut row = Vec::with_capacity(rank);
            for j in 0..rank {
                let cell = ta
                    .cell(i, j)
                    .iter()
                    .zip(tb.cell(i, j))
                    .map(|(pa, pb)| pa.mul(&k1).add(&pb.mul(&k2)))
                    .collect();
                row.push(cell);
            }
            entries.push(row);
        }
        ops.insert(op.to_string(), LambdaTable::new(rank, reg, entries)?);
    }
    Structure::new(AlgebraKind::LDendriform, s1.module(), reg, ops)?.check_axioms()
}

/// The compatible pair of l-dendriform structures two compatible relative
/// operators induce on the bimodule's space: both vertical-flavor induced
/// structures.  Each factor is gated on its own relative operator check.
pub fn compatible_pair_from_o_operators(
    t1: &ModuleMap,
    t2: &ModuleMap,
    m: &Bimodule,
) -> Result<(Structure, Structure)> {
    Ok((
        induced_l_dendriform(t1, m, LDendFlavor::Vertical)?,
        induced_l_dendriform(t2, m, LDendFlavor::Vertical)?,
    ))
}
