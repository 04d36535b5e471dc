//! Tensor-square elements over a free module, the quadratic double-bracket
//! residual on left-symmetric structures, and the correspondence between its
//! symmetric solutions and relative operators.
//!
//! A [`TensorElement2`] stores `r = sum c_{pq}(d1, d2) e_p (x) e_q`, where the
//! slot variables `d1`, `d2` record the translation generator acting on the
//! first and second tensor factor.  [`double_bracket`] expands the quadratic
//! expression `{{r, r}}` into a [`TensorElement3`], working modulo the
//! diagonal action of the translation generator on three factors (every
//! coefficient is reduced by `d3 -> -d1-d2`), and [`check_s_equation`]
//! reports whether it vanishes.
//!
//! The operator side of the correspondence is a [`ConformalMap`]: a matrix of
//! polynomials in `lm` and `d` sending a module into another, with
//! [`ConformalMap::at_zero`] as its underlying plain module map.
//! [`t_from_r`] reads a map off a tensor through the dual-basis pairing,
//! [`r_from_t`] embeds a map as a symmetric tensor over the semidirect
//! product with the dualized bimodule, and [`canonical_r`] builds the
//! distinguished symmetric solution attached to an l-dendriform structure.

use std::sync::Arc;

use crate::bimodule::{
    dual_bimodule, l_dendriform_dual_bimodule, same_module, semidirect_product, Bimodule,
    LDendFlavor,
};
use crate::calgebra::{
    AlgebraKind, CheckReport, FreeModule, Structure, Violation, OP_BRACKET, OP_CIRC,
};
use crate::error::{Error, Result};
use crate::operators::ModuleMap;
use crate::polyring::{
    rat_int, Affine, Poly, VarRegistry, VarRole, VAR_D, VAR_D1, VAR_D2, VAR_D3, VAR_LM, VAR_MU,
};

/// Default bound on the `lm`-degree of conformal-map entries.
pub const DEFAULT_LAMBDA_DEGREE_CAP: usize = 6;

fn check_slot_vars(reg: &Arc<VarRegistry>, p: &Poly, context: &str) -> Result<()> {
    for v in p.vars_used() {
        let ok = v == VAR_D1 || v == VAR_D2 || reg.role(v) == VarRole::Parameter;
        if !ok {
            return Err(Error::DisallowedVariable(reg.name(v).to_string(), context.into()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tensor elements
// ---------------------------------------------------------------------------

/// An element of the tensor square of a free module:
/// `sum c_{pq}(d1, d2) e_p (x) e_q` with parameter-aware polynomial
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement2 {
    base: Arc<FreeModule>,
    reg: Arc<VarRegistry>,
    coeffs: Vec<Vec<Poly>>,
}

impl TensorElement2 {
    /// Build and validate a tensor from its coefficient matrix
    /// (`coeffs[p][q]` multiplies `e_p (x) e_q`).
    pub fn new(
        base: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        coeffs: Vec<Vec<Poly>>,
    ) -> Result<Self> {
        let n = base.rank();
        if coeffs.len() != n || coeffs.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidDefinition(format!(
                "tensor coefficient matrix must be {n} x {n} for this module"
            )));
        }
        for row in &coeffs {
            for p in row {
                check_slot_vars(reg, p, "tensor coefficients may use only d1, d2, and parameters")?;
            }
        }
        Ok(TensorElement2 { base: Arc::clone(base), reg: Arc::clone(reg), coeffs })
    }

    /// The zero tensor.
    pub fn zero(base: &Arc<FreeModule>, reg: &Arc<VarRegistry>) -> Self {
        let n = base.rank();
        TensorElement2 {
            base: Arc::clone(base),
            reg: Arc::clone(reg),
            coeffs: vec![vec![Poly::zero(reg); n]; n],
        }
    }

    /// The module both tensor factors come from.
    pub fn base(&self) -> &Arc<FreeModule> {
        &self.base
    }

    /// The variable registry.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    /// The coefficient of `e_p (x) e_q`.
    pub fn coeff(&self, p: usize, q: usize) -> &Poly {
        &self.coeffs[p][q]
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Poly::is_zero)
    }

    /// All nonzero entries as `(p, q, coefficient)`.
    pub fn nonzero_terms(&self) -> Vec<(usize, usize, &Poly)> {
        let mut out = Vec::new();
        for (p, row) in self.coeffs.iter().enumerate() {
            for (q, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out.push((p, q, c));
                }
            }
        }
        out
    }

    /// Entry-wise sum.
    pub fn add(&self, other: &TensorElement2) -> Result<TensorElement2> {
        if !same_module(&self.base, &other.base) {
            return Err(Error::ModuleMismatch(
                "the tensors live on different modules".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.add(b)).collect())
            .collect();
        Ok(TensorElement2 {
            base: Arc::clone(&self.base),
            reg: Arc::clone(&self.reg),
            coeffs,
        })
    }

    /// Entry-wise negation.
    pub fn neg(&self) -> TensorElement2 {
        let coeffs =
            self.coeffs.iter().map(|row| row.iter().map(Poly::neg).collect()).collect();
        TensorElement2 { base: Arc::clone(&self.base), reg: Arc::clone(&self.reg), coeffs }
    }

    /// The factor-swapped tensor: `c'_{pq}(d1, d2) = c_{qp}(d2, d1)`.
    pub fn flip(&self) -> TensorElement2 {
        let n = self.base.rank();
        let swap: std::collections::BTreeMap<_, _> = [
            (VAR_D1, Affine::var(VAR_D2)),
            (VAR_D2, Affine::var(VAR_D1)),
        ]
        .into();
        let coeffs = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        self.coeffs[q][p]
                            .substitute_affine(&swap)
                            .expect("slot variables are substitutable")
                    })
                    .collect()
            })
            .collect();
        TensorElement2 { base: Arc::clone(&self.base), reg: Arc::clone(&self.reg), coeffs }
    }

    /// True when the tensor equals its own flip.
    pub fn is_symmetric(&self) -> bool {
        *self == self.flip()
    }
}

/// An element of the tensor cube of a free module, stored modulo the diagonal
/// translation action: coefficients `c_{pqr}(d1, d2)` never mention `d3`
/// (it has been eliminated by `d3 -> -d1-d2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement3 {
    base: Arc<FreeModule>,
    reg: Arc<VarRegistry>,
    coeffs: Vec<Vec<Vec<Poly>>>,
}

impl TensorElement3 {
    pub(crate) fn from_reduced(
        base: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        coeffs: Vec<Vec<Vec<Poly>>>,
    ) -> Self {
        TensorElement3 { base: Arc::clone(base), reg: Arc::clone(reg), coeffs }
    }

    /// The module the tensor factors come from.
    pub fn base(&self) -> &Arc<FreeModule> {
        &self.base
    }

    /// The coefficient of `e_p (x) e_q (x) e_r` (post-reduction).
    pub fn coeff(&self, p: usize, q: usize, r: usize) -> &Poly {
        &self.coeffs[p][q][r]
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().flatten().all(Poly::is_zero)
    }

    /// All nonzero entries as `(p, q, r, coefficient)`.
    pub fn nonzero_terms(&self) -> Vec<(usize, usize, usize, &Poly)> {
        let mut out = Vec::new();
        for (p, plane) in self.coeffs.iter().enumerate() {
            for (q, row) in plane.iter().enumerate() {
                for (r, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        out.push((p, q, r, c));
                    }
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Conformal maps
// ---------------------------------------------------------------------------

/// A matrix-valued conformal map between free modules:
/// `T_lm(v_i) = sum_j rows[i][j](lm, d) e_j`, with polynomial entries in `lm`,
/// `d`, and parameters.  Specializing `lm -> 0` yields an ordinary
/// [`ModuleMap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalMap {
    source: Arc<FreeModule>,
    target: Arc<FreeModule>,
    reg: Arc<VarRegistry>,
    rows: Vec<Vec<Poly>>,
}

impl ConformalMap {
    /// Build and validate a map with the default `lm`-degree cap.
    pub fn new(
        source: &Arc<FreeModule>,
        target: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        rows: Vec<Vec<Poly>>,
    ) -> Result<Self> {
        Self::with_degree_cap(source, target, reg, rows, DEFAULT_LAMBDA_DEGREE_CAP)
    }

    /// Build and validate a map with an explicit `lm`-degree cap.
    pub fn with_degree_cap(
        source: &Arc<FreeModule>,
        target: &Arc<FreeModule>,
        reg: &Arc<VarRegistry>,
        rows: Vec<Vec<Poly>>,
        cap: usize,
    ) -> Result<Self> {
        if rows.len() != source.rank() || rows.iter().any(|row| row.len() != target.rank()) {
            return Err(Error::InvalidDefinition(format!(
                "conformal map must be {} x {} for these modules",
                source.rank(),
                target.rank()
            )));
        }
        for row in &rows {
            for p in row {
                for v in p.vars_used() {
                    let ok = v == VAR_D || v == VAR_LM || reg.role(v) == VarRole::Parameter;
                    if !ok {
                        return Err(Error::DisallowedVariable(
                            reg.name(v).to_string(),
                            "conformal-map entries may use only lm, d, and parameters".into(),
                        ));
                    }
                }
                let found = p.degree_in(VAR_LM) as usize;
                if found > cap {
                    return Err(Error::DegreeTooLarge {
                        what: "conformal-map entry lambda degree".into(),
                        found,
                        bound: cap,
                    });
                }
            }
        }
        Ok(ConformalMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            reg: Arc::clone(reg),
            rows,
        })
    }

    /// View a plain module map as a conformal map constant in `lm`.
    pub fn from_module_map(t: &ModuleMap) -> ConformalMap {
        ConformalMap {
            source: Arc::clone(t.source()),
            target: Arc::clone(t.target()),
            reg: Arc::clone(t.registry()),
            rows: t.rows().to_vec(),
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

    /// The row matrix.
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

    /// The underlying plain map, obtained by `lm -> 0`.
    pub fn at_zero(&self) -> Result<ModuleMap> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.substitute_var(VAR_LM, Affine::constant(rat_int(0))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ModuleMap::new(&self.source, &self.target, &self.reg, rows)
    }
}

// ---------------------------------------------------------------------------
// The double bracket and its vanishing check
// ---------------------------------------------------------------------------

/// Expand the quadratic double bracket `{{r, r}}` of a tensor over a
/// left-symmetric structure into the tensor cube, reduced modulo the diagonal
/// translation action.
///
/// The three constituent sums place a product of two tensor factors into the
/// first, second, and third slot respectively; the first two use the
/// structure's own product, the third uses its commutator bracket.  Slot
/// bookkeeping: a coefficient variable follows its factor into the slot it
/// lands in; a factor consumed as the left product argument contributes at
/// `-mu`, as the right argument at `mu +` the landing slot's variable; the
/// product's own `d` becomes the landing slot's variable; finally `mu` is
/// renamed to the slot variable its defining substitution names, and the
/// result is reduced by `d3 -> -d1-d2`.
pub fn double_bracket(s: &Structure, r: &TensorElement2) -> Result<TensorElement3> {
    if s.kind() != AlgebraKind::LeftSymmetric {
        return Err(Error::WrongKind {
            expected: "left-symmetric".into(),
            found: s.kind().name().into(),
        });
    }
    if !same_module(&r.base, s.module()) {
        return Err(Error::ModuleMismatch(
            "the tensor does not live on the structure's module".into(),
        ));
    }
    if !Arc::ptr_eq(&r.reg, s.registry()) && r.reg != *s.registry() {
        return Err(Error::RegistryMismatch(
            "the tensor and the structure use different variable registries".into(),
        ));
    }
    let reg = s.registry();
    let table = s.op(OP_CIRC)?;
    let lie = s.commutator_lie()?;
    let bracket = lie.op(OP_BRACKET)?;
    let n = s.rank();
    let mut out = vec![vec![vec![Poly::zero(reg); n]; n]; n];
    let terms = r.nonzero_terms();

    let sub2 = |a: (crate::polyring::VarId, Affine), b: (crate::polyring::VarId, Affine)| {
        std::collections::BTreeMap::from([a, b])
    };

    for &(p, q, c1) in &terms {
        for &(s_, t, c2) in &terms {
            // First sum: the product of factor-two of one term with
            // factor-one of the other lands in slot 1; `mu -> d2`.
            let c1_s1 = c1.substitute_affine(&sub2(
                (VAR_D1, Affine::sum(VAR_MU, VAR_D1)),
                (VAR_D2, Affine::var(VAR_D3)),
            ))?;
            let c2_s1 = c2.substitute_affine(&sub2(
                (VAR_D1, Affine::var(VAR_D2)),
                (VAR_D2, Affine::neg_var(VAR_MU)),
            ))?;
            for (k, entry) in table.cell(t, p).iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let prod = entry.substitute_affine(&sub2(
                    (VAR_LM, Affine::var(VAR_MU)),
                    (VAR_D, Affine::var(VAR_D1)),
                ))?;
                let f = c1_s1
                    .mul(&c2_s1)
                    .mul(&prod)
                    .substitute_var(VAR_MU, Affine::var(VAR_D2))?;
                out[k][s_][q] = out[k][s_][q].add(&f);
            }

            // Second sum (subtracted): the same product lands in slot 2;
            // `mu -> d1`.
            let c1_s2 = c1.substitute_affine(&sub2(
                (VAR_D1, Affine::sum(VAR_MU, VAR_D2)),
                (VAR_D2, Affine::var(VAR_D3)),
            ))?;
            let c2_s2 = c2.substitute_var(VAR_D2, Affine::neg_var(VAR_MU))?;
            for (k, entry) in table.cell(t, p).iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let prod = entry.substitute_affine(&sub2(
                    (VAR_LM, Affine::var(VAR_MU)),
                    (VAR_D, Affine::var(VAR_D2)),
                ))?;
                let f = c1_s2
                    .mul(&c2_s2)
                    .mul(&prod)
                    .substitute_var(VAR_MU, Affine::var(VAR_D1))?;
                out[s_][k][q] = out[s_][k][q].sub(&f);
            }

            // Third sum (subtracted): the commutator bracket of the two
            // factor-twos lands in slot 3; `mu -> d1`.
            let c1_s3 = c1.substitute_var(VAR_D2, Affine::neg_var(VAR_MU))?;
            let c2_s3 = c2.substitute_affine(&sub2(
                (VAR_D1, Affine::var(VAR_D2)),
                (VAR_D2, Affine::sum(VAR_MU, VAR_D3)),
            ))?;
            for (k, entry) in bracket.cell(q, t).iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let br = entry.substitute_affine(&sub2(
                    (VAR_LM, Affine::var(VAR_MU)),
                    (VAR_D, Affine::var(VAR_D3)),
                ))?;
                let f = c1_s3
                    .mul(&c2_s3)
                    .mul(&br)
                    .substitute_var(VAR_MU, Affine::var(VAR_D1))?;
                out[p][s_][k] = out[p][s_][k].sub(&f);
            }
        }
    }

    for plane in &mut out {
        for row in plane {
            for c in row {
                *c = c.reduce_mod_diagonal();
            }
        }
    }
    Ok(TensorElement3::from_reduced(s.module(), reg, out))
}

/// Check whether the double bracket of a tensor vanishes; the first nonzero
/// coefficient is reported as a violation with its basis triple.
pub fn check_s_equation(s: &Structure, r: &TensorElement2) -> Result<CheckReport> {
    let db = double_bracket(s, r)?;
    let ids = vec!["s_equation".to_string()];
    let module = s.module();
    let n = module.rank();
    for p in 0..n {
        for q in 0..n {
            for k in 0..n {
                let c = db.coeff(p, q, k);
                if !c.is_zero() {
                    let names = [module.name(p), module.name(q), module.name(k)];
                    let violation = Violation {
                        axiom_id: "s_equation".to_string(),
                        witness: vec![p, q, k],
                        witness_names: names.iter().map(|s| s.to_string()).collect(),
                        residual: vec![(names.join("(x)"), c.clone())],
                    };
                    return Ok(CheckReport::fail(ids, violation));
                }
            }
        }
    }
    Ok(CheckReport::pass(ids))
}

// ---------------------------------------------------------------------------
// Tensor <-> operator correspondences
// ---------------------------------------------------------------------------

/// The conformal map a tensor defines through the dual-basis pairing: a term
/// `c(d1, d2) e_p (x) e_q` contributes `c(-lm-d, d) e_q` to the image of the
/// dual generator of `e_p`.  The map's source is the `_star` dual of the
/// tensor's module.
pub fn t_from_r(r: &TensorElement2) -> Result<ConformalMap> {
    let reg = &r.reg;
    let names: Vec<String> =
        r.base.names().iter().map(|n| format!("{n}_star")).collect();
    let dual = FreeModule::new(names)?;
    let n = r.base.rank();
    let mut rows = vec![vec![Poly::zero(reg); n]; n];
    let sub = std::collections::BTreeMap::from([
        (VAR_D1, Affine::neg_sum(VAR_LM, VAR_D)),
        (VAR_D2, Affine::var(VAR_D)),
    ]);
    for (p, q, c) in r.nonzero_terms() {
        rows[p][q] = rows[p][q].add(&c.substitute_affine(&sub)?);
    }
    ConformalMap::new(&dual, &r.base, reg, rows)
}

/// Embed a conformal map `t: V -> A` over a bimodule as a symmetric tensor
/// over the semidirect product of the base with the dualized bimodule.
///
/// The one-sided tensor places `a_{ij}(-d1-d2, d1)` on `e_j (x) v_i_star`
/// for `t_lm(v_i) = sum_j a_{ij}(lm, d) e_j`; the result is that tensor plus
/// its flip, returned together with the ambient semidirect structure it
/// lives in.
pub fn r_from_t(t: &ConformalMap, m: &Bimodule) -> Result<(TensorElement2, Structure)> {
    if !same_module(&t.source, m.space()) || !same_module(&t.target, m.base().module()) {
        return Err(Error::ModuleMismatch(
            "the conformal map must send the bimodule's space into its base module".into(),
        ));
    }
    let dual = dual_bimodule(m)?;
    let ambient = semidirect_product(&dual)?;
    let reg = m.registry();
    let n = m.base().rank();
    let total = ambient.rank();
    let mut coeffs = vec![vec![Poly::zero(reg); total]; total];
    let sub = std::collections::BTreeMap::from([
        (VAR_LM, Affine::neg_sum(VAR_D1, VAR_D2)),
        (VAR_D, Affine::var(VAR_D1)),
    ]);
    for (i, row) in t.rows.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            if !a.is_zero() {
                coeffs[j][n + i] = a.substitute_affine(&sub)?;
            }
        }
    }
    let r_t = TensorElement2::new(ambient.module(), reg, coeffs)?;
    let r = r_t.add(&r_t.flip())?;
    Ok((r, ambient))
}

/// The distinguished symmetric tensor attached to an l-dendriform structure:
/// `sum_i (e_i (x) e_i_star + e_i_star (x) e_i)` over the semidirect product
/// of the flavor's derived structure with its dualized bimodule.  Returns the
/// tensor together with that ambient structure.
pub fn canonical_r(s: &Structure, flavor: LDendFlavor) -> Result<(TensorElement2, Structure)> {
    let dual = l_dendriform_dual_bimodule(s, flavor)?;
    let ambient = semidirect_product(&dual)?;
    let reg = s.registry();
    let n = s.rank();
    let total = ambient.rank();
    let mut coeffs = vec![vec![Poly::zero(reg); total]; total];
    for i in 0..n {
        coeffs[i][n + i] = Poly::one(reg);
        coeffs[n + i][i] = Poly::one(reg);
    }
    let r = TensorElement2::new(ambient.module(), reg, coeffs)?;
    Ok((r, ambient))
}
