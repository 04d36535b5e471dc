//! Ansatz-based discovery and classification of operators.
//!
//! The workflow has three steps, each exact:
//!
//! 1. [`generate_system`] writes down the general candidate map of bounded
//!    derivation degree — `T(v_i) = sum_j sum_{e<=D} c_ije d^e e_j` with one
//!    fresh scalar unknown per `(i, j, e)` — and expands the chosen operator
//!    identity symbolically.  Collecting the coefficient of every
//!    derivation/lambda monomial turns the residual into a finite list of
//!    polynomial equations (degree at most 2) in the unknowns.
//! 2. [`SearchSubject::verify_family`] runs the direct checker on a candidate
//!    whose entries keep symbolic parameters, so one pass certifies a whole
//!    family at once; [`spot_check_family`] cross-checks such a pass on
//!    seeded random rational instantiations.
//! 3. [`ConstraintSystem::grid_enumerate`] exhaustively evaluates the system
//!    over a finite rational grid.  Unknowns that appear in no equation are
//!    reported as free directions rather than enumerated, the rest are split
//!    into independent blocks (two unknowns are linked when some equation
//!    mentions both), and every block assignment that solves its equations is
//!    re-validated by the direct checker before it is returned.
//!
//! No Groebner-style solving is attempted: symbolic family verification plus
//! finite-grid cross-checks are the supported, fully testable pairing.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bimodule::{ActionTable, Bimodule};
use crate::calgebra::{CheckReport, Element, FreeModule, LambdaTable, Structure};
use crate::error::{Error, Result};
use crate::operators::{
    check_nijenhuis, check_o_operator, check_rota_baxter, nijenhuis_residual,
    o_operator_residual, rota_baxter_residual, ModuleMap,
};
use crate::polyring::{rat_int, Poly, Rat, VarId, VarRegistry, VAR_D};

/// Default cap on grid points per independent block (`3^9`).
pub const DEFAULT_GRID_CAP: u128 = 19_683;

/// Block enumerations at least this large are split across worker threads.
const PARALLEL_THRESHOLD: usize = 4096;

// ---------------------------------------------------------------------------
// Subjects
// ---------------------------------------------------------------------------

/// The operator identity a search is about, together with the structure or
/// bimodule the candidates act on.
pub enum SearchSubject<'a> {
    /// Rota-Baxter operators of the given weight on a single-product
    /// structure; the weight may use only scalar parameters.
    RotaBaxter {
        /// The structure the operators act on.
        structure: &'a Structure,
        /// The weight of the Rota-Baxter identity.
        weight: Poly,
    },
    /// Nijenhuis operators on a single-product structure.
    Nijenhuis {
        /// The structure the operators act on.
        structure: &'a Structure,
    },
    /// Relative operators from a bimodule's space into its base.
    OOperator {
        /// The bimodule whose relative operator identity is searched.
        bimodule: &'a Bimodule,
    },
}

impl SearchSubject<'_> {
    /// The registry all inputs share.
    fn registry(&self) -> &Arc<VarRegistry> {
        match self {
            SearchSubject::RotaBaxter { structure, .. }
            | SearchSubject::Nijenhuis { structure } => structure.registry(),
            SearchSubject::OOperator { bimodule } => bimodule.registry(),
        }
    }

    /// Source and target modules of the candidate maps.
    fn shape(&self) -> (&Arc<FreeModule>, &Arc<FreeModule>) {
        match self {
            SearchSubject::RotaBaxter { structure, .. }
            | SearchSubject::Nijenhuis { structure } => (structure.module(), structure.module()),
            SearchSubject::OOperator { bimodule } => (bimodule.space(), bimodule.base().module()),
        }
    }

    /// Validate the subject up front so ansatz generation fails early and
    /// with the same errors the direct checker would raise.
    fn validate(&self) -> Result<()> {
        match self {
            SearchSubject::RotaBaxter { structure, weight } => {
                let probe = ModuleMap::zero(structure.module(), structure.module(), structure.registry());
                check_rota_baxter(structure, &probe, weight).map(|_| ())
            }
            SearchSubject::Nijenhuis { structure } => {
                let probe = ModuleMap::zero(structure.module(), structure.module(), structure.registry());
                check_nijenhuis(structure, &probe).map(|_| ())
            }
            SearchSubject::OOperator { .. } => Ok(()),
        }
    }

    /// Move the subject into a superset registry (one with the ansatz
    /// unknowns appended).
    fn lift(&self, reg: &Arc<VarRegistry>) -> Result<OwnedSubject> {
        Ok(match self {
            SearchSubject::RotaBaxter { structure, weight } => OwnedSubject::RotaBaxter {
                structure: lift_structure(structure, reg)?,
                weight: weight.lift(reg)?,
            },
            SearchSubject::Nijenhuis { structure } => OwnedSubject::Nijenhuis {
                structure: lift_structure(structure, reg)?,
            },
            SearchSubject::OOperator { bimodule } => OwnedSubject::OOperator {
                bimodule: lift_bimodule(bimodule, reg)?,
            },
        })
    }

    /// Run the direct checker for this subject on a candidate map whose
    /// entries may keep symbolic parameters.  A passing verdict certifies
    /// every rational instantiation of those parameters at once.
    pub fn verify_family(&self, map: &ModuleMap) -> Result<CheckReport> {
        match self {
            SearchSubject::RotaBaxter { structure, weight } => {
                check_rota_baxter(structure, map, weight)
            }
            SearchSubject::Nijenhuis { structure } => check_nijenhuis(structure, map),
            SearchSubject::OOperator { bimodule } => check_o_operator(map, bimodule),
        }
    }
}

/// A subject lifted into the extended registry, owned by the system.
enum OwnedSubject {
    RotaBaxter { structure: Structure, weight: Poly },
    Nijenhuis { structure: Structure },
    OOperator { bimodule: Bimodule },
}

impl OwnedSubject {
    fn residual(&self, map: &ModuleMap, i: usize, j: usize) -> Result<Element> {
        match self {
            OwnedSubject::RotaBaxter { structure, weight } => {
                rota_baxter_residual(structure, map, weight, i, j)
            }
            OwnedSubject::Nijenhuis { structure } => nijenhuis_residual(structure, map, i, j),
            OwnedSubject::OOperator { bimodule } => o_operator_residual(map, bimodule, i, j),
        }
    }

    fn check(&self, map: &ModuleMap) -> Result<CheckReport> {
        match self {
            OwnedSubject::RotaBaxter { structure, weight } => {
                check_rota_baxter(structure, map, weight)
            }
            OwnedSubject::Nijenhuis { structure } => check_nijenhuis(structure, map),
            OwnedSubject::OOperator { bimodule } => check_o_operator(map, bimodule),
        }
    }
}

// ---------------------------------------------------------------------------
// Registry lifting
// ---------------------------------------------------------------------------

fn lift_table(t: &LambdaTable, reg: &Arc<VarRegistry>) -> Result<LambdaTable> {
    let rank = t.rank();
    let mut entries = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut row = Vec::with_capacity(rank);
        for j in 0..rank {
            row.push(t.cell(i, j).iter().map(|p| p.lift(reg)).collect::<Result<Vec<_>>>()?);
        }
        entries.push(row);
    }
    LambdaTable::new(rank, reg, entries)
}

fn lift_structure(s: &Structure, reg: &Arc<VarRegistry>) -> Result<Structure> {
    let mut ops = BTreeMap::new();
    for (name, table) in s.op_tables() {
        ops.insert(name.clone(), lift_table(table, reg)?);
    }
    Structure::new(s.kind(), s.module(), reg, ops)
}

fn lift_action(t: &ActionTable, reg: &Arc<VarRegistry>) -> Result<ActionTable> {
    let mut entries = Vec::with_capacity(t.alg_rank());
    for i in 0..t.alg_rank() {
        let mut row = Vec::with_capacity(t.space_rank());
        for j in 0..t.space_rank() {
            row.push(t.cell(i, j).iter().map(|p| p.lift(reg)).collect::<Result<Vec<_>>>()?);
        }
        entries.push(row);
    }
    ActionTable::new(t.alg_rank(), t.space_rank(), reg, entries)
}

fn lift_bimodule(m: &Bimodule, reg: &Arc<VarRegistry>) -> Result<Bimodule> {
    Bimodule::new(
        &lift_structure(m.base(), reg)?,
        m.space(),
        lift_action(m.left(), reg)?,
        lift_action(m.right(), reg)?,
    )
}

// ---------------------------------------------------------------------------
// The ansatz and its constraint system
// ---------------------------------------------------------------------------

/// One ansatz coefficient: the unknown scalar `c` in the term
/// `c d^derivation_power e_(target_index)` of `T(v_(source_index))`.
#[derive(Clone, Debug)]
pub struct Unknown {
    /// The unknown's parameter name (`c<i>_<j>_<e>`).
    pub name: String,
    /// Index of the source basis element the term belongs to.
    pub source_index: usize,
    /// Index of the target basis element the term feeds.
    pub target_index: usize,
    /// Power of `d` in the term.
    pub derivation_power: usize,
    var: VarId,
}

/// The polynomial constraint system of an operator ansatz: the identity's
/// residual expanded symbolically, one equation per derivation/lambda
/// monomial.  A candidate map satisfies the operator identity exactly when
/// every equation vanishes at its coefficients.
pub struct ConstraintSystem {
    subject: OwnedSubject,
    extended: Arc<VarRegistry>,
    source: Arc<FreeModule>,
    target: Arc<FreeModule>,
    degree: usize,
    unknowns: Vec<Unknown>,
    equations: Vec<Poly>,
    ansatz: ModuleMap,
}

/// Generate the constraint system for candidate operators of derivation
/// degree at most `degree`.
///
/// The unknowns are appended to the subject's registry as fresh parameters
/// named `c<i>_<j>_<e>`; the subject's own tables are lifted alongside.  The
/// unknown count is `source rank * target rank * (degree + 1)`.
pub fn generate_system(subject: &SearchSubject<'_>, degree: usize) -> Result<ConstraintSystem> {
    subject.validate()?;
    let (source, target) = subject.shape();
    let (source, target) = (Arc::clone(source), Arc::clone(target));

    let mut names = Vec::new();
    let mut meta = Vec::new();
    for i in 0..source.rank() {
        for j in 0..target.rank() {
            for e in 0..=degree {
                names.push(format!("c{i}_{j}_{e}"));
                meta.push((i, j, e));
            }
        }
    }
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let extended = subject.registry().extend(&name_refs).map_err(|e| match e {
        Error::Parse(msg) => Error::InvalidDefinition(format!(
            "an ansatz coefficient name collides with a declared parameter ({msg})"
        )),
        other => other,
    })?;

    let unknowns: Vec<Unknown> = names
        .iter()
        .zip(&meta)
        .map(|(name, &(i, j, e))| {
            Ok(Unknown {
                name: name.clone(),
                source_index: i,
                target_index: j,
                derivation_power: e,
                var: extended.lookup(name)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut rows = vec![vec![Poly::zero(&extended); target.rank()]; source.rank()];
    for u in &unknowns {
        let term = Poly::var(&extended, u.var)
            .mul(&Poly::var(&extended, VAR_D).pow(u.derivation_power as u16));
        let cell = &mut rows[u.source_index][u.target_index];
        *cell = cell.add(&term);
    }
    let ansatz = ModuleMap::new(&source, &target, &extended, rows)?;

    let owned = subject.lift(&extended)?;
    let mut seen = BTreeSet::new();
    let mut equations = Vec::new();
    for i in 0..source.rank() {
        for j in 0..source.rank() {
            let residual = owned.residual(&ansatz, i, j)?;
            for coeff in residual.coeffs() {
                for (_, eq) in coeff.coefficients_by_dl_monomial() {
                    if eq.is_zero() {
                        continue;
                    }
                    if seen.insert(eq.to_string()) {
                        equations.push(eq);
                    }
                }
            }
        }
    }

    Ok(ConstraintSystem {
        subject: owned,
        extended,
        source,
        target,
        degree,
        unknowns,
        equations,
        ansatz,
    })
}

impl ConstraintSystem {
    /// The equations; each is a polynomial of degree at most 2 in the
    /// unknowns whose coefficients may keep the subject's own parameters.
    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }

    /// The ansatz coefficients in `(source, target, power)` order.
    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    /// The degree bound the system was generated for.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The registry the system lives in: the subject's registry with the
    /// unknowns appended as parameters.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.extended
    }

    /// The fully symbolic candidate map.
    pub fn ansatz_map(&self) -> &ModuleMap {
        &self.ansatz
    }

    /// Unknowns that appear in no equation: the identity holds regardless of
    /// their values, so grids never enumerate them.
    pub fn free_directions(&self) -> Vec<&str> {
        let used = self.used_vars();
        self.unknowns
            .iter()
            .filter(|u| !used.contains(&u.var))
            .map(|u| u.name.as_str())
            .collect()
    }

    fn used_vars(&self) -> BTreeSet<VarId> {
        self.equations.iter().flat_map(|e| e.vars_used()).collect()
    }

    fn bindings(&self, values: &[(String, Rat)]) -> Result<BTreeMap<VarId, Rat>> {
        let by_name: BTreeMap<&str, VarId> =
            self.unknowns.iter().map(|u| (u.name.as_str(), u.var)).collect();
        let mut bind = BTreeMap::new();
        for (name, v) in values {
            let var = *by_name.get(name.as_str()).ok_or_else(|| {
                Error::InvalidDefinition(format!("`{name}` is not an unknown of this ansatz"))
            })?;
            if bind.insert(var, v.clone()).is_some() {
                return Err(Error::InvalidDefinition(format!("duplicate value for `{name}`")));
            }
        }
        Ok(bind)
    }

    /// The candidate map with the given unknowns at rational values.
    /// Unmentioned unknowns stay symbolic; the map lives in this system's
    /// registry.
    pub fn instantiate(&self, values: &[(String, Rat)]) -> Result<ModuleMap> {
        let bind = self.bindings(values)?;
        let rows = self
            .ansatz
            .rows()
            .iter()
            .map(|row| row.iter().map(|p| p.eval_parameters(&bind)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ModuleMap::new(&self.source, &self.target, &self.extended, rows)
    }

    /// Whether every equation vanishes at the given values.  Unmentioned
    /// unknowns stay symbolic, so `true` means the system is satisfied for
    /// every value of the leftovers.
    pub fn holds_at(&self, values: &[(String, Rat)]) -> Result<bool> {
        let bind = self.bindings(values)?;
        for eq in &self.equations {
            if !eq.eval_parameters(&bind)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Instantiate the ansatz at the given values and run the direct checker
    /// on the result.  Unmentioned unknowns stay symbolic, so a passing
    /// verdict covers every value of them.
    pub fn check_point(&self, values: &[(String, Rat)]) -> Result<CheckReport> {
        let map = self.instantiate(values)?;
        self.subject.check(&map)
    }

    /// Exhaustively enumerate the grid with the default per-block cap.
    pub fn grid_enumerate(&self, values: &[Rat]) -> Result<GridSolutions> {
        self.grid_enumerate_capped(values, DEFAULT_GRID_CAP)
    }

    /// Exhaustively evaluate every assignment of grid values to the
    /// constrained unknowns, block by block.
    ///
    /// Unknowns linked by a shared equation form one block; the solution set
    /// is the cartesian product of the per-block solution sets, and each
    /// combined point is re-validated by the direct checker before it is
    /// kept.  Free directions are reported, never enumerated.  A block whose
    /// assignment count exceeds `cap` aborts with
    /// [`Error::GridTooLarge`].
    pub fn grid_enumerate_capped(&self, values: &[Rat], cap: u128) -> Result<GridSolutions> {
        let free: Vec<String> = self.free_directions().iter().map(|s| s.to_string()).collect();

        // Constrained unknowns, in ansatz order.
        let used = self.used_vars();
        let blocked: Vec<usize> = (0..self.unknowns.len())
            .filter(|&u| used.contains(&self.unknowns[u].var))
            .collect();
        let var_to_pos: BTreeMap<VarId, usize> = blocked
            .iter()
            .enumerate()
            .map(|(pos, &u)| (self.unknowns[u].var, pos))
            .collect();

        // Equations with no unknowns at all cannot be satisfied by any
        // assignment (they are nonzero in the subject's own parameters).
        let mut unconditional = false;
        let mut uf = UnionFind::new(blocked.len());
        let mut eq_positions: Vec<Vec<usize>> = Vec::with_capacity(self.equations.len());
        for eq in &self.equations {
            let positions: Vec<usize> = eq
                .vars_used()
                .into_iter()
                .filter_map(|v| var_to_pos.get(&v).copied())
                .collect();
            if positions.is_empty() {
                unconditional = true;
            }
            for w in positions.windows(2) {
                uf.union(w[0], w[1]);
            }
            eq_positions.push(positions);
        }
        if unconditional {
            return Ok(GridSolutions { free, points: Vec::new(), candidates: 0 });
        }

        // Group positions into blocks, each sorted in ansatz order.
        let root_of_pos: Vec<usize> = (0..blocked.len()).map(|p| uf.find(p)).collect();
        let mut blocks_by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (pos, &root) in root_of_pos.iter().enumerate() {
            blocks_by_root.entry(root).or_default().push(pos);
        }
        let block_index: BTreeMap<usize, usize> =
            blocks_by_root.keys().enumerate().map(|(b, &root)| (root, b)).collect();
        let blocks: Vec<Vec<usize>> = blocks_by_root.into_values().collect();

        let mut block_equations: Vec<Vec<&Poly>> = vec![Vec::new(); blocks.len()];
        for (eq, positions) in self.equations.iter().zip(&eq_positions) {
            block_equations[block_index[&root_of_pos[positions[0]]]].push(eq);
        }

        // Enumerate each block under the cap.
        let base = values.len();
        let mut candidates: u128 = 0;
        let mut block_solutions: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(blocks.len());
        for (block, eqs) in blocks.iter().zip(&block_equations) {
            let points = (base as u128)
                .checked_pow(block.len() as u32)
                .ok_or(Error::GridTooLarge { points: u128::MAX, cap })?;
            if points > cap {
                return Err(Error::GridTooLarge { points, cap });
            }
            let total = usize::try_from(points)
                .map_err(|_| Error::GridTooLarge { points, cap: usize::MAX as u128 })?;
            candidates += points;
            let vars: Vec<VarId> =
                block.iter().map(|&pos| self.unknowns[blocked[pos]].var).collect();
            block_solutions.push(enumerate_block(values, &vars, eqs, total));
        }

        // Combine per-block solutions into full assignments and re-validate.
        let blocked_names: Vec<String> =
            blocked.iter().map(|&u| self.unknowns[u].name.clone()).collect();
        let mut points = Vec::new();
        if block_solutions.iter().all(|sols| !sols.is_empty()) {
            let counts: Vec<usize> = block_solutions.iter().map(Vec::len).collect();
            let mut odo = vec![0usize; blocks.len()];
            'outer: loop {
                let mut assignment = vec![rat_int(0); blocked.len()];
                for (b, block) in blocks.iter().enumerate() {
                    let sol = &block_solutions[b][odo[b]];
                    for (k, &pos) in block.iter().enumerate() {
                        assignment[pos] = sol[k].clone();
                    }
                }
                let pairs: Vec<(String, Rat)> =
                    blocked_names.iter().cloned().zip(assignment).collect();
                if self.check_point(&pairs)?.verdict {
                    points.push(SolutionPoint { values: pairs });
                }
                for i in (0..blocks.len()).rev() {
                    odo[i] += 1;
                    if odo[i] < counts[i] {
                        continue 'outer;
                    }
                    odo[i] = 0;
                }
                break;
            }
        }
        points.sort_by(|a, b| {
            a.values.iter().map(|(_, v)| v).cmp(b.values.iter().map(|(_, v)| v))
        });
        Ok(GridSolutions { free, points, candidates })
    }
}

/// Scan every assignment of `values` to `vars` and keep those where all
/// equations vanish.  Large scans are split across scoped worker threads;
/// the result is in index order either way.
fn enumerate_block(
    values: &[Rat],
    vars: &[VarId],
    eqs: &[&Poly],
    total: usize,
) -> Vec<Vec<Rat>> {
    let base = values.len();
    let scan = |lo: usize, hi: usize| -> Vec<Vec<Rat>> {
        let mut out = Vec::new();
        for t in lo..hi {
            let mut bind = BTreeMap::new();
            let mut picked = Vec::with_capacity(vars.len());
            let mut rem = t;
            for &v in vars {
                let val = values[rem % base].clone();
                rem /= base;
                bind.insert(v, val.clone());
                picked.push(val);
            }
            let solved = eqs.iter().all(|e| {
                e.eval_parameters(&bind)
                    .expect("ansatz unknowns are parameters")
                    .is_zero()
            });
            if solved {
                out.push(picked);
            }
        }
        out
    };

    if total < PARALLEL_THRESHOLD {
        return scan(0, total);
    }
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .clamp(1, 8);
    if workers == 1 {
        return scan(0, total);
    }
    let chunk = total.div_ceil(workers);
    std::thread::scope(|sc| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(total);
            if lo < hi {
                handles.push(sc.spawn(move || scan(lo, hi)));
            }
        }
        let mut out = Vec::new();
        for h in handles {
            out.extend(h.join().expect("grid worker panicked"));
        }
        out
    })
}

/// Result of a grid enumeration.
#[derive(Clone, Debug)]
pub struct GridSolutions {
    /// Unknowns no equation mentions; any value satisfies the system.
    pub free: Vec<String>,
    /// Assignments of the constrained unknowns that solve the system and
    /// survive direct re-validation, canonically sorted.
    pub points: Vec<SolutionPoint>,
    /// Grid assignments evaluated across the independent blocks.
    pub candidates: u128,
}

/// One verified solution: values for every constrained unknown, in ansatz
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionPoint {
    /// `(unknown name, value)` pairs.
    pub values: Vec<(String, Rat)>,
}

// ---------------------------------------------------------------------------
// Random spot checks
// ---------------------------------------------------------------------------

/// Rerun the direct check on `samples` seeded random rational
/// instantiations of every user parameter (the subject's tables and the
/// candidate's entries are instantiated together).
///
/// This is the numeric cross-check of [`SearchSubject::verify_family`]: a
/// symbolic pass must survive every instantiation.  Returns the first
/// failing sample's report, otherwise the last passing one.
pub fn spot_check_family(
    subject: &SearchSubject<'_>,
    map: &ModuleMap,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    if samples == 0 {
        return Err(Error::Precondition("a spot check needs at least one sample".into()));
    }
    let reg = subject.registry();
    let params = reg.user_parameters();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..samples {
        let mut bind = BTreeMap::new();
        for &p in &params {
            let numer = rng.gen_range(-4i64..=4);
            let denom = rng.gen_range(1i64..=3);
            bind.insert(p, rat_int(numer) / rat_int(denom));
        }
        let report = check_instantiated(subject, map, &bind)?;
        if !report.verdict {
            return Ok(report);
        }
        last = Some(report);
    }
    Ok(last.expect("samples is positive"))
}

fn eval_table(t: &LambdaTable, reg: &Arc<VarRegistry>, bind: &BTreeMap<VarId, Rat>) -> Result<LambdaTable> {
    let rank = t.rank();
    let mut entries = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut row = Vec::with_capacity(rank);
        for j in 0..rank {
            row.push(
                t.cell(i, j)
                    .iter()
                    .map(|p| p.eval_parameters(bind))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        entries.push(row);
    }
    LambdaTable::new(rank, reg, entries)
}

fn eval_structure(s: &Structure, bind: &BTreeMap<VarId, Rat>) -> Result<Structure> {
    let mut ops = BTreeMap::new();
    for (name, table) in s.op_tables() {
        ops.insert(name.clone(), eval_table(table, s.registry(), bind)?);
    }
    Structure::new(s.kind(), s.module(), s.registry(), ops)
}

fn eval_action(t: &ActionTable, reg: &Arc<VarRegistry>, bind: &BTreeMap<VarId, Rat>) -> Result<ActionTable> {
    let mut entries = Vec::with_capacity(t.alg_rank());
    for i in 0..t.alg_rank() {
        let mut row = Vec::with_capacity(t.space_rank());
        for j in 0..t.space_rank() {
            row.push(
                t.cell(i, j)
                    .iter()
                    .map(|p| p.eval_parameters(bind))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        entries.push(row);
    }
    ActionTable::new(t.alg_rank(), t.space_rank(), reg, entries)
}

fn eval_map(m: &ModuleMap, bind: &BTreeMap<VarId, Rat>) -> Result<ModuleMap> {
    let rows = m
        .rows()
        .iter()
        .map(|row| row.iter().map(|p| p.eval_parameters(bind)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ModuleMap::new(m.source(), m.target(), m.registry(), rows)
}

fn check_instantiated(
    subject: &SearchSubject<'_>,
    map: &ModuleMap,
    bind: &BTreeMap<VarId, Rat>,
) -> Result<CheckReport> {
    let map = eval_map(map, bind)?;
    match subject {
        SearchSubject::RotaBaxter { structure, weight } => {
            let s = eval_structure(structure, bind)?;
            let w = weight.eval_parameters(bind)?;
            check_rota_baxter(&s, &map, &w)
        }
        SearchSubject::Nijenhuis { structure } => {
            let s = eval_structure(structure, bind)?;
            check_nijenhuis(&s, &map)
        }
        SearchSubject::OOperator { bimodule } => {
            let reg = bimodule.registry();
            let m = Bimodule::new(
                &eval_structure(bimodule.base(), bind)?,
                bimodule.space(),
                eval_action(bimodule.left(), reg, bind)?,
                eval_action(bimodule.right(), reg, bind)?,
            )?;
            check_o_operator(&map, &m)
        }
    }
}

// ---------------------------------------------------------------------------
// Union-find over block positions
// ---------------------------------------------------------------------------

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let root = self.find(self.0[i]);
            self.0[i] = root;
        }
        self.0[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::adjoint_bimodule;
    use crate::calgebra::{AlgebraKind, OP_BRACKET, OP_CIRC, OP_TRI_L, OP_TRI_R};
    use crate::polyring::parse_poly;

    fn structure_with(
        kind: AlgebraKind,
        params: &[&str],
        names: &[&str],
        ops: &[(&str, &[(usize, usize, &[(usize, &str)])])],
    ) -> Structure {
        let reg = VarRegistry::new(params).unwrap();
        let module = FreeModule::new(names.to_vec()).unwrap();
        let n = names.len();
        let mut tables = BTreeMap::new();
        for (op, cells) in ops {
            let mut entries = vec![vec![vec![Poly::zero(&reg); n]; n]; n];
            for (i, j, outs) in *cells {
                for (k, text) in *outs {
                    entries[*i][*j][*k] = parse_poly(&reg, text).unwrap();
                }
            }
            tables.insert(op.to_string(), LambdaTable::new(n, &reg, entries).unwrap());
        }
        Structure::new(kind, &module, &reg, tables).unwrap()
    }

    /// Rank-2 left-symmetric structure `L o L = (g0 - g1*lm)*lm W` with
    /// symbolic coefficients.
    fn lw() -> Structure {
        structure_with(
            AlgebraKind::LeftSymmetric,
            &["g0", "g1"],
            &["L", "W"],
            &[(OP_CIRC, &[(0, 0, &[(1, "(g0 - g1*lm)*lm")])])],
        )
    }

    /// The parameter-free specialization `L o L = lm W`.
    fn lw_g1() -> Structure {
        structure_with(
            AlgebraKind::LeftSymmetric,
            &[],
            &["L", "W"],
            &[(OP_CIRC, &[(0, 0, &[(1, "lm")])])],
        )
    }

    /// Rank-1 structure with bracket `(d + 2*lm) x`.
    fn rank_one_bracket() -> Structure {
        structure_with(
            AlgebraKind::Lie,
            &[],
            &["x"],
            &[(OP_BRACKET, &[(0, 0, &[(0, "d + 2*lm")])])],
        )
    }

    fn vals(pairs: &[(&str, i64)]) -> Vec<(String, Rat)> {
        pairs.iter().map(|(n, v)| (n.to_string(), rat_int(*v))).collect()
    }

    fn grid(vs: &[i64]) -> Vec<Rat> {
        vs.iter().map(|&v| rat_int(v)).collect()
    }

    fn mmap_on(s: &Structure, rows: &[&[&str]]) -> ModuleMap {
        let reg = s.registry();
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|t| parse_poly(reg, t).unwrap()).collect())
            .collect();
        ModuleMap::new(s.module(), s.module(), reg, rows).unwrap()
    }

    fn pp(s: &Structure, text: &str) -> Poly {
        parse_poly(s.registry(), text).unwrap()
    }

    #[test]
    fn zero_structure_yields_empty_system_and_free_directions() {
        let z = structure_with(AlgebraKind::LeftSymmetric, &[], &["e"], &[(OP_CIRC, &[])]);
        let subject =
            SearchSubject::RotaBaxter { structure: &z, weight: Poly::zero(z.registry()) };
        let sys = generate_system(&subject, 1).unwrap();
        assert_eq!(sys.unknowns().len(), 2);
        assert!(sys.equations().is_empty());
        assert_eq!(sys.free_directions(), vec!["c0_0_0", "c0_0_1"]);

        let sols = sys.grid_enumerate(&grid(&[-1, 0, 1])).unwrap();
        assert_eq!(sols.candidates, 0);
        assert_eq!(sols.free, vec!["c0_0_0".to_string(), "c0_0_1".to_string()]);
        assert_eq!(sols.points.len(), 1);
        assert!(sols.points[0].values.is_empty());
        // The single point re-validates with the free unknowns symbolic.
        assert!(sys.check_point(&[]).unwrap().verdict);

        // Same story for any identity on a zero product.
        let nij = SearchSubject::Nijenhuis { structure: &z };
        assert!(generate_system(&nij, 2).unwrap().equations().is_empty());
    }

    #[test]
    fn rank_one_bracket_forces_the_zero_operator() {
        let vir = rank_one_bracket();
        let subject =
            SearchSubject::RotaBaxter { structure: &vir, weight: Poly::zero(vir.registry()) };

        let sys = generate_system(&subject, 0).unwrap();
        assert_eq!(sys.unknowns().len(), 1);
        assert!(!sys.equations().is_empty());
        assert!(sys.free_directions().is_empty());
        assert!(sys.holds_at(&vals(&[("c0_0_0", 0)])).unwrap());
        assert!(!sys.holds_at(&vals(&[("c0_0_0", 1)])).unwrap());
        let sols = sys.grid_enumerate(&grid(&[-1, 0, 1])).unwrap();
        assert_eq!(sols.candidates, 3);
        assert_eq!(sols.points.len(), 1);
        assert_eq!(sols.points[0].values, vals(&[("c0_0_0", 0)]));

        // Degree one: both coefficients are linked into one block and still
        // only the zero map survives.
        let sys1 = generate_system(&subject, 1).unwrap();
        assert_eq!(sys1.unknowns().len(), 2);
        let sols1 = sys1.grid_enumerate(&grid(&[-1, 0, 1])).unwrap();
        assert_eq!(sols1.candidates, 9);
        assert_eq!(sols1.points.len(), 1);
        assert_eq!(sols1.points[0].values, vals(&[("c0_0_0", 0), ("c0_0_1", 0)]));
    }

    #[test]
    fn grid_cross_check_recovers_the_classification() {
        for s in [lw_g1(), lw()] {
            let subject =
                SearchSubject::RotaBaxter { structure: &s, weight: Poly::zero(s.registry()) };
            let sys = generate_system(&subject, 1).unwrap();
            assert_eq!(sys.unknowns().len(), 8);
            // The two coefficients feeding W from L are free directions (the
            // arbitrary-polynomial summand of every family).
            assert_eq!(sys.free_directions(), vec!["c0_1_0", "c0_1_1"]);

            let sols = sys.grid_enumerate(&grid(&[-1, 0, 1])).unwrap();
            assert_eq!(sols.candidates, 729);
            assert_eq!(sols.points.len(), 9);
            let mut q_pairs = BTreeSet::new();
            for p in &sols.points {
                let names: Vec<&str> = p.values.iter().map(|(n, _)| n.as_str()).collect();
                assert_eq!(
                    names,
                    ["c0_0_0", "c0_0_1", "c1_0_0", "c1_0_1", "c1_1_0", "c1_1_1"]
                );
                // Both maps into L vanish identically on every solution.
                for (_, v) in &p.values[..4] {
                    assert_eq!(v, &rat_int(0));
                }
                q_pairs.insert((p.values[4].1.clone(), p.values[5].1.clone()));
            }
            // The W -> W coefficients range over the whole grid square.
            assert_eq!(q_pairs.len(), 9);
            assert_eq!(
                sols.points.first().unwrap().values[4..]
                    .iter()
                    .map(|(_, v)| v.clone())
                    .collect::<Vec<_>>(),
                vec![rat_int(-1), rat_int(-1)]
            );
            assert_eq!(
                sols.points.last().unwrap().values[4..]
                    .iter()
                    .map(|(_, v)| v.clone())
                    .collect::<Vec<_>>(),
                vec![rat_int(1), rat_int(1)]
            );
        }
    }

    #[test]
    fn family_verification_spans_symbolic_parameters() {
        let s = structure_with(
            AlgebraKind::LeftSymmetric,
            &["g0", "g1", "a", "b", "h0", "h1"],
            &["L", "W"],
            &[(OP_CIRC, &[(0, 0, &[(1, "(g0 - g1*lm)*lm")])])],
        );
        let subject =
            SearchSubject::RotaBaxter { structure: &s, weight: Poly::zero(s.registry()) };

        // A two-parameter scaling family and the free-polynomial family, all
        // parameters symbolic.
        let scaling = mmap_on(&s, &[&["2*a", "h0 + h1*d"], &["0", "a"]]);
        assert!(subject.verify_family(&scaling).unwrap().verdict);
        let free_poly = mmap_on(&s, &[&["0", "h0 + h1*d"], &["0", "a + b*d"]]);
        assert!(subject.verify_family(&free_poly).unwrap().verdict);

        // Decoupling the two diagonal coefficients breaks the identity with
        // a residual linear in their difference.
        let broken = mmap_on(&s, &[&["2*a", "h0 + h1*d"], &["0", "b"]]);
        let report = subject.verify_family(&broken).unwrap();
        assert!(!report.verdict);
        let failure = report.failure.unwrap();
        assert_eq!(failure.axiom_id, "rota_baxter");
        assert_eq!(failure.witness_names, vec!["L", "L"]);
        assert_eq!(
            failure.residual,
            vec![(
                "W".to_string(),
                pp(&s, "4*a*(a - b)*(g0 - g1*lm)*lm")
            )]
        );

        // Symbolic passes survive seeded random instantiations, and the
        // broken family keeps failing on them (the drawn values make
        // a*(a - b) nonzero at least once).
        assert!(spot_check_family(&subject, &scaling, 10, 7).unwrap().verdict);
        assert!(spot_check_family(&subject, &free_poly, 10, 7).unwrap().verdict);
        assert!(!spot_check_family(&subject, &broken, 10, 7).unwrap().verdict);
    }

    #[test]
    fn o_operator_and_rota_baxter_systems_agree_on_the_adjoint() {
        let s = lw_g1();
        let m = adjoint_bimodule(&s).unwrap();
        let rb = SearchSubject::RotaBaxter { structure: &s, weight: Poly::zero(s.registry()) };
        let oo = SearchSubject::OOperator { bimodule: &m };
        let sys_rb = generate_system(&rb, 1).unwrap();
        let sys_oo = generate_system(&oo, 1).unwrap();
        assert_eq!(sys_rb.free_directions(), sys_oo.free_directions());

        let g = grid(&[-1, 0, 1]);
        let sols_rb = sys_rb.grid_enumerate(&g).unwrap();
        let sols_oo = sys_oo.grid_enumerate(&g).unwrap();
        assert_eq!(sols_rb.points, sols_oo.points);
        assert_eq!(sols_rb.free, sols_oo.free);
    }

    #[test]
    fn grid_solutions_match_direct_checks_exhaustively() {
        let s = lw_g1();
        let subject = SearchSubject::Nijenhuis { structure: &s };
        let sys = generate_system(&subject, 0).unwrap();
        assert_eq!(sys.unknowns().len(), 4);
        let g = grid(&[-1, 0, 1]);
        let sols = sys.grid_enumerate(&g).unwrap();
        let free: BTreeSet<&str> = sols.free.iter().map(String::as_str).collect();
        let solution_set: BTreeSet<Vec<Rat>> = sols
            .points
            .iter()
            .map(|p| p.values.iter().map(|(_, v)| v.clone()).collect())
            .collect();

        // Round trip over the whole grid: the direct checker accepts an
        // assignment exactly when its constrained part is an enumerated
        // solution.
        let names: Vec<String> = sys.unknowns().iter().map(|u| u.name.clone()).collect();
        for t in 0..81usize {
            let mut rem = t;
            let mut pairs = Vec::new();
            for name in &names {
                pairs.push((name.clone(), rat_int((rem % 3) as i64 - 1)));
                rem /= 3;
            }
            let direct = sys.check_point(&pairs).unwrap().verdict;
            let constrained: Vec<Rat> = pairs
                .iter()
                .filter(|(n, _)| !free.contains(n.as_str()))
                .map(|(_, v)| v.clone())
                .collect();
            assert_eq!(direct, solution_set.contains(&constrained), "at {pairs:?}");
        }
    }

    #[test]
    fn perturbed_scaling_point_is_rejected_by_the_system() {
        let s = lw_g1();
        let subject =
            SearchSubject::RotaBaxter { structure: &s, weight: Poly::zero(s.registry()) };
        let sys = generate_system(&subject, 1).unwrap();

        // The honest scaling point (diagonal 2 and 1) solves the system; the
        // free pair is omitted and stays symbolic.
        let good = vals(&[
            ("c0_0_0", 2),
            ("c0_0_1", 0),
            ("c1_0_0", 0),
            ("c1_0_1", 0),
            ("c1_1_0", 1),
            ("c1_1_1", 0),
        ]);
        assert!(sys.holds_at(&good).unwrap());
        assert!(sys.check_point(&good).unwrap().verdict);

        // Perturbing the L -> L entry by +d breaks it.
        let bad = vals(&[
            ("c0_0_0", 2),
            ("c0_0_1", 1),
            ("c1_0_0", 0),
            ("c1_0_1", 0),
            ("c1_1_0", 1),
            ("c1_1_1", 0),
        ]);
        assert!(!sys.holds_at(&bad).unwrap());
        assert!(!sys.check_point(&bad).unwrap().verdict);
    }

    #[test]
    fn grid_caps_and_degree_two_enumeration() {
        let s = lw_g1();
        let subject =
            SearchSubject::RotaBaxter { structure: &s, weight: Poly::zero(s.registry()) };
        let sys = generate_system(&subject, 1).unwrap();
        match sys.grid_enumerate_capped(&grid(&[-1, 0, 1, 2]), 1000) {
            Err(Error::GridTooLarge { points, cap }) => {
                assert_eq!(points, 4096);
                assert_eq!(cap, 1000);
            }
            other => panic!("expected a grid cap error, got {other:?}"),
        }

        // Degree two sits exactly at the default cap: one block of nine
        // constrained unknowns, and the solutions are the degree-two
        // free-polynomial family.
        let sys2 = generate_system(&subject, 2).unwrap();
        assert_eq!(sys2.unknowns().len(), 12);
        let sols = sys2.grid_enumerate(&grid(&[-1, 0, 1])).unwrap();
        assert_eq!(sols.candidates, 19_683);
        assert_eq!(sols.points.len(), 27);
        for p in &sols.points {
            for (_, v) in &p.values[..6] {
                assert_eq!(v, &rat_int(0));
            }
        }
    }

    #[test]
    fn instantiation_validates_names_and_subjects() {
        let s = lw();
        let subject =
            SearchSubject::RotaBaxter { structure: &s, weight: Poly::zero(s.registry()) };
        let sys = generate_system(&subject, 0).unwrap();
        assert!(matches!(
            sys.instantiate(&vals(&[("zzz", 1)])),
            Err(Error::InvalidDefinition(_))
        ));
        // Registry parameters that are not ansatz unknowns are rejected too.
        assert!(matches!(
            sys.instantiate(&vals(&[("g0", 1)])),
            Err(Error::InvalidDefinition(_))
        ));
        assert!(matches!(
            sys.instantiate(&vals(&[("c0_0_0", 1), ("c0_0_0", 2)])),
            Err(Error::InvalidDefinition(_))
        ));
        // Partial instantiation keeps the rest symbolic.
        let partial = sys.instantiate(&vals(&[("c0_0_0", 2)])).unwrap();
        assert_eq!(partial.entry(0, 0), &pp_reg(sys.registry(), "2"));
        assert_eq!(partial.entry(0, 1), &pp_reg(sys.registry(), "c0_1_0"));

        // Subject validation happens before any expansion.
        let ld = structure_with(
            AlgebraKind::LDendriform,
            &[],
            &["x"],
            &[(OP_TRI_R, &[]), (OP_TRI_L, &[])],
        );
        let bad_kind =
            SearchSubject::Nijenhuis { structure: &ld };
        assert!(matches!(generate_system(&bad_kind, 0), Err(Error::WrongKind { .. })));
        let bad_weight = SearchSubject::RotaBaxter {
            structure: &s,
            weight: pp(&s, "lm"),
        };
        assert!(matches!(
            generate_system(&bad_weight, 0),
            Err(Error::DisallowedVariable(_, _))
        ));
    }

    fn pp_reg(reg: &Arc<VarRegistry>, text: &str) -> Poly {
        parse_poly(reg, text).unwrap()
    }
}
