//! Symbolic planning model: atoms, states, action schemas and their groundings.
//!
//! A [`Domain`] and a [`Problem`] are plain data as written in the input files.
//! [`Task::ground`] instantiates every schema against the problem's objects and
//! compiles atoms to dense [`AtomId`]s so that a [`State`] is a bitset.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use thiserror::Error;

use crate::feasibility::GeometryConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("schema `{schema}`: parameter ?{param} has unknown type `{ty}`")]
    UnknownType { schema: String, param: String, ty: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("atom {atom}: expected {expected} arguments, found {found}")]
    ArityMismatch {
        atom: String,
        expected: usize,
        found: usize,
    },
    #[error("atom {atom}: argument `{object}` is a {found}, expected {expected}")]
    TypeMismatch {
        atom: String,
        object: String,
        expected: String,
        found: String,
    },
    #[error("schema `{schema}` uses unbound variable ?{var}")]
    UnboundVariable { schema: String, var: String },
    #[error("goal atom {0} listed twice")]
    DuplicateGoal(String),
    #[error("action {0} is not applicable in the given state")]
    NotApplicable(String),
    #[error("no ground action with key `{0}`")]
    UnknownAction(String),
}

/// A fact such as `(placed be1 t1s1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<P: Into<String>, A: Into<String>>(predicate: P, args: impl IntoIterator<Item = A>) -> Self {
        Self {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedVar {
    /// Variable name without the leading `?`.
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomTemplate {
    pub predicate: String,
    pub terms: Vec<Term>,
}

impl fmt::Display for AtomTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for t in &self.terms {
            write!(f, " {t}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedVar>,
}

/// A parameterized STRIPS operator with positive and negative preconditions.
///
/// `global` marks actions whose feasibility does not depend on the state, so a
/// negative verdict may be cached for the whole search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub pre_pos: Vec<AtomTemplate>,
    pub pre_neg: Vec<AtomTemplate>,
    pub add: Vec<AtomTemplate>,
    pub del: Vec<AtomTemplate>,
    pub global: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub types: Vec<String>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectDecl {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub name: String,
    pub objects: Vec<ObjectDecl>,
    pub init: Vec<GroundAtom>,
    /// Ordered sub-goal atoms.
    pub goal: Vec<GroundAtom>,
    pub geometry: Option<GeometryConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

/// A fully instantiated action. Atom lists refer to the owning [`Task`]'s atom table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub id: ActionId,
    pub schema: usize,
    pub name: String,
    pub binding: Vec<String>,
    /// Canonical `name(obj1,...,objk)`.
    pub key: String,
    pub global: bool,
    pub pre_pos: Vec<AtomId>,
    pub pre_neg: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

pub fn action_key(name: &str, binding: &[String]) -> String {
    format!("{name}({})", binding.join(","))
}

/// A set of atoms, stored as a bitset over the task's atom table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(FixedBitSet);

impl State {
    pub fn empty(atom_count: usize) -> Self {
        State(FixedBitSet::with_capacity(atom_count))
    }

    pub fn from_atoms(atom_count: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut s = State::empty(atom_count);
        for a in atoms {
            s.0.insert(a.0);
        }
        s
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        self.0.contains(atom.0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.0.ones().map(AtomId)
    }

    pub fn is_superset_of(&self, other: &State) -> bool {
        other.0.is_subset(&self.0)
    }
}

/// The ordered multi-goal set together with the sub-goals achieved so far.
///
/// `achieved` is indexed by goal position, not by atom id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GoalSet {
    desired: Arc<[AtomId]>,
    achieved: FixedBitSet,
}

impl GoalSet {
    pub fn new(desired: Arc<[AtomId]>) -> Self {
        let n = desired.len();
        GoalSet {
            desired,
            achieved: FixedBitSet::with_capacity(n),
        }
    }

    /// Goal set whose achieved part is every desired atom already true in `state`.
    pub fn from_state(desired: Arc<[AtomId]>, state: &State) -> Self {
        let mut g = GoalSet::new(desired);
        for (i, a) in g.desired.iter().enumerate() {
            if state.contains(*a) {
                g.achieved.insert(i);
            }
        }
        g
    }

    pub fn desired(&self) -> &[AtomId] {
        &self.desired
    }

    pub fn len(&self) -> usize {
        self.desired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.desired.is_empty()
    }

    pub fn achieved_count(&self) -> usize {
        self.achieved.count_ones(..)
    }

    pub fn is_achieved(&self, atom: AtomId) -> bool {
        self.desired
            .iter()
            .position(|a| *a == atom)
            .is_some_and(|i| self.achieved.contains(i))
    }

    pub fn achieved_atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.achieved.ones().map(|i| self.desired[i])
    }

    pub fn is_complete(&self) -> bool {
        self.achieved.count_ones(..) == self.desired.len()
    }

    /// Atoms newly added by the transition `prev -> next` that are desired and
    /// not yet achieved, in goal order.
    pub fn new_subgoals(&self, prev: &State, next: &State) -> Vec<AtomId> {
        self.desired
            .iter()
            .enumerate()
            .filter(|(i, a)| !self.achieved.contains(*i) && next.contains(**a) && !prev.contains(**a))
            .map(|(_, a)| *a)
            .collect()
    }

    /// Marks the given desired atoms as achieved. Atoms outside the goal set are ignored.
    pub fn credit(&mut self, atoms: &[AtomId]) {
        for atom in atoms {
            if let Some(i) = self.desired.iter().position(|a| a == atom) {
                self.achieved.insert(i);
            }
        }
    }
}

/// `(next \ prev) ∩ (desired \ achieved)`.
pub fn new_subgoals(prev: &State, next: &State, goals: &GoalSet) -> Vec<AtomId> {
    goals.new_subgoals(prev, next)
}

pub fn is_applicable(state: &State, action: &GroundAction) -> bool {
    action.pre_pos.iter().all(|a| state.contains(*a)) && !action.pre_neg.iter().any(|a| state.contains(*a))
}

/// Actions applicable in `state` whose key is not known to be infeasible, in grounding order.
pub fn applicable<'a>(
    state: &State,
    actions: &'a [GroundAction],
    infeasible_keys: &HashSet<String>,
) -> Vec<&'a GroundAction> {
    actions
        .iter()
        .filter(|a| is_applicable(state, a) && !infeasible_keys.contains(&a.key))
        .collect()
}

/// `(state \ del) ∪ add`.
pub fn apply(state: &State, action: &GroundAction) -> Result<State, ModelError> {
    if !is_applicable(state, action) {
        return Err(ModelError::NotApplicable(action.key.clone()));
    }
    let mut next = state.clone();
    for a in &action.del {
        next.0.set(a.0, false);
    }
    for a in &action.add {
        next.0.insert(a.0);
    }
    Ok(next)
}

/// A grounded planning task: the atom table, every ground action and the
/// initial state and goals compiled against it.
#[derive(Clone, Debug)]
pub struct Task {
    atoms: IndexSet<GroundAtom>,
    actions: Vec<GroundAction>,
    by_key: HashMap<String, ActionId>,
    init: State,
    goals: Arc<[AtomId]>,
    objects: Vec<ObjectDecl>,
    geometry: GeometryConfig,
}

impl Task {
    /// Grounds every schema of `domain` over the objects of `problem`.
    ///
    /// Actions come out in schema declaration order, then in lexicographic
    /// order of the binding, where each parameter ranges over the objects of
    /// its type in declaration order and the first parameter varies slowest.
    /// Bindings whose add and delete effects would overlap are not instantiated.
    pub fn ground(domain: &Domain, problem: &Problem) -> Result<Task, ModelError> {
        let mut atoms: IndexSet<GroundAtom> = IndexSet::new();
        let object_types: HashMap<&str, &str> = problem
            .objects
            .iter()
            .map(|o| (o.name.as_str(), o.ty.as_str()))
            .collect();

        let check_atom = |atom: &GroundAtom| -> Result<(), ModelError> {
            let decl = domain
                .predicate(&atom.predicate)
                .ok_or_else(|| ModelError::UnknownPredicate(atom.predicate.clone()))?;
            if decl.params.len() != atom.args.len() {
                return Err(ModelError::ArityMismatch {
                    atom: atom.to_string(),
                    expected: decl.params.len(),
                    found: atom.args.len(),
                });
            }
            for (arg, param) in atom.args.iter().zip(&decl.params) {
                let ty = object_types
                    .get(arg.as_str())
                    .ok_or_else(|| ModelError::UnknownObject(arg.clone()))?;
                if *ty != param.ty {
                    return Err(ModelError::TypeMismatch {
                        atom: atom.to_string(),
                        object: arg.clone(),
                        expected: param.ty.clone(),
                        found: ty.to_string(),
                    });
                }
            }
            Ok(())
        };

        let mut init_ids = Vec::with_capacity(problem.init.len());
        for atom in &problem.init {
            check_atom(atom)?;
            init_ids.push(AtomId(atoms.insert_full(atom.clone()).0));
        }
        let mut goal_ids = Vec::with_capacity(problem.goal.len());
        let mut seen_goals = HashSet::new();
        for atom in &problem.goal {
            check_atom(atom)?;
            if !seen_goals.insert(atom) {
                return Err(ModelError::DuplicateGoal(atom.to_string()));
            }
            goal_ids.push(AtomId(atoms.insert_full(atom.clone()).0));
        }

        let mut actions = Vec::new();
        for (schema_idx, schema) in domain.actions.iter().enumerate() {
            let mut domains_per_param = Vec::with_capacity(schema.params.len());
            for param in &schema.params {
                if !domain.types.contains(&param.ty) {
                    return Err(ModelError::UnknownType {
                        schema: schema.name.clone(),
                        param: param.name.clone(),
                        ty: param.ty.clone(),
                    });
                }
                let objs: Vec<&str> = problem
                    .objects
                    .iter()
                    .filter(|o| o.ty == param.ty)
                    .map(|o| o.name.as_str())
                    .collect();
                domains_per_param.push(objs);
            }
            for binding in cartesian(&domains_per_param) {
                let vars: HashMap<&str, &str> = schema
                    .params
                    .iter()
                    .map(|p| p.name.as_str())
                    .zip(binding.iter().copied())
                    .collect();
                let mut compile = |templates: &[AtomTemplate]| -> Result<Vec<AtomId>, ModelError> {
                    let mut out = Vec::with_capacity(templates.len());
                    for t in templates {
                        let atom = instantiate(schema, t, &vars)?;
                        check_atom(&atom)?;
                        out.push(AtomId(atoms.insert_full(atom).0));
                    }
                    Ok(out)
                };
                let pre_pos = compile(&schema.pre_pos)?;
                let pre_neg = compile(&schema.pre_neg)?;
                let add = compile(&schema.add)?;
                let del = compile(&schema.del)?;
                if add.iter().any(|a| del.contains(a)) {
                    continue;
                }
                let binding: Vec<String> = binding.iter().map(|s| s.to_string()).collect();
                actions.push(GroundAction {
                    id: ActionId(actions.len()),
                    schema: schema_idx,
                    name: schema.name.clone(),
                    key: action_key(&schema.name, &binding),
                    binding,
                    global: schema.global,
                    pre_pos,
                    pre_neg,
                    add,
                    del,
                });
            }
        }

        let n = atoms.len();
        let by_key = actions.iter().map(|a| (a.key.clone(), a.id)).collect();
        Ok(Task {
            init: State::from_atoms(n, init_ids),
            goals: goal_ids.into(),
            atoms,
            actions,
            by_key,
            objects: problem.objects.clone(),
            geometry: problem.geometry.clone().unwrap_or_default(),
        })
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.0]
    }

    pub fn action_by_key(&self, key: &str) -> Option<&GroundAction> {
        self.by_key.get(key).map(|id| &self.actions[id.0])
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.0]
    }

    pub fn atom_id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.atoms.get_index_of(atom).map(AtomId)
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goals(&self) -> &Arc<[AtomId]> {
        &self.goals
    }

    /// A goal set credited with every sub-goal true in the initial state.
    pub fn initial_goal_set(&self) -> GoalSet {
        GoalSet::from_state(self.goals.clone(), &self.init)
    }

    pub fn objects(&self) -> &[ObjectDecl] {
        &self.objects
    }

    pub fn geometry(&self) -> &GeometryConfig {
        &self.geometry
    }

    /// Builds a state from named atoms; atoms unknown to the task are an error.
    pub fn state_of(&self, atoms: &[GroundAtom]) -> Result<State, ModelError> {
        let ids = atoms
            .iter()
            .map(|a| {
                self.atom_id(a)
                    .ok_or_else(|| ModelError::UnknownPredicate(a.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(State::from_atoms(self.atom_count(), ids))
    }

    pub fn describe(&self, state: &State) -> Vec<&GroundAtom> {
        state.atoms().map(|a| self.atom(a)).collect()
    }
}

fn instantiate(
    schema: &ActionSchema,
    template: &AtomTemplate,
    vars: &HashMap<&str, &str>,
) -> Result<GroundAtom, ModelError> {
    let args = template
        .terms
        .iter()
        .map(|t| match t {
            Term::Var(v) => vars
                .get(v.as_str())
                .map(|o| o.to_string())
                .ok_or_else(|| ModelError::UnboundVariable {
                    schema: schema.name.clone(),
                    var: v.clone(),
                }),
            Term::Const(c) => Ok(c.clone()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroundAtom {
        predicate: template.predicate.clone(),
        args,
    })
}

/// Cartesian product, first position varying slowest. An empty input yields one empty tuple.
fn cartesian<'a>(domains: &[Vec<&'a str>]) -> Vec<Vec<&'a str>> {
    let mut out: Vec<Vec<&'a str>> = vec![Vec::new()];
    for dom in domains {
        let mut next = Vec::with_capacity(out.len() * dom.len());
        for prefix in &out {
            for obj in dom {
                let mut t = prefix.clone();
                t.push(*obj);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: &str, ty: &str) -> TypedVar {
        TypedVar {
            name: n.into(),
            ty: ty.into(),
        }
    }

    fn tmpl(p: &str, vars: &[&str]) -> AtomTemplate {
        AtomTemplate {
            predicate: p.into(),
            terms: vars.iter().map(|v| Term::Var(v.to_string())).collect(),
        }
    }

    fn pick_domain() -> Domain {
        Domain {
            name: "d".into(),
            types: vec!["gripper".into(), "bearing".into(), "spot".into()],
            predicates: vec![
                PredicateDecl {
                    name: "free".into(),
                    params: vec![var("g", "gripper")],
                },
                PredicateDecl {
                    name: "holding".into(),
                    params: vec![var("g", "gripper"), var("b", "bearing")],
                },
            ],
            actions: vec![ActionSchema {
                name: "pick".into(),
                params: vec![var("g", "gripper"), var("b", "bearing")],
                pre_pos: vec![tmpl("free", &["g"])],
                pre_neg: vec![],
                add: vec![tmpl("holding", &["g", "b"])],
                del: vec![tmpl("free", &["g"])],
                global: false,
            }],
        }
    }

    fn obj(n: &str, ty: &str) -> ObjectDecl {
        ObjectDecl {
            name: n.into(),
            ty: ty.into(),
        }
    }

    fn pick_problem() -> Problem {
        Problem {
            name: "p".into(),
            objects: vec![
                obj("g1", "gripper"),
                obj("g2", "gripper"),
                obj("b1", "bearing"),
                obj("b2", "bearing"),
            ],
            init: vec![GroundAtom::new("free", ["g1"])],
            goal: vec![GroundAtom::new("holding", ["g1", "b2"])],
            geometry: None,
        }
    }

    #[test]
    fn zero_schemas_ground_to_nothing() {
        let mut d = pick_domain();
        d.actions.clear();
        let task = Task::ground(&d, &pick_problem()).unwrap();
        assert!(task.actions().is_empty());
    }

    #[test]
    fn grounding_order_is_declaration_then_lexicographic() {
        let task = Task::ground(&pick_domain(), &pick_problem()).unwrap();
        let keys: Vec<_> = task.actions().iter().map(|a| a.key.as_str()).collect();
        assert_eq!(keys, ["pick(g1,b1)", "pick(g1,b2)", "pick(g2,b1)", "pick(g2,b2)"]);
    }

    #[test]
    fn type_without_objects_yields_no_groundings() {
        let mut d = pick_domain();
        d.actions[0].params.push(var("s", "spot"));
        let task = Task::ground(&d, &pick_problem()).unwrap();
        assert!(task.actions().is_empty());
    }

    #[test]
    fn undeclared_parameter_type_is_an_error() {
        let mut d = pick_domain();
        d.actions[0].params[0].ty = "robot".into();
        assert!(matches!(
            Task::ground(&d, &pick_problem()),
            Err(ModelError::UnknownType { .. })
        ));
    }

    #[test]
    fn applicable_respects_preconditions_and_infeasible_keys() {
        let task = Task::ground(&pick_domain(), &pick_problem()).unwrap();
        let none = HashSet::new();
        let keys: Vec<_> = applicable(task.init(), task.actions(), &none)
            .iter()
            .map(|a| a.key.clone())
            .collect();
        // free(g2) is missing, so only g1 picks qualify.
        assert_eq!(keys, ["pick(g1,b1)", "pick(g1,b2)"]);
        let all: HashSet<String> = task.actions().iter().map(|a| a.key.clone()).collect();
        assert!(applicable(task.init(), task.actions(), &all).is_empty());
    }

    #[test]
    fn apply_flips_effects_and_rejects_inapplicable() {
        let task = Task::ground(&pick_domain(), &pick_problem()).unwrap();
        let pick = task.action_by_key("pick(g1,b2)").unwrap();
        let next = apply(task.init(), pick).unwrap();
        let names: Vec<String> = task.describe(&next).iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["(holding g1 b2)"]);
        assert_eq!(task.describe(task.init()).len(), 1);
        let other = task.action_by_key("pick(g2,b1)").unwrap();
        assert_eq!(
            apply(task.init(), other),
            Err(ModelError::NotApplicable("pick(g2,b1)".into()))
        );
    }

    #[test]
    fn empty_effects_leave_state_unchanged() {
        let mut d = pick_domain();
        d.actions[0].add.clear();
        d.actions[0].del.clear();
        let task = Task::ground(&d, &pick_problem()).unwrap();
        let a = &task.actions()[0];
        assert_eq!(&apply(task.init(), a).unwrap(), task.init());
    }

    #[test]
    fn self_conflicting_bindings_are_skipped() {
        let mut d = pick_domain();
        d.predicates.push(PredicateDecl {
            name: "link".into(),
            params: vec![var("a", "gripper"), var("b", "gripper")],
        });
        d.actions = vec![ActionSchema {
            name: "swap".into(),
            params: vec![var("a", "gripper"), var("b", "gripper")],
            pre_pos: vec![],
            pre_neg: vec![],
            add: vec![tmpl("free", &["a"])],
            del: vec![tmpl("free", &["b"])],
            global: false,
        }];
        let task = Task::ground(&d, &pick_problem()).unwrap();
        let keys: Vec<_> = task.actions().iter().map(|a| a.key.as_str()).collect();
        assert_eq!(keys, ["swap(g1,g2)", "swap(g2,g1)"]);
    }

    #[test]
    fn subgoal_detection_uses_delta_and_achieved() {
        let task = Task::ground(&pick_domain(), &pick_problem()).unwrap();
        let mut goals = task.initial_goal_set();
        let s0 = task.init().clone();
        assert!(goals.new_subgoals(&s0, &s0).is_empty());
        let s1 = apply(&s0, task.action_by_key("pick(g1,b2)").unwrap()).unwrap();
        let gained = new_subgoals(&s0, &s1, &goals);
        assert_eq!(gained.len(), 1);
        assert_eq!(task.atom(gained[0]).to_string(), "(holding g1 b2)");
        goals.credit(&gained);
        assert!(goals.is_complete());
        assert!(goals.new_subgoals(&s0, &s1).is_empty());
    }

    #[test]
    fn duplicate_goal_rejected() {
        let mut p = pick_problem();
        p.goal.push(p.goal[0].clone());
        assert!(matches!(
            Task::ground(&pick_domain(), &p),
            Err(ModelError::DuplicateGoal(_))
        ));
    }
}
