//! Local actions, the distance-`i` kernels and the arc kernel, the two
//! local hypothesis conditions on vertex stabilisers, and the dichotomy
//! verdict they imply for the arc kernel.
//!
//! For a vertex `x`, `G_x^[i]` is the subgroup of the vertex stabiliser
//! fixing every vertex at distance at most `i` from `x`; the arc kernel is
//! `G_{x,y}^[1] = G_x^[1] ∩ G_y^[1]`, the subgroup fixing the closed
//! neighbourhoods of both ends of an arc. The hypothesis asks that two
//! normal subgroups of `G_x` act transitively or semiregularly on the
//! neighbourhood: the centraliser of `G_x^[1]`, and for each prime `p` the
//! group generated by the `O_p(G_{x,y})` over the neighbours `y`.
//!
//! Under the hypothesis the arc kernel is a p-group, or (after swapping the
//! arc's ends if necessary) `G_{x,y}^[1] = G_x^[2]` and `G_y^[2] = G_y^[3]`
//! is a p-group; moreover `F*(G_{x,y})` is a p-group, or `G_{x,y}^[1] =
//! G_x^[2]` and `G_y^[2] = 1`. The verdict evaluates both orientations and
//! reports which one succeeds; "violated" is only a legal outcome when the
//! hypothesis itself fails, and the conformance check treats a violation
//! under a passing hypothesis as a hard failure.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::coset_graph::{CosetGraphError, CosetGraphSpec, ExplicitGraph, DEFAULT_BALL_CAP};
use crate::group_props::{
    centraliser, classify_action, fitting_and_fstar, is_p_group, p_core, prime_factors,
    ActionClass, Flag, PGroupStatus,
};
use crate::perm::Perm;
use crate::stab_chain::{AuxAction, GroupError, PermGroup};
use crate::DEFAULT_ENUM_BOUND;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("degenerate presentation: no neighbours to analyse")]
    Degenerate,
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error(transparent)]
    Graph(#[from] CosetGraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug)]
pub struct AnalysisOptions {
    pub enum_bound: u64,
    pub ball_cap: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { enum_bound: DEFAULT_ENUM_BOUND, ball_cap: DEFAULT_BALL_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Undetermined,
    Fail,
}

/// Orders of the stabiliser, the kernels and the arc kernel, plus the
/// classified local action. All orders are exact.
#[derive(Clone, Debug, Serialize)]
pub struct LocalReport {
    pub valency: usize,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub order_gx: BigUint,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub local_action_order: BigUint,
    pub local_action_class: ActionClass,
    pub order_kernels: KernelOrders,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub order_arc_kernel: BigUint,
    pub arc_kernel_p: PGroupStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelOrders {
    #[serde(with = "crate::group_props::ser_biguint")]
    pub gx1: BigUint,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub gx2: BigUint,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub gx3: BigUint,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub gy1: BigUint,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub gy2: BigUint,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub gy3: BigUint,
}

/// Result of one hypothesis condition: the status plus the classified
/// neighbourhood image of the subgroup it concerns (absent when
/// undetermined).
#[derive(Clone, Debug, Serialize)]
pub struct CondResult {
    pub status: Status,
    pub class: Option<ActionClass>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeCond {
    pub prime: u64,
    pub status: Status,
    pub class: Option<ActionClass>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub cond_i: CondResult,
    pub cond_ii: Vec<PrimeCond>,
    pub primes_checked: Vec<u64>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.cond_i.status == Status::Pass
            && self.cond_ii.iter().all(|c| c.status == Status::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.cond_i.status == Status::Fail
            || self.cond_ii.iter().any(|c| c.status == Status::Fail)
    }

    pub fn any_undetermined(&self) -> bool {
        self.cond_i.status == Status::Undetermined
            || self.cond_ii.iter().any(|c| c.status == Status::Undetermined)
    }
}

/// Which branch of the dichotomy the arc kernel takes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    /// The arc kernel is a p-group (or trivial).
    PGroup(PGroupStatus),
    /// In the reported orientation, `G_{x,y}^[1] = G_x^[2]` and
    /// `G_y^[2] = G_y^[3]` is a p-group.
    Alternative { swapped: bool, p: PGroupStatus },
    Violated,
    Undetermined,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::PGroup(p) => write!(f, "p-group({})", p),
            Branch::Alternative { swapped, p } => write!(
                f,
                "alternative(orientation={}, p={})",
                if *swapped { "yx" } else { "xy" },
                p
            ),
            Branch::Violated => f.write_str("violated"),
            Branch::Undetermined => f.write_str("undetermined"),
        }
    }
}

/// The clause about `F*(G_{x,y})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FstarClause {
    PGroup(PGroupStatus),
    /// `G_{x,y}^[1] = G_x^[2]` and `G_y^[2] = 1` in the reported orientation.
    Alternative { swapped: bool },
    Violated,
    /// `F*` could not be certified and the alternative test failed.
    Undetermined,
}

impl std::fmt::Display for FstarClause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FstarClause::PGroup(p) => write!(f, "p-group({})", p),
            FstarClause::Alternative { swapped } => write!(
                f,
                "alternative(orientation={})",
                if *swapped { "yx" } else { "xy" }
            ),
            FstarClause::Violated => f.write_str("violated"),
            FstarClause::Undetermined => f.write_str("undetermined"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwVerdict {
    pub branch: Branch,
    pub fstar_clause: FstarClause,
}

impl Serialize for TwVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TwVerdict", 2)?;
        st.serialize_field("branch", &self.branch.to_string())?;
        st.serialize_field("fstar_clause", &self.fstar_clause.to_string())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conformance {
    Pass,
    Fail(String),
    Skip(String),
}

impl std::fmt::Display for Conformance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Conformance::Pass => f.write_str("pass"),
            Conformance::Fail(why) => write!(f, "fail: {}", why),
            Conformance::Skip(why) => write!(f, "skip: {}", why),
        }
    }
}

impl Serialize for Conformance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

enum Target<'a> {
    Coset {
        spec: &'a CosetGraphSpec,
        /// Canonical representatives of the base vertex's neighbours.
        delta_x: Vec<Perm>,
    },
    Explicit {
        graph: &'a ExplicitGraph,
        vertex: usize,
        delta_x: Vec<usize>,
    },
}

/// One analysed vertex (plus the arc to its first neighbour): stabilisers,
/// kernels and the local action, ready for hypothesis checks and the
/// verdict.
pub struct Analysis<'a> {
    target: Target<'a>,
    opts: AnalysisOptions,
    pub valency: usize,
    pub arc_transitive: bool,
    pub g_x: PermGroup,
    pub g_y: PermGroup,
    pub g_xy: PermGroup,
    pub local_action: PermGroup,
    pub local_class: ActionClass,
    pub g_x1: PermGroup,
    pub g_x2: PermGroup,
    pub g_x3: PermGroup,
    pub g_y1: PermGroup,
    pub g_y2: PermGroup,
    pub g_y3: PermGroup,
    /// `G_{x,y}^[1]`.
    pub arc_kernel: PermGroup,
}

/// Image of a subgroup of the base-vertex stabiliser on a list of coset
/// vertices, via right multiplication on canonical representatives.
fn coset_action_on_verts(
    spec: &CosetGraphSpec,
    sub: &PermGroup,
    verts: &[Perm],
) -> Result<AuxAction, AnalysisError> {
    let mut index: HashMap<&Perm, usize> = HashMap::new();
    for (i, v) in verts.iter().enumerate() {
        index.insert(v, i);
    }
    let mut rows = Vec::with_capacity(sub.generators().len());
    for g in sub.generators() {
        let mut images = Vec::with_capacity(verts.len());
        for (i, v) in verts.iter().enumerate() {
            let w = spec.canonical(&v.compose(g));
            match index.get(&w) {
                Some(&j) => images.push(j),
                None => {
                    return Err(AnalysisError::Graph(CosetGraphError::ActionLeavesBall {
                        vertex: i,
                        gen: g.to_cycle_string(),
                    }))
                }
            }
        }
        rows.push(Perm::from_images(images).expect("right multiplication permutes the set"));
    }
    Ok(AuxAction { aux_size: verts.len(), rows })
}

/// `G_x^[1..3]` around one vertex of a coset graph: each kernel is the
/// kernel of the previous one's action on the next ball.
fn coset_kernel_tower(
    spec: &CosetGraphSpec,
    stabiliser: &PermGroup,
    centre: &Perm,
    cap: usize,
) -> Result<[PermGroup; 3], AnalysisError> {
    let mut kernels: Vec<PermGroup> = Vec::with_capacity(3);
    let mut current = stabiliser.clone();
    for radius in 1..=3usize {
        let ball = spec.ball_around(centre.clone(), radius, cap)?;
        let act = spec.action_on_ball(&current, &ball)?;
        current = current.kernel_on_aux(&act)?;
        kernels.push(current.clone());
    }
    Ok([kernels[0].clone(), kernels[1].clone(), kernels[2].clone()])
}

impl<'a> Analysis<'a> {
    /// Analyses the base arc `(H, Ha)` of a validated coset presentation.
    pub fn of_coset(
        spec: &'a CosetGraphSpec,
        opts: AnalysisOptions,
    ) -> Result<Analysis<'a>, AnalysisError> {
        if spec.is_degenerate() {
            return Err(AnalysisError::Degenerate);
        }
        let cap = opts.ball_cap;
        let valency = spec.valency();
        let g_x = spec.subgroup().clone();
        let x = spec.base_vertex().clone();
        let y = spec.canonical(spec.arc());

        let ball1x = spec.ball(1, cap)?;
        let delta_x: Vec<Perm> =
            ball1x.sphere(1).iter().map(|&i| ball1x.verts[i].clone()).collect();

        let local_act = coset_action_on_verts(spec, &g_x, &delta_x)?;
        let local_action = PermGroup::new(valency, local_act.rows.clone())?;
        let local_class = classify_action(
            &local_action,
            &(0..valency).collect::<Vec<_>>(),
            opts.enum_bound,
        )?;

        let [g_x1, g_x2, g_x3] = coset_kernel_tower(spec, &g_x, &x, cap)?;
        let g_y = g_x.conjugated_by(spec.arc());
        let [g_y1, g_y2, g_y3] = coset_kernel_tower(spec, &g_y, &y, cap)?;

        // arc stabiliser: fix the single neighbour vertex y inside G_x
        let act1 = spec.action_on_ball(&g_x, &ball1x)?;
        let y_index = ball1x.index_of(&y).expect("arc endpoint lies in the radius-1 ball");
        let g_xy = g_x.stabiliser_on_aux(&act1, &[y_index])?;

        // arc kernel: fix the union of both neighbourhoods
        let ball1y = spec.ball_around(y.clone(), 1, cap)?;
        let mut union: Vec<Perm> = ball1x.verts.clone();
        {
            let seen: std::collections::HashSet<&Perm> = union.iter().collect();
            let mut extra: Vec<Perm> = Vec::new();
            for v in &ball1y.verts {
                if !seen.contains(v) {
                    extra.push(v.clone());
                }
            }
            union.extend(extra);
        }
        let act_union = coset_action_on_verts(spec, &g_xy, &union)?;
        let arc_kernel = g_xy.kernel_on_aux(&act_union)?;

        Ok(Analysis {
            target: Target::Coset { spec, delta_x },
            opts,
            valency,
            arc_transitive: true,
            g_x,
            g_y,
            g_xy,
            local_action,
            local_class,
            g_x1,
            g_x2,
            g_x3,
            g_y1,
            g_y2,
            g_y3,
            arc_kernel,
        })
    }

    /// Analyses an explicit graph at a chosen vertex, taking the arc to its
    /// smallest neighbour.
    pub fn of_explicit(
        graph: &'a ExplicitGraph,
        vertex: usize,
        opts: AnalysisOptions,
    ) -> Result<Analysis<'a>, AnalysisError> {
        if vertex >= graph.vertices() {
            return Err(AnalysisError::VertexOutOfRange(vertex, graph.vertices()));
        }
        let delta_x: Vec<usize> = graph.neighbors(vertex).to_vec();
        if delta_x.is_empty() {
            return Err(AnalysisError::Degenerate);
        }
        let g = graph.aut();
        let g_x = g.pointwise_stabiliser(&[vertex]);
        let local_action = g_x.restrict_to(&delta_x)?;
        let valency = delta_x.len();
        let local_class = classify_action(
            &local_action,
            &(0..valency).collect::<Vec<_>>(),
            opts.enum_bound,
        )?;
        let y = delta_x[0];
        let g_y = g.pointwise_stabiliser(&[y]);
        let kernel = |centre: usize, radius: usize| {
            let (verts, _) = graph.ball_vertices(centre, radius);
            g.pointwise_stabiliser(&verts)
        };
        let (g_x1, g_x2, g_x3) = (kernel(vertex, 1), kernel(vertex, 2), kernel(vertex, 3));
        let (g_y1, g_y2, g_y3) = (kernel(y, 1), kernel(y, 2), kernel(y, 3));
        let g_xy = g.pointwise_stabiliser(&[vertex, y]);
        let mut closed_union: Vec<usize> = graph.neighbors(vertex).to_vec();
        closed_union.push(vertex);
        closed_union.extend(graph.neighbors(y));
        closed_union.push(y);
        closed_union.sort_unstable();
        closed_union.dedup();
        let arc_kernel = g.pointwise_stabiliser(&closed_union);

        let arc_transitive = {
            let arcs = 2 * graph.edges().len();
            arc_orbit_size(g, vertex, y) == arcs
        };

        Ok(Analysis {
            target: Target::Explicit { graph, vertex, delta_x },
            opts,
            valency,
            arc_transitive,
            g_x,
            g_y,
            g_xy,
            local_action,
            local_class,
            g_x1,
            g_x2,
            g_x3,
            g_y1,
            g_y2,
            g_y3,
            arc_kernel,
        })
    }

    pub fn options(&self) -> AnalysisOptions {
        self.opts
    }

    pub fn local_report(&self) -> LocalReport {
        LocalReport {
            valency: self.valency,
            order_gx: self.g_x.order().clone(),
            local_action_order: self.local_action.order().clone(),
            local_action_class: self.local_class.clone(),
            order_kernels: KernelOrders {
                gx1: self.g_x1.order().clone(),
                gx2: self.g_x2.order().clone(),
                gx3: self.g_x3.order().clone(),
                gy1: self.g_y1.order().clone(),
                gy2: self.g_y2.order().clone(),
                gy3: self.g_y3.order().clone(),
            },
            order_arc_kernel: self.arc_kernel.order().clone(),
            arc_kernel_p: is_p_group(&self.arc_kernel),
        }
    }

    /// Image of a subgroup of `G_x` on the neighbourhood of the analysed
    /// vertex.
    pub fn project_to_neighbors(&self, sub: &PermGroup) -> Result<PermGroup, AnalysisError> {
        match &self.target {
            Target::Coset { spec, delta_x } => {
                let act = coset_action_on_verts(spec, sub, delta_x)?;
                Ok(PermGroup::new(delta_x.len(), act.rows)?)
            }
            Target::Explicit { delta_x, .. } => Ok(sub.restrict_to(delta_x)?),
        }
    }

    /// `E_x` for a prime: the normal closure in `G_x` of `O_p(G_{x,y})`.
    pub fn e_x(&self, p: u64) -> Result<PermGroup, AnalysisError> {
        let s_xy = p_core(&self.g_xy, p, self.opts.enum_bound)?;
        Ok(self.g_x.normal_closure(s_xy.generators())?)
    }

    /// Checks the two hypothesis conditions. For explicit graphs the check
    /// runs at one representative of every vertex orbit and the statuses
    /// are merged; the reported action classes are those of the analysed
    /// vertex.
    pub fn hypothesis1_check(&self) -> HypothesisReport {
        let mut report = self.hypothesis_at_self();
        if let Target::Explicit { graph, vertex, .. } = &self.target {
            let g = graph.aut();
            let mut seen = vec![false; graph.vertices()];
            for &v in &g.orbit(*vertex) {
                seen[v] = true;
            }
            for v in 0..graph.vertices() {
                if seen[v] {
                    continue;
                }
                for &w in &g.orbit(v) {
                    seen[w] = true;
                }
                if let Ok(other) = Analysis::of_explicit(graph, v, self.opts) {
                    let other_report = other.hypothesis_at_self();
                    merge_reports(&mut report, &other_report);
                }
            }
        }
        report
    }

    fn hypothesis_at_self(&self) -> HypothesisReport {
        let bound = self.opts.enum_bound;
        let cond_i = match centraliser(&self.g_x, &self.g_x1, bound)
            .map_err(AnalysisError::from)
            .and_then(|c| self.project_to_neighbors(&c))
            .and_then(|img| {
                Ok(classify_action(&img, &(0..self.valency).collect::<Vec<_>>(), bound)?)
            }) {
            Ok(class) => CondResult {
                status: if class.transitive || class.semiregular {
                    Status::Pass
                } else {
                    Status::Fail
                },
                class: Some(class),
            },
            Err(_) => CondResult { status: Status::Undetermined, class: None },
        };

        let primes_checked: Vec<u64> = match self.g_xy.order_u64() {
            Some(o) if o <= bound => prime_factors(o),
            _ => Vec::new(),
        };
        let order_out_of_reach = self.g_xy.order_u64().map_or(true, |o| o > bound);
        let mut cond_ii = Vec::new();
        if order_out_of_reach {
            cond_ii.push(PrimeCond { prime: 0, status: Status::Undetermined, class: None });
        } else {
            for &p in &primes_checked {
                let entry = match self
                    .e_x(p)
                    .and_then(|e| self.project_to_neighbors(&e))
                    .and_then(|img| {
                        Ok(classify_action(&img, &(0..self.valency).collect::<Vec<_>>(), bound)?)
                    }) {
                    Ok(class) => PrimeCond {
                        prime: p,
                        status: if class.transitive || class.semiregular {
                            Status::Pass
                        } else {
                            Status::Fail
                        },
                        class: Some(class),
                    },
                    Err(_) => PrimeCond { prime: p, status: Status::Undetermined, class: None },
                };
                cond_ii.push(entry);
            }
        }
        HypothesisReport { cond_i, cond_ii, primes_checked }
    }

    /// Evaluates the dichotomy: p-group branch, alternative branch in one
    /// of the two arc orientations, or violated. The second clause runs the
    /// same way over `F*(G_{x,y})` with the centraliser certificate.
    pub fn tw_verdict(&self) -> TwVerdict {
        let kernel_status = is_p_group(&self.arc_kernel);
        let branch = if kernel_status.is_p_group() {
            Branch::PGroup(kernel_status)
        } else {
            let mut found = None;
            for (swapped, ga2, gb2, gb3) in [
                (false, &self.g_x2, &self.g_y2, &self.g_y3),
                (true, &self.g_y2, &self.g_x2, &self.g_x3),
            ] {
                let p = is_p_group(gb2);
                if self.arc_kernel.same_group(ga2) && gb2.same_group(gb3) && p.is_p_group() {
                    found = Some(Branch::Alternative { swapped, p });
                    break;
                }
            }
            found.unwrap_or(Branch::Violated)
        };

        let fstar_alternative = || {
            for (swapped, ga2, gb2) in
                [(false, &self.g_x2, &self.g_y2), (true, &self.g_y2, &self.g_x2)]
            {
                if self.arc_kernel.same_group(ga2) && gb2.is_trivial() {
                    return Some(FstarClause::Alternative { swapped });
                }
            }
            None
        };
        let fstar_clause = match fitting_and_fstar(&self.g_xy, self.opts.enum_bound) {
            Ok(rep) if rep.fstar_certified => {
                let status = is_p_group(rep.fstar.as_ref().unwrap());
                if status.is_p_group() {
                    FstarClause::PGroup(status)
                } else {
                    fstar_alternative().unwrap_or(FstarClause::Violated)
                }
            }
            _ => fstar_alternative().unwrap_or(FstarClause::Undetermined),
        };
        TwVerdict { branch, fstar_clause }
    }

    /// Conformance of the instance with the dichotomy: required to hold
    /// whenever the hypothesis passes, skipped (and recorded) otherwise.
    /// Arc-transitive presentations with a semiprimitive local action must
    /// additionally land in the p-group branch with `F*` a p-group or a
    /// trivial arc kernel.
    pub fn theorem1_conformance(
        &self,
        hypothesis: &HypothesisReport,
        verdict: &TwVerdict,
    ) -> Conformance {
        if hypothesis.any_fail() {
            return Conformance::Skip("hypothesis fails".into());
        }
        if hypothesis.any_undetermined() {
            return Conformance::Skip("hypothesis undetermined".into());
        }
        match &verdict.branch {
            Branch::PGroup(_) | Branch::Alternative { .. } => {}
            Branch::Violated => {
                return Conformance::Fail(
                    "dichotomy violated although the hypothesis passes".into(),
                )
            }
            Branch::Undetermined => {
                return Conformance::Fail(
                    "verdict undetermined although the hypothesis passes".into(),
                )
            }
        }
        if self.arc_transitive && self.local_class.semiprimitive == Flag::Yes {
            let p_branch = matches!(verdict.branch, Branch::PGroup(_));
            if !p_branch {
                return Conformance::Fail(
                    "semiprimitive local action but the arc kernel is not a p-group".into(),
                );
            }
            let fstar_ok = matches!(verdict.fstar_clause, FstarClause::PGroup(_))
                || self.arc_kernel.is_trivial();
            if !fstar_ok {
                return Conformance::Fail(
                    "semiprimitive local action but F* is not a p-group and the arc kernel is non-trivial"
                        .into(),
                );
            }
        }
        Conformance::Pass
    }

    /// Runs the hypothesis check, the verdict and the conformance check.
    pub fn full_verdict(&self) -> (HypothesisReport, TwVerdict, Conformance) {
        let hypothesis = self.hypothesis1_check();
        let verdict = self.tw_verdict();
        let conformance = self.theorem1_conformance(&hypothesis, &verdict);
        (hypothesis, verdict, conformance)
    }
}

fn merge_status(a: Status, b: Status) -> Status {
    a.max(b)
}

fn merge_reports(into: &mut HypothesisReport, other: &HypothesisReport) {
    into.cond_i.status = merge_status(into.cond_i.status, other.cond_i.status);
    let mut merged: BTreeMap<u64, PrimeCond> = BTreeMap::new();
    for c in into.cond_ii.iter().chain(other.cond_ii.iter()) {
        merged
            .entry(c.prime)
            .and_modify(|e| e.status = merge_status(e.status, c.status))
            .or_insert_with(|| c.clone());
    }
    into.cond_ii = merged.into_values().collect();
    let mut primes: Vec<u64> = into
        .primes_checked
        .iter()
        .chain(other.primes_checked.iter())
        .copied()
        .collect();
    primes.sort_unstable();
    primes.dedup();
    into.primes_checked = primes;
}

/// Size of the orbit of the ordered pair `(x, y)` under the group.
fn arc_orbit_size(g: &PermGroup, x: usize, y: usize) -> usize {
    let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    seen.insert((x, y));
    let mut queue = vec![(x, y)];
    let mut qi = 0;
    while qi < queue.len() {
        let (a, b) = queue[qi];
        qi += 1;
        for gen in g.generators() {
            let next = (gen.image(a), gen.image(b));
            if seen.insert(next) {
                queue.push(next);
            }
        }
    }
    seen.len()
}

/// Everything the `analyze` pipeline reports for one presentation.
#[derive(Serialize)]
pub struct AnalysisReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<crate::coset_graph::ValidationReport>,
    pub arc_transitive: bool,
    pub local: LocalReport,
    pub hypothesis: HypothesisReport,
    pub tw_verdict: TwVerdict,
    pub conformance: Conformance,
}

impl AnalysisReport {
    pub fn from_analysis(
        analysis: &Analysis<'_>,
        validation: Option<crate::coset_graph::ValidationReport>,
    ) -> AnalysisReport {
        let (hypothesis, tw_verdict, conformance) = analysis.full_verdict();
        AnalysisReport {
            validation,
            arc_transitive: analysis.arc_transitive,
            local: analysis.local_report(),
            hypothesis,
            tw_verdict,
            conformance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn p(degree: usize, text: &str) -> Perm {
        Perm::from_cycle_string(degree, text).unwrap()
    }

    fn sym(n: usize) -> PermGroup {
        let mut gens = vec![p(n, "(0 1)")];
        if n > 2 {
            let cycle: Vec<usize> = (1..n).chain(std::iter::once(0)).collect();
            gens.push(Perm::from_images(cycle).unwrap());
        }
        PermGroup::new(n, gens).unwrap()
    }

    /// Petersen graph as the Kneser graph on 2-subsets of {0..4} with the
    /// induced Sym(5) action.
    fn petersen() -> ExplicitGraph {
        let pairs: Vec<(usize, usize)> = (0..5)
            .flat_map(|a| ((a + 1)..5).map(move |b| (a, b)))
            .collect();
        let index = |a: usize, b: usize| {
            pairs
                .iter()
                .position(|&(x, y)| (x, y) == (a.min(b), a.max(b)))
                .unwrap()
        };
        let mut edges = Vec::new();
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                let (a, b) = pairs[i];
                let (c, d) = pairs[j];
                if a != c && a != d && b != c && b != d {
                    edges.push((i, j));
                }
            }
        }
        let induced = |s: &Perm| {
            let images: Vec<usize> = pairs
                .iter()
                .map(|&(a, b)| index(s.image(a), s.image(b)))
                .collect();
            Perm::from_images(images).unwrap()
        };
        let s5 = sym(5);
        let aut_gens: Vec<Perm> = s5.generators().iter().map(induced).collect();
        ExplicitGraph::new(10, edges, aut_gens).unwrap()
    }

    fn k4_spec() -> CosetGraphSpec {
        CosetGraphSpec::new(sym(4), vec![p(4, "(0 1)"), p(4, "(0 1 2)")], p(4, "(0 3)")).unwrap()
    }

    fn family_2_2_3() -> CosetGraphSpec {
        let h_gens: Vec<Perm> = [
            "(0 1)",
            "(2 3)",
            "(4 5)",
            "(6 7)",
            "(8 9)",
            "(10 11)",
            "(0 2)(1 3)(4 6)(5 7)(8 10)(9 11)",
        ]
        .iter()
        .map(|t| p(13, t))
        .collect();
        let a = p(13, "(0 12)(2 6)(3 7)(4 8)(5 9)");
        let mut g_gens = h_gens.clone();
        g_gens.push(a.clone());
        let g = PermGroup::new(13, g_gens).unwrap();
        CosetGraphSpec::new(g, h_gens, a).unwrap()
    }

    #[test]
    fn petersen_numbers() {
        let graph = petersen();
        let analysis = Analysis::of_explicit(&graph, 0, AnalysisOptions::default()).unwrap();
        assert_eq!(analysis.valency, 3);
        assert!(analysis.arc_transitive);
        assert_eq!(analysis.local_action.order(), &BigUint::from(6u32));
        assert!(analysis.local_class.primitive);
        assert_eq!(analysis.g_x1.order(), &BigUint::from(2u32));
        assert!(analysis.arc_kernel.is_trivial());

        let (hyp, verdict, conformance) = analysis.full_verdict();
        assert!(hyp.all_pass());
        assert!(matches!(verdict.branch, Branch::PGroup(PGroupStatus::Trivial)));
        assert_eq!(conformance, Conformance::Pass);
    }

    #[test]
    fn k4_numbers() {
        let spec = k4_spec();
        let analysis = Analysis::of_coset(&spec, AnalysisOptions::default()).unwrap();
        assert_eq!(analysis.valency, 3);
        assert_eq!(analysis.local_action.order(), &BigUint::from(6u32));
        assert!(analysis.local_class.primitive);
        assert!(analysis.g_x1.is_trivial());
        assert!(analysis.arc_kernel.is_trivial());
        let (hyp, verdict, conformance) = analysis.full_verdict();
        assert!(hyp.all_pass());
        assert!(matches!(verdict.branch, Branch::PGroup(_)));
        assert_eq!(conformance, Conformance::Pass);
    }

    #[test]
    fn family_2_2_3_local_analysis() {
        let spec = family_2_2_3();
        let analysis = Analysis::of_coset(&spec, AnalysisOptions::default()).unwrap();
        assert_eq!(analysis.valency, 4);
        assert_eq!(analysis.g_x.order(), &BigUint::from(128u32));
        assert_eq!(analysis.local_action.order(), &BigUint::from(8u32));
        assert_eq!(analysis.g_x1.order(), &BigUint::from(16u32));
        assert_eq!(analysis.arc_kernel.order(), &BigUint::from(8u32));
        assert_eq!(is_p_group(&analysis.arc_kernel), PGroupStatus::PGroup(2));
        // local action is C2 wr C2: transitive, imprimitive, not semiprimitive
        assert!(analysis.local_class.transitive);
        assert!(!analysis.local_class.primitive);
        assert_eq!(analysis.local_class.semiprimitive, Flag::No);

        let hyp = analysis.hypothesis1_check();
        assert_eq!(hyp.cond_i.status, Status::Fail);
        let cls = hyp.cond_i.class.as_ref().unwrap();
        assert!(!cls.transitive && !cls.semiregular);
        // centraliser image is elementary abelian of order 4 with two
        // orbits of size 2 on the four neighbours
        assert_eq!(cls.order, BigUint::from(4u32));

        let verdict = analysis.tw_verdict();
        assert!(matches!(verdict.branch, Branch::PGroup(PGroupStatus::PGroup(2))));
        let conformance = analysis.theorem1_conformance(&hyp, &verdict);
        assert!(matches!(conformance, Conformance::Skip(_)));
    }

    #[test]
    fn family_2_2_3_kernel_tower_and_conjugacy() {
        let spec = family_2_2_3();
        let analysis = Analysis::of_coset(&spec, AnalysisOptions::default()).unwrap();
        // monotone kernels
        assert!(analysis.g_x1.contains_group(&analysis.g_x2));
        assert!(analysis.g_x2.contains_group(&analysis.g_x3));
        // kernel-image product
        assert_eq!(
            analysis.g_x1.order() * analysis.local_action.order(),
            analysis.g_x.order().clone()
        );
        // |G_x| = valency * |G_{x,y}|
        assert_eq!(
            analysis.g_xy.order() * BigUint::from(analysis.valency),
            analysis.g_x.order().clone()
        );
        // arc kernel divides both endpoint kernels
        assert_eq!(analysis.g_x1.order() % analysis.arc_kernel.order(), BigUint::ZERO);
        assert_eq!(analysis.g_y1.order() % analysis.arc_kernel.order(), BigUint::ZERO);
        // conjugacy consistency for the involutory arc element
        let conjugated = analysis.g_x1.conjugated_by(spec.arc());
        assert!(conjugated.same_group(&analysis.g_y1));
    }

    #[test]
    fn family_2_2_3_lemma_2_3_instance() {
        let spec = family_2_2_3();
        let analysis = Analysis::of_coset(&spec, AnalysisOptions::default()).unwrap();
        let bound = analysis.options().enum_bound;
        for prime in prime_factors(analysis.g_xy.order_u64().unwrap()) {
            let e_x = analysis.e_x(prime).unwrap();
            let comm = PermGroup::commutator_subgroup(&analysis.g_x1, &e_x).unwrap();
            let core = p_core(&analysis.g_x1, prime, bound).unwrap();
            assert!(
                core.contains_group(&comm),
                "commutator not inside O_{}(G_x^[1])",
                prime
            );
        }
    }

    #[test]
    fn cycle_graph_c5() {
        let rotation = p(5, "(0 1 2 3 4)");
        let reflection = Perm::from_images(vec![0, 4, 3, 2, 1]).unwrap();
        let graph = ExplicitGraph::new(
            5,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)],
            vec![rotation, reflection],
        )
        .unwrap();
        let analysis = Analysis::of_explicit(&graph, 0, AnalysisOptions::default()).unwrap();
        assert_eq!(analysis.valency, 2);
        assert!(analysis.arc_transitive);
        assert_eq!(analysis.g_x.order(), &BigUint::from(2u32));
        assert!(analysis.g_x1.is_trivial());
        assert!(analysis.arc_kernel.is_trivial());
        let (hyp, verdict, conformance) = analysis.full_verdict();
        assert!(hyp.all_pass());
        assert!(matches!(verdict.branch, Branch::PGroup(_)));
        assert_eq!(conformance, Conformance::Pass);
    }

    #[test]
    fn non_arc_transitive_graph_detected() {
        // triangle with a pendant vertex; the supplied group only flips 0,1
        let graph = ExplicitGraph::new(
            4,
            vec![(0, 1), (1, 2), (0, 2), (2, 3)],
            vec![p(4, "(0 1)")],
        )
        .unwrap();
        let analysis = Analysis::of_explicit(&graph, 0, AnalysisOptions::default()).unwrap();
        assert!(!analysis.arc_transitive);
    }

    #[test]
    fn report_serialises_deterministically() {
        let spec = k4_spec();
        let analysis = Analysis::of_coset(&spec, AnalysisOptions::default()).unwrap();
        let report = AnalysisReport::from_analysis(&analysis, Some(spec.validate()));
        let a = serde_json::to_string_pretty(&report).unwrap();
        let analysis2 = Analysis::of_coset(&spec, AnalysisOptions::default()).unwrap();
        let report2 = AnalysisReport::from_analysis(&analysis2, Some(spec.validate()));
        let b = serde_json::to_string_pretty(&report2).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"order_arc_kernel\": \"1\""));
        assert!(a.contains("\"conformance\": \"pass\""));
    }

    #[test]
    fn hypothesis_undetermined_when_bound_too_small() {
        let spec = k4_spec();
        let opts = AnalysisOptions { enum_bound: 2, ball_cap: DEFAULT_BALL_CAP };
        let analysis = Analysis::of_coset(&spec, opts).unwrap();
        let hyp = analysis.hypothesis1_check();
        assert!(hyp.any_undetermined());
        let verdict = analysis.tw_verdict();
        let conformance = analysis.theorem1_conformance(&hyp, &verdict);
        assert!(matches!(conformance, Conformance::Skip(_)));
    }

    #[test]
    fn trivial_arc_kernel_yields_one() {
        let spec = k4_spec();
        let analysis = Analysis::of_coset(&spec, AnalysisOptions::default()).unwrap();
        assert!(analysis.arc_kernel.order().is_one());
        assert_eq!(is_p_group(&analysis.arc_kernel), PGroupStatus::Trivial);
    }
}
