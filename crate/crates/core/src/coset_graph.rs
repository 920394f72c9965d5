//! Coset-graph presentations `Cos(G, H, a)` and explicit graphs with a
//! supplied automorphism subgroup.
//!
//! Vertices of a coset graph are right cosets of `H`, always handled as
//! canonical minimal coset representatives — never index tables — because
//! the full graph is unmaterialisable for the interesting families (the
//! smallest built-in construction already has `13!/128` vertices). Local
//! analysis only ever needs bounded BFS balls around the base arc.
//!
//! The base vertex is the coset `H`; its neighbours are the cosets `Hah`,
//! and the neighbours of a general vertex `Hv` are `H n v` where `n` runs
//! over representatives of the distinct `Hah`. Arcs are `(Hx, Hy)` with
//! `H y x^-1 H` contained in `HaH`; the graph is undirected iff
//! `a^-1` lies in `HaH` and connected iff `<H, a> = G`.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Perm;
use crate::stab_chain::{AuxAction, GroupError, PermGroup};

/// Default vertex budget for BFS balls; radius <= 3 at the valencies the
/// corpus reaches stays far below this.
pub const DEFAULT_BALL_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum CosetGraphError {
    #[error("membership: subgroup generator {0} is not an element of G")]
    SubgroupGeneratorOutsideGroup(String),
    #[error("membership: arc element {0} is not an element of G")]
    ArcOutsideGroup(String),
    #[error("connectivity: <H,a> != G (|<H,a>| = {sub}, |G| = {full})")]
    Disconnected { sub: BigUint, full: BigUint },
    #[error("undirectedness: a^-1 is not in HaH")]
    Directed,
    #[error("vertex budget exceeded: cap {cap}, reached {reached} vertices")]
    CapExceeded { cap: usize, reached: usize },
    #[error("action leaves the ball: vertex {vertex} maps outside under {gen}")]
    ActionLeavesBall { vertex: usize, gen: String },
    #[error("graph is not simple: edge ({0}, {1})")]
    NotSimple(usize, usize),
    #[error("graph is not connected")]
    NotConnected,
    #[error("edge ({0}, {1}) is not preserved by automorphism generator {2}")]
    EdgeNotPreserved(usize, usize, String),
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("bad cycle string {text:?}: {source}")]
    BadCycleString {
        text: String,
        source: crate::perm::ParseError,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A coset-graph presentation: the triple `(G, H-generators, a)`.
pub struct CosetGraphSpec {
    group: PermGroup,
    subgroup: PermGroup,
    arc: Perm,
    /// Canonical representatives of the base vertex's neighbour cosets, in
    /// BFS discovery order. Right-translating a vertex by these yields its
    /// neighbour set.
    translators: Vec<Perm>,
    base: Perm,
}

/// Validation outcome; every check is computed independently so a report is
/// produced even for broken specs.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub sub_gens_in_group: bool,
    pub arc_in_group: bool,
    pub connected: bool,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub generated_order: BigUint,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub group_order: BigUint,
    pub undirected: bool,
    /// True when undirectedness followed from `a` being an involution.
    pub undirected_via_involution: bool,
    pub valency: usize,
    /// `a` in `H`: a single-vertex presentation; the neighbour list is empty.
    pub degenerate: bool,
}

impl ValidationReport {
    /// The first violated condition, if any.
    pub fn failure(&self) -> Option<CosetGraphError> {
        if !self.sub_gens_in_group {
            return Some(CosetGraphError::SubgroupGeneratorOutsideGroup(
                "<some subgroup generator>".into(),
            ));
        }
        if !self.arc_in_group {
            return Some(CosetGraphError::ArcOutsideGroup("<a>".into()));
        }
        if !self.connected {
            return Some(CosetGraphError::Disconnected {
                sub: self.generated_order.clone(),
                full: self.group_order.clone(),
            });
        }
        if !self.undirected {
            return Some(CosetGraphError::Directed);
        }
        None
    }

    pub fn is_valid(&self) -> bool {
        self.sub_gens_in_group && self.arc_in_group && self.connected && self.undirected
    }
}

/// BFS ball of coset-vertices around a start vertex. Edges leading outside
/// the ball are omitted and flagged per vertex.
pub struct CosetBall {
    pub radius: usize,
    /// Canonical coset representatives; `verts[0]` is the start vertex.
    pub verts: Vec<Perm>,
    pub dist: Vec<usize>,
    /// Adjacency among ball vertices, by index.
    pub adj: Vec<Vec<usize>>,
    /// True for vertices with at least one neighbour outside the ball.
    pub has_boundary_edges: Vec<bool>,
    index: HashMap<Perm, usize>,
}

impl CosetBall {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn index_of(&self, rep: &Perm) -> Option<usize> {
        self.index.get(rep).copied()
    }

    /// Indices of the vertices at exactly the given distance.
    pub fn sphere(&self, d: usize) -> Vec<usize> {
        (0..self.verts.len()).filter(|&i| self.dist[i] == d).collect()
    }
}

impl CosetGraphSpec {
    pub fn new(group: PermGroup, sub_gens: Vec<Perm>, arc: Perm) -> Result<CosetGraphSpec, GroupError> {
        let degree = group.degree();
        for g in sub_gens.iter().chain(std::iter::once(&arc)) {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch { expected: degree, found: g.degree() });
            }
        }
        let subgroup = PermGroup::new(degree, sub_gens)?;
        let base = subgroup.minimal_coset_rep(&Perm::identity(degree));
        let translators = neighbour_reps(&subgroup, &arc, &base);
        Ok(CosetGraphSpec { group, subgroup, arc, translators, base })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    /// The vertex stabiliser `G_x` of the base vertex.
    pub fn subgroup(&self) -> &PermGroup {
        &self.subgroup
    }

    pub fn arc(&self) -> &Perm {
        &self.arc
    }

    /// Canonical representative of the base vertex `H`.
    pub fn base_vertex(&self) -> &Perm {
        &self.base
    }

    /// Canonical representative of the coset `Hg`.
    pub fn canonical(&self, g: &Perm) -> Perm {
        self.subgroup.minimal_coset_rep(g)
    }

    pub fn valency(&self) -> usize {
        if self.is_degenerate() {
            0
        } else {
            self.translators.len()
        }
    }

    /// `a` in `H`: the presentation has a single vertex with loops.
    pub fn is_degenerate(&self) -> bool {
        self.subgroup.contains(&self.arc)
    }

    /// Runs every validation check: memberships, connectivity via order
    /// equality, undirectedness (trivial for involutions, otherwise a test
    /// of `Ha^-1` against the base neighbour cosets) and the valency.
    pub fn validate(&self) -> ValidationReport {
        let sub_gens_in_group = self
            .subgroup
            .generators()
            .iter()
            .all(|g| self.group.contains(g));
        let arc_in_group = self.group.contains(&self.arc);
        let generated = {
            let mut gens = self.subgroup.generators().to_vec();
            gens.push(self.arc.clone());
            PermGroup::new(self.group.degree(), gens).expect("degrees validated at construction")
        };
        let connected = generated.order() == self.group.order();
        let involution = self.arc.compose(&self.arc).is_identity() && !self.arc.is_identity();
        let undirected = if self.is_degenerate() || involution {
            true
        } else {
            let a_inv_rep = self.canonical(&self.arc.inverse());
            self.translators.iter().any(|t| *t == a_inv_rep)
        };
        ValidationReport {
            sub_gens_in_group,
            arc_in_group,
            connected,
            generated_order: generated.order().clone(),
            group_order: self.group.order().clone(),
            undirected,
            undirected_via_involution: involution,
            valency: self.valency(),
            degenerate: self.is_degenerate(),
        }
    }

    /// Neighbour cosets of the vertex `Hv`, as canonical representatives.
    /// Exactly `valency` many: the translator cosets are pairwise distinct
    /// and stay so after right translation.
    pub fn neighbors(&self, v: &Perm) -> Vec<Perm> {
        if self.is_degenerate() {
            return Vec::new();
        }
        let out: Vec<Perm> = self
            .translators
            .iter()
            .map(|n| self.canonical(&n.compose(v)))
            .collect();
        debug_assert!({
            let mut sorted = out.clone();
            sorted.sort();
            sorted.windows(2).all(|w| w[0] != w[1])
        });
        out
    }

    /// BFS ball around the base vertex.
    pub fn ball(&self, radius: usize, cap: usize) -> Result<CosetBall, CosetGraphError> {
        self.ball_around(self.base.clone(), radius, cap)
    }

    /// BFS ball around an arbitrary canonical vertex.
    pub fn ball_around(
        &self,
        start: Perm,
        radius: usize,
        cap: usize,
    ) -> Result<CosetBall, CosetGraphError> {
        let mut verts = vec![start.clone()];
        let mut dist = vec![0usize];
        let mut index = HashMap::new();
        index.insert(start, 0usize);
        let mut qi = 0;
        while qi < verts.len() {
            let d = dist[qi];
            if d == radius {
                break;
            }
            let v = verts[qi].clone();
            qi += 1;
            for w in self.neighbors(&v) {
                if !index.contains_key(&w) {
                    if verts.len() >= cap {
                        return Err(CosetGraphError::CapExceeded {
                            cap,
                            reached: verts.len(),
                        });
                    }
                    index.insert(w.clone(), verts.len());
                    dist.push(d + 1);
                    verts.push(w);
                }
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
        let mut has_boundary_edges = vec![false; verts.len()];
        for i in 0..verts.len() {
            for w in self.neighbors(&verts[i]) {
                match index.get(&w) {
                    Some(&j) => {
                        adj[i].push(j);
                        debug_assert!(dist[j] + 1 >= dist[i] && dist[j] <= dist[i] + 1);
                    }
                    None => has_boundary_edges[i] = true,
                }
            }
        }
        Ok(CosetBall { radius, verts, dist, adj, has_boundary_edges, index })
    }

    /// The action of a subgroup (of `G_x`, typically) on the ball's
    /// vertices by right multiplication. Fails if the subgroup does not
    /// stabilise the ball setwise.
    pub fn action_on_ball(
        &self,
        subgroup: &PermGroup,
        ball: &CosetBall,
    ) -> Result<AuxAction, CosetGraphError> {
        let mut rows = Vec::with_capacity(subgroup.generators().len());
        for g in subgroup.generators() {
            let mut images = Vec::with_capacity(ball.len());
            for (i, v) in ball.verts.iter().enumerate() {
                let w = self.canonical(&v.compose(g));
                match ball.index_of(&w) {
                    Some(j) => images.push(j),
                    None => {
                        return Err(CosetGraphError::ActionLeavesBall {
                            vertex: i,
                            gen: g.to_cycle_string(),
                        })
                    }
                }
            }
            rows.push(Perm::from_images(images).expect("right multiplication permutes the ball"));
        }
        Ok(AuxAction { aux_size: ball.len(), rows })
    }

    /// Materialises the whole graph. Requires `|G : H| <= cap`.
    pub fn materialize(&self, cap: usize) -> Result<ExplicitGraph, CosetGraphError> {
        let n_vertices = self.group.order() / self.subgroup.order();
        if n_vertices > BigUint::from(cap) {
            return Err(CosetGraphError::CapExceeded { cap, reached: cap });
        }
        let ball = self.ball_around(self.base.clone(), usize::MAX, cap)?;
        let mut edges = Vec::new();
        for (i, nbrs) in ball.adj.iter().enumerate() {
            for &j in nbrs {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
        let aut_gens: Vec<Perm> = self
            .group
            .generators()
            .iter()
            .map(|g| {
                let images: Vec<usize> = ball
                    .verts
                    .iter()
                    .map(|v| ball.index_of(&self.canonical(&v.compose(g))).expect("closed"))
                    .collect();
                Perm::from_images(images).expect("right multiplication permutes vertices")
            })
            .collect();
        ExplicitGraph::new(ball.len(), edges, aut_gens)
    }
}

/// Canonical representatives of the neighbour cosets `{Hah : h in H}` of the
/// base vertex, by orbit closure over the subgroup generators.
fn neighbour_reps(subgroup: &PermGroup, arc: &Perm, base: &Perm) -> Vec<Perm> {
    let start = subgroup.minimal_coset_rep(arc);
    if start == *base {
        // a in H: degenerate single-vertex presentation
        return vec![start];
    }
    let mut reps = vec![start.clone()];
    let mut seen: HashMap<Perm, ()> = HashMap::new();
    seen.insert(start, ());
    let mut qi = 0;
    while qi < reps.len() {
        let cur = reps[qi].clone();
        qi += 1;
        for h in subgroup.generators() {
            let next = subgroup.minimal_coset_rep(&cur.compose(h));
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), ());
                reps.push(next);
            }
        }
    }
    reps
}

/// An explicit graph with a supplied group of automorphisms acting on the
/// vertex indices.
pub struct ExplicitGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    aut: PermGroup,
}

impl ExplicitGraph {
    /// Validates simplicity, connectivity and that every generator maps
    /// edges to edges.
    pub fn new(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        aut_gens: Vec<Perm>,
    ) -> Result<ExplicitGraph, CosetGraphError> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(CosetGraphError::VertexOutOfRange(u.max(v), vertices));
            }
            if u == v {
                return Err(CosetGraphError::NotSimple(u, v));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(CosetGraphError::NotSimple(w[0].0, w[0].1));
        }
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); vertices];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        if vertices > 0 {
            let mut seen = vec![false; vertices];
            let mut queue = vec![0usize];
            seen[0] = true;
            let mut qi = 0;
            while qi < queue.len() {
                let v = queue[qi];
                qi += 1;
                for &w in &adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push(w);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(CosetGraphError::NotConnected);
            }
        }
        let edge_set: std::collections::HashSet<(usize, usize)> =
            normalized.iter().copied().collect();
        for g in &aut_gens {
            if g.degree() != vertices {
                return Err(CosetGraphError::Group(GroupError::DegreeMismatch {
                    expected: vertices,
                    found: g.degree(),
                }));
            }
            for &(u, v) in &normalized {
                let (iu, iv) = (g.image(u), g.image(v));
                if !edge_set.contains(&(iu.min(iv), iu.max(iv))) {
                    return Err(CosetGraphError::EdgeNotPreserved(u, v, g.to_cycle_string()));
                }
            }
        }
        let aut = PermGroup::new(vertices, aut_gens)?;
        Ok(ExplicitGraph { vertices, edges: normalized, adjacency, aut })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn aut(&self) -> &PermGroup {
        &self.aut
    }

    /// Vertices at distance <= radius from `start`, in BFS order, with
    /// their distances.
    pub fn ball_vertices(&self, start: usize, radius: usize) -> (Vec<usize>, Vec<usize>) {
        let mut verts = vec![start];
        let mut dist = vec![0usize];
        let mut seen = vec![false; self.vertices];
        seen[start] = true;
        let mut qi = 0;
        while qi < verts.len() {
            if dist[qi] == radius {
                break;
            }
            let v = verts[qi];
            let d = dist[qi];
            qi += 1;
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    verts.push(w);
                    dist.push(d + 1);
                }
            }
        }
        (verts, dist)
    }
}

// --- JSON schemas -----------------------------------------------------------

/// Wire format of a coset spec:
/// `{"degree": n, "group_generators": [...], "subgroup_generators": [...], "a": "..."}`
/// with permutations as cycle strings. Extra keys (such as the layout block
/// written by the construction) are ignored.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CosetSpecJson {
    pub degree: usize,
    pub group_generators: Vec<String>,
    pub subgroup_generators: Vec<String>,
    pub a: String,
}

/// Wire format of an explicit graph:
/// `{"vertices": n, "edges": [[u,v],...], "aut_generators": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplicitGraphJson {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub aut_generators: Vec<String>,
}

fn parse_cycles(degree: usize, text: &str) -> Result<Perm, CosetGraphError> {
    Perm::from_cycle_string(degree, text).map_err(|source| CosetGraphError::BadCycleString {
        text: text.to_string(),
        source,
    })
}

impl CosetSpecJson {
    pub fn to_spec(&self) -> Result<CosetGraphSpec, CosetGraphError> {
        let group_gens = self
            .group_generators
            .iter()
            .map(|t| parse_cycles(self.degree, t))
            .collect::<Result<Vec<_>, _>>()?;
        let sub_gens = self
            .subgroup_generators
            .iter()
            .map(|t| parse_cycles(self.degree, t))
            .collect::<Result<Vec<_>, _>>()?;
        let arc = parse_cycles(self.degree, &self.a)?;
        let group = PermGroup::new(self.degree, group_gens)?;
        Ok(CosetGraphSpec::new(group, sub_gens, arc)?)
    }

    pub fn from_spec(spec: &CosetGraphSpec) -> CosetSpecJson {
        CosetSpecJson {
            degree: spec.group.degree(),
            group_generators: spec
                .group
                .generators()
                .iter()
                .map(|g| g.to_cycle_string())
                .collect(),
            subgroup_generators: spec
                .subgroup
                .generators()
                .iter()
                .map(|g| g.to_cycle_string())
                .collect(),
            a: spec.arc.to_cycle_string(),
        }
    }
}

impl ExplicitGraphJson {
    pub fn to_graph(&self) -> Result<ExplicitGraph, CosetGraphError> {
        let aut_gens = self
            .aut_generators
            .iter()
            .map(|t| parse_cycles(self.vertices, t))
            .collect::<Result<Vec<_>, _>>()?;
        ExplicitGraph::new(self.vertices, self.edges.clone(), aut_gens)
    }

    pub fn from_graph(graph: &ExplicitGraph) -> ExplicitGraphJson {
        ExplicitGraphJson {
            vertices: graph.vertices,
            edges: graph.edges.clone(),
            aut_generators: graph
                .aut
                .generators()
                .iter()
                .map(|g| g.to_cycle_string())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn triangle_spec() -> CosetGraphSpec {
        CosetGraphSpec::new(sym(3), vec![p(3, "(0 1)")], p(3, "(1 2)")).unwrap()
    }

    fn k4_spec() -> CosetGraphSpec {
        // H = stabiliser of 3 in Sym(4), a = (0 3)
        CosetGraphSpec::new(sym(4), vec![p(4, "(0 1)"), p(4, "(0 1 2)")], p(4, "(0 3)")).unwrap()
    }

    /// The wreath-layered family at (C2, C2, 3): six block transpositions,
    /// one block-swapping generator, and the involution a, on 13 points.
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
    fn triangle_validates_and_materializes() {
        let spec = triangle_spec();
        let report = spec.validate();
        assert!(report.is_valid());
        assert_eq!(report.valency, 2);
        assert!(!report.degenerate);
        let graph = spec.materialize(100).unwrap();
        assert_eq!(graph.vertices(), 3);
        assert_eq!(graph.edges().len(), 3);
    }

    #[test]
    fn k4_presentation() {
        let spec = k4_spec();
        let report = spec.validate();
        assert!(report.is_valid());
        assert_eq!(report.valency, 3);
        let graph = spec.materialize(100).unwrap();
        assert_eq!(graph.vertices(), 4);
        assert_eq!(graph.edges().len(), 6);
        for &(u, v) in graph.edges() {
            assert!(graph.neighbors(u).contains(&v));
            assert!(graph.neighbors(v).contains(&u));
        }
    }

    #[test]
    fn arc_outside_group_is_rejected() {
        let alt4 = PermGroup::new(4, vec![p(4, "(0 1 2)"), p(4, "(1 2 3)")]).unwrap();
        let spec = CosetGraphSpec::new(alt4, vec![p(4, "(0 1 2)")], p(4, "(0 1)")).unwrap();
        let report = spec.validate();
        assert!(!report.arc_in_group);
        assert!(matches!(report.failure(), Some(CosetGraphError::ArcOutsideGroup(_))));
    }

    #[test]
    fn disconnected_spec_reports_it() {
        // H and a generate only Sym({0,1,2}) inside Sym(4)
        let spec = CosetGraphSpec::new(sym(4), vec![p(4, "(0 1)")], p(4, "(1 2)")).unwrap();
        let report = spec.validate();
        assert!(report.sub_gens_in_group && report.arc_in_group);
        assert!(!report.connected);
        assert!(matches!(report.failure(), Some(CosetGraphError::Disconnected { .. })));
    }

    #[test]
    fn family_2_2_3_validates() {
        let spec = family_2_2_3();
        let report = spec.validate();
        assert!(report.is_valid(), "{:?}", report.failure().map(|e| e.to_string()));
        assert_eq!(report.valency, 4);
        assert!(report.undirected_via_involution);
        assert_eq!(report.generated_order, BigUint::from(6_227_020_800u64));
        assert_eq!(spec.subgroup().order(), &BigUint::from(128u32));
    }

    #[test]
    fn base_neighbors_of_family() {
        let spec = family_2_2_3();
        let nbrs = spec.neighbors(spec.base_vertex());
        assert_eq!(nbrs.len(), 4);
        let mut dedup = nbrs.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 4);
    }

    #[test]
    fn ball_radii_of_family() {
        let spec = family_2_2_3();
        let b0 = spec.ball(0, 10).unwrap();
        assert_eq!(b0.len(), 1);
        assert_eq!(&b0.verts[0], spec.base_vertex());

        let b2 = spec.ball(2, 1000).unwrap();
        assert!(b2.len() <= 17);
        assert_eq!(b2.sphere(1).len(), 4);

        // independent count of the distance <= 2 cosets: brute force over H
        let h_elems = spec.subgroup().enumerate_elements(1000).unwrap();
        let a = spec.arc();
        let mut reach: std::collections::HashSet<Perm> = std::collections::HashSet::new();
        reach.insert(spec.base_vertex().clone());
        for h in &h_elems {
            reach.insert(spec.canonical(&a.compose(h)));
        }
        for h in &h_elems {
            for h2 in &h_elems {
                reach.insert(spec.canonical(&a.compose(h).compose(a).compose(h2)));
            }
        }
        assert_eq!(b2.len(), reach.len());

        let b3 = spec.ball(3, 1000).unwrap();
        assert!(b3.len() <= 53);
        // monotonicity: the radius-2 ball is a BFS prefix of the radius-3 ball
        assert_eq!(&b3.verts[..b2.len()], &b2.verts[..]);
        assert!(spec.ball(3, 10).is_err());
    }

    #[test]
    fn ball_adjacency_is_symmetric() {
        let spec = family_2_2_3();
        let ball = spec.ball(2, 1000).unwrap();
        for i in 0..ball.len() {
            for &j in &ball.adj[i] {
                assert!(ball.adj[j].contains(&i), "asymmetric edge {} {}", i, j);
            }
        }
    }

    #[test]
    fn kernel_of_local_action_has_order_16() {
        let spec = family_2_2_3();
        let ball = spec.ball(1, 100).unwrap();
        let act = spec.action_on_ball(spec.subgroup(), &ball).unwrap();
        let kernel = spec.subgroup().kernel_on_aux(&act).unwrap();
        assert_eq!(kernel.order(), &BigUint::from(16u32));
    }

    #[test]
    fn degenerate_spec() {
        let spec = CosetGraphSpec::new(sym(3), vec![p(3, "(0 1)"), p(3, "(0 1 2)")], p(3, "(0 1)"))
            .unwrap();
        assert!(spec.is_degenerate());
        assert_eq!(spec.valency(), 0);
        assert!(spec.neighbors(spec.base_vertex()).is_empty());
        let report = spec.validate();
        assert!(report.degenerate);
        assert!(report.is_valid());
    }

    #[test]
    fn materialize_cap() {
        let spec = family_2_2_3();
        assert!(matches!(
            spec.materialize(100_000),
            Err(CosetGraphError::CapExceeded { .. })
        ));
    }

    #[test]
    fn explicit_graph_validation() {
        // path graph with a flip
        let flip = p(3, "(0 2)");
        let graph = ExplicitGraph::new(3, vec![(0, 1), (1, 2)], vec![flip]).unwrap();
        assert_eq!(graph.neighbors(1), &[0, 2]);

        assert!(matches!(
            ExplicitGraph::new(3, vec![(0, 0)], vec![]),
            Err(CosetGraphError::NotSimple(0, 0))
        ));
        assert!(matches!(
            ExplicitGraph::new(4, vec![(0, 1), (2, 3)], vec![]),
            Err(CosetGraphError::NotConnected)
        ));
        assert!(matches!(
            ExplicitGraph::new(3, vec![(0, 1), (1, 2)], vec![p(3, "(0 1)")]),
            Err(CosetGraphError::EdgeNotPreserved(..))
        ));
    }

    #[test]
    fn json_round_trip() {
        let spec = k4_spec();
        let json = CosetSpecJson::from_spec(&spec);
        let text = serde_json::to_string(&json).unwrap();
        let back: CosetSpecJson = serde_json::from_str(&text).unwrap();
        let spec2 = back.to_spec().unwrap();
        assert_eq!(spec2.group().order(), spec.group().order());
        assert_eq!(spec2.valency(), 3);

        // extra keys (e.g. a layout block) are tolerated
        let with_layout = "{\"degree\":4,\"group_generators\":[\"(0 1)\",\"(0 1 2 3)\"],\
             \"subgroup_generators\":[\"(0 1)\",\"(0 1 2)\"],\"a\":\"(0 3)\",\
             \"layout\":{\"n\":13}}";
        let parsed: CosetSpecJson = serde_json::from_str(with_layout).unwrap();
        assert_eq!(parsed.degree, 4);
    }
}
