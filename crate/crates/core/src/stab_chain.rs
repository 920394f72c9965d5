//! Permutation groups backed by base / strong-generating-set chains.
//!
//! The chain is built by a deterministic (non-randomised) Schreier-Sims
//! run: the same generator list and base hint always produce the same base,
//! the same transversals and hence the same canonical coset representatives.
//! Group orders are exact arbitrary-precision integers.
//!
//! A group is immutable once constructed; the chain is built eagerly inside
//! the constructor, so handles are read-only afterwards and freely shareable.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::perm::Perm;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("generator degrees differ: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("empty generator list with unspecified degree")]
    EmptyNoDegree,
    #[error("enumeration bound exceeded: group order {order} > bound {bound}")]
    EnumerationBoundExceeded { order: BigUint, bound: u64 },
    #[error("seed permutation {0} is not an element of the group")]
    SeedOutsideGroup(String),
    #[error("auxiliary action has {rows} rows but the group has {generators} generators")]
    AuxRowMismatch { rows: usize, generators: usize },
    #[error("auxiliary action row has degree {found}, expected {expected}")]
    AuxDegreeMismatch { expected: usize, found: usize },
    #[error("degree mismatch: group degree {group}, argument degree {other}")]
    WrongDegree { group: usize, other: usize },
    #[error("domain is not stabilised setwise: point {point} maps to {image} outside it")]
    DomainNotInvariant { point: usize, image: usize },
}

/// One level of a stabiliser chain: orbit and transversal of `base` under
/// the group generated by `gens` (which all fix the base points of every
/// earlier level).
#[derive(Clone)]
struct Level {
    base: usize,
    gens: Vec<Perm>,
    /// Orbit of `base` in BFS discovery order; `orbit[0] == base`.
    orbit: Vec<usize>,
    /// Indexed by point: `(u, u^-1)` with `base^u = point`.
    transversal: Vec<Option<(Perm, Perm)>>,
}

impl Level {
    fn new(degree: usize, base: usize) -> Level {
        let mut level = Level {
            base,
            gens: Vec::new(),
            orbit: Vec::new(),
            transversal: vec![None; degree],
        };
        level.recompute(degree);
        level
    }

    fn recompute(&mut self, degree: usize) {
        self.orbit.clear();
        self.transversal = vec![None; degree];
        self.orbit.push(self.base);
        let id = Perm::identity(degree);
        self.transversal[self.base] = Some((id.clone(), id));
        let mut qi = 0;
        while qi < self.orbit.len() {
            let p = self.orbit[qi];
            qi += 1;
            let u_p = self.transversal[p].as_ref().unwrap().0.clone();
            for s in &self.gens {
                let q = s.image(p);
                if self.transversal[q].is_none() {
                    let t = u_p.compose(s);
                    let t_inv = t.inverse();
                    self.transversal[q] = Some((t, t_inv));
                    self.orbit.push(q);
                }
            }
        }
    }
}

/// A permutation group on `{0..degree-1}`: a generator list plus an eagerly
/// built stabiliser chain supporting exact order, membership, stabiliser and
/// canonical-coset-representative queries.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
    order: BigUint,
}

/// An action of a group's generators on `aux_size` auxiliary points:
/// `rows[i]` is how `generators[i]` permutes the auxiliary set. The rows
/// must define a genuine action (a homomorphism); callers in this crate
/// derive them from right multiplication on canonically labelled cosets,
/// which is an action by construction, so the homomorphism property is not
/// re-verified here.
#[derive(Clone, Debug)]
pub struct AuxAction {
    pub aux_size: usize,
    pub rows: Vec<Perm>,
}

impl PermGroup {
    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup {
            degree,
            generators: Vec::new(),
            levels: Vec::new(),
            order: BigUint::one(),
        }
    }

    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup, GroupError> {
        PermGroup::with_base_hint(degree, generators, &[])
    }

    /// `Sym(n)` in its natural action.
    pub fn symmetric(n: usize) -> PermGroup {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            gens.push(Perm::from_images(swap).unwrap());
        }
        if n >= 3 {
            let cycle: Vec<usize> = (1..n).chain(std::iter::once(0)).collect();
            gens.push(Perm::from_images(cycle).unwrap());
        }
        PermGroup::new(n, gens).expect("valid generators")
    }

    /// `C_n` generated by an n-cycle.
    pub fn cyclic(n: usize) -> PermGroup {
        if n < 2 {
            return PermGroup::trivial(n);
        }
        let cycle: Vec<usize> = (1..n).chain(std::iter::once(0)).collect();
        PermGroup::new(n, vec![Perm::from_images(cycle).unwrap()]).expect("valid generator")
    }

    /// Builds the group with a deterministic Schreier-Sims run whose base
    /// begins with the `base_hint` points that the group actually moves, in
    /// hint order.
    pub fn with_base_hint(
        degree: usize,
        generators: Vec<Perm>,
        base_hint: &[usize],
    ) -> Result<PermGroup, GroupError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let levels = build_chain(degree, &generators, base_hint);
        let order = levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()));
        Ok(PermGroup { degree, generators, levels, order })
    }

    /// Like [`PermGroup::new`] but with the degree inferred from the
    /// generators; rejected when the list is empty.
    pub fn from_generators(generators: Vec<Perm>) -> Result<PermGroup, GroupError> {
        match generators.first() {
            Some(g) => PermGroup::new(g.degree(), generators),
            None => Err(GroupError::EmptyNoDegree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(&self.order).ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Exact membership test by sifting through the chain.
    pub fn contains(&self, p: &Perm) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        match self.sift(p) {
            Some(residue) => residue.is_identity(),
            None => false,
        }
    }

    /// Sifts `p`: returns the residue after stripping every level, or `None`
    /// if some base image falls outside its level's orbit.
    fn sift(&self, p: &Perm) -> Option<Perm> {
        let mut g = p.clone();
        for level in &self.levels {
            let image = g.image(level.base);
            match &level.transversal[image] {
                Some((_, u_inv)) => g = g.compose(u_inv),
                None => return None,
            }
        }
        Some(g)
    }

    /// Orbit of `x` under the group, in BFS discovery order.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        assert!(x < self.degree, "orbit: point {} outside degree {}", x, self.degree);
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![x];
        seen[x] = true;
        let mut qi = 0;
        while qi < orbit.len() {
            let p = orbit[qi];
            qi += 1;
            for g in &self.generators {
                let q = g.image(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
        }
        orbit
    }

    /// Orbits on `{0..degree-1}`, each in BFS order, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree {
            if !seen[x] {
                let orbit = self.orbit(x);
                for &p in &orbit {
                    seen[p] = true;
                }
                out.push(orbit);
            }
        }
        out
    }

    /// Subgroup fixing every point of `pts`, via base changes that put the
    /// points first. Points the group already fixes are skipped.
    pub fn pointwise_stabiliser(&self, pts: &[usize]) -> PermGroup {
        let mut cur = self.clone();
        for &p in pts {
            assert!(p < self.degree, "pointwise_stabiliser: point {} outside degree {}", p, self.degree);
            if cur.generators.iter().all(|g| g.image(p) == p) {
                continue;
            }
            cur = cur.point_stabiliser(p);
        }
        cur
    }

    /// Stabiliser of a single moved point: rebuild with the point as the
    /// first base point, then take the chain suffix below it.
    fn point_stabiliser(&self, p: usize) -> PermGroup {
        let rebuilt =
            PermGroup::with_base_hint(self.degree, self.generators.clone(), &[p])
                .expect("degrees already validated");
        debug_assert_eq!(rebuilt.levels.first().map(|l| l.base), Some(p));
        let levels: Vec<Level> = rebuilt.levels[1..].to_vec();
        let generators = match rebuilt.levels.first() {
            Some(_) => levels.first().map(|l| l.gens.clone()).unwrap_or_default(),
            None => Vec::new(),
        };
        let order = levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()));
        PermGroup { degree: self.degree, generators, levels, order }
    }

    /// Smallest subgroup containing `seeds` and closed under conjugation by
    /// this group's generators. Seeds must lie in the group.
    pub fn normal_closure(&self, seeds: &[Perm]) -> Result<PermGroup, GroupError> {
        for s in seeds {
            if !self.contains(s) {
                return Err(GroupError::SeedOutsideGroup(s.to_cycle_string()));
            }
        }
        let mut gens: Vec<Perm> =
            seeds.iter().filter(|s| !s.is_identity()).cloned().collect();
        let mut closure = PermGroup::new(self.degree, gens.clone())?;
        let mut idx = 0;
        while idx < gens.len() {
            let n = gens[idx].clone();
            idx += 1;
            for g in &self.generators {
                if g.is_identity() {
                    continue;
                }
                let c = n.conjugate_by(g);
                if !closure.contains(&c) {
                    gens.push(c);
                    closure = PermGroup::new(self.degree, gens.clone())?;
                }
            }
        }
        Ok(closure)
    }

    /// `[A, B]`: the normal closure in `<A, B>` of the generator commutators
    /// `g^-1 h^-1 g h`.
    pub fn commutator_subgroup(a: &PermGroup, b: &PermGroup) -> Result<PermGroup, GroupError> {
        if a.degree != b.degree {
            return Err(GroupError::WrongDegree { group: a.degree, other: b.degree });
        }
        let parent = a.join(b)?;
        let mut seeds = Vec::new();
        for g in &a.generators {
            for h in &b.generators {
                let comm = g
                    .inverse()
                    .compose(&h.inverse())
                    .compose(g)
                    .compose(h);
                if !comm.is_identity() {
                    seeds.push(comm);
                }
            }
        }
        parent.normal_closure(&seeds)
    }

    /// `<self, other>`.
    pub fn join(&self, other: &PermGroup) -> Result<PermGroup, GroupError> {
        if self.degree != other.degree {
            return Err(GroupError::WrongDegree { group: self.degree, other: other.degree });
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        PermGroup::new(self.degree, gens)
    }

    /// `a^-1 * self * a` as a group.
    pub fn conjugated_by(&self, a: &Perm) -> PermGroup {
        let gens: Vec<Perm> = self.generators.iter().map(|g| g.conjugate_by(a)).collect();
        PermGroup::new(self.degree, gens).expect("conjugation preserves degree")
    }

    /// True iff every generator of `other` lies in `self`.
    pub fn contains_group(&self, other: &PermGroup) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    /// True iff the two handles present the same subgroup.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.order == other.order && self.contains_group(other)
    }

    /// Image of the action on an invariant set, as a group of degree
    /// `domain.len()` (point `k` of the image is `domain[k]`).
    pub fn restrict_to(&self, domain: &[usize]) -> Result<PermGroup, GroupError> {
        let mut index = vec![usize::MAX; self.degree];
        for (k, &p) in domain.iter().enumerate() {
            index[p] = k;
        }
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let mut images = Vec::with_capacity(domain.len());
            for &p in domain {
                let q = g.image(p);
                if q >= self.degree || index[q] == usize::MAX {
                    return Err(GroupError::DomainNotInvariant { point: p, image: q });
                }
                images.push(index[q]);
            }
            gens.push(Perm::from_images(images).expect("restriction of a bijection"));
        }
        PermGroup::new(domain.len(), gens)
    }

    /// Extends each generator by its auxiliary row to a permutation of
    /// `{0..degree+aux_size-1}`.
    fn extend_by_aux(&self, act: &AuxAction) -> Result<Vec<Perm>, GroupError> {
        if act.rows.len() != self.generators.len() {
            return Err(GroupError::AuxRowMismatch {
                rows: act.rows.len(),
                generators: self.generators.len(),
            });
        }
        let n = self.degree;
        let mut extended = Vec::with_capacity(self.generators.len());
        for (g, row) in self.generators.iter().zip(&act.rows) {
            if row.degree() != act.aux_size {
                return Err(GroupError::AuxDegreeMismatch {
                    expected: act.aux_size,
                    found: row.degree(),
                });
            }
            let mut images: Vec<usize> = Vec::with_capacity(n + act.aux_size);
            images.extend(g.as_images());
            images.extend(row.as_images().iter().map(|&j| n + j));
            extended.push(Perm::from_images(images).expect("extension of bijections"));
        }
        Ok(extended)
    }

    /// Subgroup whose induced auxiliary action fixes every point of
    /// `fixed_aux`, restricted back to the original domain.
    pub fn stabiliser_on_aux(
        &self,
        act: &AuxAction,
        fixed_aux: &[usize],
    ) -> Result<PermGroup, GroupError> {
        let extended = self.extend_by_aux(act)?;
        let n = self.degree;
        let ext_group = PermGroup::new(n + act.aux_size, extended)?;
        let pts: Vec<usize> = fixed_aux.iter().map(|&j| n + j).collect();
        let stab = ext_group.pointwise_stabiliser(&pts);
        let restricted: Vec<Perm> = stab
            .generators
            .iter()
            .map(|g| {
                Perm::from_images(g.as_images()[..n].to_vec())
                    .expect("aux-fixing generators restrict to bijections of the base domain")
            })
            .collect();
        let result = PermGroup::new(n, restricted)?;
        debug_assert_eq!(result.order(), stab.order());
        Ok(result)
    }

    /// Kernel of the induced auxiliary action: the subgroup acting trivially
    /// on every auxiliary point.
    pub fn kernel_on_aux(&self, act: &AuxAction) -> Result<PermGroup, GroupError> {
        let all: Vec<usize> = (0..act.aux_size).collect();
        self.stabiliser_on_aux(act, &all)
    }

    /// All elements in deterministic transversal-product order, provided the
    /// order does not exceed `bound`.
    pub fn enumerate_elements(&self, bound: u64) -> Result<Vec<Perm>, GroupError> {
        if self.order > BigUint::from(bound) {
            return Err(GroupError::EnumerationBoundExceeded {
                order: self.order.clone(),
                bound,
            });
        }
        let mut out = Vec::with_capacity(self.order_u64().unwrap() as usize);
        self.for_each_element(|p| out.push(p.clone()));
        Ok(out)
    }

    /// Streams every element in the same order as [`enumerate_elements`],
    /// without materialising the list. The caller is responsible for any
    /// bound checking.
    pub fn for_each_element<F: FnMut(&Perm)>(&self, mut f: F) {
        fn walk<F: FnMut(&Perm)>(levels: &[Level], i: usize, suffix: &Perm, f: &mut F) {
            if i == levels.len() {
                f(suffix);
                return;
            }
            for &p in &levels[i].orbit {
                let t = &levels[i].transversal[p].as_ref().unwrap().0;
                walk(levels, i + 1, &t.compose(suffix), f);
            }
        }
        walk(&self.levels, 0, &Perm::identity(self.degree), &mut f);
    }

    /// Canonical representative of the right coset `H*g` (`H` = this group):
    /// at each chain level the transversal element minimising the image of
    /// that level's base point is applied. Two permutations canonicalise to
    /// the same representative iff they lie in the same right coset.
    pub fn minimal_coset_rep(&self, g: &Perm) -> Perm {
        assert_eq!(
            g.degree(),
            self.degree,
            "minimal_coset_rep: degree mismatch ({} vs {})",
            g.degree(),
            self.degree
        );
        let mut rep = g.clone();
        for level in &self.levels {
            let mut best = level.orbit[0];
            let mut best_image = rep.image(best);
            for &p in &level.orbit[1..] {
                let image = rep.image(p);
                if image < best_image {
                    best = p;
                    best_image = image;
                }
            }
            let t = &level.transversal[best].as_ref().unwrap().0;
            rep = t.compose(&rep);
        }
        rep
    }
}

/// Deterministic Schreier-Sims. The base starts with the hint points moved
/// by the group, in hint order; further base points are the smallest point
/// moved by the residue that required them. Verification processes Schreier
/// generators in orbit-by-generator order and restarts at the deepest level
/// that gains a strong generator, so identical input yields an identical
/// chain.
fn build_chain(degree: usize, generators: &[Perm], base_hint: &[usize]) -> Vec<Level> {
    let gens: Vec<&Perm> = generators.iter().filter(|g| !g.is_identity()).collect();
    if gens.is_empty() {
        return Vec::new();
    }
    let mut levels: Vec<Level> = Vec::new();
    for &p in base_hint {
        if p < degree
            && gens.iter().any(|g| g.image(p) != p)
            && !levels.iter().any(|l| l.base == p)
        {
            levels.push(Level::new(degree, p));
        }
    }

    // Distribute the input generators: g belongs to every level whose base
    // prefix it fixes.
    for g in &gens {
        let mut depth = 0;
        while depth < levels.len() && g.image(levels[depth].base) == levels[depth].base {
            depth += 1;
        }
        if depth == levels.len() {
            let moved = smallest_moved(g).expect("non-identity generator moves a point");
            levels.push(Level::new(degree, moved));
        }
        for level in levels[..=depth].iter_mut() {
            level.gens.push((*g).clone());
        }
    }
    for level in levels.iter_mut() {
        level.recompute(degree);
    }

    // Verify bottom-up: every Schreier generator must sift to the identity
    // through the levels below; residues become strong generators and
    // verification restarts at the level they reached.
    let mut i = levels.len() as isize - 1;
    while i >= 0 {
        let li = i as usize;
        match verify_level(degree, &mut levels, li) {
            Some(reached) => i = reached as isize,
            None => i -= 1,
        }
    }
    levels
}

/// Checks every Schreier generator of level `li`. On failure, installs the
/// residue at levels `li+1..=j` (appending a new base point if needed) and
/// returns `Some(j)`; returns `None` once the level verifies clean.
fn verify_level(degree: usize, levels: &mut Vec<Level>, li: usize) -> Option<usize> {
    for oi in 0..levels[li].orbit.len() {
        let p = levels[li].orbit[oi];
        for gi in 0..levels[li].gens.len() {
            let s = levels[li].gens[gi].clone();
            let u_p = levels[li].transversal[p].as_ref().unwrap().0.clone();
            let q = s.image(p);
            let u_q_inv = levels[li].transversal[q].as_ref().unwrap().1.clone();
            let schreier = u_p.compose(&s).compose(&u_q_inv);
            if schreier.is_identity() {
                continue;
            }
            // sift through the levels below
            let mut residue = schreier;
            let mut j = li + 1;
            while j < levels.len() {
                let image = residue.image(levels[j].base);
                match &levels[j].transversal[image] {
                    Some((_, u_inv)) => residue = residue.compose(u_inv),
                    None => break,
                }
                j += 1;
            }
            if residue.is_identity() {
                continue;
            }
            if j == levels.len() {
                let moved = smallest_moved(&residue).expect("non-identity residue");
                levels.push(Level::new(degree, moved));
            }
            for level in levels[li + 1..=j].iter_mut() {
                level.gens.push(residue.clone());
                level.recompute(degree);
            }
            return Some(j);
        }
    }
    None
}

fn smallest_moved(g: &Perm) -> Option<usize> {
    (0..g.degree()).find(|&x| g.image(x) != x)
}
