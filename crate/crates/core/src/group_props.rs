//! Structural classifiers and characteristic subgroups: transitivity,
//! semiregularity, primitivity, quasi- and semiprimitivity, `O_p`,
//! centralisers, the Fitting subgroup and a certified `F*`, plus an
//! invariant signature for comparing permutation actions.
//!
//! Quasiprimitivity is decided through prime-order elements: a transitive
//! group is quasiprimitive iff the normal closure of every prime-order
//! element is transitive (each non-trivial normal subgroup contains such an
//! element, whose closure it contains). Semiprimitivity restricts the test
//! to prime-order elements fixing a point. Both criteria are validated
//! against the definition-level oracle in the test-suite.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::perm::Perm;
use crate::stab_chain::{GroupError, PermGroup};

/// Classifier value for criteria that need element enumeration and may hit
/// the enumeration bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Yes,
    No,
    Undetermined,
}

impl Flag {
    pub fn is_yes(self) -> bool {
        self == Flag::Yes
    }
}

/// Exact classification of a group action on a domain. The implication
/// chain primitive => quasiprimitive => semiprimitive is asserted whenever
/// both sides are determined.
#[derive(Clone, Debug, Serialize)]
pub struct ActionClass {
    pub degree: usize,
    #[serde(with = "crate::group_props::ser_biguint")]
    pub order: BigUint,
    pub transitive: bool,
    pub semiregular: bool,
    pub primitive: bool,
    pub quasiprimitive: Flag,
    pub semiprimitive: Flag,
}

/// `F(G)` together with the centraliser certificate for `F*(G)`: when the
/// centraliser of `F(G)` lies inside `F(G)` there is no room for components,
/// so `F*(G) = F(G)`. Uncertified cases leave `fstar` absent rather than
/// guessing.
pub struct FittingReport {
    pub fitting: PermGroup,
    pub fstar_certified: bool,
    pub fstar: Option<PermGroup>,
}

/// Outcome of the p-group test on a group order. The trivial group counts
/// as a p-group for every prime; reports flag that convention wherever it
/// fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PGroupStatus {
    Trivial,
    PGroup(u64),
    NotPGroup,
}

impl PGroupStatus {
    pub fn is_p_group(self) -> bool {
        !matches!(self, PGroupStatus::NotPGroup)
    }
}

impl std::fmt::Display for PGroupStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PGroupStatus::Trivial => f.write_str("trivial"),
            PGroupStatus::PGroup(p) => write!(f, "{}", p),
            PGroupStatus::NotPGroup => f.write_str("not a p-group"),
        }
    }
}

impl Serialize for PGroupStatus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serialises a `BigUint` as a decimal string so arbitrary-precision orders
/// survive JSON number limits.
pub mod ser_biguint {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}

/// Classifies the action of `g` on a setwise-invariant `domain`.
///
/// Transitivity, semiregularity and primitivity are always exact; the
/// quasi- and semiprimitive flags become `Undetermined` when the group
/// order exceeds `enum_bound`.
pub fn classify_action(
    g: &PermGroup,
    domain: &[usize],
    enum_bound: u64,
) -> Result<ActionClass, GroupError> {
    assert!(!domain.is_empty(), "classify_action: empty domain");
    let action = g.restrict_to(domain)?;
    let degree = domain.len();

    let transitive = action.orbit(0).len() == degree;
    // faithful on its own domain, so semiregular <=> every orbit has full
    // group length
    let semiregular = (0..degree).all(|x| BigUint::from(action.orbit(x).len()) == *action.order());
    let primitive = transitive && (1..degree).all(|y| minimal_block(&action, 0, y).len() == degree);

    let (quasiprimitive, semiprimitive) = if !transitive {
        (Flag::No, Flag::No)
    } else {
        match prime_order_closure_flags(&action, enum_bound) {
            Ok(flags) => flags,
            Err(GroupError::EnumerationBoundExceeded { .. }) => {
                (Flag::Undetermined, Flag::Undetermined)
            }
            Err(e) => return Err(e),
        }
    };

    let class = ActionClass {
        degree,
        order: action.order().clone(),
        transitive,
        semiregular,
        primitive,
        quasiprimitive,
        semiprimitive,
    };
    assert_implication_chain(&class);
    Ok(class)
}

fn assert_implication_chain(class: &ActionClass) {
    if class.primitive {
        assert_ne!(
            class.quasiprimitive,
            Flag::No,
            "classifier inconsistency: primitive but not quasiprimitive"
        );
    }
    if class.quasiprimitive == Flag::Yes {
        assert_ne!(
            class.semiprimitive,
            Flag::No,
            "classifier inconsistency: quasiprimitive but not semiprimitive"
        );
    }
    if class.semiregular && class.transitive {
        assert_eq!(
            class.order,
            BigUint::from(class.degree),
            "classifier inconsistency: regular action with order != degree"
        );
    }
}

/// Computes the quasiprimitive and semiprimitive flags of a transitive
/// faithful action by walking one representative per conjugacy class of
/// prime-order elements.
fn prime_order_closure_flags(
    action: &PermGroup,
    enum_bound: u64,
) -> Result<(Flag, Flag), GroupError> {
    let elements = action.enumerate_elements(enum_bound)?;
    let degree = action.degree();
    let mut visited: std::collections::HashSet<Perm> = std::collections::HashSet::new();
    let mut quasi = Flag::Yes;
    let mut semi = Flag::Yes;
    for e in &elements {
        if visited.contains(e) || !is_prime(e.order()) {
            continue;
        }
        mark_class(action, e, &mut visited);
        let closure = action.normal_closure(std::slice::from_ref(e))?;
        let closure_transitive = closure.orbit(0).len() == degree;
        if !closure_transitive {
            quasi = Flag::No;
            // has a fixed point <=> some conjugate fixes a point (class-invariant)
            if (0..degree).any(|x| e.image(x) == x) {
                semi = Flag::No;
            }
        }
        if quasi == Flag::No && semi == Flag::No {
            break;
        }
    }
    Ok((quasi, semi))
}

fn mark_class(g: &PermGroup, e: &Perm, visited: &mut std::collections::HashSet<Perm>) {
    let mut queue = vec![e.clone()];
    visited.insert(e.clone());
    let mut qi = 0;
    while qi < queue.len() {
        let cur = queue[qi].clone();
        qi += 1;
        for gen in g.generators() {
            let c = cur.conjugate_by(gen);
            if visited.insert(c.clone()) {
                queue.push(c);
            }
        }
    }
}

/// Smallest block containing `{x, y}` for a transitive action, by the
/// classic union-find merge.
fn minimal_block(action: &PermGroup, x: usize, y: usize) -> Vec<usize> {
    let degree = action.degree();
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    let mut queue: Vec<(usize, usize)> = vec![(x, y)];
    parent[y] = x;
    let mut qi = 0;
    while qi < queue.len() {
        let (a, b) = queue[qi];
        qi += 1;
        for g in action.generators() {
            let (mut ra, mut rb) = (find(&mut parent, g.image(a)), find(&mut parent, g.image(b)));
            if ra != rb {
                if rb < ra {
                    std::mem::swap(&mut ra, &mut rb);
                }
                parent[rb] = ra;
                queue.push((ra, rb));
            }
        }
    }
    let root = find(&mut parent, x);
    (0..degree).filter(|&p| find(&mut parent, p) == root).collect()
}

/// `O_p(g)`: the largest normal p-subgroup, as the join of the cyclic
/// normal closures that are p-groups, over one representative per
/// conjugacy class of elements of p-power order.
pub fn p_core(g: &PermGroup, p: u64, enum_bound: u64) -> Result<PermGroup, GroupError> {
    let elements = g.enumerate_elements(enum_bound)?;
    let mut core = PermGroup::trivial(g.degree());
    let mut visited: std::collections::HashSet<Perm> = std::collections::HashSet::new();
    for e in &elements {
        if !is_p_power(e.order(), p) || core.contains(e) || visited.contains(e) {
            continue;
        }
        mark_class(g, e, &mut visited);
        let closure = g.normal_closure(std::slice::from_ref(e))?;
        if matches!(is_p_group(&closure), PGroupStatus::PGroup(q) if q == p) {
            core = core.join(&closure)?;
        }
    }
    Ok(core)
}

/// Centraliser of `k` in `g` by filtered enumeration. `k` must be a
/// subgroup of `g`.
pub fn centraliser(g: &PermGroup, k: &PermGroup, enum_bound: u64) -> Result<PermGroup, GroupError> {
    if !g.contains_group(k) {
        return Err(GroupError::SeedOutsideGroup(
            k.generators()
                .iter()
                .find(|x| !g.contains(x))
                .map(|x| x.to_cycle_string())
                .unwrap_or_default(),
        ));
    }
    if g.order() > &BigUint::from(enum_bound) {
        return Err(GroupError::EnumerationBoundExceeded {
            order: g.order().clone(),
            bound: enum_bound,
        });
    }
    let k_gens = k.generators();
    let mut gens: Vec<Perm> = Vec::new();
    let mut cur = PermGroup::trivial(g.degree());
    let mut result: Result<(), GroupError> = Ok(());
    g.for_each_element(|e| {
        if result.is_err() {
            return;
        }
        if k_gens.iter().all(|x| e.compose(x) == x.compose(e)) && !cur.contains(e) {
            gens.push(e.clone());
            match PermGroup::new(g.degree(), gens.clone()) {
                Ok(next) => cur = next,
                Err(err) => result = Err(err),
            }
        }
    });
    result.map(|_| cur)
}

/// `F(g)` (join of the p-cores over the primes dividing the order) and the
/// centraliser certificate for `F*(g)`.
pub fn fitting_and_fstar(g: &PermGroup, enum_bound: u64) -> Result<FittingReport, GroupError> {
    let order = g.order_u64().filter(|&o| o <= enum_bound).ok_or_else(|| {
        GroupError::EnumerationBoundExceeded {
            order: g.order().clone(),
            bound: enum_bound,
        }
    })?;
    let mut fitting = PermGroup::trivial(g.degree());
    for p in prime_factors(order) {
        fitting = fitting.join(&p_core(g, p, enum_bound)?)?;
    }
    let c = centraliser(g, &fitting, enum_bound)?;
    let fstar_certified = fitting.contains_group(&c);
    let fstar = fstar_certified.then(|| fitting.clone());
    Ok(FittingReport { fitting, fstar_certified, fstar })
}

/// Whether `|g|` is a prime power `p^k` with `k >= 1`. The trivial group is
/// reported separately and counts as a p-group for every prime.
pub fn is_p_group(g: &PermGroup) -> PGroupStatus {
    let order = g.order();
    if order.is_one() {
        return PGroupStatus::Trivial;
    }
    let p = smallest_prime_factor(order);
    let mut n = order.clone();
    let big_p = BigUint::from(p);
    while (&n % &big_p) == BigUint::ZERO {
        n /= &big_p;
    }
    if n.is_one() {
        PGroupStatus::PGroup(p)
    } else {
        PGroupStatus::NotPGroup
    }
}

fn smallest_prime_factor(n: &BigUint) -> u64 {
    let two = BigUint::from(2u32);
    if (n % &two) == BigUint::ZERO {
        return 2;
    }
    let mut d = 3u64;
    loop {
        let big_d = BigUint::from(d);
        if &big_d * &big_d > *n {
            // n itself is prime; it must fit in u64 for our group orders
            return u64::try_from(n).expect("prime factor exceeds u64");
        }
        if (n % &big_d) == BigUint::ZERO {
            return d;
        }
        d += 2;
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn is_p_power(n: u64, p: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut n = n;
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_factors(n: u64) -> Vec<u64> {
    let mut n = n;
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant signature of an action: equal signatures are necessary (not
/// sufficient) for permutation isomorphism, so consumers report "strong
/// invariant agreement", never "isomorphic". `cycle_types` is omitted and
/// the signature flagged partial when the order exceeds the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    #[serde(with = "crate::group_props::ser_biguint")]
    pub order: BigUint,
    pub degree: usize,
    pub orbit_lengths: Vec<usize>,
    /// Sizes of proper non-trivial minimal blocks, sorted and deduplicated.
    pub minimal_block_sizes: Vec<usize>,
    /// Sorted multiset of cycle types (each a sorted list of cycle lengths
    /// on the domain, fixed points included); `None` marks a partial
    /// signature.
    pub cycle_types: Option<Vec<Vec<usize>>>,
}

impl Signature {
    pub fn is_partial(&self) -> bool {
        self.cycle_types.is_none()
    }
}

pub fn invariant_signature(
    g: &PermGroup,
    domain: &[usize],
    enum_bound: u64,
) -> Result<Signature, GroupError> {
    let action = g.restrict_to(domain)?;
    let degree = domain.len();
    let mut orbit_lengths: Vec<usize> = action.orbits().iter().map(|o| o.len()).collect();
    orbit_lengths.sort_unstable();

    let transitive = orbit_lengths.len() == 1;
    let mut minimal_block_sizes: Vec<usize> = Vec::new();
    if transitive {
        for y in 1..degree {
            let b = minimal_block(&action, 0, y).len();
            if b > 1 && b < degree {
                minimal_block_sizes.push(b);
            }
        }
        minimal_block_sizes.sort_unstable();
        minimal_block_sizes.dedup();
    }

    let cycle_types = match action.enumerate_elements(enum_bound) {
        Ok(elements) => {
            let mut types: Vec<Vec<usize>> = elements
                .iter()
                .map(|e| {
                    let mut lengths: Vec<usize> = e.cycles().iter().map(|c| c.len()).collect();
                    let moved: usize = lengths.iter().sum();
                    lengths.extend(std::iter::repeat(1).take(degree - moved));
                    lengths.sort_unstable();
                    lengths
                })
                .collect();
            types.sort();
            Some(types)
        }
        Err(GroupError::EnumerationBoundExceeded { .. }) => None,
        Err(e) => return Err(e),
    };

    Ok(Signature {
        order: action.order().clone(),
        degree,
        orbit_lengths,
        minimal_block_sizes,
        cycle_types,
    })
}
