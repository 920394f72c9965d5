//! Brute-force reference implementations over explicit element sets.
//!
//! Everything here works by multiplying permutations and closing sets; none
//! of it touches the stabiliser-chain machinery. The test-suite uses these
//! functions as independent cross-checks for chain orders, normal closures,
//! p-cores, centralisers and the classifier flags. All functions take an
//! explicit element cap and fail loudly when a set outgrows it.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::perm::Perm;

#[derive(Debug, Error)]
#[error("brute-force closure exceeded the cap of {cap} elements")]
pub struct CapExceeded {
    pub cap: usize,
}

/// All elements of `<gens>` by right-multiplication closure, sorted.
pub fn elements(degree: usize, gens: &[Perm], cap: usize) -> Result<Vec<Perm>, CapExceeded> {
    closure_from(&[Perm::identity(degree)], gens, cap)
}

/// Closure of `start` under right multiplication by `mults`, sorted.
fn closure_from(start: &[Perm], mults: &[Perm], cap: usize) -> Result<Vec<Perm>, CapExceeded> {
    let mut seen: HashSet<Perm> = start.iter().cloned().collect();
    let mut queue: Vec<Perm> = start.to_vec();
    let mut qi = 0;
    while qi < queue.len() {
        let cur = queue[qi].clone();
        qi += 1;
        for m in mults {
            let next = cur.compose(m);
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(CapExceeded { cap });
                }
                seen.insert(next.clone());
                queue.push(next);
            }
        }
    }
    let mut out: Vec<Perm> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Conjugates of `e` under `<gens>`, by orbit closure.
fn conjugate_class(e: &Perm, gens: &[Perm], cap: usize) -> Result<Vec<Perm>, CapExceeded> {
    let mut seen: HashSet<Perm> = HashSet::new();
    seen.insert(e.clone());
    let mut queue = vec![e.clone()];
    let mut qi = 0;
    while qi < queue.len() {
        let cur = queue[qi].clone();
        qi += 1;
        for g in gens {
            let c = cur.conjugate_by(g);
            if !seen.contains(&c) {
                if seen.len() >= cap {
                    return Err(CapExceeded { cap });
                }
                seen.insert(c.clone());
                queue.push(c);
            }
        }
    }
    let mut out: Vec<Perm> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Elements of the normal closure of `seeds` in `<gens>`: the subgroup
/// generated by every conjugate of every seed.
pub fn normal_closure_elements(
    degree: usize,
    gens: &[Perm],
    seeds: &[Perm],
    cap: usize,
) -> Result<Vec<Perm>, CapExceeded> {
    let mut conj_gens: Vec<Perm> = Vec::new();
    for s in seeds {
        if !s.is_identity() {
            conj_gens.extend(conjugate_class(s, gens, cap)?);
        }
    }
    conj_gens.sort();
    conj_gens.dedup();
    if conj_gens.is_empty() {
        return Ok(vec![Perm::identity(degree)]);
    }
    closure_from(&[Perm::identity(degree)], &conj_gens, cap)
}

/// Elements of `<elements of g>` commuting with every element of `k_gens`.
pub fn centralizer_elements(g_elements: &[Perm], k_gens: &[Perm]) -> Vec<Perm> {
    g_elements
        .iter()
        .filter(|x| k_gens.iter().all(|k| x.compose(k) == k.compose(x)))
        .cloned()
        .collect()
}

fn is_p_power_order(e: &Perm, p: u64) -> bool {
    let mut k = e.order();
    if k == 1 {
        return false;
    }
    while k % p == 0 {
        k /= p;
    }
    k == 1
}

fn is_power_of(n: usize, p: u64) -> bool {
    let mut n = n as u64;
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Largest normal p-subgroup, as an element set: the join of the cyclic
/// normal closures that are p-groups, taken over every element of p-power
/// order. Validated afterwards by maximality over all such elements.
pub fn p_core_elements(
    degree: usize,
    gens: &[Perm],
    p: u64,
    cap: usize,
) -> Result<Vec<Perm>, CapExceeded> {
    let all = elements(degree, gens, cap)?;
    let mut core: Vec<Perm> = vec![Perm::identity(degree)];
    let mut core_set: HashSet<Perm> = core.iter().cloned().collect();
    for e in &all {
        if !is_p_power_order(e, p) || core_set.contains(e) {
            continue;
        }
        let cyc = normal_closure_elements(degree, gens, std::slice::from_ref(e), cap)?;
        if !is_power_of(cyc.len(), p) {
            continue;
        }
        let mut mults = core.clone();
        mults.extend(cyc);
        core = closure_from(&[Perm::identity(degree)], &mults, cap)?;
        core_set = core.iter().cloned().collect();
    }
    // maximality: every p-power-order element outside the core must have a
    // non-p-group cyclic closure
    for e in &all {
        if is_p_power_order(e, p) && !core_set.contains(e) {
            let cyc = normal_closure_elements(degree, gens, std::slice::from_ref(e), cap)?;
            assert!(
                !is_power_of(cyc.len(), p),
                "p-core oracle: missed element {} with p-group closure",
                e
            );
        }
    }
    Ok(core)
}

/// Every normal subgroup of `<gens>` as an element set: cyclic normal
/// closures of all elements, closed under pairwise joins. Only sensible for
/// small groups; the cap applies to each subgroup and to the family size.
pub fn normal_subgroups(
    degree: usize,
    gens: &[Perm],
    cap: usize,
) -> Result<Vec<BTreeSet<Perm>>, CapExceeded> {
    let all = elements(degree, gens, cap)?;
    let mut family: Vec<BTreeSet<Perm>> = Vec::new();
    let push_unique = |family: &mut Vec<BTreeSet<Perm>>, s: BTreeSet<Perm>| -> bool {
        if family.iter().any(|t| *t == s) {
            false
        } else {
            family.push(s);
            true
        }
    };
    push_unique(&mut family, BTreeSet::from([Perm::identity(degree)]));
    for e in &all {
        let cyc: BTreeSet<Perm> =
            normal_closure_elements(degree, gens, std::slice::from_ref(e), cap)?
                .into_iter()
                .collect();
        push_unique(&mut family, cyc);
    }
    // close under joins
    let mut i = 0;
    while i < family.len() {
        let mut j = 0;
        while j < family.len() {
            if i != j {
                let a = &family[i];
                let b = &family[j];
                if !b.is_subset(a) && !a.is_subset(b) {
                    let mults: Vec<Perm> = a.union(b).cloned().collect();
                    let joined: BTreeSet<Perm> =
                        closure_from(&[Perm::identity(degree)], &mults, cap)?
                            .into_iter()
                            .collect();
                    if push_unique(&mut family, joined) && family.len() > cap {
                        return Err(CapExceeded { cap });
                    }
                }
            }
            j += 1;
        }
        i += 1;
    }
    Ok(family)
}

pub fn is_transitive_on(elements: &[Perm], domain: &[usize]) -> bool {
    if domain.is_empty() {
        return true;
    }
    let reach: HashSet<usize> = elements.iter().map(|g| g.image(domain[0])).collect();
    domain.iter().all(|x| reach.contains(x))
}

/// Semiregular on `domain`: only the identity-on-domain element fixes a
/// domain point.
pub fn is_semiregular_on(elements: &[Perm], domain: &[usize]) -> bool {
    elements.iter().all(|g| {
        let fixes_some = domain.iter().any(|&x| g.image(x) == x);
        let identity_on_domain = domain.iter().all(|&x| g.image(x) == x);
        !fixes_some || identity_on_domain
    })
}

/// Semiprimitive by definition: transitive, and every normal subgroup is
/// transitive or semiregular on the domain.
pub fn semiprimitive_flag(
    degree: usize,
    gens: &[Perm],
    domain: &[usize],
    cap: usize,
) -> Result<bool, CapExceeded> {
    let all = elements(degree, gens, cap)?;
    if !is_transitive_on(&all, domain) {
        return Ok(false);
    }
    for n in normal_subgroups(degree, gens, cap)? {
        let elems: Vec<Perm> = n.into_iter().collect();
        if !is_transitive_on(&elems, domain) && !is_semiregular_on(&elems, domain) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quasiprimitive by definition: transitive, and every non-identity normal
/// subgroup is transitive on the domain.
pub fn quasiprimitive_flag(
    degree: usize,
    gens: &[Perm],
    domain: &[usize],
    cap: usize,
) -> Result<bool, CapExceeded> {
    let all = elements(degree, gens, cap)?;
    if !is_transitive_on(&all, domain) {
        return Ok(false);
    }
    for n in normal_subgroups(degree, gens, cap)? {
        if n.len() == 1 {
            continue;
        }
        let elems: Vec<Perm> = n.into_iter().collect();
        if !is_transitive_on(&elems, domain) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(degree: usize, text: &str) -> Perm {
        Perm::from_cycle_string(degree, text).unwrap()
    }

    #[test]
    fn closure_of_sym3() {
        let gens = vec![p(3, "(0 1)"), p(3, "(0 1 2)")];
        assert_eq!(elements(3, &gens, 10).unwrap().len(), 6);
        assert!(elements(3, &gens, 5).is_err());
    }

    #[test]
    fn normal_subgroups_of_sym3() {
        let gens = vec![p(3, "(0 1)"), p(3, "(0 1 2)")];
        let subs = normal_subgroups(3, &gens, 100).unwrap();
        let mut sizes: Vec<usize> = subs.iter().map(|s| s.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 6]);
    }

    #[test]
    fn normal_subgroups_of_d8() {
        let gens = vec![p(4, "(0 1 2 3)"), p(4, "(1 3)")];
        let subs = normal_subgroups(4, &gens, 100).unwrap();
        let mut sizes: Vec<usize> = subs.iter().map(|s| s.len()).collect();
        sizes.sort();
        // 1, centre, three order-4 subgroups, D8
        assert_eq!(sizes, vec![1, 2, 4, 4, 4, 8]);
    }

    #[test]
    fn p_core_of_sym3() {
        let gens = vec![p(3, "(0 1)"), p(3, "(0 1 2)")];
        assert_eq!(p_core_elements(3, &gens, 2, 100).unwrap().len(), 1);
        assert_eq!(p_core_elements(3, &gens, 3, 100).unwrap().len(), 3);
    }

    #[test]
    fn classifier_flags_on_c4_and_d8() {
        let c4 = vec![p(4, "(0 1 2 3)")];
        let domain: Vec<usize> = (0..4).collect();
        assert!(semiprimitive_flag(4, &c4, &domain, 100).unwrap());
        assert!(!quasiprimitive_flag(4, &c4, &domain, 100).unwrap());
        let d8 = vec![p(4, "(0 1 2 3)"), p(4, "(1 3)")];
        assert!(!semiprimitive_flag(4, &d8, &domain, 100).unwrap());
    }
}
