//! Exact permutations of `{0..n-1}` with right-action composition.
//!
//! Points act as exponents: `x^p` is `p.image(x)` and products satisfy
//! `x^(p*q) = (x^p)^q`, so `compose(p, q)` means "apply `p`, then `q`".
//! Every module in this crate inherits that convention; conjugation is
//! `g^a = a^-1 * g * a`.

use std::fmt;

use thiserror::Error;

/// A permutation of `{0..n-1}`, stored as its image sequence:
/// `images[x] = x^p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image sequence is not a bijection: point {0} appears more than once or is out of range")]
    NotBijective(usize),
}

/// Cycle-notation parse failure, carrying the byte offset in the input.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {found:?} at byte {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("point {point} at byte {pos} is outside the domain 0..{degree}")]
    PointOutOfRange { pos: usize, point: usize, degree: usize },
    #[error("point {point} at byte {pos} appears twice")]
    RepeatedPoint { pos: usize, point: usize },
    #[error("unclosed cycle starting at byte {pos}")]
    UnclosedCycle { pos: usize },
    #[error("empty input (write \"()\" for the identity)")]
    Empty,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm { images: (0..degree).collect() }
    }

    /// Builds a permutation from its image sequence, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Perm, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return Err(PermError::NotBijective(y));
            }
            seen[y] = true;
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// The image `x^p` of a point.
    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn as_images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Product `p*q` under the right-action convention:
    /// `x^(p*q) = (x^p)^q`, i.e. apply `self`, then `other`.
    ///
    /// Panics if the degrees differ; degrees are validated at every
    /// input boundary so a mismatch here is a caller bug.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(
            self.degree(),
            other.degree(),
            "compose: degree mismatch ({} vs {})",
            self.degree(),
            other.degree()
        );
        Perm { images: self.images.iter().map(|&y| other.images[y]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Perm { images: inv }
    }

    /// `a^-1 * self * a`.
    pub fn conjugate_by(&self, a: &Perm) -> Perm {
        a.inverse().compose(self).compose(a)
    }

    pub fn pow(&self, k: i64) -> Perm {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Least `k >= 1` with `p^k = 1`: the lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        let mut order: u64 = 1;
        for cycle in self.cycles() {
            order = num_integer::lcm(order, cycle.len() as u64);
        }
        order
    }

    /// Points moved by the permutation, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.images
            .iter()
            .enumerate()
            .filter(|&(x, &y)| x != y)
            .map(|(x, _)| x)
            .collect()
    }

    /// Sign: true iff the permutation is even.
    pub fn is_even(&self) -> bool {
        let transpositions: usize =
            self.cycles().iter().map(|c| c.len() - 1).sum();
        transpositions % 2 == 0
    }

    /// Non-trivial cycles in canonical form: each cycle starts at its least
    /// point, cycles sorted by least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Canonical cycle text: `"(0 12)(2 6)"`, or `"()"` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for cycle in cycles {
            s.push('(');
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                s.push_str(&p.to_string());
            }
            s.push(')');
        }
        s
    }

    /// Parses cycle notation over `{0..degree-1}`. Fixed points may be
    /// omitted; `"()"` denotes the identity; cycles must be disjoint.
    pub fn from_cycle_string(degree: usize, text: &str) -> Result<Perm, ParseError> {
        let bytes = text.as_bytes();
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        let mut pos = 0;
        let mut any_cycle = false;

        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && (bytes[*pos] as char).is_whitespace() {
                *pos += 1;
            }
        };

        skip_ws(&mut pos);
        while pos < bytes.len() {
            if bytes[pos] != b'(' {
                return Err(ParseError::UnexpectedChar {
                    pos,
                    found: bytes[pos] as char,
                });
            }
            let open = pos;
            pos += 1;
            any_cycle = true;
            let mut cycle: Vec<usize> = Vec::new();
            loop {
                skip_ws(&mut pos);
                if pos >= bytes.len() {
                    return Err(ParseError::UnclosedCycle { pos: open });
                }
                if bytes[pos] == b')' {
                    pos += 1;
                    break;
                }
                if !bytes[pos].is_ascii_digit() {
                    return Err(ParseError::UnexpectedChar {
                        pos,
                        found: bytes[pos] as char,
                    });
                }
                let num_start = pos;
                let mut point: usize = 0;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    point = point * 10 + (bytes[pos] - b'0') as usize;
                    pos += 1;
                }
                if point >= degree {
                    return Err(ParseError::PointOutOfRange {
                        pos: num_start,
                        point,
                        degree,
                    });
                }
                if used[point] {
                    return Err(ParseError::RepeatedPoint { pos: num_start, point });
                }
                used[point] = true;
                cycle.push(point);
            }
            for i in 0..cycle.len() {
                images[cycle[i]] = cycle[(i + 1) % cycle.len()];
            }
            skip_ws(&mut pos);
        }
        if !any_cycle {
            return Err(ParseError::Empty);
        }
        Ok(Perm { images })
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({}, deg {})", self.to_cycle_string(), self.degree())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(degree: usize, text: &str) -> Perm {
        Perm::from_cycle_string(degree, text).unwrap()
    }

    #[test]
    fn compose_identity() {
        let t = p(2, "(0 1)");
        assert_eq!(t.compose(&Perm::identity(2)), t);
        assert_eq!(Perm::identity(2).compose(&t), t);
    }

    #[test]
    fn compose_is_apply_left_then_right() {
        // 0 -> 1 -> 2, 1 -> 0 -> 0, 2 -> 2 -> 1
        let a = p(3, "(0 1)");
        let b = p(3, "(1 2)");
        assert_eq!(a.compose(&b), p(3, "(0 2 1)"));
    }

    #[test]
    fn involution_squares_to_identity() {
        let a = p(13, "(0 12)(2 6)(3 7)(4 8)(5 9)");
        assert!(a.compose(&a).is_identity());
        assert_eq!(a.order(), 2);
    }

    #[test]
    fn from_cycles_examples() {
        assert_eq!(p(4, "(0 1)(2 3)").as_images(), &[1, 0, 3, 2]);
        assert!(p(3, "()").is_identity());
        let a = p(13, "(0 12)(2 6)(3 7)(4 8)(5 9)");
        assert_eq!(a.image(0), 12);
        assert_eq!(a.image(12), 0);
        assert_eq!(a.image(1), 1);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            Perm::from_cycle_string(4, "(0 1)(1 2)"),
            Err(ParseError::RepeatedPoint { pos: 6, point: 1 })
        );
        assert_eq!(
            Perm::from_cycle_string(4, "(0 9)"),
            Err(ParseError::PointOutOfRange { pos: 3, point: 9, degree: 4 })
        );
        assert_eq!(
            Perm::from_cycle_string(4, "(0 1"),
            Err(ParseError::UnclosedCycle { pos: 0 })
        );
        assert_eq!(
            Perm::from_cycle_string(4, "0 1"),
            Err(ParseError::UnexpectedChar { pos: 0, found: '0' })
        );
        assert_eq!(Perm::from_cycle_string(4, "  "), Err(ParseError::Empty));
    }

    #[test]
    fn order_examples() {
        assert_eq!(Perm::identity(5).order(), 1);
        assert_eq!(p(5, "(0 1 2)(3 4)").order(), 6);
    }

    #[test]
    fn support_examples() {
        assert!(Perm::identity(5).support().is_empty());
        assert_eq!(p(13, "(10 11)").support(), vec![10, 11]);
        let a = p(13, "(0 12)(2 6)(3 7)(4 8)(5 9)");
        assert_eq!(a.support(), vec![0, 2, 3, 4, 5, 6, 7, 8, 9, 12]);
    }

    #[test]
    fn parity() {
        assert!(Perm::identity(3).is_even());
        assert!(!p(3, "(0 1)").is_even());
        assert!(p(3, "(0 1 2)").is_even());
        // product of 5 transpositions
        assert!(!p(13, "(0 12)(2 6)(3 7)(4 8)(5 9)").is_even());
    }

    fn arb_perm(degree: usize) -> impl Strategy<Value = Perm> {
        Just(()).prop_perturb(move |_, mut rng| {
            let mut images: Vec<usize> = (0..degree).collect();
            for i in (1..degree).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                images.swap(i, j);
            }
            Perm { images }
        })
    }

    proptest! {
        #[test]
        fn inverse_cancels(q in arb_perm(9)) {
            prop_assert!(q.compose(&q.inverse()).is_identity());
            prop_assert!(q.inverse().compose(&q).is_identity());
        }

        #[test]
        fn cycle_text_round_trip(q in arb_perm(11)) {
            let text = q.to_cycle_string();
            let back = Perm::from_cycle_string(11, &text).unwrap();
            prop_assert_eq!(&back, &q);
            prop_assert_eq!(back.to_cycle_string(), text);
        }

        #[test]
        fn order_annihilates(q in arb_perm(10)) {
            let k = q.order();
            prop_assert!(q.pow(k as i64).is_identity());
            // lcm of cycle lengths, exactly
            let lcm = q.cycles().iter().fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64));
            prop_assert_eq!(k, lcm);
        }

        #[test]
        fn composition_is_right_action(q in arb_perm(8), r in arb_perm(8)) {
            let qr = q.compose(&r);
            for x in 0..8 {
                prop_assert_eq!(qr.image(x), r.image(q.image(x)));
            }
        }
    }
}
