//! Vertices of `{x ∈ box : Σ x_i = 1}`, the admissible weight polytopes of
//! interval IFSs and interval transition rows.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::interval::Rational;

/// Largest dimension whose bound patterns are enumerated.
pub const MAX_DIMENSION: usize = 20;

/// True when `Σ lo ≤ 1 ≤ Σ hi` and every bound pair is ordered.
pub fn is_admissible(bounds: &[(Rational, Rational)]) -> bool {
    let lo: Rational = bounds.iter().map(|(l, _)| l.clone()).sum();
    let hi: Rational = bounds.iter().map(|(_, h)| h.clone()).sum();
    bounds.iter().all(|(l, h)| l <= h) && lo <= Rational::one() && hi >= Rational::one()
}

/// All vertices of the simplex cut by the box, sorted and without repeats;
/// empty when the polytope is empty.
///
/// A vertex has at least `n − 1` coordinates at a bound, so every pattern of
/// lower/upper choices for all but one coordinate is tried and the remaining
/// coordinate is solved from the simplex constraint.
pub fn simplex_box_vertices(bounds: &[(Rational, Rational)]) -> Vec<Vec<Rational>> {
    let n = bounds.len();
    assert!(n <= MAX_DIMENSION, "polytope dimension {n} exceeds {MAX_DIMENSION}");
    if n == 0 || !is_admissible(bounds) {
        return Vec::new();
    }
    let mut found = BTreeSet::new();
    for free in 0..n {
        for pattern in 0u32..(1 << (n - 1)) {
            let mut x = vec![Rational::zero(); n];
            let mut bit = 0;
            for (i, (lo, hi)) in bounds.iter().enumerate() {
                if i == free {
                    continue;
                }
                x[i] = if pattern >> bit & 1 == 1 { hi.clone() } else { lo.clone() };
                bit += 1;
            }
            let rest: Rational = x.iter().sum();
            let last = Rational::one() - rest;
            let (lo, hi) = &bounds[free];
            if lo <= &last && &last <= hi {
                x[free] = last;
                found.insert(x);
            }
        }
    }
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    #[test]
    fn two_coordinates() {
        let v = simplex_box_vertices(&[(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))]);
        assert_eq!(v, vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 2), rat(1, 2)]]);
    }

    #[test]
    fn degenerate_box() {
        let b = vec![(rat(1, 4), rat(1, 4)), (rat(3, 4), rat(3, 4))];
        assert_eq!(simplex_box_vertices(&b).len(), 1);
        assert!(simplex_box_vertices(&[(rat(0, 1), rat(1, 4)), (rat(0, 1), rat(1, 4))]).is_empty());
    }

    #[test]
    fn cube_slice() {
        let b = vec![(rat(1, 5), rat(1, 2)); 3];
        let v = simplex_box_vertices(&b);
        // permutations of (0.2, 0.3, 0.5)
        assert_eq!(v.len(), 6);
        assert!(v.contains(&vec![rat(1, 5), rat(3, 10), rat(1, 2)]));
        assert!(v.iter().all(|x| x.iter().sum::<Rational>() == Rational::one()));
    }
}
