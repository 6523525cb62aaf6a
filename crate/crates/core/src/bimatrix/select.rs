use std::cmp::Ordering;

use super::{BimatrixError, Field, MixedProfile};

/// Social-welfare-optimal choice: maximum `u + v`; among those an
/// equilibrium with `u = v` if one exists, otherwise maximum `u`; remaining
/// ties go to the lexicographically smallest profile.
pub fn select_swne<T: Field>(equilibria: Vec<MixedProfile<T>>) -> Result<MixedProfile<T>, BimatrixError> {
    if equilibria.is_empty() {
        return Err(BimatrixError::EmptyList);
    }
    let tol = T::tolerance_for(equilibria.iter().flat_map(|e| [&e.u, &e.v]));
    let sums: Vec<T> = equilibria.iter().map(|e| e.u.add(&e.v)).collect();
    let best_sum = sums.iter().skip(1).fold(sums[0].clone(), |a, b| if *b > a { b.clone() } else { a });
    let mut candidates: Vec<MixedProfile<T>> =
        equilibria.into_iter().zip(&sums).filter(|(_, s)| !s.lt_tol(&best_sum, &tol)).map(|(e, _)| e).collect();
    if candidates.iter().any(|e| e.u.approx_eq(&e.v, &tol)) {
        candidates.retain(|e| e.u.approx_eq(&e.v, &tol));
    } else {
        let best_u =
            candidates.iter().skip(1).fold(candidates[0].u.clone(), |a, e| if e.u > a { e.u.clone() } else { a });
        candidates.retain(|e| !e.u.lt_tol(&best_u, &tol));
    }
    candidates.sort_by(compare_lexicographic);
    Ok(candidates.into_iter().next().unwrap())
}

/// Orders by row support, column support, then row and column
/// probabilities.
pub fn compare_lexicographic<T: Field>(a: &MixedProfile<T>, b: &MixedProfile<T>) -> Ordering {
    a.support_x()
        .cmp(&b.support_x())
        .then_with(|| a.support_y().cmp(&b.support_y()))
        .then_with(|| cmp_vec(&a.x, &b.x))
        .then_with(|| cmp_vec(&a.y, &b.y))
}

fn cmp_vec<T: Field>(a: &[T], b: &[T]) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        match p.partial_cmp(q) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}
