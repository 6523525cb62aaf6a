use super::{BimatrixError, BimatrixGame, Field, MixedProfile};

/// A vertex of a best-response polytope with its tight-constraint labels.
struct Vertex<T> {
    point: Vec<T>,
    labels: Vec<bool>,
}

/// All extreme equilibria: completely labelled vertex pairs of
/// `P = {x >= 0, B^T x <= 1}` and `Q = {A y <= 1, y >= 0}`, where `A`, `B`
/// are the payoffs shifted to be positive. Labels `0..l` are rows,
/// `l..l+m` columns.
pub fn enumerate_equilibria<T: Field>(g: &BimatrixGame<T>) -> Result<Vec<MixedProfile<T>>, BimatrixError> {
    let (l, m) = (g.rows(), g.cols());
    let tol = g.tolerance();
    if l == 1 || m == 1 {
        return Ok(degenerate_line(g, &tol));
    }
    let shift = |z: &dyn Fn(usize, usize) -> T| {
        let mut min = z(0, 0);
        for i in 0..l {
            for j in 0..m {
                if z(i, j) < min {
                    min = z(i, j);
                }
            }
        }
        let offset = T::one().sub(&min);
        move |v: &T| v.add(&offset)
    };
    let shift_a = shift(&|i, j| g.z1(i, j).clone());
    let shift_b = shift(&|i, j| g.z2(i, j).clone());
    let a: Vec<Vec<T>> = (0..l).map(|i| (0..m).map(|j| shift_a(g.z1(i, j))).collect()).collect();
    let b: Vec<Vec<T>> = (0..l).map(|i| (0..m).map(|j| shift_b(g.z2(i, j))).collect()).collect();
    let ptol = T::tolerance_for(a.iter().flatten().chain(b.iter().flatten()));

    // P: constraint c < l is x_c >= 0; c >= l is (B^T x)_{c-l} <= 1
    let p_row = |c: usize| -> (Vec<T>, T) {
        if c < l {
            ((0..l).map(|i| if i == c { T::one() } else { T::zero() }).collect(), T::zero())
        } else {
            ((0..l).map(|i| b[i][c - l].clone()).collect(), T::one())
        }
    };
    // Q: constraint c < l is (A y)_c <= 1; c >= l is y_{c-l} >= 0
    let q_row = |c: usize| -> (Vec<T>, T) {
        if c < l {
            (a[c].clone(), T::one())
        } else {
            ((0..m).map(|j| if j == c - l { T::one() } else { T::zero() }).collect(), T::zero())
        }
    };
    // x_c >= 0 and y_j >= 0 are lower bounds; the others upper bounds
    let p_feasible = |c: usize, lhs: &T, rhs: &T| if c < l { !lhs.lt_tol(rhs, &ptol) } else { !rhs.lt_tol(lhs, &ptol) };
    let q_feasible = |c: usize, lhs: &T, rhs: &T| if c < l { !rhs.lt_tol(lhs, &ptol) } else { !lhs.lt_tol(rhs, &ptol) };

    let pv = vertices(l, l + m, &p_row, &p_feasible, &ptol);
    let qv = vertices(m, l + m, &q_row, &q_feasible, &ptol);

    let mut out: Vec<MixedProfile<T>> = Vec::new();
    for p in &pv {
        for q in &qv {
            if !(0..l + m).all(|k| p.labels[k] || q.labels[k]) {
                continue;
            }
            let x = normalise(&p.point);
            let y = normalise(&q.point);
            if out.iter().any(|e| close(&e.x, &x, &tol) && close(&e.y, &y, &tol)) {
                continue;
            }
            let (u, v) = g.payoffs(&x, &y);
            out.push(MixedProfile { x, y, u, v });
        }
    }
    if out.is_empty() {
        return Err(BimatrixError::NoEquilibrium);
    }
    Ok(out)
}

/// One player has a single action: the other's pure best responses.
fn degenerate_line<T: Field>(g: &BimatrixGame<T>, tol: &T) -> Vec<MixedProfile<T>> {
    let (l, m) = (g.rows(), g.cols());
    let pure = |n: usize, k: usize| (0..n).map(|i| if i == k { T::one() } else { T::zero() }).collect::<Vec<T>>();
    let mut out = Vec::new();
    if l == 1 {
        let best = (0..m).map(|j| g.z2(0, j).clone()).fold(g.z2(0, 0).clone(), |a, b| if b > a { b } else { a });
        for j in 0..m {
            if !g.z2(0, j).lt_tol(&best, tol) {
                out.push(MixedProfile { x: pure(1, 0), y: pure(m, j), u: g.z1(0, j).clone(), v: g.z2(0, j).clone() });
            }
        }
    } else {
        let best = (0..l).map(|i| g.z1(i, 0).clone()).fold(g.z1(0, 0).clone(), |a, b| if b > a { b } else { a });
        for i in 0..l {
            if !g.z1(i, 0).lt_tol(&best, tol) {
                out.push(MixedProfile { x: pure(l, i), y: pure(1, 0), u: g.z1(i, 0).clone(), v: g.z2(i, 0).clone() });
            }
        }
    }
    out
}

fn normalise<T: Field>(v: &[T]) -> Vec<T> {
    let total = v.iter().fold(T::zero(), |a, b| a.add(b));
    v.iter().map(|p| if p.is_exact_zero() { T::zero() } else { p.div(&total) }).collect()
}

fn close<T: Field>(a: &[T], b: &[T], tol: &T) -> bool {
    a.iter().zip(b).all(|(p, q)| p.approx_eq(q, tol))
}

/// Nonzero vertices of a polytope in `dim` dimensions given by `count`
/// constraints, via every choice of `dim` tight constraints.
fn vertices<T: Field>(
    dim: usize,
    count: usize,
    row: &dyn Fn(usize) -> (Vec<T>, T),
    feasible: &dyn Fn(usize, &T, &T) -> bool,
    tol: &T,
) -> Vec<Vertex<T>> {
    let rows: Vec<(Vec<T>, T)> = (0..count).map(row).collect();
    let mut out: Vec<Vertex<T>> = Vec::new();
    let mut pick: Vec<usize> = (0..dim).collect();
    loop {
        let matrix: Vec<Vec<T>> = pick.iter().map(|&c| rows[c].0.clone()).collect();
        let rhs: Vec<T> = pick.iter().map(|&c| rows[c].1.clone()).collect();
        if let Some(point) = solve(matrix, rhs, tol) {
            let nonzero = point.iter().any(|p| !p.abs_le(tol));
            let mut ok = nonzero;
            let mut labels = vec![false; count];
            if ok {
                for (c, (coef, bound)) in rows.iter().enumerate() {
                    let lhs = dot(coef, &point);
                    if !feasible(c, &lhs, bound) {
                        ok = false;
                        break;
                    }
                    labels[c] = lhs.approx_eq(bound, tol);
                }
            }
            if ok {
                let point: Vec<T> = point.into_iter().map(|p| if p.abs_le(tol) { T::zero() } else { p }).collect();
                if !out.iter().any(|v| close(&v.point, &point, tol)) {
                    out.push(Vertex { point, labels });
                }
            }
        }
        if !next_combination(&mut pick, count) {
            break;
        }
    }
    out
}

fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (p, q)| acc.add(&p.mul(q)))
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub(crate) fn solve<T: Field>(mut a: Vec<Vec<T>>, mut b: Vec<T>, tol: &T) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs_le(tol) || a[piv][col].is_exact_zero() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r == col || a[r][col].is_exact_zero() {
                continue;
            }
            let f = a[r][col].div(&a[col][col]);
            for c in col..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
            let t = f.mul(&b[col]);
            b[r] = b[r].sub(&t);
        }
    }
    Some((0..n).map(|i| b[i].div(&a[i][i])).collect())
}
