use super::{BimatrixGame, Field};

/// Iterated removal of pure strategies strictly dominated by another pure
/// strategy. Returns the reduced game and the original index of each
/// remaining row and column.
pub fn eliminate_dominated<T: Field>(g: &BimatrixGame<T>) -> (BimatrixGame<T>, Vec<usize>, Vec<usize>) {
    let tol = g.tolerance();
    let mut rows: Vec<usize> = (0..g.rows()).collect();
    let mut cols: Vec<usize> = (0..g.cols()).collect();
    loop {
        let mut changed = false;
        if rows.len() > 1 {
            let dominated =
                |i: usize| rows.iter().any(|&k| k != i && cols.iter().all(|&j| g.z1(i, j).lt_tol(g.z1(k, j), &tol)));
            if let Some(pos) = rows.iter().position(|&i| dominated(i)) {
                rows.remove(pos);
                changed = true;
            }
        }
        if cols.len() > 1 {
            let dominated =
                |j: usize| cols.iter().any(|&k| k != j && rows.iter().all(|&i| g.z2(i, j).lt_tol(g.z2(i, k), &tol)));
            if let Some(pos) = cols.iter().position(|&j| dominated(j)) {
                cols.remove(pos);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (g.restrict(&rows, &cols), rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    #[test]
    fn removes_strictly_dominated_row() {
        let g = BimatrixGame::new(
            vec![vec![int(0), int(1)], vec![int(2), int(3)]],
            vec![vec![int(1), int(0)], vec![int(0), int(1)]],
        )
        .unwrap();
        let (r, rows, cols) = eliminate_dominated(&g);
        // row 0 goes, then column 0 is dominated against row 1
        assert_eq!(rows, vec![1]);
        assert_eq!(cols, vec![1]);
        assert_eq!(r.rows(), 1);
    }

    #[test]
    fn stag_hunt_is_untouched() {
        let g = crate::bimatrix::tests::stag_hunt();
        let (_, rows, cols) = eliminate_dominated(&g);
        assert_eq!(rows, vec![0, 1]);
        assert_eq!(cols, vec![0, 1, 2]);
    }

    #[test]
    fn weak_dominance_is_kept() {
        let g = BimatrixGame::new(
            vec![vec![int(1), int(1)], vec![int(1), int(0)]],
            vec![vec![int(0), int(0)], vec![int(0), int(0)]],
        )
        .unwrap();
        let (_, rows, cols) = eliminate_dominated(&g);
        assert_eq!((rows.len(), cols.len()), (2, 2));
    }
}
