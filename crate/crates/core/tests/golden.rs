//! SWCC(3,2) matrices written out by hand.

use std::collections::BTreeMap;

use gvbound::graphs::build_swcc;
use gvbound::polymat::{BiMatrix, UniMatrix};
use gvbound::product::{adjacency_matrix, build_b, build_c, build_d, default_marks};

type Terms = BTreeMap<(usize, usize), Vec<(u32, u32, f64)>>;
type Cell = &'static [(f64, u32, u32)];

fn uni(m: &UniMatrix) -> Terms {
    let mut out = Terms::new();
    for (i, row) in m.rows().iter().enumerate() {
        for (j, p) in row {
            out.insert((i, *j), p.terms().iter().map(|&(e, c)| (e, 0, c)).collect());
        }
    }
    out
}

fn bi(m: &BiMatrix) -> Terms {
    let mut out = Terms::new();
    for (i, row) in m.rows().iter().enumerate() {
        for (j, p) in row {
            out.insert((i, *j), p.terms().iter().map(|&((a, b), c)| (a, b, c)).collect());
        }
    }
    out
}

/// Dense table where each cell lists `(coefficient, first exponent, second exponent)`.
fn expected(rows: &[&[Cell]]) -> Terms {
    let mut out = Terms::new();
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            if !cell.is_empty() {
                out.insert((i, j), cell.iter().map(|&(c, a, b)| (a, b, c)).collect());
            }
        }
    }
    out
}

const O: Cell = &[];
const ONE: Cell = &[(1.0, 0, 0)];

#[test]
fn adjacency() {
    let g = build_swcc(3, 2).unwrap();
    let want = expected(&[&[ONE, ONE, O], &[O, O, ONE], &[ONE, O, O]]);
    assert_eq!(uni(&adjacency_matrix(&g)), want);
}

#[test]
fn reduced_distance_matrix() {
    let g = build_swcc(3, 2).unwrap();
    let y = &[(1.0, 1, 0)][..];
    let two_y = &[(2.0, 1, 0)][..];
    let want = expected(&[
        &[ONE, two_y, O, ONE, O, O],
        &[O, O, ONE, O, y, O],
        &[ONE, y, O, O, O, O],
        &[O, O, O, O, O, ONE],
        &[O, O, ONE, O, O, O],
        &[ONE, O, O, O, O, O],
    ]);
    assert_eq!(uni(&build_b(&g)), want);
}

#[test]
fn marked_matrices() {
    let g = build_swcc(3, 2).unwrap();
    let marks = default_marks(&g).unwrap();
    let z = &[(1.0, 1, 0)][..];
    let want_c = expected(&[&[z, ONE, O], &[O, O, z], &[z, O, O]]);
    assert_eq!(uni(&build_c(&g, &marks)), want_c);

    let x2 = &[(1.0, 2, 0)][..];
    let xy = &[(1.0, 1, 1)][..];
    let two_xy = &[(2.0, 1, 1)][..];
    let want_d = expected(&[
        &[x2, two_xy, O, ONE, O, O],
        &[O, O, x2, O, xy, O],
        &[x2, xy, O, O, O, O],
        &[O, O, O, O, O, x2],
        &[O, O, x2, O, O, O],
        &[x2, O, O, O, O, O],
    ]);
    assert_eq!(bi(&build_d(&g, &marks)), want_d);
}
