//! Matrices from the worked examples, 0-based.
#![allow(missing_docs)]

use crate::matrix::{TropicalMatrix, ZERO};

const N: f64 = ZERO;

fn m(rows: &[&[f64]]) -> TropicalMatrix {
    TropicalMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
        .expect("fixture matrices are well formed")
}

pub fn example1() -> TropicalMatrix {
    m(&[
        &[-1.0, 0.0, -7.0, -6.0],
        &[0.0, -1.0, -5.0, -4.0],
        &[-7.0, -5.0, -1.0, -3.0],
        &[-6.0, -4.0, -3.0, -2.0],
    ])
}

pub fn example1_s1() -> TropicalMatrix {
    m(&[
        &[N, 0.0, N, N],
        &[0.0, N, N, N],
        &[N, N, N, N],
        &[N, N, N, N],
    ])
}

/// The three canonical terms at even times, then the first term at odd times.
pub fn example1_nachtigall() -> [TropicalMatrix; 4] {
    [
        m(&[
            &[0.0, -1.0, -5.0, -4.0],
            &[-1.0, 0.0, -6.0, -5.0],
            &[-5.0, -6.0, -10.0, -9.0],
            &[-4.0, -5.0, -9.0, -8.0],
        ]),
        m(&[
            &[N, N, N, N],
            &[N, N, N, N],
            &[N, N, 0.0, -2.0],
            &[N, N, -2.0, -4.0],
        ]),
        m(&[&[N, N, N, N], &[N, N, N, N], &[N, N, N, N], &[N, N, N, 0.0]]),
        m(&[
            &[-1.0, 0.0, -6.0, -5.0],
            &[0.0, -1.0, -5.0, -4.0],
            &[-6.0, -5.0, -11.0, -10.0],
            &[-5.0, -4.0, -10.0, -9.0],
        ]),
    ]
}

pub fn example1_power(t: u64) -> Option<TropicalMatrix> {
    let rows: &[&[f64]] = match t {
        2 => &[
            &[0.0, -1.0, -5.0, -4.0],
            &[-1.0, 0.0, -6.0, -5.0],
            &[-5.0, -6.0, -2.0, -4.0],
            &[-4.0, -5.0, -4.0, -4.0],
        ],
        3 => &[
            &[-1.0, 0.0, -6.0, -5.0],
            &[0.0, -1.0, -5.0, -4.0],
            &[-6.0, -5.0, -3.0, -5.0],
            &[-5.0, -4.0, -5.0, -6.0],
        ],
        4 => &[
            &[0.0, -1.0, -5.0, -4.0],
            &[-1.0, 0.0, -6.0, -5.0],
            &[-5.0, -6.0, -4.0, -6.0],
            &[-4.0, -5.0, -6.0, -8.0],
        ],
        10 => &[
            &[0.0, -1.0, -5.0, -4.0],
            &[-1.0, 0.0, -6.0, -5.0],
            &[-5.0, -6.0, -10.0, -9.0],
            &[-4.0, -5.0, -9.0, -8.0],
        ],
        _ => return None,
    };
    Some(m(rows))
}

pub fn example2() -> TropicalMatrix {
    m(&[
        &[-2.0, 0.0, -3.0, -7.0, N, N, N],
        &[0.0, -2.0, -5.0, -7.0, N, N, N],
        &[-9.0, -7.0, -9.0, -8.0, N, N, N],
        &[-9.0, -6.0, -4.0, -4.0, N, N, N],
        &[-8.0, -5.0, -5.0, -4.0, -1.0, -7.0, -5.0],
        &[-7.0, -8.0, -5.0, -6.0, -3.0, -6.0, -8.0],
        &[-6.0, -4.0, -9.0, -3.0, -5.0, -5.0, -5.0],
    ])
}

pub fn example2_square_star() -> TropicalMatrix {
    m(&[
        &[0.0, -2.0, -5.0, -7.0, N, N, N],
        &[-2.0, 0.0, -3.0, -7.0, N, N, N],
        &[-7.0, -9.0, 0.0, -12.0, N, N, N],
        &[-6.0, -8.0, -8.0, 0.0, N, N, N],
        &[-5.0, -6.0, -6.0, -5.0, 0.0, -8.0, -6.0],
        &[-8.0, -7.0, -8.0, -7.0, -4.0, 0.0, -8.0],
        &[-4.0, -6.0, -7.0, -7.0, -6.0, -10.0, 0.0],
    ])
}

pub fn example3_a() -> TropicalMatrix {
    m(&[
        &[N, 1.0, N, N, N, N],
        &[N, N, 1.0, N, N, N],
        &[N, N, N, 1.0, N, N],
        &[1.0, N, N, N, N, N],
        &[N, -2.0, N, N, N, 0.0],
        &[N, -2.0, N, N, 0.0, N],
    ])
}

pub fn example3_b() -> TropicalMatrix {
    m(&[
        &[N, 1.0, N, N, N, N],
        &[N, N, 1.0, N, N, N],
        &[N, N, N, 1.0, N, N],
        &[1.0, N, N, N, N, N],
        &[N, -2.0, N, N, N, 0.0],
        &[N, N, -2.0, N, 0.0, N],
    ])
}

/// First ultimate term at odd residues for `example3_a`.
pub fn example3_a_u1() -> TropicalMatrix {
    m(&[
        &[N, 0.0, N, N, N, N],
        &[N, N, 0.0, N, N, N],
        &[N, N, N, 0.0, N, N],
        &[0.0, N, N, N, N, N],
        &[-4.0, -3.0, -6.0, -5.0, N, N],
        &[-4.0, -3.0, -6.0, -5.0, N, N],
    ])
}

/// First ultimate term at odd residues for `example3_b`.
pub fn example3_b_u1() -> TropicalMatrix {
    m(&[
        &[N, 0.0, N, N, N, N],
        &[N, N, 0.0, N, N, N],
        &[N, N, N, 0.0, N, N],
        &[0.0, N, N, N, N, N],
        &[N, -3.0, N, -5.0, N, N],
        &[-4.0, N, -3.0, N, N, N],
    ])
}

/// Second ultimate term at odd residues, shared by both matrices.
pub fn example3_u2() -> TropicalMatrix {
    m(&[
        &[N, N, N, N, N, N],
        &[N, N, N, N, N, N],
        &[N, N, N, N, N, N],
        &[N, N, N, N, N, N],
        &[N, N, N, N, N, 0.0],
        &[N, N, N, N, 0.0, N],
    ])
}

/// `e_1 ⊕ e_6`.
pub fn example3_x() -> Vec<f64> {
    vec![0.0, N, N, N, N, 0.0]
}
