//! The fifteen spin-3/2 generators in closed form: spin vector, quadrupole
//! (Qxy, Qyz, Qzx, Dxy, Y) and octupole (Ta_x, Ta_y, Ta_z, Tb_x, Tb_y, Tb_z,
//! Txyz), each with squared trace norm 5.

use num_complex::Complex64 as C64;

use crate::operator::{CMatrix, HermitianOperator};

pub const NAMES: [&str; 15] = [
    "Jx", "Jy", "Jz", "Qxy", "Qyz", "Qzx", "Dxy", "Y", "Tax", "Tay", "Taz", "Tbx", "Tby", "Tbz",
    "Txyz",
];

fn build(scale: C64, rows: [[f64; 4]; 4]) -> HermitianOperator {
    let m = CMatrix::from_fn(4, 4, |r, c| scale * rows[r][c]);
    HermitianOperator::new(m).expect("spin-3/2 table entry is Hermitian")
}

pub fn generators() -> Vec<HermitianOperator> {
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    vec![
        build(
            re(0.5),
            [
                [0.0, s3, 0.0, 0.0],
                [s3, 0.0, 2.0, 0.0],
                [0.0, 2.0, 0.0, s3],
                [0.0, 0.0, s3, 0.0],
            ],
        ),
        build(
            im(0.5),
            [
                [0.0, -s3, 0.0, 0.0],
                [s3, 0.0, -2.0, 0.0],
                [0.0, 2.0, 0.0, -s3],
                [0.0, 0.0, s3, 0.0],
            ],
        ),
        build(
            re(0.5),
            [
                [3.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, -3.0],
            ],
        ),
        // quadrupole
        build(
            im(s5 / 2.0),
            [
                [0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, -1.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
            ],
        ),
        build(
            im(s5 / 2.0),
            [
                [0.0, -1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0, 0.0],
            ],
        ),
        build(
            re(s5 / 2.0),
            [
                [0.0, 1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, -1.0],
                [0.0, 0.0, -1.0, 0.0],
            ],
        ),
        build(
            re(s5 / 2.0),
            [
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
            ],
        ),
        build(
            re(s5 / 2.0),
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
        ),
        // octupole
        build(
            re(0.25),
            [
                [0.0, -s3, 0.0, 5.0],
                [-s3, 0.0, 3.0, 0.0],
                [0.0, 3.0, 0.0, -s3],
                [5.0, 0.0, -s3, 0.0],
            ],
        ),
        build(
            im(0.25),
            [
                [0.0, s3, 0.0, 5.0],
                [-s3, 0.0, -3.0, 0.0],
                [0.0, 3.0, 0.0, s3],
                [-5.0, 0.0, -s3, 0.0],
            ],
        ),
        build(
            re(0.5),
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, -3.0, 0.0, 0.0],
                [0.0, 0.0, 3.0, 0.0],
                [0.0, 0.0, 0.0, -1.0],
            ],
        ),
        build(
            re(s5 / 4.0),
            [
                [0.0, -1.0, 0.0, -s3],
                [-1.0, 0.0, s3, 0.0],
                [0.0, s3, 0.0, -1.0],
                [-s3, 0.0, -1.0, 0.0],
            ],
        ),
        build(
            im(s5 / 4.0),
            [
                [0.0, -1.0, 0.0, s3],
                [1.0, 0.0, s3, 0.0],
                [0.0, -s3, 0.0, -1.0],
                [-s3, 0.0, 1.0, 0.0],
            ],
        ),
        build(
            re(s5 / 2.0),
            [
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, -1.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, -1.0, 0.0, 0.0],
            ],
        ),
        build(
            im(s5 / 2.0),
            [
                [0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, -1.0, 0.0, 0.0],
            ],
        ),
    ]
}
