use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]` of a Hermitian
/// matrix. Its spectrum is that of `H` with every eigenvalue doubled in
/// multiplicity, so PSD-ness is preserved in both directions.
pub fn hermitian_embed(h: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: h.ncols(),
        });
    }
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            if (h[(i, j)] - h[(j, i)].conj()).norm() > 1e-12 * scale {
                return Err(Error::NonHermitianMatrix);
            }
        }
    }
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    Ok(out)
}

/// Compress a real symmetric `2n × 2n` matrix `Y` to the Hermitian
/// `G = (Y11 + Y22)/2 + i (Y21 - Y12)/2`. This is a positive map (PSD `Y`
/// gives PSD `G`) and the left inverse of [`hermitian_embed`].
pub fn hermitian_unembed(y: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = y.nrows() / 2;
    DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            0.5 * (y[(i, j)] + y[(i + n, j + n)]),
            0.5 * (y[(i + n, j)] - y[(i, j + n)]),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::min_eigenvalue;

    #[test]
    fn real_input_gives_block_diagonal() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]).map(|x| Complex64::new(x, 0.0));
        let e = hermitian_embed(&h).unwrap();
        assert_eq!(e.view((0, 0), (2, 2)), h.map(|z| z.re));
        assert_eq!(e.view((2, 2), (2, 2)), h.map(|z| z.re));
        assert!(e.view((0, 2), (2, 2)).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::new(0.0, 1.0);
        let h = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), i, -i, Complex64::new(0.0, 0.0)]);
        let e = hermitian_embed(&h).unwrap();
        let mut ev: Vec<f64> = e.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((min_eigenvalue(&e) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let h = DMatrix::from_row_slice(1, 1, &[Complex64::new(1.0, 0.5)]);
        assert!(matches!(hermitian_embed(&h), Err(Error::NonHermitianMatrix)));
    }

    #[test]
    fn unembed_inverts_embed() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.5, -1.5),
                Complex64::new(0.5, 1.5),
                Complex64::new(4.0, 0.0),
            ],
        );
        assert_eq!(hermitian_unembed(&hermitian_embed(&h).unwrap()), h);
    }
}
