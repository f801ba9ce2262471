//! Models shared by the benchmarks in `benches/`.

use sistab_core::{DirectionSpec, RatMatrix, SisModel};

/// Two infinite directions, one channel each way.
pub fn example1() -> SisModel {
    SisModel::new(
        RatMatrix::from_ratios(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 1)]]),
        RatMatrix::from_ratios(&[&[(1, 1), (0, 1), (0, 1), (2, 1)], &[(0, 1), (0, 1), (1, 2), (0, 1)]]),
        RatMatrix::from_ratios(&[&[(0, 1), (1, 2)], &[(1, 1), (0, 1)], &[(-1, 2), (0, 1)], &[(0, 1), (0, 1)]]),
        RatMatrix::zeros(4, 4),
        vec![DirectionSpec::infinite(1, 1), DirectionSpec::infinite(1, 1)],
    )
    .unwrap()
}

/// One infinite and one period-3 direction.
pub fn example2() -> SisModel {
    SisModel::new(
        RatMatrix::from_ratios(&[&[(-1, 1), (0, 1)], &[(0, 1), (-1, 1)]]),
        RatMatrix::from_ratios(&[&[(1, 1), (0, 1), (0, 1), (0, 1)], &[(0, 1), (0, 1), (-1, 2), (0, 1)]]),
        RatMatrix::from_ratios(&[&[(0, 1), (1, 2)], &[(1, 1), (0, 1)], &[(1, 2), (0, 1)], &[(0, 1), (0, 1)]]),
        RatMatrix::zeros(4, 4),
        vec![DirectionSpec::infinite(1, 1), DirectionSpec::periodic(3, 1, 1)],
    )
    .unwrap()
}
