//! Integer rescaling of a distance matrix.
//!
//! Permutation scores are sums of distances, so multiplying every entry by
//! the lcm of the denominators turns the whole computation into exact integer
//! arithmetic. `i128` is used when the scaled entries are small enough to
//! leave generous headroom for sums of `O(m²)` terms; otherwise `BigInt`.

use std::fmt::Debug;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;

pub(crate) trait Weight:
    Clone + Ord + Debug + Zero + One + Add<Output = Self> + Sub<Output = Self> + Send + Sync
{
    fn to_big(&self) -> BigInt;
}

impl Weight for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Weight for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

pub(crate) enum Weights {
    Small(Vec<Vec<i128>>),
    Big(Vec<Vec<BigInt>>),
}

pub(crate) struct ScaledSpace {
    pub weights: Weights,
    /// True distance = scaled / unit.
    pub unit: BigInt,
}

const SMALL_LIMIT_BITS: u64 = 80;

impl ScaledSpace {
    pub fn new(space: &FiniteMetricSpace) -> Self {
        let unit = space
            .matrix()
            .iter()
            .flat_map(|r| r.iter())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let big: Vec<Vec<BigInt>> = space
            .matrix()
            .iter()
            .map(|r| r.iter().map(|x| x.numer() * (&unit / x.denom())).collect())
            .collect();
        let fits = big.iter().flatten().all(|x| x.bits() <= SMALL_LIMIT_BITS);
        let weights = if fits {
            Weights::Small(
                big.iter()
                    .map(|r| r.iter().map(|x| x.to_i128().unwrap()).collect())
                    .collect(),
            )
        } else {
            Weights::Big(big)
        };
        ScaledSpace { weights, unit }
    }

    pub fn to_scalar<W: Weight>(&self, w: &W) -> Scalar {
        Scalar::from_big(w.to_big(), self.unit.clone())
    }

    /// `w / (2 * unit)`.
    pub fn half_to_scalar<W: Weight>(&self, w: &W) -> Scalar {
        Scalar::from_big(w.to_big(), &self.unit * 2)
    }
}

/// Sum of all entries plus one; exceeds any assignment weight difference.
pub(crate) fn big_m<W: Weight>(w: &[Vec<W>]) -> W {
    let mut total = W::zero();
    for row in w {
        for x in row {
            total = total + x.clone();
        }
    }
    total + W::one()
}
