//! Complex baseband samples in I/Q form.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// One complex baseband sample: in-phase and quadrature amplitude.
///
/// One sample carries one symbol (matched-filter output); there is no
/// oversampling anywhere in the pipeline.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IqSample {
    pub i: f64,
    pub q: f64,
}

impl IqSample {
    pub const ZERO: IqSample = IqSample { i: 0.0, q: 0.0 };

    pub fn new(i: f64, q: f64) -> IqSample {
        IqSample { i, q }
    }

    /// Squared magnitude, i.e. the instantaneous power of the sample.
    pub fn power(self) -> f64 {
        self.i * self.i + self.q * self.q
    }

    /// Euclidean magnitude.
    pub fn norm(self) -> f64 {
        self.power().sqrt()
    }

    pub fn dot(self, other: IqSample) -> f64 {
        self.i * other.i + self.q * other.q
    }

    pub fn distance(self, other: IqSample) -> f64 {
        (self - other).norm()
    }

    /// Phase angle in (-pi, pi].
    pub fn phase(self) -> f64 {
        self.q.atan2(self.i)
    }

    /// Same direction, unit magnitude. Zero stays zero.
    pub fn normalized(self) -> IqSample {
        let n = self.norm();
        if n == 0.0 {
            IqSample::ZERO
        } else {
            self * (1.0 / n)
        }
    }

    pub fn is_finite(self) -> bool {
        self.i.is_finite() && self.q.is_finite()
    }
}

impl Add for IqSample {
    type Output = IqSample;
    fn add(self, rhs: IqSample) -> IqSample {
        IqSample::new(self.i + rhs.i, self.q + rhs.q)
    }
}

impl AddAssign for IqSample {
    fn add_assign(&mut self, rhs: IqSample) {
        self.i += rhs.i;
        self.q += rhs.q;
    }
}

impl Sub for IqSample {
    type Output = IqSample;
    fn sub(self, rhs: IqSample) -> IqSample {
        IqSample::new(self.i - rhs.i, self.q - rhs.q)
    }
}

impl Mul<f64> for IqSample {
    type Output = IqSample;
    fn mul(self, k: f64) -> IqSample {
        IqSample::new(self.i * k, self.q * k)
    }
}

impl Neg for IqSample {
    type Output = IqSample;
    fn neg(self) -> IqSample {
        IqSample::new(-self.i, -self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_and_norm() {
        let x = IqSample::new(3.0, 4.0);
        assert_eq!(x.power(), 25.0);
        assert_eq!(x.norm(), 5.0);
    }

    #[test]
    fn normalized_zero_is_zero() {
        assert_eq!(IqSample::ZERO.normalized(), IqSample::ZERO);
        let u = IqSample::new(0.0, -2.0).normalized();
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }
}
