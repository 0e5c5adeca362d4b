use serde::{Deserialize, Serialize};

use super::FmlError;
use crate::Scalar;

/// Trapezoidal membership function `(a, b, c, d)`: zero outside `[a, d]`,
/// one on `[b, c]`, linear on the two ramps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Scalar> Trapezoid<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, FmlError> {
        let finite = [a, b, c, d].iter().all(|v| v.is_finite());
        if !finite || a > b || b > c || c > d {
            return Err(FmlError::InvalidTrapezoid {
                params: [a.as_f64(), b.as_f64(), c.as_f64(), d.as_f64()],
            });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn params(&self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn support(&self) -> (T, T) {
        (self.a, self.d)
    }

    pub fn eval(&self, x: T) -> T {
        if x < self.a || x > self.d {
            T::zero()
        } else if x >= self.b && x <= self.c {
            T::one()
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }

    /// Centroid of the area under the (unclipped) trapezoid.
    pub fn centroid(&self) -> T {
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let left = (self.b - self.a) / two;
        let core = self.c - self.b;
        let right = (self.d - self.c) / two;
        let area = left + core + right;
        if area <= T::zero() {
            return self.a;
        }
        let moment = left * (self.a + two * (self.b - self.a) / three)
            + core * (self.b + self.c) / two
            + right * (self.c + (self.d - self.c) / three);
        moment / area
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsn_low() -> Trapezoid<f64> {
        Trapezoid::new(0.0, 0.0, 2556.0, 7122.0).unwrap()
    }

    #[test]
    fn plateau_and_ramps() {
        let low = bsn_low();
        assert_eq!(low.eval(0.0), 1.0);
        assert_eq!(low.eval(2556.0), 1.0);
        assert_eq!(low.eval(7122.0), 0.0);
        assert_eq!(low.eval(4839.0), 0.5);
        assert_eq!(low.eval(15000.0), 0.0);
    }

    #[test]
    fn medium_descending_ramp() {
        let medium = Trapezoid::<f64>::new(2556.0, 7122.0, 12637.0, 17203.0).unwrap();
        let expected = (17203.0 - 12983.0) / (17203.0 - 12637.0);
        assert!((medium.eval(12983.0) - expected).abs() < 1e-12);
        assert!((medium.eval(12983.0) - 0.9242).abs() < 1e-4);
    }

    #[test]
    fn rejects_unordered_params() {
        assert!(Trapezoid::new(1.0, 0.0, 2.0, 3.0).is_err());
        assert!(Trapezoid::new(0.0, 1.0, 3.0, 2.0).is_err());
        assert!(Trapezoid::new(0.0, f64::NAN, 3.0, 4.0).is_err());
    }

    #[test]
    fn centroid_of_symmetric_and_degenerate_shapes() {
        let sym = Trapezoid::<f64>::new(37.5, 47.5, 52.5, 62.5).unwrap();
        assert!((sym.centroid() - 50.0).abs() < 1e-12);
        let point = Trapezoid::new(3.0, 3.0, 3.0, 3.0).unwrap();
        assert_eq!(point.centroid(), 3.0);
        // right triangle on [0, 3]: centroid at 1
        let tri = Trapezoid::<f64>::new(0.0, 0.0, 0.0, 3.0).unwrap();
        assert!((tri.centroid() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn works_for_f32() {
        let t = Trapezoid::<f32>::new(0.0, 0.0, 20.0, 30.0).unwrap();
        assert_eq!(t.eval(25.0), 0.5);
    }
}
