use crate::error::{Error, Result};

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: u64) -> u64 {
    (x + 1..)
        .find(|p| is_prime(*p))
        .expect("primes are unbounded")
}

/// Arithmetic modulo a prime `q < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 32 || !is_prime(q) {
            return Err(Error::parameter(format!("{q} is not a prime below 2^32")));
        }
        Ok(PrimeField { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a % self.q) * (b % self.q) % self.q
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.q == 0 {
            return Err(Error::parameter("zero has no inverse"));
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Horner evaluation of `coefficients[0] + coefficients[1] x + ...`.
    pub fn eval(&self, coefficients: &[u64], x: u64) -> u64 {
        coefficients
            .iter()
            .rev()
            .fold(0, |acc, c| self.add(self.mul(acc, x), *c))
    }

    /// Value at 0 of the polynomial of least degree through `points`.
    pub fn interpolate_at_zero(&self, points: &[(u64, u64)]) -> Result<u64> {
        let mut total = 0;
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut num = 1;
            let mut den = 1;
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    num = self.mul(num, *xj);
                    den = self.mul(den, self.sub(*xj, *xi));
                }
            }
            total = self.add(total, self.mul(*yi, self.mul(num, self.inv(den)?)));
        }
        Ok(total)
    }

    /// Value at `x` of the polynomial of least degree through `points`.
    pub fn interpolate_at(&self, points: &[(u64, u64)], x: u64) -> Result<u64> {
        let mut total = 0;
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut num = 1;
            let mut den = 1;
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    num = self.mul(num, self.sub(x, *xj));
                    den = self.mul(den, self.sub(*xi, *xj));
                }
            }
            total = self.add(total, self.mul(*yi, self.mul(num, self.inv(den)?)));
        }
        Ok(total)
    }
}
