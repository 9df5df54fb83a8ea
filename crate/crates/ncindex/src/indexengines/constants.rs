use num_complex::Complex64 as C64;

use crate::models::Parity;

/// Combinatorial data entering the residue and resolvent cocycles.
#[derive(Clone, Debug)]
pub struct ResidueConstants {
    pub p: f64,
    pub parity: Parity,
    /// M: the greatest integer of the triple's parity in [0, p+1]
    pub m_max: usize,
}

pub fn residue_constants(p: f64, parity: Parity) -> ResidueConstants {
    let bullet = match parity {
        Parity::Even => 0usize,
        Parity::Odd => 1usize,
    };
    let m = 2 * ((p + bullet as f64 + 1.0) / 2.0).floor() as usize;
    let m_max = m.saturating_sub(bullet);
    ResidueConstants { p, parity, m_max }
}

impl ResidueConstants {
    pub fn bullet(&self) -> usize {
        match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// alpha(k)^{-1} = k_1!...k_m! (k_1+1)(k_1+k_2+2)...(|k|+m).
    pub fn alpha(k: &[usize]) -> f64 {
        let mut inv = 1.0f64;
        for &ki in k {
            for j in 1..=ki {
                inv *= j as f64;
            }
        }
        let mut run = 0usize;
        for (i, &ki) in k.iter().enumerate() {
            run += ki;
            inv *= (run + i + 1) as f64;
        }
        1.0 / inv
    }

    /// sigma_{n,l} coefficients: prod_{l=0}^{n-1} (z + l + 1/2) for odd
    /// parity, prod_{l=0}^{n-1} (z + l) for even; returns the coefficient
    /// vector indexed by l.
    pub fn sigma(&self, n: usize) -> Vec<f64> {
        let mut coeffs = vec![1.0f64];
        for l in 0..n {
            let shift = l as f64
                + match self.parity {
                    Parity::Odd => 0.5,
                    Parity::Even => 0.0,
                };
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c; // z * c
                next[i] += shift * c;
            }
            coeffs = next;
        }
        coeffs
    }

    /// eta_m = (-sqrt(2i))^bullet 2^{m+1} Gamma(m/2+1)/Gamma(m+1).
    pub fn eta(&self, m: usize) -> C64 {
        let mut base = 2.0f64.powi(m as i32 + 1);
        // Gamma(m/2+1)/Gamma(m+1)
        base *= gamma_half_int(m as f64 / 2.0 + 1.0) / gamma_half_int(m as f64 + 1.0);
        match self.parity {
            Parity::Even => C64::new(base, 0.0),
            Parity::Odd => -C64::new(0.0, 2.0).sqrt() * base,
        }
    }

    /// Degree list m = bullet, bullet+2, ..., M.
    pub fn degrees(&self) -> Vec<usize> {
        (self.bullet()..=self.m_max).step_by(2).collect()
    }

    /// Power of the trace-power formula: (floor(p)+1)/2 when integral, else
    /// floor(p)/2 + 1.
    pub fn trace_power_exponent(&self) -> usize {
        let fp = self.p.floor() as usize;
        if (fp + 1) % 2 == 0 {
            (fp + 1) / 2
        } else {
            fp / 2 + 1
        }
    }
}

/// Gamma at integer or half-integer arguments.
fn gamma_half_int(x: f64) -> f64 {
    let two_x = (2.0 * x).round() as i64;
    debug_assert!((2.0 * x - two_x as f64).abs() < 1e-12);
    if two_x % 2 == 0 {
        // integer argument
        let n = two_x / 2;
        let mut acc = 1.0;
        for j in 1..n {
            acc *= j as f64;
        }
        acc
    } else {
        // half-integer: Gamma(1/2 + n) = (2n)! sqrt(pi) / (4^n n!)
        let n = (two_x - 1) / 2;
        let mut acc = std::f64::consts::PI.sqrt();
        for j in 0..n {
            acc *= j as f64 + 0.5;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_values() {
        assert!((ResidueConstants::alpha(&[0, 0]) - 0.5).abs() < 1e-15);
        assert!((ResidueConstants::alpha(&[1, 0]) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_tables() {
        let odd = residue_constants(1.0, Parity::Odd);
        let s1 = odd.sigma(1); // z + 1/2
        assert_eq!(s1, vec![0.5, 1.0]);
        let even = residue_constants(2.0, Parity::Even);
        let s2 = even.sigma(2); // z(z+1) = z + z^2
        assert_eq!(s2, vec![0.0, 1.0, 1.0]);
        // exact rational cross-check for n = 3 odd:
        // (z+1/2)(z+3/2)(z+5/2) = z^3 + 9/2 z^2 + 23/4 z + 15/8
        let s3 = odd.sigma(3);
        assert_eq!(s3, vec![15.0 / 8.0, 23.0 / 4.0, 9.0 / 2.0, 1.0]);
    }

    #[test]
    fn eta_values() {
        let even = residue_constants(2.0, Parity::Even);
        assert!((even.eta(2) - C64::new(4.0, 0.0)).norm() < 1e-14);
        let odd = residue_constants(1.0, Parity::Odd);
        // eta_1 = -2 sqrt(2 pi i)
        let expect = -C64::new(0.0, 2.0 * std::f64::consts::PI).sqrt() * 2.0;
        assert!((odd.eta(1) - expect).norm() < 1e-13, "{} vs {expect}", odd.eta(1));
    }

    #[test]
    fn m_and_degrees() {
        let odd = residue_constants(1.0, Parity::Odd);
        assert_eq!(odd.m_max, 1);
        assert_eq!(odd.degrees(), vec![1]);
        let even = residue_constants(2.0, Parity::Even);
        assert_eq!(even.m_max, 2);
        assert_eq!(even.degrees(), vec![0, 2]);
        // non-integer p of mismatched parity: p = 1.5 odd triple
        let odd15 = residue_constants(1.5, Parity::Odd);
        assert_eq!(odd15.m_max, 1);
    }

    #[test]
    fn trace_power_exponents() {
        assert_eq!(residue_constants(1.0, Parity::Odd).trace_power_exponent(), 1);
        assert_eq!(residue_constants(2.0, Parity::Even).trace_power_exponent(), 2);
        assert_eq!(residue_constants(3.0, Parity::Odd).trace_power_exponent(), 2);
    }
}
