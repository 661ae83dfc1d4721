/// Order parameter of the iterated-mean family: `alpha_k = 1 + 1/(2^k - 1)`,
/// so k = 1, 2, 3 give alpha = 2, 4/3, 8/7.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImOrder {
    k: u32,
}

impl ImOrder {
    pub fn new(k: u32) -> Self {
        assert!(k >= 1, "order parameter k must be >= 1");
        assert!(k <= 20, "order parameter k unreasonably large");
        Self { k }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// alpha as exact rational numerator/denominator (2^k, 2^k - 1).
    pub fn alpha_ratio(&self) -> (u64, u64) {
        let p = 1u64 << self.k;
        (p, p - 1)
    }

    pub fn alpha(&self) -> f64 {
        let (n, d) = self.alpha_ratio();
        n as f64 / d as f64
    }

    /// The entropy transform prefactor `alpha / (1 - alpha) = -2^k`.
    pub fn entropy_prefactor(&self) -> f64 {
        -((1u64 << self.k) as f64)
    }

    /// `1 / (alpha - 1) = 2^k - 1`.
    pub fn inv_alpha_minus_one(&self) -> f64 {
        ((1u64 << self.k) - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_alpha_values() {
        assert_eq!(ImOrder::new(1).alpha_ratio(), (2, 1));
        assert_eq!(ImOrder::new(2).alpha_ratio(), (4, 3));
        assert_eq!(ImOrder::new(3).alpha_ratio(), (8, 7));
        assert!(ImOrder::new(1).alpha() == 2.0);
        for k in 1..=10 {
            let a = ImOrder::new(k).alpha();
            assert!(a > 1.0 && a <= 2.0);
        }
        assert_eq!(ImOrder::new(1).entropy_prefactor(), -2.0);
        assert_eq!(ImOrder::new(2).entropy_prefactor(), -4.0);
    }
}
