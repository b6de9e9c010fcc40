use core::fmt;

use rand::Rng;

use crate::{Error, Result};

/// An assignment of ±1 to `n` Ising spins packed into a bit pattern.
///
/// Bit `b` set means `s_b = -1`; clear means `s_b = +1`. The pattern doubles
/// as the computational basis index of the same configuration.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig {
    n: u8,
    bits: u64,
}

impl SpinConfig {
    pub const MAX_SPINS: usize = 64;

    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > Self::MAX_SPINS {
            return Err(Error::InvalidSpinCount { n, max: Self::MAX_SPINS });
        }
        if bits & !mask(n) != 0 {
            return Err(Error::InvalidParameter("bits set above the spin count"));
        }
        Ok(SpinConfig { n: n as u8, bits })
    }

    /// All spins up.
    pub fn all_up(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    /// Builds a configuration from explicit ±1 values.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let mut bits = 0u64;
        for (b, &s) in spins.iter().enumerate() {
            match s {
                1 => {}
                -1 => bits |= 1 << b,
                _ => return Err(Error::InvalidParameter("spin values must be +1 or -1")),
            }
        }
        Self::new(spins.len(), bits)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let bits = rng.random::<u64>() & mask(n);
        Self::new(n, bits)
    }

    #[inline]
    pub(crate) fn from_raw(n: usize, bits: u64) -> Self {
        debug_assert!(n <= Self::MAX_SPINS && bits & !mask(n) == 0);
        SpinConfig { n: n as u8, bits }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Basis index of this configuration.
    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    /// Spin value `s_b` as ±1.
    #[inline]
    pub fn spin(&self, b: usize) -> i8 {
        1 - 2 * ((self.bits >> b) & 1) as i8
    }

    pub fn spins(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.n()).map(|b| self.spin(b))
    }

    #[inline]
    pub fn flip_spin(&self, b: usize) -> Self {
        SpinConfig { n: self.n, bits: self.bits ^ (1 << b) }
    }

    /// Complements every spin. An involution.
    #[inline]
    pub fn global_flip(&self) -> Self {
        SpinConfig { n: self.n, bits: self.bits ^ mask(self.n()) }
    }

    /// Representative of `{self, global_flip(self)}` with spin 0 up.
    #[inline]
    pub fn canonical(&self) -> Self {
        if self.bits & 1 == 1 {
            self.global_flip()
        } else {
            *self
        }
    }

    pub fn hamming(&self, other: &SpinConfig) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Hamming distance to the nearer member of `{other, flip(other)}`.
    pub fn hamming_mod_flip(&self, other: &SpinConfig) -> u32 {
        let d = self.hamming(other);
        d.min(self.n as u32 - d)
    }

    /// True when `self` is `other` or its global flip.
    pub fn same_up_to_flip(&self, other: &SpinConfig) -> bool {
        self.n == other.n && (self.bits == other.bits || self.bits == (other.bits ^ mask(self.n())))
    }
}

/// Mask of the low `n` bits.
#[inline]
pub fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Debug for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfig(")?;
        for s in self.spins() {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encoding() {
        let s = SpinConfig::from_spins(&[1, 1, -1, -1]).unwrap();
        assert_eq!(s.bits(), 0b1100);
        assert_eq!(s.spin(0), 1);
        assert_eq!(s.spin(3), -1);
        assert_eq!(s.global_flip().bits(), 0b0011);
        assert_eq!(s.global_flip().canonical(), s);
        assert!(SpinConfig::from_spins(&[1, 0]).is_err());
        assert!(SpinConfig::new(3, 0b1000).is_err());
        assert!(SpinConfig::new(0, 0).is_err());
    }

    proptest! {
        #[test]
        fn global_flip_is_involution(n in 1usize..=64, raw in any::<u64>()) {
            let s = SpinConfig::new(n, raw & mask(n)).unwrap();
            prop_assert_eq!(s.global_flip().global_flip(), s);
            prop_assert_eq!(s.global_flip().bits() & !mask(n), 0);
            prop_assert!(s.same_up_to_flip(&s.global_flip()));
            prop_assert_eq!(s.hamming(&s.global_flip()) as usize, n);
        }
    }
}
