//! Arithmetic over GF(2^8).
//!
//! Elements are degree-<8 binary polynomials packed into a byte. Addition is
//! XOR; multiplication goes through log/antilog tables generated from a
//! configurable primitive polynomial (default x^8+x^4+x^3+x^2+1, `0x11D`).
//! A full 256x256 product table is also kept so that decoders can permute
//! message vectors by an edge coefficient with a single row lookup.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// x^8 + x^4 + x^3 + x^2 + 1
pub const DEFAULT_PRIMITIVE_POLY: u16 = 0x11D;

/// Number of field elements.
pub const ORDER: usize = 256;

/// An element of GF(2^8).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl From<u8> for FieldElement {
    fn from(v: u8) -> Self {
        FieldElement(v)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Field addition; independent of the primitive polynomial.
impl Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// Field parameters and lookup tables for one choice of primitive polynomial.
///
/// Tables are immutable once built, so a `Field` can be shared freely across
/// threads (usually behind an [`Arc`]).
pub struct Field {
    poly: u16,
    log: [u8; ORDER],
    // Doubled so that exp[log a + log b] needs no modular reduction.
    antilog: [u8; 2 * ORDER],
    mul: Box<[[u8; ORDER]; ORDER]>,
    inv: [u8; ORDER],
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

impl Field {
    /// Builds the tables for `poly`, a 9-bit polynomial with the x^8 term set.
    ///
    /// Fails unless `x` generates the whole multiplicative group, i.e. the
    /// polynomial is primitive.
    pub fn new(poly: u16) -> Result<Field> {
        if poly & 0x100 == 0 || poly > 0x1FF || poly & 1 == 0 {
            return Err(Error::NotPrimitive(poly));
        }
        let mut log = [0u8; ORDER];
        let mut antilog = [0u8; 2 * ORDER];
        let mut seen = [false; ORDER];
        let mut x: u16 = 1;
        for i in 0..255 {
            if seen[x as usize] {
                return Err(Error::NotPrimitive(poly));
            }
            seen[x as usize] = true;
            antilog[i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & 0x100 != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::NotPrimitive(poly));
        }
        for i in 255..2 * ORDER {
            antilog[i] = antilog[i - 255];
        }

        let mut mul = Box::new([[0u8; ORDER]; ORDER]);
        for a in 1..ORDER {
            let la = log[a] as usize;
            for b in 1..ORDER {
                mul[a][b] = antilog[la + log[b] as usize];
            }
        }
        let mut inv = [0u8; ORDER];
        for a in 1..ORDER {
            inv[a] = antilog[(255 - log[a] as usize) % 255];
        }

        Ok(Field {
            poly,
            log,
            antilog,
            mul,
            inv,
        })
    }

    /// The process-wide field for [`DEFAULT_PRIMITIVE_POLY`].
    pub fn shared_default() -> Arc<Field> {
        static DEFAULT: OnceLock<Arc<Field>> = OnceLock::new();
        DEFAULT
            .get_or_init(|| Arc::new(Field::new(DEFAULT_PRIMITIVE_POLY).expect("0x11D is primitive")))
            .clone()
    }

    pub fn primitive_polynomial(&self) -> u16 {
        self.poly
    }

    pub fn log_table(&self) -> &[u8; ORDER] {
        &self.log
    }

    /// First 256 entries of the antilog table; entry 255 wraps to 1.
    pub fn antilog_table(&self) -> &[u8] {
        &self.antilog[..ORDER]
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[a.0 as usize][b.0 as usize])
    }

    /// Product via the log/antilog tables (the product table is built from
    /// these; kept separate so the two can be cross-checked).
    #[inline]
    pub fn mul_log(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        FieldElement(self.antilog[self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(FieldElement(self.inv[a.0 as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `row[x] = a * x` for every x.
    #[inline]
    pub fn mul_row(&self, a: FieldElement) -> &[u8; ORDER] {
        &self.mul[a.0 as usize]
    }

    /// alpha^i for the primitive element alpha = x.
    pub fn exp(&self, i: usize) -> FieldElement {
        FieldElement(self.antilog[i % 255])
    }
}
