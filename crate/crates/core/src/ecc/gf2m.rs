/// Arithmetic in GF(2^b) through exp/log tables over a primitive polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2m {
    b: u32,
    poly: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

/// Order of `x` modulo `poly` (degree `b`), or `None` if it never returns to 1
/// within `2^b - 1` steps.
fn order_of_x(poly: u32, b: u32) -> Option<u32> {
    let top = 1u32 << b;
    let mut v = 1u32;
    for i in 1..top {
        v <<= 1;
        if v & top != 0 {
            v ^= poly;
        }
        if v == 1 {
            return Some(i);
        }
    }
    None
}

/// Lexicographically first primitive polynomial of degree `b`, as a bit mask
/// including the leading term.
pub fn first_primitive_poly(b: u32) -> u32 {
    assert!((2..=16).contains(&b), "field degree {b} outside 2..=16");
    let top = 1u32 << b;
    (top + 1..2 * top)
        .step_by(2)
        .find(|&p| order_of_x(p, b) == Some(top - 1))
        .expect("a primitive polynomial exists for every degree")
}

impl Gf2m {
    pub fn new(b: u32) -> Self {
        Self::with_poly(b, first_primitive_poly(b))
    }

    /// # Panics
    /// If `poly` is not primitive of degree `b`.
    pub fn with_poly(b: u32, poly: u32) -> Self {
        let q = 1usize << b;
        assert_eq!(order_of_x(poly, b), Some(q as u32 - 1), "polynomial {poly:#x} is not primitive");
        let mut exp = vec![0u16; 2 * (q - 1)];
        let mut log = vec![0u16; q];
        let mut v = 1u32;
        for i in 0..q - 1 {
            exp[i] = v as u16;
            exp[i + q - 1] = v as u16;
            log[v as usize] = i as u16;
            v <<= 1;
            if v & (q as u32) != 0 {
                v ^= poly;
            }
        }
        Self { b, poly, exp, log }
    }

    pub fn degree(&self) -> u32 {
        self.b
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Multiplicative group order `2^b - 1`.
    pub fn order(&self) -> usize {
        (1usize << self.b) - 1
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "inverse of zero");
        let n = self.order();
        self.exp[(n - self.log[a as usize] as usize) % n]
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        self.mul(a, self.inv(b))
    }

    /// `alpha^e` for any integer exponent.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> u16 {
        let n = self.order() as i64;
        self.exp[e.rem_euclid(n) as usize]
    }

    pub fn log(&self, a: u16) -> Option<usize> {
        (a != 0).then(|| self.log[a as usize] as usize)
    }
}
