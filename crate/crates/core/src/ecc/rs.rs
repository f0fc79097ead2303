use super::gf2m::Gf2m;

/// Systematic narrow-sense Reed-Solomon code of length `n` and dimension `k`
/// over GF(2^b), `n <= 2^b - 1`.
///
/// Codeword index `i` holds the coefficient of `x^i`; parity occupies
/// `0 .. n-k`, the message `n-k .. n`.
#[derive(Clone, Debug)]
pub struct ReedSolomon {
    field: Gf2m,
    n: usize,
    k: usize,
    /// Generator polynomial `prod_{i=1}^{n-k} (x - alpha^i)`, low degree first.
    generator: Vec<u16>,
}

impl ReedSolomon {
    pub fn new(field: Gf2m, n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n && n <= field.order(), "invalid RS shape n={n}, k={k}");
        let mut g = vec![1u16];
        for i in 1..=(n - k) {
            let root = field.alpha_pow(i as i64);
            let mut next = vec![0u16; g.len() + 1];
            for (j, &c) in g.iter().enumerate() {
                next[j + 1] ^= c;
                next[j] ^= field.mul(c, root);
            }
            g = next;
        }
        Self {
            field,
            n,
            k,
            generator: g,
        }
    }

    pub fn field(&self) -> &Gf2m {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Symbol errors corrected: `floor((n-k)/2)`.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn encode(&self, msg: &[u16]) -> Vec<u16> {
        assert_eq!(msg.len(), self.k, "RS message length");
        let r = self.n - self.k;
        let mut cw = vec![0u16; self.n];
        cw[r..].copy_from_slice(msg);
        // Remainder of msg(x)·x^r modulo the monic generator.
        let mut rem = cw.clone();
        for i in (r..self.n).rev() {
            let coef = rem[i];
            if coef == 0 {
                continue;
            }
            for (j, &g) in self.generator.iter().enumerate() {
                rem[i - r + j] ^= self.field.mul(coef, g);
            }
        }
        cw[..r].copy_from_slice(&rem[..r]);
        cw
    }

    fn syndromes(&self, word: &[u16]) -> Vec<u16> {
        (1..=(self.n - self.k))
            .map(|j| {
                let mut acc = 0u16;
                for (i, &c) in word.iter().enumerate() {
                    if c != 0 {
                        acc ^= self.field.mul(c, self.field.alpha_pow((i * j) as i64));
                    }
                }
                acc
            })
            .collect()
    }

    /// Corrects up to `t()` symbol errors and returns the message symbols.
    pub fn decode(&self, word: &[u16]) -> Option<Vec<u16>> {
        assert_eq!(word.len(), self.n, "RS word length");
        let f = &self.field;
        let synd = self.syndromes(word);
        let r = self.n - self.k;
        if synd.iter().all(|&s| s == 0) {
            return Some(word[r..].to_vec());
        }
        let lambda = berlekamp_massey(f, &synd);
        let nerr = lambda.len() - 1;
        if nerr > self.t() {
            return None;
        }
        // Chien search over the shortened support.
        let positions: Vec<usize> = (0..self.n)
            .filter(|&i| eval(f, &lambda, f.alpha_pow(-(i as i64))) == 0)
            .collect();
        if positions.len() != nerr {
            return None;
        }
        // Forney with first consecutive root alpha^1.
        let mut omega = vec![0u16; r];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &l) in lambda.iter().enumerate() {
                if i + j < r {
                    omega[i + j] ^= f.mul(s, l);
                }
            }
        }
        let dlambda: Vec<u16> = lambda
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| if j % 2 == 1 { c } else { 0 })
            .collect();
        let mut fixed = word.to_vec();
        for &p in &positions {
            let xinv = f.alpha_pow(-(p as i64));
            let den = eval(f, &dlambda, xinv);
            if den == 0 {
                return None;
            }
            fixed[p] ^= f.div(eval(f, &omega, xinv), den);
        }
        if self.syndromes(&fixed).iter().any(|&s| s != 0) {
            return None;
        }
        Some(fixed[r..].to_vec())
    }
}

fn eval(f: &Gf2m, poly: &[u16], x: u16) -> u16 {
    poly.iter().rev().fold(0u16, |acc, &c| f.mul(acc, x) ^ c)
}

/// Error-locator polynomial, low degree first, trimmed to its true degree.
fn berlekamp_massey(f: &Gf2m, synd: &[u16]) -> Vec<u16> {
    let mut c = vec![1u16];
    let mut b = vec![1u16];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last = 1u16;
    for n in 0..synd.len() {
        let mut d = synd[n];
        for i in 1..=l.min(c.len() - 1) {
            d ^= f.mul(c[i], synd[n - i]);
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = f.div(d, last);
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            next[i + m] ^= f.mul(coef, bi);
        }
        if 2 * l <= n {
            b = c;
            l = n + 1 - l;
            last = d;
            m = 1;
        } else {
            m += 1;
        }
        c = next;
    }
    c.resize(l + 1, 0);
    c
}
