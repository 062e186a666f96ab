//! Dirichlet characters stored as value tables.
//!
//! A character modulo `N` is kept as a table of exponents `k(n)` with
//! `chi(n) = exp(2 pi i k(n) / E)`, where `E` is the exponent of the unit
//! group. Characters of a given modulus are ordered lexicographically by
//! their tables of angles `k(n)/E` in `[0, 1)`, scanning `n = 1, 2, ...`, so
//! index 0 is always the principal character.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_MODULUS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    exponent: u64,
    index: usize,
    table: Vec<Option<u32>>,
    kappa: u8,
    primitive: bool,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Parity: 0 when `chi(-1) = 1`, 1 when `chi(-1) = -1`.
    pub fn kappa(&self) -> u8 {
        self.kappa
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_principal(&self) -> bool {
        self.table.iter().all(|e| matches!(e, None | Some(0)))
    }

    pub fn is_real(&self) -> bool {
        self.table
            .iter()
            .flatten()
            .all(|&k| (2 * k as u64) % self.exponent == 0)
    }

    /// Value at an arbitrary integer.
    pub fn value(&self, n: i64) -> Complex64 {
        let m = n.rem_euclid(self.modulus as i64) as usize;
        match self.table[m] {
            None => Complex64::new(0.0, 0.0),
            Some(k) => root_of_unity(k as u64, self.exponent),
        }
    }

    pub fn values(&self) -> Vec<Complex64> {
        (0..self.modulus as i64).map(|n| self.value(n)).collect()
    }

    pub fn conj(&self) -> DirichletCharacter {
        let e = self.exponent as u32;
        let table = self
            .table
            .iter()
            .map(|k| k.map(|k| if k == 0 { 0 } else { e - k }))
            .collect();
        DirichletCharacter {
            table,
            ..self.clone()
        }
    }

    pub fn gauss_sum(&self) -> Complex64 {
        let n = self.modulus;
        (1..=n)
            .map(|a| self.value(a as i64) * root_of_unity(a % n, n))
            .sum()
    }

    /// Root number `i^(-kappa) tau(chi) / sqrt(N)` of the functional equation.
    pub fn root_number(&self) -> Complex64 {
        let i_pow = if self.kappa == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0)
        };
        i_pow * self.gauss_sum() / (self.modulus as f64).sqrt()
    }

    /// Smallest modulus the character is induced from.
    pub fn conductor(&self) -> u64 {
        let n = self.modulus;
        (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| self.trivial_on_kernel(d))
            .unwrap_or(n)
    }

    fn trivial_on_kernel(&self, d: u64) -> bool {
        let n = self.modulus;
        let mut m = 1 % n;
        while m < n.max(1) {
            if let Some(k) = self.table[m as usize] {
                if k != 0 {
                    return false;
                }
            }
            m += d;
            if d == n {
                break;
            }
        }
        true
    }

    /// CLI-style selector `N.j`.
    pub fn label(&self) -> String {
        format!("{}.{}", self.modulus, self.index)
    }
}

fn root_of_unity(k: u64, e: u64) -> Complex64 {
    let k = k % e;
    if 4 * k == e {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * k == e {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == 3 * e {
        return Complex64::new(0.0, -1.0);
    }
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / e as f64)
}

#[derive(Debug, Clone)]
struct Component {
    order: u64,
    // discrete log of n mod N in this cyclic factor, indexed by n mod N
    logs: Vec<u32>,
}

/// The character group of `(Z/NZ)^*` with its lexicographic ordering.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    modulus: u64,
    exponent: u64,
    components: Vec<Component>,
    units: Vec<u32>,
    sorted: Vec<Vec<u32>>,
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 || modulus > MAX_MODULUS {
            return Err(Error::ModulusOutOfRange(modulus));
        }
        let n = modulus;
        let units: Vec<u32> = (0..n)
            .filter(|&m| gcd(m, n) == 1)
            .map(|m| m as u32)
            .collect();
        let mut components = Vec::new();
        for (p, e) in factor(n) {
            let pe = p.pow(e);
            let mut gens: Vec<(u64, u64)> = Vec::new(); // (generator mod pe, order)
            if p == 2 {
                if e == 2 {
                    gens.push((3, 2));
                } else if e >= 3 {
                    gens.push((pe - 1, 2));
                    gens.push((5, pe / 4));
                }
            } else {
                gens.push((primitive_root_prime_power(p, e), pe / p * (p - 1)));
            }
            if gens.is_empty() {
                continue;
            }
            // per-residue logs mod pe
            let mut local: Vec<Vec<u32>> = vec![vec![u32::MAX; pe as usize]; gens.len()];
            if gens.len() == 1 {
                let (g, ord) = gens[0];
                let mut x = 1u64;
                for k in 0..ord {
                    local[0][x as usize] = k as u32;
                    x = x * g % pe;
                }
            } else {
                let ord5 = gens[1].1;
                let mut x = 1u64;
                for b in 0..ord5 {
                    local[0][x as usize] = 0;
                    local[1][x as usize] = b as u32;
                    let y = (pe - x) % pe;
                    local[0][y as usize] = 1;
                    local[1][y as usize] = b as u32;
                    x = x * 5 % pe;
                }
            }
            for (gi, &(_, ord)) in gens.iter().enumerate() {
                let mut logs = vec![u32::MAX; n as usize];
                for &u in &units {
                    logs[u as usize] = local[gi][(u as u64 % pe) as usize];
                }
                components.push(Component { order: ord, logs });
            }
        }
        let exponent = components.iter().fold(1u64, |acc, c| lcm(acc, c.order));
        let mut group = CharacterGroup {
            modulus: n,
            exponent,
            components,
            units,
            sorted: Vec::new(),
        };
        let mut all: Vec<Vec<u32>> = vec![Vec::new()];
        for c in &group.components {
            let mut next = Vec::with_capacity(all.len() * c.order as usize);
            for v in &all {
                for k in 0..c.order {
                    let mut w = v.clone();
                    w.push(k as u32);
                    next.push(w);
                }
            }
            all = next;
        }
        all.sort_by(|a, b| group.compare(a, b));
        group.sorted = all;
        Ok(group)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    fn angle(&self, coeffs: &[u32], m: usize) -> u64 {
        let e = self.exponent;
        self.components
            .iter()
            .zip(coeffs)
            .map(|(c, &k)| (k as u64 * c.logs[m] as u64 % c.order) * (e / c.order))
            .sum::<u64>()
            % e
    }

    fn compare(&self, a: &[u32], b: &[u32]) -> Ordering {
        for &u in &self.units {
            let o = self.angle(a, u as usize).cmp(&self.angle(b, u as usize));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }

    pub fn character(&self, index: usize) -> Result<DirichletCharacter> {
        let coeffs = self.sorted.get(index).ok_or(Error::IndexOutOfRange {
            modulus: self.modulus,
            index,
        })?;
        let n = self.modulus as usize;
        let mut table = vec![None; n];
        for &u in &self.units {
            table[u as usize] = Some(self.angle(coeffs, u as usize) as u32);
        }
        let mut chi = DirichletCharacter {
            modulus: self.modulus,
            exponent: self.exponent,
            index,
            table,
            kappa: 0,
            primitive: true,
        };
        let minus_one = chi.value(-1);
        chi.kappa = if minus_one.re < 0.0 { 1 } else { 0 };
        chi.primitive = factor(self.modulus)
            .iter()
            .all(|&(p, _)| !chi.trivial_on_kernel(self.modulus / p));
        Ok(chi)
    }

    pub fn iter(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.len()).map(move |j| self.character(j).expect("index in range"))
    }
}

/// All `phi(N)` characters modulo `N` in lexicographic order.
pub fn enumerate_characters(modulus: u64) -> Result<Vec<DirichletCharacter>> {
    let g = CharacterGroup::new(modulus)?;
    Ok(g.iter().collect())
}

/// Parse a selector of the form `N.j`.
pub fn character_from_label(label: &str) -> Result<DirichletCharacter> {
    let (n, j) = label
        .split_once('.')
        .ok_or_else(|| Error::Parse(format!("character selector `{label}` is not N.j")))?;
    let n: u64 = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad modulus in `{label}`")))?;
    let j: usize = j
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad index in `{label}`")))?;
    CharacterGroup::new(n)?.character(j)
}

/// The real primitive character modulo 4.
pub fn chi_minus_4() -> DirichletCharacter {
    CharacterGroup::new(4)
        .and_then(|g| g.character(1))
        .expect("modulus 4 has two characters")
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub(crate) fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let fs: Vec<u64> = factor(p - 1).into_iter().map(|(q, _)| q).collect();
    let g = (2..p)
        .find(|&g| fs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .unwrap_or(1);
    if e == 1 {
        return g;
    }
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}
