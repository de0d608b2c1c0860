//! Configurable tiny IEEE-style floating point formats and their exhaustive
//! arithmetic tables. The value set `R` of a format is the set of all bit
//! patterns, canonically the integers `0..2^(1+e+m)`; arithmetic is computed
//! by exact rational arithmetic on decoded operands followed by
//! round-to-nearest-even, so tables are bit-reproducible by construction.

use crate::finset::{product, FinFunction, FinSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FloatError {
    #[error("format too large: {0} total bits (limit 8)")]
    FormatTooLarge(u32),
    #[error("bad format string: {0}")]
    BadFormat(String),
    #[error("unknown activation: {0}")]
    UnknownActivation(String),
    #[error("custom activation table is not total over the format")]
    PartialActivationTable,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialsMode {
    /// Max-exponent patterns are infinities and NaNs; NaN results
    /// canonicalize to a single designated pattern.
    IeeeNan,
    /// Max-exponent patterns are ordinary finite values; overflow clamps
    /// to the largest finite magnitude.
    Saturating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloatFormat {
    pub exp_bits: u32,
    pub man_bits: u32,
    pub bias: i32,
    pub mode: SpecialsMode,
}

impl FloatFormat {
    pub fn new(exp_bits: u32, man_bits: u32, mode: SpecialsMode) -> Result<Self, FloatError> {
        if exp_bits < 1 {
            return Err(FloatError::BadFormat("need at least one exponent bit".into()));
        }
        let total = 1 + exp_bits + man_bits;
        if total > 8 {
            return Err(FloatError::FormatTooLarge(total));
        }
        let bias = (1i32 << (exp_bits - 1)) - 1;
        Ok(FloatFormat { exp_bits, man_bits, bias, mode })
    }

    /// Parses a format string `s1e<E>m<M>[:sat|:nan]`.
    pub fn parse(text: &str) -> Result<Self, FloatError> {
        let (body, mode) = match text.split_once(':') {
            None => (text, SpecialsMode::IeeeNan),
            Some((b, "nan")) => (b, SpecialsMode::IeeeNan),
            Some((b, "sat")) => (b, SpecialsMode::Saturating),
            Some((_, other)) => {
                return Err(FloatError::BadFormat(format!("unknown mode suffix: {other}")))
            }
        };
        let rest = body
            .strip_prefix("s1e")
            .ok_or_else(|| FloatError::BadFormat(text.to_string()))?;
        let (e, m) = rest.split_once('m').ok_or_else(|| FloatError::BadFormat(text.to_string()))?;
        let exp_bits: u32 = e.parse().map_err(|_| FloatError::BadFormat(text.to_string()))?;
        let man_bits: u32 = m.parse().map_err(|_| FloatError::BadFormat(text.to_string()))?;
        FloatFormat::new(exp_bits, man_bits, mode)
    }

    /// Number of bit patterns, i.e. `|R|`.
    pub fn size(&self) -> usize {
        1usize << (1 + self.exp_bits + self.man_bits)
    }

    pub fn value_set(&self) -> FinSet {
        FinSet::new(self.size())
    }

    fn sign_of(&self, pattern: usize) -> bool {
        (pattern >> (self.exp_bits + self.man_bits)) & 1 == 1
    }

    fn exp_of(&self, pattern: usize) -> u32 {
        ((pattern >> self.man_bits) & ((1 << self.exp_bits) - 1)) as u32
    }

    fn man_of(&self, pattern: usize) -> u32 {
        (pattern & ((1 << self.man_bits) - 1)) as u32
    }

    fn max_exp(&self) -> u32 {
        (1 << self.exp_bits) - 1
    }

    /// Decodes a bit pattern into its exact value (or special).
    pub fn decode(&self, pattern: usize) -> Decoded {
        let negative = self.sign_of(pattern);
        let exp = self.exp_of(pattern);
        let man = self.man_of(pattern);
        if self.mode == SpecialsMode::IeeeNan && exp == self.max_exp() {
            if man == 0 {
                return Decoded::Inf { negative };
            }
            return Decoded::Nan;
        }
        let man_den = BigInt::one() << self.man_bits;
        let value = if exp == 0 {
            // subnormal: 2^(1-bias) * man / 2^m
            pow2(1 - self.bias) * BigRational::new(BigInt::from(man), man_den)
        } else {
            pow2(exp as i32 - self.bias)
                * (BigRational::one() + BigRational::new(BigInt::from(man), man_den))
        };
        let value = if negative { -value } else { value };
        Decoded::Finite { value, negative }
    }

    pub fn display_pattern(&self, pattern: usize) -> String {
        match self.decode(pattern) {
            Decoded::Nan => "nan".into(),
            Decoded::Inf { negative: true } => "-inf".into(),
            Decoded::Inf { negative: false } => "inf".into(),
            Decoded::Finite { value, negative } => {
                if value.is_zero() {
                    if negative { "-0".into() } else { "0".into() }
                } else {
                    format!("{value}")
                }
            }
        }
    }
}

impl fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s1e{}m{}", self.exp_bits, self.man_bits)?;
        if self.mode == SpecialsMode::Saturating {
            write!(f, ":sat")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Finite { value: BigRational, negative: bool },
    Inf { negative: bool },
    Nan,
}

fn pow2(e: i32) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as u32)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as u32)
    }
}

/// Exhaustive arithmetic tables for one format: binary `add` and `mul` over
/// the mixed-radix pair index (first operand is the slow digit).
#[derive(Clone, Debug)]
pub struct FloatTables {
    pub format: FloatFormat,
    add: FinFunction,
    mul: FinFunction,
    /// nonnegative finite values (pattern, value), ascending by value
    positives: Vec<(usize, BigRational)>,
    canonical_nan: Option<usize>,
}

/// Builds the full arithmetic tables of a format.
pub fn build_tables(format: FloatFormat) -> Result<FloatTables, FloatError> {
    let size = format.size();
    let mut positives: Vec<(usize, BigRational)> = Vec::new();
    let mut canonical_nan = None;
    for p in 0..size {
        match format.decode(p) {
            Decoded::Finite { value, negative } => {
                if !negative {
                    positives.push((p, value));
                }
            }
            Decoded::Nan => {
                if canonical_nan.is_none() || p < canonical_nan.unwrap() {
                    canonical_nan = Some(p);
                }
            }
            Decoded::Inf { .. } => {}
        }
    }
    positives.sort_by(|a, b| a.1.cmp(&b.1));
    let mut tables = FloatTables {
        format,
        add: FinFunction::identity(&FinSet::new(1)), // placeholders, filled below
        mul: FinFunction::identity(&FinSet::new(1)),
        positives,
        canonical_nan,
    };
    let pair = product(&[format.value_set(), format.value_set()]);
    let mut add_table = Vec::with_capacity(size * size);
    let mut mul_table = Vec::with_capacity(size * size);
    for a in 0..size {
        for b in 0..size {
            add_table.push(tables.add_values(a, b));
            mul_table.push(tables.mul_values(a, b));
        }
    }
    tables.add = FinFunction::new(pair.as_finset(), format.value_set(), add_table)
        .expect("add table total");
    tables.mul = FinFunction::new(pair.as_finset(), format.value_set(), mul_table)
        .expect("mul table total");
    Ok(tables)
}

impl FloatTables {
    pub fn add_fn(&self) -> &FinFunction {
        &self.add
    }

    pub fn mul_fn(&self) -> &FinFunction {
        &self.mul
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add.apply(a * self.format.size() + b)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul.apply(a * self.format.size() + b)
    }

    pub fn canonical_nan(&self) -> Option<usize> {
        self.canonical_nan
    }

    fn pos_zero(&self) -> usize {
        0
    }

    fn neg_zero(&self) -> usize {
        1 << (self.format.exp_bits + self.format.man_bits)
    }

    fn inf_pattern(&self, negative: bool) -> usize {
        let p = (self.format.max_exp() as usize) << self.format.man_bits;
        if negative { p | self.neg_zero() } else { p }
    }

    fn max_finite(&self) -> &(usize, BigRational) {
        self.positives.last().expect("a format has at least one finite value")
    }

    /// Round-to-nearest-even of a nonzero exact rational; `r` carries its
    /// own sign. Overflow yields infinity in ieee mode and clamps in
    /// saturating mode.
    fn round(&self, r: &BigRational) -> usize {
        debug_assert!(!r.is_zero());
        let negative = r.is_negative();
        let a = r.abs();
        let sign_bit = if negative { self.neg_zero() } else { 0 };
        let (max_pat, max_val) = self.max_finite();
        if a >= *max_val {
            // overflow boundary: halfway between max and the next value the
            // format would have if the exponent range continued
            let prev_val = self
                .positives
                .iter()
                .rev()
                .find(|(_, v)| v < max_val)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(BigRational::zero);
            let step = max_val - &prev_val;
            let boundary = max_val + step / BigRational::from_integer(BigInt::from(2));
            if a >= boundary {
                return match self.format.mode {
                    SpecialsMode::IeeeNan => self.inf_pattern(negative),
                    SpecialsMode::Saturating => max_pat | sign_bit,
                };
            }
            return max_pat | sign_bit;
        }
        // binary search the ascending value list for the neighbours of `a`
        let idx = self.positives.partition_point(|(_, v)| *v < a);
        // idx > 0 since a > 0 = smallest value; positives[idx] >= a exists
        let (hi_pat, hi_val) = &self.positives[idx];
        if *hi_val == a {
            return hi_pat | sign_bit;
        }
        let (lo_pat, lo_val) = &self.positives[idx - 1];
        let d_lo = &a - lo_val;
        let d_hi = hi_val - &a;
        let pick = if d_lo < d_hi {
            *lo_pat
        } else if d_hi < d_lo {
            *hi_pat
        } else if self.format.man_of(*lo_pat) % 2 == 0 {
            *lo_pat
        } else {
            *hi_pat
        };
        pick | sign_bit
    }

    fn add_values(&self, a: usize, b: usize) -> usize {
        let da = self.format.decode(a);
        let db = self.format.decode(b);
        match (da, db) {
            (Decoded::Nan, _) | (_, Decoded::Nan) => self.canonical_nan.expect("nan in table"),
            (Decoded::Inf { negative: na }, Decoded::Inf { negative: nb }) => {
                if na == nb {
                    self.inf_pattern(na)
                } else {
                    self.canonical_nan.expect("nan in table")
                }
            }
            (Decoded::Inf { negative }, Decoded::Finite { .. })
            | (Decoded::Finite { .. }, Decoded::Inf { negative }) => self.inf_pattern(negative),
            (
                Decoded::Finite { value: va, negative: na },
                Decoded::Finite { value: vb, negative: nb },
            ) => {
                let sum = &va + &vb;
                if sum.is_zero() {
                    if va.is_zero() && vb.is_zero() && na && nb {
                        self.neg_zero()
                    } else {
                        self.pos_zero()
                    }
                } else {
                    self.round(&sum)
                }
            }
        }
    }

    fn mul_values(&self, a: usize, b: usize) -> usize {
        let da = self.format.decode(a);
        let db = self.format.decode(b);
        match (da, db) {
            (Decoded::Nan, _) | (_, Decoded::Nan) => self.canonical_nan.expect("nan in table"),
            (Decoded::Inf { negative: na }, Decoded::Inf { negative: nb }) => {
                self.inf_pattern(na != nb)
            }
            (Decoded::Inf { negative: ni }, Decoded::Finite { value, negative: nf })
            | (Decoded::Finite { value, negative: nf }, Decoded::Inf { negative: ni }) => {
                if value.is_zero() {
                    self.canonical_nan.expect("nan in table")
                } else {
                    self.inf_pattern(ni != nf)
                }
            }
            (
                Decoded::Finite { value: va, negative: na },
                Decoded::Finite { value: vb, negative: nb },
            ) => {
                let prod = &va * &vb;
                if prod.is_zero() {
                    if na != nb {
                        self.neg_zero()
                    } else {
                        self.pos_zero()
                    }
                } else {
                    self.round(&prod)
                }
            }
        }
    }

    /// A named activation table over `R`.
    pub fn activation(&self, name: &str) -> Result<FinFunction, FloatError> {
        match name {
            "id" => Ok(FinFunction::identity(&self.format.value_set())),
            "relu" => {
                let size = self.format.size();
                let mut table = Vec::with_capacity(size);
                for p in 0..size {
                    let out = match self.format.decode(p) {
                        Decoded::Nan => self.canonical_nan.expect("nan in table"),
                        _ if self.format.sign_of(p) => self.pos_zero(),
                        _ => p,
                    };
                    table.push(out);
                }
                Ok(FinFunction::new(self.format.value_set(), self.format.value_set(), table)
                    .expect("relu total"))
            }
            other => Err(FloatError::UnknownActivation(other.to_string())),
        }
    }

    /// A custom activation from explicit `pattern -> pattern` pairs; the
    /// pairs must cover every pattern of the format exactly once.
    pub fn activation_from_pairs(&self, pairs: &[(usize, usize)]) -> Result<FinFunction, FloatError> {
        let size = self.format.size();
        let mut table = vec![None; size];
        for &(from, to) in pairs {
            if from >= size || to >= size || table[from].is_some() {
                return Err(FloatError::PartialActivationTable);
            }
            table[from] = Some(to);
        }
        let table: Option<Vec<usize>> = table.into_iter().collect();
        let table = table.ok_or(FloatError::PartialActivationTable)?;
        Ok(FinFunction::new(self.format.value_set(), self.format.value_set(), table)
            .expect("custom table total"))
    }

    /// Right-nested summation: `add_n(x) = add(x_1, add_{n-1}(x_2..x_n))`.
    /// This association order is the one canonical order used everywhere;
    /// floating point addition is not associative.
    pub fn add_n(&self, values: &[usize]) -> usize {
        match values {
            [] => self.pos_zero(),
            [x] => *x,
            [x, rest @ ..] => self.add(*x, self.add_n(rest)),
        }
    }
}

/// Direct numeric evaluation of a dense network: the independent oracle the
/// categorical inference path is checked against. `weights[l][j][i]`
/// multiplies input coordinate `i` into output coordinate `j` of layer `l`.
pub fn oracle_eval(
    tables: &FloatTables,
    widths: &[usize],
    acts: &[FinFunction],
    weights: &[Vec<Vec<usize>>],
    biases: &[Vec<usize>],
    input: &[usize],
) -> Result<Vec<usize>, FloatError> {
    let layers = acts.len();
    if widths.len() != layers + 1 || weights.len() != layers || biases.len() != layers {
        return Err(FloatError::ShapeMismatch("layer counts disagree".into()));
    }
    if input.len() != widths[0] {
        return Err(FloatError::ShapeMismatch("input width".into()));
    }
    let mut x = input.to_vec();
    for l in 0..layers {
        let (n, m) = (widths[l], widths[l + 1]);
        if weights[l].len() != m || biases[l].len() != m {
            return Err(FloatError::ShapeMismatch(format!("layer {} output width", l + 1)));
        }
        let mut next = Vec::with_capacity(m);
        for j in 0..m {
            if weights[l][j].len() != n {
                return Err(FloatError::ShapeMismatch(format!("layer {} input width", l + 1)));
            }
            let terms: Vec<usize> = (0..n).map(|i| tables.mul(weights[l][j][i], x[i])).collect();
            let summed = tables.add_n(&terms);
            next.push(acts[l].apply(tables.add(summed, biases[l][j])));
        }
        x = next;
    }
    Ok(x)
}
