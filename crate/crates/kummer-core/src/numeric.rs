//! Numeric backends: exact rationals and correctly-rounded big floats.
//!
//! Every computation runs inside a [`NumericContext`], which fixes the mode
//! (exact or float), the working precision, and the comparison tolerance ε.
//! In exact mode ε is identically zero and the transcendental operations
//! (`ln`, `exp`, `sqrt`, non-integer powers) are refused; in float mode all
//! operations are correctly rounded at the context precision, which keeps
//! every run bit-for-bit reproducible.
//!
//! [`Value`] is a tagged number from one of the two backends. Modes never
//! mix: combining an exact value with a float value is a reported error, not
//! a silent promotion.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const ROUND: RoundingMode = RoundingMode::ToEven;

/// Largest |exponent| accepted by integer powers (both modes).
pub const MAX_POW_EXPONENT: u64 = 1 << 24;

/// Numeric mode selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A number from one of the two backends.
#[derive(Debug, Clone)]
pub enum Value {
    Exact(BigRational),
    Float(BigFloat),
}

impl Value {
    pub fn mode(&self) -> Mode {
        match self {
            Value::Exact(_) => Mode::Exact,
            Value::Float(_) => Mode::Float,
        }
    }

    /// Deterministic textual rendering: `p/q` (or a plain integer) in exact
    /// mode, scientific notation in float mode.
    pub fn render(&self) -> String {
        match self {
            Value::Exact(r) => r.to_string(),
            Value::Float(f) => f.to_string(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    /// Best-effort conversion to a hardware double (diagnostics only).
    pub fn to_f64_lossy(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(f) => {
                // Round-trip through the deterministic decimal rendering.
                f.to_string().parse::<f64>().unwrap_or(f64::NAN)
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Shared evaluation context: mode, precision, tolerance, and caches.
pub struct NumericContext {
    mode: Mode,
    digits: u32,
    prec: usize,
    epsilon: Option<BigFloat>,
    epsilon_text: String,
    log_space: bool,
    consts: RefCell<Consts>,
    fact_exact: RefCell<(u64, BigInt)>,
    fact_float: RefCell<(u64, BigFloat)>,
    ln_fact: RefCell<(u64, BigFloat)>,
}

impl fmt::Debug for NumericContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericContext")
            .field("mode", &self.mode)
            .field("digits", &self.digits)
            .field("prec_bits", &self.prec)
            .field("epsilon", &self.epsilon_text)
            .field("log_space", &self.log_space)
            .finish()
    }
}

impl Clone for NumericContext {
    fn clone(&self) -> Self {
        // Fresh constant caches: `Consts` is not shareable across threads,
        // and recomputing memos is cheap relative to a corpus row.
        NumericContext {
            mode: self.mode,
            digits: self.digits,
            prec: self.prec,
            epsilon: self.epsilon.clone(),
            epsilon_text: self.epsilon_text.clone(),
            log_space: self.log_space,
            consts: RefCell::new(Consts::new().expect("constant cache")),
            fact_exact: RefCell::new((1, BigInt::one())),
            fact_float: RefCell::new((1, BigFloat::from_u64(1, self.prec))),
            ln_fact: RefCell::new((1, BigFloat::from_u64(0, self.prec))),
        }
    }
}

fn bits_for_digits(digits: u32) -> usize {
    // digits·log2(10), plus 64 guard bits, rounded up to a whole word.
    let raw = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
    raw.div_ceil(64) * 64
}

impl NumericContext {
    /// Exact-rational context: ε = 0, transcendentals refused.
    pub fn exact() -> Self {
        let prec = 128;
        NumericContext {
            mode: Mode::Exact,
            digits: 0,
            prec,
            epsilon: None,
            epsilon_text: "0".to_string(),
            log_space: false,
            consts: RefCell::new(Consts::new().expect("constant cache")),
            fact_exact: RefCell::new((1, BigInt::one())),
            fact_float: RefCell::new((1, BigFloat::from_u64(1, prec))),
            ln_fact: RefCell::new((1, BigFloat::from_u64(0, prec))),
        }
    }

    /// Float context with the given decimal precision and tolerance
    /// (`epsilon` as decimal text, e.g. `"1e-30"`).
    pub fn float(digits: u32, epsilon: &str) -> Result<Self> {
        if digits == 0 || digits > 10_000 {
            return Err(Error::Config(format!(
                "digits must be between 1 and 10000, got {digits}"
            )));
        }
        let prec = bits_for_digits(digits);
        let mut consts = Consts::new().expect("constant cache");
        let eps = BigFloat::parse(epsilon, Radix::Dec, prec, ROUND, &mut consts);
        if eps.is_nan() || eps.is_negative() {
            return Err(Error::Config(format!(
                "epsilon must be a nonnegative decimal number, got `{epsilon}`"
            )));
        }
        Ok(NumericContext {
            mode: Mode::Float,
            digits,
            prec,
            epsilon: Some(eps),
            epsilon_text: epsilon.to_string(),
            log_space: false,
            consts: RefCell::new(consts),
            fact_exact: RefCell::new((1, BigInt::one())),
            fact_float: RefCell::new((1, BigFloat::from_u64(1, prec))),
            ln_fact: RefCell::new((1, BigFloat::from_u64(0, prec))),
        })
    }

    /// Float context with the standard defaults: 50 digits, ε = 1e-30.
    pub fn float_default() -> Self {
        NumericContext::float(50, "1e-30").expect("default float context")
    }

    pub fn with_log_space(mut self, on: bool) -> Self {
        self.log_space = on;
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn precision_bits(&self) -> usize {
        self.prec
    }

    pub fn log_space(&self) -> bool {
        self.log_space
    }

    pub fn epsilon_text(&self) -> &str {
        &self.epsilon_text
    }

    pub fn epsilon_value(&self) -> Value {
        match self.mode {
            Mode::Exact => Value::Exact(BigRational::zero()),
            Mode::Float => Value::Float(self.epsilon.clone().expect("float epsilon")),
        }
    }

    // ---- constructors ----------------------------------------------------

    pub fn from_u64(&self, v: u64) -> Value {
        match self.mode {
            Mode::Exact => Value::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Float => Value::Float(BigFloat::from_u64(v, self.prec)),
        }
    }

    pub fn from_i64(&self, v: i64) -> Value {
        match self.mode {
            Mode::Exact => Value::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Float => Value::Float(BigFloat::from_i64(v, self.prec)),
        }
    }

    pub fn zero(&self) -> Value {
        self.from_u64(0)
    }

    pub fn one(&self) -> Value {
        self.from_u64(1)
    }

    /// Converts an exact rational into this context's representation.
    pub fn from_rational(&self, r: &BigRational) -> Value {
        match self.mode {
            Mode::Exact => Value::Exact(r.clone()),
            Mode::Float => {
                let numer = bigint_to_float(r.numer(), self.prec);
                let denom = bigint_to_float(r.denom(), self.prec);
                Value::Float(numer.div(&denom, self.prec, ROUND))
            }
        }
    }

    /// Parses decimal text (`"2.5"`, `"1e-30"`, or an exact quotient
    /// `"3/7"`) into a value in this context.
    pub fn parse_number(&self, text: &str) -> Result<Value> {
        let rational = parse_rational_text(text);
        match self.mode {
            Mode::Exact => rational.map(Value::Exact).ok_or_else(|| {
                Error::Config(format!("`{text}` is not a decimal or p/q rational"))
            }),
            Mode::Float => {
                if let Some(r) = rational {
                    return Ok(self.from_rational(&r));
                }
                let mut consts = self.consts.borrow_mut();
                let v = BigFloat::parse(text, Radix::Dec, self.prec, ROUND, &mut consts);
                if v.is_nan() {
                    return Err(Error::Config(format!("`{text}` is not a number")));
                }
                Ok(Value::Float(v))
            }
        }
    }

    /// π at the context precision (float mode only).
    pub fn pi(&self) -> Result<Value> {
        match self.mode {
            Mode::Exact => Err(Error::ExactTranscendental { op: "pi" }),
            Mode::Float => {
                let mut consts = self.consts.borrow_mut();
                Ok(Value::Float(consts.pi(self.prec, ROUND)))
            }
        }
    }

    // ---- arithmetic ------------------------------------------------------

    fn pair<'v>(&self, a: &'v Value, b: &'v Value) -> Result<(&'v Value, &'v Value)> {
        if a.mode() != b.mode() {
            return Err(Error::ModeMismatch(
                "operands come from different numeric modes",
            ));
        }
        if a.mode() != self.mode {
            return Err(Error::ModeMismatch(
                "operand mode does not match the context mode",
            ));
        }
        Ok((a, b))
    }

    fn check_float(&self, v: BigFloat, op: &str) -> Result<Value> {
        if v.is_nan() {
            return Err(Error::Numeric(format!("{op} produced NaN")));
        }
        if v.is_inf() {
            return Err(Error::Numeric(format!(
                "{op} overflowed the float exponent range"
            )));
        }
        Ok(Value::Float(v))
    }

    pub fn add(&self, a: &Value, b: &Value) -> Result<Value> {
        match self.pair(a, b)? {
            (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x + y)),
            (Value::Float(x), Value::Float(y)) => {
                self.check_float(x.add(y, self.prec, ROUND), "addition")
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, a: &Value, b: &Value) -> Result<Value> {
        match self.pair(a, b)? {
            (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x - y)),
            (Value::Float(x), Value::Float(y)) => {
                self.check_float(x.sub(y, self.prec, ROUND), "subtraction")
            }
            _ => unreachable!(),
        }
    }

    pub fn mul(&self, a: &Value, b: &Value) -> Result<Value> {
        match self.pair(a, b)? {
            (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x * y)),
            (Value::Float(x), Value::Float(y)) => {
                self.check_float(x.mul(y, self.prec, ROUND), "multiplication")
            }
            _ => unreachable!(),
        }
    }

    /// Division; `n` is the sequence index reported on division by zero.
    pub fn div_at(&self, a: &Value, b: &Value, n: u64) -> Result<Value> {
        if self.is_zero(b) {
            return Err(Error::DivisionByZero { n });
        }
        match self.pair(a, b)? {
            (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x / y)),
            (Value::Float(x), Value::Float(y)) => {
                self.check_float(x.div(y, self.prec, ROUND), "division")
            }
            _ => unreachable!(),
        }
    }

    pub fn div(&self, a: &Value, b: &Value) -> Result<Value> {
        self.div_at(a, b, 0)
    }

    pub fn neg(&self, a: &Value) -> Result<Value> {
        self.sub(&self.zero(), a)
    }

    pub fn abs(&self, a: &Value) -> Result<Value> {
        if self.cmp(a, &self.zero())? == Ordering::Less {
            self.neg(a)
        } else {
            Ok(a.clone())
        }
    }

    /// Integer power with a magnitude cap of 2^24 on the exponent.
    pub fn pow_int(&self, base: &Value, exponent: &BigInt) -> Result<Value> {
        if exponent.magnitude().to_u64().map_or(true, |m| m > MAX_POW_EXPONENT) {
            return Err(Error::ExponentTooLarge {
                exponent: exponent.to_string(),
                limit: MAX_POW_EXPONENT.to_string(),
            });
        }
        let e = exponent.to_i64().expect("capped exponent fits i64");
        match base {
            Value::Exact(r) => {
                if self.mode != Mode::Exact {
                    return Err(Error::ModeMismatch("exact base in float context"));
                }
                if r.is_zero() && e <= 0 {
                    return Err(Error::DivisionByZero { n: 0 });
                }
                Ok(Value::Exact(r.pow(e as i32)))
            }
            Value::Float(f) => {
                if self.mode != Mode::Float {
                    return Err(Error::ModeMismatch("float base in exact context"));
                }
                let mag = f.powi(e.unsigned_abs() as usize, self.prec, ROUND);
                if e >= 0 {
                    self.check_float(mag, "integer power")
                } else {
                    if mag.is_zero() {
                        return Err(Error::DivisionByZero { n: 0 });
                    }
                    let one = BigFloat::from_u64(1, self.prec);
                    self.check_float(one.div(&mag, self.prec, ROUND), "integer power")
                }
            }
        }
    }

    /// General power. Exact mode accepts only integer-valued exponents.
    pub fn pow(&self, base: &Value, exponent: &Value) -> Result<Value> {
        match (base, exponent) {
            (Value::Exact(_), Value::Exact(e)) => {
                if e.is_integer() {
                    self.pow_int(base, e.numer())
                } else {
                    Err(Error::ExactTranscendental {
                        op: "^ with a non-integer exponent",
                    })
                }
            }
            (Value::Float(b), Value::Float(e)) => {
                let mut consts = self.consts.borrow_mut();
                let v = b.pow(e, self.prec, ROUND, &mut consts);
                drop(consts);
                self.check_float(v, "power")
            }
            _ => Err(Error::ModeMismatch("power operands from different modes")),
        }
    }

    pub fn ln(&self, a: &Value) -> Result<Value> {
        match a {
            Value::Exact(_) => Err(Error::ExactTranscendental { op: "ln" }),
            Value::Float(f) => {
                let mut consts = self.consts.borrow_mut();
                let v = f.ln(self.prec, ROUND, &mut consts);
                drop(consts);
                self.check_float(v, "ln")
            }
        }
    }

    pub fn exp(&self, a: &Value) -> Result<Value> {
        match a {
            Value::Exact(_) => Err(Error::ExactTranscendental { op: "exp" }),
            Value::Float(f) => {
                let mut consts = self.consts.borrow_mut();
                let v = f.exp(self.prec, ROUND, &mut consts);
                drop(consts);
                self.check_float(v, "exp")
            }
        }
    }

    pub fn sqrt(&self, a: &Value) -> Result<Value> {
        match a {
            Value::Exact(_) => Err(Error::ExactTranscendental { op: "sqrt" }),
            Value::Float(f) => self.check_float(f.sqrt(self.prec, ROUND), "sqrt"),
        }
    }

    /// n! in the context representation, memoized for ascending access.
    pub fn factorial(&self, n: u64) -> Result<Value> {
        if n > 1_000_000 {
            return Err(Error::IndexOverflow(format!(
                "factorial({n}) is beyond the supported range"
            )));
        }
        match self.mode {
            Mode::Exact => {
                let mut cache = self.fact_exact.borrow_mut();
                if n < cache.0 {
                    let mut acc = BigInt::one();
                    for i in 2..=n {
                        acc *= i;
                    }
                    return Ok(Value::Exact(BigRational::from_integer(acc)));
                }
                while cache.0 < n {
                    cache.0 += 1;
                    let i = cache.0;
                    cache.1 *= i;
                }
                Ok(Value::Exact(BigRational::from_integer(cache.1.clone())))
            }
            Mode::Float => {
                let mut cache = self.fact_float.borrow_mut();
                if n < cache.0 {
                    let mut acc = BigFloat::from_u64(1, self.prec);
                    for i in 2..=n {
                        let f = BigFloat::from_u64(i, self.prec);
                        acc = acc.mul(&f, self.prec, ROUND);
                    }
                    return self.check_float(acc, "factorial");
                }
                while cache.0 < n {
                    cache.0 += 1;
                    let f = BigFloat::from_u64(cache.0, self.prec);
                    cache.1 = cache.1.mul(&f, self.prec, ROUND);
                }
                self.check_float(cache.1.clone(), "factorial")
            }
        }
    }

    /// ln(n!) = Σ_{i≤n} ln i, memoized (float mode only).
    pub fn ln_factorial(&self, n: u64) -> Result<Value> {
        if self.mode != Mode::Float {
            return Err(Error::ExactTranscendental { op: "ln(n!)" });
        }
        let mut cache = self.ln_fact.borrow_mut();
        if n < cache.0 {
            let mut acc = BigFloat::from_u64(0, self.prec);
            let mut consts = self.consts.borrow_mut();
            for i in 2..=n {
                let l = BigFloat::from_u64(i, self.prec).ln(self.prec, ROUND, &mut consts);
                acc = acc.add(&l, self.prec, ROUND);
            }
            drop(consts);
            return self.check_float(acc, "ln factorial");
        }
        let mut consts = self.consts.borrow_mut();
        while cache.0 < n {
            cache.0 += 1;
            let l =
                BigFloat::from_u64(cache.0, self.prec).ln(self.prec, ROUND, &mut consts);
            cache.1 = cache.1.add(&l, self.prec, ROUND);
        }
        drop(consts);
        self.check_float(cache.1.clone(), "ln factorial")
    }

    // ---- comparisons -----------------------------------------------------

    pub fn cmp(&self, a: &Value, b: &Value) -> Result<Ordering> {
        match self.pair(a, b)? {
            (Value::Exact(x), Value::Exact(y)) => Ok(x.cmp(y)),
            (Value::Float(x), Value::Float(y)) => match x.cmp(y) {
                Some(v) => Ok(v.cmp(&0)),
                None => Err(Error::Numeric("comparison against NaN".into())),
            },
            _ => unreachable!(),
        }
    }

    pub fn is_zero(&self, a: &Value) -> bool {
        match a {
            Value::Exact(r) => r.is_zero(),
            Value::Float(f) => f.is_zero(),
        }
    }

    pub fn is_positive(&self, a: &Value) -> bool {
        match a {
            Value::Exact(r) => r.is_positive(),
            Value::Float(f) => f.is_positive() && !f.is_zero() && !f.is_nan(),
        }
    }

    /// Tolerant `a ≥ b`: passes when a ≥ b − ε (ties always pass).
    pub fn ge_tol(&self, a: &Value, b: &Value) -> Result<bool> {
        if self.cmp(a, b)? != Ordering::Less {
            return Ok(true);
        }
        match self.mode {
            Mode::Exact => Ok(false),
            Mode::Float => {
                let eps = self.epsilon_value();
                let diff = self.sub(b, a)?;
                Ok(self.cmp(&diff, &eps)? != Ordering::Greater)
            }
        }
    }

    /// Tolerant `a ≤ b`: passes when a ≤ b + ε (ties always pass).
    pub fn le_tol(&self, a: &Value, b: &Value) -> Result<bool> {
        self.ge_tol(b, a)
    }

    /// Strict `a > b`: literal in exact mode, `a − b > ε` in float mode.
    pub fn gt_strict(&self, a: &Value, b: &Value) -> Result<bool> {
        match self.mode {
            Mode::Exact => Ok(self.cmp(a, b)? == Ordering::Greater),
            Mode::Float => {
                let eps = self.epsilon_value();
                let diff = self.sub(a, b)?;
                Ok(self.cmp(&diff, &eps)? == Ordering::Greater)
            }
        }
    }

    /// Strict `a < b`: literal in exact mode, `b − a > ε` in float mode.
    pub fn lt_strict(&self, a: &Value, b: &Value) -> Result<bool> {
        self.gt_strict(b, a)
    }

    pub fn min(&self, a: &Value, b: &Value) -> Result<Value> {
        Ok(if self.cmp(a, b)? == Ordering::Greater {
            b.clone()
        } else {
            a.clone()
        })
    }

    pub fn max(&self, a: &Value, b: &Value) -> Result<Value> {
        Ok(if self.cmp(a, b)? == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        })
    }
}

fn bigint_to_float(v: &BigInt, prec: usize) -> BigFloat {
    // Assemble from 64-bit limbs: v = Σ limb_i · 2^(64 i).
    let (sign, digits) = v.to_u64_digits();
    let mut acc = BigFloat::from_u64(0, prec);
    let shift = BigFloat::from_u64(1 << 32, prec);
    let shift64 = shift.mul(&shift, prec, ROUND);
    for limb in digits.iter().rev() {
        acc = acc.mul(&shift64, prec, ROUND);
        let l = BigFloat::from_u64(*limb, prec);
        acc = acc.add(&l, prec, ROUND);
    }
    if sign == Sign::Minus {
        acc = acc.neg();
    }
    acc
}

/// Parses `"p/q"`, decimal (`"2.5"`), or decimal-with-exponent (`"1e-30"`)
/// text into an exact rational, if the text denotes one.
pub fn parse_rational_text(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().ok()?
    };
    let scale = frac_part.len() as i64 - exponent as i64;
    let ten = BigInt::from(10u32);
    let rational = if scale >= 0 {
        BigRational::new(numer, ten.pow(scale as u32))
    } else {
        BigRational::from_integer(numer * ten.pow((-scale) as u32))
    };
    Some(if sign < 0 { -rational } else { rational })
}
