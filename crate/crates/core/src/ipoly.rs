//! Integer polynomials: resultants, discriminants, content, text formats.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Polynomial over the integers.
pub type IPoly = Poly<BigInt>;
/// Polynomial over the rationals.
pub type RatPoly = Poly<BigRational>;

impl Scalar for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        n.clone()
    }
    fn try_inv(&self) -> Result<Self> {
        if One::is_one(&self.abs()) {
            Ok(self.clone())
        } else {
            Err(Error::NonInvertible)
        }
    }
}

/// Build from coefficients listed leading first: `[f_d, ..., f_0]`.
pub fn from_desc<I: Into<BigInt> + Clone>(coeffs: &[I]) -> IPoly {
    Poly::new(coeffs.iter().rev().map(|c| c.clone().into()).collect())
}

/// Build from coefficients listed constant first.
pub fn from_asc<I: Into<BigInt> + Clone>(coeffs: &[I]) -> IPoly {
    Poly::new(coeffs.iter().map(|c| c.clone().into()).collect())
}

pub fn to_rat(f: &IPoly) -> RatPoly {
    f.map(|c| BigRational::from_integer(c.clone()))
}

/// Content with the sign of the leading coefficient (so that the primitive
/// part has positive leading coefficient).
pub fn content(f: &IPoly) -> BigInt {
    let g = f.coeffs().iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    match f.leading() {
        Some(lc) if lc.is_negative() => -g,
        _ => g,
    }
}

pub fn primitive_part(f: &IPoly) -> IPoly {
    if f.is_zero() {
        return f.clone();
    }
    let c = content(f);
    f.map(|a| a / &c)
}

/// Clear denominators of a rational polynomial and return its primitive part.
pub fn primitive_from_rat(f: &RatPoly) -> IPoly {
    let l = f
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ip = f.map(|c| (c * BigRational::from_integer(l.clone())).to_integer());
    primitive_part(&ip)
}

/// Exact division in `Z[x]`; errors if the quotient is not integral.
pub fn div_exact_int(f: &IPoly, d: &IPoly) -> Result<IPoly> {
    let (q, r) = to_rat(f).div_rem(&to_rat(d))?;
    if !r.is_zero() || q.coeffs().iter().any(|c| !c.is_integer()) {
        return Err(Error::InvalidInput("inexact integer division".into()));
    }
    Ok(q.map(|c| c.to_integer()))
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of `g` and `h`, rows of `g` first.
pub fn sylvester(g: &IPoly, h: &IPoly) -> Vec<Vec<BigInt>> {
    let m = g.degree().unwrap();
    let n = h.degree().unwrap();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in h.coeffs().iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant as the Sylvester determinant with `g`'s rows first.
///
/// Equals `lc(g)^deg(h) * prod h(alpha)` over the roots `alpha` of `g`.
pub fn resultant(g: &IPoly, h: &IPoly) -> Result<BigInt> {
    let (Some(m), Some(n)) = (g.degree(), h.degree()) else {
        return Err(Error::ZeroPolynomial);
    };
    if m == 0 {
        return Ok(g.coeffs()[0].pow(n as u32));
    }
    if n == 0 {
        return Ok(h.coeffs()[0].pow(m as u32));
    }
    Ok(bareiss_det(sylvester(g, h)))
}

/// Discriminant `(-1)^{d(d-1)/2} Res(f, f') / lc(f)`; requires `deg f >= 2`.
pub fn discriminant(f: &IPoly) -> Result<BigInt> {
    let d = f
        .degree()
        .filter(|&d| d >= 2)
        .ok_or(Error::DegreeOutOfRange(f.degree().unwrap_or(0)))?;
    let r = resultant(f, &f.derivative())?;
    let lc = f.leading().unwrap();
    let q = r / lc;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

pub fn eval_int(f: &IPoly, x: &BigInt) -> BigInt {
    f.eval(x)
}

pub fn eval_rat(f: &IPoly, x: &BigRational) -> BigRational {
    to_rat(f).eval(x)
}

/// Homogenized value `b^n f(a/b)` for a formal degree `n >= deg f`.
pub fn homogeneous_eval(f: &IPoly, n: usize, a: &BigInt, b: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    // sum f_i a^i b^(n-i), Horner in a with running powers of b
    let mut terms: Vec<BigInt> = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        terms.push(bpow.clone());
        bpow *= b;
    }
    let mut apow = BigInt::one();
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc += c * &apow * &terms[n - i];
        }
        apow *= a;
    }
    acc
}

/// Format as a coefficient list `f_d ... f_0`.
pub fn to_coeff_list(f: &IPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.coeffs()
        .iter()
        .rev()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Format as a human-readable expression like `x^6 - 3*x + 2`.
pub fn to_expr(f: &IPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in f.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        if i == 0 {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag}*{mono}"));
        }
    }
    out
}

/// Parse either a whitespace-separated coefficient list (leading first) or an
/// expression in `x` using `+ - * ^`.
pub fn parse_ipoly(s: &str) -> Result<IPoly> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    if t.contains('x') {
        parse_expr(t)
    } else {
        parse_coeff_list(t)
    }
}

pub fn parse_coeff_list(s: &str) -> Result<IPoly> {
    let mut coeffs = Vec::new();
    let mut pos = 0;
    for tok in s.split_whitespace() {
        let at = s[pos..].find(tok).map(|i| i + pos).unwrap_or(pos);
        pos = at + tok.len();
        let tok = tok.trim_matches(|c| c == ',' || c == '[' || c == ']');
        if tok.is_empty() {
            continue;
        }
        let v: BigInt = tok.parse().map_err(|_| Error::Parse {
            pos: at,
            msg: format!("invalid integer {tok:?}"),
        })?;
        coeffs.push(v);
    }
    if coeffs.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "no coefficients".into(),
        });
    }
    Ok(from_desc(&coeffs))
}

fn parse_expr(s: &str) -> Result<IPoly> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut acc: Vec<BigInt> = Vec::new();
    let err = |pos: usize, msg: &str| Error::Parse {
        pos,
        msg: msg.to_string(),
    };
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    let read_int = |i: &mut usize| -> Option<BigInt> {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        (start < *i).then(|| s[start..*i].parse().unwrap())
    };
    let mut first = true;
    loop {
        skip_ws(&mut i);
        if i >= bytes.len() {
            if first {
                return Err(err(i, "empty expression"));
            }
            break;
        }
        let mut sign = BigInt::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
            skip_ws(&mut i);
        } else if !first {
            return Err(err(i, "expected '+' or '-'"));
        }
        first = false;
        let coef = read_int(&mut i);
        skip_ws(&mut i);
        let mut exp = 0usize;
        let has_star = i < bytes.len() && bytes[i] == b'*';
        if has_star {
            if coef.is_none() {
                return Err(err(i, "unexpected '*'"));
            }
            i += 1;
            skip_ws(&mut i);
        }
        if i < bytes.len() && bytes[i] == b'x' {
            i += 1;
            exp = 1;
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                skip_ws(&mut i);
                let e = read_int(&mut i).ok_or_else(|| err(i, "expected exponent"))?;
                exp = e
                    .try_into()
                    .ok()
                    .filter(|&e: &usize| e <= 64)
                    .ok_or_else(|| err(i, "exponent too large"))?;
            }
        } else if has_star {
            return Err(err(i, "expected 'x' after '*'"));
        } else if coef.is_none() {
            return Err(err(i, "expected a term"));
        }
        let c = coef.unwrap_or_else(BigInt::one) * sign;
        if acc.len() <= exp {
            acc.resize(exp + 1, BigInt::zero());
        }
        acc[exp] += c;
    }
    Ok(Poly::new(acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_examples() {
        let g = from_desc(&[1, 1, -1]);
        let h = from_desc(&[1, 1, 1, 1, 2]);
        assert_eq!(resultant(&g, &h).unwrap(), BigInt::from(19));
        assert_eq!(
            resultant(&from_desc(&[1, 0]), &from_desc(&[1, -1])).unwrap(),
            BigInt::from(-1)
        );
        let f = from_desc(&[3, 0, 1, -7]);
        assert_eq!(resultant(&f, &f).unwrap(), BigInt::zero());
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(
            discriminant(&from_desc(&[1, 0, -1])).unwrap(),
            BigInt::from(4)
        );
        assert_eq!(
            discriminant(&from_desc(&[1, -2, 1])).unwrap(),
            BigInt::zero()
        );
        assert_eq!(
            discriminant(&from_desc(&[1, 0, 0, 0, 0, 1])).unwrap(),
            BigInt::from(3125)
        );
        // b^2 - 4ac for a general quadratic
        assert_eq!(
            discriminant(&from_desc(&[3, 5, -2])).unwrap(),
            BigInt::from(49)
        );
    }

    #[test]
    fn parse_and_format_roundtrip() {
        let f = parse_ipoly("x^6 - 3*x + 2").unwrap();
        assert_eq!(to_coeff_list(&f), "1 0 0 0 0 -3 2");
        assert_eq!(to_expr(&f), "x^6 - 3*x + 2");
        let g = parse_ipoly("0 -3 1 -2 0 -2 2 3").unwrap();
        assert_eq!(g.degree(), Some(6));
        assert_eq!(parse_ipoly(&to_expr(&g)).unwrap(), g);
        assert_eq!(parse_ipoly(&to_coeff_list(&g)).unwrap(), g);
        assert_eq!(to_expr(&parse_ipoly("-x^5 + x").unwrap()), "-x^5 + x");
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_ipoly("x^2 + * 3") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_ipoly("1 2 z"),
            Err(Error::Parse { pos: 4, .. })
        ));
    }

    #[test]
    fn homogeneous_matches_rational_eval() {
        let f = from_desc(&[1, 0, -3, 2, 0, 1]);
        let v = homogeneous_eval(&f, 6, &BigInt::from(3), &BigInt::from(2));
        let r = eval_rat(&f, &BigRational::new(3.into(), 2.into()));
        assert_eq!(
            BigRational::from_integer(v),
            r * BigRational::from_integer(64.into())
        );
    }
}
