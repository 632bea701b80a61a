//! Edge-perspective degree distributions `(λ, ρ)`.
//!
//! Two text forms are accepted. Polynomial strings such as `"x^2"` or
//! `"0.5x + 0.5x^2"` (a term `c·x^k` puts fraction `c` on degree `k + 1`; the
//! result is renormalized), and the tabular file form:
//!
//! ```text
//! # comment
//! L 3 1.0
//! R 6 1.0
//! ```
//!
//! Tabular coefficients must already sum to one within `1e-6`.

use std::fmt;

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    // lambda[i] = fraction of edges attached to degree-i variables; index 0 unused.
    lambda: Vec<f64>,
    rho: Vec<f64>,
}

impl DegreeDistribution {
    /// Builds a distribution from `(degree, fraction)` pairs, renormalizing each side.
    pub fn from_pairs(lambda: &[(usize, f64)], rho: &[(usize, f64)]) -> Result<Self> {
        let lambda = side_from_pairs("lambda", lambda)?;
        let rho = side_from_pairs("rho", rho)?;
        Self::from_vectors(normalized(lambda), normalized(rho))
    }

    /// Regular `(dv, dc)` ensemble.
    pub fn regular(dv: usize, dc: usize) -> Result<Self> {
        Self::from_pairs(&[(dv, 1.0)], &[(dc, 1.0)])
    }

    /// Parses a pair of polynomial strings, e.g. `("x^2", "x^5")`.
    pub fn from_polynomials(lambda: &str, rho: &str) -> Result<Self> {
        let l = parse_polynomial(lambda)?;
        let r = parse_polynomial(rho)?;
        Self::from_pairs(&l, &r)
    }

    /// Parses the DD file format. Besides `L`/`R` rows, `lambda <poly>` and
    /// `rho <poly>` lines are accepted so a file can carry the polynomial form.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lambda: Vec<(usize, f64)> = Vec::new();
        let mut rho: Vec<(usize, f64)> = Vec::new();
        let mut poly_lambda = None;
        let mut poly_rho = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(char::is_whitespace)
                .map(|(h, r)| (h, r.trim()))
                .unwrap_or((line, ""));
            match head {
                "L" | "R" => {
                    let mut fields = rest.split_whitespace();
                    let degree = fields
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("line {}: bad degree", lineno + 1)))?;
                    let coeff = fields
                        .next()
                        .map(parse_coefficient)
                        .transpose()?
                        .ok_or_else(|| {
                            Error::Parse(format!("line {}: missing coefficient", lineno + 1))
                        })?;
                    if fields.next().is_some() {
                        return Err(Error::Parse(format!("line {}: trailing fields", lineno + 1)));
                    }
                    if head == "L" {
                        lambda.push((degree, coeff));
                    } else {
                        rho.push((degree, coeff));
                    }
                }
                "lambda" | "lambda:" | "lambda=" => poly_lambda = Some(rest.trim_start_matches('=').to_string()),
                "rho" | "rho:" | "rho=" => poly_rho = Some(rest.trim_start_matches('=').to_string()),
                _ => return Err(Error::Parse(format!("line {}: unknown record '{head}'", lineno + 1))),
            }
        }
        if let Some(p) = poly_lambda {
            lambda.extend(parse_polynomial(&p)?);
        }
        if let Some(p) = poly_rho {
            rho.extend(parse_polynomial(&p)?);
        }
        let lambda = side_from_pairs("lambda", &lambda)?;
        let rho = side_from_pairs("rho", &rho)?;
        for (name, side) in [("lambda", &lambda), ("rho", &rho)] {
            let sum: f64 = side.iter().sum();
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "{name} coefficients sum to {sum}, expected 1"
                )));
            }
        }
        Self::from_vectors(normalized(lambda), normalized(rho))
    }

    fn from_vectors(lambda: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        let dd = Self { lambda, rho };
        let r = dd.rate();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "design rate {r} outside (0, 1)"
            )));
        }
        Ok(dd)
    }

    /// `λ_i`, zero outside the support.
    pub fn lambda_coeff(&self, degree: usize) -> f64 {
        self.lambda.get(degree).copied().unwrap_or(0.0)
    }

    pub fn rho_coeff(&self, degree: usize) -> f64 {
        self.rho.get(degree).copied().unwrap_or(0.0)
    }

    pub fn max_left_degree(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn max_right_degree(&self) -> usize {
        self.rho.len() - 1
    }

    /// Support of λ as `(degree, fraction)`.
    pub fn lambda_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        nonzero_terms(&self.lambda)
    }

    pub fn rho_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        nonzero_terms(&self.rho)
    }

    /// λ(x) = Σ λ_i x^(i-1).
    pub fn lambda_poly(&self, x: f64) -> f64 {
        eval_edge_poly(&self.lambda, x)
    }

    /// ρ(x) = Σ ρ_i x^(i-1).
    pub fn rho_poly(&self, x: f64) -> f64 {
        eval_edge_poly(&self.rho, x)
    }

    /// Σ λ_i / i, i.e. variables per edge.
    pub fn lambda_integral(&self) -> f64 {
        self.lambda_terms().map(|(i, c)| c / i as f64).sum()
    }

    pub fn rho_integral(&self) -> f64 {
        self.rho_terms().map(|(i, c)| c / i as f64).sum()
    }

    /// Design rate `1 - ∫ρ / ∫λ`.
    pub fn rate(&self) -> f64 {
        1.0 - self.rho_integral() / self.lambda_integral()
    }

    /// Number of edges of a length-`n` code: `round(n / Σ λ_i/i)`.
    pub fn edge_count(&self, n: usize) -> usize {
        (n as f64 / self.lambda_integral()).round() as usize
    }

    /// Node-perspective fractions of variables with each degree.
    pub fn variable_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.lambda)
    }

    pub fn check_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.rho)
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.lambda_terms() {
            writeln!(f, "L {i} {c}")?;
        }
        for (i, c) in self.rho_terms() {
            writeln!(f, "R {i} {c}")?;
        }
        Ok(())
    }
}

fn nonzero_terms(v: &[f64]) -> impl Iterator<Item = (usize, f64)> + '_ {
    v.iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0.0)
        .map(|(i, &c)| (i, c))
}

fn eval_edge_poly(coeffs: &[f64], x: f64) -> f64 {
    // Horner over degrees max..1 with exponent i-1.
    coeffs.iter().skip(1).rev().fold(0.0, |acc, &c| acc * x + c)
}

fn node_fractions(edge: &[f64]) -> Vec<(usize, f64)> {
    let total: f64 = nonzero_terms(edge).map(|(i, c)| c / i as f64).sum();
    nonzero_terms(edge)
        .map(|(i, c)| (i, c / i as f64 / total))
        .collect()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|c| *c /= sum);
    v
}

fn side_from_pairs(name: &str, pairs: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for &(degree, coeff) in pairs {
        if degree == 0 {
            return Err(Error::InvalidDistribution(format!("{name}: degree 0 is not allowed")));
        }
        if !(coeff >= 0.0) || !coeff.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "{name}: coefficient {coeff} for degree {degree} is negative or not finite"
            )));
        }
        if out.len() <= degree {
            out.resize(degree + 1, 0.0);
        }
        out[degree] += coeff;
    }
    let sum: f64 = out.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidDistribution(format!("{name}: empty support")));
    }
    while out.last() == Some(&0.0) {
        out.pop();
    }
    Ok(out)
}

fn parse_coefficient(s: &str) -> Result<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| Error::Parse(format!("bad coefficient '{s}'")))?;
            let den: f64 = den.trim().parse().map_err(|_| Error::Parse(format!("bad coefficient '{s}'")))?;
            num / den
        }
        None => s.parse().map_err(|_| Error::Parse(format!("bad coefficient '{s}'")))?,
    };
    Ok(value)
}

/// Parses `c0 + c1 x + c2 x^2 ...` into `(degree, coefficient)` pairs where
/// degree = exponent + 1. Negative terms are returned as-is for validation to reject.
pub fn parse_polynomial(text: &str) -> Result<Vec<(usize, f64)>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for idx in 1..=bytes.len() {
        let at_split = idx == bytes.len()
            || ((bytes[idx] == b'+' || bytes[idx] == b'-')
                && !matches!(bytes[idx - 1], b'e' | b'E' | b'^'));
        if at_split {
            terms.push(&compact[start..idx]);
            start = idx;
        }
    }
    terms
        .into_iter()
        .map(|term| {
            let (sign, body) = match term.as_bytes()[0] {
                b'+' => (1.0, &term[1..]),
                b'-' => (-1.0, &term[1..]),
                _ => (1.0, term),
            };
            let (coeff_str, power) = match body.find('x') {
                Some(pos) => {
                    let coeff = body[..pos].trim_end_matches('*');
                    let tail = &body[pos + 1..];
                    let power = if tail.is_empty() {
                        1
                    } else {
                        let exp = tail
                            .strip_prefix('^')
                            .ok_or_else(|| Error::Parse(format!("bad term '{term}'")))?;
                        exp.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad exponent in '{term}'")))?
                    };
                    (coeff, power)
                }
                None => (body, 0),
            };
            let coeff = if coeff_str.is_empty() {
                1.0
            } else {
                parse_coefficient(coeff_str)?
            };
            Ok((power + 1, sign * coeff))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_three_six_from_polynomials() {
        let dd = DegreeDistribution::from_polynomials("x^2", "x^5").unwrap();
        assert_eq!(dd.lambda_coeff(3), 1.0);
        assert_eq!(dd.rho_coeff(6), 1.0);
        assert!((dd.rate() - 0.5).abs() < 1e-15);
        assert_eq!(dd.edge_count(512), 1536);
    }

    #[test]
    fn mixed_polynomial_reads_coefficients() {
        let dd = DegreeDistribution::from_polynomials("0.5x + 0.5x^2", "x^5").unwrap();
        assert_eq!(dd.lambda_coeff(2), 0.5);
        assert_eq!(dd.lambda_coeff(3), 0.5);
        assert_eq!(dd.max_left_degree(), 3);
    }

    #[test]
    fn polynomial_forms() {
        let t = parse_polynomial("0.25*x^3 + 3/4 x + 1").unwrap();
        assert_eq!(t, vec![(4, 0.25), (2, 0.75), (1, 1.0)]);
        assert!(parse_polynomial("").is_err());
        assert!(parse_polynomial("x^a").is_err());
    }

    #[test]
    fn degree_one_only_fails_rate_check() {
        let err = DegreeDistribution::from_polynomials("x^0", "x^0").unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution(_)));
        // λ = ρ = x gives rate exactly 0
        assert!(DegreeDistribution::from_polynomials("x", "x").is_err());
    }

    #[test]
    fn negative_and_empty_rejected() {
        assert!(DegreeDistribution::from_polynomials("1.5x^2 - 0.5x", "x^5").is_err());
        assert!(DegreeDistribution::from_polynomials("0x^2", "x^5").is_err());
    }

    #[test]
    fn tabular_form() {
        let text = "# (3,6)\nL 3 1.0\nR 6 1\n";
        let dd = DegreeDistribution::parse(text).unwrap();
        assert_eq!(dd, DegreeDistribution::regular(3, 6).unwrap());

        let bad = "L 3 0.9\nR 6 1\n";
        assert!(matches!(
            DegreeDistribution::parse(bad),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(DegreeDistribution::parse("L 3 1\nR 6 1\nQ 1 1\n").is_err());
        let poly = "lambda x^2\nrho x^5\n";
        assert_eq!(DegreeDistribution::parse(poly).unwrap(), dd);
    }

    #[test]
    fn display_round_trips_through_tabular_parser() {
        let dd = DegreeDistribution::from_polynomials("0.3x + 0.7x^3", "0.4x^4 + 0.6x^6").unwrap();
        let back = DegreeDistribution::parse(&dd.to_string()).unwrap();
        for i in 1..=8 {
            assert!((dd.lambda_coeff(i) - back.lambda_coeff(i)).abs() < 1e-12);
            assert!((dd.rho_coeff(i) - back.rho_coeff(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_evaluation() {
        let dd = DegreeDistribution::from_polynomials("0.5x + 0.5x^2", "x^5").unwrap();
        let x = 0.3;
        assert!((dd.lambda_poly(x) - (0.5 * x + 0.5 * x * x)).abs() < 1e-15);
        assert!((dd.rho_poly(x) - x.powi(5)).abs() < 1e-15);
        assert_eq!(dd.lambda_poly(1.0), 1.0);
    }
}
