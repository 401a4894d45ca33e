//! Multivariate polynomial gcd.
//!
//! Strategy, in order of increasing cost:
//!
//! 1. cheap structural outcomes: zero or constant inputs, equal inputs up
//!    to a constant, one input dividing the other, common monomial factor;
//! 2. a specialization probe: all variables but one are replaced by small
//!    integers and a univariate gcd is taken.  When the leading coefficient
//!    survives the substitution, the image degree bounds the true degree
//!    from above, so an everywhere-constant image certifies coprimality;
//! 3. an evaluation-reconstruction gcd over the integers (single huge
//!    evaluation point per variable, integer gcd, base-xi relift).  The
//!    candidate counts only if exact division verifies it as a common
//!    divisor and its per-variable degrees meet the probe images, which
//!    together certify it as the greatest one;
//! 4. a subresultant pseudo-remainder sequence as the unconditional
//!    fallback, and the only route for coefficients in a quadratic
//!    extension.
//!
//! The result is always monic in graded lex order, so callers can use it
//! directly for canonical reduction of fractions.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

use super::num::Constant;
use super::poly::{same_vars, Monomial, Polynomial};
use super::KernelError;

/// Monic gcd of two polynomials; gcd(0, 0) = 0.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, KernelError> {
    same_vars(a.vars(), b.vars())?;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Ok(Polynomial::one(a.vars()));
    }

    // Split off the common monomial factor first; the reduced parts have
    // no variable dividing every term, which keeps the recursion honest.
    let ma = monomial_content(a);
    let mb = monomial_content(b);
    let mg = ma.gcd(&mb);
    let a1 = divide_by_monomial(a, &ma);
    let b1 = divide_by_monomial(b, &mb);
    let core = gcd_reduced(&a1, &b1)?;
    let lifted = core.mul_monomial(&mg, &Constant::one())?;
    lifted.monic()
}

/// Gcd of a list, used for contents.
fn poly_gcd_many(polys: &[Polynomial]) -> Result<Polynomial, KernelError> {
    let mut acc: Option<Polynomial> = None;
    for p in polys {
        acc = Some(match acc {
            None => p.clone(),
            Some(g) => {
                if g.is_one() {
                    return Ok(g);
                }
                poly_gcd(&g, p)?
            }
        });
    }
    Ok(acc.expect("content of an empty coefficient list"))
}

fn monomial_content(p: &Polynomial) -> Monomial {
    let mut it = p.terms();
    let first = it.next().expect("nonzero polynomial").0.clone();
    it.fold(first, |acc, (m, _)| acc.gcd(m))
}

fn divide_by_monomial(p: &Polynomial, m: &Monomial) -> Polynomial {
    if m.is_unit() {
        return p.clone();
    }
    let terms = p.terms().map(|(mm, c)| {
        (
            mm.try_div(m).expect("monomial content divides every term"),
            c.clone(),
        )
    });
    Polynomial::from_terms(p.vars(), terms).expect("rebuilding after monomial division")
}

fn gcd_reduced(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, KernelError> {
    if a.is_constant() || b.is_constant() {
        return Ok(Polynomial::one(a.vars()));
    }
    if a.proportional_to(b) {
        return a.monic();
    }
    // One dividing the other is common when reducing structured fractions
    // (powers of a shared irreducible); probing is cheap relative to PRS.
    if a.total_degree() <= b.total_degree() && b.exact_div(a).is_ok() {
        return a.monic();
    }
    if b.total_degree() <= a.total_degree() && a.exact_div(b).is_ok() {
        return b.monic();
    }

    let shared = shared_vars(a, b);
    if shared.is_empty() {
        // A nontrivial common divisor would involve no variable of either
        // input, i.e. be constant.
        return Ok(Polynomial::one(a.vars()));
    }

    let union: Vec<usize> = {
        let mut u = involved_vars(a);
        for v in involved_vars(b) {
            if !u.contains(&v) {
                u.push(v);
            }
        }
        u
    };

    if union.len() > 1 {
        let images = probe_shared_degrees(a, b, &shared)?;
        if let Some(im) = &images {
            if im.iter().all(|&(_, d)| d == 0) {
                return Ok(Polynomial::one(a.vars()));
            }
        }
        if all_rational(a) && all_rational(b) {
            if let Some(cand) = heu_gcd_entry(a, b)? {
                if certify_degrees(a, b, &cand, &shared, images.as_deref())? {
                    return cand.monic();
                }
            }
        }
    }

    let var = choose_main_var(a, b).expect("shared variable exists");
    let (cont_a, pp_a) = content_primitive(a, var)?;
    let (cont_b, pp_b) = content_primitive(b, var)?;
    let cont_g = poly_gcd(&cont_a, &cont_b)?;
    let pp_g = subresultant_gcd(&pp_a, &pp_b, var)?;
    cont_g.mul(&pp_g)?.monic()
}

fn involved_vars(p: &Polynomial) -> Vec<usize> {
    (0..p.vars().len()).filter(|&v| p.degree_in(v) > 0).collect()
}

fn shared_vars(a: &Polynomial, b: &Polynomial) -> Vec<usize> {
    (0..a.vars().len())
        .filter(|&v| a.degree_in(v) > 0 && b.degree_in(v) > 0)
        .collect()
}

fn all_rational(p: &Polynomial) -> bool {
    p.terms().all(|(_, c)| c.extension().is_none())
}

fn choose_main_var(a: &Polynomial, b: &Polynomial) -> Option<usize> {
    let n = a.vars().len();
    let mut best: Option<(usize, u32, u32)> = None;
    for v in 0..n {
        let da = a.degree_in(v);
        let db = b.degree_in(v);
        if da == 0 || db == 0 {
            continue;
        }
        let key = (da.min(db), da.max(db));
        match best {
            None => best = Some((v, key.0, key.1)),
            Some((_, k0, k1)) if (key.0, key.1) < (k0, k1) => best = Some((v, key.0, key.1)),
            _ => {}
        }
    }
    best.map(|(v, _, _)| v)
}

// ---------------------------------------------------------------------
// specialization probe
// ---------------------------------------------------------------------

const PROBE_POINTS: [i64; 12] = [2, -3, 5, -7, 3, -2, 7, -5, 11, -4, 13, -6];
const PROBE_ATTEMPTS: usize = 4;
const CERTIFY_ATTEMPTS: usize = 3;

fn probe_point(attempt: usize, var: usize) -> BigRational {
    let v = PROBE_POINTS[(attempt * 7 + var * 3 + 1) % PROBE_POINTS.len()];
    BigRational::from_integer(v.into())
}

/// Dense coefficient vector of `p` as univariate in `keep`, with every
/// other variable replaced by the attempt's probe values.
fn specialize_except(p: &Polynomial, keep: usize, attempt: usize) -> Result<Vec<Constant>, KernelError> {
    let d = p.degree_in(keep) as usize;
    let mut out = vec![Constant::zero(); d + 1];
    for (m, c) in p.terms() {
        let mut factor = BigRational::one();
        for (v, &e) in m.0.iter().enumerate() {
            if v == keep || e == 0 {
                continue;
            }
            let t = probe_point(attempt, v);
            factor *= BigRational::new(
                t.numer().pow(e),
                t.denom().pow(e),
            );
        }
        let k = m.0[keep] as usize;
        out[k] = out[k].add(&c.scale(&factor))?;
    }
    Ok(out)
}

fn uni_trim(mut v: Vec<Constant>) -> Vec<Constant> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Remainder of a by b where b is monic; both dense, low degree first.
fn uni_rem(mut a: Vec<Constant>, b: &[Constant]) -> Result<Vec<Constant>, KernelError> {
    while a.len() >= b.len() {
        let lead = a.last().expect("nonempty").clone();
        let shift = a.len() - b.len();
        if !lead.is_zero() {
            for (i, bc) in b.iter().enumerate().take(b.len() - 1) {
                a[i + shift] = a[i + shift].sub(&bc.mul(&lead)?)?;
            }
        }
        a.pop();
        while a.last().map_or(false, |c| c.is_zero()) {
            a.pop();
        }
    }
    Ok(a)
}

/// Degree of the gcd of two specialized univariate polynomials, or None
/// when both are zero.
fn uni_gcd_degree(a0: Vec<Constant>, b0: Vec<Constant>) -> Result<Option<usize>, KernelError> {
    let mut a = uni_trim(a0);
    let mut b = uni_trim(b0);
    loop {
        if b.is_empty() {
            return Ok(if a.is_empty() { None } else { Some(a.len() - 1) });
        }
        if a.is_empty() || a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let inv = b.last().expect("nonempty").inv()?;
        let bm: Vec<Constant> = b
            .iter()
            .map(|c| c.mul(&inv))
            .collect::<Result<Vec<_>, _>>()?;
        let r = uni_rem(a, &bm)?;
        a = bm;
        b = r;
    }
}

/// For each shared variable, the degree of the gcd of a univariate image
/// taken at a point where the leading coefficient of `a` survives.  The
/// image degree bounds deg_v(gcd) from above.  None when no attempt found
/// a usable point.
fn probe_shared_degrees(
    a: &Polynomial,
    b: &Polynomial,
    shared: &[usize],
) -> Result<Option<Vec<(usize, usize)>>, KernelError> {
    let mut out = Vec::with_capacity(shared.len());
    'vars: for &v in shared {
        for attempt in 0..PROBE_ATTEMPTS {
            match probe_one(a, b, v, attempt)? {
                Some(d) => {
                    out.push((v, d));
                    continue 'vars;
                }
                None => continue,
            }
        }
        return Ok(None);
    }
    Ok(Some(out))
}

fn probe_one(
    a: &Polynomial,
    b: &Polynomial,
    v: usize,
    attempt: usize,
) -> Result<Option<usize>, KernelError> {
    // Rational coefficients admit a much cheaper image over a word-size
    // prime field; the degree bound survives the extra reduction because
    // the homomorphism argument does.
    if all_rational(a) && all_rational(b) {
        if let (Some(ua), Some(ub)) = (
            specialize_except_mod(a, v, attempt),
            specialize_except_mod(b, v, attempt),
        ) {
            let da = a.degree_in(v) as usize;
            if ua[da] == 0 {
                return Ok(None);
            }
            return Ok(uni_gcd_degree_mod(ua, ub));
        }
    }
    let ua = specialize_except(a, v, attempt)?;
    let da = a.degree_in(v) as usize;
    if ua[da].is_zero() {
        return Ok(None); // leading coefficient vanished: bad point
    }
    let ub = specialize_except(b, v, attempt)?;
    uni_gcd_degree(ua, ub)
}

// ---------------------------------------------------------------------
// word-size prime field images
// ---------------------------------------------------------------------

const P61: u64 = (1 << 61) - 1;

fn madd(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P61 {
        s - P61
    } else {
        s
    }
}

fn msub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P61 - b
    }
}

fn mmul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn mpow(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mmul(acc, a);
        }
        a = mmul(a, a);
        e >>= 1;
    }
    acc
}

fn minv(a: u64) -> u64 {
    mpow(a, P61 - 2)
}

fn bigint_mod(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(P61))
        .to_u64()
        .expect("residue fits in u64")
}

/// n/d mod p, or None when p divides d.
fn rational_mod(q: &BigRational) -> Option<u64> {
    let d = bigint_mod(q.denom());
    if d == 0 {
        return None;
    }
    Some(mmul(bigint_mod(q.numer()), minv(d)))
}

/// Mod-p analogue of [`specialize_except`].  None when some coefficient
/// denominator is divisible by the prime.
fn specialize_except_mod(p: &Polynomial, keep: usize, attempt: usize) -> Option<Vec<u64>> {
    let d = p.degree_in(keep) as usize;
    let mut out = vec![0u64; d + 1];
    for (m, c) in p.terms() {
        let mut factor = rational_mod(c.re())?;
        for (v, &e) in m.0.iter().enumerate() {
            if v == keep || e == 0 {
                continue;
            }
            let t = PROBE_POINTS[(attempt * 7 + v * 3 + 1) % PROBE_POINTS.len()];
            let tm = if t >= 0 {
                t as u64
            } else {
                P61 - (-t) as u64
            };
            factor = mmul(factor, mpow(tm, e as u64));
        }
        let k = m.0[keep] as usize;
        out[k] = madd(out[k], factor);
    }
    Some(out)
}

fn uni_trim_mod(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn uni_gcd_degree_mod(a0: Vec<u64>, b0: Vec<u64>) -> Option<usize> {
    let mut a = uni_trim_mod(a0);
    let mut b = uni_trim_mod(b0);
    loop {
        if b.is_empty() {
            return if a.is_empty() { None } else { Some(a.len() - 1) };
        }
        if a.is_empty() || a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let inv = minv(*b.last().expect("nonempty"));
        let bm: Vec<u64> = b.iter().map(|&c| mmul(c, inv)).collect();
        // remainder of a by the monic bm
        while a.len() >= bm.len() {
            let lead = *a.last().expect("nonempty");
            let shift = a.len() - bm.len();
            if lead != 0 {
                for (i, &bc) in bm.iter().enumerate().take(bm.len() - 1) {
                    a[i + shift] = msub(a[i + shift], mmul(bc, lead));
                }
            }
            a.pop();
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        let r = a;
        a = bm;
        b = r;
    }
}

/// A verified common divisor is the gcd exactly when its degree in every
/// shared variable meets a valid image bound.
fn certify_degrees(
    a: &Polynomial,
    b: &Polynomial,
    cand: &Polynomial,
    shared: &[usize],
    images: Option<&[(usize, usize)]>,
) -> Result<bool, KernelError> {
    'vars: for &v in shared {
        let target = cand.degree_in(v) as usize;
        if let Some(im) = images {
            if im.iter().any(|&(iv, d)| iv == v && d == target) {
                continue 'vars;
            }
        }
        for attempt in PROBE_ATTEMPTS..(PROBE_ATTEMPTS + CERTIFY_ATTEMPTS) {
            if let Some(d) = probe_one(a, b, v, attempt)? {
                if d == target {
                    continue 'vars;
                }
            }
        }
        return Ok(false);
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// evaluation-reconstruction gcd over the integers
// ---------------------------------------------------------------------

const HEU_ATTEMPTS: usize = 6;
const HEU_BIT_CAP: u64 = 2_000_000;
const HEU_DIGIT_CAP: u32 = 512;

/// Clears denominators and the integer content; the result has coprime
/// integer coefficients and the same monic normalization class.
fn to_integer_primitive(p: &Polynomial) -> Polynomial {
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        let d = c.re().denom();
        l = &l / l.gcd(d) * d;
    }
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        let n = c.re().numer() * &l / c.re().denom();
        g = g.gcd(&n);
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    p.mul_rational(&BigRational::new(l, g))
}

fn int_content_and_primitive(p: &Polynomial) -> (BigInt, Polynomial) {
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = g.gcd(c.re().numer());
    }
    if g.is_zero() || g.is_one() {
        return (BigInt::one(), p.clone());
    }
    let pp = p.mul_rational(&BigRational::new(BigInt::one(), g.clone()));
    (g, pp)
}

fn max_norm(p: &Polynomial) -> BigInt {
    let mut m = BigInt::zero();
    for (_, c) in p.terms() {
        let a = c.re().numer().abs();
        if a > m {
            m = a;
        }
    }
    m
}

/// Substitutes var := xi (a big integer) and collects the result by the
/// remaining monomials.
fn eval_var_int(p: &Polynomial, var: usize, xi: &BigInt) -> Result<Polynomial, KernelError> {
    let mut acc: BTreeMap<Monomial, Constant> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.0[var];
        let mut m2 = m.clone();
        m2.0[var] = 0;
        let scaled = if e == 0 {
            c.clone()
        } else {
            c.scale(&BigRational::from_integer(xi.pow(e)))
        };
        match acc.remove(&m2) {
            None => {
                acc.insert(m2, scaled);
            }
            Some(prev) => {
                let sum = prev.add(&scaled)?;
                if !sum.is_zero() {
                    acc.insert(m2, sum);
                }
            }
        }
    }
    Polynomial::from_terms(p.vars(), acc)
}

/// Coefficientwise symmetric divmod by xi: p = digit + xi * quotient with
/// every digit coefficient in [-xi/2, xi/2).
fn poly_sym_divmod(p: &Polynomial, xi: &BigInt) -> Result<(Polynomial, Polynomial), KernelError> {
    let mut digit: BTreeMap<Monomial, Constant> = BTreeMap::new();
    let mut quot: BTreeMap<Monomial, Constant> = BTreeMap::new();
    let half = xi / 2;
    for (m, c) in p.terms() {
        let n = c.re().numer().clone();
        let (mut q, mut r) = n.div_mod_floor(xi);
        if r >= half {
            r -= xi;
            q += 1;
        }
        if !r.is_zero() {
            digit.insert(m.clone(), Constant::from_rational(BigRational::from_integer(r)));
        }
        if !q.is_zero() {
            quot.insert(m.clone(), Constant::from_rational(BigRational::from_integer(q)));
        }
    }
    Ok((
        Polynomial::from_terms(p.vars(), digit)?,
        Polynomial::from_terms(p.vars(), quot)?,
    ))
}

fn lift_xi_adic(g: &Polynomial, var: usize, xi: &BigInt) -> Result<Option<Polynomial>, KernelError> {
    let vars = g.vars().clone();
    let mut acc = Polynomial::zero(&vars);
    let mut e = g.clone();
    let mut k: u32 = 0;
    while !e.is_zero() {
        if k > HEU_DIGIT_CAP {
            return Ok(None);
        }
        let (digit, quot) = poly_sym_divmod(&e, xi)?;
        if !digit.is_zero() {
            let mut mono = Monomial::unit(vars.len());
            mono.0[var] = k;
            acc = acc.add(&digit.mul_monomial(&mono, &Constant::one())?)?;
        }
        e = quot;
        k += 1;
    }
    Ok(Some(acc))
}

fn heu_gcd_entry(a: &Polynomial, b: &Polynomial) -> Result<Option<Polynomial>, KernelError> {
    let az = to_integer_primitive(a);
    let bz = to_integer_primitive(b);
    heu_core(&az, &bz)
}

/// Returns a common divisor of the integer-primitive inputs, verified by
/// exact division, or None when the heuristic gives up.  Maximality is
/// certified separately against the probe images.
fn heu_core(a: &Polynomial, b: &Polynomial) -> Result<Option<Polynomial>, KernelError> {
    if a.is_zero() {
        return Ok(Some(b.clone()));
    }
    if b.is_zero() {
        return Ok(Some(a.clone()));
    }
    let (ca, a1) = int_content_and_primitive(a);
    let (cb, b1) = int_content_and_primitive(b);
    let c = ca.gcd(&cb);
    let c_poly = Polynomial::constant(a.vars(), Constant::from_rational(BigRational::from_integer(c)));
    if a1.is_constant() || b1.is_constant() {
        return Ok(Some(c_poly));
    }
    let var = match choose_main_var(&a1, &b1) {
        Some(v) => v,
        None => return Ok(Some(c_poly)),
    };

    let norm = max_norm(&a1).min(max_norm(&b1));
    let mut xi: BigInt = norm * 2 + 29;
    let dmax = a1.degree_in(var).max(b1.degree_in(var)) as u64;
    for _ in 0..HEU_ATTEMPTS {
        if xi.bits() * (dmax + 1) > HEU_BIT_CAP {
            return Ok(None);
        }
        let ea = eval_var_int(&a1, var, &xi)?;
        let eb = eval_var_int(&b1, var, &xi)?;
        if ea.is_zero() || eb.is_zero() {
            xi = &xi * 73794 / 27011 + 1;
            continue;
        }
        let sub = match heu_core(&ea, &eb)? {
            Some(s) => s,
            None => return Ok(None),
        };
        if let Some(lifted) = lift_xi_adic(&sub, var, &xi)? {
            let (_, cand) = int_content_and_primitive(&lifted);
            if !cand.is_zero() && a1.exact_div(&cand).is_ok() && b1.exact_div(&cand).is_ok() {
                return Ok(Some(cand.mul(&c_poly)?));
            }
        }
        xi = &xi * 73794 / 27011 + 1;
    }
    Ok(None)
}

// ---------------------------------------------------------------------
// subresultant fallback
// ---------------------------------------------------------------------

/// Coefficients of `p` viewed as univariate in `var`, low degree first.
/// Entries live in the full variable table with `var`-exponent zero.
fn univariate_coeffs(p: &Polynomial, var: usize) -> Vec<Polynomial> {
    let d = p.degree_in(var) as usize;
    let mut out = vec![Polynomial::zero(p.vars()); d + 1];
    for (m, c) in p.terms() {
        let e = m.0[var] as usize;
        let mut m2 = m.clone();
        m2.0[var] = 0;
        let term = Polynomial::from_terms(p.vars(), [(m2, c.clone())])
            .expect("single term rebuild");
        out[e] = out[e].add(&term).expect("coefficient accumulation");
    }
    out
}

fn assemble(coeffs: &[Polynomial], var: usize, vars: &std::sync::Arc<super::poly::VarTable>) -> Polynomial {
    let mut out = Polynomial::zero(vars);
    for (e, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut mono = Monomial::unit(vars.len());
        mono.0[var] = e as u32;
        out = out
            .add(&c.mul_monomial(&mono, &Constant::one()).expect("shift"))
            .expect("assemble");
    }
    out
}

fn content_primitive(p: &Polynomial, var: usize) -> Result<(Polynomial, Polynomial), KernelError> {
    let coeffs = univariate_coeffs(p, var);
    let nonzero: Vec<Polynomial> = coeffs.iter().filter(|c| !c.is_zero()).cloned().collect();
    let cont = poly_gcd_many(&nonzero)?;
    let pp = p.exact_div(&cont)?;
    Ok((cont, pp))
}

/// Dense univariate view with polynomial coefficients.
struct UniPoly {
    coeffs: Vec<Polynomial>,
}

impl UniPoly {
    fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn lc(&self) -> &Polynomial {
        self.coeffs.last().expect("nonempty coefficient vector")
    }

    fn trim(mut coeffs: Vec<Polynomial>) -> Option<UniPoly> {
        while let Some(last) = coeffs.last() {
            if last.is_zero() {
                coeffs.pop();
            } else {
                break;
            }
        }
        if coeffs.is_empty() {
            None
        } else {
            Some(UniPoly { coeffs })
        }
    }

    fn scale(&self, k: &Polynomial) -> Result<UniPoly, KernelError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.mul(k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(UniPoly { coeffs })
    }

    fn divide_coeffs(&self, k: &Polynomial) -> Result<UniPoly, KernelError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if c.is_zero() { Ok(c.clone()) } else { c.exact_div(k) })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(UniPoly { coeffs })
    }
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, computed without
/// fractions.  Requires deg a >= deg b.
fn pseudo_rem(a: &UniPoly, b: &UniPoly) -> Result<Option<UniPoly>, KernelError> {
    let mut r = a.coeffs.clone();
    let db = b.deg();
    let lcb = b.lc().clone();
    let mut steps = a.deg() - db + 1;
    while let Some(r_trim) = UniPoly::trim(r.clone()) {
        let dr = r_trim.deg();
        if dr < db {
            r = r_trim.coeffs;
            break;
        }
        let shift = dr - db;
        let lead = r_trim.lc().clone();
        // r := lcb * r - lead * x^shift * b
        let mut next = vec![Polynomial::zero(lead.vars()); dr];
        for (i, c) in r_trim.coeffs.iter().enumerate().take(dr) {
            next[i] = c.mul(&lcb)?;
        }
        for (i, c) in b.coeffs.iter().enumerate().take(db) {
            next[i + shift] = next[i + shift].sub(&c.mul(&lead)?)?;
        }
        r = next;
        steps -= 1;
    }
    // Keep the pseudo-remainder scaling exact when division terminated early.
    let mut rr = match UniPoly::trim(r) {
        None => return Ok(None),
        Some(p) => p,
    };
    for _ in 0..steps {
        rr = rr.scale(&lcb)?;
    }
    Ok(Some(rr))
}

/// Subresultant PRS gcd of two primitive polynomials in `var`.
fn subresultant_gcd(
    pa: &Polynomial,
    pb: &Polynomial,
    var: usize,
) -> Result<Polynomial, KernelError> {
    let vars = pa.vars().clone();
    let ua = UniPoly::trim(univariate_coeffs(pa, var)).expect("primitive part nonzero");
    let ub = UniPoly::trim(univariate_coeffs(pb, var)).expect("primitive part nonzero");
    let (mut big, mut small) = if ua.deg() >= ub.deg() { (ua, ub) } else { (ub, ua) };

    let one = Polynomial::one(&vars);
    let mut g = one.clone();
    let mut h = one.clone();
    loop {
        let delta = big.deg() - small.deg();
        let rem = pseudo_rem(&big, &small)?;
        match rem {
            None => {
                // small divides big (up to scaling): primitive part is the gcd
                let cand = assemble(&small.coeffs, var, &vars);
                let (_, pp) = content_primitive(&cand, var)?;
                return pp.monic();
            }
            Some(r) => {
                if r.deg() == 0 {
                    return Ok(one);
                }
                let divisor = g.mul(&h.pow(delta as u32)?)?;
                let next = r.divide_coeffs(&divisor)?;
                big = small;
                small = next;
                g = big.lc().clone();
                h = if delta == 0 {
                    h
                } else {
                    // h := g^delta / h^(delta-1), exact in the ring
                    let num = g.pow(delta as u32)?;
                    if delta == 1 {
                        num
                    } else {
                        num.exact_div(&h.pow(delta as u32 - 1)?)?
                    }
                };
            }
        }
    }
}
