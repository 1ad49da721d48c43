//! Worked examples through the public API, each against a hand-rolled oracle.

use approx::assert_relative_eq;
use qfrac_core::*;

fn ctx(q: f64, p: f64) -> QContext {
    QContext::new(q, p).unwrap()
}

fn tight() -> Truncation {
    Truncation::new(1e-14, 10_000).unwrap()
}

/// Γ_q by its infinite product, 2000 factors.
fn gamma_q(x: f64, q: f64) -> f64 {
    let mut r = (1.0 - q).powf(1.0 - x);
    let mut qk = q;
    for _ in 0..2000 {
        r *= (1.0 - qk) / (1.0 - q.powf(x - 1.0) * qk);
        qk *= q;
    }
    r
}

/// (a - b)^{(s)} in base q, 2000 factors.
fn q_pow_diff(a: f64, b: f64, s: f64, q: f64) -> f64 {
    let r = b / a;
    let mut v = a.powf(s);
    let mut qk = 1.0;
    for _ in 0..2000 {
        v *= (1.0 - r * qk) / (1.0 - r * qk * q.powf(s));
        qk *= q;
    }
    v
}

#[test]
fn q_numbers_and_factorials() {
    assert_eq!(q_number(0.0, 0.5), 0.0);
    assert_relative_eq!(q_number(2.0, 0.5), 1.5);
    assert_relative_eq!(q_factorial(3, 0.5), 2.625);
    assert_relative_eq!(q_pochhammer(0.5, 0.5, 2), 0.375);
    assert_relative_eq!(q_binomial(2, 1, 0.5).unwrap(), 1.5);
    // Pascal-type recurrence for the 4-choose-2 case
    let q: f64 = 0.5;
    let pascal = q_binomial(3, 1, q).unwrap() + q.powi(2) * q_binomial(3, 2, q).unwrap();
    assert_relative_eq!(q_binomial(4, 2, q).unwrap(), pascal, max_relative = 1e-14);
}

#[test]
fn q_exponentials_invert_each_other() {
    let t = tight();
    for z in [0.3, 1.0, 1.7] {
        let a = e_q(z, 0.5, &t).unwrap().value;
        let b = big_e_q(-z, 0.5, &t).unwrap().value;
        assert_relative_eq!(a * b, 1.0, max_relative = 1e-13);
    }
    // series oracle for e_q(1)
    let (mut sum, mut term, mut n) = (0.0_f64, 1.0_f64, 0);
    while term > 1e-17 {
        sum += term;
        n += 1;
        term /= q_number(n as f64, 0.5);
    }
    assert_relative_eq!(e_q(1.0, 0.5, &t).unwrap().value, sum, max_relative = 1e-12);
}

#[test]
fn gamma_and_beta() {
    let t = tight();
    assert_relative_eq!(q_gamma(3.0, 0.5, &t).unwrap().value, 1.5, max_relative = 1e-14);
    for x in [0.5, 1.3, 2.5, 4.2] {
        assert_relative_eq!(q_gamma(x, 0.5, &t).unwrap().value, gamma_q(x, 0.5), max_relative = 1e-12);
    }
    assert_relative_eq!(q_beta(2.0, 1.0, 0.5, &t).unwrap().value, 1.0 / 1.5, max_relative = 1e-14);
}

#[test]
fn generalized_power() {
    let t = tight();
    let c = ctx(0.5, 1.0);
    assert_relative_eq!(gen_power(2.0, 0.0, 1.3, &c, &t).unwrap().value, 2f64.powf(1.3));
    assert_relative_eq!(gen_power(2.0, 0.7, 1.0, &c, &t).unwrap().value, 1.3, max_relative = 1e-14);
    // base Q = 0.25: (2 - 1)(2 - 0.25)
    assert_relative_eq!(gen_power(2.0, 1.0, 2.0, &c, &t).unwrap().value, 1.75, max_relative = 1e-14);
    let c0 = ctx(0.5, 0.0);
    assert_relative_eq!(
        gen_power(1.0, 0.3, 0.5, &c0, &t).unwrap().value,
        q_pow_diff(1.0, 0.3, 0.5, 0.5),
        max_relative = 1e-13
    );
}

#[test]
fn jackson_engine() {
    let t = tight();
    let one = Integrand::constant(1.0);
    assert_relative_eq!(jackson_integral(&one, 1.0, 0.5, &t).unwrap().value, 1.0, max_relative = 1e-14);
    let id = Integrand::power(1.0);
    assert_relative_eq!(jackson_integral(&id, 1.0, 0.5, &t).unwrap().value, 1.0 / 1.5, max_relative = 1e-14);
    let between = jackson_integral_between(&id, 0.4, 1.2, 0.5, &t).unwrap().value;
    assert_relative_eq!(between, (1.44 - 0.16) / 1.5, max_relative = 1e-13);
    assert_eq!(jackson_integral_between(&id, 0.7, 0.7, 0.5, &t).unwrap().value, 0.0);
    assert_relative_eq!(q_derivative(&Integrand::power(3.0), 2.0, 0.5).unwrap(), 1.75 * 4.0, max_relative = 1e-14);

    // n = 1 applied to t^{p+1} gives [p+1]_q
    let c = ctx(0.5, 1.0);
    assert_relative_eq!(composed_xp_dq(&Integrand::power(2.0), 1.3, 1, &c).unwrap(), 1.5, max_relative = 1e-14);
}

#[test]
fn fractional_integral_examples() {
    let c = ctx(0.5, 1.0);
    let s = OperatorSpec::new(1.0, c).unwrap();
    let v = frac_integral(&Integrand::constant(1.0), 1.5, &s).unwrap().value;
    assert_relative_eq!(v, 1.5f64.powi(2) / 1.5, max_relative = 1e-13);

    // half order of a constant against the literal q-kernel sum
    let (q, alpha) = (0.5, 0.5);
    let s = OperatorSpec::new(alpha, ctx(q, 0.0)).unwrap();
    let v = frac_integral(&Integrand::constant(1.0), 1.0, &s).unwrap().value;
    let mut sum = 0.0;
    let mut qi = 1.0;
    for _ in 0..10_000 {
        sum += qi * q_pow_diff(1.0, qi * q, alpha - 1.0, q);
        qi *= q;
        if qi == 0.0 {
            break;
        }
    }
    let oracle = (1.0 - q) * sum / gamma_q(alpha, q);
    assert_relative_eq!(v, oracle, max_relative = 1e-12);
    assert_relative_eq!(v, 1.0 / gamma_q(1.5, q), max_relative = 1e-12);
}

#[test]
fn p_zero_is_the_q_riemann_operator() {
    let t = tight();
    let f = Integrand::polynomial(&[0.5, -1.0, 2.0]);
    for alpha in [0.3, 1.0, 2.4] {
        let s = OperatorSpec::new(alpha, ctx(0.6, 0.0)).unwrap();
        let a = frac_integral(&f, 1.7, &s).unwrap().value;
        let b = q_riemann_integral(&f, 1.7, alpha, 0.6, &t).unwrap().value;
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }
}

#[test]
fn integer_orders_agree() {
    let t = tight();
    let c = ctx(0.5, 0.0);
    let one = Integrand::constant(1.0);
    let nested = iterated_integral(&one, 1.0, 2, &c, &t).unwrap().value;
    let frac = frac_integral(&one, 1.0, &OperatorSpec::new(2.0, c).unwrap()).unwrap().value;
    assert_relative_eq!(nested, frac, max_relative = 1e-8);

    let c = ctx(0.5, 1.0);
    let f = Integrand::polynomial(&[1.0, 0.5, -0.25, 0.0, 0.1]);
    let a = integer_kernel_integral(&f, 1.2, 4, &c, &t).unwrap().value;
    let b = iterated_integral(&f, 1.2, 4, &c, &t).unwrap().value;
    assert_relative_eq!(a, b, max_relative = 1e-6);
}

#[test]
fn derivative_examples() {
    let c = ctx(0.5, 1.0);
    let f = Integrand::power(1.5);
    let s0 = OperatorSpec::new(0.0, c).unwrap();
    assert_eq!(frac_derivative(&f, 1.3, &s0).unwrap().value, 1.3f64.powf(1.5));

    let s = OperatorSpec::new(0.5, c).unwrap();
    let g = Integrand::polynomial(&[2.0, -1.0, 0.5]);
    let jg = {
        let g = g.clone();
        Integrand::new("J g", move |t| frac_integral(&g, t, &s)?.value())
    };
    for x in [0.6, 1.0, 1.4] {
        let d = frac_derivative(&jg, x, &s).unwrap().value;
        assert_relative_eq!(d, g.eval(x).unwrap(), max_relative = 1e-8);
    }
}

#[test]
fn classical_reference_examples() {
    let one = Integrand::constant(1.0);
    assert_relative_eq!(classical_reference(&one, 1.5, 1.0, 1.0).unwrap(), 1.125, max_relative = 1e-12);
    for alpha in [0.5, 1.5, 2.5] {
        let expected = 2f64.powf(alpha) / statrs::function::gamma::gamma(alpha + 1.0);
        assert_relative_eq!(classical_reference(&one, 2.0, alpha, 0.0).unwrap(), expected, max_relative = 1e-10);
    }
}

#[test]
fn parser_examples() {
    assert_eq!(parse("t").unwrap(), Expr::Variable);
    let e = parse("t^2 + 3*t").unwrap();
    assert_eq!(
        e,
        Expr::Add(
            Box::new(Expr::Pow(Box::new(Expr::Variable), Box::new(Expr::Number(2.0)))),
            Box::new(Expr::Mul(Box::new(Expr::Number(3.0)), Box::new(Expr::Variable))),
        )
    );
    assert_eq!(evaluate(&e, 2.0).unwrap(), 10.0);
    assert_eq!(parse("2*(1-t").unwrap_err().position, 6);
}
