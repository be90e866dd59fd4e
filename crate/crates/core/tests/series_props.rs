use dynfree_core::powerseries::{boettcher, Series};
use dynfree_core::{Rational, SeriesQ};
use num_traits::Zero;
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Schoolbook `a ∘ b` modulo `X^{n+1}`, written without the library's series ops.
fn naive_compose(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mul = |u: &[Rational], v: &[Rational]| {
        let mut out = vec![Rational::zero(); n + 1];
        for (i, x) in u.iter().enumerate().take(n + 1) {
            for (j, y) in v.iter().enumerate().take(n + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut out = vec![Rational::zero(); n + 1];
    let mut power = vec![Rational::zero(); n + 1];
    power[0] = q(1);
    for c in a.iter().take(n + 1) {
        for (o, p) in out.iter_mut().zip(&power) {
            *o += c * p;
        }
        power = mul(&power, b);
    }
    out
}

fn coeffs_to(s: &SeriesQ, n: usize) -> Vec<Rational> {
    (0..=n).map(|i| s.coeff(i)).collect()
}

/// `c1 X + c2 X^2 + ...` with `c1 != 0`.
fn invertible(prec: usize) -> impl Strategy<Value = SeriesQ> {
    (prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]), prop::collection::vec(-4i64..=4, prec - 1))
        .prop_map(move |(c1, rest)| {
            let mut c = vec![q(0), q(c1)];
            c.extend(rest.into_iter().map(q));
            Series::new(c, prec, ())
        })
}

/// `X^m + higher terms`, integer coefficients.
fn superattracting() -> impl Strategy<Value = (usize, SeriesQ)> {
    (2usize..=4, prop::collection::vec(-3i64..=3, 0..=5)).prop_map(|(m, rest)| {
        let mut c = vec![q(0); m];
        c.push(q(1));
        c.extend(rest.into_iter().map(q));
        (m, Series::new(c, 30, ()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_round_trips(l in invertible(10)) {
        let m = l.inverse().unwrap();
        prop_assert_eq!(m.inverse().unwrap(), l.clone());
        let id = naive_compose(m.coeffs(), l.coeffs(), 10);
        let mut x = vec![q(0); 11];
        x[1] = q(1);
        prop_assert_eq!(id, x);
    }

    #[test]
    fn composition_never_overstates_precision(a in invertible(8), b in invertible(6)) {
        let c = a.compose(&b).unwrap();
        let exact = naive_compose(a.coeffs(), b.coeffs(), c.prec());
        prop_assert_eq!(coeffs_to(&c, c.prec()), exact.clone());
        // perturb both inputs beyond their precision: the claimed digits must not move
        let mut a2 = a.coeffs().to_vec();
        a2.resize(a.prec() + 1, q(0));
        a2.push(q(5));
        let mut b2 = b.coeffs().to_vec();
        b2.resize(b.prec() + 1, q(0));
        b2.push(q(-7));
        let perturbed = naive_compose(&a2, &b2, c.prec());
        prop_assert_eq!(perturbed, exact);
    }

    #[test]
    fn boettcher_conjugates_to_monomial((m, f) in superattracting(), n in 4usize..=12) {
        let l = boettcher(&f, n).unwrap();
        prop_assert_eq!(l.prec(), n);
        // f(L(X)) = L(X^m) modulo X^{n+1}
        let left = naive_compose(f.coeffs(), l.coeffs(), n);
        let mut xm = vec![q(0); n + 1];
        if m <= n {
            xm[m] = q(1);
        }
        let right = naive_compose(l.coeffs(), &xm, n);
        prop_assert_eq!(left, right);
    }
}

#[test]
fn monomials_have_trivial_coordinate() {
    for m in 2..=6 {
        let mut c = vec![q(0); m];
        c.push(q(1));
        let l = boettcher(&Series::new(c, 40, ()), 15).unwrap();
        assert_eq!(l, Series::x(15, &()), "m = {m}");
    }
}
