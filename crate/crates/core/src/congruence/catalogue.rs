use crate::exactmath::{Poly, RatFunc};
use crate::sequences::{Bound, Factor, SumFormula};
use crate::telescoper::{reference, TelescoperCertificate};

use super::{CongruenceClaim, Domain, Expr, Parity};

fn formula(num: &str, den: &str, factors: Vec<Factor>, lower: &str, upper: &str) -> SumFormula {
    let coeff = RatFunc::new(
        Poly::parse(num).expect("valid polynomial literal"),
        Poly::parse(den).expect("valid polynomial literal"),
    )
    .expect("nonzero denominator");
    SumFormula::new(
        factors,
        coeff,
        Bound::parse(lower).expect("valid bound"),
        Bound::parse(upper).expect("valid bound"),
    )
}

/// `Σ_{k<n} (8k+9) W_k^2`.
fn w_square_sum() -> SumFormula {
    formula("8k+9", "1", vec![Factor::seq("W", "k"), Factor::seq("W", "k")], "0", "n-1")
}

/// `Σ_{k<n} k(k+1)(8k+9) T_k T_{k+1}`.
fn t_cross_sum() -> SumFormula {
    formula("k(k+1)(8k+9)", "1", vec![Factor::seq("T", "k"), Factor::seq("T", "k+1")], "0", "n-1")
}

/// `Σ_{k<n} (k+1)(16k+21) T_k T_{k+1}`.
fn t_weighted_sum() -> SumFormula {
    formula("(k+1)(16k+21)", "1", vec![Factor::seq("T", "k"), Factor::seq("T", "k+1")], "0", "n-1")
}

/// Each sum that has a known antidifference, with that certificate.
pub fn telescoped_sums() -> Vec<(SumFormula, TelescoperCertificate)> {
    vec![
        (w_square_sum(), reference::w_square()),
        (t_cross_sum(), reference::t_cross_lower()),
        (t_cross_sum(), reference::t_cross_upper()),
        (t_weighted_sum(), reference::t_weighted()),
    ]
}

fn integers(from: i64) -> Domain {
    Domain::Integers {
        from,
        exclude: vec![],
    }
}

fn primes(min: i64) -> Domain {
    Domain::Primes {
        min,
        exclude: vec![],
        parity: Parity::Odd,
    }
}

fn claim(id: &str, description: &str, lhs: Expr, rhs: Expr, modulus: Option<Expr>, domain: Domain, range: (i64, i64)) -> CongruenceClaim {
    CongruenceClaim {
        id: id.to_string(),
        description: description.to_string(),
        lhs,
        rhs,
        modulus,
        domain,
        range,
        edge_points: vec![],
        notes: vec![],
    }
}

fn sym(top: Expr, bottom: Expr) -> Expr {
    Expr::legendre(top, bottom)
}

/// `(p/3)`.
fn p_over_3() -> Expr {
    sym(Expr::N, Expr::int(3))
}

/// `(-3/p)`.
fn minus_three_over_p() -> Expr {
    sym(Expr::int(-3), Expr::N)
}

/// `(-1/p)`.
fn minus_one_over_p() -> Expr {
    sym(Expr::int(-1), Expr::N)
}

fn ab(x: i64, y: i64) -> Expr {
    Expr::int(x) * minus_three_over_p() + Expr::int(y) * minus_one_over_p()
}

fn binomial_trinomial(m: i64) -> CongruenceClaim {
    let lhs = formula(
        "1",
        "1",
        vec![
            Factor::binom("n-1", "k"),
            Factor::binom("2k", "k"),
            Factor::pow(-1, "k"),
            Factor::pow(m, "n-1-k"),
        ],
        "0",
        "n-1",
    );
    let rhs = formula(
        "1",
        "1",
        vec![
            Factor::binom("n-1", "k"),
            Factor::binom("n-1-k", "k"),
            Factor::pow(m - 2, "n-1-2k"),
        ],
        "0",
        "floor((n-1)/2)",
    );
    claim(
        &format!("binomial-trinomial[m={m}]"),
        &format!("binomial-trinomial identity with m = {m}"),
        Expr::Sum(lhs),
        Expr::Sum(rhs),
        None,
        integers(1),
        (1, 40),
    )
}

/// The full catalogue of claims with their default ranges.
pub fn builtin_claims() -> Vec<CongruenceClaim> {
    let central = || Factor::binom("2k", "k");
    let mut out = vec![
        claim(
            "w-square-mod-2n",
            "sum_{k<n} (8k+9) W_k^2 ≡ n (mod 2n)",
            Expr::Sum(w_square_sum()),
            Expr::N,
            Some(Expr::poly("2n")),
            integers(1),
            (1, 500),
        ),
        {
            let mut c = claim(
                "w-square-mod-p",
                "(1/p) sum_{k<p} (8k+9) W_k^2 ≡ 24 + 10(-1/p) - 9(p/3) - 18(3/p) (mod p)",
                Expr::div(Expr::Sum(w_square_sum()), Expr::N),
                Expr::int(24) + Expr::int(10) * minus_one_over_p()
                    - Expr::int(9) * p_over_3()
                    - Expr::int(18) * sym(Expr::int(3), Expr::N),
                Some(Expr::N),
                primes(3),
                (3, 999),
            );
            c.notes.push("p = 3 is part of the domain".into());
            c
        },
        {
            let mut c = claim(
                "t-cross-divisibility",
                "n^2(n^2-1)/6 divides sum_{k<n} k(k+1)(8k+9) T_k T_{k+1}",
                Expr::Sum(t_cross_sum()),
                Expr::int(0),
                Some(Expr::poly("n^2(n^2-1)/6")),
                integers(1),
                (1, 300),
            );
            c.notes.push("at n = 1 the modulus is 0 and the sum must vanish".into());
            c
        },
        claim(
            "t-cross-mod-p3",
            "sum_{k<p} k(k+1)(8k+9) T_k T_{k+1} ≡ -p^2 (53/12 + 21/4 (p/3)) (mod p^3)",
            Expr::Sum(t_cross_sum()),
            Expr::poly("-n^2") * (Expr::rat(53, 12) + Expr::rat(21, 4) * p_over_3()),
            Some(Expr::poly("n^3")),
            primes(5),
            (5, 300),
        ),
        claim(
            "t-weighted-mod-n2",
            "2 sum_{k<n} (k+1)(16k+21) T_k T_{k+1} ≡ 9n T_{n-1} T_n (mod n^2)",
            Expr::int(2) * Expr::Sum(t_weighted_sum()),
            Expr::poly("9n") * Expr::seq("T", "n-1") * Expr::seq("T", "n"),
            Some(Expr::poly("n^2")),
            integers(1),
            (1, 500),
        ),
        {
            let mut c = claim(
                "t-weighted-mod-p3",
                "sum_{k<p} (k+1)(16k+21) T_k T_{k+1} ≡ p 3^{p+1}/2 (p/3) + p^2 (17/4 + 57/4 (p/3)) (mod p^3)",
                Expr::Sum(t_weighted_sum()),
                Expr::N * Expr::pow(3, "n+1") * Expr::rat(1, 2) * p_over_3()
                    + Expr::poly("n^2") * (Expr::rat(17, 4) + Expr::rat(57, 4) * p_over_3()),
                Some(Expr::poly("n^3")),
                primes(5),
                (2, 300),
            );
            c.edge_points.push(2);
            c.notes.push(
                "stated for every prime p other than 3; at p = 2 the sum is 243 and the right side \
                 is -67, which are 3 and 5 modulo 8, so p = 2 is reported as an edge point"
                    .into(),
            );
            c
        },
        claim(
            "w-p-mod-p2",
            "W_p ≡ -1 - p(1 + 3a - 4b) (mod p^2), a = (-3/p), b = (-1/p)",
            Expr::seq("W", "n"),
            Expr::int(-1) - Expr::N * (Expr::int(1) + ab(3, -4)),
            Some(Expr::poly("n^2")),
            primes(5),
            (5, 999),
        ),
        claim(
            "w-p-minus-1-mod-p",
            "W_{p-1} ≡ 3a - 4b (mod p)",
            Expr::seq("W", "n-1"),
            ab(3, -4),
            Some(Expr::N),
            primes(5),
            (5, 999),
        ),
        claim(
            "w-p-minus-2-mod-p",
            "W_{p-2} ≡ 7a - 8b (mod p)",
            Expr::seq("W", "n-2"),
            ab(7, -8),
            Some(Expr::N),
            primes(5),
            (5, 999),
        ),
        claim(
            "central-over-k-half",
            "sum_{k=1}^{(p-1)/2} binom(2k,k)/k ≡ 0 (mod p)",
            Expr::Sum(formula("1", "k", vec![central()], "1", "floor((n-1)/2)")),
            Expr::int(0),
            Some(Expr::N),
            primes(5),
            (5, 500),
        ),
        claim(
            "central-over-k-full",
            "sum_{k=1}^{p-1} binom(2k,k)/k ≡ 0 (mod p)",
            Expr::Sum(formula("1", "k", vec![central()], "1", "n-1")),
            Expr::int(0),
            Some(Expr::N),
            primes(5),
            (5, 500),
        ),
        claim(
            "central-binomial-sum",
            "sum_{k=0}^{(p-1)/2} binom(2k,k) ≡ (p/3) (mod p)",
            Expr::Sum(formula("1", "1", vec![central()], "0", "floor((n-1)/2)")),
            p_over_3(),
            Some(Expr::N),
            primes(5),
            (5, 999),
        ),
        claim(
            "middle-binomial",
            "binom(p-1, (p-1)/2) ≡ (-1)^{(p-1)/2} (mod p)",
            Expr::binom("n-1", "floor((n-1)/2)"),
            Expr::pow(-1, "floor((n-1)/2)"),
            Some(Expr::N),
            primes(5),
            (5, 999),
        ),
        claim(
            "central-over-odd",
            "sum_{k=0}^{(p-1)/2} binom(2k,k)/(2k-1) ≡ 3a - 4b (mod p)",
            Expr::Sum(formula("1", "2k-1", vec![central()], "0", "floor((n-1)/2)")),
            ab(3, -4),
            Some(Expr::N),
            primes(5),
            (5, 999),
        ),
        claim(
            "central-telescoping",
            "3 binom(2k,k) - binom(2k,k)/(2k-1) = Δ_k (2k/(2k-1) binom(2k,k))",
            Expr::int(3) * Expr::binom("2n", "n")
                - Expr::div(Expr::binom("2n", "n"), Expr::poly("2n-1")),
            Expr::div(Expr::poly("2n+2"), Expr::poly("2n+1")) * Expr::binom("2n+2", "n+1")
                - Expr::div(Expr::poly("2n"), Expr::poly("2n-1")) * Expr::binom("2n", "n"),
            None,
            integers(0),
            (0, 200),
        ),
        claim(
            "trinomial-p-identity",
            "T_n - 1 = (n/2) sum_{k=1}^{floor(n/2)} binom(n-1,2k-1) binom(2k,k)/k",
            Expr::seq("T", "n") - Expr::int(1),
            Expr::poly("n/2")
                * Expr::Sum(formula(
                    "1",
                    "k",
                    vec![Factor::binom("n-1", "2k-1"), central()],
                    "1",
                    "floor(n/2)",
                )),
            None,
            integers(1),
            (1, 200),
        ),
        claim(
            "trinomial-p-mod-p2",
            "T_p ≡ 1 (mod p^2)",
            Expr::seq("T", "n"),
            Expr::int(1),
            Some(Expr::poly("n^2")),
            primes(5),
            (5, 500),
        ),
        claim(
            "minus-three-sum",
            "sum_{k<p} binom(p-1,k) binom(2k,k)/(-3)^k ≡ (p/3) (mod p^2)",
            Expr::Sum(minus_three_sum()),
            p_over_3(),
            Some(Expr::poly("n^2")),
            primes(5),
            (5, 300),
        ),
        claim(
            "trinomial-p-minus-1-identity",
            "T_{n-1} = 3^{n-1} sum_{k<n} binom(n-1,k) binom(2k,k)/(-3)^k",
            Expr::seq("T", "n-1"),
            Expr::pow(3, "n-1") * Expr::Sum(minus_three_sum()),
            None,
            integers(1),
            (1, 200),
        ),
        claim(
            "trinomial-p-minus-1-mod-p2",
            "T_{p-1} ≡ 3^{p-1} (p/3) (mod p^2)",
            Expr::seq("T", "n-1"),
            Expr::pow(3, "n-1") * p_over_3(),
            Some(Expr::poly("n^2")),
            primes(5),
            (5, 300),
        ),
        claim(
            "trinomial-difference",
            "T_{n+1} - 3T_n ≡ 0 (mod n-1)",
            Expr::seq("T", "n+1") - Expr::int(3) * Expr::seq("T", "n"),
            Expr::int(0),
            Some(Expr::poly("n-1")),
            integers(2),
            (2, 500),
        ),
        claim(
            "t-recurrence",
            "3(n-1) t_{n-2} + 2(n-1) t_{n-1} - (n+1) t_n = 0, t_n = (T_{n+1} - 3T_n)/2",
            Expr::poly("3n-3") * Expr::seq("t", "n-2") + Expr::poly("2n-2") * Expr::seq("t", "n-1")
                - Expr::poly("n+1") * Expr::seq("t", "n"),
            Expr::int(0),
            None,
            integers(2),
            (2, 100),
        ),
        claim(
            "w-odd",
            "W_n is odd",
            Expr::seq("W", "n"),
            Expr::int(1),
            Some(Expr::int(2)),
            integers(0),
            (0, 500),
        ),
        claim(
            "t-odd",
            "T_n is odd",
            Expr::seq("T", "n"),
            Expr::int(1),
            Some(Expr::int(2)),
            integers(0),
            (0, 500),
        ),
        claim(
            "w-pair-mod-4",
            "(W_{n-1} + W_n)(W_{n-1} + W_{n-2}) ≡ 0 (mod 4)",
            (Expr::seq("W", "n-1") + Expr::seq("W", "n"))
                * (Expr::seq("W", "n-1") + Expr::seq("W", "n-2")),
            Expr::int(0),
            Some(Expr::int(4)),
            integers(2),
            (2, 500),
        ),
    ];
    out.extend((-5..=5).map(binomial_trinomial));
    out
}

fn minus_three_sum() -> SumFormula {
    formula(
        "1",
        "1",
        vec![
            Factor::binom("n-1", "k"),
            Factor::binom("2k", "k"),
            Factor::pow(-3, "-k"),
        ],
        "0",
        "n-1",
    )
}

pub fn claim_by_id(id: &str) -> Option<CongruenceClaim> {
    builtin_claims().into_iter().find(|c| c.id == id)
}
