//! Parser against an independent evaluator, and render/parse round trips.

use std::collections::HashMap;

use cartan::expr::{Chart, Expression, Var};
use cartan::problems::{ode2_chart, ode_system_chart, pde_system_chart, run_equivalence_ode2, syzygies_ode2, Ode2Problem};
use cartan_cli::parse_expression;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A random expression as text, with its value at `point` computed
/// alongside; `None` once a division by zero occurs.
fn random_text(
    rng: &mut StdRng,
    names: &[&str],
    point: &HashMap<&str, BigRational>,
    depth: u32,
) -> (String, Option<BigRational>) {
    let pad = |rng: &mut StdRng| if rng.gen_bool(0.3) { " " } else { "" };
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.4) {
            let n = rng.gen_range(0..=9);
            if rng.gen_bool(0.3) {
                let d = rng.gen_range(1..=4);
                (format!("({n}/{d})"), Some(q(n, d)))
            } else {
                (n.to_string(), Some(q(n, 1)))
            }
        } else {
            let v = names[rng.gen_range(0..names.len())];
            (v.to_string(), Some(point[v].clone()))
        };
    }
    let (a, va) = random_text(rng, names, point, depth - 1);
    let (sp, sq) = (pad(rng), pad(rng));
    match rng.gen_range(0..6) {
        4 => {
            let e = rng.gen_range(0..=3);
            let v = va.map(|x| (0..e).fold(BigRational::one(), |acc, _| acc * &x));
            (format!("({a}){sp}^{sq}{e}"), v)
        }
        5 => (format!("-{sp}({a})"), va.map(|x| -x)),
        op => {
            let (b, vb) = random_text(rng, names, point, depth - 1);
            let c = ['+', '-', '*', '/'][op];
            let v = match (va, vb) {
                (Some(x), Some(y)) => match c {
                    '+' => Some(x + y),
                    '-' => Some(x - y),
                    '*' => Some(x * y),
                    _ if y.is_zero() => None,
                    _ => Some(x / y),
                },
                _ => None,
            };
            (format!("({a}){sp}{c}{sq}({b})"), v)
        }
    }
}

fn random_expr(rng: &mut StdRng, leaves: &[Expression]) -> Expression {
    let mut poly = |terms: usize| {
        (0..terms).fold(Expression::zero(), |acc, _| {
            let mut t = Expression::rational(q(rng.gen_range(-7..=7), rng.gen_range(1..=5)));
            for _ in 0..rng.gen_range(0..=3) {
                t = t * &leaves[rng.gen_range(0..leaves.len())];
            }
            acc + t
        })
    };
    let num = poly(4);
    let den = poly(2);
    num.checked_div(&den).unwrap_or(num)
}

fn jet_leaves(chart: &Chart, func: &str, wrt: &[&[&str]]) -> Vec<Expression> {
    let mut out: Vec<Expression> = chart.coords().iter().chain(chart.params()).map(|n| chart.sym(n).unwrap()).collect();
    out.extend(wrt.iter().map(|w| chart.fun(func, w).unwrap()));
    out
}

fn round_trips(chart: &Chart, e: &Expression) -> bool {
    let text = chart.display(e).to_string();
    parse_expression(&text, chart).as_ref() == Ok(e)
}

#[test]
fn worked_examples() {
    let c = ode2_chart();
    let (x, y, p) = (c.sym("x").unwrap(), c.sym("y").unwrap(), c.sym("p").unwrap());
    let parse = |s| parse_expression(s, &c).unwrap();
    assert_eq!(parse("6*y^2 + x"), Expression::int(6) * y.pow(2) + &x);
    assert_eq!(parse("-p^2/y"), (-p.pow(2)).checked_div(&y).unwrap());
    let expanded = Expression::int(6) * (y.pow(2) + Expression::int(2) * &x * &y + x.pow(2)) + &x;
    assert_eq!(parse("6*(y+x)^2 + x"), expanded);
    assert_eq!(c.display(&parse("6*(y+x)^2 + x")).to_string(), "6*x^2 + 12*x*y + 6*y^2 + x");
}

#[test]
fn library_outputs_round_trip() {
    let rep = run_equivalence_ode2(&Ode2Problem::symbolic().f).unwrap();
    for e in &rep.invariants {
        assert!(round_trips(rep.chart(), e), "{}", rep.chart().display(e));
    }
    let syz = syzygies_ode2(&rep).unwrap();
    for r in &syz.relations {
        assert!(round_trips(&syz.chart, r), "{}", syz.chart.display(r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parsed_text_evaluates_like_the_tree(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let chart = ode_system_chart();
        let names = ["t", "x1", "dx2", "F1_dx1"];
        let point: HashMap<&str, BigRational> =
            names.iter().map(|&n| (n, q(rng.gen_range(-9..=9), rng.gen_range(1..=4)))).collect();
        let (text, value) = random_text(&mut rng, &names, &point, 4);
        let Ok(e) = parse_expression(&text, &chart) else {
            // Only a division by an identically zero subexpression may fail.
            prop_assert!(value.is_none(), "{text}");
            return Ok(());
        };
        let at: HashMap<Var, BigRational> =
            names.iter().map(|&n| (chart.resolve(n).unwrap(), point[n].clone())).collect();
        if let (Some(v), Some(w)) = (value, e.eval(&|var| at[&var].clone())) {
            prop_assert_eq!(v, w, "{}", text);
        }
    }

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (chart, leaves) = match which {
            0 => {
                let c = ode2_chart();
                let l = jet_leaves(&c, "f", &[&[], &["p"], &["y", "p"], &["p", "p", "p"]]);
                (c, l)
            }
            1 => {
                let c = ode_system_chart();
                let l = jet_leaves(&c, "F2", &[&["dx1"], &["dx1", "dx2", "t"]]);
                (c, l)
            }
            _ => {
                let c = pde_system_chart();
                let l = jet_leaves(&c, "f12", &[&[], &["u1", "u2"]]);
                (c, l)
            }
        };
        let e = random_expr(&mut rng, &leaves);
        prop_assert!(round_trips(&chart, &e), "{}", chart.display(&e));
    }
}
