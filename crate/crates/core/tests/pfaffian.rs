//! Tableau computations against brute-force linear algebra.

mod common;

use cartan::expr::{Chart, Expression};
use cartan::pfaffian::{absorb_torsion, cartan_characters, StructureEquations};
use common::*;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Tableau = Vec<Vec<Vec<BigRational>>>;

fn random_tableau(rng: &mut StdRng, a: usize, r: usize, n: usize) -> Tableau {
    (0..a)
        .map(|_| {
            (0..r)
                .map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { q(0, 1) } else { q(rng.gen_range(-3..=3), 1) }).collect())
                .collect()
        })
        .collect()
}

fn lift(t: &Tableau) -> Vec<Vec<Vec<Expression>>> {
    t.iter()
        .map(|x| x.iter().map(|y| y.iter().cloned().map(Expression::rational).collect()).collect())
        .collect()
}

fn zero_torsion(a: usize, n: usize) -> Vec<Vec<Vec<Expression>>> {
    vec![vec![vec![Expression::zero(); n]; n]; a]
}

/// `s_1 + .. + s_k` as the best rank over many random flags.
fn brute_force_characters(t: &Tableau, n: usize, rng: &mut StdRng) -> Vec<usize> {
    let r = t.first().map_or(0, Vec::len);
    let mut best = vec![0usize; n + 1];
    for _ in 0..100 {
        let flag: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        for k in 1..=n {
            let mut rows = Vec::new();
            for block in t {
                for v in &flag[..k] {
                    rows.push(
                        (0..r)
                            .map(|rho| (0..n).fold(q(0, 1), |acc, i| acc + &block[rho][i] * q(v[i], 1)))
                            .collect(),
                    );
                }
            }
            best[k] = best[k].max(rank_q(rows));
        }
    }
    (1..=n).map(|k| best[k] - best[k - 1]).collect()
}

/// Rows of the homogeneous absorption system, unknown `λ^ρ_i` at `ρ n + i`.
fn absorption_rows(t: &Tableau, n: usize) -> Vec<Vec<BigRational>> {
    let r = t.first().map_or(0, Vec::len);
    let mut rows = Vec::new();
    for block in t {
        for j in 0..n {
            for k in j + 1..n {
                let mut row = vec![q(0, 1); r * n];
                for rho in 0..r {
                    row[rho * n + k] += &block[rho][j];
                    row[rho * n + j] -= &block[rho][k];
                }
                rows.push(row);
            }
        }
    }
    rows
}

/// `dim {A λ : λ solves the homogeneous system}` from ranks alone.
fn brute_force_prolongation(t: &Tableau, n: usize) -> usize {
    let r = t.first().map_or(0, Vec::len);
    let l = absorption_rows(t, n);
    let mut image = Vec::new();
    for block in t {
        for i in 0..n {
            for k in 0..n {
                let mut row = vec![q(0, 1); r * n];
                for rho in 0..r {
                    row[rho * n + k] = block[rho][i].clone();
                }
                image.push(row);
            }
        }
    }
    let rank_l = if l.is_empty() { 0 } else { rank_q(l.clone()) };
    let mut stacked = l;
    stacked.extend(image);
    rank_q(stacked) - rank_l
}

/// Coefficient vectors of linear forms in the chart coordinates.
fn linear_coefficients(chart: &Chart, forms: &[Expression]) -> Vec<Vec<BigRational>> {
    forms
        .iter()
        .map(|f| {
            (0..chart.dim())
                .map(|c| val(&f.partial(chart, chart.basis_var(c)).unwrap()))
                .collect()
        })
        .collect()
}

#[test]
fn characters_of_two_by_two_by_two_tableaux() {
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..100 {
        let t = random_tableau(&mut rng, 2, 2, 2);
        let eq = StructureEquations::from_parts(lift(&t), zero_torsion(2, 2));
        let report = cartan_characters(&eq);
        assert_eq!(report.characters, brute_force_characters(&t, 2, &mut rng), "tableau {t:?}");
        assert_eq!(report.prolonged_dim, brute_force_prolongation(&t, 2), "tableau {t:?}");
        assert_eq!(report.involutive, report.prolonged_dim == report.cartan_bound());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characters_match_brute_force(seed in any::<u64>(), a in 1usize..=2, r in 1usize..=3, n in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = random_tableau(&mut rng, a, r, n);
        let eq = StructureEquations::from_parts(lift(&t), zero_torsion(a, n));
        let report = cartan_characters(&eq);
        prop_assert!(report.characters.iter().sum::<usize>() <= r);
        prop_assert_eq!(report.characters.clone(), brute_force_characters(&t, n, &mut rng));
        prop_assert_eq!(report.prolonged_dim, brute_force_prolongation(&t, n));
        // Cartan's inequality.
        prop_assert!(report.prolonged_dim <= report.cartan_bound());
    }

    #[test]
    fn absorption_agrees_with_solvability(seed in any::<u64>(), a in 1usize..=3, r in 0usize..=3, n in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = random_tableau(&mut rng, a, r, n);
        let mut torsion = vec![vec![vec![q(0, 1); n]; n]; a];
        for tk in torsion.iter_mut() {
            for j in 0..n {
                for k in j + 1..n {
                    tk[j][k] = if rng.gen_bool(0.5) { q(0, 1) } else { small_rational(&mut rng) };
                }
            }
        }
        let eq = StructureEquations::from_parts(lift(&t), lift(&torsion));
        let sol = absorb_torsion(&eq);
        let solvable = absorption_solvable(&t, &torsion, n, r);
        prop_assert_eq!(sol.essential_torsion().is_empty(), solvable);
        if solvable {
            prop_assert!(sol.absorbed(&eq).torsion_is_zero());
        }
    }

    #[test]
    fn essential_torsion_ignores_unknown_order(seed in any::<u64>(), a in 1usize..=2, r in 1usize..=3, n in 2usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = random_tableau(&mut rng, a, r, n);
        // Generic torsion: one coordinate per component.
        let names: Vec<String> = (0..a * n * n).map(|i| format!("t{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let chart = Chart::new(&refs, &[]).unwrap();
        let torsion: Vec<Vec<Vec<Expression>>> = (0..a)
            .map(|al| (0..n).map(|j| (0..n).map(|k| chart.sym(&names[(al * n + j) * n + k]).unwrap()).collect()).collect())
            .collect();
        let mut perm: Vec<usize> = (0..r).collect();
        for i in (1..r).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let permuted: Tableau = t.iter().map(|block| perm.iter().map(|&p| block[p].clone()).collect()).collect();

        let e1 = absorb_torsion(&StructureEquations::from_parts(lift(&t), torsion.clone())).essential_torsion();
        let e2 = absorb_torsion(&StructureEquations::from_parts(lift(&permuted), torsion)).essential_torsion();
        let (c1, c2) = (linear_coefficients(&chart, &e1), linear_coefficients(&chart, &e2));
        let rows = absorption_rows(&t, n);
        let expected = rows.len() - if rows.is_empty() { 0 } else { rank_q(rows) };
        let rank = |m: Vec<Vec<BigRational>>| if m.is_empty() { 0 } else { rank_q(m) };
        prop_assert_eq!(rank(c1.clone()), expected);
        prop_assert_eq!(rank(c2.clone()), expected);
        let mut both = c1;
        both.extend(c2);
        prop_assert_eq!(rank(both), expected);
    }
}
