use ffstark_core::classgrp::{class_group_presentation, structural_checks};
use ffstark_core::ffield::Field;
use ffstark_core::lfunc::{leading_term, theta_st, Scenario};
use ffstark_core::places::{enumerate_places, Place};
use ffstark_core::rubin::{canonical_places, check_conjectures, lambda_lattice, regulator_map, solve_stark, wedge_space};
use ffstark_core::units::{s_units, st_units};
use ffstark_core::BigInt;

fn run(nu: usize, s: Vec<Place>, t: Vec<Place>, r: usize) {
    let sc = Scenario::new(&Field::prime(2).unwrap(), nu, s.clone(), t.clone(), r, vec![BigInt::from(1)]).unwrap();
    assert!(sc.hypotheses_hold());
    let td = theta_st(&sc).unwrap();
    let s_k: Vec<Place> = sc.s_k().into_iter().flat_map(|(_, w)| w).collect();
    let t_k: Vec<Place> = sc.t_k().into_iter().flat_map(|(_, w)| w).collect();
    let u = st_units(&sc.ext, &s_units(&sc.ext, &s_k), &t_k).unwrap();
    let ws = wedge_space(&u, r, &td.r_map, nu).unwrap();
    let reg = regulator_map(&sc.ext, &u, &ws, &canonical_places(&sc).unwrap()).unwrap();
    let a = leading_term(&td, r).unwrap();
    let eps = solve_stark(&a.to_rational(), &ws, &reg).unwrap();
    let lam = lambda_lattice(&u, &ws).unwrap();
    let cd = class_group_presentation(&sc, None).unwrap();
    let v = check_conjectures(&eps, &lam, &cd.fitting, &ws);
    assert!(v.all_hold(), "nu={nu} S={s:?} T={t:?} r={r}: {v:?}");
    let checks = structural_checks(&cd, &sc).unwrap();
    assert!(checks.iter().all(|c| c.passed), "{checks:?}");
}

#[test]
fn small_family_verdicts_hold() {
    let places = enumerate_places(&Field::prime(2).unwrap(), 4);
    let mut count = 0;
    for nu in [2, 3, 4] {
        for (i, a) in places.iter().enumerate() {
            for b in places.iter().skip(i + 1) {
                for t in places.iter().filter(|p| p.degree() <= 3 && *p != a && *p != b).take(2) {
                    for r in 0..=2 {
                        let s = vec![a.clone(), b.clone()];
                        let split = s.iter().filter(|p| p.degree() % nu == 0).count();
                        if s.len() > r && split >= r {
                            run(nu, s, vec![t.clone()], r);
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(count > 50);
}

#[test]
fn rank_two_verdicts_hold() {
    let places = enumerate_places(&Field::prime(2).unwrap(), 4);
    let mut count = 0;
    for nu in [2, 4] {
        let split: Vec<&Place> = places.iter().filter(|p| p.degree() % nu == 0).collect();
        for (i, a) in split.iter().enumerate() {
            for b in split.iter().skip(i + 1) {
                for c in places.iter().filter(|p| p != a && p != b).take(3) {
                    let t = places.iter().find(|p| p.degree() <= 3 && *p != *a && *p != *b && *p != c).unwrap();
                    run(nu, vec![(*a).clone(), (*b).clone(), c.clone()], vec![t.clone()], 2);
                    count += 1;
                }
            }
        }
    }
    assert!(count > 5);
}

#[test]
fn verdicts_do_not_depend_on_chosen_places() {
    let sc = Scenario::new(
        &Field::prime(2).unwrap(),
        2,
        vec![Place::Infinite, Place::Finite(vec![1, 1, 1])],
        vec![Place::Finite(vec![0, 1])],
        1,
        vec![BigInt::from(1)],
    )
    .unwrap();
    let td = theta_st(&sc).unwrap();
    let s_k: Vec<Place> = sc.s_k().into_iter().flat_map(|(_, w)| w).collect();
    let t_k: Vec<Place> = sc.t_k().into_iter().flat_map(|(_, w)| w).collect();
    let u = st_units(&sc.ext, &s_units(&sc.ext, &s_k), &t_k).unwrap();
    let ws = wedge_space(&u, 1, &td.r_map, 2).unwrap();
    let a = leading_term(&td, 1).unwrap().to_rational();
    let lam = lambda_lattice(&u, &ws).unwrap();
    let fitt = class_group_presentation(&sc, None).unwrap().fitting;
    let mut outcomes = Vec::new();
    for w in [Place::Finite(vec![2, 1]), Place::Finite(vec![3, 1])] {
        let reg = regulator_map(&sc.ext, &u, &ws, &[w]).unwrap();
        let eps = solve_stark(&a, &ws, &reg).unwrap();
        let v = check_conjectures(&eps, &lam, &fitt, &ws);
        outcomes.push((eps, v.all_hold()));
    }
    assert_ne!(outcomes[0].0, outcomes[1].0);
    assert!(outcomes.iter().all(|(_, ok)| *ok));
}

#[test]
fn fitting_ideal_grows_when_split_places_join_s() {
    let base = Field::prime(2).unwrap();
    let t = vec![Place::Finite(vec![1, 1, 0, 1])];
    let small = Scenario::new(&base, 2, vec![Place::Infinite], t.clone(), 0, vec![BigInt::from(1)]).unwrap();
    let big = Scenario::new(&base, 2, vec![Place::Infinite, Place::Finite(vec![1, 1, 1])], t, 0, vec![BigInt::from(1)]).unwrap();
    let f_small = class_group_presentation(&small, None).unwrap().fitting;
    let f_big = class_group_presentation(&big, None).unwrap().fitting;
    assert!(f_big.contains(&f_small, &Default::default()));
    assert!(f_small.is_sigma_stable() && f_big.is_sigma_stable());
}
