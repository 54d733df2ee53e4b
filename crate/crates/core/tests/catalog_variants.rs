//! Alternative readings of the catalog words do not reproduce the catalog.

use triblock::blockcalc::{parse_word, Collection, Move};
use triblock::catalog::{self, Check, Recipe};
use triblock::markov::EquationId;

fn members_hit(c: &Collection, rec: &Recipe) -> Vec<bool> {
    rec.checks
        .iter()
        .filter_map(|check| match check {
            Check::Member { rank, c1, .. } => {
                Some(c.members().any(|m| m.rank == *rank && &m.c1 == c1))
            }
            _ => None,
        })
        .collect()
}

fn with_move(word: &[Move], at: usize, mv: &str) -> Vec<Move> {
    let mut w = word.to_vec();
    w[at] = mv.parse().unwrap();
    w
}

#[test]
fn x7_2_needs_a_left_first_move() {
    let rec = catalog::recipe(EquationId::X7_2).unwrap();
    let (good, _) = rec.seed.apply_word(&rec.word).unwrap();
    assert!(members_hit(&good, &rec).iter().all(|&h| h));
    let variant = with_move(&rec.word, 0, "R3");
    // A variant that cannot even be applied also fails to reproduce.
    if let Ok((bad, _)) = rec.seed.apply_word(&variant) {
        assert!(!members_hit(&bad, &rec).iter().all(|&h| h));
    }
}

#[test]
fn x8_1_repeated_l1_misses_the_stated_members() {
    let rec = catalog::recipe(EquationId::X8_1).unwrap();
    let last = rec.word.len() - 1;
    let variant = with_move(&rec.word, last, "L1");
    // A variant that cannot even be applied also fails to reproduce.
    if let Ok((bad, _)) = rec.seed.apply_word(&variant) {
        assert!(!members_hit(&bad, &rec).iter().all(|&h| h));
    }
}

#[test]
fn second_solution_words_read_right_to_left_leave_the_minimum() {
    for (id, word) in [(EquationId::X4, "R2 R2 R1"), (EquationId::X8_4, "L1 L1 L2")] {
        let c = catalog::build(id).unwrap();
        let (m, _) = c.apply_word(&parse_word(word).unwrap()).unwrap();
        let mut ranks = m.ranks();
        ranks.sort();
        let minima: Vec<Vec<i64>> = id
            .equation()
            .minimum_solutions()
            .iter()
            .map(|t| {
                let mut v = t.to_vec();
                v.sort();
                v
            })
            .collect();
        assert!(!minima.contains(&ranks), "{id}: {ranks:?}");
    }
}
