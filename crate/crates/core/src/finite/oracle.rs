use super::{FiniteArena, FiniteError};
use crate::ptga::Owner;
use crate::rational::Rational;

/// Number of positional profiles of `arena`, saturating.
fn profile_count(arena: &FiniteArena) -> u128 {
    (0..arena.len()).fold(1u128, |acc, v| acc.saturating_mul(arena.out(v).len() as u128))
}

/// Mean of the cycle that the play from `s` eventually repeats under `succ`.
fn lasso_mean(arena: &FiniteArena, choice: &[usize], s: usize) -> Rational {
    let mut pos = vec![usize::MAX; arena.len()];
    let mut path = Vec::new();
    let mut v = s;
    while pos[v] == usize::MAX {
        pos[v] = path.len();
        path.push(v);
        v = arena.edge(choice[v]).to;
    }
    let cycle = &path[pos[v]..];
    let total: Rational = cycle.iter().map(|&u| arena.edge(choice[u]).weight.clone()).sum();
    total / Rational::from_integer(cycle.len().into())
}

/// Advances `idx` like an odometer over the given positions; false once it wraps around.
fn next_profile(arena: &FiniteArena, positions: &[usize], idx: &mut [usize]) -> bool {
    for &v in positions {
        idx[v] += 1;
        if idx[v] < arena.out(v).len() {
            return true;
        }
        idx[v] = 0;
    }
    false
}

/// Per node: the minimum over Min's positional strategies of the maximum over Max's
/// positional strategies of the lasso mean.
pub fn enumerate_oracle_finite(arena: &FiniteArena, cap: u64) -> Result<Vec<Rational>, FiniteError> {
    let count = profile_count(arena);
    if count > cap as u128 {
        return Err(FiniteError::ProfileSpaceTooLarge { count: count.to_string(), cap });
    }
    let n = arena.len();
    let mins: Vec<usize> = (0..n).filter(|&v| arena.owner(v) == Owner::Min).collect();
    let maxs: Vec<usize> = (0..n).filter(|&v| arena.owner(v) == Owner::Max).collect();
    let mut value: Vec<Option<Rational>> = vec![None; n];
    let mut idx = vec![0usize; n];
    loop {
        let mut best_for_max: Vec<Option<Rational>> = vec![None; n];
        loop {
            let choice: Vec<usize> = (0..n).map(|v| arena.out(v)[idx[v]]).collect();
            for (s, slot) in best_for_max.iter_mut().enumerate() {
                let m = lasso_mean(arena, &choice, s);
                if slot.as_ref().is_none_or(|x| m > *x) {
                    *slot = Some(m);
                }
            }
            if !next_profile(arena, &maxs, &mut idx) {
                break;
            }
        }
        for (s, m) in best_for_max.into_iter().enumerate() {
            let m = m.expect("at least one profile");
            if value[s].as_ref().is_none_or(|x| m < *x) {
                value[s] = Some(m);
            }
        }
        if !next_profile(arena, &mins, &mut idx) {
            break;
        }
    }
    Ok(value.into_iter().map(|v| v.expect("evaluated")).collect())
}
