use std::collections::BTreeMap;

use serde_json::{json, Value};

/// Orbits of `±(z^2 ⊗ η + m · tz ⊗ η)` under `z ↦ z + t` and sign changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub orientable: bool,
    pub twisted: bool,
    /// `0` for integer coefficients, `2` for `F_2`.
    pub modulus: i64,
    pub representatives: Vec<i64>,
}

impl OrbitReport {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "orientable": self.orientable,
            "twisted": self.twisted,
            "coefficients": if self.modulus == 0 { "Z".to_string() } else { format!("F_{}", self.modulus) },
            "orbits": self.count(),
            "representatives": self.representatives,
        })
    }
}

fn coefficient_modulus(orientable: bool, twisted: bool) -> i64 {
    if twisted || !orientable {
        2
    } else {
        0
    }
}

fn normalize(m: i64, modulus: i64) -> i64 {
    if modulus == 0 {
        m
    } else {
        m.rem_euclid(modulus)
    }
}

/// The coefficient of `tz ⊗ η` after `z ↦ z + t` is applied `times` times:
/// `z^2 ↦ z^2 + 2tz`.
pub fn apply_translation(m: i64, times: i64, modulus: i64) -> i64 {
    normalize(m + 2 * times, modulus)
}

type Move = fn(i64, i64) -> i64;

fn orbits_with(modulus: i64, moves: &[Move]) -> Vec<i64> {
    // over Z every orbit meets the window [-R, R]
    const R: i64 = 8;
    let states: Vec<i64> = if modulus == 0 {
        (-R..=R).collect()
    } else {
        (0..modulus).collect()
    };
    let mut parent: BTreeMap<i64, i64> = states.iter().map(|&s| (s, s)).collect();
    fn find(p: &mut BTreeMap<i64, i64>, x: i64) -> i64 {
        let up = p[&x];
        if up == x {
            return x;
        }
        let root = find(p, up);
        p.insert(x, root);
        root
    }
    for &s in &states {
        for mv in moves {
            let t = mv(s, modulus);
            if parent.contains_key(&t) {
                let (a, b) = (find(&mut parent, s), find(&mut parent, t));
                if a != b {
                    parent.insert(a.max(b), a.min(b));
                }
            }
        }
    }
    let mut classes: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &s in &states {
        let r = find(&mut parent, s);
        classes.entry(r).or_default().push(s);
    }
    let mut reps: Vec<i64> = classes
        .values()
        .map(|c| *c.iter().min_by_key(|&&m| (m.abs(), m < 0)).expect("nonempty"))
        .collect();
    reps.sort_unstable();
    reps
}

pub fn pd2_orbit_reps(orientable: bool, twisted_action: bool) -> OrbitReport {
    let modulus = coefficient_modulus(orientable, twisted_action);
    let moves: [Move; 3] = [
        |m, n| apply_translation(m, 1, n),
        |m, n| apply_translation(m, -1, n),
        |m, n| normalize(-m, n),
    ];
    OrbitReport {
        orientable,
        twisted: twisted_action,
        modulus,
        representatives: orbits_with(modulus, &moves),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_orbits_in_both_modes() {
        for (o, t) in [(true, false), (true, true), (false, false)] {
            let r = pd2_orbit_reps(o, t);
            assert_eq!(r.count(), 2);
            assert_eq!(r.representatives, vec![0, 1]);
        }
    }

    #[test]
    fn generator_order_does_not_matter() {
        let a: [Move; 3] = [|m, n| normalize(-m, n), |m, n| apply_translation(m, -1, n), |m, n| apply_translation(m, 1, n)];
        let b: [Move; 3] = [|m, n| apply_translation(m, 1, n), |m, n| normalize(-m, n), |m, n| apply_translation(m, -1, n)];
        for n in [0, 2] {
            assert_eq!(orbits_with(n, &a), orbits_with(n, &b));
        }
    }

    #[test]
    fn translating_twice_stays_even() {
        assert_eq!(apply_translation(0, 2, 2), 0);
        assert_eq!(apply_translation(0, 2, 0) % 2, 0);
    }
}
