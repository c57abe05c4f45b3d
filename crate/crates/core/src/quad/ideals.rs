//! Class numbers from ideals, independent of the form-cycle route.
//!
//! Every ideal of norm up to the Minkowski bound `sqrt(disc)/2` is listed.
//! Each one is scaled by a lattice minimum into a reduced ideal, and reduced
//! ideals are walked along their cycle of neighbours, where the neighbour of
//! `b` is `b / mu` for the adjacent minimum `mu` of `1`. Both minima are found
//! by bounded enumeration of lattice points, with exact comparisons of
//! numbers `(x + y sqrt(disc)) / z`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;

/// `(x + y sqrt(disc)) / z` with `z > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Qr {
    x: i128,
    y: i128,
    z: i128,
}

impl Qr {
    fn int(n: i128) -> Qr {
        Qr { x: n, y: 0, z: 1 }
    }

    fn new(x: i128, y: i128, z: i128) -> Qr {
        let (x, y, z) = if z < 0 { (-x, -y, -z) } else { (x, y, z) };
        let g = x.gcd(&y).gcd(&z);
        Qr {
            x: x / g,
            y: y / g,
            z: z / g,
        }
    }

    fn conj(self) -> Qr {
        Qr { y: -self.y, ..self }
    }

    fn neg(self) -> Qr {
        Qr {
            x: -self.x,
            y: -self.y,
            z: self.z,
        }
    }
}

struct Field {
    disc: i128,
    root: f64,
}

impl Field {
    fn new(disc: i128) -> Field {
        Field {
            disc,
            root: (disc as f64).sqrt(),
        }
    }

    /// Sign of `x + y sqrt(disc)`.
    fn sign(&self, x: i128, y: i128) -> Ordering {
        match (x.cmp(&0), y.cmp(&0)) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (Ordering::Greater, Ordering::Less) => (x * x).cmp(&(y * y * self.disc)),
            (Ordering::Less, Ordering::Greater) => (y * y * self.disc).cmp(&(x * x)),
        }
    }

    fn cmp(&self, a: Qr, b: Qr) -> Ordering {
        self.sign(a.x * b.z - b.x * a.z, a.y * b.z - b.y * a.z)
    }

    fn abs(&self, a: Qr) -> Qr {
        if self.sign(a.x, a.y) == Ordering::Less {
            a.neg()
        } else {
            a
        }
    }

    fn add(&self, a: Qr, b: Qr) -> Qr {
        Qr::new(a.x * b.z + b.x * a.z, a.y * b.z + b.y * a.z, a.z * b.z)
    }

    fn mul(&self, a: Qr, b: Qr) -> Qr {
        Qr::new(
            a.x * b.x + self.disc * a.y * b.y,
            a.x * b.y + a.y * b.x,
            a.z * b.z,
        )
    }

    fn inv(&self, a: Qr) -> Qr {
        let n = a.x * a.x - self.disc * a.y * a.y;
        Qr::new(a.x * a.z, -a.y * a.z, n)
    }

    fn approx(&self, a: Qr) -> f64 {
        (a.x as f64 + a.y as f64 * self.root) / a.z as f64
    }

    fn sup_norm(&self, a: Qr) -> Qr {
        let (p, q) = (self.abs(a), self.abs(a.conj()));
        if self.cmp(p, q) == Ordering::Less {
            q
        } else {
            p
        }
    }
}

/// Primitive integral ideal `a Z + (b + sqrt(disc))/2 Z`, `0 <= b < 2a`.
type Key = (i128, i128);

/// The primitive ideal `J` with `Z g1 + Z g2 = q J` for some rational `q`.
fn normalize(g1: Qr, g2: Qr) -> Key {
    let z = g1.z.lcm(&g2.z);
    let (x1, y1) = (g1.x * (z / g1.z), g1.y * (z / g1.z));
    let (x2, y2) = (g2.x * (z / g2.z), g2.y * (z / g2.z));
    let e = y1.extended_gcd(&y2);
    let c = e.gcd.abs();
    let sgn = e.gcd.signum();
    let bx = sgn * (e.x * x1 + e.y * x2);
    let a_full = ((y2 / e.gcd) * x1 - (y1 / e.gcd) * x2).abs();
    assert!(c > 0 && a_full > 0, "degenerate lattice");
    assert!(a_full % (2 * c) == 0 && bx % c == 0, "lattice is not an ideal");
    let a = a_full / (2 * c);
    let b = (bx / c).rem_euclid(2 * a);
    (a, b)
}

fn basis(key: Key) -> (Qr, Qr) {
    let (a, b) = key;
    (Qr::int(1), Qr::new(b, 1, 2 * a))
}

/// Scales `(1/a) J` by its sup-norm minimum, giving a reduced ideal.
fn reduce(field: &Field, key: Key) -> Key {
    let (a, _) = key;
    let (one, beta) = basis(key);
    let mut best = one;
    let mut best_norm = Qr::int(1);
    // |xi - xi'| = v sqrt(disc) / a <= 2, so v <= 2a / sqrt(disc)
    let vmax = (2.0 * a as f64 / field.root).floor() as i128 + 1;
    let beta_f = field.approx(beta);
    for v in 1..=vmax {
        let centre = -(v as f64) * beta_f;
        let lo = (centre - 1.0).floor() as i128 - 1;
        let hi = (centre + 1.0).ceil() as i128 + 1;
        for u in lo..=hi {
            let xi = field.add(Qr::int(u), field.mul(Qr::int(v), beta));
            if xi.x == 0 && xi.y == 0 {
                continue;
            }
            let n = field.sup_norm(xi);
            if field.cmp(n, best_norm) == Ordering::Less {
                best = xi;
                best_norm = n;
            }
        }
    }
    let inv = field.inv(best);
    normalize(field.mul(one, inv), field.mul(beta, inv))
}

/// `b / mu` for the smallest `mu > 1` in `b = (1/a) J` with `|mu'| < 1`.
fn neighbour(field: &Field, key: Key) -> Key {
    let (a, _) = key;
    let (one, beta) = basis(key);
    let step = field.root / a as f64;
    let beta_conj = field.approx(beta.conj());
    let mut best: Option<(Qr, f64)> = None;
    let mut v: i128 = 1;
    loop {
        // mu = mu' + v sqrt(disc) / a > v * step - 1
        if let Some((_, b)) = best {
            if v as f64 * step - 1.0 > b + 1.0 {
                break;
            }
        }
        let centre = -(v as f64) * beta_conj;
        let lo = (centre - 1.0).floor() as i128 - 1;
        let hi = (centre + 1.0).ceil() as i128 + 1;
        for u in lo..=hi {
            let mu = field.add(Qr::int(u), field.mul(Qr::int(v), beta));
            let conj_small = field.cmp(field.abs(mu.conj()), Qr::int(1)) == Ordering::Less;
            let above_one = field.cmp(mu, Qr::int(1)) == Ordering::Greater;
            if conj_small && above_one {
                let better = match best {
                    None => true,
                    Some((cur, _)) => field.cmp(mu, cur) == Ordering::Less,
                };
                if better {
                    best = Some((mu, field.approx(mu)));
                }
            }
        }
        v += 1;
    }
    let (mu, _) = best.expect("adjacent minimum exists");
    let inv = field.inv(mu);
    normalize(field.mul(one, inv), field.mul(beta, inv))
}

/// Primitive ideals of norm `a`.
fn primitive_ideals(disc: i128, a: i128) -> impl Iterator<Item = Key> {
    (0..2 * a).filter_map(move |b| {
        ((b - disc).rem_euclid(2) == 0 && (b * b - disc).rem_euclid(4 * a) == 0).then_some((a, b))
    })
}

/// Wide class number of the (fundamental) discriminant `disc`.
pub(crate) fn class_number(disc: i64) -> u64 {
    let disc = disc as i128;
    let field = Field::new(disc);
    let bound = (field.root / 2.0).floor() as i128;
    let mut class_of: HashMap<Key, Key> = HashMap::new();
    let mut classes: BTreeSet<Key> = BTreeSet::new();
    // every ideal n * J of norm n^2 a <= bound lies in the class of J
    for n in 1..=bound.max(1) {
        for a in 1..=(bound / (n * n)).max(1) {
            if n * n * a > bound.max(1) {
                continue;
            }
            for key in primitive_ideals(disc, a) {
                let start = reduce(&field, key);
                if let Some(c) = class_of.get(&start) {
                    classes.insert(*c);
                    continue;
                }
                let mut cycle = vec![start];
                let mut cur = neighbour(&field, start);
                while cur != start {
                    assert!(cycle.len() < 1_000_000, "runaway cycle");
                    cycle.push(cur);
                    cur = neighbour(&field, cur);
                }
                let id = *cycle.iter().min().unwrap();
                for k in cycle {
                    class_of.insert(k, id);
                }
                classes.insert(id);
            }
        }
    }
    classes.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_of_primitive_basis() {
        for (disc, a, b) in [(12i128, 2i128, 2i128), (316, 3, 2), (5, 1, 1), (8, 1, 0)] {
            let (g1, g2) = basis((a, b));
            assert_eq!(normalize(g1, g2), (a, b));
            // scaling by a rational leaves the key unchanged
            let s = Qr::new(7, 0, 3);
            let f = Field::new(disc);
            assert_eq!(normalize(f.mul(g1, s), f.mul(g2, s)), (a, b));
        }
    }

    #[test]
    fn principal_cycle_returns() {
        let field = Field::new(316);
        let start = reduce(&field, (1, 0));
        let mut cur = neighbour(&field, start);
        let mut steps = 1;
        while cur != start {
            cur = neighbour(&field, cur);
            steps += 1;
            assert!(steps < 100);
        }
    }

    #[test]
    fn known_values() {
        for (disc, h) in [(5i64, 1u64), (8, 1), (12, 1), (40, 2), (60, 2), (316, 3), (328, 4), (136, 2), (229, 3), (904, 8)] {
            assert_eq!(class_number(disc), h, "disc={disc}");
        }
    }
}
