//! Class numbers from cycles of reduced indefinite binary quadratic forms.

use std::collections::HashMap;

use num_integer::Integer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    fn negated(self) -> Form {
        Form {
            a: -self.a,
            b: self.b,
            c: -self.c,
        }
    }
}

pub(crate) fn isqrt(n: i64) -> i64 {
    let s = (n as f64).sqrt() as i64;
    (s.saturating_sub(2).max(0)..=s + 2)
        .filter(|c| c * c <= n)
        .max()
        .unwrap()
}

/// Reduced forms `(a, b, c)` of discriminant `disc`, i.e.
/// `|sqrt(disc) - 2|a|| < b < sqrt(disc)`, primitive only.
pub(crate) fn reduced_forms(disc: i64) -> Vec<Form> {
    let s = isqrt(disc);
    let mut out = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = (disc - b * b) / 4;
        // s - b + 1 <= 2a <= s + b
        let lo = (s - b + 2) / 2;
        let hi = (s + b) / 2;
        for a in lo.max(1)..=hi {
            if n % a != 0 {
                continue;
            }
            let c = n / a;
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push(Form { a, b, c: -c });
            out.push(Form { a: -a, b, c });
        }
        b += 2;
    }
    out
}

/// The reduction operator: `(a, b, c) -> (c, r, (r^2 - disc) / 4c)` with
/// `r = -b (mod 2|c|)` and `sqrt(disc) - 2|c| < r < sqrt(disc)`.
pub(crate) fn rho(f: Form, disc: i64, s: i64) -> Form {
    let m = 2 * f.c.abs();
    let r = s - (s + f.b).rem_euclid(m);
    Form {
        a: f.c,
        b: r,
        c: (r * r - disc) / (4 * f.c),
    }
}

/// `(narrow, wide)` class numbers of the discriminant. The narrow number
/// counts rho-cycles; the wide one identifies each cycle with the cycle of
/// its negated forms.
pub(crate) fn class_numbers(disc: i64) -> (u64, u64) {
    let s = isqrt(disc);
    let forms = reduced_forms(disc);
    let index: HashMap<Form, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut cycle_of = vec![usize::MAX; forms.len()];
    let mut cycles = 0usize;
    for start in 0..forms.len() {
        if cycle_of[start] != usize::MAX {
            continue;
        }
        let mut cur = start;
        loop {
            cycle_of[cur] = cycles;
            let next = rho(forms[cur], disc, s);
            cur = *index
                .get(&next)
                .expect("rho maps reduced forms to reduced forms");
            if cur == start {
                break;
            }
        }
        cycles += 1;
    }
    let mut self_dual = vec![false; cycles];
    for (i, f) in forms.iter().enumerate() {
        if cycle_of[index[&f.negated()]] == cycle_of[i] {
            self_dual[cycle_of[i]] = true;
        }
    }
    let fixed = self_dual.iter().filter(|x| **x).count();
    (cycles as u64, ((cycles + fixed) / 2) as u64)
}
