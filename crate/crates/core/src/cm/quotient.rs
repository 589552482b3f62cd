//! The finite group G = (O_L/f)^* / (R_F/f)^* and the image of O_L^* in it.
//! Its kernel is S^* for the order S = R_F + f O_L.

use std::collections::HashSet;
use std::hash::Hash;

/// Image of a unit group with generators g_i in a finite abelian group.
#[derive(Debug, Clone)]
pub struct UnitImage {
    /// |image| = [O_L^* : S^*]
    pub index: u64,
    /// exponent vectors mod 2 of the kernel elements
    pub kernel_parities: HashSet<Vec<u8>>,
}

fn order_of<T: Clone + Eq>(g: &T, one: &T, mul: &impl Fn(&T, &T) -> T) -> u64 {
    let mut x = g.clone();
    let mut k = 1;
    while &x != one {
        x = mul(&x, g);
        k += 1;
    }
    k
}

fn lcm(a: u64, b: u64) -> u64 {
    a / num_integer::gcd(a, b) * b
}

/// `gens` are images of the unit generators, `one` the identity class, `mul`
/// the group law on canonical classes.
pub fn unit_image<T: Clone + Eq + Hash>(gens: &[T], one: &T, mul: impl Fn(&T, &T) -> T) -> UnitImage {
    let mut seen: HashSet<T> = HashSet::from([one.clone()]);
    let mut frontier = vec![one.clone()];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = mul(&x, g);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let ranges: Vec<u64> = gens.iter().map(|g| lcm(2, order_of(g, one, &mul))).collect();
    let mut kernel_parities = HashSet::new();
    let mut exps = vec![0u64; gens.len()];
    let mut acc = vec![one.clone(); gens.len() + 1];
    'outer: loop {
        // acc[i] = prod_{j<i} g_j^exps[j]
        for i in 0..gens.len() {
            let mut x = acc[i].clone();
            for _ in 0..exps[i] {
                x = mul(&x, &gens[i]);
            }
            acc[i + 1] = x;
        }
        if &acc[gens.len()] == one {
            kernel_parities.insert(exps.iter().map(|&e| (e % 2) as u8).collect());
        }
        for i in (0..gens.len()).rev() {
            exps[i] += 1;
            if exps[i] < ranges[i] {
                continue 'outer;
            }
            exps[i] = 0;
        }
        break;
    }
    UnitImage { index: seen.len() as u64, kernel_parities }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_of_order_six() {
        // Z/6 written additively, generator 2 has order 3, generator 3 order 2
        let img = unit_image(&[2u64, 3], &0, |a, b| (a + b) % 6);
        assert_eq!(img.index, 6);
        // kernel of (a, b) -> 2a + 3b mod 6 is generated by (3, 0) and (0, 2)
        let want: HashSet<Vec<u8>> = [vec![0, 0], vec![1, 0]].into_iter().collect();
        assert_eq!(img.kernel_parities, want);
    }

    #[test]
    fn trivial_group() {
        let img = unit_image(&[0u64], &0, |a, b| (a + b) % 1);
        assert_eq!(img.index, 1);
        assert_eq!(img.kernel_parities.len(), 2);
    }
}
