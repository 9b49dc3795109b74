use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

/// `n!!`, with `0!! = 1!! = 1`.
pub fn double_factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Euler's totient. `totient(1) = 1`.
pub fn totient(n: u64) -> u64 {
    assert!(n >= 1, "totient is defined for n >= 1");
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Residues `1 <= a < n` coprime to `n`, ascending.
pub fn coprime_residues(n: u64) -> Vec<u64> {
    (1..n).filter(|a| a.gcd(&n) == 1).collect()
}

/// Conjectured count of algebraically independent `Γ(a/n)` over the
/// algebraic numbers extended by π: `φ(n)/2` for `n >= 3`, zero below.
pub fn independent_gamma_count(n: u64) -> u64 {
    if n <= 2 {
        0
    } else {
        totient(n) / 2
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|p| p * p <= n)
            .all(|p| !n.is_multiple_of(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(0), BigUint::one());
        assert_eq!(double_factorial(3), BigUint::from(3u32));
        assert_eq!(double_factorial(5), BigUint::from(15u32));
        assert_eq!(double_factorial(7), BigUint::from(105u32));
        assert_eq!(double_factorial(8), BigUint::from(384u32));
    }

    #[test]
    fn totient_table_values() {
        assert_eq!(totient(6), 2);
        assert_eq!(totient(1), 1);
        assert_eq!(totient(9), 6);
        // φ(M-1)/2 column for M = 2..11
        let col: Vec<u64> = (2..=11).map(|m| independent_gamma_count(m - 1)).collect();
        assert_eq!(col, vec![0, 0, 1, 1, 2, 1, 3, 2, 3, 2]);
    }

    #[test]
    fn residues() {
        assert_eq!(coprime_residues(4), vec![1, 3]);
        assert_eq!(coprime_residues(6), vec![1, 5]);
        assert_eq!(coprime_residues(10), vec![1, 3, 7, 9]);
        for n in 2..60 {
            assert_eq!(coprime_residues(n).len() as u64, totient(n));
        }
    }

    #[test]
    fn binomials_and_primes() {
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
        assert_eq!(binomial(3, 5), BigUint::from(0u32));
        assert_eq!(factorial(5), BigUint::from(120u32));
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    proptest! {
        #[test]
        fn totient_of_primes(n in 2u64..5000) {
            if is_prime(n) {
                prop_assert_eq!(totient(n), n - 1);
            }
        }

        #[test]
        fn totient_is_multiplicative(a in 1u64..400, b in 1u64..400) {
            if a.gcd(&b) == 1 {
                prop_assert_eq!(totient(a * b), totient(a) * totient(b));
            }
        }
    }
}
