//! Permutations of `{1..m}` as one-line image vectors.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("images do not form a bijection of 1..{0}")]
    NotBijective(usize),
    #[error("simple reflection index {k} out of range for S_{m}")]
    BadSimple { m: usize, k: usize },
}

/// A permutation in one-line notation; `images[j-1] = w(j)`, 1-indexed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}]", self.images.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
    }
}

impl Perm {
    pub fn identity(m: usize) -> Perm {
        Perm {
            images: (1..=m).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm, PermError> {
        let m = images.len();
        let mut seen = vec![false; m + 1];
        for &v in &images {
            if v == 0 || v > m || seen[v] {
                return Err(PermError::NotBijective(m));
            }
            seen[v] = true;
        }
        Ok(Perm { images })
    }

    /// The simple reflection `s_k` swapping `k` and `k+1` (1-indexed).
    pub fn simple(m: usize, k: usize) -> Result<Perm, PermError> {
        if k == 0 || k >= m {
            return Err(PermError::BadSimple { m, k });
        }
        let mut images: Vec<usize> = (1..=m).collect();
        images.swap(k - 1, k);
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of `j` (1-indexed).
    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    pub fn one_line(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&j| self.images[j - 1]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0usize; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Perm { images }
    }

    /// Coxeter length: number of inversions.
    pub fn length(&self) -> usize {
        let m = self.degree();
        let mut c = 0;
        for i in 0..m {
            for j in i + 1..m {
                if self.images[i] > self.images[j] {
                    c += 1;
                }
            }
        }
        c
    }

    /// All permutations of `1..=m` in lexicographic one-line order.
    pub fn all(m: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=m).collect();
        loop {
            out.push(Perm {
                images: cur.clone(),
            });
            // next lexicographic permutation
            let mut i = m.wrapping_sub(1);
            while i > 0 && cur[i - 1] >= cur[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = m - 1;
            while cur[j] <= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_reflection_and_length() {
        let s1 = Perm::simple(3, 1).unwrap();
        assert_eq!(s1.one_line(), &[2, 1, 3]);
        assert_eq!(s1.length(), 1);
        let s2 = Perm::simple(3, 2).unwrap();
        let s1s2 = s1.compose(&s2);
        assert_eq!(s1s2.length(), 2);
        assert_eq!(s1s2.compose(&s1s2.inverse()), Perm::identity(3));
    }

    #[test]
    fn all_perms_count_and_order() {
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all[0], Perm::identity(4));
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_images(vec![1, 1, 3]).is_err());
        assert!(Perm::from_images(vec![1, 4, 2]).is_err());
    }
}
