//! Edit distance with unit-cost insertion, deletion and substitution.

use crate::bits::Word;

/// Levenshtein distance between two sequences (two-row dynamic program).
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.len() < b.len() {
        return levenshtein(b, a);
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(x != y);
            cur[j + 1] = substitute.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn word_distance(a: &Word, b: &Word) -> usize {
    levenshtein(a.as_slice(), b.as_slice())
}

/// Symmetric matrix of pairwise distances.
pub fn distance_matrix(words: &[Word]) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; words.len()]; words.len()];
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let d = word_distance(&words[i], &words[j]);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    #[test]
    fn small_cases() {
        assert_eq!(word_distance(&bits(""), &bits("1011")), 4);
        assert_eq!(word_distance(&bits("1011"), &bits("1011")), 0);
        assert_eq!(levenshtein(b"kitten", b"sitting"), 3);
        assert_eq!(word_distance(&bits("10110"), &bits("01100")), 2);
    }

    #[test]
    fn matrix_shape() {
        let m = distance_matrix(&[bits("0"), bits("01"), bits("110")]);
        assert_eq!(m, vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]]);
    }
}
