//! Enumeration of k-subsets in lexicographic order.

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Calls `f` on every increasing `w`-subset of `0..n` whose smallest element
/// is `first`. Stops early when `f` returns `false`; returns whether it ran to the end.
pub(crate) fn for_each_with_first(n: usize, w: usize, first: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if w == 0 || first + w > n {
        return true;
    }
    let mut idx: Vec<usize> = (first..first + w).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        let mut i = w - 1;
        loop {
            if i == 0 {
                return true;
            }
            if idx[i] < n - (w - i) {
                idx[i] += 1;
                for j in i + 1..w {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Calls `f` on every increasing `w`-subset of `0..n` (once for `w = 0`).
pub(crate) fn for_each(n: usize, w: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if w == 0 {
        return f(&[]);
    }
    (0..n).all(|first| for_each_with_first(n, w, first, &mut f))
}
