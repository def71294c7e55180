/// `n choose k`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic `k`-subsets of `items`.
pub struct Combinations<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    buf: Vec<usize>,
    first: bool,
    done: bool,
}

impl<'a> Combinations<'a> {
    pub fn new(items: &'a [usize], k: usize) -> Self {
        Self {
            items,
            idx: (0..k).collect(),
            buf: Vec::with_capacity(k),
            first: true,
            done: k > items.len(),
        }
    }

    /// Advances to the next subset; the returned slice is only valid until the
    /// next call.
    pub fn next_subset(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
        } else {
            let n = self.items.len();
            let k = self.idx.len();
            let mut pos = k;
            loop {
                if pos == 0 {
                    self.done = true;
                    return None;
                }
                pos -= 1;
                if self.idx[pos] < n - k + pos {
                    break;
                }
            }
            self.idx[pos] += 1;
            for q in (pos + 1)..k {
                self.idx[q] = self.idx[q - 1] + 1;
            }
        }
        self.buf.clear();
        self.buf.extend(self.idx.iter().map(|&i| self.items[i]));
        Some(&self.buf)
    }
}
