//! Candidate generation for integer points near a graph `w ≈ offset + Θu`.
//!
//! The free coordinates `u` range over an integer box. For each row `j` of
//! `Θ` an integer `w_j` must exist within `delta` of
//! `offset_j + Σ_i θ_ji u_i` (and inside the dependent bounds). Every `u`
//! satisfying this is emitted together with the admissible `w` ranges; no
//! other `u` is. Callers evaluate the exact objective on the emitted points.
//!
//! With two or more free coordinates and `delta < 1/2`, the innermost
//! coordinate is handled by a table of the fractional parts of
//! `θ_{0,last} · v` sorted once per scan: for every outer prefix only the
//! keys inside a window of width `2·delta` are visited.

use crate::parallel::{map_chunks, Execution};

/// Dependent bound used when the dependent coordinates are unconstrained.
pub(crate) const UNBOUNDED: i64 = 1 << 52;

pub(crate) struct Sieve<'a> {
    pub m: usize,
    pub n: usize,
    /// `n × m`, row-major.
    pub rows: &'a [f64],
    pub offsets: Vec<f64>,
    pub free_lo: Vec<i64>,
    pub free_hi: Vec<i64>,
    pub dep_lo: Vec<i64>,
    pub dep_hi: Vec<i64>,
    /// Per-row tolerance, slack included. May be infinite.
    pub delta: f64,
    /// Only emit `u` that are zero or have a positive first nonzero entry.
    /// Requires a symmetric box.
    pub half: bool,
}

#[derive(Default)]
pub(crate) struct Candidates {
    pub m: usize,
    pub n: usize,
    pub free: Vec<i64>,
    pub ranges: Vec<(i64, i64)>,
    pub count: usize,
    pub nodes: u64,
}

impl Candidates {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn get(&self, i: usize) -> (&[i64], &[(i64, i64)]) {
        (&self.free[i * self.m..(i + 1) * self.m], &self.ranges[i * self.n..(i + 1) * self.n])
    }

    fn append(&mut self, mut other: Candidates) {
        self.free.append(&mut other.free);
        self.ranges.append(&mut other.ranges);
        self.count += other.count;
        self.nodes += other.nodes;
    }
}

/// Absolute rounding slack for residuals of size up to `magnitude`.
pub(crate) fn slack(magnitude: f64) -> f64 {
    1e-12 * (1.0 + magnitude)
}

impl Sieve<'_> {
    fn use_table(&self) -> bool {
        self.m >= 2 && self.delta < 0.49
    }

    /// Rough node count used for budget checks before a scan.
    pub fn estimate_nodes(&self) -> u64 {
        let width = |i: usize| (self.free_hi[i] - self.free_lo[i] + 1).max(0) as f64;
        let factor = if self.half { 0.5 } else { 1.0 };
        let est = if self.m == 0 {
            1.0
        } else if self.use_table() {
            let outer: f64 = (0..self.m - 1).map(width).product();
            outer * factor + width(self.m - 1)
        } else {
            (0..self.m).map(width).product::<f64>() * factor
        };
        est.min(u64::MAX as f64 / 4.0) as u64
    }

    #[inline]
    fn row_ranges(&self, values: &[f64], out: &mut Vec<(i64, i64)>) -> bool {
        let mark = out.len();
        for j in 0..self.n {
            let x = values[j];
            let lo = (x - self.delta).ceil().max(self.dep_lo[j] as f64);
            let hi = (x + self.delta).floor().min(self.dep_hi[j] as f64);
            if lo > hi {
                out.truncate(mark);
                return false;
            }
            out.push((lo as i64, hi as i64));
        }
        true
    }

    pub fn run(&self, execution: Execution) -> Candidates {
        debug_assert_eq!(self.rows.len(), self.m * self.n);
        let mut out = Candidates { m: self.m, n: self.n, ..Default::default() };
        if self.m == 0 {
            out.nodes = 1;
            let mut ranges = Vec::new();
            if self.row_ranges(&self.offsets, &mut ranges) {
                out.ranges = ranges;
                out.count = 1;
            }
            return out;
        }
        let table = if self.use_table() { Some(self.build_table()) } else { None };
        if let Some(t) = &table {
            out.nodes += t.len() as u64;
        }
        let lo0 = if self.half { self.free_lo[0].max(0) } else { self.free_lo[0] };
        let parts = map_chunks(lo0, self.free_hi[0], execution, |a, b| {
            let mut local = Candidates { m: self.m, n: self.n, ..Default::default() };
            let mut prefix = Vec::with_capacity(self.m);
            let mut acc = vec![0.0; self.n];
            for u0 in a..=b {
                prefix.clear();
                prefix.push(u0);
                for j in 0..self.n {
                    acc[j] = self.offsets[j] + self.rows[j * self.m] * u0 as f64;
                }
                self.walk(1, &mut prefix, &acc, u0 == 0, table.as_deref(), &mut local);
            }
            local
        });
        for part in parts {
            out.append(part);
        }
        out
    }

    fn build_table(&self) -> Vec<(f64, i64)> {
        let last = self.m - 1;
        let coef = self.rows[last];
        let mut table: Vec<(f64, i64)> = (self.free_lo[last]..=self.free_hi[last])
            .map(|v| {
                let x = coef * v as f64;
                let key = x - x.round();
                // keys live in [-1/2, 1/2)
                (if key >= 0.5 { key - 1.0 } else { key }, v)
            })
            .collect();
        table.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        table
    }

    /// `acc` holds `offset_j + Σ_{i<depth} θ_ji u_i`.
    fn walk(
        &self,
        depth: usize,
        prefix: &mut Vec<i64>,
        acc: &[f64],
        all_zero: bool,
        table: Option<&[(f64, i64)]>,
        out: &mut Candidates,
    ) {
        if depth == self.m {
            out.nodes += 1;
            if self.row_ranges(acc, &mut out.ranges) {
                out.free.extend_from_slice(prefix);
                out.count += 1;
            }
            return;
        }
        if depth == self.m - 1 {
            if let Some(table) = table {
                out.nodes += 1;
                self.query_table(prefix, acc, all_zero, table, out);
                return;
            }
        }
        let lo = if self.half && all_zero { self.free_lo[depth].max(0) } else { self.free_lo[depth] };
        let mut next = vec![0.0; self.n];
        for v in lo..=self.free_hi[depth] {
            for j in 0..self.n {
                next[j] = acc[j] + self.rows[j * self.m + depth] * v as f64;
            }
            prefix.push(v);
            self.walk(depth + 1, prefix, &next, all_zero && v == 0, table, out);
            prefix.pop();
        }
    }

    fn query_table(
        &self,
        prefix: &mut Vec<i64>,
        acc: &[f64],
        all_zero: bool,
        table: &[(f64, i64)],
        out: &mut Candidates,
    ) {
        let last = self.m - 1;
        let target = -(acc[0] - acc[0].round());
        let (lo, hi) = (target - self.delta, target + self.delta);
        let mut windows = [(lo.max(-0.5), hi.min(0.5)), (1.0, 0.0), (1.0, 0.0)];
        if lo < -0.5 {
            windows[1] = (lo + 1.0, 0.5);
        }
        if hi >= 0.5 {
            windows[2] = (-0.5, hi - 1.0);
        }
        let mut values = vec![0.0; self.n];
        for &(wlo, whi) in &windows {
            if wlo > whi {
                continue;
            }
            let start = table.partition_point(|e| e.0 < wlo);
            for &(key, v) in &table[start..] {
                if key > whi {
                    break;
                }
                if self.half && all_zero && v < 0 {
                    continue;
                }
                out.nodes += 1;
                for j in 0..self.n {
                    values[j] = acc[j] + self.rows[j * self.m + last] * v as f64;
                }
                if self.row_ranges(&values, &mut out.ranges) {
                    out.free.extend_from_slice(prefix);
                    out.free.push(v);
                    out.count += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(s: &Sieve<'_>) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut u = s.free_lo.clone();
        loop {
            let first_nz = u.iter().find(|&&x| x != 0);
            if !s.half || first_nz.is_none_or(|&x| x > 0) {
                let ok = (0..s.n).all(|j| {
                    let x = s.offsets[j]
                        + (0..s.m).map(|i| s.rows[j * s.m + i] * u[i] as f64).sum::<f64>();
                    let lo = (x - s.delta).ceil().max(s.dep_lo[j] as f64);
                    let hi = (x + s.delta).floor().min(s.dep_hi[j] as f64);
                    lo <= hi
                });
                if ok {
                    out.push(u.clone());
                }
            }
            let mut i = s.m;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if u[i] < s.free_hi[i] {
                    u[i] += 1;
                    break;
                }
                u[i] = s.free_lo[i];
            }
        }
    }

    fn emitted(s: &Sieve<'_>, exec: Execution) -> Vec<Vec<i64>> {
        let c = s.run(exec);
        let mut v: Vec<Vec<i64>> = (0..c.len()).map(|i| c.get(i).0.to_vec()).collect();
        v.sort();
        v
    }

    #[test]
    fn table_and_direct_agree_with_exhaustive_filter() {
        let rows = [0.414_213_562, -0.732_050_8, 0.236_067_977, 0.645_751_31];
        for delta in [0.003, 0.05, 0.2, 0.6] {
            for half in [false, true] {
                let s = Sieve {
                    m: 2,
                    n: 2,
                    rows: &rows,
                    offsets: vec![0.0, 0.0],
                    free_lo: vec![-40, -40],
                    free_hi: vec![40, 40],
                    dep_lo: vec![-60, -60],
                    dep_hi: vec![60, 60],
                    delta,
                    half,
                };
                let expected = brute(&s);
                assert_eq!(emitted(&s, Execution::Sequential), expected, "delta {delta}");
                assert_eq!(emitted(&s, Execution::Parallel), expected, "delta {delta}");
            }
        }
    }

    #[test]
    fn offsets_and_asymmetric_boxes() {
        let rows = [0.381_966, 0.7075, -0.1234];
        let s = Sieve {
            m: 3,
            n: 1,
            rows: &rows,
            offsets: vec![0.3],
            free_lo: vec![-5, 2, -13],
            free_hi: vec![7, 9, 11],
            dep_lo: vec![-4],
            dep_hi: vec![8],
            delta: 0.07,
            half: false,
        };
        assert_eq!(emitted(&s, Execution::Parallel), brute(&s));
    }
}
