//! Small floating point helpers: compensated dot products and sums.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Dot product accurate to about twice the working precision (Ogita, Rump
/// and Oishi's `Dot2`).
#[inline]
pub(crate) fn dot2<A, B>(a: A, b: B) -> f64
where
    A: Iterator<Item = f64>,
    B: Iterator<Item = f64>,
{
    let mut s = 0.0;
    let mut c = 0.0;
    for (x, y) in a.zip(b) {
        let p = x * y;
        let e = x.mul_add(y, -p);
        let (t, q) = two_sum(s, p);
        s = t;
        c += q + e;
    }
    s + c
}

/// Distance from `θ·x + offset` to the nearest integer, evaluated with a
/// compensated dot product so that the integer part cancels exactly.
#[inline]
pub(crate) fn nearest_integer_distance(row: &[f64], x: &[i64], offset: f64) -> f64 {
    let mut s = offset;
    let mut c = 0.0;
    for (&t, &v) in row.iter().zip(x) {
        let v = v as f64;
        let p = t * v;
        let e = t.mul_add(v, -p);
        let (hi, lo) = two_sum(s, p);
        s = hi;
        c += lo + e;
    }
    let r = s.round();
    ((s - r) + c).abs().min(0.5)
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
