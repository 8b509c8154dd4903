use crate::scalar::Real;

/// An atom is inside the ball for radii in the open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Window<T> {
    pub lo: T,
    pub hi: T,
    pub w: T,
    pub g: T,
}

/// Open radius interval on which the ball contents do not change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub mass: T,
    pub g_mass: T,
    pub count: usize,
}

/// Partitions `(start, end)` at every window endpoint and accumulates the
/// windows covering each piece.
pub(crate) fn sweep<T: Real>(windows: &[Window<T>], start: T, end: T) -> Vec<Piece<T>> {
    let mut events: Vec<(T, T, T, i64)> = Vec::with_capacity(2 * windows.len());
    for w in windows {
        let (lo, hi) = (w.lo.max(start), w.hi.min(end));
        if lo < hi {
            events.push((lo, w.w, w.g, 1));
            events.push((hi, -w.w, -w.g, -1));
        }
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite breakpoints"));
    let mut pieces = Vec::with_capacity(events.len() + 1);
    let (mut mass, mut g_mass, mut count) = (T::zero(), T::zero(), 0i64);
    let mut cur = start;
    let mut i = 0;
    while i < events.len() {
        let r = events[i].0;
        if r > cur {
            pieces.push(Piece { lo: cur, hi: r, mass, g_mass, count: count as usize });
            cur = r;
        }
        while i < events.len() && events[i].0 == r {
            mass += events[i].1;
            g_mass += events[i].2;
            count += events[i].3;
            i += 1;
        }
        if count == 0 {
            mass = T::zero();
            g_mass = T::zero();
        } else {
            mass = mass.max(T::zero());
        }
    }
    if end > cur {
        pieces.push(Piece { lo: cur, hi: end, mass, g_mass, count: count as usize });
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_windows() {
        let w = |lo, hi, w| Window { lo, hi, w, g: 0.0 };
        let p = sweep(&[w(1.0, 3.0, 1.0), w(2.0, 4.0, 2.0), w(5.0, 6.0, 4.0)], 0.0, f64::INFINITY);
        let got: Vec<(f64, f64, f64)> = p.iter().map(|p| (p.lo, p.hi, p.mass)).collect();
        assert_eq!(
            got,
            vec![
                (0.0, 1.0, 0.0),
                (1.0, 2.0, 1.0),
                (2.0, 3.0, 3.0),
                (3.0, 4.0, 2.0),
                (4.0, 5.0, 0.0),
                (5.0, 6.0, 4.0),
                (6.0, f64::INFINITY, 0.0)
            ]
        );
        let clipped = sweep(&[w(1.0, 3.0, 1.0)], 0.0, 2.0);
        assert_eq!(clipped.len(), 2);
        assert_eq!(clipped[1].hi, 2.0);
    }
}
