use std::collections::HashSet;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// A named chart coordinate.
///
/// Variables are interned and `Copy`. Their total order follows the layout
/// every built-in chart declares: base `x*`, fiber `y*`, multimomenta `p*_*`,
/// the scalar momentum `p`, then the three frame blocks `pxx`, `pyy`, `pyx`.
/// Names outside these families sort last, by name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    key: (u8, u16, u16),
    name: &'static str,
}

fn interner() -> &'static Mutex<HashSet<&'static str>> {
    static TABLE: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashSet::new()))
}

fn intern(name: &str) -> &'static str {
    let mut table = interner().lock().expect("interner poisoned");
    if let Some(s) = table.get(name) {
        return s;
    }
    let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
    table.insert(leaked);
    leaked
}

fn parse_index(s: &str) -> Option<u16> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_pair(s: &str) -> Option<(u16, u16)> {
    let (a, b) = s.split_once('_')?;
    Some((parse_index(a)?, parse_index(b)?))
}

fn classify(name: &str) -> (u8, u16, u16) {
    const OTHER: (u8, u16, u16) = (255, 0, 0);
    if name == "p" {
        return (3, 0, 0);
    }
    for (prefix, class) in [("pxx", 4u8), ("pyy", 5), ("pyx", 6)] {
        if let Some(rest) = name.strip_prefix(prefix) {
            return parse_pair(rest).map_or(OTHER, |(a, b)| (class, a, b));
        }
    }
    if let Some(rest) = name.strip_prefix('x') {
        return parse_index(rest).map_or(OTHER, |i| (0, i, 0));
    }
    if let Some(rest) = name.strip_prefix('y') {
        return parse_index(rest).map_or(OTHER, |i| (1, i, 0));
    }
    if let Some(rest) = name.strip_prefix('p') {
        return parse_pair(rest).map_or(OTHER, |(a, b)| (2, a, b));
    }
    OTHER
}

impl Var {
    pub fn new(name: &str) -> Var {
        Var {
            key: classify(name),
            name: intern(name),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// True for base coordinates `x<i>`.
    pub fn is_base(&self) -> bool {
        self.key.0 == 0
    }

    /// True for fiber coordinates `y<A>`.
    pub fn is_fiber(&self) -> bool {
        self.key.0 == 1
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

/// `x<i>`
pub fn base(i: usize) -> Var {
    Var::new(&format!("x{i}"))
}

/// `y<A>`
pub fn fiber(a: usize) -> Var {
    Var::new(&format!("y{a}"))
}

/// Multimomentum `p^j_B` on Z and on J*Y.
pub fn multimomentum(j: usize, b: usize) -> Var {
    Var::new(&format!("p{j}_{b}"))
}

/// The scalar momentum `p` on Z.
pub fn energy() -> Var {
    Var::new("p")
}

/// Frame coordinate `π^i_j` (base row, base column).
pub fn frame_xx(i: usize, j: usize) -> Var {
    Var::new(&format!("pxx{i}_{j}"))
}

/// Frame coordinate `π^A_B` (fiber row, fiber column).
pub fn frame_yy(a: usize, b: usize) -> Var {
    Var::new(&format!("pyy{a}_{b}"))
}

/// Frame coordinate `π^A_i` (fiber row, base column).
pub fn frame_yx(a: usize, i: usize) -> Var {
    Var::new(&format!("pyx{a}_{i}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_follows_chart_layout() {
        let mut vars = [
            frame_yx(1, 1),
            energy(),
            multimomentum(1, 1),
            fiber(1),
            frame_yy(1, 1),
            base(2),
            frame_xx(1, 1),
            base(1),
        ];
        vars.sort();
        let names: Vec<_> = vars.iter().map(|v| v.name()).collect();
        assert_eq!(
            names,
            ["x1", "x2", "y1", "p1_1", "p", "pxx1_1", "pyy1_1", "pyx1_1"]
        );
    }

    #[test]
    fn interning_is_stable() {
        let a = Var::new("x10");
        let b = Var::new("x10");
        assert_eq!(a, b);
        assert!(std::ptr::eq(a.name(), b.name()));
        assert!(base(2) < base(10));
        assert!(Var::new("t") > frame_yx(9, 9));
    }
}
