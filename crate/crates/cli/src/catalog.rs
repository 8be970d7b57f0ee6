//! Named problem data, expanded to expression text for a given dimension.

/// Exact solution of the second numerical test, `d = 2k`:
/// `x1² + … + xk² − x(k+1)² − … − xd² − x1²`, with `f ≡ 1`.
/// It is globally smooth, so `g` is the same expression on the closure.
pub fn exact_u(d: usize) -> Result<String, String> {
    if d < 2 || d % 2 != 0 {
        return Err(format!("exact_u needs an even dimension >= 2, got {d}"));
    }
    let k = d / 2;
    let mut s = String::new();
    for i in 1..=d {
        if i > 1 {
            s.push_str(if i <= k { "+" } else { "-" });
        }
        s.push_str(&format!("x{i}^2"));
    }
    s.push_str("-x1^2");
    Ok(s)
}

/// `(R² − |x|²)/d`, the mean exit time of `Ball(R, d)` (solution for `f ≡ 1`, `g ≡ 0`).
pub fn ball_exit(d: usize, radius: f64) -> String {
    format!("({} - norm2sq())/{d}", radius * radius)
}

/// Expression text for a catalog name, if it is one.
pub fn lookup(name: &str, d: usize, ball_radius: Option<f64>) -> Option<Result<String, String>> {
    match name {
        "exact_u" => Some(exact_u(d)),
        "ball_exit" => Some(match ball_radius {
            Some(r) => Ok(ball_exit(d, r)),
            None => Err("ball_exit is only defined on a ball domain".into()),
        }),
        _ => None,
    }
}

pub const NAMES: &[&str] = &["exact_u", "ball_exit"];
