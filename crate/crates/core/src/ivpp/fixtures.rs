//! Published IVPP polynomials of the 3-point Toda map.

use super::{Derivation, IVPPCandidate};
use crate::symcore::{parse_poly, Poly, VarSet};

const GAMMAS: [(usize, &str, &str); 4] = [
    (3, "f", "t*g^2"),
    (4, "g^2*t - f^2*r", "t*f + g"),
    (5, "-2*f^3*r^2 + 2*f*r*t*g^2 - f^3*r*g - g^4", "4*f^3*r*g^3 + f^6*r^2 - g^6"),
    (
        6,
        "5*f^4*r^2 + 5*g*f^4*r - 6*g^2*f^2*t*r + g^2*f^4 - 3*g^3*f^2*t + 2*g^4*f + g^4*t^2",
        "4*f^6 + 3*t^2*f^2*g^2 - 4*f^3*g^2 + g^4",
    ),
];

/// The pairs for periods 3 to 6, verbatim (not normalized).
pub fn builtin_gamma_table() -> Vec<IVPPCandidate> {
    let hv = VarSet::of(&["r", "t", "f", "g"]);
    GAMMAS
        .iter()
        .map(|(n, a, b)| {
            let gs = vec![
                parse_poly(a, &hv).expect("fixture parses"),
                parse_poly(b, &hv).expect("fixture parses"),
            ];
            IVPPCandidate::new(*n, gs, Derivation::Fixture)
        })
        .collect()
}

const SURFACES: [&str; 3] = [
    "x*y*u^3 - 3*x*y*z*(x+y-z+u)*u - z*(x^2+y*z)*(y^2+z*x)",
    "y*z*v^3 - 3*x*y*z*(y+z-x+v)*v - x*(y^2+z*x)*(z^2+x*y)",
    "z*x*w^3 - 3*x*y*z*(z+x-y+w)*w - y*(z^2+x*y)*(x^2+y*z)",
];

/// Three cubics in `(x, y, z, u, v, w)` whose common points have period 2;
/// the k-th is univariate in `u`, `v`, `w` respectively once `x, y, z` are
/// fixed.
pub fn builtin_period2_surfaces() -> Vec<Poly> {
    let xv = VarSet::of(&["x", "y", "z", "u", "v", "w"]);
    SURFACES
        .iter()
        .map(|s| parse_poly(s, &xv).expect("fixture parses"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let t = builtin_gamma_table();
        assert_eq!(t.iter().map(|c| c.period).collect::<Vec<_>>(), vec![3, 4, 5, 6]);
        assert!(t.iter().all(|c| c.gammas.len() == 2));
        assert_eq!(t[0].gammas[1].to_string(), "t*g^2");
    }

    #[test]
    fn surfaces_are_cubic_in_their_letter() {
        let s = builtin_period2_surfaces();
        for (k, p) in s.iter().enumerate() {
            assert_eq!(p.degree_in(3 + k), 3);
        }
    }
}
