//! Small reference systems used throughout the tests and the demo.

use crate::crossed::{Automorphism, DynamicalSystem, FiniteGroup};
use crate::fdcstar::{Algebra, TracialState};
use crate::linalg::CMatrix;

pub fn sigma_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// Trivial group acting on `M_2`.
pub fn sys_t() -> DynamicalSystem {
    let alg = Algebra::full(2);
    let tau = TracialState::normalized(&alg);
    DynamicalSystem::trivial_action(FiniteGroup::trivial(), alg, Some(tau))
}

/// `Z/2` acting on `M_2` by `Ad σ_x`, with `τ = tr/2`.
pub fn sys_a() -> DynamicalSystem {
    let alg = Algebra::full(2);
    let action = vec![Automorphism::identity(&alg), Automorphism::inner(sigma_x())];
    let tau = TracialState::normalized(&alg);
    DynamicalSystem::new(FiniteGroup::cyclic(2), alg, action, Some(tau), 1e-12)
        .expect("valid system")
}

/// `Z/3` acting on `C³` by cyclically permuting the blocks, uniform trace.
pub fn sys_b() -> DynamicalSystem {
    let alg = Algebra::diagonal(3);
    let action = (0..3)
        .map(|g| {
            let perm = (0..3).map(|k| (k + g) % 3).collect();
            Automorphism::new(&alg, perm, vec![CMatrix::identity(1); 3], 1e-12)
                .expect("permutation")
        })
        .collect();
    let tau = TracialState::normalized(&alg);
    DynamicalSystem::new(FiniteGroup::cyclic(3), alg, action, Some(tau), 1e-12)
        .expect("valid system")
}
