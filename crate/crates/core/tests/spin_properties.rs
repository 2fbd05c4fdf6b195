use fluctmon::spin::state::{inner, norm};
use fluctmon::spin::{haar_random_state, IsingChain, Propagator, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn random_vector(sites: usize, seed: u64) -> Vec<Complex64> {
    haar_random_state(sites, seed).unwrap().into_amplitudes()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_hermitian(sites in 2usize..9, j in -2.0f64..2.0, periodic: bool, a: u64, b: u64) {
        let h = IsingChain::new(sites, j, periodic).unwrap();
        let u = random_vector(sites, a);
        let v = random_vector(sites, b);
        let mut hu = vec![Complex64::new(0.0, 0.0); u.len()];
        let mut hv = hu.clone();
        h.apply(&u, &mut hu);
        h.apply(&v, &mut hv);
        prop_assert!((inner(&u, &hv) - inner(&hu, &v)).norm() < 1e-10);
    }

    #[test]
    fn evolution_conserves_norm_and_energy(sites in 2usize..9, j in -2.0f64..2.0, t in -3.0f64..3.0, seed: u64) {
        let h = IsingChain::periodic(sites, j).unwrap();
        let prop = Propagator::new(&h, 1e-12).unwrap();
        let psi = StateVector::new(sites, random_vector(sites, seed)).unwrap();
        let out = prop.evolve_state(&psi, t).unwrap();
        prop_assert!((norm(out.amplitudes()) - 1.0).abs() < 1e-10);
        let energy = |s: &StateVector| {
            let mut w = vec![Complex64::new(0.0, 0.0); s.dim()];
            h.apply(s.amplitudes(), &mut w);
            inner(s.amplitudes(), &w).re
        };
        prop_assert!((energy(&psi) - energy(&out)).abs() < 1e-8);
    }

    #[test]
    fn krylov_matches_dense(sites in 2usize..8, j in -1.5f64..1.5, t in 0.0f64..4.0, seed: u64) {
        let h = IsingChain::periodic(sites, j).unwrap();
        let psi = StateVector::new(sites, random_vector(sites, seed)).unwrap();
        let a = Propagator::new(&h, 1e-12).unwrap().with_max_dim(16).evolve_state(&psi, t).unwrap();
        let b = Propagator::dense(&h).unwrap().evolve_state(&psi, t).unwrap();
        prop_assert!((1.0 - a.overlap(&b).norm()).abs() < 1e-9);
    }

    #[test]
    fn backward_evolution_inverts(sites in 2usize..9, t in 0.0f64..3.0, seed: u64) {
        let h = IsingChain::periodic(sites, -2.0 / 3.0).unwrap();
        let prop = Propagator::new(&h, 1e-12).unwrap();
        let psi = StateVector::new(sites, random_vector(sites, seed)).unwrap();
        let back = prop.evolve_state(&prop.evolve_state(&psi, t).unwrap(), -t).unwrap();
        prop_assert!((1.0 - back.overlap(&psi).norm()).abs() < 1e-9);
    }
}
