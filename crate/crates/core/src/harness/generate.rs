//! Seeded random propositional formulas over a small atom pool.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::{Decl, Formula, Signature};

/// Connectives `¬ ∧ ∨ →` over atoms `p0..p{atoms-1}`.
#[derive(Clone, Debug)]
pub struct Generator {
    rng: ChaCha8Rng,
    pub atoms: usize,
    pub depth: u32,
}

pub fn atom_name(i: usize) -> String {
    format!("p{i}")
}

/// The event-calculus signature extended with nullary relations `p0..p{n-1}`.
pub fn prop_signature(atoms: usize) -> Signature {
    let mut sig = Signature::event_calculus();
    for i in 0..atoms {
        sig.declare(Decl::Rel { name: atom_name(i), args: vec![] }).expect("fresh atom");
    }
    sig
}

/// A random counterfactual query `(Γ, φ, ψ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub gamma: Vec<Formula>,
    pub phi: Formula,
    pub psi: Formula,
}

impl Generator {
    pub fn new(seed: u64, atoms: usize, depth: u32) -> Self {
        assert!(atoms > 0);
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), atoms, depth }
    }

    pub fn atom(&mut self) -> Formula {
        Formula::prop(atom_name(self.rng.gen_range(0..self.atoms)))
    }

    pub fn formula(&mut self) -> Formula {
        let d = self.rng.gen_range(0..=self.depth);
        self.sized(d)
    }

    fn sized(&mut self, d: u32) -> Formula {
        if d == 0 || self.rng.gen_bool(0.25) {
            return self.atom();
        }
        match self.rng.gen_range(0..4) {
            0 => Formula::not(self.sized(d - 1)),
            1 => Formula::and(vec![self.sized(d - 1), self.sized(d - 1)]),
            2 => Formula::or(vec![self.sized(d - 1), self.sized(d - 1)]),
            _ => Formula::implies(self.sized(d - 1), self.sized(d - 1)),
        }
    }

    pub fn formulas(&mut self, n: usize) -> Vec<Formula> {
        (0..n).map(|_| self.formula()).collect()
    }

    pub fn instance(&mut self, max_gamma: usize) -> Instance {
        let n = self.rng.gen_range(0..=max_gamma);
        Instance { gamma: self.formulas(n), phi: self.formula(), psi: self.formula() }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_formulas() {
        let a = Generator::new(7, 6, 4).formulas(20);
        let b = Generator::new(7, 6, 4).formulas(20);
        assert_eq!(a, b);
        assert_ne!(a, Generator::new(8, 6, 4).formulas(20));
    }

    #[test]
    fn formulas_stay_in_the_pool() {
        let sig = prop_signature(6);
        for f in Generator::new(1, 6, 4).formulas(200) {
            assert!(f.is_propositional());
            assert!(f.prop_letters().iter().all(|a| sig.relation(a).is_some()));
            sig.check_formula(&f).unwrap();
        }
    }
}
