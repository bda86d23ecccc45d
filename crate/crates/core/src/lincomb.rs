//! Finitely supported `ℤ[v^{±1/2}]`-linear combinations indexed by `W̃`.
//!
//! Hecke elements and module elements share this representation but are kept
//! as distinct types.

macro_rules! lin_comb {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Default)]
        pub struct $name {
            terms: std::collections::BTreeMap<$crate::extweyl::ExtAffineElt, $crate::coeffs::HalfLaurent>,
        }

        impl $name {
            pub fn zero() -> Self {
                $name { terms: std::collections::BTreeMap::new() }
            }

            pub fn basis(x: $crate::extweyl::ExtAffineElt) -> Self {
                Self::term(x, $crate::coeffs::HalfLaurent::one())
            }

            pub fn term(x: $crate::extweyl::ExtAffineElt, c: $crate::coeffs::HalfLaurent) -> Self {
                let mut out = Self::zero();
                out.add_term(x, &c);
                out
            }

            pub fn from_terms<I>(it: I) -> Self
            where
                I: IntoIterator<Item = ($crate::extweyl::ExtAffineElt, $crate::coeffs::HalfLaurent)>,
            {
                let mut out = Self::zero();
                for (x, c) in it {
                    out.add_term(x, &c);
                }
                out
            }

            pub fn add_term(&mut self, x: $crate::extweyl::ExtAffineElt, c: &$crate::coeffs::HalfLaurent) {
                if c.is_zero() {
                    return;
                }
                match self.terms.get_mut(&x) {
                    Some(v) => {
                        *v += c;
                        if v.is_zero() {
                            self.terms.remove(&x);
                        }
                    }
                    None => {
                        self.terms.insert(x, c.clone());
                    }
                }
            }

            pub fn add_scaled(&mut self, other: &Self, c: &$crate::coeffs::HalfLaurent) {
                for (x, v) in &other.terms {
                    self.add_term(*x, &(v * c));
                }
            }

            pub fn terms(&self) -> impl Iterator<Item = (&$crate::extweyl::ExtAffineElt, &$crate::coeffs::HalfLaurent)> {
                self.terms.iter()
            }

            pub fn coeff(&self, x: &$crate::extweyl::ExtAffineElt) -> $crate::coeffs::HalfLaurent {
                self.terms.get(x).cloned().unwrap_or_default()
            }

            pub fn support(&self) -> impl Iterator<Item = &$crate::extweyl::ExtAffineElt> {
                self.terms.keys()
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn is_empty(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn scale(&self, c: &$crate::coeffs::HalfLaurent) -> Self {
                if c.is_zero() {
                    return Self::zero();
                }
                $name { terms: self.terms.iter().map(|(x, v)| (*x, v * c)).collect() }
            }

            /// Apply `v ↦ v^{-1}` to the coefficients only.
            pub fn bar_coeffs(&self) -> Self {
                $name { terms: self.terms.iter().map(|(x, v)| (*x, v.bar())).collect() }
            }

            pub fn map_support(&self, f: impl Fn(&$crate::extweyl::ExtAffineElt) -> $crate::extweyl::ExtAffineElt) -> Self {
                Self::from_terms(self.terms.iter().map(|(x, v)| (f(x), v.clone())))
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                if self.terms.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = self.terms.iter().map(|(x, v)| format!("({v})·{x:?}")).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }

        impl std::ops::Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                let mut out = self.clone();
                for (x, v) in &rhs.terms {
                    out.add_term(*x, v);
                }
                out
            }
        }

        impl std::ops::Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                let mut out = self.clone();
                for (x, v) in &rhs.terms {
                    out.add_term(*x, &-v);
                }
                out
            }
        }

        impl std::ops::Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name { terms: self.terms.iter().map(|(x, v)| (*x, -v)).collect() }
            }
        }

        impl std::ops::Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                &self + &rhs
            }
        }

        impl std::ops::Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                &self - &rhs
            }
        }
    };
}

pub(crate) use lin_comb;
