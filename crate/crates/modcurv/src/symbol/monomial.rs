use super::atom::{Atom, Idx, Kind, Variance};
use crate::error::{Error, Result};
use num::{BigRational, Complex, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Gaussian rational coefficient.
pub type Coeff = Complex<BigRational>;

pub fn rational(n: i64, d: i64) -> Coeff {
    Complex::new(BigRational::new(n.into(), d.into()), BigRational::zero())
}

pub fn imaginary(n: i64, d: i64) -> Coeff {
    Complex::new(BigRational::zero(), BigRational::new(n.into(), d.into()))
}

/// Canonical product of atoms: noncentral factors in order, then central
/// factors sorted by kind, with dummies relabelled to the minimal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub nc: Vec<Atom>,
    pub central: Vec<Atom>,
}

impl Word {
    pub fn unit() -> Word {
        Word { nc: Vec::new(), central: Vec::new() }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.nc.iter().chain(self.central.iter())
    }

    pub fn homogeneity(&self) -> i32 {
        self.atoms().map(|a| a.homogeneity()).sum()
    }

    pub fn xi_degree(&self) -> i32 {
        self.atoms().map(|a| a.kind.xi_degree() * a.pow).sum()
    }

    pub fn max_dummy(&self) -> Option<u8> {
        self.atoms()
            .flat_map(|a| a.slots.iter())
            .filter_map(|i| match i {
                Idx::Dummy(n) => Some(*n),
                _ => None,
            })
            .max()
    }

    pub fn free_labels(&self) -> BTreeMap<u8, Variance> {
        let mut out = BTreeMap::new();
        for a in self.atoms() {
            for s in &a.slots {
                if let Idx::Free(f) = s {
                    out.insert(*f, a.kind.variance());
                }
            }
        }
        out
    }

    /// Canonical form of an arbitrary product of atoms.
    pub fn canonical(atoms: Vec<Atom>) -> Result<Word> {
        let mut nc_raw = Vec::new();
        let mut central_raw = Vec::new();
        for a in atoms {
            if a.kind.rank() == 0 && a.pow == 0 {
                continue;
            }
            if a.kind.is_central() {
                central_raw.push(a);
            } else {
                nc_raw.push(a);
            }
        }
        let nc = merge_noncentral(nc_raw);
        let central = merge_central(central_raw);
        check_labels(&nc, &central)?;
        Ok(minimal_labelling(nc, central))
    }
}

fn merge_noncentral(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    let (mut b, mut k) = (0i32, 0i32);
    let flush = |out: &mut Vec<Atom>, b: &mut i32, k: &mut i32| {
        if *b != 0 {
            out.push(Atom::b0(*b));
        }
        if *k != 0 {
            out.push(Atom::k(*k));
        }
        *b = 0;
        *k = 0;
    };
    for a in atoms {
        match a.kind {
            Kind::B0 => b += a.pow,
            Kind::K => k += a.pow,
            _ => {
                flush(&mut out, &mut b, &mut k);
                if let Some(last) = out.last_mut() {
                    if a.kind.rank() == 0 && last.kind == a.kind {
                        last.pow += a.pow;
                        continue;
                    }
                }
                out.push(a);
            }
        }
    }
    flush(&mut out, &mut b, &mut k);
    out
}

fn merge_central(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut pows: BTreeMap<Kind, i32> = BTreeMap::new();
    let mut tensors = Vec::new();
    for a in atoms {
        if a.kind.rank() == 0 {
            *pows.entry(a.kind).or_insert(0) += a.pow;
        } else {
            tensors.push(a);
        }
    }
    let mut out: Vec<Atom> = pows.into_iter().filter(|(_, p)| *p != 0).map(|(k, p)| Atom::pow(k, p)).collect();
    tensors.sort_by_key(|a| a.kind);
    out.extend(tensors);
    out
}

fn check_labels(nc: &[Atom], central: &[Atom]) -> Result<()> {
    let mut seen: BTreeMap<Idx, Vec<Variance>> = BTreeMap::new();
    for a in nc.iter().chain(central) {
        for s in &a.slots {
            seen.entry(*s).or_default().push(a.kind.variance());
        }
    }
    for (idx, vars) in seen {
        match idx {
            Idx::Dummy(_) => {
                if vars.len() != 2 || vars[0] == vars[1] {
                    return Err(Error::InvalidContraction(format!(
                        "label {idx} occurs {} times with variances {:?}",
                        vars.len(),
                        vars
                    )));
                }
            }
            Idx::Free(_) => {
                if vars.len() != 1 {
                    return Err(Error::InvalidContraction(format!("free label {idx} occurs {} times", vars.len())));
                }
            }
        }
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn relabel(nc: &[Atom], central: &[Atom]) -> Word {
    let mut map: BTreeMap<u8, u8> = BTreeMap::new();
    let mut next = 0u8;
    let mut fix = |a: &Atom| -> Atom {
        let slots = a
            .slots
            .iter()
            .map(|s| match *s {
                Idx::Dummy(d) => Idx::Dummy(*map.entry(d).or_insert_with(|| {
                    next += 1;
                    next - 1
                })),
                f => f,
            })
            .collect();
        Atom { kind: a.kind, pow: a.pow, slots }
    };
    let nc2: Vec<Atom> = nc.iter().map(&mut fix).collect();
    let c2: Vec<Atom> = central.iter().map(&mut fix).collect();
    Word { nc: nc2, central: c2 }
}

fn minimal_labelling(nc: Vec<Atom>, central: Vec<Atom>) -> Word {
    let has_dummy = nc.iter().chain(central.iter()).any(|a| a.slots.iter().any(|s| matches!(s, Idx::Dummy(_))));
    if !has_dummy {
        return Word { nc, central };
    }
    // Groups of interchangeable central atoms (same kind, with slots).
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < central.len() {
        let mut j = i + 1;
        while j < central.len() && central[j].kind == central[i].kind {
            j += 1;
        }
        if central[i].kind.rank() > 0 && j - i > 1 {
            groups.push((i, j - i));
        }
        i = j;
    }
    let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|(_, len)| permutations(*len)).collect();
    let sym_nc: Vec<usize> = (0..nc.len()).filter(|&i| nc[i].kind.symmetric_pair().is_some()).collect();
    let sym_c: Vec<usize> = (0..central.len()).filter(|&i| central[i].kind.symmetric_pair().is_some()).collect();
    let n_sym = sym_nc.len() + sym_c.len();

    let mut best: Option<Word> = None;
    let mut choice = vec![0usize; groups.len()];
    loop {
        let mut c_perm = central.clone();
        for (g, (start, _)) in groups.iter().enumerate() {
            let perm = &group_perms[g][choice[g]];
            for (off, &src) in perm.iter().enumerate() {
                c_perm[start + off] = central[start + src].clone();
            }
        }
        for mask in 0u32..(1u32 << n_sym) {
            let mut nc_v = nc.clone();
            let mut c_v = c_perm.clone();
            for (bit, &ix) in sym_nc.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    let (p, q) = nc_v[ix].kind.symmetric_pair().unwrap();
                    nc_v[ix].slots.swap(p, q);
                }
            }
            for (bit, &ix) in sym_c.iter().enumerate() {
                if mask >> (bit + sym_nc.len()) & 1 == 1 {
                    let (p, q) = c_v[ix].kind.symmetric_pair().unwrap();
                    c_v[ix].slots.swap(p, q);
                }
            }
            let w = relabel(&nc_v, &c_v);
            if best.as_ref().is_none_or(|b| w < *b) {
                best = Some(w);
            }
        }
        // Advance the mixed-radix counter over group permutations.
        let mut g = 0;
        loop {
            if g == groups.len() {
                return best.expect("at least one candidate");
            }
            choice[g] += 1;
            if choice[g] < group_perms[g].len() {
                break;
            }
            choice[g] = 0;
            g += 1;
        }
    }
}

/// Coefficient times canonical word.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: Coeff,
    pub word: Word,
}

impl Monomial {
    pub fn new(coeff: Coeff, atoms: Vec<Atom>) -> Result<Monomial> {
        Ok(Monomial { coeff, word: Word::canonical(atoms)? })
    }

    /// Product with contraction of free labels shared by both factors.
    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        let word = mul_words(&self.word, &other.word)?;
        Ok(Monomial { coeff: &self.coeff * &other.coeff, word })
    }
}

pub(crate) fn mul_words(a: &Word, b: &Word) -> Result<Word> {
    let shift = a.max_dummy().map_or(0, |d| d + 1);
    let fa = a.free_labels();
    let fb = b.free_labels();
    let mut next = shift + b.max_dummy().map_or(0, |d| d + 1);
    let mut rename: BTreeMap<u8, u8> = BTreeMap::new();
    for (f, va) in &fa {
        if let Some(vb) = fb.get(f) {
            if va == vb {
                return Err(Error::InvalidContraction(format!("free label i{f} has the same variance in both factors")));
            }
            rename.insert(*f, next);
            next += 1;
        }
    }
    let map_atom = |x: &Atom, shift_d: u8| -> Atom {
        let slots = x
            .slots
            .iter()
            .map(|s| match *s {
                Idx::Dummy(d) => Idx::Dummy(d + shift_d),
                Idx::Free(f) => match rename.get(&f) {
                    Some(&d) => Idx::Dummy(d),
                    None => Idx::Free(f),
                },
            })
            .collect();
        Atom { kind: x.kind, pow: x.pow, slots }
    };
    let mut atoms: Vec<Atom> = a.nc.iter().map(|x| map_atom(x, 0)).collect();
    atoms.extend(b.nc.iter().map(|x| map_atom(x, shift)));
    atoms.extend(a.central.iter().map(|x| map_atom(x, 0)));
    atoms.extend(b.central.iter().map(|x| map_atom(x, shift)));
    Word::canonical(atoms)
}

pub fn fmt_coeff(c: &Coeff) -> String {
    if c.im.is_zero() {
        c.re.to_string()
    } else if c.re.is_zero() {
        format!("{}i", c.im)
    } else if c.im < BigRational::zero() {
        format!("({}{}i)", c.re, c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" * "))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.nc.is_empty() && self.word.central.is_empty() {
            write!(f, "{}", fmt_coeff(&self.coeff))
        } else {
            write!(f, "{} * {}", fmt_coeff(&self.coeff), self.word)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u8) -> Idx {
        Idx::Dummy(n)
    }

    #[test]
    fn runs_merge_and_kinv_cancels() {
        let w = Word::canonical(vec![Atom::b0(1), Atom::k(1), Atom::b0(2), Atom::k(-1)]).unwrap();
        assert_eq!(w.nc, vec![Atom::b0(3)]);
    }

    #[test]
    fn rho_separates_runs() {
        let w = Word::canonical(vec![
            Atom::b0(1),
            Atom::new(Kind::GradK, vec![d(0)]),
            Atom::k(1),
            Atom::b0(1),
            Atom::new(Kind::Ginv, vec![d(0), d(1)]),
            Atom::new(Kind::GradK, vec![d(1)]),
        ])
        .unwrap();
        assert_eq!(w.to_string(), "b0 * GradK[a] * b0 * k * GradK[b] * Ginv[a,b]");
    }

    #[test]
    fn relabel_is_order_independent() {
        let a = Word::canonical(vec![
            Atom::new(Kind::GradK, vec![d(3)]),
            Atom::new(Kind::HessK, vec![d(7), d(5)]),
            Atom::new(Kind::DXi2, vec![d(5)]),
            Atom::new(Kind::D2Xi2, vec![d(3), d(7)]),
        ])
        .unwrap();
        let b = Word::canonical(vec![
            Atom::new(Kind::D2Xi2, vec![d(1), d(0)]),
            Atom::new(Kind::GradK, vec![d(1)]),
            Atom::new(Kind::DXi2, vec![d(2)]),
            Atom::new(Kind::HessK, vec![d(2), d(0)]),
        ])
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_contraction_rejected() {
        let r = Word::canonical(vec![Atom::new(Kind::GradK, vec![d(0)]), Atom::new(Kind::GradK, vec![d(0)])]);
        assert!(matches!(r, Err(Error::InvalidContraction(_))));
    }

    #[test]
    fn product_contracts_free_labels() {
        let p = Monomial::new(rational(1, 1), vec![Atom::new(Kind::DXi2, vec![Idx::Free(0)])]).unwrap();
        let q = Monomial::new(rational(1, 1), vec![Atom::new(Kind::GradK, vec![Idx::Free(0)])]).unwrap();
        let pq = p.mul(&q).unwrap();
        assert_eq!(pq.to_string(), "1 * GradK[a] * DXi2[a]");
        assert!(p.mul(&p).is_err());
    }
}
