use std::fmt;

/// Atom kinds. The declaration order is the canonical order of central atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    B0,
    K,
    GradK,
    HessK,
    P1,
    P0,
    Xi2,
    Lambda,
    SDelta,
    DXi2,
    D2Xi2,
    Nabla2Xi2,
    Nabla3L,
    Ginv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Lower,
    Upper,
}

impl Kind {
    pub const ALL: [Kind; 14] = [
        Kind::B0,
        Kind::K,
        Kind::GradK,
        Kind::HessK,
        Kind::P1,
        Kind::P0,
        Kind::Xi2,
        Kind::Lambda,
        Kind::SDelta,
        Kind::DXi2,
        Kind::D2Xi2,
        Kind::Nabla2Xi2,
        Kind::Nabla3L,
        Kind::Ginv,
    ];

    pub fn rank(self) -> usize {
        match self {
            Kind::GradK | Kind::DXi2 => 1,
            Kind::HessK | Kind::D2Xi2 | Kind::Nabla2Xi2 | Kind::Ginv => 2,
            Kind::Nabla3L => 3,
            _ => 0,
        }
    }

    pub fn variance(self) -> Variance {
        match self {
            Kind::DXi2 | Kind::D2Xi2 | Kind::Ginv => Variance::Upper,
            _ => Variance::Lower,
        }
    }

    /// Scalars of the commutative world: `xi`-dependent data and metric data.
    pub fn is_central(self) -> bool {
        matches!(
            self,
            Kind::Xi2
                | Kind::Lambda
                | Kind::SDelta
                | Kind::DXi2
                | Kind::D2Xi2
                | Kind::Nabla2Xi2
                | Kind::Nabla3L
                | Kind::Ginv
        )
    }

    /// `b0` and `k` commute with each other but not with `rho` factors.
    pub fn in_run(self) -> bool {
        matches!(self, Kind::B0 | Kind::K)
    }

    /// Slot pair that may be swapped freely.
    pub fn symmetric_pair(self) -> Option<(usize, usize)> {
        match self {
            Kind::HessK | Kind::D2Xi2 | Kind::Nabla2Xi2 | Kind::Ginv | Kind::Nabla3L => Some((0, 1)),
            _ => None,
        }
    }

    /// Degree in `(xi, lambda^{1/2})` of one power of the atom.
    pub fn homogeneity(self) -> i32 {
        match self {
            Kind::B0 => -2,
            Kind::Xi2 | Kind::Lambda | Kind::Nabla2Xi2 => 2,
            Kind::DXi2 | Kind::Nabla3L | Kind::P1 => 1,
            _ => 0,
        }
    }

    /// Degree in `xi` alone, used for parity on the cosphere.
    pub fn xi_degree(self) -> i32 {
        match self {
            Kind::Xi2 | Kind::Nabla2Xi2 => 2,
            Kind::DXi2 | Kind::Nabla3L => 1,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::B0 => "b0",
            Kind::K => "k",
            Kind::GradK => "GradK",
            Kind::HessK => "HessK",
            Kind::P1 => "p1",
            Kind::P0 => "p0",
            Kind::Xi2 => "Xi2",
            Kind::Lambda => "lambda",
            Kind::SDelta => "S",
            Kind::DXi2 => "DXi2",
            Kind::D2Xi2 => "D2Xi2",
            Kind::Nabla2Xi2 => "Nabla2Xi2",
            Kind::Nabla3L => "Nabla3L",
            Kind::Ginv => "Ginv",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        Kind::ALL.iter().copied().find(|k| k.name() == s)
    }
}

/// Index label. Dummies are contracted pairs; free labels come from
/// derivative operators and are contracted when factors meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Idx {
    Dummy(u8),
    Free(u8),
}

impl fmt::Display for Idx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Idx::Dummy(n) if n < 26 => write!(f, "{}", (b'a' + n) as char),
            Idx::Dummy(n) => write!(f, "d{}", n),
            Idx::Free(n) => write!(f, "i{}", n),
        }
    }
}

/// One factor of a monomial. `pow` is used by slotless kinds only;
/// `k^-1` is `K` with `pow = -1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub kind: Kind,
    pub pow: i32,
    pub slots: Vec<Idx>,
}

impl Atom {
    pub fn new(kind: Kind, slots: Vec<Idx>) -> Atom {
        debug_assert_eq!(slots.len(), kind.rank());
        Atom { kind, pow: 1, slots }
    }

    pub fn pow(kind: Kind, pow: i32) -> Atom {
        debug_assert_eq!(kind.rank(), 0);
        Atom { kind, pow, slots: Vec::new() }
    }

    pub fn b0(p: i32) -> Atom {
        Atom::pow(Kind::B0, p)
    }

    pub fn k(p: i32) -> Atom {
        Atom::pow(Kind::K, p)
    }

    pub fn xi2(p: i32) -> Atom {
        Atom::pow(Kind::Xi2, p)
    }

    pub fn homogeneity(&self) -> i32 {
        self.kind.homogeneity() * self.pow
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if self.pow != 1 {
            write!(f, "^{}", self.pow)?;
        }
        if !self.slots.is_empty() {
            let s: Vec<String> = self.slots.iter().map(|i| i.to_string()).collect();
            write!(f, "[{}]", s.join(","))?;
        }
        Ok(())
    }
}
