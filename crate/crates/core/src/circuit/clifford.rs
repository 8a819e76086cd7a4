//! The 24 single-qubit Clifford gates, identified by how they conjugate `X` and `Z`.

use std::fmt;

use super::Pauli;

/// A signed Pauli: the image of a Pauli under Clifford conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub pauli: Pauli,
    pub negative: bool,
}

impl SignedPauli {
    const fn pos(pauli: Pauli) -> Self {
        SignedPauli { pauli, negative: false }
    }
    const fn neg(pauli: Pauli) -> Self {
        SignedPauli { pauli, negative: true }
    }
}

macro_rules! clifford_table {
    ($( $variant:ident => $name:literal, X -> $xs:ident $xp:ident, Z -> $zs:ident $zp:ident; )*) => {
        /// A named single-qubit Clifford gate (names follow the Stim conventions).
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Clifford1 {
            $( $variant, )*
        }

        impl Clifford1 {
            pub const ALL: [Clifford1; 24] = [ $( Clifford1::$variant, )* ];

            pub fn name(self) -> &'static str {
                match self {
                    $( Clifford1::$variant => $name, )*
                }
            }

            /// Conjugation images `(U X U†, U Z U†)`.
            pub fn images(self) -> (SignedPauli, SignedPauli) {
                match self {
                    $( Clifford1::$variant => (
                        SignedPauli::$xs(Pauli::$xp),
                        SignedPauli::$zs(Pauli::$zp),
                    ), )*
                }
            }
        }
    };
}

clifford_table! {
    I => "I", X -> pos X, Z -> pos Z;
    X => "X", X -> pos X, Z -> neg Z;
    Y => "Y", X -> neg X, Z -> neg Z;
    Z => "Z", X -> neg X, Z -> pos Z;
    H => "H", X -> pos Z, Z -> pos X;
    SqrtY => "SQRT_Y", X -> neg Z, Z -> pos X;
    SqrtYDag => "SQRT_Y_DAG", X -> pos Z, Z -> neg X;
    HNxz => "H_NXZ", X -> neg Z, Z -> neg X;
    S => "S", X -> pos Y, Z -> pos Z;
    SDag => "S_DAG", X -> neg Y, Z -> pos Z;
    HXy => "H_XY", X -> pos Y, Z -> neg Z;
    HNxy => "H_NXY", X -> neg Y, Z -> neg Z;
    SqrtX => "SQRT_X", X -> pos X, Z -> neg Y;
    SqrtXDag => "SQRT_X_DAG", X -> pos X, Z -> pos Y;
    HYz => "H_YZ", X -> neg X, Z -> pos Y;
    HNyz => "H_NYZ", X -> neg X, Z -> neg Y;
    CXyz => "C_XYZ", X -> pos Y, Z -> pos X;
    CNxyz => "C_NXYZ", X -> neg Y, Z -> neg X;
    CXnyz => "C_XNYZ", X -> neg Y, Z -> pos X;
    CXynz => "C_XYNZ", X -> pos Y, Z -> neg X;
    CZyx => "C_ZYX", X -> pos Z, Z -> pos Y;
    CNzyx => "C_NZYX", X -> neg Z, Z -> neg Y;
    CZnyx => "C_ZNYX", X -> pos Z, Z -> neg Y;
    CZynx => "C_ZYNX", X -> neg Z, Z -> pos Y;
}

/// Phase-tracking product of two signed Paulis, returning `(power of i, pauli)`.
fn mul(a: (u8, bool, bool), b: (u8, bool, bool)) -> (u8, bool, bool) {
    // (phase exponent of i, x, z) with the convention P = i^k X^x Z^z.
    let (ka, xa, za) = a;
    let (kb, xb, zb) = b;
    // Z^za X^xb = (-1)^(za*xb) X^xb Z^za
    let swap = if za && xb { 2 } else { 0 };
    ((ka + kb + swap) % 4, xa ^ xb, za ^ zb)
}

fn to_xz(p: SignedPauli) -> (u8, bool, bool) {
    // Y = i X Z
    let (k, x, z) = match p.pauli {
        Pauli::X => (0, true, false),
        Pauli::Z => (0, false, true),
        Pauli::Y => (1, true, true),
    };
    ((k + if p.negative { 2 } else { 0 }) % 4, x, z)
}

fn from_xz(v: (u8, bool, bool)) -> Option<SignedPauli> {
    let (k, x, z) = v;
    let (pauli, base) = match (x, z) {
        (true, false) => (Pauli::X, 0),
        (false, true) => (Pauli::Z, 0),
        (true, true) => (Pauli::Y, 1),
        (false, false) => return None,
    };
    match (k + 4 - base) % 4 {
        0 => Some(SignedPauli::pos(pauli)),
        2 => Some(SignedPauli::neg(pauli)),
        _ => None,
    }
}

impl Clifford1 {
    /// Image of `Y` under conjugation, derived from `Y = iXZ`.
    pub fn image_y(self) -> SignedPauli {
        let (x, z) = self.images();
        let prod = mul(to_xz(x), to_xz(z));
        from_xz(((prod.0 + 1) % 4, prod.1, prod.2)).expect("Clifford images anticommute")
    }

    pub fn image(self, p: Pauli) -> SignedPauli {
        match p {
            Pauli::X => self.images().0,
            Pauli::Z => self.images().1,
            Pauli::Y => self.image_y(),
        }
    }

    /// The gate equal to applying `self` first and then `next`.
    pub fn then(self, next: Clifford1) -> Clifford1 {
        let compose = |p: Pauli| {
            let first = self.image(p);
            let second = next.image(first.pauli);
            SignedPauli { pauli: second.pauli, negative: first.negative ^ second.negative }
        };
        let want = (compose(Pauli::X), compose(Pauli::Z));
        Clifford1::ALL
            .into_iter()
            .find(|c| c.images() == want)
            .expect("single-qubit Cliffords are closed under composition")
    }

    pub fn inverse(self) -> Clifford1 {
        Clifford1::ALL
            .into_iter()
            .find(|c| self.then(*c) == Clifford1::I)
            .expect("every Clifford has an inverse")
    }

    pub fn from_name(name: &str) -> Option<Clifford1> {
        Clifford1::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Images as bit triples `(x, z, negative)` for `X`, `Y` and `Z` inputs.
    pub(crate) fn bit_images(self) -> [(bool, bool, bool); 3] {
        let bits = |p: SignedPauli| {
            let (x, z) = p.pauli.xz();
            (x, z, p.negative)
        };
        [bits(self.image(Pauli::X)), bits(self.image(Pauli::Y)), bits(self.image(Pauli::Z))]
    }
}

impl fmt::Display for Clifford1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
