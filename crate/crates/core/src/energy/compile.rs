//! Symbolic reduction of the five-configuration energy to radial integrals.
//!
//! Every configuration is expanded in its LS components, and each pair of
//! LS CSFs of the same term is run through the same Löwdin expansion as the
//! determinant oracle, except that overlaps and integrals are kept as
//! symbols. Normalization and the `R₀ ⟂ R₁` constraint are substituted, so
//! the result is exact on the admissible manifold and its gradient differs
//! from the true one only along constraint normals.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::angular::{build_csf, Determinant, JjConfig, Sector, SpinOrbital};
use crate::gaunt::gaunt_f64;
use crate::slater_condon::{alignment, parity, permutations, SlaterKey};

/// Pairs of slots that the constraints make orthogonal.
pub const ORTHOGONAL_SLOTS: [(u8, u8); 1] = [(0, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Integral {
    Kinetic { ell: u8, a: u8, b: u8 },
    Nuclear { a: u8, b: u8 },
    Slater(SlaterKey),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Kinetic,
    Nuclear,
    Direct,
    Exchange,
}

impl TermKind {
    pub const ALL: [TermKind; 4] = [TermKind::Kinetic, TermKind::Nuclear, TermKind::Direct, TermKind::Exchange];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// `coeff · Π S(x, y) · integral` contributing to `⟨Φ_i|H|Φ_j⟩` in one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub sector: Sector,
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
    pub overlaps: Vec<(u8, u8)>,
    pub integral: Integral,
    pub kind: TermKind,
}

/// `coeff · Π S(x, y)` contributing to `⟨Φ_i|Φ_j⟩` in one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTerm {
    pub sector: Sector,
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
    pub overlaps: Vec<(u8, u8)>,
}

/// Upper triangle (`i ≤ j`) of the configuration Hamiltonian and overlap,
/// as symbolic radial expressions.
#[derive(Debug, Clone)]
pub struct CompiledEnergy {
    pub terms: Vec<Term>,
    pub norm_terms: Vec<NormTerm>,
}

enum Factor {
    One,
    Zero,
    Pair(u8, u8),
}

fn factor(f: &SpinOrbital, g: &SpinOrbital) -> Factor {
    if (f.ell, f.m, f.spin) != (g.ell, g.m, g.spin) {
        return Factor::Zero;
    }
    let pair = (f.slot.min(g.slot), f.slot.max(g.slot));
    if pair.0 == pair.1 {
        Factor::One
    } else if ORTHOGONAL_SLOTS.contains(&pair) {
        Factor::Zero
    } else {
        Factor::Pair(pair.0, pair.1)
    }
}

type TermKey = (Vec<(u8, u8)>, Integral, TermKind);

#[derive(Default)]
struct PairExpansion {
    overlap: HashMap<Vec<(u8, u8)>, f64>,
    hamiltonian: HashMap<TermKey, f64>,
}

impl PairExpansion {
    fn add_overlap(&mut self, overlaps: Vec<(u8, u8)>, c: f64) {
        *self.overlap.entry(overlaps).or_default() += c;
    }

    fn add(&mut self, overlaps: Vec<(u8, u8)>, integral: Integral, kind: TermKind, c: f64) {
        *self.hamiltonian.entry((overlaps, integral, kind)).or_default() += c;
    }
}

/// Product of the overlap factors outside `skip`, or `None` if one vanishes.
fn rest_product(factors: &[Option<Factor>], skip: &[usize]) -> Option<Vec<(u8, u8)>> {
    let mut out = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        match f {
            Some(Factor::One) => {}
            Some(Factor::Pair(a, b)) => out.push((*a, *b)),
            Some(Factor::Zero) | None => return None,
        }
    }
    out.sort_unstable();
    Some(out)
}

fn expand_pair(
    bra: &Determinant,
    ket: &Determinant,
    weight: f64,
    perms: &[(Vec<usize>, f64)],
    out: &mut PairExpansion,
) {
    let f = bra.orbitals();
    let g = ket.orbitals();
    let n = f.len();
    let align_even = parity(&alignment(f, g));
    for (p, sign) in perms {
        let factors: Vec<Option<Factor>> = (0..n)
            .map(|i| {
                let fac = factor(&f[i], &g[p[i]]);
                let labels_match = (f[i].ell, f[i].m, f[i].spin) == (g[p[i]].ell, g[p[i]].m, g[p[i]].spin);
                labels_match.then_some(fac)
            })
            .collect();
        let mismatched: Vec<usize> = (0..n).filter(|&i| factors[i].is_none()).collect();
        if mismatched.len() > 2 {
            continue;
        }
        let c = weight * sign;
        if mismatched.is_empty() {
            if let Some(rest) = rest_product(&factors, &[]) {
                out.add_overlap(rest, c);
            }
        }
        if mismatched.len() <= 1 {
            for i in 0..n {
                if mismatched.first().is_some_and(|&m| m != i) || factors[i].is_none() {
                    continue;
                }
                let Some(rest) = rest_product(&factors, &[i]) else {
                    continue;
                };
                let (a, b) = (f[i].slot, g[p[i]].slot);
                let (a, b) = (a.min(b), a.max(b));
                out.add(rest.clone(), Integral::Kinetic { ell: f[i].ell, a, b }, TermKind::Kinetic, c);
                out.add(rest, Integral::Nuclear { a, b }, TermKind::Nuclear, c);
            }
        }
        let kind = if parity(p) == align_even {
            TermKind::Direct
        } else {
            TermKind::Exchange
        };
        for i in 0..n {
            for j in i + 1..n {
                if mismatched.iter().any(|&m| m != i && m != j) {
                    continue;
                }
                let Some(rest) = rest_product(&factors, &[i, j]) else {
                    continue;
                };
                let (f1, f2, g1, g2) = (&f[i], &f[j], &g[p[i]], &g[p[j]]);
                if f1.spin != g1.spin || f2.spin != g2.spin || f1.m + f2.m != g1.m + g2.m {
                    continue;
                }
                for k in 0..=4u8 {
                    let c1 = gaunt_f64(f1.ell, f1.m, g1.ell, g1.m, k);
                    let c2 = gaunt_f64(g2.ell, g2.m, f2.ell, f2.m, k);
                    if c1 == 0.0 || c2 == 0.0 {
                        continue;
                    }
                    let key = SlaterKey::new(k, f1.slot, f2.slot, g1.slot, g2.slot).canonical();
                    out.add(rest.clone(), Integral::Slater(key), kind, c * c1 * c2);
                }
            }
        }
    }
}

/// Tolerance below which accumulated symbolic coefficients are dropped.
const COEFF_FLOOR: f64 = 1e-14;

fn compile() -> CompiledEnergy {
    let mut terms = Vec::new();
    let mut norm_terms = Vec::new();
    let perms = permutations(4);
    for sector in Sector::ALL {
        let csfs: Vec<_> = JjConfig::ALL
            .iter()
            .map(|c| {
                let coeff = c.ls_coefficient(sector).to_f64();
                let label = sector.csf_label(c.shells());
                match label {
                    Some(label) if coeff != 0.0 => Some((coeff, build_csf(label, c.default_slots()).to_f64())),
                    _ => None,
                }
            })
            .collect();
        for i in 0..csfs.len() {
            for j in i..csfs.len() {
                let (Some((ci, bra)), Some((cj, ket))) = (&csfs[i], &csfs[j]) else {
                    continue;
                };
                let mut acc = PairExpansion::default();
                for (db, wb) in bra.terms() {
                    for (dk, wk) in ket.terms() {
                        expand_pair(db, dk, ci * cj * wb * wk, &perms, &mut acc);
                    }
                }
                let mut h: Vec<_> = acc.hamiltonian.into_iter().filter(|(_, c)| c.abs() > COEFF_FLOOR).collect();
                h.sort_by(|x, y| x.0.cmp(&y.0));
                terms.extend(h.into_iter().map(|((overlaps, integral, kind), coeff)| Term {
                    sector,
                    i,
                    j,
                    coeff,
                    overlaps,
                    integral,
                    kind,
                }));
                let mut s: Vec<_> = acc.overlap.into_iter().filter(|(_, c)| c.abs() > COEFF_FLOOR).collect();
                s.sort_by(|x, y| x.0.cmp(&y.0));
                norm_terms.extend(s.into_iter().map(|(overlaps, coeff)| NormTerm {
                    sector,
                    i,
                    j,
                    coeff,
                    overlaps,
                }));
            }
        }
    }
    CompiledEnergy { terms, norm_terms }
}

/// The compiled expression, built once per process.
pub fn compiled() -> &'static CompiledEnergy {
    static CACHE: OnceLock<CompiledEnergy> = OnceLock::new();
    CACHE.get_or_init(compile)
}
