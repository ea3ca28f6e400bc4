//! Constructors for the explicit group families: cyclic, dihedral,
//! elementary abelian, symmetric, alternating, dicyclic (which covers the
//! quaternion group), and direct products.

use std::path::PathBuf;

use crate::sgbound::is_prime;

use super::{GroupError, GroupLimits, GroupTable};

/// Recipe for a constructed group, as exposed on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    /// Cyclic of order `n >= 1`.
    Cyclic(usize),
    /// Dihedral of order `n` (even, `n >= 2`).
    Dihedral(usize),
    /// Elementary abelian of order `p^k`.
    ElementaryAbelian(u64, u32),
    /// Symmetric group on `n <= 5` points.
    Symmetric(u32),
    /// Alternating group on `n <= 5` points.
    Alternating(u32),
    /// The quaternion group of order 8.
    Quaternion8,
    /// Dicyclic of order `4k`, `k >= 1` (`k = 2` is the quaternion group).
    Dicyclic(usize),
    /// Direct product of the factors, left to right.
    Product(Vec<GroupKind>),
    /// Cayley table loaded from a file.
    FromFile(PathBuf),
}

pub fn make_group(kind: &GroupKind, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    match kind {
        GroupKind::Cyclic(n) => cyclic(*n, limits),
        GroupKind::Dihedral(n) => dihedral(*n, limits),
        GroupKind::ElementaryAbelian(p, k) => elementary_abelian(*p, *k, limits),
        GroupKind::Symmetric(n) => symmetric(*n, limits),
        GroupKind::Alternating(n) => alternating(*n, limits),
        GroupKind::Quaternion8 => {
            let mut g = dicyclic(2, limits)?;
            g.name = "Q8".to_string();
            Ok(g)
        }
        GroupKind::Dicyclic(k) => dicyclic(*k, limits),
        GroupKind::Product(kinds) => {
            if kinds.len() < 2 {
                return Err(GroupError::Construction(
                    "a direct product needs at least two factors".into(),
                ));
            }
            let mut acc = make_group(&kinds[0], limits)?;
            for k in &kinds[1..] {
                let rhs = make_group(k, limits)?;
                acc = direct_product(&acc, &rhs, limits)?;
            }
            Ok(acc)
        }
        GroupKind::FromFile(path) => super::cayley::load_file(path, limits),
    }
}

fn check_order(order: usize, limits: &GroupLimits) -> Result<(), GroupError> {
    if order == 0 {
        return Err(GroupError::Construction("group order must be at least 1".into()));
    }
    if order > limits.max_order {
        return Err(GroupError::OrderCap(order, limits.max_order));
    }
    Ok(())
}

pub fn cyclic(n: usize, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    check_order(n, limits)?;
    let table: Vec<u32> = (0..n)
        .flat_map(|i| (0..n).map(move |j| ((i + j) % n) as u32))
        .collect();
    GroupTable::validated(format!("C{n}"), n, table)
}

pub fn dihedral(order: usize, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    if order < 2 || order % 2 != 0 {
        return Err(GroupError::Construction(format!(
            "dihedral order must be even and >= 2, got {order}"
        )));
    }
    check_order(order, limits)?;
    let k = order / 2;
    // index i + s*k encodes rotation^i * flip^s
    let idx = |i: usize, s: usize| (i % k + s * k) as u32;
    let mut table = vec![0u32; order * order];
    for i in 0..k {
        for s in 0..2 {
            for j in 0..k {
                for t in 0..2 {
                    let row = i + s * k;
                    let col = j + t * k;
                    let val = if s == 0 { idx(i + j, t) } else { idx(i + k - j % k, 1 - t) };
                    table[row * order + col] = val;
                }
            }
        }
    }
    GroupTable::validated(format!("D{order}"), order, table)
}

pub fn elementary_abelian(p: u64, k: u32, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    if !is_prime(p) {
        return Err(GroupError::Construction(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(GroupError::Construction("exponent k must be >= 1".into()));
    }
    let order = (p as usize)
        .checked_pow(k)
        .filter(|&n| n <= limits.max_order)
        .ok_or(GroupError::OrderCap(usize::MAX, limits.max_order))?;
    check_order(order, limits)?;
    let p = p as usize;
    // digits of the index, base p, added componentwise
    let add = |a: usize, b: usize| -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut scale = 1usize;
        for _ in 0..k {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out as u32
    };
    let table: Vec<u32> = (0..order).flat_map(|i| (0..order).map(move |j| add(i, j))).collect();
    let mut g = GroupTable::validated(format!("E({p}^{k})"), order, table)?;
    g.elementary_abelian = Some((p as u64, k));
    Ok(g)
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut perms = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in perms {
            for x in 0..n as u8 {
                if !p.contains(&x) {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
        }
        perms = next;
    }
    perms.sort();
    perms
}

fn parity(perm: &[u8]) -> u8 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    inv % 2
}

fn perm_group(name: String, perms: Vec<Vec<u8>>, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    let order = perms.len();
    check_order(order, limits)?;
    let index: std::collections::HashMap<&[u8], u32> =
        perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i as u32)).collect();
    let mut table = vec![0u32; order * order];
    for (i, a) in perms.iter().enumerate() {
        for (j, b) in perms.iter().enumerate() {
            // composition a after b
            let c: Vec<u8> = (0..a.len()).map(|x| a[b[x] as usize]).collect();
            table[i * order + j] = index[c.as_slice()];
        }
    }
    GroupTable::validated(name, order, table)
}

pub fn symmetric(n: u32, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    if n == 0 || n > 5 {
        return Err(GroupError::Construction(format!("symmetric degree must be 1..=5, got {n}")));
    }
    perm_group(format!("S{n}"), permutations(n as usize), limits)
}

pub fn alternating(n: u32, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    if n == 0 || n > 5 {
        return Err(GroupError::Construction(format!(
            "alternating degree must be 1..=5, got {n}"
        )));
    }
    let perms: Vec<Vec<u8>> =
        permutations(n as usize).into_iter().filter(|p| parity(p) == 0).collect();
    perm_group(format!("A{n}"), perms, limits)
}

/// Dicyclic group of order `4k`: generators `a` of order `2k` and `b` with
/// `b^2 = a^k`, `b a b^-1 = a^-1`. `k = 2` is the quaternion group.
pub fn dicyclic(k: usize, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    if k == 0 {
        return Err(GroupError::Construction("dicyclic parameter must be >= 1".into()));
    }
    let order = 4 * k;
    check_order(order, limits)?;
    let n2 = 2 * k;
    let idx = |i: usize, s: usize| (i % n2 + s * n2) as u32;
    let mut table = vec![0u32; order * order];
    for i in 0..n2 {
        for s in 0..2 {
            for j in 0..n2 {
                for t in 0..2 {
                    let row = i + s * n2;
                    let col = j + t * n2;
                    let val = match (s, t) {
                        (0, _) => idx(i + j, t),
                        (1, 0) => idx(i + n2 - j % n2, 1),
                        (1, 1) => idx(i + n2 - j % n2 + k, 0),
                        _ => unreachable!(),
                    };
                    table[row * order + col] = val;
                }
            }
        }
    }
    GroupTable::validated(format!("Dic{k}"), order, table)
}

pub fn direct_product(
    a: &GroupTable,
    b: &GroupTable,
    limits: &GroupLimits,
) -> Result<GroupTable, GroupError> {
    let order = a
        .order()
        .checked_mul(b.order())
        .filter(|&n| n <= limits.max_order)
        .ok_or(GroupError::OrderCap(usize::MAX, limits.max_order))?;
    let nb = b.order();
    let mut table = vec![0u32; order * order];
    for i1 in 0..a.order() {
        for i2 in 0..nb {
            for j1 in 0..a.order() {
                for j2 in 0..nb {
                    let row = i1 * nb + i2;
                    let col = j1 * nb + j2;
                    let v = a.op(i1 as u32, j1 as u32) as usize * nb
                        + b.op(i2 as u32, j2 as u32) as usize;
                    table[row * order + col] = v as u32;
                }
            }
        }
    }
    let mut g = GroupTable::validated(format!("{}x{}", a.name, b.name), order, table)?;
    // a product of elementary abelian groups over the same prime stays one
    if let (Some((pa, ka)), Some((pb, kb))) = (a.elementary_abelian, b.elementary_abelian) {
        if pa == pb {
            g.elementary_abelian = Some((pa, ka + kb));
        }
    }
    Ok(g)
}
