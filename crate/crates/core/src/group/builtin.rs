use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{GroupCatalogEntry, GroupKind, GroupSpec, Irrep, IrrepKind, LieGroup};
use crate::error::{Error, Result};
use crate::linalg::{c, real, CMatrix, C64, ONE};

/// Named parameters for built-in groups (`N`, `P`, `J_max`), as strings.
pub type GroupParams = BTreeMap<String, String>;

/// The built-in catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Zn(usize),
    D3,
    U1Trunc { cutoff: u32 },
    Su2Trunc { twice_jmax: u32 },
}

fn param<'a>(params: &'a GroupParams, keys: &[&str]) -> Option<&'a str> {
    keys.iter().find_map(|k| params.get(*k)).map(String::as_str)
}

fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

impl Builtin {
    /// Accepts `Z_N`/`ZN` (with `N`), `Z_4`/`Z4`, `D3`, `U1_trunc` (with `P`)
    /// and `SU2_trunc` (with `J_max`).
    pub fn parse(name: &str, params: &GroupParams) -> Result<Self> {
        let norm: String = name.chars().filter(|c| *c != '_').collect::<String>().to_ascii_uppercase();
        match norm.as_str() {
            "D3" | "S3" => Ok(Builtin::D3),
            "ZN" | "Z" => {
                let n = param(params, &["N", "n"]).ok_or_else(|| invalid("N", "missing"))?;
                Self::zn_from_str(n)
            }
            "U1TRUNC" | "U1" => {
                let p = param(params, &["P", "p", "cutoff"]).ok_or_else(|| invalid("P", "missing"))?;
                let cutoff: u32 = p.trim().parse().map_err(|_| invalid("P", format!("`{p}` is not an integer")))?;
                if cutoff < 1 {
                    return Err(invalid("P", "charge cutoff must be at least 1"));
                }
                Ok(Builtin::U1Trunc { cutoff })
            }
            "SU2TRUNC" | "SU2" => {
                let j = param(params, &["J_max", "j_max", "jmax", "Jmax"]).ok_or_else(|| invalid("J_max", "missing"))?;
                let twice_jmax = parse_half_integer(j)?;
                if twice_jmax < 1 {
                    return Err(invalid("J_max", "must be at least 1/2"));
                }
                Ok(Builtin::Su2Trunc { twice_jmax })
            }
            other if other.starts_with('Z') => Self::zn_from_str(&other[1..]),
            _ => Err(Error::UnknownGroup(name.to_string())),
        }
    }

    fn zn_from_str(n: &str) -> Result<Self> {
        let n: usize = n.trim().parse().map_err(|_| invalid("N", format!("`{n}` is not an integer")))?;
        if n < 2 {
            return Err(invalid("N", "Z_N requires N >= 2"));
        }
        Ok(Builtin::Zn(n))
    }

    pub fn build(&self) -> GroupCatalogEntry {
        match *self {
            Builtin::Zn(n) => cyclic(n),
            Builtin::D3 => dihedral3(),
            Builtin::U1Trunc { cutoff } => u1_truncated(cutoff),
            Builtin::Su2Trunc { twice_jmax } => su2_truncated(twice_jmax),
        }
    }
}

/// Builds and returns a built-in catalog entry.
pub fn build_builtin(name: &str, params: &GroupParams) -> Result<GroupCatalogEntry> {
    Ok(Builtin::parse(name, params)?.build())
}

/// Parses `NAME` or `NAME:key=value,key=value` (e.g. `SU2_trunc:J_max=1/2`).
pub fn parse_group_ref(s: &str) -> Result<GroupCatalogEntry> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut params = GroupParams::new();
    for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, found `{kv}`")))?;
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    build_builtin(name.trim(), &params)
}

/// Parses `"1/2"`, `"3/2"`, `"1"` or `"1.5"` into twice the value.
pub fn parse_half_integer(s: &str) -> Result<u32> {
    let s = s.trim();
    let bad = || invalid("J_max", format!("`{s}` is not a nonnegative half-integer"));
    if let Some((num, den)) = s.split_once('/') {
        let num: u32 = num.trim().parse().map_err(|_| bad())?;
        let den: u32 = den.trim().parse().map_err(|_| bad())?;
        return match den {
            1 => Ok(2 * num),
            2 => Ok(num),
            _ => Err(bad()),
        };
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    let twice = 2.0 * v;
    if v < 0.0 || (twice - twice.round()).abs() > 1e-12 {
        return Err(bad());
    }
    Ok(twice.round() as u32)
}

/// `"0"`, `"1/2"`, `"1"`, `"3/2"`, ...
pub fn format_spin(twice_j: u32) -> String {
    if twice_j % 2 == 0 {
        (twice_j / 2).to_string()
    } else {
        format!("{twice_j}/2")
    }
}

/// Spin-`j` generators `(T_x, T_y, T_z)` with `m` running from `+j` down to `-j`.
pub fn su2_generators(twice_j: u32) -> [CMatrix; 3] {
    let dim = twice_j as usize + 1;
    let j = twice_j as f64 / 2.0;
    let m_of = |i: usize| j - i as f64;
    let mut jp = CMatrix::zeros(dim, dim);
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one index lower
    for i in 1..dim {
        let m = m_of(i);
        jp[(i - 1, i)] = real((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let tx = (&jp + &jm).scale(0.5);
    let ty = (&jp - &jm) * c(0.0, -0.5);
    let tz = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |i, _| real(m_of(i))));
    [tx, ty, tz]
}

fn unit_root(k: usize, n: usize) -> C64 {
    let k = k % n;
    // exact values at quarter turns
    if (4 * k) % n == 0 {
        return [ONE, c(0.0, 1.0), -ONE, c(0.0, -1.0)][4 * k / n];
    }
    C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

fn one_by_one(z: C64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

fn cyclic(n: usize) -> GroupCatalogEntry {
    let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let labels = (0..n).map(|k| k.to_string()).collect();
    let spec = GroupSpec::from_table(format!("Z{n}"), mul, labels).expect("cyclic table is well formed");
    let irreps = (0..n)
        .map(|p| Irrep {
            label: format!("p{p}"),
            dim: 1,
            kind: IrrepKind::Finite,
            matrices: (0..n).map(|k| one_by_one(unit_root(p * k, n))).collect(),
            generators: Vec::new(),
            casimir: None,
        })
        .collect();
    GroupCatalogEntry {
        name: format!("Z{n}"),
        group: GroupKind::Finite(spec),
        irreps,
        fundamental: 1,
    }
}

/// Element order: `e, xi(2pi/3), xi(4pi/3), sigma, xi(2pi/3) sigma, xi(4pi/3) sigma`.
fn dihedral3() -> GroupCatalogEntry {
    let h = 3f64.sqrt() / 2.0;
    let cs = [(1.0, 0.0), (-0.5, h), (-0.5, -h)];
    let mut two = Vec::with_capacity(6);
    for &(co, si) in &cs {
        two.push(CMatrix::from_row_slice(2, 2, &[real(co), real(si), real(-si), real(co)]));
    }
    for &(co, si) in &cs {
        two.push(CMatrix::from_row_slice(2, 2, &[real(co), real(-si), real(-si), real(-co)]));
    }
    let find = |m: &CMatrix| {
        two.iter()
            .position(|x| crate::linalg::max_abs_diff(x, m) < 1e-9)
            .expect("D3 matrices close under multiplication")
    };
    let mul: Vec<Vec<usize>> = (0..6).map(|a| (0..6).map(|b| find(&(&two[a] * &two[b]))).collect()).collect();
    let labels = ["e", "xi(2pi/3)", "xi(4pi/3)", "sigma", "xi(2pi/3)sigma", "xi(4pi/3)sigma"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let spec = GroupSpec::from_table("D3", mul, labels).expect("D3 table is well formed");
    let parity: Vec<CMatrix> = (0..6).map(|g| one_by_one(if g < 3 { ONE } else { -ONE })).collect();
    let irreps = vec![
        Irrep {
            label: "I".into(),
            dim: 1,
            kind: IrrepKind::Finite,
            matrices: vec![one_by_one(ONE); 6],
            generators: Vec::new(),
            casimir: None,
        },
        Irrep {
            label: "p".into(),
            dim: 1,
            kind: IrrepKind::Finite,
            matrices: parity,
            generators: Vec::new(),
            casimir: None,
        },
        Irrep {
            label: "2".into(),
            dim: 2,
            kind: IrrepKind::Finite,
            matrices: two,
            generators: Vec::new(),
            casimir: None,
        },
    ];
    GroupCatalogEntry {
        name: "D3".into(),
        group: GroupKind::Finite(spec),
        irreps,
        fundamental: 2,
    }
}

fn u1_truncated(cutoff: u32) -> GroupCatalogEntry {
    let p_max = cutoff as i32;
    let irreps: Vec<Irrep> = (-p_max..=p_max)
        .map(|p| Irrep {
            label: p.to_string(),
            dim: 1,
            kind: IrrepKind::Charge { p },
            matrices: Vec::new(),
            generators: vec![one_by_one(real(p as f64))],
            casimir: Some((p * p) as f64),
        })
        .collect();
    let fundamental = irreps.iter().position(|r| r.kind == IrrepKind::Charge { p: 1 }).unwrap();
    GroupCatalogEntry {
        name: format!("U1_trunc(P={cutoff})"),
        group: GroupKind::Lie(LieGroup::U1 { cutoff }),
        irreps,
        fundamental,
    }
}

fn su2_truncated(twice_jmax: u32) -> GroupCatalogEntry {
    let irreps: Vec<Irrep> = (0..=twice_jmax)
        .map(|twice_j| {
            let j = twice_j as f64 / 2.0;
            Irrep {
                label: format_spin(twice_j),
                dim: twice_j as usize + 1,
                kind: IrrepKind::Spin { twice_j },
                matrices: Vec::new(),
                generators: su2_generators(twice_j).to_vec(),
                casimir: Some(j * (j + 1.0)),
            }
        })
        .collect();
    GroupCatalogEntry {
        name: format!("SU2_trunc(J_max={})", format_spin(twice_jmax)),
        group: GroupKind::Lie(LieGroup::Su2 { twice_jmax }),
        irreps,
        fundamental: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs_diff};

    fn params(kv: &[(&str, &str)]) -> GroupParams {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn d3_has_order_six_and_dims_112() {
        let e = build_builtin("D3", &GroupParams::new()).unwrap();
        assert_eq!(e.order(), Some(6));
        let dims: Vec<usize> = e.irreps.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![1, 1, 2]);
        assert_eq!(e.dim_sum_squares(), 6);
    }

    #[test]
    fn su2_half_has_five_link_states() {
        let e = build_builtin("SU2_trunc", &params(&[("J_max", "1/2")])).unwrap();
        assert_eq!(e.rep_states().len(), 5);
        let e = build_builtin("SU2_trunc", &params(&[("J_max", "0.5")])).unwrap();
        assert_eq!(e.rep_states().len(), 5);
    }

    #[test]
    fn su2_state_count_closed_form() {
        // (J+1)(2J+1)(4J+3)/3 states for truncation J
        for twice in 1..=6u32 {
            let jm = twice as f64 / 2.0;
            let e = su2_truncated(twice);
            let expect = (jm + 1.0) * (2.0 * jm + 1.0) * (4.0 * jm + 3.0) / 3.0;
            assert_eq!(e.rep_states().len() as f64, expect);
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(matches!(build_builtin("Z_N", &params(&[("N", "1")])), Err(Error::InvalidParameter { .. })));
        assert!(matches!(
            build_builtin("SU2_trunc", &params(&[("J_max", "0.3")])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(build_builtin("SU2_trunc", &params(&[("J_max", "0")])), Err(Error::InvalidParameter { .. })));
        assert!(matches!(build_builtin("U1_trunc", &params(&[("P", "0")])), Err(Error::InvalidParameter { .. })));
        assert!(matches!(build_builtin("E8", &GroupParams::new()), Err(Error::UnknownGroup(_))));
    }

    #[test]
    fn group_refs_parse() {
        assert_eq!(parse_group_ref("Z4").unwrap().order(), Some(4));
        assert_eq!(parse_group_ref("Z_N:N=5").unwrap().order(), Some(5));
        assert_eq!(parse_group_ref("SU2_trunc:J_max=1").unwrap().irreps.len(), 3);
        assert_eq!(parse_group_ref("U1_trunc:P=2").unwrap().irreps.len(), 5);
    }

    #[test]
    fn spin_generators_satisfy_su2_algebra() {
        for twice in 0..=4 {
            let [tx, ty, tz] = su2_generators(twice);
            let i = c(0.0, 1.0);
            assert!(max_abs_diff(&commutator(&tx, &ty), &(&tz * i)) < 1e-14);
            assert!(max_abs_diff(&commutator(&ty, &tz), &(&tx * i)) < 1e-14);
            assert!(max_abs_diff(&commutator(&tz, &tx), &(&ty * i)) < 1e-14);
        }
    }

    #[test]
    fn zn_roots_are_exact_at_quarter_turns() {
        let z4 = cyclic(4);
        assert_eq!(z4.irreps[1].matrices[1][(0, 0)], c(0.0, 1.0));
        assert_eq!(z4.irreps[2].matrices[1][(0, 0)], -ONE);
    }
}
