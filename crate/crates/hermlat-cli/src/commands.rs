//! One function per compute command. Each takes a parsed lattice and returns
//! the JSON printed on stdout.

use serde_json::{json, Value};

use hermlat_core::density::{dden, den_hs, int_number, siegel_series};
use hermlat_core::enumerate::{corank1_integral_lattices, default_delta_cap, integral_overlattices, vertex_overlattices};
use hermlat_core::hermlat::{vector_to_json, LatticeJson};
use hermlat_core::hermlat::HermLattice;
use hermlat_core::rational::fmt_q;
use hermlat_core::schwartz::{dden_v_function, support_outside_vint};

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EnumKind {
    Overlattices,
    Vertex,
    Corank1,
}

pub fn read_lattice(text: &str) -> CliResult<HermLattice> {
    Ok(LatticeJson::parse(text)?)
}

pub fn invariants(l: &HermLattice) -> CliResult<Value> {
    let inv = l.invariants()?;
    Ok(json!({
        "a": inv.a,
        "t": inv.t,
        "val": inv.val,
        "vertex": l.is_vertex()?,
        "selfdual": l.is_selfdual()?,
    }))
}

/// The Siegel series as a polynomial, or its value Den(q^{−s}, L) at one s.
pub fn den(l: &HermLattice, at: Option<i64>) -> CliResult<Value> {
    let q = l.cfg().p;
    match at {
        Some(s) => Ok(Value::String(fmt_q(&den_hs(l, s, q)?))),
        None => Ok(siegel_series(l, q)?.to_json()?),
    }
}

/// Big integers are printed as bare JSON numbers of any length.
fn big_number(v: &num_bigint::BigInt) -> Value {
    serde_json::from_str(&v.to_string()).unwrap_or_else(|_| Value::String(v.to_string()))
}

pub fn dden_cmd(l: &HermLattice) -> CliResult<Value> {
    Ok(big_number(&dden(l, l.cfg().p)?.value))
}

pub fn int_cmd(l: &HermLattice) -> CliResult<Value> {
    Ok(big_number(&int_number(l, l.cfg().p)?.value))
}

fn lattice_value(l: &HermLattice) -> Value {
    serde_json::to_value(LatticeJson::from_lattice(l)).expect("plain data")
}

pub fn enumerate(l: &HermLattice, kind: EnumKind, delta_max: Option<i64>) -> CliResult<Value> {
    let out: Vec<Value> = match kind {
        EnumKind::Overlattices => integral_overlattices(l)?.iter().map(lattice_value).collect(),
        EnumKind::Vertex => vertex_overlattices(l)?.iter().map(lattice_value).collect(),
        EnumKind::Corank1 => {
            if !l.is_integral() {
                return Err(CliError::Input("corank-one enumeration needs an integral L♭".into()));
            }
            let cap = match delta_max {
                Some(d) => d,
                None => default_delta_cap(l)?,
            };
            corank1_integral_lattices(l, cap)?
                .iter()
                .map(|e| {
                    json!({
                        "lattice": lattice_value(&e.lattice),
                        "delta": e.delta,
                        "y": vector_to_json(&e.y),
                    })
                })
                .collect()
        }
    };
    Ok(Value::Array(out))
}

pub fn ft_support(l: &HermLattice) -> CliResult<Value> {
    if l.rank() + 1 != l.dim() {
        return Err(CliError::Input(format!("ft-support needs a corank-one lattice, got rank {} in dimension {}", l.rank(), l.dim())));
    }
    let f = dden_v_function(l)?.fourier()?;
    let w = support_outside_vint(&f)?;
    Ok(json!({ "witness": w.as_deref().map(vector_to_json) }))
}
