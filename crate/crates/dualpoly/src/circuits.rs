//! Boolean circuits of AND/OR gates over literals.
//!
//! A [`CircuitDesc`] is a gate list in topological order: a gate may only
//! reference literals, constants and earlier gates, which makes acyclicity a
//! structural invariant. Size is the number of AND/OR gates reachable from
//! the output, depth is the longest gate path (a single literal has depth
//! zero), and the bottom fan-in is the largest fan-in of a gate whose inputs
//! are all literals or constants. Statistics are recomputed on demand and
//! never stored.
//!
//! Named families: AND, OR, parity (as a DNF), dictators, the Minsky–Papert
//! function `MP_{m,r}` and its symmetric form `MP*_{m,r}`, the surjectivity
//! function in symmetric form, the Krause–Pudlák selector lift, and the
//! recursive constant-depth family built by repeated amplification
//! ([`build_fkn`]).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::amplify::{amplify_circuit_once, AmplifiedCircuit};
use crate::domain::{weight, Domain};
use crate::error::{Error, Result};
use crate::rational::iroot;
use crate::table::FnTable;

/// Largest input count for which [`CircuitDesc::truth_table`] is available.
pub const TRUTH_TABLE_MAX_INPUTS: usize = 20;

/// Gate type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    /// Conjunction.
    And,
    /// Disjunction.
    Or,
}

impl GateKind {
    /// The other kind.
    pub fn flip(self) -> GateKind {
        match self {
            GateKind::And => GateKind::Or,
            GateKind::Or => GateKind::And,
        }
    }

    /// Lower-case name.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Or => "or",
        }
    }
}

/// A reference to a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Wire {
    /// A constant.
    Const(bool),
    /// Input `var`, negated unless `positive`.
    Lit {
        /// Input index.
        var: usize,
        /// Polarity.
        positive: bool,
    },
    /// Output of gate `index`.
    Gate(usize),
}

impl Wire {
    /// The positive literal `x_var`.
    pub fn pos(var: usize) -> Wire {
        Wire::Lit { var, positive: true }
    }

    /// The negative literal `not x_var`.
    pub fn neg(var: usize) -> Wire {
        Wire::Lit { var, positive: false }
    }

    fn is_leaf(&self) -> bool {
        !matches!(self, Wire::Gate(_))
    }
}

/// One AND/OR gate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gate {
    /// Gate type.
    pub kind: GateKind,
    /// Inputs (non-empty).
    pub inputs: Vec<Wire>,
}

/// A circuit: gates in topological order plus an output wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitDesc {
    /// Number of input variables.
    pub inputs: usize,
    /// Gates; gate `i` references only gates `< i`.
    pub gates: Vec<Gate>,
    /// Output wire.
    pub output: Wire,
}

/// Structural statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitStats {
    /// Number of AND/OR gates reachable from the output.
    pub size: usize,
    /// Longest gate path from an input to the output.
    pub depth: usize,
    /// Largest fan-in among gates all of whose inputs are leaves.
    pub bottom_fan_in: usize,
    /// Largest fan-in of any gate.
    pub max_fan_in: usize,
    /// No negated literals are used.
    pub monotone: bool,
    /// Kind of the output gate, if any.
    pub top: Option<GateKind>,
}

impl CircuitDesc {
    /// The constant circuit.
    pub fn constant(inputs: usize, value: bool) -> Self {
        CircuitDesc { inputs, gates: Vec::new(), output: Wire::Const(value) }
    }

    /// The literal circuit `x_var` or `not x_var`.
    pub fn literal(inputs: usize, var: usize, positive: bool) -> Result<Self> {
        if var >= inputs {
            return Err(Error::Invalid(format!("variable {var} out of range for {inputs} inputs")));
        }
        Ok(CircuitDesc { inputs, gates: Vec::new(), output: Wire::Lit { var, positive } })
    }

    /// A single gate over the given wires (which must be leaves).
    pub fn single_gate(inputs: usize, kind: GateKind, wires: Vec<Wire>) -> Result<Self> {
        let c = CircuitDesc { inputs, gates: vec![Gate { kind, inputs: wires }], output: Wire::Gate(0) };
        c.validate()?;
        Ok(c)
    }

    /// Combines sub-circuits over the same inputs under a new gate.
    pub fn combine(kind: GateKind, parts: &[CircuitDesc]) -> Result<Self> {
        let inputs = parts.first().map(|p| p.inputs).ok_or_else(|| Error::Invalid("empty gate".into()))?;
        let mut out = CircuitDesc { inputs, gates: Vec::new(), output: Wire::Const(false) };
        let mut wires = Vec::with_capacity(parts.len());
        for p in parts {
            if p.inputs != inputs {
                return Err(Error::DimensionMismatch { left: inputs, right: p.inputs });
            }
            wires.push(out.append(p));
        }
        out.gates.push(Gate { kind, inputs: wires });
        out.output = Wire::Gate(out.gates.len() - 1);
        Ok(out)
    }

    /// Copies `other`'s gates into `self` and returns the wire carrying its
    /// output.
    fn append(&mut self, other: &CircuitDesc) -> Wire {
        let off = self.gates.len();
        let shift = |w: &Wire| match w {
            Wire::Gate(i) => Wire::Gate(i + off),
            w => *w,
        };
        for g in &other.gates {
            self.gates.push(Gate { kind: g.kind, inputs: g.inputs.iter().map(shift).collect() });
        }
        shift(&other.output)
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let check = |w: &Wire, limit: usize| -> Result<()> {
            match *w {
                Wire::Lit { var, .. } if var >= self.inputs => {
                    Err(Error::Invalid(format!("literal x{var} out of range for {} inputs", self.inputs)))
                }
                Wire::Gate(j) if j >= limit => Err(Error::Invalid(format!("gate reference {j} is not topological"))),
                _ => Ok(()),
            }
        };
        for (i, g) in self.gates.iter().enumerate() {
            if g.inputs.is_empty() {
                return Err(Error::Invalid(format!("gate {i} has no inputs")));
            }
            for w in &g.inputs {
                check(w, i)?;
            }
        }
        check(&self.output, self.gates.len())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.gates.len()];
        let mut stack = Vec::new();
        if let Wire::Gate(i) = self.output {
            stack.push(i);
        }
        while let Some(i) = stack.pop() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            for w in &self.gates[i].inputs {
                if let Wire::Gate(j) = w {
                    stack.push(*j);
                }
            }
        }
        seen
    }

    /// Size, depth, fan-in and monotonicity, computed from the structure.
    pub fn stats(&self) -> CircuitStats {
        let live = self.reachable();
        let mut depth = vec![0usize; self.gates.len()];
        let mut size = 0;
        let mut bottom = 0;
        let mut max_fan = 0;
        let mut monotone = !matches!(self.output, Wire::Lit { positive: false, .. });
        for (i, g) in self.gates.iter().enumerate() {
            let dmax = g
                .inputs
                .iter()
                .map(|w| match w {
                    Wire::Gate(j) => depth[*j],
                    _ => 0,
                })
                .max()
                .unwrap_or(0);
            depth[i] = dmax + 1;
            if !live[i] {
                continue;
            }
            size += 1;
            max_fan = max_fan.max(g.inputs.len());
            if g.inputs.iter().all(Wire::is_leaf) {
                bottom = bottom.max(g.inputs.len());
            }
            if g.inputs.iter().any(|w| matches!(w, Wire::Lit { positive: false, .. })) {
                monotone = false;
            }
        }
        let (d, top) = match self.output {
            Wire::Gate(i) => (depth[i], Some(self.gates[i].kind)),
            _ => (0, None),
        };
        CircuitStats { size, depth: d, bottom_fan_in: bottom, max_fan_in: max_fan, monotone, top }
    }

    /// Value at `x` (entries are read as bits).
    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.inputs {
            return Err(Error::DimensionMismatch { left: self.inputs, right: x.len() });
        }
        let mut vals = Vec::with_capacity(self.gates.len());
        let read = |w: &Wire, vals: &Vec<bool>| match *w {
            Wire::Const(b) => b,
            Wire::Lit { var, positive } => x[var] == positive,
            Wire::Gate(j) => vals[j],
        };
        for g in &self.gates {
            let v = match g.kind {
                GateKind::And => g.inputs.iter().all(|w| read(w, &vals)),
                GateKind::Or => g.inputs.iter().any(|w| read(w, &vals)),
            };
            vals.push(v);
        }
        Ok(read(&self.output, &vals))
    }

    /// Value at an integer point with `0/1` entries.
    pub fn evaluate_point(&self, x: &[i64]) -> Result<bool> {
        let bits: Vec<bool> = x.iter().map(|&c| c != 0).collect();
        self.evaluate(&bits)
    }

    /// The truth table on `{0,1}^inputs` (lexicographic order).
    pub fn truth_table(&self) -> Result<FnTable> {
        if self.inputs > TRUTH_TABLE_MAX_INPUTS {
            return Err(Error::TooLarge(format!(
                "truth table on {} inputs (limit {TRUTH_TABLE_MAX_INPUTS})",
                self.inputs
            )));
        }
        let dom = Domain::Hypercube(self.inputs);
        let pts = dom.points();
        let mut vals = Vec::with_capacity(pts.len());
        for p in &pts {
            vals.push(self.evaluate_point(p)?);
        }
        let mut it = vals.into_iter();
        Ok(FnTable::boolean(dom, |_| it.next().expect("one value per point")))
    }

    /// The negation `not C`, by De Morgan: gate kinds and literal polarities
    /// are swapped; size and depth are unchanged.
    pub fn negate(&self) -> CircuitDesc {
        let flip = |w: &Wire| match *w {
            Wire::Const(b) => Wire::Const(!b),
            Wire::Lit { var, positive } => Wire::Lit { var, positive: !positive },
            g => g,
        };
        CircuitDesc {
            inputs: self.inputs,
            gates: self
                .gates
                .iter()
                .map(|g| Gate { kind: g.kind.flip(), inputs: g.inputs.iter().map(flip).collect() })
                .collect(),
            output: flip(&self.output),
        }
    }

    /// `not C(not x)`: swaps AND and OR gates and keeps the literals, so a
    /// monotone circuit stays monotone. Threshold degree, size and depth are
    /// unchanged.
    pub fn dual(&self) -> CircuitDesc {
        let flip_const = |w: &Wire| match *w {
            Wire::Const(b) => Wire::Const(!b),
            w => w,
        };
        CircuitDesc {
            inputs: self.inputs,
            gates: self
                .gates
                .iter()
                .map(|g| Gate { kind: g.kind.flip(), inputs: g.inputs.iter().map(flip_const).collect() })
                .collect(),
            output: flip_const(&self.output),
        }
    }

    /// Substitutes circuit `subs[i]` (over a common input set) for input `i`.
    /// Each substituted circuit, and its negation when a negative literal
    /// asks for it, is copied once and shared.
    pub fn substitute(&self, subs: &[CircuitDesc]) -> Result<CircuitDesc> {
        if subs.len() != self.inputs {
            return Err(Error::DimensionMismatch { left: self.inputs, right: subs.len() });
        }
        let inputs = subs.first().map(|s| s.inputs).unwrap_or(0);
        if subs.iter().any(|s| s.inputs != inputs) {
            return Err(Error::Invalid("substituted circuits must share their inputs".into()));
        }
        let mut out = CircuitDesc { inputs, gates: Vec::new(), output: Wire::Const(false) };
        let mut cache: BTreeMap<(usize, bool), Wire> = BTreeMap::new();
        let mut map_leaf = |out: &mut CircuitDesc, w: &Wire| -> Wire {
            match *w {
                Wire::Lit { var, positive } => *cache.entry((var, positive)).or_insert_with(|| {
                    if positive {
                        out.append(&subs[var])
                    } else {
                        out.append(&subs[var].negate())
                    }
                }),
                w => w,
            }
        };
        let mut gate_map = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let mut ins = Vec::with_capacity(g.inputs.len());
            for w in &g.inputs {
                ins.push(match w {
                    Wire::Gate(j) => Wire::Gate(gate_map[*j]),
                    leaf => map_leaf(&mut out, leaf),
                });
            }
            out.gates.push(Gate { kind: g.kind, inputs: ins });
            gate_map.push(out.gates.len() - 1);
        }
        out.output = match self.output {
            Wire::Gate(j) => Wire::Gate(gate_map[j]),
            leaf => map_leaf(&mut out, &leaf),
        };
        Ok(out.normalize())
    }

    /// Normalization pass: constants are propagated, single-input gates are
    /// bypassed, a gate feeding a gate of the same kind is merged into it,
    /// duplicate inputs are removed, identical gates are shared, and
    /// unreachable gates are dropped. The function computed is unchanged.
    pub fn normalize(&self) -> CircuitDesc {
        // Each old gate becomes either a leaf wire or a (kind, flattened
        // inputs) description over new wires.
        #[derive(Clone)]
        enum Slot {
            Leaf(Wire),
            Gate(GateKind, Vec<Wire>, usize),
        }
        let mut out = CircuitDesc { inputs: self.inputs, gates: Vec::new(), output: Wire::Const(false) };
        let mut slots: Vec<Slot> = Vec::with_capacity(self.gates.len());
        let mut interned: BTreeMap<Gate, usize> = BTreeMap::new();
        let live = self.reachable();
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                slots.push(Slot::Leaf(Wire::Const(false)));
                continue;
            }
            let absorbing = g.kind == GateKind::Or;
            let mut ins: Vec<Wire> = Vec::new();
            let mut decided: Option<bool> = None;
            for w in &g.inputs {
                let (sub_kind, sub_ins, wire) = match w {
                    Wire::Gate(j) => match &slots[*j] {
                        Slot::Leaf(l) => (None, Vec::new(), *l),
                        Slot::Gate(k, v, idx) => (Some(*k), v.clone(), Wire::Gate(*idx)),
                    },
                    leaf => (None, Vec::new(), *leaf),
                };
                if sub_kind == Some(g.kind) {
                    ins.extend(sub_ins);
                    continue;
                }
                match wire {
                    Wire::Const(b) if b == absorbing => decided = Some(absorbing),
                    Wire::Const(_) => {}
                    w => ins.push(w),
                }
            }
            if decided.is_some() {
                slots.push(Slot::Leaf(Wire::Const(absorbing)));
                continue;
            }
            ins.sort_unstable();
            ins.dedup();
            match ins.len() {
                0 => slots.push(Slot::Leaf(Wire::Const(!absorbing))),
                1 => slots.push(match ins[0] {
                    Wire::Gate(k) => Slot::Gate(out.gates[k].kind, out.gates[k].inputs.clone(), k),
                    leaf => Slot::Leaf(leaf),
                }),
                _ => {
                    let gate = Gate { kind: g.kind, inputs: ins.clone() };
                    let idx = *interned.entry(gate.clone()).or_insert_with(|| {
                        out.gates.push(gate);
                        out.gates.len() - 1
                    });
                    slots.push(Slot::Gate(g.kind, ins, idx));
                }
            }
        }
        out.output = match self.output {
            Wire::Gate(j) => match &slots[j] {
                Slot::Leaf(l) => *l,
                Slot::Gate(_, _, idx) => Wire::Gate(*idx),
            },
            leaf => leaf,
        };
        out.compact()
    }

    /// Drops unreachable gates and renumbers.
    fn compact(&self) -> CircuitDesc {
        let live = self.reachable();
        let mut map = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        let remap = |w: &Wire, map: &Vec<usize>| match *w {
            Wire::Gate(j) => Wire::Gate(map[j]),
            w => w,
        };
        for (i, g) in self.gates.iter().enumerate() {
            if live[i] {
                map[i] = gates.len();
                gates.push(Gate { kind: g.kind, inputs: g.inputs.iter().map(|w| remap(w, &map)).collect() });
            }
        }
        CircuitDesc { inputs: self.inputs, output: remap(&self.output, &map), gates }
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph circuit {\n  rankdir=BT;\n");
        let live = self.reachable();
        let mut used_inputs = vec![false; self.inputs];
        let mut consts = [false; 2];
        let mut name = |w: &Wire| -> String {
            match *w {
                Wire::Const(b) => {
                    consts[b as usize] = true;
                    format!("c{}", b as u8)
                }
                Wire::Lit { var, positive } => {
                    used_inputs[var] = true;
                    if positive {
                        format!("x{var}")
                    } else {
                        format!("nx{var}")
                    }
                }
                Wire::Gate(j) => format!("g{j}"),
            }
        };
        let mut edges = String::new();
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let _ = writeln!(s, "  g{i} [label=\"{}\", shape=box];", g.kind.name().to_uppercase());
            for w in &g.inputs {
                let _ = writeln!(edges, "  {} -> g{i};", name(w));
            }
        }
        let out = name(&self.output);
        for (v, used) in used_inputs.iter().enumerate() {
            if *used {
                let _ = writeln!(s, "  x{v} [label=\"x{v}\", shape=circle];");
                let _ = writeln!(s, "  nx{v} [label=\"!x{v}\", shape=circle];");
            }
        }
        for (b, used) in consts.iter().enumerate() {
            if *used {
                let _ = writeln!(s, "  c{b} [label=\"{b}\", shape=diamond];");
            }
        }
        s.push_str(&edges);
        let _ = writeln!(s, "  out [shape=doublecircle];\n  {out} -> out;\n}}");
        s
    }
}

/// `AND_n` over all inputs.
pub fn and_n(n: usize) -> Result<CircuitDesc> {
    CircuitDesc::single_gate(n, GateKind::And, (0..n).map(Wire::pos).collect())
}

/// `OR_n` over all inputs.
pub fn or_n(n: usize) -> Result<CircuitDesc> {
    CircuitDesc::single_gate(n, GateKind::Or, (0..n).map(Wire::pos).collect())
}

/// The dictator `x_1` on `n` inputs (depth zero).
pub fn dictator(n: usize) -> Result<CircuitDesc> {
    CircuitDesc::literal(n, 0, true)
}

/// `PARITY_n` as a DNF with `2^{n-1}` terms.
pub fn parity_dnf(n: usize) -> Result<CircuitDesc> {
    if n == 0 || n > 16 {
        return Err(Error::pre("parity", "need 1 <= n <= 16"));
    }
    if n == 1 {
        return CircuitDesc::literal(1, 0, true);
    }
    let terms: Vec<CircuitDesc> = (0u32..(1 << n))
        .filter(|m| m.count_ones() % 2 == 1)
        .map(|m| CircuitDesc::single_gate(n, GateKind::And, (0..n).map(|i| Wire::Lit { var: i, positive: m >> i & 1 == 1 }).collect()))
        .collect::<Result<_>>()?;
    CircuitDesc::combine(GateKind::Or, &terms)
}

/// `MP_{m,r} = AND_m o OR_r` on `m r` inputs, block `i` being
/// `x_{ir}, ..., x_{ir+r-1}`.
pub fn mp(m: usize, r: usize) -> Result<CircuitDesc> {
    if m == 0 || r == 0 {
        return Err(Error::pre("mp", "need m, r >= 1"));
    }
    let n = m * r;
    let blocks: Vec<CircuitDesc> = (0..m)
        .map(|i| CircuitDesc::single_gate(n, GateKind::Or, (i * r..(i + 1) * r).map(Wire::pos).collect()))
        .collect::<Result<_>>()?;
    Ok(CircuitDesc::combine(GateKind::And, &blocks)?.normalize())
}

/// `MP*_{m,r}` on `{0..r}^m`: one exactly when every coordinate is non-zero.
pub fn mp_star(m: usize, r: usize) -> Result<FnTable> {
    if m == 0 || r == 0 {
        return Err(Error::pre("mp_star", "need m, r >= 1"));
    }
    Ok(FnTable::boolean(Domain::uniform_box(m, r as i64), crate::dual_mp::mp_star_at))
}

/// The surjectivity function in symmetric form: `MP*_{r,n}` on `N^r|_n`
/// (points of `{0..n}^r` of weight exactly `n`). For `r > n` no point is
/// surjective and the table is identically zero.
pub fn surj(n: usize, r: usize) -> Result<FnTable> {
    if n == 0 || r == 0 {
        return Err(Error::pre("surj", "need n, r >= 1"));
    }
    let dom = Domain::uniform_box(r, n as i64).slice(n as i64, n as i64)?;
    Ok(FnTable::boolean(dom, |x| weight(x) == n as i64 && crate::dual_mp::mp_star_at(x)))
}

/// The Krause–Pudlák lift `F(x, y, z) = f(..., (not z_i and x_i) or (z_i and y_i), ...)`
/// on `3n` inputs ordered `x, y, z`.
pub fn krause_pudlak(f: &CircuitDesc) -> Result<CircuitDesc> {
    let n = f.inputs;
    let selectors: Vec<CircuitDesc> = (0..n)
        .map(|i| {
            let a = CircuitDesc::single_gate(3 * n, GateKind::And, vec![Wire::neg(2 * n + i), Wire::pos(i)])?;
            let b = CircuitDesc::single_gate(3 * n, GateKind::And, vec![Wire::pos(2 * n + i), Wire::pos(n + i)])?;
            CircuitDesc::combine(GateKind::Or, &[a, b])
        })
        .collect::<Result<_>>()?;
    if n == 0 {
        return Ok(CircuitDesc::constant(0, f.evaluate(&[])?));
    }
    f.substitute(&selectors)
}

/// Parameters chosen for one level of [`build_fkn`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FknLevel {
    /// Level `k`.
    pub k: u32,
    /// Input budget `N` requested for this level.
    pub budget: usize,
    /// Inner function size `n` (for `k >= 3`).
    pub inner_n: usize,
    /// Block count `m`.
    pub m: usize,
    /// Compression threshold `theta` (for `k >= 3`).
    pub theta: usize,
}

/// The recursive constant-depth family, one circuit per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fkn {
    /// The circuit `f_{k,N}` (monotone after the final literal split).
    pub circuit: CircuitDesc,
    /// Parameters per level, innermost first.
    pub levels: Vec<FknLevel>,
    /// For `k >= 3`: the amplification step that produced the circuit.
    pub step: Option<AmplifiedCircuit>,
}

fn floor_root(x: usize, k: u32) -> usize {
    iroot(&BigUint::from(x), k).to_usize().unwrap_or(usize::MAX)
}

/// Builds `f_{k,N}`.
///
/// * `k = 1`: the dictator `x_1`.
/// * `k = 2`: `MP_m = AND_m o OR_{m^2}` with `m = floor(N^{1/3})`, padded
///   with unused inputs to `N`.
/// * `k >= 3`: `f_{k-2,n} o H` with `H = (AND_m o OR*_theta) o G` the
///   compressed Minsky–Papert layer. The parameter formulas keep their
///   exponents (`n ~ N^{(k-1)/(k+1)}`, `m ~ N^{2/(k+1)}`) with the
///   logarithmic factors and the absolute constant replaced by fixed toy
///   scalings (`n = floor(sqrt-type root / 4)`, `m = floor(root / 2)`, both at
///   least one); `theta` is the largest value with `6 ceil(log(nm+1)) theta <= N`.
///   The inner circuit is first put in the AND-bottom form required for
///   merging, and the negated inputs of the result are finally replaced by
///   fresh variables so that the circuit is monotone.
///
/// Parameter choices whose compressed layer cannot fit in `N` inputs, or
/// with `theta < m` (where `AND_m o OR*_theta` restricted to weight
/// `<= theta` would be constant), are rejected as degenerate.
pub fn build_fkn(k: u32, n: usize) -> Result<Fkn> {
    if n == 0 || k == 0 {
        return Err(Error::pre("fkn", "need k, N >= 1"));
    }
    match k {
        1 => Ok(Fkn {
            circuit: dictator(n)?,
            levels: vec![FknLevel { k, budget: n, inner_n: 1, m: 1, theta: 0 }],
            step: None,
        }),
        2 => {
            let m = floor_root(n, 3).max(1);
            if m * m * m > n {
                return Err(Error::pre("fkn", format!("N = {n} too small for MP_{m}")));
            }
            let base = mp(m, m * m)?;
            let padded = CircuitDesc { inputs: n, ..base };
            Ok(Fkn { circuit: padded, levels: vec![FknLevel { k, budget: n, inner_n: m * m * m, m, theta: 0 }], step: None })
        }
        _ => {
            let root_n = floor_root(n.pow(k - 1), k + 1);
            let root_m = floor_root(n.pow(2), k + 1);
            let inner_n = (root_n / 4).max(1);
            let m = (root_m / 2).max(1);
            let l = crate::bounds::ceil_log2((inner_n * m) as u64 + 1) as usize;
            let theta = n / (6 * l);
            if theta < m {
                return Err(Error::pre(
                    "fkn",
                    format!("degenerate parameters at k = {k}, N = {n}: n = {inner_n}, m = {m}, theta = {theta} < m"),
                ));
            }
            let inner = build_fkn(k - 2, inner_n)?;
            let mut f = inner.circuit.clone();
            if f.stats().top.is_some() && bottom_kind(&f) == Some(GateKind::Or) {
                f = f.dual();
            }
            let step = amplify_circuit_once(&f, m, theta)?;
            let circuit = split_negations(&step.composed);
            let mut levels = inner.levels;
            levels.push(FknLevel { k, budget: n, inner_n, m, theta });
            Ok(Fkn { circuit, levels, step: Some(step) })
        }
    }
}

/// Kind shared by all bottom gates, if they agree.
pub fn bottom_kind(c: &CircuitDesc) -> Option<GateKind> {
    let live = c.reachable();
    let mut kind = None;
    for (i, g) in c.gates.iter().enumerate() {
        if live[i] && g.inputs.iter().all(Wire::is_leaf) {
            match kind {
                None => kind = Some(g.kind),
                Some(k) if k != g.kind => return None,
                _ => {}
            }
        }
    }
    kind
}

/// Replaces every negative literal `not x_i` by a fresh input `x_{n+i}`,
/// giving a monotone circuit on `2n` inputs whose restriction to
/// `y = not x` is the original.
pub fn split_negations(c: &CircuitDesc) -> CircuitDesc {
    let n = c.inputs;
    let map = |w: &Wire| match *w {
        Wire::Lit { var, positive: false } => Wire::pos(n + var),
        w => w,
    };
    let uses_neg = c.gates.iter().flat_map(|g| &g.inputs).chain(core::iter::once(&c.output)).any(|w| matches!(w, Wire::Lit { positive: false, .. }));
    if !uses_neg {
        return c.clone();
    }
    CircuitDesc {
        inputs: 2 * n,
        gates: c.gates.iter().map(|g| Gate { kind: g.kind, inputs: g.inputs.iter().map(map).collect() }).collect(),
        output: map(&c.output),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use num_traits::Zero;

    #[test]
    fn basic_gates_and_stats() {
        let a = and_n(2).unwrap();
        assert!(a.evaluate(&[true, true]).unwrap());
        assert!(!a.evaluate(&[true, false]).unwrap());
        assert!(a.evaluate(&[true]).is_err());
        let d = dictator(3).unwrap();
        let s = d.stats();
        assert_eq!((s.size, s.depth), (0, 0));
        let m = mp(2, 2).unwrap();
        assert!(m.evaluate(&[true, false, false, true]).unwrap());
        assert!(!m.evaluate(&[true, true, false, false]).unwrap());
        let s = m.stats();
        assert_eq!((s.size, s.depth, s.bottom_fan_in, s.monotone), (3, 2, 2, true));
        let id = mp(1, 1).unwrap();
        assert_eq!(id.truth_table().unwrap(), FnTable::boolean(Domain::Hypercube(1), |x| x[0] == 1));
    }

    #[test]
    fn negation_dual_and_normalization() {
        let m = mp(2, 3).unwrap();
        let t = m.truth_table().unwrap();
        let neg = m.negate().truth_table().unwrap();
        let dual = m.dual();
        for p in Domain::Hypercube(6).points() {
            assert_eq!(t.get(&p).is_zero(), !neg.get(&p).is_zero());
            let np: Vec<bool> = p.iter().map(|&c| c == 0).collect();
            assert_eq!(dual.evaluate(&np).unwrap(), t.get(&p).is_zero());
        }
        // AND(AND(x0, x1), x2) merges into one gate.
        let inner = CircuitDesc::single_gate(3, GateKind::And, vec![Wire::pos(0), Wire::pos(1)]).unwrap();
        let outer = CircuitDesc::combine(GateKind::And, &[inner, CircuitDesc::literal(3, 2, true).unwrap()]).unwrap();
        let norm = outer.normalize();
        assert_eq!(norm.stats().size, 1);
        assert_eq!(norm.truth_table().unwrap(), outer.truth_table().unwrap());
        let c = CircuitDesc::combine(GateKind::Or, &[CircuitDesc::constant(2, true), and_n(2).unwrap()]).unwrap();
        assert_eq!(c.normalize().output, Wire::Const(true));
    }

    #[test]
    fn symmetric_tables() {
        let t = mp_star(2, 4).unwrap();
        assert_eq!(t.domain().size(), 25);
        for p in t.domain().points() {
            assert_eq!(t.get(&p).is_zero(), p.contains(&0));
        }
        let s = surj(2, 1).unwrap();
        assert_eq!(s.domain().points(), vec![vec![2]]);
        assert_eq!(s.get(&[2]), q(1));
        let s = surj(3, 2).unwrap();
        let zeros: Vec<_> = s.domain().points().into_iter().filter(|p| s.get(p).is_zero()).collect();
        assert_eq!(zeros, vec![vec![0, 3], vec![3, 0]]);
        assert!(surj(2, 3).unwrap().is_zero());
    }

    #[test]
    fn krause_pudlak_selector() {
        let f = dictator(1).unwrap();
        let kp = krause_pudlak(&f).unwrap();
        assert_eq!(kp.inputs, 3);
        for p in Domain::Hypercube(3).points() {
            let want = if p[2] == 0 { p[0] } else { p[1] };
            assert_eq!(kp.evaluate_point(&p).unwrap(), want == 1);
        }
        let par = parity_dnf(2).unwrap();
        let kp = krause_pudlak(&par).unwrap();
        assert_eq!(kp.inputs, 6);
        assert_eq!(kp.stats().depth, 4);
    }

    #[test]
    fn dot_export_mentions_every_gate() {
        let dot = mp(2, 2).unwrap().to_dot();
        assert_eq!(dot.matches("shape=box").count(), 3);
        assert!(dot.contains("-> out"));
    }

    #[test]
    fn fkn_base_cases() {
        let f1 = build_fkn(1, 5).unwrap();
        assert_eq!(f1.circuit.stats().depth, 0);
        let f2 = build_fkn(2, 27).unwrap();
        let s = f2.circuit.stats();
        assert_eq!((s.size, s.depth, s.max_fan_in), (4, 2, 9));
        let f3 = build_fkn(3, 6).unwrap();
        assert_eq!(f3.levels.len(), 2);
        assert!(f3.circuit.inputs <= 12);
        assert!(build_fkn(3, 2).is_err());
    }
}
