//! Markov-type equations `a x^2 + b y^2 + c z^2 = k xyz`.
//!
//! A complete 3-block collection of type `(alpha, beta, gamma)` on a surface
//! with `K^2 = d` has block ranks `(x, y, z)` solving
//! `alpha x^2 + beta y^2 + gamma z^2 = sqrt(d alpha beta gamma) xyz`, and
//! `alpha + beta + gamma + d = 12`. There are fourteen such equations.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::picard::SurfaceId;

pub type Triple = [i64; 3];

/// Label of one of the fourteen equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquationId {
    X1,
    X2,
    X3,
    X4,
    X5,
    X6_1,
    X6_2,
    X7_1,
    X7_2,
    X7_3,
    X8_1,
    X8_2,
    X8_3,
    X8_4,
}

impl EquationId {
    pub const ALL: [EquationId; 14] = [
        EquationId::X1,
        EquationId::X2,
        EquationId::X3,
        EquationId::X4,
        EquationId::X5,
        EquationId::X6_1,
        EquationId::X6_2,
        EquationId::X7_1,
        EquationId::X7_2,
        EquationId::X7_3,
        EquationId::X8_1,
        EquationId::X8_2,
        EquationId::X8_3,
        EquationId::X8_4,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EquationId::X1 => "1",
            EquationId::X2 => "2",
            EquationId::X3 => "3",
            EquationId::X4 => "4",
            EquationId::X5 => "5",
            EquationId::X6_1 => "6.1",
            EquationId::X6_2 => "6.2",
            EquationId::X7_1 => "7.1",
            EquationId::X7_2 => "7.2",
            EquationId::X7_3 => "7.3",
            EquationId::X8_1 => "8.1",
            EquationId::X8_2 => "8.2",
            EquationId::X8_3 => "8.3",
            EquationId::X8_4 => "8.4",
        }
    }

    /// `(alpha, beta, gamma, K^2)`.
    fn params(self) -> (i64, i64, i64, i64) {
        match self {
            EquationId::X1 => (1, 1, 1, 9),
            EquationId::X2 => (1, 1, 2, 8),
            EquationId::X3 => (1, 2, 3, 6),
            EquationId::X4 => (1, 1, 5, 5),
            EquationId::X5 => (2, 2, 4, 4),
            EquationId::X6_1 => (3, 3, 3, 3),
            EquationId::X6_2 => (1, 2, 6, 3),
            EquationId::X7_1 => (1, 1, 8, 2),
            EquationId::X7_2 => (2, 4, 4, 2),
            EquationId::X7_3 => (1, 3, 6, 2),
            EquationId::X8_1 => (1, 1, 9, 1),
            EquationId::X8_2 => (1, 2, 8, 1),
            EquationId::X8_3 => (2, 3, 6, 1),
            EquationId::X8_4 => (1, 5, 5, 1),
        }
    }

    pub fn equation(self) -> MarkovEquation {
        let (alpha, beta, gamma, k_squared) = self.params();
        MarkovEquation {
            id: self,
            alpha,
            beta,
            gamma,
            k_squared,
            coeff: crate::picard::isqrt(alpha * beta * gamma * k_squared),
        }
    }
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EquationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix(['x', 'X']).unwrap_or(t);
        EquationId::ALL
            .into_iter()
            .find(|id| id.label() == t)
            .ok_or_else(|| Error::UnknownEquation(s.to_string()))
    }
}

impl Serialize for EquationId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MarkovEquation {
    pub id: EquationId,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub k_squared: i64,
    pub coeff: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        })
    }
}

impl MarkovEquation {
    pub fn lengths(&self) -> Triple {
        [self.alpha, self.beta, self.gamma]
    }

    /// The surface carrying collections of this type. For `K^2 = 8` this is
    /// the quadric: the blow-up of one point has no roots, so it admits no
    /// block of length two.
    pub fn surface(&self) -> SurfaceId {
        match self.k_squared {
            8 => SurfaceId::Quadric,
            d => SurfaceId::PlaneBlowup((9 - d) as u8),
        }
    }

    pub fn is_solution(&self, t: &Triple) -> bool {
        if t.iter().any(|&v| v <= 0) {
            return false;
        }
        let [x, y, z] = t.map(i128::from);
        let lhs = self.alpha as i128 * x * x + self.beta as i128 * y * y + self.gamma as i128 * z * z;
        lhs == self.coeff as i128 * x * y * z
    }

    pub fn check_solution(&self, t: &Triple) -> Result<()> {
        if self.is_solution(t) {
            return Ok(());
        }
        Err(Error::NotASolution {
            equation: self.id.to_string(),
            x: t[0],
            y: t[1],
            z: t[2],
        })
    }

    /// Replace one coordinate by the other root of the quadratic.
    pub fn mutate(&self, t: &Triple, var: Var) -> Result<Triple> {
        self.check_solution(t)?;
        let i = var.index();
        let others: i128 = (0..3).filter(|&j| j != i).map(|j| t[j] as i128).product();
        let num = self.coeff as i128 * others;
        let len = self.lengths()[i] as i128;
        if num % len != 0 {
            return Err(Error::Invariant(format!(
                "mutation of {t:?} in {var} is not integral"
            )));
        }
        let v = num / len - t[i] as i128;
        if v <= 0 {
            return Err(Error::LeavesOctant);
        }
        let v = i64::try_from(v).map_err(|_| Error::Invariant("solution overflow".into()))?;
        let mut out = *t;
        out[i] = v;
        Ok(out)
    }

    /// Solutions with the least coordinate sum, in lexicographic order.
    pub fn minimum_solutions(&self) -> Vec<Triple> {
        for s in 3i64.. {
            let found: Vec<Triple> = (1..s - 1)
                .flat_map(|x| (1..s - x).map(move |y| [x, y, s - x - y]))
                .filter(|t| self.is_solution(t))
                .collect();
            if !found.is_empty() {
                return found;
            }
        }
        unreachable!()
    }

    /// Walk down to a minimum solution, one sum-decreasing mutation at a
    /// time. Each step records the mutated variable and the new triple.
    pub fn reduce_to_minimum(&self, t: &Triple) -> Result<Vec<(Var, Triple)>> {
        self.check_solution(t)?;
        let minima = self.minimum_solutions();
        let mut cur = *t;
        let mut path = Vec::new();
        loop {
            let sum: i64 = cur.iter().sum();
            let down: Vec<(Var, Triple)> = Var::ALL
                .into_iter()
                .map(|v| Ok((v, self.mutate(&cur, v)?)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|(_, n)| n.iter().sum::<i64>() < sum)
                .collect();
            match down.as_slice() {
                [] => {
                    if !minima.contains(&cur) {
                        return Err(Error::Invariant(format!(
                            "descent stalled at {cur:?}, which is not minimal"
                        )));
                    }
                    return Ok(path);
                }
                [(v, n)] => {
                    path.push((*v, *n));
                    cur = *n;
                }
                _ => {
                    return Err(Error::Invariant(format!(
                        "{cur:?} has several sum-decreasing mutations"
                    )))
                }
            }
        }
    }

    /// All solutions with `x + y + z <= sum_bound`, ordered by sum and then
    /// lexicographically.
    pub fn enumerate_solutions(&self, sum_bound: i64) -> Vec<Triple> {
        let (a, b, g, k) = (
            self.alpha as i128,
            self.beta as i128,
            self.gamma as i128,
            self.coeff as i128,
        );
        let mut out = Vec::new();
        for x in 1..sum_bound {
            for y in 1..sum_bound - x {
                // gamma z^2 - k x y z + (a x^2 + b y^2) = 0
                let (xi, yi) = (x as i128, y as i128);
                let p = k * xi * yi;
                let disc = p * p - 4 * g * (a * xi * xi + b * yi * yi);
                let Some(root) = exact_sqrt(disc) else {
                    continue;
                };
                let mut zs: Vec<i128> = [p - root, p + root]
                    .into_iter()
                    .filter(|n| n % (2 * g) == 0)
                    .map(|n| n / (2 * g))
                    .collect();
                zs.dedup();
                for z in zs {
                    if z >= 1 && x as i128 + yi + z <= sum_bound as i128 {
                        out.push([x, y, z as i64]);
                    }
                }
            }
        }
        sort_by_sum(&mut out);
        out
    }

    /// The `count` solutions of least sum, found by growing the solution
    /// tree from the minima.
    pub fn smallest_solutions(&self, count: usize) -> Result<Vec<Triple>> {
        let mut heap = BinaryHeap::new();
        let mut seen = HashSet::new();
        for m in self.minimum_solutions() {
            seen.insert(m);
            heap.push(Reverse((m.iter().sum::<i64>(), m)));
        }
        let mut out = Vec::with_capacity(count);
        while let Some(Reverse((_, t))) = heap.pop() {
            if out.len() == count {
                break;
            }
            out.push(t);
            for v in Var::ALL {
                let n = self.mutate(&t, v)?;
                if seen.insert(n) {
                    heap.push(Reverse((n.iter().sum::<i64>(), n)));
                }
            }
        }
        Ok(out)
    }

    pub fn solution_graph(&self, sum_bound: i64) -> Result<SolutionGraph> {
        let nodes = self.enumerate_solutions(sum_bound);
        let index: HashMap<Triple, usize> = nodes.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let minima: BTreeSet<Triple> = self.minimum_solutions().into_iter().collect();
        let mut edges = Vec::new();
        let mut loops = Vec::new();
        for (i, t) in nodes.iter().enumerate() {
            for v in Var::ALL {
                let n = self.mutate(t, v)?;
                if n == *t {
                    loops.push((i, v));
                } else if let Some(&j) = index.get(&n) {
                    if i < j {
                        edges.push((i, j, v));
                    }
                }
            }
        }
        Ok(SolutionGraph {
            equation: self.id,
            sum_bound,
            minimum: nodes.iter().map(|t| minima.contains(t)).collect(),
            nodes,
            edges,
            loops,
        })
    }
}

fn sort_by_sum(v: &mut [Triple]) {
    v.sort_by_key(|t| (t.iter().sum::<i64>(), *t));
}

fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Every equation, found by exhausting `alpha <= beta <= gamma`,
/// `alpha + beta + gamma + d = 12`, `1 <= d <= 9`, `d alpha beta gamma` a
/// square. `d = 7` has no solution of the system, and `d = 8` is realized
/// on the quadric.
pub fn enumerate_equations() -> Result<Vec<MarkovEquation>> {
    let labels: HashMap<(i64, i64, i64, i64), EquationId> =
        EquationId::ALL.iter().map(|&id| (id.params(), id)).collect();
    let mut out = Vec::new();
    for d in 1..=9i64 {
        let n = 12 - d;
        for alpha in 1..=n {
            for beta in alpha..=n {
                let gamma = n - alpha - beta;
                if gamma < beta {
                    continue;
                }
                let prod = d * alpha * beta * gamma;
                if exact_sqrt(prod as i128).is_none() {
                    continue;
                }
                let id = labels.get(&(alpha, beta, gamma, d)).ok_or_else(|| {
                    Error::Invariant(format!("unlabelled equation ({alpha},{beta},{gamma}), K^2 = {d}"))
                })?;
                out.push(id.equation());
            }
        }
    }
    out.sort_by_key(|e| e.id);
    if out.len() != EquationId::ALL.len() {
        return Err(Error::Invariant(format!("found {} equations", out.len())));
    }
    Ok(out)
}

/// Solutions with sum at most a bound, linked by solution mutations.
#[derive(Clone, Debug)]
pub struct SolutionGraph {
    pub equation: EquationId,
    pub sum_bound: i64,
    pub nodes: Vec<Triple>,
    pub minimum: Vec<bool>,
    /// `(i, j, var)` with `i < j`.
    pub edges: Vec<(usize, usize, Var)>,
    /// Mutations fixing a node.
    pub loops: Vec<(usize, Var)>,
}

impl SolutionGraph {
    /// Connected components as sorted node lists, ordered by first node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for &(i, j, _) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..self.nodes.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Whether the graph without loops is a forest.
    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.components().len() == self.nodes.len()
    }

    pub fn to_dot(&self) -> String {
        let name = |i: usize| {
            let [x, y, z] = self.nodes[i];
            format!("\"{x},{y},{z}\"")
        };
        let mut s = format!("graph \"x{}\" {{\n", self.equation);
        for i in 0..self.nodes.len() {
            if self.minimum[i] {
                s += &format!("  {} [shape=doublecircle];\n", name(i));
            } else {
                s += &format!("  {};\n", name(i));
            }
        }
        for &(i, j, v) in &self.edges {
            s += &format!("  {} -- {} [label=\"{v}\"];\n", name(i), name(j));
        }
        for &(i, v) in &self.loops {
            s += &format!("  {} -- {} [label=\"{v}\"];\n", name(i), name(i));
        }
        s += "}\n";
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<_> = self
            .nodes
            .iter()
            .zip(&self.minimum)
            .map(|(t, m)| serde_json::json!({"x": t[0], "y": t[1], "z": t[2], "minimum": m}))
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(i, j, v)| (i, j, v))
            .chain(self.loops.iter().map(|&(i, v)| (i, i, v)))
            .map(|(i, j, v)| serde_json::json!({"from": i, "to": j, "var": v}))
            .collect();
        serde_json::json!({
            "equation": self.equation,
            "sum_bound": self.sum_bound,
            "nodes": nodes,
            "edges": edges,
        })
    }
}

/// The four families of equations, up to rescaling variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Group {
    I,
    II,
    III,
    IV,
}

impl Group {
    pub fn representative(self) -> EquationId {
        match self {
            Group::I => EquationId::X1,
            Group::II => EquationId::X2,
            Group::III => EquationId::X3,
            Group::IV => EquationId::X4,
        }
    }
}

/// A rescaling `s_i = scale_i * u_i` followed by a relabelling which maps
/// solutions of an equation to solutions of its group representative:
/// `rep[k] = s[perm[k]] / scale[perm[k]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroupWitness {
    pub group: Group,
    pub scale: Triple,
    pub perm: [usize; 3],
}

impl GroupWitness {
    pub fn to_representative(&self, s: &Triple) -> Option<Triple> {
        let mut out = [0; 3];
        for k in 0..3 {
            let i = self.perm[k];
            if s[i] % self.scale[i] != 0 {
                return None;
            }
            out[k] = s[i] / self.scale[i];
        }
        Some(out)
    }

    pub fn from_representative(&self, t: &Triple) -> Triple {
        let mut out = [0; 3];
        for k in 0..3 {
            let i = self.perm[k];
            out[i] = t[k] * self.scale[i];
        }
        out
    }
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Number of solutions transported in each direction when confirming a
/// witness.
const WITNESS_SAMPLE: usize = 100;

/// Find the group of an equation together with a witness transformation,
/// confirmed by transporting the smallest solutions in both directions.
pub fn equation_group(id: EquationId) -> Result<GroupWitness> {
    let eq = id.equation();
    let own = eq.smallest_solutions(WITNESS_SAMPLE)?;
    let mut scales: Vec<Triple> = (1..=6)
        .flat_map(|p| (1..=6).flat_map(move |q| (1..=6).map(move |r| [p, q, r])))
        .collect();
    scales.sort_by_key(|s| (s.iter().product::<i64>(), *s));
    for group in [Group::I, Group::II, Group::III, Group::IV] {
        let rep = group.representative().equation();
        let rep_coeffs = rep.lengths();
        let theirs = rep.smallest_solutions(WITNESS_SAMPLE)?;
        for scale in &scales {
            for perm in PERMS {
                // Coefficients of u_k^2 and of u0 u1 u2 after substitution.
                let ours: Vec<i128> = (0..3)
                    .map(|k| {
                        let i = perm[k];
                        (eq.lengths()[i] * scale[i] * scale[i]) as i128
                    })
                    .chain([(eq.coeff * scale.iter().product::<i64>()) as i128])
                    .collect();
                let target: Vec<i128> = rep_coeffs
                    .iter()
                    .chain([&rep.coeff])
                    .map(|&c| c as i128)
                    .collect();
                let proportional = (0..4).all(|k| ours[k] * target[0] == target[k] * ours[0]);
                if !proportional {
                    continue;
                }
                let w = GroupWitness { group, scale: *scale, perm };
                let forward = own
                    .iter()
                    .all(|s| w.to_representative(s).is_some_and(|t| rep.is_solution(&t)));
                let backward = theirs
                    .iter()
                    .all(|t| eq.is_solution(&w.from_representative(t)));
                if forward && backward {
                    return Ok(w);
                }
            }
        }
    }
    Err(Error::Invariant(format!("equation {id} fits no group")))
}
