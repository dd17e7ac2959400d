//! Norm-induced metrics described by their unit balls.
//!
//! A norm is either an `ℓᵖ` norm or the Minkowski functional of an
//! origin-symmetric convex polytope given by its vertices. Polytopes carry
//! their facet description `{x : aᶠ·x ≤ 1}` so the gauge is evaluated exactly
//! as `max_f aᶠ·x`, and a fan triangulation from the origin for exact
//! integration.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg;
use crate::polycore::{MultiIndex, Polynomial};

/// Exponent of an `ℓᵖ` norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpExponent {
    Finite(BigRational),
    Infinity,
}

impl LpExponent {
    pub fn finite(p: i64) -> Self {
        LpExponent::Finite(BigRational::from_integer(p.into()))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            LpExponent::Finite(p) => p.to_f64().unwrap_or(f64::NAN),
            LpExponent::Infinity => f64::INFINITY,
        }
    }

    /// Parses `inf`, an integer, a decimal or `num/den`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(LpExponent::Infinity);
        }
        let c = parse_rational(t)?;
        Ok(LpExponent::Finite(c))
    }

    fn is_integer(&self, k: i64) -> bool {
        matches!(self, LpExponent::Finite(p) if *p == BigRational::from_integer(k.into()))
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => write!(f, "{p}"),
            LpExponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Parses an integer, decimal (`2.5`) or fraction (`5/2`).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Ok(q) = t.parse::<BigRational>() {
        return Ok(q);
    }
    let poly = Polynomial::parse(t, 0).map_err(|_| Error::Parse(format!("not a rational number: {t:?}")))?;
    Ok(poly.coefficient(&MultiIndex::zero(0)))
}

/// Non-degenerate simplex with exact rational vertices.
#[derive(Clone, Debug)]
pub struct Simplex {
    vertices: Vec<Vec<BigRational>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<BigRational>>) -> Result<Self> {
        let s = Simplex { vertices };
        let n = s.dim();
        if s.vertices.len() != n + 1 || s.vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidArgument("a simplex in ℝⁿ needs n + 1 points".into()));
        }
        if s.edge_determinant().is_zero() {
            return Err(Error::InvalidArgument("degenerate simplex".into()));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertices
    }

    /// Edge matrix `E` with columns `vₖ − v₀`, stored row-major.
    fn edge_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.dim();
        let v0 = &self.vertices[0];
        (0..n)
            .map(|i| (1..=n).map(|k| &self.vertices[k][i] - &v0[i]).collect())
            .collect()
    }

    fn edge_determinant(&self) -> BigRational {
        linalg::determinant(&self.edge_matrix())
    }

    pub fn volume(&self) -> BigRational {
        let n = self.dim() as u32;
        self.edge_determinant().abs() / BigRational::from_integer(crate::polycore::factorial(n))
    }

    /// `∫_S f dx`, exactly: pull back to the standard simplex by
    /// `x = v₀ + E t`, expand, and use `∫_Δ t^β dt = β! / (|β| + n)!`.
    pub fn integrate(&self, f: &Polynomial) -> Result<BigRational> {
        let n = self.dim();
        if f.nvars() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.nvars() });
        }
        let pulled = f.compose_affine(&self.vertices[0], &self.edge_matrix())?;
        let mut acc = BigRational::zero();
        for (beta, c) in pulled.terms() {
            let denom = crate::polycore::factorial(beta.order() + n as u32);
            acc += c * BigRational::new(beta.factorial(), denom);
        }
        Ok(acc * self.edge_determinant().abs())
    }
}

/// Origin-symmetric, full-dimensional convex polytope.
#[derive(Clone, Debug)]
pub struct Polytope {
    n: usize,
    vertices: Vec<Vec<BigRational>>,
    facets: Vec<Vec<BigRational>>,
    facet_vertices: Vec<Vec<usize>>,
    facets_f64: Vec<Vec<f64>>,
    simplices: Vec<Simplex>,
    axis_symmetric: bool,
    extent: BigRational,
}

/// Polytope JSON file format: rationals written as strings.
#[derive(Serialize, Deserialize)]
pub struct PolytopeFile {
    pub n: usize,
    pub vertices: Vec<Vec<String>>,
}

pub const MAX_POLYTOPE_DIM: usize = 4;

impl Polytope {
    pub fn new(vertices: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = vertices.first().map_or(0, Vec::len);
        if n == 0 || n > MAX_POLYTOPE_DIM {
            return Err(Error::InvalidNorm(format!("polytope dimension must be 1..={MAX_POLYTOPE_DIM}")));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidNorm("vertices have inconsistent dimensions".into()));
        }
        let mut uniq: Vec<Vec<BigRational>> = Vec::new();
        for v in vertices {
            if !uniq.contains(&v) {
                uniq.push(v);
            }
        }
        let vertices = uniq;
        for v in &vertices {
            let neg: Vec<BigRational> = v.iter().map(|x| -x).collect();
            if !vertices.contains(&neg) {
                return Err(Error::InvalidNorm(format!("vertex set is not origin-symmetric (missing −{})", fmt_point(v))));
            }
        }
        if linalg::rank(&vertices) < n {
            return Err(Error::InvalidNorm("polytope is not full-dimensional".into()));
        }
        let (facets, facet_vertices) = enumerate_facets(&vertices, n);
        if facets.is_empty() {
            return Err(Error::InvalidNorm("could not determine facets".into()));
        }
        let facets_f64 = facets
            .iter()
            .map(|a| a.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        let axis_symmetric = (0..n).all(|i| {
            vertices.iter().all(|v| {
                let mut m = v.clone();
                m[i] = -m[i].clone();
                vertices.contains(&m)
            })
        });
        let extent = vertices
            .iter()
            .flat_map(|v| v.iter().map(Signed::abs))
            .max()
            .unwrap_or_else(BigRational::zero);
        let mut poly = Polytope {
            n,
            vertices,
            facets,
            facet_vertices,
            facets_f64,
            simplices: Vec::new(),
            axis_symmetric,
            extent,
        };
        poly.simplices = poly.fan_triangulation()?;
        Ok(poly)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolytopeFile = serde_json::from_str(text)?;
        let vertices = file
            .vertices
            .iter()
            .map(|v| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if vertices.iter().any(|v| v.len() != file.n) {
            return Err(Error::InvalidNorm(format!("vertices must have {} coordinates", file.n)));
        }
        Polytope::new(vertices)
    }

    pub fn to_file(&self) -> PolytopeFile {
        PolytopeFile {
            n: self.n,
            vertices: self.vertices.iter().map(|v| v.iter().map(ToString::to_string).collect()).collect(),
        }
    }

    /// `ℓ¹` unit ball `conv{±eᵢ}`.
    pub fn cross_polytope(n: usize) -> Result<Self> {
        let mut vs = Vec::new();
        for i in 0..n {
            for s in [1, -1] {
                let mut v = vec![BigRational::zero(); n];
                v[i] = BigRational::from_integer(s.into());
                vs.push(v);
            }
        }
        Polytope::new(vs)
    }

    /// `ℓ^∞` unit ball `[−1, 1]ⁿ`.
    pub fn cube(n: usize) -> Result<Self> {
        let vs = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| BigRational::from_integer(if mask >> i & 1 == 1 { 1 } else { -1 }.into()))
                    .collect()
            })
            .collect();
        Polytope::new(vs)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertices
    }

    /// Facet normals `a` with the polytope equal to `{x : a·x ≤ 1 ∀a}`.
    pub fn facet_normals(&self) -> &[Vec<BigRational>] {
        &self.facets
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Invariant under each coordinate reflection `xᵢ ↦ −xᵢ`.
    pub fn is_axis_symmetric(&self) -> bool {
        self.axis_symmetric
    }

    /// `max |coordinate|` over the vertices: the body lies in `[−R, R]ⁿ`.
    pub fn extent(&self) -> &BigRational {
        &self.extent
    }

    pub fn volume(&self) -> BigRational {
        self.simplices.iter().map(Simplex::volume).fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn integrate(&self, f: &Polynomial) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for s in &self.simplices {
            acc += s.integrate(f)?;
        }
        Ok(acc)
    }

    pub fn gauge_exact(&self, x: &[BigRational]) -> BigRational {
        self.facets
            .iter()
            .map(|a| a.iter().zip(x).fold(BigRational::zero(), |acc, (ai, xi)| acc + ai * xi))
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.facets_f64
            .iter()
            .map(|a| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Pulling triangulation of each facet, coned from the origin.
    fn fan_triangulation(&self) -> Result<Vec<Simplex>> {
        let origin = vec![BigRational::zero(); self.n];
        let mut out = Vec::new();
        for face in &self.facet_vertices {
            for cell in self.pull(face, self.n - 1) {
                let mut pts = vec![origin.clone()];
                pts.extend(cell.iter().map(|&i| self.vertices[i].clone()));
                out.push(Simplex::new(pts)?);
            }
        }
        Ok(out)
    }

    /// Triangulates the face with vertex indices `face` (affine dimension
    /// `k`) by coning its lowest-index vertex over the sub-faces that avoid it.
    fn pull(&self, face: &[usize], k: usize) -> Vec<Vec<usize>> {
        if face.len() == k + 1 {
            return vec![face.to_vec()];
        }
        let apex = face[0];
        let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for facet in &self.facet_vertices {
            let meet: Vec<usize> = face.iter().copied().filter(|i| facet.contains(i)).collect();
            if meet.len() >= k && !meet.contains(&apex) && self.affine_dim(&meet) == k - 1 {
                subfaces.insert(meet);
            }
        }
        // keep maximal sets only
        let subfaces: Vec<Vec<usize>> = subfaces
            .iter()
            .filter(|s| !subfaces.iter().any(|t| t != *s && s.iter().all(|i| t.contains(i))))
            .cloned()
            .collect();
        let mut out = Vec::new();
        for sub in &subfaces {
            for mut cell in self.pull(sub, k - 1) {
                cell.insert(0, apex);
                out.push(cell);
            }
        }
        out
    }

    fn affine_dim(&self, idx: &[usize]) -> usize {
        if idx.is_empty() {
            return 0;
        }
        let base = &self.vertices[idx[0]];
        let diffs: Vec<Vec<BigRational>> = idx[1..]
            .iter()
            .map(|&i| self.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        if diffs.is_empty() {
            0
        } else {
            linalg::rank(&diffs)
        }
    }
}

/// Brute-force facet enumeration: every `n`-subset spanning a hyperplane
/// `a·x = 1` that supports all vertices.
fn enumerate_facets(vertices: &[Vec<BigRational>], n: usize) -> (Vec<Vec<BigRational>>, Vec<Vec<usize>>) {
    let mut normals: Vec<Vec<BigRational>> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let ones = vec![BigRational::one(); n];
    for subset in combinations(vertices.len(), n) {
        let m: Vec<Vec<BigRational>> = subset.iter().map(|&i| vertices[i].clone()).collect();
        let Some(a) = linalg::solve(&m, &ones) else { continue };
        if normals.contains(&a) {
            continue;
        }
        let dots: Vec<BigRational> = vertices
            .iter()
            .map(|v| v.iter().zip(&a).fold(BigRational::zero(), |acc, (x, y)| acc + x * y))
            .collect();
        if dots.iter().all(|d| *d <= BigRational::one()) {
            members.push((0..vertices.len()).filter(|&i| dots[i].is_one()).collect());
            normals.push(a);
        }
    }
    (normals, members)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

fn fmt_point(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug)]
pub enum NormKind {
    Lp(LpExponent),
    Polytope(Box<Polytope>),
}

/// A norm on `ℝⁿ` via its unit ball.
#[derive(Clone, Debug)]
pub struct NormSpec {
    n: usize,
    kind: NormKind,
}

/// Largest dimension accepted for `ℓᵖ` norms.
pub const MAX_LP_DIM: usize = 8;

impl NormSpec {
    pub fn lp(p: LpExponent, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_LP_DIM {
            return Err(Error::InvalidNorm(format!("ℓᵖ dimension must be 1..={MAX_LP_DIM}")));
        }
        if let LpExponent::Finite(q) = &p {
            if *q < BigRational::one() {
                return Err(Error::InvalidNorm(format!("p = {q} is below 1")));
            }
        }
        Ok(NormSpec { n, kind: NormKind::Lp(p) })
    }

    pub fn polytope(poly: Polytope) -> Self {
        NormSpec { n: poly.dim(), kind: NormKind::Polytope(Box::new(poly)) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn lp_exponent(&self) -> Option<&LpExponent> {
        match &self.kind {
            NormKind::Lp(p) => Some(p),
            NormKind::Polytope(_) => None,
        }
    }

    /// The unit ball as a polytope, when it is one (`ℓ¹`, `ℓ^∞`, polytope norms).
    pub fn as_polytope(&self) -> Option<Polytope> {
        match &self.kind {
            NormKind::Polytope(p) => Some((**p).clone()),
            NormKind::Lp(p) if p.is_integer(1) && self.n <= MAX_POLYTOPE_DIM => Polytope::cross_polytope(self.n).ok(),
            NormKind::Lp(LpExponent::Infinity) if self.n <= MAX_POLYTOPE_DIM => Polytope::cube(self.n).ok(),
            NormKind::Lp(_) => None,
        }
    }

    /// Every coordinate reflection maps the unit ball to itself.
    pub fn is_axis_symmetric(&self) -> bool {
        match &self.kind {
            NormKind::Lp(_) => true,
            NormKind::Polytope(p) => p.is_axis_symmetric(),
        }
    }

    /// `R` such that the unit ball lies in `[−R, R]ⁿ`.
    pub fn extent(&self) -> BigRational {
        match &self.kind {
            NormKind::Lp(_) => BigRational::one(),
            NormKind::Polytope(p) => p.extent().clone(),
        }
    }

    /// Minkowski functional in floating point.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        match &self.kind {
            NormKind::Polytope(p) => p.gauge(x),
            NormKind::Lp(LpExponent::Infinity) => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormKind::Lp(p) => {
                let p = p.as_f64();
                let scale = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
                if scale == 0.0 {
                    return 0.0;
                }
                if p == 1.0 {
                    return x.iter().map(|v| v.abs()).sum();
                }
                scale * x.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }

    /// Exact gauge for rational points when the norm admits it
    /// (`ℓ¹`, `ℓ^∞`, polytopes); `None` otherwise.
    pub fn gauge_exact(&self, x: &[BigRational]) -> Option<BigRational> {
        match &self.kind {
            NormKind::Polytope(p) => Some(p.gauge_exact(x)),
            NormKind::Lp(LpExponent::Infinity) => x.iter().map(Signed::abs).max(),
            NormKind::Lp(p) if p.is_integer(1) => Some(x.iter().map(Signed::abs).fold(BigRational::zero(), |a, b| a + b)),
            NormKind::Lp(_) => None,
        }
    }

    /// `point ∈ B(center, r)` (open ball).
    pub fn contains(&self, center: &[f64], r: f64, point: &[f64]) -> bool {
        let d: Vec<f64> = point.iter().zip(center).map(|(a, b)| a - b).collect();
        self.gauge(&d) < r
    }

    /// Fan triangulation of a polytope unit ball.
    pub fn triangulate(&self) -> Result<Vec<Simplex>> {
        self.as_polytope()
            .map(|p| p.simplices().to_vec())
            .ok_or_else(|| Error::InvalidNorm("only polytope unit balls can be triangulated".into()))
    }

    /// Short label, e.g. `lp:4` or `polytope`.
    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Lp(p) => format!("lp:{p}"),
            NormKind::Polytope(_) => "polytope".to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            NormKind::Lp(p) => json!({ "kind": "lp", "p": p.to_string(), "n": self.n }),
            NormKind::Polytope(poly) => {
                let f = poly.to_file();
                json!({ "kind": "polytope", "n": f.n, "vertices": f.vertices })
            }
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n = {})", self.label(), self.n)
    }
}
