//! Layered floating-point networks: representation, concrete evaluation,
//! interval evaluation, composition, and the versioned text file format.
//!
//! Weight matrices are stored sparsely (per-row nonzero terms over a known
//! input width). Evaluation is bit-exact for the dense left-associated
//! affine semantics: when every input to a layer is finite, skipping a
//! zero-weight term is an exact no-op, and otherwise rows fall back to the
//! full dense walk so that infinities and Top contaminate exactly as the
//! dense semantics dictates.

use crate::activation::{rounded_table, ActivationKind, SigmaTable};
use crate::error::Error;
use crate::format::Format;
use crate::fp::Fp;
use crate::interval::{iv_add, iv_mul, Interval};
use crate::Result;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    /// `(input slot, weight)` pairs, strictly increasing slots, nonzero
    /// finite weights.
    pub terms: Vec<(usize, Fp)>,
    pub bias: Fp,
}

impl Row {
    pub fn new(mut terms: Vec<(usize, Fp)>, bias: Fp) -> Row {
        terms.retain(|(_, w)| !w.is_zero());
        terms.sort_by_key(|(j, _)| *j);
        Row { terms, bias }
    }

    pub fn constant(bias: Fp) -> Row {
        Row {
            terms: Vec::new(),
            bias,
        }
    }

    pub fn identity_of(slot: usize, fmt: &Format) -> Row {
        Row {
            terms: vec![(slot, one(fmt))],
            bias: Fp::zero(),
        }
    }
}

pub fn one(fmt: &Format) -> Fp {
    fmt.round_rational(&num::BigRational::from_integer(1.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub in_dim: usize,
    pub rows: Vec<Row>,
}

impl Layer {
    pub fn out_dim(&self) -> usize {
        self.rows.len()
    }
}

/// A layered network: affine layers with the activation applied after every
/// layer except the last.
#[derive(Clone, Debug)]
pub struct Network {
    pub format: Format,
    pub activation: ActivationKind,
    pub layers: Vec<Layer>,
    pub no_first_affine: bool,
    pub no_last_affine: bool,
}

impl Network {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map(|l| l.in_dim).unwrap_or(0)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.out_dim()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::MalformedNetwork("no layers".into()));
        }
        let mut dim = self.input_dim();
        for (li, layer) in self.layers.iter().enumerate() {
            if layer.in_dim != dim {
                return Err(Error::MalformedNetwork(format!(
                    "layer {li} expects {} inputs, previous layer provides {dim}",
                    layer.in_dim
                )));
            }
            for row in &layer.rows {
                let mut prev = None;
                for &(j, w) in &row.terms {
                    if j >= layer.in_dim {
                        return Err(Error::MalformedNetwork(format!(
                            "layer {li} references input {j} of {}",
                            layer.in_dim
                        )));
                    }
                    if prev.map(|p| p >= j).unwrap_or(false) {
                        return Err(Error::MalformedNetwork(format!(
                            "layer {li} has unsorted terms"
                        )));
                    }
                    if !w.is_finite() || w.is_zero() {
                        return Err(Error::MalformedNetwork(format!(
                            "layer {li} has a non-finite or zero stored weight"
                        )));
                    }
                    prev = Some(j);
                }
                if !row.bias.is_finite() {
                    return Err(Error::MalformedNetwork(format!(
                        "layer {li} has a non-finite bias"
                    )));
                }
            }
            dim = layer.out_dim();
        }
        if self.no_last_affine {
            let last = self.layers.last().unwrap();
            let ok = last.out_dim() == last.in_dim
                && last
                    .rows
                    .iter()
                    .enumerate()
                    .all(|(i, r)| r.bias.is_zero() && r.terms == vec![(i, one(&self.format))]);
            if !ok {
                return Err(Error::MalformedNetwork(
                    "last layer is not the identity but the flag says so".into(),
                ));
            }
        }
        if self.no_first_affine {
            let first = &self.layers[0];
            let d0 = first.in_dim;
            let ok = first.out_dim() >= d0
                && first.rows.iter().enumerate().all(|(i, r)| {
                    if i < d0 {
                        r.bias.is_zero() && r.terms == vec![(i, one(&self.format))]
                    } else {
                        r.terms.is_empty()
                    }
                });
            if !ok {
                return Err(Error::MalformedNetwork(
                    "first layer is not a padded diagonal but the flag says so".into(),
                ));
            }
        }
        Ok(())
    }

    fn sigma(&self) -> Result<Arc<SigmaTable>> {
        rounded_table(&self.format, self.activation)
    }

    /// Concrete evaluation, exact layered left-associated semantics.
    pub fn eval(&self, x: &[Fp]) -> Result<Vec<Fp>> {
        let sigma = self.sigma()?;
        self.eval_with(x, &sigma)
    }

    pub fn eval_with(&self, x: &[Fp], sigma: &SigmaTable) -> Result<Vec<Fp>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let fmt = &self.format;
        let mut cur: Vec<Fp> = x.to_vec();
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            let all_finite = cur.iter().all(|v| v.is_finite());
            let mut next = Vec::with_capacity(layer.out_dim());
            for row in &layer.rows {
                next.push(eval_row_concrete(fmt, row, &cur, layer.in_dim, all_finite));
            }
            if li != last {
                for v in next.iter_mut() {
                    *v = sigma.eval(*v);
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Interval semantics: the affine rows use interval corner operations in
    /// the concrete summation order, and the activation is lifted to its
    /// exact image extrema.
    pub fn eval_interval(&self, bx: &[Interval]) -> Result<Vec<Interval>> {
        let sigma = self.sigma()?;
        self.eval_interval_with(bx, &sigma)
    }

    pub fn eval_interval_with(&self, bx: &[Interval], sigma: &SigmaTable) -> Result<Vec<Interval>> {
        if bx.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: bx.len(),
            });
        }
        let fmt = &self.format;
        let mut cur: Vec<Interval> = bx.to_vec();
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            let all_finite = cur.iter().all(|v| v.is_finite_pair());
            let mut next = Vec::with_capacity(layer.out_dim());
            for row in &layer.rows {
                next.push(eval_row_interval(fmt, row, &cur, layer.in_dim, all_finite));
            }
            if li != last {
                for v in next.iter_mut() {
                    *v = sigma.lift(v);
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Composition per the merge rule: the junction must be a single affine
    /// map, which requires `earlier` to end with the identity or `self` to
    /// begin with a padded diagonal. Depth of the result is
    /// `earlier.depth() + self.depth() - 1`.
    pub fn compose(&self, earlier: &Network) -> Result<Network> {
        if self.format != earlier.format {
            return Err(Error::IncompatibleJunction("formats differ".into()));
        }
        if self.activation != earlier.activation {
            return Err(Error::IncompatibleJunction("activations differ".into()));
        }
        if self.input_dim() != earlier.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: earlier.output_dim(),
            });
        }
        let mut layers: Vec<Layer>;
        if earlier.no_last_affine {
            layers = earlier.layers[..earlier.layers.len() - 1].to_vec();
            layers.extend(self.layers.iter().cloned());
        } else if self.no_first_affine {
            layers = earlier.layers.clone();
            let junction = layers.last_mut().unwrap();
            // rows beyond the diagonal are pure constants; append them to
            // the earlier last layer
            let first = &self.layers[0];
            for row in first.rows.iter().skip(first.in_dim) {
                junction.rows.push(Row::constant(row.bias));
            }
            layers.extend(self.layers[1..].iter().cloned());
        } else {
            return Err(Error::IncompatibleJunction(
                "neither side exposes a mergeable affine boundary".into(),
            ));
        }
        let net = Network {
            format: self.format,
            activation: self.activation,
            layers,
            no_first_affine: earlier.no_first_affine,
            no_last_affine: self.no_last_affine,
        };
        net.validate()?;
        Ok(net)
    }
}

fn eval_row_concrete(fmt: &Format, row: &Row, inputs: &[Fp], in_dim: usize, sparse_ok: bool) -> Fp {
    if sparse_ok {
        let mut acc: Option<Fp> = None;
        for &(j, w) in &row.terms {
            let t = fmt.mul(inputs[j], w);
            acc = Some(match acc {
                None => t,
                Some(a) => fmt.add(a, t),
            });
        }
        match acc {
            None => row.bias,
            Some(a) => fmt.add(a, row.bias),
        }
    } else {
        // dense walk: every input participates, zero weights included
        let mut acc: Option<Fp> = None;
        let mut it = row.terms.iter().peekable();
        for j in 0..in_dim {
            let w = match it.peek() {
                Some(&&(slot, w)) if slot == j => {
                    it.next();
                    w
                }
                _ => Fp::zero(),
            };
            let t = fmt.mul(inputs[j], w);
            acc = Some(match acc {
                None => t,
                Some(a) => fmt.add(a, t),
            });
        }
        match acc {
            None => row.bias,
            Some(a) => fmt.add(a, row.bias),
        }
    }
}

fn eval_row_interval(
    fmt: &Format,
    row: &Row,
    inputs: &[Interval],
    in_dim: usize,
    sparse_ok: bool,
) -> Interval {
    let mut acc: Option<Interval> = None;
    let push = |acc: &mut Option<Interval>, term: Interval| {
        *acc = Some(match acc.take() {
            None => term,
            Some(a) => iv_add(fmt, &a, &term),
        });
    };
    if sparse_ok {
        for &(j, w) in &row.terms {
            let term = iv_mul(fmt, &inputs[j], &Interval::Pair(w, w));
            push(&mut acc, term);
        }
    } else {
        let mut it = row.terms.iter().peekable();
        for j in 0..in_dim {
            let w = match it.peek() {
                Some(&&(slot, w)) if slot == j => {
                    it.next();
                    w
                }
                _ => Fp::zero(),
            };
            let term = iv_mul(fmt, &inputs[j], &Interval::Pair(w, w));
            push(&mut acc, term);
        }
    }
    let b = Interval::Pair(row.bias, row.bias);
    match acc {
        None => b,
        Some(a) => iv_add(fmt, &a, &b),
    }
}

/// The classic exact-over-the-reals two-layer min network
/// `(x, y) -> 1/2 (relu(x+y) - relu(-x-y) - relu(x-y) - relu(y-x))`,
/// whose floating-point evaluation fails to compute the minimum.
pub fn relu_min_network(fmt: &Format) -> Result<Network> {
    let o = one(fmt);
    let n = o.neg();
    let half = fmt.round_rational(&num::BigRational::new(1.into(), 2.into()));
    let net = Network {
        format: *fmt,
        activation: ActivationKind::Relu,
        layers: vec![
            Layer {
                in_dim: 2,
                rows: vec![
                    Row::new(vec![(0, o), (1, o)], Fp::zero()),
                    Row::new(vec![(0, n), (1, n)], Fp::zero()),
                    Row::new(vec![(0, o), (1, n)], Fp::zero()),
                    Row::new(vec![(0, n), (1, o)], Fp::zero()),
                ],
            },
            Layer {
                in_dim: 4,
                rows: vec![Row::new(
                    vec![(0, half), (1, half.neg()), (2, half.neg()), (3, half.neg())],
                    Fp::zero(),
                )],
            },
        ],
        no_first_affine: false,
        no_last_affine: false,
    };
    net.validate()?;
    Ok(net)
}

// ---------------------------------------------------------------------------
// file format

impl Network {
    /// Serialize. Version 1 writes dense row-major weight matrices; version
    /// 2 writes sparse rows. The version is chosen by density unless forced.
    pub fn to_text(&self) -> String {
        let dense_entries: usize = self.layers.iter().map(|l| l.in_dim * l.out_dim()).sum();
        let nnz: usize = self
            .layers
            .iter()
            .flat_map(|l| l.rows.iter())
            .map(|r| r.terms.len())
            .sum();
        let v2 = dense_entries > 16384 && nnz * 4 < dense_entries;
        if v2 {
            self.to_text_v2()
        } else {
            self.to_text_v1()
        }
    }

    fn header(&self, version: u32) -> String {
        format!(
            "FPNN v{version}\nformat {}\nactivation {}\nno_first_affine {}\nno_last_affine {}\nlayers {}\n",
            self.format,
            self.activation.name(),
            self.no_first_affine as u8,
            self.no_last_affine as u8,
            self.layers.len()
        )
    }

    pub fn to_text_v1(&self) -> String {
        let fmt = &self.format;
        let mut s = self.header(1);
        for layer in &self.layers {
            s.push_str(&format!("layer {} {}\n", layer.out_dim(), layer.in_dim));
            for row in &layer.rows {
                let mut it = row.terms.iter().peekable();
                let mut cells = Vec::with_capacity(layer.in_dim);
                for j in 0..layer.in_dim {
                    let w = match it.peek() {
                        Some(&&(slot, w)) if slot == j => {
                            it.next();
                            w
                        }
                        _ => Fp::zero(),
                    };
                    cells.push(fmt.display_fp(w));
                }
                s.push_str(&cells.join(" "));
                s.push('\n');
            }
            let b: Vec<String> = layer.rows.iter().map(|r| fmt.display_fp(r.bias)).collect();
            s.push_str(&format!("bias {}\n", b.join(" ")));
        }
        s
    }

    pub fn to_text_v2(&self) -> String {
        let fmt = &self.format;
        let mut s = self.header(2);
        for layer in &self.layers {
            s.push_str(&format!("layer {} {}\n", layer.out_dim(), layer.in_dim));
            for row in &layer.rows {
                s.push_str(&format!("row {}", fmt.display_fp(row.bias)));
                for &(j, w) in &row.terms {
                    s.push_str(&format!(" {}:{}", j, fmt.display_fp(w)));
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Network> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty network file".into()))?;
        let version = match head.trim() {
            "FPNN v1" => 1,
            "FPNN v2" => 2,
            other => return Err(Error::Parse(format!("bad network header {other:?}"))),
        };
        let format = Format::parse(expect_kv(lines.next(), "format")?)?;
        let activation = ActivationKind::parse(expect_kv(lines.next(), "activation")?)?;
        let nfa = expect_kv(lines.next(), "no_first_affine")? == "1";
        let nla = expect_kv(lines.next(), "no_last_affine")? == "1";
        let nl: usize = expect_kv(lines.next(), "layers")?
            .parse()
            .map_err(|_| Error::Parse("bad layer count".into()))?;
        let mut layers = Vec::with_capacity(nl);
        for _ in 0..nl {
            let spec = lines.next().ok_or_else(|| Error::Parse("missing layer".into()))?;
            let mut it = spec.split_whitespace();
            if it.next() != Some("layer") {
                return Err(Error::Parse(format!("expected layer line, got {spec:?}")));
            }
            let rows: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse("bad row count".into()))?;
            let cols: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse("bad column count".into()))?;
            let mut layer = Layer {
                in_dim: cols,
                rows: Vec::with_capacity(rows),
            };
            if version == 1 {
                let mut weights = Vec::with_capacity(rows);
                for _ in 0..rows {
                    let line = lines.next().ok_or_else(|| Error::Parse("missing weight row".into()))?;
                    let cells: Vec<&str> = line.split_whitespace().collect();
                    if cells.len() != cols {
                        return Err(Error::Parse(format!(
                            "weight row has {} cells, expected {cols}",
                            cells.len()
                        )));
                    }
                    let mut terms = Vec::new();
                    for (j, c) in cells.iter().enumerate() {
                        let w = format.parse_fp(c)?;
                        if !w.is_zero() {
                            terms.push((j, w));
                        }
                    }
                    weights.push(terms);
                }
                let bline = lines.next().ok_or_else(|| Error::Parse("missing bias line".into()))?;
                let bcells: Vec<&str> = bline.split_whitespace().collect();
                if bcells.first() != Some(&"bias") || bcells.len() != rows + 1 {
                    return Err(Error::Parse("bad bias line".into()));
                }
                for (terms, b) in weights.into_iter().zip(&bcells[1..]) {
                    layer.rows.push(Row {
                        terms,
                        bias: format.parse_fp(b)?,
                    });
                }
            } else {
                for _ in 0..rows {
                    let line = lines.next().ok_or_else(|| Error::Parse("missing row".into()))?;
                    let mut toks = line.split_whitespace();
                    if toks.next() != Some("row") {
                        return Err(Error::Parse(format!("expected row line, got {line:?}")));
                    }
                    let bias = format.parse_fp(
                        toks.next().ok_or_else(|| Error::Parse("row missing bias".into()))?,
                    )?;
                    let mut terms = Vec::new();
                    for t in toks {
                        let (j, w) = t
                            .split_once(':')
                            .ok_or_else(|| Error::Parse(format!("bad term {t:?}")))?;
                        let j: usize = j.parse().map_err(|_| Error::Parse("bad slot".into()))?;
                        terms.push((j, format.parse_fp(&format!("{w}"))?));
                    }
                    layer.rows.push(Row::new(terms, bias));
                }
            }
            layers.push(layer);
        }
        let net = Network {
            format,
            activation,
            layers,
            no_first_affine: nfa,
            no_last_affine: nla,
        };
        net.validate()?;
        Ok(net)
    }
}

fn expect_kv<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing {key} line")))?;
    line.trim()
        .strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| Error::Parse(format!("expected {key} line, got {line:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn e5m3() -> Format {
        Format::new(5, 3).unwrap()
    }

    fn q(n: i64, d: i64) -> num::BigRational {
        num::BigRational::new(n.into(), d.into())
    }

    fn identity_net(fmt: &Format, d: usize) -> Network {
        Network {
            format: *fmt,
            activation: ActivationKind::Identity,
            layers: vec![Layer {
                in_dim: d,
                rows: (0..d).map(|i| Row::identity_of(i, fmt)).collect(),
            }],
            no_first_affine: false,
            no_last_affine: true,
        }
    }

    #[test]
    fn identity_evaluates_to_input() {
        let f = e5m3();
        let net = identity_net(&f, 3);
        net.validate().unwrap();
        let x = vec![f.omega(), f.max_finite().neg(), Fp::zero()];
        assert_eq!(net.eval(&x).unwrap(), x);
        let b = vec![
            Interval::pair(f.omega().neg(), f.omega()).unwrap(),
            Interval::Top,
            Interval::singleton(Fp::zero()).unwrap(),
        ];
        // identity rows have weight one on their own slot and zero elsewhere;
        // Top contaminates every row of the layer it enters
        let out = net.eval_interval(&b).unwrap();
        assert!(out.iter().all(|iv| iv.is_top()));
    }

    #[test]
    fn depth1_affine_matches_formula() {
        let f = e5m3();
        let w = f.parse_fp("+:1:12").unwrap(); // 3
        let b = f.parse_fp("+:-2:8").unwrap(); // 0.25
        let net = Network {
            format: f,
            activation: ActivationKind::Relu,
            layers: vec![Layer {
                in_dim: 1,
                rows: vec![Row::new(vec![(0, w)], b)],
            }],
            no_first_affine: false,
            no_last_affine: false,
        };
        for i in (0..f.finite_count()).step_by(13) {
            let x = f.from_index(i);
            assert_eq!(net.eval(&[x]).unwrap()[0], f.add(f.mul(x, w), b));
        }
    }

    #[test]
    fn min_network_counterexample() {
        let f = e5m3();
        let net = relu_min_network(&f).unwrap();
        let one = f.parse_fp("+:0:8").unwrap();
        let eps = f.eps_fp(); // 2^-4
        // the float evaluation does not compute the minimum: it returns
        // eps/2 at (1, eps) and exactly 0 at (1, eps/2)
        let at_eps = net.eval(&[one, eps]).unwrap()[0];
        assert_eq!(f.to_rational(at_eps).unwrap(), q(1, 32));
        assert_ne!(at_eps, eps);
        let half_eps = f.parse_fp("+:-5:8").unwrap();
        let at_half = net.eval(&[one, half_eps]).unwrap()[0];
        assert_eq!(at_half, Fp::zero());
        assert_ne!(at_half, half_eps);
        // on a pair where every step is exact, the network does compute min
        let x = f.parse_fp("+:-1:8").unwrap(); // 0.5
        let y = f.parse_fp("+:-2:8").unwrap(); // 0.25
        assert_eq!(net.eval(&[x, y]).unwrap()[0], y);
    }

    #[test]
    fn singleton_boxes_track_eval() {
        let f = e5m3();
        let net = relu_min_network(&f).unwrap();
        for i in (0..f.finite_count()).step_by(29) {
            for j in (0..f.finite_count()).step_by(31) {
                let x = f.from_index(i);
                let y = f.from_index(j);
                let v = net.eval(&[x, y]).unwrap()[0];
                let bx = vec![
                    Interval::singleton(x).unwrap(),
                    Interval::singleton(y).unwrap(),
                ];
                assert_eq!(
                    net.eval_interval(&bx).unwrap()[0],
                    Interval::Pair(v, v),
                    "at ({x},{y})"
                );
            }
        }
    }

    #[test]
    fn compose_depth_and_semantics() {
        let f = e5m3();
        // earlier: relu net without last affine; later: square relu net
        // without first affine
        let o = one(&f);
        let earlier = Network {
            format: f,
            activation: ActivationKind::Relu,
            layers: vec![
                Layer {
                    in_dim: 1,
                    rows: vec![
                        Row::new(vec![(0, o)], f.eps_fp()),
                        Row::new(vec![(0, o.neg())], Fp::zero()),
                    ],
                },
                Layer {
                    in_dim: 2,
                    rows: vec![Row::identity_of(0, &f), Row::identity_of(1, &f)],
                },
            ],
            no_first_affine: false,
            no_last_affine: true,
        };
        let later = Network {
            format: f,
            activation: ActivationKind::Relu,
            layers: vec![
                Layer {
                    in_dim: 2,
                    rows: vec![
                        Row::identity_of(0, &f),
                        Row::identity_of(1, &f),
                        Row::constant(f.parse_fp("+:-2:8").unwrap()),
                    ],
                },
                Layer {
                    in_dim: 3,
                    rows: vec![Row::new(
                        vec![(0, o), (1, o.neg()), (2, o)],
                        f.omega(),
                    )],
                },
            ],
            no_first_affine: true,
            no_last_affine: false,
        };
        earlier.validate().unwrap();
        later.validate().unwrap();
        let both = later.compose(&earlier).unwrap();
        assert_eq!(both.depth(), earlier.depth() + later.depth() - 1);
        let one_v = f.parse_fp("+:0:8").unwrap();
        for i in (0..f.finite_count()).step_by(7) {
            let x = f.from_index(i);
            let inner = earlier.eval(&[x]).unwrap();
            let want = later.eval(&inner).unwrap();
            assert_eq!(both.eval(&[x]).unwrap(), want, "at {x}");
        }
        let _ = one_v;
        // incompatible junction errors
        let bad = Network {
            no_first_affine: false,
            ..later.clone()
        };
        let plain = Network {
            no_last_affine: false,
            ..earlier.clone()
        };
        assert!(bad.compose(&plain).is_err());
    }

    #[test]
    fn compose_exhaustive_identity_wrap() {
        // compose(identity-like later, net) behaves as net on all of [-1,1]
        let f = e5m3();
        let net = relu_min_network(&f).unwrap();
        let id_later = Network {
            format: f,
            activation: ActivationKind::Relu,
            layers: vec![
                Layer {
                    in_dim: 1,
                    rows: vec![Row::identity_of(0, &f)],
                },
                Layer {
                    in_dim: 1,
                    rows: vec![Row::identity_of(0, &f)],
                },
            ],
            no_first_affine: true,
            no_last_affine: true,
        };
        let wrapped = id_later.compose(&net).unwrap();
        let one = f.parse_fp("+:0:8").unwrap();
        let grid = f.enumerate(one.neg(), one).unwrap();
        for &x in grid.iter().step_by(5) {
            for &y in grid.iter().step_by(7) {
                let base = net.eval(&[x, y]).unwrap()[0];
                // relu is applied at the junction by the later net
                let want = if base.signum() < 0 { Fp::zero() } else { base };
                assert_eq!(wrapped.eval(&[x, y]).unwrap()[0], want);
            }
        }
    }

    #[test]
    fn file_roundtrip_both_versions() {
        let f = e5m3();
        let net = relu_min_network(&f).unwrap();
        for text in [net.to_text_v1(), net.to_text_v2()] {
            let back = Network::from_text(&text).unwrap();
            assert_eq!(back.layers, net.layers);
            assert_eq!(back.activation, net.activation);
            assert_eq!(back.no_last_affine, net.no_last_affine);
            // serialization is bit-exact: re-serializing yields the same text
            let again = if text.starts_with("FPNN v1") {
                back.to_text_v1()
            } else {
                back.to_text_v2()
            };
            assert_eq!(text, again);
        }
    }
}
