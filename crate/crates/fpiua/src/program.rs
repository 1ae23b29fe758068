//! Straight-line programs over floating-point add, multiply, and constants,
//! with concrete and interval interpreters.

use crate::error::Error;
use crate::format::Format;
use crate::fp::Fp;
use crate::interval::{iv_add, iv_mul, Interval};
use crate::network::Network;
use crate::Result;
use std::collections::HashMap;

/// One instruction; operands refer to earlier slots. Slots `0..arity` are
/// the program inputs, slot `arity + i` is the result of instruction `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Inst {
    Const(Fp),
    Add(usize, usize),
    Mul(usize, usize),
}

#[derive(Clone, Debug)]
pub struct Program {
    pub format: Format,
    pub arity: usize,
    pub insts: Vec<Inst>,
    pub outputs: Vec<usize>,
}

impl Program {
    pub fn validate(&self) -> Result<()> {
        for (i, inst) in self.insts.iter().enumerate() {
            let slot = self.arity + i;
            let ok = match inst {
                Inst::Const(c) => c.is_finite() || c.is_infinite(),
                Inst::Add(a, b) | Inst::Mul(a, b) => *a < slot && *b < slot,
            };
            if !ok {
                return Err(Error::MalformedNetwork(format!(
                    "instruction {i} references a later slot or a NaN constant"
                )));
            }
        }
        let total = self.arity + self.insts.len();
        if self.outputs.iter().any(|&o| o >= total) {
            return Err(Error::MalformedNetwork("output slot out of range".into()));
        }
        Ok(())
    }

    pub fn run(&self, x: &[Fp]) -> Result<Vec<Fp>> {
        if x.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                got: x.len(),
            });
        }
        let fmt = &self.format;
        let mut slots = Vec::with_capacity(self.arity + self.insts.len());
        slots.extend_from_slice(x);
        for inst in &self.insts {
            let v = match *inst {
                Inst::Const(c) => c,
                Inst::Add(a, b) => fmt.add(slots[a], slots[b]),
                Inst::Mul(a, b) => fmt.mul(slots[a], slots[b]),
            };
            slots.push(v);
        }
        Ok(self.outputs.iter().map(|&o| slots[o]).collect())
    }

    pub fn run_interval(&self, bx: &[Interval]) -> Result<Vec<Interval>> {
        if bx.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                got: bx.len(),
            });
        }
        let fmt = &self.format;
        let mut slots = Vec::with_capacity(self.arity + self.insts.len());
        slots.extend_from_slice(bx);
        for inst in &self.insts {
            let v = match *inst {
                Inst::Const(c) => Interval::Pair(c, c),
                Inst::Add(a, b) => iv_add(fmt, &slots[a], &slots[b]),
                Inst::Mul(a, b) => iv_mul(fmt, &slots[a], &slots[b]),
            };
            slots.push(v);
        }
        Ok(self.outputs.iter().map(|&o| slots[o]).collect())
    }

    pub fn len(&self) -> usize {
        self.insts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insts.is_empty()
    }

    pub fn to_text(&self) -> String {
        let fmt = &self.format;
        let mut s = format!(
            "FPSL v1\nformat {}\narity {}\ninsts {}\n",
            fmt,
            self.arity,
            self.insts.len()
        );
        for inst in &self.insts {
            match inst {
                Inst::Const(c) => s.push_str(&format!("const {}\n", fmt.display_fp(*c))),
                Inst::Add(a, b) => s.push_str(&format!("add {a} {b}\n")),
                Inst::Mul(a, b) => s.push_str(&format!("mul {a} {b}\n")),
            }
        }
        s.push_str("outputs");
        for o in &self.outputs {
            s.push_str(&format!(" {o}"));
        }
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Program> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty program file".into()))?;
        if head.trim() != "FPSL v1" {
            return Err(Error::Parse(format!("bad program header {head:?}")));
        }
        let format = Format::parse(kv(lines.next(), "format")?)?;
        let arity: usize = kv(lines.next(), "arity")?
            .parse()
            .map_err(|_| Error::Parse("bad arity".into()))?;
        let n: usize = kv(lines.next(), "insts")?
            .parse()
            .map_err(|_| Error::Parse("bad instruction count".into()))?;
        let mut insts = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse("missing instruction".into()))?;
            let mut toks = line.split_whitespace();
            let inst = match toks.next() {
                Some("const") => Inst::Const(
                    format.parse_fp(toks.next().ok_or_else(|| Error::Parse("const missing value".into()))?)?,
                ),
                Some("add") => Inst::Add(parse_slot(toks.next())?, parse_slot(toks.next())?),
                Some("mul") => Inst::Mul(parse_slot(toks.next())?, parse_slot(toks.next())?),
                other => return Err(Error::Parse(format!("bad instruction {other:?}"))),
            };
            insts.push(inst);
        }
        let oline = lines.next().ok_or_else(|| Error::Parse("missing outputs".into()))?;
        let outputs = oline
            .trim()
            .strip_prefix("outputs")
            .ok_or_else(|| Error::Parse("missing outputs line".into()))?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse("bad output slot".into())))
            .collect::<Result<Vec<_>>>()?;
        let p = Program {
            format,
            arity,
            insts,
            outputs,
        };
        p.validate()?;
        Ok(p)
    }
}

fn parse_slot(tok: Option<&str>) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("bad slot operand".into()))
}

fn kv<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing {key} line")))?;
    line.trim()
        .strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| Error::Parse(format!("expected {key} line, got {line:?}")))
}

/// Incremental program builder with constant dedup.
pub struct ProgBuilder {
    pub format: Format,
    pub arity: usize,
    insts: Vec<Inst>,
    consts: HashMap<Fp, usize>,
}

impl ProgBuilder {
    pub fn new(format: Format, arity: usize) -> ProgBuilder {
        ProgBuilder {
            format,
            arity,
            insts: Vec::new(),
            consts: HashMap::new(),
        }
    }

    fn push(&mut self, inst: Inst) -> usize {
        self.insts.push(inst);
        self.arity + self.insts.len() - 1
    }

    pub fn input(&self, i: usize) -> usize {
        assert!(i < self.arity);
        i
    }

    pub fn constant(&mut self, c: Fp) -> usize {
        if let Some(&s) = self.consts.get(&c) {
            return s;
        }
        let s = self.push(Inst::Const(c));
        self.consts.insert(c, s);
        s
    }

    pub fn add(&mut self, a: usize, b: usize) -> usize {
        self.push(Inst::Add(a, b))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Inst::Mul(a, b))
    }

    /// Left-associated `(terms[0].0 (*) w0) (+) ... (+) bias`, skipping
    /// nothing: exactly one multiply per term in the listed order.
    pub fn affine(&mut self, terms: &[(usize, Fp)], bias: Fp) -> usize {
        let mut acc: Option<usize> = None;
        for &(slot, w) in terms {
            let wc = self.constant(w);
            let prod = self.mul(slot, wc);
            acc = Some(match acc {
                None => prod,
                Some(a) => self.add(a, prod),
            });
        }
        let bc = self.constant(bias);
        match acc {
            None => bc,
            Some(a) => self.add(a, bc),
        }
    }

    pub fn finish(self, outputs: Vec<usize>) -> Program {
        let p = Program {
            format: self.format,
            arity: self.arity,
            insts: self.insts,
            outputs,
        };
        debug_assert!(p.validate().is_ok());
        p
    }
}

/// Flatten an identity-activation network into a straight-line program with
/// identical concrete and interval semantics on all inputs. Every affine row
/// is emitted densely (zero weights included) so that the semantics agrees
/// even on infinite inputs.
pub fn compile_to_program(net: &Network) -> Result<Program> {
    if net.activation != crate::activation::ActivationKind::Identity {
        return Err(Error::NonIdentityActivation(net.activation.name().into()));
    }
    net.validate()?;
    let mut b = ProgBuilder::new(net.format, net.input_dim());
    let mut cur: Vec<usize> = (0..net.input_dim()).collect();
    for layer in &net.layers {
        let mut next = Vec::with_capacity(layer.out_dim());
        for row in &layer.rows {
            let mut dense = Vec::with_capacity(layer.in_dim);
            let mut it = row.terms.iter().peekable();
            for j in 0..layer.in_dim {
                let w = match it.peek() {
                    Some(&&(slot, w)) if slot == j => {
                        it.next();
                        w
                    }
                    _ => Fp::zero(),
                };
                dense.push((cur[j], w));
            }
            next.push(b.affine(&dense, row.bias));
        }
        cur = next;
    }
    Ok(b.finish(cur))
}
