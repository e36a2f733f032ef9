use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One named tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

/// Ordered register map giving meaning to the tensor factors of a state.
///
/// Amplitude indices are mixed-radix numbers with the first register as the
/// most significant digit, so `|i⟩ ⊗ |j⟩` on dims `(d1, d2)` sits at `i·d2 + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemLayout {
    registers: Vec<Register>,
}

impl SystemLayout {
    pub fn new<I, S>(registers: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<Register> = Vec::new();
        for (name, dim) in registers {
            let name = name.into();
            if dim == 0 {
                return Err(Error::Layout(format!("register `{name}` has dimension 0")));
            }
            if out.iter().any(|r| r.name == name) {
                return Err(Error::LayoutConflict(name));
            }
            out.push(Register { name, dim });
        }
        if out.is_empty() {
            return Err(Error::Layout("a layout needs at least one register".into()));
        }
        Ok(Self { registers: out })
    }

    pub fn single(name: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(name.into(), dim)])
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.registers.iter().map(|r| r.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.name == name)
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        self.position(name)
            .map(|p| self.registers[p].dim)
            .ok_or_else(|| unknown(name))
    }

    /// Concatenation `self ⊗ other`; register names must be disjoint.
    pub fn concat(&self, other: &SystemLayout) -> Result<Self> {
        if let Some(dup) = other.names().find(|n| self.contains(n)) {
            return Err(Error::LayoutConflict(dup.to_string()));
        }
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        Ok(Self { registers })
    }

    /// The listed registers, in the listed order.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let mut regs = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let p = self.position(n).ok_or_else(|| unknown(n))?;
            if regs.iter().any(|r: &Register| r.name == n) {
                return Err(Error::LayoutConflict(n.to_string()));
            }
            regs.push(self.registers[p].clone());
        }
        if regs.is_empty() {
            return Err(Error::Layout("empty register subset".into()));
        }
        Ok(Self { registers: regs })
    }

    /// Names of every register not in `names`, in layout order.
    pub fn complement<S: AsRef<str>>(&self, names: &[S]) -> Vec<String> {
        self.names()
            .filter(|n| !names.iter().any(|k| k.as_ref() == *n))
            .map(str::to_string)
            .collect()
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let p = self.position(from).ok_or_else(|| unknown(from))?;
        if from != to && self.contains(to) {
            return Err(Error::LayoutConflict(to.to_string()));
        }
        let mut registers = self.registers.clone();
        registers[p].name = to.to_string();
        Ok(Self { registers })
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.registers.len()];
        for i in (0..self.registers.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.registers[i + 1].dim;
        }
        strides
    }

    /// Index offsets splitting the space into `keep ⊗ rest`.
    ///
    /// For every global index `g` there is exactly one pair `(i, r)` with
    /// `g = keep[i] + rest[r]`; `i` enumerates the kept registers in the given
    /// order and `r` the remaining ones in layout order.
    pub(crate) fn split<S: AsRef<str>>(&self, keep: &[S]) -> Result<Split> {
        let keep_layout = self.subset(keep)?;
        let rest_names = self.complement(keep);
        let strides = self.strides();
        let offsets = |names: &mut dyn Iterator<Item = &str>| -> Vec<usize> {
            let mut offs = vec![0usize];
            for n in names {
                let p = self.position(n).expect("validated above");
                let (dim, stride) = (self.registers[p].dim, strides[p]);
                offs = offs
                    .iter()
                    .flat_map(|&o| (0..dim).map(move |d| o + d * stride))
                    .collect();
            }
            offs
        };
        let keep_offsets = offsets(&mut keep.iter().map(|s| s.as_ref()));
        let rest_offsets = offsets(&mut rest_names.iter().map(String::as_str));
        let rest_layout = if rest_names.is_empty() {
            None
        } else {
            Some(self.subset(&rest_names)?)
        };
        Ok(Split {
            keep: keep_offsets,
            rest: rest_offsets,
            keep_layout,
            rest_layout,
        })
    }
}

impl fmt::Display for SystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .registers
            .iter()
            .map(|r| format!("{}:{}", r.name, r.dim))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub(crate) struct Split {
    pub keep: Vec<usize>,
    pub rest: Vec<usize>,
    pub keep_layout: SystemLayout,
    pub rest_layout: Option<SystemLayout>,
}

fn unknown(name: &str) -> Error {
    Error::Layout(format!("unknown register `{name}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_dim_is_product() {
        let l = SystemLayout::new([("a", 2), ("b", 3), ("c", 4)]).unwrap();
        assert_eq!(l.total_dim(), 24);
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = SystemLayout::new([("a", 2), ("a", 2)]).unwrap_err();
        assert_eq!(err, Error::LayoutConflict("a".into()));
        let a = SystemLayout::single("x", 2).unwrap();
        assert!(matches!(a.concat(&a), Err(Error::LayoutConflict(_))));
    }

    #[test]
    fn split_covers_every_index_once() {
        let l = SystemLayout::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let s = l.split(&["c", "a"]).unwrap();
        let mut seen = vec![false; l.total_dim()];
        for &k in &s.keep {
            for &r in &s.rest {
                assert!(!seen[k + r]);
                seen[k + r] = true;
            }
        }
        assert!(seen.iter().all(|&x| x));
        // c is the most significant digit of the kept index
        assert_eq!(s.keep, vec![0, 6, 1, 7]);
    }

    #[test]
    fn unknown_register_is_layout_error() {
        let l = SystemLayout::single("a", 2).unwrap();
        assert!(matches!(l.split(&["zz"]), Err(Error::Layout(_))));
    }
}
