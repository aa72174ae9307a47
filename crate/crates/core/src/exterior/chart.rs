use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Var;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Base,
    Fiber,
    Momentum,
    Frame,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Base => "base",
            Role::Fiber => "fiber",
            Role::Momentum => "momentum",
            Role::Frame => "frame",
        }
    }
}

/// A single coordinate system: ordered named coordinates with roles.
#[derive(Debug)]
pub struct Chart {
    name: String,
    coords: Vec<(Var, Role)>,
    n: usize,
    k: usize,
    index: HashMap<Var, usize>,
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        coords: Vec<(Var, Role)>,
        n: usize,
        k: usize,
    ) -> Result<Arc<Chart>> {
        let name = name.into();
        if n == 0 {
            return Err(Error::BadDimensions(format!(
                "{name}: base dimension must be at least 1"
            )));
        }
        if coords.len() > u8::MAX as usize {
            return Err(Error::BadDimensions(format!(
                "{name}: too many coordinates"
            )));
        }
        let mut index = HashMap::new();
        for (i, (v, _)) in coords.iter().enumerate() {
            if index.insert(*v, i).is_some() {
                return Err(Error::BadDimensions(format!(
                    "{name}: duplicate coordinate {v}"
                )));
            }
        }
        Ok(Arc::new(Chart {
            name,
            coords,
            n,
            k,
            index,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Dimension of the model space R^{n+k} carrying vector values.
    pub fn model_dim(&self) -> usize {
        self.n + self.k
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[(Var, Role)] {
        &self.coords
    }

    pub fn var(&self, i: usize) -> Var {
        self.coords[i].0
    }

    pub fn role(&self, i: usize) -> Role {
        self.coords[i].1
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.coords.iter().map(|(v, _)| *v)
    }

    pub fn index_of(&self, v: Var) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn require(&self, v: Var) -> Result<usize> {
        self.index_of(v)
            .ok_or_else(|| Error::Invalid(format!("{v} is not a coordinate of {}", self.name)))
    }

    pub fn has(&self, v: Var) -> bool {
        self.index.contains_key(&v)
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Chart) -> bool {
        std::ptr::eq(self, other) || (self.name == other.name && self.coords == other.coords)
    }
}

impl Eq for Chart {}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::ChartMismatch(a.name.clone(), b.name.clone()))
    }
}
