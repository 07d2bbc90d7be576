//! Interned restriction closure of a set of elements.
//!
//! Each distinct reduced word reachable by restriction gets a dense id; its
//! root action is stored eagerly and its children are expanded on demand.

use std::collections::{HashMap, HashSet};

use super::{AutomatonGroup, Element, WreathError};
use crate::config::BudgetExceeded;
use crate::perm::Perm;

pub struct Closure<'a> {
    group: &'a AutomatonGroup,
    ids: HashMap<Element, u32>,
    elements: Vec<Element>,
    roots: Vec<Perm>,
    children: Vec<Option<Vec<u32>>>,
}

impl<'a> Closure<'a> {
    pub fn new(group: &'a AutomatonGroup) -> Self {
        Closure { group, ids: HashMap::new(), elements: Vec::new(), roots: Vec::new(), children: Vec::new() }
    }

    pub fn group(&self) -> &'a AutomatonGroup {
        self.group
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn intern(&mut self, g: Element) -> Result<u32, WreathError> {
        if let Some(&id) = self.ids.get(&g) {
            return Ok(id);
        }
        let limit = self.group.budget().max_restrictions;
        if self.elements.len() >= limit {
            return Err(BudgetExceeded::new("distinct restrictions", limit).into());
        }
        let id = self.elements.len() as u32;
        self.roots.push(self.group.root_action(&g));
        self.elements.push(g.clone());
        self.children.push(None);
        self.ids.insert(g, id);
        Ok(id)
    }

    pub fn element(&self, id: u32) -> &Element {
        &self.elements[id as usize]
    }

    pub fn root(&self, id: u32) -> &Perm {
        &self.roots[id as usize]
    }

    /// Ids of `u|0, …, u|(d-1)`.
    pub fn children(&mut self, id: u32) -> Result<&[u32], WreathError> {
        if self.children[id as usize].is_none() {
            let g = self.elements[id as usize].clone();
            let mut out = Vec::with_capacity(self.degree());
            for x in 0..self.degree() {
                let (_, c) = self.group.restrict_letter(&g, x);
                out.push(self.intern(c)?);
            }
            self.children[id as usize] = Some(out);
        }
        Ok(self.children[id as usize].as_deref().expect("filled above"))
    }

    /// Expands every reachable restriction from `start`, returning them in
    /// discovery order.
    pub fn explore(&mut self, start: u32) -> Result<Vec<u32>, WreathError> {
        let mut seen = HashSet::from([start]);
        let mut order = vec![start];
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            for c in self.children(u)?.to_vec() {
                if seen.insert(c) {
                    order.push(c);
                }
            }
        }
        Ok(order)
    }
}
