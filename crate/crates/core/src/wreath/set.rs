//! Sets of group elements deduplicated up to equality in the group.

use std::collections::HashMap;

use super::{AutomatonGroup, Element, WreathError};

/// Elements are bucketed by their action on a small level, which equal
/// elements share; only elements in the same bucket are compared exactly.
pub struct ElementSet<'g> {
    group: &'g AutomatonGroup,
    level: usize,
    buckets: HashMap<Vec<u32>, Vec<usize>>,
    elements: Vec<Element>,
}

impl<'g> ElementSet<'g> {
    pub fn new(group: &'g AutomatonGroup) -> Self {
        let d = group.degree();
        let mut level = 1;
        while d.pow(level as u32 + 1) <= 256 {
            level += 1;
        }
        ElementSet { group, level, buckets: HashMap::new(), elements: Vec::new() }
    }

    fn signature(&self, g: &Element) -> Result<Vec<u32>, WreathError> {
        Ok(self.group.level_permutation(g, self.level)?.into_images())
    }

    fn find_with(&self, sig: &[u32], g: &Element) -> Result<Option<usize>, WreathError> {
        if let Some(ids) = self.buckets.get(sig) {
            for &i in ids {
                if self.group.equal(&self.elements[i], g)? {
                    return Ok(Some(i));
                }
            }
        }
        Ok(None)
    }

    /// Position of an element equal to `g`, if present.
    pub fn position(&self, g: &Element) -> Result<Option<usize>, WreathError> {
        let sig = self.signature(g)?;
        self.find_with(&sig, g)
    }

    pub fn contains(&self, g: &Element) -> Result<bool, WreathError> {
        Ok(self.position(g)?.is_some())
    }

    /// Inserts `g` unless an equal element is present. Returns the position
    /// of the stored representative and whether `g` was new.
    pub fn insert(&mut self, g: Element) -> Result<(usize, bool), WreathError> {
        let sig = self.signature(&g)?;
        if let Some(i) = self.find_with(&sig, &g)? {
            return Ok((i, false));
        }
        let i = self.elements.len();
        self.elements.push(g);
        self.buckets.entry(sig).or_default().push(i);
        Ok((i, true))
    }

    pub fn get(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }
}
