//! Finite étale algebras through their Galois data.
//!
//! An algebra `A = k_1 ⊕ … ⊕ k_n` split by a Galois extension with group
//! `G` is recorded as `G` together with the stabilizers `H_i` of the
//! factors; its geometric points form the `G`-set `⊔ G/H_i`. Splitness and
//! pseudo-splitness are statements about fixed points on that set.

use thiserror::Error;

use crate::perm::{coset_action, GroupAction, PermError, Permutation, PermutationGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EtaleError {
    #[error("an étale algebra needs at least one component")]
    NoComponents,
    #[error("component {index}: {source}")]
    Component {
        index: usize,
        #[source]
        source: PermError,
    },
}

#[derive(Clone, Debug)]
pub struct EtaleAlgebraDescriptor {
    group: PermutationGroup,
    components: Vec<Subgroup>,
    blocks: Vec<GroupAction>,
    points: GroupAction,
}

impl EtaleAlgebraDescriptor {
    /// Conjugate or repeated components are kept as separate factors.
    pub fn new(group: PermutationGroup, components: Vec<Subgroup>) -> Result<Self, EtaleError> {
        if components.is_empty() {
            return Err(EtaleError::NoComponents);
        }
        let blocks = components
            .iter()
            .enumerate()
            .map(|(index, h)| {
                coset_action(&group, h).map_err(|source| EtaleError::Component { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let points = GroupAction::disjoint_union(&group, &blocks);
        Ok(EtaleAlgebraDescriptor {
            group,
            components,
            blocks,
            points,
        })
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn components(&self) -> &[Subgroup] {
        &self.components
    }

    /// The coset action of each component, in component order.
    pub fn blocks(&self) -> &[GroupAction] {
        &self.blocks
    }

    /// The action of `G` on all geometric points, blocks laid out in order.
    pub fn point_action(&self) -> &GroupAction {
        &self.points
    }

    /// Total dimension over the base field.
    pub fn dimension(&self) -> usize {
        self.points.set_size()
    }
}

/// Builds `⊕ K^{E_i}` from subgroups of `lambda`; the covering property is
/// left for [`is_pseudo_split`] to decide.
pub fn algebra_from_covering(
    lambda: &PermutationGroup,
    subgroups: Vec<Subgroup>,
) -> Result<EtaleAlgebraDescriptor, EtaleError> {
    EtaleAlgebraDescriptor::new(lambda.clone(), subgroups)
}

/// `[G : H_i]` per component.
pub fn component_degrees(d: &EtaleAlgebraDescriptor) -> Vec<usize> {
    d.blocks.iter().map(GroupAction::set_size).collect()
}

pub fn is_split(d: &EtaleAlgebraDescriptor) -> bool {
    split_component(d).is_some()
}

fn split_component(d: &EtaleAlgebraDescriptor) -> Option<usize> {
    d.components
        .iter()
        .position(|h| h.order() == d.group.order())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitnessReport {
    pub is_split: bool,
    pub is_pseudo_split: bool,
    /// Elements of `G` without a fixed point, sorted; empty iff pseudo-split.
    pub uncovered: Vec<Permutation>,
    /// First component equal to the base field, if any.
    pub fixed_component: Option<usize>,
}

pub fn is_pseudo_split(d: &EtaleAlgebraDescriptor) -> SplitnessReport {
    let uncovered: Vec<Permutation> = d
        .group
        .elements()
        .iter()
        .enumerate()
        .filter(|(i, _)| !d.points.image_at(*i).has_fixed_point())
        .map(|(_, g)| g.clone())
        .collect();
    let fixed_component = split_component(d);
    SplitnessReport {
        is_split: fixed_component.is_some(),
        is_pseudo_split: uncovered.is_empty(),
        uncovered,
        fixed_component,
    }
}

/// The covering test written directly: every element lies in a conjugate
/// of some component. Independent of the point action.
pub fn covered_by_conjugates(d: &EtaleAlgebraDescriptor) -> bool {
    d.group.elements().iter().all(|g| {
        d.components.iter().any(|h| {
            d.group
                .elements()
                .iter()
                .any(|x| h.contains(&x.inverse().compose(g).compose(x)))
        })
    })
}
