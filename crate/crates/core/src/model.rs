//! The community model: users, items and tags tied together by timestamped
//! tag assignments, plus the six directional indexes derived from them.
//!
//! Identifiers are dense per-kind ordinals handed out by an [`Interner`].
//! Each kind gets its own newtype so a tag id can never land in a user slot.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! entity_id {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

entity_id!(
    /// Ordinal of a user within one community.
    UserId,
    "u#"
);
entity_id!(
    /// Ordinal of an item (a bookmarked publication, URL, ...).
    ItemId,
    "i#"
);
entity_id!(
    /// Ordinal of a tag.
    TagId,
    "t#"
);

/// One `(user, tag, item, timestamp)` event. Timestamps are epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TagAssignment {
    pub user: UserId,
    pub tag: TagId,
    pub item: ItemId,
    pub timestamp: u64,
}

impl TagAssignment {
    pub fn new(user: UserId, tag: TagId, item: ItemId, timestamp: u64) -> Self {
        Self {
            user,
            tag,
            item,
            timestamp,
        }
    }

    fn sort_key(&self) -> (u64, UserId, ItemId, TagId) {
        (self.timestamp, self.user, self.item, self.tag)
    }
}

/// Maps raw string labels to dense ordinals. Labels are trimmed of surrounding
/// whitespace and otherwise compared byte-for-byte (no case folding).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> u32 {
        let label = label.trim();
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = u32::try_from(self.names.len()).expect("more than u32::MAX labels");
        self.ids.insert(label.to_owned(), id);
        self.names.push(label.to_owned());
        id
    }

    pub fn get(&self, label: &str) -> Option<u32> {
        self.ids.get(label.trim()).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Label tables for the three entity kinds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labels {
    pub users: Interner,
    pub items: Interner,
    pub tags: Interner,
}

impl Labels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns one raw record's labels into a [`TagAssignment`].
    pub fn assignment(&mut self, user: &str, item: &str, tag: &str, timestamp: u64) -> TagAssignment {
        TagAssignment {
            user: UserId(self.users.intern(user)),
            item: ItemId(self.items.intern(item)),
            tag: TagId(self.tags.intern(tag)),
            timestamp,
        }
    }

    pub fn user_label(&self, u: UserId) -> String {
        self.users.name(u.0).map_or_else(|| u.0.to_string(), str::to_owned)
    }

    pub fn item_label(&self, i: ItemId) -> String {
        self.items.name(i.0).map_or_else(|| i.0.to_string(), str::to_owned)
    }

    pub fn tag_label(&self, t: TagId) -> String {
        self.tags.name(t.0).map_or_else(|| t.0.to_string(), str::to_owned)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub num_users: usize,
    pub num_items: usize,
    pub num_tags: usize,
    pub num_assignments: usize,
}

/// An immutable tagging community.
///
/// Assignments are kept in ascending `(timestamp, user, item, tag)` order with
/// exact duplicates collapsed, so any permutation of the same input builds an
/// identical community. Index vectors are sized by the largest ordinal seen;
/// ordinals that never occur simply have empty entries and are not counted
/// as present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    assignments: Vec<TagAssignment>,
    users: Vec<UserId>,
    items: Vec<ItemId>,
    tags: Vec<TagId>,
    user_items: Vec<Vec<ItemId>>,
    user_tags: Vec<Vec<TagId>>,
    item_users: Vec<Vec<UserId>>,
    item_tags: Vec<Vec<TagId>>,
    tag_users: Vec<Vec<UserId>>,
    tag_items: Vec<Vec<ItemId>>,
    labels: Labels,
}

fn push_pair<V>(index: &mut Vec<Vec<V>>, key: usize, value: V) {
    if index.len() <= key {
        index.resize_with(key + 1, Vec::new);
    }
    index[key].push(value);
}

fn finish<V: Ord>(index: &mut [Vec<V>]) {
    for entry in index.iter_mut() {
        entry.sort_unstable();
        entry.dedup();
    }
}

fn present<V>(index: &[Vec<V>]) -> impl Iterator<Item = u32> + '_ {
    index
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(i, _)| i as u32)
}

impl Community {
    /// Builds a community from assignments in any order. Label lookups fall
    /// back to printing ordinals.
    pub fn build<I>(assignments: I) -> Self
    where
        I: IntoIterator<Item = TagAssignment>,
    {
        Self::with_labels(assignments, Labels::default())
    }

    pub fn with_labels<I>(assignments: I, labels: Labels) -> Self
    where
        I: IntoIterator<Item = TagAssignment>,
    {
        let mut assignments: Vec<TagAssignment> = assignments.into_iter().collect();
        assignments.sort_unstable_by_key(TagAssignment::sort_key);
        assignments.dedup();

        let mut user_items = Vec::new();
        let mut user_tags = Vec::new();
        let mut item_users = Vec::new();
        let mut item_tags = Vec::new();
        let mut tag_users = Vec::new();
        let mut tag_items = Vec::new();
        for a in &assignments {
            push_pair(&mut user_items, a.user.index(), a.item);
            push_pair(&mut user_tags, a.user.index(), a.tag);
            push_pair(&mut item_users, a.item.index(), a.user);
            push_pair(&mut item_tags, a.item.index(), a.tag);
            push_pair(&mut tag_users, a.tag.index(), a.user);
            push_pair(&mut tag_items, a.tag.index(), a.item);
        }
        finish(&mut user_items);
        finish(&mut user_tags);
        finish(&mut item_users);
        finish(&mut item_tags);
        finish(&mut tag_users);
        finish(&mut tag_items);

        Self {
            users: present(&user_items).map(UserId).collect(),
            items: present(&item_users).map(ItemId).collect(),
            tags: present(&tag_users).map(TagId).collect(),
            assignments,
            user_items,
            user_tags,
            item_users,
            item_tags,
            tag_users,
            tag_items,
            labels,
        }
    }

    pub fn assignments(&self) -> &[TagAssignment] {
        &self.assignments
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Users present in the community, ascending by ordinal.
    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn tags(&self) -> &[TagId] {
        &self.tags
    }

    /// One past the largest user ordinal; sizes per-user scratch arrays.
    pub fn user_capacity(&self) -> usize {
        self.user_items.len()
    }

    pub fn item_capacity(&self) -> usize {
        self.item_users.len()
    }

    pub fn tag_capacity(&self) -> usize {
        self.tag_users.len()
    }

    pub fn contains_user(&self, u: UserId) -> bool {
        self.user_items.get(u.index()).is_some_and(|v| !v.is_empty())
    }

    /// The user's library `I_k` (sorted). Empty for unknown users.
    pub fn user_items(&self, u: UserId) -> &[ItemId] {
        self.user_items.get(u.index()).map_or(&[], Vec::as_slice)
    }

    /// The user's vocabulary `T_k` (sorted). Empty for unknown users.
    pub fn user_tags(&self, u: UserId) -> &[TagId] {
        self.user_tags.get(u.index()).map_or(&[], Vec::as_slice)
    }

    pub fn item_users(&self, i: ItemId) -> &[UserId] {
        self.item_users.get(i.index()).map_or(&[], Vec::as_slice)
    }

    pub fn item_tags(&self, i: ItemId) -> &[TagId] {
        self.item_tags.get(i.index()).map_or(&[], Vec::as_slice)
    }

    pub fn tag_users(&self, t: TagId) -> &[UserId] {
        self.tag_users.get(t.index()).map_or(&[], Vec::as_slice)
    }

    pub fn tag_items(&self, t: TagId) -> &[ItemId] {
        self.tag_items.get(t.index()).map_or(&[], Vec::as_slice)
    }

    /// The pair `(I_k, T_k)` for a user.
    pub fn user_view(&self, u: UserId) -> Result<(&[ItemId], &[TagId])> {
        if !self.contains_user(u) {
            return Err(Error::UnknownUser(u));
        }
        Ok((self.user_items(u), self.user_tags(u)))
    }

    /// The pair `(U_i, T_i)` for an item.
    pub fn item_view(&self, i: ItemId) -> (&[UserId], &[TagId]) {
        (self.item_users(i), self.item_tags(i))
    }

    /// The pair `(U_j, I_j)` for a tag.
    pub fn tag_view(&self, t: TagId) -> (&[UserId], &[ItemId]) {
        (self.tag_users(t), self.tag_items(t))
    }

    pub fn summary(&self) -> SummaryStats {
        SummaryStats {
            num_users: self.users.len(),
            num_items: self.items.len(),
            num_tags: self.tags.len(),
            num_assignments: self.assignments.len(),
        }
    }

    /// Number of (collapsed) assignments made by each user, indexed by ordinal.
    pub fn assignment_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.user_capacity()];
        for a in &self.assignments {
            counts[a.user.index()] += 1;
        }
        counts
    }

    /// Builds the community formed by assignments with `timestamp <= until`.
    /// Labels are shared with `self`.
    pub fn prefix(&self, until: u64) -> Community {
        let end = self.assignments.partition_point(|a| a.timestamp <= until);
        Community::with_labels(self.assignments[..end].iter().copied(), self.labels.clone())
    }

    pub fn first_timestamp(&self) -> Option<u64> {
        self.assignments.first().map(|a| a.timestamp)
    }

    pub fn last_timestamp(&self) -> Option<u64> {
        self.assignments.last().map(|a| a.timestamp)
    }
}

/// Free-function spelling of [`Community::build`].
pub fn build_community<I>(assignments: I) -> Community
where
    I: IntoIterator<Item = TagAssignment>,
{
    Community::build(assignments)
}
