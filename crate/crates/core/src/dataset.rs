//! The layered database: containers hold objects, objects hold transactions,
//! transactions hold item occurrences. Every layer may carry a fixed-length
//! vector of numeric facets.
//!
//! Identifiers are interned in sorted order of their source text, so the
//! numeric order of an id equals the lexicographic order of its name. This
//! makes every downstream ordering independent of the order facts were
//! written in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::facts::{Fact, FactSet, Location, Term};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(ItemId);
id_type!(TransactionId);
id_type!(ObjectId);
id_type!(ContainerId);

/// One of the four layers a facet can be attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Item,
    Transaction,
    Object,
    Container,
}

impl Level {
    pub const ALL: [Level; 4] = [
        Level::Item,
        Level::Transaction,
        Level::Object,
        Level::Container,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Level::Item => "item",
            Level::Transaction => "tx",
            Level::Object => "obj",
            Level::Container => "cont",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "item" | "i" => Ok(Level::Item),
            "tx" | "transaction" | "t" => Ok(Level::Transaction),
            "obj" | "object" | "o" => Ok(Level::Object),
            "cont" | "container" | "c" => Ok(Level::Container),
            _ => Err(format!("unknown facet level `{s}` (expected item, tx, obj or cont)")),
        }
    }
}

/// Addresses one facet: a level plus a zero-based index within that level.
/// Written `tx.2`, `obj.0`, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FacetRef {
    pub level: Level,
    pub index: usize,
}

impl FacetRef {
    pub fn new(level: Level, index: usize) -> Self {
        FacetRef { level, index }
    }
    pub fn item(index: usize) -> Self {
        Self::new(Level::Item, index)
    }
    pub fn tx(index: usize) -> Self {
        Self::new(Level::Transaction, index)
    }
    pub fn obj(index: usize) -> Self {
        Self::new(Level::Object, index)
    }
    pub fn cont(index: usize) -> Self {
        Self::new(Level::Container, index)
    }
}

impl fmt::Display for FacetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.level, self.index)
    }
}

impl FromStr for FacetRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (level, index) = s
            .split_once('.')
            .ok_or_else(|| format!("facet `{s}` must look like tx.2"))?;
        let index = index
            .parse()
            .map_err(|_| format!("facet `{s}` has a bad index"))?;
        Ok(FacetRef::new(level.parse()?, index))
    }
}

/// Facet counts per level: l (item), m (transaction), n (object), o (container).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FacetDims {
    pub item: usize,
    pub transaction: usize,
    pub object: usize,
    pub container: usize,
}

impl FacetDims {
    pub fn of(&self, level: Level) -> usize {
        match level {
            Level::Item => self.item,
            Level::Transaction => self.transaction,
            Level::Object => self.object,
            Level::Container => self.container,
        }
    }

    pub fn total(&self) -> usize {
        self.item + self.transaction + self.object + self.container
    }

    /// Column where `level` starts inside an occurrence utility vector.
    pub fn offset(&self, level: Level) -> usize {
        match level {
            Level::Item => 0,
            Level::Transaction => self.item,
            Level::Object => self.item + self.transaction,
            Level::Container => self.item + self.transaction + self.object,
        }
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize) {
        (self.item, self.transaction, self.object, self.container)
    }

    pub fn check(&self, facet: FacetRef) -> Result<(), DatasetError> {
        if facet.index < self.of(facet.level) {
            Ok(())
        } else {
            Err(DatasetError::FacetOutOfRange {
                facet,
                available: self.of(facet.level),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ItemOccurrence {
    pub item: ItemId,
    /// 1-based ordinal within the transaction.
    pub position: u32,
    /// Internal utility q(i, T).
    pub quantity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transaction {
    pub id: TransactionId,
    pub name: String,
    pub object: ObjectId,
    /// Sorted by position.
    pub occurrences: Vec<ItemOccurrence>,
    pub facets: Vec<f64>,
    /// Distinct items, sorted by id.
    items: Vec<ItemId>,
}

impl Transaction {
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    /// Internal utility of `item`: the quantity of its first occurrence.
    pub fn quantity(&self, item: ItemId) -> Option<f64> {
        self.occurrences
            .iter()
            .find(|o| o.item == item)
            .map(|o| o.quantity)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectRec {
    pub id: ObjectId,
    pub name: String,
    pub container: ContainerId,
    pub facets: Vec<f64>,
    pub transactions: Vec<TransactionId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainerRec {
    pub id: ContainerId,
    pub name: String,
    pub facets: Vec<f64>,
    pub objects: Vec<ObjectId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ItemRec {
    pub id: ItemId,
    pub name: String,
    pub facets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("{at}: {predicate} expects {expected} arguments, found {found}")]
    Arity {
        predicate: String,
        expected: String,
        found: usize,
        at: Location,
    },
    #[error("{at}: {what} `{name}` refers to unknown {target_kind} `{target}`")]
    Dangling {
        what: &'static str,
        name: String,
        target_kind: &'static str,
        target: String,
        at: Location,
    },
    #[error("{at}: duplicate {what} `{name}`")]
    Duplicate {
        what: &'static str,
        name: String,
        at: Location,
    },
    #[error("{at}: {level} utility vector of `{name}` has {found} facets, expected {expected}")]
    VectorLength {
        level: Level,
        name: String,
        expected: usize,
        found: usize,
        at: Location,
    },
    #[error("{level} `{name}` has no utility vector although the level has {expected} facets")]
    MissingVector {
        level: Level,
        name: String,
        expected: usize,
    },
    #[error("{at}: argument {position} of {predicate} must be a number")]
    NotNumeric {
        predicate: String,
        position: usize,
        at: Location,
    },
    #[error("{at}: item position must be an integer >= 1")]
    BadPosition { at: Location },
    #[error("{at}: transaction `{transaction}` has two occurrences at position {position}")]
    DuplicatePosition {
        transaction: String,
        position: u32,
        at: Location,
    },
    #[error("item/2 and item/4 facts are mixed; use one form per dataset")]
    MixedItemForms,
    #[error("{at}: bad facet label: {reason}")]
    BadLabel { reason: String, at: Location },
    #[error("the dataset has no transactions")]
    NoTransactions,
    #[error("facet {facet} does not exist ({available} facets at that level)")]
    FacetOutOfRange { facet: FacetRef, available: usize },
}

/// An assembled, validated, immutable database.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    items: Vec<ItemRec>,
    transactions: Vec<Transaction>,
    objects: Vec<ObjectRec>,
    containers: Vec<ContainerRec>,
    dims: FacetDims,
    labels: BTreeMap<FacetRef, String>,
    categories: Option<BTreeMap<ItemId, BTreeSet<String>>>,
    /// Vertical layout: for each item, the sorted ids of transactions containing it.
    tid_lists: Vec<Vec<TransactionId>>,
}

impl Dataset {
    pub fn dims(&self) -> FacetDims {
        self.dims
    }

    pub fn items(&self) -> &[ItemRec] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> &ItemRec {
        &self.items[id.index()]
    }

    pub fn item_name(&self, id: ItemId) -> &str {
        &self.items[id.index()].name
    }

    pub fn item_by_name(&self, name: &str) -> Option<ItemId> {
        self.items
            .binary_search_by(|i| i.name.as_str().cmp(name))
            .ok()
            .map(|i| ItemId(i as u32))
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn transaction(&self, id: TransactionId) -> &Transaction {
        &self.transactions[id.index()]
    }

    pub fn transaction_by_name(&self, name: &str) -> Option<TransactionId> {
        self.transactions
            .binary_search_by(|t| t.name.as_str().cmp(name))
            .ok()
            .map(|i| TransactionId(i as u32))
    }

    pub fn objects(&self) -> &[ObjectRec] {
        &self.objects
    }

    pub fn object(&self, id: ObjectId) -> &ObjectRec {
        &self.objects[id.index()]
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjectId> {
        self.objects
            .binary_search_by(|o| o.name.as_str().cmp(name))
            .ok()
            .map(|i| ObjectId(i as u32))
    }

    pub fn containers(&self) -> &[ContainerRec] {
        &self.containers
    }

    pub fn container(&self, id: ContainerId) -> &ContainerRec {
        &self.containers[id.index()]
    }

    pub fn object_of(&self, tid: TransactionId) -> &ObjectRec {
        self.object(self.transaction(tid).object)
    }

    pub fn container_of(&self, tid: TransactionId) -> &ContainerRec {
        self.container(self.object_of(tid).container)
    }

    /// Sorted ids of the transactions containing `item`.
    pub fn tid_list(&self, item: ItemId) -> &[TransactionId] {
        &self.tid_lists[item.index()]
    }

    /// Value of a transaction-, object- or container-level facet as seen from
    /// transaction `tid`. Item-level facets depend on a pattern and yield `None`.
    pub fn layer_value(&self, tid: TransactionId, facet: FacetRef) -> Option<f64> {
        match facet.level {
            Level::Item => None,
            Level::Transaction => self.transaction(tid).facets.get(facet.index).copied(),
            Level::Object => self.object_of(tid).facets.get(facet.index).copied(),
            Level::Container => self.container_of(tid).facets.get(facet.index).copied(),
        }
    }

    pub fn label(&self, facet: FacetRef) -> Option<&str> {
        self.labels.get(&facet).map(String::as_str)
    }

    /// Finds a facet by its label.
    pub fn facet_by_label(&self, label: &str) -> Option<FacetRef> {
        self.labels
            .iter()
            .find(|(_, l)| l.as_str() == label)
            .map(|(f, _)| *f)
    }

    pub fn has_categories(&self) -> bool {
        self.categories.is_some()
    }

    /// Categories of an item; empty when the item is absent from the map.
    pub fn categories(&self, item: ItemId) -> impl Iterator<Item = &str> {
        self.categories
            .as_ref()
            .and_then(|c| c.get(&item))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// A new dataset holding only the objects accepted by `keep` and their
    /// transactions. Items, item vectors, containers and labels are kept in full,
    /// so item ids stay valid across the two datasets; transaction and object ids
    /// are renumbered.
    pub fn restrict_to_objects(&self, keep: impl Fn(ObjectId) -> bool) -> Result<Dataset, DatasetError> {
        let mut raw = Raw {
            dims: self.dims,
            labels: self.labels.clone(),
            ..Raw::default()
        };
        for c in &self.containers {
            raw.containers.insert(c.name.clone(), Some(c.facets.clone()));
        }
        for o in self.objects.iter().filter(|o| keep(o.id)) {
            let container = self.container(o.container).name.clone();
            raw.objects
                .insert(o.name.clone(), (container, Location::default(), Some(o.facets.clone())));
        }
        for t in &self.transactions {
            if !keep(t.object) {
                continue;
            }
            let object = self.object(t.object).name.clone();
            raw.transactions
                .insert(t.name.clone(), (object, Location::default(), Some(t.facets.clone())));
            raw.occurrences.insert(
                t.name.clone(),
                t.occurrences
                    .iter()
                    .map(|o| (self.item_name(o.item).to_string(), o.position, o.quantity, Location::default()))
                    .collect(),
            );
        }
        for i in &self.items {
            raw.items.insert(i.name.clone(), Some(i.facets.clone()));
        }
        if let Some(categories) = &self.categories {
            raw.categories = Some(
                categories
                    .iter()
                    .map(|(id, c)| (self.item_name(*id).to_string(), c.clone()))
                    .collect(),
            );
        }
        raw.finish()
    }
}

/// The four facet dimensions (l, m, n, o).
pub fn facet_dims(dataset: &Dataset) -> (usize, usize, usize, usize) {
    dataset.dims.as_tuple()
}

type Occurrence = (String, u32, f64, Location);

/// Name-keyed records collected from facts before ids are assigned.
#[derive(Default)]
struct Raw {
    containers: BTreeMap<String, Option<Vec<f64>>>,
    objects: BTreeMap<String, (String, Location, Option<Vec<f64>>)>,
    transactions: BTreeMap<String, (String, Location, Option<Vec<f64>>)>,
    occurrences: BTreeMap<String, Vec<Occurrence>>,
    items: BTreeMap<String, Option<Vec<f64>>>,
    dims: FacetDims,
    labels: BTreeMap<FacetRef, String>,
    categories: Option<BTreeMap<String, BTreeSet<String>>>,
}

fn arity(fact: &Fact, expected: usize) -> Result<(), DatasetError> {
    if fact.args.len() == expected {
        Ok(())
    } else {
        Err(DatasetError::Arity {
            predicate: fact.predicate.clone(),
            expected: expected.to_string(),
            found: fact.args.len(),
            at: fact.location,
        })
    }
}

fn number(fact: &Fact, position: usize) -> Result<f64, DatasetError> {
    fact.args[position].as_f64().ok_or(DatasetError::NotNumeric {
        predicate: fact.predicate.clone(),
        position: position + 1,
        at: fact.location,
    })
}

/// Builds a validated [`Dataset`] from parsed facts.
pub fn assemble_dataset(facts: &FactSet) -> Result<Dataset, DatasetError> {
    let mut raw = Raw::default();

    for fact in facts.get("container") {
        arity(fact, 1)?;
        let name = fact.args[0].symbol();
        if raw.containers.insert(name.clone(), None).is_some() {
            return Err(DatasetError::Duplicate {
                what: "container",
                name,
                at: fact.location,
            });
        }
    }
    for fact in facts.get("object") {
        arity(fact, 2)?;
        let (name, container) = (fact.args[0].symbol(), fact.args[1].symbol());
        if !raw.containers.contains_key(&container) {
            return Err(DatasetError::Dangling {
                what: "object",
                name,
                target_kind: "container",
                target: container,
                at: fact.location,
            });
        }
        if raw
            .objects
            .insert(name.clone(), (container, fact.location, None))
            .is_some()
        {
            return Err(DatasetError::Duplicate {
                what: "object",
                name,
                at: fact.location,
            });
        }
    }
    for fact in facts.get("transaction") {
        arity(fact, 2)?;
        let (name, object) = (fact.args[0].symbol(), fact.args[1].symbol());
        if !raw.objects.contains_key(&object) {
            return Err(DatasetError::Dangling {
                what: "transaction",
                name,
                target_kind: "object",
                target: object,
                at: fact.location,
            });
        }
        if raw
            .transactions
            .insert(name.clone(), (object, fact.location, None))
            .is_some()
        {
            return Err(DatasetError::Duplicate {
                what: "transaction",
                name,
                at: fact.location,
            });
        }
    }

    read_items(facts, &mut raw)?;

    raw.dims.item = read_vectors(facts, "itemUtilityVector", Level::Item, &mut raw.items, |r| r)?;
    raw.dims.transaction = read_vectors(
        facts,
        "transactionUtilityVector",
        Level::Transaction,
        &mut raw.transactions,
        |r| &mut r.2,
    )?;
    raw.dims.object = read_vectors(facts, "objectUtilityVector", Level::Object, &mut raw.objects, |r| &mut r.2)?;
    raw.dims.container = read_vectors(
        facts,
        "containerUtilityVector",
        Level::Container,
        &mut raw.containers,
        |r| r,
    )?;

    for fact in facts.get("itemCategory") {
        arity(fact, 2)?;
        let categories = raw.categories.get_or_insert_with(BTreeMap::new);
        categories
            .entry(fact.args[0].symbol())
            .or_default()
            .insert(fact.args[1].symbol());
    }

    for fact in facts.get("facetLabel") {
        arity(fact, 3)?;
        let bad = |reason: String| DatasetError::BadLabel {
            reason,
            at: fact.location,
        };
        let level: Level = fact.args[0].symbol().parse().map_err(bad)?;
        let index = fact.args[1]
            .as_i64()
            .filter(|i| *i >= 0)
            .ok_or_else(|| bad("index must be a non-negative integer".into()))? as usize;
        let facet = FacetRef::new(level, index);
        if index >= raw.dims.of(level) {
            return Err(bad(format!("{facet} is out of range")));
        }
        raw.labels.insert(facet, fact.args[2].symbol());
    }

    raw.finish()
}

fn read_items(facts: &FactSet, raw: &mut Raw) -> Result<(), DatasetError> {
    let item_facts = facts.get("item");
    let long = item_facts.iter().any(|f| f.args.len() == 4);
    let short = item_facts.iter().any(|f| f.args.len() == 2);
    if long && short {
        return Err(DatasetError::MixedItemForms);
    }
    for fact in item_facts {
        let (item, tx, position, quantity) = match fact.args.len() {
            4 => {
                let position = match fact.args[2] {
                    Term::Int(p) if p >= 1 && p <= u32::MAX as i64 => p as u32,
                    _ => return Err(DatasetError::BadPosition { at: fact.location }),
                };
                (fact.args[0].symbol(), fact.args[1].symbol(), Some(position), number(fact, 3)?)
            }
            2 => (fact.args[1].symbol(), fact.args[0].symbol(), None, 1.0),
            found => {
                return Err(DatasetError::Arity {
                    predicate: "item".into(),
                    expected: "2 or 4".into(),
                    found,
                    at: fact.location,
                })
            }
        };
        if !raw.transactions.contains_key(&tx) {
            return Err(DatasetError::Dangling {
                what: "item",
                name: item,
                target_kind: "transaction",
                target: tx,
                at: fact.location,
            });
        }
        let list = raw.occurrences.entry(tx.clone()).or_default();
        let position = position.unwrap_or(list.len() as u32 + 1);
        if list.iter().any(|o| o.1 == position) {
            return Err(DatasetError::DuplicatePosition {
                transaction: tx,
                position,
                at: fact.location,
            });
        }
        list.push((item.clone(), position, quantity, fact.location));
        raw.items.entry(item).or_insert(None);
    }
    Ok(())
}

/// Attaches the vectors of one level; returns the inferred facet count.
fn read_vectors<R>(
    facts: &FactSet,
    predicate: &str,
    level: Level,
    records: &mut BTreeMap<String, R>,
    slot: impl Fn(&mut R) -> &mut Option<Vec<f64>>,
) -> Result<usize, DatasetError> {
    let mut dim = None;
    for fact in facts.get(predicate) {
        if fact.args.is_empty() {
            return Err(DatasetError::Arity {
                predicate: predicate.into(),
                expected: "at least 1".into(),
                found: 0,
                at: fact.location,
            });
        }
        let name = fact.args[0].symbol();
        let values = (1..fact.args.len())
            .map(|i| number(fact, i))
            .collect::<Result<Vec<_>, _>>()?;
        let expected = *dim.get_or_insert(values.len());
        if values.len() != expected {
            return Err(DatasetError::VectorLength {
                level,
                name,
                expected,
                found: values.len(),
                at: fact.location,
            });
        }
        let record = records.get_mut(&name).ok_or_else(|| DatasetError::Dangling {
            what: "utility vector",
            name: name.clone(),
            target_kind: level_noun(level),
            target: name.clone(),
            at: fact.location,
        })?;
        let slot = slot(record);
        if slot.is_some() {
            return Err(DatasetError::Duplicate {
                what: "utility vector for",
                name,
                at: fact.location,
            });
        }
        *slot = Some(values);
    }
    Ok(dim.unwrap_or(0))
}

fn level_noun(level: Level) -> &'static str {
    match level {
        Level::Item => "item",
        Level::Transaction => "transaction",
        Level::Object => "object",
        Level::Container => "container",
    }
}

fn take_vector(
    values: Option<Vec<f64>>,
    level: Level,
    name: &str,
    dims: FacetDims,
) -> Result<Vec<f64>, DatasetError> {
    let expected = dims.of(level);
    match values {
        Some(v) => Ok(v),
        None if expected == 0 => Ok(Vec::new()),
        None => Err(DatasetError::MissingVector {
            level,
            name: name.to_string(),
            expected,
        }),
    }
}

impl Raw {
    fn finish(self) -> Result<Dataset, DatasetError> {
        let dims = self.dims;
        if self.transactions.is_empty() {
            return Err(DatasetError::NoTransactions);
        }

        let container_ids: BTreeMap<&str, ContainerId> = self
            .containers
            .keys()
            .enumerate()
            .map(|(i, n)| (n.as_str(), ContainerId(i as u32)))
            .collect();
        let object_ids: BTreeMap<&str, ObjectId> = self
            .objects
            .keys()
            .enumerate()
            .map(|(i, n)| (n.as_str(), ObjectId(i as u32)))
            .collect();
        let item_ids: BTreeMap<&str, ItemId> = self
            .items
            .keys()
            .enumerate()
            .map(|(i, n)| (n.as_str(), ItemId(i as u32)))
            .collect();

        let mut containers = Vec::with_capacity(self.containers.len());
        for (i, (name, facets)) in self.containers.iter().enumerate() {
            containers.push(ContainerRec {
                id: ContainerId(i as u32),
                name: name.clone(),
                facets: take_vector(facets.clone(), Level::Container, name, dims)?,
                objects: Vec::new(),
            });
        }
        let mut objects = Vec::with_capacity(self.objects.len());
        for (i, (name, (container, _, facets))) in self.objects.iter().enumerate() {
            let id = ObjectId(i as u32);
            let container = container_ids[container.as_str()];
            containers[container.index()].objects.push(id);
            objects.push(ObjectRec {
                id,
                name: name.clone(),
                container,
                facets: take_vector(facets.clone(), Level::Object, name, dims)?,
                transactions: Vec::new(),
            });
        }
        let mut items = Vec::with_capacity(self.items.len());
        for (i, (name, facets)) in self.items.iter().enumerate() {
            items.push(ItemRec {
                id: ItemId(i as u32),
                name: name.clone(),
                facets: take_vector(facets.clone(), Level::Item, name, dims)?,
            });
        }

        let mut transactions = Vec::with_capacity(self.transactions.len());
        let mut tid_lists = vec![Vec::new(); items.len()];
        for (i, (name, (object, _, facets))) in self.transactions.iter().enumerate() {
            let id = TransactionId(i as u32);
            let object = object_ids[object.as_str()];
            objects[object.index()].transactions.push(id);
            let mut occurrences: Vec<ItemOccurrence> = self
                .occurrences
                .get(name)
                .into_iter()
                .flatten()
                .map(|(item, position, quantity, _)| ItemOccurrence {
                    item: item_ids[item.as_str()],
                    position: *position,
                    quantity: *quantity,
                })
                .collect();
            occurrences.sort_by_key(|o| o.position);
            let mut distinct: Vec<ItemId> = occurrences.iter().map(|o| o.item).collect();
            distinct.sort_unstable();
            distinct.dedup();
            for item in &distinct {
                tid_lists[item.index()].push(id);
            }
            transactions.push(Transaction {
                id,
                name: name.clone(),
                object,
                occurrences,
                facets: take_vector(facets.clone(), Level::Transaction, name, dims)?,
                items: distinct,
            });
        }

        let categories = self.categories.map(|map| {
            map.into_iter()
                .filter_map(|(name, cats)| item_ids.get(name.as_str()).map(|id| (*id, cats)))
                .collect()
        });

        Ok(Dataset {
            items,
            transactions,
            objects,
            containers,
            dims,
            labels: self.labels,
            categories,
            tid_lists,
        })
    }
}
