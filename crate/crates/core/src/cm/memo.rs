//! Process-wide get-or-compute tables for class numbers.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::Discriminant;
use crate::bqf::{class_number_imag, class_number_real, RealClassNumbers};
use crate::error::Result;
use crate::numfield::{classgroup::class_group, ClassGroup, QuarticField};

/// A map where each key is computed at most once; concurrent callers for the
/// same key wait on the first computation. Failures are not stored.
pub struct Memo<K, V> {
    slots: Mutex<HashMap<K, Arc<Mutex<Option<V>>>>>,
}

impl<K: Eq + Hash + Clone, V: Clone> Default for Memo<K, V> {
    fn default() -> Self {
        Memo { slots: Mutex::new(HashMap::new()) }
    }
}

impl<K: Eq + Hash + Clone, V: Clone> Memo<K, V> {
    pub fn get_or_compute(&self, key: &K, compute: impl FnOnce() -> Result<V>) -> Result<V> {
        let slot = {
            let mut map = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            map.entry(key.clone()).or_default().clone()
        };
        let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = guard.as_ref() {
            return Ok(v.clone());
        }
        let v = compute()?;
        *guard = Some(v.clone());
        Ok(v)
    }

    pub fn len(&self) -> usize {
        let map = self.slots.lock().unwrap_or_else(|e| e.into_inner());
        map.values().filter(|s| s.lock().map(|g| g.is_some()).unwrap_or(false)).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn imag_table() -> &'static Memo<i64, u64> {
    static T: OnceLock<Memo<i64, u64>> = OnceLock::new();
    T.get_or_init(Memo::default)
}

fn real_table() -> &'static Memo<i64, RealClassNumbers> {
    static T: OnceLock<Memo<i64, RealClassNumbers>> = OnceLock::new();
    T.get_or_init(Memo::default)
}

type QuarticKey = (u64, String);

fn quartic_table() -> &'static Memo<QuarticKey, Arc<ClassGroup>> {
    static T: OnceLock<Memo<QuarticKey, Arc<ClassGroup>>> = OnceLock::new();
    T.get_or_init(Memo::default)
}

pub fn h_imag(d: &Discriminant) -> Result<u64> {
    match d.as_i64() {
        Some(key) => imag_table().get_or_compute(&key, || class_number_imag(d)),
        None => class_number_imag(d),
    }
}

pub fn h_real(d: &Discriminant) -> Result<RealClassNumbers> {
    match d.as_i64() {
        Some(key) => real_table().get_or_compute(&key, || class_number_real(d)),
        None => class_number_real(d),
    }
}

pub fn quartic_class_group(qf: &QuarticField) -> Result<Arc<ClassGroup>> {
    let key = (qf.order.ring.m, format!("{},{}", qf.rho.a, qf.rho.b));
    quartic_table().get_or_compute(&key, || class_group(qf).map(Arc::new))
}
