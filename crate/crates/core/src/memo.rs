//! Process-wide memo tables for immutable per-grid data.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Result;

pub(crate) type Memo<K, T> = OnceLock<Mutex<HashMap<K, Arc<T>>>>;

/// Return the cached value for `key`, building it outside the lock on a miss.
///
/// Two threads that miss together both build; the first insert wins and both
/// return the same `Arc`. Builds are deterministic, so this is harmless.
pub(crate) fn memoize<K, T>(memo: &Memo<K, T>, key: K, build: impl FnOnce() -> Result<T>) -> Result<Arc<T>>
where
    K: Eq + Hash + Clone,
{
    let map = memo.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("memo lock poisoned").get(&key) {
        return Ok(Arc::clone(v));
    }
    let built = Arc::new(build()?);
    let mut guard = map.lock().expect("memo lock poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}
