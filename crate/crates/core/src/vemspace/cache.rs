//! Process-wide caches of one-dimensional and triangle rules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::polyquad::{gauss_legendre, gauss_lobatto, triangle_quadrature, GaussLobattoRule, GaussRule, QuadRule};

fn cached<T>(table: &'static OnceLock<Mutex<HashMap<usize, Arc<T>>>>, key: usize, make: impl FnOnce() -> T) -> Arc<T> {
    let map = table.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = map.lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let rule = Arc::new(make());
    Arc::clone(map.lock().unwrap().entry(key).or_insert(rule))
}

pub fn lobatto(p: usize) -> Arc<GaussLobattoRule> {
    static T: OnceLock<Mutex<HashMap<usize, Arc<GaussLobattoRule>>>> = OnceLock::new();
    cached(&T, p, || gauss_lobatto(p))
}

pub fn legendre(n: usize) -> Arc<GaussRule> {
    static T: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    cached(&T, n, || gauss_legendre(n))
}

pub fn triangle(order: usize) -> Arc<QuadRule> {
    static T: OnceLock<Mutex<HashMap<usize, Arc<QuadRule>>>> = OnceLock::new();
    cached(&T, order, || triangle_quadrature(order))
}
