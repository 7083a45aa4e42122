//! Interned identifiers. Variables and names share one string table but are
//! distinct types; the table index doubles as creation order.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{OnceLock, RwLock};

#[derive(Default)]
struct Interner {
    strings: Vec<String>,
    ids: HashMap<String, u32>,
}

fn table() -> &'static RwLock<Interner> {
    static TABLE: OnceLock<RwLock<Interner>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

static FRESH: AtomicU64 = AtomicU64::new(0);

fn intern(s: &str) -> u32 {
    if let Some(&id) = table().read().unwrap().ids.get(s) {
        return id;
    }
    let mut t = table().write().unwrap();
    if let Some(&id) = t.ids.get(s) {
        return id;
    }
    let id = t.strings.len() as u32;
    t.strings.push(s.to_string());
    t.ids.insert(s.to_string(), id);
    id
}

fn lookup(id: u32) -> String {
    table().read().unwrap().strings[id as usize].clone()
}

fn fresh_from(id: u32) -> u32 {
    let base = lookup(id);
    let stem = match base.rfind('_') {
        Some(k) if k > 0 && base[k + 1..].chars().all(|c| c.is_ascii_digit()) && k + 1 < base.len() => &base[..k],
        _ => base.as_str(),
    };
    loop {
        let n = FRESH.fetch_add(1, Ordering::Relaxed);
        let cand = format!("{stem}_{n}");
        let mut t = table().write().unwrap();
        if !t.ids.contains_key(&cand) {
            let id = t.strings.len() as u32;
            t.strings.push(cand.clone());
            t.ids.insert(cand, id);
            return id;
        }
    }
}

macro_rules! ident_type {
    ($(#[$m:meta])* $ty:ident) => {
        $(#[$m])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $ty(u32);

        impl $ty {
            pub fn new(s: &str) -> Self {
                $ty(intern(s))
            }

            /// A never-before-seen identifier derived from this one.
            pub fn fresh(&self) -> Self {
                $ty(fresh_from(self.0))
            }

            pub fn as_string(&self) -> String {
                lookup(self.0)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&lookup(self.0))
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&lookup(self.0))
            }
        }
    };
}

ident_type!(
    /// A name `a` labelling choices; bound by `nu`. Ordered by creation.
    Name
);
ident_type!(
    /// A term variable.
    Var
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_injective() {
        assert_eq!(Name::new("a"), Name::new("a"));
        assert_ne!(Name::new("a"), Name::new("b"));
        assert_eq!(Name::new("qq").as_string(), "qq");
    }

    #[test]
    fn fresh_is_new() {
        let x = Var::new("x_3");
        let y = x.fresh();
        assert_ne!(x, y);
        assert!(y.as_string().starts_with("x_"));
    }
}
