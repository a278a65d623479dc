//! Name-keyed registries for interchangeable strategies.
//!
//! Samplers, eigensolvers and experiment campaigns are each exposed behind a
//! trait object. A [`Registry`] maps a stable name to a factory so the
//! strategy can be picked from a config file or the command line.

use std::fmt;

/// Factory producing a boxed strategy from shared options.
pub type Factory<T, O> = Box<dyn Fn(&O) -> Box<T> + Send + Sync>;

pub struct Registry<T: ?Sized, O> {
    kind: &'static str,
    entries: Vec<(String, Factory<T, O>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownName {
    pub kind: &'static str,
    pub name: String,
    pub known: Vec<String>,
}

impl fmt::Display for UnknownName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown {} '{}' (known: {})",
            self.kind,
            self.name,
            self.known.join(", ")
        )
    }
}

impl std::error::Error for UnknownName {}

impl<T: ?Sized, O> Registry<T, O> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, entries: Vec::new() }
    }

    /// Registers `factory` under `name`, replacing any previous entry.
    pub fn register<F>(&mut self, name: &str, factory: F) -> &mut Self
    where
        F: Fn(&O) -> Box<T> + Send + Sync + 'static,
    {
        self.entries.retain(|(n, _)| n != name);
        self.entries.push((name.to_string(), Box::new(factory)));
        self
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    pub fn build(&self, name: &str, options: &O) -> Result<Box<T>, UnknownName> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f(options))
            .ok_or_else(|| UnknownName {
                kind: self.kind,
                name: name.to_string(),
                known: self.names(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter {
        fn greet(&self) -> String;
    }
    struct Plain(String);
    impl Greeter for Plain {
        fn greet(&self) -> String {
            self.0.clone()
        }
    }

    #[test]
    fn build_by_name_and_replace() {
        let mut reg: Registry<dyn Greeter, String> = Registry::new("greeter");
        reg.register("a", |o: &String| Box::new(Plain(format!("a:{o}"))));
        reg.register("b", |_: &String| Box::new(Plain("b".into())));
        assert_eq!(reg.build("a", &"x".to_string()).unwrap().greet(), "a:x");
        reg.register("a", |_: &String| Box::new(Plain("a2".into())));
        assert_eq!(reg.names(), vec!["b".to_string(), "a".to_string()]);
        assert_eq!(reg.build("a", &String::new()).unwrap().greet(), "a2");
        let err = reg.build("zzz", &String::new()).err().unwrap();
        assert!(err.to_string().contains("unknown greeter 'zzz'"));
    }
}
