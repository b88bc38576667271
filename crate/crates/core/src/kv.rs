//! Flat `key = value` text documents.
//!
//! One entry per line, `#` starts a comment, blank lines are ignored. Keys
//! may carry 1-based indices in brackets (`f[1][2]`). Consumers take the
//! keys they understand and then call [`KvDocument::finish`], which rejects
//! whatever is left over.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ParseError {
    pub fn new(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            line,
            key: key.map(str::to_owned),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(line), Some(key)) => write!(f, "line {line}, key `{key}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(key)) => write!(f, "key `{key}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KvEntry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl KvEntry {
    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(Some(self.line), Some(&self.key), message)
    }

    pub fn parse_f64(&self) -> Result<f64, ParseError> {
        let v: f64 = self
            .value
            .parse()
            .map_err(|_| self.error(format!("expected a number, found `{}`", self.value)))?;
        if !v.is_finite() {
            return Err(self.error("value must be finite"));
        }
        Ok(v)
    }

    pub fn parse_usize(&self) -> Result<usize, ParseError> {
        self.value
            .parse()
            .map_err(|_| self.error(format!("expected a non-negative integer, found `{}`", self.value)))
    }
}

/// Splits `name[1][2]` into `("name", [1, 2])`. Plain keys yield no indices.
pub fn split_indexed(key: &str) -> Option<(&str, Vec<usize>)> {
    let Some(open) = key.find('[') else {
        return Some((key, Vec::new()));
    };
    let (base, mut rest) = key.split_at(open);
    let mut indices = Vec::new();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('[')?;
        let close = inner.find(']')?;
        indices.push(inner[..close].trim().parse().ok()?);
        rest = &inner[close + 1..];
    }
    Some((base, indices))
}

#[derive(Debug, Clone)]
pub struct KvDocument {
    entries: Vec<KvEntry>,
    consumed: Vec<bool>,
}

impl KvDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut entries: Vec<KvEntry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ParseError::new(Some(line), None, "expected `key = value`"));
            };
            let key: String = key.chars().filter(|c| !c.is_whitespace()).collect();
            if key.is_empty() {
                return Err(ParseError::new(Some(line), None, "empty key"));
            }
            if split_indexed(&key).is_none() {
                return Err(ParseError::new(Some(line), Some(&key), "malformed index brackets"));
            }
            if let Some(prev) = entries.iter().find(|e| e.key == key) {
                return Err(ParseError::new(
                    Some(line),
                    Some(&key),
                    format!("duplicate key (first defined on line {})", prev.line),
                ));
            }
            entries.push(KvEntry {
                line,
                key,
                value: value.trim().to_owned(),
            });
        }
        let consumed = vec![false; entries.len()];
        Ok(Self { entries, consumed })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    /// Marks `key` as consumed and returns its entry.
    pub fn take(&mut self, key: &str) -> Option<KvEntry> {
        let idx = self.entries.iter().position(|e| e.key == key)?;
        self.consumed[idx] = true;
        Some(self.entries[idx].clone())
    }

    pub fn require(&mut self, key: &str) -> Result<KvEntry, ParseError> {
        self.take(key)
            .ok_or_else(|| ParseError::new(None, Some(key), "missing required key"))
    }

    /// Takes every entry whose base name is `base` and which carries at
    /// least one index, returning the parsed indices alongside.
    pub fn take_indexed(&mut self, base: &str) -> Vec<(Vec<usize>, KvEntry)> {
        let mut out = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if let Some((b, idx)) = split_indexed(&e.key) {
                if b == base && !idx.is_empty() {
                    self.consumed[i] = true;
                    out.push((idx, e.clone()));
                }
            }
        }
        out
    }

    /// Rejects the first entry nobody consumed.
    pub fn finish(&self) -> Result<(), ParseError> {
        match self.consumed.iter().position(|c| !c) {
            Some(i) => Err(self.entries[i].error("unknown key")),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_indices() {
        let mut doc = KvDocument::parse("# header\n a = 1 \nf[1][2] = 0.5 # trailing\n\n").unwrap();
        assert_eq!(doc.take("a").unwrap().value, "1");
        let idx = doc.take_indexed("f");
        assert_eq!(idx.len(), 1);
        assert_eq!(idx[0].0, vec![1, 2]);
        assert_eq!(idx[0].1.line, 3);
        doc.finish().unwrap();
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let doc = KvDocument::parse("a = 1\nb = 2\n").unwrap();
        let err = doc.finish().unwrap_err();
        assert_eq!(err.line, Some(1));

        let err = KvDocument::parse("a = 1\na = 2\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(KvDocument::parse("just words\n").is_err());
        assert!(KvDocument::parse("f[1 = 2\n").is_err());
        assert!(KvDocument::parse("f[x] = 2\n").is_err());
    }

    #[test]
    fn split_indexed_forms() {
        assert_eq!(split_indexed("J"), Some(("J", vec![])));
        assert_eq!(split_indexed("q0[2][1]"), Some(("q0", vec![2, 1])));
        assert_eq!(split_indexed("eps[3]"), Some(("eps", vec![3])));
        assert_eq!(split_indexed("eps[3"), None);
    }
}
