use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::syntax::Language;

/// A finite model: universe `{0, …, size-1}` and one bit table per symbol.
///
/// The table of a rank-`r` symbol has `size^r` bits; tuple `(a0, …, a{r-1})`
/// sits at index `Σ ai·size^(r-1-i)`, so bit order is lexicographic tuple order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteModel {
    lang: Arc<Language>,
    size: usize,
    tables: Vec<Vec<u64>>,
}

pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64).max(1)
}

impl FiniteModel {
    /// The model of the given size with every relation empty (constants false).
    pub fn empty(lang: Arc<Language>, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidModel("universes are non-empty".into()));
        }
        let tables = lang
            .symbols()
            .map(|(_, r)| {
                let bits = checked_pow(size, r)?;
                Ok(vec![0u64; words_for(bits)])
            })
            .collect::<Result<_>>()?;
        Ok(FiniteModel { lang, size, tables })
    }

    /// Builds a model from a flat interpretation code: the tables of all
    /// symbols (alphabetical) concatenated, lowest bit first.
    pub(crate) fn from_code(lang: Arc<Language>, size: usize, code: u64) -> Self {
        let mut tables = Vec::with_capacity(lang.symbol_count());
        let mut offset = 0;
        for (_, r) in lang.symbols() {
            let bits = size.pow(r as u32);
            let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
            tables.push(vec![(code >> offset) & mask]);
            offset += bits;
        }
        FiniteModel { lang, size, tables }
    }

    pub fn lang(&self) -> &Arc<Language> {
        &self.lang
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub(crate) fn table(&self, index: usize) -> &[u64] {
        &self.tables[index]
    }

    pub(crate) fn tables(&self) -> &[Vec<u64>] {
        &self.tables
    }

    fn symbol_index(&self, symbol: &str) -> Result<(usize, usize)> {
        self.lang
            .symbols()
            .enumerate()
            .find(|(_, (s, _))| *s == symbol)
            .map(|(i, (_, r))| (i, r))
            .ok_or_else(|| Error::UnknownSymbol {
                name: symbol.into(),
                pos: Default::default(),
            })
    }

    fn tuple_index(&self, rank: usize, tuple: &[usize], symbol: &str) -> Result<usize> {
        if tuple.len() != rank {
            return Err(Error::InvalidModel(format!(
                "`{symbol}` has rank {rank}, got a {}-tuple",
                tuple.len()
            )));
        }
        let mut idx = 0;
        for &a in tuple {
            if a >= self.size {
                return Err(Error::InvalidModel(format!(
                    "element {a} outside universe of size {}",
                    self.size
                )));
            }
            idx = idx * self.size + a;
        }
        Ok(idx)
    }

    pub fn holds(&self, symbol: &str, tuple: &[usize]) -> Result<bool> {
        let (s, r) = self.symbol_index(symbol)?;
        let idx = self.tuple_index(r, tuple, symbol)?;
        Ok(get_bit(&self.tables[s], idx))
    }

    pub fn set(&mut self, symbol: &str, tuple: &[usize], value: bool) -> Result<()> {
        let (s, r) = self.symbol_index(symbol)?;
        let idx = self.tuple_index(r, tuple, symbol)?;
        set_bit(&mut self.tables[s], idx, value);
        Ok(())
    }

    /// Tuples in the interpretation of `symbol`, in lexicographic order.
    pub fn tuples(&self, symbol: &str) -> Result<Vec<Vec<usize>>> {
        let (s, r) = self.symbol_index(symbol)?;
        let total = self.size.pow(r as u32);
        Ok((0..total)
            .filter(|&i| get_bit(&self.tables[s], i))
            .map(|i| decode_tuple(i, r, self.size))
            .collect())
    }

    /// The same model viewed in a larger language; new symbols start empty.
    pub fn expand(&self, lang: Arc<Language>) -> Result<FiniteModel> {
        if !lang.includes(&self.lang) {
            return Err(Error::LanguageMismatch(format!(
                "{} does not include {}",
                lang.name(),
                self.lang.name()
            )));
        }
        let mut out = FiniteModel::empty(lang, self.size)?;
        let ours: BTreeMap<&str, &Vec<u64>> = self
            .lang
            .symbols()
            .map(|(s, _)| s)
            .zip(&self.tables)
            .collect();
        let names: Vec<String> = out.lang.symbols().map(|(s, _)| s.to_string()).collect();
        for (i, name) in names.iter().enumerate() {
            if let Some(t) = ours.get(name.as_str()) {
                out.tables[i] = (*t).clone();
            }
        }
        Ok(out)
    }

    /// Forgets every symbol not in `lang` (which must be included in ours).
    pub fn reduct(&self, lang: Arc<Language>) -> Result<FiniteModel> {
        if !self.lang.includes(&lang) {
            return Err(Error::LanguageMismatch(format!(
                "{} is not a sublanguage of {}",
                lang.name(),
                self.lang.name()
            )));
        }
        let ours: BTreeMap<&str, &Vec<u64>> = self
            .lang
            .symbols()
            .map(|(s, _)| s)
            .zip(&self.tables)
            .collect();
        let tables = lang
            .symbols()
            .map(|(s, _)| ours[s].clone())
            .collect();
        Ok(FiniteModel {
            lang,
            size: self.size,
            tables,
        })
    }

    /// The isomorphic copy in which element `a` becomes `perm[a]`.
    pub fn permute(&self, perm: &[usize]) -> FiniteModel {
        assert_eq!(perm.len(), self.size, "permutation length");
        let k = self.size;
        let tables = self
            .lang
            .symbols()
            .zip(&self.tables)
            .map(|((_, r), t)| {
                let total = k.pow(r as u32);
                let mut out = vec![0u64; t.len()];
                for i in 0..total {
                    if get_bit(t, i) {
                        let mut j = 0;
                        let mut rest = i;
                        let mut place = 1;
                        for _ in 0..r {
                            j += perm[rest % k] * place;
                            rest /= k;
                            place *= k;
                        }
                        set_bit(&mut out, j, true);
                    }
                }
                out
            })
            .collect();
        FiniteModel {
            lang: self.lang.clone(),
            size: k,
            tables,
        }
    }

    /// Model JSON: `{"size":k,"interp":{"R":[[0,1]],"P":true}}`.
    pub fn to_json(&self) -> Value {
        let mut interp = Map::new();
        for ((s, r), t) in self.lang.symbols().zip(&self.tables) {
            let v = if r == 0 {
                Value::Bool(get_bit(t, 0))
            } else {
                let total = self.size.pow(r as u32);
                Value::Array(
                    (0..total)
                        .filter(|&i| get_bit(t, i))
                        .map(|i| json!(decode_tuple(i, r, self.size)))
                        .collect(),
                )
            };
            interp.insert(s.to_string(), v);
        }
        json!({ "size": self.size, "interp": interp })
    }

    pub fn from_json(value: &Value, lang: Arc<Language>) -> Result<FiniteModel> {
        let bad = |msg: String| Error::InvalidModel(msg);
        let size = value
            .get("size")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing or non-integer `size`".into()))? as usize;
        let interp = value
            .get("interp")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing `interp` object".into()))?;
        let mut m = FiniteModel::empty(lang.clone(), size)?;
        for key in interp.keys() {
            if lang.rank(key).is_none() {
                return Err(Error::UnknownSymbol {
                    name: key.clone(),
                    pos: Default::default(),
                });
            }
        }
        for (s, r) in lang.symbols() {
            let v = interp
                .get(s)
                .ok_or_else(|| bad(format!("symbol `{s}` is not interpreted")))?;
            if r == 0 {
                let b = v
                    .as_bool()
                    .ok_or_else(|| bad(format!("`{s}` has rank 0 and needs true/false")))?;
                m.set(s, &[], b)?;
                continue;
            }
            let rows = v
                .as_array()
                .ok_or_else(|| bad(format!("`{s}` needs a list of tuples")))?;
            for row in rows {
                let tuple = row
                    .as_array()
                    .and_then(|xs| xs.iter().map(|x| x.as_u64().map(|x| x as usize)).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| bad(format!("bad tuple {row} for `{s}`")))?;
                m.set(s, &tuple, true)?;
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

pub(crate) fn set_bit(words: &mut [u64], i: usize, value: bool) {
    if value {
        words[i / 64] |= 1 << (i % 64);
    } else {
        words[i / 64] &= !(1 << (i % 64));
    }
}

pub(crate) fn decode_tuple(mut index: usize, rank: usize, size: usize) -> Vec<usize> {
    let mut t = vec![0; rank];
    for slot in t.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
    t
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    base.checked_pow(exp as u32)
        .filter(|&v| v <= 1 << 26)
        .ok_or_else(|| Error::CapExceeded(format!("{base}^{exp} tuples is too many")))
}
