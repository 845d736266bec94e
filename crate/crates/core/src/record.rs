use std::fmt;

/// Largest key a caller may insert or delete.
///
/// Keys occupy 31 bits; the all-ones value is reserved for placebo padding
/// records written by cleanup, so user keys stop one short of it.
pub const MAX_ORIGINAL_KEY: u32 = (1 << 31) - 2;

/// Reserved key used by cleanup's placebo padding records.
pub const PLACEBO_KEY: u32 = (1 << 31) - 1;

/// A 32-bit packed key: the 31-bit original key shifted left once, with the
/// least significant bit holding the status (1 = regular, 0 = tombstone).
///
/// Packing the status into the LSB makes a plain sort on the packed value
/// place a tombstone before a regular record with the same key.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KeyVariable(u32);

impl KeyVariable {
    pub fn regular(key: u32) -> Self {
        debug_assert!(key <= PLACEBO_KEY);
        KeyVariable((key << 1) | 1)
    }

    pub fn tombstone(key: u32) -> Self {
        debug_assert!(key <= PLACEBO_KEY);
        KeyVariable(key << 1)
    }

    pub fn from_packed(packed: u32) -> Self {
        KeyVariable(packed)
    }

    pub fn packed(self) -> u32 {
        self.0
    }

    pub fn original_key(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_regular(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_tombstone(self) -> bool {
        !self.is_regular()
    }
}

impl fmt::Debug for KeyVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.is_regular() { 'R' } else { 'T' };
        write!(f, "{}:{}", self.original_key(), status)
    }
}

/// A key variable plus its 32-bit value; the unit stored in every level.
/// Tombstones carry value 0.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Record {
    pub key: KeyVariable,
    pub value: u32,
}

impl Record {
    pub fn regular(key: u32, value: u32) -> Self {
        Record {
            key: KeyVariable::regular(key),
            value,
        }
    }

    pub fn tombstone(key: u32) -> Self {
        Record {
            key: KeyVariable::tombstone(key),
            value: 0,
        }
    }

    /// Padding record appended by cleanup: tombstone status with the
    /// reserved maximum key, so it sorts last and stays invisible to queries.
    pub fn placebo() -> Self {
        Record::tombstone(PLACEBO_KEY)
    }

    pub fn is_placebo(self) -> bool {
        self.key.is_tombstone() && self.original_key() == PLACEBO_KEY
    }

    pub fn original_key(self) -> u32 {
        self.key.original_key()
    }
}

impl fmt::Debug for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}", self.key, self.value)
    }
}
