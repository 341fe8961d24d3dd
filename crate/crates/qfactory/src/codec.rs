//! Binary encoding of keys, trapdoors and images.
//!
//! Integers are little-endian. A `ℤ_q` entry takes `⌈k/8⌉` bytes.

use qfactory_core::constructions::toy::{BitMatrix, PermutationTable};
use qfactory_core::constructions::{FromBijKey, FromBijTrapdoor, FromInjKey, FromInjTrapdoor};
use qfactory_core::mp12::{Mp12Key, Mp12Trapdoor};
use qfactory_core::params::{LweParams, Rational};
use qfactory_core::protocol::{FamilyId, Image, PublicKey, Trapdoor};
use qfactory_core::reg2::{Reg2Key, Reg2Trapdoor};
use qfactory_core::zq::{Modulus, SignedMatrix, SignedVector, ZqMatrix, ZqVector};

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("input ended early while reading {0}")]
    Truncated(&'static str),
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("invalid {0}")]
    Invalid(&'static str),
    #[error(transparent)]
    Core(#[from] qfactory_core::Error),
}

pub type CodecResult<T> = Result<T, CodecError>;

/// Upper bound on any decoded length, to keep hostile input from allocating.
const MAX_LEN: u64 = 1 << 26;

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u128(&mut self, v: u128) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn i64(&mut self, v: i64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn i128(&mut self, v: i128) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    pub fn len_prefixed(&mut self, v: &[u8]) {
        self.u64(v.len() as u64);
        self.bytes(v);
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    pub fn take(&mut self, n: usize, what: &'static str) -> CodecResult<&'a [u8]> {
        if self.buf.len() < n {
            return Err(CodecError::Truncated(what));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn array<const N: usize>(&mut self, what: &'static str) -> CodecResult<[u8; N]> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }

    pub fn u8(&mut self, what: &'static str) -> CodecResult<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub fn u32(&mut self, what: &'static str) -> CodecResult<u32> {
        Ok(u32::from_le_bytes(self.array(what)?))
    }

    pub fn u64(&mut self, what: &'static str) -> CodecResult<u64> {
        Ok(u64::from_le_bytes(self.array(what)?))
    }

    pub fn u128(&mut self, what: &'static str) -> CodecResult<u128> {
        Ok(u128::from_le_bytes(self.array(what)?))
    }

    pub fn i64(&mut self, what: &'static str) -> CodecResult<i64> {
        Ok(i64::from_le_bytes(self.array(what)?))
    }

    pub fn i128(&mut self, what: &'static str) -> CodecResult<i128> {
        Ok(i128::from_le_bytes(self.array(what)?))
    }

    /// A length field, bounded by [`MAX_LEN`].
    pub fn len(&mut self, what: &'static str) -> CodecResult<usize> {
        let n = self.u64(what)?;
        if n > MAX_LEN {
            return Err(CodecError::Invalid(what));
        }
        Ok(n as usize)
    }

    pub fn len_prefixed(&mut self, what: &'static str) -> CodecResult<&'a [u8]> {
        let n = self.len(what)?;
        self.take(n, what)
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn finish(self) -> CodecResult<()> {
        match self.buf.len() {
            0 => Ok(()),
            n => Err(CodecError::Trailing(n)),
        }
    }
}

fn limb_bytes(m: Modulus) -> usize {
    m.log_q().div_ceil(8) as usize
}

fn put_limb(w: &mut Writer, v: u128, m: Modulus) {
    w.bytes(&v.to_le_bytes()[..limb_bytes(m)]);
}

fn get_limb(r: &mut Reader<'_>, m: Modulus) -> CodecResult<u128> {
    let mut bytes = [0u8; 16];
    let n = limb_bytes(m);
    bytes[..n].copy_from_slice(r.take(n, "Z_q entry")?);
    let v = u128::from_le_bytes(bytes);
    if v != m.reduce(v) {
        return Err(CodecError::Invalid("Z_q entry"));
    }
    Ok(v)
}

fn put_modulus(w: &mut Writer, m: Modulus) {
    w.u8(m.log_q() as u8);
}

fn get_modulus(r: &mut Reader<'_>) -> CodecResult<Modulus> {
    Ok(Modulus::new(u32::from(r.u8("modulus")?))?)
}

pub fn put_vector(w: &mut Writer, v: &ZqVector) {
    put_modulus(w, v.modulus());
    w.u64(v.len() as u64);
    for &x in v.entries() {
        put_limb(w, x, v.modulus());
    }
}

pub fn get_vector(r: &mut Reader<'_>) -> CodecResult<ZqVector> {
    let m = get_modulus(r)?;
    let len = r.len("vector length")?;
    let entries = (0..len)
        .map(|_| get_limb(r, m))
        .collect::<CodecResult<_>>()?;
    Ok(ZqVector::from_entries(entries, m))
}

pub fn put_matrix(w: &mut Writer, a: &ZqMatrix) {
    put_modulus(w, a.modulus());
    let (rows, cols) = a.dims();
    w.u64(rows as u64);
    w.u64(cols as u64);
    for &x in a.entries() {
        put_limb(w, x, a.modulus());
    }
}

pub fn get_matrix(r: &mut Reader<'_>) -> CodecResult<ZqMatrix> {
    let m = get_modulus(r)?;
    let rows = r.len("matrix rows")?;
    let cols = r.len("matrix cols")?;
    let count = rows
        .checked_mul(cols)
        .filter(|&c| c as u64 <= MAX_LEN)
        .ok_or(CodecError::Invalid("matrix size"))?;
    let entries = (0..count)
        .map(|_| get_limb(r, m))
        .collect::<CodecResult<_>>()?;
    Ok(ZqMatrix::from_entries(rows, cols, entries, m)?)
}

fn put_signed_vector(w: &mut Writer, v: &SignedVector) {
    w.u64(v.len() as u64);
    for &x in v.entries() {
        w.i128(x);
    }
}

fn get_signed_vector(r: &mut Reader<'_>) -> CodecResult<SignedVector> {
    let len = r.len("signed vector length")?;
    let entries = (0..len)
        .map(|_| r.i128("signed entry"))
        .collect::<CodecResult<_>>()?;
    Ok(SignedVector::new(entries))
}

fn put_signed_matrix(w: &mut Writer, a: &SignedMatrix) {
    w.u64(a.rows() as u64);
    w.u64(a.cols() as u64);
    for &x in a.entries() {
        w.i64(x);
    }
}

fn get_signed_matrix(r: &mut Reader<'_>) -> CodecResult<SignedMatrix> {
    let rows = r.len("matrix rows")?;
    let cols = r.len("matrix cols")?;
    let count = rows
        .checked_mul(cols)
        .filter(|&c| c as u64 <= MAX_LEN)
        .ok_or(CodecError::Invalid("matrix size"))?;
    let entries = (0..count)
        .map(|_| r.i64("signed entry"))
        .collect::<CodecResult<_>>()?;
    Ok(SignedMatrix::from_entries(rows, cols, entries)?)
}

fn put_params(w: &mut Writer, p: &LweParams) {
    w.u64(p.n as u64);
    w.u32(p.k);
    w.u64(p.mu);
    w.u128(p.mu_prime.num);
    w.u128(p.mu_prime.den);
}

fn get_params(r: &mut Reader<'_>) -> CodecResult<LweParams> {
    let n = r.len("n")?;
    let k = r.u32("k")?;
    let mu = r.u64("mu")?;
    let mu_prime = Rational::new(r.u128("mu'")?, r.u128("mu'")?)?;
    Ok(LweParams::from_parts(n, k, mu, mu_prime)?)
}

fn put_bit_matrix(w: &mut Writer, m: &BitMatrix) {
    w.u8(m.dim() as u8);
    for &row in m.rows() {
        w.u64(row);
    }
}

fn get_bit_matrix(r: &mut Reader<'_>) -> CodecResult<BitMatrix> {
    let dim = usize::from(r.u8("matrix dimension")?);
    let rows = (0..dim)
        .map(|_| r.u64("matrix row"))
        .collect::<CodecResult<_>>()?;
    Ok(BitMatrix::from_rows(dim, rows)?)
}

fn put_table(w: &mut Writer, t: &PermutationTable) {
    w.u64(t.as_slice().len() as u64);
    for &v in t.as_slice() {
        w.u32(v);
    }
}

fn get_table(r: &mut Reader<'_>) -> CodecResult<PermutationTable> {
    let len = r.len("table length")?;
    let table = (0..len)
        .map(|_| r.u32("table entry"))
        .collect::<CodecResult<_>>()?;
    Ok(PermutationTable::from_table(table)?)
}

pub fn put_public_key(w: &mut Writer, key: &PublicKey) {
    w.u8(key.family().code());
    match key {
        PublicKey::Reg2(k) => {
            put_params(w, k.params());
            put_matrix(w, k.lwe().matrix());
            put_vector(w, k.b0());
        }
        PublicKey::ToyLinear { register, key } => {
            w.u8(*register as u8);
            put_bit_matrix(w, &key.key);
            w.u64(key.shift_image);
        }
        PublicKey::ToyPerm { register, key } => {
            w.u8(*register as u8);
            put_table(w, &key.keys[0]);
            put_table(w, &key.keys[1]);
        }
    }
}

fn get_register(r: &mut Reader<'_>, family: FamilyId) -> CodecResult<usize> {
    let register = usize::from(r.u8("register")?);
    family.register_bits(register)?;
    Ok(register)
}

pub fn get_public_key(r: &mut Reader<'_>) -> CodecResult<PublicKey> {
    let family = FamilyId::from_code(r.u8("family")?)?;
    Ok(match family {
        FamilyId::Reg2 => {
            let params = get_params(r)?;
            let a = get_matrix(r)?;
            let b0 = get_vector(r)?;
            PublicKey::Reg2(Reg2Key::from_parts(Mp12Key::from_parts(a, params)?, b0)?)
        }
        FamilyId::ToyLinear => {
            let register = get_register(r, family)?;
            let key = get_bit_matrix(r)?;
            if key.dim() + 1 != register {
                return Err(CodecError::Invalid("toy matrix dimension"));
            }
            let shift_image = r.u64("shift image")?;
            PublicKey::ToyLinear {
                register,
                key: FromInjKey { key, shift_image },
            }
        }
        FamilyId::ToyPerm => {
            let register = get_register(r, family)?;
            let keys = [get_table(r)?, get_table(r)?];
            if keys
                .iter()
                .any(|t| t.as_slice().len() != 1 << (register - 1))
            {
                return Err(CodecError::Invalid("permutation size"));
            }
            PublicKey::ToyPerm {
                register,
                key: FromBijKey { keys },
            }
        }
    })
}

pub fn put_trapdoor(w: &mut Writer, td: &Trapdoor) {
    w.u8(td.family().code());
    match td {
        Trapdoor::Reg2(t) => {
            put_signed_matrix(w, t.lwe().matrix());
            put_vector(w, t.s0());
            put_signed_vector(w, t.e0());
        }
        Trapdoor::ToyLinear(t) => {
            put_bit_matrix(w, &t.trapdoor);
            w.u64(t.x0);
        }
        Trapdoor::ToyPerm(t) => {
            put_table(w, &t.trapdoors[0]);
            put_table(w, &t.trapdoors[1]);
        }
    }
}

pub fn get_trapdoor(r: &mut Reader<'_>) -> CodecResult<Trapdoor> {
    let family = FamilyId::from_code(r.u8("family")?)?;
    Ok(match family {
        FamilyId::Reg2 => {
            let lwe = Mp12Trapdoor::from_matrix(get_signed_matrix(r)?);
            let s0 = get_vector(r)?;
            let e0 = get_signed_vector(r)?;
            Trapdoor::Reg2(Reg2Trapdoor::from_parts(lwe, s0, e0))
        }
        FamilyId::ToyLinear => {
            let trapdoor = get_bit_matrix(r)?;
            let x0 = r.u64("x0")?;
            Trapdoor::ToyLinear(FromInjTrapdoor { trapdoor, x0 })
        }
        FamilyId::ToyPerm => Trapdoor::ToyPerm(FromBijTrapdoor {
            trapdoors: [get_table(r)?, get_table(r)?],
        }),
    })
}

pub fn put_image(w: &mut Writer, y: &Image) {
    match y {
        Image::Lattice(v) => {
            w.u8(1);
            put_vector(w, v);
        }
        Image::Bits(v) => {
            w.u8(2);
            w.u64(*v);
        }
    }
}

pub fn get_image(r: &mut Reader<'_>) -> CodecResult<Image> {
    match r.u8("image kind")? {
        1 => Ok(Image::Lattice(get_vector(r)?)),
        2 => Ok(Image::Bits(r.u64("image")?)),
        _ => Err(CodecError::Invalid("image kind")),
    }
}

pub fn public_key_bytes(key: &PublicKey) -> Vec<u8> {
    let mut w = Writer::new();
    put_public_key(&mut w, key);
    w.into_bytes()
}

pub fn public_key_from_bytes(bytes: &[u8]) -> CodecResult<PublicKey> {
    let mut r = Reader::new(bytes);
    let key = get_public_key(&mut r)?;
    r.finish()?;
    Ok(key)
}

pub fn trapdoor_bytes(td: &Trapdoor) -> Vec<u8> {
    let mut w = Writer::new();
    put_trapdoor(&mut w, td);
    w.into_bytes()
}

pub fn trapdoor_from_bytes(bytes: &[u8]) -> CodecResult<Trapdoor> {
    let mut r = Reader::new(bytes);
    let td = get_trapdoor(&mut r)?;
    r.finish()?;
    Ok(td)
}

pub fn image_bytes(y: &Image) -> Vec<u8> {
    let mut w = Writer::new();
    put_image(&mut w, y);
    w.into_bytes()
}

pub fn image_from_bytes(bytes: &[u8]) -> CodecResult<Image> {
    let mut r = Reader::new(bytes);
    let y = get_image(&mut r)?;
    r.finish()?;
    Ok(y)
}
