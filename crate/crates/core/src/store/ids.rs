use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use rand::{Rng, RngCore};

/// Join-code alphabet: uppercase alphanumerics minus 0/O and 1/I.
pub const JOIN_CODE_ALPHABET: &[u8; 32] = b"ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
pub const JOIN_CODE_LEN: usize = 6;

fn random_b64(bytes: usize) -> String {
    let mut buf = vec![0u8; bytes];
    rand::rng().fill_bytes(&mut buf);
    URL_SAFE_NO_PAD.encode(buf)
}

/// 128 random bits, URL-safe base64 (22 characters).
pub fn new_id() -> String {
    random_b64(16)
}

/// 256 random bits, URL-safe base64 (43 characters).
pub fn new_token() -> String {
    random_b64(32)
}

pub fn new_seed() -> u64 {
    rand::rng().random()
}

pub fn new_join_code() -> String {
    let mut rng = rand::rng();
    (0..JOIN_CODE_LEN)
        // 32 symbols, so masking five bits is uniform.
        .map(|_| JOIN_CODE_ALPHABET[(rng.next_u32() & 31) as usize] as char)
        .collect()
}

/// Uppercases and trims user-typed codes.
pub fn normalize_join_code(code: &str) -> String {
    code.trim().to_ascii_uppercase()
}
