use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use tbaudit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tb_last_error()) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { tb_string_free(p) };
    s
}

fn data(name: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn inversion_metrics() {
    let mut s = ptr::null_mut();
    let name = CString::new("inverse_gf2m").unwrap();
    assert_eq!(unsafe { tb_sbox_builtin(name.as_ptr(), 4, &mut s) }, TbStatus::Ok);
    let mut m = TbSBoxMetrics::default();
    assert_eq!(unsafe { tb_sbox_analyze(s, &mut m) }, TbStatus::Ok);
    assert_eq!((m.m, m.delta, m.r, m.min_derivative_image), (4, 4, 2, 7));
    assert!(!m.has_linear_component);
    assert_eq!(m.anti_invariance_order, 1);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { tb_sbox_report_json(s, &mut json) }, TbStatus::Ok);
    assert!(take_string(json).contains("\"delta\": 4"));
    unsafe { tb_sbox_free(s) };
}

#[test]
fn table_errors_are_reported() {
    let mut s = ptr::null_mut();
    let table = [0u16, 1, 1, 3];
    assert_eq!(unsafe { tb_sbox_new(table.as_ptr(), 4, &mut s) }, TbStatus::NotBijective);
    assert!(s.is_null());
    assert!(last_error().contains("bijection"));

    assert_eq!(unsafe { tb_sbox_new(table.as_ptr(), 4, ptr::null_mut()) }, TbStatus::NullPointer);
    assert_eq!(unsafe { tb_sbox_analyze(ptr::null(), ptr::null_mut()) }, TbStatus::NullPointer);
}

#[test]
fn layer_properness() {
    let mut l = ptr::null_mut();
    let rot = CString::new("rotation").unwrap();
    assert_eq!(unsafe { tb_layer_builtin(rot.as_ptr(), 3, 4, &mut l) }, TbStatus::Ok);
    let (mut proper, mut strong) = (false, true);
    unsafe {
        assert_eq!(tb_layer_is_proper(l, &mut proper), TbStatus::Ok);
        assert_eq!(tb_layer_is_strongly_proper(l, &mut strong), TbStatus::Ok);
        tb_layer_free(l);
    }
    assert!(proper && !strong);

    let mut aes = ptr::null_mut();
    assert_eq!(unsafe { tb_layer_from_json(data("aes_sr_mc_layer.json").as_ptr(), &mut aes) }, TbStatus::Ok);
    let mut fam = false;
    unsafe {
        assert_eq!(tb_layer_family_strongly_proper(aes, 10, false, &mut fam), TbStatus::Ok);
        tb_layer_free(aes);
    }
    assert!(fam);
}

#[test]
fn singular_layer_file() {
    let json = CString::new(r#"{"layout": {"m": 2, "b": 2}, "layer": ["0x1", "0x1", "0x4", "0x8"]}"#).unwrap();
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { tb_layer_from_json(json.as_ptr(), &mut l) }, TbStatus::Singular);
    assert!(l.is_null());
}

#[test]
fn encrypt_and_audit() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tb_cipher_rotation(3, 3, 4, &mut c) }, TbStatus::Ok);
    assert_eq!(unsafe { tb_cipher_block_bits(c) }, 9);
    assert_eq!(unsafe { tb_cipher_rounds(c) }, 4);

    // Zero keys, zero plaintext: inversion fixes 0 and so does the layer.
    let keys = [0u8; 8];
    let input = [0u8; 2];
    let mut output = [0xffu8; 2];
    let st = unsafe { tb_cipher_encrypt(c, keys.as_ptr(), 8, input.as_ptr(), output.as_mut_ptr(), 2) };
    assert_eq!(st, TbStatus::Ok);
    assert_eq!(output, [0, 0]);

    let bad = [0u8, 0x02];
    let st = unsafe { tb_cipher_encrypt(c, keys.as_ptr(), 8, bad.as_ptr(), output.as_mut_ptr(), 2) };
    assert_eq!(st, TbStatus::InvalidArgument);
    assert!(last_error().contains("beyond"));

    let mut verdict = TbVerdict::Secure;
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { tb_cipher_audit(c, ptr::null(), &mut verdict, &mut json) }, TbStatus::Ok);
    assert_eq!(verdict, TbVerdict::Vulnerable);
    assert!(take_string(json).contains("\"status\": \"vulnerable\""));
    unsafe { tb_cipher_free(c) };
}

#[test]
fn spec_files_and_options() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tb_cipher_from_json(data("present_toy.json").as_ptr(), &mut c) }, TbStatus::Ok);
    let opts = TbAuditOptions { condition1prime: true, relaxed_j: false, exhaustive_cap: 8 };
    let mut verdict = TbVerdict::Inconclusive;
    assert_eq!(unsafe { tb_cipher_audit(c, &opts, &mut verdict, ptr::null_mut()) }, TbStatus::Ok);
    assert_eq!(verdict, TbVerdict::Secure);
    unsafe { tb_cipher_free(c) };

    let broken = CString::new("{\"layout\": {\"m\": 3}}").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tb_cipher_from_json(broken.as_ptr(), &mut c) }, TbStatus::SpecError);
    assert!(last_error().contains("line 1"));
}

#[test]
fn header_compiles_as_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/tbaudit.h");
    assert!(header.exists(), "build script did not write the header");
    let src = tempfile_path("tbaudit_header_check.c");
    std::fs::write(
        &src,
        "#include \"tbaudit.h\"\n\
         int main(void) {\n\
           TbSBox *s = NULL; TbSBoxMetrics m;\n\
           if (tb_sbox_builtin(\"present\", 4, &s) != TB_STATUS_OK) return 1;\n\
           tb_sbox_analyze(s, &m); tb_sbox_free(s);\n\
           return m.delta == 4 ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
        .expect("C compiler available");
    assert!(status.success());
}

fn tempfile_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tbaudit-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}
