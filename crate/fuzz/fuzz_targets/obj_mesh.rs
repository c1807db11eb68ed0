#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(mesh) = helicoid_lab::meshcheck::TriMesh::from_obj_str(text) {
            // downstream consumers must be panic-free on parsed meshes
            let _ = helicoid_lab::meshcheck::euler_genus(&mesh);
            let _ = mesh.median_edge_length();
            let _ = mesh.to_obj_string();
        }
    }
});
