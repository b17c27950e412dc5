//! Generate the three synthetic corpus kinds into a temporary directory
//! and show what each provides.

use mesr::pipeline::{generate_corpus, CorpusKind, CorpusSpec, DatasetManifest};

fn main() -> mesr::Result<()> {
    let root = std::env::temp_dir().join("mesr_corpora_example");
    for kind in [
        CorpusKind::Spotting,
        CorpusKind::Recognition,
        CorpusKind::Mesr,
    ] {
        let mut spec = CorpusSpec::new(kind);
        // keep the example quick
        spec.sequences = 2;
        spec.subjects = 2;
        if kind != CorpusKind::Recognition {
            spec.frames = 100;
        }
        let dir = root.join(format!("{kind:?}").to_lowercase());
        let manifest_path = generate_corpus(&dir, &spec)?;
        let manifest = DatasetManifest::load(&manifest_path)?;
        let first = &manifest.clips[0];
        println!(
            "{kind:?}: {} clips at {}; first clip id {:?}, subject {:?}, anchors {}, landmarks {}, label {:?}",
            manifest.clips.len(),
            dir.display(),
            first.id,
            first.subject,
            first.anchors.is_some(),
            first.landmarks.is_some(),
            first.label,
        );
    }
    println!("corpora left in place for inspection");
    Ok(())
}
