//! Turn one HTML post body into sentences, code snippets and normalized tokens.

use apitopics::corpus::split_html;
use apitopics::text::{porter_stem, segment_sentences, Normalizer};

const BODY: &str = r#"<p>My app crashes when the <code>RecyclerView</code> scrolls.
I'm using version 1.2.1 of the library.</p>
<pre><code>recyclerView.setAdapter(adapter);
adapter.notifyDataSetChanged();
</code></pre>
<p>Has anyone seen this? The stack trace points at <b>onBindViewHolder</b>.</p>"#;

fn main() {
    let (prose, code) = split_html(BODY);
    println!("prose: {prose:?}");
    println!("{} code snippet(s):\n{}", code.len(), code.join("\n---\n"));

    for s in segment_sentences(&prose) {
        println!("[{:>3}..{:<3}] {}", s.start, s.end, s.text);
    }

    let normalizer = Normalizer::bundled();
    for t in normalizer.normalize_with_surface(&prose) {
        print!("{}({}) ", t.token, t.surface);
    }
    println!();

    for word in ["crashes", "scrolling", "relational", "adapters"] {
        println!("{word} -> {}", porter_stem(word));
    }
}
