use std::collections::BTreeMap;

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use super::{IngestError, InvertedIndex};
use crate::model::NodeLabel;

/// Parses an XML document and assigns containment labels.
///
/// One counter, starting at 1, advances on every element open, attribute
/// start, attribute end and element close. Attributes become child nodes
/// tagged `@name`, placed before the element's children in source order.
/// Text, comments, processing instructions and the prolog are skipped.
pub fn parse_and_label(xml: &[u8]) -> Result<InvertedIndex, IngestError> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().check_end_names = true;

    let mut labeler = Labeler::default();
    let mut seen_root = false;
    loop {
        let pos = reader.buffer_position();
        let event = reader.read_event().map_err(|e| IngestError::Xml {
            pos: reader.error_position(),
            msg: e.to_string(),
        })?;
        match event {
            Event::Start(e) | Event::Empty(e) if labeler.open.is_empty() && seen_root => {
                let _ = e;
                return Err(IngestError::Xml {
                    pos,
                    msg: "more than one root element".into(),
                });
            }
            Event::Start(e) => {
                seen_root = true;
                labeler.open_element(&e, pos)?;
            }
            Event::Empty(e) => {
                seen_root = true;
                labeler.open_element(&e, pos)?;
                labeler.close_element();
            }
            Event::End(_) => labeler.close_element(),
            Event::Text(t) => {
                if labeler.open.is_empty() && t.chars().any(|c| !c.is_ascii_whitespace()) {
                    return Err(IngestError::Xml {
                        pos,
                        msg: "text outside the root element".into(),
                    });
                }
            }
            Event::GeneralRef(r) => {
                let known = r.is_char_ref() || resolve_predefined_entity(&r).is_some();
                if !known {
                    return Err(IngestError::Xml {
                        pos,
                        msg: format!("undefined entity '&{};'", &*r),
                    });
                }
                if let Err(e) = r.resolve_char_ref() {
                    return Err(IngestError::Xml {
                        pos,
                        msg: e.to_string(),
                    });
                }
            }
            Event::CData(_) | Event::Comment(_) | Event::Decl(_) | Event::PI(_) => {}
            Event::DocType(_) => {
                return Err(IngestError::Xml {
                    pos,
                    msg: "DTDs are not supported".into(),
                })
            }
            Event::Eof => break,
        }
    }
    if !labeler.open.is_empty() {
        return Err(IngestError::Xml {
            pos: reader.buffer_position(),
            msg: "unexpected end of document: unclosed element".into(),
        });
    }
    if !seen_root {
        return Err(IngestError::EmptyDocument);
    }
    Ok(labeler.finish())
}

#[derive(Default)]
struct Labeler {
    counter: u32,
    lists: BTreeMap<String, Vec<NodeLabel>>,
    /// (tag, index in its list) of every element still open.
    open: Vec<(String, usize)>,
    node_count: u32,
    depth: u32,
}

impl Labeler {
    fn tick(&mut self) -> u32 {
        self.counter += 1;
        self.counter
    }

    fn push(&mut self, tag: &str, label: NodeLabel) -> usize {
        self.node_count += 1;
        self.depth = self.depth.max(label.level);
        let list = self.lists.entry(tag.to_string()).or_default();
        list.push(label);
        list.len() - 1
    }

    fn open_element(&mut self, e: &BytesStart<'_>, pos: u64) -> Result<(), IngestError> {
        let tag = AsRef::<str>::as_ref(&e.name()).to_string();
        let level = self.open.len() as u32 + 1;
        let left = self.tick();
        let idx = self.push(&tag, NodeLabel::new(left, 0, level));
        for attr in e.attributes() {
            let attr = attr.map_err(|err| IngestError::Xml {
                pos,
                msg: err.to_string(),
            })?;
            attr.normalized_value(XmlVersion::Implicit1_0)
                .map_err(|err| IngestError::Xml {
                    pos,
                    msg: err.to_string(),
                })?;
            let name = format!("@{}", AsRef::<str>::as_ref(&attr.key));
            let left = self.tick();
            let right = self.tick();
            self.push(&name, NodeLabel::new(left, right, level + 1));
        }
        self.open.push((tag, idx));
        Ok(())
    }

    fn close_element(&mut self) {
        let (tag, idx) = self.open.pop().expect("reader checks end tags");
        let right = self.tick();
        self.lists.get_mut(&tag).expect("tag was opened")[idx].right = right;
    }

    fn finish(self) -> InvertedIndex {
        InvertedIndex::from_parts(self.lists, self.node_count, self.depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element() {
        let idx = parse_and_label(b"<a/>").unwrap();
        assert_eq!(idx.list("a"), &[NodeLabel::new(1, 2, 1)]);
        assert_eq!(idx.node_count(), 1);
        assert_eq!(idx.depth(), 1);
    }

    #[test]
    fn attribute_counter_rule() {
        let idx = parse_and_label(br#"<a id="1"/>"#).unwrap();
        assert_eq!(idx.list("a"), &[NodeLabel::new(1, 4, 1)]);
        assert_eq!(idx.list("@id"), &[NodeLabel::new(2, 3, 2)]);
        assert_eq!(idx.depth(), 2);
    }

    #[test]
    fn attributes_precede_children() {
        let idx = parse_and_label(br#"<a x="1" y="2"><b/></a>"#).unwrap();
        assert_eq!(idx.list("@x"), &[NodeLabel::new(2, 3, 2)]);
        assert_eq!(idx.list("@y"), &[NodeLabel::new(4, 5, 2)]);
        assert_eq!(idx.list("b"), &[NodeLabel::new(6, 7, 2)]);
        assert_eq!(idx.list("a"), &[NodeLabel::new(1, 8, 1)]);
    }

    #[test]
    fn skips_text_comments_and_prolog() {
        let xml = br#"<?xml version="1.0"?><!-- c --><a>text &amp; &#65; <?pi x?><b>t</b></a>"#;
        let idx = parse_and_label(xml).unwrap();
        assert_eq!(idx.list("b"), &[NodeLabel::new(2, 3, 2)]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            parse_and_label(b""),
            Err(IngestError::EmptyDocument)
        ));
        assert!(matches!(
            parse_and_label(b"  <!-- only -->  "),
            Err(IngestError::EmptyDocument)
        ));
        for bad in [
            &b"<a><b></a>"[..],
            b"<a>",
            b"<a/><b/>",
            b"<a>&nbsp;</a>",
            b"<a x=\"&foo;\"/>",
            b"junk<a/>",
        ] {
            assert!(
                matches!(parse_and_label(bad), Err(IngestError::Xml { .. })),
                "{}",
                String::from_utf8_lossy(bad)
            );
        }
    }
}
