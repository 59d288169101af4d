import json

import pytest
from hypothesis import given, settings, strategies as st

from streamextract.corpus import Document, tokenize
from streamextract.recognize import (CandidateAnnotation, RecognizerSpec,
                                     TokenPattern, build_gazetteer_recognizer,
                                     build_pattern_recognizer, load_gazetteer_file,
                                     load_pattern_config, merge_candidates,
                                     read_candidates, recognize_spans,
                                     write_candidates)
from oracles import brute_force_matches


def seq(raw, doc_id="d1"):
    return tokenize(Document(doc_id=doc_id, field="text", raw=raw))


def gaz(entries, attribute="city", name="g"):
    spec = RecognizerSpec(name=name, attribute=attribute, kind="gazetteer")
    return build_gazetteer_recognizer(spec, entries)


AGE_PATTERNS = [
    TokenPattern(name="numeric-age", regex="[0-9]{2}", max_tokens=1,
                 min_value=18, max_value=65),
    TokenPattern(name="spelled-age",
                 regex="eighteen|nineteen|twenty|thirty|forty|fifty|sixty",
                 max_tokens=1),
    TokenPattern(name="spelled-compound-age",
                 regex="(twenty|thirty|forty|fifty|sixty)"
                       "-(one|two|three|four|five|six|seven|eight|nine)",
                 max_tokens=3),
]


def age_recognizer():
    spec = RecognizerSpec(name="ages", attribute="age", kind="pattern")
    return build_pattern_recognizer(spec, AGE_PATTERNS)


class TestGazetteer:
    def test_multi_token_entry(self):
        rec = gaz(["salt lake city"])
        cands = recognize_spans(rec, seq("more girls from Salt Lake City , UT"))
        assert [(c.i, c.j, c.surface) for c in cands] == [(4, 6, "Salt Lake City")]

    def test_single_token_among_noise(self):
        rec = gaz(["omaha"])
        cands = recognize_spans(rec, seq("1332 SOUTH 119TH STREET , OMAHA NE 68144"))
        assert len(cands) == 1
        assert cands[0].surface == "OMAHA"

    def test_empty_entries_rejected(self):
        with pytest.raises(ValueError):
            gaz([])
        with pytest.raises(ValueError):
            gaz(["ok", "   "])

    def test_case_insensitive(self):
        rec = gaz(["Nice"])
        assert len(recognize_spans(rec, seq("have a NICE day"))) == 1

    def test_file_loading(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# comment\nnew york\n\nboston\n", encoding="utf-8")
        assert load_gazetteer_file(p) == ["new york", "boston"]


class TestPatternRecognizer:
    def test_age_in_context(self):
        cands = recognize_spans(age_recognizer(),
                                seq("4th August 2015 in rochester ny 21"))
        assert [(c.surface, c.attribute) for c in cands] == [("21", "age")]

    def test_out_of_range_numbers(self):
        assert recognize_spans(age_recognizer(), seq("suite 102")) == []
        assert recognize_spans(age_recognizer(), seq("only 17")) == []

    def test_spelled_compound(self):
        cands = recognize_spans(age_recognizer(), seq("i am twenty-one today"))
        assert [(c.i, c.j) for c in cands] == [(3, 5)]
        assert cands[0].surface == "twenty - one"

    def test_invalid_regex_rejected(self):
        with pytest.raises(Exception):
            TokenPattern(name="bad", regex="([")

    def test_no_patterns_rejected(self):
        spec = RecognizerSpec(name="p", attribute="age", kind="pattern")
        with pytest.raises(ValueError):
            build_pattern_recognizer(spec, [])

    def test_bundled_config_loads(self):
        import streamextract
        from pathlib import Path
        cfg_path = Path(streamextract.__file__).parent / "data" / "age_patterns.json"
        cfg = load_pattern_config(cfg_path)
        rec = build_pattern_recognizer(
            RecognizerSpec(name="ages", attribute=cfg["attribute"], kind="pattern"),
            cfg["patterns"])
        assert len(recognize_spans(rec, seq("AVAILABLE NOW 21"))) == 1


class TestRecognizeSpans:
    def test_leftmost_longest(self):
        rec = gaz(["new york", "york"])
        cands = recognize_spans(rec, seq("new york"))
        assert [(c.i, c.j) for c in cands] == [(1, 2)]

    def test_false_positive_by_design(self):
        cands = recognize_spans(gaz(["nice"]), seq("have a nice day"))
        assert [(c.i, c.j) for c in cands] == [(3, 3)]

    def test_empty_sequence(self):
        assert recognize_spans(gaz(["x"]), seq("")) == []

    def test_surfaces_match_document_tokens(self):
        rec = gaz(["bossier city", "shreveport"])
        t = seq("Location: Bossier City/Shreveport")
        for c in recognize_spans(rec, t):
            expected = " ".join(tok.surface for tok in t.tokens[c.i - 1 : c.j])
            assert c.surface == expected

    def test_brute_force_equivalence_random(self):
        import random
        rng = random.Random(7)
        vocab = list("abcdefg")
        for _ in range(150):
            n_entries = rng.randint(1, 6)
            entries = set()
            while len(entries) < n_entries:
                entries.add(tuple(rng.choices(vocab, k=rng.randint(1, 3))))
            units = rng.choices(vocab, k=rng.randint(0, 50))
            rec = gaz([" ".join(e) for e in entries])
            t = seq(" ".join(units))
            got = [(c.i, c.j) for c in recognize_spans(rec, t)]
            assert got == brute_force_matches(entries, units)


class TestMergeCandidates:
    def c(self, attr, i, j, rec="r1", doc="d1", label="unlabeled"):
        return CandidateAnnotation(doc_id=doc, attribute=attr, i=i, j=j,
                                   surface="s", recognizer=rec, label=label)

    def test_dedup_same_span(self):
        merged = merge_candidates([[self.c("city", 1, 2, rec="r1")],
                                   [self.c("city", 1, 2, rec="r2")]])
        assert len(merged) == 1

    def test_disjoint_in_span_order(self):
        merged = merge_candidates([[self.c("city", 5, 6)], [self.c("city", 1, 1)]])
        assert [(m.i, m.j) for m in merged] == [(1, 1), (5, 6)]

    def test_different_attributes_kept(self):
        merged = merge_candidates([[self.c("city", 1, 2)], [self.c("name", 1, 2)]])
        assert len(merged) == 2

    @settings(max_examples=100)
    @given(st.lists(st.lists(st.tuples(st.sampled_from(["city", "name"]),
                                       st.integers(1, 5), st.integers(0, 3)),
                             max_size=5), max_size=4),
           st.lists(st.tuples(st.sampled_from(["city", "name"]),
                              st.integers(1, 5), st.integers(0, 3)), max_size=5))
    def test_monotone_under_new_recognizer(self, lists, extra):
        def build(triples, rec):
            return [self.c(a, i, i + dj, rec=rec) for a, i, dj in triples]

        base = [build(t, f"r{k}") for k, t in enumerate(lists)]
        grown = base + [build(extra, "rnew")]
        keys = lambda cands: {(c.attribute, c.i, c.j) for c in cands}
        assert keys(merge_candidates(base)) <= keys(merge_candidates(grown))


class TestCandidateIO:
    def test_roundtrip(self, tmp_path):
        cands = [CandidateAnnotation("d1", "city", 1, 2, "new york", "g", "correct"),
                 CandidateAnnotation("d2", "age", 3, 3, "21", "ages", "unlabeled")]
        p = tmp_path / "c.jsonl"
        write_candidates(p, cands)
        assert read_candidates(p) == cands

    def test_scores_emitted(self, tmp_path):
        cands = [CandidateAnnotation("d1", "city", 1, 1, "x", "g", "correct")]
        p = tmp_path / "c.jsonl"
        write_candidates(p, cands, scores=[0.9])
        assert json.loads(p.read_text())["score"] == 0.9

    def test_malformed_line_reports_number(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"doc_id": "d1"}\n')
        with pytest.raises(ValueError, match="c.jsonl:1"):
            read_candidates(p)

    def test_invalid_span_or_label(self):
        with pytest.raises(ValueError):
            CandidateAnnotation("d1", "city", 3, 2, "x", "g")
        with pytest.raises(ValueError):
            CandidateAnnotation("d1", "city", 1, 1, "x", "g", label="maybe")
