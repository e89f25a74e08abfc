"""Treebank parsing, the binary vector store, and dataset assembly."""

import json

import numpy as np
import pytest

from bayesmi.dataio import (
    ConlluError,
    EmbeddingFormatError,
    EmbeddingStore,
    SyntheticSpec,
    TokenAlignment,
    TokenDataset,
    TokenRecord,
    analytic_mi,
    base_label,
    channel_matrix,
    extract_task_dataset,
    make_lossless_pair,
    parse_conllu,
    random_type_embeddings,
    read_embeddings,
    serialize_conllu,
    sidecar_path,
    synthesize,
    type_vector,
    write_embeddings,
)
from bayesmi.distributions import JointDistribution
from bayesmi.info import mutual_information

# Two sentences, nine syntactic words, one multiword range line.
FIXTURE = """\
# sent_id = fx-1
# text = The cats don't sleep.
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tcats\tcat\tNOUN\t_\t_\t5\tnsubj\t_\t_
3-4\tdon't\t_\t_\t_\t_\t_\t_\t_\t_
3\tdo\tdo\tAUX\t_\t_\t5\taux\t_\t_
4\tn't\tnot\tPART\t_\t_\t5\tadvmod\t_\t_
5\tsleep\tsleep\tVERB\t_\t_\t0\troot\t_\t_
6\t.\t.\tPUNCT\t_\t_\t5\tpunct\t_\t_

# sent_id = fx-2
1\tBirds\tbird\tNOUN\t_\t_\t2\tnsubj\t_\t_
2\tfly\tfly\tVERB\t_\t_\t0\troot\t_\t_
3\tfast\tfast\t_\t_\t_\t2\tadvmod:emph\t_\t_
"""

# The binary layout is an external contract; a frozen constant 0.53100
# bits for the two-symbol channel at flip rate 0.1 pins the oracle.
BSC_POINT_ONE = 0.5310044064107188


class TestParseConllu:
    def test_record_count_and_sentences(self):
        records = parse_conllu(FIXTURE)
        assert len(records) == 9
        assert [r.sent_index for r in records] == [0] * 6 + [1] * 3

    def test_fields_of_first_record(self):
        rec = parse_conllu(FIXTURE)[0]
        assert rec == TokenRecord(
            sent_index=0, token_index=1, form="The", upos="DET", deprel="det", head=2
        )

    def test_multiword_range_is_skipped(self):
        forms = [r.form for r in parse_conllu(FIXTURE)]
        assert "don't" not in forms
        assert "do" in forms and "n't" in forms

    def test_empty_node_is_skipped(self):
        text = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n1.1\tghost\t_\tX\t_\t_\t_\t_\t_\t_\n"
        records = parse_conllu(text)
        assert [r.form for r in records] == ["a"]

    def test_missing_annotation_is_flagged_not_dropped(self):
        records = parse_conllu(FIXTURE)
        fast = [r for r in records if r.form == "fast"][0]
        assert fast.upos is None
        assert fast.deprel == "advmod:emph"
        assert not fast.has_task_fields

    def test_comments_ignored(self):
        with_comment = "# anything\n1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n"
        without = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n"
        assert parse_conllu(with_comment) == parse_conllu(without)

    def test_accepts_line_iterable(self):
        assert parse_conllu(FIXTURE.splitlines()) == parse_conllu(FIXTURE)

    def test_wrong_column_count_reports_line_number(self):
        text = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\tonly-three\tcols\n"
        with pytest.raises(ConlluError, match="line 2"):
            parse_conllu(text)

    def test_bad_token_id_reports_line_number(self):
        with pytest.raises(ConlluError, match="line 1"):
            parse_conllu("x\ta\t_\tX\t_\t_\t0\troot\t_\t_\n")

    def test_bad_head_reports_line_number(self):
        with pytest.raises(ConlluError, match="line 1"):
            parse_conllu("1\ta\t_\tX\t_\t_\tzz\troot\t_\t_\n")

    def test_head_outside_sentence_rejected(self):
        with pytest.raises(ConlluError, match="head 9"):
            parse_conllu("1\ta\t_\tX\t_\t_\t9\tdep\t_\t_\n")

    def test_round_trip(self):
        records = parse_conllu(FIXTURE)
        assert parse_conllu(serialize_conllu(records)) == records

    def test_serialize_empty(self):
        assert serialize_conllu([]) == ""

    def test_serialize_preserves_missing_fields(self):
        records = parse_conllu(FIXTURE)
        text = serialize_conllu(records)
        fast_line = [ln for ln in text.splitlines() if ln.startswith("3\tfast")][0]
        assert fast_line.split("\t")[3] == "_"


class TestBinaryStore:
    def make_store(self, n=5, d=3, seed=0, with_alignment=True):
        rng = np.random.default_rng(seed)
        vectors = rng.standard_normal((n, d)).astype(np.float32)
        alignment = tuple(
            TokenAlignment(sent=0, tok=i + 1, form=f"w{i}", upos="X", deprel="dep", head=0, vec=i)
            for i in range(n)
        ) if with_alignment else ()
        return EmbeddingStore(vectors=vectors, alignment=alignment)

    def test_round_trip_exact(self, tmp_path):
        store = self.make_store()
        path = tmp_path / "vectors.bmie"
        write_embeddings(store, path)
        loaded = read_embeddings(path)
        assert loaded.vectors.dtype == np.float32
        np.testing.assert_array_equal(loaded.vectors, store.vectors)
        assert loaded.alignment == store.alignment

    def test_round_trip_without_sidecar(self, tmp_path):
        store = self.make_store(with_alignment=False)
        path = tmp_path / "vectors.bmie"
        write_embeddings(store, path)
        assert not sidecar_path(path).exists()
        loaded = read_embeddings(path)
        assert loaded.alignment == ()
        np.testing.assert_array_equal(loaded.vectors, store.vectors)

    def test_header_layout(self, tmp_path):
        store = self.make_store(n=5, d=3)
        path = tmp_path / "vectors.bmie"
        write_embeddings(store, path)
        blob = path.read_bytes()
        assert blob[:4] == b"BMIE"
        assert int.from_bytes(blob[4:8], "little") == 1
        assert int.from_bytes(blob[8:12], "little") == 3
        assert int.from_bytes(blob[12:20], "little") == 5
        assert len(blob) == 20 + 4 * 5 * 3

    def test_bad_magic_names_offset_zero(self, tmp_path):
        path = tmp_path / "bad.bmie"
        path.write_bytes(b"NOPE" + bytes(16))
        with pytest.raises(EmbeddingFormatError, match="offset 0"):
            read_embeddings(path)

    def test_bad_version_names_offset_four(self, tmp_path):
        store = self.make_store()
        path = tmp_path / "bad.bmie"
        write_embeddings(store, path)
        blob = bytearray(path.read_bytes())
        blob[4] = 9
        path.write_bytes(bytes(blob))
        with pytest.raises(EmbeddingFormatError, match="offset 4"):
            read_embeddings(path)

    def test_truncated_header_names_offset(self, tmp_path):
        path = tmp_path / "bad.bmie"
        path.write_bytes(b"BMIE" + bytes(8))
        with pytest.raises(EmbeddingFormatError, match="offset 12"):
            read_embeddings(path)

    def test_truncated_payload_names_offsets(self, tmp_path):
        store = self.make_store(n=5, d=3)
        path = tmp_path / "bad.bmie"
        write_embeddings(store, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-4])
        with pytest.raises(EmbeddingFormatError) as exc:
            read_embeddings(path)
        assert f"offset {len(blob)}" in str(exc.value)
        assert f"offset {len(blob) - 4}" in str(exc.value)

    def test_nan_rejected_at_construction(self):
        vectors = np.zeros((2, 2), dtype=np.float32)
        vectors[1, 1] = np.nan
        with pytest.raises(ValueError, match="NaN or Inf"):
            EmbeddingStore(vectors=vectors)

    def test_nonfinite_payload_names_offset(self, tmp_path):
        store = self.make_store(n=2, d=2)
        path = tmp_path / "bad.bmie"
        write_embeddings(store, path)
        blob = bytearray(path.read_bytes())
        inf = np.array([np.inf], dtype="<f4").tobytes()
        blob[20 + 4 * 3 : 20 + 4 * 4] = inf
        path.write_bytes(bytes(blob))
        with pytest.raises(EmbeddingFormatError, match=f"offset {20 + 4 * 3}"):
            read_embeddings(path)

    def test_alignment_out_of_range_rejected(self):
        row = TokenAlignment(sent=0, tok=1, form="w", upos="X", deprel="d", head=0, vec=7)
        with pytest.raises(ValueError, match="vector 7"):
            EmbeddingStore(vectors=np.zeros((2, 2), dtype=np.float32), alignment=(row,))

    def test_sidecar_rows_are_json_objects(self, tmp_path):
        store = self.make_store(n=2, d=2)
        path = tmp_path / "vectors.bmie"
        write_embeddings(store, path)
        rows = [json.loads(line) for line in sidecar_path(path).read_text().splitlines()]
        assert rows[0] == {
            "sent": 0, "tok": 1, "form": "w0", "upos": "X", "deprel": "dep", "head": 0, "vec": 0,
        }

    def test_malformed_sidecar_reports_line(self, tmp_path):
        store = self.make_store(n=2, d=2)
        path = tmp_path / "vectors.bmie"
        write_embeddings(store, path)
        sidecar_path(path).write_text('{"sent": 0}\n')
        with pytest.raises(EmbeddingFormatError, match="sidecar line 1"):
            read_embeddings(path)

    def test_vector_lookup(self):
        store = self.make_store(n=3, d=2)
        np.testing.assert_array_equal(store.vector_for(0, 2), store.vectors[1])
        assert store.vector_for(5, 1) is None


class TestTypeEmbeddings:
    def test_vector_is_pure_function_of_form_and_seed(self):
        a = type_vector("cats", 16, 7)
        b = type_vector("cats", 16, 7)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, type_vector("cats", 16, 8))
        assert not np.array_equal(a, type_vector("dogs", 16, 7))

    def test_corpus_order_does_not_change_vectors(self):
        first = random_type_embeddings(["a", "b", "c"], 8, seed=3)
        second = random_type_embeddings(["c", "x", "a"], 8, seed=3)
        np.testing.assert_array_equal(
            first.vectors[first.alignment[0].vec], second.vectors[second.alignment[2].vec]
        )

    def test_repeated_forms_share_one_vector(self):
        store = random_type_embeddings(["the", "cat", "the"], 8, seed=0)
        assert store.n_vectors == 2
        assert store.alignment[0].vec == store.alignment[2].vec

    def test_norms_concentrate_near_one(self):
        store = random_type_embeddings([f"w{i}" for i in range(200)], 512, seed=0)
        norms = np.linalg.norm(store.vectors, axis=1)
        assert abs(float(norms.mean()) - 1.0) < 0.05
        assert float(norms.std()) < 0.1

    def test_alignment_from_records(self):
        records = parse_conllu(FIXTURE)
        store = random_type_embeddings(records, 8, seed=0)
        assert len(store.alignment) == len(records)
        row = store.alignment[0]
        assert (row.sent, row.tok, row.form, row.upos, row.deprel, row.head) == (
            0, 1, "The", "DET", "det", 2,
        )
        fast = store.alignment[-1]
        assert fast.upos == "_"

    def test_rejects_empty_and_bad_dim(self):
        with pytest.raises(ValueError):
            random_type_embeddings([], 8, seed=0)
        with pytest.raises(ValueError):
            random_type_embeddings(["a"], 0, seed=0)


class TestTokenDataset:
    def make(self, **overrides):
        kwargs = dict(
            task="pos",
            labels=("A", "B"),
            train_x=np.zeros((3, 2)),
            train_y=np.array([0, 1, 0]),
            test_x=np.zeros((1, 2)),
            test_y=np.array([1]),
        )
        kwargs.update(overrides)
        return TokenDataset(**kwargs)

    def test_properties(self):
        ds = self.make()
        assert (ds.n_train, ds.n_test, ds.input_dim) == (3, 1, 2)

    def test_rejects_label_index_out_of_range(self):
        with pytest.raises(ValueError, match="outside the label inventory"):
            self.make(train_y=np.array([0, 2, 0]))

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValueError, match="duplicate"):
            self.make(labels=("A", "A"))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimensions differ"):
            self.make(test_x=np.zeros((1, 5)))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="disagree"):
            self.make(train_y=np.array([0, 1]))

    def test_digest_tracks_content(self):
        base = self.make()
        assert base.digest() == self.make().digest()
        changed = self.make(train_y=np.array([1, 1, 0]))
        assert changed.digest() != base.digest()

    def test_arrays_read_only(self):
        ds = self.make()
        with pytest.raises(ValueError):
            ds.train_x[0, 0] = 5.0


class TestExtractTaskDataset:
    @pytest.fixture()
    def aligned(self):
        records = parse_conllu(FIXTURE)
        store = random_type_embeddings(records, 8, seed=0)
        return records, store

    def test_pos_uses_all_annotated_tokens(self, aligned):
        records, store = aligned
        ds = extract_task_dataset(records, store, "pos", test_fraction=0.5, seed=0)
        # 8 of 9 records carry a POS tag ("fast" is unannotated)
        assert ds.n_train + ds.n_test <= 8
        assert ds.input_dim == 8
        assert ds.task == "pos"

    def test_split_is_by_sentence(self, aligned):
        records, store = aligned
        ds = extract_task_dataset(records, store, "pos", test_fraction=0.5, seed=0)
        # one sentence has 6 annotated tokens, the other 2; a sentence
        # split can only produce these side sizes (before label drops)
        assert ds.n_train in (2, 6)

    def test_labels_frozen_from_train_and_unseen_dropped(self, aligned, caplog):
        records, store = aligned
        found_drop = False
        for seed in range(8):
            with caplog.at_level("INFO", logger="bayesmi.dataio.datasets"):
                ds = extract_task_dataset(records, store, "pos", test_fraction=0.5, seed=seed)
            train_labels = {ds.labels[i] for i in ds.train_y}
            assert set(ds.labels) == train_labels
            if ds.n_train == 2:
                # train side is the two-token sentence {NOUN, VERB}; the
                # six-token test sentence has four other tags to drop
                assert ds.labels == ("NOUN", "VERB")
                assert ds.n_test == 2
                assert "dropped 4 test tokens" in caplog.text
                found_drop = True
        assert found_drop

    def test_deprel_concatenates_dependent_and_head(self, aligned):
        records, store = aligned
        ds = extract_task_dataset(records, store, "deprel", test_fraction=0.5, seed=0)
        assert ds.input_dim == 16
        assert ds.n_train + ds.n_test == 9

    def test_deprel_root_head_is_zero_vector(self, aligned):
        records, store = aligned
        ds = extract_task_dataset(records, store, "deprel", test_fraction=0.5, seed=0)
        if "root" in ds.labels:
            root_rows = ds.train_x[ds.train_y == ds.labels.index("root")]
            if root_rows.size:
                np.testing.assert_array_equal(root_rows[:, 8:], np.zeros_like(root_rows[:, 8:]))
        dep_rows = ds.train_x[:, :8]
        assert np.abs(dep_rows).sum() > 0

    def test_deprel_subtype_stripped(self, aligned):
        records, store = aligned
        seen = set()
        for seed in range(8):
            ds = extract_task_dataset(records, store, "deprel", test_fraction=0.5, seed=seed)
            seen.update(ds.labels)
        assert "advmod" in seen
        assert all(":" not in lab for lab in seen)

    def test_base_label(self):
        assert base_label("nsubj:pass") == "nsubj"
        assert base_label("root") == "root"

    def test_deterministic_given_seed(self, aligned):
        records, store = aligned
        a = extract_task_dataset(records, store, "pos", seed=5)
        b = extract_task_dataset(records, store, "pos", seed=5)
        assert a.digest() == b.digest()

    def test_unknown_task_rejected(self, aligned):
        records, store = aligned
        with pytest.raises(ValueError, match="unknown task"):
            extract_task_dataset(records, store, "lemma")

    def test_bad_fraction_rejected(self, aligned):
        records, store = aligned
        with pytest.raises(ValueError, match="fraction"):
            extract_task_dataset(records, store, "pos", test_fraction=1.0)


class TestSyntheticOracles:
    def test_noise_information_is_zero(self):
        assert analytic_mi(SyntheticSpec(kind="noise", n_labels=3, dim=4)) == 0.0

    def test_binary_channel_matches_frozen_constant(self):
        spec = SyntheticSpec(kind="lossy-channel", n_labels=2, dim=2, noise_level=0.1)
        assert analytic_mi(spec) == pytest.approx(BSC_POINT_ONE, abs=1e-12)

    def test_clean_channel_gives_label_entropy(self):
        spec = SyntheticSpec(kind="lossy-channel", n_labels=4, dim=4, noise_level=0.0)
        assert analytic_mi(spec) == pytest.approx(2.0, abs=1e-12)

    def test_channel_matrix_rows_stochastic(self):
        chan = channel_matrix(5, 0.3)
        np.testing.assert_allclose(chan.sum(axis=1), np.ones(5), atol=1e-12)
        assert chan[0, 0] == pytest.approx(0.7)
        assert chan[0, 1] == pytest.approx(0.3 / 4)

    def test_channel_oracle_matches_plugin_estimate(self):
        spec = SyntheticSpec(kind="lossy-channel", n_labels=3, dim=3, noise_level=0.2, seed=9)
        rng = np.random.default_rng(123)
        n = 1_000_000
        t = rng.integers(0, 3, size=n)
        chan = channel_matrix(3, 0.2)
        received = (rng.random(n)[:, None] > chan.cumsum(axis=1)[t]).sum(axis=1)
        counts = np.zeros((3, 3))
        np.add.at(counts, (t, received), 1.0)
        joint = JointDistribution(
            x_labels=("a", "b", "c"), y_labels=("A", "B", "C"), probs=counts / n
        )
        assert mutual_information(joint) == pytest.approx(analytic_mi(spec), abs=0.01)

    def test_noiseless_informative_gives_label_entropy(self):
        assert analytic_mi(SyntheticSpec(kind="informative", n_labels=4, dim=8)) == 2.0

    def test_informative_oracle_is_seed_stable(self):
        a = SyntheticSpec(kind="informative", n_labels=4, dim=8, noise_level=0.5, seed=0)
        b = SyntheticSpec(kind="informative", n_labels=4, dim=8, noise_level=0.5, seed=1)
        va, vb = analytic_mi(a), analytic_mi(b)
        assert va == analytic_mi(a)
        assert abs(va - vb) < 0.01

    def test_informative_information_decreases_with_noise(self):
        low = analytic_mi(SyntheticSpec(kind="informative", n_labels=4, dim=8, noise_level=0.2))
        high = analytic_mi(SyntheticSpec(kind="informative", n_labels=4, dim=8, noise_level=1.5))
        assert 0.0 < high < low <= 2.0

    def test_spec_validation(self):
        with pytest.raises(ValueError, match="unknown kind"):
            SyntheticSpec(kind="mystery")
        with pytest.raises(ValueError, match="labels"):
            SyntheticSpec(kind="noise", n_labels=1)
        with pytest.raises(ValueError, match="dim"):
            SyntheticSpec(kind="informative", n_labels=8, dim=4)
        with pytest.raises(ValueError, match="flip probability"):
            SyntheticSpec(kind="lossy-channel", n_labels=2, dim=2, noise_level=1.5)


class TestSynthesize:
    def test_shapes_and_split(self):
        spec = SyntheticSpec(kind="lossy-channel", n_labels=3, dim=3, noise_level=0.1)
        ds, mi = synthesize(spec, 100)
        assert (ds.n_train, ds.n_test) == (80, 20)
        assert ds.labels == ("c0", "c1", "c2")
        assert mi == analytic_mi(spec)

    def test_deterministic(self):
        spec = SyntheticSpec(kind="informative", n_labels=4, dim=8, noise_level=0.3, seed=4)
        a, _ = synthesize(spec, 64)
        b, _ = synthesize(spec, 64)
        assert a.digest() == b.digest()

    def test_channel_features_are_one_hot(self):
        spec = SyntheticSpec(kind="lossy-channel", n_labels=4, dim=4, noise_level=0.2)
        ds, _ = synthesize(spec, 50)
        rows = np.concatenate([ds.train_x, ds.test_x])
        np.testing.assert_array_equal(rows.sum(axis=1), np.ones(50))
        assert set(np.unique(rows)) == {0.0, 1.0}

    def test_noise_features_ignore_labels(self):
        spec = SyntheticSpec(kind="noise", n_labels=2, dim=4, seed=1)
        ds, mi = synthesize(spec, 40)
        assert mi == 0.0
        assert ds.train_x.shape == (32, 4)


class TestLosslessPair:
    def test_pair_shares_labels_and_targets(self):
        datasets, mi = make_lossless_pair(vocab_size=40, n_labels=4, d_random=16, n=200, seed=0)
        info, rand = datasets["informative"], datasets["random"]
        assert info.labels == rand.labels
        np.testing.assert_array_equal(info.train_y, rand.train_y)
        np.testing.assert_array_equal(info.test_y, rand.test_y)
        assert mi == pytest.approx(2.0, abs=1e-12)

    def test_informative_side_is_one_hot_of_label(self):
        datasets, _ = make_lossless_pair(vocab_size=40, n_labels=4, d_random=16, n=100, seed=0)
        info = datasets["informative"]
        assert info.input_dim == 4
        np.testing.assert_array_equal(np.argmax(info.train_x, axis=1), info.train_y)

    def test_random_side_uses_shared_type_vectors(self):
        datasets, _ = make_lossless_pair(vocab_size=10, n_labels=2, d_random=8, n=300, seed=0)
        rand = datasets["random"]
        rows = np.concatenate([rand.train_x, rand.test_x])
        distinct = np.unique(np.round(rows, 9), axis=0)
        assert distinct.shape[0] <= 10

    def test_uneven_vocabulary_entropy(self):
        _, mi = make_lossless_pair(vocab_size=5, n_labels=2, d_random=4, n=50, seed=0)
        p = np.array([3 / 5, 2 / 5])
        assert mi == pytest.approx(float(-(p * np.log2(p)).sum()), abs=1e-12)

    def test_vocab_must_cover_labels(self):
        with pytest.raises(ValueError, match="cannot cover"):
            make_lossless_pair(vocab_size=2, n_labels=3, d_random=4, n=10)
