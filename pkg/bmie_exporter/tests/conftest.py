import pytest

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "cat", "sat", "on", "a", "mat", ".",
    "un", "##believ", "##able", "dog", "##s", "bark", "loudly",
    "it", "was", "!",
]

TREEBANK = """\
# sent_id = 1
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tcat\tcat\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tsat\tsit\tVERB\t_\t_\t0\troot\t_\t_
4\ton\ton\tADP\t_\t_\t6\tcase\t_\t_
5\ta\ta\tDET\t_\t_\t6\tdet\t_\t_
6\tmat\tmat\tNOUN\t_\t_\t3\tobl\t_\t_
7\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_

# sent_id = 2
1-2\tunbelievable dogs\t_\t_\t_\t_\t_\t_\t_\t_
1\tunbelievable\tunbelievable\tADJ\t_\t_\t2\tamod\t_\t_
2\tdogs\tdog\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tbark\tbark\tVERB\t_\t_\t0\troot\t_\t_
4\tloudly\tloudly\t_\t_\t_\t3\t_\t_\t_

# sent_id = 3
1\tIt\tit\tPRON\t_\t_\t3\tnsubj\t_\t_
2\twas\tbe\tAUX\t_\t_\t3\tcop\t_\t_
3\tunbelievable\tunbelievable\tADJ\t_\t_\t0\troot\t_\t_
4\t!\t!\tPUNCT\t_\t_\t3\tpunct\t_\t_
"""


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    import json

    import torch
    from transformers import BertConfig, BertModel

    root = tmp_path_factory.mktemp("checkpoint")
    (root / "vocab.txt").write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    (root / "tokenizer_config.json").write_text(
        json.dumps({"tokenizer_class": "BertTokenizer", "do_lower_case": True}),
        encoding="utf-8",
    )

    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=48,
    )
    torch.manual_seed(0)
    model = BertModel(config)
    model.save_pretrained(root)
    return root


@pytest.fixture(scope="session")
def treebank_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("treebank") / "fixture.conllu"
    path.write_text(TREEBANK, encoding="utf-8")
    return path
