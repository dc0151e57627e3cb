import pytest

from crfner.config import (
    ConfigError,
    parse_config_text,
    resolve_gazetteers,
)


def test_defaults():
    run = parse_config_text("")
    assert run.feature.context_window == 1
    assert run.feature.affix_min == 3
    assert run.feature.affix_max == 5
    assert run.feature.use_capital is False
    assert run.l2_sigma == 10.0
    assert run.max_iter == 200
    assert run.tol == 1e-5
    assert run.feature_cutoff == 1


def test_comments_and_blank_lines():
    run = parse_config_text("# a comment\n\nmax_iter = 50  # trailing\n")
    assert run.max_iter == 50


def test_unknown_key_is_named():
    with pytest.raises(ConfigError, match="contxt_window"):
        parse_config_text("contxt_window = 2\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("max_iter = 1\nmax_iter = 2\n")


def test_bad_value_types():
    with pytest.raises(ConfigError, match="context_window"):
        parse_config_text("context_window = wide\n")
    with pytest.raises(ConfigError, match="boolean"):
        parse_config_text("use_pos = maybe\n")
    with pytest.raises(ConfigError):
        parse_config_text("l2_sigma = -1\n")
    with pytest.raises(ConfigError):
        parse_config_text("affix_min = 0\n")


def test_english_preset():
    run = parse_config_text("language = en\n")
    assert run.feature.use_capital is True
    assert run.feature.gazetteers == ("person", "location")
    assert run.fold_case_for("person") is True


def test_indic_presets():
    bn = parse_config_text("language = bn\n")
    assert bn.feature.use_capital is False
    assert bn.feature.gazetteers == ("person", "location")
    assert bn.fold_case_for("person") is False
    hi = parse_config_text("language = hi\n")
    assert hi.feature.gazetteers == ("person",)
    ta = parse_config_text("language = ta\n")
    assert ta.feature.gazetteers == ()


def test_preset_applies_before_overrides():
    # the override wins no matter where the language line sits
    run = parse_config_text("use_capital = false\nlanguage = en\n")
    assert run.feature.use_capital is False


def test_unknown_language():
    with pytest.raises(ConfigError, match="language"):
        parse_config_text("language = fr\n")


def test_verb_tags_parse():
    run = parse_config_text("verb_tags = VM, VAUX\n")
    assert run.feature.verb_tags == {"VM", "VAUX"}


def test_gazetteer_paths_and_fold_case():
    run = parse_config_text(
        "gazetteer.person = /tmp/p.txt\n"
        "gazetteer.person.fold_case = true\n"
    )
    assert run.gazetteer_paths == {"person": "/tmp/p.txt"}
    assert run.fold_case_for("person") is True
    with pytest.raises(ConfigError, match="gazetteer..fold_case"):
        parse_config_text("gazetteer..fold_case = true\n")


def test_resolve_explicit_list_requires_paths():
    run = parse_config_text("gazetteers = person\n")
    with pytest.raises(ConfigError, match="person"):
        resolve_gazetteers(run)
    run = parse_config_text("gazetteers = person\ngazetteer.person = p.txt\n")
    assert resolve_gazetteers(run) == ("person",)


def test_resolve_preset_filters_to_available():
    run = parse_config_text("language = en\ngazetteer.person = p.txt\n")
    assert resolve_gazetteers(run) == ("person",)


def test_resolve_without_preset_uses_declared_files():
    run = parse_config_text(
        "gazetteer.loc = l.txt\ngazetteer.person = p.txt\n")
    assert resolve_gazetteers(run) == ("loc", "person")
